use fresnel_tomo::format::DataFile;
use fresnel_tomo::reconstruct::{DensityMatrix, PsiAutocorrelation, WignerFunction};
use fresnel_tomo::tomography::{FresnelTomogram, OpticalTomogram, TomogramPlane};
use fresnel_tomo::{RealField2D, SampledWavefunction, UniformGrid1D};
use num_complex::Complex64;
use proptest::prelude::*;

fn any_f64() -> impl Strategy<Value = f64> {
    prop_oneof![
        -1e3..1e3f64,
        any::<f64>().prop_filter("finite", |v| v.is_finite()),
        Just(0.0),
        Just(-0.0),
        Just(f64::MIN_POSITIVE),
        Just(5e-324),
    ]
}

fn grid() -> impl Strategy<Value = UniformGrid1D> {
    (-50.0..50.0f64, 1e-3..2.0f64, 2usize..7).prop_map(|(s, h, n)| UniformGrid1D::new(s, h, n).unwrap())
}

fn field() -> impl Strategy<Value = RealField2D> {
    (grid(), grid()).prop_flat_map(|(gx, gy)| {
        prop::collection::vec(any_f64(), gx.count() * gy.count())
            .prop_map(move |v| RealField2D::new(gx, gy, v).unwrap())
    })
}

/// Tomograms reject negative samples.
fn nonnegative(f: &RealField2D) -> RealField2D {
    RealField2D::new(*f.grid_x(), *f.grid_y(), f.values().iter().map(|v| v.abs()).collect()).unwrap()
}

fn complex_values(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((any_f64(), any_f64()).prop_map(|(a, b)| Complex64::new(a, b)), n)
}

fn reparse(file: &DataFile) -> DataFile {
    DataFile::parse(&file.to_text()).unwrap()
}

fn same_bits(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits())
}

fn same_complex_bits(a: &[Complex64], b: &[Complex64]) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).all(|(x, y)| x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits())
}

proptest! {
    #[test]
    fn wavefunction(values in grid().prop_flat_map(|g| complex_values(g.count()).prop_map(move |v| (g, v)))) {
        let psi = SampledWavefunction::new(values.0, values.1).unwrap();
        let back = reparse(&DataFile::from_wavefunction(&psi)).to_wavefunction().unwrap();
        prop_assert_eq!(back.grid(), psi.grid());
        prop_assert!(same_complex_bits(back.values(), psi.values()));
    }

    #[test]
    fn plane(f in field(), nu in any_f64()) {
        let f = nonnegative(&f);
        let plane = TomogramPlane::new(nu, f).unwrap();
        let back = reparse(&DataFile::from_plane(&plane)).to_plane().unwrap();
        prop_assert_eq!(back.nu().to_bits(), nu.to_bits());
        prop_assert!(same_bits(back.field().values(), plane.field().values()));
        prop_assert_eq!(back.grid_mu(), plane.grid_mu());
    }

    #[test]
    fn fresnel_optical_wigner_width(f in field(), residue in 0.0..1.0f64) {
        let positive = nonnegative(&f);
        let wf = FresnelTomogram::new(positive.clone()).unwrap();
        let back = reparse(&DataFile::from_fresnel(&wf)).to_fresnel().unwrap();
        prop_assert!(same_bits(back.field().values(), positive.values()));

        let opt = OpticalTomogram::new(positive.clone()).unwrap();
        let back = reparse(&DataFile::from_optical(&opt)).to_optical().unwrap();
        prop_assert!(same_bits(back.field().values(), positive.values()));

        let w = WignerFunction::new(f.clone(), residue);
        let back = reparse(&DataFile::from_wigner(&w)).to_wigner().unwrap();
        prop_assert!(same_bits(back.field().values(), f.values()));
        prop_assert_eq!(back.imaginary_residue().to_bits(), residue.to_bits());

        let back = reparse(&DataFile::from_width_map(&f)).to_width_map().unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn density_matrix_and_autocorrelation(
        (g, v) in grid().prop_flat_map(|g| complex_values(g.count() * g.count()).prop_map(move |v| (g, v)))
    ) {
        let rho = DensityMatrix::new(g, v.clone()).unwrap();
        let back = reparse(&DataFile::from_density_matrix(&rho)).to_density_matrix().unwrap();
        prop_assert!(same_complex_bits(back.values(), rho.values()));

        let auto = PsiAutocorrelation::new(g, v[..g.count()].to_vec()).unwrap();
        let back = reparse(&DataFile::from_autocorrelation(&auto)).to_autocorrelation().unwrap();
        prop_assert!(same_complex_bits(back.values(), auto.values()));
    }
}

#[test]
fn written_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("psi.dat");
    let g = UniformGrid1D::new(-1.0, 0.1, 21).unwrap();
    let psi = SampledWavefunction::from_fn(g, |x| Complex64::new((x * 3.0).sin() / 7.0, x.exp() / 3.0));
    let file = DataFile::from_wavefunction(&psi).with_param("note", "test").with_provenance("unit");
    file.write(&path).unwrap();
    assert_eq!(DataFile::read(&path).unwrap(), file);
}
