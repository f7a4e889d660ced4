//! Oracle validation suite behind `fresnel-tomo validate`.
//!
//! Every check prints one `PASS` or `FAIL` line. Checks that decide between
//! competing readings of a closed form also print a `RESOLVED key=value`
//! line naming the reading the numerics support.

use std::f64::consts::PI;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::analytic::{
    density_matrix_direct, gcf_psi, gcf_tomogram_analytic, gcf_tomogram_ft_analytic, gcf_wavefunction, gcf_width,
    GcfParams,
};
use crate::format::DataFile;
use crate::grid::{dft2_at, trapezoid_integrate_real, RealField2D, SampledWavefunction, UniformGrid1D};
use crate::reconstruct::{
    plane_grids, psi_slice_at, reconstruct_density_matrix, reconstruct_density_matrix_fresnel,
    reconstruct_density_matrix_nd, reconstruct_psi_from_source, reconstruct_wigner, relative_error_up_to_phase,
    sample_plane, DensityMatrixNd, InversionConfig, PhaseConvention,
};
use crate::source::Product;
use crate::tomography::{
    fresnel_tomogram_value, optical_tomogram, symplectic_tomogram, symplectic_tomogram_plane, FresnelTomogram,
    NdWavefunction,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Fast,
    Full,
}

#[derive(Debug, Clone)]
pub struct ValidateOptions {
    pub level: Level,
    /// Directory of golden files, read by the full level.
    pub fixtures: PathBuf,
    /// Rewrite the golden files before checking them.
    pub regenerate: bool,
    pub color: bool,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        Self { level: Level::Fast, fixtures: default_fixture_dir(), regenerate: false, color: false }
    }
}

pub fn default_fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Report {
    pub passed: usize,
    pub failed: usize,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

struct Check {
    pass: bool,
    detail: String,
    resolved: Option<String>,
}

impl Check {
    fn new(pass: bool, detail: String) -> Self {
        Self { pass, detail, resolved: None }
    }
}

fn gcf(sigma: f64, alpha: f64) -> GcfParams {
    GcfParams::new(sigma, alpha).expect("valid parameters")
}

fn fine_psi(p: GcfParams) -> SampledWavefunction {
    gcf_wavefunction(p, p.default_grid(1601).expect("valid grid"))
}

fn grid(lo: f64, hi: f64, n: usize) -> UniformGrid1D {
    UniformGrid1D::from_range(lo, hi, n).expect("valid grid")
}

fn failed(e: impl std::fmt::Display) -> Check {
    Check::new(false, format!("error: {e}"))
}

/// `(winner, loser)` names ordered by error.
fn pick<'a>(a: (&'a str, f64), b: (&'a str, f64)) -> (&'a str, &'a str) {
    if a.1 <= b.1 {
        (a.0, b.0)
    } else {
        (b.0, a.0)
    }
}

fn closed_form_prefactor() -> Check {
    // sigma != 1 separates the two readings
    let p = gcf(0.5, 1.0);
    let psi = fine_psi(p);
    let s2 = 0.25;
    let (mut e4, mut e2) = (0.0f64, 0.0f64);
    for x in [-1.0, 0.0, 0.5, 1.5] {
        for mu in [-1.0, 0.5, 2.0] {
            for nu in [0.3, 1.0] {
                let num = match symplectic_tomogram(&psi, x, mu, nu) {
                    Ok(v) => v,
                    Err(e) => return failed(e),
                };
                let m = mu + 2.0 * p.alpha() * nu;
                let d4 = 4.0 * nu * nu + s2 * s2 * m * m;
                let d2 = 4.0 * nu * nu + s2 * m * m;
                let expo = (-2.0 * s2 * x * x / d4).exp();
                e4 = e4.max((num - (2.0 * s2 / (PI * d4)).sqrt() * expo).abs());
                e2 = e2.max((num - (2.0 * s2 / (PI * d2)).sqrt() * expo).abs());
            }
        }
    }
    let (win, _) = pick(("sigma4", e4), ("as_printed_sigma2", e2));
    Check {
        pass: win == "sigma4" && e4 <= 1e-6,
        detail: format!("max_err_sigma4={e4:.2e} max_err_sigma2={e2:.2e} tol=1e-6"),
        resolved: Some(format!("closed_form_prefactor={win} sigma4_err={e4:.2e} sigma2_err={e2:.2e}")),
    }
}

fn width_convention() -> Check {
    let p = gcf(0.5, 1.0);
    let psi = fine_psi(p);
    let s2 = 0.25;
    let x = 0.4;
    let (mut e4, mut e2) = (0.0f64, 0.0f64);
    for (mu, nu) in [(1.0, 0.2), (-0.5, 0.7), (2.0, 1.0), (0.3, -0.4)] {
        let (w0, wx) = match (symplectic_tomogram(&psi, 0.0, mu, nu), symplectic_tomogram(&psi, x, mu, nu)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => return failed(e),
        };
        let omega2 = x * x / (w0 / wx).ln();
        let m = mu + 2.0 * p.alpha() * nu;
        let printed = (m * m * s2 + 4.0 * nu * nu) / (2.0 * s2);
        e4 = e4.max((omega2 / gcf_width(p, mu, nu).powi(2) - 1.0).abs());
        e2 = e2.max((omega2 / printed - 1.0).abs());
    }
    let (win, _) = pick(("sigma4", e4), ("as_printed_sigma2", e2));
    Check {
        pass: win == "sigma4" && e4 <= 1e-6,
        detail: format!("rel_err_sigma4={e4:.2e} rel_err_sigma2={e2:.2e} tol=1e-6"),
        resolved: Some(format!("width={win} convention=exp(-X^2/omega^2) sigma4_err={e4:.2e} sigma2_err={e2:.2e}")),
    }
}

fn ft_closed_form() -> Check {
    let p = gcf(1.0, 1.0);
    let nu = 0.7;
    // untapered plane, wide enough that both truncations are far below the tolerance
    let field = RealField2D::from_fn(grid(-60.0, 60.0, 1201), grid(-12.0, 12.0, 241), |x, mu| {
        gcf_tomogram_analytic(p, x, mu, nu).unwrap_or(0.0)
    });
    let (mut printed, mut conjugate) = (0.0f64, 0.0f64);
    for (wx, wm) in [(1.0, -0.35), (1.0, 0.2), (1.5, -0.5), (-1.2, 0.4)] {
        let num = dft2_at(&field, wx, wm);
        let a = match gcf_tomogram_ft_analytic(p, wx, wm, nu) {
            Ok(v) => v,
            Err(e) => return failed(e),
        };
        printed = printed.max((num - a).norm());
        conjugate = conjugate.max((num - a.conj()).norm());
    }
    let slice = gcf_tomogram_ft_analytic(p, 1.0, -0.5 * nu, nu).unwrap_or_default();
    let anchor = (slice - gcf_psi(p, nu) * gcf_psi(p, 0.0).conj()).norm();
    let (win, _) = pick(("as_printed", printed), ("conjugate_phase", conjugate));
    Check {
        pass: win == "as_printed" && printed <= 1e-6 && anchor <= 1e-12,
        detail: format!(
            "err_as_printed={printed:.2e} err_conjugate={conjugate:.2e} tol=1e-6 slice_vs_psi_psi0={anchor:.1e}"
        ),
        resolved: Some(format!("ft_closed_form={win} err={printed:.2e} alternative_err={conjugate:.2e}")),
    }
}

fn optical_fresnel_relation() -> Check {
    let p = gcf(1.0, 1.0);
    let psi = fine_psi(p);
    let theta = 0.4f64;
    let (c, s) = (theta.cos(), theta.sin());
    let (mut tan_err, mut cot_err) = (0.0f64, 0.0f64);
    for x in [-1.0, -0.3, 0.2, 1.0] {
        let w = optical_tomogram(&psi, x, theta);
        tan_err = tan_err.max((w - fresnel_tomogram_value(&psi, x / c, s / c) / c.abs()).abs());
        cot_err = cot_err.max((w - fresnel_tomogram_value(&psi, x / s, c / s) / c.abs()).abs());
    }
    let (win, _) = pick(("tan_form", tan_err), ("as_printed_cot_form", cot_err));
    Check {
        pass: win == "tan_form" && tan_err <= 1e-8,
        detail: format!("theta={theta} err_tan={tan_err:.2e} err_cot={cot_err:.2e} tol=1e-8"),
        resolved: Some(format!(
            "optical_fresnel_relation={win} form=w(X,cos,sin)=w_F(X/cos,tan)/|cos| tan_err={tan_err:.2e} cot_err={cot_err:.2e}"
        )),
    }
}

/// xorshift draws so that runs are reproducible.
struct Draws(u64);

impl Draws {
    fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.0 ^= self.0 << 13;
        self.0 ^= self.0 >> 7;
        self.0 ^= self.0 << 17;
        lo + (hi - lo) * (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }
}

fn homogeneity() -> Check {
    let psi = fine_psi(gcf(1.0, 1.0));
    let mut rng = Draws(0x2545f4914f6cdd1d);
    let mut worst = 0.0f64;
    for lambda in [-2.0, 0.5, 3.0] {
        for _ in 0..20 {
            let (x, mu, nu) = (rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0), rng.uniform(0.1, 2.0));
            match (
                symplectic_tomogram(&psi, x, mu, nu),
                symplectic_tomogram(&psi, lambda * x, lambda * mu, lambda * nu),
            ) {
                (Ok(w), Ok(ws)) => worst = worst.max((ws - w / f64::abs(lambda)).abs() / w.max(1.0)),
                (Err(e), _) | (_, Err(e)) => return failed(e),
            }
        }
    }
    Check::new(worst <= 1e-8, format!("lambda=[-2,0.5,3] max_rel_err={worst:.2e} tol=1e-8"))
}

fn normalization_and_sign() -> Check {
    let psi = fine_psi(gcf(1.0, 1.0));
    let gx = grid(-20.0, 20.0, 801);
    let gm = grid(-2.0, 2.0, 9);
    let (mut norm, mut lowest) = (0.0f64, f64::INFINITY);
    for nu in [0.05, 0.5, 1.0, 2.0, -0.7] {
        let plane = match symplectic_tomogram_plane(&psi, gx, gm, nu) {
            Ok(p) => p,
            Err(e) => return failed(e),
        };
        for j in 0..gm.count() {
            let col: Vec<f64> = (0..gx.count()).map(|i| plane.field().at(i, j)).collect();
            let total = trapezoid_integrate_real(&col, gx.step()).unwrap_or(f64::NAN);
            norm = norm.max((total - 1.0).abs());
        }
        lowest = plane.field().values().iter().fold(lowest, |m, &v| m.min(v));
    }
    Check::new(
        norm <= 1e-4 && lowest >= -1e-10,
        format!("max_norm_err={norm:.2e} tol=1e-4 min_value={lowest:.2e} floor=-1e-10"),
    )
}

fn chirp_shift_and_unit_mu() -> Check {
    let psi = fine_psi(gcf(1.0, 1.0));
    let psi0 = fine_psi(gcf(1.0, 0.0));
    let mut rng = Draws(0x9e3779b97f4a7c15);
    let (mut chirp, mut unit) = (0.0f64, 0.0f64);
    for _ in 0..20 {
        let (x, mu, nu) = (rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0), rng.uniform(0.1, 2.0));
        match (symplectic_tomogram(&psi, x, mu, nu), symplectic_tomogram(&psi0, x, mu + 2.0 * nu, nu)) {
            (Ok(a), Ok(b)) => chirp = chirp.max((a - b).abs()),
            (Err(e), _) | (_, Err(e)) => return failed(e),
        }
        match symplectic_tomogram(&psi, x, 1.0, nu) {
            Ok(s) => unit = unit.max((fresnel_tomogram_value(&psi, x, nu) - s).abs()),
            Err(e) => return failed(e),
        }
    }
    Check::new(
        chirp <= 1e-8 && unit <= 1e-10,
        format!("chirp_shift_err={chirp:.2e} tol=1e-8 fresnel_unit_mu_err={unit:.2e} tol=1e-10"),
    )
}

fn slice_phase() -> Check {
    let cfg = InversionConfig::default();
    let (px, pm) = match plane_grids(&cfg) {
        Ok(g) => g,
        Err(e) => return failed(e),
    };
    let mut worst = 0.0f64;
    for alpha in [0.5, 1.0, 3.0] {
        let q = gcf(1.0, alpha);
        for nu in [0.25, 0.5, 1.0] {
            let plane = match sample_plane(&q, px, pm, nu) {
                Ok(p) => p,
                Err(e) => return failed(e),
            };
            let d = psi_slice_at(&plane, &cfg).arg() - alpha * nu * nu;
            worst = worst.max((d - 2.0 * PI * (d / (2.0 * PI)).round()).abs());
        }
    }
    Check::new(worst <= 1e-3, format!("max_phase_err={worst:.2e} tol=1e-3 expected=alpha*nu^2"))
}

fn psi_case(sigma: f64, alpha: f64) -> std::result::Result<f64, crate::TomoError> {
    let p = gcf(sigma, alpha);
    let g = grid(-4.0 * sigma, 4.0 * sigma, 129);
    let rec = reconstruct_psi_from_source(&p, g, PhaseConvention::OriginRealPositive, &InversionConfig::default())?;
    relative_error_up_to_phase(&rec.psi, &gcf_wavefunction(p, g).normalized())
}

fn psi_recovery(cases: &[(f64, f64)]) -> Check {
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for &(s, a) in cases {
        match psi_case(s, a) {
            Ok(err) => {
                worst = worst.max(err);
                parts.push(format!("s{s}a{a}={err:.1e}"));
            }
            Err(e) => return failed(e),
        }
    }
    Check::new(worst <= 1e-3, format!("max_rel_l2={worst:.2e} tol=1e-3 points=129 {}", parts.join(" ")))
}

fn density_matrix_check() -> Check {
    let g = grid(-3.0, 3.0, 13);
    let cfg = InversionConfig::default();
    let p = gcf(1.0, 1.0);
    let result = (|| {
        let rho = reconstruct_density_matrix(&p, g, &cfg)?;
        let fresnel = reconstruct_density_matrix_fresnel(p, g, &cfg)?;
        Ok::<_, crate::TomoError>((rho, fresnel))
    })();
    match result {
        Ok((rho, fresnel)) => {
            let err = rho.max_abs_diff(&density_matrix_direct(&gcf_wavefunction(p, g)));
            let path = rho.max_abs_diff(&fresnel);
            Check::new(
                err <= 5e-3 && path <= 1e-6,
                format!(
                    "max_abs_err={err:.2e} tol=5e-3 fresnel_path_diff={path:.2e} tol=1e-6 asymmetry={:.1e}",
                    rho.asymmetry()
                ),
            )
        }
        Err(e) => failed(e),
    }
}

fn wigner_origin() -> Check {
    let cfg = InversionConfig { mu_window: 12.0, x_window: 12.0, ..Default::default() };
    let g = grid(-0.5, 0.5, 3);
    match reconstruct_wigner(&gcf(2f64.sqrt(), 0.0), g, g, &cfg) {
        Ok(w) => {
            let w00 = w.field().at(1, 1);
            let err = (w00 - 1.0 / PI).abs();
            Check::new(
                err <= 5e-3,
                format!("W00={w00:.6} expected=1/pi err={err:.2e} tol=5e-3 imag={:.1e}", w.imaginary_residue()),
            )
        }
        Err(e) => failed(e),
    }
}

fn figure_claim() -> Check {
    let alphas = [0.5, 1.0, 2.0, 3.0];
    let gx = grid(-6.0, 6.0, 1201);
    let peak = |sigma: f64, alpha: f64| {
        gx.points().map(|x| gcf_tomogram_analytic(gcf(sigma, alpha), x, 1.0, 0.5).unwrap_or(0.0)).fold(0.0, f64::max)
    };
    let wide: Vec<f64> = alphas.iter().map(|&a| peak(1.0, a)).collect();
    let narrow: Vec<f64> = alphas.iter().map(|&a| peak(0.5, a)).collect();
    let decreasing = wide.windows(2).all(|w| w[1] < w[0]);
    let drop_wide = 1.0 - wide[3] / wide[0];
    let drop_narrow = 1.0 - narrow[3] / narrow[0];
    Check::new(
        decreasing && drop_narrow < drop_wide,
        format!("nu'=0.5 peak_drop_sigma1={drop_wide:.4} peak_drop_sigma0.5={drop_narrow:.4} monotone={decreasing}"),
    )
}

fn nd_separability() -> Check {
    let cfg =
        InversionConfig { mu_window: 4.0, mu_step: Some(0.5), x_window: 5.0, x_step: Some(0.25), ..Default::default() };
    let g = grid(-1.0, 1.0, 5);
    let (p1, p2) = (gcf(1.0, 0.5), gcf(0.8, 0.0));
    let result = (|| {
        // a general two-mode wavefunction that happens to factorise
        let f1 = gcf_wavefunction(p1, p1.default_grid(161)?);
        let f2 = gcf_wavefunction(p2, p2.default_grid(161)?);
        let mut values = Vec::with_capacity(161 * 161);
        for a in f1.values() {
            for b in f2.values() {
                values.push(a * b);
            }
        }
        let general = NdWavefunction::new(vec![*f1.grid(), *f2.grid()], values)?;
        let separable = NdWavefunction::separable(vec![f1, f2])?;
        let x = [0.3, -0.4];
        let (mu, nu) = ([0.8, -1.1], [0.6, 0.9]);
        let tomo_diff = (crate::tomography::symplectic_tomogram_nd(&general, &x, &mu, &nu)?
            - crate::tomography::symplectic_tomogram_nd(&separable, &x, &mu, &nu)?)
        .abs();
        let nd = reconstruct_density_matrix_nd(&Product(vec![p1, p2]), &[g, g], &cfg)?;
        let r1 = reconstruct_density_matrix(&p1, g, &cfg)?;
        let r2 = reconstruct_density_matrix(&p2, g, &cfg)?;
        Ok::<_, crate::TomoError>((tomo_diff, nd.max_abs_diff(&DensityMatrixNd::tensor_product(&r1, &r2))))
    })();
    match result {
        Ok((tomo, sep)) => Check::new(
            tomo <= 1e-6 && sep <= 1e-4,
            format!("general_vs_product_tomogram={tomo:.2e} tol=1e-6 rho_vs_tensor_product={sep:.2e} tol=1e-4"),
        ),
        Err(e) => failed(e),
    }
}

fn fmt_param(v: f64) -> String {
    format!("{v}")
}

/// Golden GCF parameter set.
pub const FIXTURE_SIGMAS: [f64; 2] = [0.5, 1.0];
pub const FIXTURE_ALPHAS: [f64; 5] = [0.0, 0.5, 1.0, 2.0, 3.0];

fn fixture_name(sigma: f64, alpha: f64) -> String {
    format!("gcf_sigma{}_alpha{}.dat", fmt_param(sigma), fmt_param(alpha))
}

/// `w(X', 1, nu')` of the analytic model on the fixture grid.
pub fn fixture_plane(sigma: f64, alpha: f64) -> crate::Result<FresnelTomogram> {
    let p = GcfParams::new(sigma, alpha)?;
    FresnelTomogram::new(RealField2D::from_fn(grid(-4.0, 4.0, 81), grid(-2.0, 2.0, 41), |x, nu| {
        gcf_tomogram_analytic(p, x, 1.0, nu).unwrap_or(0.0)
    }))
}

fn golden_psi() -> SampledWavefunction {
    gcf_wavefunction(gcf(1.0, 0.0), grid(-8.0, 8.0, 321))
}

fn golden_symplectic_plane() -> crate::Result<crate::TomogramPlane> {
    let p = gcf(1.0, 0.0);
    sample_plane(&p, grid(-4.0, 4.0, 81), grid(-2.0, 2.0, 21), 1.0)
}

/// Writes every golden file into `dir`.
pub fn write_fixtures(dir: &Path) -> std::result::Result<usize, String> {
    std::fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    let mut written = 0;
    for sigma in FIXTURE_SIGMAS {
        for alpha in FIXTURE_ALPHAS {
            let plane = fixture_plane(sigma, alpha).map_err(|e| e.to_string())?;
            DataFile::from_fresnel(&plane)
                .with_param("sigma", sigma)
                .with_param("alpha", alpha)
                .with_param("mu", 1.0)
                .with_provenance("fresnel-tomo validate --regenerate (analytic w(X', 1, nu'))")
                .write(dir.join(fixture_name(sigma, alpha)))
                .map_err(|e| e.to_string())?;
            written += 1;
        }
    }
    DataFile::from_wavefunction(&golden_psi())
        .with_param("sigma", 1.0)
        .with_param("alpha", 0.0)
        .with_provenance("fresnel-tomo validate --regenerate (analytic psi)")
        .write(dir.join("psi_sigma1_alpha0.dat"))
        .map_err(|e| e.to_string())?;
    let plane = golden_symplectic_plane().map_err(|e| e.to_string())?;
    DataFile::from_plane(&plane)
        .with_param("sigma", 1.0)
        .with_param("alpha", 0.0)
        .with_provenance("fresnel-tomo validate --regenerate (analytic symplectic plane)")
        .write(dir.join("plane_sigma1_alpha0_nu1.dat"))
        .map_err(|e| e.to_string())?;
    Ok(written + 2)
}

fn fixtures_match(dir: &Path) -> Check {
    let mut worst = 0.0f64;
    let mut files = 0;
    for sigma in FIXTURE_SIGMAS {
        for alpha in FIXTURE_ALPHAS {
            let path = dir.join(fixture_name(sigma, alpha));
            let stored = match DataFile::read(&path).and_then(|f| f.to_fresnel()) {
                Ok(s) => s,
                Err(e) => return failed(e),
            };
            let fresh = match fixture_plane(sigma, alpha) {
                Ok(f) => f,
                Err(e) => return failed(e),
            };
            if stored.grid_x() != fresh.grid_x() || stored.grid_nu() != fresh.grid_nu() {
                return Check::new(false, format!("{}: grid differs from the analytic fixture grid", path.display()));
            }
            for (a, b) in stored.field().values().iter().zip(fresh.field().values()) {
                worst = worst.max((a - b).abs());
            }
            files += 1;
        }
    }
    Check::new(worst <= 1e-12, format!("files={files} max_abs_diff={worst:.2e} tol=1e-12"))
}

fn golden_plane_match(dir: &Path) -> Check {
    let psi = match DataFile::read(dir.join("psi_sigma1_alpha0.dat")).and_then(|f| f.to_wavefunction()) {
        Ok(p) => p,
        Err(e) => return failed(e),
    };
    let golden = match DataFile::read(dir.join("plane_sigma1_alpha0_nu1.dat")).and_then(|f| f.to_plane()) {
        Ok(p) => p,
        Err(e) => return failed(e),
    };
    match symplectic_tomogram_plane(&psi, *golden.grid_x(), *golden.grid_mu(), golden.nu()) {
        Ok(plane) => {
            let worst = plane
                .field()
                .values()
                .iter()
                .zip(golden.field().values())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            Check::new(worst <= 1e-6, format!("nu={} max_abs_diff={worst:.2e} tol=1e-6", golden.nu()))
        }
        Err(e) => failed(e),
    }
}

fn paint(line: &str, code: &str, color: bool) -> String {
    if color {
        format!("\x1b[{code}m{line}\x1b[0m")
    } else {
        line.to_string()
    }
}

/// Runs the suite, streaming one line per check to `out`.
pub fn run_validation(opts: &ValidateOptions, out: &mut dyn Write) -> io::Result<Report> {
    let mut report = Report::default();
    if opts.regenerate {
        match write_fixtures(&opts.fixtures) {
            Ok(n) => writeln!(out, "NOTE regenerated {n} fixture files in {}", opts.fixtures.display())?,
            Err(e) => {
                writeln!(out, "{} fixtures_regenerate: {e}", paint("FAIL", "31", opts.color))?;
                report.failed += 1;
            }
        }
    }

    let mut checks: Vec<(&str, Box<dyn Fn() -> Check>)> = vec![
        ("closed_form_prefactor", Box::new(closed_form_prefactor)),
        ("width_convention", Box::new(width_convention)),
        ("ft_closed_form", Box::new(ft_closed_form)),
        ("optical_fresnel_relation", Box::new(optical_fresnel_relation)),
        ("homogeneity", Box::new(homogeneity)),
        ("normalization_nonnegativity", Box::new(normalization_and_sign)),
        ("chirp_shift_unit_mu", Box::new(chirp_shift_and_unit_mu)),
        ("slice_phase", Box::new(slice_phase)),
        ("density_matrix", Box::new(density_matrix_check)),
        ("wigner_origin", Box::new(wigner_origin)),
        ("figure_claim", Box::new(figure_claim)),
    ];
    match opts.level {
        Level::Fast => checks.push(("psi_recovery", Box::new(|| psi_recovery(&[(1.0, 1.0)])))),
        Level::Full => {
            let all: Vec<(f64, f64)> =
                FIXTURE_SIGMAS.iter().flat_map(|&s| FIXTURE_ALPHAS.iter().map(move |&a| (s, a))).collect();
            checks.push(("psi_recovery", Box::new(move || psi_recovery(&all))));
            checks.push(("nd_separability", Box::new(nd_separability)));
            let dir = opts.fixtures.clone();
            let dir2 = opts.fixtures.clone();
            checks.push(("fixtures_analytic", Box::new(move || fixtures_match(&dir))));
            checks.push(("fixtures_symplectic_plane", Box::new(move || golden_plane_match(&dir2))));
        }
    }

    for (name, check) in checks {
        let start = Instant::now();
        let c = check();
        let secs = start.elapsed().as_secs_f64();
        if let Some(r) = &c.resolved {
            writeln!(out, "{}", paint(&format!("RESOLVED {r}"), "36", opts.color))?;
        }
        let tag = if c.pass { paint("PASS", "32", opts.color) } else { paint("FAIL", "31", opts.color) };
        writeln!(out, "{tag} {name}: {} time={secs:.2}s", c.detail)?;
        if c.pass {
            report.passed += 1;
        } else {
            report.failed += 1;
        }
    }
    Ok(report)
}
