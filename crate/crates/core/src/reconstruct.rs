//! Inversion: tomogram data back to the wavefunction, the density matrix and
//! the Wigner function.
//!
//! The wavefunction route works plane by plane. For each `nu` the tomogram
//! `w(X, mu, nu)` is tapered, Fourier transformed in `(X, mu)` and evaluated
//! at the frequencies `(1, -nu/2)`, which gives `psi(nu) psi*(0)`. The
//! `nu = 0` plane supplies `|psi(0)|^2`, fixing `psi` up to the convention
//! that `psi(0)` is real and positive.
//!
//! The density matrix and Wigner routes go through the characteristic
//! function `chi(mu, nu) = int w(Y, mu, nu) exp(iY) dY`. Homogeneity lets it
//! be evaluated on the unit circle, `chi = int w(Y, mu/r, nu/r) exp(i r Y) dY`
//! with `r = |(mu, nu)|`, where the tomogram keeps a bounded width however
//! large `mu` grows.

use std::borrow::Borrow;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result, TomoError};
use crate::grid::{
    dft2_at, fft2, fft_frequency, ComplexField2D, FftSign, RealField2D, SampledWavefunction, Taper, UniformGrid1D,
};
use crate::source::{FresnelSource, FresnelSourceNd, FromFresnel, FromFresnelNd, TomogramSource, TomogramSourceNd};
use crate::tomography::{TomogramPlane, NU_EPSILON};

/// Density matrix `rho(X, X')` on a square grid, row-major in `X`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    grid: UniformGrid1D,
    values: Vec<Complex64>,
    asymmetry: f64,
}

impl DensityMatrix {
    pub fn new(grid: UniformGrid1D, values: Vec<Complex64>) -> Result<Self> {
        let n = grid.count();
        if values.len() != n * n {
            return Err(TomoError::Shape(format!("{} values for a {n}x{n} matrix", values.len())));
        }
        Ok(Self { grid, values, asymmetry: 0.0 })
    }

    pub fn grid(&self) -> &UniformGrid1D {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.grid.count() + j]
    }

    /// Sum of the diagonal. Multiply by the grid step for the continuous trace.
    pub fn trace(&self) -> Complex64 {
        (0..self.grid.count()).map(|i| self.at(i, i)).sum()
    }

    /// `max |rho_ij - conj(rho_ji)|` of the matrix as it stands.
    pub fn hermitian_defect(&self) -> f64 {
        hermitian_defect(&self.values, self.grid.count())
    }

    /// Pre-symmetrisation defect recorded by the reconstruction, zero for
    /// matrices built directly.
    pub fn asymmetry(&self) -> f64 {
        self.asymmetry
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        max_abs_diff(&self.values, &other.values)
    }
}

fn hermitian_defect(values: &[Complex64], n: usize) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((values[i * n + j] - values[j * n + i].conj()).norm());
        }
    }
    worst
}

fn symmetrize(values: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in i..n {
            let avg = 0.5 * (values[i * n + j] + values[j * n + i].conj());
            values[i * n + j] = avg;
            values[j * n + i] = avg.conj();
        }
    }
}

fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Real Wigner function on a `(q, p)` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerFunction {
    field: RealField2D,
    imaginary_residue: f64,
}

impl WignerFunction {
    pub fn new(field: RealField2D, imaginary_residue: f64) -> Self {
        Self { field, imaginary_residue }
    }

    pub fn field(&self) -> &RealField2D {
        &self.field
    }

    pub fn grid_q(&self) -> &UniformGrid1D {
        self.field.grid_x()
    }

    pub fn grid_p(&self) -> &UniformGrid1D {
        self.field.grid_y()
    }

    /// Largest discarded imaginary part.
    pub fn imaginary_residue(&self) -> f64 {
        self.imaginary_residue
    }

    /// Riemann sum `sum W dq dp`.
    pub fn total(&self) -> f64 {
        self.field.values().iter().sum::<f64>() * self.grid_q().step() * self.grid_p().step()
    }

    /// `sum_p W(q_i, p) dp` for every `q_i`.
    pub fn position_marginal(&self) -> Vec<f64> {
        let dp = self.grid_p().step();
        (0..self.grid_q().count()).map(|i| self.field.row(i).iter().sum::<f64>() * dp).collect()
    }
}

/// Samples of `psi(nu) psi*(0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PsiAutocorrelation {
    grid_nu: UniformGrid1D,
    values: Vec<Complex64>,
}

impl PsiAutocorrelation {
    pub fn new(grid_nu: UniformGrid1D, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid_nu.count() {
            return Err(TomoError::Shape(format!("{} values for {} nodes", values.len(), grid_nu.count())));
        }
        Ok(Self { grid_nu, values })
    }

    pub fn grid_nu(&self) -> &UniformGrid1D {
        &self.grid_nu
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }
}

/// Discretisation of the unbounded inversion integrals.
///
/// `mu_window` and `x_window` are half-widths. Steps left unset are derived
/// as `2 * window / samples_per_axis`. `taper_fraction` is the raised-cosine
/// roll-off on the `mu` axis (and the `nu` axis of the Wigner integral);
/// `x_taper_fraction` sets the error-function roll-off on the `X` axis of
/// tomogram planes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InversionConfig {
    pub mu_window: f64,
    pub taper_fraction: f64,
    pub x_window: f64,
    pub samples_per_axis: usize,
    pub x_taper_fraction: f64,
    pub mu_step: Option<f64>,
    pub x_step: Option<f64>,
    /// Anchor estimates `psi(0) psi*(0)` at or below this value are treated
    /// as a node at the origin.
    pub anchor_floor: f64,
}

impl Default for InversionConfig {
    fn default() -> Self {
        Self {
            mu_window: 40.0,
            taper_fraction: 0.2,
            x_window: 48.0,
            samples_per_axis: 128,
            x_taper_fraction: 0.5,
            mu_step: Some(0.25),
            x_step: Some(0.05),
            anchor_floor: 1e-12,
        }
    }
}

impl InversionConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(invalid(format!("{name} must be positive and finite, got {v}")))
            }
        };
        positive("mu_window", self.mu_window)?;
        positive("x_window", self.x_window)?;
        if !(self.anchor_floor >= 0.0 && self.anchor_floor.is_finite()) {
            return Err(invalid("anchor_floor must be finite and nonnegative"));
        }
        if self.samples_per_axis < 2 {
            return Err(invalid("samples_per_axis must be at least 2"));
        }
        if let Some(s) = self.mu_step {
            positive("mu_step", s)?;
        }
        if let Some(s) = self.x_step {
            positive("x_step", s)?;
        }
        for (name, f) in [("taper_fraction", self.taper_fraction), ("x_taper_fraction", self.x_taper_fraction)] {
            if !(0.0..1.0).contains(&f) {
                return Err(invalid(format!("{name} must lie in [0, 1), got {f}")));
            }
        }
        Ok(())
    }

    pub fn mu_step(&self) -> f64 {
        self.mu_step.unwrap_or(2.0 * self.mu_window / self.samples_per_axis as f64)
    }

    pub fn x_step(&self) -> f64 {
        self.x_step.unwrap_or(2.0 * self.x_window / self.samples_per_axis as f64)
    }

    /// Cell-centred `mu` nodes over `[-mu_window, mu_window]`; `mu = 0` is
    /// never sampled.
    pub fn mu_grid(&self) -> Result<UniformGrid1D> {
        UniformGrid1D::midpoints(self.mu_window, self.mu_step())
    }

    /// `X` nodes over `[-x_window, x_window]`, origin included.
    pub fn x_grid(&self) -> Result<UniformGrid1D> {
        UniformGrid1D::centered(self.x_window, self.x_step())
    }

    fn mu_taper(&self) -> Taper {
        Taper::RaisedCosine { fraction: self.taper_fraction }
    }

    fn x_taper(&self) -> Taper {
        Taper::SmoothEdge { fraction: self.x_taper_fraction }
    }
}

/// `(X, mu)` grids of the tomogram planes expected by [`reconstruct_psi`].
pub fn plane_grids(cfg: &InversionConfig) -> Result<(UniformGrid1D, UniformGrid1D)> {
    cfg.validate()?;
    Ok((cfg.x_grid()?, cfg.mu_grid()?))
}

/// Samples `source` over an `(X, mu)` grid at fixed `nu`.
pub fn sample_plane<S: TomogramSource + ?Sized>(
    source: &S,
    grid_x: UniformGrid1D,
    grid_mu: UniformGrid1D,
    nu: f64,
) -> Result<TomogramPlane> {
    let nm = grid_mu.count();
    let mut values = vec![0.0; grid_x.count() * nm];
    let mut column = vec![0.0; grid_x.count()];
    for (j, mu) in grid_mu.points().enumerate() {
        source.tomogram_row(&grid_x, mu, nu, &mut column)?;
        for (i, v) in column.iter().enumerate() {
            values[i * nm + j] = *v;
        }
    }
    TomogramPlane::new(nu, RealField2D::new(grid_x, grid_mu, values)?)
}

/// The plane multiplied by the `X` and `mu` tapers of `cfg`.
pub fn tapered_plane(plane: &TomogramPlane, cfg: &InversionConfig) -> RealField2D {
    let wx = cfg.x_taper().weights(plane.grid_x());
    let wm = cfg.mu_taper().weights(plane.grid_mu());
    let nm = wm.len();
    let mut field = plane.field().clone();
    for (k, v) in field.values_mut().iter_mut().enumerate() {
        *v *= wx[k / nm] * wm[k % nm];
    }
    field
}

/// `(1/2pi) int int w(X, mu, nu) exp(i(omega_x X + omega_mu mu)) dX dmu` on
/// the FFT frequency lattice of the tapered plane.
///
/// The output grids hold the true angular frequencies in ascending order;
/// the zero-frequency bin sits at index `(count - 1) / 2` on each axis.
pub fn tomogram_ft2(plane: &TomogramPlane, cfg: &InversionConfig) -> Result<ComplexField2D> {
    cfg.validate()?;
    let tapered = tapered_plane(plane, cfg);
    let gx = *plane.grid_x();
    let gm = *plane.grid_mu();
    let raw = fft2(&tapered.to_complex(), FftSign::Positive);
    let (nx, nm) = (gx.count(), gm.count());
    let scale = gx.step() * gm.step() / (2.0 * PI);

    let shifted = |n: usize, g: &UniformGrid1D| -> Result<(UniformGrid1D, Vec<usize>)> {
        let half = (n - 1) / 2;
        let freq =
            UniformGrid1D::new(fft_frequency(n - half, n, g.step()).min(0.0), 2.0 * PI / (n as f64 * g.step()), n)?;
        let order = (0..n).map(|k| (k + n - half) % n).collect();
        Ok((freq, order))
    };
    let (fx, ox) = shifted(nx, &gx)?;
    let (fm, om) = shifted(nm, &gm)?;

    let mut values = Vec::with_capacity(nx * nm);
    for &r in &ox {
        let wx = fft_frequency(r, nx, gx.step());
        for &s in &om {
            let wm = fft_frequency(s, nm, gm.step());
            let origin = Complex64::from_polar(scale, wx * gx.start() + wm * gm.start());
            values.push(raw.values()[r * nm + s] * origin);
        }
    }
    ComplexField2D::new(fx, fm, values)
}

/// Estimate of `psi(nu) psi*(0)` from one plane: the tapered plane's Fourier
/// integral evaluated exactly at `(omega_x, omega_mu) = (1, -nu/2)`.
pub fn psi_slice_at(plane: &TomogramPlane, cfg: &InversionConfig) -> Complex64 {
    dft2_at(&tapered_plane(plane, cfg), 1.0, -0.5 * plane.nu())
}

/// How the undetermined global phase is fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseConvention {
    /// `psi(0)` real and positive.
    #[default]
    OriginRealPositive,
}

/// Output of [`reconstruct_psi`].
#[derive(Debug, Clone, PartialEq)]
pub struct PsiReconstruction {
    /// Unit-norm wavefunction on the `nu` grid of the planes.
    pub psi: SampledWavefunction,
    pub autocorrelation: PsiAutocorrelation,
    /// L2 norm before renormalisation; close to one for clean data.
    pub norm_before: f64,
}

/// Recovers `psi` from tomogram planes over a uniform `nu` grid that
/// includes `nu = 0`. Planes may arrive in any order and are consumed one at
/// a time.
pub fn reconstruct_psi<I>(planes: I, convention: PhaseConvention, cfg: &InversionConfig) -> Result<PsiReconstruction>
where
    I: IntoIterator,
    I::Item: Borrow<TomogramPlane>,
{
    cfg.validate()?;
    let mut slices: Vec<(f64, Complex64)> =
        planes.into_iter().map(|p| (p.borrow().nu(), psi_slice_at(p.borrow(), cfg))).collect();
    assemble_psi(&mut slices, convention, cfg.anchor_floor)
}

/// [`reconstruct_psi`] with the planes sampled lazily from `source` on the
/// grids of [`plane_grids`].
pub fn reconstruct_psi_from_source<S: TomogramSource + ?Sized>(
    source: &S,
    grid_nu: UniformGrid1D,
    convention: PhaseConvention,
    cfg: &InversionConfig,
) -> Result<PsiReconstruction> {
    let (gx, gm) = plane_grids(cfg)?;
    let mut slices = Vec::with_capacity(grid_nu.count());
    for nu in grid_nu.points() {
        let nu = if nu.abs() < 1e-12 * grid_nu.step() { 0.0 } else { nu };
        let plane = sample_plane(source, gx, gm, nu)?;
        slices.push((nu, psi_slice_at(&plane, cfg)));
    }
    assemble_psi(&mut slices, convention, cfg.anchor_floor)
}

fn assemble_psi(slices: &mut [(f64, Complex64)], convention: PhaseConvention, floor: f64) -> Result<PsiReconstruction> {
    let PhaseConvention::OriginRealPositive = convention;
    if slices.is_empty() {
        return Err(invalid("no tomogram planes supplied"));
    }
    slices.sort_by(|a, b| a.0.total_cmp(&b.0));
    let anchor = slices.iter().position(|s| s.0.abs() <= NU_EPSILON).ok_or(TomoError::MissingAnchor)?;
    if slices.len() < 2 {
        return Err(invalid("at least two planes are needed to span a nu grid"));
    }
    let start = slices[0].0;
    let step = (slices[slices.len() - 1].0 - start) / (slices.len() - 1) as f64;
    for (k, s) in slices.iter().enumerate() {
        if (s.0 - (start + k as f64 * step)).abs() > 1e-9 * step.max(1.0) || step <= 0.0 {
            return Err(invalid(format!("plane nu values do not form a uniform grid (at nu = {})", s.0)));
        }
    }
    let origin = slices[anchor].1.re;
    if !(origin > floor.max(1e-12)) {
        return Err(TomoError::NodeAtOrigin(origin));
    }
    let grid = UniformGrid1D::new(start, step, slices.len())?;
    let auto: Vec<Complex64> = slices.iter().map(|s| s.1).collect();
    let psi0 = origin.sqrt();
    let mut psi = SampledWavefunction::new(grid, auto.iter().map(|v| v / psi0).collect())?;
    let norm_before = psi.normalize();
    Ok(PsiReconstruction { psi, autocorrelation: PsiAutocorrelation::new(grid, auto)?, norm_before })
}

/// `min over phi of ||a - e^{i phi} b|| / ||b||` for wavefunctions on the
/// same grid.
pub fn relative_error_up_to_phase(a: &SampledWavefunction, b: &SampledWavefunction) -> Result<f64> {
    if a.grid() != b.grid() {
        return Err(TomoError::Shape("wavefunctions live on different grids".into()));
    }
    let overlap: Complex64 = a.values().iter().zip(b.values()).map(|(x, y)| x * y.conj()).sum();
    let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { Complex64::new(1.0, 0.0) };
    let num: f64 = a.values().iter().zip(b.values()).map(|(x, y)| (x - phase * y).norm_sqr()).sum();
    let den: f64 = b.values().iter().map(|y| y.norm_sqr()).sum();
    Ok((num / den).sqrt())
}

/// `sum_k w(Y_k, mu/r, nu/r) exp(i r Y_k) dY` over the untapered `X` window
/// of `cfg`, which equals `int w(Y, mu, nu) exp(iY) dY` by homogeneity.
pub fn characteristic<S: TomogramSource + ?Sized>(
    source: &S,
    mu: f64,
    nu: f64,
    grid_y: &UniformGrid1D,
) -> Result<Complex64> {
    let r = mu.hypot(nu);
    if r <= NU_EPSILON {
        // chi(0, 0) is the normalisation; no direction to evaluate along
        return Err(TomoError::Degenerate { mu, nu });
    }
    let (mh, nh) = (mu / r, nu / r);
    let n = grid_y.count();
    let h = grid_y.step();
    let dz = Complex64::from_polar(1.0, r * h);
    let mut z = Complex64::from_polar(1.0, r * grid_y.start());
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..n {
        if k % 64 == 0 {
            z = Complex64::from_polar(1.0, r * grid_y.point(k));
        }
        let w = source.tomogram(grid_y.point(k), mh, nh)?;
        let weight = if k == 0 || k + 1 == n { 0.5 } else { 1.0 };
        acc += z * (w * weight);
        z *= dz;
    }
    Ok(acc * h)
}

/// `rho(X, X') = (1/2pi) int chi(mu, X - X') exp(-i mu (X + X')/2) dmu` over
/// the tapered `mu` window, then Hermitian-symmetrised. The defect before
/// symmetrisation is kept in [`DensityMatrix::asymmetry`].
pub fn reconstruct_density_matrix<S: TomogramSource + ?Sized>(
    source: &S,
    grid: UniformGrid1D,
    cfg: &InversionConfig,
) -> Result<DensityMatrix> {
    cfg.validate()?;
    let gm = cfg.mu_grid()?;
    let gy = cfg.x_grid()?;
    let taper = cfg.mu_taper().weights(&gm);
    let n = grid.count();
    let h = grid.step();
    let mut values = vec![Complex64::new(0.0, 0.0); n * n];
    // chi depends on X - X' = d h only, so one mu sweep per diagonal
    for d in -(n as i64 - 1)..=(n as i64 - 1) {
        let nu = d as f64 * h;
        let chi = gm
            .points()
            .zip(&taper)
            .map(|(mu, t)| Ok(characteristic(source, mu, nu, &gy)? * (t * gm.step() / (2.0 * PI))))
            .collect::<Result<Vec<_>>>()?;
        for i in 0..n {
            let j = i as i64 - d;
            if j < 0 || j >= n as i64 {
                continue;
            }
            let j = j as usize;
            let s = 0.5 * (grid.point(i) + grid.point(j));
            values[i * n + j] = gm.points().zip(&chi).map(|(mu, c)| c * Complex64::from_polar(1.0, -mu * s)).sum();
        }
    }
    let asymmetry = hermitian_defect(&values, n);
    symmetrize(&mut values, n);
    Ok(DensityMatrix { grid, values, asymmetry })
}

/// [`reconstruct_density_matrix`] fed by a Fresnel tomogram through
/// `w(X, mu, nu) = w_F(X/mu, nu/mu) / |mu|`.
pub fn reconstruct_density_matrix_fresnel<S: FresnelSource>(
    source: S,
    grid: UniformGrid1D,
    cfg: &InversionConfig,
) -> Result<DensityMatrix> {
    reconstruct_density_matrix(&FromFresnel(source), grid, cfg)
}

/// `W(q, p) = (1/(2pi)^2) int int chi(mu, nu) exp(-i(mu q + nu p)) dmu dnu`
/// over the tapered window `[-mu_window, mu_window]^2`. The real part is
/// returned and the largest imaginary part is recorded.
pub fn reconstruct_wigner<S: TomogramSource + ?Sized>(
    source: &S,
    grid_q: UniformGrid1D,
    grid_p: UniformGrid1D,
    cfg: &InversionConfig,
) -> Result<WignerFunction> {
    cfg.validate()?;
    let g = cfg.mu_grid()?;
    let gy = cfg.x_grid()?;
    let taper = cfg.mu_taper().weights(&g);
    let m = g.count();
    let cell = g.step() * g.step() / (4.0 * PI * PI);

    let mut chi = Vec::with_capacity(m * m);
    for (a, mu) in g.points().enumerate() {
        for (b, nu) in g.points().enumerate() {
            chi.push(characteristic(source, mu, nu, &gy)? * (taper[a] * taper[b] * cell));
        }
    }

    // separable sum: first over nu for every p, then over mu for every q
    let ep: Vec<Vec<Complex64>> =
        grid_p.points().map(|p| g.points().map(|nu| Complex64::from_polar(1.0, -nu * p)).collect()).collect();
    let np = grid_p.count();
    let mut partial = vec![Complex64::new(0.0, 0.0); m * np];
    for a in 0..m {
        let row = &chi[a * m..(a + 1) * m];
        for (j, e) in ep.iter().enumerate() {
            partial[a * np + j] = row.iter().zip(e).map(|(c, z)| c * z).sum();
        }
    }
    let mut values = Vec::with_capacity(grid_q.count() * np);
    let mut residue = 0.0f64;
    for q in grid_q.points() {
        let eq: Vec<Complex64> = g.points().map(|mu| Complex64::from_polar(1.0, -mu * q)).collect();
        for j in 0..np {
            let w: Complex64 = (0..m).map(|a| eq[a] * partial[a * np + j]).sum();
            residue = residue.max(w.im.abs());
            values.push(w.re);
        }
    }
    Ok(WignerFunction::new(RealField2D::new(grid_q, grid_p, values)?, residue))
}

/// [`reconstruct_wigner`] fed by a Fresnel tomogram.
pub fn reconstruct_wigner_fresnel<S: FresnelSource>(
    source: S,
    grid_q: UniformGrid1D,
    grid_p: UniformGrid1D,
    cfg: &InversionConfig,
) -> Result<WignerFunction> {
    reconstruct_wigner(&FromFresnel(source), grid_q, grid_p, cfg)
}

/// Density matrix of an `N`-mode state, `rho(X, X')` flattened so that row
/// and column indices run over the tensor grid in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrixNd {
    grids: Vec<UniformGrid1D>,
    values: Vec<Complex64>,
    asymmetry: f64,
}

impl DensityMatrixNd {
    pub fn grids(&self) -> &[UniformGrid1D] {
        &self.grids
    }

    /// Number of points of the tensor grid.
    pub fn size(&self) -> usize {
        self.grids.iter().map(|g| g.count()).product()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.size() + j]
    }

    pub fn asymmetry(&self) -> f64 {
        self.asymmetry
    }

    pub fn hermitian_defect(&self) -> f64 {
        hermitian_defect(&self.values, self.size())
    }

    /// `(a ⊗ b)` of two one-mode matrices, in the same layout.
    pub fn tensor_product(a: &DensityMatrix, b: &DensityMatrix) -> Self {
        let (na, nb) = (a.grid.count(), b.grid.count());
        let size = na * nb;
        let mut values = vec![Complex64::new(0.0, 0.0); size * size];
        for i1 in 0..na {
            for i2 in 0..nb {
                for j1 in 0..na {
                    for j2 in 0..nb {
                        values[(i1 * nb + i2) * size + j1 * nb + j2] = a.at(i1, j1) * b.at(i2, j2);
                    }
                }
            }
        }
        Self { grids: vec![a.grid, b.grid], values, asymmetry: 0.0 }
    }

    pub fn max_abs_diff(&self, other: &DensityMatrixNd) -> f64 {
        max_abs_diff(&self.values, &other.values)
    }
}

/// Multi-mode density matrix for `N <= 2`. Each axis is rescaled onto its
/// own unit circle, so the characteristic function is
/// `chi(mu, nu) = int w(Y, mu/r, nu/r) exp(i sum_j r_j Y_j) dY`.
pub fn reconstruct_density_matrix_nd<S: TomogramSourceNd + ?Sized>(
    source: &S,
    grids: &[UniformGrid1D],
    cfg: &InversionConfig,
) -> Result<DensityMatrixNd> {
    cfg.validate()?;
    let dims = grids.len();
    if dims != source.dims() {
        return Err(TomoError::Shape(format!("{dims} grids for a {}-mode source", source.dims())));
    }
    match dims {
        1 => {
            let one = |x: f64, mu: f64, nu: f64| source.tomogram_nd(&[x], &[mu], &[nu]);
            let rho = reconstruct_density_matrix(&Closure(one), grids[0], cfg)?;
            Ok(DensityMatrixNd { grids: grids.to_vec(), values: rho.values, asymmetry: rho.asymmetry })
        }
        2 => two_mode_density_matrix(source, grids[0], grids[1], cfg),
        n => Err(TomoError::Unsupported(format!("density matrix quadrature for {n} modes; at most 2 are supported"))),
    }
}

/// Fallible closure adapter.
struct Closure<F>(F);

impl<F: Fn(f64, f64, f64) -> Result<f64>> TomogramSource for Closure<F> {
    fn tomogram(&self, x: f64, mu: f64, nu: f64) -> Result<f64> {
        (self.0)(x, mu, nu)
    }
}

fn two_mode_density_matrix<S: TomogramSourceNd + ?Sized>(
    source: &S,
    g1: UniformGrid1D,
    g2: UniformGrid1D,
    cfg: &InversionConfig,
) -> Result<DensityMatrixNd> {
    let gm = cfg.mu_grid()?;
    let gy = cfg.x_grid()?;
    let taper = cfg.mu_taper().weights(&gm);
    let m = gm.count();
    let ny = gy.count();
    let yw: Vec<f64> = (0..ny).map(|k| if k == 0 || k + 1 == ny { 0.5 } else { 1.0 } * gy.step()).collect();
    let (n1, n2) = (g1.count() as i64, g2.count() as i64);
    let size = (n1 * n2) as usize;
    let cell = gm.step() * gm.step() / (4.0 * PI * PI);
    let mut values = vec![Complex64::new(0.0, 0.0); size * size];

    let mut chi = vec![Complex64::new(0.0, 0.0); m * m];
    for d1 in -(n1 - 1)..=(n1 - 1) {
        let nu1 = d1 as f64 * g1.step();
        for d2 in -(n2 - 1)..=(n2 - 1) {
            let nu2 = d2 as f64 * g2.step();
            for (a, mu1) in gm.points().enumerate() {
                let r1 = mu1.hypot(nu1);
                let e1: Vec<Complex64> = gy.points().map(|y| Complex64::from_polar(1.0, r1 * y)).collect();
                for (b, mu2) in gm.points().enumerate() {
                    let r2 = mu2.hypot(nu2);
                    let mh = [mu1 / r1, mu2 / r2];
                    let nh = [nu1 / r1, nu2 / r2];
                    let e2: Vec<Complex64> = gy.points().map(|y| Complex64::from_polar(1.0, r2 * y)).collect();
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (k, y1) in gy.points().enumerate() {
                        let mut inner = Complex64::new(0.0, 0.0);
                        for (l, y2) in gy.points().enumerate() {
                            inner += e2[l] * (source.tomogram_nd(&[y1, y2], &mh, &nh)? * yw[l]);
                        }
                        acc += e1[k] * inner * yw[k];
                    }
                    chi[a * m + b] = acc * (taper[a] * taper[b] * cell);
                }
            }
            for i1 in 0..n1 {
                let j1 = i1 - d1;
                if j1 < 0 || j1 >= n1 {
                    continue;
                }
                let s1 = 0.5 * (g1.point(i1 as usize) + g1.point(j1 as usize));
                let e1: Vec<Complex64> = gm.points().map(|mu| Complex64::from_polar(1.0, -mu * s1)).collect();
                for i2 in 0..n2 {
                    let j2 = i2 - d2;
                    if j2 < 0 || j2 >= n2 {
                        continue;
                    }
                    let s2 = 0.5 * (g2.point(i2 as usize) + g2.point(j2 as usize));
                    let mut total = Complex64::new(0.0, 0.0);
                    for (a, za) in e1.iter().enumerate() {
                        let inner: Complex64 = gm
                            .points()
                            .zip(&chi[a * m..(a + 1) * m])
                            .map(|(mu2, c)| c * Complex64::from_polar(1.0, -mu2 * s2))
                            .sum();
                        total += za * inner;
                    }
                    let row = (i1 * n2 + i2) as usize;
                    let col = (j1 * n2 + j2) as usize;
                    values[row * size + col] = total;
                }
            }
        }
    }
    let asymmetry = hermitian_defect(&values, size);
    symmetrize(&mut values, size);
    Ok(DensityMatrixNd { grids: vec![g1, g2], values, asymmetry })
}

/// [`reconstruct_density_matrix_nd`] fed by an `N`-mode Fresnel tomogram.
pub fn reconstruct_density_matrix_nd_fresnel<S: FresnelSourceNd>(
    source: S,
    grids: &[UniformGrid1D],
    cfg: &InversionConfig,
) -> Result<DensityMatrixNd> {
    reconstruct_density_matrix_nd(&FromFresnelNd(source), grids, cfg)
}
