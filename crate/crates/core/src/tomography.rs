//! Forward transforms: wavefunction to symplectic, optical and Fresnel
//! tomograms, in one and several dimensions, plus the homogeneity relations
//! that map Fresnel data onto the full symplectic tomogram.
//!
//! Conventions:
//!
//! * symplectic tomogram
//!   `w(X, mu, nu) = |int psi(y) exp(i mu y^2 / 2nu - i X y / nu) dy|^2 / (2 pi |nu|)`
//! * Fresnel tomogram
//!   `w_F(X, nu) = |(2 pi i nu)^(-1/2) int exp(i (X - y)^2 / 2nu) psi(y) dy|^2`,
//!   with the principal branch of the square root
//! * optical tomogram `w(X, theta) = w(X, cos theta, sin theta)`
//!
//! For `|nu| <= NU_EPSILON` the kernels are singular and the classical
//! marginal `|psi(X/mu)|^2 / |mu|` is returned instead (linear interpolation
//! of `|psi|^2`). All integrals use the composite trapezoid rule on the
//! wavefunction's own grid.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Result, TomoError};
use crate::grid::{RealField2D, SampledWavefunction, UniformGrid1D};

/// Below this magnitude `nu` (or `mu`, `sin theta`) is treated as zero.
pub const NU_EPSILON: f64 = 1e-8;

/// Most negative value still accepted as "nonnegative" tomogram data.
pub const NONNEGATIVE_SLACK: f64 = -1e-10;

/// A point `(X, mu, nu)` of the symplectic tomogram's domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymplecticPoint {
    pub x: f64,
    pub mu: f64,
    pub nu: f64,
}

impl SymplecticPoint {
    pub fn new(x: f64, mu: f64, nu: f64) -> Result<Self> {
        if mu.abs() <= NU_EPSILON && nu.abs() <= NU_EPSILON {
            return Err(TomoError::Degenerate { mu, nu });
        }
        Ok(Self { x, mu, nu })
    }

    /// The point scaled by `lambda` in all three coordinates.
    pub fn scaled(&self, lambda: f64) -> Self {
        Self { x: lambda * self.x, mu: lambda * self.mu, nu: lambda * self.nu }
    }
}

fn check_nonnegative(field: &RealField2D, what: &str) -> Result<()> {
    match field.values().iter().position(|&v| !(v >= NONNEGATIVE_SLACK)) {
        Some(k) => Err(invalid(format!("{what} value {} at index {k} is negative or NaN", field.values()[k]))),
        None => Ok(()),
    }
}

/// Tomogram samples over an `(X, mu)` grid at fixed `nu`.
#[derive(Debug, Clone, PartialEq)]
pub struct TomogramPlane {
    nu: f64,
    field: RealField2D,
}

impl TomogramPlane {
    /// `field` is indexed `(X, mu)`.
    pub fn new(nu: f64, field: RealField2D) -> Result<Self> {
        if !nu.is_finite() {
            return Err(invalid("plane nu must be finite"));
        }
        check_nonnegative(&field, "tomogram plane")?;
        Ok(Self { nu, field })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn grid_x(&self) -> &UniformGrid1D {
        self.field.grid_x()
    }

    pub fn grid_mu(&self) -> &UniformGrid1D {
        self.field.grid_y()
    }

    pub fn field(&self) -> &RealField2D {
        &self.field
    }

    pub fn into_field(self) -> RealField2D {
        self.field
    }
}

/// Fresnel tomogram samples over an `(X, nu)` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FresnelTomogram {
    field: RealField2D,
}

impl FresnelTomogram {
    /// `field` is indexed `(X, nu)`.
    pub fn new(field: RealField2D) -> Result<Self> {
        check_nonnegative(&field, "Fresnel tomogram")?;
        Ok(Self { field })
    }

    pub fn grid_x(&self) -> &UniformGrid1D {
        self.field.grid_x()
    }

    pub fn grid_nu(&self) -> &UniformGrid1D {
        self.field.grid_y()
    }

    pub fn field(&self) -> &RealField2D {
        &self.field
    }

    /// Bilinear lookup of `w_F(x, nu)`.
    pub fn lookup(&self, x: f64, nu: f64) -> Result<f64> {
        self.field.bilinear(x, nu).ok_or(TomoError::Domain { x, nu })
    }

    /// `int w_F(X, nu_j) dX` (trapezoid) for every sampled `nu_j`.
    pub fn row_integrals(&self) -> Vec<f64> {
        let gx = self.grid_x();
        let ny = self.grid_nu().count();
        (0..ny)
            .map(|j| {
                let col: Vec<f64> = (0..gx.count()).map(|i| self.field.at(i, j)).collect();
                crate::grid::trapezoid_integrate_real(&col, gx.step()).unwrap_or(0.0)
            })
            .collect()
    }
}

/// Optical tomogram samples over an `(X, theta)` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct OpticalTomogram {
    field: RealField2D,
}

impl OpticalTomogram {
    /// `field` is indexed `(X, theta)`.
    pub fn new(field: RealField2D) -> Result<Self> {
        check_nonnegative(&field, "optical tomogram")?;
        Ok(Self { field })
    }

    pub fn grid_x(&self) -> &UniformGrid1D {
        self.field.grid_x()
    }

    pub fn grid_theta(&self) -> &UniformGrid1D {
        self.field.grid_y()
    }

    pub fn field(&self) -> &RealField2D {
        &self.field
    }
}

/// Trapezoid weight times `psi_k times exp(i a y_k^2)`, ready to be summed
/// against `exp(-i b y_k)` for many `b`.
struct ChirpRow {
    terms: Vec<Complex64>,
    y0: f64,
    step: f64,
}

impl ChirpRow {
    fn new(psi: &SampledWavefunction, a: f64) -> Self {
        let grid = psi.grid();
        let n = grid.count();
        let terms = psi
            .values()
            .iter()
            .enumerate()
            .map(|(k, &v)| {
                let y = grid.point(k);
                let weight = if k == 0 || k + 1 == n { 0.5 * grid.step() } else { grid.step() };
                v * Complex64::from_polar(weight, a * y * y)
            })
            .collect();
        Self { terms, y0: grid.start(), step: grid.step() }
    }

    /// `sum_k terms_k exp(-i b y_k)`; the phase is advanced by recurrence
    /// and re-synchronised every 64 terms.
    fn sum(&self, b: f64) -> Complex64 {
        const RESYNC: usize = 64;
        let dz = Complex64::from_polar(1.0, -b * self.step);
        let mut acc = Complex64::new(0.0, 0.0);
        for (block, chunk) in self.terms.chunks(RESYNC).enumerate() {
            let y = self.y0 + (block * RESYNC) as f64 * self.step;
            let mut z = Complex64::from_polar(1.0, -b * y);
            for &t in chunk {
                acc += t * z;
                z *= dz;
            }
        }
        acc
    }
}

/// Small-`nu` limit `|psi(X/mu)|^2 / |mu|`.
fn marginal_limit(psi: &SampledWavefunction, x: f64, mu: f64, nu: f64) -> Result<f64> {
    if mu.abs() <= NU_EPSILON {
        return Err(TomoError::Degenerate { mu, nu });
    }
    Ok(psi.density_at(x / mu) / mu.abs())
}

/// Symplectic tomogram of a sampled wavefunction at one point.
pub fn symplectic_tomogram(psi: &SampledWavefunction, x: f64, mu: f64, nu: f64) -> Result<f64> {
    if nu.abs() <= NU_EPSILON {
        return marginal_limit(psi, x, mu, nu);
    }
    let row = ChirpRow::new(psi, mu / (2.0 * nu));
    Ok(row.sum(x / nu).norm_sqr() / (2.0 * PI * nu.abs()))
}

/// Symplectic tomogram over an `(X, mu)` grid at fixed `nu`. Each value is
/// computed exactly as [`symplectic_tomogram`] would.
pub fn symplectic_tomogram_plane(
    psi: &SampledWavefunction,
    grid_x: UniformGrid1D,
    grid_mu: UniformGrid1D,
    nu: f64,
) -> Result<TomogramPlane> {
    let nx = grid_x.count();
    let nm = grid_mu.count();
    let mut values = vec![0.0; nx * nm];
    for (j, mu) in grid_mu.points().enumerate() {
        if nu.abs() <= NU_EPSILON {
            for (i, x) in grid_x.points().enumerate() {
                values[i * nm + j] = marginal_limit(psi, x, mu, nu)?;
            }
        } else {
            let row = ChirpRow::new(psi, mu / (2.0 * nu));
            let scale = 1.0 / (2.0 * PI * nu.abs());
            for (i, x) in grid_x.points().enumerate() {
                values[i * nm + j] = row.sum(x / nu).norm_sqr() * scale;
            }
        }
    }
    TomogramPlane::new(nu, RealField2D::new(grid_x, grid_mu, values)?)
}

/// Fresnel transform `(2 pi i nu)^(-1/2) int exp(i (x - y)^2 / 2nu) psi(y) dy`
/// with the principal square root. At `|nu| <= NU_EPSILON` the kernel is a
/// delta function and the interpolated amplitude `psi(x)` is returned.
pub fn fresnel_amplitude(psi: &SampledWavefunction, x: f64, nu: f64) -> Complex64 {
    if nu.abs() <= NU_EPSILON {
        return psi.amplitude_at(x);
    }
    let grid = psi.grid();
    let n = grid.count();
    let inv_two_nu = 0.5 / nu;
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, &v) in psi.values().iter().enumerate() {
        let d = x - grid.point(k);
        let weight = if k == 0 || k + 1 == n { 0.5 } else { 1.0 };
        acc += v * Complex64::from_polar(weight, d * d * inv_two_nu);
    }
    acc * grid.step() / Complex64::new(0.0, 2.0 * PI * nu).sqrt()
}

/// `w_F(x, nu)`; the `nu -> 0` row is `|psi(x)|^2`.
pub fn fresnel_tomogram_value(psi: &SampledWavefunction, x: f64, nu: f64) -> f64 {
    if nu.abs() <= NU_EPSILON {
        return psi.density_at(x);
    }
    fresnel_amplitude(psi, x, nu).norm_sqr()
}

/// Fresnel tomogram over an `(X, nu)` grid.
pub fn fresnel_tomogram(
    psi: &SampledWavefunction,
    grid_x: UniformGrid1D,
    grid_nu: UniformGrid1D,
) -> Result<FresnelTomogram> {
    let field = RealField2D::from_fn(grid_x, grid_nu, |x, nu| fresnel_tomogram_value(psi, x, nu));
    FresnelTomogram::new(field)
}

/// Optical tomogram at one point. `theta` near `0` or `pi` falls back to
/// `|psi(+-X)|^2`.
pub fn optical_tomogram(psi: &SampledWavefunction, x: f64, theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    if s.abs() <= NU_EPSILON {
        // |cos theta| is 1 up to rounding here
        return psi.density_at(x / c) / c.abs();
    }
    let cot = c / s;
    let row = ChirpRow::new(psi, 0.5 * cot);
    row.sum(x / s).norm_sqr() / (2.0 * PI * s.abs())
}

/// Optical tomogram over an `(X, theta)` grid.
pub fn optical_tomogram_grid(
    psi: &SampledWavefunction,
    grid_x: UniformGrid1D,
    grid_theta: UniformGrid1D,
) -> Result<OpticalTomogram> {
    let nx = grid_x.count();
    let nt = grid_theta.count();
    let mut values = vec![0.0; nx * nt];
    for (j, theta) in grid_theta.points().enumerate() {
        let (s, c) = theta.sin_cos();
        if s.abs() <= NU_EPSILON {
            for (i, x) in grid_x.points().enumerate() {
                values[i * nt + j] = psi.density_at(x / c) / c.abs();
            }
        } else {
            let row = ChirpRow::new(psi, 0.5 * (c / s));
            let scale = 1.0 / (2.0 * PI * s.abs());
            for (i, x) in grid_x.points().enumerate() {
                values[i * nt + j] = row.sum(x / s).norm_sqr() * scale;
            }
        }
    }
    OpticalTomogram::new(RealField2D::new(grid_x, grid_theta, values)?)
}

/// Symplectic tomogram recovered from Fresnel data through homogeneity:
/// `w(X, mu, nu) = w_F(X/mu, nu/mu) / |mu|`, with bilinear interpolation.
pub fn symplectic_from_fresnel(wf: &FresnelTomogram, x: f64, mu: f64, nu: f64) -> Result<f64> {
    if mu.abs() <= NU_EPSILON {
        return Err(TomoError::Degenerate { mu, nu });
    }
    Ok(wf.lookup(x / mu, nu / mu)? / mu.abs())
}

/// Optical tomogram recovered from Fresnel data: the `(cos theta, sin theta)`
/// case of [`symplectic_from_fresnel`], i.e.
/// `w_F(X / cos theta, tan theta) / |cos theta|`.
pub fn optical_from_fresnel(wf: &FresnelTomogram, x: f64, theta: f64) -> Result<f64> {
    let (s, c) = theta.sin_cos();
    symplectic_from_fresnel(wf, x, c, s)
}

/// Wavefunction of `N <= 3` variables on a tensor grid, row-major with the
/// first axis outermost.
#[derive(Debug, Clone, PartialEq)]
pub struct NdWavefunction {
    grids: Vec<UniformGrid1D>,
    values: Vec<Complex64>,
    separable_factors: Option<Vec<SampledWavefunction>>,
}

impl NdWavefunction {
    pub fn new(grids: Vec<UniformGrid1D>, values: Vec<Complex64>) -> Result<Self> {
        if grids.is_empty() || grids.len() > 3 {
            return Err(invalid(format!("{} dimensions requested; 1 to 3 are supported", grids.len())));
        }
        let expected: usize = grids.iter().map(|g| g.count()).product();
        if values.len() != expected {
            return Err(TomoError::Shape(format!("{} values for a tensor of {expected}", values.len())));
        }
        Ok(Self { grids, values, separable_factors: None })
    }

    /// Product state `psi_1(x_1) psi_2(x_2) ...`; the full tensor is
    /// materialised alongside the factors.
    pub fn separable(factors: Vec<SampledWavefunction>) -> Result<Self> {
        if factors.is_empty() || factors.len() > 3 {
            return Err(invalid(format!("{} factors requested; 1 to 3 are supported", factors.len())));
        }
        let grids: Vec<_> = factors.iter().map(|f| *f.grid()).collect();
        let mut values = vec![Complex64::new(1.0, 0.0)];
        for f in &factors {
            values = values.iter().flat_map(|&a| f.values().iter().map(move |&b| a * b)).collect();
        }
        Ok(Self { grids, values, separable_factors: Some(factors) })
    }

    /// Tensor plus claimed factors; the factors must reproduce the tensor to
    /// within `1e-10`.
    pub fn with_factors(
        grids: Vec<UniformGrid1D>,
        values: Vec<Complex64>,
        factors: Vec<SampledWavefunction>,
    ) -> Result<Self> {
        let tensor = Self::new(grids, values)?;
        let product = Self::separable(factors)?;
        if product.grids != tensor.grids {
            return Err(TomoError::Shape("factor grids differ from tensor grids".into()));
        }
        let worst = tensor.values.iter().zip(&product.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        if worst > 1e-10 {
            return Err(invalid(format!("tensor differs from factor product by {worst:e}")));
        }
        Ok(Self { separable_factors: product.separable_factors, ..tensor })
    }

    pub fn dims(&self) -> usize {
        self.grids.len()
    }

    pub fn grids(&self) -> &[UniformGrid1D] {
        &self.grids
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn separable_factors(&self) -> Option<&[SampledWavefunction]> {
        self.separable_factors.as_deref()
    }

    fn as_1d(&self) -> Result<SampledWavefunction> {
        SampledWavefunction::new(self.grids[0], self.values.clone())
    }
}

fn check_args(psi: &NdWavefunction, args: &[&[f64]]) -> Result<()> {
    for a in args {
        if a.len() != psi.dims() {
            return Err(TomoError::Shape(format!(
                "{} coordinates for a {}-dimensional wavefunction",
                a.len(),
                psi.dims()
            )));
        }
    }
    Ok(())
}

/// Per-axis treatment in the two-mode quadrature.
enum AxisKernel {
    /// Trapezoid-weighted kernel samples along the axis.
    Kernel(Vec<Complex64>),
    /// Delta limit: evaluate the amplitude at this coordinate instead.
    Collapse(f64),
}

fn two_mode_amplitude(psi: &NdWavefunction, k0: &AxisKernel, k1: &AxisKernel) -> Complex64 {
    let g0 = psi.grids[0];
    let g1 = psi.grids[1];
    let n1 = g1.count();
    let v = &psi.values;
    // amplitude along axis 1 for a fixed row of axis 0
    let inner = |row: &[Complex64]| -> Complex64 {
        match k1 {
            AxisKernel::Kernel(k) => row.iter().zip(k).map(|(a, b)| a * b).sum(),
            AxisKernel::Collapse(y) => match g1.locate(*y) {
                Some((j, t)) => row[j] * (1.0 - t) + row[j + 1] * t,
                None => Complex64::new(0.0, 0.0),
            },
        }
    };
    match k0 {
        AxisKernel::Kernel(k) => (0..g0.count()).map(|i| k[i] * inner(&v[i * n1..(i + 1) * n1])).sum(),
        AxisKernel::Collapse(y) => match g0.locate(*y) {
            Some((i, t)) => inner(&v[i * n1..(i + 1) * n1]) * (1.0 - t) + inner(&v[(i + 1) * n1..(i + 2) * n1]) * t,
            None => Complex64::new(0.0, 0.0),
        },
    }
}

fn trapezoid_weight(grid: &UniformGrid1D, k: usize) -> f64 {
    if k == 0 || k + 1 == grid.count() {
        0.5 * grid.step()
    } else {
        grid.step()
    }
}

/// Symplectic tomogram of an `N`-mode wavefunction with the product kernel.
/// Separable inputs are evaluated as a product of one-dimensional tomograms;
/// general tensors are supported for `N <= 2`.
pub fn symplectic_tomogram_nd(psi: &NdWavefunction, x: &[f64], mu: &[f64], nu: &[f64]) -> Result<f64> {
    check_args(psi, &[x, mu, nu])?;
    if let Some(factors) = psi.separable_factors() {
        let mut product = 1.0;
        for (k, f) in factors.iter().enumerate() {
            product *= symplectic_tomogram(f, x[k], mu[k], nu[k])?;
        }
        return Ok(product);
    }
    match psi.dims() {
        1 => symplectic_tomogram(&psi.as_1d()?, x[0], mu[0], nu[0]),
        2 => {
            let mut prefactor = 1.0;
            let mut kernels = Vec::with_capacity(2);
            for k in 0..2 {
                if nu[k].abs() <= NU_EPSILON {
                    if mu[k].abs() <= NU_EPSILON {
                        return Err(TomoError::Degenerate { mu: mu[k], nu: nu[k] });
                    }
                    prefactor /= mu[k].abs();
                    kernels.push(AxisKernel::Collapse(x[k] / mu[k]));
                } else {
                    prefactor /= 2.0 * PI * nu[k].abs();
                    let g = psi.grids[k];
                    let a = mu[k] / (2.0 * nu[k]);
                    let b = x[k] / nu[k];
                    let kernel = g
                        .points()
                        .enumerate()
                        .map(|(j, y)| Complex64::from_polar(trapezoid_weight(&g, j), a * y * y - b * y))
                        .collect();
                    kernels.push(AxisKernel::Kernel(kernel));
                }
            }
            Ok(prefactor * two_mode_amplitude(psi, &kernels[0], &kernels[1]).norm_sqr())
        }
        n => Err(TomoError::Unsupported(format!("full quadrature for a {n}-mode tensor; supply separable factors"))),
    }
}

/// Fresnel tomogram of an `N`-mode wavefunction, using the product of
/// one-dimensional Fresnel kernels.
pub fn fresnel_tomogram_nd(psi: &NdWavefunction, x: &[f64], nu: &[f64]) -> Result<f64> {
    check_args(psi, &[x, nu])?;
    if let Some(factors) = psi.separable_factors() {
        return Ok(factors.iter().enumerate().map(|(k, f)| fresnel_tomogram_value(f, x[k], nu[k])).product());
    }
    match psi.dims() {
        1 => Ok(fresnel_tomogram_value(&psi.as_1d()?, x[0], nu[0])),
        2 => {
            let mut kernels = Vec::with_capacity(2);
            let mut scale = Complex64::new(1.0, 0.0);
            for k in 0..2 {
                if nu[k].abs() <= NU_EPSILON {
                    kernels.push(AxisKernel::Collapse(x[k]));
                } else {
                    let g = psi.grids[k];
                    let inv_two_nu = 0.5 / nu[k];
                    scale /= Complex64::new(0.0, 2.0 * PI * nu[k]).sqrt();
                    let kernel = g
                        .points()
                        .enumerate()
                        .map(|(j, y)| {
                            let d = x[k] - y;
                            Complex64::from_polar(trapezoid_weight(&g, j), d * d * inv_two_nu)
                        })
                        .collect();
                    kernels.push(AxisKernel::Kernel(kernel));
                }
            }
            Ok((scale * two_mode_amplitude(psi, &kernels[0], &kernels[1])).norm_sqr())
        }
        n => Err(TomoError::Unsupported(format!("full quadrature for a {n}-mode tensor; supply separable factors"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{gcf_tomogram_analytic, gcf_wavefunction, GcfParams};

    fn gcf(sigma: f64, alpha: f64) -> SampledWavefunction {
        let grid = UniformGrid1D::from_range(-8.0 * sigma, 8.0 * sigma, 1601).unwrap();
        gcf_wavefunction(GcfParams::new(sigma, alpha).unwrap(), grid)
    }

    #[test]
    fn small_nu_branch_gives_marginal() {
        let psi = gcf(1.0, 0.0);
        let w = symplectic_tomogram(&psi, 0.0, 1.0, 0.0).unwrap();
        assert!((w - (2.0 / PI).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn degenerate_point_is_an_error() {
        let psi = gcf(1.0, 0.0);
        assert!(matches!(symplectic_tomogram(&psi, 0.0, 0.0, 0.0), Err(TomoError::Degenerate { .. })));
        assert!(SymplecticPoint::new(1.0, 1e-9, -1e-9).is_err());
        assert!(SymplecticPoint::new(1.0, 0.0, 0.5).is_ok());
    }

    #[test]
    fn quadrature_matches_closed_form_at_unit_nu() {
        let psi = gcf(1.0, 0.0);
        let p = GcfParams::new(1.0, 0.0).unwrap();
        let w = symplectic_tomogram(&psi, 0.0, 1.0, 1.0).unwrap();
        let expect = gcf_tomogram_analytic(p, 0.0, 1.0, 1.0).unwrap();
        assert!((w - expect).abs() < 1e-10, "{w} vs {expect}");
    }

    #[test]
    fn plane_equals_pointwise_calls() {
        let psi = gcf(1.0, 1.0);
        let gx = UniformGrid1D::from_range(-3.0, 3.0, 7).unwrap();
        let gm = UniformGrid1D::from_range(-2.0, 2.0, 5).unwrap();
        let plane = symplectic_tomogram_plane(&psi, gx, gm, 0.7).unwrap();
        for (i, x) in gx.points().enumerate() {
            for (j, mu) in gm.points().enumerate() {
                let w = symplectic_tomogram(&psi, x, mu, 0.7).unwrap();
                assert!((plane.field().at(i, j) - w).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_wavefunction_gives_zero_plane() {
        let g = UniformGrid1D::from_range(-4.0, 4.0, 65).unwrap();
        let psi = SampledWavefunction::new(g, vec![Complex64::new(0.0, 0.0); 65]).unwrap();
        let gx = UniformGrid1D::from_range(-2.0, 2.0, 5).unwrap();
        let plane = symplectic_tomogram_plane(&psi, gx, gx, 0.3).unwrap();
        assert!(plane.field().values().iter().all(|&v| v == 0.0));
        let nd = NdWavefunction::new(vec![g, g], vec![Complex64::new(0.0, 0.0); 65 * 65]).unwrap();
        assert_eq!(symplectic_tomogram_nd(&nd, &[0.1, 0.2], &[1.0, 0.5], &[0.3, 0.7]).unwrap(), 0.0);
        assert_eq!(fresnel_tomogram_nd(&nd, &[0.1, 0.2], &[0.3, 0.7]).unwrap(), 0.0);
    }

    #[test]
    fn fresnel_delta_row_and_unit_mu_identification() {
        let psi = gcf(1.0, 0.0);
        assert!((fresnel_tomogram_value(&psi, 0.0, 0.0) - (2.0 / PI).sqrt()).abs() < 1e-12);
        let f = fresnel_tomogram_value(&psi, 0.0, 1.0);
        let s = symplectic_tomogram(&psi, 0.0, 1.0, 1.0).unwrap();
        assert!((f - s).abs() < 1e-10);
    }

    #[test]
    fn fresnel_amplitude_uses_principal_branch() {
        // single delta-like sample: amplitude phase is exactly -arg(sqrt(2 pi i nu))
        let g = UniformGrid1D::from_range(-1.0, 1.0, 3).unwrap();
        let psi = SampledWavefunction::new(
            g,
            vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        )
        .unwrap();
        let amp = fresnel_amplitude(&psi, 0.0, -2.0);
        let expected = Complex64::new(1.0, 0.0) / Complex64::new(0.0, -4.0 * PI).sqrt();
        assert!((amp - expected).norm() < 1e-15);
        assert!(Complex64::new(0.0, -4.0 * PI).sqrt().re > 0.0);
    }

    #[test]
    fn optical_limits() {
        let psi = gcf(1.0, 0.5);
        for x in [-1.0, 0.0, 0.3] {
            assert!((optical_tomogram(&psi, x, 0.0) - psi.density_at(x)).abs() < 1e-15);
            assert!((optical_tomogram(&psi, x, PI) - psi.density_at(-x)).abs() < 1e-12);
        }
    }

    #[test]
    fn fresnel_lookup_domain_errors() {
        let psi = gcf(1.0, 0.0);
        let gx = UniformGrid1D::from_range(-4.0, 4.0, 33).unwrap();
        let gn = UniformGrid1D::from_range(-1.0, 1.0, 9).unwrap();
        let wf = fresnel_tomogram(&psi, gx, gn).unwrap();
        match symplectic_from_fresnel(&wf, 1.0, 0.5, 1.0) {
            Err(TomoError::Domain { x, nu }) => {
                assert_eq!(x, 2.0);
                assert_eq!(nu, 2.0);
            }
            other => panic!("expected domain error, got {other:?}"),
        }
        assert!(matches!(optical_from_fresnel(&wf, 0.0, PI / 2.0), Err(TomoError::Degenerate { .. })));
    }

    #[test]
    fn nd_shape_checks() {
        let g = UniformGrid1D::from_range(-1.0, 1.0, 3).unwrap();
        assert!(NdWavefunction::new(vec![g, g], vec![Complex64::new(0.0, 0.0); 8]).is_err());
        assert!(NdWavefunction::new(vec![g; 4], vec![Complex64::new(0.0, 0.0); 81]).is_err());
        let nd3 = NdWavefunction::new(vec![g; 3], vec![Complex64::new(1.0, 0.0); 27]).unwrap();
        assert!(matches!(
            symplectic_tomogram_nd(&nd3, &[0.0; 3], &[1.0; 3], &[1.0; 3]),
            Err(TomoError::Unsupported(_))
        ));
        let nd2 = NdWavefunction::new(vec![g; 2], vec![Complex64::new(1.0, 0.0); 9]).unwrap();
        assert!(matches!(symplectic_tomogram_nd(&nd2, &[0.0; 3], &[1.0; 2], &[1.0; 2]), Err(TomoError::Shape(_))));
    }

    #[test]
    fn with_factors_validates_product() {
        let g = UniformGrid1D::from_range(-1.0, 1.0, 3).unwrap();
        let f = SampledWavefunction::new(g, vec![Complex64::new(1.0, 0.0); 3]).unwrap();
        let ok =
            NdWavefunction::with_factors(vec![g, g], vec![Complex64::new(1.0, 0.0); 9], vec![f.clone(), f.clone()]);
        assert!(ok.is_ok());
        let bad = NdWavefunction::with_factors(vec![g, g], vec![Complex64::new(2.0, 0.0); 9], vec![f.clone(), f]);
        assert!(bad.is_err());
    }
}
