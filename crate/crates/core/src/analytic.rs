//! Chirped Gaussian model `psi(x) = (2/(pi sigma^2))^(1/4) exp(-x^2/sigma^2 + i alpha x^2)`,
//! its closed-form tomogram, width and tomogram Fourier transform, and
//! direct (non-tomographic) oracles for the Wigner function and density
//! matrix of any sampled wavefunction.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result, TomoError};
use crate::grid::{RealField2D, SampledWavefunction, UniformGrid1D};
use crate::reconstruct::{DensityMatrix, WignerFunction};
use crate::source::{FresnelSource, TomogramSource};
use crate::tomography::NU_EPSILON;

/// Width `sigma` and chirp `alpha` of the Gaussian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GcfParams {
    sigma: f64,
    alpha: f64,
}

impl GcfParams {
    pub fn new(sigma: f64, alpha: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(invalid(format!("sigma must be positive and finite, got {sigma}")));
        }
        if !alpha.is_finite() {
            return Err(invalid(format!("alpha must be finite, got {alpha}")));
        }
        Ok(Self { sigma, alpha })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Grid `[-8 sigma, 8 sigma]` with `count` points.
    pub fn default_grid(&self, count: usize) -> Result<UniformGrid1D> {
        UniformGrid1D::from_range(-8.0 * self.sigma, 8.0 * self.sigma, count)
    }
}

pub fn gcf_psi(p: GcfParams, x: f64) -> Complex64 {
    let s2 = p.sigma * p.sigma;
    let amp = (2.0 / (PI * s2)).powf(0.25) * (-x * x / s2).exp();
    Complex64::from_polar(amp, p.alpha * x * x)
}

/// `gcf_psi` sampled on `grid`.
pub fn gcf_wavefunction(p: GcfParams, grid: UniformGrid1D) -> SampledWavefunction {
    SampledWavefunction::from_fn(grid, |x| gcf_psi(p, x))
}

/// Closed-form tomogram. With `m = mu + 2 alpha nu` and
/// `D = 4 nu^2 + sigma^4 m^2`:
///
/// `w = sqrt(2 sigma^2 / (pi D)) exp(-2 sigma^2 X^2 / D)`.
pub fn gcf_tomogram_analytic(p: GcfParams, x: f64, mu: f64, nu: f64) -> Result<f64> {
    let m = mu + 2.0 * p.alpha * nu;
    if m.abs() <= NU_EPSILON && nu.abs() <= NU_EPSILON {
        return Err(TomoError::Degenerate { mu, nu });
    }
    let s2 = p.sigma * p.sigma;
    let d = 4.0 * nu * nu + s2 * s2 * m * m;
    Ok((2.0 * s2 / (PI * d)).sqrt() * (-2.0 * s2 * x * x / d).exp())
}

/// Width `omega` of the tomogram's X-profile in the convention
/// `w ~ exp(-X^2 / omega^2)`: `omega^2 = (sigma^4 m^2 + 4 nu^2) / (2 sigma^2)`.
pub fn gcf_width(p: GcfParams, mu: f64, nu: f64) -> f64 {
    let m = mu + 2.0 * p.alpha * nu;
    let s2 = p.sigma * p.sigma;
    ((s2 * s2 * m * m + 4.0 * nu * nu) / (2.0 * s2)).sqrt()
}

/// Closed form of `(1/2pi) int int w(X, mu, nu) exp(i(omega_x X + omega_mu mu)) dX dmu`:
///
/// `sqrt(2 / (pi sigma^2 omega_x^2)) exp(-nu^2 omega_x^2 / (2 sigma^2)
///   - 2 omega_mu^2 / (sigma^2 omega_x^2) - 2 i alpha omega_mu nu)`.
pub fn gcf_tomogram_ft_analytic(p: GcfParams, omega_x: f64, omega_mu: f64, nu: f64) -> Result<Complex64> {
    if omega_x == 0.0 {
        return Err(TomoError::SingularFrequency);
    }
    let s2 = p.sigma * p.sigma;
    let wx2 = omega_x * omega_x;
    let amp = (2.0 / (PI * s2 * wx2)).sqrt();
    let re = -nu * nu * wx2 / (2.0 * s2) - 2.0 * omega_mu * omega_mu / (s2 * wx2);
    Ok(Complex64::from_polar(amp * re.exp(), -2.0 * p.alpha * omega_mu * nu))
}

impl TomogramSource for GcfParams {
    fn tomogram(&self, x: f64, mu: f64, nu: f64) -> Result<f64> {
        gcf_tomogram_analytic(*self, x, mu, nu)
    }

    fn tomogram_row(&self, grid_x: &UniformGrid1D, mu: f64, nu: f64, out: &mut [f64]) -> Result<()> {
        let m = mu + 2.0 * self.alpha * nu;
        if m.abs() <= NU_EPSILON && nu.abs() <= NU_EPSILON {
            return Err(TomoError::Degenerate { mu, nu });
        }
        let s2 = self.sigma * self.sigma;
        let d = 4.0 * nu * nu + s2 * s2 * m * m;
        let amp = (2.0 * s2 / (PI * d)).sqrt();
        let c = -2.0 * s2 / d;
        for (o, x) in out.iter_mut().zip(grid_x.points()) {
            *o = amp * (c * x * x).exp();
        }
        Ok(())
    }
}

impl FresnelSource for GcfParams {
    fn fresnel(&self, x: f64, nu: f64) -> Result<f64> {
        gcf_tomogram_analytic(*self, x, 1.0, nu)
    }
}

/// `(1/2pi) int psi(q + u/2) psi*(q - u/2) exp(-i p u) du`.
///
/// The `u` step is twice the grid step, so for `q` on a node both arguments
/// land on nodes; elsewhere `psi` is interpolated linearly (zero outside).
pub fn wigner_direct(psi: &SampledWavefunction, q: f64, p: f64) -> f64 {
    let grid = psi.grid();
    let h = grid.step();
    let n = grid.count() as i64;
    let at = |x: f64| match grid.node_index(x) {
        Some(k) => psi.values()[k],
        None => psi.amplitude_at(x),
    };
    let mut acc = at(q).norm_sqr();
    let dz = Complex64::from_polar(1.0, -2.0 * p * h);
    let mut z = dz;
    for k in 1..n {
        let kh = k as f64 * h;
        let a = at(q + kh);
        let b = at(q - kh);
        // the u and -u terms are complex conjugates of each other
        acc += 2.0 * (a * b.conj() * z).re;
        z *= dz;
        if k % 64 == 0 {
            z = Complex64::from_polar(1.0, -2.0 * p * (k + 1) as f64 * h);
        }
    }
    acc * 2.0 * h / (2.0 * PI)
}

/// [`wigner_direct`] over a `(q, p)` grid.
pub fn wigner_direct_grid(psi: &SampledWavefunction, grid_q: UniformGrid1D, grid_p: UniformGrid1D) -> WignerFunction {
    let field = RealField2D::from_fn(grid_q, grid_p, |q, p| wigner_direct(psi, q, p));
    WignerFunction::new(field, 0.0)
}

/// Outer product `rho_ij = psi_i conj(psi_j)`.
pub fn density_matrix_direct(psi: &SampledWavefunction) -> DensityMatrix {
    let v = psi.values();
    let values = v.iter().flat_map(|a| v.iter().map(move |b| a * b.conj())).collect();
    DensityMatrix::new(*psi.grid(), values).expect("outer product has the right shape")
}
