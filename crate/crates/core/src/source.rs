//! Anything that can be evaluated as a tomogram: closures, sampled data and
//! the analytic model all feed the inversion routines through these traits.

use crate::error::{Result, TomoError};
use crate::grid::{SampledWavefunction, UniformGrid1D};
use crate::tomography::{
    fresnel_tomogram_nd, fresnel_tomogram_value, symplectic_tomogram, symplectic_tomogram_nd, FresnelTomogram,
    NdWavefunction, OpticalTomogram, NU_EPSILON,
};

/// Symplectic tomogram `w(X, mu, nu)`.
pub trait TomogramSource {
    fn tomogram(&self, x: f64, mu: f64, nu: f64) -> Result<f64>;

    /// `w(x_k, mu, nu)` for every node of `grid_x`, written into `out`.
    fn tomogram_row(&self, grid_x: &UniformGrid1D, mu: f64, nu: f64, out: &mut [f64]) -> Result<()> {
        for (o, x) in out.iter_mut().zip(grid_x.points()) {
            *o = self.tomogram(x, mu, nu)?;
        }
        Ok(())
    }
}

impl<F: Fn(f64, f64, f64) -> f64> TomogramSource for F {
    fn tomogram(&self, x: f64, mu: f64, nu: f64) -> Result<f64> {
        Ok(self(x, mu, nu))
    }
}

/// Fresnel tomogram `w_F(X, nu)`.
pub trait FresnelSource {
    fn fresnel(&self, x: f64, nu: f64) -> Result<f64>;
}

impl<F: Fn(f64, f64) -> f64> FresnelSource for F {
    fn fresnel(&self, x: f64, nu: f64) -> Result<f64> {
        Ok(self(x, nu))
    }
}

impl FresnelSource for FresnelTomogram {
    fn fresnel(&self, x: f64, nu: f64) -> Result<f64> {
        self.lookup(x, nu)
    }
}

/// Numerical tomogram of a sampled wavefunction.
#[derive(Debug, Clone, Copy)]
pub struct Numerical<'a>(pub &'a SampledWavefunction);

impl TomogramSource for Numerical<'_> {
    fn tomogram(&self, x: f64, mu: f64, nu: f64) -> Result<f64> {
        symplectic_tomogram(self.0, x, mu, nu)
    }
}

impl FresnelSource for Numerical<'_> {
    fn fresnel(&self, x: f64, nu: f64) -> Result<f64> {
        Ok(fresnel_tomogram_value(self.0, x, nu))
    }
}

/// Symplectic view of a Fresnel source: `w(X, mu, nu) = w_F(X/mu, nu/mu) / |mu|`.
#[derive(Debug, Clone, Copy)]
pub struct FromFresnel<S>(pub S);

impl<S: FresnelSource> TomogramSource for FromFresnel<S> {
    fn tomogram(&self, x: f64, mu: f64, nu: f64) -> Result<f64> {
        if mu.abs() <= NU_EPSILON {
            return Err(TomoError::Degenerate { mu, nu });
        }
        Ok(self.0.fresnel(x / mu, nu / mu)? / mu.abs())
    }
}

/// Symplectic view of optical data through homogeneity:
/// `w(X, mu, nu) = w(X/r, theta) / r` with `(mu, nu) = r (cos theta, sin theta)`.
/// Angles outside the sampled range are folded with `w(X, theta + pi) = w(-X, theta)`.
impl TomogramSource for OpticalTomogram {
    fn tomogram(&self, x: f64, mu: f64, nu: f64) -> Result<f64> {
        let r = mu.hypot(nu);
        if r <= NU_EPSILON {
            return Err(TomoError::Degenerate { mu, nu });
        }
        let g = self.grid_theta();
        let mut theta = nu.atan2(mu);
        let mut xs = x / r;
        while theta < g.start() - 1e-12 {
            theta += std::f64::consts::PI;
            xs = -xs;
        }
        while theta > g.end() + 1e-12 {
            theta -= std::f64::consts::PI;
            xs = -xs;
        }
        let theta = theta.clamp(g.start(), g.end());
        let value = self.field().bilinear(xs, theta).ok_or(TomoError::Domain { x: xs, nu: theta })?;
        Ok(value / r)
    }
}

/// `N`-mode symplectic tomogram.
pub trait TomogramSourceNd {
    fn dims(&self) -> usize;
    fn tomogram_nd(&self, x: &[f64], mu: &[f64], nu: &[f64]) -> Result<f64>;
}

/// `N`-mode Fresnel tomogram.
pub trait FresnelSourceNd {
    fn dims(&self) -> usize;
    fn fresnel_nd(&self, x: &[f64], nu: &[f64]) -> Result<f64>;
}

impl TomogramSourceNd for NdWavefunction {
    fn dims(&self) -> usize {
        NdWavefunction::dims(self)
    }

    fn tomogram_nd(&self, x: &[f64], mu: &[f64], nu: &[f64]) -> Result<f64> {
        symplectic_tomogram_nd(self, x, mu, nu)
    }
}

impl FresnelSourceNd for NdWavefunction {
    fn dims(&self) -> usize {
        NdWavefunction::dims(self)
    }

    fn fresnel_nd(&self, x: &[f64], nu: &[f64]) -> Result<f64> {
        fresnel_tomogram_nd(self, x, nu)
    }
}

/// Tomogram of a product state: the product of one-mode tomograms.
#[derive(Debug, Clone)]
pub struct Product<S>(pub Vec<S>);

impl<S: TomogramSource> TomogramSourceNd for Product<S> {
    fn dims(&self) -> usize {
        self.0.len()
    }

    fn tomogram_nd(&self, x: &[f64], mu: &[f64], nu: &[f64]) -> Result<f64> {
        let mut value = 1.0;
        for (k, s) in self.0.iter().enumerate() {
            value *= s.tomogram(x[k], mu[k], nu[k])?;
        }
        Ok(value)
    }
}

impl<S: FresnelSource> FresnelSourceNd for Product<S> {
    fn dims(&self) -> usize {
        self.0.len()
    }

    fn fresnel_nd(&self, x: &[f64], nu: &[f64]) -> Result<f64> {
        let mut value = 1.0;
        for (k, s) in self.0.iter().enumerate() {
            value *= s.fresnel(x[k], nu[k])?;
        }
        Ok(value)
    }
}

/// Symplectic view of an `N`-mode Fresnel source:
/// `w(X, mu, nu) = w_F(X_j/mu_j, nu_j/mu_j) / prod |mu_j|`.
#[derive(Debug, Clone)]
pub struct FromFresnelNd<S>(pub S);

impl<S: FresnelSourceNd> TomogramSourceNd for FromFresnelNd<S> {
    fn dims(&self) -> usize {
        self.0.dims()
    }

    fn tomogram_nd(&self, x: &[f64], mu: &[f64], nu: &[f64]) -> Result<f64> {
        let n = self.0.dims();
        let mut xs = Vec::with_capacity(n);
        let mut ns = Vec::with_capacity(n);
        let mut scale = 1.0;
        for k in 0..n {
            if mu[k].abs() <= NU_EPSILON {
                return Err(TomoError::Degenerate { mu: mu[k], nu: nu[k] });
            }
            xs.push(x[k] / mu[k]);
            ns.push(nu[k] / mu[k]);
            scale /= mu[k].abs();
        }
        Ok(self.0.fresnel_nd(&xs, &ns)? * scale)
    }
}
