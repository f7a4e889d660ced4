//! Uniform grids, sampled fields and the quadrature / Fourier primitives
//! every transform in the crate is built from.
//!
//! 2-D fields are stored row-major with the first grid as the outer index:
//! `values[i * ny + j]` is the sample at `(grid_x.point(i), grid_y.point(j))`.
//!
//! All routines are pure and single-threaded; summation order is fixed, so
//! repeated calls are bit-for-bit reproducible.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result, TomoError};

/// `start + k * step` for `0 <= k < count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformGrid1D {
    start: f64,
    step: f64,
    count: usize,
}

impl UniformGrid1D {
    pub fn new(start: f64, step: f64, count: usize) -> Result<Self> {
        if !start.is_finite() || !step.is_finite() || step <= 0.0 {
            return Err(invalid(format!("grid step must be finite and > 0 (got {step})")));
        }
        if count < 2 {
            return Err(invalid(format!("grid needs at least 2 points (got {count})")));
        }
        Ok(Self { start, step, count })
    }

    /// `count` points spanning `[min, max]` inclusive.
    pub fn from_range(min: f64, max: f64, count: usize) -> Result<Self> {
        if count < 2 || !(max > min) {
            return Err(invalid(format!("range grid needs max > min and count >= 2 (got [{min}, {max}], {count})")));
        }
        Self::new(min, (max - min) / (count - 1) as f64, count)
    }

    /// Symmetric grid over `[-half_width, half_width]` with the given step.
    /// The origin is always a node.
    pub fn centered(half_width: f64, step: f64) -> Result<Self> {
        if !(half_width > 0.0) || !(step > 0.0) {
            return Err(invalid("centered grid needs positive half-width and step"));
        }
        let half = (half_width / step).round() as usize;
        Self::new(-(half as f64) * step, step, 2 * half + 1)
    }

    /// Cell-centred grid over `[-half_width, half_width]` with an even number
    /// of cells, so no node sits on the origin. The step is adjusted to fit.
    pub fn midpoints(half_width: f64, step: f64) -> Result<Self> {
        if !(half_width > 0.0) || !(step > 0.0) {
            return Err(invalid("midpoint grid needs positive half-width and step"));
        }
        let mut count = ((2.0 * half_width / step).round() as usize).max(2);
        count += count % 2;
        let step = 2.0 * half_width / count as f64;
        Self::new(-half_width + 0.5 * step, step, count)
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn point(&self, k: usize) -> f64 {
        self.start + k as f64 * self.step
    }

    pub fn end(&self) -> f64 {
        self.point(self.count - 1)
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.count).map(move |k| self.point(k))
    }

    /// Midpoint of the grid's extent.
    pub fn center(&self) -> f64 {
        0.5 * (self.start + self.end())
    }

    /// Half of the grid's extent.
    pub fn half_extent(&self) -> f64 {
        0.5 * (self.end() - self.start)
    }

    /// Index of the node equal to `x` within `1e-9 * step`, if any.
    pub fn node_index(&self, x: f64) -> Option<usize> {
        let t = (x - self.start) / self.step;
        let k = t.round();
        if k < 0.0 || k > (self.count - 1) as f64 || (t - k).abs() > 1e-9 {
            return None;
        }
        Some(k as usize)
    }

    /// Cell index and fractional offset for linear interpolation, or `None`
    /// outside `[start, end]` (with a relative slack of `1e-12` steps).
    pub fn locate(&self, x: f64) -> Option<(usize, f64)> {
        let t = (x - self.start) / self.step;
        let last = (self.count - 1) as f64;
        if !(t >= -1e-12 && t <= last + 1e-12) {
            return None;
        }
        let t = t.clamp(0.0, last);
        let i = (t.floor() as usize).min(self.count - 2);
        Some((i, t - i as f64))
    }
}

/// Signed frequency of FFT bin `r` for an `n`-point transform of samples
/// spaced `step` apart: `2 pi r / (n step)` with bins above `n/2` wrapped to
/// negative frequencies.
pub fn fft_frequency(r: usize, n: usize, step: f64) -> f64 {
    let r = r as i64;
    let n_i = n as i64;
    let signed = if r > n_i / 2 { r - n_i } else { r };
    2.0 * PI * signed as f64 / (n as f64 * step)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField1D {
    grid: UniformGrid1D,
    values: Vec<Complex64>,
}

impl ComplexField1D {
    pub fn new(grid: UniformGrid1D, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.count() {
            return Err(TomoError::Shape(format!("{} values for a {}-point grid", values.len(), grid.count())));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: UniformGrid1D, f: impl Fn(f64) -> Complex64) -> Self {
        let values = grid.points().map(f).collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &UniformGrid1D {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Linear interpolation; zero outside the grid.
    pub fn interpolate(&self, x: f64) -> Complex64 {
        match self.grid.locate(x) {
            Some((i, t)) => self.values[i] * (1.0 - t) + self.values[i + 1] * t,
            None => Complex64::new(0.0, 0.0),
        }
    }
}

/// Complex amplitudes of a wavefunction on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledWavefunction {
    field: ComplexField1D,
}

impl SampledWavefunction {
    pub fn new(grid: UniformGrid1D, values: Vec<Complex64>) -> Result<Self> {
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(invalid("wavefunction samples must be finite"));
        }
        Ok(Self { field: ComplexField1D::new(grid, values)? })
    }

    pub fn from_fn(grid: UniformGrid1D, f: impl Fn(f64) -> Complex64) -> Self {
        Self { field: ComplexField1D::from_fn(grid, f) }
    }

    pub fn grid(&self) -> &UniformGrid1D {
        self.field.grid()
    }

    pub fn values(&self) -> &[Complex64] {
        self.field.values()
    }

    pub fn field(&self) -> &ComplexField1D {
        &self.field
    }

    /// `sum |psi_k|^2 * step`.
    pub fn norm_sqr(&self) -> f64 {
        self.values().iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid().step()
    }

    /// Rescales to unit L2 norm. Returns the norm before rescaling; a zero
    /// wavefunction is left untouched.
    pub fn normalize(&mut self) -> f64 {
        let norm = self.norm_sqr().sqrt();
        if norm > 0.0 {
            for v in &mut self.field.values {
                *v /= norm;
            }
        }
        norm
    }

    pub fn normalized(mut self) -> Self {
        self.normalize();
        self
    }

    /// Linear interpolation of the amplitude, zero outside the grid.
    pub fn amplitude_at(&self, x: f64) -> Complex64 {
        self.field.interpolate(x)
    }

    /// Linear interpolation of `|psi|^2`, zero outside the grid.
    pub fn density_at(&self, x: f64) -> f64 {
        match self.grid().locate(x) {
            Some((i, t)) => {
                let v = self.values();
                v[i].norm_sqr() * (1.0 - t) + v[i + 1].norm_sqr() * t
            }
            None => 0.0,
        }
    }
}

macro_rules! field2d {
    ($name:ident, $ty:ty) => {
        #[derive(Debug, Clone, PartialEq)]
        pub struct $name {
            grid_x: UniformGrid1D,
            grid_y: UniformGrid1D,
            values: Vec<$ty>,
        }

        impl $name {
            pub fn new(grid_x: UniformGrid1D, grid_y: UniformGrid1D, values: Vec<$ty>) -> Result<Self> {
                let expected = grid_x.count() * grid_y.count();
                if values.len() != expected {
                    return Err(TomoError::Shape(format!(
                        "{} values for a {}x{} grid",
                        values.len(),
                        grid_x.count(),
                        grid_y.count()
                    )));
                }
                Ok(Self { grid_x, grid_y, values })
            }

            pub fn from_fn(grid_x: UniformGrid1D, grid_y: UniformGrid1D, mut f: impl FnMut(f64, f64) -> $ty) -> Self {
                let mut values = Vec::with_capacity(grid_x.count() * grid_y.count());
                for x in grid_x.points() {
                    for y in grid_y.points() {
                        values.push(f(x, y));
                    }
                }
                Self { grid_x, grid_y, values }
            }

            pub fn grid_x(&self) -> &UniformGrid1D {
                &self.grid_x
            }

            pub fn grid_y(&self) -> &UniformGrid1D {
                &self.grid_y
            }

            pub fn values(&self) -> &[$ty] {
                &self.values
            }

            pub fn values_mut(&mut self) -> &mut [$ty] {
                &mut self.values
            }

            pub fn into_values(self) -> Vec<$ty> {
                self.values
            }

            pub fn at(&self, i: usize, j: usize) -> $ty {
                self.values[i * self.grid_y.count() + j]
            }

            pub fn row(&self, i: usize) -> &[$ty] {
                let ny = self.grid_y.count();
                &self.values[i * ny..(i + 1) * ny]
            }
        }
    };
}

field2d!(RealField2D, f64);
field2d!(ComplexField2D, Complex64);

impl RealField2D {
    /// Bilinear interpolation, `None` outside the sampled rectangle.
    pub fn bilinear(&self, x: f64, y: f64) -> Option<f64> {
        let (i, tx) = self.grid_x.locate(x)?;
        let (j, ty) = self.grid_y.locate(y)?;
        let v00 = self.at(i, j);
        let v01 = self.at(i, j + 1);
        let v10 = self.at(i + 1, j);
        let v11 = self.at(i + 1, j + 1);
        Some((1.0 - tx) * ((1.0 - ty) * v00 + ty * v01) + tx * ((1.0 - ty) * v10 + ty * v11))
    }

    pub fn to_complex(&self) -> ComplexField2D {
        ComplexField2D {
            grid_x: self.grid_x,
            grid_y: self.grid_y,
            values: self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        }
    }
}

/// Composite trapezoid rule over uniformly spaced samples.
pub fn trapezoid_integrate(values: &[Complex64], step: f64) -> Result<Complex64> {
    if values.len() < 2 {
        return Err(invalid("trapezoid rule needs at least two samples"));
    }
    let n = values.len();
    let interior: Complex64 = values[1..n - 1].iter().sum();
    Ok((interior + (values[0] + values[n - 1]) * 0.5) * step)
}

/// Real-valued counterpart of [`trapezoid_integrate`].
pub fn trapezoid_integrate_real(values: &[f64], step: f64) -> Result<f64> {
    if values.len() < 2 {
        return Err(invalid("trapezoid rule needs at least two samples"));
    }
    let n = values.len();
    let interior: f64 = values[1..n - 1].iter().sum();
    Ok((interior + 0.5 * (values[0] + values[n - 1])) * step)
}

/// Direction of the exponent in [`fft2`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FftSign {
    /// `exp(-2 pi i (rn/N + sm/M))`
    Negative,
    /// `exp(+2 pi i (rn/N + sm/M))`
    Positive,
}

/// Unnormalised 2-D discrete Fourier sum in index space.
///
/// The output grids carry the angular frequency spacing `2 pi / (N step)`
/// starting from zero; use [`fft_frequency`] for the signed frequency of a
/// bin. Scaling by the sample areas and phase shifts for a non-zero grid
/// origin are left to the caller.
pub fn fft2(field: &ComplexField2D, sign: FftSign) -> ComplexField2D {
    let nx = field.grid_x.count();
    let ny = field.grid_y.count();
    let mut planner = FftPlanner::<f64>::new();
    let (row_fft, col_fft) = match sign {
        FftSign::Negative => (planner.plan_fft_forward(ny), planner.plan_fft_forward(nx)),
        FftSign::Positive => (planner.plan_fft_inverse(ny), planner.plan_fft_inverse(nx)),
    };

    let mut data = field.values.clone();
    for row in data.chunks_exact_mut(ny) {
        row_fft.process(row);
    }
    let mut column = vec![Complex64::new(0.0, 0.0); nx];
    for j in 0..ny {
        for i in 0..nx {
            column[i] = data[i * ny + j];
        }
        col_fft.process(&mut column);
        for i in 0..nx {
            data[i * ny + j] = column[i];
        }
    }

    let freq_grid = |g: &UniformGrid1D| UniformGrid1D {
        start: 0.0,
        step: 2.0 * PI / (g.count() as f64 * g.step()),
        count: g.count(),
    };
    ComplexField2D { grid_x: freq_grid(&field.grid_x), grid_y: freq_grid(&field.grid_y), values: data }
}

/// `exp(i omega x_k)` for every node of `grid`.
pub(crate) fn phase_vector(grid: &UniformGrid1D, omega: f64) -> Vec<Complex64> {
    grid.points().map(|x| Complex64::from_polar(1.0, omega * x)).collect()
}

/// Direct evaluation of `(1/2pi) sum w(x_n, y_m) exp(i(omega_x x_n + omega_y y_m)) dx dy`
/// at one arbitrary frequency pair, using the true grid coordinates.
pub fn dft2_at(field: &RealField2D, omega_x: f64, omega_y: f64) -> Complex64 {
    let ex = phase_vector(&field.grid_x, omega_x);
    let ey = phase_vector(&field.grid_y, omega_y);
    let mut total = Complex64::new(0.0, 0.0);
    for (i, px) in ex.iter().enumerate() {
        let inner: Complex64 = field.row(i).iter().zip(&ey).map(|(&w, &p)| p * w).sum();
        total += px * inner;
    }
    total * (field.grid_x.step() * field.grid_y.step() / (2.0 * PI))
}

/// Window applied before truncated Fourier integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Taper {
    None,
    /// Flat centre, half-cosine roll-off over the outer `fraction` of the
    /// half-extent, reaching zero at the grid edge.
    RaisedCosine {
        fraction: f64,
    },
    /// Error-function roll-off centred at `(1 - fraction)` of the half-extent
    /// with width `fraction / 4` of the half-extent; the weight at the grid
    /// edge is `erfc(4)/2 < 1e-8`. Its Fourier transform decays like a
    /// Gaussian, so it suppresses truncation artefacts far more strongly
    /// than the raised cosine.
    SmoothEdge {
        fraction: f64,
    },
}

impl Taper {
    /// Weight at distance `offset` from the window centre for a window of
    /// the given half-extent.
    pub fn weight(&self, offset: f64, half_extent: f64) -> f64 {
        let a = offset.abs();
        match *self {
            Taper::None => 1.0,
            Taper::RaisedCosine { fraction } => {
                if fraction <= 0.0 {
                    return if a <= half_extent { 1.0 } else { 0.0 };
                }
                let edge = half_extent * (1.0 - fraction);
                if a <= edge {
                    1.0
                } else if a >= half_extent {
                    0.0
                } else {
                    0.5 * (1.0 + (PI * (a - edge) / (half_extent - edge)).cos())
                }
            }
            Taper::SmoothEdge { fraction } => {
                if fraction <= 0.0 {
                    return if a <= half_extent { 1.0 } else { 0.0 };
                }
                let centre = half_extent * (1.0 - fraction);
                let width = 0.25 * fraction * half_extent;
                0.5 * libm::erfc((a - centre) / width)
            }
        }
    }

    /// Weights for every node of `grid`, measured from the grid's centre.
    pub fn weights(&self, grid: &UniformGrid1D) -> Vec<f64> {
        let c = grid.center();
        let h = grid.half_extent();
        grid.points().map(|x| self.weight(x - c, h)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn grid_rejects_bad_parameters() {
        assert!(UniformGrid1D::new(0.0, 0.0, 5).is_err());
        assert!(UniformGrid1D::new(0.0, -1.0, 5).is_err());
        assert!(UniformGrid1D::new(0.0, 1.0, 1).is_err());
        assert!(UniformGrid1D::new(f64::NAN, 1.0, 4).is_err());
        assert!(UniformGrid1D::from_range(1.0, 1.0, 4).is_err());
    }

    #[test]
    fn grid_points_and_constructors() {
        let g = UniformGrid1D::from_range(-1.0, 1.0, 5).unwrap();
        assert_eq!(g.point(0), -1.0);
        assert_eq!(g.point(4), 1.0);
        assert_eq!(g.node_index(0.0), Some(2));
        assert_eq!(g.node_index(0.1), None);

        let m = UniformGrid1D::midpoints(2.0, 0.5).unwrap();
        assert_eq!(m.count(), 8);
        assert!((m.start() + 1.75).abs() < 1e-15);
        assert!(m.points().all(|x| x.abs() > 0.2));

        let cg = UniformGrid1D::centered(1.0, 0.25).unwrap();
        assert_eq!(cg.count(), 9);
        assert_eq!(cg.node_index(0.0), Some(4));
    }

    #[test]
    fn trapezoid_examples() {
        let v = [c(1.0), c(1.0), c(1.0)];
        assert!((trapezoid_integrate(&v, 0.5).unwrap() - c(1.0)).norm() < 1e-15);
        assert_eq!(trapezoid_integrate(&[c(0.0), c(0.0)], 3.0).unwrap(), c(0.0));
        assert!(trapezoid_integrate(&[c(1.0)], 1.0).is_err());

        let g = UniformGrid1D::new(-8.0, 1.0 / 64.0, 1025).unwrap();
        let vals: Vec<_> = g.points().map(|x| c((-x * x).exp())).collect();
        let got = trapezoid_integrate(&vals, g.step()).unwrap();
        assert!((got.re - PI.sqrt()).abs() < 1e-10, "{got}");
    }

    #[test]
    fn fft2_impulse_and_zero() {
        let g = UniformGrid1D::new(0.0, 1.0, 4).unwrap();
        let zero = ComplexField2D::new(g, g, vec![c(0.0); 16]).unwrap();
        assert!(fft2(&zero, FftSign::Negative).values().iter().all(|v| v.norm() == 0.0));

        let mut vals = vec![c(0.0); 16];
        vals[0] = c(1.0);
        let delta = ComplexField2D::new(g, g, vals).unwrap();
        let out = fft2(&delta, FftSign::Positive);
        assert!(out.values().iter().all(|v| (v - c(1.0)).norm() < 1e-15));
    }

    #[test]
    fn fft2_matches_direct_sum_on_rectangular_grid() {
        let gx = UniformGrid1D::new(0.0, 1.0, 3).unwrap();
        let gy = UniformGrid1D::new(0.0, 1.0, 5).unwrap();
        let field = ComplexField2D::from_fn(gx, gy, |x, y| Complex64::new(x + 0.3 * y, x * y - 1.0));
        let out = fft2(&field, FftSign::Positive);
        for r in 0..3 {
            for s in 0..5 {
                let mut direct = c(0.0);
                for n in 0..3 {
                    for m in 0..5 {
                        let ph = 2.0 * PI * (r as f64 * n as f64 / 3.0 + s as f64 * m as f64 / 5.0);
                        direct += field.at(n, m) * Complex64::from_polar(1.0, ph);
                    }
                }
                assert!((out.at(r, s) - direct).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn fft_frequency_wraps() {
        assert_eq!(fft_frequency(0, 8, 1.0), 0.0);
        assert!((fft_frequency(1, 8, 1.0) - PI / 4.0).abs() < 1e-15);
        assert!((fft_frequency(7, 8, 1.0) + PI / 4.0).abs() < 1e-15);
    }

    #[test]
    fn dft2_at_zero_field_and_dc() {
        let gx = UniformGrid1D::from_range(-1.0, 1.0, 11).unwrap();
        let gy = UniformGrid1D::from_range(-2.0, 2.0, 7).unwrap();
        let zero = RealField2D::from_fn(gx, gy, |_, _| 0.0);
        assert_eq!(dft2_at(&zero, 1.3, -0.4), c(0.0));

        let f = RealField2D::from_fn(gx, gy, |x, y| (x - y).cos() + 2.0);
        let sum: f64 = f.values().iter().sum();
        let expect = sum * gx.step() * gy.step() / (2.0 * PI);
        assert!((dft2_at(&f, 0.0, 0.0) - c(expect)).norm() < 1e-12);
    }

    #[test]
    fn bilinear_reproduces_nodes_and_rejects_outside() {
        let gx = UniformGrid1D::from_range(0.0, 1.0, 3).unwrap();
        let gy = UniformGrid1D::from_range(0.0, 2.0, 3).unwrap();
        let f = RealField2D::from_fn(gx, gy, |x, y| 2.0 * x + y);
        assert!((f.bilinear(0.5, 1.0).unwrap() - 2.0).abs() < 1e-15);
        assert!((f.bilinear(0.25, 0.5).unwrap() - 1.0).abs() < 1e-15);
        assert!(f.bilinear(1.5, 0.0).is_none());
    }

    #[test]
    fn tapers() {
        let rc = Taper::RaisedCosine { fraction: 0.2 };
        assert_eq!(rc.weight(0.0, 10.0), 1.0);
        assert_eq!(rc.weight(8.0, 10.0), 1.0);
        assert!((rc.weight(9.0, 10.0) - 0.5).abs() < 1e-15);
        assert_eq!(rc.weight(10.0, 10.0), 0.0);

        let se = Taper::SmoothEdge { fraction: 0.5 };
        assert!((se.weight(5.0, 10.0) - 0.5).abs() < 1e-15);
        assert!(se.weight(10.0, 10.0) < 1e-8);
        assert!((se.weight(0.0, 10.0) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn wavefunction_normalize_and_interpolate() {
        let g = UniformGrid1D::from_range(-1.0, 1.0, 3).unwrap();
        let mut psi = SampledWavefunction::new(g, vec![c(1.0), c(2.0), c(1.0)]).unwrap();
        let before = psi.normalize();
        assert!((before - 6f64.sqrt()).abs() < 1e-15);
        assert!((psi.norm_sqr() - 1.0).abs() < 1e-15);
        assert_eq!(psi.amplitude_at(3.0), c(0.0));
        let mid = psi.density_at(0.5);
        let v = psi.values();
        assert!((mid - 0.5 * (v[1].norm_sqr() + v[2].norm_sqr())).abs() < 1e-15);
        assert!(SampledWavefunction::new(g, vec![c(f64::NAN), c(0.0), c(0.0)]).is_err());
    }
}
