//! C interface to `fresnel-tomo`.
//!
//! Objects cross the boundary as opaque pointers that the caller releases
//! with the matching `*_free` function. Every entry point returns an
//! [`FtStatus`]; on failure a message is kept per thread and can be read
//! with [`ft_last_error_message`]. Panics never unwind into C.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, c_void, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use fresnel_tomo::analytic::{gcf_tomogram_analytic, gcf_wavefunction, GcfParams};
use fresnel_tomo::reconstruct::{reconstruct_density_matrix, reconstruct_psi_from_source, PhaseConvention};
use fresnel_tomo::source::TomogramSource;
use fresnel_tomo::tomography::{fresnel_tomogram_value, optical_tomogram, symplectic_tomogram};
use fresnel_tomo::{DensityMatrix, InversionConfig, SampledWavefunction, TomoError, UniformGrid1D};
use num_complex::Complex64;

/// Status codes returned by every function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FtStatus {
    Ok = 0,
    InvalidArgument = 1,
    NullPointer = 2,
    Degenerate = 3,
    Domain = 4,
    MissingAnchor = 5,
    NodeAtOrigin = 6,
    Unsupported = 7,
    CallbackFailed = 8,
    BufferTooSmall = 9,
    Panic = 10,
}

/// Sampled one-mode wavefunction.
pub struct FtWavefunction(SampledWavefunction);

/// Reconstructed density matrix.
pub struct FtDensityMatrix(DensityMatrix);

/// Discretisation of the inversion integrals; see `ft_config_default`.
/// A step of zero or less means "derive from the window".
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct FtInversionConfig {
    pub mu_window: f64,
    pub taper_fraction: f64,
    pub x_window: f64,
    pub samples_per_axis: usize,
    pub x_taper_fraction: f64,
    pub mu_step: f64,
    pub x_step: f64,
    pub anchor_floor: f64,
}

impl From<InversionConfig> for FtInversionConfig {
    fn from(c: InversionConfig) -> Self {
        Self {
            mu_window: c.mu_window,
            taper_fraction: c.taper_fraction,
            x_window: c.x_window,
            samples_per_axis: c.samples_per_axis,
            x_taper_fraction: c.x_taper_fraction,
            mu_step: c.mu_step.unwrap_or(0.0),
            x_step: c.x_step.unwrap_or(0.0),
            anchor_floor: c.anchor_floor,
        }
    }
}

impl From<FtInversionConfig> for InversionConfig {
    fn from(c: FtInversionConfig) -> Self {
        Self {
            mu_window: c.mu_window,
            taper_fraction: c.taper_fraction,
            x_window: c.x_window,
            samples_per_axis: c.samples_per_axis,
            x_taper_fraction: c.x_taper_fraction,
            mu_step: (c.mu_step > 0.0).then_some(c.mu_step),
            x_step: (c.x_step > 0.0).then_some(c.x_step),
            anchor_floor: c.anchor_floor,
        }
    }
}

/// Tomogram supplied by the caller: writes `w(x, mu, nu)` to `*out` and
/// returns 0, or returns non-zero to abort the computation.
pub type FtTomogramCallback =
    Option<unsafe extern "C" fn(x: f64, mu: f64, nu: f64, user_data: *mut c_void, out: *mut f64) -> c_int>;

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).unwrap_or_default());
}

fn fail(status: FtStatus, msg: impl Into<String>) -> FtStatus {
    set_error(msg);
    status
}

fn from_tomo(e: TomoError) -> FtStatus {
    let status = match &e {
        TomoError::InvalidInput(_) | TomoError::Shape(_) | TomoError::SingularFrequency => FtStatus::InvalidArgument,
        TomoError::Degenerate { .. } => FtStatus::Degenerate,
        TomoError::Domain { .. } => FtStatus::Domain,
        TomoError::MissingAnchor => FtStatus::MissingAnchor,
        TomoError::NodeAtOrigin(_) => FtStatus::NodeAtOrigin,
        TomoError::Unsupported(_) => FtStatus::Unsupported,
    };
    fail(status, e.to_string())
}

/// Runs `f`, turning panics into [`FtStatus::Panic`].
fn guard(f: impl FnOnce() -> Result<(), FtStatus>) -> FtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            FtStatus::Ok
        }
        Ok(Err(status)) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            fail(FtStatus::Panic, format!("internal panic: {msg}"))
        }
    }
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), FtStatus> {
    if p.is_null() {
        Err(fail(FtStatus::NullPointer, format!("{name} is null")))
    } else {
        Ok(())
    }
}

fn tomo<T>(r: fresnel_tomo::Result<T>) -> Result<T, FtStatus> {
    r.map_err(from_tomo)
}

/// Message for the last failure on this thread; empty after a success.
/// The pointer stays valid until the next call into this library on the
/// same thread.
#[no_mangle]
pub extern "C" fn ft_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ft_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ft_config_default(out: *mut FtInversionConfig) -> FtStatus {
    guard(|| {
        non_null(out, "out")?;
        unsafe { out.write(InversionConfig::default().into()) };
        Ok(())
    })
}

/// Copies `count` samples starting at `start` with spacing `step`.
///
/// # Safety
/// `re` and `im` must each point to `count` doubles; `out` must be valid
/// for writes.
#[no_mangle]
pub unsafe extern "C" fn ft_wavefunction_new(
    start: f64,
    step: f64,
    count: usize,
    re: *const f64,
    im: *const f64,
    out: *mut *mut FtWavefunction,
) -> FtStatus {
    guard(|| {
        non_null(re, "re")?;
        non_null(im, "im")?;
        non_null(out, "out")?;
        let grid = tomo(UniformGrid1D::new(start, step, count))?;
        let (re, im) = unsafe { (std::slice::from_raw_parts(re, count), std::slice::from_raw_parts(im, count)) };
        let values = re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect();
        let psi = tomo(SampledWavefunction::new(grid, values))?;
        unsafe { out.write(Box::into_raw(Box::new(FtWavefunction(psi)))) };
        Ok(())
    })
}

/// Chirped Gaussian of width `sigma` and chirp `alpha` sampled on the grid.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ft_wavefunction_gcf(
    sigma: f64,
    alpha: f64,
    start: f64,
    step: f64,
    count: usize,
    out: *mut *mut FtWavefunction,
) -> FtStatus {
    guard(|| {
        non_null(out, "out")?;
        let p = tomo(GcfParams::new(sigma, alpha))?;
        let grid = tomo(UniformGrid1D::new(start, step, count))?;
        unsafe { out.write(Box::into_raw(Box::new(FtWavefunction(gcf_wavefunction(p, grid))))) };
        Ok(())
    })
}

/// # Safety
/// `psi` must be null or a pointer returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ft_wavefunction_free(psi: *mut FtWavefunction) {
    if !psi.is_null() {
        let _ = catch_unwind(AssertUnwindSafe(|| drop(unsafe { Box::from_raw(psi) })));
    }
}

/// # Safety
/// `psi` must be a live wavefunction handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ft_wavefunction_count(psi: *const FtWavefunction, out: *mut usize) -> FtStatus {
    guard(|| {
        non_null(psi, "psi")?;
        non_null(out, "out")?;
        unsafe { out.write((*psi).0.values().len()) };
        Ok(())
    })
}

/// Copies the samples into `re` and `im`, each of length `len`.
///
/// # Safety
/// `psi` must be a live handle; `re` and `im` must each hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ft_wavefunction_copy(
    psi: *const FtWavefunction,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> FtStatus {
    guard(|| {
        non_null(psi, "psi")?;
        non_null(re, "re")?;
        non_null(im, "im")?;
        let values = unsafe { (*psi).0.values() };
        if len < values.len() {
            return Err(fail(FtStatus::BufferTooSmall, format!("need {} samples, buffer holds {len}", values.len())));
        }
        for (k, v) in values.iter().enumerate() {
            unsafe {
                re.add(k).write(v.re);
                im.add(k).write(v.im);
            }
        }
        Ok(())
    })
}

/// Symplectic tomogram `w(x, mu, nu)` of a sampled wavefunction.
///
/// # Safety
/// `psi` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ft_symplectic_tomogram(
    psi: *const FtWavefunction,
    x: f64,
    mu: f64,
    nu: f64,
    out: *mut f64,
) -> FtStatus {
    guard(|| {
        non_null(psi, "psi")?;
        non_null(out, "out")?;
        let w = tomo(symplectic_tomogram(unsafe { &(*psi).0 }, x, mu, nu))?;
        unsafe { out.write(w) };
        Ok(())
    })
}

/// Fresnel tomogram `w_F(x, nu)`.
///
/// # Safety
/// `psi` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ft_fresnel_tomogram(psi: *const FtWavefunction, x: f64, nu: f64, out: *mut f64) -> FtStatus {
    guard(|| {
        non_null(psi, "psi")?;
        non_null(out, "out")?;
        unsafe { out.write(fresnel_tomogram_value(&(*psi).0, x, nu)) };
        Ok(())
    })
}

/// Optical tomogram `w(x, theta)`.
///
/// # Safety
/// `psi` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ft_optical_tomogram(
    psi: *const FtWavefunction,
    x: f64,
    theta: f64,
    out: *mut f64,
) -> FtStatus {
    guard(|| {
        non_null(psi, "psi")?;
        non_null(out, "out")?;
        unsafe { out.write(optical_tomogram(&(*psi).0, x, theta)) };
        Ok(())
    })
}

/// Closed-form chirped Gaussian tomogram.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ft_gcf_tomogram(sigma: f64, alpha: f64, x: f64, mu: f64, nu: f64, out: *mut f64) -> FtStatus {
    guard(|| {
        non_null(out, "out")?;
        let p = tomo(GcfParams::new(sigma, alpha))?;
        let w = tomo(gcf_tomogram_analytic(p, x, mu, nu))?;
        unsafe { out.write(w) };
        Ok(())
    })
}

struct Callback {
    f: unsafe extern "C" fn(f64, f64, f64, *mut c_void, *mut f64) -> c_int,
    user: *mut c_void,
}

impl TomogramSource for Callback {
    fn tomogram(&self, x: f64, mu: f64, nu: f64) -> fresnel_tomo::Result<f64> {
        let mut value = 0.0;
        let code = unsafe { (self.f)(x, mu, nu, self.user, &mut value) };
        if code != 0 {
            return Err(TomoError::InvalidInput(format!("{CALLBACK_TAG} {code} at (x = {x}, mu = {mu}, nu = {nu})")));
        }
        Ok(value)
    }
}

const CALLBACK_TAG: &str = "tomogram callback returned";

fn callback_status(e: TomoError) -> FtStatus {
    match &e {
        TomoError::InvalidInput(m) if m.starts_with(CALLBACK_TAG) => fail(FtStatus::CallbackFailed, m.clone()),
        _ => from_tomo(e),
    }
}

fn config(cfg: *const FtInversionConfig) -> InversionConfig {
    if cfg.is_null() {
        InversionConfig::default()
    } else {
        unsafe { (*cfg).into() }
    }
}

/// Density matrix on the grid `start + k step`, `k < count`, from a
/// tomogram callback. A null `cfg` selects the defaults.
///
/// # Safety
/// `callback` must be safe to call with `user_data`; `cfg` must be null or
/// valid; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ft_reconstruct_density_matrix(
    callback: FtTomogramCallback,
    user_data: *mut c_void,
    start: f64,
    step: f64,
    count: usize,
    cfg: *const FtInversionConfig,
    out: *mut *mut FtDensityMatrix,
) -> FtStatus {
    guard(|| {
        non_null(out, "out")?;
        let f = callback.ok_or_else(|| fail(FtStatus::NullPointer, "callback is null"))?;
        let grid = tomo(UniformGrid1D::new(start, step, count))?;
        let rho = reconstruct_density_matrix(&Callback { f, user: user_data }, grid, &config(cfg))
            .map_err(callback_status)?;
        unsafe { out.write(Box::into_raw(Box::new(FtDensityMatrix(rho)))) };
        Ok(())
    })
}

/// Wavefunction on the `nu` grid `start + k step` (which must contain 0)
/// from a tomogram callback, with `psi(0)` real and positive.
///
/// # Safety
/// As for [`ft_reconstruct_density_matrix`].
#[no_mangle]
pub unsafe extern "C" fn ft_reconstruct_psi(
    callback: FtTomogramCallback,
    user_data: *mut c_void,
    start: f64,
    step: f64,
    count: usize,
    cfg: *const FtInversionConfig,
    out: *mut *mut FtWavefunction,
) -> FtStatus {
    guard(|| {
        non_null(out, "out")?;
        let f = callback.ok_or_else(|| fail(FtStatus::NullPointer, "callback is null"))?;
        let grid = tomo(UniformGrid1D::new(start, step, count))?;
        let rec = reconstruct_psi_from_source(
            &Callback { f, user: user_data },
            grid,
            PhaseConvention::OriginRealPositive,
            &config(cfg),
        )
        .map_err(callback_status)?;
        unsafe { out.write(Box::into_raw(Box::new(FtWavefunction(rec.psi)))) };
        Ok(())
    })
}

/// # Safety
/// `rho` must be null or a pointer returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ft_density_matrix_free(rho: *mut FtDensityMatrix) {
    if !rho.is_null() {
        let _ = catch_unwind(AssertUnwindSafe(|| drop(unsafe { Box::from_raw(rho) })));
    }
}

/// Side length of the matrix.
///
/// # Safety
/// `rho` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ft_density_matrix_size(rho: *const FtDensityMatrix, out: *mut usize) -> FtStatus {
    guard(|| {
        non_null(rho, "rho")?;
        non_null(out, "out")?;
        unsafe { out.write((*rho).0.grid().count()) };
        Ok(())
    })
}

/// Entry `rho(x_i, x_j)`.
///
/// # Safety
/// `rho` must be a live handle; `re` and `im` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ft_density_matrix_get(
    rho: *const FtDensityMatrix,
    i: usize,
    j: usize,
    re: *mut f64,
    im: *mut f64,
) -> FtStatus {
    guard(|| {
        non_null(rho, "rho")?;
        non_null(re, "re")?;
        non_null(im, "im")?;
        let m = unsafe { &(*rho).0 };
        let n = m.grid().count();
        if i >= n || j >= n {
            return Err(fail(FtStatus::InvalidArgument, format!("index ({i}, {j}) outside a {n} x {n} matrix")));
        }
        let v = m.at(i, j);
        unsafe {
            re.write(v.re);
            im.write(v.im);
        }
        Ok(())
    })
}

/// Largest `|rho - rho^dagger|` entry before symmetrisation.
///
/// # Safety
/// `rho` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ft_density_matrix_asymmetry(rho: *const FtDensityMatrix, out: *mut f64) -> FtStatus {
    guard(|| {
        non_null(rho, "rho")?;
        non_null(out, "out")?;
        unsafe { out.write((*rho).0.asymmetry()) };
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CStr;
    use std::ptr;

    #[test]
    fn errors_set_the_message() {
        let mut out = ptr::null_mut();
        let status = unsafe { ft_wavefunction_gcf(-1.0, 0.0, -1.0, 0.1, 21, &mut out) };
        assert_eq!(status, FtStatus::InvalidArgument);
        assert!(out.is_null());
        let msg = unsafe { CStr::from_ptr(ft_last_error_message()) }.to_str().unwrap();
        assert!(msg.contains("sigma"), "{msg}");
    }

    #[test]
    fn null_output_is_rejected() {
        assert_eq!(unsafe { ft_config_default(ptr::null_mut()) }, FtStatus::NullPointer);
    }
}
