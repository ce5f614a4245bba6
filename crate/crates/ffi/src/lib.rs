//! C interface to the `cranked` simulator.
//!
//! Every function returns a [`CrankedStatus`]; results go through out
//! pointers. Handles are opaque and owned by the caller, who releases them
//! with the matching `*_free` function. After a non-zero status,
//! [`cranked_last_error_message`] describes the failure on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use cranked::gaussian::{
    entropy_renyi, entropy_vn, evolve, initial_covariance, linear_entropy, mean_lz, mode_occupation,
};
use cranked::{classify, compose, derive_spectral, propagate, CovarianceState, Error, InitialConditionSpec};
use cranked::{ModelParams, Propagator, Regime};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrankedStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    NoGroundState = 3,
    NonFinite = 4,
    Unphysical = 5,
    Precondition = 6,
    RealityCheck = 7,
    /// A Rust panic was caught at the boundary.
    Internal = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrankedRegime {
    SectorA = 0,
    SectorB,
    SectorC,
    SectorD,
    SectorE,
    BorderAD,
    BorderBD,
    BorderCD,
    BorderBE,
    BorderCE,
    PointL,
    PointLandau,
    IsotropicLine,
}

impl From<Regime> for CrankedRegime {
    fn from(r: Regime) -> Self {
        match r {
            Regime::SectorA => Self::SectorA,
            Regime::SectorB => Self::SectorB,
            Regime::SectorC => Self::SectorC,
            Regime::SectorD => Self::SectorD,
            Regime::SectorE => Self::SectorE,
            Regime::BorderAD => Self::BorderAD,
            Regime::BorderBD => Self::BorderBD,
            Regime::BorderCD => Self::BorderCD,
            Regime::BorderBE => Self::BorderBE,
            Regime::BorderCE => Self::BorderCE,
            Regime::PointL => Self::PointL,
            Regime::PointLandau => Self::PointLandau,
            Regime::IsotropicLine => Self::IsotropicLine,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrankedInitialKind {
    /// `α_μ = √k_μ`; the alpha arguments are ignored.
    GroundStateOfH0 = 0,
    /// `α_x = α_y = alpha_x`.
    Isotropic = 1,
    Anisotropic = 2,
}

/// Spectral quantities of a parameter point.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CrankedSpectral {
    pub eps_plus: f64,
    pub eps_minus: f64,
    pub delta_sq: f64,
    pub lambda_plus_re: f64,
    pub lambda_plus_im: f64,
    pub lambda_minus_re: f64,
    pub lambda_minus_im: f64,
}

/// Opaque canonical evolution matrix.
pub struct CrankedPropagator(Propagator);

/// Opaque Gaussian state.
pub struct CrankedState(CovarianceState);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> CrankedStatus {
    match e {
        Error::InvalidParameter { .. } | Error::Config { .. } | Error::Io { .. } => CrankedStatus::InvalidParameter,
        Error::NoGroundState { .. } => CrankedStatus::NoGroundState,
        Error::NonFinite(_) => CrankedStatus::NonFinite,
        Error::Unphysical(_) => CrankedStatus::Unphysical,
        Error::Precondition(_) | Error::CompositeProvenance => CrankedStatus::Precondition,
        Error::RealityCheck { .. } => CrankedStatus::RealityCheck,
    }
}

/// Runs `body`, translating errors and panics into a status code.
fn guard(body: impl FnOnce() -> Result<(), CrankedStatus>) -> CrankedStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => CrankedStatus::Ok,
        Ok(Err(status)) => status,
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("internal error: {msg}"));
            CrankedStatus::Internal
        }
    }
}

trait OrStatus<T> {
    fn or_status(self) -> Result<T, CrankedStatus>;
}

impl<T> OrStatus<T> for cranked::Result<T> {
    fn or_status(self) -> Result<T, CrankedStatus> {
        self.map_err(|e| {
            set_last_error(e.to_string());
            status_of(&e)
        })
    }
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), CrankedStatus> {
    if p.is_null() {
        set_last_error(format!("null pointer passed for `{name}`"));
        Err(CrankedStatus::NullPointer)
    } else {
        Ok(())
    }
}

fn write_matrix(m: &cranked::propagator::Matrix, out: *mut f64) {
    for i in 0..4 {
        for j in 0..4 {
            // SAFETY: the caller provides room for 16 doubles.
            unsafe { *out.add(4 * i + j) = m[(i, j)] };
        }
    }
}

/// Message for the most recent failure on this thread, or NULL. The pointer
/// stays valid until the next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn cranked_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Static, NUL-terminated name of a regime tag.
#[no_mangle]
pub extern "C" fn cranked_regime_name(regime: CrankedRegime) -> *const c_char {
    let s: &'static [u8] = match regime {
        CrankedRegime::SectorA => b"SectorA\0",
        CrankedRegime::SectorB => b"SectorB\0",
        CrankedRegime::SectorC => b"SectorC\0",
        CrankedRegime::SectorD => b"SectorD\0",
        CrankedRegime::SectorE => b"SectorE\0",
        CrankedRegime::BorderAD => b"BorderAD\0",
        CrankedRegime::BorderBD => b"BorderBD\0",
        CrankedRegime::BorderCD => b"BorderCD\0",
        CrankedRegime::BorderBE => b"BorderBE\0",
        CrankedRegime::BorderCE => b"BorderCE\0",
        CrankedRegime::PointL => b"PointL\0",
        CrankedRegime::PointLandau => b"PointLandau\0",
        CrankedRegime::IsotropicLine => b"IsotropicLine\0",
    };
    s.as_ptr().cast()
}

/// Regime of `(k_x, k_y, omega)` with borders thickened by `rel_tol`.
///
/// # Safety
/// `out` must be NULL or point to writable memory for one `CrankedRegime`.
#[no_mangle]
pub unsafe extern "C" fn cranked_classify(
    k_x: f64,
    k_y: f64,
    omega: f64,
    rel_tol: f64,
    out: *mut CrankedRegime,
) -> CrankedStatus {
    guard(|| {
        non_null(out, "out")?;
        if !(rel_tol.is_finite() && rel_tol > 0.0) {
            set_last_error(format!("rel_tol must be positive and finite, got {rel_tol}"));
            return Err(CrankedStatus::InvalidParameter);
        }
        let p = ModelParams::new(k_x, k_y, omega).or_status()?;
        *out = classify(&p, rel_tol).into();
        Ok(())
    })
}

/// # Safety
/// `out` must be NULL or point to writable memory for one `CrankedSpectral`.
#[no_mangle]
pub unsafe extern "C" fn cranked_spectral(k_x: f64, k_y: f64, omega: f64, out: *mut CrankedSpectral) -> CrankedStatus {
    guard(|| {
        non_null(out, "out")?;
        let sd = derive_spectral(&ModelParams::new(k_x, k_y, omega).or_status()?);
        *out = CrankedSpectral {
            eps_plus: sd.eps_plus,
            eps_minus: sd.eps_minus,
            delta_sq: sd.delta_sq,
            lambda_plus_re: sd.lambda_plus.re,
            lambda_plus_im: sd.lambda_plus.im,
            lambda_minus_re: sd.lambda_minus.re,
            lambda_minus_im: sd.lambda_minus.im,
        };
        Ok(())
    })
}

/// Closed-form evolution over time `t`.
///
/// # Safety
/// `out` must be NULL or point to writable memory for one pointer.
#[no_mangle]
pub unsafe extern "C" fn cranked_propagate(
    k_x: f64,
    k_y: f64,
    omega: f64,
    t: f64,
    out: *mut *mut CrankedPropagator,
) -> CrankedStatus {
    guard(|| {
        non_null(out, "out")?;
        let p = ModelParams::new(k_x, k_y, omega).or_status()?;
        let u = propagate(&p, t).or_status()?;
        *out = Box::into_raw(Box::new(CrankedPropagator(u)));
        Ok(())
    })
}

/// Evolution by `first`, then by `second`, as a new handle.
///
/// # Safety
/// `first` and `second` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cranked_propagator_compose(
    first: *const CrankedPropagator,
    second: *const CrankedPropagator,
    out: *mut *mut CrankedPropagator,
) -> CrankedStatus {
    guard(|| {
        non_null(first, "first")?;
        non_null(second, "second")?;
        non_null(out, "out")?;
        let u = compose(&(*first).0, &(*second).0);
        *out = Box::into_raw(Box::new(CrankedPropagator(u)));
        Ok(())
    })
}

/// Copies the 4×4 matrix, row-major over `(q_x, q_y, p_x, p_y)`.
///
/// # Safety
/// `p` must be a live handle; `out` must have room for 16 doubles.
#[no_mangle]
pub unsafe extern "C" fn cranked_propagator_matrix(p: *const CrankedPropagator, out: *mut f64) -> CrankedStatus {
    guard(|| {
        non_null(p, "propagator")?;
        non_null(out, "out")?;
        write_matrix(&(*p).0.matrix, out);
        Ok(())
    })
}

/// # Safety
/// `p` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cranked_propagator_free(p: *mut CrankedPropagator) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Separable initial state. `alpha_x` and `alpha_y` are read according to `kind`.
///
/// # Safety
/// `out` must be NULL or point to writable memory for one pointer.
#[no_mangle]
pub unsafe extern "C" fn cranked_state_new(
    kind: CrankedInitialKind,
    alpha_x: f64,
    alpha_y: f64,
    k_x: f64,
    k_y: f64,
    out: *mut *mut CrankedState,
) -> CrankedStatus {
    guard(|| {
        non_null(out, "out")?;
        let spec = match kind {
            CrankedInitialKind::GroundStateOfH0 => InitialConditionSpec::GroundStateOfH0,
            CrankedInitialKind::Isotropic => InitialConditionSpec::Isotropic { alpha: alpha_x },
            CrankedInitialKind::Anisotropic => InitialConditionSpec::Anisotropic { alpha_x, alpha_y },
        };
        let s = initial_covariance(&spec, k_x, k_y).or_status()?;
        *out = Box::into_raw(Box::new(CrankedState(s)));
        Ok(())
    })
}

/// `𝒰𝒞𝒰ᵗ` as a new state handle.
///
/// # Safety
/// `state` and `p` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cranked_state_evolve(
    state: *const CrankedState,
    p: *const CrankedPropagator,
    out: *mut *mut CrankedState,
) -> CrankedStatus {
    guard(|| {
        non_null(state, "state")?;
        non_null(p, "propagator")?;
        non_null(out, "out")?;
        let s = evolve(&(*state).0, &(*p).0);
        *out = Box::into_raw(Box::new(CrankedState(s)));
        Ok(())
    })
}

/// Copies the covariance matrix, row-major over `(q_x, q_y, p_x, p_y)`.
///
/// # Safety
/// `state` must be a live handle; `out` must have room for 16 doubles.
#[no_mangle]
pub unsafe extern "C" fn cranked_state_matrix(state: *const CrankedState, out: *mut f64) -> CrankedStatus {
    guard(|| {
        non_null(state, "state")?;
        non_null(out, "out")?;
        write_matrix((*state).0.matrix(), out);
        Ok(())
    })
}

/// Mode occupation `f`.
///
/// # Safety
/// `state` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cranked_state_occupation(state: *const CrankedState, out: *mut f64) -> CrankedStatus {
    guard(|| {
        non_null(state, "state")?;
        non_null(out, "out")?;
        *out = mode_occupation(&(*state).0).or_status()?;
        Ok(())
    })
}

/// Mean angular momentum `⟨l_z⟩`.
///
/// # Safety
/// `state` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cranked_state_lz(state: *const CrankedState, out: *mut f64) -> CrankedStatus {
    guard(|| {
        non_null(state, "state")?;
        non_null(out, "out")?;
        *out = mean_lz(&(*state).0);
        Ok(())
    })
}

/// # Safety
/// `state` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cranked_state_free(state: *mut CrankedState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Von Neumann entropy in nats for occupation `f`.
///
/// # Safety
/// `out` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn cranked_entropy_vn(f: f64, out: *mut f64) -> CrankedStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = entropy_vn(f).or_status()?;
        Ok(())
    })
}

/// Rényi entropy of index `alpha` (positive, not 1).
///
/// # Safety
/// `out` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn cranked_entropy_renyi(f: f64, alpha: f64, out: *mut f64) -> CrankedStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = entropy_renyi(f, alpha).or_status()?;
        Ok(())
    })
}

/// Linear entropy `1 − Tr ρ²`.
///
/// # Safety
/// `out` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn cranked_linear_entropy(f: f64, out: *mut f64) -> CrankedStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = linear_entropy(f).or_status()?;
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CStr;

    fn last_error() -> String {
        let p = cranked_last_error_message();
        assert!(!p.is_null());
        unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
    }

    #[test]
    fn classify_point() {
        let mut r = CrankedRegime::SectorE;
        let st = unsafe { cranked_classify(1.0, 0.3, 0.4, 1e-9, &mut r) };
        assert_eq!(st, CrankedStatus::Ok);
        assert_eq!(r, CrankedRegime::SectorA);
        let name = unsafe { CStr::from_ptr(cranked_regime_name(r)) };
        assert_eq!(name.to_str().unwrap(), "SectorA");
        assert!(cranked_last_error_message().is_null());
    }

    #[test]
    fn null_out_pointer() {
        let st = unsafe { cranked_classify(1.0, 0.3, 0.4, 1e-9, std::ptr::null_mut()) };
        assert_eq!(st, CrankedStatus::NullPointer);
        assert!(last_error().contains("out"));
    }

    #[test]
    fn bad_tolerance() {
        let mut r = CrankedRegime::SectorA;
        let st = unsafe { cranked_classify(1.0, 0.3, 0.4, 0.0, &mut r) };
        assert_eq!(st, CrankedStatus::InvalidParameter);
    }

    #[test]
    fn spectral_values() {
        let mut s = CrankedSpectral::default();
        assert_eq!(unsafe { cranked_spectral(1.0, -1.5, 1.25, &mut s) }, CrankedStatus::Ok);
        assert_eq!(s.delta_sq, 0.0);
        assert!((s.lambda_plus_re - 1.3125f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn evolve_and_measure() {
        unsafe {
            let mut u = std::ptr::null_mut();
            assert_eq!(cranked_propagate(1.0, 1.0, 0.7, std::f64::consts::PI / 2.8, &mut u), CrankedStatus::Ok);
            let mut s0 = std::ptr::null_mut();
            assert_eq!(
                cranked_state_new(CrankedInitialKind::Anisotropic, 2.0, 0.5, 1.0, 1.0, &mut s0),
                CrankedStatus::Ok
            );
            let mut s = std::ptr::null_mut();
            assert_eq!(cranked_state_evolve(s0, u, &mut s), CrankedStatus::Ok);
            let mut f = -1.0;
            assert_eq!(cranked_state_occupation(s, &mut f), CrankedStatus::Ok);
            assert!((f - 0.125).abs() < 1e-12);
            let mut e = 0.0;
            assert_eq!(cranked_entropy_vn(f, &mut e), CrankedStatus::Ok);
            assert!(e > 0.0);
            let mut m = [0.0; 16];
            assert_eq!(cranked_state_matrix(s, m.as_mut_ptr()), CrankedStatus::Ok);
            assert!((m[1] - m[4]).abs() < 1e-15);
            cranked_state_free(s);
            cranked_state_free(s0);
            cranked_propagator_free(u);
        }
    }

    #[test]
    fn compose_handles() {
        unsafe {
            let (mut a, mut b, mut c, mut whole) =
                (std::ptr::null_mut(), std::ptr::null_mut(), std::ptr::null_mut(), std::ptr::null_mut());
            assert_eq!(cranked_propagate(1.0, 0.3, 0.5, 1.0, &mut a), CrankedStatus::Ok);
            assert_eq!(cranked_propagate(1.0, 0.3, 0.5, 2.0, &mut b), CrankedStatus::Ok);
            assert_eq!(cranked_propagate(1.0, 0.3, 0.5, 3.0, &mut whole), CrankedStatus::Ok);
            assert_eq!(cranked_propagator_compose(a, b, &mut c), CrankedStatus::Ok);
            let (mut m1, mut m2) = ([0.0; 16], [0.0; 16]);
            cranked_propagator_matrix(c, m1.as_mut_ptr());
            cranked_propagator_matrix(whole, m2.as_mut_ptr());
            for (x, y) in m1.iter().zip(&m2) {
                assert!((x - y).abs() < 1e-12);
            }
            for h in [a, b, c, whole] {
                cranked_propagator_free(h);
            }
            cranked_propagator_free(std::ptr::null_mut());
        }
    }

    #[test]
    fn errors_map_to_codes() {
        unsafe {
            let mut s = std::ptr::null_mut();
            let st = cranked_state_new(CrankedInitialKind::GroundStateOfH0, 0.0, 0.0, 1.0, -1.0, &mut s);
            assert_eq!(st, CrankedStatus::NoGroundState);
            assert!(last_error().contains("no normalizable ground state"));
            assert!(s.is_null());

            let mut u = std::ptr::null_mut();
            let st = cranked_propagate(-4.0, -4.0, 0.1, 1e4, &mut u);
            assert_eq!(st, CrankedStatus::NonFinite);

            let mut e = 0.0;
            assert_eq!(cranked_entropy_renyi(1.0, 1.0, &mut e), CrankedStatus::InvalidParameter);
            assert_eq!(cranked_entropy_vn(-1.0, &mut e), CrankedStatus::InvalidParameter);
            assert_eq!(cranked_linear_entropy(1.0, &mut e), CrankedStatus::Ok);
            assert!((e - 2.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn panics_are_contained() {
        let st = guard(|| panic!("boom"));
        assert_eq!(st, CrankedStatus::Internal);
        assert!(last_error().contains("boom"));
    }
}
