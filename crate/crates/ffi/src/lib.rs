//! C ABI for `mixcs`.
//!
//! Matrices cross the boundary as opaque [`MixcsMatrix`] handles. Every
//! fallible function returns a [`MixcsStatus`]; on failure the message is
//! available from [`mixcs_last_error_message`] on the same thread. Output
//! pointers are only written on success.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mixcs::ensembles::MeasurementMatrix;
use mixcs::experiments::Ensemble;
use mixcs::linalg::Matrix;
use mixcs::rip::{delta_exhaustive, delta_monte_carlo, sigma_interval, RipEstimate, SupportCase};
use mixcs::solver::{basis_pursuit, bpdn, RecoveryResult, SolveStatus};
use mixcs::Error;

/// Opaque measurement matrix.
pub struct MixcsMatrix {
    inner: MeasurementMatrix,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MixcsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    TooLarge = 3,
    RankDeficient = 4,
    Numerical = 5,
    Format = 6,
    Io = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MixcsEnsemble {
    Gaussian = 0,
    Bernoulli = 1,
    SMixed = 2,
    SBernoulli = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MixcsSupportCase {
    DiagInside = 0,
    OffDiag = 1,
    MixedBoundary = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MixcsSolveStatus {
    Converged = 0,
    MaxIter = 1,
    Infeasible = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixcsRipResult {
    pub delta: f64,
    pub gram_min: f64,
    pub gram_max: f64,
    pub supports_examined: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixcsRecoveryInfo {
    pub objective: f64,
    pub residual: f64,
    pub iterations: u64,
    pub status: MixcsSolveStatus,
    /// NaN when no certificate was produced.
    pub certificate_gap: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> MixcsStatus {
    match e {
        Error::Validation(_) | Error::Singular(_) | Error::Config(_) => MixcsStatus::InvalidArgument,
        Error::TooLarge { .. } => MixcsStatus::TooLarge,
        Error::RankDeficient(_) => MixcsStatus::RankDeficient,
        Error::Numerical(_) => MixcsStatus::Numerical,
        Error::Format(_) => MixcsStatus::Format,
        Error::Io(_) => MixcsStatus::Io,
    }
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (MixcsStatus, String)>) -> MixcsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MixcsStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_owned());
            set_error(&format!("internal panic: {msg}"));
            MixcsStatus::Panic
        }
    }
}

fn lift<T>(r: mixcs::Result<T>) -> Result<T, (MixcsStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (MixcsStatus, String) {
    (MixcsStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> (MixcsStatus, String) {
    (MixcsStatus::InvalidArgument, msg.into())
}

unsafe fn handle<'a>(m: *const MixcsMatrix) -> Result<&'a MixcsMatrix, (MixcsStatus, String)> {
    m.as_ref().ok_or_else(|| null("matrix handle"))
}

unsafe fn path_arg(p: *const c_char) -> Result<String, (MixcsStatus, String)> {
    if p.is_null() {
        return Err(null("path"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map(str::to_owned)
        .map_err(|_| invalid("path is not valid UTF-8"))
}

unsafe fn emit(out: *mut *mut MixcsMatrix, inner: MeasurementMatrix) -> Result<(), (MixcsStatus, String)> {
    *out = Box::into_raw(Box::new(MixcsMatrix { inner }));
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mixcs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failure on this thread. Valid until the next failing
/// call on the same thread; empty if nothing failed yet.
#[no_mangle]
pub extern "C" fn mixcs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Samples a scaled `n × cols` measurement matrix.
#[no_mangle]
pub unsafe extern "C" fn mixcs_matrix_generate(
    ensemble: MixcsEnsemble,
    n: usize,
    cols: usize,
    seed: u64,
    out: *mut *mut MixcsMatrix,
) -> MixcsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let e = match ensemble {
            MixcsEnsemble::Gaussian => Ensemble::Gaussian,
            MixcsEnsemble::Bernoulli => Ensemble::Bernoulli,
            MixcsEnsemble::SMixed => Ensemble::SMixed,
            MixcsEnsemble::SBernoulli => Ensemble::SBernoulli,
        };
        let m = lift(e.measurement(n, cols, seed))?;
        emit(out, m)
    })
}

/// Copies `rows · cols` row-major entries into a new matrix with scaling 1.
#[no_mangle]
pub unsafe extern "C" fn mixcs_matrix_from_rows(
    data: *const f64,
    rows: usize,
    cols: usize,
    out: *mut *mut MixcsMatrix,
) -> MixcsStatus {
    guard(|| {
        if data.is_null() {
            return Err(null("data"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let len = rows.checked_mul(cols).ok_or_else(|| invalid("dimensions overflow"))?;
        let values = std::slice::from_raw_parts(data, len).to_vec();
        let m = lift(Matrix::from_vec(rows, cols, values).and_then(MeasurementMatrix::from_matrix))?;
        emit(out, m)
    })
}

/// Reads a CSMAT1 file.
#[no_mangle]
pub unsafe extern "C" fn mixcs_matrix_load(path: *const c_char, out: *mut *mut MixcsMatrix) -> MixcsStatus {
    guard(|| {
        let p = path_arg(path)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let m = lift(mixcs::io::read_csmat_file(p))?;
        emit(out, m)
    })
}

/// Writes a CSMAT1 file.
#[no_mangle]
pub unsafe extern "C" fn mixcs_matrix_save(m: *const MixcsMatrix, path: *const c_char) -> MixcsStatus {
    guard(|| {
        let m = handle(m)?;
        let p = path_arg(path)?;
        lift(mixcs::io::write_csmat_file(p, &m.inner))
    })
}

#[no_mangle]
pub unsafe extern "C" fn mixcs_matrix_dims(m: *const MixcsMatrix, rows: *mut usize, cols: *mut usize) -> MixcsStatus {
    guard(|| {
        let m = handle(m)?;
        if rows.is_null() || cols.is_null() {
            return Err(null("output dimension"));
        }
        *rows = m.inner.rows();
        *cols = m.inner.cols();
        Ok(())
    })
}

/// Copies the row-major entries into `buf`, which must hold `rows · cols`
/// values.
#[no_mangle]
pub unsafe extern "C" fn mixcs_matrix_copy_entries(m: *const MixcsMatrix, buf: *mut f64, len: usize) -> MixcsStatus {
    guard(|| {
        let m = handle(m)?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        let entries = m.inner.entries();
        if len != entries.len() {
            return Err(invalid(format!("buffer holds {len} values, matrix has {}", entries.len())));
        }
        ptr::copy_nonoverlapping(entries.as_ptr(), buf, len);
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn mixcs_matrix_free(m: *mut MixcsMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

unsafe fn write_rip(est: &RipEstimate, out: *mut MixcsRipResult, witness: *mut usize) {
    *out = MixcsRipResult {
        delta: est.delta,
        gram_min: est.gram_min,
        gram_max: est.gram_max,
        supports_examined: est.supports_examined,
    };
    if !witness.is_null() {
        ptr::copy_nonoverlapping(est.witness_support.as_ptr(), witness, est.witness_support.len());
    }
}

/// Exact `δ_k` over all `k`-supports. `witness` may be null or hold `k`
/// indices.
#[no_mangle]
pub unsafe extern "C" fn mixcs_rip_exhaustive(
    m: *const MixcsMatrix,
    k: usize,
    out: *mut MixcsRipResult,
    witness: *mut usize,
) -> MixcsStatus {
    guard(|| {
        let m = handle(m)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let est = lift(delta_exhaustive(&m.inner, k))?;
        write_rip(&est, out, witness);
        Ok(())
    })
}

/// Lower bound on `δ_k` from `trials` random supports.
#[no_mangle]
pub unsafe extern "C" fn mixcs_rip_monte_carlo(
    m: *const MixcsMatrix,
    k: usize,
    trials: u64,
    seed: u64,
    out: *mut MixcsRipResult,
    witness: *mut usize,
) -> MixcsStatus {
    guard(|| {
        let m = handle(m)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let est = lift(delta_monte_carlo(&m.inner, k, trials, seed))?;
        write_rip(&est, out, witness);
        Ok(())
    })
}

unsafe fn solve_common(
    m: *const MixcsMatrix,
    y: *const f64,
    y_len: usize,
    x_out: *mut f64,
    x_len: usize,
    info: *mut MixcsRecoveryInfo,
    solve: impl FnOnce(&MeasurementMatrix, &[f64]) -> mixcs::Result<RecoveryResult>,
) -> Result<(), (MixcsStatus, String)> {
    let m = handle(m)?;
    if y.is_null() || x_out.is_null() {
        return Err(null("vector argument"));
    }
    if x_len != m.inner.cols() {
        return Err(invalid(format!("x buffer holds {x_len} values, matrix has {} columns", m.inner.cols())));
    }
    let y = std::slice::from_raw_parts(y, y_len);
    let res = lift(solve(&m.inner, y))?;
    ptr::copy_nonoverlapping(res.x_star.as_ptr(), x_out, x_len);
    if !info.is_null() {
        *info = MixcsRecoveryInfo {
            objective: res.objective,
            residual: res.residual,
            iterations: res.iterations as u64,
            status: match res.status {
                SolveStatus::Converged => MixcsSolveStatus::Converged,
                SolveStatus::MaxIter => MixcsSolveStatus::MaxIter,
                SolveStatus::Infeasible => MixcsSolveStatus::Infeasible,
            },
            certificate_gap: res.certificate_gap.unwrap_or(f64::NAN),
        };
    }
    Ok(())
}

/// `min ‖x‖₁ s.t. Φx = y`. `x_out` must hold `cols` values; `info` may be
/// null.
#[no_mangle]
pub unsafe extern "C" fn mixcs_basis_pursuit(
    m: *const MixcsMatrix,
    y: *const f64,
    y_len: usize,
    tol: f64,
    max_iter: usize,
    x_out: *mut f64,
    x_len: usize,
    info: *mut MixcsRecoveryInfo,
) -> MixcsStatus {
    guard(|| solve_common(m, y, y_len, x_out, x_len, info, |phi, y| basis_pursuit(phi, y, tol, max_iter)))
}

/// `min ‖x‖₁ s.t. ‖Φx − y‖₂ ≤ eps`.
#[no_mangle]
pub unsafe extern "C" fn mixcs_bpdn(
    m: *const MixcsMatrix,
    y: *const f64,
    y_len: usize,
    eps: f64,
    tol: f64,
    max_iter: usize,
    x_out: *mut f64,
    x_len: usize,
    info: *mut MixcsRecoveryInfo,
) -> MixcsStatus {
    guard(|| solve_common(m, y, y_len, x_out, x_len, info, |phi, y| bpdn(phi, y, eps, tol, max_iter)))
}

/// Admissible σ² range `[lo, hi]` for one support case. `feasible` is
/// set to 1 when `lo ≤ hi`.
#[no_mangle]
pub unsafe extern "C" fn mixcs_sigma_interval(
    gamma: f64,
    delta: f64,
    case: MixcsSupportCase,
    lo: *mut f64,
    hi: *mut f64,
    feasible: *mut i32,
) -> MixcsStatus {
    guard(|| {
        if lo.is_null() || hi.is_null() {
            return Err(null("interval bound"));
        }
        let case = match case {
            MixcsSupportCase::DiagInside => SupportCase::DiagInside,
            MixcsSupportCase::OffDiag => SupportCase::OffDiag,
            MixcsSupportCase::MixedBoundary => SupportCase::MixedBoundary,
        };
        let s = lift(sigma_interval(gamma, delta, case))?;
        *lo = s.lo;
        *hi = s.hi;
        if !feasible.is_null() {
            *feasible = s.feasible as i32;
        }
        Ok(())
    })
}
