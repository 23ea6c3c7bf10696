//! C ABI over [`infpot`]. A context owns the tolerances and the last error
//! message; every call returns an [`InfpotStatus`] and writes results
//! through out-pointers. Panics are caught at the boundary.

use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use infpot::series::{self, Form, PolarPoint};
use infpot::{Error, PlanePoint, Potential, Region};

/// Opaque handle; create with [`infpot_context_new`], release with
/// [`infpot_context_free`].
pub struct InfpotContext {
    potential: Potential,
    last_error: CString,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InfpotStatus {
    Ok = 0,
    NullPointer = 1,
    /// Point or argument outside its domain.
    Domain = 2,
    /// Tolerance or policy rejected.
    Policy = 3,
    /// Series truncation failed or a corner singularity was hit.
    Series = 4,
    /// A root solve or quadrature did not converge.
    NoConvergence = 5,
    /// Gradient or Hessian undefined at the point.
    Undefined = 6,
    Panic = 7,
    Other = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InfpotRegion {
    InteriorOffDiagonal = 0,
    Diagonal = 1,
    Median = 2,
    Boundary = 3,
    Center = 4,
}

impl From<Region> for InfpotRegion {
    fn from(r: Region) -> Self {
        match r {
            Region::InteriorOffDiagonal => InfpotRegion::InteriorOffDiagonal,
            Region::Diagonal => InfpotRegion::Diagonal,
            Region::Median => InfpotRegion::Median,
            Region::Boundary => InfpotRegion::Boundary,
            Region::Center => InfpotRegion::Center,
        }
    }
}

fn status_of(e: &Error) -> InfpotStatus {
    match e {
        Error::Domain(_) => InfpotStatus::Domain,
        Error::Policy(_) => InfpotStatus::Policy,
        Error::Truncation { .. } | Error::CornerSingularity { .. } => InfpotStatus::Series,
        Error::Bracket { .. } | Error::NoConvergence { .. } | Error::Quadrature { .. } => InfpotStatus::NoConvergence,
        Error::SingularHessian { .. } | Error::UndefinedGradient { .. } => InfpotStatus::Undefined,
        Error::At { source, .. } => status_of(source),
        _ => InfpotStatus::Other,
    }
}

impl InfpotContext {
    fn fail(&mut self, status: InfpotStatus, msg: String) -> InfpotStatus {
        self.last_error = CString::new(msg.replace('\0', " ")).unwrap_or_default();
        status
    }
}

/// Runs `f` on the context, recording the error message on failure.
///
/// # Safety
/// `ctx` must be null or a live pointer from [`infpot_context_new`].
unsafe fn with_ctx(ctx: *mut InfpotContext, f: impl FnOnce(&mut InfpotContext) -> Result<(), Error>) -> InfpotStatus {
    let Some(c) = ctx.as_mut() else {
        return InfpotStatus::NullPointer;
    };
    match catch_unwind(AssertUnwindSafe(|| f(c))) {
        Ok(Ok(())) => {
            c.last_error = CString::default();
            InfpotStatus::Ok
        }
        Ok(Err(e)) => {
            let s = status_of(&e);
            c.fail(s, e.to_string())
        }
        Err(_) => c.fail(InfpotStatus::Panic, "panic inside infpot".into()),
    }
}

/// Writes `values` to `out`, which must be non-null and hold
/// `values.len()` doubles.
unsafe fn write_out(out: *mut f64, values: &[f64]) -> Result<(), Error> {
    ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
    Ok(())
}

/// A context with the default tolerances, or null if allocation panicked.
#[no_mangle]
pub extern "C" fn infpot_context_new() -> *mut InfpotContext {
    catch_unwind(|| Box::into_raw(Box::new(InfpotContext { potential: Potential::default(), last_error: CString::default() })))
        .unwrap_or(ptr::null_mut())
}

/// # Safety
/// `ctx` must be null or a pointer from [`infpot_context_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn infpot_context_free(ctx: *mut InfpotContext) {
    if !ctx.is_null() {
        drop(Box::from_raw(ctx));
    }
}

/// Absolute truncation tolerance of every series (default `1e-15`).
///
/// # Safety
/// `ctx` must be null or a live context.
#[no_mangle]
pub unsafe extern "C" fn infpot_context_set_abs_tol(ctx: *mut InfpotContext, abs_tol: f64) -> InfpotStatus {
    with_ctx(ctx, |c| {
        let series = infpot::SeriesPolicy { abs_tol, ..c.potential.series };
        c.potential = Potential::new(series, c.potential.solver)?;
        Ok(())
    })
}

/// Residual tolerance of the root solves (default `1e-13`).
///
/// # Safety
/// `ctx` must be null or a live context.
#[no_mangle]
pub unsafe extern "C" fn infpot_context_set_root_tol(ctx: *mut InfpotContext, root_tol: f64) -> InfpotStatus {
    with_ctx(ctx, |c| {
        let solver = infpot::SolverPolicy { root_tol, ..c.potential.solver };
        c.potential = Potential::new(c.potential.series, solver)?;
        Ok(())
    })
}

/// `u(x, y)` on `[0, 2]²`.
///
/// # Safety
/// `ctx` must be null or a live context; `out` must point to one double.
#[no_mangle]
pub unsafe extern "C" fn infpot_eval_u(ctx: *mut InfpotContext, x: f64, y: f64, out: *mut f64) -> InfpotStatus {
    if out.is_null() {
        return InfpotStatus::NullPointer;
    }
    with_ctx(ctx, |c| {
        let v = c.potential.eval_u(PlanePoint::new(x, y)?)?;
        write_out(out, &[v])
    })
}

/// `∇u(x, y)` as `(u_x, u_y)`.
///
/// # Safety
/// `ctx` must be null or a live context; `out` must point to two doubles.
#[no_mangle]
pub unsafe extern "C" fn infpot_eval_grad(ctx: *mut InfpotContext, x: f64, y: f64, out: *mut f64) -> InfpotStatus {
    if out.is_null() {
        return InfpotStatus::NullPointer;
    }
    with_ctx(ctx, |c| {
        let g = c.potential.eval_grad(PlanePoint::new(x, y)?)?;
        write_out(out, &g)
    })
}

/// `ℋu(x, y)` row-major as `(u_xx, u_xy, u_yx, u_yy)`.
///
/// # Safety
/// `ctx` must be null or a live context; `out` must point to four doubles.
#[no_mangle]
pub unsafe extern "C" fn infpot_eval_hessian(ctx: *mut InfpotContext, x: f64, y: f64, out: *mut f64) -> InfpotStatus {
    if out.is_null() {
        return InfpotStatus::NullPointer;
    }
    with_ctx(ctx, |c| {
        let h = c.potential.eval_hessian(PlanePoint::new(x, y)?)?;
        write_out(out, &[h[0][0], h[0][1], h[1][0], h[1][1]])
    })
}

/// Region tag of a point.
///
/// # Safety
/// `ctx` must be null or a live context; `out` must point to one region.
#[no_mangle]
pub unsafe extern "C" fn infpot_region(ctx: *mut InfpotContext, x: f64, y: f64, out: *mut InfpotRegion) -> InfpotStatus {
    if out.is_null() {
        return InfpotStatus::NullPointer;
    }
    with_ctx(ctx, |_| {
        *out = infpot::field::Folded::new(PlanePoint::new(x, y)?).region().into();
        Ok(())
    })
}

/// The series `W(r, θ)` on `0 <= r <= 1`, `0 <= θ <= π/2`.
///
/// # Safety
/// `ctx` must be null or a live context; `out` must point to one double.
#[no_mangle]
pub unsafe extern "C" fn infpot_w(ctx: *mut InfpotContext, r: f64, theta: f64, out: *mut f64) -> InfpotStatus {
    if out.is_null() {
        return InfpotStatus::NullPointer;
    }
    with_ctx(ctx, |c| {
        let v = series::w(PolarPoint::new(r, theta)?, &c.potential.series)?;
        write_out(out, &[v])
    })
}

/// Jacobi `ϑ₂(z, q)`, `0 <= q < 1`, in the form chosen for `q`.
///
/// # Safety
/// `ctx` must be null or a live context; `out` must point to one double.
#[no_mangle]
pub unsafe extern "C" fn infpot_theta2(ctx: *mut InfpotContext, z: f64, q: f64, out: *mut f64) -> InfpotStatus {
    if out.is_null() {
        return InfpotStatus::NullPointer;
    }
    with_ctx(ctx, |c| {
        let v = series::theta2(z, q, Form::preferred(q), &c.potential.series)?;
        write_out(out, &[v])
    })
}

/// Message of the last failed call on `ctx`, empty after a success. Valid
/// until the next call on the same context; null for a null context.
///
/// # Safety
/// `ctx` must be null or a live context.
#[no_mangle]
pub unsafe extern "C" fn infpot_last_error(ctx: *const InfpotContext) -> *const c_char {
    match ctx.as_ref() {
        Some(c) => c.last_error.as_ptr(),
        None => ptr::null(),
    }
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn infpot_status_message(status: InfpotStatus) -> *const c_char {
    let s: &'static CStr = match status {
        InfpotStatus::Ok => c"ok",
        InfpotStatus::NullPointer => c"null pointer",
        InfpotStatus::Domain => c"argument outside its domain",
        InfpotStatus::Policy => c"invalid tolerance",
        InfpotStatus::Series => c"series truncation failed",
        InfpotStatus::NoConvergence => c"solver did not converge",
        InfpotStatus::Undefined => c"derivative undefined at this point",
        InfpotStatus::Panic => c"internal panic",
        InfpotStatus::Other => c"other failure",
    };
    s.as_ptr()
}
