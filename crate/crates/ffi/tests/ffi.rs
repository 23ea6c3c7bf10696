#![allow(clippy::excessive_precision)]

use std::ffi::CStr;
use std::ptr;

use infpot_ffi::*;

struct Ctx(*mut InfpotContext);

impl Ctx {
    fn new() -> Self {
        let c = infpot_context_new();
        assert!(!c.is_null());
        Ctx(c)
    }

    fn last_error(&self) -> String {
        unsafe { CStr::from_ptr(infpot_last_error(self.0)) }.to_string_lossy().into_owned()
    }
}

impl Drop for Ctx {
    fn drop(&mut self) {
        unsafe { infpot_context_free(self.0) }
    }
}

#[test]
fn values_through_the_abi() {
    let c = Ctx::new();
    let mut u = f64::NAN;
    unsafe {
        assert_eq!(infpot_eval_u(c.0, 1.0, 1.0, &mut u), InfpotStatus::Ok);
        assert_eq!(u, 1.0);
        assert_eq!(infpot_eval_u(c.0, 1.0, 0.3, &mut u), InfpotStatus::Ok);
        assert_eq!(u, 0.3);
        assert_eq!(infpot_eval_u(c.0, 0.0, 0.7, &mut u), InfpotStatus::Ok);
        assert_eq!(u, 0.0);
    }
    assert_eq!(c.last_error(), "");
}

#[test]
fn gradient_hessian_and_region() {
    let c = Ctx::new();
    let (x, y) = (0.25, 0.75);
    let mut g = [0.0; 2];
    let mut h = [0.0; 4];
    let mut region = InfpotRegion::Center;
    unsafe {
        assert_eq!(infpot_eval_grad(c.0, x, y, g.as_mut_ptr()), InfpotStatus::Ok);
        assert_eq!(infpot_eval_hessian(c.0, x, y, h.as_mut_ptr()), InfpotStatus::Ok);
        assert_eq!(infpot_region(c.0, x, y, &mut region), InfpotStatus::Ok);
    }
    assert!(g[0] > 0.0 && g[1] > 0.0 && g[0].hypot(g[1]) < 1.0);
    assert_eq!(h[1], h[2]);
    let res = g[0] * g[0] * h[0] + 2.0 * g[0] * g[1] * h[1] + g[1] * g[1] * h[3];
    assert!(res.abs() < 1e-10, "{res}");
    assert_eq!(region, InfpotRegion::InteriorOffDiagonal);

    for (p, want) in [
        ((0.5, 0.5), InfpotRegion::Diagonal),
        ((1.0, 0.4), InfpotRegion::Median),
        ((2.0, 0.4), InfpotRegion::Boundary),
        ((1.0, 1.0), InfpotRegion::Center),
    ] {
        unsafe { assert_eq!(infpot_region(c.0, p.0, p.1, &mut region), InfpotStatus::Ok) };
        assert_eq!(region, want, "{p:?}");
    }
}

#[test]
fn series_entry_points() {
    let c = Ctx::new();
    let mut v = 0.0;
    unsafe {
        assert_eq!(infpot_w(c.0, 0.0, 0.7, &mut v), InfpotStatus::Ok);
        assert_eq!(v, 0.0);
        assert_eq!(infpot_w(c.0, 0.6, 0.7, &mut v), InfpotStatus::Ok);
        assert!(v > 0.0);
        assert_eq!(infpot_theta2(c.0, 0.0, 0.0, &mut v), InfpotStatus::Ok);
        assert_eq!(v, 0.0);
        assert_eq!(infpot_theta2(c.0, 0.2, 0.999, &mut v), InfpotStatus::Ok);
        assert!((v - 2.4287028326341407417e-16).abs() < 1e-14);
        assert_eq!(infpot_theta2(c.0, 2.5, 0.5, &mut v), InfpotStatus::Ok);
        assert!((v + 1.175306535697163462).abs() < 1e-14);
        assert_eq!(infpot_w(c.0, 1.5, 0.7, &mut v), InfpotStatus::Domain);
        assert_eq!(infpot_theta2(c.0, 0.2, 1.0, &mut v), InfpotStatus::Domain);
    }
}

#[test]
fn error_statuses_and_messages() {
    let c = Ctx::new();
    let mut v = 0.0;
    let mut h = [0.0; 4];
    unsafe {
        assert_eq!(infpot_eval_u(c.0, 2.5, 1.0, &mut v), InfpotStatus::Domain);
        assert!(c.last_error().contains("[0, 2]"));
        assert_eq!(infpot_eval_u(c.0, f64::NAN, 1.0, &mut v), InfpotStatus::Domain);
        assert_eq!(infpot_eval_hessian(c.0, 0.5, 0.5, h.as_mut_ptr()), InfpotStatus::Undefined);
        assert!(!c.last_error().is_empty());
        assert_eq!(infpot_eval_u(c.0, 0.5, 0.5, &mut v), InfpotStatus::Ok);
        assert_eq!(c.last_error(), "");

        assert_eq!(infpot_eval_u(ptr::null_mut(), 0.5, 0.5, &mut v), InfpotStatus::NullPointer);
        assert_eq!(infpot_eval_u(c.0, 0.5, 0.5, ptr::null_mut()), InfpotStatus::NullPointer);
        assert_eq!(infpot_region(c.0, 0.5, 0.5, ptr::null_mut()), InfpotStatus::NullPointer);
        assert!(infpot_last_error(ptr::null()).is_null());
        infpot_context_free(ptr::null_mut());
    }
}

#[test]
fn tolerances_are_validated() {
    let c = Ctx::new();
    let mut v = 0.0;
    unsafe {
        assert_eq!(infpot_context_set_abs_tol(c.0, -1.0), InfpotStatus::Policy);
        assert_eq!(infpot_context_set_root_tol(c.0, f64::NAN), InfpotStatus::Policy);
        assert!(!c.last_error().is_empty());
        assert_eq!(infpot_context_set_abs_tol(c.0, 1e-12), InfpotStatus::Ok);
        assert_eq!(infpot_eval_u(c.0, 0.5, 0.5, &mut v), InfpotStatus::Ok);
        assert!((v - 0.396).abs() < 1e-3);
    }
}

#[test]
fn status_messages_are_static() {
    for s in [InfpotStatus::Ok, InfpotStatus::Domain, InfpotStatus::Undefined, InfpotStatus::Other] {
        let m = unsafe { CStr::from_ptr(infpot_status_message(s)) };
        assert!(!m.to_bytes().is_empty());
    }
}

#[test]
fn header_declares_the_abi() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/infpot.h")).unwrap();
    for name in [
        "infpot_context_new",
        "infpot_context_free",
        "infpot_context_set_abs_tol",
        "infpot_context_set_root_tol",
        "infpot_eval_u",
        "infpot_eval_grad",
        "infpot_eval_hessian",
        "infpot_region",
        "infpot_w",
        "infpot_theta2",
        "infpot_last_error",
        "infpot_status_message",
        "typedef struct InfpotContext InfpotContext",
        "INFPOT_STATUS_NULL_POINTER = 1",
    ] {
        assert!(h.contains(name), "{name}");
    }
}
