use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};

use proptest::prelude::*;

use infpot::fd::balanced_midpoint;
use infpot::roots::{self, Probe, RootOptions};
use infpot::series::{self, Form, PolarPoint, SeriesPolicy};
use infpot::{PlanePoint, Potential};

fn pol() -> SeriesPolicy {
    SeriesPolicy::default()
}

/// Away from the thin band next to the medians where the solve fails loudly.
fn solvable(x: f64, y: f64) -> bool {
    let d = |v: f64| (1.0 - v).abs();
    (d(x) > 1e-5 || d(x) < 1e-9) && (d(y) > 1e-5 || d(y) < 1e-9)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn values_between_cone_bounds(x in 0.0..=2.0f64, y in 0.0..=2.0f64) {
        prop_assume!(solvable(x, y));
        let p = PlanePoint::new(x, y).unwrap();
        let u = Potential::default().eval_u(p).unwrap();
        prop_assert!(u >= p.cone_bound() - 1e-9 && u <= p.boundary_distance() + 1e-9);
        prop_assert!((0.0..=1.0).contains(&u));
    }

    #[test]
    fn reflections_preserve_values(x in 0.0..=2.0f64, y in 0.0..=2.0f64) {
        prop_assume!(solvable(x, y));
        let f = Potential::default();
        let u = f.eval_u(PlanePoint::new(x, y).unwrap()).unwrap();
        prop_assert_eq!(f.eval_u(PlanePoint::new(y, x).unwrap()).unwrap(), u);
        let v = f.eval_u(PlanePoint::new(2.0 - x, y).unwrap()).unwrap();
        prop_assert!((v - u).abs() < 1e-14);
    }

    #[test]
    fn gradient_norm_below_one(x in 0.001..0.999f64, y in 0.001..0.999f64) {
        prop_assume!(solvable(x, y));
        let g = Potential::default().eval_grad(PlanePoint::new(x, y).unwrap()).unwrap();
        let n = g[0].hypot(g[1]);
        prop_assert!(n > 0.0 && n < 1.0);
        prop_assert!(g[0] > 0.0 && g[1] > 0.0);
    }

    #[test]
    fn infinity_harmonic_off_the_diagonal(x in 0.001..0.999f64, y in 0.001..0.999f64) {
        prop_assume!(solvable(x, y) && (x - y).abs() > 1e-4);
        let f = Potential::default();
        let p = PlanePoint::new(x, y).unwrap();
        let g = f.eval_grad(p).unwrap();
        let h = f.eval_hessian(p).unwrap();
        let res = g[0] * g[0] * h[0][0] + 2.0 * g[0] * g[1] * h[0][1] + g[1] * g[1] * h[1][1];
        let scale = 1.0 + h.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
        prop_assert!(res.abs() < 1e-12 * scale, "residual {res} scale {scale}");
    }

    #[test]
    fn polar_pde_and_signs(r in 0.0..0.99f64, t in 0.0..=FRAC_PI_2) {
        let p = PolarPoint::new(r, t).unwrap();
        let d = series::w_partials(p, &pol()).unwrap();
        prop_assert!((r * d.w_r + series::w_theta_theta(p, &pol()).unwrap()).abs() < 1e-13);
        if r > 0.05 && t > 1e-3 && t < FRAC_PI_2 - 1e-3 {
            prop_assert!(series::w(p, &pol()).unwrap() > 0.0 && d.w_r > 0.0 && d.w_rr > 0.0);
        }
        let ut = series::u_theta(p, &pol()).unwrap();
        if r > 0.05 && (t - FRAC_PI_4).abs() > 1e-3 {
            prop_assert_eq!(ut > 0.0, t < FRAC_PI_4);
        }
    }

    #[test]
    fn theta2_forms_agree(z in -4.0..4.0f64, q in 0.0..0.95f64) {
        let a = series::theta2(z, q, Form::Series, &pol()).unwrap();
        let b = series::theta2(z, q, Form::Product, &pol()).unwrap();
        let c = series::theta2(z, q, Form::Modular, &pol()).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
        prop_assert!((c - b).abs() < 1e-12 * b.abs().max(1.0));
    }

    #[test]
    fn diagonal_is_monotone(a in 0.0..SQRT_2, b in 0.0..SQRT_2) {
        prop_assume!((a - b).abs() > 1e-9);
        let f = Potential::default();
        let (lo, hi) = (a.min(b), a.max(b));
        let (c, d) = (f.diagonal_value(lo).unwrap(), f.diagonal_value(hi).unwrap());
        prop_assert!(c.g < d.g && c.u < d.u);
    }

    #[test]
    fn root_finder_brackets_cubics(root in -0.9..0.9f64, k in 0.1..5.0f64) {
        // f(x) = k (x - root)^3 + (x - root), increasing on [-1, 1]
        let f = |x: f64| {
            let d = x - root;
            Ok(Probe::new(k * d * d * d + d, 3.0 * k * d * d + 1.0))
        };
        let e = |x: f64| { let d = x - root; k * d * d * d + d };
        let opts = RootOptions { residual_tol: 1e-14, width_tol: 1e-15, max_iter: 200 };
        let r = roots::solve(f, (-1.0, e(-1.0)), (1.0, e(1.0)), Some(0.0), opts).unwrap();
        prop_assert!((r.x - root).abs() < 1e-12);
    }

    #[test]
    fn midpoint_is_monotone(
        vals in prop::collection::vec((0.0..1.0f64, 0.2..1.0f64), 2..12),
        bump in 0.0..0.5f64,
        idx in 0usize..12,
    ) {
        let base = balanced_midpoint(&vals, 0.5);
        let (lo, hi) = vals.iter().fold((1.0f64, 0.0f64), |(l, h), v| (l.min(v.0), h.max(v.0)));
        prop_assert!(base >= lo - 1e-15 && base <= hi + 1e-15);
        let mut raised = vals.clone();
        let i = idx % raised.len();
        raised[i].0 += bump;
        prop_assert!(balanced_midpoint(&raised, 0.5) >= base - 1e-14);
    }
}
