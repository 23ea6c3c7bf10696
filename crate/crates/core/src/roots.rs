//! Safeguarded Newton iteration on a sign-changing bracket.
//!
//! Newton steps are taken while they stay inside the bracket and shrink fast
//! enough; anything else falls back to bisection, so the bracket always
//! contains the root.

use crate::error::{Error, Result};

/// One evaluation of the residual. `slope` is optional; without it the step
/// is a bisection. An infinite `value` carries only its sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Probe {
    pub value: f64,
    pub slope: Option<f64>,
}

impl Probe {
    pub fn new(value: f64, slope: f64) -> Self {
        Probe { value, slope: Some(slope) }
    }

    pub fn value_only(value: f64) -> Self {
        Probe { value, slope: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootOptions {
    /// Stop once `|f(x)| <= residual_tol`.
    pub residual_tol: f64,
    /// Stop once the bracket is narrower than this.
    pub width_tol: f64,
    pub max_iter: usize,
}

/// Why the iteration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// `|f(x)| <= residual_tol`.
    Residual,
    /// The bracket collapsed below `width_tol` (or to adjacent floats) with
    /// genuine sign evaluations at both ends.
    Width,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub residual: f64,
    pub iterations: usize,
    pub termination: Termination,
}

/// Find the root of `f` in `[lo, hi]`, given the residual signs at the ends.
///
/// The end values are not evaluated by this routine: callers often know them
/// in closed form where `f` itself cannot be evaluated. A collapse of the
/// bracket next to a sign-only (infinite) probe is not accepted as a root.
pub fn solve<F>(mut f: F, lo: (f64, f64), hi: (f64, f64), start: Option<f64>, opts: RootOptions) -> Result<Root>
where
    F: FnMut(f64) -> Result<Probe>,
{
    let ((x_lo, f_lo), (x_hi, f_hi)) = (lo, hi);
    let exact = |x| Root { x, residual: 0.0, iterations: 0, termination: Termination::Residual };
    if f_lo == 0.0 {
        return Ok(exact(x_lo));
    }
    if f_hi == 0.0 {
        return Ok(exact(x_hi));
    }
    if f_lo.signum() == f_hi.signum() || f_lo.is_nan() || f_hi.is_nan() {
        return Err(Error::Bracket { lo: x_lo, hi: x_hi, f_lo, f_hi });
    }
    // neg: end with f < 0, pos: end with f > 0
    let (mut neg, mut pos) = if f_lo < 0.0 { (x_lo, x_hi) } else { (x_hi, x_lo) };
    let (mut neg_finite, mut pos_finite) = (f_lo.is_finite(), f_hi.is_finite());
    if f_lo > 0.0 {
        std::mem::swap(&mut neg_finite, &mut pos_finite);
    }

    let mut x = match start {
        Some(s) if s > x_lo.min(x_hi) && s < x_lo.max(x_hi) => s,
        _ => 0.5 * (x_lo + x_hi),
    };
    let mut step_old = (x_hi - x_lo).abs();
    let mut step = step_old;
    let mut best = Root { x, residual: f64::INFINITY, iterations: 0, termination: Termination::Width };
    let collapsed = |best: Root, neg_finite: bool, pos_finite: bool| {
        if neg_finite && pos_finite {
            Ok(best)
        } else {
            Err(Error::NoConvergence { iterations: best.iterations, residual: best.residual })
        }
    };

    for it in 1..=opts.max_iter {
        let probe = f(x)?;
        let fx = probe.value;
        if fx.is_nan() {
            return Err(Error::NoConvergence { iterations: it, residual: fx });
        }
        if fx.abs() < best.residual {
            best.x = x;
            best.residual = fx.abs();
        }
        best.iterations = it;
        if fx.abs() <= opts.residual_tol {
            return Ok(Root { x, residual: fx.abs(), iterations: it, termination: Termination::Residual });
        }
        if fx < 0.0 {
            neg = x;
            neg_finite = fx.is_finite();
        } else {
            pos = x;
            pos_finite = fx.is_finite();
        }
        if (pos - neg).abs() <= opts.width_tol {
            return collapsed(best, neg_finite, pos_finite);
        }

        let (a, b) = (neg.min(pos), neg.max(pos));
        let newton = match probe.slope {
            Some(df) if fx.is_finite() && df.is_finite() && df != 0.0 => {
                let xn = x - fx / df;
                (xn > a && xn < b && (xn - x).abs() * 2.0 <= step_old).then_some(xn)
            }
            _ => None,
        };
        step_old = step;
        let next = newton.unwrap_or(0.5 * (a + b));
        step = (next - x).abs();
        if next == x || next == a || next == b {
            return collapsed(best, neg_finite, pos_finite);
        }
        x = next;
    }
    Err(Error::NoConvergence { iterations: opts.max_iter, residual: best.residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> RootOptions {
        RootOptions { residual_tol: 1e-14, width_tol: 1e-15, max_iter: 100 }
    }

    #[test]
    fn newton_on_cubic() {
        let f = |x: f64| Ok(Probe::new(x * x * x - 2.0, 3.0 * x * x));
        let root = solve(f, (0.0, -2.0), (2.0, 6.0), Some(1.0), opts()).unwrap();
        assert!((root.x - 2f64.cbrt()).abs() < 1e-14);
        assert!(root.iterations < 10);
    }

    #[test]
    fn decreasing_function() {
        let f = |x: f64| Ok(Probe::new(1.0 - x, -1.0));
        let root = solve(f, (0.0, 1.0), (3.0, -2.0), None, opts()).unwrap();
        assert!((root.x - 1.0).abs() < 1e-14);
    }

    #[test]
    fn bisection_without_slope() {
        let f = |x: f64| Ok(Probe::value_only(x.cos() - x));
        let root = solve(f, (0.0, 1.0), (1.0, 1f64.cos() - 1.0), None, opts()).unwrap();
        assert!((root.x - 0.7390851332151607).abs() < 1e-14);
    }

    #[test]
    fn flat_start_falls_back_to_bisection() {
        // Newton from x = 0.01 with slope ~0 would jump far outside
        let f = |x: f64| Ok(Probe::new(x.powi(5) - 0.5, 5.0 * x.powi(4)));
        let root = solve(f, (0.0, -0.5), (1.0, 0.5), Some(0.01), opts()).unwrap();
        assert!((root.x - 0.5f64.powf(0.2)).abs() < 1e-14);
    }

    #[test]
    fn same_sign_is_a_bracket_error() {
        let f = |x: f64| Ok(Probe::new(x * x + 1.0, 2.0 * x));
        assert!(matches!(solve(f, (-1.0, 2.0), (1.0, 2.0), None, opts()), Err(Error::Bracket { .. })));
    }

    #[test]
    fn iteration_cap() {
        let f = |x: f64| Ok(Probe::value_only(x - 0.3));
        let tight = RootOptions { residual_tol: 0.0, width_tol: 0.0, max_iter: 5 };
        assert!(matches!(solve(f, (0.0, -0.3), (1.0, 0.7), None, tight), Err(Error::NoConvergence { .. })));
    }

    #[test]
    fn infinite_probe_only_moves_bracket() {
        let f = |x: f64| Ok(if x > 0.9 { Probe::value_only(f64::INFINITY) } else { Probe::new(x - 0.25, 1.0) });
        let root = solve(f, (0.0, -0.25), (1.0, 1.0), Some(0.95), opts()).unwrap();
        assert!((root.x - 0.25).abs() < 1e-14);
    }

    #[test]
    fn collapse_next_to_sign_only_probe_is_rejected() {
        // jump at 0.5 with the right side only known by sign
        let f = |x: f64| Ok(if x > 0.5 { Probe::value_only(f64::INFINITY) } else { Probe::value_only(-1.0) });
        assert!(matches!(solve(f, (0.0, -1.0), (1.0, 1.0), None, opts()), Err(Error::NoConvergence { .. })));
    }

    #[test]
    fn collapse_on_a_jump_with_finite_ends_is_width_terminated() {
        let f = |x: f64| Ok(Probe::value_only(if x > 0.5 { 1.0 } else { -1.0 }));
        let root = solve(f, (0.0, -1.0), (1.0, 1.0), None, opts()).unwrap();
        assert_eq!(root.termination, Termination::Width);
        assert!((root.x - 0.5).abs() < 1e-14);
    }
}
