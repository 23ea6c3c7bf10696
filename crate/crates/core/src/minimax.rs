//! The nested saddle-point solve
//!
//! ```text
//! u(x, y) = min_θ max_r  r (x cos θ + y sin θ) - W(r, θ)
//! ```
//!
//! on the open quadrant `0 < x, y < 1`. The inner maximiser `r_x(θ)` solves
//! `W_r(r, θ) = x cos θ + y sin θ`; the outer minimiser is the zero of
//! `h'(θ) = r_x (y cos θ - x sin θ) - W_θ(r_x, θ)`. At the saddle,
//! `(r cos θ, r sin θ)` is the gradient of `u`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots::{self, Probe, RootOptions};
use crate::series::{self, PolarPoint, SeriesPolicy};

/// Distance from `x = 1` or `y = 1` below which the cone lower bound is used.
pub const MEDIAN_CLAMP: f64 = 1e-9;

/// Angular clamp for the outer bracket; `r_x(θ)` is only defined inside it.
pub const ANGLE_CLAMP: f64 = 1e-9;

/// Term cap used by [`grid_minimax`].
pub const ORACLE_TERMS: usize = 4_000_000;

/// A point of the closed square `[0, 2]²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanePoint {
    pub x: f64,
    pub y: f64,
}

impl PlanePoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(x.is_finite() && y.is_finite()) || !(0.0..=2.0).contains(&x) || !(0.0..=2.0).contains(&y) {
            return Err(Error::domain(format!("point ({x}, {y}) outside the square [0, 2] x [0, 2]")));
        }
        Ok(PlanePoint { x, y })
    }

    /// True on the open quadrant `(0, 1)²`.
    pub fn in_open_quadrant(&self) -> bool {
        self.x > 0.0 && self.x < 1.0 && self.y > 0.0 && self.y < 1.0
    }

    /// The cone lower bound `1 - |(x, y) - (1, 1)|`.
    pub fn cone_bound(&self) -> f64 {
        1.0 - (1.0 - self.x).hypot(1.0 - self.y)
    }

    /// Distance to the boundary of the square.
    pub fn boundary_distance(&self) -> f64 {
        self.x.min(2.0 - self.x).min(self.y).min(2.0 - self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverPolicy {
    pub root_tol: f64,
    pub max_iter: usize,
    pub bracket_shrink: f64,
}

impl Default for SolverPolicy {
    fn default() -> Self {
        SolverPolicy { root_tol: 1e-13, max_iter: 200, bracket_shrink: 1e-15 }
    }
}

impl SolverPolicy {
    pub fn validate(&self) -> Result<()> {
        if !(self.root_tol > 0.0 && self.root_tol.is_finite()) {
            return Err(Error::Policy(format!("root_tol must be positive, got {}", self.root_tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::Policy("max_iter must be at least 1".into()));
        }
        if !(self.bracket_shrink > 0.0 && self.bracket_shrink.is_finite()) {
            return Err(Error::Policy(format!(
                "bracket_shrink must be positive, got {}",
                self.bracket_shrink
            )));
        }
        Ok(())
    }

    fn options(&self) -> RootOptions {
        RootOptions { residual_tol: self.root_tol, width_tol: self.bracket_shrink, max_iter: self.max_iter }
    }
}

/// Absolute first-order residuals at the returned saddle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    /// `|W_r(r*, θ*) - (x cos θ* + y sin θ*)|`
    pub radial: f64,
    /// `|h'(θ*)|`
    pub angular: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinimaxResult {
    pub r_star: f64,
    pub theta_star: f64,
    pub u: f64,
    pub inner_iters: usize,
    pub outer_iters: usize,
    pub residuals: Residuals,
    /// Set when the point was within [`MEDIAN_CLAMP`] of a median and the
    /// cone bound was returned instead of a solve.
    pub closed_form: bool,
}

impl MinimaxResult {
    /// `(r* cos θ*, r* sin θ*)`, the gradient of `u`.
    pub fn gradient(&self) -> [f64; 2] {
        let (s, c) = self.theta_star.sin_cos();
        [self.r_star * c, self.r_star * s]
    }
}

/// Result of the radial solve at one angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerSolve {
    pub r: f64,
    pub iterations: usize,
    pub residual: f64,
}

fn require_open_quadrant(p: PlanePoint) -> Result<()> {
    if p.in_open_quadrant() {
        Ok(())
    } else {
        Err(Error::domain(format!("minimax solve needs 0 < x, y < 1, got ({}, {})", p.x, p.y)))
    }
}

/// Cubic initial guess from the leading term `W_r ≈ (16 / 3π) r³ sin 2θ`.
fn radial_guess(target: f64, theta: f64) -> f64 {
    let s2 = (2.0 * theta).sin();
    (3.0 * PI * target / (16.0 * s2)).cbrt().min(0.999)
}

/// `r_x(θ)`: the root of `W_r(·, θ) = x cos θ + y sin θ` in `(0, 1)`.
pub fn inner_max_radius(
    p: PlanePoint,
    theta: f64,
    series: &SeriesPolicy,
    solver: &SolverPolicy,
) -> Result<InnerSolve> {
    require_open_quadrant(p)?;
    if !(theta > 0.0 && theta < FRAC_PI_2) {
        return Err(Error::domain(format!("inner solve needs 0 < theta < pi/2, got {theta}")));
    }
    let (s, c) = theta.sin_cos();
    let target = p.x * c + p.y * s;
    // W_r(0, θ) = 0 and W_r(1, θ) = cos θ + sin θ
    let lo = (0.0, -target);
    let hi = (1.0, (1.0 - p.x) * c + (1.0 - p.y) * s);
    let f = |r: f64| {
        let (w_r, w_rr) = series::w_r_and_rr(PolarPoint::new(r, theta)?, series)?;
        Ok(Probe::new(w_r - target, w_rr))
    };
    let root = roots::solve(f, lo, hi, Some(radial_guess(target, theta)), solver.options())?;
    Ok(InnerSolve { r: root.x, iterations: root.iterations, residual: root.residual })
}

/// `h'(θ)` and `h''(θ)` at a solved inner radius.
fn angular_residual(p: PlanePoint, theta: f64, r: f64, series: &SeriesPolicy) -> Result<(f64, f64)> {
    let (s, c) = theta.sin_cos();
    let pp = series::w_partials(PolarPoint::new(r, theta)?, series)?;
    let tangential = p.y * c - p.x * s;
    let h1 = r * tangential - pp.w_theta;
    // h'' = (r_x')² W_rr with r_x' W_rr = y cos θ - x sin θ - W_rθ
    let mixed = tangential - pp.w_rtheta;
    let h2 = if pp.w_rr > 0.0 { mixed * mixed / pp.w_rr } else { f64::INFINITY };
    Ok((h1, h2))
}

/// Gradient angle of the small-gradient approximation, used as the first
/// outer iterate.
fn angle_guess(p: PlanePoint) -> f64 {
    let a = (p.x + p.y).cbrt();
    let b = (p.y - p.x).cbrt();
    (a - b).atan2(a + b)
}

/// Result of the angular solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OuterSolve {
    pub theta: f64,
    pub iterations: usize,
    pub inner_iters: usize,
    pub residual: f64,
}

/// `θ*`: the zero of the strictly increasing `h'` on `(0, π/2)`.
pub fn outer_min_angle(p: PlanePoint, series: &SeriesPolicy, solver: &SolverPolicy) -> Result<OuterSolve> {
    require_open_quadrant(p)?;
    if p.x == p.y {
        return Ok(OuterSolve { theta: FRAC_PI_4, iterations: 0, inner_iters: 0, residual: 0.0 });
    }
    let mut inner_iters = 0;
    let f = |theta: f64| -> Result<Probe> {
        let inner = match inner_max_radius(p, theta, series, solver) {
            Ok(inner) => inner,
            // r_x(θ) is too close to 1 to resolve; this only happens near the
            // ends of the bracket, where the sign of h' is that of θ - π/4
            Err(Error::Truncation { .. } | Error::CornerSingularity { .. }) => {
                let side = if theta < FRAC_PI_4 { -1.0 } else { 1.0 };
                return Ok(Probe::value_only(side * f64::INFINITY));
            }
            Err(e) => return Err(e),
        };
        inner_iters += inner.iterations;
        let (h1, h2) = angular_residual(p, theta, inner.r, series)?;
        Ok(Probe::new(h1, h2))
    };
    let lo = (ANGLE_CLAMP, p.y - 1.0);
    let hi = (FRAC_PI_2 - ANGLE_CLAMP, 1.0 - p.x);
    let root = roots::solve(f, lo, hi, Some(angle_guess(p)), solver.options())?;
    Ok(OuterSolve { theta: root.x, iterations: root.iterations, inner_iters, residual: root.residual })
}

/// The full nested solve at a point of the open quadrant.
pub fn solve_minimax(p: PlanePoint, series: &SeriesPolicy, solver: &SolverPolicy) -> Result<MinimaxResult> {
    series.validate()?;
    solver.validate()?;
    require_open_quadrant(p)?;

    let (dx, dy) = (1.0 - p.x, 1.0 - p.y);
    if dx.min(dy) < MEDIAN_CLAMP {
        // both bounds pinch to the median value here
        return Ok(MinimaxResult {
            r_star: 1.0,
            theta_star: dy.atan2(dx),
            u: p.cone_bound(),
            inner_iters: 0,
            outer_iters: 0,
            residuals: Residuals { radial: 0.0, angular: 0.0 },
            closed_form: true,
        });
    }

    let outer = outer_min_angle(p, series, solver)?;
    let theta = outer.theta;
    let inner = inner_max_radius(p, theta, series, solver)?;
    let (s, c) = theta.sin_cos();
    let target = p.x * c + p.y * s;
    let at = PolarPoint::new(inner.r, theta)?;
    let w = series::w(at, series)?;
    let (h1, _) = angular_residual(p, theta, inner.r, series)?;
    let residuals = Residuals { radial: inner.residual, angular: h1.abs() };
    Ok(MinimaxResult {
        r_star: inner.r,
        theta_star: theta,
        u: inner.r * target - w,
        inner_iters: outer.inner_iters + inner.iterations,
        outer_iters: outer.iterations,
        residuals,
        closed_form: false,
    })
}

/// Dense-grid minimax used as an independent check of [`solve_minimax`].
///
/// For each of `n_theta` angles the concave `r ↦ f(r, θ)` is maximised on an
/// `n_r` grid and refined by golden section; the resulting `h(θ)` is then
/// minimised the same way. Only values of `W` are used. The refinement
/// probes radii arbitrarily close to 1, so the term cap is raised to
/// [`ORACLE_TERMS`] to reach `boundary_snap`.
pub fn grid_minimax(p: PlanePoint, n_r: usize, n_theta: usize, series: &SeriesPolicy) -> Result<f64> {
    require_open_quadrant(p)?;
    if n_r < 3 || n_theta < 3 {
        return Err(Error::domain("grid minimax needs at least 3 nodes per axis"));
    }
    let series = &SeriesPolicy { max_terms: series.max_terms.max(ORACLE_TERMS), ..*series };
    let objective = |r: f64, theta: f64| -> Result<f64> {
        let (s, c) = theta.sin_cos();
        Ok(r * (p.x * c + p.y * s) - series::w(PolarPoint::new(r, theta)?, series)?)
    };
    let h = |theta: f64| -> Result<f64> {
        let mut best = (0usize, f64::NEG_INFINITY);
        for i in 0..n_r {
            let v = objective(i as f64 / (n_r - 1) as f64, theta)?;
            if v > best.1 {
                best = (i, v);
            }
        }
        let step = 1.0 / (n_r - 1) as f64;
        let a = (best.0 as f64 - 1.0).max(0.0) * step;
        let b = (best.0 as f64 + 1.0).min((n_r - 1) as f64) * step;
        let (_, v) = golden(|r| objective(r, theta).map(|v| -v), a, b)?;
        Ok((-v).max(best.1))
    };
    let mut best = (0usize, f64::INFINITY);
    for j in 0..n_theta {
        let v = h(j as f64 / (n_theta - 1) as f64 * FRAC_PI_2)?;
        if v < best.1 {
            best = (j, v);
        }
    }
    let step = FRAC_PI_2 / (n_theta - 1) as f64;
    let a = (best.0 as f64 - 1.0).max(0.0) * step;
    let b = (best.0 as f64 + 1.0).min((n_theta - 1) as f64) * step;
    let (_, v) = golden(h, a, b)?;
    Ok(v.min(best.1))
}

/// Golden-section minimisation of a unimodal function on `[a, b]`.
pub(crate) fn golden<F>(mut f: F, mut a: f64, mut b: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while (b - a).abs() > 1e-14 * (1.0 + a.abs().max(b.abs())) {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x)?;
    Ok((x, fx.min(fc).min(fd)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solve(x: f64, y: f64) -> MinimaxResult {
        solve_minimax(PlanePoint::new(x, y).unwrap(), &SeriesPolicy::default(), &SolverPolicy::default()).unwrap()
    }

    #[test]
    fn plane_point_validation() {
        assert!(PlanePoint::new(2.0, 0.0).is_ok());
        assert!(PlanePoint::new(-1e-16, 0.5).is_err());
        assert!(PlanePoint::new(0.5, f64::NAN).is_err());
        assert!(!PlanePoint::new(1.0, 0.5).unwrap().in_open_quadrant());
    }

    #[test]
    fn inner_radius_on_diagonal() {
        let p = PlanePoint::new(0.5, 0.5).unwrap();
        let r = inner_max_radius(p, FRAC_PI_4, &SeriesPolicy::default(), &SolverPolicy::default()).unwrap();
        assert!((r.r - 0.747).abs() < 1e-3, "{}", r.r);
        let wr = series::w_partials(PolarPoint::new(r.r, FRAC_PI_4).unwrap(), &SeriesPolicy::default()).unwrap();
        assert!((wr.w_r - 0.5 * 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn inner_radius_tends_to_one_at_small_angles() {
        let p = PlanePoint::new(0.3, 0.6).unwrap();
        let pol = (SeriesPolicy::default(), SolverPolicy::default());
        let r1 = inner_max_radius(p, 1e-2, &pol.0, &pol.1).unwrap().r;
        let r2 = inner_max_radius(p, 1e-3, &pol.0, &pol.1).unwrap().r;
        assert!(r2 > r1 && r2 > 0.99, "{r1} {r2}");
    }

    #[test]
    fn diagonal_angle_is_exact() {
        let res = solve(0.5, 0.5);
        assert_eq!(res.theta_star, FRAC_PI_4);
        assert!((res.u - 0.3960).abs() < 1e-3, "{}", res.u);
        let g = res.gradient();
        assert!((g[0] - 0.528).abs() < 1e-3 && (g[1] - 0.528).abs() < 1e-3);
    }

    #[test]
    fn swapped_points_mirror() {
        let a = solve(0.25, 0.75);
        let b = solve(0.75, 0.25);
        assert!((a.theta_star + b.theta_star - FRAC_PI_2).abs() < 1e-12);
        assert!((a.u - b.u).abs() < 1e-14);
        assert!(a.theta_star < FRAC_PI_4);
    }

    #[test]
    fn first_order_conditions() {
        for &(x, y) in &[(0.1, 0.2), (0.3, 0.6), (0.9, 0.2), (0.95, 0.97), (0.02, 0.9)] {
            let res = solve(x, y);
            assert!(res.residuals.radial < 1e-12 && res.residuals.angular < 1e-12, "{x} {y} {res:?}");
            let p = PlanePoint::new(x, y).unwrap();
            assert!(res.u >= p.cone_bound() - 1e-12 && res.u <= x.min(y) + 1e-12);
        }
    }

    #[test]
    fn median_clamp_returns_cone_bound() {
        let res = solve(1.0 - 1e-10, 0.4);
        assert!(res.closed_form);
        assert!((res.u - 0.4).abs() < 1e-12);
    }

    #[test]
    fn grid_oracle_agrees() {
        let p = PlanePoint::new(0.3, 0.6).unwrap();
        let brute = grid_minimax(p, 201, 201, &SeriesPolicy::default()).unwrap();
        assert!((brute - solve(0.3, 0.6).u).abs() < 1e-9);
    }

    #[test]
    fn golden_finds_parabola_minimum() {
        let (x, v) = golden(|t| Ok((t - 0.3) * (t - 0.3) + 1.0), 0.0, 1.0).unwrap();
        assert!((x - 0.3).abs() < 1e-7 && (v - 1.0).abs() < 1e-14);
    }
}
