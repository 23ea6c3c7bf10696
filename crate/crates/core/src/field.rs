//! The potential on the full square `[0, 2]²`.
//!
//! Points are folded into the quadrant `[0, 1]²` by `x ↦ min(x, 2 - x)` and
//! `y ↦ min(y, 2 - y)`. Boundary, medians, centre and diagonal are served by
//! closed forms; everything else goes through the minimax solve. Gradient
//! components change sign with each reflection.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::minimax::{self, MinimaxResult, PlanePoint, SolverPolicy};
use crate::roots::{self, Probe};
use crate::series::{self, PolarPoint, SeriesPolicy};

/// A point is on a diagonal, median or the boundary when this close to it.
pub const ON_LINE: f64 = 1e-12;

/// The Hessian is refused within this distance of a diagonal or median.
pub const HESSIAN_BAND: f64 = 1e-6;

pub type Matrix2 = [[f64; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Region {
    InteriorOffDiagonal,
    Diagonal,
    Median,
    Boundary,
    Center,
}

impl Region {
    pub fn as_str(self) -> &'static str {
        match self {
            Region::InteriorOffDiagonal => "interior-off-diagonal",
            Region::Diagonal => "diagonal",
            Region::Median => "median",
            Region::Boundary => "boundary",
            Region::Center => "center",
        }
    }
}

impl std::fmt::Display for Region {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A point folded into the half quadrant `x ≤ y`, with the reflections that
/// took it there. Evaluating only there makes `u(x, y) = u(y, x)` exact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Folded {
    pub x: f64,
    pub y: f64,
    pub flip_x: bool,
    pub flip_y: bool,
    /// Applied after the flips.
    pub swap: bool,
}

impl Folded {
    pub fn new(p: PlanePoint) -> Self {
        let x = p.x.min(2.0 - p.x);
        let y = p.y.min(2.0 - p.y);
        Folded { x: x.min(y), y: x.max(y), flip_x: p.x > 1.0, flip_y: p.y > 1.0, swap: x > y }
    }

    pub fn region(&self) -> Region {
        let (dx, dy) = (1.0 - self.x, 1.0 - self.y);
        if dx <= ON_LINE && dy <= ON_LINE {
            Region::Center
        } else if self.x <= ON_LINE || self.y <= ON_LINE {
            Region::Boundary
        } else if dx <= ON_LINE || dy <= ON_LINE {
            Region::Median
        } else if (self.x - self.y).abs() * FRAC_1_SQRT_2 <= ON_LINE {
            Region::Diagonal
        } else {
            Region::InteriorOffDiagonal
        }
    }

    /// Distance to the nearer of the diagonal and the two medians.
    fn singular_distance(&self) -> f64 {
        ((self.x - self.y).abs() * FRAC_1_SQRT_2).min(1.0 - self.x).min(1.0 - self.y)
    }

    fn unfold_gradient(&self, g: [f64; 2]) -> [f64; 2] {
        let g = if self.swap { [g[1], g[0]] } else { g };
        let sx = if self.flip_x { -1.0 } else { 1.0 };
        let sy = if self.flip_y { -1.0 } else { 1.0 };
        // + 0.0 turns -0.0 into 0.0
        [sx * g[0] + 0.0, sy * g[1] + 0.0]
    }

    fn unfold_hessian(&self, h: Matrix2) -> Matrix2 {
        let h = if self.swap { [[h[1][1], h[1][0]], [h[0][1], h[0][0]]] } else { h };
        let off = if self.flip_x != self.flip_y { -1.0 } else { 1.0 };
        [[h[0][0], off * h[0][1]], [off * h[1][0], h[1][1]]]
    }
}

/// `u` and `|∇u|` at the diagonal point `s 𝟙`, `𝟙 = (1, 1)/√2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagonalValue {
    pub s: f64,
    pub u: f64,
    pub g: f64,
}

/// One evaluated point of the field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub point: PlanePoint,
    pub u: f64,
    /// Absent at the centre and at the four corners of the square.
    pub grad: Option<[f64; 2]>,
    /// Present only for interior off-diagonal points outside [`HESSIAN_BAND`].
    pub hessian: Option<Matrix2>,
    pub region: Region,
}

/// `ℋw` at the gradient point `(r, θ)` from `W_rr` and `U_θ`.
pub fn hessian_w(r: f64, theta: f64, w_rr: f64, u_theta: f64) -> Matrix2 {
    let (s, c) = theta.sin_cos();
    let r2 = r * r;
    let a = r2 * w_rr;
    let b = u_theta;
    let xy = (s * c * a + (c * c - s * s) * b) / r2;
    [
        [(c * c * a - 2.0 * s * c * b) / r2, xy],
        [xy, (s * s * a + 2.0 * s * c * b) / r2],
    ]
}

/// Inverse of a symmetric 2×2 matrix.
pub fn invert_symmetric(m: Matrix2) -> Option<Matrix2> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    let off = -m[0][1] / det;
    Some([[m[1][1] / det, off], [off, m[0][0] / det]])
}

pub fn determinant(m: Matrix2) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// The evaluator: series and solver policies plus the dispatch logic.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Potential {
    pub series: SeriesPolicy,
    pub solver: SolverPolicy,
}

impl Potential {
    pub fn new(series: SeriesPolicy, solver: SolverPolicy) -> Result<Self> {
        series.validate()?;
        solver.validate()?;
        Ok(Potential { series, solver })
    }

    /// Minimax solve at a point of the open quadrant.
    pub fn solve(&self, x: f64, y: f64) -> Result<MinimaxResult> {
        minimax::solve_minimax(PlanePoint::new(x, y)?, &self.series, &self.solver)
    }

    pub fn eval_u(&self, p: PlanePoint) -> Result<f64> {
        let f = Folded::new(p);
        match f.region() {
            Region::Center => Ok(1.0),
            Region::Boundary => Ok(0.0),
            Region::Median => Ok(if 1.0 - f.x <= ON_LINE { f.y } else { f.x }),
            Region::Diagonal => Ok(self.diagonal_value(SQRT_2 * 0.5 * (f.x + f.y))?.u),
            Region::InteriorOffDiagonal => Ok(self.solve(f.x, f.y)?.u),
        }
    }

    pub fn eval_grad(&self, p: PlanePoint) -> Result<[f64; 2]> {
        let f = Folded::new(p);
        let g = match f.region() {
            Region::Center => return Err(Error::UndefinedGradient { x: p.x, y: p.y }),
            Region::Boundary => self.boundary_gradient(&f).ok_or(Error::UndefinedGradient { x: p.x, y: p.y })??,
            Region::Median => {
                if 1.0 - f.x <= ON_LINE {
                    [0.0, 1.0]
                } else {
                    [1.0, 0.0]
                }
            }
            Region::Diagonal => {
                let g = self.diagonal_value(SQRT_2 * 0.5 * (f.x + f.y))?.g;
                [g * FRAC_1_SQRT_2, g * FRAC_1_SQRT_2]
            }
            Region::InteriorOffDiagonal => self.solve(f.x, f.y)?.gradient(),
        };
        Ok(f.unfold_gradient(g))
    }

    /// On the edge `x = 0` of the quadrant the gradient is `(p, 0)` with
    /// `W_θ(p, 0) = p y`; the edge `y = 0` follows by symmetry. `None` at the
    /// corners of the square.
    fn boundary_gradient(&self, f: &Folded) -> Option<Result<[f64; 2]>> {
        let on_x = f.x <= ON_LINE;
        let on_y = f.y <= ON_LINE;
        if on_x && on_y {
            return None;
        }
        let along = if on_x { f.y } else { f.x };
        Some(self.boundary_slope(along).map(|p| if on_x { [p, 0.0] } else { [0.0, p] }))
    }

    /// Normal derivative `p` on an edge of the quadrant at tangential
    /// position `t ∈ (0, 1]`: the root of `W_θ(p, 0) / p = t`.
    pub fn boundary_slope(&self, t: f64) -> Result<f64> {
        if !(t > 0.0 && t <= 1.0) {
            return Err(Error::domain(format!("edge position {t} outside (0, 1]")));
        }
        if 1.0 - t <= ON_LINE {
            return Ok(1.0);
        }
        let series = &self.series;
        let f = |p: f64| {
            let at = PolarPoint::new(p, 0.0)?;
            let ratio = series::w_theta(at, series)? / p;
            // d/dp (W_θ / p) = U_θ / p²
            Ok(Probe::new(ratio - t, series::u_theta(at, series)? / (p * p)))
        };
        // W_θ(p, 0) / p -> 0 as p -> 0 and equals 1 at p = 1
        let guess = (3.0 * std::f64::consts::PI * t / 8.0).cbrt().min(0.999);
        let root = roots::solve(f, (0.0, -t), (1.0, 1.0 - t), Some(guess), self.solver_options())?;
        Ok(root.x)
    }

    fn solver_options(&self) -> roots::RootOptions {
        roots::RootOptions {
            residual_tol: self.solver.root_tol,
            width_tol: self.solver.bracket_shrink,
            max_iter: self.solver.max_iter,
        }
    }

    /// `ℋu = (ℋw)⁻¹` at an interior off-diagonal point.
    pub fn eval_hessian(&self, p: PlanePoint) -> Result<Matrix2> {
        let f = Folded::new(p);
        let refuse = |reason: &str| Error::SingularHessian { x: p.x, y: p.y, reason: reason.to_string() };
        match f.region() {
            Region::InteriorOffDiagonal => {}
            Region::Diagonal => return Err(refuse("theta2 vanishes on the diagonal")),
            Region::Median => return Err(refuse("second derivatives are not established on the medians")),
            Region::Boundary => return Err(refuse("boundary point")),
            Region::Center => return Err(refuse("centre puncture")),
        }
        if f.singular_distance() < HESSIAN_BAND {
            return Err(refuse("within the conditioning band of a diagonal or median"));
        }
        let sol = self.solve(f.x, f.y)?;
        let h = self.hessian_at(&sol).ok_or_else(|| refuse("Hessian of w is singular"))?;
        Ok(f.unfold_hessian(h))
    }

    fn hessian_at(&self, sol: &MinimaxResult) -> Option<Matrix2> {
        let jet = series::jet(PolarPoint::new(sol.r_star, sol.theta_star).ok()?, &self.series).ok()?;
        invert_symmetric(hessian_w(sol.r_star, sol.theta_star, jet.w_rr, jet.u_theta))
    }

    /// `u(s 𝟙) = s g(s) - W(g(s), π/4)` where `W_r(g(s), π/4) = s`.
    pub fn diagonal_value(&self, s: f64) -> Result<DiagonalValue> {
        if !(0.0..=SQRT_2).contains(&s) {
            return Err(Error::domain(format!("diagonal parameter {s} outside [0, sqrt 2]")));
        }
        if s == 0.0 {
            return Ok(DiagonalValue { s, u: 0.0, g: 0.0 });
        }
        if SQRT_2 - s <= ON_LINE {
            return Ok(DiagonalValue { s, u: 1.0, g: 1.0 });
        }
        let series = &self.series;
        let f = |r: f64| {
            let (w_r, w_rr) = series::w_r_and_rr(PolarPoint::new(r, FRAC_PI_4)?, series)?;
            Ok(Probe::new(w_r - s, w_rr))
        };
        let guess = (3.0 * std::f64::consts::PI * s / 16.0).cbrt().min(0.999);
        let root = roots::solve(f, (0.0, -s), (1.0, SQRT_2 - s), Some(guess), self.solver_options())?;
        let g = root.x;
        let u = s * g - series::w(PolarPoint::new(g, FRAC_PI_4)?, series)?;
        Ok(DiagonalValue { s, u, g })
    }

    /// `c''(0)` for `c(τ) = u(x₀ + (offset + τ) 𝟙⊥)`, `x₀ = s 𝟙`, from the
    /// saddle at the offset point.
    pub fn diagonal_transverse_second_derivative(&self, s: f64, offset: f64) -> Result<f64> {
        if offset == 0.0 || !offset.is_finite() {
            return Err(Error::domain("transverse offset must be finite and nonzero"));
        }
        let base = s * FRAC_1_SQRT_2;
        let t = offset * FRAC_1_SQRT_2;
        let p = PlanePoint::new(base - t, base + t)?;
        if !p.in_open_quadrant() {
            return Err(Error::domain(format!("offset point ({}, {}) leaves the quadrant", p.x, p.y)));
        }
        let sol = minimax::solve_minimax(p, &self.series, &self.solver)?;
        let (r, theta) = (sol.r_star, sol.theta_star);
        let jet = series::jet(PolarPoint::new(r, theta)?, &self.series)?;
        let a = jet.u_theta / r;
        if a == 0.0 {
            return Err(Error::SingularHessian { x: p.x, y: p.y, reason: "U_theta vanishes".into() });
        }
        let (sn, cs) = theta.sin_cos();
        let num = -2.0 * r * (sn * sn - cs * cs) * a + r * r * (cs + sn) * (cs + sn) * jet.w_rr;
        Ok(-num / (2.0 * a * a))
    }

    /// Value, gradient and (where defined) Hessian at one point.
    pub fn sample(&self, p: PlanePoint) -> Result<FieldSample> {
        let f = Folded::new(p);
        let region = f.region();
        if region == Region::InteriorOffDiagonal {
            let sol = self.solve(f.x, f.y)?;
            let hessian = if f.singular_distance() < HESSIAN_BAND {
                None
            } else {
                self.hessian_at(&sol).map(|h| f.unfold_hessian(h))
            };
            return Ok(FieldSample {
                point: p,
                u: sol.u,
                grad: Some(f.unfold_gradient(sol.gradient())),
                hessian,
                region,
            });
        }
        let u = self.eval_u(p)?;
        let grad = match self.eval_grad(p) {
            Ok(g) => Some(g),
            Err(Error::UndefinedGradient { .. }) => None,
            Err(e) => return Err(e),
        };
        Ok(FieldSample { point: p, u, grad, hessian: None, region })
    }
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;

    fn pt(x: f64, y: f64) -> PlanePoint {
        PlanePoint::new(x, y).unwrap()
    }

    fn field() -> Potential {
        Potential::default()
    }

    #[test]
    fn regions() {
        assert_eq!(Folded::new(pt(1.0, 1.0)).region(), Region::Center);
        assert_eq!(Folded::new(pt(0.0, 0.4)).region(), Region::Boundary);
        assert_eq!(Folded::new(pt(2.0, 2.0)).region(), Region::Boundary);
        assert_eq!(Folded::new(pt(1.0, 0.0)).region(), Region::Boundary);
        assert_eq!(Folded::new(pt(1.0, 0.3)).region(), Region::Median);
        assert_eq!(Folded::new(pt(1.5, 0.5)).region(), Region::Diagonal);
        assert_eq!(Folded::new(pt(1.5, 1.5)).region(), Region::Diagonal);
        assert_eq!(Folded::new(pt(0.2, 0.7)).region(), Region::InteriorOffDiagonal);
    }

    #[test]
    fn closed_form_values() {
        let f = field();
        assert_eq!(f.eval_u(pt(1.0, 1.0)).unwrap(), 1.0);
        assert_eq!(f.eval_u(pt(1.0, 0.3)).unwrap(), 0.3);
        assert_eq!(f.eval_u(pt(1.7, 1.0)).unwrap(), 2.0 - 1.7);
        assert_eq!(f.eval_u(pt(0.0, 1.3)).unwrap(), 0.0);
        assert!(PlanePoint::new(2.1, 1.0).is_err());
    }

    #[test]
    fn diagonal_reference() {
        let d = field().diagonal_value(SQRT_2 * 0.5).unwrap();
        assert!((d.g - 0.7468189216460835).abs() < 1e-13, "{}", d.g);
        assert!((d.u - 0.3960578970299840).abs() < 1e-13, "{}", d.u);
        let e = field().diagonal_value(SQRT_2).unwrap();
        assert_eq!((e.u, e.g), (1.0, 1.0));
    }

    #[test]
    fn reflection_of_values_and_gradients() {
        let f = field();
        let a = f.eval_u(pt(0.5, 0.5)).unwrap();
        assert_eq!(f.eval_u(pt(1.5, 0.5)).unwrap(), a);
        let g = f.eval_grad(pt(0.25, 0.625)).unwrap();
        let h = f.eval_grad(pt(1.75, 1.375)).unwrap();
        assert_eq!(h, [-g[0], -g[1]]);
        let s = f.eval_grad(pt(0.625, 0.25)).unwrap();
        assert_eq!(s, [g[1], g[0]]);
        let a = f.eval_hessian(pt(0.25, 0.625)).unwrap();
        let b = f.eval_hessian(pt(1.375, 0.25)).unwrap();
        assert_eq!(b, [[a[1][1], -a[0][1]], [-a[1][0], a[0][0]]]);
    }

    #[test]
    fn off_diagonal_reference() {
        let f = field();
        let u = f.eval_u(pt(0.25, 0.75)).unwrap();
        assert!((u - 0.2376794971852805).abs() < 1e-14);
        let g = f.eval_grad(pt(0.3, 0.6)).unwrap();
        assert!((g[0] - 0.8635221202487680).abs() < 1e-13 && (g[1] - 0.1543651693117883).abs() < 1e-13);
    }

    #[test]
    fn hessian_reference() {
        let f = field();
        let h = f.eval_hessian(pt(0.25, 0.75)).unwrap();
        let want = [-0.0774476460370849, 0.4090807837527038, -0.2802581920962390];
        for (got, want) in [h[0][0], h[0][1], h[1][1]].iter().zip(want) {
            assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        }
        let h = f.eval_hessian(pt(0.3, 0.6)).unwrap();
        assert!((determinant(h) + 0.2913659667125541).abs() < 1e-10);
    }

    #[test]
    fn hessian_refused_on_singular_sets() {
        let f = field();
        for p in [pt(0.4, 0.4), pt(1.0, 0.5), pt(0.4, 0.4 + 1e-7), pt(1.0, 1.0)] {
            assert!(matches!(f.eval_hessian(p), Err(Error::SingularHessian { .. })), "{p:?}");
        }
    }

    #[test]
    fn transverse_second_derivative_matches_hessian() {
        let f = field();
        let s = SQRT_2 * 0.5;
        let c1 = f.diagonal_transverse_second_derivative(s, 0.2).unwrap();
        let c2 = f.diagonal_transverse_second_derivative(s, -0.2).unwrap();
        assert!((c1 - c2).abs() < 1e-9 * c1.abs());
        let t = 0.2 * FRAC_1_SQRT_2;
        let h = f.eval_hessian(pt(0.5 - t, 0.5 + t)).unwrap();
        let proj = 0.5 * (h[0][0] + h[1][1]) - h[0][1];
        assert!((c1 - proj).abs() < 1e-8 * proj.abs(), "{c1} {proj}");
    }

    #[test]
    fn boundary_gradient_is_normal_limit() {
        let f = field();
        let g = f.eval_grad(pt(0.0, 0.5)).unwrap();
        let inner = f.eval_grad(pt(1e-7, 0.5)).unwrap();
        assert_eq!(g[1], 0.0);
        assert!((g[0] - inner[0]).abs() < 1e-6 && inner[1].abs() < 1e-6, "{g:?} {inner:?}");
        assert!(f.eval_grad(pt(0.0, 0.0)).is_err());
        assert_eq!(f.eval_grad(pt(1.0, 0.0)).unwrap(), [0.0, 1.0]);
        assert!(f.eval_grad(pt(2.0, 1.5)).unwrap()[0] <= 0.0);
    }

    #[test]
    fn samples_carry_hessian_only_off_singular_sets() {
        let f = field();
        assert!(f.sample(pt(0.2, 0.7)).unwrap().hessian.is_some());
        let d = f.sample(pt(0.6, 0.6)).unwrap();
        assert!(d.hessian.is_none() && d.region == Region::Diagonal);
        assert!(f.sample(pt(1.0, 1.0)).unwrap().grad.is_none());
    }
}
