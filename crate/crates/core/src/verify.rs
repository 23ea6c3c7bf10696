//! Invariant suites behind `infpot verify`. Each check records the measured
//! value, the threshold it is held to, and whether it passed.
//!
//! Quasi-random points come from the Halton sequence in bases 2 and 3.
//! Point sets stay `1e-3` away from the diagonal and the medians, where the
//! Hessian is undefined and the solve runs at float resolution.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analysis;
use crate::error::{Error, Result};
use crate::field::{self, Potential};
use crate::minimax::{self, PlanePoint};
use crate::series::{self, Form, PolarPoint, SeriesPolicy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Series,
    Minimax,
    Field,
    Analysis,
    All,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "series" => Ok(Suite::Series),
            "minimax" => Ok(Suite::Minimax),
            "field" => Ok(Suite::Field),
            "analysis" => Ok(Suite::Analysis),
            "all" => Ok(Suite::All),
            _ => Err(Error::domain(format!(
                "unknown suite {s:?}, expected series, minimax, field, analysis or all"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub value: f64,
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Check {
    fn new(name: &str, value: Result<f64>, tolerance: f64, accept: impl Fn(f64, f64) -> bool) -> Self {
        match value {
            Ok(v) => Check { name: name.into(), pass: accept(v, tolerance), value: v, tolerance, error: None },
            Err(e) => Check { name: name.into(), pass: false, value: f64::NAN, tolerance, error: Some(e.to_string()) },
        }
    }

    /// Passes when the measured error is at most `tol`.
    pub fn at_most(name: &str, value: Result<f64>, tol: f64) -> Self {
        Check::new(name, value, tol, |v, t| v <= t)
    }

    pub fn above(name: &str, value: Result<f64>, threshold: f64) -> Self {
        Check::new(name, value, threshold, |v, t| v > t)
    }

    pub fn below(name: &str, value: Result<f64>, threshold: f64) -> Self {
        Check::new(name, value, threshold, |v, t| v < t)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub suite: Suite,
    pub pass: bool,
    pub checks: Vec<Check>,
}

/// Radical inverse of `index` in `base`.
pub fn halton(mut index: usize, base: usize) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while index > 0 {
        f /= base as f64;
        r += f * (index % base) as f64;
        index /= base;
    }
    r
}

/// `count` Halton points of the open quadrant at least `margin` away from
/// the diagonal and the medians, skipping the first `skip` indices.
pub fn quadrant_points(count: usize, skip: usize, margin: f64) -> Vec<PlanePoint> {
    (skip + 1..)
        .map(|k| (halton(k, 2), halton(k, 3)))
        .filter(|&(x, y)| (x - y).abs() >= margin && 1.0 - x >= margin && 1.0 - y >= margin && x > 0.0)
        .take(count)
        .map(|(x, y)| PlanePoint { x, y })
        .collect()
}

/// Largest value of a fallible sequence; NaN wins.
fn worst(values: impl IntoIterator<Item = Result<f64>>) -> Result<f64> {
    let mut m = f64::NEG_INFINITY;
    for v in values {
        let v = v?;
        if v.is_nan() {
            return Ok(f64::NAN);
        }
        m = m.max(v);
    }
    Ok(m)
}

fn least(values: impl IntoIterator<Item = Result<f64>>) -> Result<f64> {
    worst(values.into_iter().map(|v| v.map(|x| -x))).map(|m| -m)
}

fn polar(r: f64, theta: f64) -> Result<PolarPoint> {
    PolarPoint::new(r, theta)
}

/// `(r, θ)` grid with `r = 0.95 i / n`, `θ = (π/2) j / n`, `i, j = 1..n`.
fn polar_grid(n: usize) -> impl Iterator<Item = (f64, f64)> {
    (1..=n).flat_map(move |i| (0..=n).map(move |j| (0.95 * i as f64 / n as f64, FRAC_PI_2 * j as f64 / n as f64)))
}

pub fn run(suite: Suite, potential: &Potential) -> Report {
    let checks = match suite {
        Suite::Series => series_checks(&potential.series),
        Suite::Minimax => minimax_checks(potential),
        Suite::Field => field_checks(potential),
        Suite::Analysis => analysis_checks(potential),
        Suite::All => {
            let mut v = series_checks(&potential.series);
            v.extend(minimax_checks(potential));
            v.extend(field_checks(potential));
            v.extend(analysis_checks(potential));
            v
        }
    };
    Report { suite, pass: checks.iter().all(|c| c.pass), checks }
}

pub fn series_checks(policy: &SeriesPolicy) -> Vec<Check> {
    let mut out = Vec::new();

    let interior = polar_grid(24).filter(|&(_, t)| t > 0.0 && t < FRAC_PI_2);
    out.push(Check::above(
        "W, W_r, W_rr > 0 inside the quarter disc",
        least(interior.map(|(r, t)| {
            let p = polar(r, t)?;
            let d = series::w_partials(p, policy)?;
            Ok(series::w(p, policy)?.min(d.w_r).min(d.w_rr))
        })),
        0.0,
    ));

    out.push(Check::at_most(
        "polar PDE residual |r W_r + W_tt|",
        worst(polar_grid(24).map(|(r, t)| {
            let p = polar(r, t)?;
            Ok((r * series::w_partials(p, policy)?.w_r + series::w_theta_theta(p, policy)?).abs())
        })),
        1e-12,
    ));

    out.push(Check::above(
        "U_theta > 0 below pi/4 and < 0 above",
        least(polar_grid(24).filter(|&(_, t)| (t - FRAC_PI_4).abs() > 1e-9).map(|(r, t)| {
            let v = series::u_theta(polar(r, t)?, policy)?;
            Ok(if t < FRAC_PI_4 { v } else { -v })
        })),
        0.0,
    ));

    out.push(Check::at_most(
        "U_theta = (4/pi) theta2(2 theta, r^16)",
        worst(polar_grid(24).map(|(r, t)| {
            let q = r.powi(16);
            let lhs = series::u_theta(polar(r, t)?, policy)?;
            Ok((lhs - 4.0 / PI * series::theta2(2.0 * t, q, Form::preferred(q), policy)?).abs())
        })),
        1e-12,
    ));

    let zs: Vec<f64> = (0..=64).map(|k| PI * k as f64 / 64.0).collect();
    let qs = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99];
    out.push(Check::at_most(
        "θ₂ series/product agree",
        worst(qs.iter().flat_map(|&q| {
            zs.iter().map(move |&z| {
                Ok((series::theta2(z, q, Form::Series, policy)? - series::theta2(z, q, Form::Product, policy)?).abs())
            })
        })),
        1e-12,
    ));
    out.push(Check::at_most(
        "θ₂ product/modular agree (relative)",
        worst([0.5, 0.9, 0.99, 0.999].iter().flat_map(|&q| {
            zs.iter().map(move |&z| {
                let m = series::theta2(z, q, Form::Modular, policy)?;
                Ok((m - series::theta2(z, q, Form::Product, policy)?).abs() / m.abs().max(1.0))
            })
        })),
        1e-12,
    ));

    // W_θ(1, θ) = (8/π) Σ cos(mθ) / (m² - 1) reproduces |cos θ| - |sin θ|
    let fourier = |theta: f64| {
        let sum: f64 = series::SeriesTerm::sequence()
            .take(20_000)
            .map(|t| {
                let m = t.m as f64;
                (m * theta).cos() / (m * m - 1.0)
            })
            .sum();
        8.0 / PI * sum
    };
    out.push(Check::at_most(
        "boundary Fourier series of |cos| - |sin|",
        worst((0..=16).map(|k| {
            let t = FRAC_PI_2 * k as f64 / 16.0;
            Ok((fourier(t) - (t.cos() - t.sin())).abs())
        })),
        1e-5,
    ));

    let tight = SeriesPolicy { abs_tol: 1e-18, max_terms: 1_000_000, ..*policy };
    out.push(Check::at_most(
        "truncation bound holds",
        worst([0.5, 0.9, 0.99, 0.999].iter().flat_map(|&r| {
            [0.1, 0.7, 1.3].into_iter().map(move |t| {
                let p = polar(r, t)?;
                Ok((series::w(p, policy)? - series::w(p, &tight)?).abs())
            })
        })),
        2.0 * policy.abs_tol,
    ));
    out
}

pub fn minimax_checks(potential: &Potential) -> Vec<Check> {
    let (sp, so) = (&potential.series, &potential.solver);
    let pts = quadrant_points(60, 0, 1e-3);
    let mut out = Vec::new();

    out.push(Check::at_most(
        "first-order residuals at the saddle",
        worst(pts.iter().map(|&p| {
            let s = minimax::solve_minimax(p, sp, so)?;
            Ok(s.residuals.radial.max(s.residuals.angular))
        })),
        1e-10,
    ));

    // f(r, θ) = r (x cos θ + y sin θ) - W(r, θ)
    let objective = |p: PlanePoint, r: f64, t: f64| -> Result<f64> {
        Ok(r * (p.x * t.cos() + p.y * t.sin()) - series::w(polar(r, t)?, sp)?)
    };
    out.push(Check::above(
        "saddle ordering f(r, θ*) <= u <= max_r f(r, θ)",
        least(pts.iter().take(20).flat_map(|&p| {
            let s = minimax::solve_minimax(p, sp, so);
            [-1e-3, 1e-3].into_iter().map(move |d| {
                let s = s.clone()?;
                let radial = s.u - objective(p, s.r_star + d * (1.0 - s.r_star), s.theta_star)?;
                let theta = s.theta_star + d;
                let r = minimax::inner_max_radius(p, theta, sp, so)?.r;
                Ok(radial.min(objective(p, r, theta)? - s.u))
            })
        })),
        -1e-14,
    ));

    out.push(Check::at_most(
        "swap symmetry θ*(x, y) + θ*(y, x) = π/2",
        worst(pts.iter().take(20).map(|&p| {
            let a = minimax::solve_minimax(p, sp, so)?;
            let b = minimax::solve_minimax(PlanePoint { x: p.y, y: p.x }, sp, so)?;
            Ok((a.theta_star + b.theta_star - FRAC_PI_2).abs())
        })),
        1e-12,
    ));

    out.push(Check::at_most(
        "nested solve matches dense-grid minimax",
        worst((1..=3).flat_map(|i| (1..=3).map(move |j| (i as f64 / 4.0, j as f64 / 4.0))).map(|(x, y)| {
            let p = PlanePoint::new(x, y)?;
            let brute = minimax::grid_minimax(p, 201, 201, sp)?;
            Ok((brute - minimax::solve_minimax(p, sp, so)?.u).abs())
        })),
        1e-6,
    ));

    out.push(Check::at_most(
        "diagonal solve matches the diagonal evaluator",
        worst([0.1, 0.35, 0.5, 0.8, 0.95].iter().map(|&s| {
            let a = minimax::solve_minimax(PlanePoint::new(s, s)?, sp, so)?.u;
            Ok((a - potential.diagonal_value(SQRT_2 * s)?.u).abs())
        })),
        1e-13,
    ));
    out
}

pub fn field_checks(potential: &Potential) -> Vec<Check> {
    let mut out = Vec::new();
    let pts = quadrant_points(200, 0, 1e-3);

    out.push(Check::at_most(
        "u = 0 on the boundary",
        worst((0..400).map(|k| {
            let t = 2.0 * (k / 4) as f64 / 99.0;
            let p = match k % 4 {
                0 => PlanePoint::new(t, 0.0),
                1 => PlanePoint::new(t, 2.0),
                2 => PlanePoint::new(0.0, t),
                _ => PlanePoint::new(2.0, t),
            }?;
            Ok(potential.eval_u(p)?.abs())
        })),
        1e-12,
    ));
    out.push(Check::at_most("u(1, 1) = 1", potential.eval_u(PlanePoint { x: 1.0, y: 1.0 }).map(|u| (u - 1.0).abs()), 0.0));
    out.push(Check::at_most(
        "u(1, t) = t on the medians",
        worst((0..=20).map(|k| {
            let t = k as f64 / 20.0;
            Ok((potential.eval_u(PlanePoint::new(1.0, t)?)? - t).abs())
        })),
        0.0,
    ));

    out.push(Check::at_most(
        "cone bounds 1 - |x - c| <= u <= dist(x, boundary)",
        worst((0..41 * 41).map(|k| {
            let p = PlanePoint::new(0.05 * (k % 41) as f64, 0.05 * (k / 41) as f64)?;
            let u = potential.eval_u(p)?;
            Ok((p.cone_bound() - u).max(u - p.boundary_distance()))
        })),
        1e-9,
    ));

    out.push(Check::at_most(
        "reflection symmetry",
        worst(pts.iter().take(50).map(|&p| {
            let u = potential.eval_u(p)?;
            let images = [(p.y, p.x), (2.0 - p.x, p.y), (p.x, 2.0 - p.y), (2.0 - p.y, 2.0 - p.x)];
            worst(images.iter().map(|&(x, y)| Ok((potential.eval_u(PlanePoint::new(x, y)?)? - u).abs())))
        })),
        1e-14,
    ));

    out.push(Check::at_most(
        "∞-harmonic residual < 1e-9",
        worst(pts.iter().map(|&p| {
            let g = potential.eval_grad(p)?;
            let h = potential.eval_hessian(p)?;
            Ok((g[0] * g[0] * h[0][0] + 2.0 * g[0] * g[1] * h[0][1] + g[1] * g[1] * h[1][1]).abs())
        })),
        1e-9,
    ));

    let h = 1e-5;
    let u_at = |x: f64, y: f64| potential.eval_u(PlanePoint::new(x, y)?);
    out.push(Check::at_most(
        "gradient matches central differences",
        worst(pts.iter().filter(|p| (p.x - p.y).abs() > 0.02 && p.x < 0.999 && p.y < 0.999).take(100).map(|&p| {
            let g = potential.eval_grad(p)?;
            let fx = (u_at(p.x + h, p.y)? - u_at(p.x - h, p.y)?) / (2.0 * h);
            let fy = (u_at(p.x, p.y + h)? - u_at(p.x, p.y - h)?) / (2.0 * h);
            Ok((fx - g[0]).abs().max((fy - g[1]).abs()))
        })),
        1e-8,
    ));

    let g_at = |x: f64, y: f64| potential.eval_grad(PlanePoint::new(x, y)?);
    out.push(Check::at_most(
        "Hessian matches gradient differences",
        worst(pts.iter().filter(|p| (p.x - p.y).abs() > 0.05 && p.x < 0.99 && p.y < 0.99).take(50).map(|&p| {
            let hs = potential.eval_hessian(p)?;
            let (gxp, gxm) = (g_at(p.x + h, p.y)?, g_at(p.x - h, p.y)?);
            let (gyp, gym) = (g_at(p.x, p.y + h)?, g_at(p.x, p.y - h)?);
            let fd = [[(gxp[0] - gxm[0]) / (2.0 * h), (gyp[0] - gym[0]) / (2.0 * h)], [(gxp[1] - gxm[1]) / (2.0 * h), (gyp[1] - gym[1]) / (2.0 * h)]];
            let scale = 1.0 + hs.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
            worst((0..4).map(|k| Ok((fd[k / 2][k % 2] - hs[k / 2][k % 2]).abs() / scale)))
        })),
        1e-5,
    ));

    out.push(Check::at_most(
        "det Hu = -(π²/16) r⁴ / θ₂(2θ, r¹⁶)²",
        worst(pts.iter().map(|&p| (p, potential.solve(p.x, p.y))).filter_map(|(p, s)| match s {
            Ok(s) if (s.theta_star - FRAC_PI_4).abs() <= 0.05 => None,
            Ok(s) => Some((|| {
                let q = s.r_star.powi(16);
                let t2 = series::theta2(2.0 * s.theta_star, q, Form::preferred(q), &potential.series)?;
                let exact = -(PI * PI / 16.0) * s.r_star.powi(4) / (t2 * t2);
                Ok((field::determinant(potential.eval_hessian(p)?) - exact).abs() / exact.abs())
            })()),
            Err(e) => Some(Err(e)),
        })),
        1e-8,
    ));

    out.push(Check::at_most(
        "gradient continuous across the diagonal",
        worst([0.2, 0.5, 0.8].iter().map(|&s| {
            let on = potential.eval_grad(PlanePoint::new(s, s)?)?;
            let off = potential.eval_grad(PlanePoint::new(s - 1e-12, s + 1e-12)?)?;
            Ok((on[0] - off[0]).abs().max((on[1] - off[1]).abs()))
        })),
        1e-3,
    ));

    let diag: Result<Vec<field::DiagonalValue>> =
        (0..=1000).map(|k| potential.diagonal_value(SQRT_2 * k as f64 / 1000.0)).collect();
    out.push(Check::above(
        "u(s 1) has positive second differences",
        diag.as_ref().map_err(Clone::clone).and_then(|d| least(d.windows(3).map(|w| Ok(w[0].u - 2.0 * w[1].u + w[2].u)))),
        0.0,
    ));
    out.push(Check::above(
        "g strictly increasing along the diagonal",
        diag.as_ref().map_err(Clone::clone).and_then(|d| least(d.windows(2).map(|w| Ok(w[1].g - w[0].g)))),
        0.0,
    ));

    out.push(Check::below(
        "c'' decreases toward the diagonal",
        (|| {
            let c: Vec<f64> = [1e-2, 1e-3, 1e-4]
                .iter()
                .map(|&o| potential.diagonal_transverse_second_derivative(SQRT_2 * 0.5, o))
                .collect::<Result<_>>()?;
            Ok((c[1] - c[0]).max(c[2] - c[1]))
        })(),
        0.0,
    ));
    out
}

pub fn analysis_checks(potential: &Potential) -> Vec<Check> {
    let policy = &potential.series;
    let mut out = Vec::new();
    let one = PlanePoint { x: 1.0, y: 1.0 };

    out.push(Check::at_most(
        "Aronsson value at (1, 1) = 0.99800",
        analysis::aronsson_approximation(one).map(|a| (a - 0.99800).abs()),
        1e-5,
    ));
    out.push(Check::at_most(
        "Aronsson error at (1, 1) = 2.0e-3",
        analysis::aronsson_approximation(one).map(|a| (1.0 - a - 2.0e-3).abs()),
        1e-5,
    ));
    out.push(Check::at_most(
        "Aronsson matches u where |grad u| <= 0.3",
        worst(quadrant_points(400, 0, 0.0).into_iter().map(|p| PlanePoint { x: p.x * 0.15, y: p.y * 0.15 }).map(|p| {
            let g = potential.eval_grad(p)?;
            if g[0].hypot(g[1]) > 0.3 {
                return Ok(0.0);
            }
            Ok((analysis::aronsson_approximation(p)? - potential.eval_u(p)?).abs())
        })),
        1e-5,
    ));

    out.push(Check::at_most(
        "theta2 integral equals U",
        worst((1..=20).flat_map(|i| (1..=20).map(move |j| (0.95 * i as f64 / 20.0, FRAC_PI_2 * j as f64 / 20.0))).map(
            |(r, t)| {
                let p = polar(r, t)?;
                Ok((analysis::theta_integral_u(p, policy)? - series::u(p, policy)?).abs())
            },
        )),
        1e-9,
    ));

    out.push(Check::at_most(
        "d(0) = d(1) = 0",
        analysis::ground_state_gap(0.0, policy)
            .and_then(|a| Ok(a.abs().max(analysis::ground_state_gap(1.0, policy)?.abs()))),
        1e-15,
    ));
    out.push(Check::below("d(0.9) < 0", analysis::ground_state_gap(0.9, policy), 0.0));
    out.push(Check::above("d(0.99) > 0", analysis::ground_state_gap(0.99, policy), 0.0));

    let h = 1e-6;
    out.push(Check::at_most(
        "d' matches finite differences",
        worst([0.3, 0.6, 0.9, 0.95, 0.99].iter().map(|&r| {
            let fd = (analysis::ground_state_gap(r + h, policy)? - analysis::ground_state_gap(r - h, policy)?) / (2.0 * h);
            Ok((fd - analysis::ground_state_gap_slope(r, policy)?).abs())
        })),
        1e-6,
    ));
    out.push(Check::at_most(
        "d'(1-) = -1 from the product form",
        analysis::ground_state_gap_slope(0.9999, policy).map(|d| (d + 1.0).abs()),
        1e-3,
    ));
    out.push(Check::below(
        "U_r(0.9999, pi/4) < 1e-3",
        series::u_r_diagonal(0.9999, Form::Product, policy),
        1e-3,
    ));

    let report = analysis::ground_state_disproof(1000, potential);
    out.push(Check::above("d_max > 0", report.as_ref().map(|r| r.d_max).map_err(Clone::clone), 0.0));
    out.push(Check::above(
        "defect 1 - |grad u| / u > 0 at the witness",
        report.as_ref().map(|r| r.lambda_defect).map_err(Clone::clone),
        0.0,
    ));
    out
}
