//! Derived results: the small-gradient approximation, the ϑ₂ integral
//! representation of `U`, and the gap `d(r) = U(r, π/4) - r` along the
//! diagonal, whose positivity near `r = 1` shows that the potential is not
//! an ∞-ground state.

use std::f64::consts::{FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Potential;
use crate::minimax::{golden, PlanePoint};
use crate::quadrature;
use crate::series::{self, Form, PolarPoint, SeriesPolicy};

/// Absolute tolerance of [`theta_integral_u`].
pub const INTEGRAL_TOL: f64 = 1e-11;

/// `(3c/8)((x + y)^{4/3} - |y - x|^{4/3})`, `c = (3π)^{1/3} / 2`: the
/// potential obtained by keeping only the first term of `W`.
pub fn aronsson_approximation(p: PlanePoint) -> Result<f64> {
    if !(p.x <= 1.0 && p.y <= 1.0) {
        return Err(Error::domain(format!("approximation is stated on [0, 1]^2, got ({}, {})", p.x, p.y)));
    }
    let c = (3.0 * PI).cbrt() / 2.0;
    Ok(3.0 * c / 8.0 * ((p.x + p.y).powf(4.0 / 3.0) - (p.y - p.x).abs().powf(4.0 / 3.0)))
}

/// `U(r, θ) = (4/π) ∫₀^θ ϑ₂(2ψ, r¹⁶) dψ` by adaptive quadrature.
pub fn theta_integral_u(p: PolarPoint, policy: &SeriesPolicy) -> Result<f64> {
    if p.r() >= 1.0 {
        return Err(Error::domain("the integral representation needs r < 1"));
    }
    let q = p.r().powi(16);
    let form = Form::preferred(q);
    let integral = quadrature::integrate(
        |psi| series::theta2(2.0 * psi, q, form, policy),
        0.0,
        p.theta(),
        INTEGRAL_TOL * PI / 4.0,
        10_000,
    )?;
    Ok(4.0 / PI * integral)
}

/// `d(r) = U(r, π/4) - r = u - |∇u|` at the diagonal point with `|∇u| = r`.
pub fn ground_state_gap(r: f64, policy: &SeriesPolicy) -> Result<f64> {
    Ok(series::u(PolarPoint::new(r, FRAC_PI_4)?, policy)? - r)
}

/// `d'(r) = U_r(r, π/4) - 1`, with `U_r` from the product form.
pub fn ground_state_gap_slope(r: f64, policy: &SeriesPolicy) -> Result<f64> {
    Ok(series::u_r_diagonal(r, Form::Product, policy)? - 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisproofReport {
    pub r_grid: Vec<f64>,
    pub d_values: Vec<f64>,
    pub r_max: f64,
    pub d_max: f64,
    /// Diagonal parameter of the witness point `s₀ 𝟙`.
    pub s0: f64,
    /// `u` and `|∇u|` at the witness, from the diagonal evaluator.
    pub witness_u: f64,
    pub witness_grad: f64,
    /// `1 - |∇u| / u` at the witness.
    pub lambda_defect: f64,
}

/// Scan of `d` on `n_samples` uniform radii merged with `1 - 2^{-k}`,
/// `k = 1..=30`, then golden-section refinement of the maximum.
pub fn ground_state_disproof(n_samples: usize, potential: &Potential) -> Result<DisproofReport> {
    if n_samples < 100 {
        return Err(Error::domain(format!("need at least 100 samples, got {n_samples}")));
    }
    let policy = &potential.series;
    let mut r_grid: Vec<f64> = (0..n_samples).map(|i| i as f64 / (n_samples - 1) as f64).collect();
    r_grid.extend((1..=30).map(|k| 1.0 - 0.5f64.powi(k)));
    r_grid.sort_by(f64::total_cmp);
    r_grid.dedup();
    let d_values = r_grid.iter().map(|&r| ground_state_gap(r, policy)).collect::<Result<Vec<_>>>()?;

    let (imax, _) = d_values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("grid is nonempty");
    let lo = r_grid[imax.saturating_sub(1)];
    let hi = r_grid[(imax + 1).min(r_grid.len() - 1)];
    let (r_max, neg) = golden(|r| ground_state_gap(r, policy).map(|d| -d), lo, hi)?;
    let d_max = (-neg).max(d_values[imax]);
    let r_max = if d_max == d_values[imax] { r_grid[imax] } else { r_max };
    if !(d_max > 0.0) {
        return Err(Error::Disproof { d_max });
    }

    let s0 = series::w_partials(PolarPoint::new(r_max, FRAC_PI_4)?, policy)?.w_r;
    let witness = potential.diagonal_value(s0)?;
    let lambda_defect = 1.0 - witness.g / witness.u;
    if !(lambda_defect > 0.0) {
        return Err(Error::Disproof { d_max: witness.u - witness.g });
    }
    Ok(DisproofReport {
        r_grid,
        d_values,
        r_max,
        d_max,
        s0,
        witness_u: witness.u,
        witness_grad: witness.g,
        lambda_defect,
    })
}
