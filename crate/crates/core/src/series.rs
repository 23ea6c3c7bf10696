//! The hodograph potential `W(r, θ)` and the series built from it.
//!
//! Every quantity is a sum over the frequencies `m_n = 4n - 2`:
//!
//! ```text
//! W(r, θ) = (8/π) Σ r^(m²) / ((m² - 1) m) · sin(mθ)
//! U(r, θ) = r W_r - W = (8/π) Σ r^(m²) / m · sin(mθ)
//! U_θ(r, θ)          = (8/π) Σ r^(m²) · cos(mθ) = (4/π) ϑ₂(2θ, r¹⁶)
//! ```
//!
//! Sums stop as soon as a geometric bound on the remaining tail drops below
//! [`SeriesPolicy::abs_tol`]. For `r >= boundary_snap` the closed-form values
//! on the unit arc are returned instead, except inside the thin heat layer
//! around the two corners `(1, 0)` and `(1, π/2)` where `W_r` jumps.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SCALE: f64 = 8.0 / PI;

/// A point `(r, θ)` of the closed fundamental domain `[0, 1] × [0, π/2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarPoint {
    r: f64,
    theta: f64,
}

impl PolarPoint {
    pub fn new(r: f64, theta: f64) -> Result<Self> {
        if !(r.is_finite() && theta.is_finite()) {
            return Err(Error::domain(format!("non-finite polar point ({r}, {theta})")));
        }
        if !(0.0..=1.0).contains(&r) || !(0.0..=FRAC_PI_2).contains(&theta) {
            return Err(Error::domain(format!(
                "polar point ({r}, {theta}) outside [0, 1] x [0, pi/2]"
            )));
        }
        Ok(PolarPoint { r, theta })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// True on the open domain `0 < r < 1`, `0 < θ < π/2`.
    pub fn is_interior(&self) -> bool {
        self.r > 0.0 && self.r < 1.0 && self.theta > 0.0 && self.theta < FRAC_PI_2
    }
}

/// Truncation policy shared by every series in this module.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesPolicy {
    pub abs_tol: f64,
    pub max_terms: usize,
    /// Radii at or above this value are treated as `r = 1`.
    pub boundary_snap: f64,
}

impl Default for SeriesPolicy {
    fn default() -> Self {
        SeriesPolicy {
            abs_tol: 1e-15,
            max_terms: 100_000,
            boundary_snap: 1.0 - 1e-12,
        }
    }
}

impl SeriesPolicy {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::Policy(format!("abs_tol must be positive, got {}", self.abs_tol)));
        }
        if self.max_terms == 0 {
            return Err(Error::Policy("max_terms must be at least 1".into()));
        }
        if !(self.boundary_snap > 0.0 && self.boundary_snap < 1.0) {
            return Err(Error::Policy(format!(
                "boundary_snap must lie in (0, 1), got {}",
                self.boundary_snap
            )));
        }
        Ok(())
    }

    /// Angular half-width of the corner layer in which the unit-arc closed
    /// forms are not trusted. At `t = -ln r ≈ 1 - snap` the heat layer has
    /// width `~2√t`; twelve of those put `erfc` below `1e-15`.
    pub fn corner_width(&self) -> f64 {
        12.0 * (1.0 - self.boundary_snap).sqrt()
    }
}

/// One frequency of the series: `m = 4n - 2` and the radial exponent `m²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeriesTerm {
    pub n: u64,
    pub m: u64,
    pub exponent: u64,
}

impl SeriesTerm {
    pub fn new(n: u64) -> Self {
        assert!(n >= 1, "series terms are indexed from 1");
        let m = 4 * n - 2;
        SeriesTerm { n, m, exponent: m * m }
    }

    /// All terms `n = 1, 2, ...`.
    pub fn sequence() -> impl Iterator<Item = SeriesTerm> {
        (1u64..).map(SeriesTerm::new)
    }

    /// `sin(mθ)` and `cos(mθ)`, exact at the angles where they are integers.
    fn sin_cos(&self, theta: f64) -> (f64, f64) {
        if theta == 0.0 {
            (0.0, 1.0)
        } else if theta == FRAC_PI_4 {
            // m ≡ 2 (mod 4): sin(mπ/4) = (-1)^(n-1), cos(mπ/4) = 0
            (if self.n % 2 == 1 { 1.0 } else { -1.0 }, 0.0)
        } else if theta == FRAC_PI_2 {
            // m/2 odd: cos(mπ/2) = -1
            (0.0, -1.0)
        } else {
            (self.m as f64 * theta).sin_cos()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Component {
    W,
    Wr,
    Wtheta,
    WthetaTheta,
    Wrr,
    Wrtheta,
    U,
    Ur,
    Utheta,
}

impl Component {
    /// Coefficient of `r^(m² - shift)` times sin or cos, without the `8/π`.
    fn coefficient(self, m: f64) -> f64 {
        let mm = m * m;
        match self {
            Component::W => 1.0 / ((mm - 1.0) * m),
            Component::Wr => m / (mm - 1.0),
            Component::Wtheta => 1.0 / (mm - 1.0),
            Component::WthetaTheta => -m / (mm - 1.0),
            Component::Wrr => m,
            Component::Wrtheta => mm / (mm - 1.0),
            Component::U => 1.0 / m,
            Component::Ur => m,
            Component::Utheta => 1.0,
        }
    }

    fn shift(self) -> usize {
        match self {
            Component::Wr | Component::Wrtheta | Component::Ur => 1,
            Component::Wrr => 2,
            _ => 0,
        }
    }

    fn uses_cos(self) -> bool {
        matches!(self, Component::Wtheta | Component::Wrtheta | Component::Utheta)
    }

    /// Upper bound on `coefficient(m + 4) / coefficient(m)` for frequencies `>= m`.
    fn growth(self, m: f64) -> f64 {
        match self {
            Component::Wrr | Component::Ur => (m + 4.0) / m,
            _ => 1.0,
        }
    }

    fn continuous_at_corners(self) -> bool {
        matches!(self, Component::W | Component::Wtheta)
    }

    /// Limit on the unit arc for `0 < θ < π/2`.
    fn arc_value(self, theta: f64) -> f64 {
        let (s, c) = theta.sin_cos();
        match self {
            Component::W => c + s - 1.0,
            Component::Wr => c + s,
            Component::Wtheta => c - s,
            Component::WthetaTheta => -(c + s),
            Component::Wrr | Component::Ur | Component::Utheta => 0.0,
            Component::Wrtheta => c - s,
            Component::U => 1.0,
        }
    }
}

fn sum_components<const K: usize>(
    p: PolarPoint,
    policy: &SeriesPolicy,
    comps: [Component; K],
) -> Result<[f64; K]> {
    policy.validate()?;
    let (r, theta) = (p.r, p.theta);
    if r == 0.0 {
        return Ok([0.0; K]);
    }
    if r >= policy.boundary_snap {
        return arc_components(p, policy, comps);
    }

    let ln_r = r.ln();
    let inv_r = [1.0, 1.0 / r, 1.0 / (r * r)];
    let mut acc = [0.0; K];
    let mut power = (4.0 * ln_r).exp(); // r^(m²) for the current term
    let mut last_bound = f64::INFINITY;

    for n in 1..=policy.max_terms as u64 {
        let term = SeriesTerm::new(n);
        let m = term.m as f64;
        let (s, c) = term.sin_cos(theta);
        for (slot, comp) in acc.iter_mut().zip(comps.iter()) {
            let trig = if comp.uses_cos() { c } else { s };
            *slot += comp.coefficient(m) * power * inv_r[comp.shift()] * trig;
        }

        let m_next = m + 4.0;
        let power_next = (m_next * m_next * ln_r).exp();
        let mut tail = 0.0f64;
        let mut ratio = None;
        for comp in comps.iter() {
            let bound = SCALE * comp.coefficient(m_next).abs() * power_next * inv_r[comp.shift()];
            if bound >= policy.abs_tol {
                tail = f64::INFINITY;
                break;
            }
            let base = *ratio.get_or_insert_with(|| ((8.0 * m_next + 16.0) * ln_r).exp());
            let rho = comp.growth(m_next) * base;
            let t = if rho < 1.0 { bound / (1.0 - rho) } else { f64::INFINITY };
            tail = tail.max(t);
        }
        last_bound = tail;
        if tail < policy.abs_tol {
            return Ok(acc.map(|v| v * SCALE));
        }
        power = power_next;
    }
    Err(Error::Truncation {
        r,
        terms: policy.max_terms,
        bound: last_bound,
    })
}

fn arc_components<const K: usize>(
    p: PolarPoint,
    policy: &SeriesPolicy,
    comps: [Component; K],
) -> Result<[f64; K]> {
    let edge = p.theta.min(FRAC_PI_2 - p.theta);
    let mut out = [0.0; K];
    for (slot, comp) in out.iter_mut().zip(comps.iter()) {
        if edge < policy.corner_width() && !comp.continuous_at_corners() {
            return Err(Error::CornerSingularity { r: p.r, theta: p.theta });
        }
        *slot = comp.arc_value(p.theta);
    }
    Ok(out)
}

/// `W(r, θ)`.
pub fn w(p: PolarPoint, policy: &SeriesPolicy) -> Result<f64> {
    sum_components(p, policy, [Component::W]).map(|[v]| v)
}

/// `W_θ(r, θ)`, continuous on the whole closed domain.
pub fn w_theta(p: PolarPoint, policy: &SeriesPolicy) -> Result<f64> {
    sum_components(p, policy, [Component::Wtheta]).map(|[v]| v)
}

/// `W_θθ(r, θ)` from its own termwise series (so `r W_r + W_θθ = 0` can be checked).
pub fn w_theta_theta(p: PolarPoint, policy: &SeriesPolicy) -> Result<f64> {
    sum_components(p, policy, [Component::WthetaTheta]).map(|[v]| v)
}

/// First and mixed partial derivatives of `W`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WPartials {
    pub w_r: f64,
    pub w_theta: f64,
    pub w_rr: f64,
    pub w_rtheta: f64,
}

pub fn w_partials(p: PolarPoint, policy: &SeriesPolicy) -> Result<WPartials> {
    use Component::*;
    let [w_r, w_theta, w_rr, w_rtheta] = sum_components(p, policy, [Wr, Wtheta, Wrr, Wrtheta])?;
    Ok(WPartials { w_r, w_theta, w_rr, w_rtheta })
}

/// `W_r` and `W_rr`, all a radial Newton step needs.
pub(crate) fn w_r_and_rr(p: PolarPoint, policy: &SeriesPolicy) -> Result<(f64, f64)> {
    sum_components(p, policy, [Component::Wr, Component::Wrr]).map(|[a, b]| (a, b))
}

/// Everything the solver and the Hessian need, from a single pass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jet {
    pub w: f64,
    pub w_r: f64,
    pub w_theta: f64,
    pub w_rr: f64,
    pub w_rtheta: f64,
    pub u_theta: f64,
}

pub fn jet(p: PolarPoint, policy: &SeriesPolicy) -> Result<Jet> {
    use Component::*;
    let [w, w_r, w_theta, w_rr, w_rtheta, u_theta] =
        sum_components(p, policy, [W, Wr, Wtheta, Wrr, Wrtheta, Utheta])?;
    Ok(Jet { w, w_r, w_theta, w_rr, w_rtheta, u_theta })
}

/// `U(r, θ) = r W_r - W`, the caloric function under `r = e^{-t}`.
pub fn u(p: PolarPoint, policy: &SeriesPolicy) -> Result<f64> {
    sum_components(p, policy, [Component::U]).map(|[v]| v)
}

/// `U_r(r, θ) = r W_rr`.
pub fn u_r(p: PolarPoint, policy: &SeriesPolicy) -> Result<f64> {
    sum_components(p, policy, [Component::Ur]).map(|[v]| v)
}

/// `U_θ(r, θ) = r W_rθ - W_θ`. Requires `r < 1`.
pub fn u_theta(p: PolarPoint, policy: &SeriesPolicy) -> Result<f64> {
    if p.r >= 1.0 {
        return Err(Error::domain("U_theta requires r < 1"));
    }
    sum_components(p, policy, [Component::Utheta]).map(|[v]| v)
}

/// Which representation of a theta-type sum to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Form {
    Series,
    Product,
    /// Poisson-summed form `√(π/t) Σ (-1)^k exp(-(z - kπ)²/t)`, `q = e^{-t}`,
    /// which needs a handful of terms as `q → 1`.
    Modular,
}

impl Form {
    /// Above `q = 0.9` the product keeps full relative accuracy where the
    /// series cancels down to an absolute error of a few ulps.
    /// Above `q = 0.999` the product needs `O(1 / (1 - q))` factors and the
    /// modular form takes over.
    pub fn preferred(q: f64) -> Form {
        if q > 0.999 {
            Form::Modular
        } else if q > 0.9 {
            Form::Product
        } else {
            Form::Series
        }
    }
}

/// Jacobi `ϑ₂(z, q) = 2 Σ q^((k-1/2)²) cos((2k-1)z)` for `0 <= q < 1`.
pub fn theta2(z: f64, q: f64, form: Form, policy: &SeriesPolicy) -> Result<f64> {
    policy.validate()?;
    if !z.is_finite() {
        return Err(Error::domain(format!("non-finite argument z = {z}")));
    }
    if !(0.0..1.0).contains(&q) {
        return Err(Error::domain(format!("nome q = {q} outside [0, 1)")));
    }
    if q == 0.0 {
        return Ok(0.0);
    }
    let ln_q = q.ln();
    match form {
        Form::Series => {
            let mut acc = 0.0;
            for k in 1..=policy.max_terms {
                let kh = k as f64 - 0.5;
                acc += 2.0 * (kh * kh * ln_q).exp() * ((2 * k - 1) as f64 * z).cos();
                let kn = kh + 1.0;
                let bound = 2.0 * (kn * kn * ln_q).exp();
                let rho = (2.0 * kn * ln_q).exp();
                if bound / (1.0 - rho) < policy.abs_tol {
                    return Ok(acc);
                }
            }
            Err(Error::Truncation { r: q, terms: policy.max_terms, bound: f64::NAN })
        }
        Form::Product => {
            let cz = z.cos();
            let mut acc = 2.0 * (0.25 * ln_q).exp() * cz;
            let tail_scale = 4.0 / -(2.0 * ln_q).exp_m1();
            for k in 1..=policy.max_terms {
                let a = (2.0 * k as f64 * ln_q).exp();
                let one_minus_a = -(2.0 * k as f64 * ln_q).exp_m1();
                // 1 + 2a cos 2z + a² written without cancellation near z = π/2
                acc *= one_minus_a * (one_minus_a * one_minus_a + 4.0 * a * cz * cz);
                let a_next = a * q * q;
                if a_next * tail_scale < policy.abs_tol {
                    return Ok(acc);
                }
            }
            Err(Error::Truncation { r: q, terms: policy.max_terms, bound: f64::NAN })
        }
        Form::Modular => {
            // θ₂ is π-antiperiodic and even: reduce to z ∈ [0, π/2]
            let mut zr = z.rem_euclid(2.0 * PI);
            let mut sign = 1.0;
            if zr > PI {
                zr -= PI;
                sign = -1.0;
            }
            if zr > FRAC_PI_2 {
                zr = PI - zr;
                sign = -sign;
            }
            let t = -ln_q;
            // pair k = -j with k = j + 1 so the zero at z = π/2 keeps its
            // relative accuracy
            let mut acc = 0.0;
            for j in 0..=policy.max_terms {
                let jf = j as f64;
                let lead = (-(zr + jf * PI).powi(2) / t).exp();
                let term = lead * -((2.0 * jf + 1.0) * PI * (2.0 * zr - PI) / t).exp_m1();
                acc += if j % 2 == 0 { term } else { -term };
                let next = (-(zr + (jf + 1.0) * PI).powi(2) / t).exp();
                if 2.0 * next * (PI / t).sqrt() < policy.abs_tol * 1e-3 {
                    return Ok(sign * (PI / t).sqrt() * acc);
                }
            }
            Err(Error::Truncation { r: q, terms: policy.max_terms, bound: f64::NAN })
        }
    }
}

/// `U_r(r, π/4)` on the diagonal, either from the termwise series
/// `(8/π)(2r³ - 6r³⁵ + 10r⁹⁹ - ...)` or from the product
/// `(16/π) r³ Π (1 - r^(32k))³` obtained by differentiating the ϑ₂ product.
pub fn u_r_diagonal(r: f64, form: Form, policy: &SeriesPolicy) -> Result<f64> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::domain(format!("radius {r} outside [0, 1)")));
    }
    match form {
        Form::Series => u_r(PolarPoint::new(r, FRAC_PI_4)?, policy),
        Form::Product => {
            policy.validate()?;
            if r == 0.0 {
                return Ok(0.0);
            }
            let ln_r = r.ln();
            let tail_scale = 3.0 / -(32.0 * ln_r).exp_m1();
            let mut log_prod = 0.0;
            for k in 1..=policy.max_terms {
                let e = 32.0 * k as f64 * ln_r;
                log_prod += 3.0 * (-e.exp_m1()).ln();
                if (e + 32.0 * ln_r).exp() * tail_scale < policy.abs_tol {
                    return Ok(2.0 * SCALE * r.powi(3) * log_prod.exp());
                }
            }
            Err(Error::Truncation { r, terms: policy.max_terms, bound: f64::NAN })
        }
        Form::Modular => Err(Error::domain("U_r on the diagonal has no modular form here")),
    }
}
