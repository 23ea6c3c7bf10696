use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes shared by every layer of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("series truncation failed: bound {bound:e} still above tolerance after {terms} terms at r = {r}")]
    Truncation { r: f64, terms: usize, bound: f64 },

    /// `W_r` and the quantities built from it jump at `(r, θ) = (1, 0)` and `(1, π/2)`.
    #[error("corner singularity at (r, theta) = ({r}, {theta})")]
    CornerSingularity { r: f64, theta: f64 },

    #[error("root bracket has no sign change: f({lo}) = {f_lo:e}, f({hi}) = {f_hi:e}")]
    Bracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("Hessian undefined at ({x}, {y}): {reason}")]
    SingularHessian { x: f64, y: f64, reason: String },

    #[error("gradient undefined at ({x}, {y})")]
    UndefinedGradient { x: f64, y: f64 },

    #[error("quadrature did not reach tolerance {tol:e} (estimate {estimate:e})")]
    Quadrature { tol: f64, estimate: f64 },

    #[error("ground-state disproof failed: maximal gap d_max = {d_max:e} is not positive")]
    Disproof { d_max: f64 },

    #[error("invalid policy: {0}")]
    Policy(String),

    #[error("at ({x}, {y}): {source}")]
    At { x: f64, y: f64, source: Box<Error> },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn at(self, p: crate::PlanePoint) -> Self {
        Error::At { x: p.x, y: p.y, source: Box::new(self) }
    }
}
