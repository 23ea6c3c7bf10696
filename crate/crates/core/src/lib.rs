//! The infinity-potential of the punctured square `(0, 2)²`.
//!
//! The solution of `Δ∞u = 0` with `u = 0` on the sides and `u = 1` at the
//! centre has the representation
//!
//! ```text
//! u(x, y) = min_θ max_r { r (x cos θ + y sin θ) - W(r, θ) }
//! ```
//!
//! on the quarter `[0, 1]²`, extended to the square by reflections. The
//! modules build it up in layers:
//!
//! - [`series`]: `W`, its derivatives, `U = r W_r - W` and Jacobi `ϑ₂`
//! - [`minimax`]: the nested root solves for the saddle point `(|∇u|, arg ∇u)`
//! - [`field`]: value, gradient and Hessian on the full square
//! - [`analysis`]: derived results (Aronsson approximation, ϑ₂ integral,
//!   the ground-state gap along the diagonal)
//! - [`fd`]: an independent monotone finite-difference solve for comparison
//! - [`verify`]: the invariant suites behind `infpot verify`

// Negated float comparisons in this crate are there to reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod export;
pub mod fd;
pub mod field;
pub mod minimax;
pub mod quadrature;
pub mod roots;
pub mod series;
pub mod verify;

pub use error::{Error, Result};
pub use field::{FieldSample, Potential, Region};
pub use minimax::{MinimaxResult, PlanePoint, SolverPolicy};
pub use series::{Form, PolarPoint, SeriesPolicy};
