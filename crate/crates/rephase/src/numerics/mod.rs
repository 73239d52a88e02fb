//! Shared numerical kernels: embedded Runge-Kutta integration with dense
//! output, globally adaptive Gauss-Kronrod quadrature, safeguarded scalar
//! Newton, and a trust-region dogleg solver for small nonlinear systems.
//!
//! All kernels are reentrant pure functions; concurrent solves must not
//! share mutable workspace.

mod hybrid;
mod quad;
mod rk;
mod roots;

pub use hybrid::{hybrid_solve, hybrid_solve_with_jacobian, HybridSolution};
pub use quad::quad_adaptive;
pub use rk::{integrate, integrate_dense, IntegratorSettings, Trajectory};
pub use roots::{bisect, newton_scalar, newton_scalar_bracketed, RootSettings, ScalarRoot};
