//! Curvature functions: symmetric functions of the principal curvatures,
//! their operator derivatives and the structural inequalities they satisfy.

mod functions;
mod operator;
mod speed;

pub use functions::{elementary_all, inverse_fn, Kappa, SymFn};
pub use operator::{d1, d2, d2f_bound_check, inv_concavity_check, Spectral, WeingartenSample};
pub use speed::{phi_admissible, CurvatureFunctionSpec, ScalarFn};
