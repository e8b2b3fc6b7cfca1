//! Time integration of curvature flows in the Gauss-map parameterization,
//! trace storage and finite-difference checks of the evolution identities.

mod evolution;
mod integrate;
pub mod ode;
mod trace;

pub use evolution::{verify_flat_evolution, EvolutionResiduals};
pub use integrate::{chebyshev_step, integrate, stiffness, step, velocity, Direction, DtPolicy, FlowSpec};
pub(crate) use integrate::{make_record, trace_id};
pub use trace::{FlowTrace, Rates, Sampling, Shape, Termination, TraceMeta, TraceRecord};
