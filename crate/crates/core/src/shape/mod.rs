//! Discrete convex hypersurfaces: support functions on the Gauss-map domain
//! for flat ambients and rotationally symmetric profiles for curved ones.

mod field;
mod grid;
mod profile;
mod support;

pub use field::{speed_field, CurvatureField, NodeGeometry, Principal};
pub(crate) use field::speed_from_principal;
pub use grid::Grid;
pub use profile::{curvature_from_profile, warp, ProfileNode, ProfileState};
pub use support::{curvature_from_support, SupportState};
