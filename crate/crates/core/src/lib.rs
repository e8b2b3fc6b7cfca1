//! Numerical laboratory for curvature flows of convex hypersurfaces in
//! space forms and for the Harnack inequalities they satisfy.

pub mod ambient;
pub mod duality;
pub mod error;
pub mod flow;
pub mod harnack;
pub mod moser;
pub mod shape;
pub mod soliton;
pub mod symfun;
pub mod xcf;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/speeds.md")]
    mod speeds {}
    #[doc = include_str!("../../../book/src/shapes.md")]
    mod shapes {}
    #[doc = include_str!("../../../book/src/flows.md")]
    mod flows {}
    #[doc = include_str!("../../../book/src/harnack.md")]
    mod harnack {}
    #[doc = include_str!("../../../book/src/solitons.md")]
    mod solitons {}
    #[doc = include_str!("../../../book/src/duality.md")]
    mod duality {}
    #[doc = include_str!("../../../book/src/moser.md")]
    mod moser {}
    #[doc = include_str!("../../../book/src/xcf.md")]
    mod xcf {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
