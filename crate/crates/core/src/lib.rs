//! Local limit theorem machinery for clique counts in `G(n,p)`.

pub mod bounds;
pub mod clique;
pub mod decoupling;
pub mod dist;
pub mod edges;
pub mod error;
pub mod experiment;
pub mod mc;
pub mod pbf;

pub use error::{Error, Result};
