//! Numerical laboratory for the functional equations of information theory.
//!
//! Grids ([`domains`]) sample the triangles, simplices and cones the equations
//! live on; [`equations`] measures sup-norm defects; [`certifiers`] rebuild the
//! exact solution hidden in an approximate one and check it against an
//! explicit stability bound; [`measures`] assembles whole information measures
//! from a generating function; [`jobs`] drives all of it from a JSON config.

pub mod certifiers;
pub mod domains;
pub mod equations;
pub mod error;
pub mod jobs;
pub mod measures;
pub mod models;

pub use error::{Error, Result};
