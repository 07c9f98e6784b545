//! Meyer sets, cut-and-project model sets and Minkowski-type inequalities.
//!
//! The crate builds finite samples of Delone sets (lattices, periodic sets,
//! model sets, Diophantine sets), estimates their densities and frequencies of
//! differences, and checks lattice-point inequalities of Minkowski type on
//! them. Two applications sit on top: simultaneous slope approximation by
//! differences of a point set, and the loss of injectivity of rounded
//! rotations acting on the integer grid.

pub mod acceptance;
pub mod convex;
pub mod dirichlet;
pub mod discretize;
pub mod enumerate;
pub mod error;
pub mod exact;
pub mod frequency;
mod index;
pub mod io;
pub mod linalg;
pub mod minkowski;
pub mod modelset;
pub mod pointset;

pub use convex::{parse_body, ConvexBody, Shape};
pub use error::{Error, Result};
pub use frequency::{FrequencyEntry, FrequencyTable};
pub use modelset::{CutAndProjectScheme, Window};
pub use pointset::{DensityEstimate, PointSample};
