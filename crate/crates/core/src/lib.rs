//! Exact Delaunay and upper Delaunay triangulations of convex simplicial
//! polytopes by paraboloid lifting, together with ears, Bruggesser-Mani line
//! shellings, extremal neighboring spheres and the counting checks built on
//! top of them.
//!
//! The geometry is generic over [`Field`]; the aliases below fix it to exact
//! rationals, which is what every guarantee in this crate assumes.

pub mod delaunay;
pub mod ears;
pub mod error;
pub mod exactnum;
pub mod harness;
pub mod hull;
pub mod lp;
pub mod pointfile;
pub mod polygon2d;
pub mod report;
pub mod shelling;
pub mod spheres;
mod subsets;

pub use error::{GeomError, Result};
pub use exactnum::{in_sphere, orient, Field, Sign, VectorD};

/// Exact rational scalar.
pub type Scalar = num_rational::BigRational;
/// Point or vector with exact rational coordinates.
pub type Point = VectorD<Scalar>;
/// Hull complex over exact rationals.
pub type Hull = hull::HullComplex<Scalar>;
