//! Parallel mean curvature surfaces in S²×H² ⊂ ℝ⁶₁.
//!
//! Constructors for the known PMC families (lifted CMC surfaces, products of
//! constant-curvature curves and the two profile-driven families), pointwise
//! extrinsic analysis, the complexified Frenet data and the adapted frame,
//! and a harness that runs verification suites over parameter grids.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod ambient;
pub mod curves;
pub mod error;
pub mod extrinsic;
pub mod frames;
pub mod harness;
pub mod hode;
pub mod linalg;
pub mod ode;
pub mod series;
pub mod surfaces;

pub use ambient::{Factor, Kahler, MinkowskiVector6, ProductPoint, ProductTangent};
pub use error::{GeomError, Result};
