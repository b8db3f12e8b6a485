//! Geodesics, full triangles and 2-medians in two-dimensional
//! piecewise-Euclidean CAT(0) triangle complexes.
//!
//! The crate is organised bottom-up: [`complex`] holds the ambient complex,
//! [`link`] the link graphs of points, [`geodesic`] the geodesic solver,
//! [`full_triangle`] membership in full triangles, [`disc`] disc diagrams
//! with folding and Gauss–Bonnet audits, [`median`] the 2-median solver and
//! [`tetra`] the deflated-tetrahedron verification layer.

pub mod builders;
pub mod complex;
pub mod disc;
pub mod error;
pub mod full_triangle;
pub mod geodesic;
pub mod geom;
pub mod io;
pub mod link;
pub mod median;
pub mod svg;
pub mod tetra;

pub use complex::{Cell, Label, PiecewisePath, PointRef, RawComplex, TriangleComplex};
pub use error::{Error, Result};

/// Snapping tolerance for barycentric and edge coordinates.
pub const EPS_BARY: f64 = 1e-9;
/// Tolerance for all angle comparisons, in radians.
pub const EPS_ANG: f64 = 1e-7;
/// Relative tolerance on geodesic lengths.
pub const EPS_LEN: f64 = 1e-9;
/// Absolute tolerance on positions along geodesics.
pub const EPS_GEO: f64 = 1e-9;
/// Straightening passes allowed before a geodesic query gives up.
pub const MAX_STRAIGHTEN_PASSES: usize = 10_000;
