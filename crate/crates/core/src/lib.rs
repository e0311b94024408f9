//! Discrete Liouville quantum gravity on a square lattice: Gaussian free
//! field samples, the LFPP first-passage metric, geodesic trees, and the
//! contour exploration of the tree/dual-tree pair.

pub mod field;
pub mod lattice;
pub mod metric;
pub mod rng;
pub mod tree;
pub mod wheel;
pub mod report;

/// Any error the library can produce, tagged by module.
pub type Error = report::ReportError;
