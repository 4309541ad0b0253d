//! Exact symbolic engine for quantum principal bundles.
//!
//! Layers: scalars (exact coefficient field) -> Hopf *-algebras by generators
//! and rewrite rules -> first-order differential calculi -> graded extensions
//! -> bundles with connections, curvature and characteristic-class inputs.

pub mod base;
pub mod bundle;
pub mod conn;
pub mod focalc;
pub mod grext;
pub mod hopf;
pub mod linalg;
pub mod pack;
pub mod report;
pub mod scalar;
pub mod scenario;
pub mod sweep;
pub mod vert;

pub use scalar::{parse_scalar, q_int, q_ratio, render_scalar, Scalar, ScalarError, Q};
