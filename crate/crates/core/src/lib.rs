//! Class groups of quadratic fields, torsion statistics over families,
//! moment inequalities, predicted constants, field-counting correspondences,
//! and an elliptic-curve conductor census.

pub mod arith;
pub mod classgroup;
pub mod error;
pub mod heuristics;
pub mod moments;
pub mod oracles;
pub mod report;
pub mod store;

pub use error::{Error, Result};
