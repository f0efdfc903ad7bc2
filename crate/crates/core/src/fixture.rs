//! The bundled six-practice dataset.
//!
//! Weights are illustrative stand-ins on the 0-5 scale, not published
//! working-group values.

use crate::graph::{import_matrix, PropertyGraph};

pub const PRACTICES_CSV: &str = include_str!("../fixtures/practices.csv");
pub const WEIGHTS_CSV: &str = include_str!("../fixtures/weights.csv");

/// The fixture tables imported into a fresh graph.
pub fn graph() -> PropertyGraph {
    import_matrix(PRACTICES_CSV.as_bytes(), WEIGHTS_CSV.as_bytes()).expect("bundled fixture imports cleanly")
}
