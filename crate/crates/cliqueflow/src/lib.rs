//! Load placement for maximum quadratic edge-interaction flow.
//!
//! A graph carries a total load budget `D` spread over its vertices; every
//! edge contributes `c * m_u * m_v` to the flow. This crate finds the
//! distribution maximizing the total flow via closed forms for recognized
//! graph classes, flow-preserving transformation pipelines, exact maximum
//! clique search, numerical solvers on the simplex, and a brute-force grid
//! oracle for ground truth.

pub mod cli;
pub mod clique;
pub mod closed_form;
pub mod error;
pub mod graph;
pub mod numeric;
pub mod oracle;
pub mod report;
pub mod transforms;

pub use clique::{clique_number_bruteforce, max_clique_exact, verify_clique, CliqueResult};
pub use closed_form::{clique_optimum, edge_pair_optimum, general_optimum, motzkin_straus_bound};
pub use error::{Error, Result};
pub use graph::{Bipartition, Graph, GraphClass, LoadVector};
pub use numeric::{
    extract_clique_from_support, project_simplex, projected_gradient_ascent, replicator_solve,
    replicator_step, SolverParams,
};
pub use oracle::grid_oracle;
pub use report::{Diagnostics, Method, SolveReport};
pub use transforms::{
    bipartite_collapse, concentrate, merge_and_equalize, nonadjacent_shift, odd_cycle_reduce,
    ShiftRule, ShiftStep, TransformTrace,
};
