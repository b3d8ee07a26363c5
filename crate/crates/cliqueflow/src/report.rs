//! Solver output shared by the closed forms, the transform pipeline, the
//! numerical methods and the grid oracle.

use crate::clique::CliqueResult;
use crate::graph::LoadVector;
use crate::transforms::TransformTrace;

/// How a report was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedFormComplete,
    ClosedFormSingleLevelTree,
    ClosedFormBipartite,
    ClosedFormOddCycle,
    GeneralClique,
    Transform,
    ProjectedGradient,
    Replicator,
    GridOracle,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::ClosedFormComplete => "closed-form/complete",
            Method::ClosedFormSingleLevelTree => "closed-form/single-level-tree",
            Method::ClosedFormBipartite => "closed-form/bipartite",
            Method::ClosedFormOddCycle => "closed-form/odd-cycle",
            Method::GeneralClique => "general-clique",
            Method::Transform => "transform",
            Method::ProjectedGradient => "qp",
            Method::Replicator => "replicator",
            Method::GridOracle => "oracle",
        }
    }
}

/// Solver bookkeeping carried alongside the result.
#[derive(Debug, Clone, Default)]
pub struct Diagnostics {
    pub iterations: usize,
    pub restarts: usize,
    pub converged: bool,
    /// First-order stationarity residual, when the method computes one.
    pub stationarity: Option<f64>,
}

impl Diagnostics {
    pub fn exact() -> Self {
        Diagnostics {
            iterations: 0,
            restarts: 0,
            converged: true,
            stationarity: None,
        }
    }
}

/// Final loads and flow value together with how they were obtained.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub method: Method,
    pub loads: LoadVector,
    pub flow: f64,
    /// Clique backing the solution, when one was computed or supplied.
    pub clique: Option<CliqueResult>,
    /// Step-by-step evidence, when the method is transformation-based.
    pub trace: Option<TransformTrace>,
    pub diagnostics: Diagnostics,
}
