use serde::{Deserialize, Serialize};

use crate::conic::Status;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TerminalStatus {
    /// Pricing found no ray with negative reduced cost below the threshold.
    NoImprovingRay,
    /// The bound stopped moving by more than the improvement floor.
    Stalled,
    MaxIterations,
    TimeBudget,
    SolverFailure,
    CholeskyFailure,
    /// The transformed basis no longer expands to the expected polynomial.
    ExpansionMismatch,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub bound: f64,
    /// What changed before this solve.
    pub change: String,
    pub solver_status: Status,
    pub solver_iterations: usize,
    pub residual: f64,
    pub time_s: f64,
    /// Most negative `v^T X v` over the pricing pool after this solve.
    pub min_reduced_cost: Option<f64>,
    /// Condition number of the accumulated basis transform.
    pub condition_number: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefinementTrace {
    pub method: String,
    pub steps: Vec<TraceStep>,
    pub status: TerminalStatus,
    /// Final ray set (column generation only).
    pub rays: Option<Vec<Vec<i8>>>,
}

impl RefinementTrace {
    pub fn bounds(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.bound).collect()
    }

    pub fn initial_bound(&self) -> Option<f64> {
        self.steps.first().map(|s| s.bound)
    }

    pub fn final_bound(&self) -> Option<f64> {
        self.steps.last().map(|s| s.bound)
    }

    /// Largest drop between consecutive bounds (0 for a non-decreasing trace).
    pub fn worst_decrease(&self) -> f64 {
        self.steps.windows(2).map(|w| w[0].bound - w[1].bound).fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serializes")
    }
}
