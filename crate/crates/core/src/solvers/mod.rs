//! Deployment search: find the mapping with the highest score.
//!
//! Three solvers share one request type. [`solve_exhaustive`] tries every
//! completion and serves as the reference for the others;
//! [`solve_branch_and_bound`] returns the same optimal score while pruning;
//! [`solve_local_search`] is a seeded multi-restart hill climber with no
//! optimality guarantee. All of them keep pinned components where they are.

mod bnb;
mod exhaustive;
mod local;

use serde::Serialize;

use crate::evaluation::{Assignment, EvalError, Problem, ScoreWeights};
use crate::model::{DeploymentMapping, HardwareModel, SoftwareModel};

pub use bnb::solve_branch_and_bound;
pub use exhaustive::solve_exhaustive;
pub use local::solve_local_search;

/// Score reported when no feasible mapping was found.
pub const NO_SOLUTION_SCORE: i64 = -1;

pub const DEFAULT_EXHAUSTIVE_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolveError {
    #[error("unknown id `{0}`")]
    UnknownId(String),
    #[error("exhaustive search over {size} mappings exceeds the cap of {cap}")]
    InstanceTooLarge { size: String, cap: u64 },
    #[error("invalid solver parameter: {0}")]
    InvalidParameter(String),
}

impl SolveError {
    pub fn kind(&self) -> &'static str {
        match self {
            SolveError::UnknownId(_) => "UnknownId",
            SolveError::InstanceTooLarge { .. } => "InstanceTooLarge",
            SolveError::InvalidParameter(_) => "InvalidParameter",
        }
    }
}

impl From<EvalError> for SolveError {
    fn from(err: EvalError) -> Self {
        match err {
            EvalError::UnknownId(id) => SolveError::UnknownId(id),
            other => SolveError::InvalidParameter(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverParams {
    /// Seed for local search.
    pub seed: u64,
    /// Local-search restarts.
    pub restarts: usize,
    /// Local-search moves per restart.
    pub max_iters: usize,
    /// Largest number of completions exhaustive search will enumerate.
    pub exhaustive_cap: u64,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            seed: 0,
            restarts: 10,
            max_iters: 1000,
            exhaustive_cap: DEFAULT_EXHAUSTIVE_CAP,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveRequest<'a> {
    pub hw: &'a HardwareModel,
    pub sw: &'a SoftwareModel,
    pub weights: ScoreWeights,
    /// Components whose ECU is fixed in advance.
    pub pins: DeploymentMapping,
    pub params: SolverParams,
}

impl<'a> SolveRequest<'a> {
    pub fn new(hw: &'a HardwareModel, sw: &'a SoftwareModel) -> Self {
        Self {
            hw,
            sw,
            weights: ScoreWeights::default(),
            pins: DeploymentMapping::new(),
            params: SolverParams::default(),
        }
    }

    pub fn with_pins(mut self, pins: DeploymentMapping) -> Self {
        self.pins = pins;
        self
    }

    pub fn with_weights(mut self, weights: ScoreWeights) -> Self {
        self.weights = weights;
        self
    }

    pub fn with_params(mut self, params: SolverParams) -> Self {
        self.params = params;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SolveResult {
    pub feasible: bool,
    pub score: i64,
    pub mapping: Option<DeploymentMapping>,
    /// Candidate assignments, partial or complete, examined by the search.
    pub explored: u64,
}

impl SolveResult {
    pub fn to_json(&self) -> String {
        crate::model::to_json(self)
    }
}

/// Score of the pinned partial assignment extended by `partial`, counting
/// only constraints whose components are all placed. No feasible completion
/// scores higher; a negative value means no completion is feasible.
pub fn bound(req: &SolveRequest<'_>, partial: &DeploymentMapping) -> Result<i64, SolveError> {
    let (problem, mut assignment) = prepare(req)?;
    for (c, e) in problem.partial_assignment_of(partial)?.into_iter().enumerate() {
        if e.is_some() {
            assignment[c] = e;
        }
    }
    Ok(problem.score(&assignment))
}

/// Indexes the instance and places the pinned components.
fn prepare<'a>(req: &SolveRequest<'a>) -> Result<(Problem<'a>, Vec<Option<usize>>), SolveError> {
    let problem = Problem::new(req.hw, req.sw, req.weights);
    let pins = problem.partial_assignment_of(&req.pins)?;
    Ok((problem, pins))
}

fn finish(problem: &Problem<'_>, best: Option<(i64, Vec<Option<usize>>)>, explored: u64) -> SolveResult {
    match best {
        Some((score, assignment)) => SolveResult {
            feasible: true,
            score,
            mapping: Some(problem.mapping_of(&assignment)),
            explored,
        },
        None => SolveResult {
            feasible: false,
            score: NO_SOLUTION_SCORE,
            mapping: None,
            explored,
        },
    }
}

fn unpinned(assignment: &Assignment) -> Vec<usize> {
    (0..assignment.len())
        .filter(|&c| assignment[c].is_none())
        .collect()
}
