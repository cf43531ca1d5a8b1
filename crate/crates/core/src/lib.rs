//! Digital-twin models of automotive hardware and software, and search for
//! software-to-ECU deployments.
//!
//! - [`model`]: attributed graph models of devices/links and
//!   components/communications, with their JSON documents.
//! - [`evaluation`]: routing, hard-constraint checking and the integer
//!   quality score of a deployment.
//! - [`solvers`]: exhaustive, branch-and-bound and local-search deployment
//!   optimizers.
//! - [`hwsynth`]: proposing a device set and topology for a software model.
//! - [`cli`]: the `autopart` command-line front end.

pub mod cli;
pub mod evaluation;
pub mod fixtures;
pub mod hwsynth;
pub mod model;
pub mod solvers;

pub use evaluation::{
    check_feasibility, evaluate, route, utilization_report, EvalError, EvaluationResult,
    ScoreWeights, Violation, ViolationKind,
};
pub use hwsynth::{parse_catalog, suggest_hardware, DeviceCatalog, SynthError, SynthesisResult};
pub use model::{
    parse_hardware, parse_mapping, parse_software, DeploymentMapping, HardwareModel, ModelError,
    SoftwareModel,
};
pub use solvers::{
    solve_branch_and_bound, solve_exhaustive, solve_local_search, SolveError, SolveRequest,
    SolveResult,
};
