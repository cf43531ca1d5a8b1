//! `autopart` command-line front end.
//!
//! Exit codes: 0 success (valid / feasible), 2 no feasible answer
//! (infeasible mapping, no solution, synthesis failure), 1 any other error.
//! With `--json` every outcome, errors included, is printed to stdout as a
//! single JSON document.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::evaluation::{evaluate, EvalError, EvaluationResult, ScoreWeights};
use crate::hwsynth::{parse_catalog, suggest_hardware, SynthError, SynthesisResult};
use crate::model::{
    parse_hardware, parse_mapping, parse_software, serialize_hardware, serialize_mapping,
    DeploymentMapping, HardwareModel, ModelError, SoftwareModel,
};
use crate::solvers::{
    solve_branch_and_bound, solve_exhaustive, solve_local_search, SolveError, SolveRequest,
    SolveResult, SolverParams,
};

/// Environment variable overriding the exhaustive solver's size cap.
pub const EXHAUSTIVE_CAP_VAR: &str = "AUTOPART_EXHAUSTIVE_CAP";

pub const EXIT_OK: u8 = 0;
pub const EXIT_ERROR: u8 = 1;
pub const EXIT_INFEASIBLE: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "autopart", version, about = "Validate, evaluate and optimize software-to-ECU deployments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check that model documents are well formed.
    Validate {
        /// Hardware model document.
        hw: PathBuf,
        /// Software model document.
        #[arg(long)]
        sw: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Score a deployment mapping.
    Evaluate {
        hw: PathBuf,
        sw: PathBuf,
        mapping: PathBuf,
        /// w_mem,w_cpu,w_bw,w_lat; must sum to 1.
        #[arg(long, value_parser = parse_weights)]
        weights: Option<ScoreWeights>,
        #[arg(long)]
        json: bool,
    },
    /// Search for the best deployment mapping.
    Solve {
        hw: PathBuf,
        sw: PathBuf,
        #[arg(long, value_enum, default_value_t = SolverKind::Bnb)]
        solver: SolverKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Mapping document fixing some components in place.
        #[arg(long)]
        pins: Option<PathBuf>,
        #[arg(long, value_parser = parse_weights)]
        weights: Option<ScoreWeights>,
        #[arg(long, default_value_t = 10)]
        restarts: usize,
        #[arg(long, default_value_t = 1000)]
        max_iters: usize,
        #[arg(long)]
        json: bool,
    },
    /// Propose hardware and a deployment from a device catalog.
    SuggestHw {
        sw: PathBuf,
        catalog: PathBuf,
        #[arg(long)]
        json: bool,
        /// Directory receiving hw.json and mapping.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SolverKind {
    Exhaustive,
    Bnb,
    Local,
}

fn parse_weights(s: &str) -> Result<ScoreWeights, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("`{p}`: {e}")))
        .collect::<Result<_, _>>()?;
    let [m, c, b, l] = parts[..] else {
        return Err(format!("expected 4 comma-separated weights, got {}", parts.len()));
    };
    ScoreWeights::new(m, c, b, l).map_err(|e| e.to_string())
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Model { path: PathBuf, source: ModelError },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Io { .. } => "IoError",
            CliError::Model { source, .. } => source.kind(),
            CliError::Eval(e) => e.kind(),
            CliError::Solve(e) => e.kind(),
            CliError::Synth(e) => e.kind(),
            CliError::Usage(_) => "UsageError",
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Synth(_) => EXIT_INFEASIBLE,
            _ => EXIT_ERROR,
        }
    }

    fn to_json(&self) -> serde_json::Value {
        let mut err = json!({ "kind": self.kind(), "message": self.to_string() });
        match self {
            CliError::Io { path, .. } | CliError::Model { path, .. } => {
                err["path"] = json!(path.display().to_string());
            }
            CliError::Synth(SynthError::InfeasibleSynthesis(v)) => {
                err["violations"] = json!(v);
            }
            _ => {}
        }
        json!({ "error": err })
    }
}

/// Runs one invocation and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let json = args.iter().any(|a| a == "--json");
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return EXIT_OK;
            }
            return report(&CliError::Usage(e.to_string().trim_end().to_string()), json, out, err);
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => report(&e, json, out, err),
    }
}

fn report(e: &CliError, json: bool, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    if json {
        let _ = writeln!(out, "{}", e.to_json());
    } else {
        let _ = writeln!(err, "error: {e}");
    }
    e.exit_code()
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<u8, CliError> {
    match command {
        Command::Validate { hw, sw, json } => cmd_validate(&hw, sw.as_deref(), json, out),
        Command::Evaluate {
            hw,
            sw,
            mapping,
            weights,
            json,
        } => {
            let hw = load(&hw, parse_hardware)?;
            let sw = load(&sw, parse_software)?;
            let mapping = load(&mapping, parse_mapping)?;
            let result = evaluate(&hw, &sw, &mapping, weights.unwrap_or_default())?;
            print_evaluation(&result, json, out);
            Ok(if result.feasible { EXIT_OK } else { EXIT_INFEASIBLE })
        }
        Command::Solve {
            hw,
            sw,
            solver,
            seed,
            pins,
            weights,
            restarts,
            max_iters,
            json,
        } => {
            let hw = load(&hw, parse_hardware)?;
            let sw = load(&sw, parse_software)?;
            let pins = match pins {
                Some(p) => load(&p, parse_mapping)?,
                None => DeploymentMapping::new(),
            };
            let params = SolverParams {
                seed,
                restarts,
                max_iters,
                exhaustive_cap: exhaustive_cap()?,
            };
            let req = SolveRequest::new(&hw, &sw)
                .with_pins(pins)
                .with_weights(weights.unwrap_or_default())
                .with_params(params);
            let result = match solver {
                SolverKind::Exhaustive => solve_exhaustive(&req),
                SolverKind::Bnb => solve_branch_and_bound(&req),
                SolverKind::Local => solve_local_search(&req),
            }?;
            print_solve(&result, json, out);
            Ok(if result.feasible { EXIT_OK } else { EXIT_INFEASIBLE })
        }
        Command::SuggestHw {
            sw,
            catalog,
            json,
            out: dir,
        } => {
            let sw = load(&sw, parse_software)?;
            let catalog = load(&catalog, parse_catalog)?;
            let result = suggest_hardware(&sw, &catalog)?;
            if let Some(dir) = &dir {
                write_synthesis(dir, &result)?;
            }
            print_synthesis(&result, &sw, dir.as_deref(), json, out);
            Ok(EXIT_OK)
        }
    }
}

fn exhaustive_cap() -> Result<u64, CliError> {
    match std::env::var(EXHAUSTIVE_CAP_VAR) {
        Ok(v) => v.trim().parse().map_err(|_| {
            CliError::Usage(format!("{EXHAUSTIVE_CAP_VAR}: `{v}` is not a non-negative integer"))
        }),
        Err(_) => Ok(SolverParams::default().exhaustive_cap),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load<T>(path: &Path, parse: fn(&str) -> Result<T, ModelError>) -> Result<T, CliError> {
    parse(&read(path)?).map_err(|source| CliError::Model {
        path: path.to_path_buf(),
        source,
    })
}

fn cmd_validate(
    hw: &Path,
    sw: Option<&Path>,
    json: bool,
    out: &mut dyn Write,
) -> Result<u8, CliError> {
    let mut reports = vec![(hw, "hardware", load(hw, parse_hardware).map(|m| describe_hw(&m)))];
    if let Some(sw) = sw {
        reports.push((sw, "software", load(sw, parse_software).map(|m| describe_sw(&m))));
    }
    let valid = reports.iter().all(|(_, _, r)| r.is_ok());

    if json {
        let models: Vec<_> = reports
            .iter()
            .map(|(path, model, r)| {
                let mut v = json!({
                    "path": path.display().to_string(),
                    "model": model,
                    "valid": r.is_ok(),
                });
                if let Err(e) = r {
                    v["error"] = e.to_json()["error"].clone();
                }
                v
            })
            .collect();
        let _ = writeln!(out, "{}", json!({ "valid": valid, "models": models }));
    } else {
        for (path, model, r) in &reports {
            let _ = match r {
                Ok(summary) => writeln!(out, "{}: valid {model} model ({summary})", path.display()),
                Err(e) => writeln!(out, "{}: invalid {model} model: {} ({})", path.display(), e.kind(), strip_path(e)),
            };
        }
    }
    Ok(if valid { EXIT_OK } else { EXIT_ERROR })
}

fn strip_path(e: &CliError) -> String {
    match e {
        CliError::Io { source, .. } => source.to_string(),
        CliError::Model { source, .. } => source.to_string(),
        other => other.to_string(),
    }
}

fn describe_hw(hw: &HardwareModel) -> String {
    format!("{} ECUs, {} links", hw.ecus().len(), hw.links().len())
}

fn describe_sw(sw: &SoftwareModel) -> String {
    format!("{} components, {} edges", sw.components().len(), sw.edges().len())
}

fn fmt_latency(v: Option<f64>) -> String {
    v.map_or_else(|| "unrouted".to_string(), |l| format!("{l} ms"))
}

fn print_evaluation(r: &EvaluationResult, json: bool, out: &mut dyn Write) {
    if json {
        let _ = writeln!(out, "{}", r.to_json());
        return;
    }
    let verdict = if r.feasible { "feasible" } else { "infeasible" };
    let _ = writeln!(out, "score: {} ({verdict})", r.score);
    if r.violations.is_empty() {
        let _ = writeln!(out, "violations: none");
    } else {
        let _ = writeln!(out, "violations:");
        for v in &r.violations {
            let _ = writeln!(out, "  {v}");
        }
    }
    let u = &r.utilization;
    let _ = writeln!(out, "ECU usage:");
    for (id, e) in &u.ecu_utilization {
        let _ = writeln!(out, "  {id}: ram {} MB, cpu {} units", e.ram_mb, e.cpu_units);
    }
    if !u.link_utilization.is_empty() {
        let _ = writeln!(out, "link usage:");
        for (id, bw) in &u.link_utilization {
            let _ = writeln!(out, "  {id}: {bw} kbps");
        }
    }
    if !u.edge_latencies.is_empty() {
        let _ = writeln!(out, "edge latency:");
        for (id, lat) in &u.edge_latencies {
            let _ = writeln!(out, "  {id}: {}", fmt_latency(*lat));
        }
    }
}

fn print_mapping(m: &DeploymentMapping, out: &mut dyn Write) {
    for (c, e) in m.iter() {
        let _ = writeln!(out, "  {c} -> {e}");
    }
}

fn print_solve(r: &SolveResult, json: bool, out: &mut dyn Write) {
    if json {
        let _ = writeln!(out, "{}", r.to_json());
        return;
    }
    match &r.mapping {
        Some(m) => {
            let _ = writeln!(out, "score: {} (explored {})", r.score, r.explored);
            let _ = writeln!(out, "mapping:");
            print_mapping(m, out);
        }
        None => {
            let _ = writeln!(out, "no feasible mapping found (explored {})", r.explored);
        }
    }
}

fn write_synthesis(dir: &Path, r: &SynthesisResult) -> Result<(), CliError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| CliError::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io(dir))?;
    let hw = dir.join("hw.json");
    fs::write(&hw, serialize_hardware(&r.hw) + "\n").map_err(io(&hw))?;
    let mapping = dir.join("mapping.json");
    fs::write(&mapping, serialize_mapping(&r.mapping) + "\n").map_err(io(&mapping))?;
    Ok(())
}

fn print_synthesis(
    r: &SynthesisResult,
    sw: &SoftwareModel,
    dir: Option<&Path>,
    json: bool,
    out: &mut dyn Write,
) {
    if json {
        let _ = writeln!(out, "{}", r.to_json());
        return;
    }
    let score = evaluate(&r.hw, sw, &r.mapping, ScoreWeights::default())
        .map(|e| e.score)
        .unwrap_or_default();
    let _ = writeln!(out, "total cost: {} ({})", r.total_cost, describe_hw(&r.hw));
    let _ = writeln!(out, "score: {score}");
    let _ = writeln!(out, "devices:");
    for e in r.hw.ecus() {
        let _ = writeln!(out, "  {} ({:?}, ram {}, cpu {})", e.id, e.tier, e.ram_mb, e.cpu_units);
    }
    let _ = writeln!(out, "mapping:");
    print_mapping(&r.mapping, out);
    if let Some(dir) = dir {
        let _ = writeln!(out, "wrote {}", dir.display());
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_flag() {
        assert_eq!(parse_weights("0.25,0.25,0.25,0.25").unwrap(), ScoreWeights::default());
        assert!(parse_weights("1,0,0,0").is_ok());
        assert!(parse_weights("0.5,0.5,0.5,0.5").is_err());
        assert!(parse_weights("1,0,0").is_err());
        assert!(parse_weights("a,b,c,d").is_err());
    }

    #[test]
    fn usage_errors_exit_one() {
        let mut out = Vec::new();
        let mut err = Vec::new();
        assert_eq!(run(["autopart", "bogus"], &mut out, &mut err), EXIT_ERROR);
        assert_eq!(run(["autopart", "--help"], &mut out, &mut err), EXIT_OK);
    }

    #[test]
    fn usage_error_as_json() {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            ["autopart", "evaluate", "a", "b", "c", "--weights", "1,1,1,1", "--json"],
            &mut out,
            &mut err,
        );
        assert_eq!(code, EXIT_ERROR);
        let v: serde_json::Value = serde_json::from_slice(&out).unwrap();
        assert_eq!(v["error"]["kind"], "UsageError");
    }
}
