//! Feasibility checking and the solution-quality score.
//!
//! The score of a mapping is negative exactly when it violates a hard
//! constraint, in which case it equals minus the number of violations.
//! Feasible mappings score in `[0, 1000]`: a weighted sum of the bottleneck
//! headrooms for memory, compute, link bandwidth and edge latency.

mod routing;

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::model::{Capacity, DeploymentMapping, HardwareModel, SoftwareModel};

pub use routing::{route, Route};
pub(crate) use routing::RoutingTable;

/// Score of a mapping that uses no finite resource at all.
pub const MAX_SCORE: i64 = 1000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("component `{0}` has no assigned ECU")]
    IncompleteMapping(String),
    #[error("unknown id `{0}`")]
    UnknownId(String),
    #[error("no route from {from} to {to}")]
    NoRouteExists { from: String, to: String },
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
}

impl EvalError {
    pub fn kind(&self) -> &'static str {
        match self {
            EvalError::IncompleteMapping(_) => "IncompleteMapping",
            EvalError::UnknownId(_) => "UnknownId",
            EvalError::NoRouteExists { .. } => "NoRouteExists",
            EvalError::InvalidWeights(_) => "InvalidWeights",
        }
    }
}

/// Weights of the four headroom terms. Non-negative, summing to 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScoreWeights {
    pub w_mem: f64,
    pub w_cpu: f64,
    pub w_bw: f64,
    pub w_lat: f64,
}

impl ScoreWeights {
    pub const SUM_TOLERANCE: f64 = 1e-9;

    pub fn new(w_mem: f64, w_cpu: f64, w_bw: f64, w_lat: f64) -> Result<Self, EvalError> {
        let all = [w_mem, w_cpu, w_bw, w_lat];
        if all.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(EvalError::InvalidWeights(
                "weights must be finite and non-negative".into(),
            ));
        }
        let sum: f64 = all.iter().sum();
        if (sum - 1.0).abs() > Self::SUM_TOLERANCE {
            return Err(EvalError::InvalidWeights(format!(
                "weights sum to {sum}, expected 1"
            )));
        }
        Ok(Self {
            w_mem,
            w_cpu,
            w_bw,
            w_lat,
        })
    }
}

impl Default for ScoreWeights {
    fn default() -> Self {
        Self {
            w_mem: 0.25,
            w_cpu: 0.25,
            w_bw: 0.25,
            w_lat: 0.25,
        }
    }
}

/// Hard-constraint categories, in reporting order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ViolationKind {
    CapabilityMissing,
    RamOverflow,
    CpuOverflow,
    IntegrityViolation,
    NoRoute,
    BandwidthOverflow,
    LatencyExceeded,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// One violated hard constraint.
///
/// `subject` is a component id (capability, integrity), an ECU id (ram,
/// cpu), a link label (bandwidth) or a software edge label (route, latency).
/// Labels have the form `from->to`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub subject: String,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}: {}", self.kind, self.subject, self.detail)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct EcuUsage {
    pub ram_mb: f64,
    pub cpu_units: f64,
}

/// Per-ECU, per-link and per-edge usage of a mapping.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Utilization {
    pub ecu_utilization: BTreeMap<String, EcuUsage>,
    pub link_utilization: BTreeMap<String, f64>,
    /// Routed latency of each software edge; `None` when no route exists.
    pub edge_latencies: BTreeMap<String, Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationResult {
    pub score: i64,
    pub feasible: bool,
    pub violations: Vec<Violation>,
    #[serde(flatten)]
    pub utilization: Utilization,
}

impl EvaluationResult {
    pub fn to_json(&self) -> String {
        crate::model::to_json(self)
    }
}

/// Remaining fraction of `capacity` after `used` is consumed. `None` for
/// unlimited capacity. A zero capacity with zero use has full headroom.
pub fn headroom(used: f64, capacity: Capacity) -> Option<f64> {
    capacity.finite().map(|cap| ratio_headroom(used, cap))
}

fn ratio_headroom(used: f64, cap: f64) -> f64 {
    if used == 0.0 {
        1.0
    } else {
        1.0 - used / cap
    }
}

/// All hard-constraint violations of `mapping`, sorted by kind, subject and detail.
pub fn check_feasibility(
    hw: &HardwareModel,
    sw: &SoftwareModel,
    mapping: &DeploymentMapping,
) -> Result<Vec<Violation>, EvalError> {
    let problem = Problem::new(hw, sw, ScoreWeights::default());
    let assignment = problem.assignment_of(mapping)?;
    Ok(problem.assess_detailed(&assignment).0)
}

/// Scores `mapping`: `-(violation count)` when infeasible, otherwise the
/// weighted bottleneck headroom scaled to `[0, 1000]`.
pub fn evaluate(
    hw: &HardwareModel,
    sw: &SoftwareModel,
    mapping: &DeploymentMapping,
    weights: ScoreWeights,
) -> Result<EvaluationResult, EvalError> {
    let problem = Problem::new(hw, sw, weights);
    let assignment = problem.assignment_of(mapping)?;
    Ok(problem.evaluate(&assignment))
}

/// Resource usage of `mapping`, reported even when it overflows.
pub fn utilization_report(
    hw: &HardwareModel,
    sw: &SoftwareModel,
    mapping: &DeploymentMapping,
) -> Result<Utilization, EvalError> {
    let problem = Problem::new(hw, sw, ScoreWeights::default());
    let assignment = problem.assignment_of(mapping)?;
    Ok(problem.assess_detailed(&assignment).1)
}

/// Receives violations; lets the counting fast path skip building strings.
trait Sink {
    fn push(&mut self, kind: ViolationKind, v: impl FnOnce() -> (String, String));
}

#[derive(Default)]
struct Counter(usize);

impl Sink for Counter {
    fn push(&mut self, _: ViolationKind, _: impl FnOnce() -> (String, String)) {
        self.0 += 1;
    }
}

impl Sink for Vec<Violation> {
    fn push(&mut self, kind: ViolationKind, v: impl FnOnce() -> (String, String)) {
        let (subject, detail) = v();
        Vec::push(
            self,
            Violation {
                kind,
                subject,
                detail,
            },
        );
    }
}

struct CompiledEcu {
    ram: Capacity,
    cpu: Capacity,
    integrity: crate::model::Integrity,
}

struct CompiledComponent {
    ram: f64,
    cpu: f64,
    criticality: crate::model::Integrity,
}

struct CompiledEdge {
    from: usize,
    to: usize,
    bandwidth: f64,
    max_latency: Option<f64>,
}

/// A hardware/software pair indexed for repeated evaluation.
///
/// Components and ECUs are addressed by the rank of their id in sorted order.
/// An assignment is a slice with one entry per component; `None` marks a
/// component not yet placed. Constraints touching only placed components are
/// checked, and edges count only once both endpoints are placed, which makes
/// the score of a partial assignment an upper bound on every completion.
pub(crate) struct Problem<'a> {
    hw: &'a HardwareModel,
    sw: &'a SoftwareModel,
    weights: ScoreWeights,
    ecu_ids: Vec<&'a str>,
    component_ids: Vec<&'a str>,
    ecus: Vec<CompiledEcu>,
    components: Vec<CompiledComponent>,
    /// `missing[c][e]`: capabilities component `c` needs that ECU `e` lacks.
    missing: Vec<Vec<Vec<&'a str>>>,
    edges: Vec<CompiledEdge>,
    routes: RoutingTable,
}

pub(crate) type Assignment = [Option<usize>];

impl<'a> Problem<'a> {
    pub(crate) fn new(hw: &'a HardwareModel, sw: &'a SoftwareModel, weights: ScoreWeights) -> Self {
        let mut ecu_refs: Vec<_> = hw.ecus().iter().collect();
        ecu_refs.sort_by(|a, b| a.id.cmp(&b.id));
        let mut comp_refs: Vec<_> = sw.components().iter().collect();
        comp_refs.sort_by(|a, b| a.id.cmp(&b.id));

        let component_ids: Vec<&str> = comp_refs.iter().map(|c| c.id.as_str()).collect();
        let comp_rank = |id: &str| component_ids.binary_search(&id).unwrap();

        let missing = comp_refs
            .iter()
            .map(|c| {
                ecu_refs
                    .iter()
                    .map(|e| {
                        c.requires
                            .iter()
                            .filter(|cap| !e.capabilities.contains(*cap))
                            .map(String::as_str)
                            .collect()
                    })
                    .collect()
            })
            .collect();

        let edges = sw
            .edges()
            .iter()
            .map(|e| CompiledEdge {
                from: comp_rank(&e.from),
                to: comp_rank(&e.to),
                bandwidth: e.bandwidth_kbps,
                max_latency: e.max_latency_ms.finite(),
            })
            .collect();

        Self {
            hw,
            sw,
            weights,
            ecu_ids: ecu_refs.iter().map(|e| e.id.as_str()).collect(),
            ecus: ecu_refs
                .iter()
                .map(|e| CompiledEcu {
                    ram: e.ram_mb,
                    cpu: e.cpu_units,
                    integrity: e.integrity,
                })
                .collect(),
            components: comp_refs
                .iter()
                .map(|c| CompiledComponent {
                    ram: c.ram_mb,
                    cpu: c.cpu_units,
                    criticality: c.criticality,
                })
                .collect(),
            component_ids,
            missing,
            edges,
            routes: RoutingTable::new(hw),
        }
    }

    pub(crate) fn num_ecus(&self) -> usize {
        self.ecu_ids.len()
    }

    pub(crate) fn num_components(&self) -> usize {
        self.component_ids.len()
    }

    pub(crate) fn ecu_index(&self, id: &str) -> Option<usize> {
        self.ecu_ids.binary_search(&id).ok()
    }

    pub(crate) fn component_index(&self, id: &str) -> Option<usize> {
        self.component_ids.binary_search(&id).ok()
    }

    pub(crate) fn component_demand(&self, c: usize) -> f64 {
        self.components[c].ram + self.components[c].cpu
    }

    pub(crate) fn component_id(&self, c: usize) -> &'a str {
        self.component_ids[c]
    }

    /// Resolves a mapping that must be total over the software model.
    pub(crate) fn assignment_of(
        &self,
        mapping: &DeploymentMapping,
    ) -> Result<Vec<Option<usize>>, EvalError> {
        let partial = self.partial_assignment_of(mapping)?;
        if let Some(c) = partial.iter().position(Option::is_none) {
            return Err(EvalError::IncompleteMapping(self.component_ids[c].to_string()));
        }
        Ok(partial)
    }

    /// Resolves a mapping that may leave components unassigned.
    pub(crate) fn partial_assignment_of(
        &self,
        mapping: &DeploymentMapping,
    ) -> Result<Vec<Option<usize>>, EvalError> {
        let mut assignment = vec![None; self.num_components()];
        for (comp, ecu) in mapping.iter() {
            let c = self
                .component_index(comp)
                .ok_or_else(|| EvalError::UnknownId(comp.to_string()))?;
            let e = self
                .ecu_index(ecu)
                .ok_or_else(|| EvalError::UnknownId(ecu.to_string()))?;
            assignment[c] = Some(e);
        }
        Ok(assignment)
    }

    pub(crate) fn mapping_of(&self, assignment: &Assignment) -> DeploymentMapping {
        assignment
            .iter()
            .enumerate()
            .filter_map(|(c, e)| e.map(|e| (self.component_ids[c], self.ecu_ids[e])))
            .collect()
    }

    /// Score of a (possibly partial) assignment; negative violation count
    /// when any checkable constraint fails.
    pub(crate) fn score(&self, assignment: &Assignment) -> i64 {
        let mut counter = Counter::default();
        let usage = self.assess(assignment, &mut counter);
        if counter.0 > 0 {
            -(counter.0 as i64)
        } else {
            self.headroom_score(&usage)
        }
    }

    pub(crate) fn evaluate(&self, assignment: &Assignment) -> EvaluationResult {
        let mut violations = Vec::new();
        let usage = self.assess(assignment, &mut violations);
        violations.sort();
        let score = if violations.is_empty() {
            self.headroom_score(&usage)
        } else {
            -(violations.len() as i64)
        };
        EvaluationResult {
            score,
            feasible: violations.is_empty(),
            violations,
            utilization: self.report(&usage),
        }
    }

    fn assess_detailed(&self, assignment: &Assignment) -> (Vec<Violation>, Utilization) {
        let mut violations = Vec::new();
        let usage = self.assess(assignment, &mut violations);
        violations.sort();
        (violations, self.report(&usage))
    }

    fn assess(&self, assignment: &Assignment, sink: &mut impl Sink) -> Usage {
        let ne = self.num_ecus();
        let mut ram = vec![0.0; ne];
        let mut cpu = vec![0.0; ne];

        for (c, slot) in assignment.iter().enumerate() {
            let Some(e) = *slot else { continue };
            let comp = &self.components[c];
            for cap in &self.missing[c][e] {
                sink.push(ViolationKind::CapabilityMissing, || {
                    (self.component_ids[c].to_string(), cap.to_string())
                });
            }
            if comp.criticality > self.ecus[e].integrity {
                sink.push(ViolationKind::IntegrityViolation, || {
                    (
                        self.component_ids[c].to_string(),
                        format!(
                            "criticality {} exceeds integrity {} of {}",
                            comp.criticality, self.ecus[e].integrity, self.ecu_ids[e]
                        ),
                    )
                });
            }
            ram[e] += comp.ram;
            cpu[e] += comp.cpu;
        }

        for e in 0..ne {
            let ecu = &self.ecus[e];
            if !ecu.ram.admits(ram[e]) {
                sink.push(ViolationKind::RamOverflow, || {
                    (
                        self.ecu_ids[e].to_string(),
                        format!("used {} MB > capacity {} MB", ram[e], ecu.ram),
                    )
                });
            }
            if !ecu.cpu.admits(cpu[e]) {
                sink.push(ViolationKind::CpuOverflow, || {
                    (
                        self.ecu_ids[e].to_string(),
                        format!("used {} units > capacity {} units", cpu[e], ecu.cpu),
                    )
                });
            }
        }

        let links = self.hw.links();
        let mut bandwidth = vec![0.0; links.len()];
        let mut latencies = vec![None; self.edges.len()];
        for (i, edge) in self.edges.iter().enumerate() {
            let (Some(a), Some(b)) = (assignment[edge.from], assignment[edge.to]) else {
                continue;
            };
            let latency = if a == b {
                0.0
            } else {
                match self.routes.get(a, b) {
                    Some(route) => {
                        for &hop in &route.hops {
                            bandwidth[hop] += edge.bandwidth;
                        }
                        route.total_latency_ms
                    }
                    None => {
                        sink.push(ViolationKind::NoRoute, || {
                            (
                                self.edge_label(i),
                                format!("no path from {} to {}", self.ecu_ids[a], self.ecu_ids[b]),
                            )
                        });
                        continue;
                    }
                }
            };
            if let Some(bound) = edge.max_latency {
                if latency > bound {
                    sink.push(ViolationKind::LatencyExceeded, || {
                        (
                            self.edge_label(i),
                            format!("routed {latency} ms > bound {bound} ms"),
                        )
                    });
                }
            }
            latencies[i] = Some(latency);
        }

        for (li, link) in links.iter().enumerate() {
            if !link.bandwidth_kbps.admits(bandwidth[li]) {
                sink.push(ViolationKind::BandwidthOverflow, || {
                    (
                        link.label(),
                        format!(
                            "used {} kbps > capacity {} kbps",
                            bandwidth[li], link.bandwidth_kbps
                        ),
                    )
                });
            }
        }

        Usage {
            ram,
            cpu,
            bandwidth,
            latencies,
        }
    }

    fn edge_label(&self, i: usize) -> String {
        self.sw.edges()[i].label()
    }

    fn headroom_score(&self, usage: &Usage) -> i64 {
        let bottleneck = |terms: &mut dyn Iterator<Item = f64>| terms.fold(1.0_f64, f64::min);

        let t_mem = bottleneck(
            &mut (0..self.num_ecus())
                .filter_map(|e| self.ecus[e].ram.finite().map(|c| ratio_headroom(usage.ram[e], c))),
        );
        let t_cpu = bottleneck(
            &mut (0..self.num_ecus())
                .filter_map(|e| self.ecus[e].cpu.finite().map(|c| ratio_headroom(usage.cpu[e], c))),
        );
        let t_bw = bottleneck(&mut self.hw.links().iter().enumerate().filter_map(|(i, l)| {
            l.bandwidth_kbps
                .finite()
                .map(|c| ratio_headroom(usage.bandwidth[i], c))
        }));
        let t_lat = bottleneck(&mut self.edges.iter().enumerate().filter_map(|(i, e)| {
            match (e.max_latency, usage.latencies[i]) {
                (Some(bound), Some(lat)) => Some(1.0 - lat / bound),
                _ => None,
            }
        }));

        let w = &self.weights;
        let total = w.w_mem * t_mem + w.w_cpu * t_cpu + w.w_bw * t_bw + w.w_lat * t_lat;
        (MAX_SCORE as f64 * total).round() as i64
    }

    fn report(&self, usage: &Usage) -> Utilization {
        let ecu_utilization = (0..self.num_ecus())
            .map(|e| {
                (
                    self.ecu_ids[e].to_string(),
                    EcuUsage {
                        ram_mb: usage.ram[e],
                        cpu_units: usage.cpu[e],
                    },
                )
            })
            .collect();
        let link_utilization = self
            .hw
            .links()
            .iter()
            .zip(&usage.bandwidth)
            .map(|(l, bw)| (l.label(), *bw))
            .collect();
        let edge_latencies = self
            .sw
            .edges()
            .iter()
            .zip(&usage.latencies)
            .map(|(e, lat)| (e.label(), *lat))
            .collect();
        Utilization {
            ecu_utilization,
            link_utilization,
            edge_latencies,
        }
    }
}

struct Usage {
    ram: Vec<f64>,
    cpu: Vec<f64>,
    bandwidth: Vec<f64>,
    latencies: Vec<Option<f64>>,
}
