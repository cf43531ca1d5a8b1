//! Hardware and software twin models.
//!
//! A [`HardwareModel`] is a directed graph of computational devices joined by
//! network links; a [`SoftwareModel`] is a directed graph of atomic software
//! components joined by required communications. Both are validated on
//! construction and immutable afterwards.

mod json;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

pub use json::{
    parse_hardware, parse_mapping, parse_software, serialize_hardware, serialize_mapping,
    serialize_software,
};
pub(crate) use json::{from_json, non_negative, number, to_json};

/// Errors raised while building or parsing a model document.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema error at `{field}`: {reason}")]
    Schema { field: String, reason: String },
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("link {from}->{to} references undeclared ECU `{missing}`")]
    DanglingLinkEndpoint {
        from: String,
        to: String,
        missing: String,
    },
    #[error("link {0}->{0} connects an ECU to itself")]
    SelfLoopLink(String),
    #[error("more than one link {from}->{to}")]
    DuplicateLink { from: String, to: String },
    #[error("hardware model declares no ECUs")]
    EmptyEcuSet,
    #[error("edge {from}->{to} references undeclared component `{missing}`")]
    DanglingEdgeEndpoint {
        from: String,
        to: String,
        missing: String,
    },
    #[error("edge {0}->{0} connects a component to itself")]
    SelfLoopEdge(String),
    #[error("more than one edge {from}->{to}")]
    DuplicateEdge { from: String, to: String },
    #[error("invalid `{field}` on `{element}`: {reason}")]
    InvalidAttribute {
        element: String,
        field: String,
        reason: String,
    },
    #[error("device catalog has no templates")]
    EmptyCatalog,
    #[error("device catalog has no gateway-capable template")]
    NoGatewayTemplate,
}

impl ModelError {
    /// Stable variant name, used in machine-readable diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            ModelError::Syntax { .. } => "SyntaxError",
            ModelError::Schema { .. } => "SchemaError",
            ModelError::DuplicateId(_) => "DuplicateId",
            ModelError::DanglingLinkEndpoint { .. } => "DanglingLinkEndpoint",
            ModelError::SelfLoopLink(_) => "SelfLoopLink",
            ModelError::DuplicateLink { .. } => "DuplicateLink",
            ModelError::EmptyEcuSet => "EmptyEcuSet",
            ModelError::DanglingEdgeEndpoint { .. } => "DanglingEdgeEndpoint",
            ModelError::SelfLoopEdge(_) => "SelfLoopEdge",
            ModelError::DuplicateEdge { .. } => "DuplicateEdge",
            ModelError::InvalidAttribute { .. } => "InvalidAttribute",
            ModelError::EmptyCatalog => "EmptyCatalog",
            ModelError::NoGatewayTemplate => "NoGatewayTemplate",
        }
    }
}

/// A resource capacity: a non-negative amount, or no limit at all.
///
/// Serialized as a JSON number, or as the string `"infinity"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Capacity {
    Finite(f64),
    Unlimited,
}

impl Capacity {
    pub fn finite(self) -> Option<f64> {
        match self {
            Capacity::Finite(v) => Some(v),
            Capacity::Unlimited => None,
        }
    }

    /// Whether `demand` fits. Unlimited capacity never overflows.
    pub fn admits(self, demand: f64) -> bool {
        match self {
            Capacity::Finite(cap) => demand <= cap,
            Capacity::Unlimited => true,
        }
    }
}

impl fmt::Display for Capacity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Capacity::Finite(v) => write!(f, "{v}"),
            Capacity::Unlimited => f.write_str("infinity"),
        }
    }
}

/// Upper bound on the end-to-end latency of a software edge.
///
/// Serialized as a JSON number, or as the string `"unbounded"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LatencyBound {
    Finite(f64),
    Unbounded,
}

impl LatencyBound {
    pub fn finite(self) -> Option<f64> {
        match self {
            LatencyBound::Finite(v) => Some(v),
            LatencyBound::Unbounded => None,
        }
    }
}

/// Device class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    Microcontroller,
    Embedded,
    Cloud,
}

/// Safety integrity level, ordered `QM < A < B < C < D`.
///
/// Used both as the criticality of a component and as the integrity rating
/// of a device; a component may only run on a device rated at least as high.
#[derive(
    Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum Integrity {
    #[default]
    QM,
    A,
    B,
    C,
    D,
}

impl fmt::Display for Integrity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Integrity::QM => "QM",
            Integrity::A => "A",
            Integrity::B => "B",
            Integrity::C => "C",
            Integrity::D => "D",
        };
        f.write_str(s)
    }
}

/// A computational device: microcontroller, embedded computer or cloud service.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EcuNode {
    pub id: String,
    pub tier: Tier,
    #[serde(default = "unlimited")]
    pub ram_mb: Capacity,
    #[serde(default = "unlimited")]
    pub cpu_units: Capacity,
    #[serde(default)]
    pub capabilities: BTreeSet<String>,
    #[serde(default)]
    pub integrity: Integrity,
}

impl EcuNode {
    /// An unconstrained device of the given tier: unlimited resources, no
    /// capabilities, integrity QM.
    pub fn new(id: impl Into<String>, tier: Tier) -> Self {
        Self {
            id: id.into(),
            tier,
            ram_mb: Capacity::Unlimited,
            cpu_units: Capacity::Unlimited,
            capabilities: BTreeSet::new(),
            integrity: Integrity::QM,
        }
    }

    pub fn with_ram(mut self, ram_mb: Capacity) -> Self {
        self.ram_mb = ram_mb;
        self
    }

    pub fn with_cpu(mut self, cpu_units: Capacity) -> Self {
        self.cpu_units = cpu_units;
        self
    }

    pub fn with_capability(mut self, cap: impl Into<String>) -> Self {
        self.capabilities.insert(cap.into());
        self
    }

    pub fn with_integrity(mut self, integrity: Integrity) -> Self {
        self.integrity = integrity;
        self
    }
}

/// A directed network link between two devices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetLink {
    pub from: String,
    pub to: String,
    #[serde(default = "unlimited")]
    pub bandwidth_kbps: Capacity,
    #[serde(default, deserialize_with = "non_negative", serialize_with = "number::serialize")]
    pub latency_ms: f64,
}

impl NetLink {
    pub fn new(from: impl Into<String>, to: impl Into<String>) -> Self {
        Self {
            from: from.into(),
            to: to.into(),
            bandwidth_kbps: Capacity::Unlimited,
            latency_ms: 0.0,
        }
    }

    pub fn with_bandwidth(mut self, bandwidth_kbps: Capacity) -> Self {
        self.bandwidth_kbps = bandwidth_kbps;
        self
    }

    pub fn with_latency(mut self, latency_ms: f64) -> Self {
        self.latency_ms = latency_ms;
        self
    }

    /// `from->to`, the name used for this link in reports.
    pub fn label(&self) -> String {
        format!("{}->{}", self.from, self.to)
    }
}

/// An atomic software component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SwComponent {
    pub id: String,
    #[serde(default, deserialize_with = "non_negative", serialize_with = "number::serialize")]
    pub ram_mb: f64,
    #[serde(default, deserialize_with = "non_negative", serialize_with = "number::serialize")]
    pub cpu_units: f64,
    #[serde(default)]
    pub requires: BTreeSet<String>,
    #[serde(default)]
    pub criticality: Integrity,
}

impl SwComponent {
    pub fn new(id: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            ram_mb: 0.0,
            cpu_units: 0.0,
            requires: BTreeSet::new(),
            criticality: Integrity::QM,
        }
    }

    pub fn with_ram(mut self, ram_mb: f64) -> Self {
        self.ram_mb = ram_mb;
        self
    }

    pub fn with_cpu(mut self, cpu_units: f64) -> Self {
        self.cpu_units = cpu_units;
        self
    }

    pub fn requiring(mut self, cap: impl Into<String>) -> Self {
        self.requires.insert(cap.into());
        self
    }

    pub fn with_criticality(mut self, criticality: Integrity) -> Self {
        self.criticality = criticality;
        self
    }
}

/// A required communication between two components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SwEdge {
    pub from: String,
    pub to: String,
    #[serde(default, deserialize_with = "non_negative", serialize_with = "number::serialize")]
    pub bandwidth_kbps: f64,
    #[serde(default = "unbounded")]
    pub max_latency_ms: LatencyBound,
}

impl SwEdge {
    pub fn new(from: impl Into<String>, to: impl Into<String>) -> Self {
        Self {
            from: from.into(),
            to: to.into(),
            bandwidth_kbps: 0.0,
            max_latency_ms: LatencyBound::Unbounded,
        }
    }

    pub fn with_bandwidth(mut self, bandwidth_kbps: f64) -> Self {
        self.bandwidth_kbps = bandwidth_kbps;
        self
    }

    pub fn with_max_latency(mut self, max_latency_ms: LatencyBound) -> Self {
        self.max_latency_ms = max_latency_ms;
        self
    }

    pub fn label(&self) -> String {
        format!("{}->{}", self.from, self.to)
    }
}

fn unlimited() -> Capacity {
    Capacity::Unlimited
}

fn unbounded() -> LatencyBound {
    LatencyBound::Unbounded
}

/// Devices and the links between them.
#[derive(Debug, Clone, PartialEq)]
pub struct HardwareModel {
    ecus: Vec<EcuNode>,
    links: Vec<NetLink>,
}

impl HardwareModel {
    /// Validates and assembles a hardware model. Document order is kept.
    pub fn new(ecus: Vec<EcuNode>, links: Vec<NetLink>) -> Result<Self, ModelError> {
        if ecus.is_empty() {
            return Err(ModelError::EmptyEcuSet);
        }
        let mut ids = HashSet::new();
        for ecu in &ecus {
            check_id(&ecu.id, "ecu")?;
            if !ids.insert(ecu.id.as_str()) {
                return Err(ModelError::DuplicateId(ecu.id.clone()));
            }
            check_capacity(&ecu.id, "ram_mb", ecu.ram_mb)?;
            check_capacity(&ecu.id, "cpu_units", ecu.cpu_units)?;
            check_names(&ecu.id, "capabilities", &ecu.capabilities)?;
        }
        let mut pairs = HashSet::new();
        for link in &links {
            for end in [&link.from, &link.to] {
                if !ids.contains(end.as_str()) {
                    return Err(ModelError::DanglingLinkEndpoint {
                        from: link.from.clone(),
                        to: link.to.clone(),
                        missing: end.clone(),
                    });
                }
            }
            if link.from == link.to {
                return Err(ModelError::SelfLoopLink(link.from.clone()));
            }
            if !pairs.insert((link.from.as_str(), link.to.as_str())) {
                return Err(ModelError::DuplicateLink {
                    from: link.from.clone(),
                    to: link.to.clone(),
                });
            }
            match link.bandwidth_kbps {
                Capacity::Finite(bw) if !(bw.is_finite() && bw > 0.0) => {
                    return Err(invalid(link.label(), "bandwidth_kbps", "must be positive"));
                }
                _ => {}
            }
            check_non_negative(&link.label(), "latency_ms", link.latency_ms)?;
        }
        Ok(Self { ecus, links })
    }

    pub fn ecus(&self) -> &[EcuNode] {
        &self.ecus
    }

    pub fn links(&self) -> &[NetLink] {
        &self.links
    }

    pub fn ecu(&self, id: &str) -> Option<&EcuNode> {
        self.ecus.iter().find(|e| e.id == id)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.ecu(id).is_some()
    }
}

/// Components and the communication they require.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SoftwareModel {
    components: Vec<SwComponent>,
    edges: Vec<SwEdge>,
}

impl SoftwareModel {
    pub fn new(components: Vec<SwComponent>, edges: Vec<SwEdge>) -> Result<Self, ModelError> {
        let mut ids = HashSet::new();
        for c in &components {
            check_id(&c.id, "component")?;
            if !ids.insert(c.id.as_str()) {
                return Err(ModelError::DuplicateId(c.id.clone()));
            }
            check_non_negative(&c.id, "ram_mb", c.ram_mb)?;
            check_non_negative(&c.id, "cpu_units", c.cpu_units)?;
            check_names(&c.id, "requires", &c.requires)?;
        }
        let mut pairs = HashSet::new();
        for edge in &edges {
            for end in [&edge.from, &edge.to] {
                if !ids.contains(end.as_str()) {
                    return Err(ModelError::DanglingEdgeEndpoint {
                        from: edge.from.clone(),
                        to: edge.to.clone(),
                        missing: end.clone(),
                    });
                }
            }
            if edge.from == edge.to {
                return Err(ModelError::SelfLoopEdge(edge.from.clone()));
            }
            if !pairs.insert((edge.from.as_str(), edge.to.as_str())) {
                return Err(ModelError::DuplicateEdge {
                    from: edge.from.clone(),
                    to: edge.to.clone(),
                });
            }
            check_non_negative(&edge.label(), "bandwidth_kbps", edge.bandwidth_kbps)?;
            match edge.max_latency_ms {
                LatencyBound::Finite(v) if !(v.is_finite() && v > 0.0) => {
                    return Err(invalid(edge.label(), "max_latency_ms", "must be positive"));
                }
                _ => {}
            }
        }
        Ok(Self { components, edges })
    }

    pub fn components(&self) -> &[SwComponent] {
        &self.components
    }

    pub fn edges(&self) -> &[SwEdge] {
        &self.edges
    }

    pub fn component(&self, id: &str) -> Option<&SwComponent> {
        self.components.iter().find(|c| c.id == id)
    }
}

/// Assignment of software components to devices, keyed by component id.
///
/// Totality against a particular [`SoftwareModel`] is checked when the
/// mapping is evaluated, not when it is built or parsed.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DeploymentMapping(BTreeMap<String, String>);

impl DeploymentMapping {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn assign(&mut self, component: impl Into<String>, ecu: impl Into<String>) {
        self.0.insert(component.into(), ecu.into());
    }

    pub fn get(&self, component: &str) -> Option<&str> {
        self.0.get(component).map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(c, e)| (c.as_str(), e.as_str()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<C: Into<String>, E: Into<String>> FromIterator<(C, E)> for DeploymentMapping {
    fn from_iter<I: IntoIterator<Item = (C, E)>>(iter: I) -> Self {
        Self(
            iter.into_iter()
                .map(|(c, e)| (c.into(), e.into()))
                .collect(),
        )
    }
}

fn invalid(element: impl Into<String>, field: &str, reason: &str) -> ModelError {
    ModelError::InvalidAttribute {
        element: element.into(),
        field: field.to_string(),
        reason: reason.to_string(),
    }
}

fn check_id(id: &str, what: &str) -> Result<(), ModelError> {
    if id.is_empty() {
        return Err(invalid(what, "id", "must be nonempty"));
    }
    Ok(())
}

fn check_names(element: &str, field: &str, names: &BTreeSet<String>) -> Result<(), ModelError> {
    if names.iter().any(String::is_empty) {
        return Err(invalid(element, field, "names must be nonempty"));
    }
    Ok(())
}

fn check_non_negative(element: &str, field: &str, v: f64) -> Result<(), ModelError> {
    if !(v.is_finite() && v >= 0.0) {
        return Err(invalid(element, field, "must be a finite non-negative number"));
    }
    Ok(())
}

fn check_capacity(element: &str, field: &str, cap: Capacity) -> Result<(), ModelError> {
    match cap {
        Capacity::Finite(v) => check_non_negative(element, field, v),
        Capacity::Unlimited => Ok(()),
    }
}
