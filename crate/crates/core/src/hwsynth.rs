//! Hardware synthesis: propose devices and a deployment for a software model.
//!
//! Devices are instantiated from a priced [`DeviceCatalog`] by a greedy
//! first-fit-decreasing rule and wired as a star around one gateway hub.
//! The result is checked with [`evaluate`] before it is returned.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::evaluation::{evaluate, ScoreWeights, Violation};
use crate::model::{
    self, from_json, non_negative, number, to_json, Capacity, DeploymentMapping, EcuNode,
    HardwareModel, Integrity, ModelError, NetLink, SoftwareModel, SwComponent, Tier,
};

/// A purchasable device type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceTemplate {
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
    #[serde(deserialize_with = "non_negative", serialize_with = "number::serialize")]
    pub cost: f64,
    #[serde(default)]
    pub gateway_capable: bool,
}

impl DeviceTemplate {
    /// Whether a fresh instance could host `c`.
    pub fn can_host(&self, c: &SwComponent) -> bool {
        c.requires.is_subset(&self.capabilities)
            && c.criticality <= self.integrity
            && self.ram_mb.admits(c.ram_mb)
            && self.cpu_units.admits(c.cpu_units)
    }
}

/// Attributes given to every synthesized link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkDefaults {
    #[serde(default = "unlimited")]
    pub bandwidth_kbps: Capacity,
    #[serde(default, deserialize_with = "non_negative", serialize_with = "number::serialize")]
    pub latency_ms: f64,
}

impl Default for LinkDefaults {
    fn default() -> Self {
        Self {
            bandwidth_kbps: Capacity::Unlimited,
            latency_ms: 0.0,
        }
    }
}

fn unlimited() -> Capacity {
    Capacity::Unlimited
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeviceCatalog {
    templates: Vec<DeviceTemplate>,
    link_defaults: LinkDefaults,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CatalogDoc {
    templates: Vec<DeviceTemplate>,
    #[serde(default)]
    link_defaults: LinkDefaults,
}

impl DeviceCatalog {
    pub fn new(templates: Vec<DeviceTemplate>, link_defaults: LinkDefaults) -> Result<Self, ModelError> {
        if templates.is_empty() {
            return Err(ModelError::EmptyCatalog);
        }
        let mut ids = HashSet::new();
        for t in &templates {
            if t.id.is_empty() {
                return Err(invalid("template", "id", "must be nonempty"));
            }
            if !ids.insert(t.id.as_str()) {
                return Err(ModelError::DuplicateId(t.id.clone()));
            }
            if !(t.cost.is_finite() && t.cost >= 0.0) {
                return Err(invalid(&t.id, "cost", "must be a finite non-negative number"));
            }
            for (field, cap) in [("ram_mb", t.ram_mb), ("cpu_units", t.cpu_units)] {
                if matches!(cap, Capacity::Finite(v) if !(v.is_finite() && v >= 0.0)) {
                    return Err(invalid(&t.id, field, "must be a finite non-negative number"));
                }
            }
            if t.capabilities.iter().any(String::is_empty) {
                return Err(invalid(&t.id, "capabilities", "names must be nonempty"));
            }
        }
        if !templates.iter().any(|t| t.gateway_capable) {
            return Err(ModelError::NoGatewayTemplate);
        }
        if matches!(link_defaults.bandwidth_kbps, Capacity::Finite(v) if !(v.is_finite() && v > 0.0))
        {
            return Err(invalid("link_defaults", "bandwidth_kbps", "must be positive"));
        }
        if !(link_defaults.latency_ms.is_finite() && link_defaults.latency_ms >= 0.0) {
            return Err(invalid("link_defaults", "latency_ms", "must be a finite non-negative number"));
        }
        Ok(Self {
            templates,
            link_defaults,
        })
    }

    pub fn templates(&self) -> &[DeviceTemplate] {
        &self.templates
    }

    pub fn link_defaults(&self) -> LinkDefaults {
        self.link_defaults
    }

    /// Cheapest template satisfying `pred`, ties broken by id.
    fn cheapest(&self, pred: impl Fn(&DeviceTemplate) -> bool) -> Option<usize> {
        self.templates
            .iter()
            .enumerate()
            .filter(|(_, t)| pred(t))
            .min_by(|(_, a), (_, b)| a.cost.total_cmp(&b.cost).then(a.id.cmp(&b.id)))
            .map(|(i, _)| i)
    }

    fn hub(&self) -> usize {
        self.cheapest(|t| t.gateway_capable)
            .expect("validated catalogs have a gateway template")
    }
}

fn invalid(element: &str, field: &str, reason: &str) -> ModelError {
    ModelError::InvalidAttribute {
        element: element.to_string(),
        field: field.to_string(),
        reason: reason.to_string(),
    }
}

pub fn parse_catalog(text: &str) -> Result<DeviceCatalog, ModelError> {
    let doc: CatalogDoc = from_json(text)?;
    DeviceCatalog::new(doc.templates, doc.link_defaults)
}

pub fn serialize_catalog(catalog: &DeviceCatalog) -> String {
    to_json(&CatalogDoc {
        templates: catalog.templates.clone(),
        link_defaults: catalog.link_defaults,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisResult {
    pub hw: HardwareModel,
    pub mapping: DeploymentMapping,
    pub total_cost: f64,
}

impl SynthesisResult {
    /// `{"total_cost":..,"hardware":{..},"mapping":{..}}`
    pub fn to_json(&self) -> String {
        let hardware: serde_json::Value =
            serde_json::from_str(&model::serialize_hardware(&self.hw)).expect("valid json");
        to_json(&serde_json::json!({
            "total_cost": self.total_cost,
            "hardware": hardware,
            "mapping": self.mapping,
        }))
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SynthError {
    #[error("no catalog template can host component `{0}`")]
    NoCompatibleTemplate(String),
    #[error("synthesized hardware is infeasible: {}", join(.0))]
    InfeasibleSynthesis(Vec<Violation>),
}

impl SynthError {
    pub fn kind(&self) -> &'static str {
        match self {
            SynthError::NoCompatibleTemplate(_) => "NoCompatibleTemplate",
            SynthError::InfeasibleSynthesis(_) => "InfeasibleSynthesis",
        }
    }
}

fn join(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(Violation::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

struct Instance {
    id: String,
    template: usize,
    ram: f64,
    cpu: f64,
}

impl Instance {
    fn fits(&self, t: &DeviceTemplate, c: &SwComponent) -> bool {
        c.requires.is_subset(&t.capabilities)
            && c.criticality <= t.integrity
            && t.ram_mb.admits(self.ram + c.ram_mb)
            && t.cpu_units.admits(self.cpu + c.cpu_units)
    }
}

/// Proposes a star-shaped hardware model and a feasible deployment.
///
/// The cheapest gateway-capable template becomes the hub. Components are
/// placed largest first (`ram_mb + cpu_units`, ties by id) into the first
/// open instance with room, otherwise into a new instance of the cheapest
/// template that can host them. Instance ids are `<template>-<n>`.
pub fn suggest_hardware(
    sw: &SoftwareModel,
    catalog: &DeviceCatalog,
) -> Result<SynthesisResult, SynthError> {
    let templates = &catalog.templates;
    let mut counts = vec![0usize; templates.len()];
    let mut open = |t: usize, instances: &mut Vec<Instance>| {
        counts[t] += 1;
        instances.push(Instance {
            id: format!("{}-{}", templates[t].id, counts[t]),
            template: t,
            ram: 0.0,
            cpu: 0.0,
        });
        instances.len() - 1
    };

    let mut instances = Vec::new();
    open(catalog.hub(), &mut instances);

    let mut order: Vec<&SwComponent> = sw.components().iter().collect();
    order.sort_by(|a, b| {
        (b.ram_mb + b.cpu_units)
            .total_cmp(&(a.ram_mb + a.cpu_units))
            .then(a.id.cmp(&b.id))
    });

    let mut mapping = DeploymentMapping::new();
    for c in order {
        let slot = match instances
            .iter()
            .position(|inst| inst.fits(&templates[inst.template], c))
        {
            Some(i) => i,
            None => {
                let t = catalog
                    .cheapest(|t| t.can_host(c))
                    .ok_or_else(|| SynthError::NoCompatibleTemplate(c.id.clone()))?;
                open(t, &mut instances)
            }
        };
        let inst = &mut instances[slot];
        inst.ram += c.ram_mb;
        inst.cpu += c.cpu_units;
        mapping.assign(c.id.clone(), inst.id.clone());
    }

    let ecus = instances
        .iter()
        .map(|inst| {
            let t = &templates[inst.template];
            EcuNode {
                id: inst.id.clone(),
                tier: t.tier,
                ram_mb: t.ram_mb,
                cpu_units: t.cpu_units,
                capabilities: t.capabilities.clone(),
                integrity: t.integrity,
            }
        })
        .collect();
    let defaults = catalog.link_defaults;
    let hub = &instances[0].id;
    let links = instances[1..]
        .iter()
        .flat_map(|inst| [(hub, &inst.id), (&inst.id, hub)])
        .map(|(from, to)| {
            NetLink::new(from.as_str(), to.as_str())
                .with_bandwidth(defaults.bandwidth_kbps)
                .with_latency(defaults.latency_ms)
        })
        .collect();
    let hw = HardwareModel::new(ecus, links).expect("synthesized topology is well formed");

    let result = evaluate(&hw, sw, &mapping, ScoreWeights::default())
        .expect("synthesized mapping is total");
    if !result.feasible {
        return Err(SynthError::InfeasibleSynthesis(result.violations));
    }
    let total_cost = instances.iter().map(|i| templates[i.template].cost).sum();
    Ok(SynthesisResult {
        hw,
        mapping,
        total_cost,
    })
}

/// Cost of the hub plus one dedicated cheapest compatible instance per
/// component; `None` if some component has no compatible template.
pub fn naive_cost(sw: &SoftwareModel, catalog: &DeviceCatalog) -> Option<f64> {
    let hub = catalog.templates[catalog.hub()].cost;
    sw.components().iter().try_fold(hub, |acc, c| {
        catalog
            .cheapest(|t| t.can_host(c))
            .map(|t| acc + catalog.templates[t].cost)
    })
}
