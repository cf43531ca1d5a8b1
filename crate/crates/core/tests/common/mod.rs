//! Random instance generation and a from-scratch reference evaluator shared
//! by the integration suites.

#![allow(dead_code)]

use std::collections::BTreeSet;

use autopart::hwsynth::{DeviceCatalog, DeviceTemplate, LinkDefaults};
use autopart::model::{
    Capacity, DeploymentMapping, EcuNode, HardwareModel, Integrity, LatencyBound, NetLink,
    SoftwareModel, SwComponent, SwEdge, Tier,
};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const ECU_IDS: [&str; 5] = ["C1", "C2", "Cloud", "GW", "Z"];
const CAPS: [&str; 3] = ["Act", "Lidar", "Sen"];
const LEVELS: [Integrity; 5] = [
    Integrity::QM,
    Integrity::A,
    Integrity::B,
    Integrity::C,
    Integrity::D,
];
const TIERS: [Tier; 3] = [Tier::Microcontroller, Tier::Embedded, Tier::Cloud];

fn int(rng: &mut ChaCha8Rng, lo: u32, hi: u32) -> f64 {
    rng.gen_range(lo..=hi) as f64
}

fn capacity(rng: &mut ChaCha8Rng, p_unlimited: f64, lo: u32, hi: u32) -> Capacity {
    if rng.gen_bool(p_unlimited) {
        Capacity::Unlimited
    } else {
        Capacity::Finite(int(rng, lo, hi))
    }
}

fn caps(rng: &mut ChaCha8Rng, p: f64) -> BTreeSet<String> {
    CAPS.iter()
        .filter(|_| rng.gen_bool(p))
        .map(|c| c.to_string())
        .collect()
}

fn level(rng: &mut ChaCha8Rng, p_qm: f64) -> Integrity {
    if rng.gen_bool(p_qm) {
        Integrity::QM
    } else {
        *LEVELS.choose(rng).unwrap()
    }
}

/// Shape limits for [`random_instance`].
#[derive(Clone, Copy)]
pub struct Shape {
    pub max_ecus: usize,
    pub max_components: usize,
}

impl Shape {
    pub const SMALL: Shape = Shape {
        max_ecus: 4,
        max_components: 6,
    };
}

pub fn random_hardware(rng: &mut ChaCha8Rng, max_ecus: usize) -> HardwareModel {
    let n = rng.gen_range(1..=max_ecus);
    let mut ids: Vec<&str> = ECU_IDS.to_vec();
    ids.shuffle(rng);
    ids.truncate(n);
    let ecus = ids
        .iter()
        .map(|id| EcuNode {
            id: id.to_string(),
            tier: *TIERS.choose(rng).unwrap(),
            ram_mb: capacity(rng, 0.3, 0, 12),
            cpu_units: capacity(rng, 0.4, 0, 12),
            capabilities: caps(rng, 0.35),
            integrity: level(rng, 0.3),
        })
        .collect();
    let mut links = Vec::new();
    for a in &ids {
        for b in &ids {
            if a != b && rng.gen_bool(0.55) {
                links.push(NetLink {
                    from: a.to_string(),
                    to: b.to_string(),
                    bandwidth_kbps: capacity(rng, 0.4, 1, 30),
                    latency_ms: int(rng, 0, 4),
                });
            }
        }
    }
    links.shuffle(rng);
    HardwareModel::new(ecus, links).expect("generated hardware is valid")
}

pub fn random_software(rng: &mut ChaCha8Rng, max_components: usize) -> SoftwareModel {
    let n = rng.gen_range(0..=max_components);
    let mut ids: Vec<String> = (0..n).map(|i| format!("sw{i}")).collect();
    ids.shuffle(rng);
    let components = ids
        .iter()
        .map(|id| SwComponent {
            id: id.clone(),
            ram_mb: int(rng, 0, 5),
            cpu_units: int(rng, 0, 5),
            requires: caps(rng, 0.15),
            criticality: level(rng, 0.6),
        })
        .collect();
    let mut edges = Vec::new();
    for a in &ids {
        for b in &ids {
            if a != b && rng.gen_bool(0.25) {
                edges.push(SwEdge {
                    from: a.clone(),
                    to: b.clone(),
                    bandwidth_kbps: int(rng, 0, 12),
                    max_latency_ms: if rng.gen_bool(0.5) {
                        LatencyBound::Unbounded
                    } else {
                        LatencyBound::Finite(int(rng, 1, 10))
                    },
                });
            }
        }
    }
    SoftwareModel::new(components, edges).expect("generated software is valid")
}

pub fn random_mapping(
    rng: &mut ChaCha8Rng,
    hw: &HardwareModel,
    sw: &SoftwareModel,
) -> DeploymentMapping {
    sw.components()
        .iter()
        .map(|c| (c.id.clone(), hw.ecus().choose(rng).unwrap().id.clone()))
        .collect()
}

pub struct Instance {
    pub hw: HardwareModel,
    pub sw: SoftwareModel,
}

pub fn random_instance(rng: &mut ChaCha8Rng, shape: Shape) -> Instance {
    let hw = random_hardware(rng, shape.max_ecus);
    let sw = random_software(rng, shape.max_components);
    Instance { hw, sw }
}

pub fn random_catalog(rng: &mut ChaCha8Rng) -> DeviceCatalog {
    let n = rng.gen_range(1..=5);
    let mut templates: Vec<DeviceTemplate> = (0..n)
        .map(|i| DeviceTemplate {
            id: format!("t{i}"),
            tier: *TIERS.choose(rng).unwrap(),
            ram_mb: capacity(rng, 0.2, 0, 16),
            cpu_units: capacity(rng, 0.3, 0, 16),
            capabilities: caps(rng, 0.4),
            integrity: level(rng, 0.3),
            cost: int(rng, 0, 100),
            gateway_capable: rng.gen_bool(0.4),
        })
        .collect();
    if !templates.iter().any(|t| t.gateway_capable) {
        let i = rng.gen_range(0..n);
        templates[i].gateway_capable = true;
    }
    let link_defaults = LinkDefaults {
        bandwidth_kbps: capacity(rng, 0.5, 5, 60),
        latency_ms: int(rng, 0, 3),
    };
    DeviceCatalog::new(templates, link_defaults).expect("generated catalog is valid")
}

/// Every total mapping of `sw` onto `hw`, components in id order, ECUs in id
/// order, the first component most significant.
pub fn all_mappings(hw: &HardwareModel, sw: &SoftwareModel) -> Vec<DeploymentMapping> {
    let mut ecus: Vec<&str> = hw.ecus().iter().map(|e| e.id.as_str()).collect();
    ecus.sort();
    let mut comps: Vec<&str> = sw.components().iter().map(|c| c.id.as_str()).collect();
    comps.sort();
    let mut out = vec![DeploymentMapping::new()];
    for c in comps {
        out = out
            .into_iter()
            .flat_map(|m| {
                ecus.iter().map(move |e| {
                    let mut m = m.clone();
                    m.assign(c, *e);
                    m
                })
            })
            .collect();
    }
    out
}

/// Reference evaluator written directly from the constraint and score
/// definitions, sharing no code with the library's evaluation path.
pub mod oracle {
    use super::*;

    /// Best simple path by (latency, hops, intermediate ids), found by
    /// enumerating every simple path. Returns (link indices, latency).
    pub fn route(hw: &HardwareModel, src: &str, dst: &str) -> Option<(Vec<usize>, f64)> {
        if src == dst {
            return Some((vec![], 0.0));
        }
        let mut best: Option<(f64, usize, Vec<String>, Vec<usize>)> = None;
        let mut visited = vec![src.to_string()];
        let mut hops = Vec::new();
        dfs(hw, src, dst, &mut visited, &mut hops, &mut best);
        best.map(|(lat, _, _, hops)| (hops, lat))
    }

    fn dfs(
        hw: &HardwareModel,
        at: &str,
        dst: &str,
        visited: &mut Vec<String>,
        hops: &mut Vec<usize>,
        best: &mut Option<(f64, usize, Vec<String>, Vec<usize>)>,
    ) {
        for (i, link) in hw.links().iter().enumerate() {
            if link.from != at || visited.contains(&link.to) {
                continue;
            }
            hops.push(i);
            if link.to == dst {
                let lat: f64 = hops.iter().map(|&h| hw.links()[h].latency_ms).sum();
                let mids: Vec<String> = visited[1..].to_vec();
                let key = (lat, hops.len(), mids);
                let better = match best {
                    None => true,
                    Some((bl, bh, bm, _)) => {
                        (key.0, key.1, &key.2) < (*bl, *bh, &*bm)
                    }
                };
                if better {
                    *best = Some((key.0, key.1, key.2, hops.clone()));
                }
            } else {
                visited.push(link.to.clone());
                dfs(hw, &link.to, dst, visited, hops, best);
                visited.pop();
            }
            hops.pop();
        }
    }

    pub struct Outcome {
        pub violations: usize,
        pub score: i64,
    }

    pub fn evaluate(
        hw: &HardwareModel,
        sw: &SoftwareModel,
        m: &DeploymentMapping,
        w: [f64; 4],
    ) -> Outcome {
        let host = |c: &str| hw.ecu(m.get(c).unwrap()).unwrap();
        let mut violations = 0;

        for c in sw.components() {
            let e = host(&c.id);
            violations += c.requires.difference(&e.capabilities).count();
            if c.criticality > e.integrity {
                violations += 1;
            }
        }

        let mut t_mem = 1.0_f64;
        let mut t_cpu = 1.0_f64;
        for e in hw.ecus() {
            let mut comps: Vec<&SwComponent> = sw
                .components()
                .iter()
                .filter(|c| m.get(&c.id) == Some(e.id.as_str()))
                .collect();
            comps.sort_by(|a, b| a.id.cmp(&b.id));
            let ram: f64 = comps.iter().map(|c| c.ram_mb).sum();
            let cpu: f64 = comps.iter().map(|c| c.cpu_units).sum();
            for (used, cap, term) in [(ram, e.ram_mb, &mut t_mem), (cpu, e.cpu_units, &mut t_cpu)] {
                if let Capacity::Finite(cap) = cap {
                    if used > cap {
                        violations += 1;
                    }
                    let h = if used == 0.0 { 1.0 } else { 1.0 - used / cap };
                    *term = term.min(h);
                }
            }
        }

        let mut load = vec![0.0; hw.links().len()];
        let mut t_lat = 1.0_f64;
        for edge in sw.edges() {
            let (a, b) = (m.get(&edge.from).unwrap(), m.get(&edge.to).unwrap());
            let lat = if a == b {
                0.0
            } else {
                match route(hw, a, b) {
                    Some((hops, lat)) => {
                        for h in hops {
                            load[h] += edge.bandwidth_kbps;
                        }
                        lat
                    }
                    None => {
                        violations += 1;
                        continue;
                    }
                }
            };
            if let LatencyBound::Finite(bound) = edge.max_latency_ms {
                if lat > bound {
                    violations += 1;
                }
                t_lat = t_lat.min(1.0 - lat / bound);
            }
        }
        let mut t_bw = 1.0_f64;
        for (link, used) in hw.links().iter().zip(&load) {
            if let Capacity::Finite(cap) = link.bandwidth_kbps {
                if *used > cap {
                    violations += 1;
                }
                let h = if *used == 0.0 { 1.0 } else { 1.0 - used / cap };
                t_bw = t_bw.min(h);
            }
        }

        let score = if violations > 0 {
            -(violations as i64)
        } else {
            let s = w[0] * t_mem + w[1] * t_cpu + w[2] * t_bw + w[3] * t_lat;
            (1000.0 * s).round() as i64
        };
        Outcome { violations, score }
    }

    pub const DEFAULT_WEIGHTS: [f64; 4] = [0.25; 4];
}
