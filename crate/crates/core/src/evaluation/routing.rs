//! Deterministic shortest-latency routing over the directed link graph.

use std::cmp::Ordering;

use crate::model::{HardwareModel, NetLink};

use super::EvalError;

/// A directed path through the hardware graph.
#[derive(Debug, Clone, PartialEq)]
pub struct Route {
    /// Indices into [`HardwareModel::links`], in traversal order.
    pub hops: Vec<usize>,
    pub total_latency_ms: f64,
}

impl Route {
    pub fn is_empty(&self) -> bool {
        self.hops.is_empty()
    }

    pub fn links<'a>(&'a self, hw: &'a HardwareModel) -> impl Iterator<Item = &'a NetLink> + 'a {
        self.hops.iter().map(move |&i| &hw.links()[i])
    }

    /// ECU ids visited from source to destination, both included.
    pub fn ecu_path<'a>(&self, hw: &'a HardwareModel) -> Vec<&'a str> {
        let links = hw.links();
        let mut path = Vec::with_capacity(self.hops.len() + 1);
        if let Some(&first) = self.hops.first() {
            path.push(links[first].from.as_str());
        }
        path.extend(self.hops.iter().map(|&i| links[i].to.as_str()));
        path
    }
}

/// Minimum-latency route from `src` to `dst`.
///
/// Ties are broken by fewer hops, then by the lexicographically smallest
/// sequence of intermediate ECU ids. `src == dst` yields the empty route.
pub fn route(hw: &HardwareModel, src: &str, dst: &str) -> Result<Route, EvalError> {
    let table = RoutingTable::new(hw);
    let s = table.index_of(src).ok_or_else(|| EvalError::UnknownId(src.to_string()))?;
    let d = table.index_of(dst).ok_or_else(|| EvalError::UnknownId(dst.to_string()))?;
    table.get(s, d).cloned().ok_or_else(|| EvalError::NoRouteExists {
        from: src.to_string(),
        to: dst.to_string(),
    })
}

/// All-pairs routes, indexed by the rank of each ECU id in sorted order.
#[derive(Debug, Clone)]
pub(crate) struct RoutingTable {
    ids: Vec<String>,
    routes: Vec<Vec<Option<Route>>>,
}

/// Search label: total latency, hop count, ranks of the ECUs visited after
/// the source. Comparing labels for paths that end in the same node orders
/// them exactly as the tie-breaking rule requires.
#[derive(Clone)]
struct Label {
    latency: f64,
    nodes: Vec<usize>,
    hops: Vec<usize>,
}

impl Label {
    fn cmp(&self, other: &Label) -> Ordering {
        self.latency
            .total_cmp(&other.latency)
            .then(self.nodes.len().cmp(&other.nodes.len()))
            .then_with(|| self.nodes.cmp(&other.nodes))
    }
}

impl RoutingTable {
    pub(crate) fn new(hw: &HardwareModel) -> Self {
        let mut ids: Vec<String> = hw.ecus().iter().map(|e| e.id.clone()).collect();
        ids.sort();
        let rank = |id: &str| ids.binary_search_by(|x| x.as_str().cmp(id)).unwrap();

        let n = ids.len();
        let mut out: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); n];
        for (li, link) in hw.links().iter().enumerate() {
            out[rank(&link.from)].push((rank(&link.to), li, link.latency_ms));
        }

        let routes = (0..n).map(|src| single_source(&out, src)).collect();
        Self { ids, routes }
    }

    pub(crate) fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.binary_search_by(|x| x.as_str().cmp(id)).ok()
    }

    pub(crate) fn get(&self, src: usize, dst: usize) -> Option<&Route> {
        self.routes[src][dst].as_ref()
    }
}

fn single_source(out: &[Vec<(usize, usize, f64)>], src: usize) -> Vec<Option<Route>> {
    let n = out.len();
    let mut best: Vec<Option<Label>> = vec![None; n];
    let mut done = vec![false; n];
    best[src] = Some(Label {
        latency: 0.0,
        nodes: Vec::new(),
        hops: Vec::new(),
    });

    loop {
        let next = (0..n)
            .filter(|&v| !done[v] && best[v].is_some())
            .min_by(|&a, &b| {
                best[a]
                    .as_ref()
                    .unwrap()
                    .cmp(best[b].as_ref().unwrap())
                    .then(a.cmp(&b))
            });
        let Some(u) = next else { break };
        done[u] = true;
        let base = best[u].clone().unwrap();
        for &(v, li, lat) in &out[u] {
            if done[v] {
                continue;
            }
            let mut cand = base.clone();
            cand.latency += lat;
            cand.nodes.push(v);
            cand.hops.push(li);
            let better = match &best[v] {
                None => true,
                Some(cur) => cand.cmp(cur) == Ordering::Less,
            };
            if better {
                best[v] = Some(cand);
            }
        }
    }

    best.into_iter()
        .map(|l| {
            l.map(|l| Route {
                hops: l.hops,
                total_latency_ms: l.latency,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::{EcuNode, NetLink, Tier};

    fn labels(hw: &HardwareModel, r: &Route) -> Vec<String> {
        r.links(hw).map(NetLink::label).collect()
    }

    #[test]
    fn identity_route_is_empty() {
        let hw = fixtures::example_hardware();
        let r = route(&hw, "C1", "C1").unwrap();
        assert!(r.is_empty());
        assert_eq!(r.total_latency_ms, 0.0);
    }

    // Expected values from enumerating the simple paths of the six fixture
    // links by hand: the only C1->C2 path is C1->GW->C2.
    #[test]
    fn relays_through_gateway() {
        let hw = fixtures::example_hardware();
        let r = route(&hw, "C1", "C2").unwrap();
        assert_eq!(labels(&hw, &r), ["C1->GW", "GW->C2"]);
        assert_eq!(r.ecu_path(&hw), ["C1", "GW", "C2"]);
    }

    #[test]
    fn unreachable_destination() {
        let full = fixtures::example_hardware();
        let links = full
            .links()
            .iter()
            .filter(|l| l.label() != "GW->Cloud")
            .cloned()
            .collect();
        let hw = HardwareModel::new(full.ecus().to_vec(), links).unwrap();
        assert_eq!(
            route(&hw, "C1", "Cloud"),
            Err(EvalError::NoRouteExists {
                from: "C1".into(),
                to: "Cloud".into()
            })
        );
        assert!(route(&hw, "Cloud", "C1").is_ok());
    }

    #[test]
    fn unknown_endpoint() {
        let hw = fixtures::example_hardware();
        assert_eq!(route(&hw, "C9", "C1"), Err(EvalError::UnknownId("C9".into())));
    }

    fn diamond(lat_b: f64, lat_c: f64, shortcut: Option<f64>) -> HardwareModel {
        let ecus = ["A", "B", "C", "D"]
            .iter()
            .map(|id| EcuNode::new(*id, Tier::Embedded))
            .collect();
        let mut links = vec![
            NetLink::new("A", "C").with_latency(lat_c),
            NetLink::new("C", "D").with_latency(0.0),
            NetLink::new("A", "B").with_latency(lat_b),
            NetLink::new("B", "D").with_latency(0.0),
        ];
        if let Some(l) = shortcut {
            links.push(NetLink::new("A", "D").with_latency(l));
        }
        HardwareModel::new(ecus, links).unwrap()
    }

    #[test]
    fn prefers_lower_latency() {
        let hw = diamond(5.0, 1.0, None);
        assert_eq!(route(&hw, "A", "D").unwrap().ecu_path(&hw), ["A", "C", "D"]);
        assert_eq!(route(&hw, "A", "D").unwrap().total_latency_ms, 1.0);
    }

    #[test]
    fn latency_tie_prefers_fewer_hops() {
        let hw = diamond(1.0, 1.0, Some(1.0));
        assert_eq!(route(&hw, "A", "D").unwrap().ecu_path(&hw), ["A", "D"]);
    }

    #[test]
    fn full_tie_prefers_smallest_intermediate_ids() {
        let hw = diamond(2.0, 2.0, None);
        assert_eq!(route(&hw, "A", "D").unwrap().ecu_path(&hw), ["A", "B", "D"]);
    }
}
