mod common;

use autopart::evaluation::{
    check_feasibility, evaluate, headroom, route, utilization_report, EvalError, ScoreWeights,
    ViolationKind,
};
use autopart::fixtures;
use autopart::model::{Capacity, DeploymentMapping, SoftwareModel};
use common::{oracle, random_instance, Shape};
use proptest::prelude::*;

#[test]
fn routes_match_simple_path_enumeration() {
    let mut rng = common::rng(21);
    for _ in 0..300 {
        let hw = common::random_hardware(&mut rng, 5);
        for a in hw.ecus() {
            for b in hw.ecus() {
                let lib = route(&hw, &a.id, &b.id);
                match oracle::route(&hw, &a.id, &b.id) {
                    Some((hops, lat)) => {
                        let r = lib.unwrap();
                        assert_eq!(r.hops, hops, "{} -> {}", a.id, b.id);
                        assert_eq!(r.total_latency_ms, lat);
                    }
                    None => assert!(matches!(lib, Err(EvalError::NoRouteExists { .. }))),
                }
            }
        }
    }
}

#[test]
fn example_routes() {
    let hw = fixtures::example_hardware();
    let r = route(&hw, "C1", "Cloud").unwrap();
    assert_eq!(r.ecu_path(&hw), ["C1", "GW", "Cloud"]);
    assert!(route(&hw, "C1", "C1").unwrap().is_empty());
}

#[test]
fn utilization_reports_overflowing_mappings() {
    let hw = fixtures::example_hardware();
    let base = fixtures::example_software();
    let comps = base.components().iter().cloned().map(|c| c.with_ram(2.0)).collect();
    let sw = SoftwareModel::new(comps, base.edges().to_vec()).unwrap();
    let m: DeploymentMapping = sw.components().iter().map(|c| (c.id.clone(), "C1".to_string())).collect();
    let u = utilization_report(&hw, &sw, &m).unwrap();
    let total_ram: f64 = sw.components().iter().map(|c| c.ram_mb).sum();
    assert_eq!(u.ecu_utilization["C1"].ram_mb, total_ram);
    assert_eq!(total_ram, 10.0);
    let r = evaluate(&hw, &sw, &m, ScoreWeights::default()).unwrap();
    assert!(!r.feasible);
    assert!(r.violations.iter().any(|v| v.kind == ViolationKind::RamOverflow && v.subject == "C1"));
    assert_eq!(r.utilization, u);
}

#[test]
fn headroom_definition() {
    assert_eq!(headroom(0.0, Capacity::Finite(0.0)), Some(1.0));
    assert_eq!(headroom(1.0, Capacity::Finite(4.0)), Some(0.75));
    assert_eq!(headroom(5.0, Capacity::Unlimited), None);
    assert!(headroom(6.0, Capacity::Finite(4.0)).unwrap() < 0.0);
}

#[test]
fn co_located_edges_cost_nothing() {
    let mut rng = common::rng(22);
    for _ in 0..200 {
        let inst = random_instance(&mut rng, Shape::SMALL);
        let Some(e) = inst.hw.ecus().first() else { continue };
        let m: DeploymentMapping = inst.sw.components().iter().map(|c| (c.id.clone(), e.id.clone())).collect();
        let r = evaluate(&inst.hw, &inst.sw, &m, ScoreWeights::default()).unwrap();
        assert!(r.violations.iter().all(|v| !matches!(
            v.kind,
            ViolationKind::NoRoute | ViolationKind::BandwidthOverflow | ViolationKind::LatencyExceeded
        )));
        assert!(r.utilization.link_utilization.values().all(|&u| u == 0.0));
        assert!(r.utilization.edge_latencies.values().all(|&l| l == Some(0.0)));
    }
}

#[test]
fn weights_shift_the_score_but_not_feasibility() {
    let mut rng = common::rng(23);
    let w = ScoreWeights::new(0.7, 0.1, 0.1, 0.1).unwrap();
    for _ in 0..300 {
        let inst = random_instance(&mut rng, Shape::SMALL);
        let m = common::random_mapping(&mut rng, &inst.hw, &inst.sw);
        let a = evaluate(&inst.hw, &inst.sw, &m, ScoreWeights::default()).unwrap();
        let b = evaluate(&inst.hw, &inst.sw, &m, w).unwrap();
        assert_eq!(a.feasible, b.feasible);
        assert_eq!(b.score, oracle::evaluate(&inst.hw, &inst.sw, &m, [0.7, 0.1, 0.1, 0.1]).score);
        if !a.feasible {
            assert_eq!(a.score, b.score);
        }
    }
}

#[test]
fn mapping_errors() {
    let hw = fixtures::example_hardware();
    let sw = fixtures::example_software();
    let mut m = fixtures::mapping_m1();
    m.assign("CtrlS", "Nowhere");
    assert!(matches!(check_feasibility(&hw, &sw, &m), Err(EvalError::UnknownId { .. })));
    let partial: DeploymentMapping = [("CtrlS", "C1")].into_iter().collect();
    assert!(matches!(
        evaluate(&hw, &sw, &partial, ScoreWeights::default()),
        Err(EvalError::IncompleteMapping { .. })
    ));
    let mut extra = fixtures::mapping_m1();
    extra.assign("Ghost", "C1");
    assert!(evaluate(&hw, &sw, &extra, ScoreWeights::default()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn evaluation_is_deterministic_and_matches_reference(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let inst = random_instance(&mut rng, Shape { max_ecus: 5, max_components: 7 });
        let m = common::random_mapping(&mut rng, &inst.hw, &inst.sw);
        let a = evaluate(&inst.hw, &inst.sw, &m, ScoreWeights::default()).unwrap();
        let b = evaluate(&inst.hw, &inst.sw, &m, ScoreWeights::default()).unwrap();
        prop_assert_eq!(a.to_json(), b.to_json());
        let reference = oracle::evaluate(&inst.hw, &inst.sw, &m, oracle::DEFAULT_WEIGHTS);
        prop_assert_eq!(reference.score, a.score);
        prop_assert_eq!(reference.violations, a.violations.len());
        let mut sorted = a.violations.clone();
        sorted.sort();
        prop_assert_eq!(sorted, a.violations);
    }

    #[test]
    fn invalid_weights_rejected(a in -1.0f64..2.0, b in 0.0f64..1.0) {
        let ok = ScoreWeights::new(a, b, 0.0, 1.0 - a - b);
        let valid = a >= 0.0 && b >= 0.0 && 1.0 - a - b >= 0.0;
        prop_assert_eq!(ok.is_ok(), valid);
    }
}
