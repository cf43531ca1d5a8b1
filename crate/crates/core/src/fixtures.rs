//! The four-device, five-component example system, built in code.
//!
//! The same system is kept as JSON documents under `fixtures/` in the crate
//! root; tests check that both forms agree.

use crate::hwsynth::{DeviceCatalog, DeviceTemplate, LinkDefaults};
use crate::model::{
    Capacity, DeploymentMapping, EcuNode, HardwareModel, NetLink, SoftwareModel,
    SwComponent, SwEdge, Tier,
};

fn example_ecus() -> Vec<EcuNode> {
    vec![
        EcuNode::new("Cloud", Tier::Cloud),
        EcuNode::new("GW", Tier::Embedded).with_ram(Capacity::Finite(1024.0)),
        EcuNode::new("C1", Tier::Microcontroller)
            .with_ram(Capacity::Finite(4.0))
            .with_capability("Sen"),
        EcuNode::new("C2", Tier::Microcontroller)
            .with_ram(Capacity::Finite(2.0))
            .with_capability("Act"),
    ]
}

fn example_links() -> Vec<NetLink> {
    [
        ("Cloud", "GW"),
        ("GW", "C1"),
        ("GW", "C2"),
        ("GW", "Cloud"),
        ("C1", "GW"),
        ("C2", "GW"),
    ]
    .into_iter()
    .map(|(a, b)| NetLink::new(a, b))
    .collect()
}

/// Cloud, gateway `GW`, controller `C1` with sensor `Sen`, controller `C2`
/// with actuator `Act`, and bidirectional links between the gateway and
/// each other device.
pub fn example_hardware() -> HardwareModel {
    HardwareModel::new(example_ecus(), example_links()).expect("fixture is valid")
}

/// [`example_hardware`] with `C1`'s sensor removed, so nothing can host `CtrlS`.
pub fn example_hardware_without_sensor() -> HardwareModel {
    let mut ecus = example_ecus();
    for e in &mut ecus {
        if e.id == "C1" {
            e.capabilities.clear();
        }
    }
    HardwareModel::new(ecus, example_links()).expect("fixture is valid")
}

/// Sensor and actuator controllers plus three computation components, all
/// talking to `Comp1`. No resource demands.
pub fn example_software() -> SoftwareModel {
    SoftwareModel::new(
        vec![
            SwComponent::new("CtrlS").requiring("Sen"),
            SwComponent::new("CtrlA").requiring("Act"),
            SwComponent::new("Comp1"),
            SwComponent::new("Comp2"),
            SwComponent::new("Comp3"),
        ],
        vec![
            SwEdge::new("CtrlS", "Comp1"),
            SwEdge::new("Comp1", "CtrlA"),
            SwEdge::new("Comp1", "Comp2"),
            SwEdge::new("Comp1", "Comp3"),
        ],
    )
    .expect("fixture is valid")
}

/// Controllers on their devices, everything else on the gateway.
pub fn mapping_m1() -> DeploymentMapping {
    [
        ("CtrlS", "C1"),
        ("CtrlA", "C2"),
        ("Comp1", "GW"),
        ("Comp2", "GW"),
        ("Comp3", "GW"),
    ]
    .into_iter()
    .collect()
}

/// As [`mapping_m1`] but with `Comp2` and `Comp3` in the cloud.
pub fn mapping_m2() -> DeploymentMapping {
    let mut m = mapping_m1();
    m.assign("Comp2", "Cloud");
    m.assign("Comp3", "Cloud");
    m
}

/// One template per example device; only the gateway can be a hub.
pub fn example_catalog() -> DeviceCatalog {
    let t = |ecu: &EcuNode, id: &str, cost: f64, gateway_capable: bool| DeviceTemplate {
        id: id.into(),
        tier: ecu.tier,
        ram_mb: ecu.ram_mb,
        cpu_units: ecu.cpu_units,
        capabilities: ecu.capabilities.clone(),
        integrity: ecu.integrity,
        cost,
        gateway_capable,
    };
    let ecus = example_ecus();
    DeviceCatalog::new(
        vec![
            t(&ecus[0], "cloud", 20.0, false),
            t(&ecus[1], "gw", 50.0, true),
            t(&ecus[2], "c1", 10.0, false),
            t(&ecus[3], "c2", 10.0, false),
        ],
        LinkDefaults::default(),
    )
    .expect("fixture is valid")
}

