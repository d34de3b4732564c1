#![allow(dead_code)]

pub mod enumeration;

use qin_core::chain::{
    Channel, ChainOptions, ChainTopology, ElementaryLink, EndUser, LinkSnapshot, SwapNode,
};
use qin_core::channel::{fiber_efficiency, FiberChannel};
use qin_core::devices::{
    BsmModel, ConverterModel, DetectorModel, MemoryModel, SourceModel,
};

pub fn fiber(length_km: f64) -> Channel {
    Channel::Fiber(FiberChannel::new(length_km, 0.2).unwrap())
}

pub fn ground_link(name: &str, lengths_km: [f64; 2]) -> ElementaryLink {
    ElementaryLink {
        name: name.into(),
        source: SourceModel::default(),
        channels: [fiber(lengths_km[0]), fiber(lengths_km[1])],
        memories: [MemoryModel::default(); 2],
        medium_fidelity: 0.99,
        apply_source_efficiency: true,
    }
}

pub fn end_user(name: &str) -> EndUser {
    EndUser {
        name: name.into(),
        source: SourceModel::default(),
        converter: ConverterModel::default(),
        memory: MemoryModel::default(),
    }
}

pub fn node(name: &str, space_facing: bool) -> SwapNode {
    SwapNode {
        name: name.into(),
        bsm: BsmModel::default(),
        detector: DetectorModel::default(),
        space_facing,
    }
}

/// All-fibre chain with `links` Table 1 links of 14 km + 45 km.
pub fn fibre_chain(links: usize) -> ChainTopology {
    ChainTopology {
        alice: end_user("alice"),
        bob: end_user("bob"),
        links: (0..links).map(|i| ground_link(&format!("l{i}"), [14.0, 45.0])).collect(),
        nodes: (0..=links).map(|i| node(&format!("n{i}"), false)).collect(),
        modes: 500,
        slot_s: 1e-9,
        source_rate_hz: 1e9,
        options: ChainOptions::default(),
    }
}

/// Table 1 Paris link: 14 km and 45 km of fibre.
pub fn paris_snapshot() -> LinkSnapshot {
    LinkSnapshot {
        source_efficiency: 0.25,
        channel_efficiencies: [
            fiber_efficiency(&FiberChannel::new(14.0, 0.2).unwrap()),
            fiber_efficiency(&FiberChannel::new(45.0, 0.2).unwrap()),
        ],
        memories: [MemoryModel::default(); 2],
    }
}

pub fn snapshot(source: f64, channels: [f64; 2], write: f64, storage_time_s: f64) -> LinkSnapshot {
    let memory = MemoryModel {
        write_efficiency: write,
        storage_time_s,
        ..Default::default()
    };
    LinkSnapshot {
        source_efficiency: source,
        channel_efficiencies: channels,
        memories: [memory; 2],
    }
}
