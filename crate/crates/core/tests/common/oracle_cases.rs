//! Evaluates each analytic formula on the draws of `fixtures/oracle.json`
//! (40-digit reference values, regenerate with `fixtures/gen_oracle.py`).

use qin_core::chain::{
    elementary_link_efficiency, ChainOptions, ChainTopology, Channel, ElementaryLink, EndUser,
    LinkSnapshot, SwapNode,
};
use qin_core::channel::{
    atmospheric_transmittance, fiber_efficiency, single_path_efficiency, FiberChannel,
    FreeSpaceParams,
};
use qin_core::devices::{
    bsm_werner, fidelity_from_werner, memory_efficiency, BsmModel, ConverterModel, DetectorModel,
    MemoryModel, SourceModel,
};
use qin_core::WernerState;
use serde_json::Value;

pub const FAMILIES: [&str; 9] = [
    "fiber",
    "atmosphere",
    "link_budget",
    "memory",
    "fidelity",
    "window",
    "elementary_werner",
    "bsm_werner",
    "chain_werner",
];

#[derive(Debug, Clone, Copy)]
pub struct FamilyResult {
    pub draws: usize,
    pub max_relative_error: f64,
}

fn num(case: &Value, key: &str) -> f64 {
    case[key].as_f64().unwrap_or_else(|| panic!("missing {key}"))
}

fn nums(value: &Value) -> Vec<f64> {
    value.as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect()
}

fn memory(write_efficiency: f64, storage_time_s: f64, fidelity: f64) -> MemoryModel {
    MemoryModel {
        write_efficiency,
        storage_time_s,
        fidelity,
        ..Default::default()
    }
}

fn link(fidelities: &[f64]) -> ElementaryLink {
    let fiber = Channel::Fiber(FiberChannel::new(1.0, 0.2).unwrap());
    ElementaryLink {
        name: "link".into(),
        source: SourceModel {
            fidelity: fidelities[0],
            ..Default::default()
        },
        channels: [fiber.clone(), fiber],
        memories: [
            memory(0.98, 10e-3, fidelities[2]),
            memory(0.98, 10e-3, fidelities[3]),
        ],
        medium_fidelity: fidelities[1],
        apply_source_efficiency: true,
    }
}

fn chain_werner(c: &Value) -> f64 {
    let (sources, converters) = (nums(&c["end_sources"]), nums(&c["end_converters"]));
    let user = |k: usize| EndUser {
        name: format!("user{k}"),
        source: SourceModel {
            fidelity: sources[k],
            ..Default::default()
        },
        converter: ConverterModel {
            fidelity: converters[k],
            ..Default::default()
        },
        memory: MemoryModel::default(),
    };
    let topology = ChainTopology {
        alice: user(0),
        bob: user(1),
        links: c["links"].as_array().unwrap().iter().map(|f| link(&nums(f))).collect(),
        nodes: nums(&c["false_hz"])
            .into_iter()
            .map(|noise| SwapNode {
                name: "node".into(),
                bsm: BsmModel::default(),
                detector: DetectorModel {
                    dark_count_rate_hz: noise,
                    ..Default::default()
                },
                space_facing: false,
            })
            .collect(),
        modes: 500,
        slot_s: 1e-9,
        source_rate_hz: num(c, "rate_hz"),
        options: ChainOptions::default(),
    };
    let sides = nums(&c["sides"]);
    let n = sides.len();
    topology
        .werner_from_efficiencies(&sides[1..n - 1], [sides[0], sides[n - 1]])
        .value()
}

fn evaluate(family: &str, c: &Value) -> f64 {
    match family {
        "fiber" => fiber_efficiency(
            &FiberChannel::new(num(c, "length_km"), num(c, "alpha_db_per_km")).unwrap(),
        ),
        "atmosphere" => atmospheric_transmittance(num(c, "zenith"), num(c, "elevation_rad")).unwrap(),
        "link_budget" => {
            let p = FreeSpaceParams {
                wavelength_m: num(c, "wavelength_m"),
                tx_aperture_m: num(c, "tx_aperture_m"),
                rx_aperture_m: num(c, "rx_aperture_m"),
                tx_internal: num(c, "tx_internal"),
                rx_internal: num(c, "rx_internal"),
                zenith_transmittance: num(c, "zenith"),
            };
            single_path_efficiency(&p, num(c, "range_m"), num(c, "elevation_rad")).unwrap()
        }
        "memory" => memory_efficiency(
            &memory(num(c, "write_efficiency"), num(c, "storage_time_s"), 1.0),
            num(c, "t_s"),
        ),
        "fidelity" => fidelity_from_werner(WernerState::new(num(c, "werner")).unwrap()),
        "window" => {
            let m = memory(num(c, "write_efficiency"), num(c, "storage_time_s"), 1.0);
            let snapshot = LinkSnapshot {
                source_efficiency: num(c, "source_efficiency"),
                channel_efficiencies: [num(c, "channel_0"), num(c, "channel_1")],
                memories: [m; 2],
            };
            let modes = c["modes"].as_u64().unwrap() as u32;
            elementary_link_efficiency(&snapshot, modes, num(c, "slot_s"))
        }
        "elementary_werner" => link(&[
            num(c, "source"),
            num(c, "medium"),
            num(c, "memory_0"),
            num(c, "memory_1"),
        ])
        .werner()
        .value(),
        "bsm_werner" => bsm_werner(
            num(c, "eta_left"),
            num(c, "eta_right"),
            num(c, "rate_hz"),
            num(c, "false_left_hz"),
            num(c, "false_right_hz"),
        )
        .unwrap()
        .value(),
        "chain_werner" => chain_werner(c),
        other => panic!("unknown family {other}"),
    }
}

pub fn check_family(family: &str) -> FamilyResult {
    let fixture: Value = serde_json::from_str(include_str!("../fixtures/oracle.json")).unwrap();
    let cases = fixture[family].as_array().unwrap();
    let max_relative_error = cases
        .iter()
        .map(|c| {
            let expected = num(c, "expected");
            let rel = ((evaluate(family, c) - expected) / expected).abs();
            if rel.is_nan() {
                f64::INFINITY
            } else {
                rel
            }
        })
        .fold(0.0, f64::max);
    FamilyResult {
        draws: cases.len(),
        max_relative_error,
    }
}
