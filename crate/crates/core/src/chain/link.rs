use crate::channel::{fiber_efficiency, single_path_efficiency, FiberChannel, FreeSpaceParams};
use crate::devices::{memory_efficiency, MemoryModel, SourceModel, WernerState};
use crate::error::{check_unit, Error, Result};
use crate::orbit::PassSample;

/// One propagation path between the pair source and a memory.
#[derive(Debug, Clone, PartialEq)]
pub enum Channel {
    Fiber(FiberChannel),
    /// Satellite downlink to the ground station at `station` in the pass samples.
    FreeSpace {
        params: FreeSpaceParams,
        station: usize,
    },
}

impl Channel {
    /// Transmission at the geometry of `sample`; a downlink below
    /// `min_elevation` (or without geometry) is down.
    pub fn efficiency(&self, sample: Option<&PassSample>, min_elevation: f64) -> f64 {
        match self {
            Channel::Fiber(fiber) => fiber_efficiency(fiber),
            Channel::FreeSpace { params, station } => {
                let Some(geometry) = sample.and_then(|s| s.stations.get(*station)) else {
                    return 0.0;
                };
                if geometry.elevation_rad < min_elevation || geometry.elevation_rad <= 0.0 {
                    return 0.0;
                }
                single_path_efficiency(params, geometry.slant_range_m, geometry.elevation_rad)
                    .unwrap_or(0.0)
            }
        }
    }

    pub fn is_free_space(&self) -> bool {
        matches!(self, Channel::FreeSpace { .. })
    }
}

/// Source, two channels and two heralded memories.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementaryLink {
    pub name: String,
    pub source: SourceModel,
    pub channels: [Channel; 2],
    pub memories: [MemoryModel; 2],
    /// Fidelity of the propagation medium (fibre or free space).
    pub medium_fidelity: f64,
    /// Whether the source's pair generation efficiency multiplies the per-slot
    /// success probability.
    pub apply_source_efficiency: bool,
}

impl ElementaryLink {
    pub fn validate(&self) -> Result<()> {
        self.source.validate()?;
        for m in &self.memories {
            m.validate()?;
        }
        for ch in &self.channels {
            if let Channel::FreeSpace { params, .. } = ch {
                params.validate()?;
            }
        }
        check_unit("medium fidelity", self.medium_fidelity)
            .map_err(|e| Error::Config(format!("link {}: {e}", self.name)))
    }

    pub fn is_space_link(&self) -> bool {
        self.channels.iter().any(Channel::is_free_space)
    }

    /// Freezes the channel transmissions at one instant.
    pub fn snapshot(&self, sample: Option<&PassSample>, min_elevation: f64) -> LinkSnapshot {
        LinkSnapshot {
            source_efficiency: if self.apply_source_efficiency {
                self.source.efficiency
            } else {
                1.0
            },
            channel_efficiencies: [
                self.channels[0].efficiency(sample, min_elevation),
                self.channels[1].efficiency(sample, min_elevation),
            ],
            memories: self.memories,
        }
    }

    /// `W_src * W_medium^2 * W_QM^2`, component Werner parameters taken equal
    /// to the component fidelities.
    pub fn werner(&self) -> WernerState {
        WernerState::clamped(
            self.source.fidelity
                * self.medium_fidelity
                * self.medium_fidelity
                * self.memories[0].fidelity
                * self.memories[1].fidelity,
        )
    }
}

/// An elementary link with its channel transmissions fixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkSnapshot {
    pub source_efficiency: f64,
    pub channel_efficiencies: [f64; 2],
    pub memories: [MemoryModel; 2],
}

impl LinkSnapshot {
    /// Probability that the pair emitted in the slot ending at `t_k` is stored
    /// on both sides.
    pub fn slot_success(&self, t_k: f64) -> f64 {
        self.source_efficiency
            * self.channel_efficiencies[0]
            * self.channel_efficiencies[1]
            * memory_efficiency(&self.memories[0], t_k)
            * memory_efficiency(&self.memories[1], t_k)
    }
}

/// Probability that at least one of `modes` slots heralds a pair, slot `k`
/// stored for `k * slot_s`.
pub fn elementary_link_efficiency(link: &LinkSnapshot, modes: u32, slot_s: f64) -> f64 {
    // 1 - prod(1 - p_k) through logs keeps precision when every p_k is tiny.
    let log_all_fail: f64 = (1..=modes)
        .map(|k| (-link.slot_success(k as f64 * slot_s)).ln_1p())
        .sum();
    -log_all_fail.exp_m1()
}

/// Per-attempt success probability of a link evaluated at storage time `t_k`.
pub fn space_elementary_efficiency(link: &LinkSnapshot, t_k: f64) -> f64 {
    link.slot_success(t_k)
}
