//! Repeater chain between two end users.
//!
//! The chain alternates swap nodes and elementary links:
//! `node[0] link[0] node[1] ... link[M-1] node[M]`, where `node[0]` and
//! `node[M]` are the end users' local Bell state measurements. Swaps happen
//! once per window of `modes` time slots.

mod link;
mod montecarlo;
mod series;

pub use link::{
    elementary_link_efficiency, space_elementary_efficiency, Channel, ElementaryLink, LinkSnapshot,
};
pub use montecarlo::{monte_carlo_elementary, z_score, MonteCarloEstimate};
pub use series::{cumulate, simulate_pass, SeriesRecord, SimulationSeries};

use crate::devices::{
    bsm_werner, memory_efficiency, source_werner_with_conversion, swap_efficiency, BsmModel,
    ConverterModel, DetectorModel, MemoryModel, SourceModel, WernerState,
};
use crate::error::{check_positive, Error, Result};
use crate::orbit::PassSample;

/// Trapped-ion end user: the ion emits a photon that is converted to the
/// network wavelength and measured jointly with the incoming network photon.
#[derive(Debug, Clone, PartialEq)]
pub struct EndUser {
    pub name: String,
    pub source: SourceModel,
    pub converter: ConverterModel,
    pub memory: MemoryModel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwapNode {
    pub name: String,
    pub bsm: BsmModel,
    pub detector: DetectorModel,
    /// Receives light from space; stray light adds to its false clicks.
    pub space_facing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainOptions {
    /// Multiply the end-user factors by the source rate, as the rate formula
    /// is printed. Not dimensionally meaningful; kept for comparison.
    pub strict_eq1: bool,
    /// Aggregate the space link over the whole window of slots, like ground
    /// links, instead of a single attempt.
    pub sat_window_mode: bool,
    pub min_elevation_rad: f64,
}

impl Default for ChainOptions {
    fn default() -> Self {
        Self {
            strict_eq1: false,
            sat_window_mode: false,
            min_elevation_rad: 20f64.to_radians(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainTopology {
    pub alice: EndUser,
    pub bob: EndUser,
    pub links: Vec<ElementaryLink>,
    pub nodes: Vec<SwapNode>,
    /// Memory modes N, i.e. time slots per swap window.
    pub modes: u32,
    /// Time slot length (s).
    pub slot_s: f64,
    pub source_rate_hz: f64,
    pub options: ChainOptions,
}

/// Everything the rate and fidelity formulas need at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainState {
    /// Heralding efficiency of each elementary link, as used in the rate.
    pub link_efficiencies: Vec<f64>,
    /// Converter and memory efficiency of the end users' ion-photon interface.
    pub end_user_efficiency: [f64; 2],
    /// Pairs heralded per second on the first space link.
    pub sigma_sat: f64,
    pub sigma_end: f64,
    pub werner: WernerState,
}

impl ChainTopology {
    pub fn validate(&self) -> Result<()> {
        if self.links.is_empty() {
            return Err(Error::Config("chain needs at least one elementary link".into()));
        }
        if self.nodes.len() != self.links.len() + 1 {
            return Err(Error::Config(format!(
                "{} links need {} swap nodes, got {}",
                self.links.len(),
                self.links.len() + 1,
                self.nodes.len()
            )));
        }
        if self.modes == 0 {
            return Err(Error::Config("memory modes must be at least 1".into()));
        }
        check_positive("time slot", self.slot_s)?;
        check_positive("source rate", self.source_rate_hz)?;
        for user in [&self.alice, &self.bob] {
            user.source.validate()?;
            user.converter.validate()?;
            user.memory.validate()?;
        }
        for node in &self.nodes {
            node.bsm.validate()?;
            node.detector.validate()?;
        }
        self.links.iter().try_for_each(ElementaryLink::validate)
    }

    /// Length of one swap window, `N * slot`.
    pub fn window_s(&self) -> f64 {
        self.modes as f64 * self.slot_s
    }

    /// Copy with `level` stray-light clicks/s on every space-facing detector.
    pub fn with_straylight(&self, level: f64) -> ChainTopology {
        let mut out = self.clone();
        for node in out.nodes.iter_mut().filter(|n| n.space_facing) {
            node.detector.straylight_rate_hz = level;
        }
        out
    }

    fn end_user_efficiency(&self, user: &EndUser) -> f64 {
        user.converter.efficiency * memory_efficiency(&user.memory, self.window_s())
    }

    /// Heralding efficiency of one link at the geometry of `sample`.
    pub fn link_efficiency(&self, link: &ElementaryLink, sample: Option<&PassSample>) -> f64 {
        let snapshot = link.snapshot(sample, self.options.min_elevation_rad);
        if link.is_space_link() && !self.options.sat_window_mode {
            space_elementary_efficiency(&snapshot, self.window_s())
        } else {
            elementary_link_efficiency(&snapshot, self.modes, self.slot_s)
        }
    }

    /// Rate formula and Werner product at one instant.
    pub fn evaluate(&self, sample: Option<&PassSample>) -> ChainState {
        let link_efficiencies: Vec<f64> = self
            .links
            .iter()
            .map(|l| self.link_efficiency(l, sample))
            .collect();
        let end_user_efficiency = [
            self.end_user_efficiency(&self.alice),
            self.end_user_efficiency(&self.bob),
        ];

        let swap_rate = self.source_rate_hz / self.modes as f64;
        let end_factor = if self.options.strict_eq1 {
            self.source_rate_hz
        } else {
            1.0
        };
        let transmission = end_user_efficiency[0]
            * end_user_efficiency[1]
            * self
                .nodes
                .iter()
                .map(|n| swap_efficiency(&n.bsm, &n.detector))
                .product::<f64>()
            * link_efficiencies.iter().product::<f64>();
        let sigma_end = swap_rate * end_factor * end_factor * transmission;

        let sigma_sat = self
            .links
            .iter()
            .zip(&link_efficiencies)
            .find(|(l, _)| l.is_space_link())
            .map_or(0.0, |(_, &eta)| {
                if self.options.sat_window_mode {
                    swap_rate * eta
                } else {
                    self.source_rate_hz * eta
                }
            });

        let werner = self.werner_from_efficiencies(&link_efficiencies, end_user_efficiency);
        ChainState {
            link_efficiencies,
            end_user_efficiency,
            sigma_sat,
            sigma_end,
            werner,
        }
    }

    /// End-to-end Werner parameter given each link's heralding efficiency:
    /// end-user sources, every swap node, and every elementary link.
    pub fn werner_from_efficiencies(
        &self,
        link_efficiencies: &[f64],
        end_user_efficiency: [f64; 2],
    ) -> WernerState {
        // Heralding efficiency on either side of node i.
        let mut sides = Vec::with_capacity(link_efficiencies.len() + 2);
        sides.push(end_user_efficiency[0]);
        sides.extend_from_slice(link_efficiencies);
        sides.push(end_user_efficiency[1]);

        let nodes = self.nodes.iter().enumerate().map(|(i, node)| {
            let noise = node.detector.false_click_rate();
            heralding_werner(sides[i], sides[i + 1], self.source_rate_hz, noise)
        });
        let links = self.links.iter().map(ElementaryLink::werner);
        let ends = [&self.alice, &self.bob]
            .into_iter()
            .map(|u| source_werner_with_conversion(&u.source, &u.converter));
        ends.chain(nodes).chain(links).product()
    }
}

/// Swap-node Werner factor; a side with no true clicks contributes zero.
fn heralding_werner(eta_left: f64, eta_right: f64, rate: f64, noise: f64) -> WernerState {
    if eta_left <= 0.0 || eta_right <= 0.0 {
        return WernerState::MIXED;
    }
    bsm_werner(eta_left, eta_right, rate, noise, noise).unwrap_or(WernerState::MIXED)
}

/// `sigma_end` at one instant.
pub fn end_to_end_rate(topology: &ChainTopology, sample: Option<&PassSample>) -> f64 {
    topology.evaluate(sample).sigma_end
}

pub fn end_to_end_werner(topology: &ChainTopology, sample: Option<&PassSample>) -> WernerState {
    topology.evaluate(sample).werner
}
