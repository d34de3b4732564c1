use rayon::prelude::*;

use super::{Channel, ChainTopology};
use crate::channel::single_path_efficiency;
use crate::devices::WernerState;
use crate::orbit::PassSample;

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesRecord {
    pub time_s: f64,
    /// Per ground station, same order as the pass samples.
    pub elevations_rad: Vec<f64>,
    /// Single-path downlink efficiency per station; 0 below the horizon.
    pub link_budgets: Vec<f64>,
    pub sigma_sat: f64,
    pub sigma_end: f64,
    pub cum_sat: f64,
    pub cum_end: f64,
    pub werner: WernerState,
    pub fidelity: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SimulationSeries {
    pub straylight_hz: f64,
    pub records: Vec<SeriesRecord>,
}

impl SimulationSeries {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn total_sat(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.cum_sat)
    }

    pub fn total_end(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.cum_end)
    }

    pub fn peak_sigma_sat(&self) -> f64 {
        self.records.iter().map(|r| r.sigma_sat).fold(0.0, f64::max)
    }
}

/// Trapezoidal running integrals of the two rates, starting from zero.
pub fn cumulate(series: &mut SimulationSeries) {
    let mut sat = 0.0;
    let mut end = 0.0;
    let mut previous: Option<(f64, f64, f64)> = None;
    for record in &mut series.records {
        if let Some((t, s, e)) = previous {
            let dt = record.time_s - t;
            sat += 0.5 * dt * (s + record.sigma_sat);
            end += 0.5 * dt * (e + record.sigma_end);
        }
        record.cum_sat = sat;
        record.cum_end = end;
        previous = Some((record.time_s, record.sigma_sat, record.sigma_end));
    }
}

fn station_budgets(topology: &ChainTopology, sample: &PassSample) -> Vec<f64> {
    let downlinks: Vec<_> = topology
        .links
        .iter()
        .flat_map(|l| l.channels.iter())
        .filter_map(|c| match c {
            Channel::FreeSpace { params, station } => Some((*station, params)),
            Channel::Fiber(_) => None,
        })
        .collect();
    sample
        .stations
        .iter()
        .enumerate()
        .map(|(i, geometry)| {
            downlinks
                .iter()
                .find(|(station, _)| *station == i)
                .and_then(|(_, params)| {
                    single_path_efficiency(params, geometry.slant_range_m, geometry.elevation_rad).ok()
                })
                .unwrap_or(0.0)
        })
        .collect()
}

/// Rates, Werner parameter and running totals at every pass sample, with
/// `straylight_hz` on the space-facing detectors.
pub fn simulate_pass(
    topology: &ChainTopology,
    samples: &[PassSample],
    straylight_hz: f64,
) -> SimulationSeries {
    let topology = topology.with_straylight(straylight_hz);
    let records = samples
        .par_iter()
        .map(|sample| {
            let state = topology.evaluate(Some(sample));
            SeriesRecord {
                time_s: sample.time_s,
                elevations_rad: sample.stations.iter().map(|g| g.elevation_rad).collect(),
                link_budgets: station_budgets(&topology, sample),
                sigma_sat: state.sigma_sat,
                sigma_end: state.sigma_end,
                cum_sat: 0.0,
                cum_end: 0.0,
                werner: state.werner,
                fidelity: state.werner.fidelity(),
            }
        })
        .collect();
    let mut series = SimulationSeries {
        straylight_hz,
        records,
    };
    cumulate(&mut series);
    series
}
