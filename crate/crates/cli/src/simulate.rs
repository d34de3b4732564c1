//! Pass geometry and the straylight sweep over one pass.

use std::path::{Path, PathBuf};

use qin_core::channel::single_path_efficiency;
use qin_core::chain::{simulate_pass, Channel};
use qin_core::orbit::{find_dual_visibility, longest_window, sample_pass};
use qin_core::{gate_budget, PassSample, SimulationSeries, VisibilityWindow};
use rayon::prelude::*;

use crate::output::{
    series_file_name, write_pass, write_series, write_summary, FidelitySummary, GateSummary,
    PassSummary, RateSummary, RunOptions, RunSummary,
};
use crate::scenario::{Scenario, STATION_NAMES};
use crate::CliError;

pub struct PassGeometry {
    pub samples: Vec<PassSample>,
    pub window: Option<VisibilityWindow>,
    /// Downlink efficiency per sample and station; 0 at or below the horizon.
    pub budgets: Vec<Vec<f64>>,
}

pub fn compute_pass(scenario: &Scenario) -> Result<PassGeometry, CliError> {
    let sim = &scenario.simulation;
    let samples = sample_pass(
        &scenario.orbit(),
        &scenario.earth(),
        &scenario.stations()?,
        sim.start_s,
        sim.end_s,
        sim.dt_s,
    )
    .map_err(|e| CliError::Scenario(e.to_string()))?;
    let window = longest_window(&find_dual_visibility(&samples, scenario.min_elevation_rad()));

    let topology = scenario.topology()?;
    let downlinks: Vec<_> = topology.links[1]
        .channels
        .iter()
        .filter_map(|c| match c {
            Channel::FreeSpace { params, station } => Some((*station, *params)),
            Channel::Fiber(_) => None,
        })
        .collect();
    let budgets = samples
        .iter()
        .map(|s| {
            (0..s.stations.len())
                .map(|i| {
                    let g = &s.stations[i];
                    downlinks
                        .iter()
                        .find(|(station, _)| *station == i)
                        .and_then(|(_, p)| single_path_efficiency(p, g.slant_range_m, g.elevation_rad).ok())
                        .unwrap_or(0.0)
                })
                .collect()
        })
        .collect();
    Ok(PassGeometry {
        samples,
        window,
        budgets,
    })
}

/// Why no window was found: the best elevations reached over the interval.
pub fn geometry_report(scenario: &Scenario, samples: &[PassSample]) -> String {
    let mut lines = vec![format!(
        "no interval with both stations at or above {} deg between {} s and {} s",
        scenario.simulation.min_elevation_deg, scenario.simulation.start_s, scenario.simulation.end_s
    )];
    for (i, name) in STATION_NAMES.iter().enumerate() {
        if let Some(best) = samples
            .iter()
            .max_by(|a, b| a.stations[i].elevation_rad.total_cmp(&b.stations[i].elevation_rad))
        {
            lines.push(format!(
                "  {name}: max elevation {:.2} deg at t = {} s",
                best.stations[i].elevation_rad.to_degrees(),
                best.time_s
            ));
        }
    }
    if let Some(best) = samples.iter().max_by(|a, b| a.min_elevation().total_cmp(&b.min_elevation())) {
        lines.push(format!(
            "  both: best lower elevation {:.2} deg at t = {} s",
            best.min_elevation().to_degrees(),
            best.time_s
        ));
    }
    lines.join("\n")
}

fn require_window(scenario: &Scenario, geometry: &PassGeometry) -> Result<VisibilityWindow, CliError> {
    geometry
        .window
        .ok_or_else(|| CliError::NoWindow(geometry_report(scenario, &geometry.samples)))
}

pub fn run_pass(scenario: &Scenario, out: &Path) -> Result<(PassGeometry, PathBuf), CliError> {
    let geometry = compute_pass(scenario)?;
    create_dir(out)?;
    let path = write_pass(out, &geometry.samples, &geometry.budgets)?;
    require_window(scenario, &geometry)?;
    Ok((geometry, path))
}

pub struct SimulationRun {
    pub geometry: PassGeometry,
    pub window: VisibilityWindow,
    pub series: Vec<SimulationSeries>,
    pub summary: RunSummary,
}

pub fn simulate(scenario: &Scenario) -> Result<SimulationRun, CliError> {
    let geometry = compute_pass(scenario)?;
    let window = require_window(scenario, &geometry)?;
    let topology = scenario.topology()?;
    let series: Vec<SimulationSeries> = scenario
        .straylight
        .levels_hz
        .par_iter()
        .map(|&level| simulate_pass(&topology, &geometry.samples, level))
        .collect();
    let summary = summarize(scenario, &geometry.samples, &window, &series);
    Ok(SimulationRun {
        geometry,
        window,
        series,
        summary,
    })
}

fn max_elevation_deg(samples: &[PassSample], station: usize) -> f64 {
    samples
        .iter()
        .map(|s| s.stations[station].elevation_rad)
        .fold(f64::NEG_INFINITY, f64::max)
        .to_degrees()
}

/// Trapezoidal integral of the end-to-end rate over the samples whose
/// fidelity is at least `floor`.
fn pairs_above(series: &SimulationSeries, floor: f64) -> f64 {
    let rate = |r: &qin_core::chain::SeriesRecord| if r.fidelity >= floor { r.sigma_end } else { 0.0 };
    series
        .records
        .windows(2)
        .map(|w| 0.5 * (w[1].time_s - w[0].time_s) * (rate(&w[0]) + rate(&w[1])))
        .sum()
}

pub fn summarize(
    scenario: &Scenario,
    samples: &[PassSample],
    window: &VisibilityWindow,
    series: &[SimulationSeries],
) -> RunSummary {
    let reference = &series[0];
    let peak = reference
        .records
        .iter()
        .max_by(|a, b| a.sigma_sat.total_cmp(&b.sigma_sat))
        .expect("non-empty series");
    let total_sat = reference.total_sat();
    let total_end = reference.total_end();
    let budget = gate_budget(total_end.floor() as u64);

    let fidelity = series
        .iter()
        .map(|s| {
            let inside = &s.records[window.first_index..=window.last_index];
            let best = inside
                .iter()
                .max_by(|a, b| a.fidelity.total_cmp(&b.fidelity))
                .expect("non-empty window");
            FidelitySummary {
                straylight_hz: s.straylight_hz,
                series_file: series_file_name(s.straylight_hz),
                peak: best.fidelity,
                peak_time_s: best.time_s,
                floor: inside.iter().map(|r| r.fidelity).fold(f64::INFINITY, f64::min),
                at_window_start: inside[0].fidelity,
                at_window_end: inside[inside.len() - 1].fidelity,
                pairs_above_floor: scenario.report.fidelity_floor.map(|f| pairs_above(s, f)),
            }
        })
        .collect();

    let sim = &scenario.simulation;
    RunSummary {
        options: RunOptions {
            seed: sim.seed,
            strict_eq1: sim.strict_eq1,
            sat_window_mode: sim.sat_window_mode,
            sat_source_efficiency: sim.sat_source_efficiency,
            min_elevation_deg: sim.min_elevation_deg,
        },
        pass: PassSummary {
            window_start_s: window.start_s,
            window_end_s: window.end_s,
            duration_s: window.duration(),
            max_elevation_calern_deg: max_elevation_deg(samples, 0),
            max_elevation_palaiseau_deg: max_elevation_deg(samples, 1),
        },
        rates: RateSummary {
            peak_sigma_sat_pairs_per_s: peak.sigma_sat,
            peak_sigma_sat_time_s: peak.time_s,
            total_sat_pairs: total_sat,
            total_end_pairs: total_end,
            end_to_ground_ratio: if total_sat > 0.0 { total_end / total_sat } else { 0.0 },
        },
        gates: GateSummary {
            delivered_pairs: budget.delivered_pairs,
            cz_gates: budget.cz_gates,
            arbitrary_two_qubit_unitaries: budget.arbitrary_two_qubit_unitaries,
        },
        fidelity,
    }
}

fn create_dir(out: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(out).map_err(|e| CliError::Output(format!("{}: {e}", out.display())))
}

/// Series files in straylight order, then the summary.
pub fn write_outputs(run: &SimulationRun, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    create_dir(out)?;
    let mut written = run
        .series
        .iter()
        .map(|s| write_series(out, s))
        .collect::<Result<Vec<_>, _>>()?;
    written.push(write_summary(out, &run.summary)?);
    Ok(written)
}
