//! Closed-form window success against trial simulation, per elementary link.

use qin_core::chain::{
    elementary_link_efficiency, monte_carlo_elementary, z_score, MonteCarloEstimate,
};

use crate::output::format_sig12;
use crate::scenario::Scenario;
use crate::simulate::compute_pass;
use crate::CliError;

/// Rows beyond this many standard errors fail the run.
pub const Z_LIMIT: f64 = 5.0;

pub const HEADER: [&str; 8] = [
    "link",
    "time_s",
    "closed_form",
    "estimate",
    "standard_error",
    "z",
    "ci_low",
    "ci_high",
];

#[derive(Debug, Clone, PartialEq)]
pub struct McRow {
    pub link: String,
    /// Geometry instant for the space link.
    pub time_s: Option<f64>,
    pub closed_form: f64,
    pub estimate: MonteCarloEstimate,
    pub z: f64,
}

impl McRow {
    pub fn cells(&self) -> Vec<String> {
        vec![
            self.link.clone(),
            self.time_s.map_or_else(String::new, format_sig12),
            format_sig12(self.closed_form),
            format_sig12(self.estimate.estimate),
            format_sig12(self.estimate.standard_error),
            format!("{:.3}", self.z),
            format_sig12(self.estimate.interval.0),
            format_sig12(self.estimate.interval.1),
        ]
    }
}

/// One row per elementary link. The space link is evaluated where the lower
/// of the two station elevations is highest, and skipped without a window.
pub fn run_mc(scenario: &Scenario, trials: u64, seed: u64) -> Result<Vec<McRow>, CliError> {
    if trials < 100 {
        return Err(CliError::Scenario(format!("--trials {trials}: expected at least 100")));
    }
    let topology = scenario.topology()?;
    let geometry = compute_pass(scenario)?;
    let best = geometry.window.map(|w| {
        geometry.samples[w.first_index..=w.last_index]
            .iter()
            .max_by(|a, b| a.min_elevation().total_cmp(&b.min_elevation()))
            .expect("non-empty window")
    });

    let mut rows = Vec::new();
    for (i, link) in topology.links.iter().enumerate() {
        let sample = if link.is_space_link() {
            match best {
                Some(s) => Some(s),
                None => continue,
            }
        } else {
            None
        };
        let snapshot = link.snapshot(sample, topology.options.min_elevation_rad);
        let closed_form = elementary_link_efficiency(&snapshot, topology.modes, topology.slot_s);
        let estimate = monte_carlo_elementary(
            &snapshot,
            topology.modes,
            topology.slot_s,
            trials,
            seed.wrapping_add(i as u64),
        );
        rows.push(McRow {
            link: link.name.clone(),
            time_s: sample.map(|s| s.time_s),
            closed_form,
            z: z_score(&estimate, closed_form),
            estimate,
        });
    }
    Ok(rows)
}

pub fn format_table(rows: &[McRow]) -> String {
    let mut lines = vec![HEADER.join("\t")];
    lines.extend(rows.iter().map(|r| r.cells().join("\t")));
    lines.join("\n") + "\n"
}

pub fn all_within_limit(rows: &[McRow]) -> bool {
    rows.iter().all(|r| r.z.abs() <= Z_LIMIT)
}
