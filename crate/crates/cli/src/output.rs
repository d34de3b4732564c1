//! CSV series and TOML summary files.

use std::fs::File;
use std::path::{Path, PathBuf};

use qin_core::orbit::PassSample;
use qin_core::SimulationSeries;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const SERIES_HEADER: [&str; 11] = [
    "time_s",
    "elevation_calern_rad",
    "elevation_palaiseau_rad",
    "link_budget_calern",
    "link_budget_palaiseau",
    "sigma_sat_pairs_per_s",
    "sigma_end_pairs_per_s",
    "cum_sat_pairs",
    "cum_end_pairs",
    "werner_end",
    "fidelity_end",
];

pub const PASS_HEADER: [&str; 7] = [
    "time_s",
    "elevation_calern_rad",
    "elevation_palaiseau_rad",
    "range_calern_m",
    "range_palaiseau_m",
    "link_budget_calern",
    "link_budget_palaiseau",
];

pub const SUMMARY_FILE: &str = "summary.toml";
pub const PASS_FILE: &str = "pass.csv";
pub const MC_FILE: &str = "mc.csv";

/// Shortest of fixed or scientific notation with 12 significant digits and
/// no trailing zeros.
pub fn format_sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn series_file_name(straylight_hz: f64) -> String {
    format!("series_straylight_{}.csv", format_sig12(straylight_hz))
}

fn io_error(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Output(format!("{}: {e}", path.display()))
}

fn write_rows<I>(path: &Path, header: &[&str], rows: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let file = File::create(path).map_err(|e| io_error(path, e))?;
    let mut writer = csv::Writer::from_writer(file);
    writer.write_record(header).map_err(|e| io_error(path, e))?;
    for row in rows {
        writer.write_record(&row).map_err(|e| io_error(path, e))?;
    }
    writer.flush().map_err(|e| io_error(path, e))
}

pub fn write_series(dir: &Path, series: &SimulationSeries) -> Result<PathBuf, CliError> {
    let path = dir.join(series_file_name(series.straylight_hz));
    let rows = series.records.iter().map(|r| {
        let mut row = vec![format_sig12(r.time_s)];
        row.extend(r.elevations_rad.iter().map(|&v| format_sig12(v)));
        row.extend(r.link_budgets.iter().map(|&v| format_sig12(v)));
        row.extend(
            [
                r.sigma_sat,
                r.sigma_end,
                r.cum_sat,
                r.cum_end,
                r.werner.value(),
                r.fidelity,
            ]
            .map(format_sig12),
        );
        row
    });
    write_rows(&path, &SERIES_HEADER, rows)?;
    Ok(path)
}

pub fn write_pass(dir: &Path, samples: &[PassSample], budgets: &[Vec<f64>]) -> Result<PathBuf, CliError> {
    let path = dir.join(PASS_FILE);
    let rows = samples.iter().zip(budgets).map(|(s, b)| {
        let mut row = vec![format_sig12(s.time_s)];
        row.extend(s.stations.iter().map(|g| format_sig12(g.elevation_rad)));
        row.extend(s.stations.iter().map(|g| format_sig12(g.slant_range_m)));
        row.extend(b.iter().map(|&v| format_sig12(v)));
        row
    });
    write_rows(&path, &PASS_HEADER, rows)?;
    Ok(path)
}

pub fn write_table(path: &Path, header: &[&str], rows: Vec<Vec<String>>) -> Result<(), CliError> {
    write_rows(path, header, rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub options: RunOptions,
    pub pass: PassSummary,
    pub rates: RateSummary,
    pub gates: GateSummary,
    pub fidelity: Vec<FidelitySummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOptions {
    pub seed: u64,
    pub strict_eq1: bool,
    pub sat_window_mode: bool,
    pub sat_source_efficiency: bool,
    pub min_elevation_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PassSummary {
    pub window_start_s: f64,
    pub window_end_s: f64,
    pub duration_s: f64,
    pub max_elevation_calern_deg: f64,
    pub max_elevation_palaiseau_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateSummary {
    pub peak_sigma_sat_pairs_per_s: f64,
    pub peak_sigma_sat_time_s: f64,
    pub total_sat_pairs: f64,
    pub total_end_pairs: f64,
    pub end_to_ground_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateSummary {
    pub delivered_pairs: u64,
    pub cz_gates: u64,
    pub arbitrary_two_qubit_unitaries: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelitySummary {
    pub straylight_hz: f64,
    pub series_file: String,
    pub peak: f64,
    pub peak_time_s: f64,
    /// Lowest fidelity inside the dual-visibility window.
    pub floor: f64,
    pub at_window_start: f64,
    pub at_window_end: f64,
    /// End-to-end pairs delivered while the fidelity met the report floor.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairs_above_floor: Option<f64>,
}

pub fn write_summary(dir: &Path, summary: &RunSummary) -> Result<PathBuf, CliError> {
    let path = dir.join(SUMMARY_FILE);
    let text = toml::to_string_pretty(summary).map_err(|e| io_error(&path, e))?;
    std::fs::write(&path, text).map_err(|e| io_error(&path, e))?;
    Ok(path)
}

pub fn read_summary(path: &Path) -> Result<RunSummary, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    toml::from_str(&text).map_err(|e| io_error(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_sig12(0.0), "0");
        assert_eq!(format_sig12(1.0), "1");
        assert_eq!(format_sig12(-2.5), "-2.5");
        assert_eq!(format_sig12(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_sig12(386_000.123456789), "386000.123457");
        assert_eq!(format_sig12(1e5), "100000");
        assert_eq!(format_sig12(2.9e-6), "2.9e-6");
        assert_eq!(format_sig12(1e12), "1e12");
        assert_eq!(format_sig12(3.28632097421e-5), "3.28632097421e-5");
        assert_eq!(format_sig12(0.99999999999999), "1");
        assert_eq!(format_sig12(1.23456789012345e-3), "0.00123456789012");
    }

    #[test]
    fn round_trip_within_precision() {
        for &x in &[std::f64::consts::PI, 4012.345678901234, 1.2345678e-9, 0.25] {
            let back: f64 = format_sig12(x).parse().unwrap();
            assert!(((back - x) / x).abs() < 1e-11);
        }
    }

    #[test]
    fn file_names() {
        assert_eq!(series_file_name(0.0), "series_straylight_0.csv");
        assert_eq!(series_file_name(1e3), "series_straylight_1000.csv");
        assert_eq!(series_file_name(1e5), "series_straylight_100000.csv");
    }
}
