use std::collections::HashSet;
use std::path::Path;
use std::process::{Command, Output};

use qin_cli::output::{read_summary, SERIES_HEADER, SUMMARY_FILE};
use qin_cli::scenario::{Scenario, PARAMETER_KEYS};

fn qinsim(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qinsim"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("run qinsim")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn lookup<'a>(value: &'a toml::Value, key: &str) -> Option<&'a toml::Value> {
    key.split('.').try_fold(value, |v, part| v.get(part))
}

#[test]
fn every_reference_parameter_has_one_key() {
    let keys: HashSet<_> = PARAMETER_KEYS.iter().map(|(_, k)| *k).collect();
    assert_eq!(keys.len(), PARAMETER_KEYS.len(), "duplicate keys");
    let descriptions: HashSet<_> = PARAMETER_KEYS.iter().map(|(d, _)| *d).collect();
    assert_eq!(descriptions.len(), PARAMETER_KEYS.len(), "duplicate parameters");

    let default = toml::Value::try_from(Scenario::default()).unwrap();
    for (description, key) in PARAMETER_KEYS {
        let value = lookup(&default, key).unwrap_or_else(|| panic!("{description}: no key {key}"));
        assert!(!value.is_table(), "{key} is a table");

        // Setting the key alone must change the loaded scenario.
        let (section, leaf) = key.rsplit_once('.').unwrap();
        let changed = match value {
            toml::Value::Integer(i) => toml::Value::Integer(i + 1),
            toml::Value::Float(f) => toml::Value::Float(if *f == 0.0 { 1.0 } else { f * 0.5 }),
            other => panic!("{key}: unexpected value {other}"),
        };
        let mut doc = default.clone();
        let table = section
            .split('.')
            .try_fold(&mut doc, |v, part| v.get_mut(part))
            .and_then(|v| v.as_table_mut())
            .unwrap();
        table.insert(leaf.into(), changed);
        let text = toml::to_string(&doc).unwrap();
        let loaded = Scenario::from_toml(&text).unwrap_or_else(|e| panic!("{key}: {e}"));
        assert_ne!(loaded, Scenario::default(), "{key} has no effect");
    }
}

#[test]
fn reference_file_is_the_default() {
    let text = include_str!("../scenarios/reference.toml");
    assert_eq!(Scenario::from_toml(text).unwrap(), Scenario::default());
}

#[test]
fn reference_values() {
    let s = Scenario::default();
    assert_eq!(s.source.rate_hz, 1e9);
    assert_eq!(s.source.efficiency, 0.25);
    assert_eq!(s.memory.modes, 500);
    assert_eq!(s.memory.storage_time_s, 10e-3);
    assert_eq!(s.detectors.dark_count_rate_hz, 50.0);
    assert_eq!(s.stations.calern.rx_aperture_m, 1.5);
    assert_eq!(s.stations.palaiseau.rx_aperture_m, 1.0);
    assert_eq!(s.slot_s(), 1e-9);
}

#[test]
fn empty_scenario_matches_no_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let empty = write(dir.path(), "empty.toml", "");
    assert!(qinsim(&["simulate", "--out", "a"], dir.path()).status.success());
    assert!(qinsim(&["simulate", "--scenario", &empty, "--out", "b"], dir.path()).status.success());
    for name in ["series_straylight_0.csv", SUMMARY_FILE] {
        let a = std::fs::read(dir.path().join("a").join(name)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(name)).unwrap();
        assert_eq!(a, b, "{name}");
    }
}

#[test]
fn impossible_mask_exits_with_geometry_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "mask.toml", "[simulation]\nmin_elevation_deg = 90\n");
    let out = qinsim(&["simulate", "--scenario", &path, "--out", "o"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("no dual-visibility window"), "{stderr}");
    assert!(stderr.contains("max elevation"), "{stderr}");
}

#[test]
fn invalid_values_exit_2_naming_the_key() {
    let dir = tempfile::tempdir().unwrap();
    for (text, key) in [
        ("[detectors]\nefficiency = 1.2\n", "detectors.efficiency"),
        ("[detectors]\nefficency = 0.9\n", "detectors.efficency"),
        ("[links.paris]\nfiber_lengths_km = [14.0, -1.0]\n", "links.paris.fiber_lengths_km"),
    ] {
        let path = write(dir.path(), "bad.toml", text);
        let out = qinsim(&["simulate", "--scenario", &path], dir.path());
        assert_eq!(out.status.code(), Some(2), "{text}");
        let stderr = String::from_utf8_lossy(&out.stderr);
        assert!(stderr.contains(key), "{key} not in {stderr}");
    }
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ok = qinsim(&["verify"], dir.path());
    assert!(ok.status.success());
    let stdout = String::from_utf8_lossy(&ok.stdout);
    assert!(stdout.contains("16/16 Bell coefficients matched"), "{stdout}");
    assert_eq!(stdout.lines().filter(|l| l.starts_with("PASS")).count(), 5);

    let bad = qinsim(&["verify", "--perturb-bell-convention"], dir.path());
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("bell_expansion"));
}

#[test]
fn mc_table_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = qinsim(&["mc", "--trials", "2000", "--seed", "3", "--out", "a"], dir.path());
    let b = qinsim(&["mc", "--trials", "2000", "--seed", "3", "--out", "b"], dir.path());
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(
        std::fs::read(dir.path().join("a/mc.csv")).unwrap(),
        std::fs::read(dir.path().join("b/mc.csv")).unwrap()
    );
    let c = qinsim(&["mc", "--trials", "2000", "--seed", "4", "--out", "c"], dir.path());
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn mc_with_few_trials() {
    let dir = tempfile::tempdir().unwrap();
    let out = qinsim(&["mc", "--trials", "100"], dir.path());
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    let paris: Vec<&str> = stdout.lines().find(|l| l.starts_with("paris")).unwrap().split('\t').collect();
    let estimate: f64 = paris[3].parse().unwrap();
    assert!((0.95..=1.0).contains(&estimate), "{estimate}");

    let too_few = qinsim(&["mc", "--trials", "99"], dir.path());
    assert_eq!(too_few.status.code(), Some(2));
}

#[test]
fn straylight_flag_sets_levels() {
    let dir = tempfile::tempdir().unwrap();
    let out = qinsim(&["simulate", "--straylight", "0,250", "--out", "o"], dir.path());
    assert!(out.status.success());
    let mut names: Vec<_> = std::fs::read_dir(dir.path().join("o"))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names, ["series_straylight_0.csv", "series_straylight_250.csv", SUMMARY_FILE]);
}

#[test]
fn pass_writes_geometry() {
    let dir = tempfile::tempdir().unwrap();
    let out = qinsim(&["pass", "--out", "o"], dir.path());
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.path().join("o/pass.csv")).unwrap();
    assert!(text.starts_with("time_s,elevation_calern_rad,elevation_palaiseau_rad,range_calern_m"));
    assert_eq!(text.lines().count(), 402);
}

fn read_series(path: &Path) -> Vec<Vec<f64>> {
    let mut reader = csv::Reader::from_path(path).unwrap();
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, SERIES_HEADER);
    reader
        .records()
        .map(|r| r.unwrap().iter().map(|v| v.parse().unwrap()).collect())
        .collect()
}

fn close(a: f64, b: f64) -> bool {
    a == b || ((a - b) / b).abs() <= 1e-9
}

#[test]
fn summary_is_recomputable_from_series() {
    let dir = tempfile::tempdir().unwrap();
    let floor = write(dir.path(), "floor.toml", "[report]\nfidelity_floor = 0.7\n");
    assert!(qinsim(&["simulate", "--scenario", &floor, "--out", "o"], dir.path()).status.success());
    let out = dir.path().join("o");
    let summary = read_summary(&out.join(SUMMARY_FILE)).unwrap();
    let mask = summary.options.min_elevation_deg.to_radians();

    for f in &summary.fidelity {
        let rows = read_series(&out.join(&f.series_file));
        let inside: Vec<&Vec<f64>> = rows.iter().filter(|r| r[1] >= mask && r[2] >= mask).collect();
        let (first, last) = (inside[0], inside[inside.len() - 1]);
        assert!(close(last[0] - first[0], summary.pass.duration_s));
        assert!(close(first[0], summary.pass.window_start_s));

        let peak_sat = rows.iter().map(|r| r[5]).fold(0.0, f64::max);
        assert!(close(peak_sat, summary.rates.peak_sigma_sat_pairs_per_s));
        let end = rows.last().unwrap();
        assert!(close(end[7], summary.rates.total_sat_pairs));
        assert!(close(end[8], summary.rates.total_end_pairs));
        assert!(close(end[8] / end[7], summary.rates.end_to_ground_ratio));

        let peak_f = inside.iter().map(|r| r[10]).fold(0.0, f64::max);
        let floor_f = inside.iter().map(|r| r[10]).fold(f64::INFINITY, f64::min);
        assert!(close(peak_f, f.peak));
        assert!(close(floor_f, f.floor));
        assert!(close(first[10], f.at_window_start));
        assert!(close(last[10], f.at_window_end));
        for r in &rows {
            assert!((0.25..=1.0).contains(&r[10]));
            assert!(close(r[10], (1.0 + 3.0 * r[9]) / 4.0));
        }
        let above = f.pairs_above_floor.unwrap();
        assert!(above <= summary.rates.total_end_pairs);
    }
    let clean = &summary.fidelity[0];
    assert!(clean.pairs_above_floor.unwrap() > 0.0);
    assert_eq!(summary.gates.cz_gates, summary.rates.total_end_pairs.floor() as u64);
    assert_eq!(summary.gates.arbitrary_two_qubit_unitaries, summary.gates.cz_gates / 3);
}

#[test]
fn window_mode_and_strict_switches_change_rates() {
    let base = qin_cli::simulate::simulate(&Scenario::default()).unwrap().summary;
    let mut s = Scenario::default();
    s.simulation.sat_window_mode = true;
    let window = qin_cli::simulate::simulate(&s).unwrap().summary;
    assert!(window.rates.total_end_pairs > base.rates.total_end_pairs);
    let mut s = Scenario::default();
    s.simulation.strict_eq1 = true;
    let strict = qin_cli::simulate::simulate(&s).unwrap().summary;
    let ratio = strict.rates.total_end_pairs / base.rates.total_end_pairs;
    assert!((ratio / 1e18 - 1.0).abs() < 1e-9, "{ratio}");
    let mut s = Scenario::default();
    s.simulation.sat_source_efficiency = true;
    let literal = qin_cli::simulate::simulate(&s).unwrap().summary;
    let ratio = literal.rates.total_sat_pairs / base.rates.total_sat_pairs;
    assert!((ratio - 0.25).abs() < 1e-12, "{ratio}");
}
