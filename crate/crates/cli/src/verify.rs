//! Self-checks of the analytic identities behind the model.

use std::f64::consts::FRAC_1_SQRT_2;

use qin_core::chain::Channel;
use qin_core::channel::{receiver_capture, receiver_capture_gaussian, FiberChannel, FreeSpaceParams};
use qin_core::devices::{fidelity_from_werner, werner_from_fidelity};
use qin_core::teleport::{
    build_initial_state, check_expansion, project_bsm, BellConvention, BellLabel,
};
use qin_core::WernerState;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scenario::Scenario;

const TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Self { name, passed, detail }
    }
}

pub fn bell_expansion(convention: BellConvention) -> Check {
    let report = check_expansion(convention, TOLERANCE);
    let mut detail = format!("{}/16 Bell coefficients matched", report.matched);
    if let Some(first) = report.mismatches.first() {
        detail.push_str(&format!("; {} mismatches, first {first}", report.mismatches.len()));
    }
    Check::new("bell_expansion", report.passed(), detail)
}

pub fn bell_projection(convention: BellConvention) -> Check {
    let name = "bell_projection";
    let outcome = project_bsm(
        &build_initial_state(),
        BellLabel::PhiPlus,
        BellLabel::PsiPlus,
        convention,
    );
    match outcome {
        Ok(p) => {
            let expected = [FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2];
            let error = p
                .spins
                .amplitudes()
                .iter()
                .zip(expected)
                .map(|(a, e)| (a - e).norm())
                .fold(0.0, f64::max);
            let passed = error <= TOLERANCE && (p.probability - 1.0 / 16.0).abs() <= TOLERANCE;
            Check::new(
                name,
                passed,
                format!(
                    "(phi+, psi+) gives (dd + uu)/sqrt2 with max error {error:.1e}, probability {}",
                    p.probability
                ),
            )
        }
        Err(e) => Check::new(name, false, e.to_string()),
    }
}

/// Everything ideal except the Bell state measurements.
pub fn bsm_loss() -> Check {
    let scenario = Scenario::default();
    let mut t = scenario.topology().expect("default scenario is valid");
    for user in [&mut t.alice, &mut t.bob] {
        user.converter.efficiency = 1.0;
        user.memory.write_efficiency = 1.0;
        user.memory.storage_time_s = f64::INFINITY;
    }
    for link in &mut t.links {
        link.source.efficiency = 1.0;
        link.apply_source_efficiency = true;
        link.channels = [
            Channel::Fiber(FiberChannel::new(0.0, 0.0).unwrap()),
            Channel::Fiber(FiberChannel::new(0.0, 0.0).unwrap()),
        ];
        for m in &mut link.memories {
            m.write_efficiency = 1.0;
            m.storage_time_s = f64::INFINITY;
        }
    }
    for node in &mut t.nodes {
        node.detector.efficiency = 1.0;
    }
    let swap_rate = t.source_rate_hz / t.modes as f64;
    let transmission = t.evaluate(None).sigma_end / swap_rate;
    Check::new(
        "bsm_loss",
        transmission == 0.0625,
        format!(
            "end-to-end transmission {transmission} ({:.2}% loss)",
            100.0 * (1.0 - transmission)
        ),
    )
}

pub fn capture_forms(draws: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..draws {
        let p = FreeSpaceParams {
            wavelength_m: rng.random_range(400e-9..2000e-9),
            tx_aperture_m: rng.random_range(0.05..1.0),
            rx_aperture_m: rng.random_range(0.1..2.0),
            tx_internal: 1.0,
            rx_internal: 1.0,
            zenith_transmittance: 1.0,
        };
        let range = rng.random_range(1e5..5e6);
        let a = receiver_capture(&p, range);
        let b = receiver_capture_gaussian(&p, range);
        worst = worst.max(((a - b) / a).abs());
    }
    Check::new(
        "capture_forms",
        worst <= TOLERANCE,
        format!("{draws} draws, max relative difference {worst:.1e}"),
    )
}

pub fn fidelity_inverse(steps: usize) -> Check {
    let mut worst: f64 = 0.0;
    for i in 0..=steps {
        let w = i as f64 / steps as f64;
        let f = fidelity_from_werner(WernerState::new(w).unwrap());
        let back = werner_from_fidelity(f).map(|s| s.value()).unwrap_or(f64::NAN);
        worst = worst.max((back - w).abs());
    }
    let endpoints = fidelity_from_werner(WernerState::MIXED) == 0.25
        && fidelity_from_werner(WernerState::PURE) == 1.0;
    Check::new(
        "fidelity_inverse",
        worst <= TOLERANCE && endpoints,
        format!("{} grid points, max error {worst:.1e}", steps + 1),
    )
}

pub fn run_all(convention: BellConvention) -> Vec<Check> {
    vec![
        bell_expansion(convention),
        bell_projection(convention),
        bsm_loss(),
        capture_forms(1000, 17),
        fidelity_inverse(1000),
    ]
}

pub fn report(checks: &[Check]) -> String {
    checks
        .iter()
        .map(|c| {
            let status = if c.passed { "PASS" } else { "FAIL" };
            format!("{status} {:<18} {}\n", c.name, c.detail)
        })
        .collect()
}
