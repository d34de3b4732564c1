//! Device parameter records and the Werner-parameter algebra.
//!
//! `Default` for every record is the reference parameter set used by the
//! Paris–Nice scenario.

use crate::error::{check_non_negative, check_positive, check_unit, Error, Result};

/// Entangled photon pair source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceModel {
    /// Pair generation efficiency per time slot.
    pub efficiency: f64,
    /// Pair attempt rate (Hz); one attempt per time slot.
    pub rate_hz: f64,
    pub fidelity: f64,
    pub wavelength_m: f64,
}

impl Default for SourceModel {
    fn default() -> Self {
        Self {
            efficiency: 0.25,
            rate_hz: 1e9,
            fidelity: 0.99,
            wavelength_m: 1550e-9,
        }
    }
}

impl SourceModel {
    pub fn validate(&self) -> Result<()> {
        check_unit("source efficiency", self.efficiency)?;
        check_positive("source rate", self.rate_hz)?;
        check_unit("source fidelity", self.fidelity)?;
        check_positive("source wavelength", self.wavelength_m)
    }

    /// Werner parameter of the emitted pairs, taken equal to the fidelity.
    pub fn werner(&self) -> WernerState {
        WernerState::clamped(self.fidelity)
    }
}

/// Heralded multimode quantum memory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MemoryModel {
    pub write_efficiency: f64,
    /// Characteristic storage time (s).
    pub storage_time_s: f64,
    pub modes: u32,
    /// Per-mode storage window (s). Reported only.
    pub storage_window_s: f64,
    pub fidelity: f64,
}

impl Default for MemoryModel {
    fn default() -> Self {
        Self {
            write_efficiency: 0.98,
            storage_time_s: 10e-3,
            modes: 500,
            storage_window_s: 250e-12,
            fidelity: 0.98,
        }
    }
}

impl MemoryModel {
    pub fn validate(&self) -> Result<()> {
        check_unit("memory write efficiency", self.write_efficiency)?;
        check_positive("memory storage time", self.storage_time_s)?;
        if self.modes == 0 {
            return Err(Error::Config("memory must have at least one mode".into()));
        }
        check_non_negative("memory storage window", self.storage_window_s)?;
        check_unit("memory fidelity", self.fidelity)
    }

    /// Storage time expressed in time slots of length `slot_s`.
    pub fn storage_time_slots(&self, slot_s: f64) -> f64 {
        self.storage_time_s / slot_s
    }
}

/// Single-photon detector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorModel {
    pub efficiency: f64,
    pub dark_count_rate_hz: f64,
    /// Background clicks from stray light, added to the dark counts.
    pub straylight_rate_hz: f64,
}

impl Default for DetectorModel {
    fn default() -> Self {
        Self {
            efficiency: 0.9,
            dark_count_rate_hz: 50.0,
            straylight_rate_hz: 0.0,
        }
    }
}

impl DetectorModel {
    pub fn validate(&self) -> Result<()> {
        check_unit("detector efficiency", self.efficiency)?;
        check_non_negative("dark count rate", self.dark_count_rate_hz)?;
        check_non_negative("straylight rate", self.straylight_rate_hz)
    }

    /// Rate of clicks not caused by a photon from the source.
    pub fn false_click_rate(&self) -> f64 {
        self.dark_count_rate_hz + self.straylight_rate_hz
    }
}

/// Linear-optics Bell state measurement, at most one half efficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BsmModel {
    pub efficiency: f64,
}

impl Default for BsmModel {
    fn default() -> Self {
        Self { efficiency: 0.5 }
    }
}

impl BsmModel {
    pub fn validate(&self) -> Result<()> {
        if (0.0..=0.5).contains(&self.efficiency) {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "BSM efficiency {} is outside [0, 0.5]",
                self.efficiency
            )))
        }
    }
}

/// Ion-photon wavelength converter (422 nm to 1550 nm).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConverterModel {
    pub efficiency: f64,
    pub fidelity: f64,
}

impl Default for ConverterModel {
    fn default() -> Self {
        Self {
            efficiency: 0.8,
            fidelity: 0.98,
        }
    }
}

impl ConverterModel {
    pub fn validate(&self) -> Result<()> {
        check_unit("converter efficiency", self.efficiency)?;
        check_unit("converter fidelity", self.fidelity)
    }
}

/// Werner parameter of a noisy Bell pair, in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct WernerState(f64);

impl WernerState {
    pub const PURE: WernerState = WernerState(1.0);
    pub const MIXED: WernerState = WernerState(0.0);

    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Self(value))
        } else {
            Err(Error::Domain(format!("Werner parameter {value} is outside [0, 1]")))
        }
    }

    pub(crate) fn clamped(value: f64) -> Self {
        Self(value.clamp(0.0, 1.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Composition of independent noisy stages.
    pub fn compose(self, other: WernerState) -> WernerState {
        WernerState(self.0 * other.0)
    }

    pub fn fidelity(self) -> f64 {
        fidelity_from_werner(self)
    }
}

impl std::iter::Product for WernerState {
    fn product<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(WernerState::PURE, WernerState::compose)
    }
}

/// Memory retrieval efficiency after storing for `t_k` seconds.
pub fn memory_efficiency(mem: &MemoryModel, t_k: f64) -> f64 {
    mem.write_efficiency * (-t_k / mem.storage_time_s).exp()
}

pub fn swap_efficiency(bsm: &BsmModel, det: &DetectorModel) -> f64 {
    bsm.efficiency * det.efficiency * det.efficiency
}

/// Bell-state fidelity `(1 + 3W) / 4`.
pub fn fidelity_from_werner(w: WernerState) -> f64 {
    (1.0 + 3.0 * w.0) / 4.0
}

pub fn werner_from_fidelity(fidelity: f64) -> Result<WernerState> {
    if !(0.25..=1.0).contains(&fidelity) {
        return Err(Error::Domain(format!(
            "fidelity {fidelity} is outside the Werner range [0.25, 1]"
        )));
    }
    Ok(WernerState::clamped((4.0 * fidelity - 1.0) / 3.0))
}

/// Probability that a click was caused by a photon from the source.
pub fn true_click_probability(true_rate: f64, false_rate: f64) -> Result<f64> {
    if !(true_rate >= 0.0 && false_rate >= 0.0) {
        return Err(Error::Domain(format!(
            "click rates must be non-negative (true {true_rate}, false {false_rate})"
        )));
    }
    if true_rate + false_rate == 0.0 {
        return Err(Error::Domain("no clicks: both click rates are zero".into()));
    }
    Ok(true_rate / (true_rate + false_rate))
}

/// Werner factor of a swap node joining two links with the given heralding
/// efficiencies.
pub fn bsm_werner(
    eta_left: f64,
    eta_right: f64,
    source_rate_hz: f64,
    false_rate_left: f64,
    false_rate_right: f64,
) -> Result<WernerState> {
    let left = true_click_probability(source_rate_hz * eta_left, false_rate_left)?;
    let right = true_click_probability(source_rate_hz * eta_right, false_rate_right)?;
    Ok(WernerState::clamped(left * right))
}

/// Werner parameter of an end user's ion-photon pair after conversion.
pub fn source_werner_with_conversion(src: &SourceModel, conv: &ConverterModel) -> WernerState {
    WernerState::clamped(src.fidelity * conv.fidelity)
}
