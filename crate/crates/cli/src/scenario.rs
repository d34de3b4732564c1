//! Scenario file: TOML with one key per model parameter. Omitted keys take the
//! reference values; unknown keys are rejected.
//!
//! Units are part of every key name: `_m`, `_km`, `_s`, `_hz` (counts per
//! second), `_deg`, `_db_per_km`. Keys without a unit suffix are
//! dimensionless efficiencies, transmittances or fidelities in `[0, 1]`.

use std::path::Path;

use qin_core::chain::{
    Channel, ChainOptions, ChainTopology, ElementaryLink, EndUser, SwapNode,
};
use qin_core::channel::{FiberChannel, FreeSpaceParams};
use qin_core::devices::{BsmModel, ConverterModel, DetectorModel, MemoryModel, SourceModel};
use qin_core::{EarthModel, GeodeticPoint, OrbitSpec};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Station order in pass samples and output columns.
pub const STATION_NAMES: [&str; 2] = ["calern", "palaiseau"];
const CALERN: usize = 0;
const PALAISEAU: usize = 1;

/// Reference parameter table: description and the one key that sets it.
pub const PARAMETER_KEYS: [(&str, &str); 27] = [
    ("Satellite altitude", "orbit.altitude_km"),
    ("Satellite inclination", "orbit.inclination_deg"),
    ("Right ascension of the ascending node", "orbit.raan_deg"),
    ("Start simulation date", "simulation.start_s"),
    ("Entangled photon source wavelength", "source.wavelength_nm"),
    ("Entangled photon source efficiency", "source.efficiency"),
    ("Entangled photon source rate", "source.rate_hz"),
    ("Wavelength conversion efficiency", "converter.efficiency"),
    ("Wavelength conversion fidelity", "converter.fidelity"),
    ("Entangled photon source fidelity", "source.fidelity"),
    ("Quantum memory writing efficiency", "memory.write_efficiency"),
    ("Quantum memory fidelity", "memory.fidelity"),
    ("Quantum memory storage modes", "memory.modes"),
    ("Quantum memory characteristic storage time", "memory.storage_time_s"),
    ("Quantum memory storage window", "memory.storage_window_s"),
    ("SNSPD detector efficiency", "detectors.efficiency"),
    ("SNSPD detector dark count rate", "detectors.dark_count_rate_hz"),
    ("BSM efficiency", "bsm.efficiency"),
    ("Optical fiber attenuation", "fiber.attenuation_db_per_km"),
    ("Optical fiber link fidelity", "fiber.fidelity"),
    ("Tx telescope diameter", "space_link.tx_aperture_m"),
    ("Rx telescope diameter at Calern", "stations.calern.rx_aperture_m"),
    ("Rx telescope diameter at Palaiseau", "stations.palaiseau.rx_aperture_m"),
    ("Free-space link fidelity", "space_link.fidelity"),
    ("Atmospheric transmittance at zenith", "space_link.zenith_transmittance"),
    ("Internal transmittance of the ground telescope", "space_link.rx_internal"),
    ("Internal transmittance of the on-board telescope", "space_link.tx_internal"),
];

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    pub orbit: OrbitSection,
    pub earth: EarthSection,
    pub stations: StationsSection,
    pub source: SourceSection,
    pub converter: ConverterSection,
    pub memory: MemorySection,
    pub detectors: DetectorSection,
    pub bsm: BsmSection,
    pub fiber: FiberSection,
    pub links: LinksSection,
    pub space_link: SpaceLinkSection,
    pub straylight: StraylightSection,
    pub simulation: SimulationSection,
    pub report: ReportSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OrbitSection {
    pub altitude_km: f64,
    pub inclination_deg: f64,
    pub raan_deg: f64,
    /// Argument of latitude at `epoch_s`.
    pub arg_latitude_deg: f64,
    /// Simulation time at which the inertial and earth-fixed frames coincide.
    pub epoch_s: f64,
}

impl Default for OrbitSection {
    fn default() -> Self {
        Self {
            altitude_km: 600.0,
            inclination_deg: 60.0,
            raan_deg: 72.5,
            arg_latitude_deg: 293.3,
            epoch_s: -24_960.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EarthSection {
    pub radius_m: f64,
    pub gravitational_parameter_m3_per_s2: f64,
    pub rotation_rate_rad_per_s: f64,
}

impl Default for EarthSection {
    fn default() -> Self {
        let e = EarthModel::default();
        Self {
            radius_m: e.radius_m,
            gravitational_parameter_m3_per_s2: e.gravitational_parameter,
            rotation_rate_rad_per_s: e.rotation_rate,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StationSection {
    pub latitude_deg: f64,
    pub longitude_deg: f64,
    pub altitude_m: f64,
    pub rx_aperture_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StationsSection {
    pub calern: StationSection,
    pub palaiseau: StationSection,
}

impl Default for StationsSection {
    fn default() -> Self {
        Self {
            calern: StationSection {
                latitude_deg: 43.754,
                longitude_deg: 6.921,
                altitude_m: 1270.0,
                rx_aperture_m: 1.5,
            },
            palaiseau: StationSection {
                latitude_deg: 48.713,
                longitude_deg: 2.208,
                altitude_m: 160.0,
                rx_aperture_m: 1.0,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SourceSection {
    pub efficiency: f64,
    pub rate_hz: f64,
    pub fidelity: f64,
    pub wavelength_nm: f64,
}

impl Default for SourceSection {
    fn default() -> Self {
        let s = SourceModel::default();
        Self {
            efficiency: s.efficiency,
            rate_hz: s.rate_hz,
            fidelity: s.fidelity,
            wavelength_nm: s.wavelength_m * 1e9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConverterSection {
    pub efficiency: f64,
    pub fidelity: f64,
}

impl Default for ConverterSection {
    fn default() -> Self {
        let c = ConverterModel::default();
        Self {
            efficiency: c.efficiency,
            fidelity: c.fidelity,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MemorySection {
    pub write_efficiency: f64,
    pub fidelity: f64,
    pub modes: u32,
    pub storage_time_s: f64,
    pub storage_window_s: f64,
}

impl Default for MemorySection {
    fn default() -> Self {
        let m = MemoryModel::default();
        Self {
            write_efficiency: m.write_efficiency,
            fidelity: m.fidelity,
            modes: m.modes,
            storage_time_s: m.storage_time_s,
            storage_window_s: m.storage_window_s,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectorSection {
    pub efficiency: f64,
    pub dark_count_rate_hz: f64,
}

impl Default for DetectorSection {
    fn default() -> Self {
        let d = DetectorModel::default();
        Self {
            efficiency: d.efficiency,
            dark_count_rate_hz: d.dark_count_rate_hz,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BsmSection {
    pub efficiency: f64,
}

impl Default for BsmSection {
    fn default() -> Self {
        Self {
            efficiency: BsmModel::default().efficiency,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FiberSection {
    pub attenuation_db_per_km: f64,
    pub fidelity: f64,
}

impl Default for FiberSection {
    fn default() -> Self {
        Self {
            attenuation_db_per_km: 0.2,
            fidelity: 0.99,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundLinkSection {
    /// Source to the two memories of the link.
    pub fiber_lengths_km: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinksSection {
    /// Alice to the Palaiseau ground station.
    pub paris: GroundLinkSection,
    /// Calern ground station to Bob.
    pub nice: GroundLinkSection,
}

impl Default for LinksSection {
    fn default() -> Self {
        Self {
            paris: GroundLinkSection {
                fiber_lengths_km: [14.0, 45.0],
            },
            nice: GroundLinkSection {
                fiber_lengths_km: [32.0, 35.0],
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpaceLinkSection {
    pub tx_aperture_m: f64,
    pub tx_internal: f64,
    pub rx_internal: f64,
    pub zenith_transmittance: f64,
    pub fidelity: f64,
}

impl Default for SpaceLinkSection {
    fn default() -> Self {
        Self {
            tx_aperture_m: 0.4,
            tx_internal: 0.7,
            rx_internal: 0.1,
            zenith_transmittance: 0.2,
            fidelity: 0.99,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StraylightSection {
    /// Stray-light click rates on the space-facing detectors, one run each.
    pub levels_hz: Vec<f64>,
}

impl Default for StraylightSection {
    fn default() -> Self {
        Self {
            levels_hz: vec![0.0, 1e3, 1e5],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationSection {
    pub start_s: f64,
    pub end_s: f64,
    pub dt_s: f64,
    pub min_elevation_deg: f64,
    /// Memory time slot; defaults to one source period.
    pub slot_s: Option<f64>,
    pub seed: u64,
    pub monte_carlo_trials: u64,
    /// Multiply the end-user factors of the end-to-end rate by the source rate.
    pub strict_eq1: bool,
    /// Aggregate the space link over the memory window instead of one attempt.
    pub sat_window_mode: bool,
    /// Apply the pair generation efficiency of the satellite source.
    pub sat_source_efficiency: bool,
}

impl Default for SimulationSection {
    fn default() -> Self {
        Self {
            start_s: 0.0,
            end_s: 400.0,
            dt_s: 1.0,
            min_elevation_deg: 20.0,
            slot_s: None,
            seed: 1,
            monte_carlo_trials: 100_000,
            strict_eq1: false,
            sat_window_mode: false,
            sat_source_efficiency: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportSection {
    /// Also count the pairs delivered while the fidelity is at least this.
    pub fidelity_floor: Option<f64>,
}

fn invalid(path: &str, value: impl std::fmt::Display, expected: &str) -> CliError {
    CliError::Scenario(format!("{path} = {value}: expected {expected}"))
}

fn unit(path: &str, v: f64) -> Result<(), CliError> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(invalid(path, v, "a value in [0, 1]"))
    }
}

fn positive(path: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(path, v, "a finite positive value"))
    }
}

fn non_negative(path: &str, v: f64) -> Result<(), CliError> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(path, v, "a finite non-negative value"))
    }
}

fn finite(path: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(invalid(path, v, "a finite value"))
    }
}

fn in_range(path: &str, v: f64, lo: f64, hi: f64) -> Result<(), CliError> {
    if (lo..=hi).contains(&v) {
        Ok(())
    } else {
        Err(invalid(path, v, &format!("a value in [{lo}, {hi}]")))
    }
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let de = toml::de::Deserializer::parse(text)
            .map_err(|e| CliError::Scenario(format!("parse error: {e}")))?;
        let scenario: Scenario = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            CliError::Scenario(format!("{path}: {}", e.into_inner().message()))
        })?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Scenario(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let o = &self.orbit;
        positive("orbit.altitude_km", o.altitude_km)?;
        in_range("orbit.inclination_deg", o.inclination_deg, 0.0, 180.0)?;
        finite("orbit.raan_deg", o.raan_deg)?;
        finite("orbit.arg_latitude_deg", o.arg_latitude_deg)?;
        finite("orbit.epoch_s", o.epoch_s)?;

        positive("earth.radius_m", self.earth.radius_m)?;
        positive(
            "earth.gravitational_parameter_m3_per_s2",
            self.earth.gravitational_parameter_m3_per_s2,
        )?;
        positive("earth.rotation_rate_rad_per_s", self.earth.rotation_rate_rad_per_s)?;

        for (name, st) in self.station_sections() {
            in_range(&format!("stations.{name}.latitude_deg"), st.latitude_deg, -90.0, 90.0)?;
            finite(&format!("stations.{name}.longitude_deg"), st.longitude_deg)?;
            finite(&format!("stations.{name}.altitude_m"), st.altitude_m)?;
            positive(&format!("stations.{name}.rx_aperture_m"), st.rx_aperture_m)?;
        }

        unit("source.efficiency", self.source.efficiency)?;
        positive("source.rate_hz", self.source.rate_hz)?;
        unit("source.fidelity", self.source.fidelity)?;
        positive("source.wavelength_nm", self.source.wavelength_nm)?;
        unit("converter.efficiency", self.converter.efficiency)?;
        unit("converter.fidelity", self.converter.fidelity)?;

        let m = &self.memory;
        unit("memory.write_efficiency", m.write_efficiency)?;
        unit("memory.fidelity", m.fidelity)?;
        if m.modes == 0 {
            return Err(invalid("memory.modes", 0, "at least 1"));
        }
        positive("memory.storage_time_s", m.storage_time_s)?;
        non_negative("memory.storage_window_s", m.storage_window_s)?;

        unit("detectors.efficiency", self.detectors.efficiency)?;
        non_negative("detectors.dark_count_rate_hz", self.detectors.dark_count_rate_hz)?;
        in_range("bsm.efficiency", self.bsm.efficiency, 0.0, 0.5)?;
        non_negative("fiber.attenuation_db_per_km", self.fiber.attenuation_db_per_km)?;
        unit("fiber.fidelity", self.fiber.fidelity)?;

        for (name, link) in [("paris", &self.links.paris), ("nice", &self.links.nice)] {
            for length in link.fiber_lengths_km {
                non_negative(&format!("links.{name}.fiber_lengths_km"), length)?;
            }
        }

        let s = &self.space_link;
        positive("space_link.tx_aperture_m", s.tx_aperture_m)?;
        unit("space_link.tx_internal", s.tx_internal)?;
        unit("space_link.rx_internal", s.rx_internal)?;
        unit("space_link.zenith_transmittance", s.zenith_transmittance)?;
        unit("space_link.fidelity", s.fidelity)?;

        if self.straylight.levels_hz.is_empty() {
            return Err(invalid("straylight.levels_hz", "[]", "at least one level"));
        }
        for &level in &self.straylight.levels_hz {
            non_negative("straylight.levels_hz", level)?;
        }

        let sim = &self.simulation;
        finite("simulation.start_s", sim.start_s)?;
        finite("simulation.end_s", sim.end_s)?;
        if sim.end_s < sim.start_s {
            return Err(invalid("simulation.end_s", sim.end_s, "a time not before simulation.start_s"));
        }
        positive("simulation.dt_s", sim.dt_s)?;
        in_range("simulation.min_elevation_deg", sim.min_elevation_deg, 0.0, 90.0)?;
        if let Some(slot) = sim.slot_s {
            positive("simulation.slot_s", slot)?;
        }
        if sim.monte_carlo_trials < 100 {
            return Err(invalid("simulation.monte_carlo_trials", sim.monte_carlo_trials, "at least 100"));
        }
        if let Some(floor) = self.report.fidelity_floor {
            in_range("report.fidelity_floor", floor, 0.25, 1.0)?;
        }
        Ok(())
    }

    fn station_sections(&self) -> [(&'static str, &StationSection); 2] {
        [
            (STATION_NAMES[CALERN], &self.stations.calern),
            (STATION_NAMES[PALAISEAU], &self.stations.palaiseau),
        ]
    }

    pub fn earth(&self) -> EarthModel {
        EarthModel {
            radius_m: self.earth.radius_m,
            gravitational_parameter: self.earth.gravitational_parameter_m3_per_s2,
            rotation_rate: self.earth.rotation_rate_rad_per_s,
        }
    }

    pub fn orbit(&self) -> OrbitSpec {
        OrbitSpec {
            altitude_m: self.orbit.altitude_km * 1e3,
            inclination_deg: self.orbit.inclination_deg,
            raan_deg: self.orbit.raan_deg,
            argument_of_latitude_deg: self.orbit.arg_latitude_deg,
            epoch_s: self.orbit.epoch_s,
        }
    }

    /// Ground stations in [`STATION_NAMES`] order.
    pub fn stations(&self) -> Result<Vec<GeodeticPoint>, CliError> {
        self.station_sections()
            .iter()
            .map(|(name, st)| {
                GeodeticPoint::new(st.latitude_deg, st.longitude_deg, st.altitude_m)
                    .map_err(|e| CliError::Scenario(format!("stations.{name}: {e}")))
            })
            .collect()
    }

    pub fn min_elevation_rad(&self) -> f64 {
        self.simulation.min_elevation_deg.to_radians()
    }

    pub fn slot_s(&self) -> f64 {
        self.simulation.slot_s.unwrap_or(1.0 / self.source.rate_hz)
    }

    fn source_model(&self) -> SourceModel {
        SourceModel {
            efficiency: self.source.efficiency,
            rate_hz: self.source.rate_hz,
            fidelity: self.source.fidelity,
            wavelength_m: self.source.wavelength_nm * 1e-9,
        }
    }

    fn memory_model(&self) -> MemoryModel {
        MemoryModel {
            write_efficiency: self.memory.write_efficiency,
            storage_time_s: self.memory.storage_time_s,
            modes: self.memory.modes,
            storage_window_s: self.memory.storage_window_s,
            fidelity: self.memory.fidelity,
        }
    }

    fn downlink(&self, station: usize) -> Channel {
        let rx_aperture_m = self.station_sections()[station].1.rx_aperture_m;
        Channel::FreeSpace {
            params: FreeSpaceParams {
                wavelength_m: self.source.wavelength_nm * 1e-9,
                tx_aperture_m: self.space_link.tx_aperture_m,
                rx_aperture_m,
                tx_internal: self.space_link.tx_internal,
                rx_internal: self.space_link.rx_internal,
                zenith_transmittance: self.space_link.zenith_transmittance,
            },
            station,
        }
    }

    fn ground_link(&self, name: &str, section: &GroundLinkSection) -> ElementaryLink {
        let fiber = |length_km| {
            Channel::Fiber(FiberChannel {
                length_km,
                attenuation_db_per_km: self.fiber.attenuation_db_per_km,
            })
        };
        ElementaryLink {
            name: name.into(),
            source: self.source_model(),
            channels: [
                fiber(section.fiber_lengths_km[0]),
                fiber(section.fiber_lengths_km[1]),
            ],
            memories: [self.memory_model(); 2],
            medium_fidelity: self.fiber.fidelity,
            apply_source_efficiency: true,
        }
    }

    /// Alice, Paris fibre link, Palaiseau, satellite link, Calern, Nice fibre
    /// link, Bob.
    pub fn topology(&self) -> Result<ChainTopology, CliError> {
        let end_user = |name: &str| EndUser {
            name: name.into(),
            source: self.source_model(),
            converter: ConverterModel {
                efficiency: self.converter.efficiency,
                fidelity: self.converter.fidelity,
            },
            memory: self.memory_model(),
        };
        let node = |name: &str, space_facing| SwapNode {
            name: name.into(),
            bsm: BsmModel {
                efficiency: self.bsm.efficiency,
            },
            detector: DetectorModel {
                efficiency: self.detectors.efficiency,
                dark_count_rate_hz: self.detectors.dark_count_rate_hz,
                straylight_rate_hz: 0.0,
            },
            space_facing,
        };
        let satellite = ElementaryLink {
            name: "satellite".into(),
            source: self.source_model(),
            channels: [self.downlink(PALAISEAU), self.downlink(CALERN)],
            memories: [self.memory_model(); 2],
            medium_fidelity: self.space_link.fidelity,
            apply_source_efficiency: self.simulation.sat_source_efficiency,
        };
        let topology = ChainTopology {
            alice: end_user("alice"),
            bob: end_user("bob"),
            links: vec![
                self.ground_link("paris", &self.links.paris),
                satellite,
                self.ground_link("nice", &self.links.nice),
            ],
            nodes: vec![
                node("alice", false),
                node("palaiseau", true),
                node("calern", true),
                node("bob", false),
            ],
            modes: self.memory.modes,
            slot_s: self.slot_s(),
            source_rate_hz: self.source.rate_hz,
            options: ChainOptions {
                strict_eq1: self.simulation.strict_eq1,
                sat_window_mode: self.simulation.sat_window_mode,
                min_elevation_rad: self.min_elevation_rad(),
            },
        };
        topology
            .validate()
            .map_err(|e| CliError::Scenario(e.to_string()))?;
        Ok(topology)
    }
}
