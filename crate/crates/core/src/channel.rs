//! Photon transmission through optical fibre and the satellite downlink.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{check_non_negative, check_positive, check_unit, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberChannel {
    pub length_km: f64,
    pub attenuation_db_per_km: f64,
}

impl FiberChannel {
    pub fn new(length_km: f64, attenuation_db_per_km: f64) -> Result<Self> {
        check_non_negative("fiber length", length_km)?;
        check_non_negative("fiber attenuation", attenuation_db_per_km)?;
        Ok(Self {
            length_km,
            attenuation_db_per_km,
        })
    }
}

/// Power transmission `10^(-alpha * l / 10)`.
pub fn fiber_efficiency(ch: &FiberChannel) -> f64 {
    10f64.powf(-ch.attenuation_db_per_km * ch.length_km / 10.0)
}

/// Downlink optical parameters. The transmitter beam waist is `D_T / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeSpaceParams {
    pub wavelength_m: f64,
    pub tx_aperture_m: f64,
    pub rx_aperture_m: f64,
    /// Internal transmittance of the on-board telescope.
    pub tx_internal: f64,
    /// Internal transmittance of the ground telescope, fibre coupling included.
    pub rx_internal: f64,
    /// Atmospheric transmittance at zenith.
    pub zenith_transmittance: f64,
}

impl FreeSpaceParams {
    pub fn validate(&self) -> Result<()> {
        check_positive("wavelength", self.wavelength_m)?;
        check_positive("transmitter aperture", self.tx_aperture_m)?;
        check_positive("receiver aperture", self.rx_aperture_m)?;
        check_unit("transmitter internal transmittance", self.tx_internal)?;
        check_unit("receiver internal transmittance", self.rx_internal)?;
        check_unit("zenith atmospheric transmittance", self.zenith_transmittance)
    }

    pub fn beam_waist_at_exit(&self) -> f64 {
        self.tx_aperture_m / 2.0
    }
}

fn check_elevation(elevation: f64) -> Result<()> {
    if elevation > 0.0 && elevation <= FRAC_PI_2 + 1e-12 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "elevation {elevation} rad: link is not evaluable at or below the horizon"
        )))
    }
}

/// `eta_atm0^(1 / sin(elevation))`.
pub fn atmospheric_transmittance(zenith_transmittance: f64, elevation: f64) -> Result<f64> {
    check_elevation(elevation)?;
    Ok(zenith_transmittance.powf(1.0 / elevation.sin()))
}

pub fn rayleigh_length(waist_m: f64, wavelength_m: f64) -> f64 {
    PI * waist_m * waist_m / wavelength_m
}

/// Gaussian beam radius after propagating `range_m` from a waist `waist_m`.
pub fn beam_waist(waist_m: f64, range_m: f64, wavelength_m: f64) -> f64 {
    let z = range_m / rayleigh_length(waist_m, wavelength_m);
    waist_m * (1.0 + z * z).sqrt()
}

/// Fraction of the beam power collected by the receiver aperture, in the closed
/// form written directly in apertures and range.
pub fn receiver_capture(p: &FreeSpaceParams, range_m: f64) -> f64 {
    let dt2 = p.tx_aperture_m * p.tx_aperture_m;
    let dr2 = p.rx_aperture_m * p.rx_aperture_m;
    let spread = 16.0 * p.wavelength_m * p.wavelength_m * range_m * range_m / (PI * PI * dt2 * dt2);
    -(-(2.0 * dr2 / dt2) / (1.0 + spread)).exp_m1()
}

/// The same capture fraction written through the Gaussian beam radius:
/// `1 - exp(-D_R^2 / (2 w(r)^2))` with `w0 = D_T / 2`.
pub fn receiver_capture_gaussian(p: &FreeSpaceParams, range_m: f64) -> f64 {
    let w = beam_waist(p.beam_waist_at_exit(), range_m, p.wavelength_m);
    -(-(p.rx_aperture_m * p.rx_aperture_m) / (2.0 * w * w)).exp_m1()
}

/// Transmitter gain `eta_cT * (1 - exp(-D_T^2 / (2 w0^2)))`, which is
/// `eta_cT * (1 - e^-2)` for `w0 = D_T / 2`.
pub fn transmitter_gain(p: &FreeSpaceParams) -> f64 {
    let w0 = p.beam_waist_at_exit();
    p.tx_internal * -(-(p.tx_aperture_m * p.tx_aperture_m) / (2.0 * w0 * w0)).exp_m1()
}

/// Single downlink path efficiency `P_R / P_0` at slant range `range_m` and
/// elevation `elevation` (rad).
pub fn single_path_efficiency(p: &FreeSpaceParams, range_m: f64, elevation: f64) -> Result<f64> {
    check_elevation(elevation)?;
    if !(range_m > 0.0 && range_m.is_finite()) {
        return Err(Error::Domain(format!("slant range {range_m} m must be positive")));
    }
    let atmosphere = atmospheric_transmittance(p.zenith_transmittance, elevation)?;
    Ok(transmitter_gain(p) * atmosphere * p.rx_internal * receiver_capture(p, range_m))
}
