//! Circular Keplerian orbit over a rotating spherical Earth.
//!
//! The inertial frame and the earth-fixed frame coincide at `OrbitSpec::epoch`.
//! Both the argument of latitude and the Earth rotation angle are measured from
//! that instant, so shifting the epoch shifts the whole pass in simulation time
//! without changing its ground track.

use std::f64::consts::{FRAC_PI_2, TAU};

use crate::error::{check_positive, Error, Result};

pub type Vec3 = [f64; 3];

fn norm(v: &Vec3) -> f64 {
    dot(v, v).sqrt()
}

fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn rotate_z(v: Vec3, angle: f64) -> Vec3 {
    let (s, c) = angle.sin_cos();
    [c * v[0] - s * v[1], s * v[0] + c * v[1], v[2]]
}

fn rotate_x(v: Vec3, angle: f64) -> Vec3 {
    let (s, c) = angle.sin_cos();
    [v[0], c * v[1] - s * v[2], s * v[1] + c * v[2]]
}

/// A point on (or above) the spherical Earth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodeticPoint {
    latitude_deg: f64,
    longitude_deg: f64,
    altitude_m: f64,
}

impl GeodeticPoint {
    /// Longitude is wrapped into [-180, 180).
    pub fn new(latitude_deg: f64, longitude_deg: f64, altitude_m: f64) -> Result<Self> {
        if !(-90.0..=90.0).contains(&latitude_deg) {
            return Err(Error::Config(format!(
                "latitude {latitude_deg} deg is outside [-90, 90]"
            )));
        }
        if !longitude_deg.is_finite() || !altitude_m.is_finite() {
            return Err(Error::Config("station coordinates must be finite".into()));
        }
        let longitude_deg = (longitude_deg + 180.0).rem_euclid(360.0) - 180.0;
        Ok(Self {
            latitude_deg,
            longitude_deg,
            altitude_m,
        })
    }

    pub fn latitude_deg(&self) -> f64 {
        self.latitude_deg
    }

    pub fn longitude_deg(&self) -> f64 {
        self.longitude_deg
    }

    pub fn altitude_m(&self) -> f64 {
        self.altitude_m
    }

    /// Earth-fixed cartesian position.
    pub fn position(&self, earth: &EarthModel) -> Vec3 {
        let lat = self.latitude_deg.to_radians();
        let lon = self.longitude_deg.to_radians();
        let r = earth.radius_m + self.altitude_m;
        [
            r * lat.cos() * lon.cos(),
            r * lat.cos() * lon.sin(),
            r * lat.sin(),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EarthModel {
    pub radius_m: f64,
    /// m^3/s^2
    pub gravitational_parameter: f64,
    /// Sidereal rotation rate, rad/s.
    pub rotation_rate: f64,
}

impl Default for EarthModel {
    fn default() -> Self {
        Self {
            radius_m: 6_371_000.0,
            gravitational_parameter: 3.986004418e14,
            rotation_rate: 7.2921159e-5,
        }
    }
}

impl EarthModel {
    pub fn validate(&self) -> Result<()> {
        check_positive("earth radius", self.radius_m)?;
        check_positive("gravitational parameter", self.gravitational_parameter)?;
        check_positive("rotation rate", self.rotation_rate)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitSpec {
    pub altitude_m: f64,
    pub inclination_deg: f64,
    pub raan_deg: f64,
    pub argument_of_latitude_deg: f64,
    /// Simulation time (s) at which the frames coincide and the argument of
    /// latitude equals `argument_of_latitude_deg`.
    pub epoch_s: f64,
}

impl OrbitSpec {
    pub fn validate(&self) -> Result<()> {
        check_positive("orbit altitude", self.altitude_m)?;
        if !(0.0..=180.0).contains(&self.inclination_deg) {
            return Err(Error::Config(format!(
                "inclination {} deg is outside [0, 180]",
                self.inclination_deg
            )));
        }
        if !self.raan_deg.is_finite()
            || !self.argument_of_latitude_deg.is_finite()
            || !self.epoch_s.is_finite()
        {
            return Err(Error::Config("orbit angles and epoch must be finite".into()));
        }
        Ok(())
    }

    pub fn semi_major_axis(&self, earth: &EarthModel) -> f64 {
        earth.radius_m + self.altitude_m
    }

    /// Mean motion in rad/s.
    pub fn mean_motion(&self, earth: &EarthModel) -> f64 {
        let a = self.semi_major_axis(earth);
        (earth.gravitational_parameter / (a * a * a)).sqrt()
    }

    pub fn period(&self, earth: &EarthModel) -> f64 {
        TAU / self.mean_motion(earth)
    }
}

/// Satellite position in the inertial frame at simulation time `t`.
pub fn propagate_inertial(spec: &OrbitSpec, earth: &EarthModel, t: f64) -> Result<Vec3> {
    spec.validate()?;
    if !t.is_finite() {
        return Err(Error::Domain(format!("propagation time {t} is not finite")));
    }
    let a = spec.semi_major_axis(earth);
    let u = spec.argument_of_latitude_deg.to_radians() + spec.mean_motion(earth) * (t - spec.epoch_s);
    let in_plane = [a * u.cos(), a * u.sin(), 0.0];
    let tilted = rotate_x(in_plane, spec.inclination_deg.to_radians());
    Ok(rotate_z(tilted, spec.raan_deg.to_radians()))
}

/// Satellite position in the earth-fixed frame at simulation time `t`.
pub fn propagate(spec: &OrbitSpec, earth: &EarthModel, t: f64) -> Result<Vec3> {
    let inertial = propagate_inertial(spec, earth, t)?;
    Ok(rotate_z(inertial, -earth.rotation_rate * (t - spec.epoch_s)))
}

/// Elevation (rad) above the station's local horizontal plane, and slant range (m).
pub fn elevation_and_range(sat: &Vec3, station: &GeodeticPoint, earth: &EarthModel) -> (f64, f64) {
    let site = station.position(earth);
    let los = [sat[0] - site[0], sat[1] - site[1], sat[2] - site[2]];
    let range = norm(&los);
    let up_len = norm(&site);
    let up = [site[0] / up_len, site[1] / up_len, site[2] / up_len];
    let sin_el = (dot(&up, &los) / range).clamp(-1.0, 1.0);
    (sin_el.asin(), range)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationGeometry {
    pub elevation_rad: f64,
    pub slant_range_m: f64,
}

/// Geometry of every station at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct PassSample {
    pub time_s: f64,
    pub stations: Vec<StationGeometry>,
}

impl PassSample {
    /// Lowest elevation over all stations.
    pub fn min_elevation(&self) -> f64 {
        self.stations
            .iter()
            .map(|s| s.elevation_rad)
            .fold(FRAC_PI_2, f64::min)
    }
}

fn sample_count(t0: f64, t1: f64, dt: f64) -> usize {
    // Tolerate rounding when (t1 - t0) is an exact multiple of dt.
    ((t1 - t0) / dt + 1e-9).floor() as usize + 1
}

/// Samples the pass at `t0, t0 + dt, ...` up to `t1`.
pub fn sample_pass(
    spec: &OrbitSpec,
    earth: &EarthModel,
    stations: &[GeodeticPoint],
    t0: f64,
    t1: f64,
    dt: f64,
) -> Result<Vec<PassSample>> {
    if stations.is_empty() {
        return Err(Error::Config("at least one ground station is required".into()));
    }
    if !(t0.is_finite() && t1.is_finite() && t0 < t1) {
        return Err(Error::Config(format!("invalid pass interval [{t0}, {t1}]")));
    }
    check_positive("sampling step", dt)?;
    spec.validate()?;
    earth.validate()?;

    (0..sample_count(t0, t1, dt))
        .map(|i| {
            let time_s = t0 + i as f64 * dt;
            let sat = propagate(spec, earth, time_s)?;
            let stations = stations
                .iter()
                .map(|st| {
                    let (elevation_rad, slant_range_m) = elevation_and_range(&sat, st, earth);
                    StationGeometry {
                        elevation_rad,
                        slant_range_m,
                    }
                })
                .collect();
            Ok(PassSample { time_s, stations })
        })
        .collect()
}

/// Interval of simultaneous visibility, at sample resolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VisibilityWindow {
    pub start_s: f64,
    pub end_s: f64,
    pub first_index: usize,
    pub last_index: usize,
}

impl VisibilityWindow {
    pub fn duration(&self) -> f64 {
        self.end_s - self.start_s
    }

    pub fn contains_index(&self, i: usize) -> bool {
        (self.first_index..=self.last_index).contains(&i)
    }
}

/// Maximal runs of samples where every station is at or above `min_elevation`.
///
/// A run made of a single sample has zero duration and is not reported.
pub fn find_dual_visibility(samples: &[PassSample], min_elevation: f64) -> Vec<VisibilityWindow> {
    let mut windows = Vec::new();
    let mut run_start: Option<usize> = None;
    let visible = |s: &PassSample| s.stations.iter().all(|g| g.elevation_rad >= min_elevation);

    let close = |first: usize, last: usize, windows: &mut Vec<VisibilityWindow>| {
        if last > first {
            windows.push(VisibilityWindow {
                start_s: samples[first].time_s,
                end_s: samples[last].time_s,
                first_index: first,
                last_index: last,
            });
        }
    };

    for (i, sample) in samples.iter().enumerate() {
        match (visible(sample), run_start) {
            (true, None) => run_start = Some(i),
            (false, Some(first)) => {
                close(first, i - 1, &mut windows);
                run_start = None;
            }
            _ => {}
        }
    }
    if let Some(first) = run_start {
        close(first, samples.len() - 1, &mut windows);
    }
    windows
}

/// Longest dual-visibility window, if any.
pub fn longest_window(windows: &[VisibilityWindow]) -> Option<VisibilityWindow> {
    windows
        .iter()
        .copied()
        .max_by(|a, b| a.duration().total_cmp(&b.duration()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn equatorial() -> OrbitSpec {
        OrbitSpec {
            altitude_m: 600_000.0,
            inclination_deg: 0.0,
            raan_deg: 0.0,
            argument_of_latitude_deg: 0.0,
            epoch_s: 0.0,
        }
    }

    fn synthetic(elevations_deg: &[f64]) -> Vec<PassSample> {
        elevations_deg
            .iter()
            .enumerate()
            .map(|(i, &e)| PassSample {
                time_s: i as f64,
                stations: vec![
                    StationGeometry {
                        elevation_rad: e.to_radians(),
                        slant_range_m: 1.0e6,
                    };
                    2
                ],
            })
            .collect()
    }

    #[test]
    fn identity_orientation_at_epoch() {
        let earth = EarthModel::default();
        let p = propagate(&equatorial(), &earth, 0.0).unwrap();
        let a = earth.radius_m + 600_000.0;
        assert!((p[0] - a).abs() < 1e-6);
        assert!(p[1].abs() < 1e-6 && p[2].abs() < 1e-6);
    }

    #[test]
    fn orbital_period_for_600_km() {
        // 2*pi*sqrt(a^3/mu), a = 6_971_000 m, evaluated with mpmath at 30 digits
        let earth = EarthModel::default();
        let period = equatorial().period(&earth);
        assert!((period - 5_792.334_109_593_09).abs() < 1e-8, "{period}");
    }

    #[test]
    fn rejects_bad_spec() {
        let earth = EarthModel::default();
        let mut spec = equatorial();
        spec.altitude_m = 0.0;
        assert!(matches!(propagate(&spec, &earth, 0.0), Err(Error::Config(_))));
        spec.altitude_m = 1.0;
        spec.inclination_deg = 181.0;
        assert!(spec.validate().is_err());
    }

    #[test]
    fn zenith_geometry() {
        let earth = EarthModel::default();
        let station = GeodeticPoint::new(0.0, 0.0, 0.0).unwrap();
        let sat = [earth.radius_m + 600_000.0, 0.0, 0.0];
        let (el, range) = elevation_and_range(&sat, &station, &earth);
        assert!((el - FRAC_PI_2).abs() < 1e-12);
        assert!((range - 600_000.0).abs() < 1e-6);
    }

    #[test]
    fn horizon_and_antipode() {
        let earth = EarthModel::default();
        let station = GeodeticPoint::new(0.0, 0.0, 0.0).unwrap();
        let sat = [earth.radius_m, 1.0e6, 0.0];
        let (el, _) = elevation_and_range(&sat, &station, &earth);
        assert!(el.abs() < 1e-12);

        let pole = GeodeticPoint::new(90.0, 0.0, 0.0).unwrap();
        let below = [0.0, 0.0, -(earth.radius_m + 600_000.0)];
        let (el, _) = elevation_and_range(&below, &pole, &earth);
        assert!(el < 0.0);
    }

    #[test]
    fn longitude_is_wrapped() {
        let p = GeodeticPoint::new(10.0, 190.0, 0.0).unwrap();
        assert!((p.longitude_deg() + 170.0).abs() < 1e-12);
        let p = GeodeticPoint::new(10.0, 180.0, 0.0).unwrap();
        assert_eq!(p.longitude_deg(), -180.0);
        assert!(GeodeticPoint::new(91.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn sample_counting() {
        let earth = EarthModel::default();
        let station = [GeodeticPoint::new(0.0, 0.0, 0.0).unwrap()];
        let samples = sample_pass(&equatorial(), &earth, &station, 0.0, 10.0, 1.0).unwrap();
        assert_eq!(samples.len(), 11);
        assert_eq!(samples[10].time_s, 10.0);
        assert!(matches!(
            sample_pass(&equatorial(), &earth, &[], 0.0, 10.0, 1.0),
            Err(Error::Config(_))
        ));
        assert!(sample_pass(&equatorial(), &earth, &station, 1.0, 0.0, 1.0).is_err());
        assert!(sample_pass(&equatorial(), &earth, &station, 0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn elevation_falls_away_from_culmination() {
        let earth = EarthModel::default();
        let station = [GeodeticPoint::new(0.0, 0.0, 0.0).unwrap()];
        let samples = sample_pass(&equatorial(), &earth, &station, -60.0, 60.0, 1.0).unwrap();
        let mid = 60;
        for i in mid..samples.len() - 1 {
            assert!(samples[i + 1].stations[0].elevation_rad < samples[i].stations[0].elevation_rad);
        }
        for i in 1..=mid {
            assert!(samples[i - 1].stations[0].elevation_rad < samples[i].stations[0].elevation_rad);
        }
    }

    #[test]
    fn dual_visibility_windows() {
        assert!(find_dual_visibility(&synthetic(&[1.0, 2.0, 3.0]), 20f64.to_radians()).is_empty());

        let all = find_dual_visibility(&synthetic(&[30.0, 40.0, 50.0]), 20f64.to_radians());
        assert_eq!(all.len(), 1);
        assert_eq!((all[0].start_s, all[0].end_s), (0.0, 2.0));

        let w = find_dual_visibility(&synthetic(&[-1.0, 5.0, 25.0, 30.0, 10.0]), 20f64.to_radians());
        assert_eq!(w.len(), 1);
        // samples 3-4 counting from one
        assert_eq!((w[0].first_index, w[0].last_index), (2, 3));
    }
}
