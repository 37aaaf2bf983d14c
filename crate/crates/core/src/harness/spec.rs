//! Experiment description: sweep axes, fusion modes and station layouts.

use std::fmt;
use std::str::FromStr;

use crate::config_file::ConfigFile;
use crate::error::{Error, Result};
use crate::fusion::FusionSettings;
use crate::geometry::Vec2;
use crate::ofdm::OfdmConfig;
use crate::preprocess::SearchGrid;

/// Estimator whose errors are recorded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, clap::ValueEnum)]
pub enum FusionMode {
    /// Symbol-level fusion of the feature vectors.
    Symbol,
    /// Maximum likelihood over the coarse per-station estimates.
    Mle,
    /// Reference station alone.
    Single,
}

impl FusionMode {
    pub fn as_str(self) -> &'static str {
        match self {
            FusionMode::Symbol => "symbol",
            FusionMode::Mle => "mle",
            FusionMode::Single => "single",
        }
    }
}

impl fmt::Display for FusionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FusionMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "symbol" => Ok(FusionMode::Symbol),
            "mle" => Ok(FusionMode::Mle),
            "single" => Ok(FusionMode::Single),
            _ => Err(Error::InvalidConfig(format!("unknown fusion mode `{s}`"))),
        }
    }
}

/// Reported error statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Metric {
    /// Station-to-target distance error (m).
    Range,
    /// Radial velocity error (m/s).
    RadialVelocity,
    /// Position error (m).
    Location,
    /// Velocity vector error (m/s).
    Velocity,
}

impl Metric {
    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Range => "range_rmse_m",
            Metric::RadialVelocity => "radial_velocity_rmse_mps",
            Metric::Location => "location_rmse_m",
            Metric::Velocity => "velocity_rmse_mps",
        }
    }

    /// Metrics reported for a mode, in output order.
    pub fn for_mode(mode: FusionMode) -> &'static [Metric] {
        match mode {
            FusionMode::Single => &[Metric::Range, Metric::RadialVelocity],
            _ => &[Metric::Location, Metric::Velocity, Metric::Range, Metric::RadialVelocity],
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

const RING_ARC_DEG: f64 = 240.0;

/// Station arrangement of one sweep point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Geometry {
    /// `count` stations spread evenly over a 240° arc of the layout circle,
    /// station 0 at angle 0. The arc keeps any two stations from facing each
    /// other across the target.
    Ring { count: usize },
    /// Two stations, at 0° and at `theta_deg`.
    Pair { theta_deg: f64 },
}

impl Geometry {
    pub fn station_count(&self) -> usize {
        match *self {
            Geometry::Ring { count } => count,
            Geometry::Pair { .. } => 2,
        }
    }

    pub fn theta_deg(&self) -> Option<f64> {
        match *self {
            Geometry::Pair { theta_deg } => Some(theta_deg),
            Geometry::Ring { .. } => None,
        }
    }

    pub fn stations(&self, center: Vec2<f64>, radius: f64) -> Vec<Vec2<f64>> {
        let at = |deg: f64| center + Vec2::from_angle(deg.to_radians()) * radius;
        match *self {
            Geometry::Ring { count: 1 } => vec![at(0.0)],
            Geometry::Ring { count } => (0..count)
                .map(|w| at(RING_ARC_DEG * w as f64 / (count - 1) as f64))
                .collect(),
            Geometry::Pair { theta_deg } => vec![at(0.0), at(theta_deg)],
        }
    }
}

/// One cell of the sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub snr_db: f64,
    pub geometry: Geometry,
    pub subcarriers: usize,
    pub symbols: usize,
}

/// Full description of a Monte Carlo experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub ofdm: OfdmConfig<f64>,
    pub grid: SearchGrid<f64>,
    pub fusion: FusionSettings<f64>,
    pub snr_db: Vec<f64>,
    pub bs_counts: Vec<usize>,
    /// Non-empty selects the two-station angle study instead of ring layouts.
    pub theta_deg: Vec<f64>,
    pub subcarrier_variants: Vec<usize>,
    pub symbol_variants: Vec<usize>,
    pub trials: usize,
    /// Trials used to estimate the coarse-estimate variances for the MLE.
    pub calibration_trials: usize,
    pub modes: Vec<FusionMode>,
    pub seed: u64,
    pub noiseless: bool,
    /// Stations sit on a circle of this radius around the zone center (m).
    pub layout_radius_m: f64,
    pub zone_min: Vec2<f64>,
    pub zone_max: Vec2<f64>,
    pub target_speed_mps: f64,
}

fn reject_duplicates<T: PartialEq + fmt::Debug>(values: &[T], axis: &str) -> Result<()> {
    for (i, a) in values.iter().enumerate() {
        if values[i + 1..].contains(a) {
            return Err(Error::InvalidConfig(format!("duplicate {axis} value {a:?}")));
        }
    }
    Ok(())
}

fn non_empty<T>(values: &[T], axis: &str) -> Result<()> {
    if values.is_empty() {
        return Err(Error::InvalidConfig(format!("{axis} axis is empty")));
    }
    Ok(())
}

impl Default for ExperimentSpec {
    /// Standard waveform, one point at -5 dB with three stations, all modes.
    fn default() -> Self {
        Self {
            ofdm: OfdmConfig::standard(),
            grid: SearchGrid::standard(),
            fusion: FusionSettings::standard(),
            snr_db: vec![-5.0],
            bs_counts: vec![3],
            theta_deg: Vec::new(),
            subcarrier_variants: vec![128],
            symbol_variants: vec![256],
            trials: 1000,
            calibration_trials: 200,
            modes: vec![FusionMode::Symbol, FusionMode::Mle, FusionMode::Single],
            seed: 1,
            noiseless: false,
            layout_radius_m: 200.0,
            zone_min: Vec2::new(0.0, 0.0),
            zone_max: Vec2::new(10.0, 10.0),
            target_speed_mps: 27.0,
        }
    }
}

impl ExperimentSpec {
    pub fn zone_center(&self) -> Vec2<f64> {
        (self.zone_min + self.zone_max) * 0.5
    }

    pub fn validate(&self) -> Result<()> {
        self.ofdm.validate()?;
        self.grid.validate()?;
        self.fusion.location.validate()?;
        self.fusion.velocity.validate()?;
        if !(self.fusion.region.radius > 0.0) {
            return Err(Error::InvalidConfig("sensing region radius must be positive".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be >= 1".into()));
        }
        if self.modes.contains(&FusionMode::Mle) && self.calibration_trials == 0 {
            return Err(Error::InvalidConfig("MLE mode needs calibration trials".into()));
        }
        non_empty(&self.snr_db, "snr_db")?;
        non_empty(&self.subcarrier_variants, "nc")?;
        non_empty(&self.symbol_variants, "ns")?;
        non_empty(&self.modes, "mode")?;
        if self.theta_deg.is_empty() {
            non_empty(&self.bs_counts, "bs_count")?;
        }
        reject_duplicates(&self.snr_db, "snr_db")?;
        reject_duplicates(&self.bs_counts, "bs_count")?;
        reject_duplicates(&self.theta_deg, "theta_deg")?;
        reject_duplicates(&self.subcarrier_variants, "nc")?;
        reject_duplicates(&self.symbol_variants, "ns")?;
        reject_duplicates(&self.modes, "mode")?;
        if !self.snr_db.iter().all(|s| s.is_finite()) {
            return Err(Error::InvalidConfig("SNR values must be finite".into()));
        }
        if self.bs_counts.iter().any(|&w| w < 2) {
            return Err(Error::InvalidConfig("bs_count values must be >= 2".into()));
        }
        if !self.theta_deg.iter().all(|t| *t > 0.0 && *t < 180.0) {
            return Err(Error::InvalidConfig("theta_deg values must lie in (0, 180)".into()));
        }
        for &nc in &self.subcarrier_variants {
            for &ns in &self.symbol_variants {
                self.ofdm.with_resources(nc, ns).validate()?;
            }
        }
        if !(self.layout_radius_m > 0.0) || !(self.target_speed_mps >= 0.0) {
            return Err(Error::InvalidConfig("layout radius and speed must be positive".into()));
        }
        if !(self.zone_max.x >= self.zone_min.x && self.zone_max.y >= self.zone_min.y) {
            return Err(Error::InvalidConfig("target zone max below min".into()));
        }
        Ok(())
    }

    /// Geometries in sweep order.
    pub fn geometries(&self) -> Vec<Geometry> {
        if self.theta_deg.is_empty() {
            self.bs_counts.iter().map(|&count| Geometry::Ring { count }).collect()
        } else {
            self.theta_deg.iter().map(|&theta_deg| Geometry::Pair { theta_deg }).collect()
        }
    }

    /// All sweep points: resources outermost, then SNR, then geometry.
    pub fn points(&self) -> Vec<SweepPoint> {
        let mut out = Vec::new();
        for &nc in &self.subcarrier_variants {
            for &ns in &self.symbol_variants {
                for &snr_db in &self.snr_db {
                    for geometry in self.geometries() {
                        out.push(SweepPoint { snr_db, geometry, subcarriers: nc, symbols: ns });
                    }
                }
            }
        }
        out
    }

    /// Defaults overlaid with the keys present in `file`.
    pub fn from_config(file: &ConfigFile) -> Result<Self> {
        let mut s = Self::default();
        let o = &mut s.ofdm;
        set(&mut o.carrier_hz, file.carrier_hz);
        set(&mut o.bandwidth_hz, file.bandwidth_hz);
        set(&mut o.subcarriers, file.subcarriers);
        set(&mut o.symbols, file.symbols);
        set(&mut o.symbol_duration_s, file.symbol_duration_s);
        set(&mut o.first_symbol_time_s, file.first_symbol_time_s);
        set(&mut o.initial_phase_rad, file.initial_phase_rad);
        s.subcarrier_variants = vec![o.subcarriers];
        s.symbol_variants = vec![o.symbols];

        let g = &mut s.grid;
        set(&mut g.range_min, file.range_min_m);
        set(&mut g.range_max, file.range_max_m);
        set(&mut g.range_points, file.range_points);
        set(&mut g.velocity_min, file.velocity_min_mps);
        set(&mut g.velocity_max, file.velocity_max_mps);
        set(&mut g.velocity_points, file.velocity_points);

        let f = &mut s.fusion;
        set(&mut f.location.half_extent, file.location_half_extent_m);
        set(&mut f.location.spacing, file.location_spacing_m);
        set(&mut f.velocity.half_extent, file.velocity_half_extent_mps);
        set(&mut f.velocity.spacing, file.velocity_spacing_mps);
        set(&mut f.region.radius, file.region_radius_m);

        set(&mut s.zone_min.x, file.zone_min_x_m);
        set(&mut s.zone_min.y, file.zone_min_y_m);
        set(&mut s.zone_max.x, file.zone_max_x_m);
        set(&mut s.zone_max.y, file.zone_max_y_m);
        s.fusion.region.center = s.zone_center();
        set(&mut s.fusion.region.center.x, file.region_center_x_m);
        set(&mut s.fusion.region.center.y, file.region_center_y_m);

        set(&mut s.snr_db, file.snr_db.clone());
        set(&mut s.bs_counts, file.bs_count.clone());
        set(&mut s.theta_deg, file.theta_deg.clone());
        set(&mut s.subcarrier_variants, file.nc_variants.clone());
        set(&mut s.symbol_variants, file.ns_variants.clone());
        set(&mut s.trials, file.trials);
        set(&mut s.calibration_trials, file.calibration_trials);
        set(&mut s.seed, file.seed);
        set(&mut s.noiseless, file.noiseless);
        set(&mut s.layout_radius_m, file.layout_radius_m);
        set(&mut s.target_speed_mps, file.target_speed_mps);
        if let Some(modes) = &file.modes {
            s.modes = modes.iter().map(|m| m.parse()).collect::<Result<_>>()?;
        }
        Ok(s)
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

/// Explicit scene from a configuration file, if it names stations.
pub fn scene_from_config(file: &ConfigFile) -> Result<Option<crate::echo::Scenario<f64>>> {
    let (xs, ys) = match (&file.bs_x_m, &file.bs_y_m) {
        (None, None) => return Ok(None),
        (Some(x), Some(y)) if x.len() == y.len() => (x, y),
        _ => {
            return Err(Error::InvalidConfig("bs_x_m and bs_y_m must both be given with equal length".into()))
        }
    };
    let stations = xs.iter().zip(ys).map(|(&x, &y)| Vec2::new(x, y)).collect();
    let target = Vec2::new(file.target_x_m.unwrap_or(5.0), file.target_y_m.unwrap_or(5.0));
    let velocity = Vec2::new(file.velocity_x_mps.unwrap_or(0.0), file.velocity_y_mps.unwrap_or(0.0));
    let mut sc = crate::echo::Scenario::new(stations, target, velocity, file.seed.unwrap_or(1));
    if let Some(g) = file.gain_magnitude {
        if !(g > 0.0 && g.is_finite()) {
            return Err(Error::InvalidConfig("gain_magnitude must be positive".into()));
        }
        for u in &mut sc.channel_gains {
            *u = *u * g;
        }
    }
    sc.validate()?;
    Ok(Some(sc))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layouts() {
        let c = Vec2::new(5.0, 5.0);
        let two = Geometry::Ring { count: 2 }.stations(c, 200.0);
        assert!((two[0].x - 205.0).abs() < 1e-12 && (two[1].x + 95.0).abs() < 1e-9);
        let four = Geometry::Ring { count: 4 }.stations(c, 200.0);
        assert!((four[1] - c).angle().to_degrees() - 80.0 < 1e-9);
        let three = Geometry::Ring { count: 3 }.stations(c, 200.0);
        assert_eq!(three[0], Vec2::new(205.0, 5.0));
        assert!((three[1].distance(three[2]) - 200.0 * 3f64.sqrt()).abs() < 1e-9);
        let pair = Geometry::Pair { theta_deg: 60.0 }.stations(c, 200.0);
        assert!((pair[0].distance(pair[1]) - 200.0).abs() < 1e-9);
    }

    #[test]
    fn validation() {
        ExperimentSpec::default().validate().unwrap();
        let bad = ExperimentSpec { snr_db: vec![-5.0, -5.0], ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = ExperimentSpec { trials: 0, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = ExperimentSpec { bs_counts: vec![1], ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = ExperimentSpec { modes: vec![], ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = ExperimentSpec { theta_deg: vec![180.0], ..Default::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn points_order() {
        let s = ExperimentSpec { snr_db: vec![-10.0, -5.0], bs_counts: vec![2, 3], ..Default::default() };
        let p = s.points();
        assert_eq!(p.len(), 4);
        assert_eq!(p[1].geometry, Geometry::Ring { count: 3 });
        assert_eq!(p[2].snr_db, -5.0);
    }

    #[test]
    fn config_overlay() {
        let file = ConfigFile::parse("subcarriers = 64\nmodes = [\"single\"]\ntrials = 7\nregion_radius_m = 20.0").unwrap();
        let s = ExperimentSpec::from_config(&file).unwrap();
        assert_eq!(s.subcarrier_variants, vec![64]);
        assert_eq!(s.modes, vec![FusionMode::Single]);
        assert_eq!(s.trials, 7);
        assert_eq!(s.fusion.region.radius, 20.0);
        let file = ConfigFile::parse("modes = [\"fancy\"]").unwrap();
        assert!(ExperimentSpec::from_config(&file).is_err());
    }

    #[test]
    fn explicit_scene() {
        let file = ConfigFile::parse("bs_x_m = [100.0, 0.0]\nbs_y_m = [0.0, 100.0]\ntarget_x_m = 1.0").unwrap();
        let sc = scene_from_config(&file).unwrap().unwrap();
        assert_eq!(sc.stations.len(), 2);
        assert_eq!(sc.target_position, Vec2::new(1.0, 5.0));
        let file = ConfigFile::parse("bs_x_m = [100.0]").unwrap();
        assert!(scene_from_config(&file).is_err());
        assert!(scene_from_config(&ConfigFile::default()).unwrap().is_none());
    }
}
