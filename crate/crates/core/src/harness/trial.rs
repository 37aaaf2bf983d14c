//! One Monte Carlo trial: scene draw, echoes, preprocessing, fusion and
//! error evaluation.
//!
//! Random streams are keyed by the master seed and the trial index only, so
//! the same trial sees the same target, gains and unit noise draws at every
//! SNR, station count and angle. Curves across an axis therefore differ
//! only through the axis itself.

use rand::Rng;

use super::spec::{ExperimentSpec, FusionMode, SweepPoint};
use crate::echo::{synthesize_echo, Scenario};
use crate::error::Result;
use crate::fusion::{fuse, EstimationResult, FusionSettings, LocationFix, VelocityFix};
use crate::geometry::Vec2;
use crate::mle::{mle_estimate_location, mle_estimate_velocity, MleInputs};
use crate::ofdm::OfdmConfig;
use crate::preprocess::RangeDopplerSearch;
use crate::report::BsReport;
use crate::rng::{derive_seed, stream};
use num_complex::Complex;

const TAG_SCENE: u64 = 0x5343;
const TAG_GAIN: u64 = 0x4741;
const TAG_NOISE: u64 = 0x4e4f;
const TAG_CALIBRATION: u64 = 0x4341;
const VARIANCE_FLOOR: f64 = 1e-9;

/// Everything needed to run trials at one sweep point.
pub struct PointContext {
    pub point: SweepPoint,
    pub ofdm: OfdmConfig<f64>,
    pub search: RangeDopplerSearch<f64>,
    pub stations: Vec<Vec2<f64>>,
    pub fusion: FusionSettings<f64>,
    pub noiseless: bool,
    seed: u64,
    zone_min: Vec2<f64>,
    zone_max: Vec2<f64>,
    speed: f64,
    /// Coarse range and radial-velocity error variances fed to the MLE.
    pub mle_variances: Option<(f64, f64)>,
}

/// Squared errors of one estimator in one trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeErrors {
    /// Mean over stations of the squared range error.
    pub range_sq: f64,
    /// Mean over stations of the squared radial velocity error.
    pub radial_velocity_sq: f64,
    pub location_sq: Option<f64>,
    pub velocity_sq: Option<f64>,
}

/// Per-mode outcome; `None` marks a failed estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialErrors {
    pub trial: u64,
    pub modes: Vec<(FusionMode, Option<ModeErrors>)>,
}

/// Intermediate products of one trial, kept for diagnostics.
pub struct TrialRun {
    pub scenario: Scenario<f64>,
    pub reports: Vec<BsReport<f64>>,
    pub symbol: Option<Result<(LocationFix<f64>, VelocityFix<f64>)>>,
    pub mle: Option<Result<(LocationFix<f64>, VelocityFix<f64>)>>,
}

impl PointContext {
    pub fn new(spec: &ExperimentSpec, point: SweepPoint) -> Result<Self> {
        let ofdm = spec.ofdm.with_resources(point.subcarriers, point.symbols);
        let search = RangeDopplerSearch::new(spec.grid, ofdm)?;
        Ok(Self {
            point,
            ofdm,
            search,
            stations: point.geometry.stations(spec.zone_center(), spec.layout_radius_m),
            fusion: spec.fusion,
            noiseless: spec.noiseless,
            seed: spec.seed,
            zone_min: spec.zone_min,
            zone_max: spec.zone_max,
            speed: spec.target_speed_mps,
            mle_variances: None,
        })
    }

    /// Replaces the generated layout, e.g. with stations from a config file.
    pub fn with_stations(mut self, stations: Vec<Vec2<f64>>) -> Self {
        self.stations = stations;
        self
    }

    fn draw_scenario(&self, tag: u64, trial: u64) -> Scenario<f64> {
        let mut rng = stream(derive_seed(&[self.seed, tag, trial]));
        let mut uniform = |lo: f64, hi: f64| lo + (hi - lo) * rng.random::<f64>();
        let position = Vec2::new(
            uniform(self.zone_min.x, self.zone_max.x),
            uniform(self.zone_min.y, self.zone_max.y),
        );
        let heading = uniform(0.0, std::f64::consts::TAU);
        let velocity = Vec2::from_angle(heading) * self.speed;
        let gains = (0..self.stations.len())
            .map(|w| {
                let mut g = stream(derive_seed(&[self.seed, TAG_GAIN, tag, trial, w as u64]));
                Complex::from_polar(1.0, std::f64::consts::TAU * g.random::<f64>())
            })
            .collect();
        Scenario {
            stations: self.stations.clone(),
            target_position: position,
            target_velocity: velocity,
            channel_gains: gains,
            rng_seed: derive_seed(&[self.seed, TAG_NOISE, tag, trial]),
        }
    }

    /// Scene of Monte Carlo trial `trial`.
    pub fn scenario(&self, trial: u64) -> Scenario<f64> {
        self.draw_scenario(TAG_SCENE, trial)
    }

    /// Per-station reports for a scene, in station order.
    pub fn reports(&self, scenario: &Scenario<f64>) -> Result<Vec<BsReport<f64>>> {
        scenario.validate()?;
        (0..scenario.station_count())
            .map(|w| {
                let echo = synthesize_echo(&self.ofdm, scenario, w, self.point.snr_db, self.noiseless)?;
                self.search.report(&echo)
            })
            .collect()
    }

    /// Estimates the coarse-estimate error variances from `trials`
    /// independent scenes, pooling all stations.
    pub fn calibrate(&mut self, trials: usize) -> Result<(f64, f64)> {
        let (mut sr, mut sv, mut n) = (0.0, 0.0, 0usize);
        for t in 0..trials as u64 {
            let sc = self.draw_scenario(TAG_CALIBRATION, t);
            for (w, rep) in self.reports(&sc)?.iter().enumerate() {
                sr += (rep.range - sc.range(w)?).powi(2);
                sv += (rep.velocity - sc.radial_velocity(w)?).powi(2);
                n += 1;
            }
        }
        let n = n.max(1) as f64;
        let v = ((sr / n).max(VARIANCE_FLOOR), (sv / n).max(VARIANCE_FLOOR));
        self.mle_variances = Some(v);
        Ok(v)
    }

    fn run_mle(&self, reports: &[BsReport<f64>]) -> Result<(LocationFix<f64>, VelocityFix<f64>)> {
        let (var_r, var_v) = self.mle_variances.ok_or_else(|| {
            crate::error::Error::InvalidConfig("MLE variances not calibrated".into())
        })?;
        let w = reports.len();
        let ranges = MleInputs { estimates: reports.iter().map(|r| r.range).collect(), variances: vec![var_r; w] };
        let loc = mle_estimate_location(&self.stations, &ranges, &self.fusion.location, &self.fusion.region)?;
        let radial = MleInputs { estimates: reports.iter().map(|r| r.velocity).collect(), variances: vec![var_v; w] };
        let vel = mle_estimate_velocity(loc.position, &self.stations, &radial, &self.fusion.velocity)?;
        Ok((loc, vel))
    }

    /// Runs the requested estimators on one scene.
    pub fn run(&self, scenario: Scenario<f64>, modes: &[FusionMode]) -> Result<TrialRun> {
        let reports = self.reports(&scenario)?;
        let symbol = modes
            .contains(&FusionMode::Symbol)
            .then(|| fuse(&reports, &self.stations, &self.ofdm, &self.fusion));
        let mle = modes.contains(&FusionMode::Mle).then(|| self.run_mle(&reports));
        Ok(TrialRun { scenario, reports, symbol, mle })
    }

    /// Errors of every requested mode for trial `trial`.
    pub fn run_trial(&self, trial: u64, modes: &[FusionMode]) -> Result<TrialErrors> {
        let run = self.run(self.scenario(trial), modes)?;
        let modes = modes
            .iter()
            .map(|&m| {
                let errs = match m {
                    FusionMode::Single => single_errors(&run),
                    FusionMode::Symbol => fused_errors(&run, run.symbol.as_ref()),
                    FusionMode::Mle => fused_errors(&run, run.mle.as_ref()),
                };
                (m, errs)
            })
            .collect();
        Ok(TrialErrors { trial, modes })
    }
}

fn single_errors(run: &TrialRun) -> Option<ModeErrors> {
    let rep = run.reports.first()?;
    let sc = &run.scenario;
    Some(ModeErrors {
        range_sq: (rep.range - sc.range(0).ok()?).powi(2),
        radial_velocity_sq: (rep.velocity - sc.radial_velocity(0).ok()?).powi(2),
        location_sq: None,
        velocity_sq: None,
    })
}

fn fused_errors(
    run: &TrialRun,
    fix: Option<&Result<(LocationFix<f64>, VelocityFix<f64>)>>,
) -> Option<ModeErrors> {
    let (loc, vel) = fix?.as_ref().ok()?;
    let sc = &run.scenario;
    let est = EstimationResult::from_state(loc.position, vel.velocity, &sc.stations).ok()?;
    let w = sc.station_count() as f64;
    let mut range_sq = 0.0;
    let mut radial_sq = 0.0;
    for i in 0..sc.station_count() {
        range_sq += (est.ranges[i] - sc.range(i).ok()?).powi(2);
        radial_sq += (est.radial_velocities[i] - sc.radial_velocity(i).ok()?).powi(2);
    }
    Some(ModeErrors {
        range_sq: range_sq / w,
        radial_velocity_sq: radial_sq / w,
        location_sq: Some((loc.position - sc.target_position).norm_sq()),
        velocity_sq: Some((vel.velocity - sc.target_velocity).norm_sq()),
    })
}
