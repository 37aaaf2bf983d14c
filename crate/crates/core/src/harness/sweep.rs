//! Sweeps over the experiment axes and RMSE aggregation.

use rayon::prelude::*;

use super::spec::{ExperimentSpec, FusionMode, Metric, SweepPoint};
use super::trial::{ModeErrors, PointContext, TrialErrors};
use crate::error::{Error, Result};

/// RMSE of one metric for one mode at one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub mode: FusionMode,
    pub metric: Metric,
    pub snr_db: f64,
    pub bs_count: usize,
    pub theta_deg: Option<f64>,
    pub nc: usize,
    pub ns: usize,
    pub trials: usize,
    pub failures: usize,
    /// Over successful trials; NaN when every trial failed.
    pub rmse: f64,
}

#[derive(Default)]
struct Accumulator {
    ok: usize,
    failures: usize,
    range: f64,
    radial: f64,
    location: f64,
    velocity: f64,
}

impl Accumulator {
    fn add(&mut self, e: Option<ModeErrors>) {
        match e {
            None => self.failures += 1,
            Some(e) => {
                self.ok += 1;
                self.range += e.range_sq;
                self.radial += e.radial_velocity_sq;
                self.location += e.location_sq.unwrap_or(0.0);
                self.velocity += e.velocity_sq.unwrap_or(0.0);
            }
        }
    }

    fn rmse(&self, metric: Metric) -> f64 {
        if self.ok == 0 {
            return f64::NAN;
        }
        let sum = match metric {
            Metric::Range => self.range,
            Metric::RadialVelocity => self.radial,
            Metric::Location => self.location,
            Metric::Velocity => self.velocity,
        };
        (sum / self.ok as f64).sqrt()
    }
}

/// Reduces per-trial errors, in trial order, into result rows.
pub fn aggregate(point: &SweepPoint, modes: &[FusionMode], trials: &[TrialErrors]) -> Vec<ResultRow> {
    let mut rows = Vec::new();
    for (mi, &mode) in modes.iter().enumerate() {
        let mut acc = Accumulator::default();
        for t in trials {
            acc.add(t.modes[mi].1);
        }
        for &metric in Metric::for_mode(mode) {
            rows.push(ResultRow {
                mode,
                metric,
                snr_db: point.snr_db,
                bs_count: point.geometry.station_count(),
                theta_deg: point.geometry.theta_deg(),
                nc: point.subcarriers,
                ns: point.symbols,
                trials: trials.len(),
                failures: acc.failures,
                rmse: acc.rmse(metric),
            });
        }
    }
    rows
}

/// Runs every trial of one point; trials run in parallel and are reduced
/// in index order.
pub fn run_point(spec: &ExperimentSpec, point: SweepPoint) -> Result<Vec<ResultRow>> {
    let mut ctx = PointContext::new(spec, point)?;
    if spec.modes.contains(&FusionMode::Mle) {
        ctx.calibrate(spec.calibration_trials)?;
    }
    let errors = (0..spec.trials as u64)
        .into_par_iter()
        .map(|t| ctx.run_trial(t, &spec.modes))
        .collect::<Result<Vec<_>>>()?;
    Ok(aggregate(&point, &spec.modes, &errors))
}

/// Runs every point of the spec in sweep order.
pub fn run_sweep(spec: &ExperimentSpec) -> Result<Vec<ResultRow>> {
    spec.validate()?;
    let mut rows = Vec::new();
    for point in spec.points() {
        rows.extend(run_point(spec, point)?);
    }
    Ok(rows)
}

/// Two-station angle study over `spec.theta_deg`.
pub fn run_geometry_sweep(spec: &ExperimentSpec) -> Result<Vec<ResultRow>> {
    if spec.theta_deg.is_empty() {
        return Err(Error::InvalidConfig("geometry sweep needs theta_deg values".into()));
    }
    run_sweep(spec)
}
