mod common;

use std::path::PathBuf;

use common::*;
use isac_fusion::fusion::{location_weight, reconstruct_g};
use isac_fusion::harness::{
    render_csv, run_geometry_sweep, run_sweep, write_csv, ExperimentSpec, FusionMode, Geometry, Metric,
    PointContext, SweepPoint, CSV_HEADER,
};
use isac_fusion::preprocess::compress_to_e;
use isac_fusion::{synthesize_echo, OfdmConfig, Scenario, Vec2};
use num_complex::Complex;

fn golden_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/mini_sweep.csv")
}

#[test]
fn mini_sweep_matches_golden_file() {
    let csv = mini_sweep_csv();
    let path = golden_path();
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, &csv).unwrap();
    }
    let golden = std::fs::read_to_string(&path).expect("golden file present");
    assert_eq!(csv, golden);
    assert_eq!(csv.lines().count(), 1 + 3 * (4 + 4 + 2));
}

#[test]
fn sweep_independent_of_thread_count() {
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(mini_sweep_csv);
    let three = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap().install(mini_sweep_csv);
    assert_eq!(one, three);
}

#[test]
fn empty_rows_write_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.csv");
    write_csv(&[], &path).unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap(), format!("{CSV_HEADER}\n"));
    assert_eq!(render_csv(&[]), format!("{CSV_HEADER}\n"));
}

#[test]
fn unwritable_path_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let err = write_csv(&[], &dir.path().join("missing/out.csv")).unwrap_err();
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn duplicate_axis_points_rejected() {
    let spec = ExperimentSpec { snr_db: vec![-5.0, -10.0, -5.0], ..mini_spec() };
    assert!(run_sweep(&spec).is_err());
    let spec = ExperimentSpec { bs_counts: vec![3, 3], ..mini_spec() };
    assert!(run_sweep(&spec).is_err());
    let spec = ExperimentSpec { trials: 0, ..mini_spec() };
    assert!(run_sweep(&spec).is_err());
}

#[test]
fn single_angle_smoke_run() {
    let spec = ExperimentSpec { theta_deg: vec![60.0], trials: 10, modes: vec![FusionMode::Symbol], ..Default::default() };
    let rows = run_geometry_sweep(&spec).unwrap();
    let loc: Vec<_> = rows.iter().filter(|r| r.metric == Metric::Location).collect();
    assert_eq!(loc.len(), 1);
    assert_eq!(loc[0].theta_deg, Some(60.0));
    assert_eq!(loc[0].trials, 10);
    assert!(loc[0].rmse >= 0.0);
}

#[test]
fn noiseless_errors_within_lattice_spacing() {
    let spec = ExperimentSpec { noiseless: true, calibration_trials: 20, ..Default::default() };
    for count in [2, 3, 4] {
        let point = SweepPoint { snr_db: -5.0, geometry: Geometry::Ring { count }, subcarriers: 128, symbols: 256 };
        let ctx = PointContext::new(&spec, point).unwrap();
        for t in 0..8 {
            let e = ctx.run_trial(t, &[FusionMode::Symbol]).unwrap().modes[0].1.expect("symbol fusion succeeds");
            assert!(e.location_sq.unwrap().sqrt() <= 0.1, "W={count} trial {t}");
            assert!(e.velocity_sq.unwrap().sqrt() <= 0.05, "W={count} trial {t}");
            assert!(e.range_sq.sqrt() <= 0.1 && e.radial_velocity_sq.sqrt() <= 0.05);
        }
    }
}

fn location_errors(theta: f64, trials: u64) -> Vec<f64> {
    let spec = ExperimentSpec::default();
    let point = SweepPoint { snr_db: -5.0, geometry: Geometry::Pair { theta_deg: theta }, subcarriers: 128, symbols: 256 };
    let ctx = PointContext::new(&spec, point).unwrap();
    (0..trials)
        .map(|t| ctx.run_trial(t, &[FusionMode::Symbol]).unwrap().modes[0].1.unwrap().location_sq.unwrap())
        .collect()
}

/// RMSE and the standard error of the RMSE estimator.
fn rmse_with_error(sq: &[f64]) -> (f64, f64) {
    let n = sq.len() as f64;
    let mean = sq.iter().sum::<f64>() / n;
    let var = sq.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let rmse = mean.sqrt();
    (rmse, (var / n).sqrt() / (2.0 * rmse))
}

#[test]
fn right_angle_beats_oblique_pairs() {
    let trials = 100;
    let (a, ea) = rmse_with_error(&location_errors(30.0, trials));
    let (b, _) = rmse_with_error(&location_errors(90.0, trials));
    let (c, ec) = rmse_with_error(&location_errors(150.0, trials));
    assert!(b < a && b < c, "30: {a}, 90: {b}, 150: {c}");
    let sigma = (ea * ea + ec * ec).sqrt();
    assert!((a - c).abs() <= 3.0 * sigma, "30: {a}, 150: {c}, sigma {sigma}");
}

#[test]
fn fused_location_beats_rough_fix() {
    let spec = ExperimentSpec::default();
    let point = SweepPoint { snr_db: -5.0, geometry: Geometry::Ring { count: 3 }, subcarriers: 128, symbols: 256 };
    let ctx = PointContext::new(&spec, point).unwrap();
    let (mut fused, mut rough) = (0.0, 0.0);
    for t in 0..60 {
        let run = ctx.run(ctx.scenario(t), &[FusionMode::Symbol]).unwrap();
        let (loc, _) = run.symbol.unwrap().unwrap();
        fused += (loc.position - run.scenario.target_position).norm_sq();
        rough += (loc.rough - run.scenario.target_position).norm_sq();
    }
    assert!(fused < rough, "fused {fused} vs rough {rough}");
}

/// Peak-weight SNR, mean²/variance of the location weight at the true
/// position, over `draws` noise realisations with `stations` stations.
fn weight_peak_snr(stations: usize, draws: u64) -> f64 {
    let cfg = OfdmConfig::<f64>::standard();
    let target = Vec2::new(0.0, 0.0);
    let all = [Vec2::new(150.0, 0.0), Vec2::new(-100.0, 120.0), Vec2::new(-60.0, -170.0)];
    let bs = all[..stations].to_vec();
    let mut samples = Vec::with_capacity(draws as usize);
    for d in 0..draws {
        let sc = Scenario::new(bs.clone(), target, Vec2::new(12.0, -7.0), d);
        let lags: Vec<_> = (0..stations)
            .map(|w| {
                let echo = synthesize_echo(&cfg, &sc, w, -5.0, false).unwrap();
                let v = sc.radial_velocity(w).unwrap();
                reconstruct_g(&compress_to_e(&echo, v, &cfg).unwrap(), w).unwrap()
            })
            .collect();
        let weight = if stations == 1 {
            let phase = -cfg.range_phase_rate() * bs[0].distance(target);
            (1..cfg.subcarriers).map(|k| (lags[0].lag(k) * Complex::from_polar(1.0, phase * k as f64)).re).sum()
        } else {
            location_weight(target, &lags, &bs, &cfg).unwrap()
        };
        samples.push(weight);
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0);
    mean * mean / var
}

#[test]
#[ignore = "does not hold: the product over stations multiplies signal and adds noise terms, so three stations give about a third of the single-station peak SNR"]
fn three_station_weight_peak_snr_exceeds_single_station() {
    let (one, three) = (weight_peak_snr(1, 10_000), weight_peak_snr(3, 10_000));
    assert!(three > one, "W=3: {three}, W=1: {one}");
}
