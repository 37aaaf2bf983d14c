#![allow(dead_code)]

use std::f64::consts::TAU;

use isac_fusion::fusion::{lattice_argmax, location_weights, velocity_weight, LagVector, Lattice};
use isac_fusion::harness::{render_csv, run_sweep, ExperimentSpec, FusionMode};
use isac_fusion::theory::gaussian_product_moments;
use isac_fusion::{OfdmConfig, Scenario, Vec2};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type C64 = Complex<f64>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Target at the origin, every coarse quantity on the default search grid.
pub fn on_node_scene() -> Scenario<f64> {
    Scenario::new(
        vec![Vec2::new(200.0, 0.0), Vec2::new(-120.0, 160.0), Vec2::new(0.0, -150.0)],
        Vec2::new(0.0, 0.0),
        Vec2::new(10.0, -5.0),
        7,
    )
}

/// Random unit-modulus-gain scene with stations 120..280 m from a target
/// in the 10 m zone.
pub fn random_scene(r: &mut ChaCha8Rng, stations: usize) -> Scenario<f64> {
    let target = Vec2::new(r.random_range(0.0..10.0), r.random_range(0.0..10.0));
    let offset = r.random_range(0.0..TAU);
    let bs = (0..stations)
        .map(|w| {
            let a = offset + TAU * (w as f64 + r.random_range(-0.2..0.2)) / stations as f64;
            target + Vec2::from_angle(a) * r.random_range(120.0..280.0)
        })
        .collect();
    let speed = r.random_range(0.0..35.0);
    let mut sc = Scenario::new(bs, target, Vec2::from_angle(r.random_range(0.0..TAU)) * speed, r.random());
    sc.channel_gains = (0..stations)
        .map(|_| Complex::from_polar(r.random_range(0.5..2.0), r.random_range(0.0..TAU)))
        .collect();
    sc
}

pub fn random_lags(r: &mut ChaCha8Rng, len: usize, bs: usize) -> LagVector<f64> {
    LagVector {
        entries: (0..len)
            .map(|_| C64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)))
            .collect(),
        bs_index: bs,
    }
}

/// Non-increasing along the axis, allowing one rise of at most 5 %.
pub fn trend_ok(values: &[f64]) -> bool {
    let mut rises = 0;
    for w in values.windows(2) {
        if !(w[1].is_finite() && w[0].is_finite()) {
            return false;
        }
        if w[1] > w[0] {
            rises += 1;
            if (w[1] - w[0]) / w[0] > 0.05 {
                return false;
            }
        }
    }
    rises <= 1
}

pub fn relative_error(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm()
}

/// Three-point mini sweep with reduced resources and fixed seed.
pub fn mini_spec() -> ExperimentSpec {
    ExperimentSpec {
        snr_db: vec![-20.0, -10.0, -5.0],
        bs_counts: vec![3],
        subcarrier_variants: vec![32],
        symbol_variants: vec![64],
        trials: 12,
        calibration_trials: 12,
        modes: vec![FusionMode::Symbol, FusionMode::Mle, FusionMode::Single],
        seed: 20_240_601,
        ..Default::default()
    }
}

pub fn mini_sweep_csv() -> String {
    render_csv(&run_sweep(&mini_spec()).expect("mini sweep"))
}

// Property bodies shared by the proptest suite and the acceptance runner.
// Each returns a description of the first violation.

pub fn check_gaussian_product(means: &[f64], variances: &[f64]) -> Result<(), String> {
    let (u, d) = gaussian_product_moments(means, variances).map_err(|e| e.to_string())?;
    let lo = means.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = means.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let dmin = variances.iter().cloned().fold(f64::INFINITY, f64::min);
    let slack = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
    if u < lo - slack || u > hi + slack {
        return Err(format!("mean {u} outside [{lo}, {hi}]"));
    }
    if variances.len() > 1 && d >= dmin {
        return Err(format!("variance {d} not below {dmin}"));
    }
    Ok(())
}

fn conj_lags(l: &LagVector<f64>) -> LagVector<f64> {
    LagVector { entries: l.entries.iter().map(|z| z.conj()).collect(), bs_index: l.bs_index }
}

/// Conjugating every lag vector mirrors the velocity weight: `J*(−q) = J(q)`.
pub fn check_cosine_evenness(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let cfg = OfdmConfig::<f64>::standard();
    let sc = random_scene(&mut r, 3);
    let lags: Vec<_> = (0..3).map(|w| random_lags(&mut r, 20, w)).collect();
    let conj: Vec<_> = lags.iter().map(conj_lags).collect();
    let q = Vec2::new(r.random_range(-30.0..30.0), r.random_range(-30.0..30.0));
    let loc = sc.target_position;
    let a = velocity_weight(q, &lags, loc, &sc.stations, &cfg).map_err(|e| e.to_string())?;
    let b = velocity_weight(-q, &conj, loc, &sc.stations, &cfg).map_err(|e| e.to_string())?;
    if (a - b).abs() > 1e-9 * (1.0 + a.abs()) {
        return Err(format!("J(q) = {a}, conjugate J(-q) = {b}"));
    }
    Ok(())
}

fn small_lattice(center: Vec2<f64>) -> Lattice<f64> {
    Lattice { center, half_extent: 1.0, spacing: 0.1 }
}

/// Reordering stations together with their lag vectors leaves the
/// location weights unchanged.
pub fn check_permutation_invariance(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let cfg = OfdmConfig::<f64>::standard();
    let w = r.random_range(2..=4);
    let sc = random_scene(&mut r, w);
    let lags: Vec<_> = (0..w).map(|i| random_lags(&mut r, 24, i)).collect();
    let lattice = small_lattice(sc.target_position);
    let base = location_weights(&lattice, &lags, &sc.stations, &cfg).map_err(|e| e.to_string())?;
    let mut order: Vec<usize> = (0..w).collect();
    order.rotate_left(r.random_range(1..w));
    order.swap(0, w - 1);
    let st: Vec<_> = order.iter().map(|&i| sc.stations[i]).collect();
    let lg: Vec<_> = order.iter().map(|&i| lags[i].clone()).collect();
    let perm = location_weights(&lattice, &lg, &st, &cfg).map_err(|e| e.to_string())?;
    let scale = base.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    for (a, b) in base.iter().zip(perm.iter()) {
        if (a - b).abs() > 1e-12 * scale {
            return Err(format!("weights differ: {a} vs {b} for order {order:?}"));
        }
    }
    if lattice_argmax(&base) != lattice_argmax(&perm) {
        return Err("argmax moved under permutation".into());
    }
    Ok(())
}

/// Positive per-station scaling of the lag vectors scales the weights by
/// the product of the factors and keeps the argmax.
pub fn check_scaling_invariance(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let cfg = OfdmConfig::<f64>::standard();
    let sc = random_scene(&mut r, 3);
    let lags: Vec<_> = (0..3).map(|i| random_lags(&mut r, 24, i)).collect();
    let factors: Vec<f64> = (0..3).map(|_| r.random_range(0.1..10.0)).collect();
    let scaled: Vec<_> = lags
        .iter()
        .zip(&factors)
        .map(|(l, &c)| LagVector { entries: l.entries.iter().map(|z| z * c).collect(), bs_index: l.bs_index })
        .collect();
    let lattice = small_lattice(sc.target_position);
    let a = location_weights(&lattice, &lags, &sc.stations, &cfg).map_err(|e| e.to_string())?;
    let b = location_weights(&lattice, &scaled, &sc.stations, &cfg).map_err(|e| e.to_string())?;
    let total: f64 = factors.iter().product();
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for (x, y) in a.iter().zip(b.iter()) {
        if (x * total - y).abs() > 1e-10 * scale * total {
            return Err(format!("scaled weight {y} != {total} x {x}"));
        }
    }
    let (ia, ib) = (lattice_argmax(&a), lattice_argmax(&b));
    if ia != ib {
        // Only acceptable when the two nodes tie to rounding.
        let (i, j) = ia.unwrap();
        let (k, l) = ib.unwrap();
        if (a[[i, j]] - a[[k, l]]).abs() > 1e-12 * scale {
            return Err(format!("argmax moved from {ia:?} to {ib:?}"));
        }
    }
    Ok(())
}
