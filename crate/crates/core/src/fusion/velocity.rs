//! Velocity fusion: rough fix from radial velocities, then lattice
//! refinement on the reconstructed velocity vectors.
//!
//! Station directions are always taken from the estimated target location.

use ndarray::Array2;

use super::lag::{reconstruct_i, LagVector};
use super::lattice::{lag_product_weights, lattice_argmax, Lattice, LatticeShape};
use crate::error::{Error, Result};
use crate::geometry::{solve_sym2, Vec2};
use crate::ofdm::OfdmConfig;
use crate::report::BsReport;
use crate::scalar::Real;

/// Unit vectors from `location` toward each station.
pub fn station_directions<T: Real>(location: Vec2<T>, stations: &[Vec2<T>]) -> Result<Vec<Vec2<T>>> {
    stations
        .iter()
        .enumerate()
        .map(|(w, &bs)| {
            (bs - location).normalized().ok_or_else(|| {
                Error::DegenerateGeometry(format!("estimated location on base station {w}"))
            })
        })
        .collect()
}

/// Radial velocity a lattice node `q` would produce at station `bs`.
pub fn radial_velocity_of_lattice<T: Real>(q: Vec2<T>, estimated_location: Vec2<T>, bs: Vec2<T>) -> Result<T> {
    let dir = station_directions(estimated_location, &[bs])?;
    Ok(q.dot(dir[0]))
}

/// Intersection of the two lines `v·(cos θ, sin θ) = v_radial`.
pub fn rough_velocity_pair<T: Real>(theta_q: T, theta_s: T, radial_q: T, radial_s: T) -> Result<Vec2<T>> {
    let (sq, cq) = theta_q.sin_cos();
    let (ss, cs) = theta_s.sin_cos();
    let det = cq * ss - cs * sq;
    if !(det.abs() >= T::lit(1e-3)) {
        return Err(Error::IllConditioned("station directions nearly parallel".into()));
    }
    Ok(Vec2::new(
        (radial_q * ss - radial_s * sq) / det,
        (cq * radial_s - cs * radial_q) / det,
    ))
}

/// Rough velocity from radial velocities along the given unit directions:
/// exact line intersection for two stations, least squares beyond.
pub fn rough_velocity<T: Real>(directions: &[Vec2<T>], radial: &[T]) -> Result<Vec2<T>> {
    if directions.len() < 2 {
        return Err(Error::InvalidConfig("fusion needs at least 2 base stations".into()));
    }
    if radial.len() != directions.len() {
        return Err(Error::Dimension {
            expected: format!("{} radial velocities", directions.len()),
            found: radial.len().to_string(),
        });
    }
    if directions.len() == 2 {
        return rough_velocity_pair(directions[0].angle(), directions[1].angle(), radial[0], radial[1]);
    }
    let (mut a, mut b, mut c) = (T::zero(), T::zero(), T::zero());
    let mut rhs = Vec2::zero();
    for (&d, &v) in directions.iter().zip(radial) {
        a = a + d.x * d.x;
        b = b + d.x * d.y;
        c = c + d.y * d.y;
        rhs = rhs + d * v;
    }
    solve_sym2(a, b, c, rhs, T::lit(1e-9))
        .ok_or_else(|| Error::IllConditioned("station directions are parallel".into()))
}

fn velocity_phases<T: Real>(nodes: &[Vec2<T>], directions: &[Vec2<T>], config: &OfdmConfig<T>) -> Vec<Vec<T>> {
    let rate = config.doppler_phase_rate();
    directions
        .iter()
        .map(|&d| nodes.iter().map(|&q| rate * q.dot(d)).collect())
        .collect()
}

fn check_lags(stations: usize, lags: usize) -> Result<()> {
    if stations < 2 {
        return Err(Error::InvalidConfig("fusion needs at least 2 base stations".into()));
    }
    if stations != lags {
        return Err(Error::Dimension {
            expected: format!("{stations} lag vectors"),
            found: lags.to_string(),
        });
    }
    Ok(())
}

/// Weight `J(q) = Σ_k Π_w Re(I_w(k)·exp(+j·k·2π·f_c·2(q·â_w)T/C))`.
pub fn velocity_weight<T: Real>(
    q: Vec2<T>,
    lags: &[LagVector<T>],
    estimated_location: Vec2<T>,
    stations: &[Vec2<T>],
    config: &OfdmConfig<T>,
) -> Result<T> {
    check_lags(stations.len(), lags.len())?;
    let dirs = station_directions(estimated_location, stations)?;
    let l: Vec<&[_]> = lags.iter().map(|g| g.entries.as_slice()).collect();
    let mut out = [T::zero()];
    lag_product_weights(&l, &velocity_phases(&[q], &dirs, config), &mut out);
    Ok(out[0])
}

/// Weights of every velocity lattice node.
pub fn velocity_weights<T: Real>(
    lattice: &Lattice<T>,
    lags: &[LagVector<T>],
    directions: &[Vec2<T>],
    config: &OfdmConfig<T>,
) -> Result<Array2<T>> {
    check_lags(directions.len(), lags.len())?;
    let n = lattice.points_per_axis();
    let nodes = lattice.nodes();
    let l: Vec<&[_]> = lags.iter().map(|g| g.entries.as_slice()).collect();
    let mut out = vec![T::zero(); nodes.len()];
    lag_product_weights(&l, &velocity_phases(&nodes, directions, config), &mut out);
    Ok(Array2::from_shape_vec((n, n), out).expect("lattice is square"))
}

/// Result of velocity fusion.
#[derive(Debug, Clone)]
pub struct VelocityFix<T> {
    pub velocity: Vec2<T>,
    pub rough: Vec2<T>,
    pub lattice: Lattice<T>,
    pub weights: Array2<T>,
}

/// Full velocity fusion; `estimated_location` comes from location fusion.
pub fn estimate_velocity<T: Real>(
    reports: &[BsReport<T>],
    estimated_location: Vec2<T>,
    stations: &[Vec2<T>],
    config: &OfdmConfig<T>,
    shape: &LatticeShape<T>,
) -> Result<VelocityFix<T>> {
    shape.validate()?;
    check_lags(stations.len(), reports.len())?;
    let dirs = station_directions(estimated_location, stations)?;
    let radial: Vec<T> = reports.iter().map(|r| r.velocity).collect();
    let rough = rough_velocity(&dirs, &radial)?;
    let lags = reports
        .iter()
        .map(|r| reconstruct_i(&r.velocity_feature, r.bs_index))
        .collect::<Result<Vec<_>>>()?;
    let lattice = shape.centered_at(rough);
    let weights = velocity_weights(&lattice, &lags, &dirs, config)?;
    let (i, j) = lattice_argmax(&weights)
        .ok_or_else(|| Error::IllConditioned("no finite lattice weight".into()))?;
    Ok(VelocityFix { velocity: lattice.node(i, j), rough, lattice, weights })
}
