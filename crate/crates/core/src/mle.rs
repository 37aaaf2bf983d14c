//! Data-level fusion baseline: Gaussian maximum likelihood over the same
//! lattices as symbol-level fusion, fed only the per-station coarse
//! estimates.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::fusion::{
    lattice_argmax, rough_location, rough_velocity, station_directions, Lattice, LatticeShape,
    LocationFix, SensingRegion, VelocityFix,
};
use crate::geometry::Vec2;
use crate::scalar::Real;

/// Per-station coarse estimates and the variances attributed to them.
#[derive(Debug, Clone, PartialEq)]
pub struct MleInputs<T> {
    pub estimates: Vec<T>,
    pub variances: Vec<T>,
}

impl<T: Real> MleInputs<T> {
    pub fn validate(&self, stations: usize) -> Result<()> {
        if stations < 2 {
            return Err(Error::InvalidConfig("fusion needs at least 2 base stations".into()));
        }
        if self.estimates.len() != stations || self.variances.len() != stations {
            return Err(Error::Dimension {
                expected: format!("{stations} estimates and variances"),
                found: format!("{} and {}", self.estimates.len(), self.variances.len()),
            });
        }
        if !self.variances.iter().all(|v| *v > T::zero() && v.is_finite()) {
            return Err(Error::InvalidConfig("MLE variances must be positive and finite".into()));
        }
        Ok(())
    }

    /// `Σ_w [-½·ln(2πσ_w²) - (x_w - model_w)²/(2σ_w²)]`.
    pub fn log_likelihood(&self, model: impl Iterator<Item = T>) -> T {
        let half = T::lit(0.5);
        self.estimates
            .iter()
            .zip(&self.variances)
            .zip(model)
            .map(|((&x, &var), m)| {
                let r = x - m;
                -half * (T::TAU() * var).ln() - r * r / (T::lit(2.0) * var)
            })
            .sum()
    }
}

/// Log-likelihood of location `z` given coarse ranges.
pub fn location_log_likelihood<T: Real>(z: Vec2<T>, stations: &[Vec2<T>], inputs: &MleInputs<T>) -> T {
    inputs.log_likelihood(stations.iter().map(|s| s.distance(z)))
}

/// Log-likelihood of velocity `q` given coarse radial velocities and the
/// station directions seen from the estimated location.
pub fn velocity_log_likelihood<T: Real>(q: Vec2<T>, directions: &[Vec2<T>], inputs: &MleInputs<T>) -> T {
    inputs.log_likelihood(directions.iter().map(|d| q.dot(*d)))
}

/// Likelihood of a location, exponentiated for reporting.
pub fn mle_likelihood<T: Real>(z: Vec2<T>, stations: &[Vec2<T>], inputs: &MleInputs<T>) -> T {
    location_log_likelihood(z, stations, inputs).exp()
}

fn grid<T: Real>(lattice: &Lattice<T>, f: impl Fn(Vec2<T>) -> T) -> Array2<T> {
    let n = lattice.points_per_axis();
    Array2::from_shape_fn((n, n), |(i, j)| f(lattice.node(i, j)))
}

/// Lattice maximum-likelihood location; `weights` holds log-likelihoods.
pub fn mle_estimate_location<T: Real>(
    stations: &[Vec2<T>],
    inputs: &MleInputs<T>,
    shape: &LatticeShape<T>,
    region: &SensingRegion<T>,
) -> Result<LocationFix<T>> {
    shape.validate()?;
    inputs.validate(stations.len())?;
    let rough = rough_location(stations, &inputs.estimates, region)?;
    let lattice = shape.centered_at(rough);
    let weights = grid(&lattice, |z| location_log_likelihood(z, stations, inputs));
    let (i, j) = lattice_argmax(&weights)
        .ok_or_else(|| Error::IllConditioned("no finite likelihood".into()))?;
    Ok(LocationFix { position: lattice.node(i, j), rough, lattice, weights })
}

/// Lattice maximum-likelihood velocity around the rough velocity fix.
pub fn mle_estimate_velocity<T: Real>(
    estimated_location: Vec2<T>,
    stations: &[Vec2<T>],
    inputs: &MleInputs<T>,
    shape: &LatticeShape<T>,
) -> Result<VelocityFix<T>> {
    shape.validate()?;
    inputs.validate(stations.len())?;
    let dirs = station_directions(estimated_location, stations)?;
    let rough = rough_velocity(&dirs, &inputs.estimates)?;
    let lattice = shape.centered_at(rough);
    let weights = grid(&lattice, |q| velocity_log_likelihood(q, &dirs, inputs));
    let (i, j) = lattice_argmax(&weights)
        .ok_or_else(|| Error::IllConditioned("no finite likelihood".into()))?;
    Ok(VelocityFix { velocity: lattice.node(i, j), rough, lattice, weights })
}
