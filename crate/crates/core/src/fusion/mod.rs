//! Symbol-level fusion at the fusion center.
//!
//! Location is estimated first; velocity fusion then uses the station
//! directions seen from the estimated location.

pub mod lag;
pub mod lattice;
pub mod location;
pub mod velocity;

pub use lag::{lag_average, reconstruct_g, reconstruct_i, LagVector};
pub use lattice::{lattice_argmax, Lattice, LatticeShape};
pub use location::{
    baseline_fallback, estimate_location, location_weight, location_weights, rough_location,
    rough_location_pair, LocationFix, SensingRegion,
};
pub use velocity::{
    estimate_velocity, radial_velocity_of_lattice, rough_velocity, rough_velocity_pair,
    station_directions, velocity_weight, velocity_weights, VelocityFix,
};

use crate::error::Result;
use crate::geometry::Vec2;
use crate::ofdm::OfdmConfig;
use crate::report::BsReport;
use crate::scalar::Real;

/// Lattice sizes and sensing region shared by the fusion estimators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FusionSettings<T> {
    pub location: LatticeShape<T>,
    pub velocity: LatticeShape<T>,
    pub region: SensingRegion<T>,
}

impl<T: Real> FusionSettings<T> {
    /// Default lattices and a 50 m region around `(5, 5)`.
    pub fn standard() -> Self {
        Self {
            location: LatticeShape::location_default(),
            velocity: LatticeShape::velocity_default(),
            region: SensingRegion { center: Vec2::new(T::lit(5.0), T::lit(5.0)), radius: T::lit(50.0) },
        }
    }
}

/// Fused target state plus the per-station quantities it implies.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimationResult<T> {
    pub position: Vec2<T>,
    pub velocity: Vec2<T>,
    /// Distance from each station to the estimated position (m).
    pub ranges: Vec<T>,
    /// Estimated velocity projected toward each station (m/s).
    pub radial_velocities: Vec<T>,
}

impl<T: Real> EstimationResult<T> {
    pub fn from_state(position: Vec2<T>, velocity: Vec2<T>, stations: &[Vec2<T>]) -> Result<Self> {
        let dirs = station_directions(position, stations)?;
        Ok(Self {
            position,
            velocity,
            ranges: stations.iter().map(|s| s.distance(position)).collect(),
            radial_velocities: dirs.iter().map(|d| velocity.dot(*d)).collect(),
        })
    }
}

/// Location then velocity fusion over the station reports.
pub fn fuse<T: Real>(
    reports: &[BsReport<T>],
    stations: &[Vec2<T>],
    config: &OfdmConfig<T>,
    settings: &FusionSettings<T>,
) -> Result<(LocationFix<T>, VelocityFix<T>)> {
    let loc = estimate_location(reports, stations, config, &settings.location, &settings.region)?;
    let vel = estimate_velocity(reports, loc.position, stations, config, &settings.velocity)?;
    Ok((loc, vel))
}
