//! Flat TOML configuration file.
//!
//! Every key is optional; missing keys keep their defaults. Units are
//! metres, seconds, hertz, m/s, decibels and degrees as the key suffix
//! says. Example:
//!
//! ```toml
//! carrier_hz = 24e9
//! bandwidth_hz = 93.1e6
//! subcarriers = 128
//! symbols = 256
//! symbol_duration_s = 12.375e-6
//!
//! range_min_m = 100.0
//! range_max_m = 300.0
//! range_points = 401
//!
//! snr_db = [-20.0, -15.0, -10.0, -5.0]
//! bs_count = [2, 3, 4]
//! trials = 1000
//! seed = 1
//! modes = ["symbol", "mle", "single"]
//!
//! # explicit scene for `single-trial`
//! bs_x_m = [205.0, -95.0, -95.0]
//! bs_y_m = [5.0, 178.2, -168.2]
//! target_x_m = 4.0
//! target_y_m = 6.0
//! velocity_x_mps = 20.0
//! velocity_y_mps = -18.0
//! ```

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};

/// Raw contents of a configuration file.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    // waveform
    pub carrier_hz: Option<f64>,
    pub bandwidth_hz: Option<f64>,
    pub subcarriers: Option<usize>,
    pub symbols: Option<usize>,
    pub symbol_duration_s: Option<f64>,
    pub first_symbol_time_s: Option<f64>,
    pub initial_phase_rad: Option<f64>,

    // single-station search grid
    pub range_min_m: Option<f64>,
    pub range_max_m: Option<f64>,
    pub range_points: Option<usize>,
    pub velocity_min_mps: Option<f64>,
    pub velocity_max_mps: Option<f64>,
    pub velocity_points: Option<usize>,

    // fusion lattices and sensing region
    pub location_half_extent_m: Option<f64>,
    pub location_spacing_m: Option<f64>,
    pub velocity_half_extent_mps: Option<f64>,
    pub velocity_spacing_mps: Option<f64>,
    pub region_center_x_m: Option<f64>,
    pub region_center_y_m: Option<f64>,
    pub region_radius_m: Option<f64>,

    // explicit scene
    pub bs_x_m: Option<Vec<f64>>,
    pub bs_y_m: Option<Vec<f64>>,
    pub target_x_m: Option<f64>,
    pub target_y_m: Option<f64>,
    pub velocity_x_mps: Option<f64>,
    pub velocity_y_mps: Option<f64>,
    pub gain_magnitude: Option<f64>,

    // experiment
    pub snr_db: Option<Vec<f64>>,
    pub bs_count: Option<Vec<usize>>,
    pub theta_deg: Option<Vec<f64>>,
    pub nc_variants: Option<Vec<usize>>,
    pub ns_variants: Option<Vec<usize>>,
    pub trials: Option<usize>,
    pub calibration_trials: Option<usize>,
    pub seed: Option<u64>,
    pub modes: Option<Vec<String>>,
    pub noiseless: Option<bool>,
    pub layout_radius_m: Option<f64>,
    pub zone_min_x_m: Option<f64>,
    pub zone_min_y_m: Option<f64>,
    pub zone_max_x_m: Option<f64>,
    pub zone_max_y_m: Option<f64>,
    pub target_speed_mps: Option<f64>,
    pub out: Option<String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    /// Reads and parses a file; unreadable files are I/O errors.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }
}
