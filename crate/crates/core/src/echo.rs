//! Echo synthesis in the demodulation-symbol domain.
//!
//! Each base station observes its own echo after OFDM demodulation and
//! division by the known transmit symbols. What remains is an
//! `N_c x N_s` matrix whose entry `(m, n)` is
//!
//! ```text
//! U_w · exp(-j·2π·m·Δf·2R_w/C) · exp(+j·2π·f_c·2v_w·n·T/C) + noise
//! ```
//!
//! with `m` the subcarrier index and `n` the symbol index, both from 0.
//! Positive radial velocity means the target is closing on the station.
//! Transmit symbols are unit modulus, so the division leaves circular
//! Gaussian noise unchanged in shape.

use ndarray::Array2;
use num_complex::Complex;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::ofdm::OfdmConfig;
use crate::rng;
use crate::scalar::Real;

/// Ground truth for one sensing frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario<T> {
    /// Base station coordinates (m).
    pub stations: Vec<Vec2<T>>,
    /// Target position (m).
    pub target_position: Vec2<T>,
    /// Target velocity vector (m/s).
    pub target_velocity: Vec2<T>,
    /// Per-station complex channel gain, constant phases folded in.
    pub channel_gains: Vec<Complex<T>>,
    /// Seed of the per-station noise streams.
    pub rng_seed: u64,
}

impl<T: Real> Scenario<T> {
    /// Scenario with unit channel gains.
    pub fn new(
        stations: Vec<Vec2<T>>,
        target_position: Vec2<T>,
        target_velocity: Vec2<T>,
        rng_seed: u64,
    ) -> Self {
        let channel_gains = vec![Complex::new(T::one(), T::zero()); stations.len()];
        Self {
            stations,
            target_position,
            target_velocity,
            channel_gains,
            rng_seed,
        }
    }

    pub fn station_count(&self) -> usize {
        self.stations.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.stations.is_empty() {
            return Err(Error::InvalidConfig("at least one base station required".into()));
        }
        if self.channel_gains.len() != self.stations.len() {
            return Err(Error::Dimension {
                expected: format!("{} channel gains", self.stations.len()),
                found: format!("{}", self.channel_gains.len()),
            });
        }
        for (i, a) in self.stations.iter().enumerate() {
            for b in &self.stations[i + 1..] {
                if a == b {
                    return Err(Error::InvalidConfig("base station positions must be distinct".into()));
                }
            }
            if !(a.distance(self.target_position) > T::zero()) {
                return Err(Error::DegenerateGeometry(format!(
                    "target co-located with base station {i}"
                )));
            }
        }
        Ok(())
    }

    fn station(&self, bs_index: usize) -> Result<Vec2<T>> {
        self.stations.get(bs_index).copied().ok_or(Error::StationIndex {
            index: bs_index,
            count: self.stations.len(),
        })
    }

    /// True distance from station `bs_index` to the target (m).
    pub fn range(&self, bs_index: usize) -> Result<T> {
        Ok(self.station(bs_index)?.distance(self.target_position))
    }

    /// True radial velocity seen by station `bs_index` (m/s, positive closing).
    pub fn radial_velocity(&self, bs_index: usize) -> Result<T> {
        true_radial_velocity(self, bs_index)
    }

    /// Per-element noise variance `|U_w|²·10^(-snr/10)`.
    pub fn noise_variance(&self, bs_index: usize, snr_db: T) -> Result<T> {
        let gain = self.channel_gains.get(bs_index).ok_or(Error::StationIndex {
            index: bs_index,
            count: self.channel_gains.len(),
        })?;
        Ok(gain.norm_sqr() * T::lit(10.0).powf(-snr_db / T::lit(10.0)))
    }
}

/// Projection of the target velocity onto the unit vector from the target
/// toward station `bs_index`.
pub fn true_radial_velocity<T: Real>(scenario: &Scenario<T>, bs_index: usize) -> Result<T> {
    let bs = scenario.station(bs_index)?;
    let toward = (bs - scenario.target_position).normalized().ok_or_else(|| {
        Error::DegenerateGeometry(format!("target co-located with base station {bs_index}"))
    })?;
    Ok(scenario.target_velocity.dot(toward))
}

/// Communication-stripped demodulation symbols of one station.
#[derive(Debug, Clone, PartialEq)]
pub struct EchoSymbolMatrix<T> {
    /// `N_c` rows (subcarriers) by `N_s` columns (symbols).
    pub entries: Array2<Complex<T>>,
    pub bs_index: usize,
}

impl<T: Real> EchoSymbolMatrix<T> {
    pub fn subcarriers(&self) -> usize {
        self.entries.nrows()
    }

    pub fn symbols(&self) -> usize {
        self.entries.ncols()
    }

    pub(crate) fn check_shape(&self, config: &OfdmConfig<T>) -> Result<()> {
        if self.entries.dim() != (config.subcarriers, config.symbols) {
            return Err(Error::Dimension {
                expected: format!("{}x{}", config.subcarriers, config.symbols),
                found: format!("{}x{}", self.subcarriers(), self.symbols()),
            });
        }
        Ok(())
    }
}

/// Synthesizes the echo symbol matrix of station `bs_index`.
///
/// The signal term follows the demodulated echo model exactly. Unless
/// `noiseless` is set, circular complex Gaussian noise with variance
/// `|U_w|²·10^(-snr_db/10)` is added per element, drawn from a stream keyed
/// by the scenario seed and the station index.
pub fn synthesize_echo<T: Real>(
    config: &OfdmConfig<T>,
    scenario: &Scenario<T>,
    bs_index: usize,
    snr_db: T,
    noiseless: bool,
) -> Result<EchoSymbolMatrix<T>> {
    config.validate()?;
    if !snr_db.is_finite() {
        return Err(Error::InvalidConfig("SNR must be finite".into()));
    }
    let range = scenario.range(bs_index)?;
    let velocity = scenario.radial_velocity(bs_index)?;
    let gain = *scenario.channel_gains.get(bs_index).ok_or(Error::StationIndex {
        index: bs_index,
        count: scenario.channel_gains.len(),
    })?;

    let range_step = config.range_phase_rate() * range;
    let doppler_step = config.doppler_phase_rate() * velocity;
    let rows: Vec<Complex<T>> = (0..config.subcarriers)
        .map(|m| gain * Complex::from_polar(T::one(), -T::from_usize_lossy(m) * range_step))
        .collect();
    let cols: Vec<Complex<T>> = (0..config.symbols)
        .map(|n| Complex::from_polar(T::one(), T::from_usize_lossy(n) * doppler_step))
        .collect();

    let mut entries =
        Array2::from_shape_fn((config.subcarriers, config.symbols), |(m, n)| rows[m] * cols[n]);

    if !noiseless {
        let sigma = scenario.noise_variance(bs_index, snr_db)?.sqrt().as_f64();
        let scale = sigma / std::f64::consts::SQRT_2;
        let mut rng = rng::stream(rng::derive_seed(&[scenario.rng_seed, bs_index as u64]));
        for z in entries.iter_mut() {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            *z = *z + Complex::new(T::lit(re * scale), T::lit(im * scale));
        }
    }

    Ok(EchoSymbolMatrix { entries, bs_index })
}
