//! OFDM numerology shared by the echo model and every estimator.

use crate::error::{Error, Result};
use crate::scalar::{Real, SPEED_OF_LIGHT};

/// Carrier, subcarrier and symbol parameters of the ISAC waveform.
///
/// The subcarrier spacing is derived as `bandwidth / subcarriers`; the
/// Doppler phase advances once per full symbol period (cyclic prefix
/// included). Initial phase and first-symbol time are carried for
/// completeness; both only contribute a constant phase that is absorbed into
/// the channel gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OfdmConfig<T> {
    /// Carrier frequency (Hz).
    pub carrier_hz: T,
    /// Occupied bandwidth (Hz).
    pub bandwidth_hz: T,
    /// Number of subcarriers.
    pub subcarriers: usize,
    /// Number of OFDM symbols per frame.
    pub symbols: usize,
    /// Full symbol duration including cyclic prefix (s).
    pub symbol_duration_s: T,
    /// Transmit time of the first symbol (s).
    pub first_symbol_time_s: T,
    /// Initial carrier phase (rad).
    pub initial_phase_rad: T,
}

impl<T: Real> OfdmConfig<T> {
    /// 24 GHz, 93.1 MHz, 128 subcarriers x 256 symbols, 12.375 us symbols.
    pub fn standard() -> Self {
        Self {
            carrier_hz: T::lit(24e9),
            bandwidth_hz: T::lit(93.1e6),
            subcarriers: 128,
            symbols: 256,
            symbol_duration_s: T::lit(12.375e-6),
            first_symbol_time_s: T::zero(),
            initial_phase_rad: T::zero(),
        }
    }

    /// Same spacing and symbol period with a different resource size; the
    /// bandwidth follows the subcarrier count.
    pub fn with_resources(&self, subcarriers: usize, symbols: usize) -> Self {
        let spacing = self.subcarrier_spacing();
        Self {
            bandwidth_hz: spacing * T::from_usize_lossy(subcarriers),
            subcarriers,
            symbols,
            ..*self
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: T, name: &str| {
            if v > T::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidConfig(format!("{name} must be positive and finite")))
            }
        };
        positive(self.carrier_hz, "carrier frequency")?;
        positive(self.bandwidth_hz, "bandwidth")?;
        positive(self.symbol_duration_s, "symbol duration")?;
        if self.subcarriers < 2 {
            return Err(Error::InvalidConfig("at least 2 subcarriers required".into()));
        }
        if self.symbols < 2 {
            return Err(Error::InvalidConfig("at least 2 symbols required".into()));
        }
        if !(self.first_symbol_time_s >= T::zero()) {
            return Err(Error::InvalidConfig("first symbol time must be non-negative".into()));
        }
        if !self.initial_phase_rad.is_finite() {
            return Err(Error::InvalidConfig("initial phase must be finite".into()));
        }
        if self.symbol_duration_s < self.elementary_symbol_duration() {
            return Err(Error::InvalidConfig(
                "symbol duration shorter than 1 / subcarrier spacing".into(),
            ));
        }
        Ok(())
    }

    pub fn propagation_speed() -> T {
        T::lit(SPEED_OF_LIGHT)
    }

    /// Subcarrier spacing (Hz).
    pub fn subcarrier_spacing(&self) -> T {
        self.bandwidth_hz / T::from_usize_lossy(self.subcarriers)
    }

    /// Symbol duration without cyclic prefix (s).
    pub fn elementary_symbol_duration(&self) -> T {
        self.subcarrier_spacing().recip()
    }

    /// Phase advance per subcarrier per metre of range, `2π·Δf·2/C` (rad/m).
    pub fn range_phase_rate(&self) -> T {
        T::TAU() * self.subcarrier_spacing() * T::lit(2.0) / Self::propagation_speed()
    }

    /// Phase advance per symbol per m/s of radial velocity, `2π·f_c·2T/C`.
    pub fn doppler_phase_rate(&self) -> T {
        T::TAU() * self.carrier_hz * T::lit(2.0) * self.symbol_duration_s
            / Self::propagation_speed()
    }

    /// Range resolution `C / 2B` (m).
    pub fn range_resolution(&self) -> T {
        Self::propagation_speed() / (T::lit(2.0) * self.bandwidth_hz)
    }

    /// Velocity resolution `C / (2·f_c·N_s·T)` (m/s).
    pub fn velocity_resolution(&self) -> T {
        Self::propagation_speed()
            / (T::lit(2.0)
                * self.carrier_hz
                * T::from_usize_lossy(self.symbols)
                * self.symbol_duration_s)
    }

    /// Range span after which the subcarrier phase pattern repeats (m).
    pub fn unambiguous_range(&self) -> T {
        T::TAU() / self.range_phase_rate()
    }

    /// Velocity span after which the symbol phase pattern repeats (m/s).
    pub fn unambiguous_velocity(&self) -> T {
        T::TAU() / self.doppler_phase_rate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_numerology() {
        let cfg = OfdmConfig::<f64>::standard();
        cfg.validate().unwrap();
        assert!((cfg.subcarrier_spacing() - 727_343.75).abs() < 1e-6);
        assert!((cfg.range_resolution() - 1.610056).abs() < 1e-5);
        // C / (2 f_c N_s T)
        assert!((cfg.velocity_resolution() - 1.971489).abs() < 1e-5);
        assert!((cfg.unambiguous_range() - 206.0880).abs() < 1e-3);
    }

    #[test]
    fn rejects_bad_sizes() {
        let mut cfg = OfdmConfig::<f64>::standard();
        cfg.subcarriers = 1;
        assert!(cfg.validate().is_err());
        let mut cfg = OfdmConfig::<f64>::standard();
        cfg.symbol_duration_s = 1e-7;
        assert!(cfg.validate().is_err());
        let mut cfg = OfdmConfig::<f64>::standard();
        cfg.carrier_hz = -1.0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn resource_variant_keeps_spacing() {
        let cfg = OfdmConfig::<f64>::standard();
        let small = cfg.with_resources(64, 128);
        assert_eq!(small.subcarriers, 64);
        assert!((small.subcarrier_spacing() - cfg.subcarrier_spacing()).abs() < 1e-6);
        small.validate().unwrap();
    }
}
