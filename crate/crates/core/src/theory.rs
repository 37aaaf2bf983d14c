//! Closed-form SNR predictions for the search surface and the
//! reconstructed vectors, plus the Gaussian product rule used to reason
//! about multi-station fusion gain.
//!
//! Signal modulus per echo element is taken as 1.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Peak SNR of the coherent range/velocity search, `N_c·N_s/σ²`.
pub fn predict_2dfft_snr<T: Real>(subcarriers: usize, symbols: usize, noise_variance: T) -> T {
    T::from_usize_lossy(subcarriers) * T::from_usize_lossy(symbols) / noise_variance
}

/// `Σ_{k=1}^{N_c-1} 1/(N_c-k)`, the (N_c-1)-th harmonic number.
pub fn harmonic_sum<T: Real>(subcarriers: usize) -> T {
    (1..subcarriers)
        .rev()
        .map(|k| T::from_usize_lossy(subcarriers - k).recip())
        .sum()
}

/// Upper bound `1 + ln(N_c - 1)` on [`harmonic_sum`].
pub fn harmonic_bound<T: Real>(subcarriers: usize) -> T {
    T::one() + T::from_usize_lossy(subcarriers - 1).ln()
}

/// Lower bound on the SNR of the sum of the reconstructed distance vector
/// entries, `(N_c-1)²·N_s² / (σ²·(N_s + σ²/2)·(1 + ln(N_c-1)))`.
pub fn predict_g_sum_snr_bound<T: Real>(subcarriers: usize, symbols: usize, noise_variance: T) -> T {
    let nc1 = T::from_usize_lossy(subcarriers - 1);
    let ns = T::from_usize_lossy(symbols);
    nc1 * nc1 * ns * ns
        / (noise_variance * (ns + noise_variance / T::lit(2.0)) * harmonic_bound::<T>(subcarriers))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogBase {
    Natural,
    Ten,
}

/// `(N_c-2)·N_s / ((N_s+50)·(1 + log(N_c-1)))`: the factor by which the
/// reconstruction bound exceeds the search SNR once `σ² <= 100`.
pub fn reconstruction_gain_factor<T: Real>(subcarriers: usize, symbols: usize, base: LogBase) -> T {
    let x = T::from_usize_lossy(subcarriers - 1);
    let log = match base {
        LogBase::Natural => x.ln(),
        LogBase::Ten => x.log10(),
    };
    T::from_usize_lossy(subcarriers - 2) * T::from_usize_lossy(symbols)
        / ((T::from_usize_lossy(symbols) + T::lit(50.0)) * (T::one() + log))
}

/// Predictions for one numerology and noise level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrPrediction<T> {
    pub subcarriers: usize,
    pub symbols: usize,
    pub noise_variance: T,
    pub snr_2dfft: T,
    pub snr_g_sum_lower_bound: T,
    pub harmonic_sum: T,
}

impl<T: Real> SnrPrediction<T> {
    pub fn new(subcarriers: usize, symbols: usize, noise_variance: T) -> Result<Self> {
        if subcarriers < 2 || symbols < 1 {
            return Err(Error::InvalidConfig("need N_c >= 2 and N_s >= 1".into()));
        }
        if !(noise_variance > T::zero() && noise_variance.is_finite()) {
            return Err(Error::InvalidConfig("noise variance must be positive".into()));
        }
        Ok(Self {
            subcarriers,
            symbols,
            noise_variance,
            snr_2dfft: predict_2dfft_snr(subcarriers, symbols, noise_variance),
            snr_g_sum_lower_bound: predict_g_sum_snr_bound(subcarriers, symbols, noise_variance),
            harmonic_sum: harmonic_sum(subcarriers),
        })
    }
}

/// Mean and variance of a product of Gaussian densities, folding the
/// pairwise rule `u = (u₂δ₁² + u₁δ₂²)/(δ₁² + δ₂²)`, `δ² = δ₁²δ₂²/(δ₁² + δ₂²)`
/// from left to right.
pub fn gaussian_product_moments<T: Real>(means: &[T], variances: &[T]) -> Result<(T, T)> {
    if means.is_empty() || means.len() != variances.len() {
        return Err(Error::Dimension {
            expected: "equal, non-empty mean and variance lists".into(),
            found: format!("{} and {}", means.len(), variances.len()),
        });
    }
    if !variances.iter().all(|v| *v > T::zero() && v.is_finite()) {
        return Err(Error::InvalidConfig("variances must be positive".into()));
    }
    let first = (means[0], variances[0]);
    Ok(means[1..]
        .iter()
        .zip(&variances[1..])
        .fold(first, |(u1, d1), (&u2, &d2)| {
            let s = d1 + d2;
            ((u2 * d1 + u1 * d2) / s, d1 * d2 / s)
        }))
}
