//! Lag-domain reconstruction of feature vectors.
//!
//! Averaging the conjugate products of all element pairs a fixed lag apart
//! removes the unknown common phase of a feature vector and keeps only the
//! per-index phase increment.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Reconstructed vector, entry `i` holding lag `k = i + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct LagVector<T> {
    pub entries: Vec<Complex<T>>,
    pub bs_index: usize,
}

impl<T: Real> LagVector<T> {
    /// Entry at lag `k`, `1 <= k <= len`.
    pub fn lag(&self, k: usize) -> Complex<T> {
        self.entries[k - 1]
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// `out[k-1] = (1/(N-k))·Σ_a x[a]·conj(x[a+k])` for `k = 1..N-1`.
pub fn lag_average<T: Real>(x: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
    let n = x.len();
    if n < 2 {
        return Err(Error::Dimension {
            expected: "feature vector of length >= 2".into(),
            found: n.to_string(),
        });
    }
    Ok((1..n)
        .map(|k| {
            let s: Complex<T> = x[..n - k]
                .iter()
                .zip(&x[k..])
                .map(|(a, b)| a * b.conj())
                .sum();
            s / T::from_usize_lossy(n - k)
        })
        .collect())
}

/// Lag vector of a distance feature vector. Noiseless lag `k` carries phase
/// `+k·2π·Δf·2R/C`.
pub fn reconstruct_g<T: Real>(distance_feature: &[Complex<T>], bs_index: usize) -> Result<LagVector<T>> {
    Ok(LagVector {
        entries: lag_average(distance_feature)?,
        bs_index,
    })
}

/// Lag vector of a velocity feature vector. Noiseless lag `k` carries phase
/// `-k·2π·f_c·2vT/C`.
pub fn reconstruct_i<T: Real>(velocity_feature: &[Complex<T>], bs_index: usize) -> Result<LagVector<T>> {
    Ok(LagVector {
        entries: lag_average(velocity_feature)?,
        bs_index,
    })
}
