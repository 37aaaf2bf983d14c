//! Square refinement lattices and the lag-product weight kernel.

use ndarray::Array2;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::scalar::Real;

/// Size of a refinement lattice, independent of where it is centered.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeShape<T> {
    pub half_extent: T,
    pub spacing: T,
}

impl<T: Real> LatticeShape<T> {
    /// ±5 m in 0.1 m steps.
    pub fn location_default() -> Self {
        Self { half_extent: T::lit(5.0), spacing: T::lit(0.1) }
    }

    /// ±3 m/s in 0.05 m/s steps.
    pub fn velocity_default() -> Self {
        Self { half_extent: T::lit(3.0), spacing: T::lit(0.05) }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.spacing > T::zero() && self.spacing.is_finite()) {
            return Err(Error::InvalidConfig("lattice spacing must be positive".into()));
        }
        if !(self.half_extent >= self.spacing && self.half_extent.is_finite()) {
            return Err(Error::InvalidConfig("lattice half extent must be >= spacing".into()));
        }
        Ok(())
    }

    /// Nodes per axis; always odd so the center is a node.
    pub fn points_per_axis(&self) -> usize {
        let half = (self.half_extent / self.spacing).round().to_usize().unwrap_or(0);
        2 * half + 1
    }

    pub fn centered_at(&self, center: Vec2<T>) -> Lattice<T> {
        Lattice { center, half_extent: self.half_extent, spacing: self.spacing }
    }
}

/// Square lattice of candidate positions or velocities. Node `(i, j)` sits
/// at `center + ((i - h)·spacing, (j - h)·spacing)` with `h` the half count,
/// enumerated row-major in `(i, j)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice<T> {
    pub center: Vec2<T>,
    pub half_extent: T,
    pub spacing: T,
}

impl<T: Real> Lattice<T> {
    pub fn shape(&self) -> LatticeShape<T> {
        LatticeShape { half_extent: self.half_extent, spacing: self.spacing }
    }

    pub fn points_per_axis(&self) -> usize {
        self.shape().points_per_axis()
    }

    pub fn node(&self, i: usize, j: usize) -> Vec2<T> {
        let h = T::from_usize_lossy(self.points_per_axis() / 2);
        let off = |i: usize| (T::from_usize_lossy(i) - h) * self.spacing;
        self.center + Vec2::new(off(i), off(j))
    }

    /// All nodes in row-major order.
    pub fn nodes(&self) -> Vec<Vec2<T>> {
        let n = self.points_per_axis();
        (0..n * n).map(|idx| self.node(idx / n, idx % n)).collect()
    }
}

/// Index of the largest weight; ties go to the node nearest the lattice
/// center, then to the lowest row-major index.
pub fn lattice_argmax<T: Real>(weights: &Array2<T>) -> Option<(usize, usize)> {
    let (rows, cols) = weights.dim();
    let (hr, hc) = ((rows / 2) as isize, (cols / 2) as isize);
    let dist = |(i, j): (usize, usize)| {
        let (di, dj) = (i as isize - hr, j as isize - hc);
        di * di + dj * dj
    };
    let mut best: Option<((usize, usize), T)> = None;
    for (idx, &v) in weights.indexed_iter() {
        if v.is_nan() {
            continue;
        }
        best = match best {
            None => Some((idx, v)),
            Some((b, bv)) if v > bv || (v == bv && dist(idx) < dist(b)) => Some((idx, v)),
            keep => keep,
        };
    }
    best.map(|(idx, _)| idx)
}

const CHUNK: usize = 8;

/// Evaluates `Σ_k Π_w Re(L_w(k)·exp(j·k·φ_w))` for a batch of nodes.
///
/// `lags[w]` is the lag vector of station `w` (entry `k-1` for lag `k`),
/// `phases[w][node]` the per-lag phase of station `w` at that node. Every
/// node is computed with the same sequence of operations whatever the batch
/// layout, so results do not depend on how nodes are grouped.
pub(crate) fn lag_product_weights<T: Real>(
    lags: &[&[Complex<T>]],
    phases: &[Vec<T>],
    out: &mut [T],
) {
    let stations = lags.len();
    debug_assert_eq!(phases.len(), stations);
    let len = lags.iter().map(|l| l.len()).min().unwrap_or(0);
    let zero = [T::zero(); CHUNK];
    let mut step_re = vec![zero; stations];
    let mut step_im = vec![zero; stations];
    let mut rot_re = vec![zero; stations];
    let mut rot_im = vec![zero; stations];

    for (start, out) in (0..out.len()).step_by(CHUNK).zip(out.chunks_mut(CHUNK)) {
        let width = out.len();
        for w in 0..stations {
            for j in 0..CHUNK {
                let phi = if j < width { phases[w][start + j] } else { T::zero() };
                let (s, c) = phi.sin_cos();
                step_re[w][j] = c;
                step_im[w][j] = s;
                rot_re[w][j] = c;
                rot_im[w][j] = s;
            }
        }
        let mut acc = zero;
        for k in 0..len {
            let mut prod = [T::one(); CHUNK];
            for w in 0..stations {
                let g = lags[w][k];
                let (rr, ri) = (&mut rot_re[w], &mut rot_im[w]);
                let (sr, si) = (&step_re[w], &step_im[w]);
                for j in 0..CHUNK {
                    prod[j] = prod[j] * (g.re * rr[j] - g.im * ri[j]);
                    let nr = rr[j] * sr[j] - ri[j] * si[j];
                    let ni = rr[j] * si[j] + ri[j] * sr[j];
                    rr[j] = nr;
                    ri[j] = ni;
                }
            }
            for j in 0..CHUNK {
                acc[j] = acc[j] + prod[j];
            }
        }
        out.copy_from_slice(&acc[..width]);
    }
}
