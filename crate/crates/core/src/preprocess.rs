//! Single-station preprocessing.
//!
//! A station first searches a range/radial-velocity grid for the strongest
//! response of its echo matrix `B`: with the distance compensation matrix
//! `A` (one row per candidate range) and the velocity compensation matrix
//! `C` (one column per candidate velocity), the search surface is
//! `D = |A·B·C|`. The winning cell gives the coarse estimates, which are
//! then used to compress `B` into a distance feature vector `E = B·c(v)`
//! and a velocity feature vector `F = a(R)·B`.

use ndarray::Array2;
use num_complex::Complex;

use crate::chirp::ChirpZ;
use crate::echo::EchoSymbolMatrix;
use crate::error::{Error, Result};
use crate::ofdm::OfdmConfig;
use crate::report::BsReport;
use crate::scalar::Real;

/// Candidate ranges and radial velocities, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchGrid<T> {
    pub range_min: T,
    pub range_max: T,
    pub range_points: usize,
    pub velocity_min: T,
    pub velocity_max: T,
    pub velocity_points: usize,
}

impl<T: Real> SearchGrid<T> {
    /// 100-300 m in 0.5 m steps, -40..40 m/s in 0.25 m/s steps.
    ///
    /// The range span stays below the ~206 m unambiguous range of the
    /// standard numerology.
    pub fn standard() -> Self {
        Self {
            range_min: T::lit(100.0),
            range_max: T::lit(300.0),
            range_points: 401,
            velocity_min: T::lit(-40.0),
            velocity_max: T::lit(40.0),
            velocity_points: 321,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.range_min >= T::zero() && self.range_max > self.range_min) {
            return Err(Error::InvalidConfig("range grid needs 0 <= min < max".into()));
        }
        if !(self.velocity_max > self.velocity_min) {
            return Err(Error::InvalidConfig("velocity grid needs min < max".into()));
        }
        if self.range_points < 2 || self.velocity_points < 2 {
            return Err(Error::InvalidConfig("search grid needs at least 2 points per axis".into()));
        }
        Ok(())
    }

    /// Spacing between adjacent range nodes (m).
    pub fn range_step(&self) -> T {
        (self.range_max - self.range_min) / T::from_usize_lossy(self.range_points - 1)
    }

    /// Spacing between adjacent velocity nodes (m/s).
    pub fn velocity_step(&self) -> T {
        (self.velocity_max - self.velocity_min) / T::from_usize_lossy(self.velocity_points - 1)
    }

    pub fn range_at(&self, k: usize) -> T {
        self.range_min + T::from_usize_lossy(k) * self.range_step()
    }

    pub fn velocity_at(&self, p: usize) -> T {
        self.velocity_min + T::from_usize_lossy(p) * self.velocity_step()
    }

    /// Index of the grid node nearest to `range`, clamped to the grid.
    pub fn nearest_range_index(&self, range: T) -> usize {
        nearest(range, self.range_min, self.range_step(), self.range_points)
    }

    pub fn nearest_velocity_index(&self, velocity: T) -> usize {
        nearest(velocity, self.velocity_min, self.velocity_step(), self.velocity_points)
    }
}

fn nearest<T: Real>(x: T, min: T, step: T, points: usize) -> usize {
    let idx = ((x - min) / step).round();
    if idx <= T::zero() {
        0
    } else {
        idx.to_usize().unwrap_or(usize::MAX).min(points - 1)
    }
}

/// Distance compensation matrix, `K x N_c`, row `k` is
/// `exp(+j·2π·m·Δf·2R'_k/C)` for `m = 0..N_c`.
pub fn build_distance_compensation<T: Real>(
    grid: &SearchGrid<T>,
    config: &OfdmConfig<T>,
) -> Array2<Complex<T>> {
    let rate = config.range_phase_rate();
    Array2::from_shape_fn((grid.range_points, config.subcarriers), |(k, m)| {
        Complex::from_polar(T::one(), rate * grid.range_at(k) * T::from_usize_lossy(m))
    })
}

/// Velocity compensation matrix, `N_s x P`, column `p` is
/// `exp(-j·2π·f_c·2v'_p·n·T/C)` for `n = 0..N_s`.
pub fn build_velocity_compensation<T: Real>(
    grid: &SearchGrid<T>,
    config: &OfdmConfig<T>,
) -> Array2<Complex<T>> {
    let rate = config.doppler_phase_rate();
    Array2::from_shape_fn((config.symbols, grid.velocity_points), |(n, p)| {
        Complex::from_polar(T::one(), -rate * grid.velocity_at(p) * T::from_usize_lossy(n))
    })
}

/// `|A·B·C|` by explicit matrix products. Reference path; the search used
/// by [`coarse_estimate`] evaluates the same surface with chirp-z sums.
pub fn estimation_matrix_direct<T: Real>(
    echo: &EchoSymbolMatrix<T>,
    grid: &SearchGrid<T>,
    config: &OfdmConfig<T>,
) -> Result<Array2<T>> {
    grid.validate()?;
    echo.check_shape(config)?;
    let a = build_distance_compensation(grid, config);
    let c = build_velocity_compensation(grid, config);
    let d = a.dot(&echo.entries.dot(&c));
    Ok(d.mapv(|z| z.norm()))
}

/// Outcome of the exhaustive range/velocity search.
#[derive(Debug, Clone, PartialEq)]
pub struct CoarseEstimate<T> {
    /// Estimated range (m).
    pub range: T,
    /// Estimated radial velocity (m/s).
    pub velocity: T,
    pub range_index: usize,
    pub velocity_index: usize,
    /// Search surface `|D|`, `K x P`.
    pub surface: Array2<T>,
}

/// First index of the largest value in row-major order.
pub(crate) fn argmax_2d<T: Real>(surface: &Array2<T>) -> Option<(usize, usize)> {
    let mut best: Option<((usize, usize), T)> = None;
    for (idx, &v) in surface.indexed_iter() {
        match best {
            Some((_, b)) if !(v > b) => {}
            _ => best = Some((idx, v)),
        }
    }
    best.map(|(idx, _)| idx)
}

/// Reusable range/velocity search for one grid and numerology.
///
/// Holds the FFT plans and chirp tables so repeated trials only pay for
/// the transforms.
pub struct RangeDopplerSearch<T: Real> {
    grid: SearchGrid<T>,
    config: OfdmConfig<T>,
    along_symbols: ChirpZ<T>,
    along_subcarriers: ChirpZ<T>,
}

impl<T: Real> RangeDopplerSearch<T> {
    pub fn new(grid: SearchGrid<T>, config: OfdmConfig<T>) -> Result<Self> {
        grid.validate()?;
        config.validate()?;
        let beta = config.doppler_phase_rate().as_f64();
        let alpha = config.range_phase_rate().as_f64();
        let along_symbols = ChirpZ::new(
            config.symbols,
            grid.velocity_points,
            -beta * grid.velocity_min.as_f64(),
            -beta * grid.velocity_step().as_f64(),
        );
        let along_subcarriers = ChirpZ::new(
            config.subcarriers,
            grid.range_points,
            alpha * grid.range_min.as_f64(),
            alpha * grid.range_step().as_f64(),
        );
        Ok(Self {
            grid,
            config,
            along_symbols,
            along_subcarriers,
        })
    }

    pub fn grid(&self) -> &SearchGrid<T> {
        &self.grid
    }

    pub fn config(&self) -> &OfdmConfig<T> {
        &self.config
    }

    /// Complex search surface `A·B·C`, `K x P`.
    pub fn surface(&self, echo: &EchoSymbolMatrix<T>) -> Result<Array2<Complex<T>>> {
        echo.check_shape(&self.config)?;
        let (nc, p) = (self.config.subcarriers, self.grid.velocity_points);
        let zero = Complex::new(T::zero(), T::zero());

        // B·C, stored transposed (P x N_c) so each velocity column is contiguous.
        let mut bc = vec![zero; p * nc];
        let mut ws = self.along_symbols.scratch();
        for (m, row) in echo.entries.outer_iter().enumerate() {
            self.along_symbols
                .apply(row.iter().copied(), &mut ws, |j, v| bc[j * nc + m] = v);
        }

        let mut d = Array2::from_elem((self.grid.range_points, p), zero);
        let mut ws = self.along_subcarriers.scratch();
        for j in 0..p {
            let col = &bc[j * nc..(j + 1) * nc];
            self.along_subcarriers
                .apply(col.iter().copied(), &mut ws, |k, v| d[[k, j]] = v);
        }
        Ok(d)
    }

    /// Coarse range and radial velocity at the peak of `|A·B·C|`; ties go
    /// to the lowest `(k, p)`.
    pub fn estimate(&self, echo: &EchoSymbolMatrix<T>) -> Result<CoarseEstimate<T>> {
        let surface = self.surface(echo)?.mapv(|z| z.norm());
        let (k, p) = argmax_2d(&surface)
            .ok_or_else(|| Error::InvalidConfig("empty search grid".into()))?;
        Ok(CoarseEstimate {
            range: self.grid.range_at(k),
            velocity: self.grid.velocity_at(p),
            range_index: k,
            velocity_index: p,
            surface,
        })
    }

    /// Full preprocessing: coarse search followed by compression.
    pub fn report(&self, echo: &EchoSymbolMatrix<T>) -> Result<BsReport<T>> {
        let coarse = self.estimate(echo)?;
        Ok(BsReport {
            bs_index: echo.bs_index,
            range: coarse.range,
            velocity: coarse.velocity,
            distance_feature: compress_to_e(echo, coarse.velocity, &self.config)?,
            velocity_feature: compress_to_f(echo, coarse.range, &self.config)?,
        })
    }
}

/// One-shot coarse estimate; builds a [`RangeDopplerSearch`] internally.
pub fn coarse_estimate<T: Real>(
    echo: &EchoSymbolMatrix<T>,
    grid: &SearchGrid<T>,
    config: &OfdmConfig<T>,
) -> Result<CoarseEstimate<T>> {
    RangeDopplerSearch::new(*grid, *config)?.estimate(echo)
}

/// Distance feature vector `E = B·c(v_test)`, length `N_c`.
pub fn compress_to_e<T: Real>(
    echo: &EchoSymbolMatrix<T>,
    velocity: T,
    config: &OfdmConfig<T>,
) -> Result<Vec<Complex<T>>> {
    echo.check_shape(config)?;
    let step = -config.doppler_phase_rate() * velocity;
    let comp: Vec<Complex<T>> = (0..config.symbols)
        .map(|n| Complex::from_polar(T::one(), step * T::from_usize_lossy(n)))
        .collect();
    Ok(echo
        .entries
        .outer_iter()
        .map(|row| row.iter().zip(&comp).map(|(b, c)| b * c).sum())
        .collect())
}

/// Velocity feature vector `F = a(R_test)·B`, length `N_s`.
pub fn compress_to_f<T: Real>(
    echo: &EchoSymbolMatrix<T>,
    range: T,
    config: &OfdmConfig<T>,
) -> Result<Vec<Complex<T>>> {
    echo.check_shape(config)?;
    let step = config.range_phase_rate() * range;
    let mut out = vec![Complex::new(T::zero(), T::zero()); config.symbols];
    for (m, row) in echo.entries.outer_iter().enumerate() {
        let a = Complex::from_polar(T::one(), step * T::from_usize_lossy(m));
        for (acc, b) in out.iter_mut().zip(row.iter()) {
            *acc = *acc + a * b;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::echo::{synthesize_echo, Scenario};
    use crate::geometry::Vec2;
    use std::f64::consts::PI;

    const C: f64 = 299_792_458.0;

    fn small_grid() -> SearchGrid<f64> {
        SearchGrid {
            range_min: 100.0,
            range_max: 110.0,
            range_points: 21,
            velocity_min: -5.0,
            velocity_max: 5.0,
            velocity_points: 41,
        }
    }

    fn echo_at(cfg: &OfdmConfig<f64>, range: f64, radial: f64, noiseless: bool) -> EchoSymbolMatrix<f64> {
        let sc = Scenario::new(
            vec![Vec2::new(range, 0.0)],
            Vec2::zero(),
            Vec2::new(radial, 0.0),
            5,
        );
        synthesize_echo(cfg, &sc, 0, -5.0, noiseless).unwrap()
    }

    #[test]
    fn distance_compensation_entries() {
        let grid = SearchGrid { range_min: 0.0, range_max: 75.0, range_points: 2, ..small_grid() };
        let mut cfg = OfdmConfig::<f64>::standard();
        cfg.subcarriers = 2;
        cfg.bandwidth_hz = 2e6; // Δf = 1 MHz
        let a = build_distance_compensation(&grid, &cfg);
        assert_eq!(a.dim(), (2, 2));
        assert_eq!(a[[0, 0]], Complex::new(1.0, 0.0));
        assert_eq!(a[[0, 1]], Complex::new(1.0, 0.0));
        let expect = Complex::from_polar(1.0, 2.0 * PI * 1e6 * (150.0 / C));
        assert!((a[[1, 1]] - expect).norm() < 1e-14);
        assert!(a.iter().all(|z| ((z * z.conj()).re - 1.0).abs() < 1e-14));
    }

    #[test]
    fn velocity_compensation_entries() {
        let grid = SearchGrid { velocity_min: 0.0, velocity_max: 10.0, velocity_points: 2, ..small_grid() };
        let mut cfg = OfdmConfig::<f64>::standard();
        cfg.symbols = 2;
        let c = build_velocity_compensation(&grid, &cfg);
        assert_eq!(c.dim(), (2, 2));
        assert_eq!(c[[1, 0]], Complex::new(1.0, 0.0));
        let expect = Complex::from_polar(1.0, -2.0 * PI * 24e9 * (20.0 * 12.375e-6) / C);
        assert!((c[[1, 1]] - expect).norm() < 1e-12);
        assert!(c.iter().all(|z| (z.norm() - 1.0).abs() < 1e-14));
    }

    #[test]
    fn on_grid_peak_is_coherent_sum() {
        let cfg = OfdmConfig::<f64>::standard().with_resources(32, 32);
        let grid = small_grid();
        let echo = echo_at(&cfg, 104.5, 2.25, true);
        let est = coarse_estimate(&echo, &grid, &cfg).unwrap();
        assert_eq!((est.range_index, est.velocity_index), (9, 29));
        assert!((est.range - 104.5).abs() < 1e-12);
        assert!((est.velocity - 2.25).abs() < 1e-12);
        let peak = est.surface[[9, 29]];
        assert!((peak - 1024.0).abs() < 1e-8);
    }

    #[test]
    fn chirp_surface_matches_direct_products() {
        let cfg = OfdmConfig::<f64>::standard().with_resources(16, 12);
        let grid = small_grid();
        let echo = echo_at(&cfg, 103.3, -1.7, false);
        let fast = coarse_estimate(&echo, &grid, &cfg).unwrap().surface;
        let direct = estimation_matrix_direct(&echo, &grid, &cfg).unwrap();
        let scale = direct.iter().cloned().fold(0.0, f64::max);
        for (a, b) in fast.iter().zip(direct.iter()) {
            assert!((a - b).abs() < 1e-10 * scale);
        }
    }

    #[test]
    fn compress_exact_compensation() {
        let cfg = OfdmConfig::<f64>::standard().with_resources(8, 16);
        let echo = echo_at(&cfg, 120.0, 3.0, true);
        let e = compress_to_e(&echo, 3.0, &cfg).unwrap();
        let alpha = 2.0 * PI * cfg.subcarrier_spacing() * 2.0 / C;
        for (m, v) in e.iter().enumerate() {
            let expect = Complex::from_polar(16.0, -alpha * 120.0 * m as f64);
            assert!((v - expect).norm() < 1e-10);
        }
        let f = compress_to_f(&echo, 120.0, &cfg).unwrap();
        let beta = 2.0 * PI * 24e9 * 2.0 * 12.375e-6 / C;
        for (n, v) in f.iter().enumerate() {
            let expect = Complex::from_polar(8.0, beta * 3.0 * n as f64);
            assert!((v - expect).norm() < 1e-10);
        }
    }

    #[test]
    fn shape_mismatch_rejected() {
        let cfg = OfdmConfig::<f64>::standard().with_resources(8, 8);
        let echo = echo_at(&cfg, 120.0, 0.0, true);
        let other = cfg.with_resources(8, 9);
        assert!(matches!(compress_to_e(&echo, 0.0, &other), Err(Error::Dimension { .. })));
        assert!(coarse_estimate(&echo, &small_grid(), &other).is_err());
    }

    #[test]
    fn grid_validation_and_mapping() {
        let g = SearchGrid::<f64>::standard();
        g.validate().unwrap();
        assert_eq!(g.range_at(0), 100.0);
        assert_eq!(g.range_at(400), 300.0);
        assert!((g.range_step() - 0.5).abs() < 1e-12);
        assert!((g.velocity_step() - 0.25).abs() < 1e-12);
        assert_eq!(g.nearest_range_index(1000.0), 400);
        assert_eq!(g.nearest_range_index(-3.0), 0);
        assert_eq!(g.nearest_velocity_index(0.1), 160);
        let bad = SearchGrid { range_points: 1, ..g };
        assert!(bad.validate().is_err());
        let bad = SearchGrid { velocity_max: -50.0, ..g };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn argmax_ties_take_lowest_index() {
        let s = Array2::from_shape_vec((2, 2), vec![1.0, 3.0, 3.0, 2.0]).unwrap();
        assert_eq!(argmax_2d(&s), Some((0, 1)));
    }
}
