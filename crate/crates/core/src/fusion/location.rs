//! Location fusion: rough multilateration fix, then lattice refinement on
//! the reconstructed distance vectors.

use ndarray::Array2;

use super::lag::{reconstruct_g, LagVector};
use super::lattice::{lag_product_weights, lattice_argmax, Lattice, LatticeShape};
use crate::error::{Error, Result};
use crate::geometry::{solve_sym2, Vec2};
use crate::ofdm::OfdmConfig;
use crate::report::BsReport;
use crate::scalar::Real;

/// Disc in which the target is known to lie; used to pick between the two
/// circle intersections of a two-station fix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensingRegion<T> {
    pub center: Vec2<T>,
    pub radius: T,
}

impl<T: Real> SensingRegion<T> {
    pub fn contains(&self, p: Vec2<T>) -> bool {
        p.distance(self.center) <= self.radius
    }

    /// Candidate nearest to the center; a candidate inside the region is
    /// always nearer than one outside.
    pub fn pick(&self, candidates: &[Vec2<T>]) -> Option<Vec2<T>> {
        candidates.iter().copied().fold(None, |best, c| match best {
            Some(b) if b.distance(self.center) <= c.distance(self.center) => Some(b),
            _ => Some(c),
        })
    }
}

/// Intersections of the range circles around two stations: two points,
/// or one when the circles are tangent.
pub fn rough_location_pair<T: Real>(
    bs_q: Vec2<T>,
    bs_s: Vec2<T>,
    range_q: T,
    range_s: T,
) -> Result<Vec<Vec2<T>>> {
    let baseline = bs_s - bs_q;
    let d = baseline.norm();
    if !(d > T::zero()) {
        return Err(Error::DegenerateGeometry("coincident base stations".into()));
    }
    let u = baseline * d.recip();
    let along = (range_q * range_q - range_s * range_s + d * d) / (T::lit(2.0) * d);
    let h_sq = range_q * range_q - along * along;
    let tol = T::lit(1e-12) * (range_q * range_q).max(d * d);
    if h_sq < -tol || h_sq.is_nan() {
        return Err(Error::NoIntersection);
    }
    let foot = bs_q + u * along;
    if h_sq <= tol {
        return Ok(vec![foot]);
    }
    let h = h_sq.sqrt();
    let perp = Vec2::new(-u.y, u.x);
    Ok(vec![foot + perp * h, foot - perp * h])
}

/// Point on the station baseline halfway between the closest points of two
/// non-intersecting range circles.
pub fn baseline_fallback<T: Real>(bs_q: Vec2<T>, bs_s: Vec2<T>, range_q: T, range_s: T) -> Vec2<T> {
    let baseline = bs_s - bs_q;
    let d = baseline.norm();
    let u = baseline * d.recip();
    let two = T::lit(2.0);
    let t = if range_q > range_s + d {
        (range_q + d + range_s) / two
    } else if range_s > range_q + d {
        (d - range_s - range_q) / two
    } else {
        (range_q + d - range_s) / two
    };
    bs_q + u * t
}

fn check_lengths<T>(stations: &[Vec2<T>], count: usize, what: &str) -> Result<()> {
    if stations.len() < 2 {
        return Err(Error::InvalidConfig("fusion needs at least 2 base stations".into()));
    }
    if count != stations.len() {
        return Err(Error::Dimension {
            expected: format!("{} {what}", stations.len()),
            found: count.to_string(),
        });
    }
    Ok(())
}

/// Rough target position from per-station ranges.
///
/// Two stations use the circle intersection nearest the sensing region
/// center (baseline fallback when the circles miss). Three or more use
/// linearized least squares on the differences of squared-range equations.
pub fn rough_location<T: Real>(
    stations: &[Vec2<T>],
    ranges: &[T],
    region: &SensingRegion<T>,
) -> Result<Vec2<T>> {
    check_lengths(stations, ranges.len(), "ranges")?;
    if stations.len() == 2 {
        let (q, s) = (stations[0], stations[1]);
        return match rough_location_pair(q, s, ranges[0], ranges[1]) {
            Ok(c) => Ok(region.pick(&c).expect("at least one intersection")),
            Err(Error::NoIntersection) => Ok(baseline_fallback(q, s, ranges[0], ranges[1])),
            Err(e) => Err(e),
        };
    }

    let n = T::from_usize_lossy(stations.len());
    let centroid = stations.iter().fold(Vec2::zero(), |acc, &s| acc + s) * n.recip();
    let s0 = stations[0] - centroid;
    let (mut a, mut b, mut c) = (T::zero(), T::zero(), T::zero());
    let mut rhs = Vec2::zero();
    for (&st, &r) in stations.iter().zip(ranges).skip(1) {
        let s = st - centroid;
        let row = (s - s0) * T::lit(2.0);
        let val = ranges[0] * ranges[0] - r * r + s.norm_sq() - s0.norm_sq();
        a = a + row.x * row.x;
        b = b + row.x * row.y;
        c = c + row.y * row.y;
        rhs = rhs + row * val;
    }
    solve_sym2(a, b, c, rhs, T::lit(1e-9))
        .map(|p| p + centroid)
        .ok_or_else(|| Error::IllConditioned("base stations are collinear".into()))
}

fn location_phases<T: Real>(nodes: &[Vec2<T>], stations: &[Vec2<T>], config: &OfdmConfig<T>) -> Vec<Vec<T>> {
    let rate = config.range_phase_rate();
    stations
        .iter()
        .map(|&bs| nodes.iter().map(|&z| -rate * z.distance(bs)).collect())
        .collect()
}

/// Weight `H(z) = Σ_k Π_w Re(G_w(k)·exp(-j·k·2π·Δf·2‖z - bs_w‖/C))`.
pub fn location_weight<T: Real>(
    z: Vec2<T>,
    lags: &[LagVector<T>],
    stations: &[Vec2<T>],
    config: &OfdmConfig<T>,
) -> Result<T> {
    check_lengths(stations, lags.len(), "lag vectors")?;
    let mut out = [T::zero()];
    let l: Vec<&[_]> = lags.iter().map(|g| g.entries.as_slice()).collect();
    lag_product_weights(&l, &location_phases(&[z], stations, config), &mut out);
    Ok(out[0])
}

/// Weights of every lattice node, indexed like [`Lattice::node`].
pub fn location_weights<T: Real>(
    lattice: &Lattice<T>,
    lags: &[LagVector<T>],
    stations: &[Vec2<T>],
    config: &OfdmConfig<T>,
) -> Result<Array2<T>> {
    check_lengths(stations, lags.len(), "lag vectors")?;
    let n = lattice.points_per_axis();
    let nodes = lattice.nodes();
    let l: Vec<&[_]> = lags.iter().map(|g| g.entries.as_slice()).collect();
    let mut out = vec![T::zero(); nodes.len()];
    lag_product_weights(&l, &location_phases(&nodes, stations, config), &mut out);
    Ok(Array2::from_shape_vec((n, n), out).expect("lattice is square"))
}

/// Result of location fusion.
#[derive(Debug, Clone)]
pub struct LocationFix<T> {
    pub position: Vec2<T>,
    pub rough: Vec2<T>,
    pub lattice: Lattice<T>,
    pub weights: Array2<T>,
}

/// Full location fusion over the station reports, given in station order.
pub fn estimate_location<T: Real>(
    reports: &[BsReport<T>],
    stations: &[Vec2<T>],
    config: &OfdmConfig<T>,
    shape: &LatticeShape<T>,
    region: &SensingRegion<T>,
) -> Result<LocationFix<T>> {
    shape.validate()?;
    check_lengths(stations, reports.len(), "reports")?;
    let ranges: Vec<T> = reports.iter().map(|r| r.range).collect();
    let rough = rough_location(stations, &ranges, region)?;
    let lags = reports
        .iter()
        .map(|r| reconstruct_g(&r.distance_feature, r.bs_index))
        .collect::<Result<Vec<_>>>()?;
    let lattice = shape.centered_at(rough);
    let weights = location_weights(&lattice, &lags, stations, config)?;
    let (i, j) = lattice_argmax(&weights)
        .ok_or_else(|| Error::IllConditioned("no finite lattice weight".into()))?;
    Ok(LocationFix { position: lattice.node(i, j), rough, lattice, weights })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;

    fn near(a: Vec2<f64>, b: Vec2<f64>, tol: f64) -> bool {
        a.distance(b) < tol
    }

    #[test]
    fn symmetric_pair() {
        let r = 141.4213562;
        let c = rough_location_pair(Vec2::new(-100.0, 0.0), Vec2::new(100.0, 0.0), r, r).unwrap();
        assert_eq!(c.len(), 2);
        assert!(near(c[0], Vec2::new(0.0, 100.0), 1e-5) || near(c[0], Vec2::new(0.0, -100.0), 1e-5));
        assert!(near(c[0], -c[1], 1e-9));
    }

    #[test]
    fn tangent_pair() {
        let c = rough_location_pair(Vec2::new(0.0, 0.0), Vec2::new(200.0, 0.0), 100.0, 100.0).unwrap();
        assert_eq!(c, vec![Vec2::new(100.0, 0.0)]);
    }

    #[test]
    fn missing_circles_fall_back_to_baseline() {
        let (q, s) = (Vec2::new(0.0, 0.0), Vec2::new(200.0, 0.0));
        assert!(matches!(rough_location_pair(q, s, 90.0, 100.0), Err(Error::NoIntersection)));
        assert!(near(baseline_fallback(q, s, 90.0, 100.0), Vec2::new(95.0, 0.0), 1e-12));
        assert!(near(baseline_fallback(q, s, 300.0, 50.0), Vec2::new(275.0, 0.0), 1e-12));
        assert!(near(baseline_fallback(q, s, 50.0, 300.0), Vec2::new(-75.0, 0.0), 1e-12));
        let region = SensingRegion { center: Vec2::zero(), radius: 10.0 };
        let p = rough_location(&[q, s], &[90.0, 100.0], &region).unwrap();
        assert!(near(p, Vec2::new(95.0, 0.0), 1e-12));
    }

    #[test]
    fn region_picks_candidate() {
        let region = SensingRegion { center: Vec2::new(0.0, 90.0), radius: 20.0 };
        let r = 100f64.hypot(100.0);
        let p = rough_location(&[Vec2::new(-100.0, 0.0), Vec2::new(100.0, 0.0)], &[r, r], &region).unwrap();
        assert!(near(p, Vec2::new(0.0, 100.0), 1e-9));
        assert!(region.contains(p));
    }

    #[test]
    fn least_squares_exact_and_collinear() {
        let st = [Vec2::new(0.0, 0.0), Vec2::new(200.0, 0.0), Vec2::new(0.0, 200.0)];
        let t = Vec2::new(50.0, 80.0);
        let r: Vec<f64> = st.iter().map(|s| s.distance(t)).collect();
        let region = SensingRegion { center: Vec2::zero(), radius: 1.0 };
        assert!(near(rough_location(&st, &r, &region).unwrap(), t, 1e-6));
        let line = [Vec2::new(0.0, 0.0), Vec2::new(100.0, 0.0), Vec2::new(250.0, 0.0)];
        assert!(matches!(
            rough_location(&line, &[10.0, 90.0, 240.0], &region),
            Err(Error::IllConditioned(_))
        ));
        assert!(rough_location(&st[..1], &r[..1], &region).is_err());
        assert!(rough_location(&st, &r[..2], &region).is_err());
    }

    #[test]
    fn weight_peaks_at_truth() {
        let cfg = OfdmConfig::<f64>::standard().with_resources(16, 8);
        let alpha = cfg.range_phase_rate();
        let st = [Vec2::new(150.0, 0.0), Vec2::new(0.0, 160.0)];
        let t = Vec2::new(2.0, 3.0);
        let lags: Vec<LagVector<f64>> = st
            .iter()
            .enumerate()
            .map(|(w, s)| {
                let r = s.distance(t);
                let e: Vec<_> = (0..16).map(|m| Complex::from_polar(1.0, -alpha * r * m as f64)).collect();
                reconstruct_g(&e, w).unwrap()
            })
            .collect();
        let h = location_weight(t, &lags, &st, &cfg).unwrap();
        assert!((h - 15.0).abs() < 1e-9);
        let off = location_weight(t + Vec2::new(0.5, 0.5), &lags, &st, &cfg).unwrap();
        assert!(off < h);
    }
}
