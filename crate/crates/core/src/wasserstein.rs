//! 2-Wasserstein space on the real line, represented by quantile functions
//! sampled on the midpoint grid s_g = (g - 1/2)/G. In this representation
//! distances are Euclidean up to a 1/sqrt(G) factor, geodesics are pointwise
//! interpolation and Fréchet means are pointwise averages.

use crate::error::{Error, Result};
use crate::metric::{MeanOptions, Shape, Space};
use crate::rng::normal_quantile;

/// Default quantile grid size. Midpoint nodes avoid evaluating quantile
/// functions at 0 or 1 and give O(G^-2) quadrature error for smooth
/// quantiles.
pub const DEFAULT_GRID: usize = 1000;

/// A distribution on ℝ as its quantile function sampled at the midpoint
/// grid; values are nondecreasing.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantilePoint {
    values: Vec<f64>,
}

impl QuantilePoint {
    /// Validates monotonicity. Dips up to 1e-12 are repaired by
    /// pool-adjacent-violators projection; anything larger is rejected.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("quantile grid must be nonempty"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("quantile values must be finite"));
        }
        let worst = values
            .windows(2)
            .map(|w| w[0] - w[1])
            .fold(0.0f64, f64::max);
        if worst > 1e-12 {
            return Err(Error::invalid(format!(
                "quantile values decrease by {worst:.3e} (> 1e-12)"
            )));
        }
        let values = if worst > 0.0 {
            monotone_projection(&values)
        } else {
            values
        };
        Ok(QuantilePoint { values })
    }

    pub(crate) fn new_unchecked(values: Vec<f64>) -> Self {
        QuantilePoint { values }
    }

    pub fn grid_size(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Mean of the represented distribution: grid average of the quantile
    /// function.
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Standard deviation of the represented distribution, from the grid.
    pub fn std_dev(&self) -> f64 {
        let a = self.mean();
        let var = self
            .values
            .iter()
            .map(|v| (v - a) * (v - a))
            .sum::<f64>()
            / self.values.len() as f64;
        var.sqrt()
    }
}

/// Midpoint grid nodes s_g = (g - 1/2)/G for g = 1..G.
pub fn midpoint_grid(grid_size: usize) -> Vec<f64> {
    (1..=grid_size)
        .map(|g| (g as f64 - 0.5) / grid_size as f64)
        .collect()
}

/// Pool-adjacent-violators projection onto nondecreasing sequences
/// (least-squares, uniform weights).
pub fn monotone_projection(values: &[f64]) -> Vec<f64> {
    // Each block stores (sum, count).
    let mut blocks: Vec<(f64, usize)> = Vec::with_capacity(values.len());
    for &v in values {
        blocks.push((v, 1));
        while blocks.len() >= 2 {
            let (s2, c2) = blocks[blocks.len() - 1];
            let (s1, c1) = blocks[blocks.len() - 2];
            if s1 / c1 as f64 <= s2 / c2 as f64 {
                break;
            }
            blocks.pop();
            *blocks.last_mut().unwrap() = (s1 + s2, c1 + c2);
        }
    }
    let mut out = Vec::with_capacity(values.len());
    for (s, c) in blocks {
        let mean = s / c as f64;
        out.extend(std::iter::repeat_n(mean, c));
    }
    out
}

/// Gaussian N(ν, σ²) as a quantile point: ν + σ Φ⁻¹(s_g).
pub fn gaussian_quantile_point(nu: f64, sigma: f64, grid_size: usize) -> Result<QuantilePoint> {
    if sigma < 0.0 {
        return Err(Error::invalid("sigma must be nonnegative"));
    }
    let values = midpoint_grid(grid_size)
        .into_iter()
        .map(|s| nu + sigma * normal_quantile(s))
        .collect();
    Ok(QuantilePoint::new_unchecked(values))
}

/// Same, but reusing a precomputed Φ⁻¹ grid (hot path of the simulation
/// harness).
pub fn gaussian_from_standard_grid(nu: f64, sigma: f64, std_grid: &[f64]) -> QuantilePoint {
    QuantilePoint::new_unchecked(std_grid.iter().map(|&z| nu + sigma * z).collect())
}

/// Φ⁻¹ sampled on the midpoint grid.
pub fn standard_normal_grid(grid_size: usize) -> Vec<f64> {
    midpoint_grid(grid_size)
        .into_iter()
        .map(normal_quantile)
        .collect()
}

/// Empirical quantile function from raw samples: the k-th order statistic
/// is placed at probability (k - 1/2)/n and values in between are linearly
/// interpolated (constant beyond the extreme order statistics), evaluated
/// at the midpoint grid.
pub fn quantile_from_samples(samples: &[f64], grid_size: usize) -> Result<QuantilePoint> {
    if samples.is_empty() {
        return Err(Error::invalid("need at least one sample"));
    }
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("samples must be finite"));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();
    let values = midpoint_grid(grid_size)
        .into_iter()
        .map(|s| {
            let h = s * n as f64 - 0.5;
            if h <= 0.0 {
                return sorted[0];
            }
            if h >= (n - 1) as f64 {
                return sorted[n - 1];
            }
            let lo = h.floor() as usize;
            let w = h - lo as f64;
            sorted[lo] * (1.0 - w) + sorted[lo + 1] * w
        })
        .collect();
    QuantilePoint::new(values)
}

/// Monotone transport map 𝒯_k(x) = x - sin(kx)/|k| for k in {±1, ±2}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TransportMap {
    k: i32,
}

impl TransportMap {
    pub fn new(k: i32) -> Result<Self> {
        if !matches!(k, -2 | -1 | 1 | 2) {
            return Err(Error::invalid(format!(
                "transport map index k = {k} not in {{-2, -1, 1, 2}}"
            )));
        }
        Ok(TransportMap { k })
    }

    pub fn index(&self) -> i32 {
        self.k
    }

    #[inline]
    pub fn apply(&self, x: f64) -> f64 {
        let k = self.k as f64;
        x - (k * x).sin() / k.abs()
    }
}

/// Pushforward of a distribution under a monotone transport map: quantiles
/// compose, so the map is applied pointwise to the quantile grid.
pub fn pushforward(point: &QuantilePoint, map: &TransportMap) -> QuantilePoint {
    QuantilePoint::new_unchecked(point.values.iter().map(|&x| map.apply(x)).collect())
}

/// W₂(ℝ) with a fixed quantile grid.
#[derive(Debug, Clone)]
pub struct WassersteinSpace {
    grid_size: usize,
}

impl WassersteinSpace {
    pub fn new(grid_size: usize) -> Self {
        WassersteinSpace { grid_size }
    }

    pub fn grid_size(&self) -> usize {
        self.grid_size
    }
}

impl Default for WassersteinSpace {
    fn default() -> Self {
        WassersteinSpace::new(DEFAULT_GRID)
    }
}

impl Space for WassersteinSpace {
    type Point = QuantilePoint;

    fn distance(&self, p: &QuantilePoint, q: &QuantilePoint) -> f64 {
        debug_assert_eq!(p.grid_size(), q.grid_size());
        let sum: f64 = p
            .values
            .iter()
            .zip(&q.values)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        (sum / p.grid_size() as f64).sqrt()
    }

    fn geodesic_point(&self, p: &QuantilePoint, q: &QuantilePoint, theta: f64) -> QuantilePoint {
        QuantilePoint::new_unchecked(
            p.values
                .iter()
                .zip(&q.values)
                .map(|(a, b)| (1.0 - theta) * a + theta * b)
                .collect(),
        )
    }

    fn shape_of(&self, p: &QuantilePoint) -> Shape {
        Shape::Quantile(p.grid_size())
    }

    // Closed form: the pointwise average of quantile functions.
    fn frechet_mean(&self, points: &[QuantilePoint], _opts: &MeanOptions) -> Result<QuantilePoint> {
        crate::metric::common_shape(points, self)?;
        let g = points[0].grid_size();
        let mut sum = vec![0.0; g];
        for p in points {
            for (s, v) in sum.iter_mut().zip(&p.values) {
                *s += v;
            }
        }
        let n = points.len() as f64;
        Ok(QuantilePoint::new_unchecked(
            sum.into_iter().map(|s| s / n).collect(),
        ))
    }
}
