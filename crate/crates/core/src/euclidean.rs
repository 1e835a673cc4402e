//! ℝᵏ backend. Serves as the correctness anchor for the solver: its output
//! can be checked against an exact univariate TV-denoising solution.

use crate::error::{Error, Result};
use crate::metric::{MeanOptions, Shape, Space};

/// A point in ℝᵏ.
#[derive(Debug, Clone, PartialEq)]
pub struct VecPoint {
    coords: Vec<f64>,
}

impl VecPoint {
    pub fn new(coords: Vec<f64>) -> Self {
        VecPoint { coords }
    }

    pub fn scalar(x: f64) -> Self {
        VecPoint { coords: vec![x] }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

/// Euclidean space of a fixed dimension.
#[derive(Debug, Clone)]
pub struct Euclidean {
    dim: usize,
}

impl Euclidean {
    pub fn new(dim: usize) -> Self {
        Euclidean { dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn check(&self, p: &VecPoint) -> Result<()> {
        if p.dim() != self.dim {
            return Err(Error::invalid(format!(
                "dimension mismatch: expected {}, got {}",
                self.dim,
                p.dim()
            )));
        }
        if p.coords.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("non-finite coordinate"));
        }
        Ok(())
    }
}

impl Space for Euclidean {
    type Point = VecPoint;

    fn distance(&self, p: &VecPoint, q: &VecPoint) -> f64 {
        debug_assert_eq!(p.dim(), q.dim());
        p.coords
            .iter()
            .zip(&q.coords)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    fn geodesic_point(&self, p: &VecPoint, q: &VecPoint, theta: f64) -> VecPoint {
        // θ outside [0,1] extrapolates along the (complete) geodesic line.
        debug_assert!(theta.is_finite());
        VecPoint {
            coords: p
                .coords
                .iter()
                .zip(&q.coords)
                .map(|(a, b)| (1.0 - theta) * a + theta * b)
                .collect(),
        }
    }

    fn shape_of(&self, p: &VecPoint) -> Shape {
        Shape::Vector(p.dim())
    }

    // Closed form: the arithmetic mean, which removes iteration error from
    // the oracle-equivalence path.
    fn frechet_mean(&self, points: &[VecPoint], _opts: &MeanOptions) -> Result<VecPoint> {
        crate::metric::common_shape(points, self)?;
        let k = points[0].dim();
        let mut sum = vec![0.0; k];
        for p in points {
            for (s, x) in sum.iter_mut().zip(&p.coords) {
                *s += x;
            }
        }
        let n = points.len() as f64;
        Ok(VecPoint {
            coords: sum.into_iter().map(|s| s / n).collect(),
        })
    }
}
