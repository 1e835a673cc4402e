//! Space-agnostic constructs: the geodesic-metric-space contract, time
//! series, step functions, total variation, the d_n pseudo-metric and
//! Fréchet means.

use crate::error::{Error, Result};
use crate::rng::SplitMix64;

/// Opaque shape metadata used to validate point compatibility across a
/// series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Vector(usize),
    Matrix(usize),
    Quantile(usize),
}

impl std::fmt::Display for Shape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Shape::Vector(k) => write!(f, "vector({k})"),
            Shape::Matrix(m) => write!(f, "matrix({m}x{m})"),
            Shape::Quantile(g) => write!(f, "quantile({g})"),
        }
    }
}

/// Options for the generic inductive Fréchet mean.
#[derive(Debug, Clone)]
pub struct MeanOptions {
    pub max_passes: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for MeanOptions {
    fn default() -> Self {
        MeanOptions {
            max_passes: 50,
            tol: 1e-10,
            seed: 0x5EED,
        }
    }
}

/// Failure of an iterative Fréchet mean computation, carrying the last
/// iterate so callers can inspect or reuse it.
#[derive(Debug, thiserror::Error)]
pub enum MeanError<P: std::fmt::Debug> {
    #[error(transparent)]
    Invalid(#[from] Error),
    #[error("Fréchet mean did not converge after {passes} passes")]
    NotConverged { last: P, passes: usize },
}

impl<P: std::fmt::Debug> From<MeanError<P>> for Error {
    fn from(e: MeanError<P>) -> Error {
        match e {
            MeanError::Invalid(err) => err,
            MeanError::NotConverged { passes, .. } => {
                Error::ConvergenceFailure { iterations: passes }
            }
        }
    }
}

/// Contract every geodesic metric space backend implements.
///
/// `distance` must be a metric (symmetric, triangle inequality) and
/// `geodesic_point(p, q, θ)` the point at fraction θ of the way along the
/// unique geodesic from `p` to `q`, so that
/// `distance(p, geodesic_point(p, q, θ)) = θ · distance(p, q)`.
pub trait Space {
    type Point: Clone + std::fmt::Debug;

    fn distance(&self, p: &Self::Point, q: &Self::Point) -> f64;

    fn geodesic_point(&self, p: &Self::Point, q: &Self::Point, theta: f64) -> Self::Point;

    fn shape_of(&self, p: &Self::Point) -> Shape;

    /// Fréchet mean of a point set. The default is the inductive geodesic
    /// mean with shuffled passes; backends with closed forms override it.
    fn frechet_mean(&self, points: &[Self::Point], opts: &MeanOptions) -> Result<Self::Point>
    where
        Self: Sized,
    {
        inductive_frechet_mean(points, self, opts).map_err(Error::from)
    }
}

/// Verify all points share one shape; returns it.
pub fn common_shape<S: Space>(points: &[S::Point], space: &S) -> Result<Shape> {
    let first = points
        .first()
        .ok_or_else(|| Error::invalid("need at least one point"))?;
    let shape = space.shape_of(first);
    for p in &points[1..] {
        let s = space.shape_of(p);
        if s != shape {
            return Err(Error::invalid(format!("shape mismatch: {shape} vs {s}")));
        }
    }
    Ok(shape)
}

/// Total variation of a point sequence: Σ d(v_i, v_{i+1}).
pub fn total_variation<S: Space>(values: &[S::Point], space: &S) -> Result<f64> {
    common_shape(values, space)?;
    Ok(values
        .windows(2)
        .map(|w| space.distance(&w[0], &w[1]))
        .sum())
}

/// Pseudo-metric d_n(f, g) = {n⁻¹ Σ d²(f_i, g_i)}^{1/2}.
pub fn d_n<S: Space>(f: &[S::Point], g: &[S::Point], space: &S) -> Result<f64> {
    if f.len() != g.len() || f.is_empty() {
        return Err(Error::invalid(format!(
            "d_n needs equal nonempty lengths, got {} and {}",
            f.len(),
            g.len()
        )));
    }
    let sf = common_shape(f, space)?;
    let sg = common_shape(g, space)?;
    if sf != sg {
        return Err(Error::invalid(format!("shape mismatch: {sf} vs {sg}")));
    }
    let n = f.len() as f64;
    let sum: f64 = f
        .iter()
        .zip(g)
        .map(|(a, b)| {
            let d = space.distance(a, b);
            d * d
        })
        .sum();
    Ok((sum / n).sqrt())
}

fn frechet_objective<S: Space>(x: &S::Point, points: &[S::Point], space: &S) -> f64 {
    points
        .iter()
        .map(|y| {
            let d = space.distance(x, y);
            d * d
        })
        .sum()
}

/// Generic Fréchet mean: inductive geodesic mean over shuffled passes,
/// x ← ⟦x, Y_k⟧_{1/t} with t the global count of processed points, refined
/// until the empirical Fréchet objective changes by less than `tol` over a
/// pass. After every complete pass each point has been absorbed with equal
/// total weight, so in flat (or log-flat) geometries the iterate is the
/// exact mean; in curved Hadamard spaces it converges by the law of large
/// numbers for inductive means. Backends with closed forms override this.
pub fn inductive_frechet_mean<S: Space>(
    points: &[S::Point],
    space: &S,
    opts: &MeanOptions,
) -> std::result::Result<S::Point, MeanError<S::Point>> {
    common_shape(points, space)?;
    if points.len() == 1 {
        return Ok(points[0].clone());
    }
    let mut rng = SplitMix64::new(opts.seed);
    let mut order: Vec<usize> = (0..points.len()).collect();
    let mut x: Option<S::Point> = None;
    let mut processed = 0usize;
    let mut prev_obj = f64::INFINITY;
    for pass in 0..opts.max_passes {
        rng.shuffle(&mut order);
        for &k in &order {
            processed += 1;
            x = Some(match x {
                None => points[k].clone(),
                Some(cur) => {
                    space.geodesic_point(&cur, &points[k], 1.0 / processed as f64)
                }
            });
        }
        let current = x.as_ref().expect("nonempty pass");
        let obj = frechet_objective(current, points, space);
        if pass > 0 && (prev_obj - obj).abs() < opts.tol * (1.0 + obj.abs()) {
            return Ok(current.clone());
        }
        prev_obj = obj;
    }
    Err(MeanError::NotConverged {
        last: x.expect("nonempty input"),
        passes: opts.max_passes,
    })
}

/// Equally spaced (by default) design points paired with observations.
#[derive(Debug, Clone)]
pub struct TimeSeries<P> {
    design: Vec<f64>,
    observations: Vec<P>,
}

impl<P: Clone + std::fmt::Debug> TimeSeries<P> {
    /// Default construction: t_i = (i-1)/(n-1) on [0, 1].
    pub fn equispaced<S: Space<Point = P>>(observations: Vec<P>, space: &S) -> Result<Self> {
        let n = observations.len();
        if n == 0 {
            return Err(Error::invalid("time series needs at least one observation"));
        }
        let design = if n == 1 {
            vec![0.0]
        } else {
            (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
        };
        Self::new(design, observations, space)
    }

    pub fn new<S: Space<Point = P>>(
        design: Vec<f64>,
        observations: Vec<P>,
        space: &S,
    ) -> Result<Self> {
        if design.len() != observations.len() {
            return Err(Error::invalid("design and observation lengths differ"));
        }
        if observations.is_empty() {
            return Err(Error::invalid("time series needs at least one observation"));
        }
        for w in design.windows(2) {
            if w[1] <= w[0] || w[0].is_nan() || w[1].is_nan() {
                return Err(Error::invalid("design points must be strictly increasing"));
            }
        }
        if design[0] < 0.0 || *design.last().unwrap() > 1.0 {
            return Err(Error::invalid("design points must lie in [0, 1]"));
        }
        common_shape(&observations, space)?;
        Ok(TimeSeries {
            design,
            observations,
        })
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn design(&self) -> &[f64] {
        &self.design
    }

    pub fn observations(&self) -> &[P] {
        &self.observations
    }

    /// Subseries keeping the given (sorted) indices; used by cross-validation.
    pub fn subset(&self, keep: &[usize]) -> TimeSeries<P> {
        TimeSeries {
            design: keep.iter().map(|&i| self.design[i]).collect(),
            observations: keep.iter().map(|&i| self.observations[i].clone()).collect(),
        }
    }
}

/// Piecewise-constant function on [0, 1] with right-open intervals
/// [b_k, b_{k+1}); the value at t = 1 is the last value.
///
/// A degenerate final interval (duplicate breakpoint at 1) is allowed: with
/// the default design t_n = 1 and the last fitted value occupies only the
/// point {1}, matching the boundary-extended canonical form.
#[derive(Debug, Clone)]
pub struct StepFunction<P> {
    breakpoints: Vec<f64>,
    values: Vec<P>,
}

impl<P: Clone + std::fmt::Debug> StepFunction<P> {
    pub fn new(breakpoints: Vec<f64>, values: Vec<P>) -> Result<Self> {
        if breakpoints.len() != values.len() + 1 {
            return Err(Error::invalid(
                "need exactly one more breakpoint than values",
            ));
        }
        if breakpoints[0] != 0.0 || *breakpoints.last().unwrap() != 1.0 {
            return Err(Error::invalid("breakpoints must start at 0 and end at 1"));
        }
        for w in breakpoints.windows(2) {
            if w[1] < w[0] {
                return Err(Error::invalid("breakpoints must be nondecreasing"));
            }
        }
        Ok(StepFunction {
            breakpoints,
            values,
        })
    }

    /// Build the boundary-extended step function from fitted values at the
    /// design points: constant on [t_i, t_{i+1}), extended to [0, t_1] and
    /// [t_n, 1] with the first and last fitted values.
    pub fn from_fitted(design: &[f64], fitted: &[P]) -> Result<Self> {
        if design.len() != fitted.len() || fitted.is_empty() {
            return Err(Error::invalid("design/fitted length mismatch"));
        }
        let n = design.len();
        if n == 1 {
            return StepFunction::new(vec![0.0, 1.0], vec![fitted[0].clone()]);
        }
        // Interval i is [t_{i+1}, t_{i+2}) carrying fitted[i]; the first
        // interval extends left to 0 and the last right to 1.
        let mut breakpoints = Vec::with_capacity(n + 1);
        breakpoints.push(0.0);
        breakpoints.extend_from_slice(&design[1..]);
        breakpoints.push(1.0);
        StepFunction::new(breakpoints, fitted.to_vec())
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[P] {
        &self.values
    }

    /// Evaluate at t in [0, 1]; right-open convention, t = 1 maps to the
    /// last value.
    pub fn evaluate(&self, t: f64) -> Result<&P> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::invalid(format!("t = {t} outside [0, 1]")));
        }
        // Largest interval whose left endpoint is <= t; skips degenerate
        // pieces except at t = 1 where the final value applies.
        let k = self.breakpoints.partition_point(|&b| b <= t);
        let k = k.saturating_sub(1).min(self.values.len() - 1);
        Ok(&self.values[k])
    }

    /// TV of a step function: sum of distances between consecutive values.
    pub fn total_variation<S: Space<Point = P>>(&self, space: &S) -> Result<f64> {
        total_variation(&self.values, space)
    }
}
