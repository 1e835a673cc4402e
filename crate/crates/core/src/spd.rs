//! Symmetric positive-definite matrix backend with the affine-invariant and
//! Log-Euclidean geometries, built on an internal cyclic Jacobi
//! eigendecomposition (matrices are small, m <= 16).

use crate::error::{Error, Result};
use crate::metric::{MeanError, MeanOptions, Shape, Space};

/// Eigenvalues at or below this floor are rejected by log/sqrt rather than
/// clamped, to surface data problems.
pub const EIGENVALUE_FLOOR: f64 = 1e-12;

/// Dense square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMat {
    m: usize,
    a: Vec<f64>,
}

impl SymMat {
    pub fn zeros(m: usize) -> Self {
        SymMat {
            m,
            a: vec![0.0; m * m],
        }
    }

    pub fn identity(m: usize) -> Self {
        let mut out = Self::zeros(m);
        for i in 0..m {
            out.a[i * m + i] = 1.0;
        }
        out
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.len();
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::invalid("matrix rows must be square"));
        }
        let mut a = Vec::with_capacity(m * m);
        for r in rows {
            a.extend_from_slice(r);
        }
        Ok(SymMat { m, a })
    }

    pub fn from_row_major(m: usize, a: Vec<f64>) -> Result<Self> {
        if a.len() != m * m {
            return Err(Error::invalid("row-major data length mismatch"));
        }
        Ok(SymMat { m, a })
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn data(&self) -> &[f64] {
        &self.a
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.m + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.a[i * self.m + j] = v;
    }

    pub fn scale(&self, s: f64) -> SymMat {
        SymMat {
            m: self.m,
            a: self.a.iter().map(|x| x * s).collect(),
        }
    }

    pub fn add(&self, other: &SymMat) -> SymMat {
        debug_assert_eq!(self.m, other.m);
        SymMat {
            m: self.m,
            a: self
                .a
                .iter()
                .zip(&other.a)
                .map(|(x, y)| x + y)
                .collect(),
        }
    }

    pub fn sub(&self, other: &SymMat) -> SymMat {
        debug_assert_eq!(self.m, other.m);
        SymMat {
            m: self.m,
            a: self
                .a
                .iter()
                .zip(&other.a)
                .map(|(x, y)| x - y)
                .collect(),
        }
    }

    pub fn matmul(&self, other: &SymMat) -> SymMat {
        debug_assert_eq!(self.m, other.m);
        let m = self.m;
        let mut out = SymMat::zeros(m);
        for i in 0..m {
            for k in 0..m {
                let aik = self.a[i * m + k];
                if aik == 0.0 {
                    continue;
                }
                for j in 0..m {
                    out.a[i * m + j] += aik * other.a[k * m + j];
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> SymMat {
        let m = self.m;
        let mut out = SymMat::zeros(m);
        for i in 0..m {
            for j in 0..m {
                out.a[j * m + i] = self.a[i * m + j];
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.a.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn symmetry_defect(&self) -> f64 {
        let m = self.m;
        let mut s = 0.0;
        for i in 0..m {
            for j in (i + 1)..m {
                let d = self.a[i * m + j] - self.a[j * m + i];
                s += 2.0 * d * d;
            }
        }
        s.sqrt()
    }

    pub fn is_symmetric(&self, rel_tol: f64) -> bool {
        self.symmetry_defect() <= rel_tol * (1.0 + self.frobenius_norm())
    }

    /// Replace with (A + Aᵀ)/2; cheap guard against rounding drift after
    /// matrix products of symmetric factors.
    pub fn symmetrize(&mut self) {
        let m = self.m;
        for i in 0..m {
            for j in (i + 1)..m {
                let v = 0.5 * (self.a[i * m + j] + self.a[j * m + i]);
                self.a[i * m + j] = v;
                self.a[j * m + i] = v;
            }
        }
    }
}

/// Eigendecomposition of a symmetric matrix: A = Q Λ Qᵀ with eigenvalues in
/// descending order and orthogonal Q (eigenvectors in columns).
#[derive(Debug, Clone)]
pub struct SymEig {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: SymMat,
}

impl SymEig {
    /// Q f(Λ) Qᵀ.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> SymMat {
        let m = self.eigenvectors.m;
        let q = &self.eigenvectors;
        let mut out = SymMat::zeros(m);
        for k in 0..m {
            let fl = f(self.eigenvalues[k]);
            if fl == 0.0 {
                continue;
            }
            for i in 0..m {
                let qik = q.get(i, k) * fl;
                for j in i..m {
                    let v = qik * q.get(j, k);
                    out.a[i * m + j] += v;
                }
            }
        }
        for i in 0..m {
            for j in 0..i {
                out.a[i * m + j] = out.a[j * m + i];
            }
        }
        out
    }

    pub fn reconstruct(&self) -> SymMat {
        self.apply(|x| x)
    }
}

fn off_diagonal_mass(a: &SymMat) -> f64 {
    let m = a.m;
    let mut s = 0.0;
    for i in 0..m {
        for j in 0..m {
            if i != j {
                let v = a.a[i * m + j];
                s += v * v;
            }
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Sweeps rotate
/// away off-diagonal entries until their Frobenius mass drops below
/// 1e-14 * ||A||_F.
pub fn sym_eig(a: &SymMat) -> Result<SymEig> {
    if !a.is_symmetric(1e-10) {
        return Err(Error::invalid(format!(
            "matrix is not symmetric (defect {:.3e})",
            a.symmetry_defect()
        )));
    }
    let m = a.m;
    let norm = a.frobenius_norm();
    let mut work = a.clone();
    work.symmetrize();
    let mut q = SymMat::identity(m);
    let tol = 1e-14 * norm;
    const MAX_SWEEPS: usize = 64;
    for _sweep in 0..MAX_SWEEPS {
        if off_diagonal_mass(&work) <= tol {
            break;
        }
        for p in 0..m {
            for r in (p + 1)..m {
                let apr = work.get(p, r);
                if apr == 0.0 {
                    continue;
                }
                let app = work.get(p, p);
                let arr = work.get(r, r);
                let tau = (arr - app) / (2.0 * apr);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // A <- Jᵀ A J on rows/cols p, r
                for k in 0..m {
                    let akp = work.get(k, p);
                    let akr = work.get(k, r);
                    work.set(k, p, c * akp - s * akr);
                    work.set(k, r, s * akp + c * akr);
                }
                for k in 0..m {
                    let apk = work.get(p, k);
                    let ark = work.get(r, k);
                    work.set(p, k, c * apk - s * ark);
                    work.set(r, k, s * apk + c * ark);
                }
                for k in 0..m {
                    let qkp = q.get(k, p);
                    let qkr = q.get(k, r);
                    q.set(k, p, c * qkp - s * qkr);
                    q.set(k, r, s * qkp + c * qkr);
                }
            }
        }
    }
    let mut pairs: Vec<(f64, usize)> = (0..m).map(|i| (work.get(i, i), i)).collect();
    pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let eigenvalues: Vec<f64> = pairs.iter().map(|&(l, _)| l).collect();
    let mut vectors = SymMat::zeros(m);
    for (new_col, &(_, old_col)) in pairs.iter().enumerate() {
        for i in 0..m {
            vectors.set(i, new_col, q.get(i, old_col));
        }
    }
    Ok(SymEig {
        eigenvalues,
        eigenvectors: vectors,
    })
}

fn require_positive(eig: &SymEig, context: &str) -> Result<()> {
    if let Some(&min) = eig
        .eigenvalues
        .iter()
        .min_by(|a, b| a.partial_cmp(b).unwrap())
    {
        if min <= EIGENVALUE_FLOOR {
            return Err(Error::NotPositiveDefinite(format!(
                "{context}: smallest eigenvalue {min:.3e} <= {EIGENVALUE_FLOOR:.0e}"
            )));
        }
    }
    Ok(())
}

/// Matrix logarithm of an SPD matrix.
pub fn spd_log(a: &SymMat) -> Result<SymMat> {
    let eig = sym_eig(a)?;
    require_positive(&eig, "log")?;
    Ok(eig.apply(f64::ln))
}

/// Matrix exponential of a symmetric matrix.
pub fn spd_exp(a: &SymMat) -> Result<SymMat> {
    let eig = sym_eig(a)?;
    Ok(eig.apply(f64::exp))
}

/// Principal square root of an SPD matrix.
pub fn spd_sqrt(a: &SymMat) -> Result<SymMat> {
    let eig = sym_eig(a)?;
    require_positive(&eig, "sqrt")?;
    Ok(eig.apply(f64::sqrt))
}

pub fn determinant(a: &SymMat) -> Result<f64> {
    let eig = sym_eig(a)?;
    Ok(eig.eigenvalues.iter().product())
}

/// Eigendecomposition of A^{-1/2} B A^{-1/2}; shared by the affine-invariant
/// distance and geodesic.
fn whitened_eig(a: &SymMat, b: &SymMat) -> Result<(SymEig, SymMat)> {
    let ea = sym_eig(a)?;
    require_positive(&ea, "affine-invariant base point")?;
    let a_half = ea.apply(f64::sqrt);
    let a_inv_half = ea.apply(|l| 1.0 / l.sqrt());
    let mut mid = a_inv_half.matmul(b).matmul(&a_inv_half);
    mid.symmetrize();
    let em = sym_eig(&mid)?;
    require_positive(&em, "affine-invariant argument")?;
    Ok((em, a_half))
}

/// Affine-invariant distance d_AI(A, B) = ||log(A^{-1/2} B A^{-1/2})||_F.
pub fn d_ai(a: &SymMat, b: &SymMat) -> Result<f64> {
    let (em, _) = whitened_eig(a, b)?;
    Ok(em
        .eigenvalues
        .iter()
        .map(|l| {
            let x = l.ln();
            x * x
        })
        .sum::<f64>()
        .sqrt())
}

/// Log-Euclidean distance d_LE(A, B) = ||log A - log B||_F.
pub fn d_le(a: &SymMat, b: &SymMat) -> Result<f64> {
    Ok(spd_log(a)?.sub(&spd_log(b)?).frobenius_norm())
}

/// Affine-invariant geodesic point
/// A^{1/2} exp(θ log(A^{-1/2} B A^{-1/2})) A^{1/2}.
pub fn spd_geodesic_ai(a: &SymMat, b: &SymMat, theta: f64) -> Result<SymMat> {
    let (em, a_half) = whitened_eig(a, b)?;
    let powered = em.apply(|l| l.powf(theta));
    let mut out = a_half.matmul(&powered).matmul(&a_half);
    out.symmetrize();
    Ok(out)
}

/// Log-Euclidean geodesic point exp((1-θ) log A + θ log B).
pub fn spd_geodesic_le(a: &SymMat, b: &SymMat, theta: f64) -> Result<SymMat> {
    let la = spd_log(a)?;
    let lb = spd_log(b)?;
    spd_exp(&la.scale(1.0 - theta).add(&lb.scale(theta)))
}

/// Log-Euclidean Fréchet mean: exp of the arithmetic mean of logs.
pub fn log_euclidean_mean(points: &[SymMat]) -> Result<SymMat> {
    if points.is_empty() {
        return Err(Error::invalid("need at least one point"));
    }
    let m = points[0].m;
    let mut acc = SymMat::zeros(m);
    for p in points {
        acc = acc.add(&spd_log(p)?);
    }
    spd_exp(&acc.scale(1.0 / points.len() as f64))
}

/// Karcher fixed-point iteration for the affine-invariant Fréchet mean,
/// initialized at the Log-Euclidean mean. Stops when the gradient-norm
/// surrogate ||mean of whitened logs||_F < 1e-10.
pub fn karcher_mean_ai(
    points: &[SymMat],
    max_iterations: usize,
    grad_tol: f64,
) -> std::result::Result<SymMat, MeanError<SymMat>> {
    if points.is_empty() {
        return Err(Error::invalid("need at least one point").into());
    }
    if points.len() == 1 {
        return Ok(points[0].clone());
    }
    let m = points[0].m;
    let mut x = log_euclidean_mean(points).map_err(MeanError::Invalid)?;
    for _ in 0..max_iterations {
        let ex = sym_eig(&x).map_err(MeanError::Invalid)?;
        require_positive(&ex, "Karcher iterate").map_err(MeanError::Invalid)?;
        let x_half = ex.apply(f64::sqrt);
        let x_inv_half = ex.apply(|l| 1.0 / l.sqrt());
        let mut acc = SymMat::zeros(m);
        for y in points {
            let mut w = x_inv_half.matmul(y).matmul(&x_inv_half);
            w.symmetrize();
            let ew = sym_eig(&w).map_err(MeanError::Invalid)?;
            require_positive(&ew, "Karcher argument").map_err(MeanError::Invalid)?;
            acc = acc.add(&ew.apply(f64::ln));
        }
        let mean_log = acc.scale(1.0 / points.len() as f64);
        let grad_norm = mean_log.frobenius_norm();
        if grad_norm < grad_tol {
            return Ok(x);
        }
        let step = spd_exp(&mean_log).map_err(MeanError::Invalid)?;
        x = x_half.matmul(&step).matmul(&x_half);
        x.symmetrize();
    }
    Err(MeanError::NotConverged {
        last: x,
        passes: max_iterations,
    })
}

/// Which Riemannian geometry the SPD space uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpdMetric {
    AffineInvariant,
    LogEuclidean,
}

/// A point of the SPD manifold.
#[derive(Debug, Clone, PartialEq)]
pub struct SpdPoint {
    mat: SymMat,
}

impl SpdPoint {
    /// Validates symmetry (1e-10 relative) and positive definiteness.
    pub fn new(mat: SymMat) -> Result<Self> {
        if !mat.is_symmetric(1e-10) {
            return Err(Error::invalid(format!(
                "SPD point must be symmetric (defect {:.3e})",
                mat.symmetry_defect()
            )));
        }
        let eig = sym_eig(&mat)?;
        require_positive(&eig, "SPD point")?;
        Ok(SpdPoint { mat })
    }

    /// Skips validation; for outputs of operations that preserve SPD-ness.
    pub(crate) fn new_unchecked(mut mat: SymMat) -> Self {
        mat.symmetrize();
        SpdPoint { mat }
    }

    pub fn identity(m: usize) -> Self {
        SpdPoint {
            mat: SymMat::identity(m),
        }
    }

    pub fn scaled_identity(m: usize, s: f64) -> Self {
        SpdPoint {
            mat: SymMat::identity(m).scale(s),
        }
    }

    pub fn mat(&self) -> &SymMat {
        &self.mat
    }
}

/// The space of m x m SPD matrices under a chosen metric.
#[derive(Debug, Clone)]
pub struct SpdSpace {
    m: usize,
    metric: SpdMetric,
}

impl SpdSpace {
    pub fn new(m: usize, metric: SpdMetric) -> Self {
        SpdSpace { m, metric }
    }

    pub fn affine_invariant(m: usize) -> Self {
        Self::new(m, SpdMetric::AffineInvariant)
    }

    pub fn log_euclidean(m: usize) -> Self {
        Self::new(m, SpdMetric::LogEuclidean)
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn metric(&self) -> SpdMetric {
        self.metric
    }
}

impl Space for SpdSpace {
    type Point = SpdPoint;

    fn distance(&self, p: &SpdPoint, q: &SpdPoint) -> f64 {
        let d = match self.metric {
            SpdMetric::AffineInvariant => d_ai(&p.mat, &q.mat),
            SpdMetric::LogEuclidean => d_le(&p.mat, &q.mat),
        };
        d.expect("distance between validated SPD points")
    }

    fn geodesic_point(&self, p: &SpdPoint, q: &SpdPoint, theta: f64) -> SpdPoint {
        let g = match self.metric {
            SpdMetric::AffineInvariant => spd_geodesic_ai(&p.mat, &q.mat, theta),
            SpdMetric::LogEuclidean => spd_geodesic_le(&p.mat, &q.mat, theta),
        };
        SpdPoint::new_unchecked(g.expect("geodesic between validated SPD points"))
    }

    fn shape_of(&self, p: &SpdPoint) -> Shape {
        Shape::Matrix(p.mat.dim())
    }

    fn frechet_mean(&self, points: &[SpdPoint], _opts: &MeanOptions) -> Result<SpdPoint> {
        let mats: Vec<SymMat> = points.iter().map(|p| p.mat.clone()).collect();
        let mean = match self.metric {
            SpdMetric::AffineInvariant => {
                karcher_mean_ai(&mats, 200, 1e-10).map_err(Error::from)?
            }
            SpdMetric::LogEuclidean => log_euclidean_mean(&mats)?,
        };
        Ok(SpdPoint::new_unchecked(mean))
    }
}

/// Random SPD matrix generator used by tests and property suites:
/// Q diag(λ) Qᵀ with log-uniform eigenvalues in [lo, hi].
pub fn random_spd(m: usize, lo: f64, hi: f64, rng: &mut crate::rng::SplitMix64) -> SymMat {
    // Random symmetric matrix, exponentiated entries give an orthogonal Q.
    let mut sym = SymMat::zeros(m);
    for i in 0..m {
        for j in i..m {
            let v = rng.next_f64() * 2.0 - 1.0;
            sym.set(i, j, v);
            sym.set(j, i, v);
        }
    }
    let q = sym_eig(&sym).unwrap().eigenvectors;
    let lambdas: Vec<f64> = (0..m)
        .map(|_| (lo.ln() + rng.next_f64() * (hi.ln() - lo.ln())).exp())
        .collect();
    let mut out = SymMat::zeros(m);
    for (k, &lam) in lambdas.iter().enumerate() {
        for i in 0..m {
            for j in 0..m {
                let v = out.get(i, j) + lam * q.get(i, k) * q.get(j, k);
                out.set(i, j, v);
            }
        }
    }
    out.symmetrize();
    out
}
