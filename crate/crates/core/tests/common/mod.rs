//! Shared helpers for the integration suites: an independent exact solver
//! for univariate total-variation denoising (ground-truth oracle for the
//! cyclic proximal point solver), geometry property checks and random
//! point factories.

#![allow(dead_code)] // each test binary uses a subset

use tvfrechet::rng::SplitMix64;
use tvfrechet::spd::random_spd;
use tvfrechet::wasserstein::gaussian_quantile_point;
use tvfrechet::{QuantilePoint, Space, SpdPoint, VecPoint};

// -------------------------------------------------- random point factories

pub fn rand_vec(rng: &mut SplitMix64, k: usize) -> VecPoint {
    VecPoint::new((0..k).map(|_| 2.0 * rng.next_standard_normal()).collect())
}

pub fn rand_spd(rng: &mut SplitMix64) -> SpdPoint {
    SpdPoint::new(random_spd(3, 0.2, 5.0, rng)).unwrap()
}

pub fn rand_quantile(rng: &mut SplitMix64, grid: usize) -> QuantilePoint {
    let nu = 2.0 * rng.next_standard_normal();
    let sigma = 0.3 + 2.0 * rng.next_f64();
    gaussian_quantile_point(nu, sigma, grid).unwrap()
}

// ------------------------------------------------ geometry property checks

pub fn triangle_ok<S: Space>(space: &S, pts: &[S::Point; 3]) -> bool {
    let dab = space.distance(&pts[0], &pts[1]);
    let dbc = space.distance(&pts[1], &pts[2]);
    let dac = space.distance(&pts[0], &pts[2]);
    dac <= dab + dbc + 1e-9 * (1.0 + dab + dbc)
}

/// d(p, γ_pq(θ)) = θ·d(p,q) and d(γ_pq(θ), q) = (1−θ)·d(p,q).
pub fn geodesic_param_ok<S: Space>(space: &S, p: &S::Point, q: &S::Point, theta: f64) -> bool {
    let d = space.distance(p, q);
    let g = space.geodesic_point(p, q, theta);
    let tol = 1e-8 * (1.0 + d);
    (space.distance(p, &g) - theta * d).abs() < tol
        && (space.distance(&g, q) - (1.0 - theta) * d).abs() < tol
}

/// Nonpositive-curvature convexity of the squared distance along geodesics:
/// d(γ_pq(θ), r)² ≤ (1−θ)d(p,r)² + θd(q,r)² − θ(1−θ)d(p,q)².
pub fn npc_ok<S: Space>(space: &S, pts: &[S::Point; 3], theta: f64) -> bool {
    let g = space.geodesic_point(&pts[0], &pts[1], theta);
    let lhs = space.distance(&g, &pts[2]).powi(2);
    let rhs = (1.0 - theta) * space.distance(&pts[0], &pts[2]).powi(2)
        + theta * space.distance(&pts[1], &pts[2]).powi(2)
        - theta * (1.0 - theta) * space.distance(&pts[0], &pts[1]).powi(2);
    lhs <= rhs + 1e-8 * (1.0 + rhs.abs())
}

/// Exact minimizer of ½ Σ (x_i − y_i)² + τ Σ |x_{i+1} − x_i| by Condat's
/// direct (taut-string equivalent) algorithm. O(n) worst case in practice,
/// exact up to floating point.
pub fn tv1d_exact(y: &[f64], tau: f64) -> Vec<f64> {
    let n = y.len();
    if n == 0 {
        return Vec::new();
    }
    if n == 1 || tau <= 0.0 {
        return y.to_vec();
    }
    let mut x = vec![0.0; n];
    // Current segment is y[k0..=k]; vmin/vmax are candidate segment values
    // for a tube of half-width τ, umin/umax the running slack, kminus/kplus
    // the last positions where the lower/upper candidate was updated.
    let (mut k, mut k0, mut kminus, mut kplus) = (0usize, 0usize, 0usize, 0usize);
    let mut vmin = y[0] - tau;
    let mut vmax = y[0] + tau;
    let mut umin = tau;
    let mut umax = -tau;
    loop {
        if k == n - 1 {
            if umin < 0.0 {
                // The lower string breaks: fix a segment at vmin.
                for v in &mut x[k0..=kminus] {
                    *v = vmin;
                }
                kminus += 1;
                k = kminus;
                k0 = kminus;
                vmin = y[k];
                umin = tau;
                umax = y[k] + tau - vmax;
            } else if umax > 0.0 {
                // The upper string breaks: fix a segment at vmax.
                for v in &mut x[k0..=kplus] {
                    *v = vmax;
                }
                kplus += 1;
                k = kplus;
                k0 = kplus;
                vmax = y[k];
                umax = -tau;
                umin = y[k] - tau - vmin;
            } else {
                let v = vmin + umin / (k - k0 + 1) as f64;
                for q in &mut x[k0..n] {
                    *q = v;
                }
                return x;
            }
            continue;
        }
        if y[k + 1] + umin < vmin - tau {
            // Negative jump certified at kminus.
            for v in &mut x[k0..=kminus] {
                *v = vmin;
            }
            kminus += 1;
            k = kminus;
            k0 = kminus;
            kplus = kminus;
            vmin = y[k];
            vmax = y[k] + 2.0 * tau;
            umin = tau;
            umax = -tau;
        } else if y[k + 1] + umax > vmax + tau {
            // Positive jump certified at kplus.
            for v in &mut x[k0..=kplus] {
                *v = vmax;
            }
            kplus += 1;
            k = kplus;
            k0 = kplus;
            kminus = kplus;
            vmax = y[k];
            vmin = y[k] - 2.0 * tau;
            umin = tau;
            umax = -tau;
        } else {
            // No jump: absorb y[k+1] into the running segment.
            k += 1;
            umin += y[k] - vmin;
            umax += y[k] - vmax;
            if umin >= tau {
                vmin += (umin - tau) / (k - k0 + 1) as f64;
                umin = tau;
                kminus = k;
            }
            if umax <= -tau {
                vmax += (umax + tau) / (k - k0 + 1) as f64;
                umax = -tau;
                kplus = k;
            }
        }
    }
}
