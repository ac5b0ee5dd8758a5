//! Sample weights minimizing `d·w` over `{w ≥ 0, Σw = m, Σ(w−1)² ≤ Tm}`.
//!
//! The objective is linear, so the optimum sits either at the simplex vertex
//! (all mass on `argmin d`) when the ball constraint is slack, or on the ball
//! boundary. On the boundary the KKT conditions give
//! `w = Π(1 − d/(2λ))` with `Π` the projection onto the scaled simplex, and
//! `λ` is found by bisection.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

const MAX_BISECTIONS: usize = 200;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolverError {
    #[error("no samples to weight")]
    Empty,
    #[error("balance parameter T must be positive and finite, got {0}")]
    InvalidBalance(f64),
    #[error("critic gap is not finite at index {0}")]
    NonFinite(usize),
    #[error("bisection did not converge; multiplier bracketed in [{lo:e}, {hi:e}]")]
    NonConvergence { lo: f64, hi: f64 },
}

/// `d_k = D(ŷ⁺_k) − D(ŷ⁻_k)` per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticGap(Vec<f64>);

impl CriticGap {
    pub fn new(d: Vec<f64>) -> Result<Self, SolverError> {
        if let Some(i) = d.iter().position(|x| !x.is_finite()) {
            return Err(SolverError::NonFinite(i));
        }
        Ok(Self(d))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightVector {
    pub w: Vec<f64>,
    pub t: f64,
}

impl WeightVector {
    pub fn ones(m: usize, t: f64) -> Self {
        Self {
            w: alloc::vec![1.0; m],
            t,
        }
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    pub fn objective(&self, d: &[f64]) -> f64 {
        self.w.iter().zip(d).map(|(w, d)| w * d).sum()
    }

    /// `Σ(w−1)²`.
    pub fn deviation(&self) -> f64 {
        deviation(&self.w)
    }
}

fn deviation(w: &[f64]) -> f64 {
    w.iter().map(|x| (x - 1.0) * (x - 1.0)).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub negative_indices: Vec<usize>,
    /// `Σw − m`.
    pub sum_residual: f64,
    /// `Tm − Σ(w−1)²`; negative when violated.
    pub ball_slack: f64,
    pub nonnegative: bool,
    pub sum_ok: bool,
    pub ball_ok: bool,
}

impl FeasibilityReport {
    pub fn feasible(&self) -> bool {
        self.nonnegative && self.sum_ok && self.ball_ok
    }
}

/// Check `w` against the constraint set with tolerance `1e-9·m`.
pub fn check_feasibility(w: &[f64], t: f64) -> FeasibilityReport {
    let m = w.len() as f64;
    let tol = 1e-9 * m.max(1.0);
    let negative_indices: Vec<usize> = w.iter().enumerate().filter(|(_, &x)| x < 0.0).map(|(i, _)| i).collect();
    let sum_residual = w.iter().sum::<f64>() - m;
    let ball_slack = t * m - deviation(w);
    FeasibilityReport {
        nonnegative: negative_indices.is_empty(),
        negative_indices,
        sum_residual,
        ball_slack,
        sum_ok: sum_residual.abs() <= tol,
        ball_ok: ball_slack >= -tol,
    }
}

/// Euclidean projection of `v` onto `{w ≥ 0, Σw = m}`.
pub fn project_scaled_simplex(v: &[f64], m: f64) -> Vec<f64> {
    if v.is_empty() {
        return Vec::new();
    }
    let mut sorted = v.to_vec();
    sorted.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (j, &x) in sorted.iter().enumerate() {
        cum += x;
        let candidate = (cum - m) / (j + 1) as f64;
        if x - candidate > 0.0 {
            theta = candidate;
        } else {
            break;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

/// Global minimizer of `d·w` over the feasible set for balance `t`.
pub fn solve_weights(d: &CriticGap, t: f64) -> Result<WeightVector, SolverError> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(SolverError::InvalidBalance(t));
    }
    let d = d.values();
    let n = d.len();
    if n == 0 {
        return Err(SolverError::Empty);
    }
    let lo_d = d.iter().copied().fold(f64::INFINITY, f64::min);
    let hi_d = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi_d - lo_d;
    if n == 1 || !(span > 0.0) {
        return Ok(WeightVector::ones(n, t));
    }
    // Shift and scale leave the argmin unchanged and keep λ near 1.
    let e: Vec<f64> = d.iter().map(|x| (x - lo_d) / span).collect();
    let m = n as f64;
    let budget = t * m;

    let ties = e.iter().filter(|&&x| x == 0.0).count();
    let share = m / ties as f64;
    let vertex_dev = ties as f64 * (share - 1.0) * (share - 1.0) + (m - ties as f64);
    if vertex_dev <= budget {
        let w = e.iter().map(|&x| if x == 0.0 { share } else { 0.0 }).collect();
        return Ok(WeightVector { w, t });
    }

    let weights_at = |lambda: f64| -> Vec<f64> {
        let v: Vec<f64> = e.iter().map(|x| 1.0 - x / (2.0 * lambda)).collect();
        project_scaled_simplex(&v, m)
    };
    let tol = 1e-8 * m;
    // φ(λ) = Σ(w(λ)−1)² is non-increasing in λ.
    let mut lo = 1.0;
    let mut hi = 1.0;
    while deviation(&weights_at(lo)) <= budget {
        lo *= 0.5;
        if lo < 1e-300 {
            return Err(SolverError::NonConvergence { lo, hi });
        }
    }
    loop {
        let w = weights_at(hi);
        let phi = deviation(&w);
        if phi <= budget {
            if budget - phi <= tol {
                return Ok(WeightVector { w, t });
            }
            break;
        }
        lo = hi;
        hi *= 2.0;
        if hi > 1e300 {
            return Err(SolverError::NonConvergence { lo, hi });
        }
    }
    for _ in 0..MAX_BISECTIONS {
        let mid = (lo * hi).sqrt();
        let w = weights_at(mid);
        let phi = deviation(&w);
        if phi <= budget {
            if budget - phi <= tol {
                return Ok(WeightVector { w, t });
            }
            hi = mid;
        } else {
            lo = mid;
        }
        if hi / lo - 1.0 < 4.0 * f64::EPSILON {
            break;
        }
    }
    // Bracket collapsed to machine precision: the feasible side is optimal
    // to rounding.
    let w = weights_at(hi);
    if deviation(&w) <= budget && hi / lo - 1.0 < 1e-12 {
        return Ok(WeightVector { w, t });
    }
    Err(SolverError::NonConvergence { lo, hi })
}
