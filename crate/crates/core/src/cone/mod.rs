//! The cone `C_{k,delta}` of positive functions whose Hölder constant in
//! `delta`-balls is at most `k` times their infimum, its projective metric and
//! the contraction of `L^3`.

mod contraction;
pub mod hull;
mod metric;

pub use contraction::{
    auto_k, calibrate_k, empirical_contraction, sample_cone_function, ConeCheckReport, ContractionOptions,
    KCalibration, PilotStep, K_LADDER, PILOT_PAIRS, PILOT_TARGET,
};
pub use metric::{theta_k, theta_k_brute, ThetaK};

use crate::domain::{metric_d, DomainError, DomainInfo, Params};
use crate::par;
use crate::prelude::*;
use crate::transfer::{Grid, GridFn};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConeError {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("k = {0}: requires k > 0")]
    K(f64),
    #[error("alpha = {0}: requires 0 < alpha <= 1")]
    Alpha(f64),
    #[error("lambda_hat = {0}: requires 0 < lambda_hat < 1")]
    LambdaHat(f64),
    #[error("{which} is not in the cone (ratio {ratio} > k = {k})")]
    NotInCone { which: &'static str, ratio: f64, k: f64 },
    #[error("nonpositive entry {value} at index {index}")]
    Nonpositive { index: usize, value: f64 },
    #[error("need at least {min} pairs, got {got}")]
    TooFewPairs { min: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConeParams {
    pub k: f64,
    pub delta: f64,
    pub alpha: f64,
}

impl ConeParams {
    pub fn new(params: &Params, k: f64, delta: f64, alpha: f64) -> Result<Self, ConeError> {
        let cp = ConeParams { k, delta, alpha };
        cp.validate(params)?;
        Ok(cp)
    }

    pub fn validate(&self, params: &Params) -> Result<(), ConeError> {
        params.check_delta(self.delta)?;
        if !(self.k.is_finite() && self.k > 0.0) {
            return Err(ConeError::K(self.k));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(ConeError::Alpha(self.alpha));
        }
        Ok(())
    }

    pub fn with_k(self, k: f64) -> Self {
        ConeParams { k, ..self }
    }
}

/// Default cap on the number of stored pairs.
pub const MAX_PAIRS: usize = 10_000_000;

/// Cell pairs `(i, j)` with `0 < d(c_i, c_j) < delta`, with `d^alpha` cached.
#[derive(Debug, Clone)]
pub struct PairSet {
    pub pairs: Vec<(u32, u32, f64)>,
    /// Every `stride`-th pair of the full enumeration is kept.
    pub stride: usize,
    pub total: usize,
    pub delta: f64,
    pub alpha: f64,
}

impl PairSet {
    pub fn new(grid: &Grid, delta: f64, alpha: f64, max_pairs: usize) -> Self {
        let centers = grid.centers();
        let n = centers.len();
        let rows: Vec<Vec<(u32, u32, f64)>> = par::map_indexed(n, |i| {
            let mut row = Vec::new();
            for j in (i + 1)..n {
                let d = metric_d(&centers[i], &centers[j]);
                if d > 0.0 && d < delta {
                    row.push((i as u32, j as u32, d.powf(alpha)));
                }
            }
            row
        });
        let total: usize = rows.iter().map(|r| r.len()).sum();
        let stride = total.div_ceil(max_pairs.max(1)).max(1);
        let mut pairs = Vec::with_capacity(total / stride + 1);
        let mut k = 0usize;
        for row in rows {
            for p in row {
                if k.is_multiple_of(stride) {
                    pairs.push(p);
                }
                k += 1;
            }
        }
        PairSet {
            pairs,
            stride,
            total,
            delta,
            alpha,
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// `|psi|_{alpha,delta}` over the stored pairs.
    pub fn seminorm(&self, psi: &GridFn) -> f64 {
        let v = &psi.0;
        par::map_chunks(self.pairs.len(), 1 << 16, |r| {
            self.pairs[r]
                .iter()
                .map(|&(i, j, da)| (v[i as usize] - v[j as usize]).abs() / da)
                .fold(0.0, f64::max)
        })
        .into_iter()
        .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Membership {
    pub member: bool,
    pub ratio: f64,
    pub margin: f64,
    pub min: f64,
}

/// Membership in `C_{k,delta}`: `min psi > 0` and `|psi|_{alpha,delta} / min psi <= k`.
pub fn cone_member(psi: &GridFn, pairs: &PairSet, k: f64) -> Membership {
    let min = psi.inf();
    if !(min > 0.0) {
        return Membership {
            member: false,
            ratio: f64::INFINITY,
            margin: f64::NEG_INFINITY,
            min,
        };
    }
    let ratio = pairs.seminorm(psi) / min;
    Membership {
        member: ratio <= k,
        ratio,
        margin: k - ratio,
        min,
    }
}

/// Hilbert metric of the positive orthant,
/// `log(max_i w_i / v_i / min_i w_i / v_i)`.
pub fn hilbert_metric_positive(v: &[f64], w: &[f64]) -> Result<f64, ConeError> {
    assert_eq!(v.len(), w.len());
    for (index, &value) in v.iter().chain(w.iter()).enumerate() {
        if !(value > 0.0) {
            return Err(ConeError::Nonpositive {
                index: index % v.len(),
                value,
            });
        }
    }
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for (a, b) in v.iter().zip(w) {
        let r = b / a;
        lo = lo.min(r);
        hi = hi.max(r);
    }
    Ok((hi / lo).ln())
}

/// Upper bound on the projective diameter of `C_{lambda_hat k, delta}` inside
/// `C_{k, delta}`:
/// `2 log((1 + l) / (1 - l)) + 2 log(1 + m l k diam^alpha)`.
pub fn diameter_bound(lambda_hat: f64, cp: &ConeParams, info: &DomainInfo) -> Result<f64, ConeError> {
    if !(lambda_hat > 0.0 && lambda_hat < 1.0) {
        return Err(ConeError::LambdaHat(lambda_hat));
    }
    let l = lambda_hat;
    Ok(2.0 * ((1.0 + l) / (1.0 - l)).ln() + 2.0 * (1.0 + info.m as f64 * l * cp.k * info.diam_q.powf(cp.alpha)).ln())
}
