//! Operator-side correlations and the variance series.

use super::StatsError;
use crate::prelude::*;
use crate::transfer::{GridFn, SpectralData, TransferOperator};
use serde::{Deserialize, Serialize};

/// Below this `sigma^2` the observable is treated as a coboundary.
pub const COBOUNDARY_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    Operator,
    MonteCarlo,
}

/// `C_n = integral (phi o G^n) psi dmu* - integral phi dmu* integral psi dmu*`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationSeries {
    pub n: Vec<usize>,
    pub c: Vec<f64>,
    pub estimator: Estimator,
    pub stderr: Option<Vec<f64>>,
}

fn weighted(f: &GridFn, h: &GridFn) -> GridFn {
    f.zip(h, |a, b| a * b)
}

/// `integral phi lambda^{-n} L^n(psi h) dnu - integral phi dmu* integral psi dmu*`.
pub fn correlation_operator(op: &TransferOperator, sd: &SpectralData, phi: &GridFn, psi: &GridFn, n: usize) -> f64 {
    let mut g = weighted(psi, &sd.h);
    for _ in 0..n {
        g = op.apply(&g).scale(1.0 / sd.lambda);
    }
    sd.nu.integrate(&weighted(phi, &g)) - sd.mu_star.integrate(phi) * sd.mu_star.integrate(psi)
}

/// `C_0, ..., C_{n_max}` with one application of `L` per step.
pub fn correlation_series(
    op: &TransferOperator,
    sd: &SpectralData,
    phi: &GridFn,
    psi: &GridFn,
    n_max: usize,
) -> CorrelationSeries {
    let means = sd.mu_star.integrate(phi) * sd.mu_star.integrate(psi);
    let mut g = weighted(psi, &sd.h);
    let mut c = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        if n > 0 {
            g = op.apply(&g).scale(1.0 / sd.lambda);
        }
        c.push(sd.nu.integrate(&weighted(phi, &g)) - means);
    }
    CorrelationSeries {
        n: (0..=n_max).collect(),
        c,
        estimator: super::Estimator::Operator,
        stderr: None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaSquared {
    pub sigma2: f64,
    /// Index of the last term included.
    pub truncation: usize,
    /// Geometric estimate of the omitted tail.
    pub tail_bound: f64,
    pub coboundary: bool,
    pub mean: f64,
    pub terms: Vec<f64>,
}

/// Maximal number of autocovariance terms.
pub const MAX_TERMS: usize = 1000;

/// `sigma^2 = integral psi^2 dmu* + 2 sum_{n>=1} integral psi (psi o G^n) dmu*`
/// with `psi` the centred observable; summation stops after two consecutive
/// terms below `tol`.
pub fn sigma_squared(
    op: &TransferOperator,
    sd: &SpectralData,
    phi: &GridFn,
    tol: f64,
) -> Result<SigmaSquared, StatsError> {
    let mean = sd.mu_star.integrate(phi);
    let psi = phi.map(|v| v - mean);
    let mut g = weighted(&psi, &sd.h);
    let t0 = sd.nu.integrate(&weighted(&psi, &g));
    let mut terms = vec![t0];
    let mut sum = t0;
    let mut small = 0;
    let mut n = 0;
    while small < 2 {
        n += 1;
        if n > MAX_TERMS {
            return Err(StatsError::NonSummable { terms: MAX_TERMS });
        }
        g = op.apply(&g).scale(1.0 / sd.lambda);
        let t = sd.nu.integrate(&weighted(&psi, &g));
        terms.push(t);
        sum += 2.0 * t;
        if t.abs() < tol {
            small += 1;
        } else {
            small = 0;
        }
    }
    let (a, b) = (terms[terms.len() - 2].abs(), terms[terms.len() - 1].abs());
    let r = if a > 0.0 { b / a } else { 0.0 };
    let tail_bound = if r < 1.0 {
        2.0 * b * r / (1.0 - r)
    } else {
        f64::INFINITY
    };
    let coboundary = sum < COBOUNDARY_THRESHOLD;
    Ok(SigmaSquared {
        sigma2: sum.max(0.0),
        truncation: n,
        tail_bound,
        coboundary,
        mean,
        terms,
    })
}

/// `max_{psi in panel} |integral phi (psi o G^n) dmu*| / |psi|_2` for
/// `n = 0..=n_max`, `phi` centred and each `psi` centred.
pub fn gordin_profile(
    op: &TransferOperator,
    sd: &SpectralData,
    phi: &GridFn,
    panel: &[GridFn],
    n_max: usize,
) -> Vec<f64> {
    let mean = sd.mu_star.integrate(phi);
    let centred = phi.map(|v| v - mean);
    let tests: Vec<GridFn> = panel
        .iter()
        .map(|p| {
            let m = sd.mu_star.integrate(p);
            let c = p.map(|v| v - m);
            let norm = sd.mu_star.integrate(&c.map(|v| v * v)).sqrt();
            c.scale(1.0 / norm)
        })
        .collect();
    let mut g = weighted(&centred, &sd.h);
    let mut out = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        if n > 0 {
            g = op.apply(&g).scale(1.0 / sd.lambda);
        }
        let v = tests
            .iter()
            .map(|t| sd.nu.integrate(&weighted(t, &g)).abs())
            .fold(0.0, f64::max);
        out.push(v);
    }
    out
}
