//! Normalised Birkhoff sums and the Kolmogorov–Smirnov test against the
//! limiting normal law.

use super::sampler::BackwardChain;
use super::{Observable, SigmaSquared, StatsError};
use crate::par;
use crate::prelude::*;
use crate::rng::item_rng;
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CltOptions {
    /// Birkhoff length `n` (terms `j = 0..n-1`).
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub bins: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    /// Expected counts under `Normal(0, sigma^2)`.
    pub expected: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CltReport {
    pub sigma2: f64,
    pub truncation: usize,
    pub mean: f64,
    pub samples: usize,
    pub n: usize,
    pub coboundary_flag: bool,
    pub sample_mean: Option<f64>,
    pub sample_variance: Option<f64>,
    /// KS distance of `S_n / sqrt(n)` from `Normal(0, sigma^2)`.
    pub ks_statistic: Option<f64>,
    pub ks_p: Option<f64>,
    /// Same after spreading each lattice atom uniformly over its cell.
    pub ks_statistic_corrected: Option<f64>,
    pub ks_p_corrected: Option<f64>,
    pub lattice_span: Option<f64>,
    /// `1.63 / sqrt(N)`, the 1% critical value.
    pub ks_critical: f64,
    pub escaped: usize,
    pub histogram: Option<Histogram>,
}

pub fn normal_cdf(x: f64, sigma: f64) -> f64 {
    0.5 * libm::erfc(-x / (sigma * core::f64::consts::SQRT_2))
}

/// `sup |F_N - F|` for a sorted sample.
pub fn ks_statistic(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let m = sorted.len() as f64;
    sorted.iter().enumerate().fold(0.0, |d, (i, &x)| {
        let f = cdf(x);
        d.max((i as f64 + 1.0) / m - f).max(f - i as f64 / m)
    })
}

/// Asymptotic Kolmogorov tail `P(sqrt(N) D > t) = 2 sum (-1)^{k-1} e^{-2 k^2 t^2}`.
pub fn kolmogorov_p(t: f64) -> f64 {
    if t < 0.2 {
        return 1.0;
    }
    let mut s = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * t * t).exp();
        s += if k % 2 == 1 { term } else { -term };
        if term < 1e-17 {
            break;
        }
    }
    (2.0 * s).clamp(0.0, 1.0)
}

pub fn clt_sample(
    chain: &BackwardChain,
    phi: &dyn Observable,
    sig: &SigmaSquared,
    opts: &CltOptions,
) -> Result<CltReport, StatsError> {
    if opts.samples < 100 {
        return Err(StatsError::TooFewSamples {
            got: opts.samples,
            need: 100,
        });
    }
    let ks_critical = 1.63 / (opts.samples as f64).sqrt();
    let mut report = CltReport {
        sigma2: sig.sigma2,
        truncation: sig.truncation,
        mean: sig.mean,
        samples: opts.samples,
        n: opts.n,
        coboundary_flag: sig.coboundary,
        sample_mean: None,
        sample_variance: None,
        ks_statistic: None,
        ks_p: None,
        ks_statistic_corrected: None,
        ks_p_corrected: None,
        lattice_span: phi.lattice_span(),
        ks_critical,
        escaped: 0,
        histogram: None,
    };
    if sig.coboundary {
        return Ok(report);
    }
    let root_n = (opts.n as f64).sqrt();
    let span = phi.lattice_span();
    let draws = par::map_indexed(opts.samples, |i| {
        let mut rng = item_rng(opts.seed, "clt", i as u64);
        let mut x = chain.start(&mut rng);
        let mut s = 0.0;
        for j in 0..opts.n {
            if j > 0 {
                x = chain.step(&x, &mut rng);
            }
            s += phi.eval(&x) - sig.mean;
        }
        let jitter = match span {
            Some(h) => h * (rng.random::<f64>() - 0.5),
            None => 0.0,
        };
        (s / root_n, (s + jitter) / root_n)
    });
    let m = opts.samples as f64;
    let mut raw: Vec<f64> = draws.iter().map(|d| d.0).collect();
    let mean = raw.iter().sum::<f64>() / m;
    let var = raw.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0);
    raw.sort_by(f64::total_cmp);
    let sigma = sig.sigma2.sqrt();
    let cdf = |x: f64| normal_cdf(x, sigma);
    let d = ks_statistic(&raw, cdf);
    report.sample_mean = Some(mean);
    report.sample_variance = Some(var);
    report.ks_statistic = Some(d);
    report.ks_p = Some(kolmogorov_p(m.sqrt() * d));
    if span.is_some() {
        let mut corr: Vec<f64> = draws.iter().map(|d| d.1).collect();
        corr.sort_by(f64::total_cmp);
        let dc = ks_statistic(&corr, cdf);
        report.ks_statistic_corrected = Some(dc);
        report.ks_p_corrected = Some(kolmogorov_p(m.sqrt() * dc));
    }
    report.histogram = Some(histogram(&raw, sigma, opts.bins.max(1)));
    Ok(report)
}

fn histogram(sorted: &[f64], sigma: f64, bins: usize) -> Histogram {
    let lo = -4.0 * sigma;
    let width = 8.0 * sigma / bins as f64;
    let edges: Vec<f64> = (0..=bins).map(|b| lo + b as f64 * width).collect();
    let mut counts = vec![0u64; bins];
    for &x in sorted {
        let b = ((x - lo) / width).floor();
        if b >= 0.0 && (b as usize) < bins {
            counts[b as usize] += 1;
        }
    }
    let m = sorted.len() as f64;
    let expected = edges
        .windows(2)
        .map(|e| m * (normal_cdf(e[1], sigma) - normal_cdf(e[0], sigma)))
        .collect();
    Histogram {
        edges,
        counts,
        expected,
    }
}
