//! Exponential decay fits `|C_n| ~ K tau^n`.

use super::{CorrelationSeries, StatsError};
use crate::prelude::*;
use serde::{Deserialize, Serialize};

pub const DEFAULT_WINDOW: (usize, usize) = (2, 20);

/// Terms with `|C_n|` at or below this level are ignored.
pub const FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    #[serde(rename = "K")]
    pub k: f64,
    pub tau: f64,
    pub r_squared: f64,
    pub window: (usize, usize),
    pub points: usize,
    /// Signs of the fitted terms, `+1` or `-1`.
    pub signs: Vec<i8>,
    pub alternating: bool,
    /// `tau < 1` with `r^2 >= 0.9`.
    pub decaying: bool,
}

pub fn fit_decay(series: &CorrelationSeries) -> Result<DecayFit, StatsError> {
    fit_decay_window(series, DEFAULT_WINDOW)
}

/// Least squares of `log |C_n|` on `n` over `n in [n0, n1]`.
pub fn fit_decay_window(series: &CorrelationSeries, window: (usize, usize)) -> Result<DecayFit, StatsError> {
    let pts: Vec<(f64, f64, f64)> = series
        .n
        .iter()
        .zip(&series.c)
        .filter(|(&n, c)| n >= window.0 && n <= window.1 && c.abs() > FLOOR)
        .map(|(&n, &c)| (n as f64, c.abs().ln(), c))
        .collect();
    if pts.len() < 5 {
        return Err(StatsError::InsufficientData {
            got: pts.len(),
            need: 5,
        });
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    let signs: Vec<i8> = pts.iter().map(|p| if p.2 < 0.0 { -1 } else { 1 }).collect();
    let alternating = signs.windows(2).all(|w| w[0] != w[1]);
    let tau = slope.exp();
    Ok(DecayFit {
        k: intercept.exp(),
        tau,
        r_squared,
        window,
        points: pts.len(),
        signs,
        alternating,
        decaying: tau < 1.0 && r_squared >= 0.9,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(c: Vec<f64>) -> CorrelationSeries {
        CorrelationSeries {
            n: (0..c.len()).collect(),
            c,
            estimator: super::super::Estimator::Operator,
            stderr: None,
        }
    }

    #[test]
    fn exact_geometric_data() {
        let s = series((0..25).map(|n| 3.0 * 0.4f64.powi(n)).collect());
        let f = fit_decay(&s).unwrap();
        assert!((f.tau - 0.4).abs() < 1e-12);
        assert!((f.k - 3.0).abs() < 1e-9);
        assert!(f.decaying && !f.alternating);
    }

    #[test]
    fn alternating_signs_are_reported() {
        let s = series((0..25).map(|n| 2.0 * (-0.5f64).powi(n)).collect());
        let f = fit_decay(&s).unwrap();
        assert!((f.tau - 0.5).abs() < 1e-12);
        assert!(f.alternating);
    }

    #[test]
    fn too_few_points() {
        let s = series(vec![1.0, 0.5, 0.25, 0.0, 0.0, 0.0]);
        assert!(matches!(fit_decay(&s), Err(StatsError::InsufficientData { .. })));
    }
}
