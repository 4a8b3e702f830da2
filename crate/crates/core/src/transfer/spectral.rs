//! Leading eigendata `(lambda, h, nu, mu*)` by power iteration.

use super::grid::{GridFn, Measure};
use super::operator::TransferOperator;
use super::TransferError;
use crate::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PowerOptions {
    fn default() -> Self {
        PowerOptions {
            tol: 1e-10,
            max_iter: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralData {
    pub lambda: f64,
    /// Final Collatz–Wielandt bracket `[min L h / h, max L h / h]`.
    pub bracket: [f64; 2],
    /// Eigenfunction with `integral h dnu = 1`.
    pub h: GridFn,
    /// Eigenmeasure of the dual operator, a probability.
    pub nu: Measure,
    /// `h nu`, a probability.
    pub mu_star: Measure,
    /// `sup |L h / lambda - h|`.
    pub residual_h: f64,
    /// `|L* nu / lambda - nu|_1`.
    pub residual_nu: f64,
    pub iterations: usize,
    pub iterations_nu: usize,
}

pub fn power_iterate(op: &TransferOperator, opts: &PowerOptions) -> Result<SpectralData, TransferError> {
    let n = op.grid().len();
    let mut psi = GridFn(vec![1.0; n]);
    let mut iterations = 0;
    let mut bracket = [0.0, f64::INFINITY];
    let mut converged = false;
    while iterations < opts.max_iter {
        iterations += 1;
        let next = op.apply(&psi);
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for (a, b) in next.0.iter().zip(&psi.0) {
            let r = a / b;
            lo = lo.min(r);
            hi = hi.max(r);
        }
        let top = next.sup();
        psi = next.scale(1.0 / top);
        bracket = [lo, hi];
        if hi - lo < opts.tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(TransferError::NoConvergence {
            iterations,
            width: bracket[1] - bracket[0],
        });
    }
    let lambda = 0.5 * (bracket[0] + bracket[1]);

    let transposed = op.matrix().transpose();
    let mut nu = Measure(vec![1.0 / n as f64; n]);
    let mut iterations_nu = 0;
    let mut change = f64::INFINITY;
    while iterations_nu < opts.max_iter {
        iterations_nu += 1;
        let next = op.apply_dual(&nu, &transposed).normalized();
        change = next.l1_dist(&nu);
        nu = next;
        if change < opts.tol {
            break;
        }
    }
    if change >= opts.tol {
        return Err(TransferError::NoConvergence {
            iterations: iterations_nu,
            width: change,
        });
    }

    let norm = nu.integrate(&psi);
    let h = psi.scale(1.0 / norm);
    let mu_star = Measure(h.0.iter().zip(&nu.0).map(|(a, b)| a * b).collect()).normalized();
    let lh = op.apply(&h);
    let residual_h = lh.scale(1.0 / lambda).sup_dist(&h);
    let lnu = op.apply_dual(&nu, &transposed);
    let residual_nu = Measure(lnu.0.iter().map(|v| v / lambda).collect()).l1_dist(&nu);
    Ok(SpectralData {
        lambda,
        bracket,
        h,
        nu,
        mu_star,
        residual_h,
        residual_nu,
        iterations,
        iterations_nu,
    })
}

/// `sup |lambda^{-n} L^n f - h|` for `0..=n_max`, with `f` rescaled so that
/// `integral f dnu = 1`.
pub fn convergence_series(op: &TransferOperator, sd: &SpectralData, f: &GridFn, n_max: usize) -> Vec<f64> {
    let mut cur = f.scale(1.0 / sd.nu.integrate(f));
    let mut out = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        if n > 0 {
            cur = op.apply(&cur).scale(1.0 / sd.lambda);
        }
        out.push(cur.sup_dist(&sd.h));
    }
    out
}

/// Fixed panel of twenty smooth test functions on `Q`.
pub fn test_panel(grid: &super::Grid) -> Vec<GridFn> {
    let params = *grid.params();
    (0..20)
        .map(|k| {
            let kf = k as f64;
            grid.sample(|q| {
                let r = q.rect.index() as f64;
                let y = q.chart_y(&params);
                1.0 + 0.5 * (3.0 * (kf + 1.0) * q.x + (kf % 4.0 + 1.0) * y + 0.7 * kf * (r + 1.0)).cos() + 0.2 * r
            })
        })
        .collect()
}

/// `max_k |lambda^{-n} integral f_k L^n 1 dnu - integral f_k dmu*|` over
/// [`test_panel`].
pub fn pushforward_distance(op: &TransferOperator, sd: &SpectralData, n: usize) -> f64 {
    pushforward_series(op, sd, n)[n]
}

/// Pushforward deviations for `0..=n_max`.
pub fn pushforward_series(op: &TransferOperator, sd: &SpectralData, n_max: usize) -> Vec<f64> {
    let panel = test_panel(op.grid());
    let targets: Vec<f64> = panel.iter().map(|f| sd.mu_star.integrate(f)).collect();
    let mut cur = op.grid().constant(1.0);
    let mut out = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        if n > 0 {
            cur = op.apply(&cur).scale(1.0 / sd.lambda);
        }
        let weighted = Measure(cur.0.iter().zip(&sd.nu.0).map(|(a, b)| a * b).collect());
        let dev = panel
            .iter()
            .zip(&targets)
            .map(|(f, t)| (weighted.integrate(f) - t).abs())
            .fold(0.0, f64::max);
        out.push(dev);
    }
    out
}
