//! Sampling of `mu*` and of stationary orbit segments.
//!
//! `mu*` is supported on a set that is Cantor-like in `x`, so forward orbits
//! of cell-uniform points leave `Q` almost immediately. Orbit segments are
//! instead generated backwards: from `x` a preimage `y` is chosen with
//! probability `e^{phi*(y)} h(y) / (lambda h(x))`. This kernel is the time
//! reversal of `G` under `mu*`, so `(x_{-n}, ..., x_0)` started from `mu*`
//! has the law of `(x, G x, ..., G^n x)`.

use super::{Observable, StatsError};
use crate::domain::{Params, QPoint};
use crate::dynamics::preimages_g;
use crate::par;
use crate::potential::Potential;
use crate::prelude::*;
use crate::rng::item_rng;
use crate::transfer::{Grid, Measure, SpectralData, TransferOperator};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Picks a cell with probability proportional to its weight, then a uniform
/// point inside it.
#[derive(Debug, Clone)]
pub struct MuStarSampler {
    grid: Grid,
    cdf: Vec<f64>,
}

impl MuStarSampler {
    pub fn new(grid: &Grid, m: &Measure) -> Self {
        let mut acc = 0.0;
        let cdf =
            m.0.iter()
                .map(|w| {
                    acc += w.max(0.0);
                    acc
                })
                .collect();
        MuStarSampler {
            grid: grid.clone(),
            cdf,
        }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> QPoint {
        let total = *self.cdf.last().unwrap_or(&0.0);
        let u = rng.random::<f64>() * total;
        let k = self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1);
        let ([x0, y0], [dx, dy]) = self.grid.cell_box(k);
        QPoint {
            rect: self.grid.rect_of(k),
            x: x0 + rng.random::<f64>() * dx,
            y: y0 + rng.random::<f64>() * dy,
        }
    }
}

/// Backward Markov chain whose stationary law is `mu*`.
#[derive(Debug, Clone)]
pub struct BackwardChain {
    params: Params,
    potential: Potential,
    grid: Grid,
    h: Vec<f64>,
    start: MuStarSampler,
}

impl BackwardChain {
    pub fn new(op: &TransferOperator, sd: &SpectralData) -> Self {
        BackwardChain {
            params: *op.params(),
            potential: op.potential().clone(),
            grid: op.grid().clone(),
            h: sd.h.0.clone(),
            start: MuStarSampler::new(op.grid(), &sd.mu_star),
        }
    }

    pub fn start<R: Rng>(&self, rng: &mut R) -> QPoint {
        self.start.sample(rng)
    }

    pub fn step<R: Rng>(&self, q: &QPoint, rng: &mut R) -> QPoint {
        let pre = preimages_g(&self.params, q);
        let items = pre.as_slice();
        let u: f64 = rng.random();
        if items.len() == 1 {
            return items[0];
        }
        let mut w = [0.0f64; 2];
        for (wi, y) in w.iter_mut().zip(items) {
            *wi = self.potential.eval(y).exp() * self.grid.interpolate(&self.h, y).max(0.0);
        }
        if u * (w[0] + w[1]) < w[0] {
            return items[0];
        }
        items[items.len() - 1]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub samples: usize,
    pub escaped: usize,
}

/// Monte-Carlo estimate of `integral (phi o G^n) psi dmu* - products of means`.
pub fn correlation_mc(
    chain: &BackwardChain,
    phi: &dyn Observable,
    psi: &dyn Observable,
    n: usize,
    samples: usize,
    seed: u64,
) -> Result<McEstimate, StatsError> {
    if samples < 1000 {
        return Err(StatsError::TooFewSamples {
            got: samples,
            need: 1000,
        });
    }
    let draws = par::map_indexed(samples, |i| {
        let mut rng = item_rng(seed, "mc", i as u64);
        let x0 = chain.start(&mut rng);
        let a = phi.eval(&x0);
        let mut x = x0;
        for _ in 0..n {
            x = chain.step(&x, &mut rng);
        }
        (a, psi.eval(&x))
    });
    let m = samples as f64;
    let ma = draws.iter().map(|d| d.0).sum::<f64>() / m;
    let mb = draws.iter().map(|d| d.1).sum::<f64>() / m;
    let z: Vec<f64> = draws.iter().map(|d| (d.0 - ma) * (d.1 - mb)).collect();
    let estimate = z.iter().sum::<f64>() / m;
    let var = z.iter().map(|v| (v - estimate).powi(2)).sum::<f64>() / (m - 1.0);
    Ok(McEstimate {
        estimate,
        stderr: (var / m).sqrt(),
        samples,
        escaped: 0,
    })
}
