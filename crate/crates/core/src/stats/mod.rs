//! Correlations under `mu*`, decay fits, the CLT variance and Monte-Carlo
//! sampling of the equilibrium state.

mod clt;
mod correlation;
mod fit;
mod horseshoe;
mod sampler;

pub use clt::{clt_sample, kolmogorov_p, ks_statistic, normal_cdf, CltOptions, CltReport, Histogram};
pub use correlation::{
    correlation_operator, correlation_series, gordin_profile, sigma_squared, CorrelationSeries, Estimator,
    SigmaSquared, COBOUNDARY_THRESHOLD,
};
pub use fit::{fit_decay, fit_decay_window, DecayFit, DEFAULT_WINDOW};
pub use horseshoe::{correlation_f, sigma2_f, Obs3, TimeDirection};
pub use sampler::{correlation_mc, BackwardChain, McEstimate, MuStarSampler};

use crate::domain::{QPoint, RectId};
use crate::transfer::{Grid, GridFn};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StatsError {
    #[error("decay fit needs at least {need} usable points, got {got}")]
    InsufficientData { got: usize, need: usize },
    #[error("variance series did not decay below tolerance within {terms} terms")]
    NonSummable { terms: usize },
    #[error("observable depends on z at ({x}, {y}): spread {spread:e}")]
    ZDependence { x: f64, y: f64, spread: f64 },
    #[error("need at least {need} samples, got {got}")]
    TooFewSamples { got: usize, need: usize },
}

/// A function on `Q` that can be evaluated at any point.
pub trait Observable: Sync {
    fn eval(&self, q: &QPoint) -> f64;

    /// Span of the value lattice if the observable is lattice valued.
    fn lattice_span(&self) -> Option<f64> {
        None
    }

    fn on_grid(&self, grid: &Grid) -> GridFn {
        grid.sample(|q| self.eval(q))
    }
}

impl<F: Fn(&QPoint) -> f64 + Sync> Observable for F {
    fn eval(&self, q: &QPoint) -> f64 {
        self(q)
    }
}

/// Indicator of one rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Indicator(pub RectId);

impl Observable for Indicator {
    fn eval(&self, q: &QPoint) -> f64 {
        if q.rect == self.0 {
            1.0
        } else {
            0.0
        }
    }

    fn lattice_span(&self) -> Option<f64> {
        Some(1.0)
    }
}

/// `offset[r] + amp cos(wx x + wy y_hat + phase)`, `y_hat` the chart fibre
/// coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Wave {
    pub amp: f64,
    pub wx: f64,
    pub wy: f64,
    pub phase: f64,
    pub offset: [f64; 3],
    pub eps: f64,
}

impl Observable for Wave {
    fn eval(&self, q: &QPoint) -> f64 {
        let y = match q.rect {
            RectId::R3 => q.y - (1.0 + self.eps),
            _ => q.y,
        };
        self.offset[q.rect.index()] + self.amp * libm::cos(self.wx * q.x + self.wy * y + self.phase)
    }
}
