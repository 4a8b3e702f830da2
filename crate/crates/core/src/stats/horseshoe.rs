//! Statistics of `F` for observables that do not depend on `z`, reduced to
//! the projection map through `pi`.

use super::{correlation_operator, sigma_squared, Observable, SigmaSquared, StatsError};
use crate::domain::{Params, QPoint, RectId};
use crate::dynamics::{Point3, Region};
use crate::transfer::{GridFn, SpectralData, TransferOperator};
use alloc::boxed::Box;
use serde::{Deserialize, Serialize};

type PlaneFn = Box<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// An observable on the two parallelepipeds given by one function of `(x, y)`
/// on each, and hence independent of `z` by construction.
pub struct Obs3 {
    lower: PlaneFn,
    upper: PlaneFn,
}

/// Heights probed by [`Obs3::from_fn3`].
const Z_PROBES: [[f64; 4]; 2] = [
    [0.0, 1.0 / 18.0, 1.0 / 9.0, 1.0 / 6.0],
    [5.0 / 6.0, 8.0 / 9.0, 17.0 / 18.0, 1.0],
];

impl Obs3 {
    pub fn new(
        lower: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        upper: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Obs3 {
            lower: Box::new(lower),
            upper: Box::new(upper),
        }
    }

    pub fn constant(c: f64) -> Self {
        Obs3::new(move |_, _| c, move |_, _| c)
    }

    /// Builds an observable from a function on `R^3` after checking on a
    /// `17 x 17` lattice of each parallelepiped that it does not vary in `z`.
    pub fn from_fn3<F>(f: F) -> Result<Self, StatsError>
    where
        F: Fn(&Point3) -> f64 + Clone + Send + Sync + 'static,
    {
        for zs in Z_PROBES {
            for i in 0..17 {
                for j in 0..17 {
                    let (x, y) = (i as f64 / 16.0, j as f64 / 16.0);
                    let vals = zs.map(|z| f(&Point3::new(x, y, z)));
                    let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
                    let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    if hi - lo > 1e-12 {
                        return Err(StatsError::ZDependence { x, y, spread: hi - lo });
                    }
                }
            }
        }
        let g = f.clone();
        Ok(Obs3::new(
            move |x, y| f(&Point3::new(x, y, 0.0)),
            move |x, y| g(&Point3::new(x, y, super::super::domain::UPPER_PLANE_Z)),
        ))
    }

    pub fn eval3(&self, p: &Point3) -> Option<f64> {
        match p.region() {
            Region::Lower => Some((self.lower)(p.x, p.y)),
            Region::Upper => Some((self.upper)(p.x, p.y)),
            Region::Outside => None,
        }
    }

    /// The induced observable `phi o pi^{-1}` on `Q`.
    pub fn induced(&self, params: &Params) -> Induced<'_> {
        Induced {
            obs: self,
            eps: params.eps,
        }
    }
}

/// `phi o pi^{-1}`: `R1`, `R2` read the lower function at raw coordinates,
/// `R3` the upper one in the chart of `P1`.
pub struct Induced<'a> {
    obs: &'a Obs3,
    eps: f64,
}

impl Observable for Induced<'_> {
    fn eval(&self, q: &QPoint) -> f64 {
        match q.rect {
            RectId::R1 | RectId::R2 => (self.obs.lower)(q.x, q.y),
            RectId::R3 => (self.obs.upper)(q.x, q.y - (1.0 + self.eps)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeDirection {
    /// `integral (phi o F^{-n}) psi - products of means`.
    Inverse,
    /// `integral (phi o F^n) psi - products of means`.
    Forward,
}

/// Correlations of `z`-independent observables under the equilibrium state
/// of `F`. Inverse time is the `G` correlation of the induced pair; forward
/// time swaps the roles by invariance.
pub fn correlation_f(
    op: &TransferOperator,
    sd: &SpectralData,
    phi: &Obs3,
    psi: &Obs3,
    n: usize,
    dir: TimeDirection,
) -> f64 {
    let grid = op.grid();
    let a: GridFn = phi.induced(op.params()).on_grid(grid);
    let b: GridFn = psi.induced(op.params()).on_grid(grid);
    match dir {
        TimeDirection::Inverse => correlation_operator(op, sd, &a, &b, n),
        TimeDirection::Forward => correlation_operator(op, sd, &b, &a, n),
    }
}

pub fn sigma2_f(op: &TransferOperator, sd: &SpectralData, phi: &Obs3, tol: f64) -> Result<SigmaSquared, StatsError> {
    let a = phi.induced(op.params()).on_grid(op.grid());
    sigma_squared(op, sd, &a, tol)
}
