//! Parameters, the rectangles of the projection domain and its metric.
//!
//! The projection domain `Q` is the union of three axis-aligned rectangles
//! embedded in `R^3`:
//!
//! ```text
//! R1 = [0, rho]            x [0, 1]           x {0}
//! R2 = [3/4 - rho, 3/4]    x [0, sigma]       x {0}
//! R3 = [0, rho]            x [1+eps, 2+eps]   x {5/6}
//! ```
//!
//! Points store the raw `y` coordinate. The dynamics on `R3` works in the
//! normalised fibre chart `y_hat = y - (1 + eps)` (see [`R3Chart`]).

use crate::prelude::*;
use core::fmt;
use serde::{Deserialize, Serialize};

/// Height of the upper plane `P1`.
pub const UPPER_PLANE_Z: f64 = 5.0 / 6.0;

/// Golden mean, the Perron root of the transition matrix.
pub const OMEGA: f64 = 1.618_033_988_749_895;

/// Boundary slack used by membership tests.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// How the fibre coordinate of `R3` enters the branch `G3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum R3Chart {
    /// `G3` acts on `y_hat = y - (1 + eps)`, which closes the transitions
    /// `2 -> 3 -> {1, 2}`.
    #[default]
    Normalized,
    /// `G3` applies `g0` to the raw coordinate `y in [1+eps, 2+eps]`. Kept for
    /// inspection only: no orbit enters or leaves `R3` in this reading.
    Literal,
}

/// Rejection of a parameter set. Each variant names the violated inequality.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParamError {
    #[error("rho = {0}: requires 0 < rho <= 1/8 so that the delta range [1/2, 3/4 - 2 rho] is nonempty")]
    Rho(f64),
    #[error("beta = {0}: requires beta > 6")]
    Beta(f64),
    #[error("beta1 = {0}: requires 3 < beta1 < 4")]
    Beta1(f64),
    #[error("sigma = {0}: requires 0 < sigma < 1/3")]
    Sigma(f64),
    #[error("eps = {0}: requires 0 < eps < 1")]
    Eps(f64),
}

/// Errors of the geometric layer.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DomainError {
    #[error("delta = {delta} outside the admissible interval [1/2, {upper}]")]
    InvalidDelta { delta: f64, upper: f64 },
    #[error("point ({x}, {y}) is not in rectangle {rect}")]
    OutsideRect { rect: RectId, x: f64, y: f64 },
}

/// Horseshoe and projection parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub rho: f64,
    pub beta: f64,
    pub beta1: f64,
    pub sigma: f64,
    pub eps: f64,
    #[serde(default)]
    pub r3_chart: R3Chart,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            rho: 0.1,
            beta: 7.0,
            beta1: 3.5,
            sigma: 0.3,
            eps: 0.05,
            r3_chart: R3Chart::Normalized,
        }
    }
}

impl Params {
    pub fn new(rho: f64, beta: f64, beta1: f64, sigma: f64, eps: f64) -> Result<Self, ParamError> {
        let p = Params {
            rho,
            beta,
            beta1,
            sigma,
            eps,
            r3_chart: R3Chart::Normalized,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_chart(mut self, chart: R3Chart) -> Self {
        self.r3_chart = chart;
        self
    }

    /// Checks every range constraint; the first violation is reported.
    pub fn validate(&self) -> Result<(), ParamError> {
        let ok = |v: f64| v.is_finite();
        if !(ok(self.rho) && self.rho > 0.0 && self.rho <= 0.125) {
            return Err(ParamError::Rho(self.rho));
        }
        if !(ok(self.beta) && self.beta > 6.0) {
            return Err(ParamError::Beta(self.beta));
        }
        if !(ok(self.beta1) && self.beta1 > 3.0 && self.beta1 < 4.0) {
            return Err(ParamError::Beta1(self.beta1));
        }
        if !(ok(self.sigma) && self.sigma > 0.0 && self.sigma < 1.0 / 3.0) {
            return Err(ParamError::Sigma(self.sigma));
        }
        if !(ok(self.eps) && self.eps > 0.0 && self.eps < 1.0) {
            return Err(ParamError::Eps(self.eps));
        }
        Ok(())
    }

    /// Horizontal expansion of `G`, the reciprocal of `rho`.
    pub fn gamma(&self) -> f64 {
        1.0 / self.rho
    }

    pub fn omega(&self) -> f64 {
        OMEGA
    }

    /// Upper end of the admissible `delta` interval.
    pub fn delta_max(&self) -> f64 {
        0.75 - 2.0 * self.rho
    }

    pub fn check_delta(&self, delta: f64) -> Result<(), DomainError> {
        if delta.is_finite() && (0.5..=self.delta_max()).contains(&delta) {
            Ok(())
        } else {
            Err(DomainError::InvalidDelta {
                delta,
                upper: self.delta_max(),
            })
        }
    }

    /// Raw coordinate bounds `([x0, x1], [y0, y1])` of a rectangle.
    pub fn bounds(&self, rect: RectId) -> ([f64; 2], [f64; 2]) {
        match rect {
            RectId::R1 => ([0.0, self.rho], [0.0, 1.0]),
            RectId::R2 => ([0.75 - self.rho, 0.75], [0.0, self.sigma]),
            RectId::R3 => ([0.0, self.rho], [1.0 + self.eps, 2.0 + self.eps]),
        }
    }

    /// Offset between the raw fibre coordinate and the dynamical chart.
    pub fn chart_offset(&self, rect: RectId) -> f64 {
        match rect {
            RectId::R3 => 1.0 + self.eps,
            _ => 0.0,
        }
    }
}

/// One of the three rectangles of `Q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RectId {
    R1,
    R2,
    R3,
}

impl RectId {
    pub const ALL: [RectId; 3] = [RectId::R1, RectId::R2, RectId::R3];

    pub fn index(self) -> usize {
        match self {
            RectId::R1 => 0,
            RectId::R2 => 1,
            RectId::R3 => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<RectId> {
        RectId::ALL.get(i).copied()
    }

    /// Symbol of the rectangle in the subshift alphabet `{1, 2, 3}`.
    pub fn symbol(self) -> u8 {
        self.index() as u8 + 1
    }

    pub fn from_symbol(s: u8) -> Option<RectId> {
        s.checked_sub(1).and_then(|i| RectId::from_index(i as usize))
    }

    pub fn plane(self) -> Plane {
        match self {
            RectId::R1 | RectId::R2 => Plane::P0,
            RectId::R3 => Plane::P1,
        }
    }
}

impl fmt::Display for RectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "R{}", self.symbol())
    }
}

impl core::str::FromStr for RectId {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().trim_start_matches(['R', 'r']) {
            "1" => Ok(RectId::R1),
            "2" => Ok(RectId::R2),
            "3" => Ok(RectId::R3),
            _ => Err(()),
        }
    }
}

/// The two horizontal planes containing `Q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Plane {
    /// `z = 0`, contains `R1` and `R2`.
    P0,
    /// `z = 5/6`, contains `R3`.
    P1,
}

impl Plane {
    pub fn z(self) -> f64 {
        match self {
            Plane::P0 => 0.0,
            Plane::P1 => UPPER_PLANE_Z,
        }
    }
}

/// A point of `Q`: rectangle plus raw planar coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QPoint {
    pub rect: RectId,
    pub x: f64,
    /// Raw fibre coordinate (`[1+eps, 2+eps]` on `R3`).
    pub y: f64,
}

impl QPoint {
    /// Validated constructor taking the raw fibre coordinate.
    pub fn new(params: &Params, rect: RectId, x: f64, y: f64) -> Result<Self, DomainError> {
        let q = QPoint { rect, x, y };
        if q.is_valid(params) {
            Ok(q)
        } else {
            Err(DomainError::OutsideRect { rect, x, y })
        }
    }

    /// Constructor taking the chart coordinate (`y_hat` on `R3`).
    pub fn from_chart(params: &Params, rect: RectId, x: f64, chart_y: f64) -> Result<Self, DomainError> {
        QPoint::new(params, rect, x, chart_y + params.chart_offset(rect))
    }

    pub fn is_valid(&self, params: &Params) -> bool {
        let ([x0, x1], [y0, y1]) = params.bounds(self.rect);
        self.x >= x0 - BOUNDARY_TOL
            && self.x <= x1 + BOUNDARY_TOL
            && self.y >= y0 - BOUNDARY_TOL
            && self.y <= y1 + BOUNDARY_TOL
    }

    /// Fibre coordinate in the dynamical chart.
    pub fn chart_y(&self, params: &Params) -> f64 {
        self.y - params.chart_offset(self.rect)
    }

    /// Representative in `R^3`.
    pub fn embed(&self) -> [f64; 3] {
        [self.x, self.y, self.rect.plane().z()]
    }
}

/// Euclidean distance of the embedded representatives.
pub fn metric_d(p: &QPoint, q: &QPoint) -> f64 {
    let a = p.embed();
    let b = q.embed();
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    (dx * dx + dy * dy + dz * dz).sqrt()
}

/// The four corners of a rectangle.
pub fn corners(params: &Params, rect: RectId) -> [QPoint; 4] {
    let ([x0, x1], [y0, y1]) = params.bounds(rect);
    [
        QPoint { rect, x: x0, y: y0 },
        QPoint { rect, x: x1, y: y0 },
        QPoint { rect, x: x0, y: y1 },
        QPoint { rect, x: x1, y: y1 },
    ]
}

/// Geometric constants of `Q` for a fixed `delta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainInfo {
    pub delta: f64,
    /// Diameter of `Q` in the embedded metric.
    pub diam_q: f64,
    /// Minimal distances between rectangles, indexed by [`RectId::index`].
    pub gaps: [[f64; 3]; 3],
    /// Chain constant: every pair in one rectangle is joined by at most `m`
    /// steps of length `<= delta`.
    pub m: u32,
}

impl DomainInfo {
    pub fn gap(&self, a: RectId, b: RectId) -> f64 {
        self.gaps[a.index()][b.index()]
    }

    pub fn min_gap(&self) -> f64 {
        let mut g = f64::INFINITY;
        for a in 0..3 {
            for b in (a + 1)..3 {
                g = g.min(self.gaps[a][b]);
            }
        }
        g
    }
}

/// Resolution of the grid used by the chain search in [`domain_info`].
pub const CHAIN_GRID: usize = 11;

pub fn domain_info(params: &Params, delta: f64) -> Result<DomainInfo, DomainError> {
    params.check_delta(delta)?;
    let mut diam = 0.0f64;
    let all: Vec<QPoint> = RectId::ALL.iter().flat_map(|&r| corners(params, r)).collect();
    for p in &all {
        for q in &all {
            diam = diam.max(metric_d(p, q));
        }
    }
    let mut gaps = [[0.0; 3]; 3];
    for a in RectId::ALL {
        for b in RectId::ALL {
            gaps[a.index()][b.index()] = if a == b { 0.0 } else { box_gap(params, a, b) };
        }
    }
    let m = RectId::ALL
        .iter()
        .map(|&r| chain_steps(params, r, delta, CHAIN_GRID))
        .max()
        .unwrap_or(1);
    Ok(DomainInfo {
        delta,
        diam_q: diam,
        gaps,
        m,
    })
}

fn box_gap(params: &Params, a: RectId, b: RectId) -> f64 {
    let (ax, ay) = params.bounds(a);
    let (bx, by) = params.bounds(b);
    let sep = |u: [f64; 2], v: [f64; 2]| (u[0] - v[1]).max(v[0] - u[1]).max(0.0);
    let dx = sep(ax, bx);
    let dy = sep(ay, by);
    let dz = a.plane().z() - b.plane().z();
    (dx * dx + dy * dy + dz * dz).sqrt()
}

/// Brute-force chain constant of one rectangle: the largest, over pairs of
/// points of an `n x n` grid (corners included), of the minimal number of
/// grid-to-grid steps of length `<= delta` joining them.
pub fn chain_steps(params: &Params, rect: RectId, delta: f64, n: usize) -> u32 {
    let n = n.max(2);
    let ([x0, x1], [y0, y1]) = params.bounds(rect);
    let pts: Vec<QPoint> = (0..n * n)
        .map(|k| {
            let (i, j) = (k % n, k / n);
            QPoint {
                rect,
                x: x0 + (x1 - x0) * i as f64 / (n - 1) as f64,
                y: y0 + (y1 - y0) * j as f64 / (n - 1) as f64,
            }
        })
        .collect();
    let count = pts.len();
    let mut worst = 1u32;
    let mut dist = vec![u32::MAX; count];
    let mut queue = Vec::with_capacity(count);
    for src in 0..count {
        dist.iter_mut().for_each(|d| *d = u32::MAX);
        dist[src] = 0;
        queue.clear();
        queue.push(src);
        let mut head = 0;
        while head < queue.len() {
            let u = queue[head];
            head += 1;
            for v in 0..count {
                if dist[v] == u32::MAX && metric_d(&pts[u], &pts[v]) <= delta + BOUNDARY_TOL {
                    dist[v] = dist[u] + 1;
                    queue.push(v);
                }
            }
        }
        for (v, &d) in dist.iter().enumerate().take(count) {
            if v != src {
                worst = worst.max(d);
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn metric_examples() {
        let p = Params::default();
        let a = QPoint::new(&p, RectId::R1, 0.0, 0.0).unwrap();
        assert_eq!(metric_d(&a, &a), 0.0);
        let b = QPoint::new(&p, RectId::R1, p.rho, 0.0).unwrap();
        assert_abs_diff_eq!(metric_d(&a, &b), 0.1, epsilon = 1e-15);
        let c = QPoint::new(&p, RectId::R1, 0.0, 1.0).unwrap();
        let d = QPoint::new(&p, RectId::R3, 0.0, 1.0 + p.eps).unwrap();
        let expected = (0.05f64 * 0.05 + (5.0f64 / 6.0).powi(2)).sqrt();
        assert_abs_diff_eq!(metric_d(&c, &d), expected, epsilon = 1e-15);
        assert_abs_diff_eq!(metric_d(&c, &d), 0.83482, epsilon = 2e-5);
    }

    #[test]
    fn domain_info_defaults() {
        let p = Params::default();
        let info = domain_info(&p, 0.5).unwrap();
        assert_abs_diff_eq!(info.diam_q, 2.3365, epsilon = 1e-4);
        assert_abs_diff_eq!(info.gap(RectId::R1, RectId::R2), 0.55, epsilon = 1e-15);
        assert_eq!(info.m, 3);
        // the R1-R2 gap equals the largest admissible delta; pairs use d < delta
        assert!(info.min_gap() >= p.delta_max());
    }

    #[test]
    fn chain_constant_matches_straight_line_chains() {
        let p = Params::default();
        for delta in [0.5, 0.52, 0.55] {
            for r in RectId::ALL {
                let ([x0, x1], [y0, y1]) = p.bounds(r);
                let diag = ((x1 - x0).powi(2) + (y1 - y0).powi(2)).sqrt();
                let expected = (diag / delta).ceil() as u32;
                assert_eq!(chain_steps(&p, r, delta, 11), expected.max(1), "{r} delta={delta}");
            }
        }
    }

    #[test]
    fn invalid_delta_rejected() {
        let p = Params::default();
        assert!(matches!(domain_info(&p, 0.4), Err(DomainError::InvalidDelta { .. })));
        assert!(matches!(domain_info(&p, 0.56), Err(DomainError::InvalidDelta { .. })));
        assert!(domain_info(&p, 0.55).is_ok());
    }

    #[test]
    fn parameter_validation_names_the_inequality() {
        let e = Params::new(0.2, 7.0, 3.5, 0.3, 0.05).unwrap_err();
        assert!(matches!(e, ParamError::Rho(_)));
        assert!(alloc::format!("{e}").contains("rho <= 1/8"));
        assert!(matches!(
            Params::new(0.1, 6.0, 3.5, 0.3, 0.05),
            Err(ParamError::Beta(_))
        ));
        assert!(matches!(
            Params::new(0.1, 7.0, 4.0, 0.3, 0.05),
            Err(ParamError::Beta1(_))
        ));
        assert!(matches!(
            Params::new(0.1, 7.0, 3.5, 0.34, 0.05),
            Err(ParamError::Sigma(_))
        ));
        assert!(matches!(Params::new(0.1, 7.0, 3.5, 0.3, 0.0), Err(ParamError::Eps(_))));
    }

    #[test]
    fn derived_constants() {
        let p = Params::default();
        assert_eq!(p.gamma() * p.rho, 1.0);
        assert_abs_diff_eq!(OMEGA * OMEGA, OMEGA + 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(OMEGA, (1.0 + 5f64.sqrt()) / 2.0, epsilon = 1e-16);
    }
}
