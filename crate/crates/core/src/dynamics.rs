//! The horseshoe `F`, the projection map `G` and the subshift `Sigma_A`.

use crate::domain::{Params, Plane, QPoint, R3Chart, RectId, BOUNDARY_TOL, UPPER_PLANE_Z};
use crate::prelude::*;
use core::f64::consts::E;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DynError {
    #[error("{name}: argument {value} outside [{lo}, {hi}]")]
    Domain {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("point ({x}, {y}, {z}) is in neither branch image of F")]
    NotInImage { x: f64, y: f64, z: f64 },
    #[error("word length {0} exceeds the supported range 1..=64")]
    Overflow(usize),
}

fn check_unit(name: &'static str, v: f64, hi: f64) -> Result<(), DynError> {
    if v >= -BOUNDARY_TOL && v <= hi + BOUNDARY_TOL {
        Ok(())
    } else {
        Err(DynError::Domain {
            name,
            value: v,
            lo: 0.0,
            hi,
        })
    }
}

/// The centre map `f(y) = 1 / (1 - (1 - 1/y) e^-1)`, extended by `f(0) = 0`.
pub fn f_center(y: f64) -> Result<f64, DynError> {
    check_unit("f", y, 1.0)?;
    Ok(f_raw(y))
}

// e y / ((e - 1) y + 1) is the same rational function without the pole at 0.
#[inline]
pub(crate) fn f_raw(y: f64) -> f64 {
    if y < 1e-300 {
        0.0
    } else {
        E * y / ((E - 1.0) * y + 1.0)
    }
}

/// `g0 = f^{-1}`, i.e. `w / ((1 - e) w + e)`.
pub fn g0(w: f64) -> Result<f64, DynError> {
    check_unit("g0", w, 1.0)?;
    Ok(g0_raw(w))
}

#[inline]
pub(crate) fn g0_raw(w: f64) -> f64 {
    w / ((1.0 - E) * w + E)
}

/// Affine fibre map of `R2`: `g1(y) = 1 - y / sigma`.
pub fn g1(params: &Params, y: f64) -> Result<f64, DynError> {
    check_unit("g1", y, params.sigma)?;
    Ok(1.0 - y / params.sigma)
}

/// A point of the cube `R = [0, 1]^3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// Which parallelepiped a point of `R` lies in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    /// `[0,1]^2 x [0, 1/6]`
    Lower,
    /// `[0,1]^2 x [5/6, 1]`
    Upper,
    Outside,
}

impl Point3 {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Point3 { x, y, z }
    }

    pub fn in_cube(&self) -> bool {
        let u = |v: f64| (-BOUNDARY_TOL..=1.0 + BOUNDARY_TOL).contains(&v);
        u(self.x) && u(self.y) && u(self.z)
    }

    pub fn region(&self) -> Region {
        if !self.in_cube() {
            return Region::Outside;
        }
        if self.z <= 1.0 / 6.0 + BOUNDARY_TOL {
            Region::Lower
        } else if self.z >= UPPER_PLANE_Z - BOUNDARY_TOL {
            Region::Upper
        } else {
            Region::Outside
        }
    }

    pub fn dist(&self, o: &Point3) -> f64 {
        let (dx, dy, dz) = (self.x - o.x, self.y - o.y, self.z - o.z);
        (dx * dx + dy * dy + dz * dz).sqrt()
    }
}

/// Result of one application of `F`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FImage {
    Mapped(Point3),
    /// The point is outside both parallelepipeds or its image leaves `R`.
    Escaped,
}

pub fn apply_f(params: &Params, p: &Point3) -> FImage {
    let image = match p.region() {
        Region::Lower => Point3::new(params.rho * p.x, f_raw(p.y), params.beta * p.z),
        Region::Upper => Point3::new(
            0.75 - params.rho * p.x,
            params.sigma * (1.0 - p.y),
            params.beta1 * (p.z - UPPER_PLANE_Z),
        ),
        Region::Outside => return FImage::Escaped,
    };
    if image.in_cube() {
        FImage::Mapped(image)
    } else {
        FImage::Escaped
    }
}

/// Exact branch inverse of `F`. The two branch images are separated in `x`
/// (`[0, rho]` against `[3/4 - rho, 3/4]`), and the `z`, `y` ranges are checked
/// against each branch image.
pub fn apply_f_inverse(params: &Params, p: &Point3) -> Result<Point3, DynError> {
    let t = BOUNDARY_TOL;
    let lower_image = p.x >= -t
        && p.x <= params.rho + t
        && p.y >= -t
        && p.y <= 1.0 + t
        && p.z >= -t
        && p.z <= (params.beta / 6.0).min(1.0) + t;
    if lower_image {
        return Ok(Point3::new(
            p.x / params.rho,
            g0_raw(p.y.clamp(0.0, 1.0)),
            p.z / params.beta,
        ));
    }
    let upper_image = p.x >= 0.75 - params.rho - t
        && p.x <= 0.75 + t
        && p.y >= -t
        && p.y <= params.sigma + t
        && p.z >= -t
        && p.z <= params.beta1 / 6.0 + t;
    if upper_image {
        return Ok(Point3::new(
            (0.75 - p.x) / params.rho,
            1.0 - p.y / params.sigma,
            p.z / params.beta1 + UPPER_PLANE_Z,
        ));
    }
    Err(DynError::NotInImage { x: p.x, y: p.y, z: p.z })
}

/// A point of one of the planes `P0`, `P1` in the plane chart: on `P1` the
/// fibre coordinate is `y_hat` under the normalised chart and raw otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanePoint {
    pub plane: Plane,
    pub x: f64,
    pub y: f64,
}

impl PlanePoint {
    pub fn dist(&self, o: &PlanePoint) -> f64 {
        let dz = self.plane.z() - o.plane.z();
        let (dx, dy) = (self.x - o.x, self.y - o.y);
        (dx * dx + dy * dy + dz * dz).sqrt()
    }

    /// The rectangle containing this point, if any.
    pub fn locate(&self, params: &Params) -> Option<QPoint> {
        let candidates: &[RectId] = match self.plane {
            Plane::P0 => &[RectId::R1, RectId::R2],
            Plane::P1 => &[RectId::R3],
        };
        candidates.iter().find_map(|&rect| {
            let q = QPoint {
                rect,
                x: self.x,
                y: self.raw_y(params, rect),
            };
            q.is_valid(params).then_some(q)
        })
    }

    fn raw_y(&self, params: &Params, rect: RectId) -> f64 {
        match (rect, params.r3_chart) {
            (RectId::R3, R3Chart::Normalized) => self.y + params.chart_offset(rect),
            _ => self.y,
        }
    }
}

/// Chart representative of a point of `Q` in its plane.
pub fn plane_point(params: &Params, q: &QPoint) -> PlanePoint {
    let y = match params.r3_chart {
        R3Chart::Normalized => q.chart_y(params),
        R3Chart::Literal => q.y,
    };
    PlanePoint {
        plane: q.rect.plane(),
        x: q.x,
        y,
    }
}

/// Image of `q` under `G` together with the rectangle containing it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GImage {
    pub point: PlanePoint,
    pub next: Option<QPoint>,
}

pub fn apply_g(params: &Params, q: &QPoint) -> GImage {
    let gamma = params.gamma();
    let point = match q.rect {
        RectId::R1 => PlanePoint {
            plane: Plane::P0,
            x: gamma * q.x,
            y: g0_raw(q.y),
        },
        RectId::R2 => PlanePoint {
            plane: Plane::P1,
            x: gamma * (0.75 - q.x),
            y: 1.0 - q.y / params.sigma,
        },
        RectId::R3 => {
            let fibre = match params.r3_chart {
                R3Chart::Normalized => q.chart_y(params),
                R3Chart::Literal => q.y,
            };
            PlanePoint {
                plane: Plane::P0,
                x: gamma * q.x,
                y: g0_raw(fibre),
            }
        }
    };
    GImage {
        point,
        next: point.locate(params),
    }
}

/// Transition matrix of the subshift: `1 -> 1,2`, `2 -> 3`, `3 -> 1,2`.
pub const TRANSITIONS: [[u8; 3]; 3] = [[1, 1, 0], [0, 0, 1], [1, 1, 0]];

pub fn admissible(from: RectId, to: RectId) -> bool {
    TRANSITIONS[from.index()][to.index()] == 1
}

/// Up to two preimages of a point of `Q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Preimages {
    items: [QPoint; 2],
    len: usize,
}

impl Preimages {
    fn empty() -> Self {
        let dummy = QPoint {
            rect: RectId::R1,
            x: 0.0,
            y: 0.0,
        };
        Preimages {
            items: [dummy; 2],
            len: 0,
        }
    }

    fn push(&mut self, q: QPoint) {
        self.items[self.len] = q;
        self.len += 1;
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn as_slice(&self) -> &[QPoint] {
        &self.items[..self.len]
    }

    pub fn iter(&self) -> core::slice::Iter<'_, QPoint> {
        self.as_slice().iter()
    }
}

/// All `q'` in `Q` with `G(q') = q`, obtained from the closed-form branch
/// inverses and kept only when they lie in their source rectangle.
pub fn preimages_g(params: &Params, q: &QPoint) -> Preimages {
    let mut out = Preimages::empty();
    match q.rect {
        RectId::R1 | RectId::R2 => {
            let x = params.rho * q.x;
            let fy = f_raw(q.y.clamp(0.0, 1.0));
            out.push(QPoint {
                rect: RectId::R1,
                x,
                y: fy,
            });
            let from_r3 = match params.r3_chart {
                R3Chart::Normalized => QPoint {
                    rect: RectId::R3,
                    x,
                    y: fy + params.chart_offset(RectId::R3),
                },
                R3Chart::Literal => QPoint {
                    rect: RectId::R3,
                    x,
                    y: fy,
                },
            };
            if from_r3.is_valid(params) {
                out.push(from_r3);
            }
        }
        RectId::R3 => {
            let fibre = match params.r3_chart {
                R3Chart::Normalized => q.chart_y(params),
                R3Chart::Literal => q.y,
            };
            let cand = QPoint {
                rect: RectId::R2,
                x: 0.75 - params.rho * q.x,
                y: params.sigma * (1.0 - fibre),
            };
            if cand.is_valid(params) {
                out.push(cand);
            }
        }
    }
    out
}

/// A preimage under `G^n` with its rectangle path (`path[0]` is the rectangle
/// of the preimage itself).
#[derive(Debug, Clone, PartialEq)]
pub struct PreimagePath {
    pub point: QPoint,
    pub path: Vec<RectId>,
}

pub fn preimages_g_n(params: &Params, q: &QPoint, n: usize) -> Vec<PreimagePath> {
    let mut level = vec![PreimagePath {
        point: *q,
        path: vec![q.rect],
    }];
    for _ in 0..n {
        let mut next = Vec::with_capacity(level.len() * 2);
        for node in &level {
            for pre in preimages_g(params, &node.point).iter() {
                let mut path = Vec::with_capacity(node.path.len() + 1);
                path.push(pre.rect);
                path.extend_from_slice(&node.path);
                next.push(PreimagePath { point: *pre, path });
            }
        }
        level = next;
    }
    level
}

/// The projection `pi` of the parallelepipeds onto `P0 ∪ P1`.
pub fn project_pi(p: &Point3) -> Result<PlanePoint, DynError> {
    match p.region() {
        Region::Lower => Ok(PlanePoint {
            plane: Plane::P0,
            x: p.x,
            y: p.y,
        }),
        Region::Upper => Ok(PlanePoint {
            plane: Plane::P1,
            x: p.x,
            y: p.y,
        }),
        Region::Outside => Err(DynError::Domain {
            name: "pi",
            value: p.z,
            lo: 0.0,
            hi: 1.0,
        }),
    }
}

/// `G` evaluated on a plane point, whether or not it lies in `Q`.
pub fn apply_g_plane(params: &Params, p: &PlanePoint) -> Option<PlanePoint> {
    let q = p.locate(params)?;
    Some(apply_g(params, &q).point)
}

/// A word over `{1, 2, 3}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Word {
    pub symbols: Vec<RectId>,
}

impl Word {
    pub fn is_admissible(&self) -> bool {
        self.symbols.windows(2).all(|w| admissible(w[0], w[1]))
    }

    pub fn digits(&self) -> Vec<u8> {
        self.symbols.iter().map(|s| s.symbol()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Itinerary {
    pub word: Word,
    /// Orbit points, starting with the initial point.
    pub orbit: Vec<QPoint>,
    /// The orbit left `Q` before `n` symbols were produced.
    pub truncated: bool,
}

pub fn itinerary(params: &Params, q: &QPoint, n: usize) -> Itinerary {
    let mut symbols = Vec::with_capacity(n);
    let mut orbit = Vec::with_capacity(n);
    let mut cur = Some(*q);
    while symbols.len() < n {
        let Some(p) = cur else { break };
        symbols.push(p.rect);
        orbit.push(p);
        cur = apply_g(params, &p).next;
    }
    Itinerary {
        truncated: symbols.len() < n,
        word: Word { symbols },
        orbit,
    }
}

/// Number of admissible words of length `n`, `1^T A^{n-1} 1`, exactly.
pub fn admissible_word_count(n: usize) -> Result<u128, DynError> {
    if n == 0 || n > 64 {
        return Err(DynError::Overflow(n));
    }
    let mut v = [1u128; 3];
    for _ in 1..n {
        let mut w = [0u128; 3];
        for (i, wi) in w.iter_mut().enumerate() {
            for (j, vj) in v.iter().enumerate() {
                if TRANSITIONS[i][j] == 1 {
                    *wi = wi.checked_add(*vj).ok_or(DynError::Overflow(n))?;
                }
            }
        }
        v = w;
    }
    v.iter()
        .try_fold(0u128, |a, b| a.checked_add(*b))
        .ok_or(DynError::Overflow(n))
}

/// `log W(n) / n`, which tends to `log omega`.
pub fn subshift_entropy_estimate(n: usize) -> Result<f64, DynError> {
    let count = admissible_word_count(n)?;
    Ok((count as f64).ln() / n as f64)
}
