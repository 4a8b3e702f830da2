//! Hölder potentials on `Q`, Birkhoff sums and the cone condition.

use crate::domain::{corners, metric_d, DomainInfo, Params, QPoint, RectId};
use crate::dynamics::apply_g;
use crate::par;
use crate::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PotentialError {
    #[error("orbit left Q at step {index}")]
    OrbitEscaped { index: usize },
}

/// Coefficients `(a, b, c)` of `a x + b y + c` on one rectangle, `y` raw.
pub type LinearCoeffs = [f64; 3];

/// A potential `phi*` on `Q`. Potentials on the parallelepipeds that do not
/// depend on `z` are represented through their projection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Potential {
    Constant {
        c: f64,
    },
    /// One affine function per rectangle, indexed by [`RectId::index`].
    Linear {
        coeffs: [LinearCoeffs; 3],
    },
    /// `offset + amplitude * max(0, 1 - d(q, center)^exponent)`.
    Bump {
        amplitude: f64,
        center: QPoint,
        exponent: f64,
        offset: f64,
    },
}

impl Default for Potential {
    fn default() -> Self {
        Potential::Constant { c: 0.0 }
    }
}

impl Potential {
    pub fn zero() -> Self {
        Potential::Constant { c: 0.0 }
    }

    /// The same affine function on every rectangle.
    pub fn linear_uniform(a: f64, b: f64, c: f64) -> Self {
        Potential::Linear { coeffs: [[a, b, c]; 3] }
    }

    pub fn eval(&self, q: &QPoint) -> f64 {
        match self {
            Potential::Constant { c } => *c,
            Potential::Linear { coeffs } => {
                let [a, b, c] = coeffs[q.rect.index()];
                a * q.x + b * q.y + c
            }
            Potential::Bump {
                amplitude,
                center,
                exponent,
                offset,
            } => offset + amplitude * bump_profile(metric_d(q, center), *exponent),
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            Potential::Constant { .. } => true,
            Potential::Linear { coeffs } => {
                coeffs.iter().all(|k| k[0] == 0.0 && k[1] == 0.0) && coeffs.iter().all(|k| k[2] == coeffs[0][2])
            }
            Potential::Bump { amplitude, .. } => *amplitude == 0.0,
        }
    }

    /// Exact `(inf, sup)` over `Q`.
    pub fn range(&self, params: &Params) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        match self {
            Potential::Constant { c } => return (*c, *c),
            Potential::Linear { .. } => {
                for r in RectId::ALL {
                    for q in corners(params, r) {
                        let v = self.eval(&q);
                        lo = lo.min(v);
                        hi = hi.max(v);
                    }
                }
            }
            Potential::Bump {
                amplitude,
                center,
                exponent,
                offset,
            } => {
                for r in RectId::ALL {
                    let (near, far) = distance_range(params, r, center);
                    let a = offset + amplitude * bump_profile(near, *exponent);
                    let b = offset + amplitude * bump_profile(far, *exponent);
                    lo = lo.min(a.min(b));
                    hi = hi.max(a.max(b));
                }
            }
        }
        (lo, hi)
    }

    pub fn inf(&self, params: &Params) -> f64 {
        self.range(params).0
    }

    pub fn sup(&self, params: &Params) -> f64 {
        self.range(params).1
    }

    /// `sup phi* - inf phi*`.
    pub fn variation(&self, params: &Params) -> f64 {
        let (lo, hi) = self.range(params);
        hi - lo
    }
}

/// Admissibility threshold of the variation, `log(omega) / 2`.
pub fn variation_threshold() -> f64 {
    0.5 * crate::domain::OMEGA.ln()
}

fn bump_profile(d: f64, exponent: f64) -> f64 {
    (1.0 - d.powf(exponent)).max(0.0)
}

/// Nearest and farthest distance from `c` to the rectangle `r`.
fn distance_range(params: &Params, r: RectId, c: &QPoint) -> (f64, f64) {
    let ([x0, x1], [y0, y1]) = params.bounds(r);
    let cz = c.embed();
    let nearest = QPoint {
        rect: r,
        x: cz[0].clamp(x0, x1),
        y: cz[1].clamp(y0, y1),
    };
    let far = corners(params, r).iter().map(|q| metric_d(q, c)).fold(0.0, f64::max);
    (metric_d(&nearest, c), far)
}

/// Smallest Hölder constant of sampled values over pairs with
/// `0 < d(x, y) < delta` (`delta = INFINITY` gives the global constant).
pub fn holder_seminorm(points: &[QPoint], values: &[f64], alpha: f64, delta: f64) -> f64 {
    assert_eq!(points.len(), values.len());
    let n = points.len();
    let rows = par::map_indexed(n, |i| {
        let mut best = 0.0f64;
        for j in (i + 1)..n {
            let d = metric_d(&points[i], &points[j]);
            if d > 0.0 && d < delta {
                let q = (values[i] - values[j]).abs() / d.powf(alpha);
                if q > best {
                    best = q;
                }
            }
        }
        best
    });
    rows.into_iter().fold(0.0, f64::max)
}

/// Vertex lattice with `n x n` points per rectangle, corners included.
pub fn vertex_points(params: &Params, n: usize) -> Vec<QPoint> {
    let n = n.max(2);
    let mut pts = Vec::with_capacity(3 * n * n);
    for rect in RectId::ALL {
        let ([x0, x1], [y0, y1]) = params.bounds(rect);
        for j in 0..n {
            for i in 0..n {
                pts.push(QPoint {
                    rect,
                    x: x0 + (x1 - x0) * i as f64 / (n - 1) as f64,
                    y: y0 + (y1 - y0) * j as f64 / (n - 1) as f64,
                });
            }
        }
    }
    pts
}

/// `S_n phi*(q) = sum_{j<n} phi*(G^j q)`.
pub fn birkhoff_sum(params: &Params, phi: &Potential, q: &QPoint, n: usize) -> Result<f64, PotentialError> {
    let mut s = 0.0;
    let mut cur = *q;
    for j in 0..n {
        s += phi.eval(&cur);
        if j + 1 < n {
            cur = apply_g(params, &cur)
                .next
                .ok_or(PotentialError::OrbitEscaped { index: j + 1 })?;
        }
    }
    Ok(s)
}

/// Evaluation of the admissibility inequality
/// `e^{3 var} e^{2a} (2/3 e^{2a} + sigma^a)
///  + (10 e^{3a} / 3) m diam^a |e^{3 phi}|_a / e^{3 inf phi} < 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub lhs: f64,
    pub satisfied: bool,
    pub var: f64,
    pub holder_exp3: f64,
    pub inf_phi: f64,
    /// The two summands of `lhs`.
    pub terms: [f64; 2],
    pub alpha: f64,
    pub variation_admissible: bool,
}

/// Vertex lattice resolution used for `|e^{3 phi}|_alpha`.
pub const CONDITION_GRID: usize = 33;

pub fn cone_condition(phi: &Potential, alpha: f64, params: &Params, info: &DomainInfo) -> ConditionReport {
    let (inf_phi, sup_phi) = phi.range(params);
    let var = sup_phi - inf_phi;
    let holder_exp3 = if phi.is_constant() {
        0.0
    } else {
        let pts = vertex_points(params, CONDITION_GRID);
        let vals: Vec<f64> = pts.iter().map(|q| (3.0 * phi.eval(q)).exp()).collect();
        holder_seminorm(&pts, &vals, alpha, f64::INFINITY)
    };
    let first = (3.0 * var).exp() * (2.0 * alpha).exp() * (2.0 / 3.0 * (2.0 * alpha).exp() + params.sigma.powf(alpha));
    let second = 10.0 * (3.0 * alpha).exp() / 3.0 * info.m as f64 * info.diam_q.powf(alpha) * holder_exp3
        / (3.0 * inf_phi).exp();
    let lhs = first + second;
    ConditionReport {
        lhs,
        satisfied: lhs < 1.0,
        var,
        holder_exp3,
        inf_phi,
        terms: [first, second],
        alpha,
        variation_admissible: var < variation_threshold(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::domain_info;
    use approx::assert_abs_diff_eq;

    fn p() -> Params {
        Params::default()
    }

    #[test]
    fn variation_examples() {
        let p = p();
        assert_eq!(Potential::Constant { c: 1.3 }.variation(&p), 0.0);
        assert_abs_diff_eq!(
            Potential::linear_uniform(0.1, 0.0, 0.0).variation(&p),
            0.075,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(variation_threshold(), 0.2406059, epsilon = 1e-7);
    }

    #[test]
    fn bump_range_matches_sampling() {
        let p = p();
        let phi = Potential::Bump {
            amplitude: 0.2,
            center: QPoint::new(&p, RectId::R1, 0.05, 0.5).unwrap(),
            exponent: 0.5,
            offset: -0.1,
        };
        let (lo, hi) = phi.range(&p);
        let pts = vertex_points(&p, 101);
        let (slo, shi) = pts
            .iter()
            .map(|q| phi.eval(q))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
        assert!(lo <= slo + 1e-15 && hi >= shi - 1e-15);
        assert_abs_diff_eq!(hi, shi, epsilon = 1e-12);
        assert!(slo - lo < 1e-3);
    }

    #[test]
    fn seminorm_examples() {
        let p = p();
        let pts = vertex_points(&p, 9);
        let ones = vec![1.0; pts.len()];
        assert_eq!(holder_seminorm(&pts, &ones, 0.5, 0.5), 0.0);
        let q0 = QPoint::new(&p, RectId::R1, 0.02, 0.3).unwrap();
        let v: Vec<f64> = pts.iter().map(|q| metric_d(q, &q0).sqrt()).collect();
        let s = holder_seminorm(&pts, &v, 0.5, 0.5);
        assert!(s <= 1.0 + 1e-12 && s > 0.5);
        let v2: Vec<f64> = v.iter().map(|x| 2.0 * x).collect();
        assert_abs_diff_eq!(holder_seminorm(&pts, &v2, 0.5, 0.5), 2.0 * s, epsilon = 1e-14);
    }

    #[test]
    fn birkhoff_examples() {
        let p = p();
        let q = QPoint::new(&p, RectId::R1, 0.0, 0.4).unwrap();
        let c = Potential::Constant { c: 0.7 };
        assert_abs_diff_eq!(birkhoff_sum(&p, &c, &q, 9).unwrap(), 6.3, epsilon = 1e-12);
        assert_eq!(birkhoff_sum(&p, &c, &q, 0).unwrap(), 0.0);
        let off = QPoint::new(&p, RectId::R1, 0.05, 0.4).unwrap();
        assert_eq!(
            birkhoff_sum(&p, &c, &off, 3),
            Err(PotentialError::OrbitEscaped { index: 1 })
        );
    }

    #[test]
    fn condition_for_constants() {
        let p = p();
        let info = domain_info(&p, 0.5).unwrap();
        let r = cone_condition(&Potential::Constant { c: 0.4 }, 0.5, &p, &info);
        let e = 1f64.exp();
        assert_abs_diff_eq!(r.lhs, e * (2.0 / 3.0 * e + 0.3f64.sqrt()), epsilon = 1e-12);
        assert_abs_diff_eq!(r.lhs, 6.414, epsilon = 1e-3);
        assert!(!r.satisfied);
        assert_eq!(r.terms[1], 0.0);
    }

    #[test]
    fn condition_grows_with_variation() {
        let p = p();
        let info = domain_info(&p, 0.5).unwrap();
        let center = QPoint::new(&p, RectId::R2, 0.7, 0.1).unwrap();
        let bump = |t: f64| Potential::Bump {
            amplitude: t,
            center,
            exponent: 0.5,
            offset: 0.0,
        };
        let a = cone_condition(&bump(0.0), 0.5, &p, &info);
        let phi = bump(0.1);
        assert_abs_diff_eq!(phi.variation(&p), 0.1, epsilon = 1e-12);
        let b = cone_condition(&phi, 0.5, &p, &info);
        assert!(b.lhs > a.lhs);
    }

    #[test]
    fn small_sigma_and_alpha_satisfy_the_condition() {
        let p = Params {
            sigma: 1e-20,
            ..Params::default()
        };
        let info = domain_info(&p, 0.5).unwrap();
        let r = cone_condition(&Potential::zero(), 0.05, &p, &info);
        assert!(r.satisfied, "{}", r.lhs);
    }
}
