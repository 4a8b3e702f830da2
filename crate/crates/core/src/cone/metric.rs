//! The projective metric `Theta_k = log(B_k / A_k)` of `C_{k,delta}`.
//!
//! The cone is cut out by the functionals
//! `l(f) = k d(x,y)^alpha f(z) - s (f(x) - f(y))`, `s = +-1`. Writing
//! `(u, t) = s (dphi, dpsi) / (k d^alpha)` for a pair and `(phi(z), psi(z))`
//! for a cell, `l(psi) / l(phi)` is the slope of the segment from `(u, t)` to
//! `(phi(z), psi(z))`. Inside the cone every `u` is at most `inf phi`, so both
//! point sets lie on either side of a vertical line and the extreme slopes are
//! attained at vertices of the two convex hulls.

use super::hull::{hull_of, P2};
use super::{cone_member, ConeError, PairSet};
use crate::prelude::*;
use crate::transfer::GridFn;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaK {
    pub theta: f64,
    pub a_k: f64,
    pub b_k: f64,
}

/// Relative slack accepted on the membership ratio.
const MEMBER_TOL: f64 = 1e-9;

fn check(which: &'static str, f: &GridFn, pairs: &PairSet, k: f64) -> Result<(), ConeError> {
    let m = cone_member(f, pairs, k);
    if m.min > 0.0 && m.ratio <= k * (1.0 + MEMBER_TOL) {
        Ok(())
    } else {
        Err(ConeError::NotInCone {
            which,
            ratio: m.ratio,
            k,
        })
    }
}

fn slopes(p_hull: &[P2], s_hull: &[P2]) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for s in s_hull {
        for p in p_hull {
            let den = s[0] - p[0];
            let r = if den > 0.0 { (s[1] - p[1]) / den } else { f64::NAN };
            if r.is_nan() {
                return (0.0, f64::INFINITY);
            }
            lo = lo.min(r);
            hi = hi.max(r);
        }
    }
    (lo, hi)
}

pub fn theta_k(phi: &GridFn, psi: &GridFn, pairs: &PairSet, k: f64) -> Result<ThetaK, ConeError> {
    check("phi", phi, pairs, k)?;
    check("psi", psi, pairs, k)?;
    let (a, b) = (&phi.0, &psi.0);
    let p_hull = hull_of(2 * pairs.len(), |idx| {
        let (i, j, da) = pairs.pairs[idx / 2];
        let s = if idx % 2 == 0 { 1.0 } else { -1.0 } / (k * da);
        let (i, j) = (i as usize, j as usize);
        [s * (a[i] - a[j]), s * (b[i] - b[j])]
    });
    let p_hull = if p_hull.is_empty() { vec![[0.0, 0.0]] } else { p_hull };
    let s_hull = hull_of(a.len(), |z| [a[z], b[z]]);
    let (a_k, b_k) = slopes(&p_hull, &s_hull);
    Ok(ThetaK {
        theta: (b_k / a_k).ln(),
        a_k,
        b_k,
    })
}

/// Definitional triple loop over pairs, signs and cells.
pub fn theta_k_brute(phi: &GridFn, psi: &GridFn, pairs: &PairSet, k: f64) -> Result<ThetaK, ConeError> {
    check("phi", phi, pairs, k)?;
    check("psi", psi, pairs, k)?;
    let (a, b) = (&phi.0, &psi.0);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut consider = |num: f64, den: f64| {
        let r = num / den;
        lo = lo.min(r);
        hi = hi.max(r);
    };
    for &(i, j, da) in &pairs.pairs {
        let (i, j) = (i as usize, j as usize);
        for s in [1.0, -1.0] {
            for z in 0..a.len() {
                consider(k * da * b[z] - s * (b[i] - b[j]), k * da * a[z] - s * (a[i] - a[j]));
            }
        }
    }
    if pairs.is_empty() {
        for z in 0..a.len() {
            consider(b[z], a[z]);
        }
    }
    Ok(ThetaK {
        theta: (hi / lo).ln(),
        a_k: lo,
        b_k: hi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Params;
    use crate::transfer::Grid;

    #[test]
    fn hull_route_matches_brute_force() {
        let p = Params::default();
        let g = Grid::uniform(&p, 5, 6);
        let pairs = PairSet::new(&g, 0.5, 0.5, super::super::MAX_PAIRS);
        let phi = g.sample(|q| 2.0 + 0.05 * (7.0 * q.x + 3.0 * q.y).sin());
        let psi = g.sample(|q| 1.5 + 0.04 * (2.0 * q.y + 11.0 * q.x).cos());
        let a = theta_k(&phi, &psi, &pairs, 1.0).unwrap();
        let b = theta_k_brute(&phi, &psi, &pairs, 1.0).unwrap();
        assert!((a.theta - b.theta).abs() < 1e-12, "{a:?} {b:?}");
        let z = theta_k(&phi, &phi.scale(2.0), &pairs, 1.0).unwrap();
        assert!(z.theta.abs() < 1e-12);
    }
}
