//! Three-state oracles built directly from the transition matrix.
#![allow(dead_code)]

use nalgebra::{Matrix3, Vector3};

pub fn a() -> Matrix3<f64> {
    Matrix3::new(1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 0.0)
}

fn perron(m: &Matrix3<f64>) -> (f64, Vector3<f64>) {
    let mut v = Vector3::new(1.0, 1.0, 1.0);
    let mut lambda = 0.0;
    for _ in 0..2000 {
        let w = m * v;
        lambda = w.norm() / v.norm();
        v = w / w.norm();
    }
    (lambda, v)
}

/// Perron root and eigenvectors: `h` of `A^T` and the masses of `A`,
/// normalised with `sum m = 1` and `sum h m = 1`.
pub struct Oracle {
    pub lambda: f64,
    pub h: Vector3<f64>,
    pub nu: Vector3<f64>,
    pub mu: Vector3<f64>,
}

pub fn oracle() -> Oracle {
    let (lambda, h) = perron(&a().transpose());
    let (_, m) = perron(&a());
    let nu = m / m.sum();
    let h = h / h.dot(&nu);
    let mu = h.component_mul(&nu);
    Oracle { lambda, h, nu, mu }
}

/// `C_n` of piecewise constant observables (values per rectangle).
pub fn correlation(phi: [f64; 3], psi: [f64; 3], n: usize) -> f64 {
    let o = oracle();
    let phi = Vector3::from(phi);
    let psi = Vector3::from(psi);
    let mut g = psi.component_mul(&o.h);
    let at = a().transpose();
    for _ in 0..n {
        g = at * g / o.lambda;
    }
    phi.component_mul(&g).dot(&o.nu) - phi.dot(&o.mu) * psi.dot(&o.mu)
}

pub fn sigma2(phi: [f64; 3]) -> f64 {
    let o = oracle();
    let mean = Vector3::from(phi).dot(&o.mu);
    let c = [phi[0] - mean, phi[1] - mean, phi[2] - mean];
    let mut s = correlation(c, c, 0);
    for n in 1..400 {
        s += 2.0 * correlation(c, c, n);
    }
    s
}
