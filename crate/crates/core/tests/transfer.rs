mod common;

use conegap_core::domain::{Params, QPoint, RectId, OMEGA};
use conegap_core::dynamics::preimages_g_n;
use conegap_core::potential::birkhoff_sum;
use conegap_core::transfer::*;
use conegap_core::Potential;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn params() -> Params {
    Params::default()
}

fn bump() -> Potential {
    Potential::Bump {
        amplitude: 0.15,
        center: QPoint::new(&params(), RectId::R1, 0.05, 0.6).unwrap(),
        exponent: 0.5,
        offset: -0.05,
    }
}

fn random_holder(grid: &Grid, rng: &mut ChaCha8Rng) -> GridFn {
    let (a, b, c, d) = (
        rng.random_range(-1.0..1.0),
        rng.random_range(0.0..30.0),
        rng.random_range(0.0..6.0),
        rng.random_range(0.0..6.3),
    );
    grid.sample(|q| 1.5 + a * (b * q.x + c * q.y + d).cos())
}

#[test]
fn zero_potential_spectral_data() {
    let p = params();
    let grid = Grid::uniform(&p, 64, 64);
    let op = TransferOperator::new(&grid, &Potential::zero());
    let sd = power_iterate(&op, &PowerOptions::default()).unwrap();
    let o = common::oracle();
    assert!((sd.lambda - o.lambda).abs() < 1e-6);
    assert!((sd.lambda - OMEGA).abs() < 1e-6);
    let h = grid.rect_means(&sd.h);
    assert!((h[1] / h[0] - 1.0).abs() < 1e-6);
    assert!((h[2] / h[0] - 1.0 / OMEGA).abs() < 1e-6);
    let nu = grid.rect_masses(&sd.nu);
    let mu = grid.rect_masses(&sd.mu_star);
    let nu_expected = [0.381966, 0.236068, 0.381966];
    let mu_expected = [0.447214, 0.276393, 0.276393];
    for r in 0..3 {
        assert!((nu[r] - nu_expected[r]).abs() < 1e-3);
        assert!((nu[r] - o.nu[r]).abs() < 1e-8);
        assert!((mu[r] - mu_expected[r]).abs() < 1e-3);
        assert!((mu[r] - o.mu[r]).abs() < 1e-8);
    }
    assert!(sd.nu.is_probability() && sd.mu_star.is_probability());
    assert!((sd.nu.integrate(&sd.h) - 1.0).abs() < 1e-10);
    assert!(sd.residual_h <= 1e-8);
}

#[test]
fn apply_examples() {
    let p = params();
    let grid = Grid::uniform(&p, 10, 12);
    let op = TransferOperator::new(&grid, &Potential::zero());
    // indicators transform by A^T
    let a = common::a();
    for j in RectId::ALL {
        let l = op.apply(&grid.indicator(j));
        for k in 0..grid.len() {
            let r = grid.rect_of(k);
            assert!((l.0[k] - a[(j.index(), r.index())]).abs() < 1e-14);
        }
    }
    // three preimage generations
    let l3 = op.apply_n(&grid.constant(1.0), 3);
    assert!(l3.0.iter().all(|&v| (3.0 - 1e-12..=5.0 + 1e-12).contains(&v)));
    for k in (0..grid.len()).step_by(7) {
        assert!((l3.0[k] - preimages_g_n(&p, &grid.center(k), 3).len() as f64).abs() < 1e-12);
    }
    // linearity and positivity, general potential
    let op = TransferOperator::new(&grid, &bump());
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let f = random_holder(&grid, &mut rng);
    let g = random_holder(&grid, &mut rng);
    let lhs = op.apply(&f.zip(&g, |x, y| 2.0 * x - 0.5 * y));
    let rhs = op.apply(&f).zip(&op.apply(&g), |x, y| 2.0 * x - 0.5 * y);
    assert!(lhs.sup_dist(&rhs) < 1e-12);
    let nonneg = f.map(|v| v.max(0.0) * 0.0 + (v - 1.0).max(0.0));
    assert!(op.apply(&nonneg).0.iter().all(|&v| v >= 0.0));
    let pos3 = op.apply_n(&grid.constant(1.0), 3);
    assert!(pos3.inf() > 0.0);
}

fn tree(p: &Params, grid: &Grid, phi: &Potential, psi: &GridFn, q: &QPoint, n: usize) -> f64 {
    preimages_g_n(p, q, n)
        .iter()
        .map(|y| birkhoff_sum(p, phi, &y.point, n).unwrap().exp() * grid.interpolate(&psi.0, &y.point))
        .sum()
}

#[test]
fn composition_matches_preimage_tree() {
    let p = params();
    let grid = Grid::uniform(&p, 16, 16);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    // piecewise constant data at zero potential: interpolation is exact
    let op = TransferOperator::new(&grid, &Potential::zero());
    let psi = grid.sample(|q| [0.3, 1.7, 2.2][q.rect.index()]);
    for n in 1..=4 {
        let composed = op.apply_n(&psi, n);
        for _ in 0..100 {
            let k = rng.random_range(0..grid.len());
            let t = tree(&p, &grid, &Potential::zero(), &psi, &grid.center(k), n);
            assert!((composed.0[k] - t).abs() < 1e-10);
        }
    }
    // smooth data and potential: agreement up to interpolation error
    let grid = Grid::uniform(&p, 48, 48);
    let phi = bump();
    let op = TransferOperator::new(&grid, &phi);
    let psi = grid.sample(|q| 1.0 + 0.3 * (4.0 * q.x + q.y).sin());
    for n in 1..=4 {
        let composed = op.apply_n(&psi, n);
        for _ in 0..100 {
            let k = rng.random_range(0..grid.len());
            let t = tree(&p, &grid, &phi, &psi, &grid.center(k), n);
            assert!(
                (composed.0[k] - t).abs() < 5e-3 * t.abs(),
                "n={n} {} {}",
                composed.0[k],
                t
            );
        }
    }
    // n = 1 is one application
    assert_eq!(op.apply_n(&psi, 1), op.apply(&psi));
}

#[test]
fn general_potential_residuals_and_duality() {
    let p = params();
    let grid = Grid::uniform(&p, 32, 32);
    let op = TransferOperator::new(&grid, &bump());
    let sd = power_iterate(&op, &PowerOptions::default()).unwrap();
    assert!(sd.residual_h <= 1e-8, "{}", sd.residual_h);
    assert!(sd.h.inf() > 0.0);
    assert!((sd.nu.integrate(&sd.h) - 1.0).abs() < 1e-10);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let psi = random_holder(&grid, &mut rng);
        let lhs = sd.nu.integrate(&op.apply(&psi));
        let rhs = sd.lambda * sd.nu.integrate(&psi);
        assert!((lhs - rhs).abs() <= 1e-6 * psi.sup_abs());
    }
    // bracket contains lambda and h bounded away from zero and infinity
    assert!(sd.bracket[0] <= sd.lambda && sd.lambda <= sd.bracket[1]);
    assert!(sd.h.sup() / sd.h.inf() < 10.0);
}

#[test]
fn ulam_examples() {
    let p = params();
    let one = Grid::uniform(&p, 1, 1);
    let dense = ulam_dense(&one, &Potential::zero(), UlamScheme::Cell).unwrap();
    let at = common::a().transpose();
    for i in 0..3 {
        for j in 0..3 {
            assert_eq!(dense.get(i, j), at[(i, j)]);
        }
    }
    let grid = Grid::uniform(&p, 8, 8);
    let m = ulam_matrix(&grid, &bump(), UlamScheme::Cell);
    for i in grid.rect_range(RectId::R3) {
        let cols: Vec<usize> = m.row(i).map(|e| e.0).collect();
        assert_eq!(cols.len(), 1);
        assert_eq!(grid.rect_of(cols[0]), RectId::R2);
    }
    let l64 = perron_root(
        &ulam_matrix(&Grid::uniform(&p, 64, 64), &Potential::zero(), UlamScheme::Cell),
        1e-12,
        100_000,
    )
    .unwrap();
    let l128 = perron_root(
        &ulam_matrix(&Grid::uniform(&p, 128, 128), &Potential::zero(), UlamScheme::Cell),
        1e-12,
        100_000,
    )
    .unwrap();
    assert!((l64 - l128).abs() < 1e-4);
    let big = Grid::uniform(&p, 64, 64);
    assert!(matches!(
        ulam_dense(&big, &Potential::zero(), UlamScheme::Cell),
        Err(TransferError::SizeLimit { .. })
    ));
}

#[test]
fn dense_eigensolve_matches_power_iteration() {
    let p = params();
    let grid = Grid::uniform(&p, 8, 8);
    let tol = 1e-10;
    for phi in [Potential::zero(), bump(), Potential::linear_uniform(0.2, -0.1, 0.0)] {
        let op = TransferOperator::new(&grid, &phi);
        let sd = power_iterate(&op, &PowerOptions { tol, max_iter: 100_000 }).unwrap();
        let d = ulam_dense(&grid, &phi, UlamScheme::Interpolated).unwrap();
        let m = nalgebra::DMatrix::from_row_slice(d.n, d.n, &d.data);
        let top = m.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!((top - sd.lambda).abs() < 10.0 * tol, "{top} {}", sd.lambda);
    }
}

#[test]
fn pushforward_converges() {
    let p = params();
    let grid = Grid::uniform(&p, 32, 32);
    let op = TransferOperator::new(&grid, &Potential::zero());
    let sd = power_iterate(&op, &PowerOptions::default()).unwrap();
    let s = pushforward_series(&op, &sd, 30);
    assert!(s[0] > 1e-3);
    assert!(s[10] < s[2]);
    assert!(s[30] < 1e-8);
    assert_eq!(pushforward_distance(&op, &sd, 10), s[10]);
}

#[test]
fn positivity_after_three_steps() {
    let p = params();
    let grid = Grid::uniform(&p, 16, 16);
    let op = TransferOperator::new(&grid, &bump());
    for idx in [0, 300, 700] {
        let mut e = GridFn(vec![0.0; grid.len()]);
        e.0[idx] = 1.0;
        let l1 = op.apply(&e);
        assert!(l1.inf() >= 0.0);
        let l3 = op.apply_n(&e, 3);
        assert!(l3.inf() >= 0.0);
    }
    let l3 = op.apply_n(&grid.indicator(RectId::R2), 3);
    assert!(l3.inf() > 0.0);
}

#[test]
fn normalized_iterates_converge_exponentially() {
    use conegap_core::cone::{sample_cone_function, PairSet};
    use conegap_core::stats::{fit_decay_window, CorrelationSeries, Estimator};
    let p = params();
    let grid = Grid::uniform(&p, 32, 32);
    let pairs = PairSet::new(&grid, 0.5, 0.5, 2_000_000);
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for phi in [Potential::zero(), bump()] {
        let op = TransferOperator::new(&grid, &phi);
        let sd = power_iterate(&op, &PowerOptions::default()).unwrap();
        for _ in 0..10 {
            let f = sample_cone_function(&grid, &pairs, 5.0, &mut rng);
            let e = convergence_series(&op, &sd, &f, 40);
            let usable = e.iter().position(|&x| x < 1e-8).unwrap_or(e.len());
            assert!(usable >= 8, "{e:?}");
            let series = CorrelationSeries {
                n: (0..usable).collect(),
                c: e[..usable].to_vec(),
                estimator: Estimator::Operator,
                stderr: None,
            };
            let fit = fit_decay_window(&series, (1, usable)).unwrap();
            assert!(fit.tau < 1.0 && fit.r_squared >= 0.95, "{fit:?} {e:?}");
            // the contracting iterate is L^3, so compare errors three steps apart
            let tail = &e[usable / 2..usable];
            assert!(tail.windows(4).all(|w| w[3] <= w[0]), "{e:?}");
        }
    }
}
