mod common;

use conegap_core::domain::{Params, QPoint, RectId};
use conegap_core::dynamics::Point3;
use conegap_core::stats::*;
use conegap_core::transfer::*;
use conegap_core::Potential;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn setup(n: usize, phi: &Potential) -> (TransferOperator, SpectralData) {
    let grid = Grid::uniform(&Params::default(), n, n);
    let op = TransferOperator::new(&grid, phi);
    let sd = power_iterate(&op, &PowerOptions::default()).unwrap();
    (op, sd)
}

fn bump() -> Potential {
    Potential::Bump {
        amplitude: 0.15,
        center: QPoint::new(&Params::default(), RectId::R2, 0.7, 0.1).unwrap(),
        exponent: 0.5,
        offset: 0.0,
    }
}

#[test]
fn indicator_correlations_match_matrix_oracle() {
    let (op, sd) = setup(32, &Potential::zero());
    let g = op.grid();
    let a = g.indicator(RectId::R1);
    let b = g.indicator(RectId::R2);
    let s = correlation_series(&op, &sd, &a, &b, 20);
    for n in 0..=20 {
        let o = common::correlation([1.0, 0.0, 0.0], [0.0, 1.0, 0.0], n);
        assert!((s.c[n] - o).abs() < 1e-8, "n={n}: {} vs {o}", s.c[n]);
        assert_eq!(correlation_operator(&op, &sd, &a, &b, n), s.c[n]);
    }
    let fit = fit_decay(&s).unwrap();
    let target = (5f64.sqrt() - 1.0) / (5f64.sqrt() + 1.0);
    assert!((fit.tau - target).abs() < 0.05, "{fit:?}");
    assert!(fit.alternating);
    // n = 0 is the covariance
    let cov = sd.mu_star.integrate(&a.zip(&b, |x, y| x * y)) - sd.mu_star.integrate(&a) * sd.mu_star.integrate(&b);
    assert!((s.c[0] - cov).abs() < 1e-15);
}

#[test]
fn correlations_are_bilinear_and_vanish_on_constants() {
    let (op, sd) = setup(24, &bump());
    let g = op.grid();
    let f = g.sample(|q| (5.0 * q.x + q.y).sin());
    let h = g.sample(|q| q.y * q.y + q.x);
    let k = g.sample(|q| (3.0 * q.y).cos());
    for n in [0, 1, 4, 9] {
        let v = correlation_operator(&op, &sd, &f, &g.constant(1.0), n);
        assert!(v.abs() < 1e-9, "{v:e}");
        let lhs = correlation_operator(&op, &sd, &f, &h.zip(&k, |a, b| 2.0 * a + 3.0 * b), n);
        let rhs = 2.0 * correlation_operator(&op, &sd, &f, &h, n) + 3.0 * correlation_operator(&op, &sd, &f, &k, n);
        assert!((lhs - rhs).abs() < 1e-12);
    }
}

#[test]
fn sigma_squared_examples() {
    let (op, sd) = setup(32, &Potential::zero());
    let g = op.grid();
    let ind = g.indicator(RectId::R1);
    let s = sigma_squared(&op, &sd, &ind, 1e-14).unwrap();
    let o = common::sigma2([1.0, 0.0, 0.0]);
    assert!((s.sigma2 - o).abs() < 1e-4);
    assert!((s.sigma2 - 0.3577708764).abs() < 1e-8, "{}", s.sigma2);
    assert!(!s.coboundary);
    let c = sigma_squared(&op, &sd, &g.constant(2.5), 1e-14).unwrap();
    assert!(c.coboundary && c.sigma2 < 1e-20);
    let d = sigma_squared(&op, &sd, &ind.scale(2.0), 1e-14).unwrap();
    assert!((d.sigma2 - 4.0 * s.sigma2).abs() < 1e-10);
}

#[test]
fn monte_carlo_agrees_with_operator() {
    let (op, sd) = setup(32, &bump());
    let chain = BackwardChain::new(&op, &sd);
    let eps = Params::default().eps;
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut agree = 0;
    let cases = 20;
    for case in 0..cases {
        let wave = |rng: &mut ChaCha8Rng| Wave {
            amp: 1.0,
            wx: rng.random_range(0.0..10.0),
            wy: rng.random_range(0.0..4.0),
            phase: rng.random_range(0.0..std::f64::consts::TAU),
            offset: [
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            ],
            eps,
        };
        let (a, b) = (wave(&mut rng), wave(&mut rng));
        let n = rng.random_range(0..6);
        let exact = correlation_operator(&op, &sd, &a.on_grid(op.grid()), &b.on_grid(op.grid()), n);
        let mc = correlation_mc(&chain, &a, &b, n, 10_000, 1000 + case).unwrap();
        assert_eq!(mc.escaped, 0);
        if (mc.estimate - exact).abs() <= 3.0 * mc.stderr {
            agree += 1;
        }
    }
    assert!(agree >= 18, "{agree}/{cases}");
    // constant observable
    let one = |_: &QPoint| 1.0;
    let ind = Indicator(RectId::R1);
    let mc = correlation_mc(&chain, &ind, &one, 3, 10_000, 1).unwrap();
    assert!(mc.estimate.abs() <= 3.0 * mc.stderr + 1e-15);
    // standard error scaling
    let w = Wave {
        amp: 1.0,
        wx: 3.0,
        wy: 1.0,
        phase: 0.3,
        offset: [0.0, 0.5, -0.5],
        eps,
    };
    let s1 = correlation_mc(&chain, &w, &ind, 2, 10_000, 7).unwrap().stderr;
    let s2 = correlation_mc(&chain, &w, &ind, 2, 40_000, 7).unwrap().stderr;
    assert!((s1 / s2 - 2.0).abs() < 0.2, "{}", s1 / s2);
}

#[test]
fn clt_small_run() {
    let (op, sd) = setup(16, &Potential::zero());
    let chain = BackwardChain::new(&op, &sd);
    let ind = Indicator(RectId::R1);
    let sig = sigma_squared(&op, &sd, &ind.on_grid(op.grid()), 1e-14).unwrap();
    let r = clt_sample(
        &chain,
        &ind,
        &sig,
        &CltOptions {
            n: 400,
            samples: 20_000,
            seed: 3,
            bins: 40,
        },
    )
    .unwrap();
    let var = r.sample_variance.unwrap();
    assert!((var / sig.sigma2 - 1.0).abs() < 0.05, "{var}");
    assert!(r.ks_statistic_corrected.unwrap() < r.ks_critical);
    let h = r.histogram.unwrap();
    assert_eq!(h.counts.len(), 40);
    // coboundary path
    let one = |_: &QPoint| 1.0;
    let sig0 = sigma_squared(&op, &sd, &op.grid().constant(1.0), 1e-14).unwrap();
    let r0 = clt_sample(
        &chain,
        &one,
        &sig0,
        &CltOptions {
            n: 10,
            samples: 1000,
            seed: 3,
            bins: 10,
        },
    )
    .unwrap();
    assert!(r0.coboundary_flag && r0.ks_statistic.is_none());
}

#[test]
fn decay_envelope_constant() {
    // |C_n(phi, psi)| <= K~ |phi|_1 (|psi|_1 + |psi|_{alpha,delta}) tau^n over a panel
    let (op, sd) = setup(24, &bump());
    let g = op.grid();
    let pairs = conegap_core::cone::PairSet::new(g, 0.5, 0.5, 10_000_000);
    let panel = test_panel(g);
    let l1 = |f: &GridFn| sd.mu_star.integrate(&f.map(f64::abs));
    let tau = 0.75;
    let mut ratios = Vec::new();
    for phi in &panel[..5] {
        for psi in &panel[5..10] {
            let s = correlation_series(&op, &sd, phi, psi, 20);
            let scale = l1(phi) * (l1(psi) + pairs.seminorm(psi));
            for n in 1..=20 {
                ratios.push(s.c[n].abs() / (scale * tau_pow(tau, n)));
            }
        }
    }
    let k = ratios.iter().copied().fold(0.0, f64::max);
    assert!(k.is_finite() && k < 10.0, "{k}");
}

fn tau_pow(t: f64, n: usize) -> f64 {
    t.powi(n as i32)
}

#[test]
fn gordin_profile_is_summable() {
    let (op, sd) = setup(24, &bump());
    let g = op.grid();
    let phi = g.sample(|q| (4.0 * q.x + 2.0 * q.y).sin());
    let prof = gordin_profile(&op, &sd, &phi, &test_panel(g), 30);
    let total: f64 = prof.iter().sum();
    assert!(total.is_finite());
    assert!(prof[30] < 1e-3 * prof[1]);
}

#[test]
fn horseshoe_reduction() {
    let (op, sd) = setup(24, &bump());
    let params = *op.params();
    let c = Obs3::constant(2.0);
    let f = Obs3::new(|x, y| (3.0 * x).cos() + y, |x, y| x - y * y);
    for n in 0..5 {
        let v = correlation_f(&op, &sd, &c, &f, n, TimeDirection::Inverse);
        assert!(v.abs() < 1e-9, "{v:e}");
    }
    let a = f.induced(&params).on_grid(op.grid());
    let psi = Obs3::new(|x, y| (x * y).sin(), |x, _| x);
    let b = psi.induced(&params).on_grid(op.grid());
    for n in 0..5 {
        let inv = correlation_f(&op, &sd, &f, &psi, n, TimeDirection::Inverse);
        assert!((inv - correlation_operator(&op, &sd, &a, &b, n)).abs() < 1e-14);
        let fwd = correlation_f(&op, &sd, &f, &psi, n, TimeDirection::Forward);
        assert!((fwd - correlation_operator(&op, &sd, &b, &a, n)).abs() < 1e-14);
    }
    assert!(matches!(
        Obs3::from_fn3(|p: &Point3| p.x + p.z),
        Err(StatsError::ZDependence { .. })
    ));
    let ok = Obs3::from_fn3(|p: &Point3| p.x * p.y).unwrap();
    assert_eq!(ok.eval3(&Point3::new(0.5, 0.5, 0.9)), Some(0.25));
    assert_eq!(ok.eval3(&Point3::new(0.5, 0.5, 0.5)), None);
    // the same decay rate for F and G on an induced indicator pair
    let (op0, sd0) = setup(24, &Potential::zero());
    let i1 = Obs3::new(|x, _| if x < 0.5 { 1.0 } else { 0.0 }, |_, _| 0.0);
    let i2 = Obs3::new(|x, _| if x > 0.5 { 1.0 } else { 0.0 }, |_, _| 0.0);
    let f_series = CorrelationSeries {
        n: (0..=20).collect(),
        c: (0..=20)
            .map(|n| correlation_f(&op0, &sd0, &i1, &i2, n, TimeDirection::Inverse))
            .collect(),
        estimator: Estimator::Operator,
        stderr: None,
    };
    let g_series = correlation_series(
        &op0,
        &sd0,
        &op0.grid().indicator(RectId::R1),
        &op0.grid().indicator(RectId::R2),
        20,
    );
    let tf = fit_decay(&f_series).unwrap().tau;
    let tg = fit_decay(&g_series).unwrap().tau;
    assert!((tf - tg).abs() < 1e-9);
    let s = sigma2_f(&op0, &sd0, &i1, 1e-14).unwrap();
    assert!((s.sigma2 - 0.3577708764).abs() < 1e-8);
}
