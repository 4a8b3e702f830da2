use conegap_core::domain::{domain_info, metric_d, Params, QPoint, RectId};
use conegap_core::dynamics::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn params() -> Params {
    Params::default()
}

fn rect_strategy() -> impl Strategy<Value = RectId> {
    prop_oneof![Just(RectId::R1), Just(RectId::R2), Just(RectId::R3)]
}

fn qpoint() -> impl Strategy<Value = QPoint> {
    (rect_strategy(), 0.0f64..=1.0, 0.0f64..=1.0).prop_map(|(r, u, v)| {
        let ([x0, x1], [y0, y1]) = params().bounds(r);
        QPoint {
            rect: r,
            x: x0 + u * (x1 - x0),
            y: y0 + v * (y1 - y0),
        }
    })
}

fn random_q(rng: &mut ChaCha8Rng) -> QPoint {
    let r = RectId::ALL[rng.random_range(0..3)];
    let ([x0, x1], [y0, y1]) = params().bounds(r);
    QPoint {
        rect: r,
        x: rng.random_range(x0..=x1),
        y: rng.random_range(y0..=y1),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn triangle_inequality(a in qpoint(), b in qpoint(), c in qpoint()) {
        prop_assert!(metric_d(&a, &c) <= metric_d(&a, &b) + metric_d(&b, &c) + 1e-12);
        prop_assert_eq!(metric_d(&a, &b), metric_d(&b, &a));
    }

    #[test]
    fn preimages_land_on_target(q in qpoint()) {
        let p = params();
        let pre = preimages_g(&p, &q);
        let expected = if q.rect == RectId::R3 { 1 } else { 2 };
        prop_assert_eq!(pre.len(), expected);
        for y in pre.iter() {
            prop_assert!(admissible(y.rect, q.rect));
            let img = apply_g(&p, y).next.unwrap();
            prop_assert_eq!(img.rect, q.rect);
            prop_assert!((img.x - q.x).abs() < 1e-10 && (img.y - q.y).abs() < 1e-10);
        }
        let n3 = preimages_g_n(&p, &q, 3).len();
        prop_assert!((3..=5).contains(&n3));
    }

    #[test]
    fn full_itineraries_are_admissible(q in qpoint(), n in 1usize..12) {
        let it = itinerary(&params(), &q, n);
        prop_assert!(it.word.is_admissible());
        prop_assert!(it.truncated || it.word.symbols.len() == n);
    }

    #[test]
    fn birkhoff_cocycle(y in 0.0f64..=1.0, m in 0usize..8, n in 0usize..8) {
        use conegap_core::potential::birkhoff_sum;
        use conegap_core::Potential;
        let p = params();
        // the segment x = 0 of R1 is forward invariant, so orbits never escape
        let q = QPoint::new(&p, RectId::R1, 0.0, y).unwrap();
        let phi = Potential::linear_uniform(0.3, -0.7, 0.1);
        let mut gm = q;
        for _ in 0..m {
            gm = apply_g(&p, &gm).next.unwrap();
        }
        let lhs = birkhoff_sum(&p, &phi, &q, m + n).unwrap();
        let rhs = birkhoff_sum(&p, &phi, &q, m).unwrap() + birkhoff_sum(&p, &phi, &gm, n).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-12);
    }
}

#[test]
fn close_pairs_share_a_rectangle_and_diameter_bounds() {
    let p = params();
    let info = domain_info(&p, 0.5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..1_000_000 {
        let a = random_q(&mut rng);
        let b = random_q(&mut rng);
        let d = metric_d(&a, &b);
        if d < info.delta {
            assert_eq!(a.rect, b.rect);
        }
        assert!(d <= info.diam_q + 1e-12);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    for _ in 0..100_000 {
        let (a, b, c) = (random_q(&mut rng), random_q(&mut rng), random_q(&mut rng));
        assert!(metric_d(&a, &c) <= metric_d(&a, &b) + metric_d(&b, &c) + 1e-12);
    }
}

fn random_point3(rng: &mut ChaCha8Rng) -> Point3 {
    let z = if rng.random_bool(0.5) {
        rng.random_range(0.0..=1.0 / 6.0)
    } else {
        rng.random_range(5.0 / 6.0..=1.0)
    };
    Point3::new(rng.random_range(0.0..=1.0), rng.random_range(0.0..=1.0), z)
}

#[test]
fn horseshoe_roundtrip() {
    let p = params();
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let mut mapped = 0;
    while mapped < 10_000 {
        let q = random_point3(&mut rng);
        if let FImage::Mapped(img) = apply_f(&p, &q) {
            mapped += 1;
            let back = apply_f_inverse(&p, &img).unwrap();
            assert!(back.dist(&q) < 1e-12, "{q:?} {back:?}");
            match apply_f(&p, &back) {
                FImage::Mapped(again) => assert!(again.dist(&img) < 1e-12),
                FImage::Escaped => panic!("escaped"),
            }
        }
    }
}

#[test]
fn projection_semiconjugacy() {
    let p = params();
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut checked = 0;
    let mut worst = 0.0f64;
    while checked < 10_000 {
        // points of F(R0) u F(R1) whose preimage projects into Q
        let q = random_point3(&mut rng);
        let FImage::Mapped(img) = apply_f(&p, &q) else { continue };
        let Ok(pim) = project_pi(&img) else { continue };
        if pim.locate(&p).is_none() {
            continue;
        }
        let left = project_pi(&apply_f_inverse(&p, &img).unwrap()).unwrap();
        let right = apply_g_plane(&p, &pim).unwrap();
        worst = worst.max(left.dist(&right));
        assert_eq!(left.plane, right.plane);
        checked += 1;
    }
    assert!(worst <= 1e-12, "{worst}");
}

#[test]
fn centre_map_roundtrip_grid() {
    for i in 0..=10_000 {
        let w = i as f64 / 10_000.0;
        assert!((f_center(g0(w).unwrap()).unwrap() - w).abs() < 1e-12);
    }
}
