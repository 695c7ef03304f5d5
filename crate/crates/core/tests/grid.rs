use std::f64::consts::PI;

use bihat_core::grid::{from_spectral, gradient, lp_norm, quad_integral, to_spectral};
use bihat_core::{Ball, Error, GridFunction, PeriodicGrid, Region};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn grid1(n: usize) -> PeriodicGrid {
    PeriodicGrid::standard(1, n).unwrap()
}

#[test]
fn spectrum_of_constant_is_zero_mode() {
    let g = grid1(64);
    let s = to_spectral(&GridFunction::constant(&g, 1.0));
    assert!((s.coefficient([0, 0]).re - 1.0).abs() < 1e-15);
    for (k, c) in s.coefficients().iter().enumerate().skip(1) {
        assert!(c.norm() < 1e-15, "mode {k}: {c}");
    }
}

#[test]
fn spectrum_of_cosine() {
    let g = grid1(64);
    let s = to_spectral(&GridFunction::from_fn(&g, |x| x[0].cos()));
    assert!((s.coefficient([1, 0]).re - 0.5).abs() < 1e-14);
    assert!((s.coefficient([-1, 0]).re - 0.5).abs() < 1e-14);
    assert!(s.coefficient([2, 0]).norm() < 1e-14);
}

#[test]
fn spectral_round_trip() {
    let g = PeriodicGrid::standard(2, 16).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let vals: Vec<f64> = (0..g.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let f = GridFunction::new(&g, vals).unwrap();
    let back: GridFunction = from_spectral(&to_spectral(&f));
    let err = back.sub(&f).sup_norm() / f.sup_norm();
    assert!(err < 1e-12, "{err}");
}

#[test]
fn quadrature_examples() {
    let g = grid1(256);
    let one = GridFunction::constant(&g, 1.0);
    assert!((quad_integral(&one, &Region::Torus).unwrap() - 2.0 * PI).abs() < 1e-12);

    let ball = Ball::new([0.0, 0.0], PI / 2.0).unwrap();
    let v = quad_integral(&one, &Region::Ball(ball)).unwrap();
    assert!((v - PI).abs() <= g.spacing(), "{v}");

    let sin = GridFunction::from_fn(&g, |x| x[0].sin());
    assert!(quad_integral(&sin, &Region::Torus).unwrap().abs() < 1e-12);
}

#[test]
fn quadrature_rejects_empty_ball() {
    let g = grid1(64);
    let one = GridFunction::constant(&g, 1.0);
    let tiny = Ball::new([0.05, 0.0], 0.2 * g.spacing()).unwrap();
    let err = quad_integral(&one, &Region::Ball(tiny)).unwrap_err();
    assert!(matches!(err, Error::DegenerateBall), "{err}");
    assert_eq!(err.to_string(), "degenerate ball");
}

#[test]
fn torus_distance_examples() {
    let g = grid1(64);
    let d = g.torus_dist(&[0.5, 0.0], &[6.0, 0.0]);
    assert!((d - (2.0 * PI - 5.5)).abs() < 1e-12);
    assert!((d - 0.7831853).abs() < 1e-7);
    assert_eq!(g.torus_dist(&[1.3, 0.0], &[1.3, 0.0]), 0.0);

    let g2 = PeriodicGrid::standard(2, 16).unwrap();
    let d2 = g2.torus_dist(&[0.0, 0.0], &[PI, PI]);
    assert!((d2 - PI * 2f64.sqrt()).abs() < 1e-12);
}

#[test]
fn torus_distance_is_a_metric() {
    let g = PeriodicGrid::standard(2, 16).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut pt = || [rng.gen_range(0.0..2.0 * PI), rng.gen_range(0.0..2.0 * PI)];
    for _ in 0..10_000 {
        let (x, y, z) = (pt(), pt(), pt());
        assert_eq!(g.torus_dist(&x, &y), g.torus_dist(&y, &x));
        assert!(g.torus_dist(&x, &z) <= g.torus_dist(&x, &y) + g.torus_dist(&y, &z) + 1e-12);
    }
}

#[test]
fn gradient_examples() {
    let g = grid1(64);
    let sin = GridFunction::from_fn(&g, |x| x[0].sin());
    let cos = GridFunction::from_fn(&g, |x| x[0].cos());
    assert!(gradient(&sin)[0].sub(&cos).sup_norm() < 1e-12);

    let c = GridFunction::constant(&g, 3.5);
    assert!(gradient(&c)[0].sup_norm() < 1e-12);

    let f = GridFunction::from_fn(&g, |x| (3.0 * x[0]).cos());
    let df = GridFunction::from_fn(&g, |x| -3.0 * (3.0 * x[0]).sin());
    assert!(gradient(&f)[0].sub(&df).sup_norm() < 1e-12);
}

#[test]
fn gradient_in_two_dimensions() {
    let g = PeriodicGrid::standard(2, 32).unwrap();
    let f = GridFunction::from_fn(&g, |x| (2.0 * x[0]).sin() * x[1].cos());
    let grad = gradient(&f);
    let fx = GridFunction::from_fn(&g, |x| 2.0 * (2.0 * x[0]).cos() * x[1].cos());
    let fy = GridFunction::from_fn(&g, |x| -(2.0 * x[0]).sin() * x[1].sin());
    assert!(grad[0].sub(&fx).sup_norm() < 1e-10);
    assert!(grad[1].sub(&fy).sup_norm() < 1e-10);
}

#[test]
fn lp_norm_of_constant() {
    let g = grid1(128);
    let one = GridFunction::constant(&g, 1.0);
    assert!((lp_norm(&one, 2.0, &Region::Torus) - (2.0 * PI).sqrt()).abs() < 1e-12);
    assert_eq!(lp_norm(&one.scale(-2.0), f64::INFINITY, &Region::Torus), 2.0);
}

/// Band-limited polynomial from (k, a_k, b_k) terms.
fn trig(g: &PeriodicGrid, terms: &[(i64, f64, f64)]) -> (GridFunction, GridFunction) {
    let f = GridFunction::from_fn(g, |x| terms.iter().map(|&(k, a, b)| a * (k as f64 * x[0]).cos() + b * (k as f64 * x[0]).sin()).sum());
    let df = GridFunction::from_fn(g, |x| {
        terms.iter().map(|&(k, a, b)| k as f64 * (-a * (k as f64 * x[0]).sin() + b * (k as f64 * x[0]).cos())).sum()
    });
    (f, df)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parseval(terms in prop::collection::vec((0i64..20, -1.0f64..1.0, -1.0f64..1.0), 1..6)) {
        let g = grid1(64);
        let (f, _) = trig(&g, &terms);
        let lhs = quad_integral(&f.mul(&f), &Region::Torus).unwrap();
        let rhs = g.volume() * to_spectral(&f).coefficients().iter().map(|c| c.norm_sqr()).sum::<f64>();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.max(1e-300));
    }

    #[test]
    fn gradient_matches_analytic_derivative(terms in prop::collection::vec((0i64..30, -1.0f64..1.0, -1.0f64..1.0), 1..6)) {
        let g = grid1(64);
        let (f, df) = trig(&g, &terms);
        prop_assert!(gradient(&f)[0].sub(&df).sup_norm() <= 1e-10 * (1.0 + df.sup_norm()));
    }
}
