use std::f64::consts::PI;

use super::*;
use crate::frames::{make_frame, FrameSpec};
use crate::testfns::{cutoff_moments, make_cutoff};

fn within(est: Estimate, target: f64, k: f64) -> bool {
    (est.value - target).abs() <= k * est.stderr
}

#[test]
fn ball_volume_euclidean() {
    let (_, gauge) = make_frame(FrameSpec::Euclidean { n: 3 }).unwrap();
    let est = mc_gauge_annulus(&gauge, |_| 1.0, 0.0, 1.0, &McSettings::new(200_000, 1)).unwrap();
    assert!(within(est, 4.0 * PI / 3.0, 3.0), "{est:?}");
    assert_eq!(est.n_samples, 200_000);
}

#[test]
fn heisenberg_volume_ratio() {
    let (_, gauge) = make_frame(FrameSpec::Heisenberg { n: 1 }).unwrap();
    let mc = McSettings::new(200_000, 2);
    for integrand in [&(|_: &Point| 1.0) as &(dyn Fn(&Point) -> f64 + Sync), &|x: &Point| gauge.psi(x)] {
        let v1 = mc_gauge_annulus(&gauge, integrand, 0.0, 1.0, &mc).unwrap();
        let v2 = mc_gauge_annulus(&gauge, integrand, 0.0, 2.0, &McSettings { seed: 3, ..mc }).unwrap();
        let ratio = v2.value / v1.value;
        let se = ratio * ((v1.stderr / v1.value).powi(2) + (v2.stderr / v2.value).powi(2)).sqrt();
        assert!((ratio - 16.0).abs() <= 3.0 * se, "{ratio} ± {se}");
    }
}

#[test]
fn lambda_two_below_ball_volume() {
    let (_, gauge) = make_frame(FrameSpec::Heisenberg { n: 1 }).unwrap();
    let mc = McSettings::new(100_000, 4);
    let sc = sphere_constant(&gauge, 2.0, &mc).unwrap();
    let vol = mc_gauge_annulus(&gauge, |_| 1.0, 0.0, 1.0, &mc).unwrap();
    assert!(sc.lambda_p.value > 0.0 && sc.lambda_p.value < vol.value);
    assert_eq!(sc.q, 4.0);
}

#[test]
fn euclidean_sphere_constant_is_ball_volume() {
    let (_, gauge) = make_frame(FrameSpec::Euclidean { n: 3 }).unwrap();
    let sc = sphere_constant(&gauge, 3.0, &McSettings::new(100_000, 5)).unwrap();
    assert!(within(sc.lambda_p, 4.0 * PI / 3.0, 3.0));
    assert!((sc.surface(1.0) - 3.0 * sc.lambda_p.value).abs() < 1e-12);
}

#[test]
fn stratified_wide_annulus() {
    let (_, gauge) = make_frame(FrameSpec::Euclidean { n: 3 }).unwrap();
    let mc = McSettings::new(200_000, 6);
    let est = mc_gauge_annulus(&gauge, |x| x.norm().powi(-3), 0.01, 10.0, &mc).unwrap();
    assert!(within(est, 4.0 * PI * 1000f64.ln(), 3.0), "{est:?}");
    assert!(est.stderr / est.value < 0.01);
}

#[test]
fn deterministic_and_policy_independent() {
    let (_, gauge) = make_frame(FrameSpec::BaouendiGrushin { n: 2, k: 1, gamma: 1.0 }).unwrap();
    let mc = McSettings::new(50_000, 7);
    let f = |x: &Point| x[0] * x[0] + gauge.psi(x);
    let a = mc_gauge_annulus(&gauge, f, 0.2, 1.5, &mc.with_policy(ExecPolicy::Sequential)).unwrap();
    let b = mc_gauge_annulus(&gauge, f, 0.2, 1.5, &mc.with_policy(ExecPolicy::Parallel)).unwrap();
    let c = mc_gauge_annulus(&gauge, f, 0.2, 1.5, &mc).unwrap();
    assert_eq!(a, b);
    assert_eq!(b, c);
}

#[test]
fn stderr_scales_like_inverse_sqrt_n() {
    let (_, gauge) = make_frame(FrameSpec::Heisenberg { n: 1 }).unwrap();
    let small = mc_gauge_annulus(&gauge, |x| gauge.psi(x), 0.0, 1.0, &McSettings::new(40_000, 8)).unwrap();
    let large = mc_gauge_annulus(&gauge, |x| gauge.psi(x), 0.0, 1.0, &McSettings::new(160_000, 9)).unwrap();
    let ratio = small.stderr / large.stderr;
    assert!((1.8..2.2).contains(&ratio), "{ratio}");
}

#[test]
fn low_acceptance_is_reported() {
    let (_, gauge) = make_frame(FrameSpec::Euclidean { n: 24 }).unwrap();
    let err = mc_gauge_annulus(&gauge, |_| 1.0, 0.0, 1.0, &McSettings::new(10_000, 1)).unwrap_err();
    assert!(matches!(err, Error::LowAcceptance(_)));
}

#[test]
fn radial_integral_recovers_lambda() {
    let (_, gauge) = make_frame(FrameSpec::Heisenberg { n: 1 }).unwrap();
    let sc = sphere_constant(&gauge, 2.0, &McSettings::new(20_000, 10)).unwrap();
    let est = radial_integral(&sc, |_| 1.0, 0.0, 1.0, &[]).unwrap();
    assert!((est.value - sc.lambda_p.value).abs() < 1e-12 * sc.lambda_p.value);
    assert!((est.stderr - sc.lambda_p.stderr).abs() < 1e-12 * sc.lambda_p.stderr);
}

#[test]
fn plateau_term_matches_log() {
    let eps = 1e-3;
    let q = 4.0;
    let m = radial_moment(|r| r.powf(-q), q, 2.0 * eps, 0.5 / eps, &[], QuadOptions::default()).unwrap();
    assert!((m + (4.0 * eps * eps).ln()).abs() < 1e-10);
    let g = make_cutoff(eps).unwrap();
    let full = radial_moment(|r| r.powf(-q) * g.value(r).powi(2), q, eps, 1.0 / eps, &g.breakpoints(), QuadOptions::default())
        .unwrap();
    assert!((full - cutoff_moments(eps, 2.0).unwrap().0[0]).abs() < 1e-9);
}

#[test]
fn radial_reduction_matches_mc() {
    let specs = [
        FrameSpec::Euclidean { n: 4 },
        FrameSpec::Heisenberg { n: 1 },
        FrameSpec::HeisenbergGreiner { n: 1, gamma: 2.0 },
        FrameSpec::BaouendiGrushin { n: 2, k: 1, gamma: 1.0 },
    ];
    let mut rng = stream_rng(99, 0);
    for spec in specs {
        let (_, gauge) = make_frame(spec).unwrap();
        let p = 2.0;
        let sc = sphere_constant(&gauge, p, &McSettings::new(200_000, 11)).unwrap();
        for j in 0..5 {
            let c: [f64; 3] = [rng.random_range(0.5..1.5), rng.random_range(-1.0..1.0), rng.random_range(-0.3..0.3)];
            let f = move |r: f64| c[0] + c[1] * r + c[2] * r * r;
            let rad = radial_integral(&sc, f, 0.5, 1.5, &[]).unwrap();
            let mc = mc_gauge_annulus(
                &gauge,
                |x| f(gauge.value(x)) * gauge.horizontal_gradient_norm(x).powf(p),
                0.5,
                1.5,
                &McSettings::new(200_000, 12 + j),
            )
            .unwrap();
            let se = (rad.stderr.powi(2) + mc.stderr.powi(2)).sqrt();
            assert!((rad.value - mc.value).abs() <= 4.0 * se, "{spec} {j}: {rad:?} vs {mc:?}");
        }
    }
}
