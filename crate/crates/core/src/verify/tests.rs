use super::*;
use crate::frames::make_frame;
use crate::testfns::{make_random_bump, FnTestFunction};

fn setup(spec: FrameSpec, p: f64, theta: f64) -> (Gauge, InequalityParams) {
    let (_, gauge) = make_frame(spec).unwrap();
    let params = InequalityParams::new(p, theta, gauge.gauge_exponent()).unwrap();
    (gauge, params)
}

fn quad(samples: usize, seed: u64) -> QuadSettings {
    QuadSettings { mc: McSettings::new(samples, seed), sigmas: 3.0 }
}

#[test]
fn hardy_chain_random_bump_euclidean() {
    let (gauge, params) = setup(FrameSpec::Euclidean { n: 5 }, 2.0, 1.0);
    let u = make_random_bump(&gauge, 1, (0.5, 2.0)).unwrap();
    let r = hardy_chain(&gauge, &params, &u, &quad(100_000, 2)).unwrap();
    assert_eq!(r.sharp_constant, 2.25);
    assert_eq!(r.path, Path::MonteCarlo);
    assert!(r.verdict.pass, "{r:?}");
    let mid = r.mid.unwrap();
    assert!(r.lhs.value <= mid.value && mid.value <= r.rhs.value);
}

#[test]
fn radial_chain_has_equal_mid_and_rhs() {
    let (gauge, params) = setup(FrameSpec::Heisenberg { n: 1 }, 2.0, 1.0);
    let u = make_extremal(&gauge, -1.0, 1e-3).unwrap();
    let r = hardy_chain(&gauge, &params, &u, &QuadSettings::default()).unwrap();
    assert_eq!(r.path, Path::Radial);
    assert_eq!(r.mid, Some(r.rhs));
    assert!(r.verdict.pass);
}

#[test]
fn extremal_quotient_close_above_constant() {
    let (gauge, params) = setup(FrameSpec::Euclidean { n: 5 }, 2.0, 1.0);
    let (a, _) = extremal_exponents(&params);
    let u = make_extremal(&gauge, a, 1e-3).unwrap();
    let r = hardy_chain(&gauge, &params, &u, &QuadSettings::default()).unwrap();
    let q = r.quotient.value;
    // Independent scipy quadrature of the same 1-D ratio gives 2.62819072556.
    assert!((q - 2.628_190_725_56).abs() < 1e-9, "{q}");
    assert!(q >= 2.25 && q <= 2.25 * 1.2, "{q}");
}

#[test]
fn auxiliary_is_hardy_with_shifted_weight_at_p2() {
    let (gauge, params) = setup(FrameSpec::Euclidean { n: 5 }, 2.0, 0.0);
    let shifted = InequalityParams { theta: params.theta + 2.0, ..params };
    let u = make_random_bump(&gauge, 5, (0.5, 2.0)).unwrap();
    let q = quad(50_000, 3);
    let aux = auxiliary_hardy_check(&gauge, &params, &u, &q).unwrap();
    let hardy = hardy_chain(&gauge, &shifted, &u, &q).unwrap();
    assert_eq!(aux.sharp_constant, 0.25);
    assert_eq!(aux.sharp_constant, hardy.sharp_constant);
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs());
    assert!(close(aux.lhs.value, hardy.lhs.value));
    assert!(close(aux.rhs.value, hardy.rhs.value));
    assert!(close(aux.quotient.value, hardy.quotient.value));
    assert!(aux.verdict.pass);

    let ext = make_extremal(&gauge, -0.5, 1e-2).unwrap();
    let aux = auxiliary_hardy_check(&gauge, &params, &ext, &q).unwrap();
    let hardy = hardy_chain(&gauge, &shifted, &ext, &q).unwrap();
    assert!(close(aux.quotient.value, hardy.quotient.value));
}

#[test]
fn rellich_random_bump_euclidean() {
    let (gauge, params) = setup(FrameSpec::Euclidean { n: 5 }, 2.0, 0.0);
    let u = make_random_bump(&gauge, 7, (0.5, 2.0)).unwrap();
    let r = rellich_check(&gauge, &params, &u, &quad(100_000, 4)).unwrap();
    assert_eq!(r.sharp_constant, 1.5625);
    assert!(r.verdict.pass, "{r:?}");
}

#[test]
fn rellich_rejects_before_integrating() {
    let (gauge, params) = setup(FrameSpec::Heisenberg { n: 1 }, 2.0, 0.0);
    // An unbounded support would fail later; admissibility must come first.
    let u = FnTestFunction::new(3, (0.0, f64::INFINITY), |_: &Point| 1.0);
    match rellich_check(&gauge, &params, &u, &QuadSettings::default()) {
        Err(Error::Inadmissible(reason)) => assert!(reason.contains("Q > 2p")),
        other => panic!("{other:?}"),
    }
}

#[test]
fn unsupported_functions_are_rejected() {
    let (gauge, params) = setup(FrameSpec::Euclidean { n: 3 }, 2.0, 0.0);
    let u = FnTestFunction::new(3, (0.0, 1.0), |_: &Point| 1.0);
    assert!(matches!(hardy_chain(&gauge, &params, &u, &QuadSettings::default()), Err(Error::InvalidParameter(_))));
    let wrong_q = InequalityParams::new(2.0, 0.0, 4.0).unwrap();
    let v = make_random_bump(&gauge, 0, (0.5, 1.0)).unwrap();
    assert!(hardy_chain(&gauge, &wrong_q, &v, &QuadSettings::default()).is_err());
}

const GRID: [f64; 6] = [1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 1e-4];

#[test]
fn sweep_euclidean_hardy() {
    let (gauge, params) = setup(FrameSpec::Euclidean { n: 5 }, 2.0, 1.0);
    let s = sharpness_sweep(&gauge, &params, Inequality::Hardy, &GRID, ExecPolicy::Parallel).unwrap();
    assert!(s.relative_error < 0.01, "{s:?}");
    assert!(s.bounded_below && s.monotone, "{s:?}");
    let csv = s.to_csv();
    assert!(csv.starts_with("eps,L,quotient,stderr\n"));
    assert_eq!(csv.lines().count(), 7);
}

#[test]
fn sweep_heisenberg_hardy_p3() {
    let (gauge, params) = setup(FrameSpec::Heisenberg { n: 1 }, 3.0, 1.0);
    let s = sharpness_sweep(&gauge, &params, Inequality::Hardy, &GRID, ExecPolicy::Sequential).unwrap();
    assert!((s.sharp_constant - 1.0 / 27.0).abs() < 1e-15);
    assert!(s.relative_error < 0.02, "{s:?}");
}

#[test]
fn sweep_heisenberg_rellich() {
    let (gauge, params) = setup(FrameSpec::Heisenberg { n: 2 }, 2.0, 0.0);
    let s = sharpness_sweep(&gauge, &params, Inequality::Rellich, &GRID, ExecPolicy::Parallel).unwrap();
    assert_eq!(s.sharp_constant, 9.0);
    assert!(s.relative_error < 0.02, "{s:?}");
    assert!(s.bounded_below);
}

#[test]
fn sweep_validation() {
    let (gauge, params) = setup(FrameSpec::Euclidean { n: 5 }, 2.0, 1.0);
    assert!(matches!(
        sharpness_sweep(&gauge, &params, Inequality::Hardy, &GRID[..3], ExecPolicy::Sequential),
        Err(Error::FitTooFewPoints(3))
    ));
    let rising = [1e-4, 1e-3, 1e-2, 1e-1];
    assert!(sharpness_sweep(&gauge, &params, Inequality::Hardy, &rising, ExecPolicy::Sequential).is_err());
}

#[test]
fn fit_recovers_exact_model() {
    let ls: Vec<f64> = GRID.iter().map(|e| -(4.0 * e * e).ln()).collect();
    let rs: Vec<f64> = ls.iter().map(|l| (1.7 * l + 0.4) / (l - 0.9)).collect();
    let m = fit_sweep(&ls, &rs).unwrap();
    assert!((m.c - 1.7).abs() < 1e-9 && (m.a - 0.4).abs() < 1e-8 && (m.b + 0.9).abs() < 1e-8, "{m:?}");
}

#[test]
fn euler_lagrange_examples() {
    let (gauge, params) = setup(FrameSpec::Euclidean { n: 5 }, 2.0, 1.0);
    let pts = sample_points(&gauge, 50, 1, (0.5, 2.0), 1e-3);
    for x in &pts {
        assert!(euler_lagrange_residual(&gauge, &params, Inequality::Hardy, x).unwrap() < 1e-10);
    }
    let (gauge, params) = setup(FrameSpec::Heisenberg { n: 1 }, 2.0, 1.0);
    let (a, _) = extremal_exponents(&params);
    for x in sample_points(&gauge, 50, 2, (0.5, 2.0), 1e-3) {
        assert!(euler_lagrange_residual(&gauge, &params, Inequality::Hardy, &x).unwrap() < 1e-8);
        let x1 = gauge.frame().dilate(&x, 1.0 / gauge.value(&x));
        if gauge.horizontal_gradient_norm(&x1) >= 0.1 {
            let r = euler_lagrange_residual_with_exponent(&gauge, &params, Inequality::Hardy, a + 0.1, &x1).unwrap();
            assert!(r > 1e-3, "{r}");
        }
    }
    let (gauge, params) = setup(FrameSpec::Euclidean { n: 5 }, 2.0, 0.0);
    for x in &sample_points(&gauge, 20, 3, (0.5, 2.0), 1e-3) {
        assert!(euler_lagrange_residual(&gauge, &params, Inequality::Rellich, x).unwrap() < 1e-8);
    }
    let axis = Point::from_vec(vec![0.0, 0.0, 1.0]);
    let (gauge, params) = setup(FrameSpec::Heisenberg { n: 1 }, 2.0, 1.0);
    assert_eq!(euler_lagrange_residual(&gauge, &params, Inequality::Hardy, &axis), Err(Error::DegeneratePoint));
}

#[test]
fn harmonicity_examples() {
    let (gauge, _) = setup(FrameSpec::Euclidean { n: 4 }, 2.0, 0.0);
    let r = harmonicity_audit(&gauge, &[2.0, 3.0, 4.0], 100, 1, ExecPolicy::Parallel).unwrap();
    assert!(r.pass, "{r:?}");
    assert!(r.entries[0].max_gamma_residual <= 1e-6);
    // p = Q uses -ln d.
    assert_eq!(r.entries[2].gamma_exponent, None);

    let (gauge, _) = setup(FrameSpec::Heisenberg { n: 1 }, 2.0, 0.0);
    let r = harmonicity_audit(&gauge, &[2.0, 3.0, 4.0], 100, 2, ExecPolicy::Sequential).unwrap();
    assert!(r.pass, "{r:?}");

    let (gauge, _) = setup(FrameSpec::BaouendiGrushin { n: 1, k: 1, gamma: 1.0 }, 2.0, 0.0);
    let r = harmonicity_audit(&gauge, &[2.0], 100, 3, ExecPolicy::Sequential).unwrap();
    assert!(r.pass, "{r:?}");
}
