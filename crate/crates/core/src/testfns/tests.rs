use super::*;
use crate::frames::{make_frame, FrameSpec};
use crate::testfns::{make_extremal, make_random_bump};

fn rel_err(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    (a - b).norm() / b.norm().max(1e-12)
}

fn random_point_at(gauge: &Gauge, rng: &mut ChaCha8Rng, r_lo: f64, r_hi: f64) -> Point {
    let half = gauge.bounding_box(r_hi);
    loop {
        let x = DVector::from_fn(half.len(), |i, _| half[i] * rng.random_range(-1.0..1.0));
        let d = gauge.value(&x);
        if d > r_lo && d < r_hi && !gauge.is_degenerate(&x, 1e-2) {
            return x;
        }
    }
}

#[test]
fn smooth_step_basics() {
    assert_eq!(smooth_step(0.0), [0.0, 0.0, 0.0]);
    assert_eq!(smooth_step(1.0), [1.0, 0.0, 0.0]);
    assert!((smooth_step(0.5)[0] - 0.5).abs() < 1e-15);
    for i in 1..200 {
        let t = i as f64 / 200.0;
        let direct = {
            let e = |s: f64| (-1.0 / s).exp();
            e(t) / (e(t) + e(1.0 - t))
        };
        let [s, d1, d2] = smooth_step(t);
        assert!((s - direct).abs() < 1e-14, "t={t}");
        let (fd1, fd2) = fd::derivative_1d(&|r| smooth_step(r)[0], t);
        assert!((d1 - fd1).abs() < 1e-6 * (1.0 + d1.abs()), "t={t}: {d1} vs {fd1}");
        assert!((d2 - fd2).abs() < 1e-4 * (1.0 + d2.abs()), "t={t}: {d2} vs {fd2}");
    }
}

#[test]
fn cutoff_plateau_structure() {
    let g = make_cutoff(0.1).unwrap();
    assert_eq!(g.value(0.05), 0.0);
    let mid = g.value(0.15);
    assert!(mid > 0.0 && mid < 1.0);
    assert!((mid - 0.5).abs() < 1e-14);
    assert_eq!(g.value(1.0), 1.0);
    assert_eq!(g.value(20.0), 0.0);
    assert!(make_cutoff(0.0).is_err());
    assert!(make_cutoff(0.5).is_err());
}

#[test]
fn cutoff_derivative_bounds_on_grid() {
    for eps in [0.25, 0.1, 1e-3] {
        let g = make_cutoff(eps).unwrap();
        let c = g.derivative_bound_constant();
        let n = 10_000;
        for i in 0..=n {
            let r = eps + eps * i as f64 / n as f64;
            let [v, d1, d2] = g.eval(r);
            assert!((0.0..=1.0).contains(&v));
            assert!(d1.abs() <= c / eps && d2.abs() <= c / (eps * eps), "inner r={r}");
            let r = 0.5 / eps + (0.5 / eps) * i as f64 / n as f64;
            let [v, d1, d2] = g.eval(r);
            assert!((0.0..=1.0).contains(&v));
            assert!(d1.abs() <= c * eps && d2.abs() <= c * eps * eps, "outer r={r}");
        }
    }
}

#[test]
fn cutoff_moments_sandwich_and_bounded() {
    let eps = 1e-3;
    let m = cutoff_moments(eps, 2.0).unwrap().0;
    let lo = -(4.0 * eps * eps).ln();
    assert!(m[0] >= lo && m[0] <= lo + 2.0 * 2f64.ln(), "{m:?}");
    assert!((12.43..13.82).contains(&m[0]));
    let ms: Vec<[f64; 6]> = [1e-2, 1e-3, 1e-4]
        .iter()
        .map(|&e| cutoff_moments(e, 2.0).unwrap().0)
        .collect();
    for k in 1..6 {
        for w in ms.windows(2) {
            let ratio = w[1][k] / w[0][k];
            assert!((0.2..=5.0).contains(&ratio), "moment {k}: {ratio}");
        }
    }
    assert!(cutoff_moments(0.25, 2.0).unwrap().0.iter().all(|v| v.is_finite()));
}

#[test]
fn extremal_plateau_and_gradient() {
    let (_, gauge) = make_frame(FrameSpec::Euclidean { n: 5 }).unwrap();
    let u = make_extremal(&gauge, -1.5, 1e-2).unwrap();
    let x = DVector::from_vec(vec![0.3, -0.2, 0.5, 0.1, 0.4]);
    let d = x.norm();
    assert!((u.value(&x) - d.powf(-1.5)).abs() < 1e-14);
    assert_eq!(u.support_annulus(), (1e-2, 1e2));

    let flat = make_extremal(&gauge, 0.0, 0.1).unwrap();
    assert_eq!(flat.value(&x), 1.0);
}

#[test]
fn extremal_gradients_match_fd_on_all_frames() {
    let specs = [
        FrameSpec::Euclidean { n: 5 },
        FrameSpec::Heisenberg { n: 1 },
        FrameSpec::HeisenbergGreiner { n: 1, gamma: 2.0 },
        FrameSpec::BaouendiGrushin { n: 2, k: 1, gamma: 1.0 },
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for spec in specs {
        let (frame, gauge) = make_frame(spec).unwrap();
        let u = make_extremal(&gauge, -0.7, 0.1).unwrap();
        for _ in 0..100 {
            let x = random_point_at(&gauge, &mut rng, 0.3, 1.5);
            let g = u.gradient(&x).unwrap();
            // One global FD step is coarse along z when t spans a wider range.
            let tol = if matches!(spec, FrameSpec::Euclidean { .. }) { 1e-7 } else { 1e-5 };
            assert!(rel_err(&u.fd_gradient(&x), &g) < tol, "{spec}");
            // Radial functions have ∇_L u parallel to ∇_L d.
            let v = frame.sigma(&x) * &g;
            let e = gauge.horizontal_gradient(&x);
            let cs = v.dot(&e).abs() - v.norm() * e.norm();
            assert!(cs.abs() <= 1e-10 * (1.0 + v.norm() * e.norm()));
        }
    }
}

#[test]
fn bump_is_deterministic_supported_and_smooth() {
    let specs = [
        FrameSpec::Euclidean { n: 4 },
        FrameSpec::Heisenberg { n: 2 },
        FrameSpec::HeisenbergGreiner { n: 1, gamma: 2.0 },
        FrameSpec::BaouendiGrushin { n: 2, k: 1, gamma: 1.0 },
    ];
    for spec in specs {
        let (_, gauge) = make_frame(spec).unwrap();
        let a = make_random_bump(&gauge, 11, (0.5, 2.0)).unwrap();
        let b = make_random_bump(&gauge, 11, (0.5, 2.0)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut max_abs = 0.0f64;
        for _ in 0..1000 {
            let x = random_point_at(&gauge, &mut rng, 0.5, 2.0);
            assert_eq!(a.value(&x), b.value(&x));
            max_abs = max_abs.max(a.value(&x).abs());
        }
        assert!(max_abs > 0.0, "{spec}");

        let x = random_point_at(&gauge, &mut rng, 0.9, 1.1);
        let small = gauge.frame().dilate(&x, 0.25 / gauge.value(&x));
        let big = gauge.frame().dilate(&x, 4.0 / gauge.value(&x));
        assert_eq!(a.value(&small), 0.0);
        assert_eq!(a.value(&big), 0.0);

        for _ in 0..50 {
            let x = random_point_at(&gauge, &mut rng, 0.6, 1.9);
            let (_, g, h) = a.jet(&x);
            assert!(rel_err(&a.fd_gradient(&x), &g) < 1e-6, "{spec}");
            let fh = a.fd_hessian(&x);
            assert!((&fh - &h).norm() <= 1e-5 * (1.0 + h.norm()), "{spec}");
        }
    }
}

#[test]
fn bump_rejects_bad_annulus() {
    let (_, gauge) = make_frame(FrameSpec::Euclidean { n: 3 }).unwrap();
    assert!(make_random_bump(&gauge, 0, (0.0, 1.0)).is_err());
    assert!(make_random_bump(&gauge, 0, (2.0, 1.0)).is_err());
}

#[test]
fn polynomial_profile_derivatives() {
    let p = PolynomialProfile { coeffs: vec![1.0, -2.0, 0.5, 0.25] };
    let r = 1.3;
    let [v, d1, d2] = p.eval(r);
    assert!((v - (1.0 - 2.0 * r + 0.5 * r * r + 0.25 * r * r * r)).abs() < 1e-14);
    assert!((d1 - (-2.0 + r + 0.75 * r * r)).abs() < 1e-14);
    assert!((d2 - (1.0 + 1.5 * r)).abs() < 1e-14);
}
