//! Central finite differences, used as an independent oracle for analytic
//! derivatives and as the fallback path for user-supplied functions.

use nalgebra::{DMatrix, DVector};

fn scale(x: &DVector<f64>) -> f64 {
    1.0 + x.norm()
}

/// Gradient step `cbrt(ε)·(1 + |x|)`.
pub fn gradient_step(x: &DVector<f64>) -> f64 {
    f64::EPSILON.cbrt() * scale(x)
}

/// Hessian step `ε^(1/4)·(1 + |x|)`.
pub fn hessian_step(x: &DVector<f64>) -> f64 {
    f64::EPSILON.powf(0.25) * scale(x)
}

pub fn gradient_with_step<F: Fn(&DVector<f64>) -> f64>(f: &F, x: &DVector<f64>, h: f64) -> DVector<f64> {
    let n = x.len();
    let mut g = DVector::zeros(n);
    let mut xp = x.clone();
    for i in 0..n {
        let xi = x[i];
        xp[i] = xi + h;
        let fp = f(&xp);
        xp[i] = xi - h;
        let fm = f(&xp);
        xp[i] = xi;
        g[i] = (fp - fm) / (2.0 * h);
    }
    g
}

pub fn gradient<F: Fn(&DVector<f64>) -> f64>(f: &F, x: &DVector<f64>) -> DVector<f64> {
    gradient_with_step(f, x, gradient_step(x))
}

fn hessian_raw<F: Fn(&DVector<f64>) -> f64>(f: &F, x: &DVector<f64>, h: f64) -> DMatrix<f64> {
    let n = x.len();
    let f0 = f(x);
    let mut hm = DMatrix::zeros(n, n);
    let mut y = x.clone();
    for i in 0..n {
        y[i] = x[i] + h;
        let fp = f(&y);
        y[i] = x[i] - h;
        let fm = f(&y);
        y[i] = x[i];
        hm[(i, i)] = (fp - 2.0 * f0 + fm) / (h * h);
        for j in 0..i {
            let mut eval = |si: f64, sj: f64| {
                y[i] = x[i] + si * h;
                y[j] = x[j] + sj * h;
                let v = f(&y);
                y[i] = x[i];
                y[j] = x[j];
                v
            };
            let v = (eval(1.0, 1.0) - eval(1.0, -1.0) - eval(-1.0, 1.0) + eval(-1.0, -1.0)) / (4.0 * h * h);
            hm[(i, j)] = v;
            hm[(j, i)] = v;
        }
    }
    hm
}

/// Hessian by central differences with one Richardson extrapolation level.
pub fn hessian<F: Fn(&DVector<f64>) -> f64>(f: &F, x: &DVector<f64>) -> DMatrix<f64> {
    let h = hessian_step(x);
    let coarse = hessian_raw(f, x, h);
    let fine = hessian_raw(f, x, 0.5 * h);
    (fine * 4.0 - coarse) / 3.0
}

/// First and second derivative of a scalar function of one variable.
pub fn derivative_1d<F: Fn(f64) -> f64>(f: &F, r: f64) -> (f64, f64) {
    let h1 = f64::EPSILON.cbrt() * (1.0 + r.abs());
    let d1 = (f(r + h1) - f(r - h1)) / (2.0 * h1);
    let h2 = f64::EPSILON.powf(0.25) * (1.0 + r.abs());
    let second = |h: f64| (f(r + h) - 2.0 * f(r) + f(r - h)) / (h * h);
    let d2 = (4.0 * second(0.5 * h2) - second(h2)) / 3.0;
    (d1, d2)
}
