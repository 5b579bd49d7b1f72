//! Test functions: the smooth cut-off family `g_ε`, gauge-radial profiles,
//! the extremal sequences `u_ε = d^a g_ε(d)`, and random admissible bumps.

use std::fmt::Debug;
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fd;
use crate::frames::{Gauge, Point};
use crate::quad1d::{integrate_with_breaks, QuadOptions};

/// A function on `R^N` with optional analytic derivatives.
pub trait TestFunction: Send + Sync {
    fn dim(&self) -> usize;

    fn value(&self, x: &Point) -> f64;

    fn gradient(&self, _x: &Point) -> Option<DVector<f64>> {
        None
    }

    fn hessian(&self, _x: &Point) -> Option<DMatrix<f64>> {
        None
    }

    /// `Some((gauge, φ))` when the function is `φ∘d`.
    fn as_radial(&self) -> Option<(&Gauge, &dyn Profile)> {
        None
    }

    /// `(r_in, r_out)`: the function vanishes unless `r_in < d(x) < r_out`.
    fn support_annulus(&self) -> (f64, f64);

    fn fd_gradient(&self, x: &Point) -> DVector<f64> {
        fd::gradient(&|y: &Point| self.value(y), x)
    }

    fn fd_hessian(&self, x: &Point) -> DMatrix<f64> {
        fd::hessian(&|y: &Point| self.value(y), x)
    }

    /// Value, gradient and Hessian, analytic where available.
    fn jet(&self, x: &Point) -> (f64, DVector<f64>, DMatrix<f64>) {
        let g = self.gradient(x).unwrap_or_else(|| self.fd_gradient(x));
        let h = self.hessian(x).unwrap_or_else(|| self.fd_hessian(x));
        (self.value(x), g, h)
    }
}

/// A 1-D profile with two derivatives: `eval(r) = [φ(r), φ'(r), φ''(r)]`.
pub trait Profile: Send + Sync + Debug {
    fn eval(&self, r: f64) -> [f64; 3];

    /// Points where the profile changes regime; quadrature splits there.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }

    fn support(&self) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }
}

/// The C^∞ step `s(t) = e(t)/(e(t)+e(1-t))`, `e(t) = exp(-1/t)`, with two
/// derivatives. Written as a logistic of `1/(1-t) - 1/t` for stability.
pub fn smooth_step(t: f64) -> [f64; 3] {
    if t <= 0.0 {
        return [0.0, 0.0, 0.0];
    }
    if t >= 1.0 {
        return [1.0, 0.0, 0.0];
    }
    let h = 1.0 / (1.0 - t) - 1.0 / t;
    let e = (-h.abs()).exp();
    let sig = if h >= 0.0 { 1.0 / (1.0 + e) } else { e / (1.0 + e) };
    let dsig = e / ((1.0 + e) * (1.0 + e));
    if dsig == 0.0 {
        return [sig, 0.0, 0.0];
    }
    let ddsig = dsig * (1.0 - 2.0 * sig);
    let u = 1.0 - t;
    let dh = 1.0 / (u * u) + 1.0 / (t * t);
    let ddh = 2.0 / (u * u * u) - 2.0 / (t * t * t);
    [sig, dsig * dh, ddsig * dh * dh + dsig * ddh]
}

fn step_derivative_bounds() -> (f64, f64) {
    static BOUNDS: OnceLock<(f64, f64)> = OnceLock::new();
    *BOUNDS.get_or_init(|| {
        let n = 200_000;
        let (mut m1, mut m2) = (0.0f64, 0.0f64);
        for i in 1..n {
            let [_, d1, d2] = smooth_step(i as f64 / n as f64);
            m1 = m1.max(d1.abs());
            m2 = m2.max(d2.abs());
        }
        (m1, m2)
    })
}

/// `g_ε`: zero on `[0, ε] ∪ [1/ε, ∞)`, one on `[2ε, 1/(2ε)]`, rising as
/// `s(r/ε - 1)` and falling as `s(2 - 2εr)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CutoffFamily {
    eps: f64,
    c: f64,
}

/// Builds `g_ε` for `0 < ε < 1/2`.
pub fn make_cutoff(eps: f64) -> Result<CutoffFamily> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::InvalidParameter(format!("cut-off eps must lie in (0, 1/2), got {eps}")));
    }
    let (m1, m2) = step_derivative_bounds();
    // Inner transition: |g'| = |s'|/ε, |g''| = |s''|/ε². Outer: |g'| = 2ε|s'|, |g''| = 4ε²|s''|.
    let c = (2.0 * m1).max(4.0 * m2) * (1.0 + 1e-3);
    Ok(CutoffFamily { eps, c })
}

impl CutoffFamily {
    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Universal constant in the derivative bounds.
    pub fn derivative_bound_constant(&self) -> f64 {
        self.c
    }

    pub fn eval(&self, r: f64) -> [f64; 3] {
        let e = self.eps;
        if r <= e || r >= 1.0 / e {
            [0.0, 0.0, 0.0]
        } else if r < 2.0 * e {
            let [s, s1, s2] = smooth_step(r / e - 1.0);
            [s, s1 / e, s2 / (e * e)]
        } else if r <= 0.5 / e {
            [1.0, 0.0, 0.0]
        } else {
            let [s, s1, s2] = smooth_step(2.0 - 2.0 * e * r);
            [s, -2.0 * e * s1, 4.0 * e * e * s2]
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        self.eval(r)[0]
    }

    pub fn transitions(&self) -> [(f64, f64); 2] {
        let e = self.eps;
        [(e, 2.0 * e), (0.5 / e, 1.0 / e)]
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        let e = self.eps;
        vec![e, 1.5 * e, 2.0 * e, 0.5 / e, 0.75 / e, 1.0 / e]
    }
}

/// The six cut-off integrals, in order
/// `∫ g^p/r`, `∫ g^{p-1}|g'|`, `∫ r^{p-1}|g'|^p`, `∫ r g^{p-1}|g''|`,
/// `∫ r^p |g'|^{p-1}|g''|`, `∫ r^{2p-1}|g''|^p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CutoffMoments(pub [f64; 6]);

pub fn cutoff_moments(eps: f64, p: f64) -> Result<CutoffMoments> {
    if p < 2.0 {
        return Err(Error::ExponentTooSmall(p));
    }
    let g = make_cutoff(eps)?;
    let integrands: [&(dyn Fn(f64, [f64; 3]) -> f64 + Sync); 6] = [
        &|r, [v, _, _]| v.powf(p) / r,
        &|_, [v, d1, _]| v.powf(p - 1.0) * d1.abs(),
        &|r, [_, d1, _]| r.powf(p - 1.0) * d1.abs().powf(p),
        &|r, [v, _, d2]| r * v.powf(p - 1.0) * d2.abs(),
        &|r, [_, d1, d2]| r.powf(p) * d1.abs().powf(p - 1.0) * d2.abs(),
        &|r, [_, _, d2]| r.powf(2.0 * p - 1.0) * d2.abs().powf(p),
    ];
    let opts = QuadOptions::with_tolerances(1e-15, 1e-12);
    let mut out = [0.0; 6];
    for (k, f) in integrands.iter().enumerate() {
        let mut total = 0.0;
        for (a, b) in g.transitions() {
            let mid = 0.5 * (a + b);
            total += integrate_with_breaks(|r| f(r, g.eval(r)), &[a, mid, b], opts)?.value;
        }
        out[k] = total;
    }
    // Plateau: g = 1, g' = g'' = 0 on [2ε, 1/(2ε)].
    out[0] += -(4.0 * eps * eps).ln();
    Ok(CutoffMoments(out))
}

/// `r^a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerProfile {
    pub exponent: f64,
}

impl Profile for PowerProfile {
    fn eval(&self, r: f64) -> [f64; 3] {
        let a = self.exponent;
        [r.powf(a), a * r.powf(a - 1.0), a * (a - 1.0) * r.powf(a - 2.0)]
    }
}

/// `-ln r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogProfile;

impl Profile for LogProfile {
    fn eval(&self, r: f64) -> [f64; 3] {
        [-r.ln(), -1.0 / r, 1.0 / (r * r)]
    }
}

/// `Σ_k c_k r^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialProfile {
    pub coeffs: Vec<f64>,
}

impl Profile for PolynomialProfile {
    fn eval(&self, r: f64) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (k, c) in self.coeffs.iter().enumerate() {
            let kf = k as f64;
            out[0] += c * r.powi(k as i32);
            if k >= 1 {
                out[1] += c * kf * r.powi(k as i32 - 1);
            }
            if k >= 2 {
                out[2] += c * kf * (kf - 1.0) * r.powi(k as i32 - 2);
            }
        }
        out
    }
}

/// `r^a g_ε(r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtremalProfile {
    pub exponent: f64,
    pub cutoff: CutoffFamily,
}

impl Profile for ExtremalProfile {
    fn eval(&self, r: f64) -> [f64; 3] {
        let [g, g1, g2] = self.cutoff.eval(r);
        if g == 0.0 && g1 == 0.0 && g2 == 0.0 {
            return [0.0; 3];
        }
        let a = self.exponent;
        let p0 = r.powf(a);
        let p1 = a * r.powf(a - 1.0);
        let p2 = a * (a - 1.0) * r.powf(a - 2.0);
        [p0 * g, p1 * g + p0 * g1, p2 * g + 2.0 * p1 * g1 + p0 * g2]
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.cutoff.breakpoints()
    }

    fn support(&self) -> (f64, f64) {
        (self.cutoff.eps, 1.0 / self.cutoff.eps)
    }
}

/// `φ∘d` with the chain-rule derivatives `∇ = φ'∇d`, `H = φ''∇d∇dᵀ + φ' H_d`.
#[derive(Debug, Clone)]
pub struct RadialFunction<P: Profile> {
    gauge: Gauge,
    profile: P,
}

impl<P: Profile> RadialFunction<P> {
    pub fn new(gauge: Gauge, profile: P) -> Self {
        Self { gauge, profile }
    }

    pub fn profile(&self) -> &P {
        &self.profile
    }

    pub fn gauge(&self) -> &Gauge {
        &self.gauge
    }
}

impl<P: Profile> TestFunction for RadialFunction<P> {
    fn dim(&self) -> usize {
        self.gauge.frame().ambient_dim()
    }

    fn value(&self, x: &Point) -> f64 {
        self.profile.eval(self.gauge.value(x))[0]
    }

    fn gradient(&self, x: &Point) -> Option<DVector<f64>> {
        let [_, d1, _] = self.profile.eval(self.gauge.value(x));
        Some(self.gauge.euclid_gradient(x) * d1)
    }

    fn hessian(&self, x: &Point) -> Option<DMatrix<f64>> {
        let [_, d1, d2] = self.profile.eval(self.gauge.value(x));
        let g = self.gauge.euclid_gradient(x);
        Some(&g * g.transpose() * d2 + self.gauge.euclid_hessian(x) * d1)
    }

    fn as_radial(&self) -> Option<(&Gauge, &dyn Profile)> {
        Some((&self.gauge, &self.profile))
    }

    fn support_annulus(&self) -> (f64, f64) {
        self.profile.support()
    }

    fn jet(&self, x: &Point) -> (f64, DVector<f64>, DMatrix<f64>) {
        let [v, d1, d2] = self.profile.eval(self.gauge.value(x));
        let g = self.gauge.euclid_gradient(x);
        let h = &g * g.transpose() * d2 + self.gauge.euclid_hessian(x) * d1;
        (v, g * d1, h)
    }
}

/// `u_ε = d^a g_ε(d)`, supported in the gauge annulus `(ε, 1/ε)`.
pub fn make_extremal(gauge: &Gauge, exponent: f64, eps: f64) -> Result<RadialFunction<ExtremalProfile>> {
    let cutoff = make_cutoff(eps)?;
    Ok(RadialFunction::new(gauge.clone(), ExtremalProfile { exponent, cutoff }))
}

/// A random admissible function `W(d(x)) · P(x) · exp(-|x-μ|²/(2s²))` where
/// `W` is a smooth window supported in the gauge annulus and `P` a random
/// quadratic.
#[derive(Debug, Clone)]
pub struct RandomBump {
    gauge: Gauge,
    r_in: f64,
    r_out: f64,
    c0: f64,
    c1: DVector<f64>,
    c2: DMatrix<f64>,
    center: DVector<f64>,
    width: f64,
}

pub fn make_random_bump(gauge: &Gauge, seed: u64, annulus: (f64, f64)) -> Result<RandomBump> {
    let (r_in, r_out) = annulus;
    if !(r_in > 0.0 && r_out > r_in && r_out.is_finite()) {
        return Err(Error::InvalidParameter(format!("bad bump annulus ({r_in}, {r_out})")));
    }
    let n = gauge.frame().ambient_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c0 = rng.random_range(0.5..1.5);
    let c1 = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
    let mut c2 = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v: f64 = rng.random_range(-0.5..0.5);
            c2[(i, j)] = v;
            c2[(j, i)] = v;
        }
    }
    let half = gauge.bounding_box(r_out);
    let center = DVector::from_fn(n, |i, _| 0.5 * half[i] * rng.random_range(-1.0..1.0));
    let width = r_out * rng.random_range(0.5..1.5);
    Ok(RandomBump {
        gauge: gauge.clone(),
        r_in,
        r_out,
        c0,
        c1,
        c2,
        center,
        width,
    })
}

impl RandomBump {
    fn window(&self, r: f64) -> [f64; 3] {
        let w = (self.r_out - self.r_in) / 3.0;
        let [a, a1, a2] = smooth_step((r - self.r_in) / w);
        let [b, b1, b2] = smooth_step((self.r_out - r) / w);
        [
            a * b,
            (a1 * b - a * b1) / w,
            (a2 * b - 2.0 * a1 * b1 + a * b2) / (w * w),
        ]
    }

    fn full_jet(&self, x: &Point) -> (f64, DVector<f64>, DMatrix<f64>) {
        let n = x.len();
        let d = self.gauge.value(x);
        if d <= self.r_in || d >= self.r_out {
            return (0.0, DVector::zeros(n), DMatrix::zeros(n, n));
        }
        let [w0, w1, w2] = self.window(d);
        let gd = self.gauge.euclid_gradient(x);
        let hd = self.gauge.euclid_hessian(x);
        let a = w0;
        let ga = &gd * w1;
        let ha = &gd * gd.transpose() * w2 + hd * w1;

        let b = self.c0 + self.c1.dot(x) + x.dot(&(&self.c2 * x));
        let gb = &self.c1 + &self.c2 * x * 2.0;
        let hb = &self.c2 * 2.0;

        let diff = x - &self.center;
        let s2 = self.width * self.width;
        let c = (-diff.norm_squared() / (2.0 * s2)).exp();
        let gc = &diff * (-c / s2);
        let hc = (&diff * diff.transpose() / (s2 * s2) - DMatrix::identity(n, n) / s2) * c;

        let value = a * b * c;
        let grad = &ga * (b * c) + &gb * (a * c) + &gc * (a * b);
        let sym = |u: &DVector<f64>, v: &DVector<f64>| u * v.transpose() + v * u.transpose();
        let hess = ha * (b * c) + hb * (a * c) + hc * (a * b) + sym(&ga, &gb) * c + sym(&ga, &gc) * b + sym(&gb, &gc) * a;
        (value, grad, hess)
    }
}

impl TestFunction for RandomBump {
    fn dim(&self) -> usize {
        self.gauge.frame().ambient_dim()
    }

    fn value(&self, x: &Point) -> f64 {
        self.full_jet(x).0
    }

    fn gradient(&self, x: &Point) -> Option<DVector<f64>> {
        Some(self.full_jet(x).1)
    }

    fn hessian(&self, x: &Point) -> Option<DMatrix<f64>> {
        Some(self.full_jet(x).2)
    }

    fn support_annulus(&self) -> (f64, f64) {
        (self.r_in, self.r_out)
    }

    fn jet(&self, x: &Point) -> (f64, DVector<f64>, DMatrix<f64>) {
        self.full_jet(x)
    }
}

/// A closure-backed function with finite-difference derivatives only.
pub struct FnTestFunction<F> {
    dim: usize,
    f: F,
    support: (f64, f64),
}

impl<F: Fn(&Point) -> f64 + Send + Sync> FnTestFunction<F> {
    pub fn new(dim: usize, support: (f64, f64), f: F) -> Self {
        Self { dim, f, support }
    }
}

impl<F: Fn(&Point) -> f64 + Send + Sync> TestFunction for FnTestFunction<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &Point) -> f64 {
        (self.f)(x)
    }

    fn support_annulus(&self) -> (f64, f64) {
        self.support
    }
}

#[cfg(test)]
mod tests;
