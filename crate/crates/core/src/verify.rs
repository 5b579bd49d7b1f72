//! Inequality verdicts: Hardy chains, the auxiliary Hardy and Rellich
//! checks, sharpness sweeps along extremal sequences, Euler–Lagrange
//! residuals of the maximizers and harmonicity audits.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::constants::{
    auxiliary_hardy_constant, extremal_exponents, hardy_sharp_constant, rellich_admissible, rellich_sharp_constant,
    InequalityParams,
};
use crate::error::{Error, Result};
use crate::frames::{apply_l, apply_lp, horizontal_gradient, FrameSpec, Gauge, Point};
use crate::mc::{map_ordered, stream_rng, ExecPolicy};
use crate::quad1d::QuadOptions;
use crate::quadrature::{mc_annulus_channels, radial_moment, Estimate, McSettings};
use crate::testfns::{make_extremal, LogProfile, PowerProfile, Profile, RadialFunction, TestFunction};

/// Which inequality a check refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Inequality {
    Hardy,
    Rellich,
    Auxiliary,
}

impl fmt::Display for Inequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Inequality::Hardy => "hardy",
            Inequality::Rellich => "rellich",
            Inequality::Auxiliary => "auxiliary",
        })
    }
}

impl FromStr for Inequality {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hardy" => Ok(Inequality::Hardy),
            "rellich" => Ok(Inequality::Rellich),
            "auxiliary" => Ok(Inequality::Auxiliary),
            _ => Err(Error::InvalidParameter(format!("unknown inequality '{s}'"))),
        }
    }
}

/// Monte-Carlo budget and the number of standard errors a check may miss by.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadSettings {
    pub mc: McSettings,
    pub sigmas: f64,
}

impl Default for QuadSettings {
    fn default() -> Self {
        Self { mc: McSettings::new(200_000, 0), sigmas: 3.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Path {
    /// Ratio of 1-D integrals, in units of the surface constant.
    Radial,
    MonteCarlo,
}

/// `slack` is the smallest margin `upper - lower + kσ` over the checks made.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Verdict {
    pub pass: bool,
    pub slack: f64,
}

impl Verdict {
    fn from_margins(margins: &[f64]) -> Self {
        let slack = margins.iter().copied().fold(f64::INFINITY, f64::min);
        Self { pass: slack >= 0.0, slack }
    }
}

// `upper ≥ lower` within `k` standard errors of the difference, plus a
// relative floor for deterministic values.
fn margin(diff: Estimate, scale: f64, k: f64) -> f64 {
    diff.value + k * diff.stderr + 1e-10 * scale.abs()
}

/// `lhs ≤ mid ≤ rhs`, where `lhs` already carries the sharp constant, and
/// `quotient = rhs / (lhs / c)` compared against `c`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainReport {
    pub inequality: Inequality,
    pub path: Path,
    pub lhs: Estimate,
    pub mid: Option<Estimate>,
    pub rhs: Estimate,
    pub sharp_constant: f64,
    pub quotient: Estimate,
    pub verdict: Verdict,
}

fn check_params(gauge: &Gauge, params: &InequalityParams) -> Result<()> {
    let q = gauge.gauge_exponent();
    if (params.q - q).abs() > 1e-12 * q {
        return Err(Error::InvalidParameter(format!("params carry Q = {}, gauge has Q = {q}", params.q)));
    }
    Ok(())
}

fn support_of(u: &dyn TestFunction) -> Result<(f64, f64)> {
    let (r_in, r_out) = u.support_annulus();
    if !(r_in > 0.0 && r_out.is_finite() && r_out > r_in) {
        return Err(Error::InvalidParameter(format!(
            "test function must be supported in a bounded annulus away from the origin, got ({r_in}, {r_out})"
        )));
    }
    Ok((r_in, r_out))
}

fn radial_profile<'a>(gauge: &Gauge, u: &'a dyn TestFunction) -> Option<&'a dyn Profile> {
    match u.as_radial() {
        Some((g, profile)) if g == gauge => Some(profile),
        _ => None,
    }
}

/// `(∫ upper, ∫ lower)` of a gauge-radial function, both divided by the
/// common surface constant so only 1-D integrals remain.
pub fn radial_integrals(
    inequality: Inequality,
    params: &InequalityParams,
    profile: &dyn Profile,
    support: (f64, f64),
) -> Result<(f64, f64)> {
    let InequalityParams { p, theta, q } = *params;
    let breaks = profile.breakpoints();
    let opts = QuadOptions::with_tolerances(0.0, 1e-11);
    let (r_in, r_out) = support;
    let integral = |f: &dyn Fn(f64) -> f64| radial_moment(f, q, r_in, r_out, &breaks, opts);
    match inequality {
        Inequality::Hardy => {
            let upper = integral(&|r| {
                let [_, d1, _] = profile.eval(r);
                d1.abs().powf(p) * r.powf(-p * (theta - 1.0))
            })?;
            let lower = integral(&|r| profile.eval(r)[0].abs().powf(p) * r.powf(-p * theta))?;
            Ok((upper, lower))
        }
        Inequality::Auxiliary => {
            let upper = integral(&|r| {
                let [v, d1, _] = profile.eval(r);
                if v == 0.0 && p > 2.0 {
                    return 0.0;
                }
                v.abs().powf(p - 2.0) * d1 * d1 * r.powf(-(p * theta + 2.0 * p - 2.0))
            })?;
            let lower = integral(&|r| profile.eval(r)[0].abs().powf(p) * r.powf(-p * (theta + 2.0)))?;
            Ok((upper, lower))
        }
        Inequality::Rellich => {
            let upper = integral(&|r| {
                let [_, d1, d2] = profile.eval(r);
                (d2 + (q - 1.0) * d1 / r).abs().powf(p) * r.powf(-p * theta)
            })?;
            let lower = integral(&|r| profile.eval(r)[0].abs().powf(p) * r.powf(-p * (theta + 2.0)))?;
            Ok((upper, lower))
        }
    }
}

fn radial_report(
    inequality: Inequality,
    params: &InequalityParams,
    c: f64,
    profile: &dyn Profile,
    support: (f64, f64),
) -> Result<ChainReport> {
    let (upper, lower) = radial_integrals(inequality, params, profile, support)?;
    let lhs = Estimate::exact(c * lower);
    let rhs = Estimate::exact(upper);
    let quotient = Estimate::exact(upper / lower);
    let mid = (inequality == Inequality::Hardy).then_some(rhs);
    let verdict = Verdict::from_margins(&[
        margin(Estimate::exact(rhs.value - lhs.value), rhs.value, 0.0),
        margin(Estimate::exact(quotient.value - c), quotient.value, 0.0),
    ]);
    Ok(ChainReport { inequality, path: Path::Radial, lhs, mid, rhs, sharp_constant: c, quotient, verdict })
}

/// The three-term Hardy chain
/// `c ∫|u|^p |∇_L d|^p / d^{pθ} ≤ ∫|∇_L u·∇_L d|^p / (|∇_L d|^p d^{p(θ-1)}) ≤ ∫|∇_L u|^p / d^{p(θ-1)}`.
pub fn hardy_chain(
    gauge: &Gauge,
    params: &InequalityParams,
    u: &dyn TestFunction,
    quad: &QuadSettings,
) -> Result<ChainReport> {
    check_params(gauge, params)?;
    let support = support_of(u)?;
    let c = hardy_sharp_constant(params);
    if let Some(profile) = radial_profile(gauge, u) {
        return radial_report(Inequality::Hardy, params, c, profile, support);
    }
    let InequalityParams { p, theta, .. } = *params;
    let frame = gauge.frame();
    let est = mc_annulus_channels(
        gauge,
        |x| {
            if gauge.is_degenerate(x, 0.0) {
                return [0.0; 3];
            }
            let val = u.value(x);
            let grad = u.gradient(x).unwrap_or_else(|| u.fd_gradient(x));
            if val == 0.0 && grad.iter().all(|g| *g == 0.0) {
                return [0.0; 3];
            }
            let d = gauge.value(x);
            let v = frame.sigma(x) * grad;
            let e = gauge.horizontal_gradient(x);
            let en = e.norm();
            let lower = val.abs().powf(p) * d.powf(-p * theta) * en.powf(p);
            let mid = if en > 0.0 { (v.dot(&e) / en).abs().powf(p) * d.powf(-p * (theta - 1.0)) } else { 0.0 };
            let upper = v.norm().powf(p) * d.powf(-p * (theta - 1.0));
            [lower, mid, upper]
        },
        support.0,
        support.1,
        &quad.mc,
    )?;
    let k = quad.sigmas;
    let quotient = est.ratio(2, 0);
    let verdict = Verdict::from_margins(&[
        margin(est.difference(1, 0, c), est.totals[1], k),
        margin(est.difference(2, 1, 1.0), est.totals[2], k),
        margin(Estimate { value: quotient.value - c, ..quotient }, quotient.value, k),
    ]);
    Ok(ChainReport {
        inequality: Inequality::Hardy,
        path: Path::MonteCarlo,
        lhs: est.estimate(0).scaled(c),
        mid: Some(est.estimate(1)),
        rhs: est.estimate(2),
        sharp_constant: c,
        quotient,
        verdict,
    })
}

fn two_sided_mc<F>(
    inequality: Inequality,
    gauge: &Gauge,
    c: f64,
    support: (f64, f64),
    quad: &QuadSettings,
    f: F,
) -> Result<ChainReport>
where
    F: Fn(&Point) -> [f64; 2] + Sync + Send,
{
    let est = mc_annulus_channels(gauge, f, support.0, support.1, &quad.mc)?;
    let k = quad.sigmas;
    let quotient = est.ratio(1, 0);
    let verdict = Verdict::from_margins(&[
        margin(est.difference(1, 0, c), est.totals[1], k),
        margin(Estimate { value: quotient.value - c, ..quotient }, quotient.value, k),
    ]);
    Ok(ChainReport {
        inequality,
        path: Path::MonteCarlo,
        lhs: est.estimate(0).scaled(c),
        mid: None,
        rhs: est.estimate(1),
        sharp_constant: c,
        quotient,
        verdict,
    })
}

/// `∫|u|^{p-2}|∇_L u|² / d^{pθ+2p-2} ≥ c ∫|u|^p |∇_L d|² / d^{p(θ+2)}`.
pub fn auxiliary_hardy_check(
    gauge: &Gauge,
    params: &InequalityParams,
    u: &dyn TestFunction,
    quad: &QuadSettings,
) -> Result<ChainReport> {
    check_params(gauge, params)?;
    let support = support_of(u)?;
    let c = auxiliary_hardy_constant(params);
    if let Some(profile) = radial_profile(gauge, u) {
        return radial_report(Inequality::Auxiliary, params, c, profile, support);
    }
    let InequalityParams { p, theta, .. } = *params;
    let frame = gauge.frame();
    two_sided_mc(Inequality::Auxiliary, gauge, c, support, quad, |x| {
        if gauge.is_degenerate(x, 0.0) {
            return [0.0; 2];
        }
        let val = u.value(x);
        let grad = u.gradient(x).unwrap_or_else(|| u.fd_gradient(x));
        if val == 0.0 && (p > 2.0 || grad.iter().all(|g| *g == 0.0)) {
            return [0.0; 2];
        }
        let d = gauge.value(x);
        let v = frame.sigma(x) * grad;
        let e = gauge.horizontal_gradient(x);
        let lower = val.abs().powf(p) * d.powf(-p * (theta + 2.0)) * e.norm().powf(2.0);
        let upper = val.abs().powf(p - 2.0) * v.norm().powf(2.0) * d.powf(-(p * theta + 2.0 * p - 2.0));
        [lower, upper]
    })
}

fn rellich_gate(gauge: &Gauge, params: &InequalityParams) -> Result<f64> {
    check_params(gauge, params)?;
    let adm = rellich_admissible(params, &gauge.frame().spec());
    if !adm.admissible {
        return Err(Error::Inadmissible(adm.failed.join("; ")));
    }
    rellich_sharp_constant(params)
}

/// `c ∫|u|^p |∇_L d|² / d^{p(θ+2)} ≤ ∫|L u|^p / (d^{pθ} |∇_L d|^{2(p-1)})`.
/// Admissibility is checked before any integration.
pub fn rellich_check(
    gauge: &Gauge,
    params: &InequalityParams,
    u: &dyn TestFunction,
    quad: &QuadSettings,
) -> Result<ChainReport> {
    let c = rellich_gate(gauge, params)?;
    let support = support_of(u)?;
    if let Some(profile) = radial_profile(gauge, u) {
        return radial_report(Inequality::Rellich, params, c, profile, support);
    }
    let InequalityParams { p, theta, .. } = *params;
    let frame = gauge.frame();
    two_sided_mc(Inequality::Rellich, gauge, c, support, quad, |x| {
        if gauge.is_degenerate(x, 0.0) {
            return [0.0; 2];
        }
        let (val, grad, hess) = u.jet(x);
        if val == 0.0 && grad.iter().all(|g| *g == 0.0) && hess.iter().all(|h| *h == 0.0) {
            return [0.0; 2];
        }
        let Ok(lu) = apply_l(frame, u, x) else {
            return [0.0; 2];
        };
        let d = gauge.value(x);
        let psi = gauge.psi(x);
        if psi == 0.0 {
            return [0.0; 2];
        }
        let lower = val.abs().powf(p) * d.powf(-p * (theta + 2.0)) * psi;
        let upper = lu.abs().powf(p) * d.powf(-p * theta) * psi.powf(-(p - 1.0));
        [lower, upper]
    })
}

/// The fitted model `R(ε) ≈ (c L + a) / (L + b)` with `L = -ln(4ε²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitModel {
    pub c: f64,
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub inequality: Inequality,
    pub eps_grid: Vec<f64>,
    pub log_terms: Vec<f64>,
    pub quotients: Vec<Estimate>,
    pub fit_model: FitModel,
    pub fitted_constant: f64,
    pub sharp_constant: f64,
    pub relative_error: f64,
    /// Every quotient is at least the sharp constant.
    pub bounded_below: bool,
    /// Quotients decrease as ε decreases.
    pub monotone: bool,
}

impl SweepReport {
    /// Columns `eps,L,quotient,stderr`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("eps,L,quotient,stderr\n");
        for ((e, l), q) in self.eps_grid.iter().zip(&self.log_terms).zip(&self.quotients) {
            out.push_str(&format!("{e},{l},{},{}\n", q.value, q.stderr));
        }
        out
    }
}

/// Least-squares fit of `R L = c L + a - b R`.
pub fn fit_sweep(log_terms: &[f64], quotients: &[f64]) -> Result<FitModel> {
    let m = log_terms.len();
    if m < 4 {
        return Err(Error::FitTooFewPoints(m));
    }
    let a = DMatrix::from_fn(m, 3, |i, j| match j {
        0 => log_terms[i],
        1 => 1.0,
        _ => -quotients[i],
    });
    let rhs = DVector::from_fn(m, |i, _| quotients[i] * log_terms[i]);
    let svd = a.svd(true, true);
    let (smax, smin) = (svd.singular_values.max(), svd.singular_values.min());
    if !(smin > 1e-12 * smax) {
        return Err(Error::FitSingular);
    }
    let sol = svd.solve(&rhs, 0.0).map_err(|_| Error::FitSingular)?;
    Ok(FitModel { c: sol[0], a: sol[1], b: sol[2] })
}

fn sweep_constant_and_exponent(gauge: &Gauge, params: &InequalityParams, inequality: Inequality) -> Result<(f64, f64)> {
    let (he, re) = extremal_exponents(params);
    match inequality {
        Inequality::Hardy => {
            check_params(gauge, params)?;
            Ok((hardy_sharp_constant(params), he))
        }
        Inequality::Auxiliary => {
            check_params(gauge, params)?;
            Ok((auxiliary_hardy_constant(params), re))
        }
        Inequality::Rellich => Ok((rellich_gate(gauge, params)?, re)),
    }
}

/// Rayleigh quotients of the extremal sequence `d^a g_ε(d)` along `eps_grid`
/// and the fitted limit.
pub fn sharpness_sweep(
    gauge: &Gauge,
    params: &InequalityParams,
    inequality: Inequality,
    eps_grid: &[f64],
    policy: ExecPolicy,
) -> Result<SweepReport> {
    if eps_grid.len() < 4 {
        return Err(Error::FitTooFewPoints(eps_grid.len()));
    }
    if eps_grid.iter().any(|e| !(*e > 0.0 && *e < 0.5)) || eps_grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParameter("eps grid must be strictly decreasing in (0, 1/2)".into()));
    }
    let (c, a) = sweep_constant_and_exponent(gauge, params, inequality)?;
    let results = map_ordered(eps_grid, policy, |&eps| -> Result<f64> {
        let u = make_extremal(gauge, a, eps)?;
        let (upper, lower) = radial_integrals(inequality, params, u.profile(), u.support_annulus())?;
        Ok(upper / lower)
    });
    let quotients: Vec<f64> = results.into_iter().collect::<Result<_>>()?;
    let log_terms: Vec<f64> = eps_grid.iter().map(|e| -(4.0 * e * e).ln()).collect();
    let fit = fit_sweep(&log_terms, &quotients)?;
    let tol = 1e-9 * c.abs().max(1e-300);
    Ok(SweepReport {
        inequality,
        eps_grid: eps_grid.to_vec(),
        log_terms,
        quotients: quotients.iter().map(|q| Estimate::exact(*q)).collect(),
        fit_model: fit,
        fitted_constant: fit.c,
        sharp_constant: c,
        relative_error: if c != 0.0 { (fit.c - c).abs() / c.abs() } else { fit.c.abs() },
        bounded_below: quotients.iter().all(|q| *q >= c - tol),
        monotone: quotients.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9)),
    })
}

/// Residual of the maximizer's equation at `x`, for `u = d^a` with the
/// extremal exponent `a`. See [`euler_lagrange_residual_with_exponent`].
pub fn euler_lagrange_residual(gauge: &Gauge, params: &InequalityParams, inequality: Inequality, x: &Point) -> Result<f64> {
    let (he, re) = extremal_exponents(params);
    let a = if inequality == Inequality::Hardy { he } else { re };
    euler_lagrange_residual_with_exponent(gauge, params, inequality, a, x)
}

/// Evaluates the maximizer equation for `u = d^exponent` while keeping the
/// equation's coefficient at its sharp value:
///
/// * Hardy: `|∇_L u·∇_L d / (|∇_L d| d^{θ-1}) - α u |∇_L d| / d^θ|`, `α = (pθ-Q)/p`;
/// * Rellich: `|L u d^{-θ} |∇_L d|^{-2(p-1)/p} - α u d^{-θ-2} |∇_L d|^{2/p}|`,
///   `α = (p(θ+2)-Q)(pθ+Q(p-1))/p²`.
pub fn euler_lagrange_residual_with_exponent(
    gauge: &Gauge,
    params: &InequalityParams,
    inequality: Inequality,
    exponent: f64,
    x: &Point,
) -> Result<f64> {
    check_params(gauge, params)?;
    if gauge.is_degenerate(x, 0.0) {
        return Err(Error::DegeneratePoint);
    }
    let InequalityParams { p, theta, q } = *params;
    let frame = gauge.frame();
    let u = RadialFunction::new(gauge.clone(), PowerProfile { exponent });
    let d = gauge.value(x);
    let e = gauge.horizontal_gradient(x);
    let en = e.norm();
    if en == 0.0 {
        return Err(Error::DegeneratePoint);
    }
    let val = u.value(x);
    match inequality {
        Inequality::Hardy => {
            let alpha = (p * theta - q) / p;
            let v = horizontal_gradient(frame, &u, x)?;
            Ok((v.dot(&e) / (en * d.powf(theta - 1.0)) - alpha * val * en / d.powf(theta)).abs())
        }
        Inequality::Rellich => {
            let alpha = (p * (theta + 2.0) - q) * (p * theta + q * (p - 1.0)) / (p * p);
            let lu = apply_l(frame, &u, x)?;
            let lhs = lu * d.powf(-theta) * en.powf(-2.0 * (p - 1.0) / p);
            let rhs = alpha * val * d.powf(-theta - 2.0) * en.powf(2.0 / p);
            Ok((lhs - rhs).abs())
        }
        Inequality::Auxiliary => Err(Error::InvalidParameter(
            "the maximizer equation is stated for hardy and rellich only".into(),
        )),
    }
}

/// Uniform points of `{r_lo ≤ d ≤ r_hi}` outside the relative `tube` around
/// the degenerate set, from stream `0` of `seed`.
pub fn sample_points(gauge: &Gauge, n: usize, seed: u64, radii: (f64, f64), tube: f64) -> Vec<Point> {
    let (r_lo, r_hi) = radii;
    let half = gauge.bounding_box(r_hi);
    let mut rng = stream_rng(seed, 0);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let x = Point::from_fn(half.len(), |i, _| half[i] * (2.0 * rng.random::<f64>() - 1.0));
        let d = gauge.value(&x);
        if d >= r_lo && d <= r_hi && !gauge.is_degenerate(&x, tube) {
            out.push(x);
        }
    }
    out
}

pub const HARMONIC_TOL: f64 = 1e-5;
pub const GAUGE_IDENTITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarmonicityEntry {
    pub p: f64,
    /// Exponent of `Γ_p = d^{(p-Q)/(p-1)}`; `None` when `Γ_p = -ln d`.
    pub gamma_exponent: Option<f64>,
    /// `max |L_p Γ_p|`.
    pub max_gamma_residual: f64,
    /// `max |L_p d - (Q-1)|∇_L d|^p/d| / (1 + |L_p d|)`.
    pub max_gauge_identity_residual: f64,
    /// `(1-β)(p-1)` for `β = (p-Q)/(p-1)`; should equal `Q-1`.
    pub lemma_coefficient: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarmonicityReport {
    pub frame: FrameSpec,
    pub n_points: usize,
    pub entries: Vec<HarmonicityEntry>,
    pub pass: bool,
}

/// Checks `L_p Γ_p = 0` and the gauge identity at random points of the
/// annulus `{1/2 ≤ d ≤ 2}` through the general (non-radial) operator path.
pub fn harmonicity_audit(
    gauge: &Gauge,
    p_list: &[f64],
    n_points: usize,
    seed: u64,
    policy: ExecPolicy,
) -> Result<HarmonicityReport> {
    let frame = gauge.frame();
    let q = gauge.gauge_exponent();
    let points = sample_points(gauge, n_points, seed, (0.5, 2.0), 1e-3);
    let mut entries = Vec::new();
    for &p in p_list {
        if p < 2.0 {
            return Err(Error::ExponentTooSmall(p));
        }
        let beta = (p - q) / (p - 1.0);
        let is_log = (p - q).abs() < 1e-12;
        let power = RadialFunction::new(gauge.clone(), PowerProfile { exponent: beta });
        let log = RadialFunction::new(gauge.clone(), LogProfile);
        let gamma: &dyn TestFunction = if is_log { &log } else { &power };
        let dist = RadialFunction::new(gauge.clone(), PowerProfile { exponent: 1.0 });
        let per_point = map_ordered(&points, policy, |x| -> Result<(f64, f64)> {
            let g = apply_lp(frame, p, gamma, x)?.abs();
            let lpd = apply_lp(frame, p, &dist, x)?;
            let expected = (q - 1.0) * gauge.horizontal_gradient_norm(x).powf(p) / gauge.value(x);
            Ok((g, (lpd - expected).abs() / (1.0 + lpd.abs())))
        });
        let (mut mg, mut mi) = (0.0f64, 0.0f64);
        for r in per_point {
            let (g, i) = r?;
            mg = mg.max(g);
            mi = mi.max(i);
        }
        let lemma_coefficient = (1.0 - beta) * (p - 1.0);
        let pass = mg <= HARMONIC_TOL
            && mi <= GAUGE_IDENTITY_TOL
            && (lemma_coefficient - (q - 1.0)).abs() <= 1e-12 * q;
        entries.push(HarmonicityEntry {
            p,
            gamma_exponent: (!is_log).then_some(beta),
            max_gamma_residual: mg,
            max_gauge_identity_residual: mi,
            lemma_coefficient,
            pass,
        });
    }
    let pass = entries.iter().all(|e| e.pass);
    Ok(HarmonicityReport { frame: frame.spec(), n_points, entries, pass })
}

#[cfg(test)]
mod tests;
