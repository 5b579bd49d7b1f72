//! The pointwise L^p expansion of `(f - g)^2` and the power-sum bounds used
//! to control extremal sequences.
//!
//! For p ≥ 2 and reals f, g,
//!
//! ```text
//! w(p,f,g)^2 (f - g)^2 = |f|^p + (p-1)|g|^p - p |g|^(p-2) g f,
//! w(p,f,g)^2 = p (p-1) ∫_0^1 s |s g + (1-s) f|^(p-2) ds.
//! ```

use crate::error::{Error, Result};
use crate::quad1d::{integrate_with_breaks, QuadOptions};

fn check_exponent(p: f64) -> Result<()> {
    if !p.is_finite() {
        return Err(Error::NonFinite("p"));
    }
    if p < 2.0 {
        return Err(Error::ExponentTooSmall(p));
    }
    Ok(())
}

fn check_finite(v: f64, name: &'static str) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(name))
    }
}

/// The weight `w(p, f, g) ≥ 0`. Zero exactly when `f = g = 0`.
pub fn pointwise_weight_w(p: f64, f: f64, g: f64) -> Result<f64> {
    check_exponent(p)?;
    check_finite(f, "f")?;
    check_finite(g, "g")?;
    if f == 0.0 && g == 0.0 {
        return Ok(0.0);
    }
    if p == 2.0 {
        return Ok(1.0);
    }
    // Monomial integrands: ∫ s^(p-1) = 1/p and ∫ s (1-s)^(p-2) = 1/(p(p-1)).
    if f == 0.0 {
        return Ok(((p - 1.0) * g.abs().powf(p - 2.0)).sqrt());
    }
    if g == 0.0 {
        return Ok(f.abs().powf(p - 2.0).sqrt());
    }
    let q = p - 2.0;
    let integrand = |s: f64| s * (s * g + (1.0 - s) * f).abs().powf(q);
    let mut breaks = vec![0.0];
    if f.signum() != g.signum() {
        let root = f / (f - g);
        if root > 0.0 && root < 1.0 {
            breaks.push(root);
        }
    }
    breaks.push(1.0);
    let scale = f.abs().max(g.abs()).powf(q);
    let opts = QuadOptions {
        abs_tol: 1e-16 * scale,
        rel_tol: 1e-14,
        max_intervals: 4000,
    };
    let integral = integrate_with_breaks(integrand, &breaks, opts)?.value;
    Ok((p * (p - 1.0) * integral).max(0.0).sqrt())
}

/// Right-hand side `|f|^p + (p-1)|g|^p - p|g|^(p-2) g f` of the expansion.
pub fn identity_rhs(p: f64, f: f64, g: f64) -> f64 {
    let gp2 = if g == 0.0 { 0.0 } else { g.abs().powf(p - 2.0) };
    f.abs().powf(p) + (p - 1.0) * g.abs().powf(p) - p * gp2 * g * f
}

/// `|w^2 (f-g)^2 - rhs|`, the pointwise discrepancy of the expansion.
pub fn identity_residual(p: f64, f: f64, g: f64) -> Result<f64> {
    let w = pointwise_weight_w(p, f, g)?;
    let lhs = w * w * (f - g) * (f - g);
    Ok((lhs - identity_rhs(p, f, g)).abs())
}

/// `(|x+1|^p - |x|^p) / (|x|^(p-1) + 1)`, the ratio whose supremum is `c_p`.
pub fn cp_ratio(p: f64, x: f64) -> f64 {
    let ax = x.abs();
    if ax <= 1.0 {
        return ((x + 1.0).abs().powf(p) - ax.powf(p)) / (ax.powf(p - 1.0) + 1.0);
    }
    // |x+1|^p - |x|^p = |x|^p (|1 + 1/x|^p - 1), without the cancellation.
    let diff = (p * (1.0 / x).ln_1p()).exp_m1();
    diff * ax / (1.0 + ax.powf(1.0 - p))
}

const CP_GRID: usize = 20_001;

/// Numerical supremum of [`cp_ratio`] over the real line.
///
/// The axis is compactified with `x = tan(π t / 2)`, scanned on a uniform
/// grid in `t`, and the best grid cell is refined by golden-section search.
/// The limits `±p` at `x → ±∞` are included in the supremum.
pub fn cp_estimate(p: f64) -> Result<f64> {
    check_exponent(p)?;
    let to_x = |t: f64| (std::f64::consts::FRAC_PI_2 * t).tan();
    let h = 2.0 / (CP_GRID + 1) as f64;
    let mut best_i = 0;
    let mut best = f64::NEG_INFINITY;
    for i in 0..CP_GRID {
        let t = -1.0 + h * (i + 1) as f64;
        let v = cp_ratio(p, to_x(t));
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let t_best = -1.0 + h * (best_i + 1) as f64;
    let (mut lo, mut hi) = ((t_best - h).max(-1.0 + 1e-12), (t_best + h).min(1.0 - 1e-12));
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let mut fc = cp_ratio(p, to_x(c));
    let mut fd = cp_ratio(p, to_x(d));
    for _ in 0..200 {
        if (hi - lo) < 1e-15 {
            break;
        }
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = cp_ratio(p, to_x(c));
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = cp_ratio(p, to_x(d));
        }
    }
    Ok(best.max(fc).max(fd).max(p))
}

/// `|a+b|^p ≤ |a|^p + cp (|a|^(p-1)|b| + |b|^p)`.
pub fn pair_power_bound_check(p: f64, a: f64, b: f64, cp: f64) -> Result<bool> {
    check_exponent(p)?;
    let lhs = (a + b).abs().powf(p);
    let rhs = a.abs().powf(p) + cp * (a.abs().powf(p - 1.0) * b.abs() + b.abs().powf(p));
    Ok(lhs <= rhs * (1.0 + 8.0 * f64::EPSILON))
}

/// The three-term bound obtained by applying the pair bound twice.
pub fn triple_power_bound_check(p: f64, a: f64, b: f64, c: f64, cp: f64) -> Result<bool> {
    check_exponent(p)?;
    check_finite(a, "a")?;
    check_finite(b, "b")?;
    check_finite(c, "c")?;
    check_finite(cp, "cp")?;
    let (aa, ba, ca) = (a.abs(), b.abs(), c.abs());
    let lhs = (a + b + c).abs().powf(p);
    let rhs = aa.powf(p)
        + cp * aa.powf(p - 1.0) * ba
        + cp * aa.powf(p - 1.0) * ca
        + cp * ba.powf(p)
        + cp * cp * ba.powf(p - 1.0) * ca
        + cp * cp * ca.powf(p);
    Ok(lhs <= rhs * (1.0 + 8.0 * f64::EPSILON))
}
