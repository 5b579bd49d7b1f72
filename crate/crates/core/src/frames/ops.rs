use nalgebra::{DMatrix, DVector};

use super::{Frame, FrameSpec, Gauge, Point};
use crate::error::{Error, Result};
use crate::testfns::{Profile, TestFunction};

// The FD stencil must not straddle a singular locus of σ.
fn fd_guard(frame: &Frame, x: &Point) -> Result<()> {
    let scale = x.norm().max(f64::MIN_POSITIVE);
    if frame.is_singular(x, scale, 1e-3) {
        return Err(Error::DegeneratePoint);
    }
    Ok(())
}

/// `∇_L u(x) = σ(x) ∇u(x)`.
pub fn horizontal_gradient(frame: &Frame, u: &dyn TestFunction, x: &Point) -> Result<DVector<f64>> {
    let grad = match u.gradient(x) {
        Some(g) => g,
        None => {
            fd_guard(frame, x)?;
            u.fd_gradient(x)
        }
    };
    Ok(frame.sigma(x) * grad)
}

fn derivatives(frame: &Frame, u: &dyn TestFunction, x: &Point) -> Result<(DVector<f64>, DMatrix<f64>)> {
    match (u.gradient(x), u.hessian(x)) {
        (Some(g), Some(h)) => Ok((g, h)),
        (g, _) => {
            fd_guard(frame, x)?;
            let g = g.unwrap_or_else(|| u.fd_gradient(x));
            Ok((g, u.fd_hessian(x)))
        }
    }
}

fn l_from(frame: &Frame, x: &Point, grad: &DVector<f64>, hess: &DMatrix<f64>) -> f64 {
    let div = frame.sigma_divergence(x);
    let a = frame.a_matrix(x);
    div.dot(grad) + a.component_mul(hess).sum()
}

/// `L u = Σ_j (Σ_i ∂_i A_ij) ∂_j u + Σ_ij A_ij ∂²_ij u`.
pub fn apply_l(frame: &Frame, u: &dyn TestFunction, x: &Point) -> Result<f64> {
    let (g, h) = derivatives(frame, u, x)?;
    Ok(l_from(frame, x, &g, &h))
}

/// `Δ_z u + 4|z|² ∂²_t u + 4 ∂_t(T u)` with `T = Σ_j (y_j ∂_{x_j} - x_j ∂_{y_j})`,
/// the Heisenberg sub-Laplacian written in coordinates.
pub fn heisenberg_decomposition_l(frame: &Frame, u: &dyn TestFunction, x: &Point) -> Result<f64> {
    let FrameSpec::Heisenberg { n } = frame.spec() else {
        return Err(Error::InvalidFrame("decomposition path needs a Heisenberg frame".into()));
    };
    let (_, h) = derivatives(frame, u, x)?;
    let t = 2 * n;
    let mut lap_z = 0.0;
    let mut z2 = 0.0;
    let mut dt_tu = 0.0;
    for j in 0..n {
        lap_z += h[(j, j)] + h[(n + j, n + j)];
        z2 += x[j] * x[j] + x[n + j] * x[n + j];
        dt_tu += x[n + j] * h[(j, t)] - x[j] * h[(n + j, t)];
    }
    Ok(lap_z + 4.0 * z2 * h[(t, t)] + 4.0 * dt_tu)
}

/// `L_p u = |∇_L u|^{p-2} L u + (p-2)|∇_L u|^{p-4} (∇_L u)ᵀ H_L (∇_L u)`, where
/// `H_L[i][l] = X_l X_i u` uses the analytic derivatives of σ.
pub fn apply_lp(frame: &Frame, p: f64, u: &dyn TestFunction, x: &Point) -> Result<f64> {
    if p < 2.0 {
        return Err(Error::ExponentTooSmall(p));
    }
    let (g, h) = derivatives(frame, u, x)?;
    let s = frame.sigma(x);
    let ds = frame.sigma_derivatives(x);
    let v = &s * &g;
    let div = frame.divergence_from(&s, &ds);
    let a = s.transpose() * &s;
    let lu = div.dot(&g) + a.component_mul(&h).sum();
    if p == 2.0 {
        return Ok(lu);
    }
    let vn = v.norm();
    if vn == 0.0 {
        return if p < 4.0 { Err(Error::VanishingGradient) } else { Ok(0.0) };
    }
    // M[i][k] = ∂_k (σ∇u)_i
    let mut m = &s * &h;
    for (k, dsk) in ds.iter().enumerate() {
        let col = dsk * &g;
        for i in 0..m.nrows() {
            m[(i, k)] += col[i];
        }
    }
    let hl = m * s.transpose();
    let quad = v.dot(&(hl * &v));
    Ok(vn.powf(p - 2.0) * lu + (p - 2.0) * vn.powf(p - 4.0) * quad)
}

/// `L(φ∘d)(x) = |∇_L d|² (φ''(d) + (Q-1) φ'(d)/d)`, the fast path for
/// gauge-radial functions. Relies on the gauge identity.
pub fn radial_operator_apply(gauge: &Gauge, profile: &dyn Profile, x: &Point) -> Result<f64> {
    if gauge.is_degenerate(x, 0.0) {
        return Err(Error::DegeneratePoint);
    }
    let d = gauge.value(x);
    let [_, d1, d2] = profile.eval(d);
    let q = gauge.gauge_exponent();
    Ok(gauge.psi(x) * (d2 + (q - 1.0) * d1 / d))
}

/// `L_p(φ∘d)(x) = |φ'|^{p-2} |∇_L d|^p ((p-1)φ'' + (Q-1)φ'/d)`.
pub fn radial_lp_apply(gauge: &Gauge, p: f64, profile: &dyn Profile, x: &Point) -> Result<f64> {
    if gauge.is_degenerate(x, 0.0) {
        return Err(Error::DegeneratePoint);
    }
    let d = gauge.value(x);
    let [_, d1, d2] = profile.eval(d);
    let q = gauge.gauge_exponent();
    let gn = gauge.horizontal_gradient_norm(x);
    let lead = if p == 2.0 { 1.0 } else { d1.abs().powf(p - 2.0) };
    Ok(lead * gn.powf(p) * ((p - 1.0) * d2 + (q - 1.0) * d1 / d))
}
