use nalgebra::{DMatrix, DVector};

use super::{pow_or_zero, Frame, FrameSpec, Point};

/// A homogeneous gauge of the form `d = (|z|^a + |w|^2)^{1/a}`, where `z` is the
/// leading block of `nz` coordinates and `w` the rest.
///
/// | frame     | z        | a      |
/// |-----------|----------|--------|
/// | Euclidean | x        | 2      |
/// | Heisenberg| (x, y)   | 4      |
/// | Greiner   | (x, y)   | 4γ     |
/// | Grushin   | x        | 2+2γ   |
#[derive(Debug, Clone, PartialEq)]
pub struct Gauge {
    frame: Frame,
    nz: usize,
    a: f64,
}

/// Closed forms that `|∇_L d|` is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum ClosedForm {
    /// `1` (Euclidean).
    Unit,
    /// `(|z|/ρ)^{2γ-1}` (Heisenberg for γ = 1, Greiner).
    TwistedPower,
    /// `(|x|/ρ)^γ` (Grushin, from σ∇ρ).
    GrushinPower,
    /// `(|x|/ρ)^{2γ}` (Grushin, squared form).
    GrushinSquared,
}

impl Gauge {
    pub(crate) fn new(frame: Frame) -> Self {
        let (nz, a) = match frame.spec() {
            FrameSpec::Euclidean { n } => (n, 2.0),
            FrameSpec::Heisenberg { n } => (2 * n, 4.0),
            FrameSpec::HeisenbergGreiner { n, gamma } => (2 * n, 4.0 * gamma),
            FrameSpec::BaouendiGrushin { n, gamma, .. } => (n, 2.0 + 2.0 * gamma),
        };
        Self { frame, nz, a }
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    /// Exponent in `L_p d = (Q_gauge - 1)|∇_L d|^p / d`; equal to `Q` for every built-in gauge.
    pub fn gauge_exponent(&self) -> f64 {
        self.frame.homogeneous_dimension()
    }

    fn big_f(&self, x: &Point) -> f64 {
        let z2 = x.rows(0, self.nz).norm_squared();
        let w2 = x.rows(self.nz, x.len() - self.nz).norm_squared();
        pow_or_zero(z2, 0.5 * self.a) + w2
    }

    pub fn value(&self, x: &Point) -> f64 {
        self.big_f(x).powf(1.0 / self.a)
    }

    fn big_f_gradient(&self, x: &Point) -> DVector<f64> {
        let z2 = x.rows(0, self.nz).norm_squared();
        let cz = self.a * pow_or_zero(z2, 0.5 * self.a - 1.0);
        DVector::from_iterator(
            x.len(),
            x.iter().enumerate().map(|(i, xi)| if i < self.nz { cz * xi } else { 2.0 * xi }),
        )
    }

    fn big_f_hessian(&self, x: &Point) -> DMatrix<f64> {
        let n = x.len();
        let z = x.rows(0, self.nz);
        let z2 = z.norm_squared();
        let a = self.a;
        let mut h = DMatrix::zeros(n, n);
        let diag = a * pow_or_zero(z2, 0.5 * a - 1.0);
        let outer = if a == 2.0 { 0.0 } else { a * (a - 2.0) * pow_or_zero(z2, 0.5 * a - 2.0) };
        for i in 0..self.nz {
            h[(i, i)] = diag;
            for j in 0..self.nz {
                h[(i, j)] += outer * z[i] * z[j];
            }
        }
        for i in self.nz..n {
            h[(i, i)] = 2.0;
        }
        h
    }

    /// Euclidean gradient `∇d`.
    pub fn euclid_gradient(&self, x: &Point) -> DVector<f64> {
        let f = self.big_f(x);
        let inv_a = 1.0 / self.a;
        self.big_f_gradient(x) * (inv_a * f.powf(inv_a - 1.0))
    }

    /// Euclidean Hessian of `d`.
    pub fn euclid_hessian(&self, x: &Point) -> DMatrix<f64> {
        let f = self.big_f(x);
        let inv_a = 1.0 / self.a;
        let gf = self.big_f_gradient(x);
        let hf = self.big_f_hessian(x);
        (hf + (&gf * gf.transpose()) * ((inv_a - 1.0) / f)) * (inv_a * f.powf(inv_a - 1.0))
    }

    /// `∇_L d = σ ∇d`.
    pub fn horizontal_gradient(&self, x: &Point) -> DVector<f64> {
        self.frame.sigma(x) * self.euclid_gradient(x)
    }

    /// `|∇_L d|`.
    pub fn horizontal_gradient_norm(&self, x: &Point) -> f64 {
        self.horizontal_gradient(x).norm()
    }

    /// `ψ = |∇_L d|²`.
    pub fn psi(&self, x: &Point) -> f64 {
        self.horizontal_gradient(x).norm_squared()
    }

    /// Half-widths of an axis-aligned box containing `{d ≤ r}`.
    ///
    /// `|z| ≤ d` and `|w| ≤ d^{a/2}` follow directly from the definition.
    pub fn bounding_box(&self, r: f64) -> Vec<f64> {
        let n = self.frame.ambient_dim();
        (0..n)
            .map(|i| if i < self.nz { r } else { r.powf(0.5 * self.a) })
            .collect()
    }

    /// The degenerate set: singular points of σ plus the loci where
    /// `|∇_L d| = 0` (`{z = 0}` for Heisenberg types, `{x = 0}` for Grushin
    /// with γ > 0), thickened by the relative `tube`.
    pub fn is_degenerate(&self, x: &Point, tube: f64) -> bool {
        let d = self.value(x);
        if self.frame.is_singular(x, d, tube) {
            return true;
        }
        match self.frame.spec() {
            FrameSpec::BaouendiGrushin { n, k, gamma } => {
                k > 0 && gamma > 0.0 && x.rows(0, n).norm() < tube * d
            }
            _ => false,
        }
    }

    /// Candidate closed forms of `|∇_L d|` at `x`.
    pub fn closed_forms(&self, x: &Point) -> Vec<(ClosedForm, f64)> {
        let d = self.value(x);
        let zr = x.rows(0, self.nz).norm() / d;
        match self.frame.spec() {
            FrameSpec::Euclidean { .. } => vec![(ClosedForm::Unit, 1.0)],
            FrameSpec::Heisenberg { .. } => vec![(ClosedForm::TwistedPower, zr)],
            FrameSpec::HeisenbergGreiner { gamma, .. } => {
                vec![(ClosedForm::TwistedPower, zr.powf(2.0 * gamma - 1.0))]
            }
            FrameSpec::BaouendiGrushin { gamma, .. } => vec![
                (ClosedForm::GrushinPower, zr.powf(gamma)),
                (ClosedForm::GrushinSquared, zr.powf(2.0 * gamma)),
            ],
        }
    }

    /// The closed forms that agree with the directly computed `|σ∇d|` at `x`.
    pub fn matching_closed_forms(&self, x: &Point, rel_tol: f64) -> Vec<ClosedForm> {
        let direct = self.horizontal_gradient_norm(x);
        self.closed_forms(x)
            .into_iter()
            .filter(|(_, v)| (v - direct).abs() <= rel_tol * direct.abs().max(1e-300))
            .map(|(c, _)| c)
            .collect()
    }
}
