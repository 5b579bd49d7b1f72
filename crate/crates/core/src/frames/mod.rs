//! Vector-field frames `X_i = Σ_j σ_ij(x) ∂_j`, their paired gauges, and the
//! operators `∇_L = σ∇`, `L = div(σᵀσ ∇)` and `L_p = div(|∇_L u|^{p-2} σᵀσ ∇u)`.
//!
//! Four geometries are built in: Euclidean space, the Heisenberg group, the
//! Heisenberg–Greiner fields and the Baouendi–Grushin fields. Coordinates
//! are ordered `(x_1..x_n, y_1..y_n, t)` for the Heisenberg-type frames and
//! `(x_1..x_n, y_1..y_k)` for Grushin.

mod gauge;
mod ops;

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use gauge::{ClosedForm, Gauge};
pub use ops::{
    apply_l, apply_lp, heisenberg_decomposition_l, horizontal_gradient, radial_lp_apply,
    radial_operator_apply,
};

/// A point of the ambient space `R^N`.
pub type Point = DVector<f64>;

/// Serializable frame selection, e.g. `{"kind": "heisenberg", "n": 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FrameSpec {
    Euclidean { n: usize },
    Heisenberg { n: usize },
    HeisenbergGreiner { n: usize, gamma: f64 },
    BaouendiGrushin { n: usize, k: usize, gamma: f64 },
}

impl FrameSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            FrameSpec::Euclidean { n } | FrameSpec::Heisenberg { n } if n == 0 => {
                Err(Error::InvalidFrame("dimension must be at least 1".into()))
            }
            FrameSpec::HeisenbergGreiner { n, gamma } => {
                if n == 0 {
                    Err(Error::InvalidFrame("dimension must be at least 1".into()))
                } else if !(gamma.is_finite() && gamma >= 1.0) {
                    Err(Error::InvalidFrame(format!("Greiner requires gamma >= 1, got {gamma}")))
                } else {
                    Ok(())
                }
            }
            FrameSpec::BaouendiGrushin { n, gamma, .. } => {
                if n == 0 {
                    Err(Error::InvalidFrame("dimension must be at least 1".into()))
                } else if !(gamma.is_finite() && gamma >= 0.0) {
                    Err(Error::InvalidFrame(format!("Grushin requires gamma >= 0, got {gamma}")))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for FrameSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            FrameSpec::Euclidean { n } => write!(f, "euclidean:{n}"),
            FrameSpec::Heisenberg { n } => write!(f, "heisenberg:{n}"),
            FrameSpec::HeisenbergGreiner { n, gamma } => write!(f, "greiner:{n}:{gamma}"),
            FrameSpec::BaouendiGrushin { n, k, gamma } => write!(f, "grushin:{n}:{k}:{gamma}"),
        }
    }
}

impl FromStr for FrameSpec {
    type Err = Error;

    /// Parses `euclidean:N`, `heisenberg:n`, `greiner:n:gamma`, `grushin:n:k:gamma`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let bad = || Error::InvalidFrame(format!("cannot parse frame '{s}'"));
        let int = |i: usize| -> Result<usize> { parts.get(i).ok_or_else(bad)?.parse().map_err(|_| bad()) };
        let real = |i: usize| -> Result<f64> { parts.get(i).ok_or_else(bad)?.parse().map_err(|_| bad()) };
        let spec = match (parts[0], parts.len()) {
            ("euclidean", 2) => FrameSpec::Euclidean { n: int(1)? },
            ("heisenberg", 2) => FrameSpec::Heisenberg { n: int(1)? },
            ("greiner" | "heisenberg_greiner", 3) => FrameSpec::HeisenbergGreiner { n: int(1)?, gamma: real(2)? },
            ("grushin" | "baouendi_grushin", 4) => FrameSpec::BaouendiGrushin {
                n: int(1)?,
                k: int(2)?,
                gamma: real(3)?,
            },
            _ => return Err(bad()),
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// The coefficient matrix σ(x) of a frame together with its dilation structure.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    spec: FrameSpec,
    ambient_dim: usize,
    horizontal_dim: usize,
    dilation_exponents: Vec<f64>,
    homogeneous_dimension: f64,
}

/// Builds a frame and its paired gauge.
pub fn make_frame(spec: FrameSpec) -> Result<(Frame, Gauge)> {
    let frame = Frame::new(spec)?;
    let gauge = Gauge::new(frame.clone());
    Ok((frame, gauge))
}

impl Frame {
    pub fn new(spec: FrameSpec) -> Result<Self> {
        spec.validate()?;
        let (ambient_dim, horizontal_dim, dilation_exponents) = match spec {
            FrameSpec::Euclidean { n } => (n, n, vec![1.0; n]),
            FrameSpec::Heisenberg { n } => {
                let mut e = vec![1.0; 2 * n];
                e.push(2.0);
                (2 * n + 1, 2 * n, e)
            }
            FrameSpec::HeisenbergGreiner { n, gamma } => {
                let mut e = vec![1.0; 2 * n];
                e.push(2.0 * gamma);
                (2 * n + 1, 2 * n, e)
            }
            FrameSpec::BaouendiGrushin { n, k, gamma } => {
                let mut e = vec![1.0; n];
                e.extend(std::iter::repeat_n(1.0 + gamma, k));
                (n + k, n + k, e)
            }
        };
        let homogeneous_dimension = dilation_exponents.iter().sum();
        Ok(Self {
            spec,
            ambient_dim,
            horizontal_dim,
            dilation_exponents,
            homogeneous_dimension,
        })
    }

    pub fn spec(&self) -> FrameSpec {
        self.spec
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn horizontal_dim(&self) -> usize {
        self.horizontal_dim
    }

    pub fn dilation_exponents(&self) -> &[f64] {
        &self.dilation_exponents
    }

    /// `Q`, the sum of the dilation exponents.
    pub fn homogeneous_dimension(&self) -> f64 {
        self.homogeneous_dimension
    }

    /// `δ_λ x`.
    pub fn dilate(&self, x: &Point, lambda: f64) -> Point {
        Point::from_iterator(
            x.len(),
            x.iter().zip(&self.dilation_exponents).map(|(xi, e)| lambda.powf(*e) * xi),
        )
    }

    // Heisenberg-type frames: the t-column entry is c(z)·(y, -x) with
    // c(z) = 2γ|z|^{2γ-2}; Heisenberg proper is γ = 1.
    fn twist(&self) -> Option<(usize, f64)> {
        match self.spec {
            FrameSpec::Heisenberg { n } => Some((n, 1.0)),
            FrameSpec::HeisenbergGreiner { n, gamma } => Some((n, gamma)),
            _ => None,
        }
    }

    /// σ(x), an `h × N` matrix.
    pub fn sigma(&self, x: &Point) -> DMatrix<f64> {
        let (h, nn) = (self.horizontal_dim, self.ambient_dim);
        let mut s = DMatrix::zeros(h, nn);
        match self.spec {
            FrameSpec::Euclidean { .. } => s.fill_with_identity(),
            FrameSpec::Heisenberg { .. } | FrameSpec::HeisenbergGreiner { .. } => {
                let (n, gamma) = self.twist().expect("heisenberg type");
                let z2: f64 = x.rows(0, 2 * n).norm_squared();
                let c = 2.0 * gamma * pow_or_one(z2, gamma - 1.0);
                for j in 0..n {
                    s[(j, j)] = 1.0;
                    s[(j, 2 * n)] = c * x[n + j];
                    s[(n + j, n + j)] = 1.0;
                    s[(n + j, 2 * n)] = -c * x[j];
                }
            }
            FrameSpec::BaouendiGrushin { n, k, gamma } => {
                let b = (1.0 + gamma) * pow_or_one(x.rows(0, n).norm_squared(), 0.5 * gamma);
                for i in 0..n {
                    s[(i, i)] = 1.0;
                }
                for i in n..n + k {
                    s[(i, i)] = b;
                }
            }
        }
        s
    }

    /// `∂_k σ(x)` for `k = 0..N`.
    pub fn sigma_derivatives(&self, x: &Point) -> Vec<DMatrix<f64>> {
        let (h, nn) = (self.horizontal_dim, self.ambient_dim);
        let mut out = vec![DMatrix::zeros(h, nn); nn];
        match self.spec {
            FrameSpec::Euclidean { .. } => {}
            FrameSpec::Heisenberg { .. } | FrameSpec::HeisenbergGreiner { .. } => {
                let (n, gamma) = self.twist().expect("heisenberg type");
                let z2: f64 = x.rows(0, 2 * n).norm_squared();
                let c = 2.0 * gamma * pow_or_one(z2, gamma - 1.0);
                // ∂_{z_m} c = 2γ(2γ-2)|z|^{2γ-4} z_m
                let dc_coef = if gamma == 1.0 {
                    0.0
                } else {
                    2.0 * gamma * (2.0 * gamma - 2.0) * pow_or_zero(z2, gamma - 2.0)
                };
                for (m, dm) in out.iter_mut().enumerate().take(2 * n) {
                    let dc = dc_coef * x[m];
                    for j in 0..n {
                        let mut vx = dc * x[n + j];
                        if m == n + j {
                            vx += c;
                        }
                        dm[(j, 2 * n)] = vx;
                        let mut vy = -dc * x[j];
                        if m == j {
                            vy -= c;
                        }
                        dm[(n + j, 2 * n)] = vy;
                    }
                }
            }
            FrameSpec::BaouendiGrushin { n, k, gamma } => {
                if gamma != 0.0 && k > 0 {
                    let x2 = x.rows(0, n).norm_squared();
                    let coef = (1.0 + gamma) * gamma * pow_or_zero(x2, 0.5 * gamma - 1.0);
                    for (m, dm) in out.iter_mut().enumerate().take(n) {
                        for i in n..n + k {
                            dm[(i, i)] = coef * x[m];
                        }
                    }
                }
            }
        }
        out
    }

    /// `A = σᵀσ`.
    pub fn a_matrix(&self, x: &Point) -> DMatrix<f64> {
        let s = self.sigma(x);
        s.transpose() * s
    }

    /// `(Σ_i ∂_i A_ij)_j`, assembled from σ and its analytic derivatives.
    pub fn sigma_divergence(&self, x: &Point) -> DVector<f64> {
        let s = self.sigma(x);
        let ds = self.sigma_derivatives(x);
        self.divergence_from(&s, &ds)
    }

    pub(crate) fn divergence_from(&self, s: &DMatrix<f64>, ds: &[DMatrix<f64>]) -> DVector<f64> {
        let nn = self.ambient_dim;
        let mut div = DVector::zeros(nn);
        for j in 0..nn {
            let mut acc = 0.0;
            for (i, dsi) in ds.iter().enumerate() {
                for l in 0..self.horizontal_dim {
                    acc += dsi[(l, i)] * s[(l, j)] + s[(l, i)] * dsi[(l, j)];
                }
            }
            div[j] = acc;
        }
        div
    }

    /// Points where σ is not smooth: the origin, `{z = 0}` for the
    /// Heisenberg-type frames and `{x = 0}` for Grushin with non-integer γ,
    /// each thickened to a tube of relative width `tube` (in gauge units).
    pub fn is_singular(&self, x: &Point, gauge_value: f64, tube: f64) -> bool {
        if gauge_value <= 0.0 || x.iter().all(|v| *v == 0.0) {
            return true;
        }
        match self.spec {
            FrameSpec::Euclidean { .. } => false,
            FrameSpec::Heisenberg { n } | FrameSpec::HeisenbergGreiner { n, .. } => {
                x.rows(0, 2 * n).norm() < tube * gauge_value
            }
            FrameSpec::BaouendiGrushin { n, k, gamma } => {
                k > 0 && gamma.fract() != 0.0 && x.rows(0, n).norm() < tube * gauge_value
            }
        }
    }
}

// |v|^{2e} written as (v²)^e, with 0^0 = 1.
pub(crate) fn pow_or_one(sq: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else {
        sq.powf(e)
    }
}

// Same, but returns 0 at sq = 0 for negative e (the products it feeds vanish there).
pub(crate) fn pow_or_zero(sq: f64, e: f64) -> f64 {
    if sq == 0.0 {
        if e == 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        sq.powf(e)
    }
}
