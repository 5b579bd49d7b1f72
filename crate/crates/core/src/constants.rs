//! Closed-form sharp constants, admissibility predicates and extremal
//! exponents. Every constant is evaluated in the general β-parameterization
//! and cross-checked against the homogeneous-dimension form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::FrameSpec;

/// The exponent `p`, weight `θ` and homogeneous dimension `Q` of an inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InequalityParams {
    pub p: f64,
    pub theta: f64,
    #[serde(rename = "Q")]
    pub q: f64,
}

impl InequalityParams {
    pub fn new(p: f64, theta: f64, q: f64) -> Result<Self> {
        if !(p.is_finite() && theta.is_finite() && q.is_finite()) {
            return Err(Error::NonFinite("inequality parameters"));
        }
        if p < 2.0 {
            return Err(Error::ExponentTooSmall(p));
        }
        if q <= 0.0 {
            return Err(Error::InvalidParameter(format!("Q must be positive, got {q}")));
        }
        Ok(Self { p, theta, q })
    }

    /// `β = (p-Q)/(p-1)`, from `L_p d = (1-β)(p-1)|∇_L d|^p/d`.
    pub fn hardy_beta(&self) -> f64 {
        (self.p - self.q) / (self.p - 1.0)
    }

    /// `β = 2-Q`, from `L d = (1-β)|∇_L d|²/d`.
    pub fn rellich_beta(&self) -> f64 {
        2.0 - self.q
    }
}

fn agree(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

pub fn hardy_constant_beta_form(p: f64, theta: f64, beta: f64) -> f64 {
    (p * (theta - 1.0) + beta * (p - 1.0)).abs().powf(p) / p.powf(p)
}

pub fn hardy_constant_q_form(p: f64, theta: f64, q: f64) -> f64 {
    (q - p * theta).abs().powf(p) / p.powf(p)
}

/// `(2-β-pθ-2p)(pθ+2p-2-β(p-1))`; the constant exists iff this is `≥ 0`.
pub fn rellich_product_beta_form(p: f64, theta: f64, beta: f64) -> f64 {
    (2.0 - beta - p * theta - 2.0 * p) * (p * theta + 2.0 * p - 2.0 - beta * (p - 1.0))
}

pub fn rellich_product_q_form(p: f64, theta: f64, q: f64) -> f64 {
    (q - p * (theta + 2.0)) * (p * theta + q * (p - 1.0))
}

pub fn rellich_constant_beta_form(p: f64, theta: f64, beta: f64) -> f64 {
    (rellich_product_beta_form(p, theta, beta) / (p * p)).powf(p)
}

pub fn rellich_constant_q_form(p: f64, theta: f64, q: f64) -> f64 {
    (rellich_product_q_form(p, theta, q) / (p * p)).powf(p)
}

pub fn auxiliary_constant_beta_form(p: f64, theta: f64, beta: f64) -> f64 {
    let s = p * theta + 2.0 * p - 2.0 + beta;
    s * s / (p * p)
}

pub fn auxiliary_constant_q_form(p: f64, theta: f64, q: f64) -> f64 {
    let s = q - p * (theta + 2.0);
    s * s / (p * p)
}

/// `|p(θ-1)+β(p-1)|^p / p^p`, equal to `|Q-pθ|^p / p^p`.
pub fn hardy_sharp_constant(params: &InequalityParams) -> f64 {
    let InequalityParams { p, theta, q } = *params;
    let c = hardy_constant_beta_form(p, theta, params.hardy_beta());
    assert!(agree(c, hardy_constant_q_form(p, theta, q)), "hardy constant forms disagree");
    c
}

/// `((2-β-pθ-2p)(pθ+2p-2-β(p-1))/p²)^p`, equal to `((Q-p(θ+2))(pθ+Q(p-1))/p²)^p`.
/// Fails when the product condition is violated.
pub fn rellich_sharp_constant(params: &InequalityParams) -> Result<f64> {
    let InequalityParams { p, theta, q } = *params;
    let beta = params.rellich_beta();
    let prod = rellich_product_beta_form(p, theta, beta);
    assert!(agree(prod, rellich_product_q_form(p, theta, q)), "rellich product forms disagree");
    if prod < 0.0 {
        return Err(Error::Inadmissible(PRODUCT_CLAUSE.to_string()));
    }
    let c = rellich_constant_beta_form(p, theta, beta);
    assert!(agree(c, rellich_constant_q_form(p, theta, q)), "rellich constant forms disagree");
    Ok(c)
}

/// `(pθ+2p-2+β)²/p²`, equal to `(Q-p(θ+2))²/p²`.
pub fn auxiliary_hardy_constant(params: &InequalityParams) -> f64 {
    let InequalityParams { p, theta, q } = *params;
    let c = auxiliary_constant_beta_form(p, theta, params.rellich_beta());
    assert!(agree(c, auxiliary_constant_q_form(p, theta, q)), "auxiliary constant forms disagree");
    c
}

/// Exponents `a` of the maximizers `d^a`: `(pθ-Q)/p` for Hardy and
/// `(p(θ+2)-Q)/p` for Rellich (and the auxiliary Hardy inequality).
pub fn extremal_exponents(params: &InequalityParams) -> (f64, f64) {
    let InequalityParams { p, theta, q } = *params;
    let hardy = (p * (theta - 1.0) + params.hardy_beta() * (p - 1.0)) / p;
    let rellich = (p * theta + 2.0 * p - 2.0 + params.rellich_beta()) / p;
    assert!(agree(hardy, (p * theta - q) / p));
    assert!(agree(rellich, (p * (theta + 2.0) - q) / p));
    (hardy, rellich)
}

pub const PRODUCT_CLAUSE: &str = "(Q−p(θ+2))(pθ+Q(p−1)) ≥ 0";

/// Result of the Rellich admissibility test, naming each clause checked.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Admissibility {
    pub admissible: bool,
    pub checked: Vec<String>,
    pub failed: Vec<String>,
}

/// The product condition together with the frame's integrability condition.
pub fn rellich_admissible(params: &InequalityParams, frame: &FrameSpec) -> Admissibility {
    let InequalityParams { p, theta, q } = *params;
    let mut clauses: Vec<(String, bool)> = vec![(
        PRODUCT_CLAUSE.to_string(),
        rellich_product_q_form(p, theta, q) >= 0.0,
    )];
    match *frame {
        FrameSpec::Euclidean { .. } => {}
        FrameSpec::Heisenberg { .. } => clauses.push(("Q > 2p".into(), q > 2.0 * p)),
        FrameSpec::HeisenbergGreiner { gamma, .. } => clauses.push((
            "Q > 2p(2γ−1)+4(1−γ)".into(),
            q > 2.0 * p * (2.0 * gamma - 1.0) + 4.0 * (1.0 - gamma),
        )),
        FrameSpec::BaouendiGrushin { k, gamma, .. } => {
            if k > 0 {
                clauses.push((
                    "Q > 2γ(p−1)+(1+γ)k".into(),
                    q > 2.0 * gamma * (p - 1.0) + (1.0 + gamma) * k as f64,
                ));
            }
        }
    }
    let failed: Vec<String> = clauses.iter().filter(|c| !c.1).map(|c| c.0.clone()).collect();
    Admissibility {
        admissible: failed.is_empty(),
        checked: clauses.into_iter().map(|c| c.0).collect(),
        failed,
    }
}

/// All constants for one parameter tuple. `rellich` is `None` when the
/// product condition fails; zero constants are reported with a warning.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SharpConstants {
    pub hardy: f64,
    pub rellich: Option<f64>,
    pub auxiliary_hardy: f64,
    pub hardy_extremal_exponent: f64,
    pub rellich_extremal_exponent: f64,
    pub warnings: Vec<String>,
}

pub fn sharp_constants(params: &InequalityParams) -> SharpConstants {
    let hardy = hardy_sharp_constant(params);
    let rellich = rellich_sharp_constant(params).ok();
    let auxiliary_hardy = auxiliary_hardy_constant(params);
    let (he, re) = extremal_exponents(params);
    let mut warnings = Vec::new();
    if hardy == 0.0 {
        warnings.push("critical case: hardy constant vanishes at θ = Q/p".to_string());
    }
    if rellich == Some(0.0) {
        warnings.push("critical case: rellich constant vanishes on the admissibility boundary".to_string());
    }
    if auxiliary_hardy == 0.0 {
        warnings.push("critical case: auxiliary hardy constant vanishes at θ = Q/p − 2".to_string());
    }
    if he == 0.0 {
        warnings.push("critical case: hardy maximizer is constant".to_string());
    }
    SharpConstants {
        hardy,
        rellich,
        auxiliary_hardy,
        hardy_extremal_exponent: he,
        rellich_extremal_exponent: re,
        warnings,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(p: f64, theta: f64, q: f64) -> InequalityParams {
        InequalityParams::new(p, theta, q).unwrap()
    }

    #[test]
    fn hardy_spot_values() {
        assert_eq!(hardy_sharp_constant(&params(2.0, 1.0, 5.0)), 2.25);
        assert_eq!(hardy_sharp_constant(&params(2.0, 1.0, 4.0)), 1.0);
        assert_eq!(hardy_sharp_constant(&params(3.0, 1.0, 4.0)), 1.0 / 27.0);
        assert_eq!(hardy_sharp_constant(&params(4.0, 1.5, 6.0)), 0.0);
    }

    #[test]
    fn rellich_spot_values() {
        assert_eq!(rellich_sharp_constant(&params(2.0, 0.0, 5.0)).unwrap(), 1.5625);
        assert_eq!(rellich_sharp_constant(&params(2.0, 0.0, 6.0)).unwrap(), 9.0);
        assert_eq!(rellich_sharp_constant(&params(2.0, 0.5, 5.0)).unwrap(), 0.0);
        assert_eq!(rellich_sharp_constant(&params(2.0, 0.0, 10.0)).unwrap(), 225.0);
        assert!(rellich_sharp_constant(&params(2.0, 0.0, 3.0)).is_err());
    }

    #[test]
    fn auxiliary_spot_values() {
        assert_eq!(auxiliary_hardy_constant(&params(2.0, 0.0, 5.0)), 0.25);
        assert_eq!(auxiliary_hardy_constant(&params(2.0, 0.5, 5.0)), 0.0);
        assert_eq!(auxiliary_hardy_constant(&params(2.0, -1.0, 4.0)), 1.0);
    }

    #[test]
    fn exponent_spot_values() {
        assert_eq!(extremal_exponents(&params(2.0, 1.0, 5.0)).0, -1.5);
        assert_eq!(extremal_exponents(&params(2.0, 2.0, 4.0)).0, 0.0);
        assert_eq!(extremal_exponents(&params(2.0, 0.0, 5.0)).1, -0.5);
    }

    #[test]
    fn admissibility_examples() {
        let e = rellich_admissible(&params(2.0, 0.0, 5.0), &FrameSpec::Euclidean { n: 5 });
        assert!(e.admissible);
        let h = rellich_admissible(&params(2.0, 0.0, 4.0), &FrameSpec::Heisenberg { n: 1 });
        assert!(!h.admissible);
        assert_eq!(h.failed, vec!["Q > 2p".to_string()]);
        // γ = 0: the Grushin clause reduces to n+k > k.
        let g = rellich_admissible(
            &params(2.0, -1.0, 2.0),
            &FrameSpec::BaouendiGrushin { n: 1, k: 1, gamma: 0.0 },
        );
        assert!(g.admissible, "{g:?}");
        let gr = rellich_admissible(&params(2.0, 0.0, 10.0), &FrameSpec::HeisenbergGreiner { n: 3, gamma: 2.0 });
        assert!(gr.admissible);
    }

    #[test]
    fn critical_warnings() {
        let c = sharp_constants(&params(2.0, 2.0, 4.0));
        assert_eq!(c.hardy, 0.0);
        assert!(c.warnings.iter().any(|w| w.contains("hardy constant vanishes")));
    }

    #[test]
    fn params_validation() {
        assert!(InequalityParams::new(1.5, 0.0, 3.0).is_err());
        assert!(InequalityParams::new(2.0, f64::NAN, 3.0).is_err());
        assert!(InequalityParams::new(2.0, 0.0, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn forms_agree(p in 2.0f64..6.0, theta in -3.0f64..3.0, q in 3u32..=12) {
            let pr = params(p, theta, q as f64);
            let (hb, rb) = (pr.hardy_beta(), pr.rellich_beta());
            let h = hardy_constant_beta_form(p, theta, hb);
            prop_assert!(agree(h, hardy_constant_q_form(p, theta, q as f64)));
            let a = auxiliary_constant_beta_form(p, theta, rb);
            prop_assert!(agree(a, auxiliary_constant_q_form(p, theta, q as f64)));
            let prod = rellich_product_beta_form(p, theta, rb);
            prop_assert!(agree(prod, rellich_product_q_form(p, theta, q as f64)));
            if prod >= 0.0 {
                prop_assert!(agree(rellich_constant_beta_form(p, theta, rb), rellich_constant_q_form(p, theta, q as f64)));
            }
        }

        #[test]
        fn hardy_vanishes_only_at_critical_weight(p in 2.0f64..6.0, theta in -3.0f64..3.0, q in 3u32..=12) {
            let pr = params(p, theta, q as f64);
            let crit = (q as f64 / p - theta).abs() < 1e-9;
            if !crit {
                prop_assert!(hardy_sharp_constant(&pr) > 0.0);
            }
        }

        #[test]
        fn rellich_is_product_of_factors(p in 2.0f64..6.0, theta in -3.0f64..3.0, q in 3u32..=12) {
            let q = q as f64;
            let pr = params(p, theta, q);
            let f1 = (q - p * (theta + 2.0)) / p;
            let f2 = (p * theta + q * (p - 1.0)) / p;
            match rellich_sharp_constant(&pr) {
                Ok(c) => prop_assert!(agree(c, (f1 * f2).powf(p))),
                Err(_) => prop_assert!(f1 * f2 < 0.0),
            }
        }
    }
}
