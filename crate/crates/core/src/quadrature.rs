//! Integration over gauge annuli: Monte Carlo for general integrands and the
//! co-area radial reduction `∫ f(d)|∇_L d|^p dx = Q λ_p ∫ f(r) r^{Q-1} dr`
//! for gauge-radial ones.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::{Gauge, Point};
use crate::mc::{map_ordered, stream_rng, Accumulator, ExecPolicy, BATCH_SIZE};
use crate::quad1d::{integrate_with_breaks, QuadOptions};

/// A value with its standard error and sample count (`0` for deterministic values).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    #[serde(rename = "n")]
    pub n_samples: u64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self { value, stderr: 0.0, n_samples: 0 }
    }

    pub fn scaled(self, c: f64) -> Self {
        Self { value: c * self.value, stderr: c.abs() * self.stderr, n_samples: self.n_samples }
    }
}

/// Sample budget, seed and scheduling for a Monte-Carlo run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McSettings {
    pub samples: usize,
    pub seed: u64,
    #[serde(default)]
    pub policy: ExecPolicy,
}

impl McSettings {
    pub fn new(samples: usize, seed: u64) -> Self {
        Self { samples, seed, policy: ExecPolicy::default() }
    }

    pub fn with_policy(self, policy: ExecPolicy) -> Self {
        Self { policy, ..self }
    }
}

/// Annulus integrals of `K` channels sharing one set of sample points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelEstimate<const K: usize> {
    pub totals: [f64; K],
    /// Covariance of the totals.
    pub cov: [[f64; K]; K],
    pub n_samples: u64,
    pub accepted: u64,
}

impl<const K: usize> ChannelEstimate<K> {
    pub fn estimate(&self, i: usize) -> Estimate {
        Estimate { value: self.totals[i], stderr: self.cov[i][i].max(0.0).sqrt(), n_samples: self.n_samples }
    }

    /// `total_i / total_j` with the delta-method standard error.
    pub fn ratio(&self, i: usize, j: usize) -> Estimate {
        let (a, b) = (self.totals[i], self.totals[j]);
        let r = a / b;
        let var = (self.cov[i][i] - 2.0 * r * self.cov[i][j] + r * r * self.cov[j][j]) / (b * b);
        Estimate { value: r, stderr: var.max(0.0).sqrt(), n_samples: self.n_samples }
    }

    /// `total_i - c·total_j` with its standard error.
    pub fn difference(&self, i: usize, j: usize, c: f64) -> Estimate {
        let var = self.cov[i][i] - 2.0 * c * self.cov[i][j] + c * c * self.cov[j][j];
        Estimate {
            value: self.totals[i] - c * self.totals[j],
            stderr: var.max(0.0).sqrt(),
            n_samples: self.n_samples,
        }
    }
}

// Shell edges; geometric with ratio at most 2 when the annulus spans more
// than two decades.
fn strata(r_in: f64, r_out: f64) -> Vec<(f64, f64)> {
    if r_in > 0.0 && r_out / r_in > 100.0 {
        let count = (r_out / r_in).log2().ceil() as usize;
        let ratio = (r_out / r_in).powf(1.0 / count as f64);
        (0..count)
            .map(|j| {
                let lo = r_in * ratio.powi(j as i32);
                let hi = if j + 1 == count { r_out } else { r_in * ratio.powi(j as i32 + 1) };
                (lo, hi)
            })
            .collect()
    } else {
        vec![(r_in, r_out)]
    }
}

/// Integrates the channels of `f` over `{r_in ≤ d ≤ r_out}` by uniform
/// rejection sampling in bounding boxes; rejected points contribute zero.
pub fn mc_annulus_channels<const K: usize, F>(
    gauge: &Gauge,
    f: F,
    r_in: f64,
    r_out: f64,
    mc: &McSettings,
) -> Result<ChannelEstimate<K>>
where
    F: Fn(&Point) -> [f64; K] + Sync + Send,
{
    if !(r_in >= 0.0 && r_out > r_in && r_out.is_finite()) {
        return Err(Error::InvalidParameter(format!("bad annulus ({r_in}, {r_out})")));
    }
    if mc.samples < 2 {
        return Err(Error::InvalidParameter("need at least 2 samples".into()));
    }
    let shells = strata(r_in, r_out);
    let per_shell = mc.samples / shells.len();
    let extra = mc.samples % shells.len();
    let mut jobs = Vec::new();
    for (s, _) in shells.iter().enumerate() {
        let n_s = per_shell + usize::from(s < extra);
        for b in 0..n_s.div_ceil(BATCH_SIZE) {
            let count = BATCH_SIZE.min(n_s - b * BATCH_SIZE);
            jobs.push((s, b, count));
        }
    }
    let dim = gauge.frame().ambient_dim();
    let boxes: Vec<Vec<f64>> = shells.iter().map(|&(_, hi)| gauge.bounding_box(hi)).collect();
    let results = map_ordered(&jobs, mc.policy, |&(s, b, count)| {
        let (lo, hi) = shells[s];
        let half = &boxes[s];
        let mut rng = stream_rng(mc.seed, ((s as u64) << 32) | b as u64);
        let mut acc = Accumulator::<K>::default();
        let mut accepted = 0u64;
        let mut x = Point::zeros(dim);
        for _ in 0..count {
            for i in 0..dim {
                x[i] = half[i] * (2.0 * rng.random::<f64>() - 1.0);
            }
            let d = gauge.value(&x);
            if d >= lo && d <= hi && d > 0.0 {
                accepted += 1;
                acc.push(&f(&x));
            } else {
                acc.push(&[0.0; K]);
            }
        }
        (s, acc, accepted)
    });

    let mut per = vec![(Accumulator::<K>::default(), 0u64); shells.len()];
    for (s, acc, accepted) in &results {
        per[*s].0.merge(acc);
        per[*s].1 += accepted;
    }
    let mut totals = [0.0; K];
    let mut cov = [[0.0; K]; K];
    let mut accepted = 0;
    for (s, (acc, acc_count)) in per.iter().enumerate() {
        let vol: f64 = boxes[s].iter().map(|h| 2.0 * h).product();
        let mean = acc.mean();
        let mc_cov = acc.mean_covariance();
        for i in 0..K {
            totals[i] += vol * mean[i];
            for j in 0..K {
                cov[i][j] += vol * vol * mc_cov[i][j];
            }
        }
        accepted += acc_count;
    }
    let rate = accepted as f64 / mc.samples as f64;
    if rate < 1e-4 {
        return Err(Error::LowAcceptance(rate));
    }
    Ok(ChannelEstimate { totals, cov, n_samples: mc.samples as u64, accepted })
}

/// `∫_{r_in ≤ d ≤ r_out} integrand dx` by Monte Carlo.
pub fn mc_gauge_annulus<F>(gauge: &Gauge, integrand: F, r_in: f64, r_out: f64, mc: &McSettings) -> Result<Estimate>
where
    F: Fn(&Point) -> f64 + Sync + Send,
{
    Ok(mc_annulus_channels(gauge, |x| [integrand(x)], r_in, r_out, mc)?.estimate(0))
}

/// `λ_p = ∫_{d≤1} |∇_L d|^p dx` together with `Q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SphereConstant {
    pub p: f64,
    pub lambda_p: Estimate,
    #[serde(rename = "Q")]
    pub q: f64,
}

impl SphereConstant {
    /// `∫_{d=r} |∇_L d|^p / |∇d| dH = Q λ_p r^{Q-1}`.
    pub fn surface(&self, r: f64) -> f64 {
        self.q * self.lambda_p.value * r.powf(self.q - 1.0)
    }
}

pub fn sphere_constant(gauge: &Gauge, p: f64, mc: &McSettings) -> Result<SphereConstant> {
    if p < 2.0 {
        return Err(Error::ExponentTooSmall(p));
    }
    let lambda_p = mc_gauge_annulus(gauge, |x| gauge.horizontal_gradient_norm(x).powf(p), 0.0, 1.0, mc)?;
    Ok(SphereConstant { p, lambda_p, q: gauge.gauge_exponent() })
}

/// `∫_{r_in}^{r_out} f(r) r^{Q-1} dr`, deterministic. For `r_in > 0` the
/// integral runs in `ln r`, split at the given breakpoints and at unit
/// steps of `ln r`, so annuli spanning many decades stay cheap.
pub fn radial_moment<F: Fn(f64) -> f64>(
    f: F,
    q: f64,
    r_in: f64,
    r_out: f64,
    breaks: &[f64],
    opts: QuadOptions,
) -> Result<f64> {
    if !(r_in >= 0.0 && r_out >= r_in) {
        return Err(Error::InvalidParameter(format!("bad radial range ({r_in}, {r_out})")));
    }
    if r_in == r_out {
        return Ok(0.0);
    }
    if r_in == 0.0 {
        let mut pts = vec![0.0];
        pts.extend(breaks.iter().copied().filter(|b| *b > 0.0 && *b < r_out));
        pts.push(r_out);
        pts.sort_by(f64::total_cmp);
        return Ok(integrate_with_breaks(|r| f(r) * r.powf(q - 1.0), &pts, opts)?.value);
    }
    let (s0, s1) = (r_in.ln(), r_out.ln());
    let mut pts = vec![s0, s1];
    pts.extend(breaks.iter().filter(|b| **b > r_in && **b < r_out).map(|b| b.ln()));
    let mut s = s0.ceil();
    while s < s1 {
        pts.push(s);
        s += 1.0;
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    Ok(integrate_with_breaks(|s| { let r = s.exp(); f(r) * r.powf(q) }, &pts, opts)?.value)
}

/// `Q λ_p ∫_{r_in}^{r_out} f(r) r^{Q-1} dr`; the error is that of `λ_p`.
pub fn radial_integral<F: Fn(f64) -> f64>(
    sphere: &SphereConstant,
    f: F,
    r_in: f64,
    r_out: f64,
    breaks: &[f64],
) -> Result<Estimate> {
    let m = radial_moment(f, sphere.q, r_in, r_out, breaks, QuadOptions::default())?;
    Ok(sphere.lambda_p.scaled(sphere.q * m))
}

#[cfg(test)]
mod tests;
