use rand::{Rng, SeedableRng};
use serde::Serialize;
use serde_json::{json, Value};
use sharp_hardy::algebra::{cp_estimate, identity_residual};
use sharp_hardy::constants::{rellich_admissible, sharp_constants, InequalityParams};
use sharp_hardy::frames::{make_frame, FrameSpec, Gauge};
use sharp_hardy::quadrature::McSettings;
use sharp_hardy::testfns::make_random_bump;
use sharp_hardy::verify::{
    auxiliary_hardy_check, hardy_chain, harmonicity_audit, rellich_check, sharpness_sweep, ChainReport, Inequality,
    QuadSettings,
};
use sharp_hardy::Error;

use crate::config::RunConfig;

/// Tolerance on the identity residual for `p > 2`; `p = 2` uses 1e-12.
const IDENTITY_TOL: f64 = 1e-8;

/// Why a command could not produce a verdict.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::ExponentTooSmall(_)
            | Error::NonFinite(_)
            | Error::InvalidFrame(_)
            | Error::InvalidParameter(_)
            | Error::Inadmissible(_)
            | Error::FitTooFewPoints(_) => Failure::Config(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

impl From<String> for Failure {
    fn from(s: String) -> Self {
        Failure::Config(s)
    }
}

/// A command's document and whether every verdict in it passed.
pub struct Output {
    pub body: String,
    pub pass: bool,
}

fn json_output<T: Serialize>(doc: &T, pass: bool) -> Output {
    let mut body = serde_json::to_string_pretty(doc).expect("reports serialize");
    body.push('\n');
    Output { body, pass }
}

fn setup(cfg: &RunConfig) -> Result<(FrameSpec, Gauge, InequalityParams), Failure> {
    let spec = cfg.frame()?;
    let (_, gauge) = make_frame(spec)?;
    let params = InequalityParams::new(cfg.p()?, cfg.theta()?, gauge.gauge_exponent())?;
    Ok((spec, gauge, params))
}

pub fn constants(cfg: &RunConfig) -> Result<Output, Failure> {
    let (spec, _, params) = setup(cfg)?;
    let doc = json!({
        "config": cfg,
        "frame": spec,
        "params": params,
        "constants": sharp_constants(&params),
        "rellich_admissibility": rellich_admissible(&params, &spec),
    });
    Ok(json_output(&doc, true))
}

pub fn identity(cfg: &RunConfig) -> Result<Output, Failure> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut rows = Vec::new();
    let mut pass = true;
    for p in cfg.p_list_or(&[2.0, 2.5, 3.0, 4.0, 6.0]) {
        let tol = if p == 2.0 { 1e-12 } else { IDENTITY_TOL };
        let mut worst = 0.0f64;
        for _ in 0..cfg.samples {
            let f = rng.random_range(-3.0..3.0);
            let g = rng.random_range(-3.0..3.0);
            worst = worst.max(identity_residual(p, f, g)?);
        }
        let ok = worst <= tol;
        pass &= ok;
        rows.push(json!({
            "p": p,
            "max_residual": worst,
            "tolerance": tol,
            "cp_estimate": cp_estimate(p)?,
            "pass": ok,
        }));
    }
    Ok(json_output(&json!({ "config": cfg, "identity": rows, "pass": pass }), pass))
}

fn bump_reports<F>(cfg: &RunConfig, gauge: &Gauge, mut check: F) -> Result<(Vec<ChainReport>, bool), Failure>
where
    F: FnMut(&dyn sharp_hardy::testfns::TestFunction, &QuadSettings) -> Result<Vec<ChainReport>, Error>,
{
    let mut reports = Vec::new();
    for i in 0..cfg.bumps as u64 {
        let seed = cfg.seed.wrapping_add(i);
        let u = make_random_bump(gauge, seed, (0.5, 2.0))?;
        let quad = QuadSettings { mc: McSettings::new(cfg.samples, seed).with_policy(cfg.policy), sigmas: 3.0 };
        reports.extend(check(&u, &quad)?);
    }
    let pass = reports.iter().all(|r| r.verdict.pass);
    Ok((reports, pass))
}

pub fn verify_hardy(cfg: &RunConfig) -> Result<Output, Failure> {
    let (spec, gauge, params) = setup(cfg)?;
    let (reports, pass) = bump_reports(cfg, &gauge, |u, quad| {
        Ok(vec![hardy_chain(&gauge, &params, u, quad)?, auxiliary_hardy_check(&gauge, &params, u, quad)?])
    })?;
    let doc = json!({ "config": cfg, "frame": spec, "params": params, "reports": reports, "pass": pass });
    Ok(json_output(&doc, pass))
}

pub fn verify_rellich(cfg: &RunConfig) -> Result<Output, Failure> {
    let (spec, gauge, params) = setup(cfg)?;
    let adm = rellich_admissible(&params, &spec);
    if !adm.admissible {
        return Err(Failure::Config(format!("rellich not admissible: {}", adm.failed.join("; "))));
    }
    let (reports, pass) = bump_reports(cfg, &gauge, |u, quad| Ok(vec![rellich_check(&gauge, &params, u, quad)?]))?;
    let doc = json!({
        "config": cfg,
        "frame": spec,
        "params": params,
        "rellich_admissibility": adm,
        "reports": reports,
        "pass": pass,
    });
    Ok(json_output(&doc, pass))
}

/// Fit tolerance: 1% on Euclidean space, 2% elsewhere.
pub fn sweep_tolerance(spec: &FrameSpec) -> f64 {
    if matches!(spec, FrameSpec::Euclidean { .. }) {
        0.01
    } else {
        0.02
    }
}

pub fn sharpness(cfg: &RunConfig, csv: bool) -> Result<Output, Failure> {
    let (spec, gauge, params) = setup(cfg)?;
    let report = sharpness_sweep(&gauge, &params, cfg.inequality, &cfg.eps_grid, cfg.policy)?;
    let tol = sweep_tolerance(&spec);
    let pass = report.relative_error <= tol && report.bounded_below;
    if csv {
        return Ok(Output { body: report.to_csv(), pass });
    }
    let doc = json!({
        "config": cfg,
        "frame": spec,
        "params": params,
        "sweep": report,
        "tolerance": tol,
        "pass": pass,
    });
    Ok(json_output(&doc, pass))
}

pub fn harmonicity(cfg: &RunConfig) -> Result<Output, Failure> {
    let spec = cfg.frame()?;
    let (_, gauge) = make_frame(spec)?;
    let report = harmonicity_audit(&gauge, &cfg.p_list_or(&[2.0, 3.0, 4.0]), cfg.samples, cfg.seed, cfg.policy)?;
    let pass = report.pass;
    Ok(json_output(&json!({ "config": cfg, "harmonicity": report }), pass))
}

fn selftest_frames() -> [FrameSpec; 4] {
    [
        FrameSpec::Euclidean { n: 5 },
        FrameSpec::Heisenberg { n: 1 },
        FrameSpec::HeisenbergGreiner { n: 1, gamma: 2.0 },
        FrameSpec::BaouendiGrushin { n: 2, k: 1, gamma: 1.0 },
    ]
}

/// A reduced battery with fixed seeds: identity, Hardy chains, sweeps and
/// harmonicity on each frame.
pub fn selftest(cfg: &RunConfig) -> Result<Output, Failure> {
    let mut items: Vec<Value> = Vec::new();
    let mut record = |name: String, pass: bool, detail: Value| items.push(json!({ "check": name, "pass": pass, "detail": detail }));

    let id_cfg = RunConfig { p_list: vec![2.0, 2.5, 3.0, 4.0, 6.0], samples: 10_000, ..cfg.clone() };
    let id = identity(&id_cfg)?;
    record("identity".into(), id.pass, Value::Null);

    for spec in selftest_frames() {
        let (_, gauge) = make_frame(spec)?;
        let params = InequalityParams::new(2.0, 1.0, gauge.gauge_exponent())?;
        let quad = QuadSettings { mc: McSettings::new(20_000, cfg.seed).with_policy(cfg.policy), sigmas: 3.0 };
        let mut chains_ok = true;
        for i in 0..5 {
            let u = make_random_bump(&gauge, cfg.seed.wrapping_add(i), (0.5, 2.0))?;
            chains_ok &= hardy_chain(&gauge, &params, &u, &quad)?.verdict.pass;
        }
        record(format!("hardy_chain {spec}"), chains_ok, Value::Null);

        let sweep = sharpness_sweep(&gauge, &params, Inequality::Hardy, &crate::config::DEFAULT_EPS_GRID, cfg.policy)?;
        let ok = sweep.relative_error <= sweep_tolerance(&spec) && sweep.bounded_below;
        record(format!("hardy_sweep {spec}"), ok, json!({ "relative_error": sweep.relative_error }));

        let audit = harmonicity_audit(&gauge, &[2.0, 3.0, 4.0], 200, cfg.seed, cfg.policy)?;
        record(format!("harmonicity {spec}"), audit.pass, Value::Null);
    }

    let pass = items.iter().all(|i| i["pass"] == Value::Bool(true));
    Ok(json_output(&json!({ "config": cfg, "checks": items, "pass": pass }), pass))
}
