use std::path::Path;

use ktensor_core::kernelsolve::{verify_theorem_typed, LinearSolve};
use ktensor_core::report::{envelope, parse_band, verification_result, SCHEMA_VERSION};
use ktensor_core::{Arith, ConformalFactor, Error, Rational, Result, RunConfig, VerificationReport, VerifyOptions};
use rayon::prelude::*;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::args::VerifyArgs;
use crate::output::{emit, Timer};

/// `(n, p)` pairs of the default suite; the band defaults to `⌊p/2⌋ + 1`
/// on the last axis.
const DEFAULT_SUITE: [(usize, usize); 8] = [(2, 1), (2, 2), (2, 3), (2, 4), (2, 5), (3, 1), (3, 2), (3, 3)];

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SuiteEntry {
    n: usize,
    p: usize,
    factor: Option<String>,
    band: Option<String>,
    arith: Option<String>,
}

fn resolve(
    n: usize,
    p: usize,
    factor: &str,
    band: Option<&str>,
    arith: &str,
    tol: f64,
) -> Result<RunConfig> {
    let mut cfg = RunConfig::new("verify", n, p, ConformalFactor::parse(factor)?, arith.parse()?);
    if let Some(band) = band {
        cfg.band = parse_band(band, n)?;
    }
    cfg.tol = tol;
    cfg.validate()?;
    Ok(cfg)
}

fn load_suite(path: &Path, args: &VerifyArgs) -> Result<Vec<RunConfig>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let entries: Vec<SuiteEntry> = serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("invalid suite {}: {e}", path.display())))?;
    entries
        .iter()
        .map(|e| {
            resolve(
                e.n,
                e.p,
                e.factor.as_deref().unwrap_or(&args.factor),
                e.band.as_deref(),
                e.arith.as_deref().unwrap_or(&args.arith),
                args.tol,
            )
        })
        .collect()
}

fn configs(args: &VerifyArgs) -> Result<Vec<RunConfig>> {
    if let Some(path) = &args.suite {
        return load_suite(path, args);
    }
    match (args.n, args.p) {
        (Some(n), Some(p)) => Ok(vec![resolve(n, p, &args.factor, args.band.as_deref(), &args.arith, args.tol)?]),
        _ => DEFAULT_SUITE
            .iter()
            .map(|&(n, p)| resolve(n, p, &args.factor, None, &args.arith, args.tol))
            .collect(),
    }
}

fn run_typed<S: LinearSolve>(cfg: &RunConfig, opts: VerifyOptions, basis: bool) -> Result<(VerificationReport, Value)> {
    let (report, kernel) = verify_theorem_typed::<S>(cfg.n, cfg.p, &cfg.factor, &cfg.band, opts)?;
    let value = verification_result(&report, basis.then_some(&kernel));
    Ok((report, value))
}

fn run_one(cfg: &RunConfig, args: &VerifyArgs) -> Result<(bool, Value)> {
    let opts = VerifyOptions {
        tol: cfg.tol,
        stability_check: !args.no_stability,
    };
    let mut timer = Timer::default();
    let (report, result) = timer.time("total", || match cfg.arith {
        Arith::Exact => run_typed::<Rational>(cfg, opts, args.basis),
        Arith::Float => run_typed::<f64>(cfg, opts, args.basis),
    })?;
    timer.entries.extend(report.timings_ms.clone());
    let ok = report.span_equals && report.warnings.is_empty();
    eprintln!(
        "n={} p={} factor={} band={:?}: kernel {} predicted {} span_equals {} {}",
        cfg.n,
        cfg.p,
        cfg.factor,
        cfg.band,
        report.kernel_dim,
        report.predicted_dim,
        report.span_equals,
        if ok { "ok" } else { "FAIL" }
    );
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    Ok((ok, envelope(cfg, result, timer.report(args.output.timings))))
}

pub fn run(args: &VerifyArgs) -> Result<bool> {
    let mut configs = configs(args)?;
    let out = args.output.out.as_ref().map(|p| p.display().to_string());
    for cfg in &mut configs {
        cfg.output = out.clone();
    }
    let single = args.n.is_some() && args.suite.is_none();
    let results: Vec<Result<(bool, Value)>> = match args.jobs {
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build()
            .map_err(|e| Error::Config(format!("cannot build a pool of {jobs} jobs: {e}")))?
            .install(|| configs.par_iter().map(|c| run_one(c, args)).collect()),
        None => configs.par_iter().map(|c| run_one(c, args)).collect(),
    };
    let results: Vec<(bool, Value)> = results.into_iter().collect::<Result<_>>()?;
    let ok = results.iter().all(|r| r.0);
    let value = if single {
        results.into_iter().next().expect("one report").1
    } else {
        json!({
            "schema": SCHEMA_VERSION,
            "reports": results.into_iter().map(|r| r.1).collect::<Vec<_>>(),
        })
    };
    emit(&value, args.output.out.as_deref())?;
    Ok(ok)
}
