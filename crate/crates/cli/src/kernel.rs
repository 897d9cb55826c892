use ktensor_core::kernelsolve::{
    conformal_span_basis, parity_and_flatness_tol, predicted_conformal_dimension, subspace_compare,
    LinearSolve,
};
use ktensor_core::report::{envelope, kernel_result, parse_band};
use ktensor_core::{
    assemble_operator, compute_kernel, predicted_dimension, span_basis, Arith, ConformalFactor,
    OperatorVariant, Rational, Result, RunConfig,
};
use serde_json::{json, Value};

use crate::args::{KernelArgs, Variant};
use crate::output::{emit, write_file, Timer};

pub fn run(args: &KernelArgs) -> Result<bool> {
    let c = &args.common;
    let factor = ConformalFactor::parse(&c.factor)?;
    let arith: Arith = c.arith.parse()?;
    let mut cfg = RunConfig::new("kernel", c.n, c.p, factor, arith);
    if let Some(band) = &c.band {
        cfg.band = parse_band(band, c.n)?;
    }
    cfg.tol = c.tol;
    cfg.output = args.output.out.as_ref().map(|p| p.display().to_string());
    cfg.validate()?;
    let variant = match args.variant {
        Variant::Killing => OperatorVariant::Killing,
        Variant::ConformalKilling => OperatorVariant::ConformalKilling,
    };
    match arith {
        Arith::Exact => compute::<Rational>(&cfg, variant, args),
        Arith::Float => compute::<f64>(&cfg, variant, args),
    }
}

fn compute<S: LinearSolve>(cfg: &RunConfig, variant: OperatorVariant, args: &KernelArgs) -> Result<bool> {
    let (n, p) = (cfg.n, cfg.p);
    let mut timer = Timer::default();
    if let Some(path) = &args.dump_matrix {
        let asm = timer.time("assemble", || assemble_operator::<S>(n, p, &cfg.factor, &cfg.band, variant))?;
        write_file(path, &asm.map.to_coo_text())?;
    }
    let kernel = timer.time("kernel", || compute_kernel::<S>(n, p, &cfg.factor, &cfg.band, variant, cfg.tol))?;

    let (span, predicted) = match variant {
        OperatorVariant::Killing => (
            span_basis::<S>(n, p, &cfg.factor).ok(),
            predicted_dimension(n, p, &cfg.factor),
        ),
        OperatorVariant::ConformalKilling => (
            Some(conformal_span_basis::<S>(n, p)),
            predicted_conformal_dimension(n, p),
        ),
    };
    let rel_tol = match cfg.arith {
        Arith::Exact => 0.0,
        Arith::Float => cfg.tol,
    };
    let relation = match &span {
        Some(span) => Some(timer.time("compare", || subspace_compare(&kernel, span, rel_tol))?),
        None => None,
    };
    let checks: Vec<_> = kernel.basis.iter().map(|k| parity_and_flatness_tol(k, rel_tol)).collect();

    let mut result = kernel_result(&kernel, predicted);
    if let Value::Object(map) = &mut result {
        map.insert("span_contained".into(), json!(relation.map(|r| r.contained)));
        map.insert("span_equals".into(), json!(relation.map(|r| r.equal)));
        map.insert("parity_ok".into(), json!(checks.iter().all(|c| c.parity_ok)));
        map.insert("flatness_ok".into(), json!(checks.iter().all(|c| c.flatness_ok)));
    }
    let mut config = serde_json::to_value(cfg).expect("config serializes");
    config["variant"] = json!(kernel.meta.variant);
    for w in &kernel.warnings {
        eprintln!("warning: {w}");
    }
    emit(
        &envelope(&config, result, timer.report(args.output.timings)),
        args.output.out.as_deref(),
    )?;
    Ok(kernel.warnings.is_empty())
}
