use ktensor_core::geoflow::{drift_reports, negative_control, seeded_states, trajectory_csv, NEGATIVE_CONTROLS};
use ktensor_core::report::{default_band, envelope, parse_band};
use ktensor_core::{
    compute_kernel, span_basis, ConformalFactor, DriftReport, Error, OperatorVariant, Rational, Result,
    SymTensorField,
};
use rayon::prelude::*;
use serde_json::json;

use crate::args::GeodesicArgs;
use crate::output::{emit, write_file, Timer};

#[derive(Clone, Copy, PartialEq, Eq)]
enum Role {
    Integral,
    Control,
}

struct Candidate {
    name: String,
    role: Role,
    field: SymTensorField<f64>,
}

fn index(spec: &str, rest: &str, len: usize) -> Result<usize> {
    let i: usize = rest
        .parse()
        .map_err(|_| Error::Config(format!("invalid index in `{spec}`")))?;
    if i >= len {
        return Err(Error::IndexRange {
            index: i,
            lo: 0,
            hi: len.saturating_sub(1),
        });
    }
    Ok(i)
}

fn candidates(args: &GeodesicArgs, factor: &ConformalFactor, band: &[u32], timer: &mut Timer) -> Result<Vec<Candidate>> {
    let (n, p) = (args.n, args.p);
    let mut kernel: Option<Vec<SymTensorField<Rational>>> = None;
    let mut kernel_basis = |timer: &mut Timer| -> Result<Vec<SymTensorField<Rational>>> {
        if kernel.is_none() {
            let k = timer.time("kernel", || {
                compute_kernel::<Rational>(n, p, factor, band, OperatorVariant::Killing, 0.0)
            })?;
            kernel = Some(k.basis);
        }
        Ok(kernel.clone().expect("kernel computed"))
    };
    let mut specs = args.integrals.clone();
    if specs.is_empty() {
        let dim = kernel_basis(timer)?.len();
        specs.extend((0..dim).map(|i| format!("from-kernel:{i}")));
        if !factor.is_flat() {
            specs.extend(NEGATIVE_CONTROLS.iter().map(|c| format!("control:{c}")));
        }
    }
    let mut out = Vec::new();
    for spec in specs {
        let (kind, rest) = spec
            .split_once(':')
            .ok_or_else(|| Error::Config(format!("expected kind:value, got `{spec}`")))?;
        let (role, field) = match kind {
            "from-kernel" => {
                let basis = kernel_basis(timer)?;
                (Role::Integral, basis[index(&spec, rest, basis.len())?].clone())
            }
            "span" => {
                let basis = span_basis::<Rational>(n, p, factor)?;
                (Role::Integral, basis[index(&spec, rest, basis.len())?].clone())
            }
            "control" => (Role::Control, negative_control(rest, n)?),
            _ => {
                return Err(Error::Config(format!(
                    "unknown integral kind `{kind}`, expected from-kernel, span or control"
                )))
            }
        };
        out.push(Candidate {
            name: spec.clone(),
            role,
            field: field.to_f64(),
        });
    }
    Ok(out)
}

pub fn run(args: &GeodesicArgs) -> Result<bool> {
    let factor = ConformalFactor::parse(&args.factor)?;
    let n = args.n;
    if n < 1 {
        return Err(Error::Config("n must be at least 1".into()));
    }
    if !(args.dt > 0.0 && args.dt.is_finite()) {
        return Err(Error::Config(format!("step must be positive, got {}", args.dt)));
    }
    if args.states == 0 {
        return Err(Error::Config("need at least one initial state".into()));
    }
    let band = match &args.band {
        Some(b) => parse_band(b, n)?,
        None => default_band(n, args.p, &factor),
    };
    let mut timer = Timer::default();
    let cands = candidates(args, &factor, &band, &mut timer)?;
    let named: Vec<(String, &SymTensorField<f64>)> = cands.iter().map(|c| (c.name.clone(), &c.field)).collect();
    let states = seeded_states(n, args.states, args.seed);

    let per_state: Vec<Vec<DriftReport>> = timer.time("integrate", || {
        states
            .par_iter()
            .map(|s| drift_reports(&named, s, &factor, args.dt, args.t_end))
            .collect::<Result<_>>()
    })?;
    if let Some(path) = &args.csv {
        let csv = trajectory_csv(&named, &states[0], &factor, args.dt, args.t_end, args.csv_stride.max(1))?;
        write_file(path, &csv)?;
    }

    let mut ok = true;
    let mut integrals = Vec::new();
    for (i, c) in cands.iter().enumerate() {
        let rel: Vec<f64> = per_state.iter().map(|r| r[i].relative).collect();
        let max = rel.iter().copied().fold(0.0, f64::max);
        let min = rel.iter().copied().fold(f64::INFINITY, f64::min);
        let pass = match c.role {
            Role::Integral => max <= args.tol,
            Role::Control => min >= args.control_floor,
        };
        ok &= pass;
        eprintln!(
            "{}: max relative drift {max:.3e}, min {min:.3e} {}",
            c.name,
            if pass { "ok" } else { "FAIL" }
        );
        integrals.push(json!({
            "name": c.name,
            "role": if c.role == Role::Integral { "integral" } else { "control" },
            "max_relative": max,
            "min_relative": min,
            "pass": pass,
            "per_state": per_state.iter().map(|r| &r[i]).collect::<Vec<_>>(),
        }));
    }
    let energy = per_state
        .iter()
        .filter_map(|r| r.first().map(|d| d.energy_drift))
        .fold(0.0, f64::max);
    let result = json!({
        "integrals": integrals,
        "energy_drift_max": energy,
        "ok": ok,
    });
    let config = json!({
        "command": "geodesic",
        "n": n,
        "p": args.p,
        "factor": factor.spec_string(),
        "band": band,
        "integrals": cands.iter().map(|c| &c.name).collect::<Vec<_>>(),
        "dt": args.dt,
        "t_end": args.t_end,
        "states": args.states,
        "seed": args.seed,
        "tol": args.tol,
        "control_floor": args.control_floor,
    });
    emit(&envelope(&config, result, timer.report(args.output.timings)), args.output.out.as_deref())?;
    Ok(ok)
}
