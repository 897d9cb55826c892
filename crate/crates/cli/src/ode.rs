use ktensor_core::odelemma::{
    dj_sum_forces_zero, dj_sum_polynomial, eqj_coefficients, initial_values, max_oracle_error,
    numeric_ode_oracle, recursion, samples_to_csv, specialized_constants, CosFn, PolyInPhi,
};
use ktensor_core::random::TensorSampler;
use ktensor_core::report::envelope;
use ktensor_core::scalar::parse_rational;
use ktensor_core::{Error, Rational, Result, Scalar};
use serde_json::{json, Value};

use crate::args::OdeArgs;
use crate::output::{emit, write_file, Timer};

fn q(x: &Rational) -> Value {
    x.to_json()
}

fn poly_json(p: &PolyInPhi<Rational>) -> Value {
    Value::Array(p.coeffs().iter().map(q).collect())
}

fn parse_list(spec: &str) -> Result<Vec<Rational>> {
    if spec.trim().is_empty() {
        return Ok(Vec::new());
    }
    spec.split(',').map(parse_rational).collect()
}

pub fn run(args: &OdeArgs) -> Result<bool> {
    if !(args.amplitude.is_finite() && args.interval.is_finite() && args.interval > 0.0) {
        return Err(Error::Config("amplitude must be finite and the interval positive".into()));
    }
    let mut timer = Timer::default();
    let mut sampler = TensorSampler::new(args.seed);
    let mut result = serde_json::Map::new();

    let (bs, cs, raw) = match (args.raw, args.n, args.p) {
        (Some(depth), _, _) => {
            if depth == 0 {
                return Err(Error::Config("raw depth must be at least 1".into()));
            }
            let bs: Vec<Rational> = (0..depth).map(|_| sampler.rational()).collect();
            let cs: Vec<Rational> = (0..depth).map(|_| sampler.rational()).collect();
            (bs, cs, true)
        }
        (None, Some(n), Some(p)) => {
            let (bs, cs) = specialized_constants(n, p)?;
            let js: Vec<usize> = match args.j {
                Some(j) => vec![j],
                None => (0..=bs.len()).collect(),
            };
            let mut equations = Vec::new();
            for j in js {
                let e = eqj_coefficients(n, p, j)?;
                let mut entry = json!({
                    "j": j,
                    "lhs_alpha_prime": q(&e.lhs_alpha_prime),
                    "lhs_f_alpha": q(&e.lhs_f_alpha),
                    "rhs_alpha_prime": q(&e.rhs_alpha_prime),
                    "rhs_f_alpha": q(&e.rhs_f_alpha),
                });
                if j > 0 {
                    let (b, c) = e.normalized();
                    entry["b"] = q(&b);
                    entry["c"] = q(&c);
                }
                equations.push(entry);
            }
            result.insert("equations".into(), Value::Array(equations));
            (bs, cs, false)
        }
        _ => return Err(Error::Config("give either -n and -p or --raw <depth>".into())),
    };

    let alpha0 = match &args.alpha0 {
        Some(s) => parse_rational(s)?,
        None if raw => sampler.nonzero_rational(),
        None => Rational::from_i64(1),
    };
    let constants = match &args.constants {
        Some(s) => parse_list(s)?,
        None if raw => (0..bs.len()).map(|_| sampler.rational()).collect(),
        None => vec![Rational::from_i64(0); bs.len()],
    };
    if constants.len() != bs.len() {
        return Err(Error::Config(format!(
            "expected {} integration constants, got {}",
            bs.len(),
            constants.len()
        )));
    }

    let polys = timer.time("recursion", || recursion(&alpha0, &bs, &cs, &constants));
    let f = CosFn { amp: args.amplitude };
    let bf: Vec<f64> = bs.iter().map(|x| x.to_f64()).collect();
    let cf: Vec<f64> = cs.iter().map(|x| x.to_f64()).collect();
    let init = initial_values(&polys, &f, 0.0);
    let samples = timer.time("oracle", || {
        numeric_ode_oracle(&bf, &cf, &f, (0.0, args.interval), &init, args.steps)
    })?;
    let err = max_oracle_error(&polys, &f, &samples);
    let mut ok = err < args.tol && !samples.unstable;

    result.insert("b".into(), Value::Array(bs.iter().map(q).collect()));
    result.insert("c".into(), Value::Array(cs.iter().map(q).collect()));
    result.insert("alpha0".into(), q(&alpha0));
    result.insert("constants".into(), Value::Array(constants.iter().map(q).collect()));
    result.insert("polynomials".into(), Value::Array(polys.iter().map(poly_json).collect()));
    result.insert("all_zero".into(), json!(polys.iter().all(PolyInPhi::is_zero)));
    result.insert("oracle_error".into(), json!(err));
    result.insert("oracle_unstable".into(), json!(samples.unstable));
    if let (false, Some(n), Some(p)) = (raw, args.n, args.p) {
        let forces = dj_sum_forces_zero(n, p)?;
        let sum = dj_sum_polynomial(n, p, &alpha0, &constants)?;
        result.insert("dj_sum".into(), poly_json(&sum));
        result.insert("dj_sum_forces_zero".into(), json!(forces));
        ok &= forces;
    }
    result.insert("ok".into(), json!(ok));

    if let Some(path) = &args.csv {
        write_file(path, &samples_to_csv(&samples, &f))?;
    }
    let config = json!({
        "command": "ode-lemma",
        "mode": if raw { "raw" } else { "specialized" },
        "n": args.n,
        "p": args.p,
        "j": args.j,
        "depth": bs.len(),
        "seed": args.seed,
        "amplitude": args.amplitude,
        "interval": args.interval,
        "steps": args.steps,
        "tol": args.tol,
    });
    emit(
        &envelope(&config, Value::Object(result), timer.report(args.output.timings)),
        args.output.out.as_deref(),
    )?;
    Ok(ok)
}
