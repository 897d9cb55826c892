//! Run configuration and the versioned JSON report envelope.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::kernelsolve::{KernelBasis, VerificationReport, DEFAULT_SVD_TOL};
use crate::scalar::{Arith, Scalar};
use crate::torusfn::ConformalFactor;

pub const SCHEMA_VERSION: u32 = 1;

/// Fully resolved configuration, embedded verbatim in every report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub n: usize,
    pub p: usize,
    #[serde(serialize_with = "factor_spec")]
    pub factor: ConformalFactor,
    pub band: Vec<u32>,
    pub arith: Arith,
    pub tol: f64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

fn factor_spec<S: serde::Serializer>(f: &ConformalFactor, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&f.spec_string())
}

impl RunConfig {
    /// Config with the default band for `(n, p, factor)`.
    pub fn new(command: &str, n: usize, p: usize, factor: ConformalFactor, arith: Arith) -> Self {
        let band = default_band(n, p, &factor);
        RunConfig {
            command: command.to_string(),
            n,
            p,
            factor,
            band,
            arith,
            tol: DEFAULT_SVD_TOL,
            seed: 0,
            output: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::Config("n must be at least 1".into()));
        }
        if self.band.len() != self.n {
            return Err(Error::DimensionMismatch(self.band.len(), self.n));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::Config(format!("tolerance must lie in (0, 1), got {}", self.tol)));
        }
        self.factor.validate()
    }
}

/// Transverse band 1 and last-axis band `⌊p/2⌋ + 1`; band 1 everywhere for
/// the flat factor.
pub fn default_band(n: usize, p: usize, factor: &ConformalFactor) -> Vec<u32> {
    let mut band = vec![1; n];
    if factor.is_flat() {
        return band;
    }
    if let Some(last) = band.last_mut() {
        *last = (p / 2) as u32 + 1;
    }
    band
}

/// Comma list with one entry per axis, or a single value for all axes.
pub fn parse_band(spec: &str, n: usize) -> Result<Vec<u32>> {
    let values = spec
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<u32>()
                .map_err(|_| Error::Config(format!("invalid band entry `{}`", t.trim())))
        })
        .collect::<Result<Vec<_>>>()?;
    match values.len() {
        1 => Ok(vec![values[0]; n]),
        len if len == n => Ok(values),
        len => Err(Error::Config(format!(
            "band lists {len} entries for a {n}-torus"
        ))),
    }
}

/// `{schema, config, result, timings_ms}`. Timings are only filled in when
/// requested, so that reports stay byte-identical across runs.
pub fn envelope(config: &impl Serialize, result: Value, timings: Option<&BTreeMap<String, f64>>) -> Value {
    json!({
        "schema": SCHEMA_VERSION,
        "config": config,
        "result": result,
        "timings_ms": timings.cloned().unwrap_or_default(),
    })
}

/// Verification fields plus an optional basis dump.
pub fn verification_result<S: Scalar>(
    report: &VerificationReport,
    basis: Option<&KernelBasis<S>>,
) -> Value {
    let mut value = serde_json::to_value(report).expect("report serializes");
    if let (Some(kernel), Value::Object(map)) = (basis, &mut value) {
        map.insert(
            "basis".into(),
            Value::Array(kernel.basis.iter().map(|k| k.to_json()).collect()),
        );
    }
    value
}

/// Kernel-only result: dimension, prediction, residual and the basis.
pub fn kernel_result<S: Scalar>(kernel: &KernelBasis<S>, predicted_dim: usize) -> Value {
    json!({
        "kernel_dim": kernel.dimension(),
        "predicted_dim": predicted_dim,
        "residual_max": kernel.residual_max,
        "singular_gap": kernel.singular_gap,
        "variant": kernel.meta.variant,
        "warnings": kernel.warnings,
        "basis": kernel.basis.iter().map(|k| k.to_json()).collect::<Vec<_>>(),
    })
}

/// Pretty JSON with a trailing newline.
pub fn to_pretty(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json value serializes");
    s.push('\n');
    s
}
