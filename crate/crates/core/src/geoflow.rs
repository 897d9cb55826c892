//! Geodesic flow of `e^{2f} g` on `T*T^n` and drift of candidate first
//! integrals.
//!
//! `H = ½ e^{-2f(x_n)} |mom|²`; the flow is
//! `x' = e^{-2f} mom`, `mom_i' = 0` for `i < n`,
//! `mom_n' = -½ (e^{-2f})' |mom|²`.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};
use crate::symalg::{MultiIndex, SymTensorField};
use crate::torusfn::ConformalFactor;

pub const MIDPOINT_TOL: f64 = 1e-13;
pub const MIDPOINT_MAX_ITER: usize = 50;

/// Names accepted by [`negative_control`].
pub const NEGATIVE_CONTROLS: [&str; 3] = ["xn", "xn2", "flat-l"];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeodesicState {
    pub x: Vec<f64>,
    pub mom: Vec<f64>,
    pub t: f64,
}

impl GeodesicState {
    /// Reduces coordinates to `[0, 2π)`.
    pub fn new(x: Vec<f64>, mom: Vec<f64>, t: f64) -> Result<Self> {
        if x.len() != mom.len() {
            return Err(Error::DimensionMismatch(x.len(), mom.len()));
        }
        if x.is_empty() {
            return Err(Error::Config("empty state".into()));
        }
        if !x.iter().chain(&mom).chain([&t]).all(|v| v.is_finite()) {
            return Err(Error::Config("non-finite state".into()));
        }
        let mut s = GeodesicState { x, mom, t };
        s.reduce();
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    fn reduce(&mut self) {
        for v in &mut self.x {
            *v = v.rem_euclid(TAU);
            // rem_euclid can round up to exactly TAU
            if *v >= TAU {
                *v = 0.0;
            }
        }
    }
}

fn norm_sq(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

pub fn hamiltonian(s: &GeodesicState, factor: &ConformalFactor) -> f64 {
    0.5 * factor.emin2f(s.x[s.dim() - 1]) * norm_sq(&s.mom)
}

/// One implicit-midpoint step, solved by fixed-point iteration.
pub fn step_midpoint(s: &GeodesicState, h: f64, factor: &ConformalFactor) -> Result<GeodesicState> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Config(format!("step size must be positive, got {h}")));
    }
    let n = s.dim();
    let last = n - 1;
    let mut x1 = s.x.clone();
    let mut pn1 = s.mom[last];
    let mut mid = s.mom.clone();
    for _ in 0..MIDPOINT_MAX_ITER {
        let xn_mid = 0.5 * (s.x[last] + x1[last]);
        mid[last] = 0.5 * (s.mom[last] + pn1);
        let w = factor.emin2f(xn_mid);
        let wp = factor.emin2f_prime(xn_mid);
        let p2 = norm_sq(&mid);
        let mut change: f64 = 0.0;
        for i in 0..n {
            let next = s.x[i] + h * w * mid[i];
            change = change.max((next - x1[i]).abs() / next.abs().max(1.0));
            x1[i] = next;
        }
        let next = s.mom[last] - 0.5 * h * wp * p2;
        change = change.max((next - pn1).abs() / next.abs().max(1.0));
        pn1 = next;
        if !pn1.is_finite() || !x1.iter().all(|v| v.is_finite()) {
            break;
        }
        if change <= MIDPOINT_TOL {
            let mut mom = s.mom.clone();
            mom[last] = pn1;
            let mut out = GeodesicState {
                x: x1,
                mom,
                t: s.t + h,
            };
            out.reduce();
            return Ok(out);
        }
    }
    Err(Error::NonConvergence { t: s.t })
}

/// `N_K(x, mom)` flattened for repeated evaluation.
#[derive(Clone, Debug)]
pub struct PhaseFunction {
    terms: Vec<(Vec<i32>, Vec<(Vec<f64>, f64, f64)>)>,
}

impl PhaseFunction {
    pub fn new(k: &SymTensorField<f64>) -> Self {
        let terms = k
            .coeffs()
            .iter()
            .map(|(a, c)| {
                let exps = a.0.iter().map(|&e| e as i32).collect();
                let modes = c
                    .terms()
                    .map(|(freq, cs, sn)| {
                        (freq.0.iter().map(|&f| f as f64).collect(), *cs, *sn)
                    })
                    .collect();
                (exps, modes)
            })
            .collect();
        PhaseFunction { terms }
    }

    pub fn eval(&self, x: &[f64], mom: &[f64]) -> f64 {
        let mut total = 0.0;
        for (exps, modes) in &self.terms {
            let mono: f64 = exps.iter().zip(mom).map(|(&e, &p)| p.powi(e)).product();
            let coeff: f64 = modes
                .iter()
                .map(|(k, c, s)| {
                    let phase: f64 = k.iter().zip(x).map(|(a, b)| a * b).sum();
                    let (sin, cos) = if *s == 0.0 { (0.0, phase.cos()) } else { phase.sin_cos() };
                    c * cos + s * sin
                })
                .sum();
            total += mono * coeff;
        }
        total
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DriftReport {
    pub name: String,
    pub initial: f64,
    pub max_abs: f64,
    /// `max_abs / max(1, |initial|)`.
    pub relative: f64,
    pub h: f64,
    pub t_end: f64,
    /// Relative drift of the Hamiltonian, same denominator rule.
    pub energy_drift: f64,
}

fn relative(max_abs: f64, initial: f64) -> f64 {
    max_abs / initial.abs().max(1.0)
}

/// Integrates once from `s0` and reports the drift of every integral along
/// the shared trajectory.
pub fn drift_reports(
    integrals: &[(String, &SymTensorField<f64>)],
    s0: &GeodesicState,
    factor: &ConformalFactor,
    h: f64,
    t_end: f64,
) -> Result<Vec<DriftReport>> {
    for (_, k) in integrals {
        if k.dim() != s0.dim() {
            return Err(Error::DimensionMismatch(k.dim(), s0.dim()));
        }
        if k.degree() < 1 {
            return Err(Error::Config("integrals need degree at least 1".into()));
        }
    }
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::Config(format!("horizon must be non-negative, got {t_end}")));
    }
    let funcs: Vec<PhaseFunction> = integrals.iter().map(|(_, k)| PhaseFunction::new(k)).collect();
    let initial: Vec<f64> = funcs.iter().map(|f| f.eval(&s0.x, &s0.mom)).collect();
    let h0 = hamiltonian(s0, factor);
    let mut max_abs = vec![0.0f64; funcs.len()];
    let mut energy: f64 = 0.0;
    let steps = (t_end / h).round() as usize;
    let mut s = s0.clone();
    for _ in 0..steps {
        s = step_midpoint(&s, h, factor)?;
        for ((f, m), f0) in funcs.iter().zip(&mut max_abs).zip(&initial) {
            *m = m.max((f.eval(&s.x, &s.mom) - f0).abs());
        }
        energy = energy.max((hamiltonian(&s, factor) - h0).abs());
    }
    let energy_drift = relative(energy, h0);
    Ok(integrals
        .iter()
        .zip(initial)
        .zip(max_abs)
        .map(|(((name, _), initial), max_abs)| DriftReport {
            name: name.clone(),
            initial,
            max_abs,
            relative: relative(max_abs, initial),
            h,
            t_end,
            energy_drift,
        })
        .collect())
}

pub fn drift_report(
    name: &str,
    k: &SymTensorField<f64>,
    s0: &GeodesicState,
    factor: &ConformalFactor,
    h: f64,
    t_end: f64,
) -> Result<DriftReport> {
    Ok(drift_reports(&[(name.to_string(), k)], s0, factor, h, t_end)?.remove(0))
}

/// Reproducible initial states with `|mom_n| >= 1/2`, so the trajectory
/// actually moves across the conformal factor.
pub fn seeded_states(n: usize, count: usize, seed: u64) -> Vec<GeodesicState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..TAU)).collect();
            let mut mom: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            mom[n - 1] = sign * rng.random_range(0.5..1.0);
            GeodesicState::new(x, mom, 0.0).expect("finite state")
        })
        .collect()
}

/// Fixed tensors that are not first integrals of a nonflat conformal flow:
/// `xn = ξ_n`, `xn2 = ξ_n²`, `flat-l = |ξ|²`.
pub fn negative_control(name: &str, n: usize) -> Result<SymTensorField<Rational>> {
    if n < 1 {
        return Err(Error::Config("n must be positive".into()));
    }
    let one = Rational::from_i64(1);
    match name {
        "xn" => Ok(SymTensorField::basis_vector(n, n - 1)),
        "xn2" => {
            let mut a = vec![0; n];
            a[n - 1] = 2;
            Ok(SymTensorField::constant_monomial(MultiIndex(a), one))
        }
        "flat-l" => Ok(SymTensorField::metric_l(n)),
        _ => Err(Error::Config(format!(
            "unknown control `{name}`, expected one of {}",
            NEGATIVE_CONTROLS.join(", ")
        ))),
    }
}

/// CSV rows `t, x_1.., mom_1.., H, F_1..` every `stride` steps.
pub fn trajectory_csv(
    integrals: &[(String, &SymTensorField<f64>)],
    s0: &GeodesicState,
    factor: &ConformalFactor,
    h: f64,
    t_end: f64,
    stride: usize,
) -> Result<String> {
    let n = s0.dim();
    let funcs: Vec<PhaseFunction> = integrals.iter().map(|(_, k)| PhaseFunction::new(k)).collect();
    let mut out = String::from("t");
    for i in 1..=n {
        let _ = write!(out, ",x_{i}");
    }
    for i in 1..=n {
        let _ = write!(out, ",mom_{i}");
    }
    out.push_str(",H");
    for (name, _) in integrals {
        let _ = write!(out, ",{name}");
    }
    out.push('\n');
    let row = |s: &GeodesicState, out: &mut String| {
        let _ = write!(out, "{:.12e}", s.t);
        for v in s.x.iter().chain(&s.mom) {
            let _ = write!(out, ",{v:.12e}");
        }
        let _ = write!(out, ",{:.12e}", hamiltonian(s, factor));
        for f in &funcs {
            let _ = write!(out, ",{:.12e}", f.eval(&s.x, &s.mom));
        }
        out.push('\n');
    };
    let stride = stride.max(1);
    let steps = (t_end / h).round() as usize;
    let mut s = s0.clone();
    row(&s, &mut out);
    for i in 1..=steps {
        s = step_midpoint(&s, h, factor)?;
        if i % stride == 0 || i == steps {
            row(&s, &mut out);
        }
    }
    Ok(out)
}
