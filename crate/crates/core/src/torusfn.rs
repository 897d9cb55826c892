//! Truncated real trigonometric series on the n-torus and the conformal
//! factor family `e^{2f}` with `f = f(x_n)`.
//!
//! A [`TorusScalar`] stores `Σ_k c_k cos(k·x) + s_k sin(k·x)` over canonical
//! frequency vectors `k` (first nonzero entry positive, or `k = 0`). Products
//! are evaluated with the product-to-sum identities, so exact rational
//! coefficients stay exact.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{format_rational, max_magnitude, parse_rational, Rational, Scalar};

/// Integer frequency vector of a Fourier mode.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Freq(pub Vec<i32>);

impl Freq {
    pub fn zero(n: usize) -> Self {
        Freq(vec![0; n])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&k| k == 0)
    }

    /// Canonical representative of `±k` together with the sign picked up by
    /// a sine coefficient.
    pub fn canonical(mut self) -> (Self, i32) {
        match self.0.iter().find(|&&k| k != 0) {
            Some(&first) if first < 0 => {
                self.0.iter_mut().for_each(|k| *k = -*k);
                (self, -1)
            }
            _ => (self, 1),
        }
    }

    pub fn is_canonical(&self) -> bool {
        self.0.iter().find(|&&k| k != 0).is_none_or(|&k| k > 0)
    }

    fn plus(&self, other: &Freq) -> Freq {
        Freq(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    fn minus(&self, other: &Freq) -> Freq {
        Freq(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn dot(&self, x: &[f64]) -> f64 {
        self.0.iter().zip(x).map(|(&k, &xi)| k as f64 * xi).sum()
    }

    pub fn within(&self, band: &[u32]) -> bool {
        self.0.iter().zip(band).all(|(&k, &m)| k.unsigned_abs() <= m)
    }

    /// Only the last axis carries a nonzero frequency.
    pub fn is_axial(&self) -> bool {
        let n = self.0.len();
        self.0[..n.saturating_sub(1)].iter().all(|&k| k == 0)
    }
}

impl fmt::Display for Freq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, k) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, ")")
    }
}

/// All canonical frequencies with `|k_i| <= band[i]`, in lexicographic order.
pub fn canonical_frequencies(band: &[u32]) -> Vec<Freq> {
    let mut out = Vec::new();
    let mut cur = vec![0i32; band.len()];
    fn rec(axis: usize, band: &[u32], cur: &mut Vec<i32>, out: &mut Vec<Freq>) {
        if axis == band.len() {
            let k = Freq(cur.clone());
            if k.is_canonical() {
                out.push(k);
            }
            return;
        }
        let m = band[axis] as i32;
        for v in -m..=m {
            cur[axis] = v;
            rec(axis + 1, band, cur, out);
        }
    }
    rec(0, band, &mut cur, &mut out);
    out
}

/// Trigonometric slot of a real Fourier coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Slot {
    Cos,
    Sin,
}

/// Truncated real trigonometric series on `T^n`. Equality compares the
/// series, not the band bookkeeping.
#[derive(Clone, Debug)]
pub struct TorusScalar<S> {
    band: Vec<u32>,
    terms: BTreeMap<Freq, (S, S)>,
}

impl<S: PartialEq> PartialEq for TorusScalar<S> {
    fn eq(&self, other: &Self) -> bool {
        self.band.len() == other.band.len() && self.terms == other.terms
    }
}

impl<S: Scalar> TorusScalar<S> {
    pub fn zero(n: usize) -> Self {
        TorusScalar {
            band: vec![0; n],
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, value: S) -> Self {
        let mut out = Self::zero(n);
        out.add_term(Freq::zero(n), value, S::zero());
        out.prune();
        out
    }

    /// Builds a series from raw `(k, cos, sin)` terms; `k` need not be
    /// canonical. The band is the smallest one containing every term.
    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (Freq, S, S)>) -> Self {
        let mut out = Self::zero(n);
        for (k, c, s) in terms {
            assert_eq!(k.dim(), n, "frequency dimension");
            for (b, &ki) in out.band.iter_mut().zip(&k.0) {
                *b = (*b).max(ki.unsigned_abs());
            }
            out.add_term(k, c, s);
        }
        out.prune();
        out
    }

    /// `amp · cos(k·x)` or `amp · sin(k·x)`.
    pub fn mode(n: usize, k: Freq, slot: Slot, amp: S) -> Self {
        match slot {
            Slot::Cos => Self::from_terms(n, [(k, amp, S::zero())]),
            Slot::Sin => Self::from_terms(n, [(k, S::zero(), amp)]),
        }
    }

    /// `c + a cos(x_axis)`.
    pub fn affine_cos(n: usize, axis: usize, c: S, a: S) -> Self {
        let mut k = vec![0; n];
        k[axis] = 1;
        Self::from_terms(n, [(Freq::zero(n), c, S::zero()), (Freq(k), a, S::zero())])
    }

    pub fn dim(&self) -> usize {
        self.band.len()
    }

    pub fn band(&self) -> &[u32] {
        &self.band
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Freq, &S, &S)> {
        self.terms.iter().map(|(k, (c, s))| (k, c, s))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, k: &Freq, slot: Slot) -> S {
        match (self.terms.get(k), slot) {
            (Some((c, _)), Slot::Cos) => c.clone(),
            (Some((_, s)), Slot::Sin) => s.clone(),
            (None, _) => S::zero(),
        }
    }

    /// Mean value over the torus (the `k = 0` cosine coefficient).
    pub fn mean(&self) -> S {
        self.coefficient(&Freq::zero(self.dim()), Slot::Cos)
    }

    /// Widens the declared band; existing terms are untouched.
    pub fn with_band(mut self, band: &[u32]) -> Self {
        assert_eq!(band.len(), self.dim());
        for (b, &m) in self.band.iter_mut().zip(band) {
            *b = (*b).max(m);
        }
        self
    }

    /// True when every stored frequency lies inside `band`.
    pub fn fits_band(&self, band: &[u32]) -> bool {
        self.terms.keys().all(|k| k.within(band))
    }

    /// The series depends on `x_n` only.
    pub fn is_axial(&self) -> bool {
        self.terms.keys().all(Freq::is_axial)
    }

    fn add_term(&mut self, k: Freq, c: S, s: S) {
        let (k, sign) = k.canonical();
        let zero_freq = k.is_zero();
        let entry = self
            .terms
            .entry(k)
            .or_insert_with(|| (S::zero(), S::zero()));
        entry.0 = entry.0.clone() + c;
        if !zero_freq {
            entry.1 = if sign > 0 {
                entry.1.clone() + s
            } else {
                entry.1.clone() - s
            };
        }
    }

    fn prune(&mut self) {
        let scale = max_magnitude(self.terms.values().flat_map(|(c, s)| [c, s]));
        self.terms.retain(|_, (c, s)| {
            if c.is_negligible(scale) {
                *c = S::zero();
            }
            if s.is_negligible(scale) {
                *s = S::zero();
            }
            !(c.is_zero() && s.is_zero())
        });
    }

    pub fn scale(&self, factor: &S) -> Self {
        let mut out = self.clone();
        for (c, s) in out.terms.values_mut() {
            *c = c.clone() * factor.clone();
            *s = s.clone() * factor.clone();
        }
        out.prune();
        out
    }

    /// Exact product; the band grows additively.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "torus dimension mismatch");
        let n = self.dim();
        let half = S::ratio(1, 2);
        let mut out = Self::zero(n);
        out.band = self.band.iter().zip(&other.band).map(|(a, b)| a + b).collect();
        for (k1, (c1, s1)) in &self.terms {
            for (k2, (c2, s2)) in &other.terms {
                let cc = c1.clone() * c2.clone();
                let ss = s1.clone() * s2.clone();
                let sc = s1.clone() * c2.clone();
                let cs = c1.clone() * s2.clone();
                let h = |v: S| half.clone() * v;
                out.add_term(
                    k1.plus(k2),
                    h(cc.clone() - ss.clone()),
                    h(sc.clone() + cs.clone()),
                );
                out.add_term(k1.minus(k2), h(cc + ss), h(sc - cs));
            }
        }
        out.prune();
        out
    }

    /// Exact derivative along coordinate `axis` (0-based).
    pub fn partial(&self, axis: usize) -> Self {
        assert!(axis < self.dim(), "axis out of range");
        let mut out = Self::zero(self.dim());
        out.band = self.band.clone();
        for (k, (c, s)) in &self.terms {
            let ki = S::from_i64(k.0[axis] as i64);
            if ki.is_zero() {
                continue;
            }
            // d/dx cos(k·x) = -k_i sin(k·x), d/dx sin(k·x) = k_i cos(k·x)
            out.terms
                .insert(k.clone(), (ki.clone() * s.clone(), -(ki * c.clone())));
        }
        out.prune();
        out
    }

    /// Division is only closed for constant divisors.
    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        let constant = other.terms.keys().all(Freq::is_zero);
        if !constant || other.is_zero() {
            return Err(Error::Unsupported(
                "division by a non-constant trigonometric series is not closed".into(),
            ));
        }
        Ok(self.scale(&(S::one() / other.mean())))
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(k, (c, s))| {
                let phase = k.dot(x);
                c.to_f64() * phase.cos() + s.to_f64() * phase.sin()
            })
            .sum()
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        max_magnitude(self.terms.values().flat_map(|(c, s)| [c, s]))
    }

    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T) -> TorusScalar<T> {
        let mut out = TorusScalar::zero(self.dim());
        out.band = self.band.clone();
        for (k, (c, s)) in &self.terms {
            out.terms.insert(k.clone(), (f(c), f(s)));
        }
        out.prune();
        out
    }

    /// `[[k...], cos, sin]` triples.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.terms
                .iter()
                .map(|(k, (c, s))| serde_json::json!([k.0, c.to_json(), s.to_json()]))
                .collect(),
        )
    }
}

impl<S: Scalar> Add for &TorusScalar<S> {
    type Output = TorusScalar<S>;

    fn add(self, rhs: Self) -> TorusScalar<S> {
        assert_eq!(self.dim(), rhs.dim(), "torus dimension mismatch");
        let mut out = self.clone();
        for (b, &m) in out.band.iter_mut().zip(&rhs.band) {
            *b = (*b).max(m);
        }
        for (k, (c, s)) in &rhs.terms {
            out.add_term(k.clone(), c.clone(), s.clone());
        }
        out.prune();
        out
    }
}

impl<S: Scalar> Neg for &TorusScalar<S> {
    type Output = TorusScalar<S>;

    fn neg(self) -> TorusScalar<S> {
        self.scale(&-S::one())
    }
}

impl<S: Scalar> Sub for &TorusScalar<S> {
    type Output = TorusScalar<S>;

    fn sub(self, rhs: Self) -> TorusScalar<S> {
        self + &(-rhs)
    }
}

impl<S: Scalar> Mul for &TorusScalar<S> {
    type Output = TorusScalar<S>;

    fn mul(self, rhs: Self) -> TorusScalar<S> {
        TorusScalar::mul(self, rhs)
    }
}

/// Conformal factor of the metric `g̃ = e^{2f} g` with `f` depending on the
/// last coordinate only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConformalFactor {
    /// `e^{2f} = 1`.
    Flat,
    /// `e^{2f} = 1/φ` with `φ = c + a cos x_n`.
    InverseTrig { c: Rational, a: Rational },
    /// `f = A cos x_n`.
    TrigExponent { amplitude: Rational },
}

impl ConformalFactor {
    pub fn inverse_trig(c: Rational, a: Rational) -> Result<Self> {
        if a.is_zero() || c <= a.abs() {
            return Err(Error::InvalidFactor("factor requires c > |a|".into()));
        }
        Ok(ConformalFactor::InverseTrig { c, a })
    }

    pub fn trig_exponent(amplitude: Rational) -> Result<Self> {
        if amplitude.is_zero() {
            return Err(Error::InvalidFactor("factor requires A != 0".into()));
        }
        Ok(ConformalFactor::TrigExponent { amplitude })
    }

    /// Re-checks the parameter constraints of a constructed value.
    pub fn validate(&self) -> Result<()> {
        match self {
            ConformalFactor::Flat => Ok(()),
            ConformalFactor::InverseTrig { c, a } => {
                Self::inverse_trig(c.clone(), a.clone()).map(|_| ())
            }
            ConformalFactor::TrigExponent { amplitude } => {
                Self::trig_exponent(amplitude.clone()).map(|_| ())
            }
        }
    }

    pub fn is_flat(&self) -> bool {
        matches!(self, ConformalFactor::Flat)
    }

    /// Axis-n band of the coefficients the factor contributes to the
    /// Killing operator.
    pub fn band(&self) -> u32 {
        match self {
            ConformalFactor::Flat => 0,
            _ => 1,
        }
    }

    /// Band-limited data needed to assemble the Killing operator on `T^n`.
    pub fn data<S: Scalar>(&self, n: usize) -> Result<FactorData<S>> {
        self.validate()?;
        let last = n - 1;
        Ok(match self {
            ConformalFactor::Flat => FactorData {
                n,
                fprime: FPrime::Series(TorusScalar::zero(n)),
                phi: None,
            },
            ConformalFactor::TrigExponent { amplitude } => {
                let amp = S::from_rational(amplitude);
                let mut k = vec![0; n];
                k[last] = 1;
                FactorData {
                    n,
                    fprime: FPrime::Series(TorusScalar::mode(n, Freq(k), Slot::Sin, -amp)),
                    phi: None,
                }
            }
            ConformalFactor::InverseTrig { c, a } => {
                let phi =
                    TorusScalar::affine_cos(n, last, S::from_rational(c), S::from_rational(a));
                let phi_prime = phi.partial(last);
                FactorData {
                    n,
                    fprime: FPrime::PhiMultiplied,
                    phi: Some((phi, phi_prime)),
                }
            }
        })
    }

    /// `e^{-2f}` as a float function of `x_n`.
    pub fn emin2f(&self, xn: f64) -> f64 {
        match self {
            ConformalFactor::Flat => 1.0,
            ConformalFactor::InverseTrig { c, a } => {
                f64::from_rational(c) + f64::from_rational(a) * xn.cos()
            }
            ConformalFactor::TrigExponent { amplitude } => {
                (-2.0 * f64::from_rational(amplitude) * xn.cos()).exp()
            }
        }
    }

    /// Derivative of [`Self::emin2f`] with respect to `x_n`.
    pub fn emin2f_prime(&self, xn: f64) -> f64 {
        match self {
            ConformalFactor::Flat => 0.0,
            ConformalFactor::InverseTrig { a, .. } => -f64::from_rational(a) * xn.sin(),
            ConformalFactor::TrigExponent { amplitude } => {
                let amp = f64::from_rational(amplitude);
                2.0 * amp * xn.sin() * (-2.0 * amp * xn.cos()).exp()
            }
        }
    }

    /// Textual form: `flat`, `inv-cos:<c>,<a>` or `exp-cos:<A>`.
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        if spec == "flat" {
            return Ok(ConformalFactor::Flat);
        }
        if let Some(rest) = spec.strip_prefix("inv-cos:") {
            let (c, a) = rest.split_once(',').ok_or_else(|| {
                Error::Config(format!("expected inv-cos:<c>,<a>, got `{spec}`"))
            })?;
            return Self::inverse_trig(parse_rational(c)?, parse_rational(a)?);
        }
        if let Some(rest) = spec.strip_prefix("exp-cos:") {
            return Self::trig_exponent(parse_rational(rest)?);
        }
        Err(Error::Config(format!("unknown factor `{spec}`")))
    }

    pub fn spec_string(&self) -> String {
        match self {
            ConformalFactor::Flat => "flat".into(),
            ConformalFactor::InverseTrig { c, a } => {
                format!("inv-cos:{},{}", format_rational(c), format_rational(a))
            }
            ConformalFactor::TrigExponent { amplitude } => {
                format!("exp-cos:{}", format_rational(amplitude))
            }
        }
    }
}

impl fmt::Display for ConformalFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.spec_string())
    }
}

/// How `f'` enters the Killing operator.
#[derive(Clone, Debug)]
pub enum FPrime<S> {
    /// `f'` is itself a trigonometric polynomial.
    Series(TorusScalar<S>),
    /// `f' = -φ'/(2φ)` is not band-limited; the operator is multiplied by `2φ`.
    PhiMultiplied,
}

#[derive(Clone, Debug)]
pub struct FactorData<S> {
    pub n: usize,
    pub fprime: FPrime<S>,
    /// `(φ, φ')` for the inverse-trig family.
    pub phi: Option<(TorusScalar<S>, TorusScalar<S>)>,
}

impl<S: Scalar> FactorData<S> {
    /// Band-limited series for `e^{-2jf}`, when one exists.
    pub fn emin2f_power(&self, j: u32) -> Option<TorusScalar<S>> {
        match (&self.fprime, &self.phi) {
            (_, Some((phi, _))) => {
                let mut acc = TorusScalar::constant(self.n, S::one());
                for _ in 0..j {
                    acc = acc.mul(phi);
                }
                Some(acc)
            }
            (FPrime::Series(fp), None) if fp.is_zero() => {
                Some(TorusScalar::constant(self.n, S::one()))
            }
            (FPrime::Series(_), None) if j == 0 => Some(TorusScalar::constant(self.n, S::one())),
            _ => None,
        }
    }
}
