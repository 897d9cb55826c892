//! The scalar ODE system satisfied by `α_j = K_j(ξ, …, ξ, ξ_n)`:
//! coefficients, the exact polynomial recursion for `φ^j α_j` with
//! `φ = e^{2f}`, and a fixed-step RK4 oracle.

use std::fmt::Write as _;

use num::{BigInt, One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

/// Coefficients of
/// `A α_j' + B f' α_j = C α_{j-1}' + D f' α_{j-1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct EqjCoefficients {
    pub n: usize,
    pub p: usize,
    pub j: usize,
    pub lhs_alpha_prime: Rational,
    pub lhs_f_alpha: Rational,
    pub rhs_alpha_prime: Rational,
    pub rhs_f_alpha: Rational,
}

impl EqjCoefficients {
    /// `(b_j, c_j)` of the normalized form
    /// `α_j' + 2j f' α_j = b_j α_{j-1}' + c_j f' α_{j-1}`.
    pub fn normalized(&self) -> (Rational, Rational) {
        // (p - 2j + 1)(p - 2j) > 0 in the legal range
        assert!(!self.lhs_alpha_prime.is_zero());
        debug_assert_eq!(
            &self.lhs_f_alpha / &self.lhs_alpha_prime,
            Rational::from_i64(2 * self.j as i64)
        );
        (
            &self.rhs_alpha_prime / &self.lhs_alpha_prime,
            &self.rhs_f_alpha / &self.lhs_alpha_prime,
        )
    }
}

fn max_alpha_index(p: usize) -> usize {
    (p - 1) / 2
}

fn check_range(n: usize, p: usize, j: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::Config("the alpha system needs n >= 2".into()));
    }
    if p < 1 {
        return Err(Error::Config("the alpha system needs p >= 1".into()));
    }
    let hi = max_alpha_index(p);
    if j > hi {
        return Err(Error::IndexRange { index: j, lo: 0, hi });
    }
    Ok(())
}

/// Coefficients of the `j`-th scalar equation for degree `p` on `T^n`. For
/// `j = 0` the right-hand side multiplies `α_{-1} = 0` and is reported as
/// zero.
pub fn eqj_coefficients(n: usize, p: usize, j: usize) -> Result<EqjCoefficients> {
    check_range(n, p, j)?;
    let (n_, p_, j_) = (n as i64, p as i64, j as i64);
    let q = |a: i64, b: i64| Rational::new(BigInt::from(a), BigInt::from(b));
    let top = (p_ - 2 * j_ + 1) * (p_ - 2 * j_);
    let den_lhs = n_ + 2 * (p_ - 2 * j_ - 1);
    let den_rhs = n_ + 2 * (p_ - 2 * j_ + 1);
    let (rhs_alpha_prime, rhs_f_alpha) = if j == 0 {
        (Rational::zero(), Rational::zero())
    } else {
        (q(1, den_rhs), q(n_ + 2 * p_ - 2 * j_, den_rhs))
    };
    Ok(EqjCoefficients {
        n,
        p,
        j,
        lhs_alpha_prime: q(top, den_lhs),
        lhs_f_alpha: q(2 * j_ * top, den_lhs),
        rhs_alpha_prime,
        rhs_f_alpha,
    })
}

/// `d_j = (p-1)! / (p-2j-1)!`.
pub fn dj_factor(p: usize, j: usize) -> Result<u128> {
    if p < 1 || j > max_alpha_index(p) {
        return Err(Error::IndexRange {
            index: j,
            lo: 0,
            hi: if p < 1 { 0 } else { max_alpha_index(p) },
        });
    }
    Ok(((p - 2 * j)..p).map(|k| k as u128).product())
}

/// Polynomial `Σ_i c_i φ^i`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyInPhi<S> {
    coeffs: Vec<S>,
}

impl<S: Scalar> PolyInPhi<S> {
    pub fn new(mut coeffs: Vec<S>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        PolyInPhi { coeffs }
    }

    pub fn zero() -> Self {
        PolyInPhi { coeffs: Vec::new() }
    }

    pub fn constant(c: S) -> Self {
        Self::new(vec![c])
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> S {
        self.coeffs.get(i).cloned().unwrap_or_else(S::zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..len).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn scale(&self, s: &S) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.clone() * s.clone()).collect())
    }

    /// Multiplication by `φ^k`.
    pub fn shift(&self, k: usize) -> Self {
        let mut coeffs = vec![S::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Self::new(coeffs)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.clone() * S::from_i64(i as i64))
                .collect(),
        )
    }

    /// Antiderivative with zero constant term.
    pub fn antiderivative(&self) -> Self {
        let mut coeffs = vec![S::zero()];
        coeffs.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| c.clone() * S::ratio(1, i as i64 + 1)),
        );
        Self::new(coeffs)
    }

    pub fn eval(&self, phi: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * phi + c.to_f64())
    }

    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T) -> PolyInPhi<T> {
        PolyInPhi::new(self.coeffs.iter().map(f).collect())
    }
}

/// One step of the recursion: from `P_{j-1} = φ^{j-1} α_{j-1}` build
/// `P_j = φ^j α_j = (b/2)∫Q dφ + (c/2)∫P_{j-1} dφ + C` where
/// `Q = 2φ P_{j-1}' - 2(j-1) P_{j-1}`.
pub fn recursion_step<S: Scalar>(
    prev: &PolyInPhi<S>,
    b: &S,
    c: &S,
    j: usize,
    constant: &S,
) -> PolyInPhi<S> {
    assert!(j >= 1, "recursion starts at j = 1");
    let two = S::from_i64(2);
    let q = prev
        .derivative()
        .shift(1)
        .scale(&two)
        .add(&prev.scale(&-S::from_i64(2 * (j as i64 - 1))));
    let half = S::ratio(1, 2);
    q.antiderivative()
        .scale(&(half.clone() * b.clone()))
        .add(&prev.antiderivative().scale(&(half * c.clone())))
        .add(&PolyInPhi::constant(constant.clone()))
}

/// Runs the recursion for `j = 0..=l`. `bs[j-1], cs[j-1], constants[j-1]`
/// belong to equation `j`.
pub fn recursion<S: Scalar>(alpha0: &S, bs: &[S], cs: &[S], constants: &[S]) -> Vec<PolyInPhi<S>> {
    assert!(bs.len() == cs.len() && cs.len() == constants.len());
    let mut out = vec![PolyInPhi::constant(alpha0.clone())];
    for j in 1..=bs.len() {
        let next = recursion_step(&out[j - 1], &bs[j - 1], &cs[j - 1], j, &constants[j - 1]);
        out.push(next);
    }
    out
}

/// `α_j(x) = P_j(φ)/φ^j`, `φ = e^{2 f(x)}`.
pub fn alpha_from_poly<S: Scalar>(poly: &PolyInPhi<S>, j: usize, f_value: f64) -> f64 {
    let phi = (2.0 * f_value).exp();
    poly.eval(phi) / phi.powi(j as i32)
}

/// Smooth scalar function with its derivative.
pub trait SmoothFn: Sync {
    fn value(&self, x: f64) -> f64;
    fn derivative(&self, x: f64) -> f64;
}

/// `amp · cos(x)`.
#[derive(Clone, Copy, Debug)]
pub struct CosFn {
    pub amp: f64,
}

impl SmoothFn for CosFn {
    fn value(&self, x: f64) -> f64 {
        self.amp * x.cos()
    }

    fn derivative(&self, x: f64) -> f64 {
        -self.amp * x.sin()
    }
}

#[derive(Clone, Debug)]
pub struct OdeSamples {
    pub xs: Vec<f64>,
    /// `alphas[j][i]` is `α_j(xs[i])`, `j = 0..=l`.
    pub alphas: Vec<Vec<f64>>,
    /// Final state changed by more than `1e-3` (relative) when the step
    /// count is doubled.
    pub unstable: bool,
}

fn alpha_rhs(bs: &[f64], cs: &[f64], fp: f64, alpha: &[f64], out: &mut [f64]) {
    // α_0 is constant
    out[0] = 0.0;
    for j in 1..alpha.len() {
        out[j] = bs[j - 1] * out[j - 1] + cs[j - 1] * fp * alpha[j - 1]
            - 2.0 * j as f64 * fp * alpha[j];
    }
}

fn rk4(
    bs: &[f64],
    cs: &[f64],
    f: &dyn SmoothFn,
    interval: (f64, f64),
    initial: &[f64],
    steps: usize,
    record: bool,
) -> (Vec<f64>, Vec<Vec<f64>>) {
    let dim = initial.len();
    let h = (interval.1 - interval.0) / steps as f64;
    let mut y = initial.to_vec();
    let mut xs = Vec::new();
    let mut traj: Vec<Vec<f64>> = vec![Vec::new(); dim];
    let push = |x: f64, y: &[f64], xs: &mut Vec<f64>, traj: &mut Vec<Vec<f64>>| {
        xs.push(x);
        for (t, v) in traj.iter_mut().zip(y) {
            t.push(*v);
        }
    };
    if record {
        push(interval.0, &y, &mut xs, &mut traj);
    }
    let (mut k1, mut k2, mut k3, mut k4) =
        (vec![0.0; dim], vec![0.0; dim], vec![0.0; dim], vec![0.0; dim]);
    let mut tmp = vec![0.0; dim];
    for i in 0..steps {
        let x = interval.0 + i as f64 * h;
        alpha_rhs(bs, cs, f.derivative(x), &y, &mut k1);
        for d in 0..dim {
            tmp[d] = y[d] + 0.5 * h * k1[d];
        }
        alpha_rhs(bs, cs, f.derivative(x + 0.5 * h), &tmp, &mut k2);
        for d in 0..dim {
            tmp[d] = y[d] + 0.5 * h * k2[d];
        }
        alpha_rhs(bs, cs, f.derivative(x + 0.5 * h), &tmp, &mut k3);
        for d in 0..dim {
            tmp[d] = y[d] + h * k3[d];
        }
        alpha_rhs(bs, cs, f.derivative(x + h), &tmp, &mut k4);
        for d in 0..dim {
            y[d] += h / 6.0 * (k1[d] + 2.0 * k2[d] + 2.0 * k3[d] + k4[d]);
        }
        if record {
            push(interval.0 + (i + 1) as f64 * h, &y, &mut xs, &mut traj);
        }
    }
    if !record {
        traj.iter_mut().zip(&y).for_each(|(t, v)| t.push(*v));
    }
    (xs, traj)
}

/// Integrates `α_j' + 2j f' α_j = b_j α_{j-1}' + c_j f' α_{j-1}` on
/// `interval` with classical RK4. `initial[j]` is `α_j` at the left end
/// (`initial[0]` is the constant `α_0`).
pub fn numeric_ode_oracle(
    bs: &[f64],
    cs: &[f64],
    f: &dyn SmoothFn,
    interval: (f64, f64),
    initial: &[f64],
    steps: usize,
) -> Result<OdeSamples> {
    if steps < 1000 {
        return Err(Error::Config("the ODE oracle needs at least 1000 steps".into()));
    }
    if bs.len() != cs.len() || initial.len() != bs.len() + 1 {
        return Err(Error::Config("inconsistent ODE system sizes".into()));
    }
    let (xs, alphas) = rk4(bs, cs, f, interval, initial, steps, true);
    let (_, fine) = rk4(bs, cs, f, interval, initial, 2 * steps, false);
    let coarse_end: Vec<f64> = alphas.iter().map(|a| *a.last().unwrap()).collect();
    let fine_end: Vec<f64> = fine.iter().map(|a| a[0]).collect();
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let diff: Vec<f64> = coarse_end.iter().zip(&fine_end).map(|(a, b)| a - b).collect();
    let unstable = norm(&diff) > 1e-3 * norm(&fine_end).max(f64::MIN_POSITIVE);
    Ok(OdeSamples {
        xs,
        alphas,
        unstable,
    })
}

/// Largest `|α_j^{numeric} - P_j(φ)/φ^j|` over all samples.
pub fn max_oracle_error<S: Scalar>(polys: &[PolyInPhi<S>], f: &dyn SmoothFn, samples: &OdeSamples) -> f64 {
    let mut err: f64 = 0.0;
    for (j, (poly, curve)) in polys.iter().zip(&samples.alphas).enumerate() {
        for (x, a) in samples.xs.iter().zip(curve) {
            err = err.max((alpha_from_poly(poly, j, f.value(*x)) - a).abs());
        }
    }
    err
}

/// Initial values `α_j(x0)` implied by the exact polynomials.
pub fn initial_values<S: Scalar>(polys: &[PolyInPhi<S>], f: &dyn SmoothFn, x0: f64) -> Vec<f64> {
    polys
        .iter()
        .enumerate()
        .map(|(j, p)| alpha_from_poly(p, j, f.value(x0)))
        .collect()
}

/// `(x, α_0..α_l, φ)` rows.
pub fn samples_to_csv(samples: &OdeSamples, f: &dyn SmoothFn) -> String {
    let mut s = String::from("x");
    for j in 0..samples.alphas.len() {
        let _ = write!(s, ",alpha_{j}");
    }
    s.push_str(",phi\n");
    for (i, x) in samples.xs.iter().enumerate() {
        let _ = write!(s, "{x:.12e}");
        for curve in &samples.alphas {
            let _ = write!(s, ",{:.12e}", curve[i]);
        }
        let _ = writeln!(s, ",{:.12e}", (2.0 * f.value(*x)).exp());
    }
    s
}

/// Normalized `(b_j, c_j)` for `j = 1..=⌊(p-1)/2⌋`.
pub fn specialized_constants(n: usize, p: usize) -> Result<(Vec<Rational>, Vec<Rational>)> {
    check_range(n, p, 0)?;
    let mut bs = Vec::new();
    let mut cs = Vec::new();
    for j in 1..=max_alpha_index(p) {
        let (b, c) = eqj_coefficients(n, p, j)?.normalized();
        bs.push(b);
        cs.push(c);
    }
    Ok((bs, cs))
}

/// Coefficient vector (in powers of `φ`) of `φ^l · Σ_j d_j α_j` for the
/// solution with data `(α_0, C_1, …, C_l)`.
pub fn dj_sum_polynomial(
    n: usize,
    p: usize,
    alpha0: &Rational,
    constants: &[Rational],
) -> Result<PolyInPhi<Rational>> {
    let (bs, cs) = specialized_constants(n, p)?;
    if constants.len() != bs.len() {
        return Err(Error::Config(format!(
            "expected {} integration constants",
            bs.len()
        )));
    }
    let polys = recursion(alpha0, &bs, &cs, constants);
    let l = bs.len();
    let mut sum = PolyInPhi::zero();
    for (j, poly) in polys.iter().enumerate() {
        let d = Rational::from_integer(BigInt::from(dj_factor(p, j)?));
        sum = sum.add(&poly.shift(l - j).scale(&d));
    }
    Ok(sum)
}

/// True when `Σ_j d_j α_j ≡ 0` forces `α_0 = 0` and every integration
/// constant to vanish, i.e. all `α_j ≡ 0`. The sum is linear in
/// `(α_0, C_1, …, C_l)`, so this is a full-rank test of `l + 1` exact
/// coefficient vectors.
pub fn dj_sum_forces_zero(n: usize, p: usize) -> Result<bool> {
    let l = if p >= 1 { max_alpha_index(p) } else { 0 };
    let mut rows = Vec::new();
    for idx in 0..=l {
        let alpha0 = if idx == 0 { Rational::one() } else { Rational::zero() };
        let constants: Vec<Rational> = (1..=l)
            .map(|i| if i == idx { Rational::one() } else { Rational::zero() })
            .collect();
        let poly = dj_sum_polynomial(n, p, &alpha0, &constants)?;
        rows.push(
            poly.coeffs()
                .iter()
                .cloned()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .collect::<Vec<_>>(),
        );
    }
    Ok(crate::kernelsolve::LinearSolve::rank_rows(&rows, l + 1, 0.0) == l + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    type Q = Rational;

    fn q(a: i64, b: i64) -> Q {
        Q::ratio(a, b)
    }

    #[test]
    fn eqj_examples() {
        let c = eqj_coefficients(2, 3, 1).unwrap();
        assert_eq!(
            (c.lhs_alpha_prime, c.lhs_f_alpha, c.rhs_alpha_prime, c.rhs_f_alpha),
            (q(1, 1), q(2, 1), q(1, 6), q(1, 1))
        );
        let c = eqj_coefficients(3, 2, 0).unwrap();
        assert_eq!(
            (c.lhs_alpha_prime, c.lhs_f_alpha, c.rhs_alpha_prime, c.rhs_f_alpha),
            (q(6, 5), Q::zero(), Q::zero(), Q::zero())
        );
        assert_eq!(
            eqj_coefficients(2, 3, 2).unwrap_err(),
            Error::IndexRange { index: 2, lo: 0, hi: 1 }
        );
    }

    /// Second evaluation path: the same formulas in f64.
    #[test]
    fn eqj_dual_path() {
        for n in 2..6usize {
            for p in 1..9usize {
                for j in 0..=(p - 1) / 2 {
                    let c = eqj_coefficients(n, p, j).unwrap();
                    let (nf, pf, jf) = (n as f64, p as f64, j as f64);
                    let top = (pf - 2.0 * jf + 1.0) * (pf - 2.0 * jf);
                    let dl = nf + 2.0 * (pf - 2.0 * jf - 1.0);
                    let dr = nf + 2.0 * (pf - 2.0 * jf + 1.0);
                    let close = |a: &Q, b: f64| (a.to_f64() - b).abs() < 1e-14;
                    assert!(close(&c.lhs_alpha_prime, top / dl));
                    assert!(close(&c.lhs_f_alpha, 2.0 * jf * top / dl));
                    if j > 0 {
                        assert!(close(&c.rhs_alpha_prime, 1.0 / dr));
                        assert!(close(&c.rhs_f_alpha, (nf + 2.0 * pf - 2.0 * jf) / dr));
                    }
                }
            }
        }
        let c = eqj_coefficients(2, 5, 2).unwrap();
        assert_eq!(c.lhs_alpha_prime, q(1, 1));
        assert_eq!(c.lhs_f_alpha, q(4, 1));
        assert_eq!(c.rhs_alpha_prime, q(1, 6));
        assert_eq!(c.rhs_f_alpha, q(4, 3));
    }

    #[test]
    fn dj_examples() {
        assert_eq!(dj_factor(3, 0).unwrap(), 1);
        assert_eq!(dj_factor(3, 1).unwrap(), 2);
        assert_eq!(dj_factor(5, 2).unwrap(), 24);
        assert!(dj_factor(4, 2).is_err());
    }

    #[test]
    fn recursion_examples() {
        let p1 = recursion_step(&PolyInPhi::constant(Q::one()), &q(7, 3), &q(4, 1), 1, &Q::zero());
        assert_eq!(p1, PolyInPhi::new(vec![Q::zero(), q(2, 1)]));
        let z = recursion_step(&PolyInPhi::<Q>::zero(), &q(1, 1), &q(1, 1), 3, &Q::zero());
        assert!(z.is_zero());
        let c2 = q(5, 7);
        let p2 = recursion_step(&p1, &q(-3, 2), &c2, 2, &q(1, 3));
        assert_eq!(p2, PolyInPhi::new(vec![q(1, 3), Q::zero(), c2 / q(2, 1)]));
    }

    #[test]
    fn oracle_matches_closed_form() {
        let f = CosFn { amp: 1.0 };
        let polys = recursion(&Q::one(), &[Q::zero()], &[q(4, 1)], &[q(1, 2)]);
        let init = initial_values(&polys, &f, 0.0);
        let samples = numeric_ode_oracle(&[0.0], &[4.0], &f, (0.0, 1.0), &init, 10_000).unwrap();
        assert!(!samples.unstable);
        assert!(max_oracle_error(&polys, &f, &samples) < 1e-8);
    }

    #[test]
    fn zero_data_stays_zero() {
        let f = CosFn { amp: 1.0 };
        let samples = numeric_ode_oracle(&[0.0, 0.0], &[0.0, 0.0], &f, (0.0, 1.0), &[0.0; 3], 1000).unwrap();
        assert!(samples.alphas.iter().flatten().all(|&a| a == 0.0));
    }

    #[test]
    fn fourth_order_convergence() {
        let f = CosFn { amp: 1.0 };
        let bs = [0.5, -1.0];
        let cs = [4.0, 1.5];
        let polys = recursion(&1.0f64, &bs, &cs, &[0.3, -0.2]);
        let init = initial_values(&polys, &f, 0.0);
        let err = |steps| {
            let (xs, traj) = rk4(&bs, &cs, &f, (0.0, 2.0), &init, steps, true);
            let samples = OdeSamples { xs, alphas: traj, unstable: false };
            max_oracle_error(&polys, &f, &samples)
        };
        let ratio = err(40) / err(80);
        assert!((12.0..20.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn dj_sum_vanishing_forces_zero() {
        for (n, p) in [(2, 2), (2, 3), (3, 2), (3, 3), (2, 5), (4, 7)] {
            assert!(dj_sum_forces_zero(n, p).unwrap(), "n={n} p={p}");
        }
        // p = 3, n = 2: φ·(α_0 + 2 α_1) with α_1 = c_1/2 α_0 + C/φ and c_1 = 1
        let poly = dj_sum_polynomial(2, 3, &Q::one(), &[Q::zero()]).unwrap();
        assert_eq!(poly, PolyInPhi::new(vec![Q::zero(), q(2, 1)]));
    }

    #[test]
    fn csv_layout() {
        let f = CosFn { amp: 1.0 };
        let samples = numeric_ode_oracle(&[0.0], &[1.0], &f, (0.0, 1.0), &[1.0, 0.0], 1000).unwrap();
        let csv = samples_to_csv(&samples, &f);
        assert!(csv.starts_with("x,alpha_0,alpha_1,phi\n"));
        assert_eq!(csv.lines().count(), 1002);
    }
}
