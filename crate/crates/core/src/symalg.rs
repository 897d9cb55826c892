//! Fiberwise symmetric tensor algebra over `R^n`.
//!
//! A symmetric `p`-tensor `K` is stored as its normalized momentum polynomial
//! `N_K(x, y) = K(y, …, y) / p! = Σ_a c_a(x) y^a`, whose coefficients are
//! trigonometric series on the torus. In this representation
//!
//! * the symmetric product is the polynomial product,
//! * `v ⌟` is the directional derivative `∂_v` in the momentum variables,
//! * `L = Σ e_i · e_i` is `|y|²` and `Λ = Σ e_i ⌟ e_i ⌟` is the momentum Laplacian,
//! * the induced scalar product is the apolarity pairing `Σ_a a! c_a d_a`.
//!
//! The multilinear value used by the symmetrized-tensor convention is
//! recovered as `K(y, …, y) = p! · N_K(y)`.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{max_magnitude, Scalar};
use crate::torusfn::{Freq, Slot, TorusScalar};

/// Exponent vector of a momentum monomial `y^a`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut a = vec![0; n];
        a[i] = 1;
        MultiIndex(a)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    /// `a!` = product of the factorials of the entries.
    pub fn factorial(&self) -> u128 {
        self.0
            .iter()
            .map(|&e| (1..=e as u128).product::<u128>())
            .product()
    }

    pub fn plus(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    fn bumped(&self, i: usize, delta: i32) -> Option<MultiIndex> {
        let e = self.0[i] as i32 + delta;
        (e >= 0).then(|| {
            let mut a = self.0.clone();
            a[i] = e as u32;
            MultiIndex(a)
        })
    }

    pub fn monomial_value(&self, y: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(y)
            .map(|(&e, &yi)| yi.powi(e as i32))
            .product()
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// All multi-indices of `n` entries and total degree `p`, in lexicographic
/// order.
pub fn multi_indices(n: usize, p: usize) -> Vec<MultiIndex> {
    fn rec(axis: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        let n = cur.len();
        if axis + 1 == n {
            cur[axis] = left;
            out.push(MultiIndex(cur.clone()));
            return;
        }
        for e in 0..=left {
            cur[axis] = e;
            rec(axis + 1, left - e, cur, out);
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        if p == 0 {
            out.push(MultiIndex(Vec::new()));
        }
        return out;
    }
    rec(0, p as u32, &mut vec![0; n], &mut out);
    out
}

/// Symmetric `p`-tensor field on `T^n` in the normalized representation.
#[derive(Clone, Debug, PartialEq)]
pub struct SymTensorField<S> {
    n: usize,
    p: usize,
    coeffs: BTreeMap<MultiIndex, TorusScalar<S>>,
}

impl<S: Scalar> SymTensorField<S> {
    pub fn zero(n: usize, p: usize) -> Self {
        SymTensorField {
            n,
            p,
            coeffs: BTreeMap::new(),
        }
    }

    /// Degree-0 tensor, i.e. a function.
    pub fn scalar(f: TorusScalar<S>) -> Self {
        let n = f.dim();
        Self::monomial(MultiIndex::zero(n), f)
    }

    pub fn monomial(a: MultiIndex, coeff: TorusScalar<S>) -> Self {
        assert_eq!(a.dim(), coeff.dim(), "torus dimension mismatch");
        let mut out = Self::zero(a.dim(), a.degree());
        if !coeff.is_zero() {
            out.coeffs.insert(a, coeff);
        }
        out
    }

    /// `y^a` with constant coefficient `c`.
    pub fn constant_monomial(a: MultiIndex, c: S) -> Self {
        let n = a.dim();
        Self::monomial(a, TorusScalar::constant(n, c))
    }

    /// Builds a tensor from `(multi-index, coefficient)` pairs of equal degree.
    pub fn from_terms(
        n: usize,
        p: usize,
        terms: impl IntoIterator<Item = (MultiIndex, TorusScalar<S>)>,
    ) -> Self {
        let mut out = Self::zero(n, p);
        for (a, c) in terms {
            assert_eq!(a.dim(), n);
            assert_eq!(a.degree(), p, "multi-index degree");
            out.accumulate(a, c);
        }
        out.prune();
        out
    }

    /// Constant vector `v = Σ v_i e_i`, i.e. the linear form `Σ v_i y_i`.
    pub fn vector(v: &[S]) -> Self {
        let n = v.len();
        Self::from_terms(
            n,
            1,
            v.iter()
                .enumerate()
                .map(|(i, vi)| (MultiIndex::unit(n, i), TorusScalar::constant(n, vi.clone()))),
        )
    }

    /// The orthonormal frame vector `e_i` (`ξ_{i+1}` on the flat torus).
    pub fn basis_vector(n: usize, i: usize) -> Self {
        Self::constant_monomial(MultiIndex::unit(n, i), S::one())
    }

    /// `L = Σ e_i · e_i`, i.e. `|y|²`.
    pub fn metric_l(n: usize) -> Self {
        Self::from_terms(
            n,
            2,
            (0..n).map(|i| {
                let mut a = vec![0; n];
                a[i] = 2;
                (MultiIndex(a), TorusScalar::constant(n, S::one()))
            }),
        )
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &BTreeMap<MultiIndex, TorusScalar<S>> {
        &self.coeffs
    }

    pub fn coefficient(&self, a: &MultiIndex) -> TorusScalar<S> {
        self.coeffs
            .get(a)
            .cloned()
            .unwrap_or_else(|| TorusScalar::zero(self.n))
    }

    /// Coordinate of the real basis element `(a, k, slot)`.
    pub fn component(&self, a: &MultiIndex, k: &Freq, slot: Slot) -> S {
        self.coeffs
            .get(a)
            .map(|c| c.coefficient(k, slot))
            .unwrap_or_else(S::zero)
    }

    /// Iterates over the nonzero real coordinates `(a, k, slot, value)`.
    pub fn components(&self) -> impl Iterator<Item = (&MultiIndex, &Freq, Slot, &S)> {
        self.coeffs.iter().flat_map(|(a, c)| {
            c.terms().flat_map(move |(k, cv, sv)| {
                let cos = (!cv.is_zero()).then_some((a, k, Slot::Cos, cv));
                let sin = (!sv.is_zero()).then_some((a, k, Slot::Sin, sv));
                cos.into_iter().chain(sin)
            })
        })
    }

    fn accumulate(&mut self, a: MultiIndex, c: TorusScalar<S>) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.get_mut(&a) {
            Some(existing) => *existing = &*existing + &c,
            None => {
                self.coeffs.insert(a, c);
            }
        }
    }

    fn prune(&mut self) {
        if S::MODE == crate::scalar::Arith::Float {
            let scale = self
                .coeffs
                .values()
                .map(TorusScalar::max_abs_coefficient)
                .fold(0.0, f64::max);
            for c in self.coeffs.values_mut() {
                let filtered = TorusScalar::from_terms(
                    self.n,
                    c.terms()
                        .map(|(k, cv, sv)| {
                            let keep = |v: &S| {
                                if v.is_negligible(scale) {
                                    S::zero()
                                } else {
                                    v.clone()
                                }
                            };
                            (k.clone(), keep(cv), keep(sv))
                        })
                        .collect::<Vec<_>>(),
                )
                .with_band(c.band());
                *c = filtered;
            }
        }
        self.coeffs.retain(|_, c| !c.is_zero());
    }

    fn check_dim(&self, other_n: usize) -> Result<()> {
        if self.n != other_n {
            return Err(Error::DimensionMismatch(self.n, other_n));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other.n)?;
        if self.p != other.p {
            return Err(Error::DegreeMismatch(self.p, other.p));
        }
        let mut out = self.clone();
        for (a, c) in &other.coeffs {
            out.accumulate(a.clone(), c.clone());
        }
        out.prune();
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-S::one())
    }

    pub fn scale(&self, s: &S) -> Self {
        let mut out = Self::zero(self.n, self.p);
        for (a, c) in &self.coeffs {
            out.accumulate(a.clone(), c.scale(s));
        }
        out.prune();
        out
    }

    /// Pointwise multiplication of every coefficient by a function.
    pub fn mul_function(&self, f: &TorusScalar<S>) -> Self {
        let mut out = Self::zero(self.n, self.p);
        for (a, c) in &self.coeffs {
            out.accumulate(a.clone(), c.mul(f));
        }
        out.prune();
        out
    }

    /// Symmetric product; plain polynomial product of the normalized forms.
    pub fn sym_mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other.n)?;
        let mut out = Self::zero(self.n, self.p + other.p);
        for (a, ca) in &self.coeffs {
            for (b, cb) in &other.coeffs {
                out.accumulate(a.plus(b), ca.mul(cb));
            }
        }
        out.prune();
        Ok(out)
    }

    /// `y_i · N_K`, the symmetric product with `e_i`.
    pub fn mul_coordinate(&self, i: usize) -> Self {
        let mut out = Self::zero(self.n, self.p + 1);
        for (a, c) in &self.coeffs {
            out.accumulate(a.bumped(i, 1).expect("bump up"), c.clone());
        }
        out
    }

    /// `∂_{y_i} N_K`, the contraction with `e_i`.
    pub fn partial_momentum(&self, i: usize) -> Self {
        if self.p == 0 {
            return Self::zero(self.n, 0);
        }
        let mut out = Self::zero(self.n, self.p - 1);
        for (a, c) in &self.coeffs {
            let e = a.0[i];
            if e > 0 {
                let lowered = a.bumped(i, -1).expect("positive exponent");
                out.accumulate(lowered, c.scale(&S::from_i64(e as i64)));
            }
        }
        out.prune();
        out
    }

    /// Coefficient-wise derivative along the torus coordinate `axis`.
    pub fn partial_position(&self, axis: usize) -> Self {
        let mut out = Self::zero(self.n, self.p);
        for (a, c) in &self.coeffs {
            out.accumulate(a.clone(), c.partial(axis));
        }
        out.prune();
        out
    }

    /// Contraction `v ⌟ K`. Degree-0 input gives the zero scalar.
    pub fn contract(&self, v: &[S]) -> Result<Self> {
        self.check_dim(v.len())?;
        let mut out = Self::zero(self.n, self.p.saturating_sub(1));
        for (i, vi) in v.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            out = out.add(&self.partial_momentum(i).scale(vi))?;
        }
        Ok(out)
    }

    /// Induced scalar product, pointwise on the torus.
    pub fn inner(&self, other: &Self) -> Result<TorusScalar<S>> {
        self.check_dim(other.n)?;
        if self.p != other.p {
            return Err(Error::DegreeMismatch(self.p, other.p));
        }
        let mut acc = TorusScalar::zero(self.n);
        for (a, ca) in &self.coeffs {
            if let Some(cb) = other.coeffs.get(a) {
                let weight = S::from_rational(&crate::scalar::Rational::from_integer(
                    a.factorial().into(),
                ));
                acc = &acc + &ca.mul(cb).scale(&weight);
            }
        }
        Ok(acc)
    }

    /// `L · K`, i.e. `|y|² N_K`.
    pub fn l_mul(&self) -> Self {
        let mut out = Self::zero(self.n, self.p + 2);
        for (a, c) in &self.coeffs {
            for i in 0..self.n {
                out.accumulate(a.bumped(i, 2).expect("bump up"), c.clone());
            }
        }
        out.prune();
        out
    }

    /// `Λ K`, the momentum Laplacian. Degree below 2 gives the zero scalar.
    pub fn lambda_op(&self) -> Self {
        if self.p < 2 {
            return Self::zero(self.n, 0);
        }
        let mut out = Self::zero(self.n, self.p - 2);
        for (a, c) in &self.coeffs {
            for i in 0..self.n {
                let e = a.0[i];
                if e >= 2 {
                    let w = S::from_i64((e * (e - 1)) as i64);
                    out.accumulate(a.bumped(i, -2).expect("exponent >= 2"), c.scale(&w));
                }
            }
        }
        out.prune();
        out
    }

    /// `Λ K = 0`, exactly or up to float roundoff relative to `K`.
    pub fn is_trace_free(&self) -> bool {
        let weight = (self.n * self.p * self.p).max(1) as f64;
        let scale = weight * self.max_abs_coefficient();
        self.lambda_op()
            .components()
            .all(|(_, _, _, v)| v.is_negligible(scale))
    }

    /// Standard decomposition `K = Σ_j L^j K_j` with every `K_j` trace-free.
    ///
    /// Uses `Λ(L^j H) = 2j(n + 2m + 2j - 2) L^{j-1} H` for trace-free `H` of
    /// degree `m`: the parts of `K` are read off from the parts of `Λ K`.
    pub fn standard_decompose(&self) -> StandardDecomposition<S> {
        let (n, p) = (self.n, self.p);
        if p < 2 {
            return StandardDecomposition {
                parts: vec![self.clone()],
            };
        }
        let inner = self.lambda_op().standard_decompose();
        let mut parts = Vec::with_capacity(p / 2 + 1);
        parts.push(Self::zero(n, p));
        for (i, m) in inner.parts.into_iter().enumerate() {
            let j = (i + 1) as i64;
            let denom = 2 * j * (n as i64 + 2 * p as i64 - 2 * j - 2);
            debug_assert!(denom > 0);
            parts.push(m.scale(&S::ratio(1, denom)));
        }
        let mut rest = self.clone();
        for (j, part) in parts.iter().enumerate().skip(1) {
            rest = rest
                .sub(&part.l_power(j))
                .expect("degrees agree by construction");
        }
        parts[0] = rest;
        StandardDecomposition { parts }
    }

    /// `L^j · K`.
    pub fn l_power(&self, j: usize) -> Self {
        (0..j).fold(self.clone(), |acc, _| acc.l_mul())
    }

    /// Trace-free projection of `v · K` for trace-free `K`:
    /// `v·K - L (v ⌟ K) / (n + 2(p - 1))`. With `project = false` the plain
    /// product `v · K` is returned.
    pub fn tf_part_of_vector_mul(&self, v: &[S], project: bool) -> Result<Self> {
        self.check_dim(v.len())?;
        if !self.is_trace_free() {
            return Err(Error::NotTraceFree);
        }
        let product = Self::vector(v).sym_mul(self)?;
        if !project || self.p == 0 {
            return Ok(product);
        }
        let denom = self.n as i64 + 2 * (self.p as i64 - 1);
        let correction = self.contract(v)?.l_mul().scale(&S::ratio(1, denom));
        product.sub(&correction)
    }

    /// `N_K(x, y) = Σ_a c_a(x) y^a`.
    pub fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        self.coeffs
            .iter()
            .map(|(a, c)| c.evaluate(x) * a.monomial_value(y))
            .sum()
    }

    /// Multilinear value `K(y, …, y) = p! · N_K(y)`.
    pub fn form_value(&self, x: &[f64], y: &[f64]) -> f64 {
        let pf: f64 = (1..=self.p).map(|i| i as f64).product();
        pf * self.eval(x, y)
    }

    /// Every coefficient is constant along the first `n - 1` axes.
    pub fn is_transversally_flat(&self) -> bool {
        self.coeffs.values().all(TorusScalar::is_axial)
    }

    /// Every monomial has an even exponent on the last axis.
    pub fn has_even_last_parity(&self) -> bool {
        let last = self.n - 1;
        self.coeffs.keys().all(|a| a.0[last] % 2 == 0)
    }

    /// Componentwise maximum of the coefficient bands.
    pub fn band(&self) -> Vec<u32> {
        let mut band = vec![0; self.n];
        for c in self.coeffs.values() {
            for (b, &m) in band.iter_mut().zip(c.band()) {
                *b = (*b).max(m);
            }
        }
        band
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        max_magnitude(self.components().map(|(_, _, _, v)| v))
    }

    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T) -> SymTensorField<T> {
        let mut out = SymTensorField::zero(self.n, self.p);
        for (a, c) in &self.coeffs {
            out.accumulate(a.clone(), c.map_scalar(&f));
        }
        out.prune();
        out
    }

    pub fn to_f64(&self) -> SymTensorField<f64> {
        self.map_scalar(|v| v.to_f64())
    }

    /// `[{"mono": [...], "coeff": [[k], cos, sin]...}]`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.coeffs
                .iter()
                .map(|(a, c)| serde_json::json!({ "mono": a.0, "coeff": c.to_json() }))
                .collect(),
        )
    }
}

/// Parts `K_j` of degree `p - 2j` with `Σ_j L^j K_j = K` and `Λ K_j = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct StandardDecomposition<S> {
    pub parts: Vec<SymTensorField<S>>,
}

impl<S: Scalar> StandardDecomposition<S> {
    pub fn reconstruct(&self) -> SymTensorField<S> {
        let mut iter = self.parts.iter().enumerate();
        let (_, first) = iter.next().expect("at least one part");
        iter.fold(first.clone(), |acc, (j, part)| {
            acc.add(&part.l_power(j)).expect("consistent degrees")
        })
    }

    pub fn part(&self, j: usize) -> Option<&SymTensorField<S>> {
        self.parts.get(j)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::TensorSampler;
    use crate::scalar::Rational;
    use num::{One, Zero};

    type Q = Rational;
    type T = SymTensorField<Q>;

    fn q(a: i64, b: i64) -> Q {
        Q::ratio(a, b)
    }

    fn e(n: usize, i: usize) -> T {
        T::basis_vector(n, i)
    }

    fn konst(n: usize, v: Q) -> TorusScalar<Q> {
        TorusScalar::constant(n, v)
    }

    #[test]
    fn multi_index_enumeration() {
        let ids = multi_indices(3, 2);
        assert_eq!(ids.len(), 6);
        assert!(ids.windows(2).all(|w| w[0] < w[1]));
        assert!(ids.iter().all(|a| a.degree() == 2));
        assert_eq!(multi_indices(2, 0), vec![MultiIndex(vec![0, 0])]);
    }

    #[test]
    fn product_of_linear_forms() {
        let sq = e(2, 0).sym_mul(&e(2, 0)).unwrap();
        assert_eq!(sq, T::constant_monomial(MultiIndex(vec![2, 0]), Q::one()));
        let l = (0..3).fold(T::zero(3, 2), |acc, i| {
            acc.add(&e(3, i).sym_mul(&e(3, i)).unwrap()).unwrap()
        });
        assert_eq!(l, T::metric_l(3));
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        assert_eq!(
            e(2, 0).sym_mul(&e(3, 0)).unwrap_err(),
            Error::DimensionMismatch(2, 3)
        );
        assert!(e(2, 0).contract(&[Q::one()]).is_err());
        assert_eq!(
            e(2, 0).inner(&T::metric_l(2)).unwrap_err(),
            Error::DegreeMismatch(1, 2)
        );
    }

    #[test]
    fn contraction_examples() {
        let sq = e(2, 0).sym_mul(&e(2, 0)).unwrap();
        assert_eq!(sq.contract(&[Q::one(), Q::zero()]).unwrap(), e(2, 0).scale(&q(2, 1)));
        assert!(sq.contract(&[Q::zero(), Q::one()]).unwrap().is_zero());
        let s = T::scalar(konst(2, q(3, 1)));
        let c = s.contract(&[Q::one(), Q::one()]).unwrap();
        assert!(c.is_zero() && c.degree() == 0);
    }

    #[test]
    fn inner_examples() {
        let one = |t: &T, u: &T| t.inner(u).unwrap().mean();
        assert_eq!(one(&e(2, 0), &e(2, 0)), Q::one());
        let e11 = e(2, 0).sym_mul(&e(2, 0)).unwrap();
        let e12 = e(2, 0).sym_mul(&e(2, 1)).unwrap();
        assert_eq!(one(&e11, &e11), q(2, 1));
        assert_eq!(one(&e12, &e12), Q::one());
        assert_eq!(one(&e11, &e12), Q::zero());
    }

    /// Brute-force the symmetrized scalar product over `S_2`:
    /// `g(v·v, w·w) = Σ_σ g(v, w)g(v, w) = 2 g(v, w)²`.
    #[test]
    fn inner_matches_permutation_sum() {
        let mut sampler = TensorSampler::new(11);
        for _ in 0..20 {
            let v = sampler.vector(3);
            let w = sampler.vector(3);
            let vv = T::vector(&v).sym_mul(&T::vector(&v)).unwrap();
            let ww = T::vector(&w).sym_mul(&T::vector(&w)).unwrap();
            let gvw = v
                .iter()
                .zip(&w)
                .fold(Q::zero(), |acc, (a, b)| acc + a.clone() * b.clone());
            assert_eq!(vv.inner(&ww).unwrap().mean(), q(2, 1) * gvw.clone() * gvw);
        }
    }

    #[test]
    fn l_mul_examples() {
        let one = T::scalar(konst(2, Q::one()));
        assert_eq!(one.l_mul(), T::metric_l(2));
        // q = 1: (L·e1)(e1, e1, e1) = 3·2·e1(e1)·|e1|² = 6
        let le1 = e(2, 0).l_mul();
        let v = [1.0, 0.0];
        assert_eq!(le1.form_value(&[0.0, 0.0], &v), 6.0);
        assert_eq!(e(2, 0).form_value(&[0.0, 0.0], &v), 1.0);
    }

    #[test]
    fn lambda_examples() {
        for n in 1..5 {
            assert_eq!(
                T::metric_l(n).lambda_op(),
                T::scalar(konst(n, Q::from_i64(2 * n as i64)))
            );
        }
        assert!(e(2, 0).sym_mul(&e(2, 1)).unwrap().lambda_op().is_zero());
        assert!(e(2, 0).lambda_op().is_zero());
    }

    #[test]
    fn standard_decomposition_examples() {
        let l = T::metric_l(2);
        let dec = l.standard_decompose();
        assert!(dec.parts[0].is_zero());
        assert_eq!(dec.parts[1], T::scalar(konst(2, Q::one())));

        let e11 = e(2, 0).sym_mul(&e(2, 0)).unwrap();
        let dec = e11.standard_decompose();
        assert_eq!(dec.parts[0], e11.sub(&l.scale(&q(1, 2))).unwrap());
        assert_eq!(dec.parts[1], T::scalar(konst(2, q(1, 2))));
    }

    #[test]
    fn projection_formula_examples() {
        // (e1·e1)_0 = e1·e1 - L/n
        for n in 2..5 {
            let mut v = vec![Q::zero(); n];
            v[0] = Q::one();
            let r = e(n, 0).tf_part_of_vector_mul(&v, true).unwrap();
            let e11 = e(n, 0).sym_mul(&e(n, 0)).unwrap();
            assert_eq!(r, e11.sub(&T::metric_l(n).scale(&q(1, n as i64))).unwrap());
            assert!(r.is_trace_free());
        }
        // v orthogonal to a harmonic K with v ⌟ K = 0
        let k = e(3, 0).sym_mul(&e(3, 1)).unwrap();
        let v = [Q::zero(), Q::zero(), Q::one()];
        assert_eq!(
            k.tf_part_of_vector_mul(&v, true).unwrap(),
            T::vector(&v).sym_mul(&k).unwrap()
        );
        // input must be trace-free
        assert_eq!(
            T::metric_l(2).tf_part_of_vector_mul(&[Q::one(), Q::zero()], true).unwrap_err(),
            Error::NotTraceFree
        );
        // degree 0: the contraction term vanishes, no n + 2(p-1) = 0 division at n = 2
        let s = T::scalar(konst(2, q(5, 1)));
        assert_eq!(
            s.tf_part_of_vector_mul(&[Q::one(), Q::zero()], true).unwrap(),
            e(2, 0).scale(&q(5, 1))
        );
    }

    #[test]
    fn eval_examples() {
        let e11 = e(2, 0).sym_mul(&e(2, 0)).unwrap();
        assert_eq!(e11.eval(&[0.3, 0.1], &[1.0, 0.0]), 1.0);
        assert_eq!(e11.form_value(&[0.3, 0.1], &[1.0, 0.0]), 2.0);
        let v = [0.3, -1.2, 2.0];
        let norm2: f64 = v.iter().map(|x| x * x).sum();
        assert!((T::metric_l(3).eval(&[0.0; 3], &v) - norm2).abs() < 1e-14);
    }

    #[test]
    fn eval_is_multiplicative() {
        let mut sampler = TensorSampler::new(5);
        for _ in 0..20 {
            let a = sampler.tensor(2, 2, &[1, 1]);
            let b = sampler.tensor(2, 1, &[1, 2]);
            let x = sampler.point(2);
            let y = sampler.point(2);
            let lhs = a.sym_mul(&b).unwrap().eval(&x, &y);
            let rhs = a.eval(&x, &y) * b.eval(&x, &y);
            assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()));
        }
    }
}
