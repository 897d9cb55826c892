//! Differential operators on symmetric tensor fields of the flat torus and
//! the global (conformal) Killing operator as a sparse matrix.
//!
//! In the flat frame `∇ = ∂`, so with `N = N_K`:
//!
//! * `d K   ↦  Σ_i y_i ∂_{x_i} N`
//! * `δ K   ↦ -Σ_i ∂_{y_i} ∂_{x_i} N`
//! * Killing equation of `e^{2f} g`: `dK + L·(df ⌟ K) = 0`.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::symalg::{multi_indices, MultiIndex, SymTensorField};
use crate::torusfn::{canonical_frequencies, ConformalFactor, FPrime, FactorData, Freq, Slot};

/// `d K`.
pub fn d_flat<S: Scalar>(k: &SymTensorField<S>) -> SymTensorField<S> {
    let n = k.dim();
    (0..n).fold(SymTensorField::zero(n, k.degree() + 1), |acc, i| {
        acc.add(&k.partial_position(i).mul_coordinate(i))
            .expect("same degree")
    })
}

/// `δ K`; zero for functions.
pub fn delta_flat<S: Scalar>(k: &SymTensorField<S>) -> SymTensorField<S> {
    let n = k.dim();
    if k.degree() == 0 {
        return SymTensorField::zero(n, 0);
    }
    (0..n).fold(SymTensorField::zero(n, k.degree() - 1), |acc, i| {
        acc.sub(&k.partial_position(i).partial_momentum(i))
            .expect("same degree")
    })
}

/// Lie derivative along the parallel field `ξ_{axis+1}`, `axis < n - 1`.
pub fn lie_flat_dir<S: Scalar>(k: &SymTensorField<S>, axis: usize) -> Result<SymTensorField<S>> {
    let limit = k.dim() - 1;
    if axis >= limit {
        return Err(Error::AxisOutOfRange { axis, limit });
    }
    Ok(k.partial_position(axis))
}

/// Applies the Killing operator of one conformal factor.
#[derive(Clone, Debug)]
pub struct KillingOperator<S> {
    data: FactorData<S>,
}

impl<S: Scalar> KillingOperator<S> {
    pub fn new(factor: &ConformalFactor, n: usize) -> Result<Self> {
        Ok(KillingOperator {
            data: factor.data(n)?,
        })
    }

    pub fn data(&self) -> &FactorData<S> {
        &self.data
    }

    /// `dK + L·(f' ∂_{y_n} N)`, or `2φ dK - φ' L ∂_{y_n} N` for the
    /// inverse-trig family.
    pub fn apply(&self, k: &SymTensorField<S>) -> SymTensorField<S> {
        let n = k.dim();
        assert_eq!(n, self.data.n, "torus dimension mismatch");
        let last = n - 1;
        let dk = d_flat(k);
        let dn = k.partial_momentum(last);
        // functions: the L-term vanishes with ∂_{y_n} N
        let scalar = k.degree() == 0;
        match (&self.data.fprime, &self.data.phi) {
            (FPrime::Series(fp), _) => {
                if fp.is_zero() || scalar {
                    return dk;
                }
                dk.add(&dn.mul_function(fp).l_mul()).expect("same degree")
            }
            (FPrime::PhiMultiplied, Some((phi, phi_prime))) => {
                let two_phi = phi.scale(&S::from_i64(2));
                if scalar {
                    return dk.mul_function(&two_phi);
                }
                dk.mul_function(&two_phi)
                    .sub(&dn.mul_function(phi_prime).l_mul())
                    .expect("same degree")
            }
            (FPrime::PhiMultiplied, None) => unreachable!("phi data present for inverse-trig"),
        }
    }

    fn fprime_series(&self) -> Result<&crate::torusfn::TorusScalar<S>> {
        match &self.data.fprime {
            FPrime::Series(fp) => Ok(fp),
            FPrime::PhiMultiplied => Err(Error::UnsupportedFactor(
                "graded system needs a band-limited f'".into(),
            )),
        }
    }

    /// Trace-free graded parts of the residual (its standard decomposition).
    pub fn graded_residual(&self, k: &SymTensorField<S>) -> Result<Vec<SymTensorField<S>>> {
        self.fprime_series()?;
        Ok(self.apply(k).standard_decompose().parts)
    }

    /// The graded equations written out term by term from the standard
    /// parts `K_j`: entry `j` is
    ///
    /// `dK_j + c_q L δK_j + 2j (df·K_j - c_q L df⌟K_j) - c' δK_{j-1} + (1 + 2(j-1)c') df⌟K_{j-1}`
    ///
    /// with `q = p - 2j`, `c_q = 1/(n + 2(q-1))`, `c' = 1/(n + 2(q+1))`.
    pub fn graded_system(&self, k: &SymTensorField<S>) -> Result<Vec<SymTensorField<S>>> {
        let fp = self.fprime_series()?;
        let (n, p) = (k.dim(), k.degree());
        let last = n - 1;
        let parts = k.standard_decompose().parts;
        let df = SymTensorField::monomial(MultiIndex::unit(n, last), fp.clone());
        let df_contract = |t: &SymTensorField<S>| t.partial_momentum(last).mul_function(fp);
        // the residual has degree p + 1, hence (p + 1)/2 + 1 graded parts; for
        // odd p the last one only involves K_{j-1}
        let count = (p + 1) / 2 + 1;
        let mut out = Vec::with_capacity(count);
        for j in 0..count {
            let q = p as i64 - 2 * j as i64;
            let twoj = S::from_i64(2 * j as i64);
            let mut eq = SymTensorField::zero(n, (q + 1) as usize);
            if let Some(kj) = parts.get(j) {
                eq = eq.add(&d_flat(kj))?;
                if j > 0 {
                    eq = eq.add(&df.sym_mul(kj)?.scale(&twoj))?;
                }
                // q = 0: K_j is a function, δK_j = 0 = df⌟K_j, and c_q may be singular
                if q > 0 {
                    let cq = S::ratio(1, n as i64 + 2 * (q - 1));
                    eq = eq.add(&delta_flat(kj).l_mul().scale(&cq))?;
                    if j > 0 {
                        eq = eq.sub(&df_contract(kj).l_mul().scale(&(twoj.clone() * cq)))?;
                    }
                }
            }
            if j > 0 {
                let prev = &parts[j - 1];
                let cprev = S::ratio(1, n as i64 + 2 * (q + 1));
                let weight = S::one() + S::from_i64(2 * (j as i64 - 1)) * cprev.clone();
                if prev.degree() > 0 {
                    eq = eq.sub(&delta_flat(prev).scale(&cprev))?;
                    eq = eq.add(&df_contract(prev).scale(&weight))?;
                }
            }
            out.push(eq);
        }
        Ok(out)
    }
}

/// `dK + L·(df ⌟ K)` (or its `2φ`-multiplied form).
pub fn killing_residual<S: Scalar>(
    k: &SymTensorField<S>,
    factor: &ConformalFactor,
) -> Result<SymTensorField<S>> {
    Ok(KillingOperator::new(factor, k.dim())?.apply(k))
}

/// Standard-decomposition parts of the Killing residual; needs a
/// band-limited `f'` (flat or trig-exponent factor).
pub fn graded_killing_residual<S: Scalar>(
    k: &SymTensorField<S>,
    factor: &ConformalFactor,
) -> Result<Vec<SymTensorField<S>>> {
    if matches!(factor, ConformalFactor::InverseTrig { .. }) {
        return Err(Error::UnsupportedFactor(
            "graded residual is defined for flat and trig-exponent factors".into(),
        ));
    }
    KillingOperator::new(factor, k.dim())?.graded_residual(k)
}

/// `dK + L δK / (n + 2(p-1))` for trace-free `K`: vanishes iff `K` is a
/// conformal Killing tensor of the flat metric. For functions `δK = 0` and
/// the residual is `dK`.
pub fn conformal_killing_residual<S: Scalar>(k: &SymTensorField<S>) -> Result<SymTensorField<S>> {
    if !k.is_trace_free() {
        return Err(Error::NotTraceFree);
    }
    let dk = d_flat(k);
    if k.degree() == 0 {
        return Ok(dk);
    }
    let denom = k.dim() as i64 + 2 * (k.degree() as i64 - 1);
    if denom == 0 {
        return Err(Error::SingularDenominator {
            n: k.dim(),
            p: k.degree(),
        });
    }
    dk.add(&delta_flat(k).l_mul().scale(&S::ratio(1, denom)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OperatorVariant {
    Killing,
    /// Trace-free conformal Killing equation of the flat metric, stacked with
    /// the constraint `Λ K = 0`.
    ConformalKilling,
}

/// Real basis element `(multi-index, frequency, slot)` of band-limited fields.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisKey {
    pub mono: MultiIndex,
    pub freq: Freq,
    pub slot: Slot,
}

/// Row index: equation block plus basis element of the output space.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RowKey {
    pub block: u8,
    pub key: BasisKey,
}

/// Basis of band-limited degree-`p` fields: multi-index major, then
/// frequency, then cos before sin (no sin slot for `k = 0`).
pub fn field_basis(n: usize, p: usize, band: &[u32]) -> Vec<BasisKey> {
    let freqs = canonical_frequencies(band);
    let mut out = Vec::new();
    for mono in multi_indices(n, p) {
        for k in &freqs {
            out.push(BasisKey {
                mono: mono.clone(),
                freq: k.clone(),
                slot: Slot::Cos,
            });
            if !k.is_zero() {
                out.push(BasisKey {
                    mono: mono.clone(),
                    freq: k.clone(),
                    slot: Slot::Sin,
                });
            }
        }
    }
    out
}

/// Sparse matrix of a linear operator between band-limited tensor spaces.
#[derive(Clone, Debug)]
pub struct SparseLinearMap<S> {
    pub n: usize,
    pub p_in: usize,
    pub band_in: Vec<u32>,
    pub rows: Vec<RowKey>,
    pub cols: Vec<BasisKey>,
    /// `(row, col, value)` sorted by row then column.
    pub entries: Vec<(usize, usize, S)>,
}

impl<S: Scalar> SparseLinearMap<S> {
    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn apply(&self, x: &[S]) -> Vec<S> {
        assert_eq!(x.len(), self.ncols());
        let mut y = vec![S::zero(); self.nrows()];
        for (r, c, v) in &self.entries {
            if !x[*c].is_zero() {
                y[*r] = y[*r].clone() + v.clone() * x[*c].clone();
            }
        }
        y
    }

    /// Coordinates of `k` in the column basis; `None` if `k` is out of band.
    pub fn coordinates(&self, k: &SymTensorField<S>) -> Option<Vec<S>> {
        let index: HashMap<&BasisKey, usize> =
            self.cols.iter().enumerate().map(|(i, c)| (c, i)).collect();
        let mut x = vec![S::zero(); self.ncols()];
        for (mono, freq, slot, v) in k.components() {
            let key = BasisKey {
                mono: mono.clone(),
                freq: freq.clone(),
                slot,
            };
            x[*index.get(&key)?] = v.clone();
        }
        Some(x)
    }

    /// Inverse of [`Self::coordinates`].
    pub fn field(&self, x: &[S]) -> SymTensorField<S> {
        assert_eq!(x.len(), self.ncols());
        columns_to_field(self.n, self.p_in, &self.cols, x)
    }

    /// Row coordinates of an operator output (blocks in row order).
    pub fn row_coordinates(&self, blocks: &[SymTensorField<S>]) -> Option<Vec<S>> {
        let index: HashMap<&RowKey, usize> =
            self.rows.iter().enumerate().map(|(i, r)| (r, i)).collect();
        let mut y = vec![S::zero(); self.nrows()];
        for (b, field) in blocks.iter().enumerate() {
            for (mono, freq, slot, v) in field.components() {
                let key = RowKey {
                    block: b as u8,
                    key: BasisKey {
                        mono: mono.clone(),
                        freq: freq.clone(),
                        slot,
                    },
                };
                y[*index.get(&key)?] = v.clone();
            }
        }
        Some(y)
    }

    /// `row col value` lines, one per nonzero entry.
    pub fn to_coo_text(&self) -> String {
        let mut s = format!("# rows {} cols {} nnz {}\n", self.nrows(), self.ncols(), self.nnz());
        for (r, c, v) in &self.entries {
            let value = match v.to_json() {
                serde_json::Value::String(t) => t,
                other => other.to_string(),
            };
            s.push_str(&format!("{r} {c} {value}\n"));
        }
        s
    }
}

pub(crate) fn columns_to_field<S: Scalar>(
    n: usize,
    p: usize,
    cols: &[BasisKey],
    x: &[S],
) -> SymTensorField<S> {
    use std::collections::BTreeMap;
    let mut grouped: BTreeMap<&MultiIndex, Vec<(Freq, S, S)>> = BTreeMap::new();
    for (key, v) in cols.iter().zip(x) {
        if v.is_zero() {
            continue;
        }
        let (c, s) = match key.slot {
            Slot::Cos => (v.clone(), S::zero()),
            Slot::Sin => (S::zero(), v.clone()),
        };
        grouped
            .entry(&key.mono)
            .or_default()
            .push((key.freq.clone(), c, s));
    }
    SymTensorField::from_terms(
        n,
        p,
        grouped.into_iter().map(|(mono, terms)| {
            (
                mono.clone(),
                crate::torusfn::TorusScalar::from_terms(n, terms),
            )
        }),
    )
}

/// Result of operator assembly.
#[derive(Clone, Debug)]
pub struct AssembledOperator<S> {
    pub map: SparseLinearMap<S>,
    pub warnings: Vec<String>,
}

/// Output blocks of the operator applied to a single field.
pub fn operator_blocks<S: Scalar>(
    op: &KillingOperator<S>,
    variant: OperatorVariant,
    k: &SymTensorField<S>,
) -> Result<Vec<SymTensorField<S>>> {
    Ok(match variant {
        OperatorVariant::Killing => vec![op.apply(k)],
        OperatorVariant::ConformalKilling => {
            let dk = d_flat(k);
            let res = if k.degree() == 0 {
                dk
            } else {
                let denom = k.dim() as i64 + 2 * (k.degree() as i64 - 1);
                dk.add(&delta_flat(k).l_mul().scale(&S::ratio(1, denom)))?
            };
            if k.degree() >= 2 {
                vec![res, k.lambda_op()]
            } else {
                vec![res]
            }
        }
    })
}

/// Matrix of the (conformal) Killing operator on degree-`p` fields with
/// per-axis input `band`. The output index set covers the enlarged band, so
/// no output frequency is discarded.
pub fn assemble_operator<S: Scalar>(
    n: usize,
    p: usize,
    factor: &ConformalFactor,
    band: &[u32],
    variant: OperatorVariant,
) -> Result<AssembledOperator<S>> {
    if n < 1 {
        return Err(Error::Config("dimension must be at least 1".into()));
    }
    if band.len() != n {
        return Err(Error::Config(format!(
            "band has {} entries, expected {n}",
            band.len()
        )));
    }
    let mut warnings = Vec::new();
    let axis_band = band[n - 1];
    if variant == OperatorVariant::Killing && !factor.is_flat() && axis_band < 1 {
        return Err(Error::Config(
            "band on the last axis must be at least 1 for a nonflat factor".into(),
        ));
    }
    if variant == OperatorVariant::Killing
        && matches!(factor, ConformalFactor::InverseTrig { .. })
        && (axis_band as usize) < p / 2
    {
        warnings.push(format!(
            "last-axis band {axis_band} is below floor(p/2) = {}; predicted solutions are excluded",
            p / 2
        ));
    }
    let op = KillingOperator::<S>::new(factor, n)?;
    let cols = field_basis(n, p, band);

    let mut out_band = band.to_vec();
    if variant == OperatorVariant::Killing {
        out_band[n - 1] += factor.band();
    }
    let mut rows: Vec<RowKey> = field_basis(n, p + 1, &out_band)
        .into_iter()
        .map(|key| RowKey { block: 0, key })
        .collect();
    if variant == OperatorVariant::ConformalKilling && p >= 2 {
        rows.extend(
            field_basis(n, p - 2, band)
                .into_iter()
                .map(|key| RowKey { block: 1, key }),
        );
    }
    let row_index: HashMap<&RowKey, usize> =
        rows.iter().enumerate().map(|(i, r)| (r, i)).collect();

    let column_entries: Vec<Vec<(usize, S)>> = cols
        .par_iter()
        .map(|col| {
            let unit = SymTensorField::monomial(
                col.mono.clone(),
                crate::torusfn::TorusScalar::mode(n, col.freq.clone(), col.slot, S::one()),
            );
            let blocks = operator_blocks(&op, variant, &unit)?;
            let mut entries = Vec::new();
            for (b, field) in blocks.iter().enumerate() {
                for (mono, freq, slot, v) in field.components() {
                    let key = RowKey {
                        block: b as u8,
                        key: BasisKey {
                            mono: mono.clone(),
                            freq: freq.clone(),
                            slot,
                        },
                    };
                    let r = *row_index
                        .get(&key)
                        .expect("output index set covers the enlarged band");
                    entries.push((r, v.clone()));
                }
            }
            Ok(entries)
        })
        .collect::<Result<_>>()?;

    let mut entries: Vec<(usize, usize, S)> = column_entries
        .into_iter()
        .enumerate()
        .flat_map(|(c, es)| es.into_iter().map(move |(r, v)| (r, c, v)))
        .collect();
    entries.sort_by_key(|(r, c, _)| (*r, *c));

    Ok(AssembledOperator {
        map: SparseLinearMap {
            n,
            p_in: p,
            band_in: band.to_vec(),
            rows,
            cols,
            entries,
        },
        warnings,
    })
}
