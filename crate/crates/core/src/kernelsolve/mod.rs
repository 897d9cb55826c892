//! Nullspaces of assembled Killing operators, predicted dimensions, the
//! polynomial span in `ξ_1, …, ξ_{n-1}` and `L̃ = e^{-2f} L`, and the
//! end-to-end verifier.

mod exact;
mod float;

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::diffops::{assemble_operator, BasisKey, OperatorVariant, SparseLinearMap};
use crate::error::{Error, Result};
use crate::scalar::{Arith, Rational, Scalar};
use crate::symalg::{multi_indices, MultiIndex, SymTensorField};
use crate::torusfn::ConformalFactor;

/// Default relative singular-value threshold for float nullspaces.
pub const DEFAULT_SVD_TOL: f64 = 1e-8;

/// Singular values this close (factor) to the threshold raise a warning.
const ILL_CONDITIONED_FACTOR: f64 = 100.0;

/// Kernel vectors of a sparse map plus conditioning diagnostics.
#[derive(Clone, Debug)]
pub struct Nullspace<S> {
    pub vectors: Vec<Vec<S>>,
    /// Float mode: smallest singular value above the threshold divided by
    /// the largest one below it.
    pub singular_gap: Option<f64>,
    pub sigma_max: Option<f64>,
    pub warnings: Vec<String>,
}

/// Scalars with a nullspace and rank backend.
pub trait LinearSolve: Scalar {
    fn nullspace_rows(rows: &[Vec<(usize, Self)>], ncols: usize, tol: f64) -> Nullspace<Self>;

    fn rank_rows(rows: &[Vec<(usize, Self)>], ncols: usize, tol: f64) -> usize;
}

/// Splits the columns into connected components of the row/column incidence
/// graph. Returns, per component, its global columns and its rows in local
/// column numbering.
fn components<S: Clone>(
    rows: &[Vec<(usize, S)>],
    ncols: usize,
) -> Vec<(Vec<usize>, Vec<Vec<(usize, S)>>)> {
    let mut parent: Vec<usize> = (0..ncols).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for row in rows {
        if let Some(&(first, _)) = row.first() {
            for &(c, _) in &row[1..] {
                let (a, b) = (find(&mut parent, first), find(&mut parent, c));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for c in 0..ncols {
        let r = find(&mut parent, c);
        by_root.entry(r).or_default().push(c);
    }
    let mut local = vec![(0usize, 0usize); ncols];
    let mut out: Vec<(Vec<usize>, Vec<Vec<(usize, S)>>)> = Vec::new();
    for (ci, cols) in by_root.into_values().enumerate() {
        for (li, &c) in cols.iter().enumerate() {
            local[c] = (ci, li);
        }
        out.push((cols, Vec::new()));
    }
    for row in rows {
        if let Some(&(first, _)) = row.first() {
            let comp = local[first].0;
            out[comp]
                .1
                .push(row.iter().map(|(c, v)| (local[*c].1, v.clone())).collect());
        }
    }
    out
}

impl LinearSolve for Rational {
    fn nullspace_rows(rows: &[Vec<(usize, Self)>], ncols: usize, _tol: f64) -> Nullspace<Self> {
        let comps = components(rows, ncols);
        let per_comp: Vec<Vec<Vec<Rational>>> = comps
            .par_iter()
            .map(|(cols, crows)| {
                exact::kernel(crows, cols.len())
                    .into_iter()
                    .map(|local| {
                        let mut v = vec![Rational::from_i64(0); ncols];
                        for (li, x) in local.into_iter().enumerate() {
                            v[cols[li]] = x;
                        }
                        v
                    })
                    .collect()
            })
            .collect();
        let mut vectors: Vec<Vec<Rational>> = per_comp.into_iter().flatten().collect();
        // order by free column, which is the last nonzero entry
        vectors.sort_by_key(|v| v.iter().rposition(|x| !num::Zero::is_zero(x)));
        Nullspace {
            vectors,
            singular_gap: None,
            sigma_max: None,
            warnings: Vec::new(),
        }
    }

    fn rank_rows(rows: &[Vec<(usize, Self)>], _ncols: usize, _tol: f64) -> usize {
        exact::rank(rows)
    }
}

impl LinearSolve for f64 {
    fn nullspace_rows(rows: &[Vec<(usize, Self)>], ncols: usize, tol: f64) -> Nullspace<Self> {
        let comps = components(rows, ncols);
        let svds: Vec<float::BlockSvd> = comps
            .par_iter()
            .map(|(cols, crows)| float::block_svd(crows, cols.len()))
            .collect();
        let sigma_max = svds
            .iter()
            .flat_map(|s| s.sigma.iter().copied())
            .fold(0.0, f64::max);
        let threshold = tol * sigma_max;
        let mut vectors = Vec::new();
        let mut kept_max: f64 = 0.0;
        let mut discarded_min = f64::INFINITY;
        let mut near = 0usize;
        for ((cols, _), svd) in comps.iter().zip(&svds) {
            for (s, v) in svd.sigma.iter().zip(&svd.vectors) {
                if *s < threshold || sigma_max == 0.0 {
                    kept_max = kept_max.max(*s);
                    let mut full = vec![0.0; ncols];
                    for (li, x) in v.iter().enumerate() {
                        full[cols[li]] = *x;
                    }
                    vectors.push(full);
                } else {
                    discarded_min = discarded_min.min(*s);
                }
                if *s > 0.0
                    && *s > threshold / ILL_CONDITIONED_FACTOR
                    && *s < threshold * ILL_CONDITIONED_FACTOR
                {
                    near += 1;
                }
            }
        }
        let mut warnings = Vec::new();
        if near > 0 {
            warnings.push(format!(
                "ill-conditioning: {near} singular value(s) within a factor {ILL_CONDITIONED_FACTOR} of the threshold"
            ));
        }
        let singular_gap = if vectors.is_empty() || !discarded_min.is_finite() {
            None
        } else if kept_max == 0.0 {
            Some(f64::INFINITY)
        } else {
            Some(discarded_min / kept_max)
        };
        Nullspace {
            vectors,
            singular_gap,
            sigma_max: Some(sigma_max),
            warnings,
        }
    }

    fn rank_rows(rows: &[Vec<(usize, Self)>], ncols: usize, tol: f64) -> usize {
        float::rank(rows, ncols, tol)
    }
}

/// Sparse rows of a map.
fn map_rows<S: Scalar>(map: &SparseLinearMap<S>) -> Vec<Vec<(usize, S)>> {
    let mut rows = vec![Vec::new(); map.nrows()];
    for (r, c, v) in &map.entries {
        rows[*r].push((*c, v.clone()));
    }
    rows
}

/// Nullspace of an assembled operator (exact elimination or SVD depending
/// on the scalar type).
pub fn nullspace<S: LinearSolve>(map: &SparseLinearMap<S>, tol: f64) -> Nullspace<S> {
    S::nullspace_rows(&map_rows(map), map.ncols(), tol)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KernelMeta {
    pub n: usize,
    pub p: usize,
    pub factor: String,
    pub band: Vec<u32>,
    pub mode: Arith,
    pub variant: String,
}

#[derive(Clone, Debug)]
pub struct KernelBasis<S> {
    pub meta: KernelMeta,
    pub basis: Vec<SymTensorField<S>>,
    /// Exact mode: largest coefficient of any `A v` (zero). Float mode:
    /// `max ‖A v‖ / σ_max` over unit basis vectors.
    pub residual_max: f64,
    pub singular_gap: Option<f64>,
    pub warnings: Vec<String>,
}

impl<S> KernelBasis<S> {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }
}

/// Assembles the operator and computes its kernel as tensor fields.
pub fn compute_kernel<S: LinearSolve>(
    n: usize,
    p: usize,
    factor: &ConformalFactor,
    band: &[u32],
    variant: OperatorVariant,
    tol: f64,
) -> Result<KernelBasis<S>> {
    let asm = assemble_operator::<S>(n, p, factor, band, variant)?;
    let ns = nullspace(&asm.map, tol);
    let mut residual_max: f64 = 0.0;
    for v in &ns.vectors {
        let av = asm.map.apply(v);
        let r = match S::MODE {
            Arith::Exact => av.iter().map(|x| x.magnitude()).fold(0.0, f64::max),
            Arith::Float => {
                let norm = |x: &[S]| x.iter().map(|t| t.to_f64().powi(2)).sum::<f64>().sqrt();
                let scale = ns.sigma_max.unwrap_or(1.0).max(f64::MIN_POSITIVE) * norm(v);
                norm(&av) / scale
            }
        };
        residual_max = residual_max.max(r);
    }
    let basis = ns
        .vectors
        .iter()
        .map(|v| asm.map.field(v))
        .collect();
    let mut warnings = asm.warnings;
    warnings.extend(ns.warnings);
    Ok(KernelBasis {
        meta: KernelMeta {
            n,
            p,
            factor: factor.spec_string(),
            band: band.to_vec(),
            mode: S::MODE,
            variant: match variant {
                OperatorVariant::Killing => "killing".into(),
                OperatorVariant::ConformalKilling => "conformal_killing".into(),
            },
        },
        basis,
        residual_max,
        singular_gap: ns.singular_gap,
        warnings,
    })
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Dimension of the band-limited Killing space predicted for the factor.
pub fn predicted_dimension(n: usize, p: usize, factor: &ConformalFactor) -> usize {
    match factor {
        ConformalFactor::Flat => binomial(p + n - 1, n - 1),
        ConformalFactor::TrigExponent { .. } => binomial(p + n - 2, n - 2),
        ConformalFactor::InverseTrig { .. } => (0..=p / 2)
            .map(|m| binomial(p - 2 * m + n - 2, n - 2))
            .sum(),
    }
}

/// Monomials `ξ^a · L̃^m` spanning the predicted solution space, with `a`
/// supported on the first `n - 1` axes (all axes for the flat factor).
/// Only `m = 0` survives for the trig-exponent factor, whose `e^{-2mf}` is
/// not band-limited.
pub fn span_basis<S: Scalar>(
    n: usize,
    p: usize,
    factor: &ConformalFactor,
) -> Result<Vec<SymTensorField<S>>> {
    let transverse = |deg: usize| -> Vec<SymTensorField<S>> {
        multi_indices(n - 1, deg)
            .into_iter()
            .map(|a| {
                let mut full = a.0;
                full.push(0);
                SymTensorField::constant_monomial(MultiIndex(full), S::one())
            })
            .collect()
    };
    Ok(match factor {
        ConformalFactor::Flat => multi_indices(n, p)
            .into_iter()
            .map(|a| SymTensorField::constant_monomial(a, S::one()))
            .collect(),
        ConformalFactor::TrigExponent { .. } => transverse(p),
        ConformalFactor::InverseTrig { .. } => {
            let data = factor.data::<S>(n)?;
            let phi = data.emin2f_power(1).expect("inverse-trig φ");
            let l_tilde = SymTensorField::metric_l(n).mul_function(&phi);
            let mut out = Vec::new();
            let mut l_pow = SymTensorField::scalar(crate::torusfn::TorusScalar::constant(n, S::one()));
            for m in 0..=p / 2 {
                for mono in transverse(p - 2 * m) {
                    out.push(mono.sym_mul(&l_pow)?);
                }
                l_pow = l_pow.sym_mul(&l_tilde)?;
            }
            out
        }
    })
}

/// Constant trace-free tensors, the expected conformal Killing space of the
/// flat torus.
pub fn conformal_span_basis<S: Scalar>(n: usize, p: usize) -> Vec<SymTensorField<S>> {
    multi_indices(n, p)
        .into_iter()
        .map(|a| {
            SymTensorField::constant_monomial(a, S::one())
                .standard_decompose()
                .parts
                .swap_remove(0)
        })
        .collect()
}

/// `dim Sym^p_0 R^n`.
pub fn predicted_conformal_dimension(n: usize, p: usize) -> usize {
    let sym = |q: usize| binomial(q + n - 1, n - 1);
    sym(p) - if p >= 2 { sym(p - 2) } else { 0 }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SubspaceRelation {
    /// Every element of the second family lies in the span of the first.
    pub contained: bool,
    /// Contained and of equal dimension.
    pub equal: bool,
}

fn stacked_rows<S: Scalar>(
    families: &[&[SymTensorField<S>]],
) -> (Vec<Vec<Vec<(usize, S)>>>, usize) {
    let mut keys = BTreeSet::new();
    for fam in families {
        for t in fam.iter() {
            for (a, k, slot, _) in t.components() {
                keys.insert(BasisKey {
                    mono: a.clone(),
                    freq: k.clone(),
                    slot,
                });
            }
        }
    }
    let index: BTreeMap<BasisKey, usize> = keys.into_iter().enumerate().map(|(i, k)| (k, i)).collect();
    let rows = families
        .iter()
        .map(|fam| {
            fam.iter()
                .map(|t| {
                    t.components()
                        .map(|(a, k, slot, v)| {
                            let key = BasisKey {
                                mono: a.clone(),
                                freq: k.clone(),
                                slot,
                            };
                            (index[&key], v.clone())
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    (rows, index.len())
}

pub fn rank_of<S: LinearSolve>(family: &[SymTensorField<S>], tol: f64) -> usize {
    let (rows, ncols) = stacked_rows(&[family]);
    S::rank_rows(&rows[0], ncols, tol)
}

/// Rank comparison of two families of tensors of equal `n` and `p`; the
/// coefficient vectors are embedded in the union of their supports.
pub fn subspace_relation<S: LinearSolve>(
    a: &[SymTensorField<S>],
    b: &[SymTensorField<S>],
    tol: f64,
) -> Result<SubspaceRelation> {
    if let (Some(x), Some(y)) = (a.first(), b.first()) {
        if x.dim() != y.dim() {
            return Err(Error::DimensionMismatch(x.dim(), y.dim()));
        }
        if x.degree() != y.degree() {
            return Err(Error::DegreeMismatch(x.degree(), y.degree()));
        }
    }
    let (rows, ncols) = stacked_rows(&[a, b]);
    let rank_a = S::rank_rows(&rows[0], ncols, tol);
    let rank_b = S::rank_rows(&rows[1], ncols, tol);
    let union: Vec<_> = rows[0].iter().chain(&rows[1]).cloned().collect();
    let rank_ab = S::rank_rows(&union, ncols, tol);
    let contained = rank_ab == rank_a;
    Ok(SubspaceRelation {
        contained,
        equal: contained && rank_a == rank_b,
    })
}

/// Compares a computed kernel with a family of tensors.
pub fn subspace_compare<S: LinearSolve>(
    kernel: &KernelBasis<S>,
    family: &[SymTensorField<S>],
    tol: f64,
) -> Result<SubspaceRelation> {
    if let Some(t) = family.first() {
        if t.dim() != kernel.meta.n {
            return Err(Error::DimensionMismatch(kernel.meta.n, t.dim()));
        }
        if t.degree() != kernel.meta.p {
            return Err(Error::DegreeMismatch(kernel.meta.p, t.degree()));
        }
    }
    let rel = subspace_relation(&kernel.basis, family, tol)?;
    Ok(SubspaceRelation {
        contained: rel.contained,
        equal: rel.contained && kernel.dimension() == rank_of(family, tol),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ParityFlatness {
    /// No monomial with an odd exponent on the last axis.
    pub parity_ok: bool,
    /// Every coefficient depends on `x_n` only.
    pub flatness_ok: bool,
}

/// Exact check: any nonzero coefficient counts.
pub fn parity_and_flatness<S: Scalar>(k: &SymTensorField<S>) -> ParityFlatness {
    parity_and_flatness_tol(k, 0.0)
}

/// Coefficients below `rel_tol · max|coeff|` are ignored.
pub fn parity_and_flatness_tol<S: Scalar>(k: &SymTensorField<S>, rel_tol: f64) -> ParityFlatness {
    let threshold = rel_tol * k.max_abs_coefficient();
    let last = k.dim() - 1;
    let mut out = ParityFlatness {
        parity_ok: true,
        flatness_ok: true,
    };
    for (a, freq, _, v) in k.components() {
        if v.magnitude() <= threshold {
            continue;
        }
        if a.0[last] % 2 == 1 {
            out.parity_ok = false;
        }
        if !freq.is_axial() {
            out.flatness_ok = false;
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub kernel_dim: usize,
    pub predicted_dim: usize,
    pub span_contained: bool,
    pub span_equals: bool,
    pub parity_ok: bool,
    pub flatness_ok: bool,
    pub residual_max: f64,
    /// Kernel dimension unchanged at last-axis band + 1.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub band_stable: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub singular_gap: Option<f64>,
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub timings_ms: BTreeMap<String, f64>,
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    pub tol: f64,
    pub stability_check: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            tol: DEFAULT_SVD_TOL,
            stability_check: true,
        }
    }
}

/// Runs the full check of one configuration and also returns the kernel.
pub fn verify_theorem_typed<S: LinearSolve>(
    n: usize,
    p: usize,
    factor: &ConformalFactor,
    band: &[u32],
    opts: VerifyOptions,
) -> Result<(VerificationReport, KernelBasis<S>)> {
    if factor.is_flat() {
        return Err(Error::UnsupportedFactor(
            "verification needs a nonflat factor".into(),
        ));
    }
    if n < 2 {
        return Err(Error::Config("verification needs n >= 2".into()));
    }
    let mut timings = BTreeMap::new();
    let mut warnings = Vec::new();
    let floor = (p / 2) as u32 + factor.band();
    if band.len() == n && band[n - 1] < floor {
        warnings.push(format!(
            "last-axis band {} is below the sufficiency floor {floor}",
            band[n - 1]
        ));
    }

    let t0 = Instant::now();
    let kernel = compute_kernel::<S>(n, p, factor, band, OperatorVariant::Killing, opts.tol)?;
    timings.insert("kernel".to_string(), t0.elapsed().as_secs_f64() * 1e3);
    warnings.extend(kernel.warnings.iter().cloned());

    let t1 = Instant::now();
    let span = span_basis::<S>(n, p, factor)?;
    let rel = subspace_compare(&kernel, &span, opts.tol)?;
    timings.insert("compare".to_string(), t1.elapsed().as_secs_f64() * 1e3);

    let rel_tol = match S::MODE {
        Arith::Exact => 0.0,
        Arith::Float => opts.tol,
    };
    let checks: Vec<ParityFlatness> = kernel
        .basis
        .iter()
        .map(|k| parity_and_flatness_tol(k, rel_tol))
        .collect();

    let band_stable = if opts.stability_check {
        let t2 = Instant::now();
        let mut wider = band.to_vec();
        wider[n - 1] += 1;
        let again = compute_kernel::<S>(n, p, factor, &wider, OperatorVariant::Killing, opts.tol)?;
        timings.insert("stability".to_string(), t2.elapsed().as_secs_f64() * 1e3);
        Some(again.dimension() == kernel.dimension())
    } else {
        None
    };

    let report = VerificationReport {
        kernel_dim: kernel.dimension(),
        predicted_dim: predicted_dimension(n, p, factor),
        span_contained: rel.contained,
        span_equals: rel.equal,
        parity_ok: checks.iter().all(|c| c.parity_ok),
        flatness_ok: checks.iter().all(|c| c.flatness_ok),
        residual_max: kernel.residual_max,
        band_stable,
        singular_gap: kernel.singular_gap,
        warnings,
        timings_ms: timings,
    };
    Ok((report, kernel))
}

/// Mode-dispatching verifier.
pub fn verify_theorem(
    n: usize,
    p: usize,
    factor: &ConformalFactor,
    band: &[u32],
    mode: Arith,
    opts: VerifyOptions,
) -> Result<VerificationReport> {
    match mode {
        Arith::Exact => verify_theorem_typed::<Rational>(n, p, factor, band, opts).map(|r| r.0),
        Arith::Float => verify_theorem_typed::<f64>(n, p, factor, band, opts).map(|r| r.0),
    }
}
