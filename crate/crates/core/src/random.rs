//! Seeded generators for random rational test inputs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scalar::{Rational, Scalar};
use crate::symalg::{multi_indices, SymTensorField};
use crate::torusfn::{canonical_frequencies, TorusScalar};

pub struct TensorSampler {
    rng: ChaCha8Rng,
}

impl TensorSampler {
    pub fn new(seed: u64) -> Self {
        TensorSampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// Small rational `k/d` with `|k| <= 5`, `d` in `1..=4`.
    pub fn rational(&mut self) -> Rational {
        let num = self.rng.random_range(-5i64..=5);
        let den = self.rng.random_range(1i64..=4);
        Rational::ratio(num, den)
    }

    pub fn nonzero_rational(&mut self) -> Rational {
        loop {
            let r = self.rational();
            if r != Rational::from_i64(0) {
                return r;
            }
        }
    }

    pub fn vector(&mut self, n: usize) -> Vec<Rational> {
        (0..n).map(|_| self.rational()).collect()
    }

    pub fn point(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.rng.random_range(-2.0..2.0)).collect()
    }

    /// Random series with roughly half of the in-band modes populated.
    pub fn series(&mut self, n: usize, band: &[u32]) -> TorusScalar<Rational> {
        let zero = Rational::from_i64(0);
        let terms: Vec<_> = canonical_frequencies(band)
            .into_iter()
            .filter_map(|k| {
                if !self.rng.random_bool(0.5) {
                    return None;
                }
                let c = self.rational();
                let s = if k.is_zero() { zero.clone() } else { self.rational() };
                Some((k, c, s))
            })
            .collect();
        TorusScalar::from_terms(n, terms).with_band(band)
    }

    pub fn tensor(&mut self, n: usize, p: usize, band: &[u32]) -> SymTensorField<Rational> {
        let terms: Vec<_> = multi_indices(n, p)
            .into_iter()
            .map(|a| (a, self.series(n, band)))
            .collect();
        SymTensorField::from_terms(n, p, terms)
    }

    pub fn trace_free_tensor(
        &mut self,
        n: usize,
        p: usize,
        band: &[u32],
    ) -> SymTensorField<Rational> {
        self.tensor(n, p, band).standard_decompose().parts.swap_remove(0)
    }

    /// Constant-coefficient tensor.
    pub fn constant_tensor(&mut self, n: usize, p: usize) -> SymTensorField<Rational> {
        self.tensor(n, p, &vec![0; n])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampler_is_deterministic() {
        let a = TensorSampler::new(3).tensor(2, 2, &[1, 1]);
        let b = TensorSampler::new(3).tensor(2, 2, &[1, 1]);
        assert_eq!(a, b);
        assert!(TensorSampler::new(3).trace_free_tensor(3, 3, &[1, 0, 1]).is_trace_free());
    }
}
