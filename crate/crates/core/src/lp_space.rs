//! Finitely supported vectors in the sequence space l_p for 0 < p <= 1.
//!
//! For p < 1 the map `v -> (sum |v_i|^p)^(1/p)` is not a norm but a
//! p-subadditive quasi-norm: `|x + y|^p <= |x|^p + |y|^p`. The case p = 1
//! is the ordinary l_1 norm and serves as the locally convex control.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficients whose magnitude falls at or below this threshold are treated
/// as exact cancellation and dropped. Sign cancellations in the block
/// constructions sum identical magnitudes with opposite signs, so they hit
/// 0.0 bit-exactly; the threshold only has to separate that from real data.
pub const TAU_ZERO: f64 = 1e-300;

/// The exponent p of the ambient space, restricted to (0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct PExponent(f64);

impl PExponent {
    pub fn new(p: f64) -> Result<Self> {
        if p.is_finite() && p > 0.0 && p <= 1.0 {
            Ok(Self(p))
        } else {
            Err(Error::InvalidExponent(p))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    /// True in the Banach (locally convex) control case p = 1.
    #[inline]
    pub fn is_banach(self) -> bool {
        self.0 == 1.0
    }

    /// The exponent c = 1/p - 1 governing the growth q^c of the
    /// concavity modulus; zero exactly when p = 1.
    #[inline]
    pub fn modulus_exponent(self) -> f64 {
        if self.0 == 1.0 {
            0.0
        } else {
            1.0 / self.0 - 1.0
        }
    }
}

impl TryFrom<f64> for PExponent {
    type Error = Error;

    fn try_from(p: f64) -> Result<Self> {
        Self::new(p)
    }
}

impl From<PExponent> for f64 {
    fn from(p: PExponent) -> f64 {
        p.0
    }
}

/// A finitely supported real sequence: coordinate index (1-based) to
/// nonzero coefficient. The concrete model of an l_p element.
///
/// Stored zeros are never allowed; construction filters them out.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SparseVector {
    entries: BTreeMap<u64, f64>,
}

impl SparseVector {
    /// The zero vector.
    pub fn zero() -> Self {
        Self::default()
    }

    /// The unit basis vector at the given coordinate.
    pub fn unit(coordinate: u64) -> Self {
        Self::single(coordinate, 1.0)
    }

    /// A vector with a single coordinate. Zero coefficients yield the
    /// zero vector.
    pub fn single(coordinate: u64, coefficient: f64) -> Self {
        let mut entries = BTreeMap::new();
        if coefficient.abs() > TAU_ZERO {
            entries.insert(coordinate, coefficient);
        }
        Self { entries }
    }

    /// Build from coordinate/coefficient pairs, merging duplicates and
    /// dropping cancelled coordinates.
    pub fn from_entries<I: IntoIterator<Item = (u64, f64)>>(iter: I) -> Self {
        let mut entries: BTreeMap<u64, f64> = BTreeMap::new();
        for (coord, coeff) in iter {
            *entries.entry(coord).or_insert(0.0) += coeff;
        }
        entries.retain(|_, c| c.abs() > TAU_ZERO);
        Self { entries }
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of stored coordinates.
    #[inline]
    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    /// Coefficient at a coordinate (0.0 when outside the support).
    pub fn get(&self, coordinate: u64) -> f64 {
        self.entries.get(&coordinate).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.entries.iter().map(|(&c, &v)| (c, v))
    }

    /// The quasi-norm `(sum |v_i|^p)^(1/p)`; zero iff the vector is zero.
    pub fn quasi_norm(&self, p: PExponent) -> f64 {
        if self.entries.is_empty() {
            return 0.0;
        }
        if p.is_banach() {
            return neumaier_sum(self.entries.values().map(|c| c.abs()));
        }
        let pe = p.get();
        let sum = neumaier_sum(self.entries.values().map(|c| c.abs().powf(pe)));
        sum.powf(1.0 / pe)
    }

    /// The p-th power of the quasi-norm, `sum |v_i|^p`. Additive over
    /// vectors with disjoint supports.
    pub fn quasi_norm_pow(&self, p: PExponent) -> f64 {
        let pe = p.get();
        neumaier_sum(self.entries.values().map(|c| c.abs().powf(pe)))
    }

    /// Scale every coefficient by `alpha`.
    pub fn scale(&self, alpha: f64) -> Self {
        linear_combine(&[(alpha, self)])
    }

    pub fn add(&self, other: &Self) -> Self {
        linear_combine(&[(1.0, self), (1.0, other)])
    }

    pub fn sub(&self, other: &Self) -> Self {
        linear_combine(&[(1.0, self), (-1.0, other)])
    }
}

/// Coordinate-wise sum of scaled vectors. Coordinates whose accumulated
/// coefficient cancels to (floating) zero are removed.
pub fn linear_combine(terms: &[(f64, &SparseVector)]) -> SparseVector {
    let mut entries: BTreeMap<u64, f64> = BTreeMap::new();
    for (alpha, v) in terms {
        if *alpha == 0.0 {
            continue;
        }
        for (coord, coeff) in v.iter() {
            *entries.entry(coord).or_insert(0.0) += alpha * coeff;
        }
    }
    entries.retain(|_, c| c.abs() > TAU_ZERO);
    SparseVector { entries }
}

/// Neumaier-compensated sum; keeps rounding error O(eps) independent of
/// the number of terms.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    sum + c
}
