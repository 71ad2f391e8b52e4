//! The lack-of-convexity modulus C_q with extremal witnesses.
//!
//! C_q is the supremum of `|sum mu_j y_j|` over convex weights mu summing
//! to one and vectors y_j in the unit ball. In l_p the supremum equals
//! q^(1/p - 1) and is attained: uniform weights on q unit basis vectors
//! with pairwise disjoint supports. For p = 1 the modulus is constantly 1;
//! for p < 1 it grows without bound, which is what makes the space
//! non-locally convex.

use serde::{Deserialize, Serialize};

use crate::block_index::coordinate;
use crate::error::{Error, Result};
use crate::lp_space::{neumaier_sum, PExponent, SparseVector};

/// Largest q accepted by the brute-force oracle; the search space grows
/// combinatorially (compositions x set partitions x signs).
pub const ORACLE_MAX_Q: u64 = 6;

/// Exact value of the modulus C_q = q^(1/p-1) in l_p.
pub fn concavity_modulus(q: u64, p: PExponent) -> f64 {
    (q as f64).powf(p.modulus_exponent())
}

/// Uniform weights and disjoint unit basis vectors attaining C_q.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessFamily {
    pub q: u64,
    /// Positive weights summing to 1.
    pub weights: Vec<f64>,
    /// Unit-ball vectors, one per position j.
    pub vectors: Vec<SparseVector>,
}

impl WitnessFamily {
    /// The convex combination `sum_j mu_j y_j`.
    pub fn combination(&self) -> SparseVector {
        let terms: Vec<(f64, &SparseVector)> = self
            .weights
            .iter()
            .copied()
            .zip(self.vectors.iter())
            .collect();
        crate::lp_space::linear_combine(&terms)
    }

    /// Check the defining invariants: weights sum to 1, each vector sits
    /// in the unit ball, and the combination reaches at least C_q / 2.
    pub fn validate(&self, p: PExponent) -> Result<()> {
        if self.weights.len() != self.q as usize || self.vectors.len() != self.q as usize {
            return Err(Error::InvalidConfig(format!(
                "witness family for q = {} has {} weights and {} vectors",
                self.q,
                self.weights.len(),
                self.vectors.len()
            )));
        }
        let total = neumaier_sum(self.weights.iter().copied());
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidConfig(format!(
                "witness weights sum to {total}, expected 1"
            )));
        }
        if self.weights.iter().any(|&w| w <= 0.0) {
            return Err(Error::InvalidConfig("witness weight not positive".into()));
        }
        for y in &self.vectors {
            if y.quasi_norm(p) > 1.0 + 1e-12 {
                return Err(Error::InvalidConfig(
                    "witness vector outside unit ball".into(),
                ));
            }
        }
        let reach = self.combination().quasi_norm(p);
        let needed = concavity_modulus(self.q, p) / 2.0;
        if reach < needed {
            return Err(Error::InvalidConfig(format!(
                "witness combination reaches {reach}, needs at least C_q/2 = {needed}"
            )));
        }
        Ok(())
    }
}

/// The extremal family for block q: mu_{q,j} = 1/q and y_{q,j} the unit
/// basis vector at `coordinate(q, j)`. Its combination has quasi-norm
/// exactly C_q, not merely C_q / 2.
pub fn extremal_witness(q: u64, p: PExponent) -> Result<WitnessFamily> {
    if q == 0 {
        return Err(Error::NonPositiveIndex);
    }
    let _ = p;
    let weights = vec![1.0 / q as f64; q as usize];
    let vectors = (1..=q)
        .map(|j| Ok(SparseVector::unit(coordinate(q, j)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(WitnessFamily {
        q,
        weights,
        vectors,
    })
}

/// Brute-force lower-bound search for C_q, independent of the closed form.
///
/// Maximizes `|sum mu_j y_j|` over a simplex grid of weights (step size
/// `resolution`) and over candidate vector patterns: every way of grouping
/// the q vectors onto shared coordinates (set partitions), and for q <= 4
/// additionally every sign pattern inside the groups. The result never
/// exceeds C_q; it approaches it as the grid refines.
pub fn modulus_sup_oracle(q: u64, p: PExponent, resolution: f64) -> Result<f64> {
    if q == 0 {
        return Err(Error::NonPositiveIndex);
    }
    if q > ORACLE_MAX_Q {
        return Err(Error::OracleBudgetExceeded {
            max: ORACLE_MAX_Q,
            got: q,
        });
    }
    if !resolution.is_finite() || resolution <= 0.0 || resolution > 1.0 {
        return Err(Error::InvalidConfig(format!(
            "oracle resolution must lie in (0, 1], got {resolution}"
        )));
    }
    if q == 1 {
        // Single unit vector; the grid is a point.
        return Ok(1.0);
    }

    let n = q as usize;
    let steps = (1.0 / resolution).round().max(n as f64) as u64;
    let partitions = set_partitions(n);
    let sign_patterns: Vec<Vec<f64>> = if q <= 4 {
        (0..(1u32 << n))
            .map(|mask| {
                (0..n)
                    .map(|i| if mask & (1 << i) != 0 { -1.0 } else { 1.0 })
                    .collect()
            })
            .collect()
    } else {
        vec![vec![1.0; n]]
    };

    let pe = p.get();
    let mut best = f64::NEG_INFINITY;
    let mut weights = vec![0.0f64; n];
    for_each_composition(n, &mut vec![0u64; n], 0, steps, &mut |parts| {
        for (w, &m) in weights.iter_mut().zip(parts.iter()) {
            *w = m as f64 / steps as f64;
        }
        for groups in &partitions {
            let n_groups = groups.iter().copied().max().unwrap() as usize + 1;
            for signs in &sign_patterns {
                let mut group_sum = vec![0.0f64; n_groups];
                for i in 0..n {
                    group_sum[groups[i] as usize] += signs[i] * weights[i];
                }
                let pow_sum: f64 = group_sum.iter().map(|g| g.abs().powf(pe)).sum();
                let norm = pow_sum.powf(1.0 / pe);
                if norm > best {
                    best = norm;
                }
            }
        }
    });
    Ok(best)
}

/// All set partitions of {0, .., n-1} as restricted growth strings:
/// a[0] = 0 and a[i] <= max(a[0..i]) + 1.
fn set_partitions(n: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut current = vec![0u8; n];
    fn rec(i: usize, max_used: u8, current: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if i == current.len() {
            out.push(current.clone());
            return;
        }
        for g in 0..=max_used + 1 {
            current[i] = g;
            rec(i + 1, max_used.max(g), current, out);
        }
    }
    if n > 0 {
        rec(1, 0, &mut current, &mut out);
    }
    out
}

/// Enumerate integer compositions (m_1, .., m_n), m_i >= 1, of the
/// remaining total, invoking `f` on each.
fn for_each_composition(
    n: usize,
    scratch: &mut Vec<u64>,
    idx: usize,
    remaining: u64,
    f: &mut impl FnMut(&[u64]),
) {
    if idx == n - 1 {
        scratch[idx] = remaining;
        f(scratch);
        return;
    }
    let tail = (n - idx - 1) as u64;
    for m in 1..=remaining - tail {
        scratch[idx] = m;
        for_each_composition(n, scratch, idx + 1, remaining - m, f);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: f64) -> PExponent {
        PExponent::new(v).unwrap()
    }

    #[test]
    fn modulus_closed_form() {
        assert_eq!(concavity_modulus(1, p(0.5)), 1.0);
        assert!((concavity_modulus(4, p(0.5)) - 4.0).abs() < 1e-12);
        assert!((concavity_modulus(9, p(2.0 / 3.0)) - 3.0).abs() < 1e-9);
        for q in 1..=100 {
            assert_eq!(concavity_modulus(q, p(1.0)), 1.0);
        }
    }

    #[test]
    fn modulus_monotone_and_unbounded_for_p_below_one() {
        let half = p(0.5);
        let mut prev = 0.0;
        for q in 1..=100 {
            let c = concavity_modulus(q, half);
            assert!(c >= prev);
            prev = c;
        }
        assert!(concavity_modulus(10_000, half) > 1e3);
    }

    #[test]
    fn witness_attains_modulus_exactly() {
        for pe in [0.4, 0.5, 2.0 / 3.0, 1.0] {
            let pexp = p(pe);
            for q in [1u64, 2, 3, 7, 20] {
                let w = extremal_witness(q, pexp).unwrap();
                let combo = w.combination().quasi_norm(pexp);
                let cq = concavity_modulus(q, pexp);
                assert!(
                    (combo - cq).abs() <= 1e-12 * cq,
                    "q={q} p={pe}: {combo} vs {cq}"
                );
                for y in &w.vectors {
                    assert_eq!(y.quasi_norm(pexp), 1.0);
                }
            }
        }
    }

    #[test]
    fn witness_valid_up_to_200() {
        for pe in [0.5, 1.0] {
            let pexp = p(pe);
            for q in 1..=200 {
                extremal_witness(q, pexp).unwrap().validate(pexp).unwrap();
            }
        }
    }

    #[test]
    fn oracle_trivial_case() {
        assert_eq!(modulus_sup_oracle(1, p(0.5), 0.1).unwrap(), 1.0);
    }

    #[test]
    fn oracle_confirms_closed_form_q2() {
        let found = modulus_sup_oracle(2, p(0.5), 0.01).unwrap();
        let cq = concavity_modulus(2, p(0.5));
        assert!(found <= cq * (1.0 + 1e-9));
        assert!(found >= cq * 0.98, "found {found}, expected near {cq}");
    }

    #[test]
    fn oracle_confirms_closed_form_q3() {
        let found = modulus_sup_oracle(3, p(0.5), 0.02).unwrap();
        let cq = concavity_modulus(3, p(0.5));
        assert!(found <= cq * (1.0 + 1e-9));
        assert!(found >= cq * 0.95, "found {found}, expected near {cq}");
    }

    #[test]
    fn oracle_rejects_large_q() {
        assert!(matches!(
            modulus_sup_oracle(7, p(0.5), 0.1),
            Err(Error::OracleBudgetExceeded { .. })
        ));
    }

    #[test]
    fn oracle_banach_case_stays_at_one() {
        let found = modulus_sup_oracle(3, p(1.0), 0.05).unwrap();
        assert!((found - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn partitions_count_matches_bell_numbers() {
        assert_eq!(set_partitions(1).len(), 1);
        assert_eq!(set_partitions(2).len(), 2);
        assert_eq!(set_partitions(3).len(), 5);
        assert_eq!(set_partitions(4).len(), 15);
        assert_eq!(set_partitions(6).len(), 203);
    }
}
