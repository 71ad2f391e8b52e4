//! Decision criteria and verification for the averages: boundedness,
//! separate and joint continuity verdicts, the span-ratio search, the
//! sampled inequality checks, and the classification of a construction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::block_index::{block_last, block_of};
use crate::construction::{ConstructionSpec, SpecConfig};
use crate::error::Result;

/// Outcome of an asymptotic criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    Fails,
    /// Reserved for coefficient rules without a closed-form limit; the
    /// built-in rules always decide.
    UndeterminedAtCap,
}

impl Verdict {
    fn from_bool(b: bool) -> Self {
        if b {
            Verdict::Holds
        } else {
            Verdict::Fails
        }
    }

    pub fn holds(self) -> bool {
        self == Verdict::Holds
    }
}

/// Position of a construction in the continuity taxonomy of its average.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Classification {
    JointlyContinuous,
    BoundedAndSeparatelyNotJointly,
    BoundedNotSeparately,
    SeparatelyNotBounded,
    Neither,
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Classification::JointlyContinuous => "JOINTLY_CONTINUOUS",
            Classification::BoundedAndSeparatelyNotJointly => "BOUNDED_AND_SEPARATELY_NOT_JOINTLY",
            Classification::BoundedNotSeparately => "BOUNDED_NOT_SEPARATELY",
            Classification::SeparatelyNotBounded => "SEPARATELY_NOT_BOUNDED",
            Classification::Neither => "NEITHER",
        };
        f.write_str(s)
    }
}

/// Classify by the closed-form verdicts. Joint continuity implies the
/// other two by the growth-exponent logic, so the class chain is
/// respected by construction.
pub fn classify(spec: &ConstructionSpec) -> Classification {
    let bounded = spec.boundedness_holds();
    let separate = spec.separate_continuity_holds();
    if spec.joint_continuity_holds() {
        Classification::JointlyContinuous
    } else if bounded && separate {
        Classification::BoundedAndSeparatelyNotJointly
    } else if bounded {
        Classification::BoundedNotSeparately
    } else if separate {
        Classification::SeparatelyNotBounded
    } else {
        Classification::Neither
    }
}

/// Result of the structured span-ratio search.
#[derive(Debug, Clone, Serialize)]
pub struct BoundednessReport {
    /// Best observed `|sum_{m..n} lambda_k x_k| / sum_{m..n} lambda_k`:
    /// a lower bound for the supremum over all spans.
    pub sup_ratio: f64,
    /// The span attaining it.
    pub witness_span: (u64, u64),
    /// Asymptotic verdict from the closed form of (A_q C_q).
    pub verdict: Verdict,
}

/// Search the span ratio over the structured candidate set: the
/// half-block spans [q^2+1, q(q+1)] and the cross spans [q0^2+1, q1^2]
/// for q0 < q1. Every other span is dominated by one of these (within a
/// block the surviving run is largest for a pure half; across blocks the
/// ratio is quasiconvex in each fringe length, so the maximum sits at the
/// corners), which the exhaustive search in the test suite confirms.
pub fn boundedness_report(spec: &ConstructionSpec, q_max: u64) -> Result<BoundednessReport> {
    let mut best = 0.0f64;
    let mut witness = (1, 1);
    let mut consider = |m: u64, n: u64| -> Result<()> {
        let ratio = spec.partial_sum(m, n)?.quasi_norm(spec.p()) / spec.lambda_sum(m, n)?;
        if ratio > best {
            best = ratio;
            witness = (m, n);
        }
        Ok(())
    };
    for q in 1..=q_max {
        consider(q * q + 1, block_last(q))?;
    }
    for q0 in 1..q_max {
        for q1 in (q0 + 1)..=q_max {
            consider(q0 * q0 + 1, q1 * q1)?;
        }
    }
    Ok(BoundednessReport {
        sup_ratio: best,
        witness_span: witness,
        verdict: Verdict::from_bool(spec.boundedness_holds()),
    })
}

/// Per-q ratio table for the separate-continuity criterion.
#[derive(Debug, Clone, Serialize)]
pub struct SeparateContinuityReport {
    /// (q, A_q C_q beta_q / tail_q) rows from the closed forms.
    pub rows: Vec<(u64, f64)>,
    pub verdict: Verdict,
}

pub fn separate_continuity_report(spec: &ConstructionSpec, q_max: u64) -> SeparateContinuityReport {
    SeparateContinuityReport {
        rows: (1..=q_max).map(|q| (q, spec.separate_ratio(q))).collect(),
        verdict: Verdict::from_bool(spec.separate_continuity_holds()),
    }
}

/// Per-q table of A_q C_q for the joint-continuity criterion.
#[derive(Debug, Clone, Serialize)]
pub struct JointContinuityReport {
    pub rows: Vec<(u64, f64)>,
    pub verdict: Verdict,
}

pub fn joint_continuity_report(spec: &ConstructionSpec, q_max: u64) -> JointContinuityReport {
    JointContinuityReport {
        rows: (1..=q_max)
            .map(|q| (q, spec.amplitude_modulus(q)))
            .collect(),
        verdict: Verdict::from_bool(spec.joint_continuity_holds()),
    }
}

/// One row of the combined diagnostics table.
#[derive(Debug, Clone, Serialize)]
pub struct QRow {
    pub q: u64,
    pub amplitude: f64,
    pub modulus: f64,
    pub beta: f64,
    pub amplitude_modulus: f64,
    pub separate_ratio: f64,
}

/// The combined report: per-q table, span-ratio search and verdicts.
#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticsReport {
    pub config: SpecConfig,
    pub q_max: u64,
    pub rows: Vec<QRow>,
    pub sup_ratio: f64,
    pub sup_ratio_span: (u64, u64),
    pub bounded: Verdict,
    pub separately_continuous: Verdict,
    pub jointly_continuous: Verdict,
    pub classification: Classification,
}

pub fn report(spec: &ConstructionSpec, q_max: u64) -> Result<DiagnosticsReport> {
    let rows = (1..=q_max)
        .map(|q| QRow {
            q,
            amplitude: spec.amplitude(q),
            modulus: crate::moduli::concavity_modulus(q, spec.p()),
            beta: spec.beta(q),
            amplitude_modulus: spec.amplitude_modulus(q),
            separate_ratio: spec.separate_ratio(q),
        })
        .collect();
    let bounds = boundedness_report(spec, q_max)?;
    Ok(DiagnosticsReport {
        config: spec.clone().into(),
        q_max,
        rows,
        sup_ratio: bounds.sup_ratio,
        sup_ratio_span: bounds.witness_span,
        bounded: bounds.verdict,
        separately_continuous: Verdict::from_bool(spec.separate_continuity_holds()),
        jointly_continuous: Verdict::from_bool(spec.joint_continuity_holds()),
        classification: classify(spec),
    })
}

impl DiagnosticsReport {
    /// Aligned-column text rendering of the per-q table and verdicts.
    pub fn text_table(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:>4}  {:>13}  {:>13}  {:>13}  {:>13}  {:>13}",
            "q", "A_q", "C_q", "beta_q", "A_q*C_q", "sep_ratio"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:>4}  {:>13.6e}  {:>13.6e}  {:>13.6e}  {:>13.6e}  {:>13.6e}",
                r.q, r.amplitude, r.modulus, r.beta, r.amplitude_modulus, r.separate_ratio
            );
        }
        let _ = writeln!(
            out,
            "sup span ratio {:.12e} at span [{}, {}]",
            self.sup_ratio, self.sup_ratio_span.0, self.sup_ratio_span.1
        );
        let _ = writeln!(
            out,
            "bounded: {:?}; separately continuous: {:?}; jointly continuous: {:?}",
            self.bounded, self.separately_continuous, self.jointly_continuous
        );
        let _ = writeln!(out, "classification: {}", self.classification);
        out
    }
}

/// Names of the four span inequalities checked by
/// [`verify_proof_inequalities`].
pub const INEQUALITIES: [&str; 4] = [
    "same-block-span",
    "same-block-mass",
    "cross-block-span",
    "cross-block-mass",
];

#[derive(Debug, Clone, Serialize)]
pub struct InequalityStats {
    pub name: String,
    pub checked: u64,
    /// Smallest observed rhs/lhs - 1 (tightness of the bound).
    pub min_slack: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct InequalityViolation {
    pub name: String,
    pub m: u64,
    pub n: u64,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct InequalityReport {
    pub trials: u64,
    pub seed: u64,
    pub stats: Vec<InequalityStats>,
    pub violations: Vec<InequalityViolation>,
    /// Largest relative gap between the half-block span norm and
    /// A_q C_q beta_q, where the mass bound is an equality.
    pub half_block_max_gap: f64,
}

impl InequalityReport {
    pub fn all_hold(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Sample seeded spans (m, n) with q(n) <= 20 and check the four span
/// bounds at relative tolerance 1e-9:
///
/// * same block: `|S| <= A_q C_q * sum lambda` and `|S| <= A_q C_q beta_q`
/// * any pair: `|S| <= 2^(1/p-1) max(A C) * sum lambda` and
///   `|S| <= 2^(1/p) (A_{q0} C_{q0} beta_{q0} + A_{q1} C_{q1} beta_{q1})`
///
/// The half-block spans are additionally checked to attain the mass bound
/// with equality.
pub fn verify_proof_inequalities(
    spec: &ConstructionSpec,
    trials: u64,
    seed: u64,
) -> Result<InequalityReport> {
    const REL_TOL: f64 = 1e-9;
    const Q_RANGE: u64 = 20;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k_max = block_last(Q_RANGE);
    let pe = spec.p().get();
    let cross_span_factor = (1.0 / pe - 1.0).exp2();
    let cross_mass_factor = (1.0 / pe).exp2();

    let mut checked = [0u64; 4];
    let mut min_slack = [f64::INFINITY; 4];
    let mut violations = Vec::new();

    let mut check = |idx: usize, name: &str, m: u64, n: u64, lhs: f64, rhs: f64| {
        checked[idx] += 1;
        if lhs > rhs * (1.0 + REL_TOL) {
            violations.push(InequalityViolation {
                name: name.into(),
                m,
                n,
                lhs,
                rhs,
            });
        } else if lhs > 0.0 {
            min_slack[idx] = min_slack[idx].min(rhs / lhs - 1.0);
        }
    };

    for _ in 0..trials {
        let a = rng.random_range(1..=k_max);
        let b = rng.random_range(1..=k_max);
        let (m, n) = if a <= b { (a, b) } else { (b, a) };
        let q0 = block_of(m)?;
        let q1 = block_of(n)?;
        let lhs = spec.partial_sum(m, n)?.quasi_norm(spec.p());
        let mass = spec.lambda_sum(m, n)?;
        let ac0 = spec.amplitude_modulus(q0);
        let ac1 = spec.amplitude_modulus(q1);

        if q0 == q1 {
            check(0, INEQUALITIES[0], m, n, lhs, ac0 * mass);
            check(1, INEQUALITIES[1], m, n, lhs, ac0 * spec.beta(q0));
        }
        check(
            2,
            INEQUALITIES[2],
            m,
            n,
            lhs,
            cross_span_factor * ac0.max(ac1) * mass,
        );
        check(
            3,
            INEQUALITIES[3],
            m,
            n,
            lhs,
            cross_mass_factor * (ac0 * spec.beta(q0) + ac1 * spec.beta(q1)),
        );
    }

    let mut half_block_max_gap = 0.0f64;
    for q in 1..=Q_RANGE {
        let lhs = spec
            .partial_sum(q * q + 1, block_last(q))?
            .quasi_norm(spec.p());
        let rhs = spec.amplitude_modulus(q) * spec.beta(q);
        half_block_max_gap = half_block_max_gap.max((lhs - rhs).abs() / rhs);
    }

    Ok(InequalityReport {
        trials,
        seed,
        stats: INEQUALITIES
            .iter()
            .enumerate()
            .map(|(i, name)| InequalityStats {
                name: (*name).into(),
                checked: checked[i],
                min_slack: min_slack[i],
            })
            .collect(),
        violations,
        half_block_max_gap,
    })
}

/// Exhaustive span-ratio search over every 1 <= m <= n <= q_max(q_max+1).
/// Quadratic; intended as the brute-force cross-check for
/// [`boundedness_report`] at small q_max.
pub fn exhaustive_sup_ratio(spec: &ConstructionSpec, q_max: u64) -> Result<(f64, (u64, u64))> {
    let k_max = block_last(q_max);
    let mut best = 0.0f64;
    let mut witness = (1, 1);
    for m in 1..=k_max {
        for n in m..=k_max {
            let ratio = spec.partial_sum(m, n)?.quasi_norm(spec.p()) / spec.lambda_sum(m, n)?;
            if ratio > best {
                best = ratio;
                witness = (m, n);
            }
        }
    }
    Ok((best, witness))
}
