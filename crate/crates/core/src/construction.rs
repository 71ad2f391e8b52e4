//! Coefficient sequences, partition nodes and the tent-sum function.
//!
//! A construction is determined by the exponent p and two positive
//! sequences: amplitudes `A_q` scaling the block vectors and masses
//! `beta_q` with `sum_q beta_q = 1/2` distributing interval length.
//! Block q consists of the 2q flat indices k in [q(q-1)+1, q(q+1)];
//! each index carries the interval length `lambda_k = beta_q / q` and
//! the vector `x_k = sign * A_q * e(q, j)`. Opposite signs pair up within
//! a block, so every full block sum `sum lambda_k x_k` vanishes exactly,
//! while the surviving half-block sums have quasi-norm `A_q C_q beta_q`.

use serde::{Deserialize, Serialize};

use crate::block_index::{block_first, block_last, block_of, coordinate, decode};
use crate::error::{Error, Result};
use crate::lp_space::{neumaier_sum, PExponent, SparseVector};
use crate::moduli::concavity_modulus;

/// Default maximum block index for explicit enumeration.
pub const DEFAULT_Q_CAP: u64 = 60;

/// Default relative tolerance for comparisons.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Deepest block the interval locator will resolve; beyond this the flat
/// index arithmetic would overflow u64 and tent amplitudes are far below
/// anything observable at double precision.
const LOCATE_MAX_Q: u64 = 1 << 31;

/// Rule generating the amplitude sequence A_q.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AmplitudeRule {
    /// A_q = 1 / C_q, so that A_q C_q = 1.
    InverseModulus,
    /// A_q = 1 / sqrt(C_q), so that A_q C_q = sqrt(C_q).
    InverseSqrtModulus,
    /// A_q = q^(-exponent).
    Power { exponent: f64 },
}

/// Rule generating the mass sequence beta_q; both rules sum to 1/2 with a
/// closed-form tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BetaRule {
    /// beta_q = 2^(-q-1); tail `sum_{r >= q} beta_r = 2^(-q)`.
    Geometric,
    /// beta_q = (q^(-b) - (q+1)^(-b)) / 2; the telescoping tail is
    /// q^(-b) / 2.
    PowerTail { b: f64 },
}

/// Built-in constructions plus a fully custom rule pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Variant {
    /// A_q = 1/C_q with power-tail masses of decay b: the average stays
    /// bounded and separately continuous yet fails joint continuity.
    Thm13 { b: f64 },
    /// A_q = 1/C_q with geometric masses: bounded but not separately
    /// continuous.
    Thm14,
    /// A_q = 1/sqrt(C_q) with geometric masses: neither bounded nor
    /// separately continuous.
    Thm15,
    Custom {
        amplitude: AmplitudeRule,
        beta: BetaRule,
    },
}

impl Variant {
    pub fn name(&self) -> &'static str {
        match self {
            Variant::Thm13 { .. } => "thm13",
            Variant::Thm14 => "thm14",
            Variant::Thm15 => "thm15",
            Variant::Custom { .. } => "custom",
        }
    }
}

/// Smallest admissible decay exponent for the thm13 variant.
pub fn thm13_min_b(p: PExponent) -> f64 {
    2.0 * (1.0 - p.get()) / p.get()
}

/// Canonical default: strictly inside the admissible range.
pub fn thm13_default_b(p: PExponent) -> f64 {
    thm13_min_b(p) + 1.0
}

/// One tent interval I_k = [left, right) of the partition, with its
/// midpoint and closed-form length lambda_k.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TentInterval {
    pub k: u64,
    pub left: f64,
    pub right: f64,
    pub midpoint: f64,
    pub length: f64,
}

/// A fully resolved construction: exponent, coefficient rules, enumeration
/// cap and comparison tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpecConfig", into = "SpecConfig")]
pub struct ConstructionSpec {
    p: PExponent,
    variant: Variant,
    q_cap: u64,
    tol: f64,
}

impl ConstructionSpec {
    pub fn new(p: PExponent, variant: Variant) -> Result<Self> {
        if let Variant::Thm13 { b } = variant {
            let min_b = thm13_min_b(p);
            if !b.is_finite() || b <= min_b {
                return Err(Error::InadmissibleDecay { b, min_b });
            }
        }
        if let Variant::Custom {
            beta: BetaRule::PowerTail { b },
            ..
        } = variant
        {
            if !b.is_finite() || b <= 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "power-tail decay must be positive, got {b}"
                )));
            }
        }
        if let Variant::Custom {
            amplitude: AmplitudeRule::Power { exponent },
            ..
        } = variant
        {
            if !exponent.is_finite() {
                return Err(Error::InvalidConfig(format!(
                    "amplitude power exponent must be finite, got {exponent}"
                )));
            }
        }
        Ok(Self {
            p,
            variant,
            q_cap: DEFAULT_Q_CAP,
            tol: DEFAULT_TOL,
        })
    }

    pub fn with_q_cap(mut self, q_cap: u64) -> Result<Self> {
        if q_cap == 0 {
            return Err(Error::InvalidConfig("q_cap must be positive".into()));
        }
        self.q_cap = q_cap;
        Ok(self)
    }

    pub fn with_tol(mut self, tol: f64) -> Result<Self> {
        if !tol.is_finite() || tol <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "tolerance must be positive, got {tol}"
            )));
        }
        self.tol = tol;
        Ok(self)
    }

    #[inline]
    pub fn p(&self) -> PExponent {
        self.p
    }

    #[inline]
    pub fn variant(&self) -> Variant {
        self.variant
    }

    #[inline]
    pub fn q_cap(&self) -> u64 {
        self.q_cap
    }

    #[inline]
    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn amplitude_rule(&self) -> AmplitudeRule {
        match self.variant {
            Variant::Thm13 { .. } | Variant::Thm14 => AmplitudeRule::InverseModulus,
            Variant::Thm15 => AmplitudeRule::InverseSqrtModulus,
            Variant::Custom { amplitude, .. } => amplitude,
        }
    }

    pub fn beta_rule(&self) -> BetaRule {
        match self.variant {
            Variant::Thm13 { b } => BetaRule::PowerTail { b },
            Variant::Thm14 | Variant::Thm15 => BetaRule::Geometric,
            Variant::Custom { beta, .. } => beta,
        }
    }

    /// The amplitude A_q.
    pub fn amplitude(&self, q: u64) -> f64 {
        let qf = q as f64;
        match self.amplitude_rule() {
            AmplitudeRule::InverseModulus => 1.0 / concavity_modulus(q, self.p),
            AmplitudeRule::InverseSqrtModulus => 1.0 / concavity_modulus(q, self.p).sqrt(),
            AmplitudeRule::Power { exponent } => qf.powf(-exponent),
        }
    }

    /// The product A_q C_q evaluated in closed form as q^gamma, with
    /// gamma = [`Self::growth_exponent`]. Avoids the rounding of the
    /// separate factors: for the inverse-modulus rule the result is the
    /// constant 1.0 bit-exactly.
    pub fn amplitude_modulus(&self, q: u64) -> f64 {
        (q as f64).powf(self.growth_exponent())
    }

    /// Exponent gamma with A_q C_q = q^gamma.
    pub fn growth_exponent(&self) -> f64 {
        let c = self.p.modulus_exponent();
        match self.amplitude_rule() {
            AmplitudeRule::InverseModulus => 0.0,
            AmplitudeRule::InverseSqrtModulus => c / 2.0,
            AmplitudeRule::Power { exponent } => c - exponent,
        }
    }

    /// The mass beta_q.
    pub fn beta(&self, q: u64) -> f64 {
        let qf = q as f64;
        match self.beta_rule() {
            BetaRule::Geometric => (-qf - 1.0).exp2(),
            BetaRule::PowerTail { b } => 0.5 * (qf.powf(-b) - (qf + 1.0).powf(-b)),
        }
    }

    /// Closed-form tail `sum_{r >= q} beta_r`.
    pub fn beta_tail(&self, q: u64) -> f64 {
        let qf = q as f64;
        match self.beta_rule() {
            BetaRule::Geometric => (-qf).exp2(),
            BetaRule::PowerTail { b } => 0.5 * qf.powf(-b),
        }
    }

    /// Interval length lambda_k = beta_q / q (uniform witness weights).
    pub fn lambda(&self, k: u64) -> Result<f64> {
        let q = block_of(k)?;
        Ok(self.beta(q) / q as f64)
    }

    /// The block vector `x_k = sign * A_q * e(q, j)`: a single coordinate.
    pub fn x_vector(&self, k: u64) -> Result<SparseVector> {
        let c = decode(k)?;
        let coord = coordinate(c.q, c.j)?;
        Ok(SparseVector::single(
            coord,
            c.sign.as_f64() * self.amplitude(c.q),
        ))
    }

    /// Left endpoint of block q: `1 - 2 * beta_tail(q)`. Equals 0 at q = 1.
    pub fn block_start(&self, q: u64) -> f64 {
        1.0 - 2.0 * self.beta_tail(q)
    }

    /// Partition node `t_k = sum_{i <= k} lambda_i`, computed from
    /// closed-form block ends plus uniform intra-block steps so that no
    /// error accumulates across blocks. `node(0) = 0`; block boundaries
    /// use the next block's closed form, keeping the sequence consistent
    /// across block changes.
    pub fn node(&self, k: u64) -> Result<f64> {
        if k == 0 {
            return Ok(0.0);
        }
        let q = block_of(k)?;
        if k == block_last(q) {
            return Ok(self.block_start(q + 1));
        }
        let offset = k - (block_first(q) - 1);
        let step = self.beta(q) / q as f64;
        Ok(self.block_start(q) + offset as f64 * step)
    }

    /// The unique tent interval with `left <= u < right`, found by
    /// bracketing the block through the closed-form block starts and then
    /// direct intra-block arithmetic; no linear scan over k.
    pub fn locate(&self, u: f64) -> Result<TentInterval> {
        if !(0.0..1.0).contains(&u) {
            return Err(Error::PointOutsideDomain(u));
        }
        let q = self.locate_block(u)?;
        let start = self.block_start(q);
        let step = self.beta(q) / q as f64;
        let mut offset = if step > 0.0 {
            (((u - start) / step).floor() as i64).clamp(0, 2 * q as i64 - 1) as u64
        } else {
            0
        };
        // Float fix-up: walk at most a couple of steps.
        for _ in 0..8 {
            let k = block_first(q) + offset;
            let left = self.node(k - 1)?;
            let right = self.node(k)?;
            if u < left && offset > 0 {
                offset -= 1;
            } else if u >= right && offset + 1 < 2 * q {
                offset += 1;
            } else {
                break;
            }
        }
        let k = block_first(q) + offset;
        let left = self.node(k - 1)?;
        let right = self.node(k)?;
        let length = step;
        Ok(TentInterval {
            k,
            left,
            right,
            midpoint: left + 0.5 * length,
            length,
        })
    }

    /// Find q with `block_start(q) <= u < block_start(q+1)` by doubling
    /// then bisection on the monotone block starts.
    fn locate_block(&self, u: f64) -> Result<u64> {
        let mut hi = 1u64;
        while self.block_start(hi + 1) <= u {
            if hi >= LOCATE_MAX_Q {
                return Err(Error::IndexDepthExceeded);
            }
            hi *= 2;
        }
        let mut lo = 1u64; // invariant: block_start(lo) <= u < block_start(hi + 1)
        while lo < hi {
            let mid = lo + (hi - lo).div_ceil(2);
            if self.block_start(mid) <= u {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        Ok(lo)
    }

    /// Evaluate the tent-sum function: `f(u) = tent_k(u) * x_k` for u in
    /// I_k, and 0 at u = 1. The tent rises linearly from 0 to 2 on the
    /// left half of I_k and falls back to 0 on the right half.
    ///
    /// Points so close to 1 that the partition outruns the representable
    /// index range evaluate to zero; every supported variant has vanishing
    /// amplitudes there.
    pub fn f_eval(&self, u: f64) -> Result<SparseVector> {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::PointOutsideClosedDomain(u));
        }
        if u == 1.0 {
            return Ok(SparseVector::zero());
        }
        let interval = match self.locate(u) {
            Ok(i) => i,
            Err(Error::IndexDepthExceeded) => return Ok(SparseVector::zero()),
            Err(e) => return Err(e),
        };
        if interval.length <= 0.0 {
            return Ok(SparseVector::zero());
        }
        let factor = if u < interval.midpoint {
            4.0 * (u - interval.left) / interval.length
        } else {
            4.0 * (interval.right - u) / interval.length
        };
        // The exact tent range is [0, 2]; excursions can only come from
        // intervals shorter than the float resolution around u.
        Ok(self.x_vector(interval.k)?.scale(factor.clamp(0.0, 2.0)))
    }

    /// `sum_{k=m}^{n} lambda_k x_k`, grouped by coordinate so that full
    /// (j, +/-) pairs cancel exactly and only the uncancelled fringe terms
    /// are materialized.
    pub fn partial_sum(&self, m: u64, n: u64) -> Result<SparseVector> {
        if m == 0 || m > n {
            return Err(Error::BadSpanOrder { m, n });
        }
        let q0 = block_of(m)?;
        let q1 = block_of(n)?;
        let mut entries: Vec<(u64, f64)> = Vec::new();
        for q in q0..=q1 {
            self.block_span_entries(q, m, n, &mut entries)?;
        }
        Ok(SparseVector::from_entries(entries))
    }

    /// `sum_{k >= m} lambda_k x_k`: every complete block beyond q(m)
    /// vanishes, so the tail reduces to the remainder of block q(m).
    pub fn partial_sum_tail(&self, m: u64) -> Result<SparseVector> {
        let q = block_of(m)?;
        self.partial_sum(m, block_last(q))
    }

    /// Uncancelled entries contributed by block q to the span [m, n].
    /// Positions j covered by both signs cancel; positions covered once
    /// contribute `sign * A_q * beta_q / q` at `coordinate(q, j)`.
    fn block_span_entries(
        &self,
        q: u64,
        m: u64,
        n: u64,
        entries: &mut Vec<(u64, f64)>,
    ) -> Result<()> {
        let lo = m.max(block_first(q));
        let hi = n.min(block_last(q));
        if lo > hi {
            return Ok(());
        }
        let sq = q * q;
        // Covered j-ranges (inclusive) for each sign half.
        let neg = if lo <= sq {
            let h = hi.min(sq);
            Some((sq + 1 - h, sq + 1 - lo))
        } else {
            None
        };
        let pos = if hi > sq {
            let l = lo.max(sq + 1);
            Some((l - sq, hi - sq))
        } else {
            None
        };
        if neg == pos {
            // identical coverage of both halves cancels in full, which
            // includes every fully contained block
            return Ok(());
        }
        let weight = self.amplitude(q) * self.beta(q) / q as f64;
        let mut push = |range: Option<(u64, u64)>, other: Option<(u64, u64)>, sign: f64| {
            if let Some((a, b)) = range {
                for j in a..=b {
                    let covered_twice = matches!(other, Some((c, d)) if j >= c && j <= d);
                    if !covered_twice {
                        entries.push((coordinate(q, j).expect("j in block"), sign * weight));
                    }
                }
            }
        };
        push(neg, pos, -1.0);
        push(pos, neg, 1.0);
        Ok(())
    }

    /// `sum_{k=m}^{n} lambda_k` via per-block counts.
    pub fn lambda_sum(&self, m: u64, n: u64) -> Result<f64> {
        if m == 0 || m > n {
            return Err(Error::BadSpanOrder { m, n });
        }
        let q0 = block_of(m)?;
        let q1 = block_of(n)?;
        Ok(neumaier_sum((q0..=q1).map(|q| {
            let lo = m.max(block_first(q));
            let hi = n.min(block_last(q));
            if lo > hi {
                0.0
            } else {
                (hi - lo + 1) as f64 * self.beta(q) / q as f64
            }
        })))
    }

    /// `sum_{k >= n} lambda_k`: the in-block remainder plus the exact
    /// closed-form tail of the later blocks.
    pub fn lambda_tail(&self, n: u64) -> Result<f64> {
        let q = block_of(n)?;
        Ok(self.lambda_sum(n, block_last(q))? + 2.0 * self.beta_tail(q + 1))
    }

    /// The tail ratio `|sum_{k >= n} lambda_k x_k| / sum_{k >= n} lambda_k`
    /// whose vanishing characterizes the separately continuous extension.
    /// The numerator reduces to the finite remainder of block q(n).
    pub fn tail_ratio(&self, n: u64) -> Result<f64> {
        let num = self.partial_sum_tail(n)?.quasi_norm(self.p);
        let den = self.lambda_tail(n)?;
        Ok(num / den)
    }

    /// Whether the amplitudes vanish, i.e. the tent-sum function is
    /// continuous on the whole interval.
    pub fn amplitude_vanishes(&self) -> bool {
        match self.amplitude_rule() {
            AmplitudeRule::InverseModulus | AmplitudeRule::InverseSqrtModulus => {
                self.p.modulus_exponent() > 0.0
            }
            AmplitudeRule::Power { exponent } => exponent > 0.0,
        }
    }

    /// Closed-form limit of `A_q C_q beta_q / sum_{r >= q} beta_r`: true
    /// iff the limit is zero, i.e. the average extends separately
    /// continuously to the closed square.
    pub fn separate_continuity_holds(&self) -> bool {
        let gamma = self.growth_exponent();
        match self.beta_rule() {
            // ratio_q = q^gamma / 2
            BetaRule::Geometric => gamma < 0.0,
            // ratio_q = q^gamma (1 - (q/(q+1))^b) ~ b q^(gamma - 1)
            BetaRule::PowerTail { .. } => gamma < 1.0,
        }
    }

    /// True iff (A_q C_q) stays bounded, i.e. the average is bounded on
    /// the open square.
    pub fn boundedness_holds(&self) -> bool {
        self.growth_exponent() <= 0.0
    }

    /// True iff A_q C_q -> 0, i.e. the average extends jointly
    /// continuously to the closed square.
    pub fn joint_continuity_holds(&self) -> bool {
        self.growth_exponent() < 0.0
    }

    /// The per-q ratio `A_q C_q beta_q / sum_{r >= q} beta_r` from the
    /// closed forms. For the geometric rule the mass quotient is an exact
    /// power of two, so e.g. the inverse-modulus variant yields the
    /// bit-exact constant 0.5.
    pub fn separate_ratio(&self, q: u64) -> f64 {
        self.amplitude_modulus(q) * self.beta(q) / self.beta_tail(q)
    }

    /// Convergence check for `sum_q q^(1-p) beta_q^p`, the summability
    /// condition behind Riemann integrability: partial sum up to the cap
    /// plus an analytic tail bound.
    pub fn integrability(&self) -> IntegrabilityCheck {
        let pe = self.p.get();
        let cap = self.q_cap;
        let partial =
            neumaier_sum((1..=cap).map(|q| (q as f64).powf(1.0 - pe) * self.beta(q).powf(pe)));
        let (tail_bound, converges) = match self.beta_rule() {
            BetaRule::Geometric => {
                // terms a_q = q^(1-p) 2^(-(q+1)p); ratio bounded by
                // ((cap+1)/cap)^(1-p) 2^(-p) < 1 for any reasonable cap.
                let a_next = ((cap + 1) as f64).powf(1.0 - pe) * self.beta(cap + 1).powf(pe);
                let rho = (((cap + 2) as f64) / ((cap + 1) as f64)).powf(1.0 - pe) * (-pe).exp2();
                if rho < 1.0 {
                    (a_next / (1.0 - rho), true)
                } else {
                    (f64::INFINITY, false)
                }
            }
            BetaRule::PowerTail { b } => {
                // a_q <= (b/2)^p q^(-s) with s = b p + 2 p - 1; the series
                // converges iff s > 1, with integral tail bound.
                let s = b * pe + 2.0 * pe - 1.0;
                if s > 1.0 {
                    let bound = (b / 2.0).powf(pe) * (cap as f64).powf(1.0 - s) / (s - 1.0);
                    (bound, true)
                } else {
                    (f64::INFINITY, false)
                }
            }
        };
        IntegrabilityCheck {
            partial,
            tail_bound,
            converges,
        }
    }

    /// Partial `sum_{q <= cap} beta_q` plus the closed-form tail; equals
    /// 1/2 up to rounding for every rule.
    pub fn beta_mass(&self) -> f64 {
        neumaier_sum((1..=self.q_cap).map(|q| self.beta(q))) + self.beta_tail(self.q_cap + 1)
    }
}

/// Result of the integrability check.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct IntegrabilityCheck {
    /// Partial sum of q^(1-p) beta_q^p up to the cap.
    pub partial: f64,
    /// Analytic bound on the remaining tail (infinite when divergent).
    pub tail_bound: f64,
    pub converges: bool,
}

// ---------------------------------------------------------------------------
// Flat JSON configuration mirror: {p, variant, b, q_cap, tol, amplitude, beta}
// ---------------------------------------------------------------------------

/// Serialized form of a [`ConstructionSpec`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpecConfig {
    pub p: f64,
    pub variant: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_cap: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<String>,
}

impl std::str::FromStr for AmplitudeRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inverse-modulus" => Ok(AmplitudeRule::InverseModulus),
            "inverse-sqrt-modulus" => Ok(AmplitudeRule::InverseSqrtModulus),
            other => {
                if let Some(rest) = other.strip_prefix("power:") {
                    let exponent: f64 = rest.parse().map_err(|_| {
                        Error::InvalidConfig(format!("bad amplitude exponent in {other:?}"))
                    })?;
                    Ok(AmplitudeRule::Power { exponent })
                } else {
                    Err(Error::InvalidConfig(format!(
                        "unknown amplitude rule {other:?} (expected inverse-modulus, \
                         inverse-sqrt-modulus or power:<e>)"
                    )))
                }
            }
        }
    }
}

impl std::fmt::Display for AmplitudeRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AmplitudeRule::InverseModulus => write!(f, "inverse-modulus"),
            AmplitudeRule::InverseSqrtModulus => write!(f, "inverse-sqrt-modulus"),
            AmplitudeRule::Power { exponent } => write!(f, "power:{exponent}"),
        }
    }
}

impl std::str::FromStr for BetaRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "geometric" => Ok(BetaRule::Geometric),
            other => {
                if let Some(rest) = other.strip_prefix("power-tail:") {
                    let b: f64 = rest.parse().map_err(|_| {
                        Error::InvalidConfig(format!("bad power-tail decay in {other:?}"))
                    })?;
                    Ok(BetaRule::PowerTail { b })
                } else {
                    Err(Error::InvalidConfig(format!(
                        "unknown beta rule {other:?} (expected geometric or power-tail:<b>)"
                    )))
                }
            }
        }
    }
}

impl std::fmt::Display for BetaRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BetaRule::Geometric => write!(f, "geometric"),
            BetaRule::PowerTail { b } => write!(f, "power-tail:{b}"),
        }
    }
}

impl TryFrom<SpecConfig> for ConstructionSpec {
    type Error = Error;

    fn try_from(cfg: SpecConfig) -> Result<Self> {
        let p = PExponent::new(cfg.p)?;
        let variant = match cfg.variant.as_str() {
            "thm13" => Variant::Thm13 {
                b: cfg.b.unwrap_or_else(|| thm13_default_b(p)),
            },
            "thm14" => Variant::Thm14,
            "thm15" => Variant::Thm15,
            "custom" => {
                let amplitude = cfg
                    .amplitude
                    .as_deref()
                    .ok_or_else(|| {
                        Error::InvalidConfig("custom variant requires an amplitude rule".into())
                    })?
                    .parse()?;
                let beta = match cfg.beta.as_deref() {
                    Some(s) => s.parse()?,
                    None => BetaRule::Geometric,
                };
                Variant::Custom { amplitude, beta }
            }
            other => {
                return Err(Error::InvalidConfig(format!(
                    "unknown variant {other:?} (expected thm13, thm14, thm15 or custom)"
                )))
            }
        };
        let mut spec = ConstructionSpec::new(p, variant)?;
        if let Some(q_cap) = cfg.q_cap {
            spec = spec.with_q_cap(q_cap)?;
        }
        if let Some(tol) = cfg.tol {
            spec = spec.with_tol(tol)?;
        }
        Ok(spec)
    }
}

impl From<ConstructionSpec> for SpecConfig {
    fn from(spec: ConstructionSpec) -> Self {
        let (b, amplitude, beta) = match spec.variant {
            Variant::Thm13 { b } => (Some(b), None, None),
            Variant::Thm14 | Variant::Thm15 => (None, None, None),
            Variant::Custom { amplitude, beta } => {
                (None, Some(amplitude.to_string()), Some(beta.to_string()))
            }
        };
        SpecConfig {
            p: spec.p.get(),
            variant: spec.variant.name().to_string(),
            b,
            q_cap: Some(spec.q_cap),
            tol: Some(spec.tol),
            amplitude,
            beta,
        }
    }
}
