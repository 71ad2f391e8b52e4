//! Exact evaluation of `integral(s, t)` and the average
//! `ave(s, t) = integral(s, t) / (t - s)`, plus the Riemann-sum harness
//! and grid scans.
//!
//! Integrals are closed-form per tent (piecewise quadratic in the
//! endpoints); no quadrature is involved, so the only error is floating
//! rounding. Full blocks inside the integration range cancel exactly and
//! cost nothing, which keeps evaluation near t = 1 cheap.

use std::io::Write;

use serde::Serialize;

use crate::block_index::{block_first, block_last, block_of};
use crate::construction::{ConstructionSpec, TentInterval};
use crate::error::{Error, Result};
use crate::lp_space::SparseVector;

/// One evaluated average: the pair (s, t), the value and its quasi-norm.
#[derive(Debug, Clone, Serialize)]
pub struct AverageSample {
    pub s: f64,
    pub t: f64,
    pub value: SparseVector,
    pub norm: f64,
}

/// Cumulative tent integral `int_{left}^{u}` for one interval, clamped to
/// the interval. Quadratic on each half; the full tent integrates to the
/// interval length (base times peak 2 over 2).
fn tent_cumulative(iv: &TentInterval, u: f64) -> f64 {
    if iv.length <= 0.0 {
        return 0.0;
    }
    if u <= iv.left {
        0.0
    } else if u >= iv.right {
        iv.length
    } else if u <= iv.midpoint {
        2.0 * (u - iv.left) * (u - iv.left) / iv.length
    } else {
        iv.length - 2.0 * (iv.right - u) * (iv.right - u) / iv.length
    }
}

fn interval_of(spec: &ConstructionSpec, k: u64) -> Result<TentInterval> {
    let left = spec.node(k - 1)?;
    let right = spec.node(k)?;
    let length = spec.lambda(k)?;
    Ok(TentInterval {
        k,
        left,
        right,
        midpoint: left + 0.5 * length,
        length,
    })
}

/// Exact integral of the scalar tent over `[s, t] ∩ I_k`: the length
/// lambda_k when the interval is covered, 0 on empty overlap.
pub fn block_weight(spec: &ConstructionSpec, k: u64, s: f64, t: f64) -> Result<f64> {
    let (lo, hi) = if s <= t { (s, t) } else { (t, s) };
    let iv = interval_of(spec, k)?;
    Ok((tent_cumulative(&iv, hi) - tent_cumulative(&iv, lo)).max(0.0))
}

/// `int_s^t f(u) du` for `0 <= s <= t <= 1`.
///
/// Only the two partially covered tents at the ends are integrated
/// explicitly; fully covered intervals contribute `lambda_k x_k`, and the
/// full blocks among them vanish, leaving at most the two fringe blocks.
pub fn integral(spec: &ConstructionSpec, s: f64, t: f64) -> Result<SparseVector> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::PointOutsideClosedDomain(s));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::PointOutsideClosedDomain(t));
    }
    if s > t {
        return integral(spec, t, s);
    }
    if s == t || s == 1.0 {
        return Ok(SparseVector::zero());
    }
    let first = match spec.locate(s) {
        Ok(iv) => iv,
        // The whole range sits in the sub-resolution fringe at 1.
        Err(Error::IndexDepthExceeded) => return Ok(SparseVector::zero()),
        Err(e) => return Err(e),
    };
    let last = if t == 1.0 {
        None
    } else {
        match spec.locate(t) {
            Ok(iv) => Some(iv),
            Err(Error::IndexDepthExceeded) => None,
            Err(e) => return Err(e),
        }
    };

    if let Some(last) = &last {
        if last.k == first.k {
            let w = tent_cumulative(&first, t) - tent_cumulative(&first, s);
            return Ok(spec.x_vector(first.k)?.scale(w.max(0.0)));
        }
    }

    let mut terms: Vec<(f64, SparseVector)> = Vec::new();
    let w_first = first.length - tent_cumulative(&first, s);
    terms.push((w_first, spec.x_vector(first.k)?));

    // Fully covered indices: (first.k, last.k) exclusive. Interior full
    // blocks vanish, so only the remainder of the first block and the
    // prefix of the last block survive.
    let lo = first.k + 1;
    let hi = last.as_ref().map(|last| last.k - 1);
    let q_lo = block_of(first.k)?;
    match hi {
        None => {
            terms.push((1.0, spec.partial_sum_tail(lo)?));
        }
        Some(hi) if lo <= hi => {
            let q_hi = block_of(hi)?;
            if q_lo == q_hi {
                terms.push((1.0, spec.partial_sum(lo, hi)?));
            } else {
                let first_block_end = block_last(q_lo);
                if lo <= first_block_end {
                    terms.push((1.0, spec.partial_sum(lo, first_block_end)?));
                }
                let last_block_start = block_first(q_hi);
                if last_block_start <= hi {
                    terms.push((1.0, spec.partial_sum(last_block_start, hi)?));
                }
            }
        }
        Some(_) => {}
    }

    if let Some(last) = &last {
        let w_last = tent_cumulative(last, t);
        terms.push((w_last, spec.x_vector(last.k)?));
    }

    let refs: Vec<(f64, &SparseVector)> = terms.iter().map(|(a, v)| (*a, v)).collect();
    Ok(crate::lp_space::linear_combine(&refs))
}

/// The primitive `t -> int_0^t f(u) du`.
pub fn primitive(spec: &ConstructionSpec, t: f64) -> Result<SparseVector> {
    integral(spec, 0.0, t)
}

/// The average of f over [s, t]; `f(c)` on the diagonal. Symmetric in its
/// arguments by construction (both orders run the identical computation).
///
/// At (1, 1) the value exists only when the construction admits a
/// separately continuous extension, in which case it is zero; otherwise
/// the call reports [`Error::UndefinedExtension`].
pub fn ave(spec: &ConstructionSpec, s: f64, t: f64) -> Result<AverageSample> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::PointOutsideClosedDomain(s));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::PointOutsideClosedDomain(t));
    }
    let value = if s == t {
        if s == 1.0 {
            if spec.separate_continuity_holds() {
                SparseVector::zero()
            } else {
                return Err(Error::UndefinedExtension);
            }
        } else {
            spec.f_eval(s)?
        }
    } else {
        let (lo, hi) = if s < t { (s, t) } else { (t, s) };
        integral(spec, lo, hi)?.scale(1.0 / (hi - lo))
    };
    let norm = value.quasi_norm(spec.p());
    Ok(AverageSample { s, t, value, norm })
}

/// Tag placement rule for uniform partitions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TagRule {
    Left,
    Midpoint,
    Right,
}

/// A tagged partition 0 = u_0 < ... < u_N = 1 with one evaluation tag per
/// subinterval.
#[derive(Debug, Clone)]
pub struct TaggedPartition {
    nodes: Vec<f64>,
    tags: Vec<f64>,
}

impl TaggedPartition {
    pub fn new(nodes: Vec<f64>, tags: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidPartition("need at least two nodes".into()));
        }
        if nodes[0] != 0.0 || *nodes.last().unwrap() != 1.0 {
            return Err(Error::InvalidPartition("nodes must run from 0 to 1".into()));
        }
        // partial_cmp keeps NaN nodes invalid
        if nodes
            .windows(2)
            .any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less))
        {
            return Err(Error::InvalidPartition(
                "nodes must strictly increase".into(),
            ));
        }
        if tags.len() != nodes.len() - 1 {
            return Err(Error::InvalidPartition(format!(
                "{} tags for {} subintervals",
                tags.len(),
                nodes.len() - 1
            )));
        }
        for (i, &tag) in tags.iter().enumerate() {
            if !(nodes[i] <= tag && tag <= nodes[i + 1]) {
                return Err(Error::InvalidPartition(format!(
                    "tag {tag} outside subinterval [{}, {}]",
                    nodes[i],
                    nodes[i + 1]
                )));
            }
        }
        Ok(Self { nodes, tags })
    }

    /// Uniform dyadic partition with 2^m subintervals.
    pub fn uniform_dyadic(m: u32, rule: TagRule) -> Self {
        let n = 1u64 << m;
        let h = (-(m as f64)).exp2();
        let nodes: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();
        let tags: Vec<f64> = (0..n)
            .map(|i| match rule {
                TagRule::Left => i as f64 * h,
                TagRule::Midpoint => (i as f64 + 0.5) * h,
                TagRule::Right => (i + 1) as f64 * h,
            })
            .collect();
        Self { nodes, tags }
    }

    /// Partition refined to the tent geometry: for every k <= k_max the
    /// nodes t_{k-1}, c_k, t_k appear, with midpoint tags on the linear
    /// halves (where the midpoint rule is exact) and a left tag on the
    /// final stub [t_{k_max}, 1] (where f vanishes at the tag). The
    /// resulting sum reproduces `sum_{k <= k_max} lambda_k x_k` exactly up
    /// to rounding.
    pub fn aligned_to_nodes(spec: &ConstructionSpec, k_max: u64) -> Result<Self> {
        if k_max == 0 {
            return Err(Error::NonPositiveIndex);
        }
        let mut nodes = vec![0.0];
        let mut tags = Vec::new();
        for k in 1..=k_max {
            let iv = interval_of(spec, k)?;
            for half in [(iv.left, iv.midpoint), (iv.midpoint, iv.right)] {
                if half.1 > half.0 {
                    nodes.push(half.1);
                    tags.push(0.5 * (half.0 + half.1));
                }
            }
        }
        let last = *nodes.last().unwrap();
        if last < 1.0 {
            nodes.push(1.0);
            tags.push(last);
        }
        Self::new(nodes, tags)
    }

    pub fn mesh(&self) -> f64 {
        self.nodes
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }

    pub fn subintervals(&self) -> usize {
        self.tags.len()
    }
}

/// The Riemann sum `sum_i (u_i - u_{i-1}) f(tag_i)`.
pub fn riemann_sum(spec: &ConstructionSpec, partition: &TaggedPartition) -> Result<SparseVector> {
    let mut entries: Vec<(u64, f64)> = Vec::new();
    for (w, &tag) in partition
        .nodes
        .windows(2)
        .map(|w| w[1] - w[0])
        .zip(partition.tags.iter())
    {
        let v = spec.f_eval(tag)?;
        for (coord, coeff) in v.iter() {
            entries.push((coord, w * coeff));
        }
    }
    Ok(SparseVector::from_entries(entries))
}

/// Largest average norm over the extremal half-block spans up to block
/// `q_max`: a lower bound for the Lipschitz quasi-norm of the primitive.
/// Block-aligned spans attain `sup_q A_q C_q` over the covered range.
pub fn lipschitz_quotient(spec: &ConstructionSpec, q_max: u64) -> Result<f64> {
    if q_max < 2 {
        return Err(Error::InvalidConfig(
            "lipschitz quotient needs q_max >= 2".into(),
        ));
    }
    let mut best: f64 = 0.0;
    for q in 1..=q_max {
        let lo = spec.node(block_first(q) - 1)?;
        let mid = spec.node(q * q)?;
        let hi = spec.node(block_last(q))?;
        for (s, t) in [(lo, mid), (mid, hi)] {
            if t > s {
                best = best.max(ave(spec, s, t)?.norm);
            }
        }
    }
    Ok(best)
}

/// Largest average norm over pairs of block-boundary nodes inside the
/// window [lo, 1). Shrinking windows expose the behavior at the corner
/// (1, 1): the maxima blow up exactly when the averages are unbounded and
/// decay when they extend continuously.
pub fn window_max(spec: &ConstructionSpec, lo: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&lo) {
        return Err(Error::PointOutsideDomain(lo));
    }
    let mut q = block_of(spec.locate(lo)?.k)?;
    if spec.block_start(q) < lo {
        q += 1;
    }
    let mut points: Vec<f64> = Vec::new();
    let limit = 64;
    while points.len() < limit {
        let start = spec.block_start(q);
        if start >= 1.0 {
            break;
        }
        points.push(start);
        points.push(spec.node(q * q)?);
        points.push(spec.node(block_last(q))?);
        q += 1;
    }
    points.sort_by(|a, b| a.partial_cmp(b).unwrap());
    points.dedup();
    points.retain(|&u| u >= lo && u < 1.0);
    let mut best: f64 = 0.0;
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            best = best.max(ave(spec, points[i], points[j])?.norm);
        }
    }
    Ok(best)
}

/// Deterministic row-major grid of averages over
/// `s_range x t_range`. With `snap` set, exact block-boundary nodes
/// falling inside the ranges are added to the axes; uniform grids alone
/// can miss the extremal block-aligned pairs.
///
/// The single corner (1, 1) is omitted when the construction has no
/// extension value there.
pub fn grid_scan(
    spec: &ConstructionSpec,
    s_range: (f64, f64),
    t_range: (f64, f64),
    n: usize,
    snap: bool,
) -> Result<Vec<AverageSample>> {
    let s_points = axis_points(spec, s_range, n, snap)?;
    let t_points = axis_points(spec, t_range, n, snap)?;
    let mut out = Vec::with_capacity(s_points.len() * t_points.len());
    for &s in &s_points {
        for &t in &t_points {
            match ave(spec, s, t) {
                Ok(sample) => out.push(sample),
                Err(Error::UndefinedExtension) => {}
                Err(e) => return Err(e),
            }
        }
    }
    Ok(out)
}

fn axis_points(
    spec: &ConstructionSpec,
    range: (f64, f64),
    n: usize,
    snap: bool,
) -> Result<Vec<f64>> {
    let (lo, hi) = range;
    if !(0.0..=1.0).contains(&lo) || !(lo..=1.0).contains(&hi) {
        return Err(Error::InvalidConfig(format!("bad axis range [{lo}, {hi}]")));
    }
    if n == 0 {
        return Err(Error::InvalidConfig("grid needs at least one point".into()));
    }
    let mut points: Vec<f64> = if n == 1 || lo == hi {
        vec![lo]
    } else {
        (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect()
    };
    if snap {
        for q in 1..=spec.q_cap() {
            for t in [
                spec.node(block_first(q) - 1)?,
                spec.node(q * q)?,
                spec.node(block_last(q))?,
            ] {
                if t >= lo && t <= hi {
                    points.push(t);
                }
            }
        }
    }
    points.sort_by(|a, b| a.partial_cmp(b).unwrap());
    points.dedup();
    Ok(points)
}

/// One row of the blow-up table: the extremal half-block span of block q
/// and the closed-form prediction A_q C_q for its average norm.
#[derive(Debug, Clone, Serialize)]
pub struct BlowupRow {
    pub q: u64,
    pub s: f64,
    pub t: f64,
    pub norm: f64,
    pub predicted: f64,
}

/// Evaluate the half-block witness spans for q = 1..=q_max.
pub fn blowup_rows(spec: &ConstructionSpec, q_max: u64) -> Result<Vec<BlowupRow>> {
    (1..=q_max)
        .map(|q| {
            let s = spec.node(q * q)?;
            let t = spec.node(block_last(q))?;
            let sample = ave(spec, s, t)?;
            Ok(BlowupRow {
                q,
                s,
                t,
                norm: sample.norm,
                predicted: spec.amplitude_modulus(q),
            })
        })
        .collect()
}

/// 17 significant digits, enough to reproduce any f64 bit pattern.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV export of grid-scan samples: header `s,t,norm`, row-major order,
/// LF line endings.
pub fn write_scan_csv<W: Write>(samples: &[AverageSample], mut w: W) -> std::io::Result<()> {
    w.write_all(b"s,t,norm\n")?;
    for sample in samples {
        writeln!(
            w,
            "{},{},{}",
            fmt17(sample.s),
            fmt17(sample.t),
            fmt17(sample.norm)
        )?;
    }
    Ok(())
}

/// CSV export of the blow-up table: header `q,s,t,norm,predicted`.
pub fn write_blowup_csv<W: Write>(rows: &[BlowupRow], mut w: W) -> std::io::Result<()> {
    w.write_all(b"q,s,t,norm,predicted\n")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{}",
            r.q,
            fmt17(r.s),
            fmt17(r.t),
            fmt17(r.norm),
            fmt17(r.predicted)
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{AmplitudeRule, BetaRule, Variant};
    use crate::lp_space::PExponent;
    use proptest::prelude::*;

    fn spec(pe: f64, variant: Variant) -> ConstructionSpec {
        ConstructionSpec::new(PExponent::new(pe).unwrap(), variant).unwrap()
    }

    fn thm14() -> ConstructionSpec {
        spec(0.5, Variant::Thm14)
    }

    fn banach_control() -> ConstructionSpec {
        spec(
            1.0,
            Variant::Custom {
                amplitude: AmplitudeRule::Power { exponent: 1.0 },
                beta: BetaRule::Geometric,
            },
        )
    }

    fn max_abs_coeff(v: &SparseVector) -> f64 {
        v.iter().map(|(_, c)| c.abs()).fold(0.0, f64::max)
    }

    #[test]
    fn block_weight_cases() {
        let s = thm14();
        for k in [1u64, 3, 7] {
            let iv = interval_of(&s, k).unwrap();
            // full cover -> lambda_k
            let w = block_weight(&s, k, 0.0, 1.0).unwrap();
            assert!((w - iv.length).abs() <= 1e-16);
            // disjoint -> 0
            assert_eq!(block_weight(&s, k, iv.right, 1.0).unwrap(), 0.0);
            // left half -> lambda_k / 2; rounding is absolute in the
            // node magnitude, not relative to the interval length
            let wl = block_weight(&s, k, iv.left, iv.midpoint).unwrap();
            assert!((wl - iv.length / 2.0).abs() <= 1e-14);
        }
    }

    #[test]
    fn integral_over_unit_interval_vanishes() {
        for s in [
            thm14(),
            spec(0.5, Variant::Thm15),
            spec(0.5, Variant::Thm13 { b: 3.0 }),
        ] {
            let v = integral(&s, 0.0, 1.0).unwrap();
            assert!(v.is_zero(), "{}", s.variant().name());
        }
    }

    #[test]
    fn integral_of_one_tent() {
        let s = thm14();
        for k in [1u64, 4, 11] {
            let iv = interval_of(&s, k).unwrap();
            let v = integral(&s, iv.left, iv.right).unwrap();
            let expect = s.x_vector(k).unwrap().scale(iv.length);
            let diff = v.sub(&expect);
            assert!(max_abs_coeff(&diff) <= 1e-16);
        }
    }

    #[test]
    fn primitive_endpoints() {
        let s = thm14();
        assert!(primitive(&s, 0.0).unwrap().is_zero());
        assert!(primitive(&s, 1.0).unwrap().is_zero());
    }

    #[test]
    fn diagonal_average_is_f() {
        let s = thm14();
        let iv = interval_of(&s, 3).unwrap();
        let c = iv.midpoint;
        let sample = ave(&s, c, c).unwrap();
        let expect = s.x_vector(3).unwrap().scale(2.0);
        assert!(max_abs_coeff(&sample.value.sub(&expect)) <= 1e-12);
    }

    #[test]
    fn ave_symmetric_bitwise() {
        let s = thm14();
        for (a, b) in [(0.1, 0.9), (0.25, 0.26), (0.0, 0.5)] {
            let x = ave(&s, a, b).unwrap();
            let y = ave(&s, b, a).unwrap();
            assert_eq!(x.value, y.value);
            assert_eq!(x.norm.to_bits(), y.norm.to_bits());
        }
    }

    #[test]
    fn corner_defined_only_with_separate_continuity() {
        // thm13 extends with value zero
        let s13 = spec(0.5, Variant::Thm13 { b: 3.0 });
        let sample = ave(&s13, 1.0, 1.0).unwrap();
        assert!(sample.value.is_zero());

        // thm14 / thm15 have no extension value
        assert!(matches!(
            ave(&thm14(), 1.0, 1.0),
            Err(Error::UndefinedExtension)
        ));
        assert!(matches!(
            ave(&spec(0.5, Variant::Thm15), 1.0, 1.0),
            Err(Error::UndefinedExtension)
        ));

        // the Banach control extends
        assert!(ave(&banach_control(), 1.0, 1.0).is_ok());
    }

    #[test]
    fn half_block_averages_match_closed_form() {
        for s in [
            thm14(),
            spec(0.5, Variant::Thm15),
            spec(0.5, Variant::Thm13 { b: 3.0 }),
            spec(2.0 / 3.0, Variant::Thm15),
            spec(0.25, Variant::Thm15),
            spec(0.1, Variant::Thm14),
        ] {
            for q in 1..=40u64 {
                let lo = s.node(q * q).unwrap();
                let hi = s.node(block_last(q)).unwrap();
                let norm = ave(&s, lo, hi).unwrap().norm;
                let expect = s.amplitude_modulus(q);
                assert!(
                    (norm - expect).abs() <= 1e-9 * expect,
                    "{} q = {q}: {norm} vs {expect}",
                    s.variant().name()
                );
            }
        }
    }

    #[test]
    fn half_block_values_pinned_while_row_limit_vanishes() {
        // the joint-discontinuity witness: along half-block pairs the
        // average stays at 1, yet approaching (1,1) along the row t = 1
        // the values fade to 0 (separate continuity)
        let s = spec(0.5, Variant::Thm13 { b: 3.0 });
        let mut prev_row = f64::INFINITY;
        for q in [2u64, 5, 10, 20, 40] {
            let lo = s.node(q * q).unwrap();
            let hi = s.node(block_last(q)).unwrap();
            let pinned = ave(&s, lo, hi).unwrap().norm;
            assert!((pinned - 1.0).abs() <= 1e-9, "q = {q}: {pinned}");
            let row = ave(&s, lo, 1.0).unwrap().norm;
            assert!(row < prev_row, "row limit not shrinking at q = {q}");
            prev_row = row;
        }
        assert!(prev_row < 0.04);
    }

    #[test]
    fn riemann_sum_trivial_cases() {
        let s = thm14();
        // single subinterval [0, 1] tagged at 1: f(1) = 0
        let part = TaggedPartition::new(vec![0.0, 1.0], vec![1.0]).unwrap();
        assert!(riemann_sum(&s, &part).unwrap().is_zero());
    }

    #[test]
    fn aligned_partition_reproduces_partial_sums() {
        let s = thm14();
        // stop mid-block: the sum up to k = q^2 is the surviving minus-half
        for q in [2u64, 4, 6] {
            let k_max = q * q;
            let part = TaggedPartition::aligned_to_nodes(&s, k_max).unwrap();
            let sum = riemann_sum(&s, &part).unwrap();
            let expect = s.partial_sum(1, k_max).unwrap();
            let diff = sum.sub(&expect);
            assert!(
                max_abs_coeff(&diff) <= 1e-10,
                "q = {q}: residual {}",
                max_abs_coeff(&diff)
            );
            assert!(!expect.is_zero());
        }
    }

    #[test]
    fn riemann_sums_shrink_with_mesh() {
        let s = thm14();
        let norm_at = |s: &ConstructionSpec, m: u32| {
            let part = TaggedPartition::uniform_dyadic(m, TagRule::Midpoint);
            riemann_sum(s, &part).unwrap().quasi_norm(s.p())
        };
        let coarse = norm_at(&s, 8);
        let fine = norm_at(&s, 12);
        assert!(fine <= coarse, "coarse {coarse}, fine {fine}");
        assert!(fine < 0.1);

        // power-tail masses converge too, with some wobble along the way
        let s13 = spec(0.5, Variant::Thm13 { b: 3.0 });
        let coarse = norm_at(&s13, 8);
        let fine = norm_at(&s13, 14);
        assert!(fine < coarse, "coarse {coarse}, fine {fine}");
        assert!(fine < 2e-2);
    }

    #[test]
    fn partition_validation() {
        assert!(TaggedPartition::new(vec![0.0, 0.5], vec![0.2]).is_err()); // ends at 0.5
        assert!(TaggedPartition::new(vec![0.0, 0.5, 0.5, 1.0], vec![0.1, 0.5, 0.7]).is_err());
        assert!(TaggedPartition::new(vec![0.0, 0.5, 1.0], vec![0.6, 0.7]).is_err()); // tag outside
        let p = TaggedPartition::uniform_dyadic(4, TagRule::Midpoint);
        assert_eq!(p.subintervals(), 16);
        assert!((p.mesh() - 1.0 / 16.0).abs() < 1e-18);
    }

    #[test]
    fn lipschitz_quotient_block_aligned() {
        let s13 = spec(0.5, Variant::Thm13 { b: 3.0 });
        let q13 = lipschitz_quotient(&s13, 20).unwrap();
        assert!((q13 - 1.0).abs() <= 1e-9, "{q13}");

        let s15 = spec(0.5, Variant::Thm15);
        let q15 = lipschitz_quotient(&s15, 25).unwrap();
        assert!((q15 - 5.0).abs() <= 1e-9 * 5.0, "{q15}");

        // Banach control: bounded by 1
        let qb = lipschitz_quotient(&banach_control(), 20).unwrap();
        assert!(qb <= 1.0 + 1e-12, "{qb}");
    }

    #[test]
    fn window_max_direction_tracks_continuity() {
        // Banach control: maxima decrease as the window shrinks to (1,1)
        let b = banach_control();
        let mut prev = f64::INFINITY;
        for m in 2..=10u32 {
            let lo = 1.0 - (-(m as f64)).exp2();
            let v = window_max(&b, lo).unwrap();
            assert!(v <= prev + 1e-15, "m = {m}: {v} > {prev}");
            prev = v;
        }

        // thm15: maxima grow without bound
        let s15 = spec(0.5, Variant::Thm15);
        let coarse = window_max(&s15, 1.0 - 0.25).unwrap();
        let fine = window_max(&s15, 1.0 - 0.25f64.powi(3)).unwrap();
        assert!(fine > coarse);
    }

    #[test]
    fn grid_scan_shapes() {
        let s = thm14();
        // degenerate 1x1 grid on the diagonal
        let iv = interval_of(&s, 2).unwrap();
        let c = iv.midpoint;
        let one = grid_scan(&s, (c, c), (c, c), 1, false).unwrap();
        assert_eq!(one.len(), 1);
        let q = block_of(2).unwrap();
        assert!((one[0].norm - 2.0 * s.amplitude(q)).abs() < 1e-12);

        let table = grid_scan(&s, (0.0, 0.5), (0.0, 0.5), 4, false).unwrap();
        assert_eq!(table.len(), 16);
        // row-major: s varies slowest
        assert!(table[0].s <= table[15].s);
        assert_eq!(table[0].t, table[4].t);

        // scanning across (1,1) on thm14 omits the undefined corner
        let corner = grid_scan(&s, (0.9, 1.0), (0.9, 1.0), 3, false).unwrap();
        assert_eq!(corner.len(), 8);
    }

    #[test]
    fn snap_points_make_blowup_visible() {
        let s15 = spec(0.5, Variant::Thm15);
        let plain = grid_scan(&s15, (0.9, 0.999), (0.9, 0.999), 5, false).unwrap();
        let snapped = grid_scan(&s15, (0.9, 0.999), (0.9, 0.999), 5, true).unwrap();
        let max_plain = plain.iter().map(|r| r.norm).fold(0.0, f64::max);
        let max_snap = snapped.iter().map(|r| r.norm).fold(0.0, f64::max);
        assert!(max_snap >= max_plain);
        assert!(snapped.len() > plain.len());
    }

    #[test]
    fn csv_format_fixed() {
        let rows = vec![AverageSample {
            s: 0.5,
            t: 0.75,
            value: SparseVector::zero(),
            norm: 1.0,
        }];
        let mut buf = Vec::new();
        write_scan_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "s,t,norm\n5.0000000000000000e-1,7.5000000000000000e-1,1.0000000000000000e0\n"
        );
        assert!(!text.contains('\r'));
    }

    #[test]
    fn blowup_rows_match_prediction() {
        let s15 = spec(0.5, Variant::Thm15);
        let rows = blowup_rows(&s15, 10).unwrap();
        assert_eq!(rows.len(), 10);
        for r in &rows {
            assert!((r.norm - r.predicted).abs() <= 1e-9 * r.predicted);
            assert!((r.predicted - (r.q as f64).sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn banach_mean_value_bound() {
        // In the locally convex case the average norm never exceeds the
        // largest norm of f over the window (checked at the tent peaks).
        let b = banach_control();
        let sup_f = |s: f64, t: f64| -> f64 {
            let mut best = b.f_eval(s).unwrap().quasi_norm(b.p());
            best = best.max(b.f_eval(t).unwrap().quasi_norm(b.p()));
            let mut k = b.locate(s).unwrap().k;
            let k_end = b.locate(t).unwrap().k;
            while k <= k_end {
                let iv = interval_of(&b, k).unwrap();
                let peak = iv.midpoint;
                if peak > s && peak < t {
                    best = best.max(b.f_eval(peak).unwrap().quasi_norm(b.p()));
                }
                k += 1;
            }
            best
        };
        for (s, t) in [(0.0, 1.0 - 1e-6), (0.1, 0.3), (0.45, 0.55), (0.7, 0.9)] {
            let a = ave(&b, s, t).unwrap().norm;
            let bound = sup_f(s, t);
            assert!(
                a <= bound + 1e-9,
                "ave {a} exceeds sup {bound} on [{s}, {t}]"
            );
        }
    }

    #[test]
    fn joint_continuity_modulus_on_compact_subsquare() {
        // On [0, 7/8]^2 the average is jointly continuous: the discrete
        // modulus over nested grids decreases as the mesh refines.
        let s = thm14();
        let modulus = |n: usize| -> f64 {
            let pts: Vec<f64> = (0..=n).map(|i| 0.875 * i as f64 / n as f64).collect();
            let mut worst: f64 = 0.0;
            for i in 0..pts.len() {
                for j in 0..pts.len() - 1 {
                    let a = ave(&s, pts[i], pts[j]).unwrap().value;
                    let b = ave(&s, pts[i], pts[j + 1]).unwrap().value;
                    worst = worst.max(a.sub(&b).quasi_norm(s.p()));
                }
            }
            worst
        };
        let coarse = modulus(8);
        let fine = modulus(128);
        assert!(fine < coarse, "fine {fine} vs coarse {coarse}");
    }

    /// Definition-level oracle: sum `block_weight(k, s, t) * x_k` over
    /// every covered index, with no use of the vanishing identity.
    fn naive_integral(s: &ConstructionSpec, lo: f64, hi: f64) -> SparseVector {
        let k_lo = s.locate(lo).unwrap().k;
        let k_hi = if hi < 1.0 {
            s.locate(hi).unwrap().k
        } else {
            // far enough that every later weight is zero
            block_last(block_of(k_lo).unwrap() + 25)
        };
        let terms: Vec<(f64, SparseVector)> = (k_lo..=k_hi)
            .map(|k| (block_weight(s, k, lo, hi).unwrap(), s.x_vector(k).unwrap()))
            .collect();
        let refs: Vec<(f64, &SparseVector)> = terms.iter().map(|(a, v)| (*a, v)).collect();
        crate::lp_space::linear_combine(&refs)
    }

    #[test]
    fn integral_matches_naive_oracle() {
        let s = thm14();
        let pairs = [
            (0.0, 1.0),
            (0.0, 0.3),
            (0.13, 0.77),
            (0.25, 0.5),
            (0.26, 0.9),
            (0.5, 1.0),
            (0.8, 0.95),
            (0.31, 0.32),
        ];
        for (lo, hi) in pairs {
            let fast = integral(&s, lo, hi).unwrap();
            let naive = naive_integral(&s, lo, hi);
            let gap = max_abs_coeff(&fast.sub(&naive));
            assert!(gap <= 1e-15, "[{lo}, {hi}]: residual {gap}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn integral_additive(a in 0.0f64..1.0, b in 0.0f64..1.0, c in 0.0f64..1.0) {
            let s = thm14();
            let mut v = [a, b, c];
            v.sort_by(|x, y| x.partial_cmp(y).unwrap());
            let [lo, mid, hi] = v;
            let left = integral(&s, lo, mid).unwrap();
            let right = integral(&s, mid, hi).unwrap();
            let whole = integral(&s, lo, hi).unwrap();
            let residual = left.add(&right).sub(&whole);
            prop_assert!(max_abs_coeff(&residual) <= 1e-13);
        }

        #[test]
        fn difference_quotient_is_average(a in 0.0f64..1.0, b in 0.0f64..1.0) {
            prop_assume!((a - b).abs() > 1e-6);
            let s = thm14();
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let quotient = primitive(&s, hi).unwrap()
                .sub(&primitive(&s, lo).unwrap())
                .scale(1.0 / (hi - lo));
            let avg = ave(&s, lo, hi).unwrap().value;
            prop_assert!(max_abs_coeff(&quotient.sub(&avg)) <= 1e-9);
        }
    }
}
