//! Partial sums of `Σ r_n ‖a_n x‖` and of the sine envelopes around it.

use serde::{Deserialize, Serialize};

use super::scan::{scan, Point, Precision, Structural};
use super::weights::WeightRule;
use crate::arith::TermSequence;
use crate::error::Result;
use crate::ideals::Verdict;
use crate::rational::{rat, to_f64, ExactSum, Rational};

/// `S_N >= 3` at `N = 10^4` flags divergence for harmonic-type weights.
const RAMP_AT: u64 = 10_000;
const RAMP_VALUE: i64 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GrowthClass {
    BoundedEvidence,
    DivergentEvidence,
    Inconclusive,
}

/// Approximate values of the sums at a prefix length.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SumCheckpoint {
    pub n: u64,
    pub lower: f64,
    pub upper: f64,
}

/// Increment of the upper sum over the dyadic block `[from, to]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockIncrement {
    pub from: u64,
    pub to: u64,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummabilityReport {
    pub weights: WeightRule,
    pub terms: TermSequence,
    pub depth: u64,
    /// `Σ_{n <= N} r_n ‖a_n x‖` when every norm is known exactly.
    #[serde(default, skip_serializing_if = "Option::is_none", with = "crate::rational::serde_opt_rat")]
    pub exact: Option<Rational>,
    /// Rigorous bracket for `Σ_{n <= N} r_n ‖a_n x‖`.
    #[serde(with = "crate::rational::serde_rat")]
    pub norm_lower: Rational,
    #[serde(with = "crate::rational::serde_rat")]
    pub norm_upper: Rational,
    /// Bracket for `Σ_{n <= N} r_n |sin π a_n x|` from `2‖y‖ <= |sin πy| <= (22/7)‖y‖`.
    #[serde(with = "crate::rational::serde_rat")]
    pub sin_lower: Rational,
    #[serde(with = "crate::rational::serde_rat")]
    pub sin_upper: Rational,
    pub checkpoints: Vec<SumCheckpoint>,
    pub blocks: Vec<BlockIncrement>,
    pub classification: GrowthClass,
    pub verdict: Verdict,
}

impl SummabilityReport {
    pub fn lower_envelope(&self) -> &Rational {
        &self.sin_lower
    }

    pub fn upper_envelope(&self) -> &Rational {
        &self.sin_upper
    }
}

pub fn nset_partial_sums(x: &Point, a: &TermSequence, weights: &WeightRule, depth: u64) -> Result<SummabilityReport> {
    // fail early on explicit lists that are too short
    weights.weight(depth)?;
    let cps = crate::ideals::checkpoints(depth);
    let mut lower = ExactSum::new();
    let mut upper = ExactSum::new();
    let mut all_exact = true;
    let mut at_ramp: Option<Rational> = None;
    let mut checkpoints = vec![];
    let mut next_cp = 0usize;
    let mut running = (0.0f64, 0.0f64);
    let mut blocks: Vec<BlockIncrement> = vec![];
    let mut err = None;

    let mut flush = |n: u64, running: (f64, f64), lower: &ExactSum, checkpoints: &mut Vec<SumCheckpoint>| {
        while next_cp < cps.len() && cps[next_cp] <= n {
            let cp = cps[next_cp];
            checkpoints.push(SumCheckpoint { n: cp, lower: running.0, upper: running.1 });
            if cp == RAMP_AT {
                at_ramp = Some(lower.value());
            }
            next_cp += 1;
        }
    };

    let outcome = scan(x, a, depth, Precision::Exact, |n, range| {
        if err.is_some() {
            return;
        }
        flush(n - 1, running, &lower, &mut checkpoints);
        let r = match weights.weight(n) {
            Ok(r) => r,
            Err(e) => {
                err = Some(e);
                return;
            }
        };
        let lo = range.lo() * &r;
        let hi = range.hi() * &r;
        if range.lo() != range.hi() {
            all_exact = false;
        }
        lower.add(&lo);
        upper.add(&hi);
        running.0 += to_f64(&lo);
        let hi_f = to_f64(&hi);
        running.1 += hi_f;
        add_to_block(&mut blocks, n, hi_f);
        flush(n, running, &lower, &mut checkpoints);
    })?;
    if let Some(e) = err {
        return Err(e);
    }
    flush(depth, running, &lower, &mut checkpoints);
    // indices past an early stop all have norm 0
    let mut n = outcome.visited + 1;
    while n <= depth {
        let end = (2 * block_start(n) - 1).min(depth);
        add_to_block(&mut blocks, end, 0.0);
        n = end + 1;
    }

    let norm_lower = lower.value();
    let norm_upper = upper.value();
    let exact = all_exact.then(|| norm_lower.clone());
    let classification = classify(&norm_lower, &norm_upper, depth, at_ramp.as_ref(), &blocks);
    let verdict = match (&outcome.structural, weights.diverges()) {
        (Some(s @ (Structural::Zero | Structural::Terminating { .. })), _) => {
            Verdict::member(format!("{}; finitely many nonzero terms", s.describe()))
        }
        (_, Some(false)) => Verdict::member("summable weights"),
        (Some(s @ Structural::Periodic { .. }), Some(true)) => {
            Verdict::not_member(format!("{}; the weights along one residue class diverge", s.describe()))
        }
        _ => Verdict::inconclusive(format!("growth evidence: {classification:?}")).with_cutoff(depth),
    };
    Ok(SummabilityReport {
        weights: weights.clone(),
        terms: a.clone(),
        depth,
        exact,
        sin_lower: &norm_lower * rat(2, 1),
        sin_upper: &norm_upper * rat(22, 7),
        norm_lower,
        norm_upper,
        checkpoints,
        blocks,
        classification,
        verdict,
    })
}

fn block_start(n: u64) -> u64 {
    if n.is_power_of_two() {
        n
    } else {
        n.next_power_of_two() / 2
    }
}

fn add_to_block(blocks: &mut Vec<BlockIncrement>, n: u64, value: f64) {
    let from = block_start(n);
    match blocks.last_mut() {
        Some(b) if b.from == from => {
            b.value += value;
            b.to = n;
        }
        _ => blocks.push(BlockIncrement { from, to: n, value }),
    }
}

fn classify(
    lower: &Rational,
    upper: &Rational,
    depth: u64,
    at_ramp: Option<&Rational>,
    blocks: &[BlockIncrement],
) -> GrowthClass {
    if upper == &rat(0, 1) {
        return GrowthClass::BoundedEvidence;
    }
    if let Some(s) = at_ramp {
        if s >= &rat(RAMP_VALUE, 1) {
            return GrowthClass::DivergentEvidence;
        }
    } else if depth >= 100 {
        // below 10^4 the ramp grows like log N
        let ramp = RAMP_VALUE as f64 * (depth as f64).ln() / (RAMP_AT as f64).ln();
        if to_f64(lower) >= ramp {
            return GrowthClass::DivergentEvidence;
        }
    }
    // complete blocks only: [2^j, 2^{j+1} - 1]
    let complete: Vec<&BlockIncrement> = blocks.iter().filter(|b| b.to == 2 * b.from - 1 || b.from == 1).collect();
    if complete.len() >= 4 {
        let tail = &complete[complete.len() - 4..];
        if tail.windows(2).all(|w| w[1].value <= 0.75 * w[0].value) {
            return GrowthClass::BoundedEvidence;
        }
    }
    GrowthClass::Inconclusive
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::CircleRational;
    use crate::ideals::Outcome;
    use num_bigint::BigInt;

    fn harmonic(n: u64) -> Rational {
        let mut s = ExactSum::new();
        for k in 1..=n {
            s.add(&Rational::new(BigInt::from(1), BigInt::from(k)));
        }
        s.value()
    }

    #[test]
    fn zero_point_is_bounded() {
        let x = Point::Rational(CircleRational::zero());
        let r = nset_partial_sums(&x, &"2^n".parse().unwrap(), &WeightRule::harmonic(), 100).unwrap();
        assert_eq!(r.exact, Some(rat(0, 1)));
        assert_eq!(r.classification, GrowthClass::BoundedEvidence);
        assert_eq!(r.verdict.outcome, Outcome::Member);
    }

    #[test]
    fn third_gives_a_third_of_the_harmonic_sum() {
        let x = Point::Rational(CircleRational::from_parts(1, 3).unwrap());
        let r = nset_partial_sums(&x, &"2^n".parse().unwrap(), &WeightRule::harmonic(), 200).unwrap();
        assert_eq!(r.exact, Some(harmonic(200) / rat(3, 1)));
        assert!(r.sin_lower <= r.sin_upper);
        assert_eq!(r.verdict.outcome, Outcome::NotMember);
        assert!(r.checkpoints.windows(2).all(|w| w[0].upper <= w[1].upper));
        let r2 = nset_partial_sums(&x, &"2^n".parse().unwrap(), &WeightRule::InversePower(2), 50).unwrap();
        assert_eq!(r2.verdict.outcome, Outcome::Member);
    }

    #[test]
    fn blocks_cover_the_range() {
        let x = Point::Rational(CircleRational::from_parts(1, 5).unwrap());
        let r = nset_partial_sums(&x, &"3^n".parse().unwrap(), &WeightRule::harmonic(), 40).unwrap();
        let ranges: Vec<(u64, u64)> = r.blocks.iter().map(|b| (b.from, b.to)).collect();
        assert_eq!(ranges, vec![(1, 1), (2, 3), (4, 7), (8, 15), (16, 31), (32, 40)]);
    }

    #[test]
    fn dyadic_point_terminates() {
        let x = Point::Rational(CircleRational::from_parts(3, 64).unwrap());
        let r = nset_partial_sums(&x, &"2^n".parse().unwrap(), &WeightRule::harmonic(), 300).unwrap();
        assert_eq!(r.verdict.outcome, Outcome::Member);
        assert_eq!(r.classification, GrowthClass::BoundedEvidence);
        assert_eq!(r.blocks.last().unwrap().from, 256);
    }
}
