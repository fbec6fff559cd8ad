//! Assembling the witness point and checking it index by index.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::plan::{choose_digit, growth_floor, requirements, schedule_floor, Theorem, WitnessPlan};
use crate::arith::{enclose, Decomposition, Depth, DigitExpansion, Horizon, RatInterval};
use crate::error::{Error, Result};
use crate::ideals::{Outcome, SetDescriptor, Verdict};
use crate::rational::{format_rational, int, rat, ExactSum, Rational};
use crate::thinsets::membership_by_support;

/// Window products are formed up to `v · 2^CAP_BITS`; the rest goes into
/// the interval width.
pub const CAP_BITS: usize = 128;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetKind {
    /// `[lo, lo + width]` inside the target, read without reduction mod 1.
    FracWithin,
    /// Every value of `‖a x‖` strictly above the target's lower end.
    NormAbove,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexCheck {
    pub i: u64,
    pub n: u64,
    pub k: u64,
    /// `{a_n x}` lies in this interval (mod 1).
    pub interval: RatInterval,
    pub norm: RatInterval,
    pub target: RatInterval,
    pub target_kind: TargetKind,
    pub pass: bool,
}

/// Upper bound for `Σ_{j=from}^{to} r_j (22/7) ‖u_j x‖` against `2 (22/7) r_{k_{i-1}}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockCheck {
    pub i: u64,
    pub from: u64,
    pub to: u64,
    /// Indices enclosed one by one.
    pub near_terms: u64,
    /// Indices covered by the geometric tail estimate.
    pub far_terms: u64,
    #[serde(with = "crate::rational::serde_rat")]
    pub sum_upper: Rational,
    #[serde(with = "crate::rational::serde_rat")]
    pub bound: Rational,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportCheck {
    pub descriptor: SetDescriptor,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessCertificate {
    pub theorem: Theorem,
    pub plan: WitnessPlan,
    pub digits: DigitExpansion,
    pub checks: Vec<IndexCheck>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<SupportCheck>,
    #[serde(default)]
    pub blocks: Vec<BlockCheck>,
    pub pass: bool,
}

impl WitnessCertificate {
    pub fn failing_checks(&self) -> impl Iterator<Item = &IndexCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// The truncation of the witness through the horizon, with the symbolic
/// support bound `A + 1` when the plan has one.
pub fn assemble(plan: &WitnessPlan) -> Result<DigitExpansion> {
    let seq = plan.sequence.clone();
    let horizon = match &plan.horizon {
        Some(h) if !plan.indices.is_empty() => h.k,
        _ => return DigitExpansion::new(seq, BTreeMap::new(), Depth::Finite),
    };
    let digits = plan.indices.iter().map(|p| (p.support_index(), p.digit.c.clone())).collect();
    let e = DigitExpansion::new(seq, digits, Depth::Truncated(horizon))?;
    Ok(match &plan.witness_set {
        Some(a) => e.with_support_bound(a.shift(1)),
        None => e,
    })
}

fn frac_target() -> RatInterval {
    RatInterval::new(rat(1, 4), rat(7, 8)).expect("ordered")
}

fn norm_target(p: &BigUint) -> RatInterval {
    let p = int(p);
    let lo = (&p - Rational::one()) / (&p * &p);
    RatInterval::new(lo, rat(1, 2)).expect("ordered")
}

fn check_index(plan: &WitnessPlan, e: &DigitExpansion, idx: usize) -> Result<IndexCheck> {
    let p = &plan.indices[idx];
    let t = plan.next_k(idx).ok_or_else(|| Error::Schema("plan has indices but no horizon".into()))?;
    let cap = &p.v << CAP_BITS;
    let enc = enclose(e, &p.decomposition(), Horizon::Index(t), Some(&cap))?;
    let interval = enc.raw();
    let norm = enc.norm_range();
    let (target, target_kind, pass) = match plan.theorem {
        Theorem::Th2 => {
            let base = plan
                .sequence
                .geometric_base()
                .ok_or_else(|| Error::Precondition("th2 needs u_n = p^n".into()))?;
            let target = norm_target(base);
            let pass = norm.lo() > target.lo();
            (target, TargetKind::NormAbove, pass)
        }
        _ => {
            let target = frac_target();
            let pass = interval.is_subset_of(&target);
            (target, TargetKind::FracWithin, pass)
        }
    };
    Ok(IndexCheck { i: p.i, n: p.n, k: p.k, interval, norm, target, target_kind, pass })
}

/// Block `i` covers `j` in `(k_{i-1}, k_i]`.
///
/// Indices with `u_{k_i}/u_j <= cap` are enclosed directly. Below that,
/// `{u_j x} <= u_j/u_{k_i}` (no digits between `j` and `k_i + 1`), and
/// because ratios past `q_1` are at least 2 those terms add up to less
/// than `2/cap`.
fn check_block(plan: &WitnessPlan, e: &DigitExpansion, i: usize) -> Result<Option<BlockCheck>> {
    let weights = match &plan.weights {
        Some(w) => w,
        None => return Ok(None),
    };
    let prev = &plan.indices[i - 2];
    let cur = &plan.indices[i - 1];
    if prev.k == 0 {
        return Ok(None);
    }
    let (from, to) = (prev.k + 1, cur.k);
    let depth = plan.horizon.as_ref().map_or(to, |h| h.k);
    let seq = &plan.sequence;
    let cap = BigUint::one() << CAP_BITS;
    let env = rat(22, 7);
    let unit = BigUint::one();
    let mut sum = ExactSum::new();
    let mut w = BigUint::one();
    let mut j = to;
    let mut near = 0u64;
    while j >= from && w <= cap {
        let dec = Decomposition { k: j, v: unit.clone() };
        let hi = enclose(e, &dec, Horizon::Index(depth), Some(&cap))?.norm_range().hi().clone();
        if !hi.is_zero() {
            sum.add(&(weights.weight(j)? * &env * hi));
        }
        near += 1;
        w *= seq.ratio(j);
        j -= 1;
    }
    let far = if j >= from { j - from + 1 } else { 0 };
    if far > 0 {
        sum.add(&(&env * weights.weight(from)? * rat(2, 1) / int(&cap)));
    }
    let sum_upper = sum.value();
    let bound = rat(2, 1) * &env * weights.weight(prev.k)?;
    let pass = sum_upper <= bound;
    Ok(Some(BlockCheck { i: i as u64, from, to, near_terms: near, far_terms: far, sum_upper, bound, pass }))
}

fn support_check(plan: &WitnessPlan, e: &DigitExpansion) -> Option<SupportCheck> {
    plan.witness_set.as_ref()?;
    Some(SupportCheck { descriptor: e.support(), verdict: membership_by_support(e, &plan.ideal) })
}

struct Computed {
    digits: DigitExpansion,
    checks: Vec<IndexCheck>,
    blocks: Vec<BlockCheck>,
    support: Option<SupportCheck>,
    pass: bool,
}

fn compute(plan: &WitnessPlan) -> Result<Computed> {
    let digits = assemble(plan)?;
    let checks = (0..plan.indices.len()).map(|idx| check_index(plan, &digits, idx)).collect::<Result<Vec<_>>>()?;
    let mut blocks = vec![];
    for i in 2..=plan.indices.len() {
        blocks.extend(check_block(plan, &digits, i)?);
    }
    let support = support_check(plan, &digits);
    let pass = checks.iter().all(|c| c.pass)
        && blocks.iter().all(|b| b.pass)
        && support.as_ref().map_or(true, |s| s.verdict.is_member());
    Ok(Computed { digits, checks, blocks, support, pass })
}

/// Builds the witness described by `plan` and checks every planned index.
/// Failing checks stay in the certificate with their intervals.
pub fn build_and_verify(plan: &WitnessPlan) -> Result<WitnessCertificate> {
    let c = compute(plan)?;
    Ok(WitnessCertificate {
        theorem: plan.theorem,
        plan: plan.clone(),
        digits: c.digits,
        checks: c.checks,
        support: c.support,
        blocks: c.blocks,
        pass: c.pass,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<u64>,
    pub field: String,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub pass: bool,
    pub mismatches: Vec<Mismatch>,
    pub notes: Vec<String>,
}

struct Collector {
    mismatches: Vec<Mismatch>,
    notes: Vec<String>,
}

impl Collector {
    fn fail(&mut self, index: Option<u64>, field: &str, detail: impl Into<String>) {
        self.mismatches.push(Mismatch { index, field: field.into(), detail: detail.into() });
    }
}

/// Recomputes a certificate from its plan. Stored intervals may be wider
/// than the recomputed ones (noted) but never narrower.
pub fn verify_certificate(cert: &WitnessCertificate) -> Result<VerifyReport> {
    let plan = &cert.plan;
    let mut out = Collector { mismatches: vec![], notes: vec![] };
    if cert.theorem != plan.theorem {
        out.fail(None, "theorem", format!("certificate says {}, plan says {}", cert.theorem, plan.theorem));
    }
    check_plan(plan, &mut out)?;
    if !out.mismatches.is_empty() {
        return Ok(VerifyReport { pass: false, mismatches: out.mismatches, notes: out.notes });
    }
    let fresh = compute(plan)?;
    compare_digits(plan, &cert.digits, &fresh.digits, &mut out);
    compare_checks(&cert.checks, &fresh.checks, &mut out);
    compare_blocks(&cert.blocks, &fresh.blocks, &mut out);
    match (&cert.support, &fresh.support) {
        (None, None) => {}
        (Some(s), Some(f)) => {
            if s.descriptor != f.descriptor {
                out.fail(None, "support", format!("stored {} but the digits give {}", s.descriptor, f.descriptor));
            }
            if s.verdict.outcome != f.verdict.outcome {
                out.fail(
                    None,
                    "support",
                    format!("stored {} but recomputed {}", s.verdict.outcome.as_str(), f.verdict.outcome.as_str()),
                );
            }
            if f.verdict.outcome != Outcome::Member {
                out.fail(None, "support", "support is not a certified translation invariant member");
            }
        }
        _ => out.fail(None, "support", "support section present on one side only"),
    }
    if cert.pass != fresh.pass {
        out.fail(None, "pass", format!("stored pass = {}, recomputed {}", cert.pass, fresh.pass));
    }
    let pass = out.mismatches.is_empty() && fresh.pass;
    Ok(VerifyReport { pass, mismatches: out.mismatches, notes: out.notes })
}

fn check_plan(plan: &WitnessPlan, out: &mut Collector) -> Result<()> {
    let req = match requirements(plan.theorem, &plan.sequence, &plan.ideal) {
        Ok(r) => r,
        Err(e) => {
            out.fail(None, "plan", e.to_string());
            return Ok(());
        }
    };
    if req.witness_set != plan.witness_set {
        out.fail(None, "witness_set", "does not match the ideal");
    }
    if req.weights != plan.weights {
        out.fail(None, "weights", "do not match the theorem");
    }
    if plan.indices.len() as u64 != plan.count {
        out.fail(None, "count", format!("{} indices for count {}", plan.indices.len(), plan.count));
    }
    if plan.count > 0 && plan.horizon.is_none() {
        out.fail(None, "horizon", "missing");
    }
    for (idx, p) in plan.indices.iter().enumerate() {
        if p.i != idx as u64 + 1 {
            out.fail(Some(p.i), "i", format!("expected {}", idx + 1));
        }
    }
    let selected = plan.selected();
    for (idx, s) in selected.iter().enumerate() {
        let i = idx as u64 + 1;
        let d = plan.terms.decompose_at(s.n, &plan.sequence);
        if d.k != s.k || d.v != s.v {
            out.fail(Some(i), "decomposition", format!("a_{} = u_{} · {}, plan says u_{} · {}", s.n, d.k, d.v, s.k, s.v));
            continue;
        }
        if let Some(a) = &plan.witness_set {
            if !a.contains(s.k)? {
                out.fail(Some(i), "constraint", format!("k = {} is not in {a}", s.k));
            }
        }
        let sched = schedule_floor(plan.theorem, i)?;
        if s.k < sched {
            out.fail(Some(i), "constraint", format!("k = {} below 2^{i}", s.k));
        }
        if idx > 0 {
            let prev = &selected[idx - 1];
            if s.n <= prev.n {
                out.fail(Some(i), "constraint", "indices are not increasing");
            }
            let (floor, reason) = growth_floor(plan.theorem, &plan.sequence, prev)?;
            if s.k < floor {
                out.fail(Some(i), "constraint", format!("k = {} fails {reason} (needs {floor})", s.k));
            }
        }
        if let Some(p) = plan.indices.get(idx) {
            match choose_digit(plan.theorem, &plan.sequence, s) {
                Ok(dc) if dc == p.digit => {}
                Ok(dc) => out.fail(Some(i), "digit", format!("planned c = {}, recomputed {}", p.digit.c, dc.c)),
                Err(e) => out.fail(Some(i), "digit", e.to_string()),
            }
        }
    }
    Ok(())
}

fn compare_digits(plan: &WitnessPlan, stored: &DigitExpansion, fresh: &DigitExpansion, out: &mut Collector) {
    if stored == fresh {
        return;
    }
    let before = out.mismatches.len();
    for p in &plan.indices {
        let r = p.support_index();
        let got = stored.nonzero_digits().get(&r).cloned().unwrap_or_default();
        if got != p.digit.c {
            out.fail(Some(p.i), "digit", format!("c_{r} = {got}, planned {}", p.digit.c));
        }
    }
    let planned: Vec<u64> = plan.indices.iter().map(|p| p.support_index()).collect();
    for r in stored.nonzero_digits().keys() {
        if !planned.contains(r) {
            out.fail(None, "digit", format!("unplanned nonzero digit at {r}"));
        }
    }
    if out.mismatches.len() == before {
        out.fail(None, "digits", "sequence, depth or support bound differ from the plan");
    }
}

fn compare_checks(stored: &[IndexCheck], fresh: &[IndexCheck], out: &mut Collector) {
    if stored.len() != fresh.len() {
        out.fail(None, "checks", format!("{} stored, {} planned", stored.len(), fresh.len()));
        return;
    }
    for (s, f) in stored.iter().zip(fresh) {
        let i = Some(f.i);
        if (s.i, s.n, s.k) != (f.i, f.n, f.k) {
            out.fail(i, "check", "index data differ from the plan");
            continue;
        }
        if s.target != f.target || s.target_kind != f.target_kind {
            out.fail(i, "target", format!("stored {}, expected {}", s.target, f.target));
        }
        if !f.interval.is_subset_of(&s.interval) {
            out.fail(i, "interval", format!("stored {} is narrower than recomputed {}", s.interval, f.interval));
        } else if s.interval != f.interval {
            out.notes.push(format!("check {}: recomputed interval {} is tighter than stored {}", f.i, f.interval, s.interval));
        }
        if !f.norm.is_subset_of(&s.norm) {
            out.fail(i, "norm", format!("stored {} is narrower than recomputed {}", s.norm, f.norm));
        }
        if !f.pass {
            out.fail(i, "target", format!("{} misses {}", f.interval, f.target));
        }
        if s.pass != f.pass {
            out.fail(i, "pass", format!("stored {}, recomputed {}", s.pass, f.pass));
        }
    }
}

fn compare_blocks(stored: &[BlockCheck], fresh: &[BlockCheck], out: &mut Collector) {
    if stored.len() != fresh.len() {
        out.fail(None, "blocks", format!("{} stored, {} recomputed", stored.len(), fresh.len()));
        return;
    }
    for (s, f) in stored.iter().zip(fresh) {
        let i = Some(f.i);
        if (s.from, s.to, &s.bound) != (f.from, f.to, &f.bound) {
            out.fail(i, "block", "range or bound differ from the plan");
            continue;
        }
        if s.sum_upper < f.sum_upper {
            out.fail(
                i,
                "block",
                format!("stored sum {} is below recomputed {}", format_rational(&s.sum_upper), format_rational(&f.sum_upper)),
            );
        } else if s.sum_upper != f.sum_upper {
            out.notes.push(format!("block {}: recomputed sum is tighter than stored", f.i));
        }
        if !f.pass {
            out.fail(i, "block", "sum exceeds the bound");
        }
        if s.pass != f.pass {
            out.fail(i, "pass", format!("stored {}, recomputed {}", s.pass, f.pass));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{ArithmeticSequence, TermSequence};
    use crate::ideals::IdealDescriptor;
    use crate::witnesses::plan_witness;

    fn th6(a: &str, count: u64) -> WitnessCertificate {
        let a: TermSequence = a.parse().unwrap();
        let plan = plan_witness(Theorem::Th6, &ArithmeticSequence::dyadic(), &a, &IdealDescriptor::Density, count).unwrap();
        build_and_verify(&plan).unwrap()
    }

    #[test]
    fn dyadic_intervals() {
        let c = th6("2^n", 4);
        assert!(c.pass);
        let inner = RatInterval::new(rat(1, 2), rat(5, 8)).unwrap();
        for ch in &c.checks {
            assert!(ch.interval.is_subset_of(&inner), "{}", ch.interval);
            assert_eq!(ch.interval.lo(), &rat(1, 2));
        }
        assert_eq!(c.support.as_ref().unwrap().verdict.outcome, Outcome::Member);
        assert!(verify_certificate(&c).unwrap().pass);
    }

    #[test]
    fn empty_plan_passes() {
        let c = th6("2^n", 0);
        assert!(c.pass && c.checks.is_empty());
        assert!(verify_certificate(&c).unwrap().pass);
    }

    #[test]
    fn th2_and_th1() {
        let seq = ArithmeticSequence::dyadic();
        let a: TermSequence = "3*2^n".parse().unwrap();
        let plan = plan_witness(Theorem::Th2, &seq, &a, &IdealDescriptor::Density, 5).unwrap();
        let c = build_and_verify(&plan).unwrap();
        assert!(c.pass);
        assert!(c.checks.iter().all(|ch| ch.norm.lo() > &rat(1, 4)));
        assert_eq!(c.blocks.len(), 4);
        let plan = plan_witness(Theorem::Th1, &seq, &a, &IdealDescriptor::Density, 6).unwrap();
        let c = build_and_verify(&plan).unwrap();
        assert!(c.pass, "{:?}", c.blocks);
        assert!(verify_certificate(&c).unwrap().pass);
    }

    #[test]
    fn tampering_is_caught() {
        let c = th6("3*2^n", 5);
        let mut bad = c.clone();
        let p = &c.plan.indices[2];
        let mut digits = c.digits.nonzero_digits().clone();
        digits.insert(p.support_index(), BigUint::zero());
        bad.digits = DigitExpansion::new(c.digits.sequence().clone(), digits, c.digits.depth())
            .unwrap()
            .with_support_bound(c.digits.support_bound().unwrap().clone());
        let r = verify_certificate(&bad).unwrap();
        assert!(!r.pass);
        assert_eq!(r.mismatches[0].index, Some(3));

        let mut wide = c.clone();
        wide.checks[0].interval = RatInterval::new(rat(1, 4), rat(7, 8)).unwrap();
        let r = verify_certificate(&wide).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(!r.notes.is_empty());

        let mut narrow = c;
        narrow.checks[1].interval = RatInterval::point(rat(1, 2));
        let r = verify_certificate(&narrow).unwrap();
        assert!(!r.pass);
        assert_eq!(r.mismatches[0].index, Some(2));
    }
}
