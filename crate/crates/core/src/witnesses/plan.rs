//! Greedy choice of the subsequence `(a_{n_i})` a witness is built on.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use super::digits::{digit_choice, unit_choice, DigitChoice};
use crate::arith::{ArithmeticSequence, Decomposition, TermSequence};
use crate::error::{Error, Result};
use crate::ideals::{non_snt_witness, IdealDescriptor, SetDescriptor};
use crate::thinsets::{weight_ideal_link, WeightRule};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Theorem {
    /// `{a_{n_i} x}` kept inside `[1/4, 7/8]` by a support in a
    /// translation invariant member of the ideal.
    Th6,
    /// As `Th6`, plus `Σ (1/j)|sin u_j πx|` bounded blockwise.
    Th1,
    /// `u_n = p^n`, unit digits, `‖a_{n_i} x‖ > (p-1)/p^2`.
    Th2,
}

impl Theorem {
    pub fn as_str(self) -> &'static str {
        match self {
            Theorem::Th6 => "th6",
            Theorem::Th1 => "th1",
            Theorem::Th2 => "th2",
        }
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Theorem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "th6" => Ok(Theorem::Th6),
            "th1" => Ok(Theorem::Th1),
            "th2" => Ok(Theorem::Th2),
            other => Err(Error::Domain(format!("unknown theorem tag `{other}` (expected th6, th1 or th2)"))),
        }
    }
}

/// A selected index `n` with `a_n = u_k · v`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Selected {
    pub n: u64,
    pub k: u64,
    #[serde(with = "crate::rational::serde_big")]
    pub v: BigUint,
}

impl Selected {
    pub fn decomposition(&self) -> Decomposition {
        Decomposition { k: self.k, v: self.v.clone() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlannedIndex {
    pub i: u64,
    pub n: u64,
    pub k: u64,
    #[serde(with = "crate::rational::serde_big")]
    pub v: BigUint,
    /// Digit placed at index `k + 1`.
    pub digit: DigitChoice,
}

impl PlannedIndex {
    pub fn decomposition(&self) -> Decomposition {
        Decomposition { k: self.k, v: self.v.clone() }
    }

    pub fn support_index(&self) -> u64 {
        self.k + 1
    }
}

/// Evidence that `k_n` keeps growing past the planned indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Absorption {
    pub rule: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<[u64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_k: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanOptions {
    /// The absorption window ends at this multiple of the last planned index.
    pub window_factor: u64,
    /// Candidates tried per selection when the terms are built on the sequence.
    pub max_scan_same_base: u64,
    /// Candidates tried per selection otherwise.
    pub max_scan_other: u64,
}

impl Default for PlanOptions {
    fn default() -> Self {
        PlanOptions { window_factor: 4, max_scan_same_base: 1 << 20, max_scan_other: 4096 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessPlan {
    pub theorem: Theorem,
    pub sequence: ArithmeticSequence,
    pub terms: TermSequence,
    pub ideal: IdealDescriptor,
    /// The infinite translation invariant member `A` of the ideal (th6, th1).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness_set: Option<SetDescriptor>,
    /// Weights of the summability checks (th1, th2).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<WeightRule>,
    pub count: u64,
    pub indices: Vec<PlannedIndex>,
    /// One more admissible index; its `k` bounds the tail of the last check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<Selected>,
    pub absorption: Absorption,
    pub log: Vec<String>,
}

impl WitnessPlan {
    /// `k` of the index after `idx`: the truncation point for check `idx`.
    pub fn next_k(&self, idx: usize) -> Option<u64> {
        match self.indices.get(idx + 1) {
            Some(p) => Some(p.k),
            None => self.horizon.as_ref().map(|h| h.k),
        }
    }

    /// Every selected index, the horizon included.
    pub fn selected(&self) -> Vec<Selected> {
        let mut out: Vec<Selected> =
            self.indices.iter().map(|p| Selected { n: p.n, k: p.k, v: p.v.clone() }).collect();
        out.extend(self.horizon.clone());
        out
    }
}

pub(crate) struct Requirements {
    pub witness_set: Option<SetDescriptor>,
    pub weights: Option<WeightRule>,
}

pub(crate) fn requirements(theorem: Theorem, seq: &ArithmeticSequence, ideal: &IdealDescriptor) -> Result<Requirements> {
    match theorem {
        Theorem::Th6 | Theorem::Th1 => {
            let a = non_snt_witness(ideal).ok_or_else(|| {
                Error::UnsupportedIdeal(format!(
                    "the {ideal} ideal has no infinite translation invariant member"
                ))
            })?;
            let weights = (theorem == Theorem::Th1).then(WeightRule::harmonic);
            Ok(Requirements { witness_set: Some(a), weights })
        }
        Theorem::Th2 => {
            if seq.geometric_base().is_none() {
                return Err(Error::Precondition(format!("th2 needs u_n = p^n, got {seq}")));
            }
            let r = WeightRule::harmonic();
            if !weight_ideal_link(&r, ideal).is_member() {
                return Err(Error::UnsupportedIdeal(format!(
                    "a finite sum of 1/n over A does not put A in the {ideal} ideal"
                )));
            }
            Ok(Requirements { witness_set: None, weights: Some(r) })
        }
    }
}

/// Least `k` the next selection may use, with a short reason.
pub(crate) fn growth_floor(theorem: Theorem, seq: &ArithmeticSequence, prev: &Selected) -> Result<(u64, String)> {
    match theorem {
        Theorem::Th6 | Theorem::Th1 => {
            // u_k >= 8 a_prev  <=>  u_k / u_{k_prev} >= 8 v_prev
            let target = &prev.v * 8u32;
            let mut w = BigUint::one();
            let mut k = prev.k;
            while w < target {
                k += 1;
                w *= seq.ratio(k);
            }
            Ok((k, format!("u_k >= 8 a_{}", prev.n)))
        }
        Theorem::Th2 => {
            let too_big = || Error::Precondition(format!("schedule past a_{} overflows", prev.n));
            let v = prev.v.to_u64().ok_or_else(too_big)?;
            let step = prev.n.checked_mul(2).and_then(|x| x.checked_add(1)).and_then(|x| x.checked_mul(v));
            let k = step.and_then(|s| s.checked_add(prev.k)).ok_or_else(too_big)?;
            Ok((k, format!("k >= k_prev + (2n_prev + 1) v_prev = {} + {}*{}", prev.k, 2 * prev.n + 1, v)))
        }
    }
}

/// The schedule `k_{n_i} >= 2^i` that makes `Σ 1/k_{n_i}` converge.
pub(crate) fn schedule_floor(theorem: Theorem, i: u64) -> Result<u64> {
    if theorem != Theorem::Th1 {
        return Ok(0);
    }
    1u64.checked_shl(i as u32)
        .filter(|_| i < 64)
        .ok_or_else(|| Error::Precondition(format!("schedule 2^{i} overflows")))
}

pub(crate) fn choose_digit(theorem: Theorem, seq: &ArithmeticSequence, s: &Selected) -> Result<DigitChoice> {
    let q = seq.ratio(s.k + 1);
    match theorem {
        Theorem::Th2 => unit_choice(&q, &s.v),
        _ => digit_choice(&q, &s.v),
    }
}

pub fn plan_witness(
    theorem: Theorem,
    seq: &ArithmeticSequence,
    a: &TermSequence,
    ideal: &IdealDescriptor,
    count: u64,
) -> Result<WitnessPlan> {
    plan_witness_with(theorem, seq, a, ideal, count, &PlanOptions::default())
}

pub fn plan_witness_with(
    theorem: Theorem,
    seq: &ArithmeticSequence,
    a: &TermSequence,
    ideal: &IdealDescriptor,
    count: u64,
    opts: &PlanOptions,
) -> Result<WitnessPlan> {
    let req = requirements(theorem, seq, ideal)?;
    let same_base = &a.base == seq;
    let budget = if same_base { opts.max_scan_same_base } else { opts.max_scan_other };
    let want = if count == 0 { 0 } else { count + 1 };
    let mut picked: Vec<Selected> = vec![];
    let mut log = vec![];
    while (picked.len() as u64) < want {
        let i = picked.len() as u64 + 1;
        let (n_from, mut k_min, mut why) = match picked.last() {
            None => (1, 0, vec![]),
            Some(p) => {
                let (k, reason) = growth_floor(theorem, seq, p)?;
                (p.n + 1, k, vec![reason])
            }
        };
        let sched = schedule_floor(theorem, i)?;
        if sched > 0 {
            why.push(format!("k >= 2^{i}"));
            k_min = k_min.max(sched);
        }
        let s = select(seq, a, req.witness_set.as_ref(), n_from, k_min, budget)?;
        if req.witness_set.is_some() {
            why.push("k in A".into());
        }
        let role = if i > count { "horizon" } else { "index" };
        log.push(format!(
            "{role} {i}: n = {}, k = {}, v = {}; k >= {k_min}{}{}",
            s.n,
            s.k,
            s.v,
            if why.is_empty() { "" } else { " from " },
            why.join(", ")
        ));
        picked.push(s);
    }
    let horizon = if want > 0 { picked.pop() } else { None };
    let indices = picked
        .iter()
        .enumerate()
        .map(|(idx, s)| {
            Ok(PlannedIndex {
                i: idx as u64 + 1,
                n: s.n,
                k: s.k,
                v: s.v.clone(),
                digit: choose_digit(theorem, seq, s)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let last_n = horizon.as_ref().map_or(0, |h| h.n);
    let absorption = absorption(seq, a, last_n, opts);
    Ok(WitnessPlan {
        theorem,
        sequence: seq.clone(),
        terms: a.clone(),
        ideal: ideal.clone(),
        witness_set: req.witness_set,
        weights: req.weights,
        count,
        indices,
        horizon,
        absorption,
        log,
    })
}

/// Least `n >= n_from` with `k_n >= k_min` and `k_n` in `set`.
fn select(
    seq: &ArithmeticSequence,
    a: &TermSequence,
    set: Option<&SetDescriptor>,
    n_from: u64,
    k_min: u64,
    budget: u64,
) -> Result<Selected> {
    let a_star = match set {
        Some(s) => s.next_element(k_min)?.ok_or_else(|| Error::WindowExhausted {
            from: n_from,
            to: n_from,
            reason: format!("the witness set has no element >= {k_min}"),
        })?,
        None => k_min,
    };
    let start = n_from.max(a.first_candidate(a_star, seq));
    let end = start.saturating_add(budget.saturating_sub(1));
    let mut max_k = 0;
    for n in start..=end {
        let d = a.decompose_at(n, seq);
        max_k = max_k.max(d.k);
        let in_set = match set {
            Some(s) => s.contains(d.k)?,
            None => true,
        };
        if d.k >= k_min && in_set {
            return Ok(Selected { n, k: d.k, v: d.v });
        }
    }
    if max_k < a_star {
        Err(Error::NotAbsorbing { from: start, to: end, max_k })
    } else {
        Err(Error::WindowExhausted { from: start, to: end, reason: format!("no k_n >= {k_min} in the witness set") })
    }
}

fn absorption(seq: &ArithmeticSequence, a: &TermSequence, last_n: u64, opts: &PlanOptions) -> Absorption {
    if &a.base == seq {
        return Absorption { rule: "u_n divides a_n, so k_n >= n".into(), window: None, min_k: None };
    }
    let from = last_n + 1;
    let to = last_n.saturating_mul(opts.window_factor).max(from).min(from.saturating_add(opts.max_scan_other));
    let min_k = (from..=to).map(|n| a.decompose_at(n, seq).k).min();
    Absorption { rule: "smallest k_n on the scan window".into(), window: Some([from, to]), min_k }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dyadic() -> ArithmeticSequence {
        ArithmeticSequence::dyadic()
    }

    #[test]
    fn th6_dyadic_plan() {
        let a: TermSequence = "2^n".parse().unwrap();
        let p = plan_witness(Theorem::Th6, &dyadic(), &a, &IdealDescriptor::Density, 4).unwrap();
        let ks: Vec<u64> = p.indices.iter().map(|x| x.k).collect();
        assert_eq!(ks, vec![2, 8, 16, 32]);
        assert_eq!(p.horizon.as_ref().unwrap().k, 64);
        for x in &p.indices {
            assert_eq!(x.v, BigUint::one());
            assert_eq!(x.digit.l, BigUint::one());
        }
    }

    #[test]
    fn th6_scaled_plan_meets_growth() {
        let a: TermSequence = "3*2^n".parse().unwrap();
        let p = plan_witness(Theorem::Th6, &dyadic(), &a, &IdealDescriptor::Density, 8).unwrap();
        let sel = p.selected();
        for w in sel.windows(2) {
            assert!(w[0].k.is_power_of_two() && w[1].k.is_power_of_two());
            // 2^{k'} >= 24 · 2^k
            assert!(w[1].k >= w[0].k + 5);
        }
    }

    #[test]
    fn fin_is_rejected() {
        let a: TermSequence = "2^n".parse().unwrap();
        let err = plan_witness(Theorem::Th6, &dyadic(), &a, &IdealDescriptor::Fin, 3).unwrap_err();
        assert!(matches!(err, Error::UnsupportedIdeal(_)));
    }

    #[test]
    fn bounded_k_is_not_absorbing() {
        let a: TermSequence = "3^n".parse().unwrap();
        let err = plan_witness(Theorem::Th6, &dyadic(), &a, &IdealDescriptor::Density, 2).unwrap_err();
        assert!(matches!(err, Error::NotAbsorbing { max_k: 0, .. }), "{err:?}");
    }

    #[test]
    fn th2_schedule() {
        let seq = ArithmeticSequence::geometric(3).unwrap();
        let a: TermSequence = "2*3^n".parse().unwrap();
        let p = plan_witness(Theorem::Th2, &seq, &a, &IdealDescriptor::Density, 4).unwrap();
        let ks: Vec<u64> = p.selected().iter().map(|s| s.k).collect();
        assert_eq!(ks, vec![1, 7, 37, 187, 937]);
        assert!(p.indices.iter().all(|x| x.digit.c == BigUint::one()));
        assert!(plan_witness(Theorem::Th2, &dyadic(), &"3^n".parse().unwrap(), &IdealDescriptor::Density, 2).is_err());
        assert!(plan_witness(Theorem::Th2, &seq, &a, &IdealDescriptor::Fin, 2).is_err());
    }

    #[test]
    fn th1_schedule() {
        let a: TermSequence = "2^n".parse().unwrap();
        let p = plan_witness(Theorem::Th1, &dyadic(), &a, &IdealDescriptor::Density, 5).unwrap();
        for (i, s) in p.selected().iter().enumerate() {
            assert!(s.k >= 1 << (i + 1));
        }
    }

    #[test]
    fn empty_plan() {
        let a: TermSequence = "2^n".parse().unwrap();
        let p = plan_witness(Theorem::Th6, &dyadic(), &a, &IdealDescriptor::Density, 0).unwrap();
        assert!(p.indices.is_empty() && p.horizon.is_none());
    }
}
