//! Evidence for `‖a_n x‖ -> 0`, classically and along an ideal.

use serde::{Deserialize, Serialize};

use super::scan::{scan, Point, Precision, Route, Structural};
use crate::arith::{DigitExpansion, RatInterval, TermSequence};
use crate::error::{Error, Result};
use crate::ideals::{ideal_member, translation_invariant_in, IdealDescriptor, TracePoint, Verdict, DEFAULT_CUTOFF};
use crate::rational::{format_rational, rat, Rational};

pub const DEFAULT_DEPTH: u64 = 100_000;

/// Shift range probed alongside the symbolic translation-invariance rule.
const SHIFT_PROBE: u64 = 16;

pub fn default_epsilons() -> Vec<Rational> {
    vec![rat(1, 4), rat(1, 8), rat(1, 16), rat(1, 64)]
}

/// The exceptional set `E_ε = {n <= depth : ‖a_n x‖ >= ε}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsilonStats {
    #[serde(with = "crate::rational::serde_rat")]
    pub epsilon: Rational,
    /// Indices certainly in `E_ε`.
    pub exceptional: u64,
    /// Indices whose enclosure straddles `ε`.
    pub undecided: u64,
    pub last_exceptional: Option<u64>,
    /// Prefix densities of `E_ε` counting undecided indices as exceptional.
    pub densities: Vec<TracePoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub terms: TermSequence,
    pub depth: u64,
    pub route: Route,
    pub epsilons: Vec<EpsilonStats>,
    pub verdict: Verdict,
}

impl ConvergenceReport {
    pub fn stats(&self, eps: &Rational) -> Option<&EpsilonStats> {
        self.epsilons.iter().find(|s| &s.epsilon == eps)
    }

    /// Prefix density of `E_ε` at the full depth, undecided counted in.
    pub fn final_density(&self, eps: &Rational) -> Option<Rational> {
        self.stats(eps).map(|s| rat((s.exceptional + s.undecided) as i64, self.depth as i64))
    }
}

struct Tally {
    eps: Vec<Rational>,
    exceptional: Vec<u64>,
    undecided: Vec<u64>,
    last: Vec<Option<u64>>,
    densities: Vec<Vec<TracePoint>>,
    checkpoints: Vec<u64>,
    next: usize,
}

impl Tally {
    fn new(eps: &[Rational], depth: u64) -> Self {
        let m = eps.len();
        Tally {
            eps: eps.to_vec(),
            exceptional: vec![0; m],
            undecided: vec![0; m],
            last: vec![None; m],
            densities: vec![vec![]; m],
            checkpoints: crate::ideals::checkpoints(depth),
            next: 0,
        }
    }

    fn record(&mut self, n: u64, range: &RatInterval) {
        self.flush_before(n);
        for (i, e) in self.eps.iter().enumerate() {
            if range.lo() >= e {
                self.exceptional[i] += 1;
                self.last[i] = Some(n);
            } else if range.hi() >= e {
                self.undecided[i] += 1;
            }
        }
        self.flush_through(n);
    }

    fn flush_before(&mut self, n: u64) {
        if n > 0 {
            self.flush_through(n - 1);
        }
    }

    fn flush_through(&mut self, n: u64) {
        while self.next < self.checkpoints.len() && self.checkpoints[self.next] <= n {
            let cp = self.checkpoints[self.next];
            for i in 0..self.eps.len() {
                let d = rat((self.exceptional[i] + self.undecided[i]) as i64, cp as i64);
                self.densities[i].push(TracePoint { n: cp, value: format_rational(&d) });
            }
            self.next += 1;
        }
    }

    fn finish(mut self, depth: u64) -> Vec<EpsilonStats> {
        self.flush_through(depth);
        (0..self.eps.len())
            .map(|i| EpsilonStats {
                epsilon: self.eps[i].clone(),
                exceptional: self.exceptional[i],
                undecided: self.undecided[i],
                last_exceptional: self.last[i],
                densities: std::mem::take(&mut self.densities[i]),
            })
            .collect()
    }
}

fn validate_eps(eps: &[Rational]) -> Result<Vec<Rational>> {
    if eps.is_empty() {
        return Err(Error::Domain("at least one epsilon is required".into()));
    }
    if let Some(bad) = eps.iter().find(|e| **e <= rat(0, 1)) {
        return Err(Error::Domain(format!("epsilon must be positive, got {}", format_rational(bad))));
    }
    let mut v = eps.to_vec();
    v.sort();
    v.dedup();
    v.reverse();
    Ok(v)
}

fn run_scan(
    x: &Point,
    a: &TermSequence,
    depth: u64,
    eps: &[Rational],
) -> Result<(Vec<EpsilonStats>, Route, Option<Structural>)> {
    let eps = validate_eps(eps)?;
    let mut tally = Tally::new(&eps, depth);
    let outcome = scan(x, a, depth, Precision::Decide(&eps), |n, r| tally.record(n, r))?;
    let stats = tally.finish(depth);
    debug_assert!(stats.windows(2).all(|w| w[0].exceptional <= w[1].exceptional));
    Ok((stats, outcome.route, outcome.structural))
}

/// Evidence for `x ∈ t_(a_n)(T)`: `Member` only with a terminating pattern,
/// `NotMember` only with a periodic one.
pub fn classical_convergence(x: &Point, a: &TermSequence, depth: u64, eps: &[Rational]) -> Result<ConvergenceReport> {
    let (epsilons, route, structural) = run_scan(x, a, depth, eps)?;
    let verdict = match &structural {
        Some(s @ (Structural::Zero | Structural::Terminating { .. })) => Verdict::member(s.describe()),
        Some(s @ Structural::Periodic { .. }) => Verdict::not_member(s.describe()),
        None => Verdict::inconclusive("no structural pattern within the scanned depth").with_cutoff(depth),
    };
    Ok(ConvergenceReport { terms: a.clone(), depth, route, epsilons, verdict })
}

/// Evidence for `x ∈ t^I_(a_n)(T)` with the exceptional set `E_ε` traced.
pub fn ideal_convergence(
    x: &Point,
    a: &TermSequence,
    ideal: &IdealDescriptor,
    depth: u64,
    eps: &Rational,
) -> Result<Verdict> {
    let (stats, _, structural) = run_scan(x, a, depth, std::slice::from_ref(eps))?;
    let stats = &stats[0];
    let summary = format!(
        "E_{} has {} certain and {} undecided indices up to {depth}",
        format_rational(eps),
        stats.exceptional,
        stats.undecided
    );
    let decorate = |v: Verdict| v.with_cutoff(depth).with_trace(stats.densities.clone()).with_note(summary.clone());
    match &structural {
        Some(s @ (Structural::Zero | Structural::Terminating { .. })) => return Ok(decorate(Verdict::member(s.describe()))),
        // E_ε is cofinite for ε at most the minimal norm on the cycle, and no
        // ideal contains a cofinite set.
        Some(s @ Structural::Periodic { .. }) => return Ok(decorate(Verdict::not_member(s.describe()))),
        None => {}
    }
    if let Point::Expansion(e) = x {
        if &a.base == e.sequence() {
            let by_support = membership_by_support(e, ideal);
            if by_support.is_member() {
                return Ok(decorate(by_support));
            }
        }
    }
    Ok(decorate(Verdict::inconclusive("no certificate applies")))
}

/// Membership in `t^I_(u_n)(T)` from the support alone: an
/// `I`-translation-invariant support puts `x` in the subgroup.
pub fn membership_by_support(e: &DigitExpansion, ideal: &IdealDescriptor) -> Verdict {
    if e.support_bound().is_none() && !e.is_finite() {
        return Verdict::inconclusive("support beyond the stored digits is unknown");
    }
    let supp = e.support();
    let member = ideal_member(ideal, &supp, DEFAULT_CUTOFF);
    if !member.is_member() {
        return Verdict::inconclusive(format!("support {supp} is not a certified member of the {ideal} ideal"))
            .with_trace(member.trace);
    }
    match translation_invariant_in(ideal, &supp, SHIFT_PROBE) {
        Ok(v) if v.is_member() => Verdict::member(format!(
            "support-rule: supp ⊆ {supp}, {} and {}",
            member.certificate.unwrap_or_default(),
            v.certificate.unwrap_or_default()
        )),
        _ => Verdict::inconclusive(format!("support {supp} is not certified translation invariant")),
    }
}
