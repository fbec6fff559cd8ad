//! The three concrete ideals on `N`: finite sets, density-zero sets and
//! sets with `Σ_{m in A} m^{-s} < ∞`.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::sets::SetDescriptor;
use super::verdict::{TracePoint, Verdict};
use crate::error::{Error, ParseError, Result};
use crate::rational::{format_rational, parse_rational, rat, Rational};

pub const DEFAULT_CUTOFF: u64 = 100_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", try_from = "IdealRepr", into = "IdealRepr")]
pub enum IdealDescriptor {
    Fin,
    Density,
    /// `{A : Σ_{m in A} m^{-s} < ∞}` with `0 < s <= 1`.
    Summable { exponent: Rational },
}

impl IdealDescriptor {
    pub fn summable(exponent: Rational) -> Result<Self> {
        if !exponent.is_positive() || exponent > Rational::one() {
            return Err(Error::Domain(format!(
                "summable exponent must lie in (0, 1], got {}",
                format_rational(&exponent)
            )));
        }
        Ok(IdealDescriptor::Summable { exponent })
    }

    /// The summable ideal of `1/n`.
    pub fn harmonic() -> Self {
        IdealDescriptor::Summable { exponent: Rational::one() }
    }
}

impl fmt::Display for IdealDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IdealDescriptor::Fin => f.write_str("fin"),
            IdealDescriptor::Density => f.write_str("density"),
            IdealDescriptor::Summable { exponent } if exponent.is_one() => f.write_str("summable"),
            IdealDescriptor::Summable { exponent } => write!(f, "summable:{}", format_rational(exponent)),
        }
    }
}

impl FromStr for IdealDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(ParseError::Ideal(s.to_string()));
        match s.trim().to_ascii_lowercase().as_str() {
            "fin" => Ok(IdealDescriptor::Fin),
            "density" => Ok(IdealDescriptor::Density),
            "summable" => Ok(IdealDescriptor::harmonic()),
            other => {
                let e = other.strip_prefix("summable:").ok_or_else(bad)?;
                IdealDescriptor::summable(parse_rational(e).map_err(|_| bad())?).map_err(|_| bad())
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum IdealRepr {
    Fin,
    Density,
    Summable {
        #[serde(with = "crate::rational::serde_rat", default = "Rational::one")]
        exponent: Rational,
    },
}

impl From<IdealDescriptor> for IdealRepr {
    fn from(i: IdealDescriptor) -> Self {
        match i {
            IdealDescriptor::Fin => IdealRepr::Fin,
            IdealDescriptor::Density => IdealRepr::Density,
            IdealDescriptor::Summable { exponent } => IdealRepr::Summable { exponent },
        }
    }
}

impl TryFrom<IdealRepr> for IdealDescriptor {
    type Error = Error;

    fn try_from(r: IdealRepr) -> Result<Self> {
        match r {
            IdealRepr::Fin => Ok(IdealDescriptor::Fin),
            IdealRepr::Density => Ok(IdealDescriptor::Density),
            IdealRepr::Summable { exponent } => IdealDescriptor::summable(exponent),
        }
    }
}

/// Running bounds on `|A ∩ [1,n]| / n` over the tail window `[N/2, N]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityEstimate {
    pub cutoff: u64,
    #[serde(with = "crate::rational::serde_rat")]
    pub lower: Rational,
    #[serde(with = "crate::rational::serde_rat")]
    pub upper: Rational,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "crate::rational::serde_opt_rat")]
    pub exact: Option<Rational>,
}

/// `|A ∩ [1,N]| / N`.
pub fn prefix_density(s: &SetDescriptor, n: u64) -> Result<Rational> {
    if n == 0 {
        return Err(Error::Domain("prefix density needs N >= 1".into()));
    }
    Ok(rat(s.count_upto(n)? as i64, n as i64))
}

pub fn density_estimate(s: &SetDescriptor, n: u64) -> Result<DensityEstimate> {
    if n == 0 {
        return Err(Error::Domain("density estimate needs N >= 1".into()));
    }
    let elems = s.elements_upto(n)?;
    let start = (n / 2).max(1);
    let mut count = elems.partition_point(|&m| m < start) as i64;
    let mut idx = count as usize;
    let mut lower: Option<Rational> = None;
    let mut upper: Option<Rational> = None;
    for m in start..=n {
        while idx < elems.len() && elems[idx] <= m {
            idx += 1;
            count += 1;
        }
        let r = rat(count, m as i64);
        if lower.as_ref().map_or(true, |l| &r < l) {
            lower = Some(r.clone());
        }
        if upper.as_ref().map_or(true, |u| &r > u) {
            upper = Some(r);
        }
    }
    Ok(DensityEstimate {
        cutoff: n,
        lower: lower.unwrap_or_else(Rational::zero),
        upper: upper.unwrap_or_else(Rational::zero),
        exact: s.exact_density(),
    })
}

/// Decade checkpoints `10, 100, ...` below `cutoff`, plus `cutoff` itself.
pub(crate) fn checkpoints(cutoff: u64) -> Vec<u64> {
    let mut out = vec![];
    let mut c = 10u64;
    while c < cutoff {
        out.push(c);
        c = c.saturating_mul(10);
    }
    out.push(cutoff.max(1));
    out
}

fn density_trace(s: &SetDescriptor, cutoff: u64) -> (Vec<TracePoint>, Option<String>) {
    let mut trace = vec![];
    for n in checkpoints(cutoff) {
        match prefix_density(s, n) {
            Ok(d) => trace.push(TracePoint { n, value: format_rational(&d) }),
            Err(Error::Exhausted { cutoff, partial }) => {
                return (trace, Some(format!("generator exhausted at {cutoff} after {partial} elements")))
            }
            Err(e) => return (trace, Some(e.to_string())),
        }
    }
    (trace, None)
}

fn power_sum_trace(s: &SetDescriptor, exponent: &Rational, cutoff: u64) -> (Vec<TracePoint>, Option<String>) {
    let e = exponent.to_f64().unwrap_or(1.0);
    let mut trace = vec![];
    let mut total = 0.0f64;
    let mut last = 0u64;
    for n in checkpoints(cutoff) {
        let elems = match s.elements_upto(n) {
            Ok(v) => v,
            Err(Error::Exhausted { cutoff, partial }) => {
                return (trace, Some(format!("generator exhausted at {cutoff} after {partial} elements")))
            }
            Err(err) => return (trace, Some(err.to_string())),
        };
        for &m in elems.iter().filter(|&&m| m > last) {
            total += (m as f64).powf(-e);
        }
        last = n;
        trace.push(TracePoint { n, value: format!("{total:.6}") });
    }
    (trace, None)
}

pub fn ideal_member(ideal: &IdealDescriptor, s: &SetDescriptor, cutoff: u64) -> Verdict {
    match ideal {
        IdealDescriptor::Fin => match s.is_finite() {
            Some(true) => Verdict::member("finite-descriptor"),
            Some(false) => Verdict::not_member("infinite-descriptor"),
            None => {
                let (trace, note) = density_trace(s, cutoff);
                Verdict::inconclusive(note.unwrap_or_else(|| "finiteness not certified".into()))
                    .with_cutoff(cutoff)
                    .with_trace(trace)
            }
        },
        IdealDescriptor::Density => match s.exact_density() {
            Some(d) if d.is_zero() => Verdict::member("exact-density-zero"),
            Some(d) => Verdict::not_member(format!("exact-density {}", format_rational(&d))),
            None => {
                let (trace, note) = density_trace(s, cutoff);
                Verdict::inconclusive(note.unwrap_or_else(|| "density not certified; prefix densities only".into()))
                    .with_cutoff(cutoff)
                    .with_trace(trace)
            }
        },
        IdealDescriptor::Summable { exponent } => match s.power_sum_converges(exponent) {
            Some(true) => Verdict::member("power-sum-convergent"),
            Some(false) => Verdict::not_member("power-sum-divergent"),
            None => {
                let (trace, note) = power_sum_trace(s, exponent, cutoff);
                Verdict::inconclusive(note.unwrap_or_else(|| "convergence not certified; partial sums only".into()))
                    .with_cutoff(cutoff)
                    .with_trace(trace)
            }
        },
    }
}

/// Whether every shift `A + t` stays in the ideal.
///
/// Errors unless `A` itself is a certified member.
pub fn translation_invariant_in(ideal: &IdealDescriptor, s: &SetDescriptor, shift_range: u64) -> Result<Verdict> {
    let base = ideal_member(ideal, s, DEFAULT_CUTOFF);
    if !base.is_member() {
        return Err(Error::Precondition(format!("{s} is not a certified member of the {ideal} ideal")));
    }
    // Each rule below applies to every member, so any certified member is
    // translation invariant.
    let rule = match ideal {
        IdealDescriptor::Fin => "finite-shift",
        IdealDescriptor::Density => "density-shift-invariance",
        IdealDescriptor::Summable { .. } => "summable-limit-comparison",
    };
    let r = shift_range.min(i64::MAX as u64) as i64;
    for t in [-r, r] {
        let shifted = s.shift(t);
        if ideal_member(ideal, &shifted, DEFAULT_CUTOFF).is_not_member() {
            return Err(Error::Precondition(format!("shift by {t} leaves the ideal, rule {rule} misapplied")));
        }
    }
    Ok(Verdict::member(rule))
}

/// An infinite, translation-invariant member, when the ideal has one.
pub fn non_snt_witness(ideal: &IdealDescriptor) -> Option<SetDescriptor> {
    match ideal {
        IdealDescriptor::Fin => None,
        IdealDescriptor::Density | IdealDescriptor::Summable { .. } => Some(SetDescriptor::geometric(2)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ideals::Outcome;

    #[test]
    fn prefix_density_examples() {
        assert_eq!(prefix_density(&SetDescriptor::evens(), 10).unwrap(), rat(1, 2));
        assert_eq!(prefix_density(&SetDescriptor::finite(vec![1, 2, 3]), 100).unwrap(), rat(3, 100));
        assert_eq!(prefix_density(&SetDescriptor::geometric(2), 1024).unwrap(), rat(10, 1024));
        assert!(prefix_density(&SetDescriptor::evens(), 0).is_err());
    }

    #[test]
    fn estimate_brackets() {
        let e = density_estimate(&SetDescriptor::progression(5, 3), 1000).unwrap();
        assert!(e.lower <= e.upper);
        assert!(e.lower <= rat(1, 3) && rat(1, 3) <= e.upper + rat(1, 100));
        assert_eq!(e.exact, Some(rat(1, 3)));
    }

    #[test]
    fn member_examples() {
        let g = SetDescriptor::geometric(2);
        assert_eq!(ideal_member(&IdealDescriptor::Density, &g, 1000).outcome, Outcome::Member);
        assert_eq!(ideal_member(&IdealDescriptor::Density, &SetDescriptor::evens(), 1000).outcome, Outcome::NotMember);
        assert_eq!(ideal_member(&IdealDescriptor::Fin, &g, 1000).outcome, Outcome::NotMember);
        let h = IdealDescriptor::harmonic();
        assert_eq!(ideal_member(&h, &g, 1000).outcome, Outcome::Member);
        assert_eq!(ideal_member(&h, &SetDescriptor::evens(), 1000).outcome, Outcome::NotMember);
        let sq = IdealDescriptor::summable(rat(1, 2)).unwrap();
        assert_eq!(ideal_member(&sq, &SetDescriptor::powers(2), 1000).outcome, Outcome::NotMember);
        assert_eq!(ideal_member(&sq, &SetDescriptor::powers(3), 1000).outcome, Outcome::Member);
        let listed = SetDescriptor::listed(vec![1, 4, 9, 16, 25, 36, 49, 64, 81, 100]).unwrap();
        let v = ideal_member(&IdealDescriptor::Density, &listed, 1000);
        assert_eq!(v.outcome, Outcome::Inconclusive);
        assert_eq!(v.trace.len(), 2);
        assert!(v.note.unwrap().contains("exhausted"));
    }

    #[test]
    fn invariance_examples() {
        let g = SetDescriptor::geometric(2);
        assert!(translation_invariant_in(&IdealDescriptor::Density, &g, 50).unwrap().is_member());
        assert!(translation_invariant_in(&IdealDescriptor::Fin, &SetDescriptor::finite(vec![4, 9]), 5)
            .unwrap()
            .is_member());
        assert!(translation_invariant_in(&IdealDescriptor::harmonic(), &g, 10).unwrap().is_member());
        assert!(matches!(
            translation_invariant_in(&IdealDescriptor::Density, &SetDescriptor::evens(), 3),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn witnesses_for_non_snt_ideals() {
        assert_eq!(non_snt_witness(&IdealDescriptor::Fin), None);
        for i in [IdealDescriptor::Density, IdealDescriptor::harmonic()] {
            let w = non_snt_witness(&i).unwrap();
            assert_eq!(w, SetDescriptor::geometric(2));
            assert_eq!(w.is_finite(), Some(false));
            assert!(ideal_member(&i, &w, 1000).is_member());
            assert!(translation_invariant_in(&i, &w, 10).unwrap().is_member());
        }
    }

    #[test]
    fn ideal_specs() {
        assert_eq!("density".parse::<IdealDescriptor>().unwrap(), IdealDescriptor::Density);
        assert_eq!("summable:1/2".parse::<IdealDescriptor>().unwrap().to_string(), "summable:1/2");
        assert!("summable:2".parse::<IdealDescriptor>().is_err());
        assert!("nope".parse::<IdealDescriptor>().is_err());
        let j = serde_json::to_string(&IdealDescriptor::harmonic()).unwrap();
        assert_eq!(j, r#"{"kind":"summable","exponent":"1"}"#);
        assert_eq!(serde_json::from_str::<IdealDescriptor>(r#"{"kind":"fin"}"#).unwrap(), IdealDescriptor::Fin);
        assert!(serde_json::from_str::<IdealDescriptor>(r#"{"kind":"summable","exponent":"0"}"#).is_err());
    }
}
