//! Symbolic subsets of `N = {1, 2, 3, ...}`.

use std::collections::BTreeSet;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{rat, Rational};

/// Largest period we are willing to enumerate residues over when merging
/// progressions.
const MAX_UNION_MODULUS: u64 = 1_000_000;

/// How fast an enumerated set grows; `Superlinear` certifies density zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Growth {
    Superlinear,
    Linear {
        #[serde(with = "crate::rational::serde_rat")]
        rate: Rational,
    },
    Unknown,
}

/// Generators for [`SetDescriptor::Enumerated`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnumRule {
    /// `{m^e : m >= 1}`.
    Powers { exponent: u32 },
    /// An observed prefix of some increasing sequence; asking for elements
    /// past the last listed value exhausts the generator.
    Listed { values: Vec<u64> },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", try_from = "SetRepr", into = "SetRepr")]
pub enum SetDescriptor {
    Finite { elements: Vec<u64> },
    Progression { start: u64, step: u64 },
    /// `{b^k : k >= 1}`.
    Geometric { base: u64 },
    /// `{m + offset : m in inner} ∩ N`.
    Shifted { inner: Box<SetDescriptor>, offset: i64 },
    Union { parts: Vec<SetDescriptor> },
    Enumerated { rule: EnumRule, growth: Growth },
}

/// Asymptotic shape used for exact density: either density zero, or
/// eventually periodic with the given residues.
enum Shape {
    Null,
    Periodic { modulus: u64, residues: BTreeSet<u64> },
    Unknown,
}

impl SetDescriptor {
    pub fn finite(mut elements: Vec<u64>) -> Self {
        elements.retain(|&m| m >= 1);
        elements.sort_unstable();
        elements.dedup();
        SetDescriptor::Finite { elements }
    }

    pub fn progression(start: u64, step: u64) -> Self {
        SetDescriptor::Progression { start: start.max(1), step: step.max(1) }
    }

    pub fn geometric(base: u64) -> Self {
        SetDescriptor::Geometric { base: base.max(2) }
    }

    pub fn evens() -> Self {
        Self::progression(2, 2)
    }

    pub fn naturals() -> Self {
        Self::progression(1, 1)
    }

    pub fn shifted(inner: SetDescriptor, offset: i64) -> Self {
        SetDescriptor::Shifted { inner: Box::new(inner), offset }
    }

    pub fn union(parts: Vec<SetDescriptor>) -> Self {
        SetDescriptor::Union { parts }
    }

    pub fn powers(exponent: u32) -> Self {
        let exponent = exponent.max(1);
        let growth = if exponent >= 2 { Growth::Superlinear } else { Growth::Linear { rate: rat(1, 1) } };
        SetDescriptor::Enumerated { rule: EnumRule::Powers { exponent }, growth }
    }

    pub fn listed(values: Vec<u64>) -> Result<Self> {
        let d = SetDescriptor::Enumerated { rule: EnumRule::Listed { values }, growth: Growth::Unknown };
        d.validate()?;
        Ok(d)
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSet(m));
        match self {
            SetDescriptor::Finite { elements } => {
                if elements.first() == Some(&0) || elements.windows(2).any(|w| w[0] >= w[1]) {
                    return bad("finite elements must be positive and strictly increasing".into());
                }
            }
            SetDescriptor::Progression { start, step } => {
                if *start == 0 || *step == 0 {
                    return bad("progression needs start >= 1 and step >= 1".into());
                }
            }
            SetDescriptor::Geometric { base } => {
                if *base < 2 {
                    return bad("geometric base must be >= 2".into());
                }
            }
            SetDescriptor::Shifted { inner, .. } => inner.validate()?,
            SetDescriptor::Union { parts } => {
                for p in parts {
                    p.validate()?;
                }
            }
            SetDescriptor::Enumerated { rule, growth } => match rule {
                EnumRule::Powers { exponent } => {
                    let ok = match growth {
                        Growth::Unknown => *exponent >= 1,
                        Growth::Superlinear => *exponent >= 2,
                        Growth::Linear { rate } => *exponent == 1 && *rate == rat(1, 1),
                    };
                    if !ok {
                        return bad(format!("growth {growth:?} does not hold for powers^{exponent}"));
                    }
                }
                EnumRule::Listed { values } => {
                    if values.first() == Some(&0) || values.windows(2).any(|w| w[0] >= w[1]) {
                        return bad("listed values must be positive and strictly increasing".into());
                    }
                    if *growth != Growth::Unknown {
                        return bad("a listed prefix cannot carry a growth certificate".into());
                    }
                }
            },
        }
        Ok(())
    }

    /// Sorted elements `<= n`.
    pub fn elements_upto(&self, n: u64) -> Result<Vec<u64>> {
        Ok(match self {
            SetDescriptor::Finite { elements } => elements.iter().copied().take_while(|&m| m <= n).collect(),
            SetDescriptor::Progression { start, step } => {
                if *start > n {
                    vec![]
                } else {
                    (*start..=n).step_by(*step as usize).collect()
                }
            }
            SetDescriptor::Geometric { base } => {
                let mut out = vec![];
                let mut p = *base;
                while p <= n {
                    out.push(p);
                    match p.checked_mul(*base) {
                        Some(next) => p = next,
                        None => break,
                    }
                }
                out
            }
            SetDescriptor::Shifted { inner, offset } => {
                let limit = shift_limit(n, *offset);
                inner
                    .elements_upto(limit)
                    .map_err(|e| match e {
                        Error::Exhausted { partial, .. } => Error::Exhausted { cutoff: n, partial },
                        other => other,
                    })?
                    .into_iter()
                    .filter_map(|m| shift_elem(m, *offset))
                    .filter(|&m| m <= n)
                    .collect()
            }
            SetDescriptor::Union { parts } => {
                let mut all = BTreeSet::new();
                for p in parts {
                    all.extend(p.elements_upto(n)?);
                }
                all.into_iter().collect()
            }
            SetDescriptor::Enumerated { rule, .. } => match rule {
                EnumRule::Powers { exponent } => {
                    let mut out = vec![];
                    for m in 1u64.. {
                        match m.checked_pow(*exponent) {
                            Some(p) if p <= n => out.push(p),
                            _ => break,
                        }
                    }
                    out
                }
                EnumRule::Listed { values } => {
                    let out: Vec<u64> = values.iter().copied().take_while(|&m| m <= n).collect();
                    if values.last().map_or(true, |&last| last < n) {
                        return Err(Error::Exhausted { cutoff: n, partial: out.len() as u64 });
                    }
                    out
                }
            },
        })
    }

    pub fn count_upto(&self, n: u64) -> Result<u64> {
        Ok(self.elements_upto(n)?.len() as u64)
    }

    pub fn contains(&self, m: u64) -> Result<bool> {
        if m == 0 {
            return Ok(false);
        }
        Ok(match self {
            SetDescriptor::Finite { elements } => elements.binary_search(&m).is_ok(),
            SetDescriptor::Progression { start, step } => m >= *start && (m - start) % step == 0,
            SetDescriptor::Geometric { base } => {
                let mut p = *base;
                loop {
                    if p == m {
                        break true;
                    }
                    if p > m / base {
                        break false;
                    }
                    p *= base;
                }
            }
            SetDescriptor::Shifted { inner, offset } => {
                let src = m as i128 - *offset as i128;
                src >= 1 && src <= u64::MAX as i128 && inner.contains(src as u64)?
            }
            SetDescriptor::Union { parts } => {
                for p in parts {
                    if p.contains(m)? {
                        return Ok(true);
                    }
                }
                false
            }
            SetDescriptor::Enumerated { rule, .. } => match rule {
                EnumRule::Powers { exponent } => {
                    let root = (m as f64).powf(1.0 / *exponent as f64).round() as u64;
                    (root.saturating_sub(1)..=root + 1).any(|r| r.checked_pow(*exponent) == Some(m))
                }
                EnumRule::Listed { values } => {
                    if values.last().map_or(true, |&last| last < m) {
                        return Err(Error::Exhausted { cutoff: m, partial: values.len() as u64 });
                    }
                    values.binary_search(&m).is_ok()
                }
            },
        })
    }

    /// Smallest element `>= m`, `None` when there is none.
    pub fn next_element(&self, m: u64) -> Result<Option<u64>> {
        let m = m.max(1);
        Ok(match self {
            SetDescriptor::Finite { elements } => elements.iter().copied().find(|&e| e >= m),
            SetDescriptor::Progression { start, step } => {
                if m <= *start {
                    Some(*start)
                } else {
                    let j = (m - start).div_ceil(*step);
                    j.checked_mul(*step).and_then(|x| x.checked_add(*start))
                }
            }
            SetDescriptor::Geometric { base } => {
                let mut p = *base;
                loop {
                    if p >= m {
                        break Some(p);
                    }
                    match p.checked_mul(*base) {
                        Some(next) => p = next,
                        None => break None,
                    }
                }
            }
            SetDescriptor::Shifted { inner, offset } => {
                let from = (m as i128 - *offset as i128).max(1);
                if from > u64::MAX as i128 {
                    None
                } else {
                    inner.next_element(from as u64)?.and_then(|e| shift_elem(e, *offset))
                }
            }
            SetDescriptor::Union { parts } => {
                let mut best: Option<u64> = None;
                for p in parts {
                    if let Some(e) = p.next_element(m)? {
                        best = Some(best.map_or(e, |b| b.min(e)));
                    }
                }
                best
            }
            SetDescriptor::Enumerated { rule, .. } => match rule {
                EnumRule::Powers { exponent } => {
                    let mut r = ((m as f64).powf(1.0 / *exponent as f64).floor() as u64).max(2) - 1;
                    loop {
                        match r.checked_pow(*exponent) {
                            Some(p) if p >= m => break Some(p),
                            Some(_) => r += 1,
                            None => break None,
                        }
                    }
                }
                EnumRule::Listed { values } => match values.iter().copied().find(|&e| e >= m) {
                    Some(e) => Some(e),
                    None => return Err(Error::Exhausted { cutoff: m, partial: values.len() as u64 }),
                },
            },
        })
    }

    /// `Some(true)` when provably finite, `Some(false)` when provably
    /// infinite.
    pub fn is_finite(&self) -> Option<bool> {
        match self {
            SetDescriptor::Finite { .. } => Some(true),
            SetDescriptor::Progression { .. } | SetDescriptor::Geometric { .. } => Some(false),
            SetDescriptor::Shifted { inner, .. } => inner.is_finite(),
            SetDescriptor::Union { parts } => {
                let verdicts: Vec<Option<bool>> = parts.iter().map(|p| p.is_finite()).collect();
                if verdicts.contains(&Some(false)) {
                    Some(false)
                } else if verdicts.iter().all(|v| *v == Some(true)) {
                    Some(true)
                } else {
                    None
                }
            }
            SetDescriptor::Enumerated { rule, .. } => match rule {
                EnumRule::Powers { .. } => Some(false),
                EnumRule::Listed { .. } => None,
            },
        }
    }

    /// Natural density when it is certified to exist.
    pub fn exact_density(&self) -> Option<Rational> {
        match self.shape() {
            Shape::Null => Some(rat(0, 1)),
            Shape::Periodic { modulus, residues } => Some(rat(residues.len() as i64, modulus as i64)),
            Shape::Unknown => None,
        }
    }

    fn shape(&self) -> Shape {
        match self {
            SetDescriptor::Finite { .. } | SetDescriptor::Geometric { .. } => Shape::Null,
            SetDescriptor::Progression { start, step } => Shape::Periodic {
                modulus: *step,
                residues: [start % step].into_iter().collect(),
            },
            SetDescriptor::Shifted { inner, offset } => match inner.shape() {
                Shape::Periodic { modulus, residues } => Shape::Periodic {
                    modulus,
                    residues: residues
                        .into_iter()
                        .map(|r| (r as i128 + *offset as i128).rem_euclid(modulus as i128) as u64)
                        .collect(),
                },
                other => other,
            },
            SetDescriptor::Union { parts } => {
                let mut acc = Shape::Null;
                for p in parts {
                    acc = match (acc, p.shape()) {
                        (Shape::Unknown, _) | (_, Shape::Unknown) => return Shape::Unknown,
                        (Shape::Null, s) | (s, Shape::Null) => s,
                        (
                            Shape::Periodic { modulus: m1, residues: r1 },
                            Shape::Periodic { modulus: m2, residues: r2 },
                        ) => {
                            let l = m1.lcm(&m2);
                            if l > MAX_UNION_MODULUS {
                                return Shape::Unknown;
                            }
                            let residues = (0..l)
                                .filter(|x| r1.contains(&(x % m1)) || r2.contains(&(x % m2)))
                                .collect();
                            Shape::Periodic { modulus: l, residues }
                        }
                    };
                }
                acc
            }
            SetDescriptor::Enumerated { growth, .. } => match growth {
                Growth::Superlinear => Shape::Null,
                Growth::Linear { .. } => Shape::Periodic { modulus: 1, residues: [0].into_iter().collect() },
                Growth::Unknown => Shape::Unknown,
            },
        }
    }

    /// Convergence of `Σ_{m in A} m^{-s}` for `s > 0`, when certified.
    pub fn power_sum_converges(&self, s: &Rational) -> Option<bool> {
        if s > &rat(1, 1) {
            return Some(true);
        }
        match self {
            SetDescriptor::Finite { .. } => Some(true),
            SetDescriptor::Progression { .. } => Some(false),
            SetDescriptor::Geometric { .. } => Some(true),
            // (m + t)^{-s} / m^{-s} -> 1, so the limit comparison test applies
            SetDescriptor::Shifted { inner, .. } => inner.power_sum_converges(s),
            SetDescriptor::Union { parts } => {
                let verdicts: Vec<Option<bool>> = parts.iter().map(|p| p.power_sum_converges(s)).collect();
                if verdicts.contains(&Some(false)) {
                    Some(false)
                } else if verdicts.iter().all(|v| *v == Some(true)) {
                    Some(true)
                } else {
                    None
                }
            }
            SetDescriptor::Enumerated { rule, .. } => match rule {
                EnumRule::Powers { exponent } => Some(s * rat(*exponent as i64, 1) > rat(1, 1)),
                EnumRule::Listed { .. } => None,
            },
        }
    }

    /// `A + t = {m + t : m in A} ∩ N`.
    pub fn shift(&self, t: i64) -> SetDescriptor {
        if t == 0 {
            return self.clone();
        }
        match self {
            SetDescriptor::Shifted { inner, offset } => match offset.checked_add(t) {
                Some(0) => (**inner).clone(),
                Some(o) => SetDescriptor::shifted((**inner).clone(), o),
                None => SetDescriptor::shifted(self.clone(), t),
            },
            SetDescriptor::Finite { elements } => {
                SetDescriptor::finite(elements.iter().filter_map(|&m| shift_elem(m, t)).collect())
            }
            other => SetDescriptor::shifted(other.clone(), t),
        }
    }
}

/// `A + t` (the descriptor-level shift).
pub fn shift_set(s: &SetDescriptor, t: i64) -> SetDescriptor {
    s.shift(t)
}

fn shift_elem(m: u64, t: i64) -> Option<u64> {
    let r = m as i128 + t as i128;
    (r >= 1 && r <= u64::MAX as i128).then_some(r as u64)
}

fn shift_limit(n: u64, t: i64) -> u64 {
    let r = n as i128 - t as i128;
    r.clamp(0, u64::MAX as i128) as u64
}

impl fmt::Display for SetDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetDescriptor::Finite { elements } => {
                let parts: Vec<String> = elements.iter().map(|m| m.to_string()).collect();
                write!(f, "{{{}}}", parts.join(","))
            }
            SetDescriptor::Progression { start, step } => write!(f, "{{{start} + {step}j}}"),
            SetDescriptor::Geometric { base } => write!(f, "{{{base}^k}}"),
            SetDescriptor::Shifted { inner, offset } => write!(f, "({inner} {offset:+})"),
            SetDescriptor::Union { parts } => {
                let parts: Vec<String> = parts.iter().map(|p| p.to_string()).collect();
                write!(f, "({})", parts.join(" ∪ "))
            }
            SetDescriptor::Enumerated { rule: EnumRule::Powers { exponent }, .. } => write!(f, "{{m^{exponent}}}"),
            SetDescriptor::Enumerated { rule: EnumRule::Listed { values }, .. } => {
                write!(f, "listed[{} values]", values.len())
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum SetRepr {
    Finite { elements: Vec<u64> },
    Progression { start: u64, step: u64 },
    Geometric { base: u64 },
    Shifted { inner: Box<SetDescriptor>, offset: i64 },
    Union { parts: Vec<SetDescriptor> },
    Enumerated { rule: EnumRule, #[serde(default = "unknown_growth")] growth: Growth },
}

fn unknown_growth() -> Growth {
    Growth::Unknown
}

impl From<SetDescriptor> for SetRepr {
    fn from(s: SetDescriptor) -> Self {
        match s {
            SetDescriptor::Finite { elements } => SetRepr::Finite { elements },
            SetDescriptor::Progression { start, step } => SetRepr::Progression { start, step },
            SetDescriptor::Geometric { base } => SetRepr::Geometric { base },
            SetDescriptor::Shifted { inner, offset } => SetRepr::Shifted { inner, offset },
            SetDescriptor::Union { parts } => SetRepr::Union { parts },
            SetDescriptor::Enumerated { rule, growth } => SetRepr::Enumerated { rule, growth },
        }
    }
}

impl TryFrom<SetRepr> for SetDescriptor {
    type Error = Error;

    fn try_from(r: SetRepr) -> Result<Self> {
        let d = match r {
            SetRepr::Finite { elements } => SetDescriptor::Finite { elements },
            SetRepr::Progression { start, step } => SetDescriptor::Progression { start, step },
            SetRepr::Geometric { base } => SetDescriptor::Geometric { base },
            SetRepr::Shifted { inner, offset } => SetDescriptor::Shifted { inner, offset },
            SetRepr::Union { parts } => SetDescriptor::Union { parts },
            SetRepr::Enumerated { rule, growth } => SetDescriptor::Enumerated { rule, growth },
        };
        d.validate()?;
        Ok(d)
    }
}
