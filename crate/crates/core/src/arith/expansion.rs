//! Canonical digit expansions `x = Σ c_n / u_n` with `0 <= c_n < q_n`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::circle::CircleRational;
use super::sequence::ArithmeticSequence;
use crate::error::{Error, Result};
use crate::ideals::SetDescriptor;
use crate::rational::{self, Rational};

/// How far the digits of an expansion are known.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Depth {
    /// Every digit past the stored ones is zero: the expansion is an exact
    /// rational.
    Finite,
    /// Digits are known for indices `1..=n` only.
    Truncated(u64),
}

impl Serialize for Depth {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Depth::Finite => s.serialize_str("finite"),
            Depth::Truncated(n) => s.serialize_u64(*n),
        }
    }
}

impl<'de> Deserialize<'de> for Depth {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            N(u64),
            S(String),
        }
        match Repr::deserialize(d)? {
            Repr::N(n) => Ok(Depth::Truncated(n)),
            Repr::S(s) if s == "finite" => Ok(Depth::Finite),
            Repr::S(s) => s
                .parse()
                .map(Depth::Truncated)
                .map_err(|_| serde::de::Error::custom(format!("invalid depth `{s}`"))),
        }
    }
}

/// Digits of a point of `T` over an arithmetic sequence.
///
/// Only non-zero digits are stored. Truncated expansions are representatives
/// of their prefix and make no claim about canonicity past the known depth.
/// `support_bound`, when present, is a symbolic superset of the support of
/// the (possibly infinite) point the digits were cut from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ExpansionRepr", into = "ExpansionRepr")]
pub struct DigitExpansion {
    sequence: ArithmeticSequence,
    digits: BTreeMap<u64, BigUint>,
    depth: Depth,
    support_bound: Option<SetDescriptor>,
}

impl DigitExpansion {
    pub fn new(
        sequence: ArithmeticSequence,
        digits: BTreeMap<u64, BigUint>,
        depth: Depth,
    ) -> Result<Self> {
        let mut clean = BTreeMap::new();
        for (n, c) in digits {
            if n == 0 {
                return Err(Error::Domain("digit indices start at 1".into()));
            }
            if let Depth::Truncated(d) = depth {
                if n > d {
                    return Err(Error::Domain(format!("digit at {n} beyond stored depth {d}")));
                }
            }
            let q = sequence.ratio(n);
            if c >= q {
                return Err(Error::Domain(format!("digit c_{n} = {c} is not below q_{n} = {q}")));
            }
            if !c.is_zero() {
                clean.insert(n, c);
            }
        }
        Ok(DigitExpansion { sequence, digits: clean, depth, support_bound: None })
    }

    /// Dense digit list `c_1, c_2, ...`.
    pub fn from_dense(sequence: ArithmeticSequence, digits: &[u64], depth: Depth) -> Result<Self> {
        let map = digits
            .iter()
            .enumerate()
            .map(|(i, &c)| (i as u64 + 1, BigUint::from(c)))
            .collect();
        Self::new(sequence, map, depth)
    }

    /// Digit `digit` on every element of `support` up to `depth`, zero
    /// elsewhere; the support descriptor is kept as the symbolic bound.
    pub fn from_support(
        sequence: ArithmeticSequence,
        support: &SetDescriptor,
        digit: u64,
        depth: u64,
    ) -> Result<Self> {
        let digits = support
            .elements_upto(depth)?
            .into_iter()
            .map(|n| (n, BigUint::from(digit)))
            .collect();
        Ok(Self::new(sequence, digits, Depth::Truncated(depth))?
            .with_support_bound(support.clone()))
    }

    pub fn with_support_bound(mut self, bound: SetDescriptor) -> Self {
        self.support_bound = Some(bound);
        self
    }

    pub fn sequence(&self) -> &ArithmeticSequence {
        &self.sequence
    }

    pub fn depth(&self) -> Depth {
        self.depth
    }

    pub fn support_bound(&self) -> Option<&SetDescriptor> {
        self.support_bound.as_ref()
    }

    pub fn is_finite(&self) -> bool {
        self.depth == Depth::Finite
    }

    /// Non-zero digits in index order.
    pub fn nonzero_digits(&self) -> &BTreeMap<u64, BigUint> {
        &self.digits
    }

    pub fn last_support(&self) -> Option<u64> {
        self.digits.keys().next_back().copied()
    }

    /// Highest index whose digit is known, `None` when all are.
    pub fn known_through(&self) -> Option<u64> {
        match self.depth {
            Depth::Finite => None,
            Depth::Truncated(d) => Some(d),
        }
    }

    pub fn require_known(&self, n: u64) -> Result<()> {
        match self.known_through() {
            Some(d) if n > d => Err(Error::InsufficientDigits { available: d, required: n }),
            _ => Ok(()),
        }
    }

    pub fn digit(&self, n: u64) -> Result<BigUint> {
        self.require_known(n)?;
        Ok(self.digits.get(&n).cloned().unwrap_or_default())
    }

    /// Dense digits `c_1..=c_n`.
    pub fn dense(&self, n: u64) -> Result<Vec<BigUint>> {
        self.require_known(n)?;
        Ok((1..=n).map(|i| self.digits.get(&i).cloned().unwrap_or_default()).collect())
    }

    /// `x_depth = Σ_{n <= depth} c_n / u_n`, exact and reduced.
    pub fn reconstruct(&self, depth: u64) -> Result<CircleRational> {
        self.require_known(depth)?;
        let mut num = BigUint::zero();
        let mut pos = 0u64;
        for (&r, c) in self.digits.range(1..=depth) {
            num = num * self.sequence.window(pos, r) + c;
            pos = r;
        }
        let den = self.sequence.u(pos);
        CircleRational::new(rational::rat_u(&num, &den))
    }

    /// The exact value of a finitely supported expansion.
    pub fn value(&self) -> Result<CircleRational> {
        match self.depth {
            Depth::Finite => self.reconstruct(self.last_support().unwrap_or(0)),
            Depth::Truncated(d) => Err(Error::InsufficientDigits { available: d, required: d + 1 }),
        }
    }

    /// `supp(x) = {n : c_n != 0}`; the symbolic bound when one is attached.
    pub fn support(&self) -> SetDescriptor {
        match &self.support_bound {
            Some(bound) => bound.clone(),
            None => SetDescriptor::finite(self.digits.keys().copied().collect()),
        }
    }
}

/// Digits of `x` with `c_1 = ⌊u_1 x⌋` and `c_{k+1} = ⌊u_{k+1}(x - x_k)⌋`.
///
/// Stops early and marks the expansion finite once the remainder vanishes.
pub fn expand(x: &CircleRational, seq: &ArithmeticSequence, depth: u64) -> Result<DigitExpansion> {
    if depth == 0 {
        return Err(Error::Domain("expansion depth must be positive".into()));
    }
    let den = x.denom();
    // rem / den = u_k (x - x_k), always in [0, 1).
    let mut rem = x.numer();
    let mut digits = BTreeMap::new();
    let mut finite = rem.is_zero();
    for n in 1..=depth {
        if finite {
            break;
        }
        let scaled = rem * seq.ratio(n);
        let (c, r) = scaled.div_rem(&den);
        if !c.is_zero() {
            digits.insert(n, c);
        }
        rem = r;
        finite = rem.is_zero();
    }
    let depth = if finite { Depth::Finite } else { Depth::Truncated(depth) };
    DigitExpansion::new(seq.clone(), digits, depth)
}

/// [`expand`] for an arbitrary rational; values outside `[0, 1)` are a
/// domain error.
pub fn expand_value(x: &Rational, seq: &ArithmeticSequence, depth: u64) -> Result<DigitExpansion> {
    expand(&CircleRational::new(x.clone())?, seq, depth)
}

impl fmt::Display for DigitExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.digits.iter().map(|(n, c)| format!("{c}/u_{n}")).collect();
        let tail = match self.depth {
            Depth::Finite => String::new(),
            Depth::Truncated(d) => format!(" + O(1/u_{d})"),
        };
        if parts.is_empty() {
            write!(f, "0{tail} over {}", self.sequence)
        } else {
            write!(f, "{}{tail} over {}", parts.join(" + "), self.sequence)
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ExpansionRepr {
    ratios: ArithmeticSequence,
    digits: BTreeMap<String, String>,
    depth: Depth,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    support_bound: Option<SetDescriptor>,
}

impl From<DigitExpansion> for ExpansionRepr {
    fn from(e: DigitExpansion) -> Self {
        ExpansionRepr {
            ratios: e.sequence,
            digits: e.digits.into_iter().map(|(n, c)| (n.to_string(), c.to_string())).collect(),
            depth: e.depth,
            support_bound: e.support_bound,
        }
    }
}

impl TryFrom<ExpansionRepr> for DigitExpansion {
    type Error = Error;

    fn try_from(r: ExpansionRepr) -> Result<Self> {
        let digits = r
            .digits
            .into_iter()
            .map(|(n, c)| {
                let idx = n
                    .trim()
                    .parse::<u64>()
                    .map_err(|_| Error::Schema(format!("digit index `{n}` is not an integer")))?;
                c.trim()
                    .parse::<BigUint>()
                    .map(|c| (idx, c))
                    .map_err(|_| Error::Schema(format!("digit {n} is not an integer: `{c}`")))
            })
            .collect::<Result<BTreeMap<_, _>>>()?;
        let e = DigitExpansion::new(r.ratios, digits, r.depth)?;
        Ok(match r.support_bound {
            Some(b) => e.with_support_bound(b),
            None => e,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use proptest::prelude::*;

    fn c(n: u64, d: u64) -> CircleRational {
        CircleRational::from_parts(n, d).unwrap()
    }

    fn dense(e: &DigitExpansion, n: u64) -> Vec<u64> {
        e.dense(n).unwrap().iter().map(|d| u64::try_from(d).unwrap()).collect()
    }

    #[test]
    fn expand_examples() {
        let d = ArithmeticSequence::dyadic();
        let e = expand(&c(5, 8), &d, 3).unwrap();
        assert_eq!(dense(&e, 3), vec![1, 0, 1]);
        assert!(e.is_finite());

        let e = expand(&c(1, 3), &d, 6).unwrap();
        assert_eq!(dense(&e, 6), vec![0, 1, 0, 1, 0, 1]);
        assert_eq!(e.depth(), Depth::Truncated(6));

        let f = ArithmeticSequence::factorial();
        let e = expand(&c(1, 2), &f, 4).unwrap();
        assert_eq!(dense(&e, 4), vec![0, 1, 0, 0]);
        // reconstruct oracle: 0/1 + 1/2 over u = (1, 2, 6, 24)
        assert_eq!(e.reconstruct(4).unwrap(), c(1, 2));
    }

    #[test]
    fn expand_rejects_out_of_domain() {
        let d = ArithmeticSequence::dyadic();
        assert!(matches!(expand_value(&rat(3, 2), &d, 4), Err(Error::Domain(_))));
        assert!(matches!(expand_value(&rat(-1, 4), &d, 4), Err(Error::Domain(_))));
        assert!(expand(&c(1, 3), &d, 0).is_err());
    }

    #[test]
    fn reconstruct_examples() {
        let d = ArithmeticSequence::dyadic();
        let e = DigitExpansion::from_dense(d.clone(), &[1, 0, 1], Depth::Truncated(3)).unwrap();
        assert_eq!(e.reconstruct(3).unwrap(), c(5, 8));
        let z = DigitExpansion::from_dense(d.clone(), &[0, 0, 0, 0], Depth::Truncated(4)).unwrap();
        assert!(z.reconstruct(4).unwrap().is_zero());
        let f = DigitExpansion::from_dense(ArithmeticSequence::factorial(), &[0, 1], Depth::Truncated(2))
            .unwrap();
        assert_eq!(f.reconstruct(2).unwrap(), c(1, 2));
        assert!(matches!(
            e.reconstruct(4),
            Err(Error::InsufficientDigits { available: 3, required: 4 })
        ));
        let fin = DigitExpansion::from_dense(d, &[1, 0, 1], Depth::Finite).unwrap();
        assert_eq!(fin.reconstruct(40).unwrap(), c(5, 8));
    }

    #[test]
    fn digit_bounds_are_enforced() {
        let d = ArithmeticSequence::dyadic();
        assert!(DigitExpansion::from_dense(d.clone(), &[2], Depth::Finite).is_err());
        let f = ArithmeticSequence::factorial();
        // q_1 = 1 admits only the digit 0
        assert!(DigitExpansion::from_dense(f, &[1], Depth::Finite).is_err());
        assert!(DigitExpansion::from_dense(d, &[0, 1], Depth::Truncated(1)).is_err());
    }

    #[test]
    fn support_examples() {
        let d = ArithmeticSequence::dyadic();
        let e = DigitExpansion::from_dense(d.clone(), &[1, 0, 1], Depth::Finite).unwrap();
        assert_eq!(e.support(), SetDescriptor::finite(vec![1, 3]));
        let z = DigitExpansion::from_dense(d.clone(), &[0, 0], Depth::Truncated(2)).unwrap();
        assert_eq!(z.support(), SetDescriptor::finite(vec![]));
        let shifted = SetDescriptor::shifted(SetDescriptor::geometric(2), 1);
        let w = DigitExpansion::from_support(d, &shifted, 1, 40).unwrap();
        assert_eq!(w.support(), shifted);
        assert_eq!(w.nonzero_digits().keys().copied().collect::<Vec<_>>(), vec![3, 5, 9, 17, 33]);
    }

    #[test]
    fn json_shape() {
        let d = ArithmeticSequence::dyadic();
        let e = DigitExpansion::from_dense(d, &[1, 0, 1], Depth::Truncated(3)).unwrap();
        let j = serde_json::to_string(&e).unwrap();
        assert_eq!(j, r#"{"ratios":["2"],"digits":{"1":"1","3":"1"},"depth":3}"#);
        let back: DigitExpansion = serde_json::from_str(&j).unwrap();
        assert_eq!(back, e);
        let bad = r#"{"ratios":["2"],"digits":{"1":"2"},"depth":3}"#;
        assert!(serde_json::from_str::<DigitExpansion>(bad).is_err());
    }

    fn any_sequence() -> impl Strategy<Value = ArithmeticSequence> {
        prop_oneof![
            Just(ArithmeticSequence::dyadic()),
            Just(ArithmeticSequence::factorial()),
            proptest::collection::vec(2u64..12, 1..5)
                .prop_map(|q| ArithmeticSequence::from_small_ratios(&q).unwrap()),
        ]
    }

    proptest! {
        #[test]
        fn remainder_decays(seq in any_sequence(), num in 0u64..10_000, extra in 1u64..10_000, depth in 1u64..25) {
            let x = c(num, num + extra);
            let e = expand(&x, &seq, depth).unwrap();
            for k in 1..=depth {
                let xk = e.reconstruct(k).unwrap();
                let gap = x.value() - xk.value();
                prop_assert!(gap >= Rational::zero());
                prop_assert!(gap < rational::rat_u(&BigUint::from(1u32), &seq.u(k)));
                let q = seq.ratio(k);
                prop_assert!(e.digit(k).unwrap() < q);
            }
        }

        #[test]
        fn json_round_trip(seq in any_sequence(), num in 0u64..1000, extra in 1u64..1000, depth in 1u64..12) {
            let e = expand(&c(num, num + extra), &seq, depth).unwrap();
            let back: DigitExpansion = serde_json::from_str(&serde_json::to_string(&e).unwrap()).unwrap();
            prop_assert_eq!(back, e);
        }
    }
}
