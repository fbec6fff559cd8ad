//! Integer sequences `(a_n)` of the form `a_n = c · w_n`, where `w_n` is
//! itself an arithmetic sequence (`2^n`, `p^n`, `n!`, ...).

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::sequence::{strip_ratios, ArithmeticSequence};
use crate::error::{Error, ParseError, Result};

/// `a = u_k · v` with `k` maximal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub k: u64,
    #[serde(with = "crate::rational::serde_big")]
    pub v: BigUint,
}

/// Decomposes `a` against `seq`: largest `k` with `u_k | a`, `v = a / u_k`.
///
/// The maximality of `k` is exactly `q_{k+1} ∤ v`.
pub fn decompose(seq: &ArithmeticSequence, a: &BigUint) -> Decomposition {
    let (k, v) = strip_ratios(seq, 0, a);
    Decomposition { k, v }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermSequence {
    pub scale: BigUint,
    pub base: ArithmeticSequence,
}

impl TermSequence {
    pub fn new(scale: BigUint, base: ArithmeticSequence) -> Result<Self> {
        if scale < BigUint::one() {
            return Err(Error::InvalidSequence("term scale must be positive".into()));
        }
        Ok(TermSequence { scale, base })
    }

    /// `a_n = u_n` for the given sequence.
    pub fn of(seq: &ArithmeticSequence) -> Self {
        TermSequence { scale: BigUint::one(), base: seq.clone() }
    }

    pub fn scaled(scale: u64, seq: &ArithmeticSequence) -> Self {
        TermSequence { scale: BigUint::from(scale.max(1)), base: seq.clone() }
    }

    pub fn term(&self, n: u64) -> BigUint {
        &self.scale * self.base.u(n)
    }

    /// `a_n mod m` from `u_n mod m`.
    pub fn residue(&self, u_mod: &BigUint, m: &BigUint) -> BigUint {
        (&self.scale * u_mod) % m
    }

    /// Decomposition of `a_n` against `seq`.
    ///
    /// When the terms are built on `seq` itself, `u_n | a_n` and only the
    /// scale has to be stripped, which keeps this O(log c) for any `n`.
    pub fn decompose_at(&self, n: u64, seq: &ArithmeticSequence) -> Decomposition {
        if &self.base == seq {
            let (k, v) = strip_ratios(seq, n, &self.scale);
            Decomposition { k, v }
        } else {
            decompose(seq, &self.term(n))
        }
    }

    /// Every `n` below the returned index has `k_n < k_min` (against `seq`).
    pub fn first_candidate(&self, k_min: u64, seq: &ArithmeticSequence) -> u64 {
        if &self.base == seq {
            // k_n <= n + log2(scale) + 1 because every ratio past q_1 is >= 2.
            k_min.saturating_sub(self.scale.bits() + 1).max(1)
        } else {
            1
        }
    }
}

impl fmt::Display for TermSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body = match self.base.geometric_base() {
            Some(b) => format!("{b}^n"),
            None if self.base == ArithmeticSequence::Factorial => "n!".to_string(),
            None => self.base.to_string(),
        };
        if self.scale.is_one() {
            f.write_str(&body)
        } else {
            write!(f, "{}*{}", self.scale, body)
        }
    }
}

impl FromStr for TermSequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(ParseError::Terms(s.to_string()));
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let (scale, body) = match t.split_once('*') {
            Some((c, rest)) if !rest.starts_with('*') => {
                (c.parse::<BigUint>().map_err(|_| bad())?, rest.to_string())
            }
            _ => (BigUint::one(), t.clone()),
        };
        let base = if body == "n!" {
            ArithmeticSequence::Factorial
        } else if let Some(b) = body.strip_suffix("^n") {
            let b: BigUint = b.parse().map_err(|_| bad())?;
            ArithmeticSequence::cyclic(vec![b]).map_err(|_| bad())?
        } else {
            body.parse().map_err(|_| bad())?
        };
        TermSequence::new(scale, base).map_err(|_| bad())
    }
}

impl Serialize for TermSequence {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for TermSequence {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
