use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Pow, Signed};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, ParseError, Result};
use crate::ideals::{IdealDescriptor, SetDescriptor, Verdict};
use crate::rational::{format_rational, parse_rational, rat, Rational};

/// Weights `(r_n)` for `Σ r_n ‖a_n x‖`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WeightRule {
    /// `r_n = 1 / n^e`; `e = 0` gives constant weights.
    InversePower(u32),
    /// `r_1, r_2, ...` listed explicitly.
    Explicit(Vec<Rational>),
}

impl WeightRule {
    pub fn harmonic() -> Self {
        WeightRule::InversePower(1)
    }

    pub fn weight(&self, n: u64) -> Result<Rational> {
        match self {
            WeightRule::InversePower(e) => {
                Ok(Rational::new(BigInt::one(), Pow::pow(BigInt::from(n), *e)))
            }
            WeightRule::Explicit(values) => values
                .get((n as usize).wrapping_sub(1))
                .cloned()
                .ok_or(Error::Exhausted { cutoff: n, partial: values.len() as u64 }),
        }
    }

    pub fn weight_f64(&self, n: u64) -> Result<f64> {
        match self {
            WeightRule::InversePower(e) => Ok((n as f64).powi(-(*e as i32))),
            WeightRule::Explicit(_) => Ok(crate::rational::to_f64(&self.weight(n)?)),
        }
    }

    /// Whether `Σ r_n` diverges, when known.
    pub fn diverges(&self) -> Option<bool> {
        match self {
            WeightRule::InversePower(e) => Some(*e <= 1),
            WeightRule::Explicit(_) => None,
        }
    }
}

impl fmt::Display for WeightRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightRule::InversePower(0) => f.write_str("1"),
            WeightRule::InversePower(1) => f.write_str("1/n"),
            WeightRule::InversePower(e) => write!(f, "1/n^{e}"),
            WeightRule::Explicit(v) => {
                let parts: Vec<String> = v.iter().map(format_rational).collect();
                write!(f, "[{}]", parts.join(","))
            }
        }
    }
}

impl FromStr for WeightRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(ParseError::Weights(s.to_string()));
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t == "1" {
            return Ok(WeightRule::InversePower(0));
        }
        if t == "1/n" {
            return Ok(WeightRule::InversePower(1));
        }
        if let Some(e) = t.strip_prefix("1/n^") {
            return e.parse().map(WeightRule::InversePower).map_err(|_| bad());
        }
        if let Some(body) = t.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            let values = body
                .split(',')
                .filter(|p| !p.is_empty())
                .map(|p| parse_rational(p).map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()?;
            if values.is_empty() || values.iter().any(|v| !v.is_positive()) {
                return Err(bad());
            }
            return Ok(WeightRule::Explicit(values));
        }
        Err(bad())
    }
}

impl Serialize for WeightRule {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for WeightRule {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Whether `Σ_{n in A} r_n < ∞` forces `A` into the ideal.
///
/// `Member` means the implication holds, `NotMember` comes with a set that
/// has a finite weighted sum but lies outside the ideal.
pub fn weight_ideal_link(r: &WeightRule, ideal: &IdealDescriptor) -> Verdict {
    let e = match r {
        WeightRule::InversePower(e) => *e,
        WeightRule::Explicit(_) => {
            return Verdict::inconclusive("an explicit weight list says nothing about the tail")
        }
    };
    if e == 0 {
        // Σ_{n in A} 1 < ∞ only for finite A, and every ideal here holds them.
        return Verdict::member("constant-weights-finite-sets");
    }
    match ideal {
        IdealDescriptor::Fin => Verdict::not_member("summable-weights-infinite-set")
            .with_counterexample(SetDescriptor::geometric(2)),
        IdealDescriptor::Density if e == 1 => Verdict::member("harmonic-sum-forces-density-zero"),
        IdealDescriptor::Density => {
            Verdict::not_member("summable-weights-full-density").with_counterexample(SetDescriptor::naturals())
        }
        IdealDescriptor::Summable { exponent } => {
            let e_rat = rat(e as i64, 1);
            if &e_rat <= exponent {
                return Verdict::member("weight-comparison");
            }
            // {m^j} has Σ m^{-e j} < ∞ iff e j > 1 and Σ m^{-s j} = ∞ iff s j <= 1.
            let one = Rational::one();
            let j = (1u32..=64).find(|&j| {
                let j_rat = rat(j as i64, 1);
                &e_rat * &j_rat > one && exponent * &j_rat <= one
            });
            match j {
                Some(j) => Verdict::not_member("power-set-separation").with_counterexample(if j == 1 {
                    SetDescriptor::naturals()
                } else {
                    SetDescriptor::powers(j)
                }),
                None => Verdict::inconclusive(format!(
                    "no catalogued set separates 1/n^{e} from summable:{}",
                    format_rational(exponent)
                )),
            }
        }
    }
}
