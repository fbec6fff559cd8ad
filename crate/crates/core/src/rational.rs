//! Small helpers around [`BigRational`]: parsing and printing as `"num/den"`,
//! fractional parts, and an lcm-based accumulator for long exact sums.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serializer};

use crate::error::ParseError;

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_u(num: &BigUint, den: &BigUint) -> Rational {
    BigRational::new(BigInt::from(num.clone()), BigInt::from(den.clone()))
}

pub fn int(n: &BigUint) -> Rational {
    BigRational::from_integer(BigInt::from(n.clone()))
}

/// `{x} = x - floor(x)`, always in `[0, 1)`.
pub fn frac(x: &Rational) -> Rational {
    x - x.floor()
}

/// Distance to the nearest integer, `min({x}, 1 - {x})`.
pub fn dist_to_int(x: &Rational) -> Rational {
    let f = frac(x);
    let g = Rational::one() - &f;
    if f <= g {
        f
    } else {
        g
    }
}

/// Parses `"p/q"`, `"p"` or `"-p/q"`.
pub fn parse_rational(s: &str) -> Result<Rational, ParseError> {
    let s = s.trim();
    let bad = || ParseError::Rational(s.to_string());
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

pub fn format_rational(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Wrapper that displays a rational as `num/den`.
pub struct Display<'a>(pub &'a Rational);

impl fmt::Display for Display<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(self.0))
    }
}

pub fn to_f64(x: &Rational) -> f64 {
    // Shift both sides down to 1000 bits so the conversion never overflows.
    let n = x.numer().abs();
    let d = x.denom().clone();
    let excess = n.bits().max(d.bits()).saturating_sub(1000);
    let nf = f64_of(&(n >> excess));
    let df = f64_of(&(d >> excess));
    let v = nf / df;
    if x.is_negative() {
        -v
    } else {
        v
    }
}

fn f64_of(n: &BigInt) -> f64 {
    n.to_f64().unwrap_or(f64::INFINITY)
}

/// Serde adapter for a single rational as a `"num/den"` string.
pub mod serde_rat {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for an optional rational.
pub mod serde_opt_rat {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(x) => s.serialize_some(&format_rational(x)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|s| parse_rational(&s).map_err(serde::de::Error::custom))
            .transpose()
    }
}

/// Serde adapter for a list of rationals.
pub mod serde_rat_vec {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(xs: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for x in xs {
            seq.serialize_element(&format_rational(x))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// Serde adapter for a [`BigUint`] as a decimal string.
pub mod serde_big {
    use super::*;

    pub fn serialize<S: Serializer>(x: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        s.trim()
            .parse()
            .map_err(|_| serde::de::Error::custom(format!("invalid integer `{s}`")))
    }
}

/// Running sum of non-negative rationals whose denominator is kept as an lcm.
///
/// Adding `p/q` only needs `gcd(q, D mod q)`, which is cheap when `q` is
/// small; a normalising rational type would pay a full big gcd on every step.
#[derive(Clone, Debug)]
pub struct ExactSum {
    num: BigUint,
    den: BigUint,
}

impl Default for ExactSum {
    fn default() -> Self {
        Self::new()
    }
}

impl ExactSum {
    pub fn new() -> Self {
        ExactSum {
            num: BigUint::zero(),
            den: BigUint::one(),
        }
    }

    pub fn add_parts(&mut self, num: &BigUint, den: &BigUint) {
        if num.is_zero() {
            return;
        }
        let g = den.gcd(&(&self.den % den));
        let scale_self = den / &g;
        let scale_term = &self.den / &g;
        self.num = &self.num * &scale_self + num * scale_term;
        self.den *= scale_self;
    }

    pub fn add(&mut self, x: &Rational) {
        debug_assert!(!x.is_negative());
        self.add_parts(x.numer().magnitude(), x.denom().magnitude());
    }

    pub fn value(&self) -> Rational {
        rat_u(&self.num, &self.den)
    }
}
