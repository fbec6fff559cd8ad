//! Rational points of the circle group `T = R/Z`, kept in `[0, 1)`.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{self, parse_rational, Rational};

/// A reduced fraction `num/den` with `0 <= num < den`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CircleRational(Rational);

impl CircleRational {
    /// Accepts only values already in `[0, 1)`.
    pub fn new(x: Rational) -> Result<Self> {
        if x.is_negative() || x >= Rational::one() {
            return Err(Error::Domain(format!(
                "{} is outside [0, 1)",
                rational::format_rational(&x)
            )));
        }
        Ok(CircleRational(x))
    }

    pub fn from_parts(num: u64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(Error::Domain("zero denominator".into()));
        }
        Self::new(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// Reduces any rational mod 1.
    pub fn wrap(x: &Rational) -> Self {
        CircleRational(rational::frac(x))
    }

    pub fn zero() -> Self {
        CircleRational(Rational::zero())
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    pub fn numer(&self) -> BigUint {
        self.0.numer().magnitude().clone()
    }

    pub fn denom(&self) -> BigUint {
        self.0.denom().magnitude().clone()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// `‖x‖`, the distance to the nearest integer.
    pub fn norm(&self) -> Rational {
        dist_to_int(&self.0)
    }
}

/// `‖x‖ = min({x}, 1 - {x})` for any rational.
pub fn dist_to_int(x: &Rational) -> Rational {
    rational::dist_to_int(x)
}

/// `{a·x}` computed as `(a·num mod den) / den`.
pub fn mult_mod1(a: &BigUint, x: &CircleRational) -> CircleRational {
    let den = x.denom();
    let r = (a % &den) * x.numer() % &den;
    CircleRational(rational::rat_u(&r, &den))
}

impl fmt::Display for CircleRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&rational::format_rational(&self.0))
    }
}

impl FromStr for CircleRational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::new(parse_rational(s)?)
    }
}

impl Serialize for CircleRational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for CircleRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
