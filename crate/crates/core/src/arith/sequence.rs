//! Arithmetic sequences `1 = u_0 | u_1 | u_2 | ...` described by their ratios
//! `q_n = u_n / u_{n-1}`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, ParseError, Result};

/// A divisibility chain given by a ratio rule.
///
/// * `Cyclic(q)`: the ratio list is repeated forever (`[2]` is the dyadic
///   sequence `2^n`). Every entry must be at least 2.
/// * `Factorial`: `q_n = n`, so `u_n = n!` and `q_1 = 1`.
/// * `Tower(b)`: `u_n = b^(2^n)` for `n >= 1`, i.e. `q_1 = b^2` and
///   `q_n = u_{n-1}` afterwards.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ArithmeticSequence {
    Cyclic(Vec<BigUint>),
    Factorial,
    Tower(BigUint),
}

impl ArithmeticSequence {
    pub fn dyadic() -> Self {
        ArithmeticSequence::Cyclic(vec![BigUint::from(2u32)])
    }

    pub fn geometric(base: u64) -> Result<Self> {
        Self::cyclic(vec![BigUint::from(base)])
    }

    pub fn factorial() -> Self {
        ArithmeticSequence::Factorial
    }

    pub fn tower(base: u64) -> Result<Self> {
        if base < 2 {
            return Err(Error::InvalidSequence(format!("tower base must be >= 2, got {base}")));
        }
        Ok(ArithmeticSequence::Tower(BigUint::from(base)))
    }

    /// Builds a cycled ratio list, reduced to its minimal period.
    pub fn cyclic(ratios: Vec<BigUint>) -> Result<Self> {
        if ratios.is_empty() {
            return Err(Error::InvalidSequence("empty ratio list".into()));
        }
        if let Some(bad) = ratios.iter().find(|q| **q < BigUint::from(2u32)) {
            return Err(Error::InvalidSequence(format!(
                "cycled ratios must all be >= 2, found {bad}"
            )));
        }
        let len = ratios.len();
        let period = (1..=len)
            .find(|p| len % p == 0 && (0..len).all(|i| ratios[i] == ratios[i % p]))
            .unwrap_or(len);
        Ok(ArithmeticSequence::Cyclic(ratios[..period].to_vec()))
    }

    pub fn from_small_ratios(ratios: &[u64]) -> Result<Self> {
        Self::cyclic(ratios.iter().map(|&q| BigUint::from(q)).collect())
    }

    /// `q_n` for `n >= 1`; `q_0` is taken to be 1.
    pub fn ratio(&self, n: u64) -> BigUint {
        if n == 0 {
            return BigUint::one();
        }
        match self {
            ArithmeticSequence::Cyclic(q) => q[((n - 1) % q.len() as u64) as usize].clone(),
            ArithmeticSequence::Factorial => BigUint::from(n),
            ArithmeticSequence::Tower(b) => {
                if n == 1 {
                    b * b
                } else {
                    self.u(n - 1)
                }
            }
        }
    }

    /// `u_n` exactly.
    pub fn u(&self, n: u64) -> BigUint {
        match self {
            ArithmeticSequence::Cyclic(q) => {
                let len = q.len() as u64;
                let full: BigUint = q.iter().product();
                let mut acc = pow_big(&full, n / len);
                for r in q.iter().take((n % len) as usize) {
                    acc *= r;
                }
                acc
            }
            ArithmeticSequence::Factorial => {
                let mut acc = BigUint::one();
                for j in 2..=n {
                    acc *= j;
                }
                acc
            }
            ArithmeticSequence::Tower(b) => {
                if n == 0 {
                    BigUint::one()
                } else {
                    let mut acc = b.clone();
                    for _ in 0..n {
                        acc = &acc * &acc;
                    }
                    acc
                }
            }
        }
    }

    /// `u_s / u_k = q_{k+1} ... q_s` for `k <= s`.
    pub fn window(&self, k: u64, s: u64) -> BigUint {
        assert!(k <= s, "window({k}, {s}) with k > s");
        match self {
            ArithmeticSequence::Cyclic(q) if s - k > 2 * q.len() as u64 => {
                let len = q.len() as u64;
                // partial cycle, whole cycles as one power, partial cycle
                let mut j = k + 1;
                let mut acc = BigUint::one();
                while (j - 1) % len != 0 {
                    acc *= self.ratio(j);
                    j += 1;
                }
                let cycles = (s + 1 - j) / len;
                acc *= pow_big(&q.iter().product(), cycles);
                j += cycles * len;
                (j..=s).fold(acc, |acc, i| acc * self.ratio(i))
            }
            ArithmeticSequence::Tower(_) if s - k > 64 => self.u(s) / self.u(k),
            _ => (k + 1..=s).map(|j| self.ratio(j)).product(),
        }
    }

    /// `u_s / u_k` if it is at most `cap`, otherwise `None`.
    ///
    /// Only ever multiplies ratios until the cap is passed, so it is cheap
    /// even when `s - k` is astronomically large.
    pub fn window_within(&self, k: u64, s: u64, cap: &BigUint) -> Option<BigUint> {
        assert!(k <= s, "window({k}, {s}) with k > s");
        let mut acc = BigUint::one();
        for j in k + 1..=s {
            acc *= self.ratio(j);
            if &acc > cap {
                return None;
            }
        }
        Some(acc)
    }

    /// Given `u_n mod m`, returns `u_{n+1} mod m`.
    pub fn next_u_mod(&self, n: u64, u_mod: &BigUint, m: &BigUint) -> BigUint {
        match self {
            ArithmeticSequence::Tower(b) if n == 0 => (b * b) % m,
            ArithmeticSequence::Tower(_) => (u_mod * u_mod) % m,
            _ => (u_mod * self.ratio(n + 1)) % m,
        }
    }

    /// A token such that `(u_n mod m, phase(n, m))` determines the whole
    /// future of `u_j mod m`; used for exact cycle detection.
    pub fn phase(&self, n: u64, m: &BigUint) -> u64 {
        match self {
            ArithmeticSequence::Cyclic(q) => n % q.len() as u64,
            ArithmeticSequence::Factorial => match m.to_u64() {
                Some(m) => n % m,
                None => n,
            },
            ArithmeticSequence::Tower(_) => n.min(1),
        }
    }

    /// The single ratio of a geometric sequence `p^n`.
    pub fn geometric_base(&self) -> Option<&BigUint> {
        match self {
            ArithmeticSequence::Cyclic(q) if q.len() == 1 => Some(&q[0]),
            _ => None,
        }
    }
}

fn pow_big(base: &BigUint, mut exp: u64) -> BigUint {
    let mut result = BigUint::one();
    let mut b = base.clone();
    while exp > 0 {
        if exp & 1 == 1 {
            result *= &b;
        }
        exp >>= 1;
        if exp > 0 {
            b = &b * &b;
        }
    }
    result
}

/// Maximal `k` with `u_k | a`, and the cofactor `a / u_k`.
pub(crate) fn strip_ratios(seq: &ArithmeticSequence, start: u64, a: &BigUint) -> (u64, BigUint) {
    let mut k = start;
    let mut v = a.clone();
    if v.is_zero() {
        return (k, v);
    }
    loop {
        let q = seq.ratio(k + 1);
        let (quot, rem) = v.div_rem(&q);
        if !rem.is_zero() {
            return (k, v);
        }
        v = quot;
        k += 1;
    }
}

impl fmt::Display for ArithmeticSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArithmeticSequence::Cyclic(q) if q.len() == 1 && q[0] == BigUint::from(2u32) => {
                f.write_str("dyadic")
            }
            ArithmeticSequence::Cyclic(q) if q.len() == 1 => write!(f, "geometric:{}", q[0]),
            ArithmeticSequence::Cyclic(q) => {
                let parts: Vec<String> = q.iter().map(|x| x.to_string()).collect();
                write!(f, "[{}]", parts.join(","))
            }
            ArithmeticSequence::Factorial => f.write_str("factorial"),
            ArithmeticSequence::Tower(b) => write!(f, "tower:{b}"),
        }
    }
}

impl FromStr for ArithmeticSequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let bad = || Error::Parse(ParseError::Sequence(s.to_string()));
        let num = |x: &str| x.trim().parse::<BigUint>().map_err(|_| bad());
        match t {
            "dyadic" => Ok(Self::dyadic()),
            "factorial" => Ok(Self::factorial()),
            _ => {
                if let Some(b) = t.strip_prefix("geometric:") {
                    Self::cyclic(vec![num(b)?])
                } else if let Some(b) = t.strip_prefix("tower:") {
                    let b = num(b)?;
                    if b < BigUint::from(2u32) {
                        return Err(bad());
                    }
                    Ok(ArithmeticSequence::Tower(b))
                } else if let Some(inner) = t.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
                    let ratios = inner
                        .split(',')
                        .filter(|p| !p.trim().is_empty())
                        .map(num)
                        .collect::<Result<Vec<_>>>()?;
                    Self::cyclic(ratios)
                } else {
                    Err(bad())
                }
            }
        }
    }
}

// JSON form: a cycled ratio list serialises as an array of decimal strings,
// the generated rules as their spec string ("factorial", "tower:b").
impl Serialize for ArithmeticSequence {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ArithmeticSequence::Cyclic(q) => {
                let v: Vec<String> = q.iter().map(|x| x.to_string()).collect();
                v.serialize(s)
            }
            other => s.serialize_str(&other.to_string()),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SequenceRepr {
    List(Vec<String>),
    Spec(String),
}

impl<'de> Deserialize<'de> for ArithmeticSequence {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match SequenceRepr::deserialize(d)? {
            SequenceRepr::List(v) => {
                let ratios = v
                    .iter()
                    .map(|x| x.trim().parse::<BigUint>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(serde::de::Error::custom)?;
                Self::cyclic(ratios).map_err(serde::de::Error::custom)
            }
            SequenceRepr::Spec(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}
