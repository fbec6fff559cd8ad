//! Closed intervals with exact rational endpoints, and enclosures of
//! `{a·x}` on the circle built from a digit prefix plus a tail bound.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::circle::dist_to_int;
use super::expansion::{DigitExpansion, Depth};
use super::sequence::ArithmeticSequence;
use super::terms::{decompose, Decomposition};
use crate::error::{Error, Result};
use crate::rational::{self, format_rational, parse_rational, rat, rat_u, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatInterval {
    lo: Rational,
    hi: Rational,
}

impl RatInterval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self> {
        if lo > hi {
            return Err(Error::Domain(format!(
                "empty interval [{}, {}]",
                format_rational(&lo),
                format_rational(&hi)
            )));
        }
        Ok(RatInterval { lo, hi })
    }

    pub fn point(x: Rational) -> Self {
        RatInterval { lo: x.clone(), hi: x }
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn is_subset_of(&self, other: &RatInterval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn hull(&self, other: &RatInterval) -> RatInterval {
        RatInterval {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
        }
    }

    /// Range of `‖y‖` over `y` in the interval, for intervals inside `[0, 1]`.
    fn norm_range_unit(&self) -> RatInterval {
        let half = rat(1, 2);
        let (a, b) = (dist_to_int(&self.lo), dist_to_int(&self.hi));
        let hi = if self.contains(&half) { half } else { a.clone().max(b.clone()) };
        RatInterval { lo: a.min(b), hi }
    }
}

impl fmt::Display for RatInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", format_rational(&self.lo), format_rational(&self.hi))
    }
}

impl Serialize for RatInterval {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [format_rational(&self.lo), format_rational(&self.hi)].serialize(s)
    }
}

impl<'de> Deserialize<'de> for RatInterval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [lo, hi] = <[String; 2]>::deserialize(d)?;
        let lo = parse_rational(&lo).map_err(serde::de::Error::custom)?;
        let hi = parse_rational(&hi).map_err(serde::de::Error::custom)?;
        RatInterval::new(lo, hi).map_err(serde::de::Error::custom)
    }
}

/// A set of residues mod 1, as returned by [`frac_scaled`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FracEnclosure {
    /// `[lo, hi]` with `0 <= lo <= hi < 1`.
    Within { interval: RatInterval },
    /// `[lo, 1] ∪ [0, hi - 1]`: the widened interval crossed an integer.
    Wrapped { high: RatInterval, low: RatInterval },
    /// Width of at least one full turn.
    Full,
}

impl FracEnclosure {
    pub fn contains(&self, y: &Rational) -> bool {
        let y = rational::frac(y);
        match self {
            FracEnclosure::Within { interval } => interval.contains(&y),
            FracEnclosure::Wrapped { high, low } => {
                high.contains(&y) || low.contains(&y) || (y.is_zero() && high.hi().is_one())
            }
            FracEnclosure::Full => true,
        }
    }

    pub fn is_wrapped(&self) -> bool {
        !matches!(self, FracEnclosure::Within { .. })
    }

    /// Range of `‖y‖` over the enclosure.
    pub fn norm_range(&self) -> RatInterval {
        match self {
            FracEnclosure::Within { interval } => interval.norm_range_unit(),
            FracEnclosure::Wrapped { high, low } => {
                let r = high.norm_range_unit().hull(&low.norm_range_unit());
                RatInterval { lo: Rational::zero(), hi: r.hi }
            }
            FracEnclosure::Full => RatInterval { lo: Rational::zero(), hi: rat(1, 2) },
        }
    }
}

/// `{a·x}` lies in `[lo, lo + width]` read mod 1, `lo` in `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enclosure {
    pub lo: Rational,
    pub width: Rational,
}

impl Enclosure {
    pub fn is_exact(&self) -> bool {
        self.width.is_zero()
    }

    /// The unreduced interval `[lo, lo + width]`.
    pub fn raw(&self) -> RatInterval {
        RatInterval { lo: self.lo.clone(), hi: &self.lo + &self.width }
    }

    pub fn to_frac(&self) -> FracEnclosure {
        let one = Rational::one();
        if self.width >= one {
            return FracEnclosure::Full;
        }
        let hi = &self.lo + &self.width;
        if hi < one {
            FracEnclosure::Within { interval: RatInterval { lo: self.lo.clone(), hi } }
        } else {
            FracEnclosure::Wrapped {
                high: RatInterval { lo: self.lo.clone(), hi: one.clone() },
                low: RatInterval { lo: Rational::zero(), hi: hi - one },
            }
        }
    }

    pub fn norm_range(&self) -> RatInterval {
        self.to_frac().norm_range()
    }
}

/// Where the digit prefix stops when enclosing `{a·x}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Horizon {
    /// Use digits up to index `t` and widen by `a / u_t`.
    Index(u64),
    /// Use every digit of a finite expansion; no widening.
    Exact,
}

/// Encloses `{a·x}` for `a = u_k · v`.
///
/// Digits at indices `<= k` contribute integers and are skipped. Each digit
/// `c_r` with `r > k` contributes `v·c_r / (u_r/u_k)`. With a `cap`, window
/// products `u_r/u_k` are only formed while they stay `<= cap`; everything
/// past that point is absorbed into the width using
/// `Σ_{r > m} c_r/u_r <= 1/u_m`, which keeps the numbers small even when
/// the digit gaps are enormous.
pub fn enclose(
    e: &DigitExpansion,
    dec: &Decomposition,
    horizon: Horizon,
    cap: Option<&BigUint>,
) -> Result<Enclosure> {
    let seq = e.sequence();
    let k = dec.k;
    let v = &dec.v;
    let t = match horizon {
        Horizon::Index(t) => {
            e.require_known(t)?;
            t
        }
        Horizon::Exact => match e.depth() {
            Depth::Finite => e.last_support().unwrap_or(0).max(k),
            Depth::Truncated(d) => {
                return Err(Error::InsufficientDigits { available: d, required: d + 1 })
            }
        },
    };
    let v_rat = rational::int(v);
    if t <= k {
        let width = match horizon {
            Horizon::Exact => Rational::zero(),
            Horizon::Index(_) => v_rat * rational::int(&seq.window(t, k)),
        };
        return Ok(Enclosure { lo: Rational::zero(), width });
    }

    let mut acc = Rational::zero();
    let mut pos = k;
    let mut w_pos = BigUint::one();
    let mut width: Option<Rational> = None;
    for (&r, c) in e.nonzero_digits().range(k + 1..=t) {
        let w_prev = match advance(seq, &w_pos, pos, r - 1, cap) {
            Some(w) => w,
            None => {
                width = Some(&v_rat / rational::int(cap.expect("capped")));
                break;
            }
        };
        match advance(seq, &w_prev, r - 1, r, cap) {
            Some(w_r) => {
                acc += rat_u(c, &w_r);
                w_pos = w_r;
                pos = r;
            }
            None => {
                width = Some(&v_rat / rational::int(&w_prev));
                break;
            }
        }
    }
    let width = match (width, horizon) {
        (Some(w), _) => w,
        (None, Horizon::Exact) => Rational::zero(),
        (None, Horizon::Index(t)) => match advance(seq, &w_pos, pos, t, cap) {
            Some(w_t) => &v_rat / rational::int(&w_t),
            None => &v_rat / rational::int(cap.expect("capped")),
        },
    };
    Ok(Enclosure { lo: rational::frac(&(v_rat * acc)), width })
}

/// `w · u_to / u_from`, or `None` once it exceeds the cap.
fn advance(
    seq: &ArithmeticSequence,
    w: &BigUint,
    from: u64,
    to: u64,
    cap: Option<&BigUint>,
) -> Option<BigUint> {
    if from >= to {
        return Some(w.clone());
    }
    match cap {
        None => Some(w * seq.window(from, to)),
        Some(cap) => {
            if w > cap {
                return None;
            }
            let rest = cap / w;
            seq.window_within(from, to, &rest).map(|x| w * x).filter(|x| x <= cap)
        }
    }
}

/// `[0, 1/u_k]`: encloses `Σ_{n > k} c_n/u_n` for any admissible digits.
pub fn tail_bound(seq: &ArithmeticSequence, k: u64) -> RatInterval {
    RatInterval { lo: Rational::zero(), hi: rat_u(&BigUint::one(), &seq.u(k)) }
}

/// `{a·x_k}` widened by `a·tail_bound(k)`, reduced mod 1.
pub fn frac_scaled(a: &BigUint, e: &DigitExpansion, k: u64) -> Result<FracEnclosure> {
    let dec = decompose(e.sequence(), a);
    Ok(enclose(e, &dec, Horizon::Index(k), None)?.to_frac())
}

/// `[2‖x‖, (22/7)‖x‖]`, a rational enclosure of `|sin πx|`.
pub fn sin_envelope(x: &Rational) -> RatInterval {
    let d = dist_to_int(x);
    RatInterval { lo: &d * rat(2, 1), hi: d * rat(22, 7) }
}
