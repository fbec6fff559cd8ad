//! Streams `‖a_n x‖` over `n = 1..=depth` and watches for the structural
//! patterns that decide convergence outright.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{enclose, CircleRational, Decomposition, Depth, DigitExpansion, Horizon, RatInterval, TermSequence};
use crate::error::{Error, Result};
use crate::rational::{rat_u, Rational};

/// A point of `T`: an exact rational, or digits over an arithmetic sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Point {
    Rational(CircleRational),
    Expansion(DigitExpansion),
}

impl Point {
    pub fn is_zero(&self) -> bool {
        match self {
            Point::Rational(x) => x.is_zero(),
            Point::Expansion(e) => e.is_finite() && e.nonzero_digits().is_empty(),
        }
    }
}

impl From<CircleRational> for Point {
    fn from(x: CircleRational) -> Self {
        Point::Rational(x)
    }
}

impl From<DigitExpansion> for Point {
    fn from(e: DigitExpansion) -> Self {
        Point::Expansion(e)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Rational(x) => write!(f, "{x}"),
            Point::Expansion(e) => write!(f, "{e}"),
        }
    }
}

impl FromStr for Point {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim_start().starts_with('{') {
            serde_json::from_str::<DigitExpansion>(s)
                .map(Point::Expansion)
                .map_err(|e| Error::Schema(e.to_string()))
        } else {
            s.parse().map(Point::Rational)
        }
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Point::Rational(x) => x.serialize(s),
            Point::Expansion(e) => e.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Rational(CircleRational),
            Expansion(DigitExpansion),
        }
        Ok(match Repr::deserialize(d)? {
            Repr::Rational(x) => Point::Rational(x),
            Repr::Expansion(e) => Point::Expansion(e),
        })
    }
}

/// A pattern that settles the behaviour of `‖a_n x‖` for every `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Structural {
    Zero,
    /// `a_n x` is an integer for every `n >= from`.
    Terminating { from: u64 },
    /// `(a_n x mod 1)` is eventually periodic and never 0; the repeat was
    /// seen at index `seen`.
    Periodic { seen: u64, period: u64, min_norm: Rational },
}

impl Structural {
    pub(crate) fn describe(&self) -> String {
        match self {
            Structural::Zero => "zero".into(),
            Structural::Terminating { from } => format!("terminating: a_n x is an integer for n >= {from}"),
            Structural::Periodic { seen, period, min_norm } => format!(
                "periodic: residues repeat with period {period} (seen at n = {seen}), minimal norm {}",
                crate::rational::format_rational(min_norm)
            ),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    /// Exact residues `a_n x mod 1` of a rational point.
    ExactResidues,
    /// Digit prefixes widened by rigorous tail intervals.
    Enclosure,
}

#[derive(Debug)]
pub(crate) struct ScanOutcome {
    pub route: Route,
    pub structural: Option<Structural>,
    /// Last index passed to the visitor; every later index up to the depth
    /// has norm 0 when a terminating pattern was found.
    pub visited: u64,
}

/// How tight the per-index norm ranges must be.
#[derive(Clone, Copy)]
pub(crate) enum Precision<'a> {
    /// Refine until the range is on one side of every threshold.
    Decide(&'a [Rational]),
    /// Exact values where the digits allow it, otherwise the tightest cheap
    /// enclosure.
    Exact,
}

/// Calls `visit(n, range of ‖a_n x‖)` for `n = 1..=depth`, stopping early
/// once a terminating pattern makes every later norm 0.
pub(crate) fn scan<F>(x: &Point, a: &TermSequence, depth: u64, precision: Precision<'_>, mut visit: F) -> Result<ScanOutcome>
where
    F: FnMut(u64, &RatInterval),
{
    if depth == 0 {
        return Err(Error::Domain("depth must be positive".into()));
    }
    if x.is_zero() {
        return Ok(ScanOutcome { route: Route::ExactResidues, structural: Some(Structural::Zero), visited: 0 });
    }
    match x {
        Point::Rational(r) => scan_rational(r, a, depth, &mut visit),
        Point::Expansion(e) => {
            let same_base = &a.base == e.sequence();
            if e.is_finite() && !same_base {
                return scan_rational(&e.value()?, a, depth, &mut visit);
            }
            let last = match (e.depth(), same_base) {
                (Depth::Finite, true) => e.last_support(),
                _ => None,
            };
            let stop = last.map_or(depth, |l| depth.min(l.saturating_sub(1)));
            for n in 1..=stop {
                let dec = a.decompose_at(n, e.sequence());
                let range = norm_bounds(e, &dec, precision)?;
                visit(n, &range);
            }
            // With u_L the last support denominator, u_L | u_n | a_n for n >= L.
            let structural = last.map(|from| Structural::Terminating { from });
            Ok(ScanOutcome { route: Route::Enclosure, structural, visited: stop })
        }
    }
}

fn scan_rational<F>(x: &CircleRational, a: &TermSequence, depth: u64, visit: &mut F) -> Result<ScanOutcome>
where
    F: FnMut(u64, &RatInterval),
{
    let d = x.denom();
    let cp = (&a.scale * x.numer()) % &d;
    let seq = &a.base;
    let mut u_mod = BigUint::from(1u32) % &d;
    // Brent's cycle finder over the states (u_n mod d, phase); the state at
    // n determines every later residue.
    let mut tortoise: Option<(BigUint, u64)> = None;
    let (mut power, mut lam) = (1u64, 0u64);
    let mut periodic: Option<(u64, u64)> = None;
    for n in 1..=depth {
        u_mod = seq.next_u_mod(n - 1, &u_mod, &d);
        let r = (&cp * &u_mod) % &d;
        if r.is_zero() {
            return Ok(ScanOutcome {
                route: Route::ExactResidues,
                structural: Some(Structural::Terminating { from: n }),
                visited: n - 1,
            });
        }
        let other = &d - &r;
        let norm = rat_u(if r <= other { &r } else { &other }, &d);
        visit(n, &RatInterval::point(norm));
        if periodic.is_none() {
            let state = (u_mod.clone(), seq.phase(n, &d));
            match &tortoise {
                None => tortoise = Some(state),
                Some(t) => {
                    lam += 1;
                    if *t == state {
                        periodic = Some((n, lam));
                    } else if power == lam {
                        tortoise = Some(state);
                        power *= 2;
                        lam = 0;
                    }
                }
            }
        }
    }
    let structural = periodic.map(|(seen, period)| Structural::Periodic {
        seen,
        period,
        min_norm: cycle_min_norm(x, a, seen, period),
    });
    Ok(ScanOutcome { route: Route::ExactResidues, structural, visited: depth })
}

/// `min ‖a_n x‖` over one period ending at `seen`.
fn cycle_min_norm(x: &CircleRational, a: &TermSequence, seen: u64, period: u64) -> Rational {
    let d = x.denom();
    let cp = (&a.scale * x.numer()) % &d;
    let mut u_mod = BigUint::from(1u32) % &d;
    let mut best: Option<Rational> = None;
    for n in 1..=seen {
        u_mod = a.base.next_u_mod(n - 1, &u_mod, &d);
        if n + period > seen {
            let r = (&cp * &u_mod) % &d;
            let other = &d - &r;
            let norm = rat_u(if r <= other { &r } else { &other }, &d);
            if best.as_ref().map_or(true, |b| &norm < b) {
                best = Some(norm);
            }
        }
    }
    best.unwrap_or_else(Rational::zero)
}

fn decides(range: &RatInterval, eps: &[Rational]) -> bool {
    eps.iter().all(|e| range.hi() < e || range.lo() >= e)
}

const FAR_BITS: usize = 64;

/// `[0, 2^-64]` when the next digit after `k` is so far away that
/// `‖a x‖ <= v u_k / u_{r-1} < 2^-64`, and that already decides every `ε`.
fn far_from_digits(e: &DigitExpansion, dec: &Decomposition, eps: &[Rational]) -> Option<RatInterval> {
    let next = e.nonzero_digits().range(dec.k + 1..).next().map(|(&r, _)| r);
    let stop = match (next, e.depth()) {
        (Some(r), Depth::Truncated(d)) => (r - 1).min(d),
        (Some(r), Depth::Finite) => r - 1,
        (None, Depth::Truncated(d)) => d,
        (None, Depth::Finite) => return Some(RatInterval::point(Rational::zero())),
    };
    if stop <= dec.k {
        return None;
    }
    let cap = &dec.v << FAR_BITS;
    if e.sequence().window_within(dec.k, stop, &cap).is_some() {
        return None;
    }
    let hi = rat_u(&BigUint::from(1u32), &(BigUint::from(1u32) << FAR_BITS));
    let range = RatInterval::new(Rational::zero(), hi).expect("ordered");
    decides(&range, eps).then_some(range)
}

/// Range of `‖a x‖` with `a = u_k v` from the digits of `e`.
pub(crate) fn norm_bounds(e: &DigitExpansion, dec: &Decomposition, precision: Precision<'_>) -> Result<RatInterval> {
    let vb = dec.v.bits();
    match e.depth() {
        Depth::Finite => {
            if let Precision::Decide(eps) = precision {
                if let Some(range) = far_from_digits(e, dec, eps) {
                    return Ok(range);
                }
                for extra in [64u64, 256, 1024] {
                    let cap = &dec.v << extra;
                    let range = enclose(e, dec, Horizon::Exact, Some(&cap))?.norm_range();
                    if decides(&range, eps) {
                        return Ok(range);
                    }
                }
            }
            Ok(enclose(e, dec, Horizon::Exact, None)?.norm_range())
        }
        Depth::Truncated(d) => {
            let needed = dec.k + vb + 64;
            if d < needed {
                return Err(Error::InsufficientDigits { available: d, required: needed });
            }
            if let Precision::Decide(eps) = precision {
                if let Some(range) = far_from_digits(e, dec, eps) {
                    return Ok(range);
                }
            }
            let steps: &[u64] = match precision {
                Precision::Decide(_) => &[64, 256, 1024],
                Precision::Exact => &[64],
            };
            let mut last = None;
            for &extra in steps {
                let t = d.min(dec.k + vb + extra);
                let range = enclose(e, dec, Horizon::Index(t), None)?.norm_range();
                let done = match precision {
                    Precision::Decide(eps) => decides(&range, eps),
                    Precision::Exact => true,
                };
                if done || t == d {
                    return Ok(range);
                }
                last = Some(range);
            }
            Ok(last.expect("at least one refinement step"))
        }
    }
}
