use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The digit placed right after `u_k` when `a = u_k · v` and `q = q_{k+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DigitChoice {
    #[serde(with = "crate::rational::serde_big")]
    pub q: BigUint,
    /// `v mod q`
    #[serde(with = "crate::rational::serde_big")]
    pub l: BigUint,
    /// `q - l`
    #[serde(with = "crate::rational::serde_big")]
    pub l_prime: BigUint,
    #[serde(with = "crate::rational::serde_big")]
    pub m: BigUint,
    /// `floor(q / m)`
    #[serde(with = "crate::rational::serde_big")]
    pub c: BigUint,
}

/// `m = 2 min(l, q - l)` and `c = floor(q/m)`, which puts `{c·l/q}` in `[1/4, 3/4]`.
pub fn digit_choice(q: &BigUint, v: &BigUint) -> Result<DigitChoice> {
    if q < &BigUint::from(2u32) {
        return Err(Error::Precondition(format!("ratio {q} is below 2")));
    }
    let l = v.mod_floor(q);
    if l.is_zero() {
        return Err(Error::Precondition(format!("{q} divides {v}")));
    }
    let l_prime = q - &l;
    let m = if &l * 2u32 <= *q { &l * 2u32 } else { &l_prime * 2u32 };
    assert!(m > BigUint::one() && &m <= q, "m = {m} outside (1, {q}]");
    let c = q / &m;
    Ok(DigitChoice { q: q.clone(), l, l_prime, m, c })
}

/// The digit `1` used when every ratio is the same prime: `m = q` and `c = 1`.
pub(crate) fn unit_choice(q: &BigUint, v: &BigUint) -> Result<DigitChoice> {
    let l = v.mod_floor(q);
    if l.is_zero() {
        return Err(Error::Precondition(format!("{q} divides {v}")));
    }
    Ok(DigitChoice { q: q.clone(), l_prime: q - &l, l, m: q.clone(), c: BigUint::one() })
}
