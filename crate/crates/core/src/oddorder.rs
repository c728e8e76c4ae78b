//! Moduli in which a unit `s = a1/a2` of `Z[1/m]` has odd order.
//!
//! For odd `k` the part of `a1^k - a2^k` coprime to `m` is a modulus in which
//! `s^k = 1`, so the order of `s` there divides `k` and is odd. Each candidate
//! is still checked directly.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith::modular::mod_inverse;
use crate::arith::{factorize, factorize_u64, mult_order_from_multiple};
use crate::error::{Error, Result};

pub const DEFAULT_K_CUTOFF: u64 = 10_000;

/// A positive unit `a1 / a2` with `a1 > a2` (or `s = 1`), all of whose prime
/// factors divide `m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitSpec {
    a1: BigUint,
    a2: BigUint,
    inverted: bool,
}

impl UnitSpec {
    /// Validates `a1 / a2` against `m`. `s < 1` is replaced by `1/s`.
    pub fn new(a1: &BigUint, a2: &BigUint, m: &BigUint) -> Result<Self> {
        if a1.is_zero() || a2.is_zero() {
            return Err(Error::validation("a1 and a2 must be positive"));
        }
        let g = a1.gcd(a2);
        if !g.is_one() {
            return Err(Error::validation(format!(
                "a1 = {a1} and a2 = {a2} share the factor {g}"
            )));
        }
        for a in [a1, a2] {
            let (rest, _) = strip_m_part(a, m)?;
            if !rest.is_one() {
                return Err(Error::validation(format!(
                    "{a} has the factor {rest} coprime to m = {m}, so {a1}/{a2} is not a unit of Z[1/{m}]"
                )));
            }
        }
        let inverted = a1 < a2;
        let (a1, a2) = if inverted { (a2, a1) } else { (a1, a2) };
        Ok(UnitSpec {
            a1: a1.clone(),
            a2: a2.clone(),
            inverted,
        })
    }

    /// Like [`UnitSpec::new`] but from signed input; negative units are
    /// rejected.
    pub fn from_signed(a1: &BigInt, a2: &BigInt, m: &BigUint) -> Result<Self> {
        if a1.sign() == Sign::Minus || a2.sign() == Sign::Minus {
            return Err(Error::validation(
                "negative units are not supported: the search assumes s > 0 and only replaces s by 1/s to reach s > 1",
            ));
        }
        UnitSpec::new(a1.magnitude(), a2.magnitude(), m)
    }

    pub fn a1(&self) -> &BigUint {
        &self.a1
    }

    pub fn a2(&self) -> &BigUint {
        &self.a2
    }

    pub fn is_one(&self) -> bool {
        self.a1 == self.a2
    }

    /// Whether the input was `1/s` of the stored unit.
    pub fn inverted(&self) -> bool {
        self.inverted
    }
}

impl fmt::Display for UnitSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.a2.is_one() {
            write!(f, "{}", self.a1)
        } else {
            write!(f, "{}/{}", self.a1, self.a2)
        }
    }
}

/// Splits `n = N q` with `gcd(N, m) = 1` and every prime of `q` dividing `m`.
pub fn strip_m_part(n: &BigUint, m: &BigUint) -> Result<(BigUint, BigUint)> {
    if n.is_zero() {
        return Err(Error::domain("n must be >= 1"));
    }
    let mut rest = n.clone();
    let mut q = BigUint::one();
    loop {
        let g = rest.gcd(m);
        if g.is_one() {
            return Ok((rest, q));
        }
        rest /= &g;
        q *= g;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OddOrderModulus {
    /// Producing exponent; `None` in the `s = 1` case.
    pub k: Option<u64>,
    pub n: BigUint,
    pub order: BigUint,
}

/// Order of `s` mod `n`, given that it divides `k`.
fn order_dividing(s: &UnitSpec, n: &BigUint, k: u64) -> Result<BigUint> {
    let inv = mod_inverse(&(&s.a2 % n), n)
        .ok_or_else(|| Error::invariant(format!("a2 = {} not invertible mod {n}", s.a2)))?;
    let base = (&s.a1 * inv) % n;
    Ok(mult_order_from_multiple(&base, n, &factorize_u64(k))?.order().clone())
}

/// The first `count` distinct moduli `N` (odd `k <= k_cutoff`) in which `s`
/// has odd order.
pub fn odd_order_moduli(s: &UnitSpec, m: &BigUint, count: usize, k_cutoff: u64) -> Result<Vec<OddOrderModulus>> {
    if count == 0 {
        return Err(Error::domain("count must be >= 1"));
    }
    let mut out: Vec<OddOrderModulus> = Vec::with_capacity(count);
    if s.is_one() {
        let mut n = BigUint::from(2u8);
        while out.len() < count {
            if n.gcd(m).is_one() {
                out.push(OddOrderModulus {
                    k: None,
                    n: n.clone(),
                    order: BigUint::one(),
                });
            }
            n += 1u8;
        }
        return Ok(out);
    }
    let mut k = 1u64;
    while k <= k_cutoff {
        let diff = s.a1.pow(k as u32) - s.a2.pow(k as u32);
        let (n, _) = strip_m_part(&diff, m)?;
        if !n.is_one() && !out.iter().any(|r| r.n == n) {
            let order = order_dividing(s, &n, k)?;
            if order.is_even() || !BigUint::from(k).is_multiple_of(&order) || !n.gcd(m).is_one() {
                return Err(Error::invariant(format!(
                    "order {order} of {s} mod {n} fails the odd-order check"
                )));
            }
            out.push(OddOrderModulus { k: Some(k), n, order });
            if out.len() == count {
                return Ok(out);
            }
        }
        k += 2;
    }
    Err(Error::Exhausted {
        found: out.len(),
        requested: count,
        cutoff: k_cutoff,
    })
}

/// The prime power `p^e || N` of largest value; ties go to the larger prime.
pub fn dominant_prime(n: &BigUint) -> Result<(BigUint, u32)> {
    let f = factorize(n)?;
    f.factors()
        .iter()
        .max_by(|(p, e), (q, d)| p.pow(*e).cmp(&q.pow(*d)).then(p.cmp(q)))
        .cloned()
        .ok_or_else(|| Error::invariant("empty factorization"))
}
