//! Word-sized modular helpers used on the fast paths.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[inline]
pub fn mul_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, n: u64) -> u64 {
    if n == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= n;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, n);
        }
        base = mul_mod(base, base, n);
        exp >>= 1;
    }
    acc
}

/// `base^exp mod n` for big operands, with `n = 1` giving 0.
pub fn pow_mod_big(base: &BigUint, exp: &BigUint, n: &BigUint) -> BigUint {
    if n.is_one() {
        return BigUint::zero();
    }
    match (n.to_u64(), exp.to_u64()) {
        (Some(n64), Some(e64)) => {
            let b = (base % n).to_u64().unwrap_or(0);
            BigUint::from(pow_mod(b, e64, n64))
        }
        _ => base.modpow(exp, n),
    }
}

/// Inverse of `a` modulo `n`, if it exists. `n = 1` yields 0.
pub fn mod_inverse(a: &BigUint, n: &BigUint) -> Option<BigUint> {
    if n.is_one() {
        return Some(BigUint::zero());
    }
    let a = BigInt::from(a % n);
    let n_signed = BigInt::from(n.clone());
    let ext = a.extended_gcd(&n_signed);
    if !ext.gcd.is_one() {
        return None;
    }
    let x = ext.x.mod_floor(&n_signed);
    x.to_biguint()
}

/// Least non-negative residue of a signed integer.
pub fn residue(x: &BigInt, n: &BigUint) -> BigUint {
    if n.is_one() {
        return BigUint::zero();
    }
    let mag = x.magnitude() % n;
    if x.sign() == Sign::Minus && !mag.is_zero() {
        n - mag
    } else {
        mag
    }
}

/// Least non-negative residue of an `i64` modulo a big modulus.
pub fn residue_i64(x: i64, n: &BigUint) -> BigUint {
    residue(&BigInt::from(x), n)
}

/// Is `x` a unit modulo `n`?
pub fn coprime(x: &BigUint, n: &BigUint) -> bool {
    x.gcd(n).is_one()
}

pub(crate) fn abs_big(x: &BigInt) -> BigUint {
    x.abs().to_biguint().unwrap_or_default()
}
