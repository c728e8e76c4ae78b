//! Prime factorization and primality.
//!
//! Strategy: trial division up to [`TRIAL_DIVISION_LIMIT`], then Pollard's
//! rho (Brent variant) on whatever cofactor survives. Primality uses
//! Miller-Rabin, deterministic below 2^64 and with [`MR_ROUNDS_BIG`] pseudo
//! random bases above.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::modular::{mul_mod, pow_mod};
use crate::error::{Error, Result};

pub const TRIAL_DIVISION_LIMIT: u64 = 1_000_000;
pub const MR_ROUNDS_BIG: usize = 40;

const MR_BASES_U64: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// A prime factorization `p_1^b_1 * ... * p_n^b_n` with strictly increasing
/// primes. The empty factorization represents 1.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Factorization {
    factors: Vec<(BigUint, u32)>,
}

impl Factorization {
    pub fn one() -> Self {
        Self::default()
    }

    /// Builds a factorization from explicit pairs, checking every invariant.
    pub fn from_pairs(mut pairs: Vec<(BigUint, u32)>) -> Result<Self> {
        pairs.sort();
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::validation(alloc::format!("prime {} listed twice", w[0].0)));
            }
        }
        for (p, e) in &pairs {
            if *e == 0 {
                return Err(Error::validation(alloc::format!("prime {p} has exponent 0")));
            }
            if !is_prime(p) {
                return Err(Error::validation(alloc::format!("{p} is not prime")));
            }
        }
        Ok(Self { factors: pairs })
    }

    pub(crate) fn from_map(map: BTreeMap<BigUint, u32>) -> Self {
        Self {
            factors: map.into_iter().filter(|(_, e)| *e > 0).collect(),
        }
    }

    pub(crate) fn to_map(&self) -> BTreeMap<BigUint, u32> {
        self.factors.iter().cloned().collect()
    }

    pub fn factors(&self) -> &[(BigUint, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = &BigUint> {
        self.factors.iter().map(|(p, _)| p)
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    /// The integer this factorization represents.
    pub fn value(&self) -> BigUint {
        self.factors.iter().fold(BigUint::one(), |acc, (p, e)| acc * p.pow(*e))
    }

    /// Factorization of the product.
    pub fn mul(&self, other: &Factorization) -> Factorization {
        let mut map = self.to_map();
        for (p, e) in &other.factors {
            *map.entry(p.clone()).or_insert(0) += e;
        }
        Self::from_map(map)
    }

    /// Factorization of the `e`-th power.
    pub fn pow(&self, e: u32) -> Factorization {
        Self::from_map(self.factors.iter().map(|(p, x)| (p.clone(), x * e)).collect())
    }

    /// Factorization of the lcm (exponent-wise max).
    pub fn lcm(&self, other: &Factorization) -> Factorization {
        let mut map = self.to_map();
        for (p, e) in &other.factors {
            let slot = map.entry(p.clone()).or_insert(0);
            *slot = (*slot).max(*e);
        }
        Self::from_map(map)
    }

    /// Factorization of `p^e` for a known prime `p`.
    pub(crate) fn prime_power(p: BigUint, e: u32) -> Factorization {
        if e == 0 {
            return Self::one();
        }
        Self {
            factors: alloc::vec![(p, e)],
        }
    }

    /// Euler's totient of the represented integer.
    pub fn totient(&self) -> BigUint {
        self.factors
            .iter()
            .fold(BigUint::one(), |acc, (p, e)| acc * p.pow(e - 1) * (p - BigUint::one()))
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("1");
        }
        for (i, (p, e)) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str(" * ")?;
            }
            if *e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Factorizes `n >= 2`.
pub fn factorize(n: &BigUint) -> Result<Factorization> {
    if *n < BigUint::from(2u8) {
        return Err(Error::domain(alloc::format!("factorize requires n >= 2, got {n}")));
    }
    Ok(factorize_any(n))
}

/// Like [`factorize`] but maps 0 and 1 to the empty factorization.
pub(crate) fn factorize_any(n: &BigUint) -> Factorization {
    let mut map = BTreeMap::new();
    if *n >= BigUint::from(2u8) {
        match n.to_u64() {
            Some(small) => factor_u64_into(small, &mut map),
            None => factor_big_into(n.clone(), &mut map),
        }
    }
    Factorization::from_map(map)
}

pub fn factorize_u64(n: u64) -> Factorization {
    let mut map = BTreeMap::new();
    if n >= 2 {
        factor_u64_into(n, &mut map);
    }
    Factorization::from_map(map)
}

fn bump(map: &mut BTreeMap<BigUint, u32>, p: BigUint, e: u32) {
    *map.entry(p).or_insert(0) += e;
}

/// Candidates 2, 3, 5, 7, 11, 13, ... (all numbers coprime to 6, plus 2 and 3).
fn trial_candidates() -> impl Iterator<Item = u64> {
    [2u64, 3].into_iter().chain((0u64..).flat_map(|i| {
        let base = 6 * i + 5;
        [base, base + 2]
    }))
}

fn factor_u64_into(mut n: u64, map: &mut BTreeMap<BigUint, u32>) {
    for d in trial_candidates() {
        if d > TRIAL_DIVISION_LIMIT || d.saturating_mul(d) > n {
            break;
        }
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            bump(map, BigUint::from(d), e);
        }
    }
    if n > 1 {
        split_u64(n, map);
    }
}

fn split_u64(n: u64, map: &mut BTreeMap<BigUint, u32>) {
    if n == 1 {
        return;
    }
    if is_prime_u64(n) {
        bump(map, BigUint::from(n), 1);
        return;
    }
    let d = pollard_brent_u64(n);
    split_u64(d, map);
    split_u64(n / d, map);
}

fn factor_big_into(mut n: BigUint, map: &mut BTreeMap<BigUint, u32>) {
    if is_prime(&n) {
        bump(map, n, 1);
        return;
    }
    for d in trial_candidates() {
        if d > TRIAL_DIVISION_LIMIT {
            break;
        }
        if let Some(small) = n.to_u64() {
            factor_u64_into(small, map);
            return;
        }
        let dd = BigUint::from(d);
        if (&n % &dd).is_zero() {
            let mut e = 0;
            while (&n % &dd).is_zero() {
                n /= &dd;
                e += 1;
            }
            bump(map, dd, e);
            if n.is_one() {
                return;
            }
            if is_prime(&n) {
                bump(map, n, 1);
                return;
            }
        }
    }
    split_big(n, map);
}

fn split_big(n: BigUint, map: &mut BTreeMap<BigUint, u32>) {
    if n.is_one() {
        return;
    }
    if let Some(small) = n.to_u64() {
        split_u64(small, map);
        return;
    }
    if is_prime(&n) {
        bump(map, n, 1);
        return;
    }
    let d = pollard_brent_big(&n);
    let rest = &n / &d;
    split_big(d, map);
    split_big(rest, map);
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// Returns a non-trivial factor of the odd composite `n`.
fn pollard_brent_u64(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    const BLOCK: u64 = 128;
    for c in 1u64.. {
        let f = |x: u64| ((mul_mod(x, x, n) as u128 + c as u128) % n as u128) as u64;
        let (mut y, mut r, mut q, mut g) = (2u64, 1u64, 1u64, 1u64);
        let mut x = y;
        let mut ys = y;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..BLOCK.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd_u64(q, n);
                k += BLOCK;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd_u64(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
    unreachable!("rho retries are unbounded")
}

fn pollard_brent_big(n: &BigUint) -> BigUint {
    if n.is_even() {
        return BigUint::from(2u8);
    }
    const BLOCK: u64 = 128;
    let one = BigUint::one();
    for c in 1u64.. {
        let c_big = BigUint::from(c);
        let f = |x: &BigUint| (x * x + &c_big) % n;
        let mut y = BigUint::from(2u8);
        let mut r = 1u64;
        let mut q = BigUint::one();
        let mut g = BigUint::one();
        let mut x = y.clone();
        let mut ys = y.clone();
        while g == one {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g == one {
                ys = y.clone();
                for _ in 0..BLOCK.min(r - k) {
                    y = f(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = (q * diff) % n;
                }
                g = q.gcd(n);
                k += BLOCK;
            }
            r *= 2;
        }
        if g == *n {
            loop {
                ys = f(&ys);
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                if g > one {
                    break;
                }
            }
        }
        if g != *n {
            return g;
        }
    }
    unreachable!("rho retries are unbounded")
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in MR_BASES_U64 {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'bases: for a in MR_BASES_U64 {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// splitmix64, used only to draw Miller-Rabin bases deterministically.
struct SplitMix(u64);

impl SplitMix {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
}

/// Primality test. Deterministic below 2^64, probabilistic with
/// [`MR_ROUNDS_BIG`] rounds above.
pub fn is_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    if n.is_even() {
        return false;
    }
    for p in MR_BASES_U64 {
        if (n % p).is_zero() {
            return false;
        }
    }
    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    let span = n - BigUint::from(3u8);
    let mut rng = SplitMix(n.iter_u64_digits().fold(0x5EED, |h, w| h ^ w.rotate_left(17)));
    let words = n.iter_u64_digits().len() + 1;

    'rounds: for round in 0..MR_ROUNDS_BIG {
        let a = if round == 0 {
            BigUint::from(2u8)
        } else {
            let raw = BigUint::new((0..words * 2).map(|_| rng.next() as u32).collect::<Vec<u32>>());
            raw % &span + BigUint::from(2u8)
        };
        let mut x = a.modpow(&d, n);
        if x == one || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_1 {
                continue 'rounds;
            }
        }
        return false;
    }
    true
}

/// Primes up to `limit` (inclusive) by the sieve of Eratosthenes.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let len = limit as usize + 1;
    let mut composite = alloc::vec![false; len];
    let mut out = Vec::new();
    for i in 2..len {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i.saturating_mul(i);
        while j < len {
            composite[j] = true;
            j += i;
        }
    }
    out
}

impl core::str::FromStr for Factorization {
    type Err = Error;

    /// Parses `"2^2 * 3"` style input (also accepts `*` without spaces).
    fn from_str(s: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for part in s.split('*').map(str::trim).filter(|p| !p.is_empty()) {
            let (p, e) = match part.split_once('^') {
                Some((p, e)) => (p.trim(), e.trim()),
                None => (part, "1"),
            };
            let p: BigUint = p
                .parse()
                .map_err(|_| Error::validation(alloc::format!("bad prime `{p}`")))?;
            let e: u32 = e
                .parse()
                .map_err(|_| Error::validation(alloc::format!("bad exponent `{e}`")))?;
            pairs.push((p, e));
        }
        Factorization::from_pairs(pairs)
    }
}
