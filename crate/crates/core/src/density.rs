//! Prime sets, truncated primitive densities, Euler products and
//! `ord_m(N) / N` scans over `P`-smooth moduli.
//!
//! Densities here are finite truncations: `natural_density_partial` counts up
//! to `x`, `analytic_density_partial` sums `p^-s` up to a cutoff. Neither is
//! the limit.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{is_prime_u64, mult_order_factored, primes_up_to, Factorization};
use crate::error::{Error, Result};

/// Largest sieve bound used for prime enumeration.
pub const SIEVE_CAP: u64 = 100_000_000;

/// Largest number of smooth moduli a single scan may enumerate.
pub const SMOOTH_CAP: u64 = 10_000_000;

pub type Rational = Ratio<BigUint>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PrimeSet {
    All,
    /// Sorted, deduplicated primes.
    Explicit(Vec<u64>),
    /// Primes `p` with `p = residue (mod modulus)`.
    Residue {
        modulus: u64,
        residue: u64,
    },
}

impl PrimeSet {
    pub fn explicit(mut primes: Vec<u64>) -> Result<Self> {
        if let Some(bad) = primes.iter().find(|p| !is_prime_u64(**p)) {
            return Err(Error::validation(format!("{bad} is not prime")));
        }
        primes.sort_unstable();
        primes.dedup();
        Ok(PrimeSet::Explicit(primes))
    }

    pub fn residue_class(modulus: u64, residue: u64) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::validation("residue class modulus must be >= 1"));
        }
        Ok(PrimeSet::Residue {
            modulus,
            residue: residue % modulus,
        })
    }

    /// Membership of a prime `p`.
    pub fn contains(&self, p: u64) -> bool {
        match self {
            PrimeSet::All => true,
            PrimeSet::Explicit(list) => list.binary_search(&p).is_ok(),
            PrimeSet::Residue { modulus, residue } => p % modulus == *residue,
        }
    }

    /// Members `<= x` in increasing order.
    pub fn members_up_to(&self, x: u64) -> Result<Vec<u64>> {
        if let PrimeSet::Explicit(list) = self {
            return Ok(list.iter().copied().take_while(|p| *p <= x).collect());
        }
        Ok(sieve(x)?.into_iter().filter(|p| self.contains(*p)).collect())
    }

    /// The first `count` members. The flag is false when the set ran out
    /// (or enumeration hit [`SIEVE_CAP`]) first.
    pub fn first(&self, count: usize) -> (Vec<u64>, bool) {
        let finite_bound = match self {
            PrimeSet::Explicit(list) => {
                let out: Vec<u64> = list.iter().copied().take(count).collect();
                let complete = out.len() == count;
                return (out, complete);
            }
            // a class sharing a factor with its modulus holds at most one prime
            PrimeSet::Residue { modulus, residue } if residue.gcd(modulus) != 1 => Some(*modulus),
            _ => None,
        };
        let mut limit = finite_bound.unwrap_or(1024).max(2);
        loop {
            let found: Vec<u64> = primes_up_to(limit)
                .into_iter()
                .filter(|p| self.contains(*p))
                .take(count)
                .collect();
            if found.len() == count || finite_bound.is_some() || limit >= SIEVE_CAP {
                let complete = found.len() == count;
                return (found, complete);
            }
            limit = (limit * 4).min(SIEVE_CAP);
        }
    }
}

impl fmt::Display for PrimeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrimeSet::All => f.write_str("all"),
            PrimeSet::Explicit(list) => {
                let parts: Vec<_> = list.iter().map(|p| format!("{p}")).collect();
                write!(f, "{{{}}}", parts.join(","))
            }
            PrimeSet::Residue { modulus, residue } => write!(f, "{residue} mod {modulus}"),
        }
    }
}

impl FromStr for PrimeSet {
    type Err = Error;

    /// `"all"`, `"none"`, `"3,5,7"` or `"1 mod 4"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::validation(format!("cannot parse prime set {s:?}; use all, none, 3,5,7 or 1 mod 4"));
        match s {
            "all" => return Ok(PrimeSet::All),
            "none" | "" | "{}" => return Ok(PrimeSet::Explicit(Vec::new())),
            _ => {}
        }
        if let Some((r, q)) = s.split_once("mod") {
            let r = r.trim().parse().map_err(|_| bad())?;
            let q = q.trim().parse().map_err(|_| bad())?;
            return PrimeSet::residue_class(q, r);
        }
        let body = s.trim_start_matches('{').trim_end_matches('}');
        let primes = body
            .split(',')
            .map(|p| p.trim().parse::<u64>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        PrimeSet::explicit(primes)
    }
}

fn sieve(x: u64) -> Result<Vec<u64>> {
    if x > SIEVE_CAP {
        return Err(Error::ResourceCap {
            what: "prime sieve",
            required: format!("bound {x}"),
            cap: SIEVE_CAP,
        });
    }
    Ok(primes_up_to(x))
}

/// `#{p <= x : p in P} / #{p <= x}`.
pub fn natural_density_partial(set: &PrimeSet, x: u64) -> Result<Rational> {
    if x < 2 {
        return Err(Error::domain(format!("x must be >= 2, got {x}")));
    }
    let primes = sieve(x)?;
    let hits = primes.iter().filter(|p| set.contains(**p)).count();
    Ok(Ratio::new(BigUint::from(hits), BigUint::from(primes.len())))
}

/// `sum_{p in P, p <= cutoff} p^-s / sum_{p <= cutoff} p^-s`, a truncation
/// of the analytic density.
pub fn analytic_density_partial(set: &PrimeSet, s: f64, cutoff: u64) -> Result<f64> {
    if !s.is_finite() || s <= 1.0 {
        return Err(Error::domain(format!("s must be a finite real > 1, got {s}")));
    }
    if cutoff < 2 {
        return Err(Error::domain(format!("cutoff must be >= 2, got {cutoff}")));
    }
    let primes = sieve(cutoff)?;
    // smallest terms first
    let (mut num, mut den) = (0.0, 0.0);
    for &p in primes.iter().rev() {
        let term = libm::pow(p as f64, -s);
        den += term;
        if set.contains(p) {
            num += term;
        }
    }
    Ok(num / den)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EulerProduct {
    pub primes: Vec<u64>,
    /// `prod (1 - 1/p)` over `primes`.
    pub value: Rational,
    /// Fewer members than requested were available.
    pub short: bool,
}

impl EulerProduct {
    /// Running products after each prime.
    pub fn partials(&self) -> Vec<Rational> {
        let mut acc = Rational::one();
        self.primes
            .iter()
            .map(|p| {
                acc = &acc * euler_factor(*p);
                acc.clone()
            })
            .collect()
    }
}

fn euler_factor(p: u64) -> Rational {
    Ratio::new(BigUint::from(p - 1), BigUint::from(p))
}

pub fn euler_product_partial(set: &PrimeSet, count: usize) -> Result<EulerProduct> {
    if count == 0 {
        return Err(Error::domain("count must be >= 1"));
    }
    let (primes, complete) = set.first(count);
    let value = primes.iter().fold(Rational::one(), |acc, p| acc * euler_factor(*p));
    Ok(EulerProduct {
        primes,
        value,
        short: !complete,
    })
}

/// `prod (1 - 1/p)` over the primes of `N`, i.e. `phi(N) / N`.
pub fn totient_ratio_bound(n: &Factorization) -> Rational {
    n.primes()
        .fold(Rational::one(), |acc, p| acc * Ratio::new(p - 1u8, p.clone()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanRow {
    pub n: BigUint,
    pub order: BigUint,
    pub ratio: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatioScan {
    pub min_ratio: Rational,
    /// Smallest `N` attaining the minimum.
    pub argmin: BigUint,
    pub rows: Vec<ScanRow>,
}

/// Checks that every member of `primes` is prime and coprime to `m`.
pub fn validate_scan_primes(m: &BigUint, primes: &[u64]) -> Result<Vec<u64>> {
    let PrimeSet::Explicit(list) = PrimeSet::explicit(primes.to_vec())? else {
        unreachable!()
    };
    if let Some(p) = list.iter().find(|p| (m % **p).to_u64() == Some(0)) {
        return Err(Error::domain(format!(
            "prime {p} divides m = {m}; scan primes must be coprime to m"
        )));
    }
    Ok(list)
}

/// All `N <= bound` whose prime factors lie in `primes`, with their
/// factorizations, sorted by `N`. Includes `N = 1`.
pub fn smooth_numbers(primes: &[u64], bound: &BigUint) -> Result<Vec<(BigUint, Factorization)>> {
    fn walk(
        primes: &[u64],
        bound: &BigUint,
        n: BigUint,
        exps: &mut Vec<(BigUint, u32)>,
        out: &mut Vec<(BigUint, Factorization)>,
    ) -> Result<()> {
        if out.len() as u64 >= SMOOTH_CAP {
            return Err(Error::ResourceCap {
                what: "smooth-number scan",
                required: format!("more than {SMOOTH_CAP} moduli below {bound}"),
                cap: SMOOTH_CAP,
            });
        }
        out.push((n.clone(), Factorization::from_pairs(exps.clone())?));
        for (i, &p) in primes.iter().enumerate() {
            let mut next = &n * p;
            let mut e = 0;
            while next <= *bound {
                e += 1;
                exps.push((BigUint::from(p), e));
                walk(&primes[i + 1..], bound, next.clone(), exps, out)?;
                exps.pop();
                next *= p;
            }
        }
        Ok(())
    }
    let mut out = Vec::new();
    if *bound >= BigUint::one() {
        walk(primes, bound, BigUint::one(), &mut Vec::new(), &mut out)?;
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out)
}

pub fn scan_row(m: &BigUint, n: &BigUint, factors: &Factorization) -> Result<ScanRow> {
    let order = mult_order_factored(m, n, factors)?.order().clone();
    Ok(ScanRow {
        ratio: Ratio::new(order.clone(), n.clone()),
        n: n.clone(),
        order,
    })
}

/// Minimum over rows sorted by `N`; `None` for no rows.
pub fn summarize_scan(rows: Vec<ScanRow>) -> Option<RatioScan> {
    let best = rows.iter().min_by(|a, b| a.ratio.cmp(&b.ratio).then(a.n.cmp(&b.n)))?;
    Some(RatioScan {
        min_ratio: best.ratio.clone(),
        argmin: best.n.clone(),
        rows,
    })
}

/// Exact `min ord_m(N) / N` over `P`-smooth `N <= bound`. Certifies the
/// scanned range only.
pub fn ratio_scan(m: &BigUint, primes: &[u64], bound: &BigUint) -> Result<RatioScan> {
    let primes = validate_scan_primes(m, primes)?;
    if bound.is_zero() {
        return Err(Error::domain("bound must be >= 1"));
    }
    let rows = smooth_numbers(&primes, bound)?
        .iter()
        .map(|(n, f)| scan_row(m, n, f))
        .collect::<Result<Vec<_>>>()?;
    summarize_scan(rows).ok_or_else(|| Error::invariant("scan produced no rows"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{factorize_u64, mult_order};
    use alloc::vec;

    fn big(x: u64) -> BigUint {
        BigUint::from(x)
    }

    fn frac(a: u64, b: u64) -> Rational {
        Ratio::new(big(a), big(b))
    }

    #[test]
    fn prime_set_parsing() {
        assert_eq!("all".parse::<PrimeSet>().unwrap(), PrimeSet::All);
        assert_eq!("none".parse::<PrimeSet>().unwrap(), PrimeSet::Explicit(vec![]));
        assert_eq!("5, 3,5".parse::<PrimeSet>().unwrap(), PrimeSet::Explicit(vec![3, 5]));
        assert_eq!(
            "1 mod 4".parse::<PrimeSet>().unwrap(),
            PrimeSet::Residue { modulus: 4, residue: 1 }
        );
        assert!(matches!("4,5".parse::<PrimeSet>(), Err(Error::Validation(_))));
        assert!(matches!("x".parse::<PrimeSet>(), Err(Error::Validation(_))));
    }

    #[test]
    fn natural_density_examples() {
        assert_eq!(natural_density_partial(&PrimeSet::All, 100).unwrap(), frac(1, 1));
        let one_mod_four = PrimeSet::residue_class(4, 1).unwrap();
        assert_eq!(natural_density_partial(&one_mod_four, 100).unwrap(), frac(11, 25));
        assert_eq!(
            natural_density_partial(&PrimeSet::Explicit(vec![]), 100).unwrap(),
            frac(0, 1)
        );
        assert!(matches!(
            natural_density_partial(&PrimeSet::All, 1),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn analytic_density_examples() {
        assert_eq!(analytic_density_partial(&PrimeSet::All, 1.5, 1000).unwrap(), 1.0);
        let two = PrimeSet::explicit(vec![2]).unwrap();
        let v = analytic_density_partial(&two, 2.0, 10).unwrap();
        let expect = 0.25 / (0.25 + 1.0 / 9.0 + 1.0 / 25.0 + 1.0 / 49.0);
        assert!((v - expect).abs() < 1e-15);
        assert_eq!(crate::real::format_f64(v), "0.593092689225");
        assert_eq!(
            analytic_density_partial(&PrimeSet::Explicit(vec![]), 2.0, 10).unwrap(),
            0.0
        );
        assert!(matches!(
            analytic_density_partial(&PrimeSet::All, 1.0, 10),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            analytic_density_partial(&PrimeSet::All, f64::NAN, 10),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn euler_products() {
        let p = euler_product_partial(&PrimeSet::explicit(vec![2, 3, 5]).unwrap(), 3).unwrap();
        assert_eq!(p.value, frac(4, 15));
        assert!(!p.short);
        let p = euler_product_partial(&PrimeSet::explicit(vec![2]).unwrap(), 1).unwrap();
        assert_eq!(p.value, frac(1, 2));
        let p = euler_product_partial(&PrimeSet::explicit(vec![2]).unwrap(), 3).unwrap();
        assert!(p.short);
        assert_eq!(p.primes, vec![2]);
        let all = euler_product_partial(&PrimeSet::All, 100).unwrap();
        assert_eq!(all.primes.len(), 100);
        assert_eq!(all.primes[99], 541);
        assert!(all.partials().windows(2).all(|w| w[1] < w[0]));
        assert!(euler_product_partial(&PrimeSet::All, 0).is_err());
        let class = PrimeSet::residue_class(4, 2).unwrap();
        let p = euler_product_partial(&class, 2).unwrap();
        assert_eq!((p.primes, p.short), (vec![2], true));
    }

    #[test]
    fn totient_ratio_examples() {
        assert_eq!(totient_ratio_bound(&factorize_u64(7)), frac(6, 7));
        assert_eq!(totient_ratio_bound(&factorize_u64(45)), frac(8, 15));
        let ord = mult_order(&big(2), &big(45)).unwrap().order().clone();
        assert_eq!(ord, big(12));
        assert!(Ratio::new(ord, big(45)) <= frac(8, 15));
    }

    #[test]
    fn ratio_scan_examples() {
        let scan = ratio_scan(&big(2), &[3], &big(30)).unwrap();
        let ns: Vec<_> = scan.rows.iter().map(|r| r.n.clone()).collect();
        assert_eq!(ns, vec![big(1), big(3), big(9), big(27)]);
        let orders: Vec<_> = scan.rows.iter().map(|r| r.order.clone()).collect();
        assert_eq!(orders, vec![big(1), big(2), big(6), big(18)]);
        assert_eq!((scan.min_ratio, scan.argmin), (frac(2, 3), big(3)));

        let scan = ratio_scan(&big(2), &[5], &big(5)).unwrap();
        assert_eq!(scan.min_ratio, frac(4, 5));

        let scan = ratio_scan(&big(2), &[], &big(100)).unwrap();
        assert_eq!((scan.rows.len(), scan.min_ratio), (1, frac(1, 1)));

        assert!(matches!(ratio_scan(&big(6), &[3, 5], &big(100)), Err(Error::Domain(_))));
    }

    #[test]
    fn smooth_enumeration_is_complete() {
        let got: Vec<u64> = smooth_numbers(&[3, 5], &big(200))
            .unwrap()
            .iter()
            .map(|(n, f)| {
                assert_eq!(&f.value(), n);
                n.to_u64().unwrap()
            })
            .collect();
        let want: Vec<u64> = (1..=200u64)
            .filter(|n| {
                let mut x = *n;
                for p in [3, 5] {
                    while x % p == 0 {
                        x /= p;
                    }
                }
                x == 1
            })
            .collect();
        assert_eq!(got, want);
    }

    #[test]
    fn scan_minimum_stabilizes() {
        let m = big(2);
        let small = ratio_scan(&m, &[3, 5], &big(100_000)).unwrap();
        let large = ratio_scan(&m, &[3, 5], &big(1_000_000)).unwrap();
        assert!(large.min_ratio <= small.min_ratio);
        assert_eq!(small.min_ratio, large.min_ratio);
    }
}
