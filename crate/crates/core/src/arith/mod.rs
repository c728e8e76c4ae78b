//! Exact number theory: lcm identities, factorization, multiplicative orders
//! and the prime-power correction factor `eta`.

pub mod factor;
pub mod modular;

use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

pub use factor::{factorize, factorize_u64, is_prime, is_prime_u64, primes_up_to, Factorization};
use modular::{pow_mod, pow_mod_big};

use crate::error::{Error, Result};

/// Default iteration cap for [`mult_order_bruteforce`].
pub const BRUTE_FORCE_CAP: u64 = 10_000_000;

/// Largest `bits(m) * order` for which [`OrderCertificate::mu`] will expand
/// `m^order` in full.
const MU_BIT_CAP: u64 = 1 << 28;

/// lcm of a non-empty list of positive integers.
///
/// Computed twice, by the product-over-gcd-of-cofactors identity and by
/// pairwise folding; disagreement is reported as an invariant violation.
pub fn lcm_many(values: &[BigUint]) -> Result<BigUint> {
    if values.is_empty() {
        return Err(Error::Usage("lcm_many needs at least one value".into()));
    }
    if values.iter().any(Zero::is_zero) {
        return Err(Error::domain("lcm_many requires every value >= 1"));
    }
    let by_formula = lcm_product_formula(values);
    let by_fold = lcm_fold(values);
    if by_formula != by_fold {
        return Err(Error::invariant(format!(
            "lcm routes disagree: product/gcd gives {by_formula}, folding gives {by_fold}"
        )));
    }
    Ok(by_fold)
}

/// `(a_1 ... a_n) / gcd(prod of all but a_1, ..., prod of all but a_n)`.
pub fn lcm_product_formula(values: &[BigUint]) -> BigUint {
    match values.len() {
        0 => BigUint::one(),
        1 => values[0].clone(),
        n => {
            // leave-one-out products via prefix/suffix products
            let mut prefix = Vec::with_capacity(n + 1);
            prefix.push(BigUint::one());
            for v in values {
                let next = prefix.last().unwrap() * v;
                prefix.push(next);
            }
            let mut suffix = alloc::vec![BigUint::one(); n + 1];
            for i in (0..n).rev() {
                suffix[i] = &suffix[i + 1] * &values[i];
            }
            let cofactor_gcd = (0..n)
                .map(|i| &prefix[i] * &suffix[i + 1])
                .fold(BigUint::zero(), |g, c| g.gcd(&c));
            &prefix[n] / cofactor_gcd
        }
    }
}

/// `lcm(lcm(a_1, ..., a_{n-1}), a_n)`.
pub fn lcm_fold(values: &[BigUint]) -> BigUint {
    values.iter().fold(BigUint::one(), |acc, v| acc.lcm(v))
}

/// Certified multiplicative order of `base` modulo `modulus`.
///
/// Carries the factorization of the order, so the minimality condition
/// `base^(order/q) != 1` can be re-checked for each prime `q | order`, and
/// `mu mod modulus` where `base^order = mu * modulus + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderCertificate {
    base: BigUint,
    modulus: BigUint,
    order: BigUint,
    order_factors: Factorization,
    mu_residue: BigUint,
}

impl OrderCertificate {
    pub fn base(&self) -> &BigUint {
        &self.base
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    pub fn order(&self) -> &BigUint {
        &self.order
    }

    pub fn order_factorization(&self) -> &Factorization {
        &self.order_factors
    }

    /// `mu mod modulus`. This is all `eta` needs, since gcd(mu, N) = gcd(mu mod N, N).
    pub fn mu_residue(&self) -> &BigUint {
        &self.mu_residue
    }

    /// The exact `mu = (base^order - 1) / modulus`.
    ///
    /// Refuses when `base^order` would be larger than 2^28 bits.
    pub fn mu(&self) -> Result<BigUint> {
        let bits = self.base.bits();
        let order = self.order.to_u64().unwrap_or(u64::MAX);
        let needed = bits.saturating_mul(order);
        if needed > MU_BIT_CAP {
            return Err(Error::ResourceCap {
                what: "exact mu",
                required: format!("{needed} bits"),
                cap: MU_BIT_CAP,
            });
        }
        let power = num_traits::pow::pow(self.base.clone(), order as usize);
        Ok((power - BigUint::one()) / &self.modulus)
    }

    /// Re-checks `base^order = 1` and minimality over the prime factors of the order.
    pub fn verify(&self) -> bool {
        let n = &self.modulus;
        let one_mod_n = BigUint::one() % n;
        if self.order_factors.value() != self.order {
            return false;
        }
        if pow_mod_big(&self.base, &self.order, n) != one_mod_n {
            return false;
        }
        if n.is_one() {
            return self.order.is_one();
        }
        self.order_factors
            .primes()
            .all(|q| pow_mod_big(&self.base, &(&self.order / q), n) != one_mod_n)
    }
}

fn check_unit(m: &BigUint, n: &BigUint) -> Result<()> {
    if n.is_zero() {
        return Err(Error::domain("modulus N must be >= 1"));
    }
    if !m.gcd(n).is_one() {
        return Err(Error::domain(format!(
            "gcd(m, N) must be 1, got gcd({m}, {n}) = {}",
            m.gcd(n)
        )));
    }
    Ok(())
}

/// Smallest `e >= 1` with `m^e = 1 (mod N)`, by successive multiplication.
///
/// Test oracle only; gives up after `cap` steps.
pub fn mult_order_bruteforce(m: &BigUint, n: &BigUint, cap: u64) -> Result<BigUint> {
    check_unit(m, n)?;
    if n.is_one() {
        return Ok(BigUint::one());
    }
    let exceeded = |steps: u64| Error::ResourceCap {
        what: "brute-force order",
        required: format!("more than {steps} multiplications"),
        cap,
    };
    if let (Some(n64), Some(m64)) = (n.to_u64(), (m % n).to_u64()) {
        let mut x = m64;
        let mut e = 1u64;
        while x != 1 {
            if e >= cap {
                return Err(exceeded(e));
            }
            x = modular::mul_mod(x, m64, n64);
            e += 1;
        }
        return Ok(BigUint::from(e));
    }
    let base = m % n;
    let mut x = base.clone();
    let mut e = 1u64;
    while !x.is_one() {
        if e >= cap {
            return Err(exceeded(e));
        }
        x = (x * &base) % n;
        e += 1;
    }
    Ok(BigUint::from(e))
}

/// Shrinks a known multiple of the order down to the order itself.
///
/// `multiple` must satisfy `m^multiple = 1 (mod n)`.
fn reduce_multiple(m: &BigUint, n: &BigUint, multiple: &Factorization) -> (BigUint, Factorization) {
    let one = BigUint::one() % n;
    let mut exps = multiple.to_map();
    let mut order = multiple.value();
    for (q, e) in multiple.factors() {
        for _ in 0..*e {
            let candidate = &order / q;
            if pow_mod_big(m, &candidate, n) == one {
                order = candidate;
                *exps.get_mut(q).unwrap() -= 1;
            } else {
                break;
            }
        }
    }
    (order, Factorization::from_map(exps))
}

/// Order of `m` modulo a prime `p`, reducing over the divisors of `p - 1`.
fn order_mod_prime(m: &BigUint, p: &BigUint) -> (BigUint, Factorization) {
    let phi = factor::factorize_any(&(p - BigUint::one()));
    reduce_multiple(m, p, &phi)
}

/// Order of `m` modulo `p^beta`.
///
/// Lifts one power at a time: if `m^o = 1 (mod p^(j-1))` then
/// `m^(o p) = 1 (mod p^j)`, so `ord(p^j)` is either `ord(p^(j-1))` or
/// `p * ord(p^(j-1))`.
fn order_mod_prime_power(m: &BigUint, p: &BigUint, beta: u32) -> (BigUint, Factorization) {
    let (mut order, mut factors) = order_mod_prime(m, p);
    let mut pk = p.clone();
    for _ in 1..beta {
        pk *= p;
        if !pow_mod_big(m, &order, &pk).is_one() {
            order *= p;
            factors = factors.mul(&Factorization::prime_power(p.clone(), 1));
        }
    }
    (order, factors)
}

fn mu_residue(m: &BigUint, n: &BigUint, order: &BigUint) -> BigUint {
    if n.is_one() {
        return BigUint::zero();
    }
    let n2 = n * n;
    let lifted = pow_mod_big(m, order, &n2);
    // lifted = 1 + (mu mod N) * N
    (lifted + &n2 - BigUint::one()) % &n2 / n
}

/// Multiplicative order of `m` modulo `N` with certificate.
///
/// Factors `N`, computes the order modulo each prime power and combines the
/// pieces with [`lcm_many`] (Chinese remainder theorem). `ord_m(1) = 1`.
pub fn mult_order(m: &BigUint, n: &BigUint) -> Result<OrderCertificate> {
    let factors = if n.is_zero() {
        Factorization::one()
    } else {
        factor::factorize_any(n)
    };
    mult_order_factored(m, n, &factors)
}

/// [`mult_order`] with the factorization of `N` supplied by the caller.
pub fn mult_order_factored(m: &BigUint, n: &BigUint, n_factors: &Factorization) -> Result<OrderCertificate> {
    check_unit(m, n)?;
    if n_factors.value() != *n {
        return Err(Error::validation(format!(
            "supplied factorization {n_factors} is not {n}"
        )));
    }
    if n.is_one() {
        return Ok(OrderCertificate {
            base: m.clone(),
            modulus: n.clone(),
            order: BigUint::one(),
            order_factors: Factorization::one(),
            mu_residue: BigUint::zero(),
        });
    }
    let mut local_orders = Vec::with_capacity(n_factors.factors().len());
    let mut order_factors = Factorization::one();
    for (p, beta) in n_factors.factors() {
        let (o, f) = order_mod_prime_power(m, p, *beta);
        local_orders.push(o);
        order_factors = order_factors.lcm(&f);
    }
    let order = lcm_many(&local_orders)?;
    if order != order_factors.value() {
        return Err(Error::invariant(format!(
            "order {order} disagrees with its tracked factorization {order_factors}"
        )));
    }
    let mu_residue = mu_residue(m, n, &order);
    Ok(OrderCertificate {
        base: m.clone(),
        modulus: n.clone(),
        order,
        order_factors,
        mu_residue,
    })
}

/// Order of `m` mod `N` given a known multiple of it (as a factorization).
///
/// Cheap when the multiple is structured, e.g. `2^k` for `N = m^(2^k) - 1`.
pub fn mult_order_from_multiple(m: &BigUint, n: &BigUint, multiple: &Factorization) -> Result<OrderCertificate> {
    check_unit(m, n)?;
    let one = BigUint::one() % n;
    if pow_mod_big(m, &multiple.value(), n) != one {
        return Err(Error::domain(format!(
            "{} is not a multiple of ord_{m}({n})",
            multiple.value()
        )));
    }
    let (order, order_factors) = if n.is_one() {
        (BigUint::one(), Factorization::one())
    } else {
        reduce_multiple(m, n, multiple)
    };
    let mu_residue = mu_residue(m, n, &order);
    Ok(OrderCertificate {
        base: m.clone(),
        modulus: n.clone(),
        order,
        order_factors,
        mu_residue,
    })
}

/// `eta_N(k)`: 1 for `k = 1`, `N^(k-1) / gcd(mu, N)` for `k >= 2`.
pub fn eta(m: &BigUint, n: &BigUint, k: u32) -> Result<BigUint> {
    if k == 0 {
        return Err(Error::domain("eta is defined for k >= 1"));
    }
    let cert = mult_order(m, n)?;
    Ok(eta_from_certificate(&cert, k))
}

/// `eta` reusing an existing certificate for `ord_m(N)`.
pub fn eta_from_certificate(cert: &OrderCertificate, k: u32) -> BigUint {
    if k <= 1 {
        return BigUint::one();
    }
    let n = cert.modulus();
    let g = cert.mu_residue().gcd(n);
    n.pow(k - 1) / g
}

/// `m^e mod n` for word-sized operands.
pub fn pow_mod_u64(m: u64, e: u64, n: u64) -> u64 {
    pow_mod(m, e, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(x: u64) -> BigUint {
        BigUint::from(x)
    }

    fn ord(m: u64, n: u64) -> u64 {
        mult_order(&big(m), &big(n)).unwrap().order().to_u64().unwrap()
    }

    #[test]
    fn lcm_examples() {
        assert_eq!(lcm_many(&[big(6)]).unwrap(), big(6));
        assert_eq!(lcm_many(&[big(4), big(6)]).unwrap(), big(12));
        // 24 / gcd(6, 8, 12) = 24 / 2
        assert_eq!(lcm_product_formula(&[big(2), big(3), big(4)]), big(12));
        assert_eq!(lcm_many(&[big(2), big(3), big(4)]).unwrap(), big(12));
    }

    #[test]
    fn lcm_errors() {
        assert!(matches!(lcm_many(&[]), Err(Error::Usage(_))));
        assert!(matches!(lcm_many(&[big(0), big(3)]), Err(Error::Domain(_))));
    }

    #[test]
    fn bruteforce_examples() {
        assert_eq!(
            mult_order_bruteforce(&big(2), &big(5), BRUTE_FORCE_CAP).unwrap(),
            big(4)
        );
        assert_eq!(
            mult_order_bruteforce(&big(3), &big(2), BRUTE_FORCE_CAP).unwrap(),
            big(1)
        );
        assert_eq!(
            mult_order_bruteforce(&big(2), &big(9), BRUTE_FORCE_CAP).unwrap(),
            big(6)
        );
        assert_eq!(
            mult_order_bruteforce(&big(7), &big(1), BRUTE_FORCE_CAP).unwrap(),
            big(1)
        );
        assert!(matches!(
            mult_order_bruteforce(&big(2), &big(6), BRUTE_FORCE_CAP),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            mult_order_bruteforce(&big(2), &big(1_000_003), 10),
            Err(Error::ResourceCap { .. })
        ));
    }

    #[test]
    fn structural_examples() {
        let c = mult_order(&big(2), &big(25)).unwrap();
        assert_eq!(c.order(), &big(20));
        assert!(c.verify());
        assert_eq!(ord(2, 255), 8);
        assert_eq!(ord(2, 5), 4);
        assert_eq!(ord(5, 1), 1);
        let c = mult_order(&big(2), &big(5)).unwrap();
        assert_eq!(c.mu().unwrap(), big(3));
        assert!(matches!(mult_order(&big(6), &big(4)), Err(Error::Domain(_))));
        assert!(matches!(mult_order(&big(6), &big(0)), Err(Error::Domain(_))));
    }

    #[test]
    fn m_squared_minus_one_has_order_two_and_mu_one() {
        for m in 2..40u64 {
            let c = mult_order(&big(m), &big(m * m - 1)).unwrap();
            assert_eq!(c.order(), &big(2), "m = {m}");
            assert_eq!(c.mu().unwrap(), big(1), "m = {m}");
        }
    }

    #[test]
    fn matches_bruteforce_small() {
        for m in [2u64, 3, 7, 10] {
            for n in 1..600u64 {
                if m.gcd(&n) != 1 {
                    continue;
                }
                let oracle = mult_order_bruteforce(&big(m), &big(n), BRUTE_FORCE_CAP).unwrap();
                let cert = mult_order(&big(m), &big(n)).unwrap();
                assert_eq!(cert.order(), &oracle, "m = {m}, N = {n}");
                assert!(cert.verify());
            }
        }
    }

    #[test]
    fn prime_power_lifting_handles_two_and_wieferich() {
        // ord_3(2^k): 1, 2, 2, 4, 8
        let expect = [1u64, 2, 2, 4, 8];
        for (i, e) in expect.iter().enumerate() {
            assert_eq!(ord(3, 1 << (i + 1)), *e);
        }
        // 1093 is a base-2 Wieferich prime: ord_2(1093^2) = ord_2(1093) = 364
        assert_eq!(ord(2, 1093), 364);
        assert_eq!(ord(2, 1093 * 1093), 364);
    }

    #[test]
    fn from_multiple() {
        let n = big((1u64 << 32) - 1);
        let c = mult_order_from_multiple(&big(2), &n, &factorize_u64(32)).unwrap();
        assert_eq!(c.order(), &big(32));
        assert!(c.verify());
        assert!(mult_order_from_multiple(&big(2), &n, &factorize_u64(12)).is_err());
    }

    #[test]
    fn eta_examples() {
        assert_eq!(eta(&big(2), &big(5), 1).unwrap(), big(1));
        assert_eq!(eta(&big(2), &big(5), 2).unwrap(), big(5));
        assert_eq!(eta(&big(2), &big(3), 4).unwrap(), big(27));
        assert!(matches!(eta(&big(2), &big(5), 0), Err(Error::Domain(_))));
    }

    #[test]
    fn mu_residue_agrees_with_exact_mu() {
        for m in [2u64, 3, 5] {
            for n in 2..120u64 {
                if m.gcd(&n) != 1 {
                    continue;
                }
                let c = mult_order(&big(m), &big(n)).unwrap();
                let mu = c.mu().unwrap();
                assert_eq!(&mu % big(n), *c.mu_residue());
                assert_eq!(big(m).pow(c.order().to_u32().unwrap()), mu * big(n) + big(1));
            }
        }
    }
}
