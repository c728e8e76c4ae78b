//! Finite quotients `Z/N ⋊_m Z/L` of `BS(1,m)`.
//!
//! Reduction modulo `N` sends `(k, num / m^e)` to `(num * m^-e mod N, k mod L)`.
//! With `L = ord_m(N)` the kernel is the congruence subgroup `G_m(N)`; any
//! multiple `L` of `ord_m(N)` gives the larger quotients used by the covering
//! construction.

use alloc::format;
use alloc::string::String;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::modular::{mod_inverse, pow_mod_big, residue, residue_i64};
use crate::arith::{mult_order, OrderCertificate};
use crate::bs::{BsElem, Letter};
use crate::error::{Error, Result};

/// `Z/N ⋊_m Z/L`, where `k` acts on `Z/N` by multiplication with `m^k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientGroup {
    m: BigUint,
    n: BigUint,
    l: BigUint,
    m_inv: BigUint,
    order: OrderCertificate,
}

/// `(x mod N, k mod L)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuotientElem {
    pub x: BigUint,
    pub k: BigUint,
}

impl QuotientElem {
    pub fn new(x: impl Into<BigUint>, k: impl Into<BigUint>) -> Self {
        QuotientElem {
            x: x.into(),
            k: k.into(),
        }
    }
}

/// `G_m / G_m(N) = Z/N ⋊_m Z/ord_m(N)`.
pub fn build_quotient(m: &BigUint, n: &BigUint) -> Result<QuotientGroup> {
    let order = mult_order(m, n)?;
    let l = order.order().clone();
    QuotientGroup::assemble(m, n, l, order)
}

/// `Z/N ⋊_m Z/L` for a multiple `L` of `ord_m(N)`.
pub fn build_covering_quotient(m: &BigUint, n: &BigUint, l: &BigUint) -> Result<QuotientGroup> {
    let order = mult_order(m, n)?;
    if l.is_zero() || !l.is_multiple_of(order.order()) {
        return Err(Error::domain(format!(
            "L = {l} must be a positive multiple of ord_{m}({n}) = {}",
            order.order()
        )));
    }
    QuotientGroup::assemble(m, n, l.clone(), order)
}

impl QuotientGroup {
    fn assemble(m: &BigUint, n: &BigUint, l: BigUint, order: OrderCertificate) -> Result<Self> {
        if *m < BigUint::from(2u8) {
            return Err(Error::domain(format!("m must be >= 2, got {m}")));
        }
        let m_inv = mod_inverse(m, n).ok_or_else(|| Error::domain(format!("m = {m} is not invertible mod {n}")))?;
        Ok(QuotientGroup {
            m: m.clone(),
            n: n.clone(),
            l,
            m_inv,
            order,
        })
    }

    pub fn m(&self) -> &BigUint {
        &self.m
    }

    pub fn modulus(&self) -> &BigUint {
        &self.n
    }

    /// Size of the cyclic `t`-part.
    pub fn torsion(&self) -> &BigUint {
        &self.l
    }

    pub fn m_inv(&self) -> &BigUint {
        &self.m_inv
    }

    /// Certificate for `ord_m(N)`.
    pub fn order_certificate(&self) -> &OrderCertificate {
        &self.order
    }

    /// `N * L`.
    pub fn size(&self) -> BigUint {
        &self.n * &self.l
    }

    /// Whether this is the congruence quotient (`L = ord_m(N)`).
    pub fn is_congruence_quotient(&self) -> bool {
        self.l == *self.order.order()
    }

    pub fn identity(&self) -> QuotientElem {
        QuotientElem::new(BigUint::zero(), BigUint::zero())
    }

    pub fn contains(&self, u: &QuotientElem) -> bool {
        u.x < self.n && u.k < self.l
    }

    /// Reduces arbitrary coordinates into range.
    pub fn elem(&self, x: &BigUint, k: &BigUint) -> QuotientElem {
        QuotientElem::new(x % &self.n, k % &self.l)
    }

    pub fn generator(&self, letter: Letter) -> QuotientElem {
        match letter {
            Letter::A => self.elem(&BigUint::one(), &BigUint::zero()),
            Letter::AInv => QuotientElem::new(residue_i64(-1, &self.n), BigUint::zero()),
            Letter::T => self.elem(&BigUint::zero(), &BigUint::one()),
            Letter::TInv => QuotientElem::new(BigUint::zero(), residue_i64(-1, &self.l)),
        }
    }

    /// `m^k mod N`.
    pub fn m_power(&self, k: &BigUint) -> BigUint {
        pow_mod_big(&self.m, k, &self.n)
    }

    /// `(x1, k1)(x2, k2) = (x1 + m^k1 x2, k1 + k2)`.
    pub fn mul(&self, u: &QuotientElem, v: &QuotientElem) -> QuotientElem {
        let x = (&u.x + self.m_power(&u.k) * &v.x) % &self.n;
        let k = (&u.k + &v.k) % &self.l;
        QuotientElem { x, k }
    }

    /// `(x, k)^-1 = (-m^-k x, -k)`.
    pub fn inv(&self, u: &QuotientElem) -> QuotientElem {
        let scaled = pow_mod_big(&self.m_inv, &u.k, &self.n) * &u.x % &self.n;
        let x = if scaled.is_zero() { scaled } else { &self.n - scaled };
        let k = if u.k.is_zero() { BigUint::zero() } else { &self.l - &u.k };
        QuotientElem { x, k }
    }

    /// The reduction homomorphism `BS(1,m) -> Z/N ⋊ Z/L`.
    pub fn reduce(&self, g: &BsElem) -> QuotientElem {
        let num = residue(g.r.num(), &self.n);
        let scale = pow_mod_big(&self.m_inv, &BigUint::from(g.r.exp()), &self.n);
        let x = num * scale % &self.n;
        let k = residue_i64(g.k, &self.l);
        QuotientElem { x, k }
    }

    /// `(x, k mod L) -> (x, k mod L')` onto a quotient with the same `m`, `N`
    /// and `L' | L`.
    pub fn project(&self, target: &QuotientGroup, u: &QuotientElem) -> Result<QuotientElem> {
        if target.m != self.m || target.n != self.n || !self.l.is_multiple_of(&target.l) {
            return Err(Error::domain(format!(
                "cannot project {} onto {}",
                self.label(),
                target.label()
            )));
        }
        Ok(QuotientElem::new(u.x.clone(), &u.k % &target.l))
    }

    /// Dense index `x + N k`, when it fits in a `u64`.
    pub fn index_of(&self, u: &QuotientElem) -> Option<u64> {
        let idx = &u.x + &self.n * &u.k;
        idx.to_u64()
    }

    /// Inverse of [`index_of`](Self::index_of).
    pub fn elem_at(&self, index: u64) -> QuotientElem {
        let idx = BigUint::from(index);
        let (k, x) = idx.div_rem(&self.n);
        QuotientElem { x, k }
    }

    /// Human label such as `Z/5 ⋊_2 Z/4`.
    pub fn label(&self) -> String {
        format!("Z/{} ⋊_{} Z/{}", self.n, self.m, self.l)
    }
}

/// Is `g` in the congruence subgroup `G_m(N)`? Decided via the quotient.
pub fn is_congruence_member(g: &BsElem, m: &BigUint, n: &BigUint) -> Result<bool> {
    let q = build_quotient(m, n)?;
    Ok(q.reduce(g) == q.identity())
}

/// Same predicate from the defining conditions: `m^k = 1 (mod N)` and
/// `r in N Z[1/m]` (equivalently `N | num`, since `gcd(m, N) = 1`).
pub fn congruence_conditions(g: &BsElem, m: &BigUint, n: &BigUint) -> Result<bool> {
    if n.is_zero() || !m.gcd(n).is_one() {
        return Err(Error::domain(format!("gcd(m, N) must be 1 for m = {m}, N = {n}")));
    }
    let base = if g.k >= 0 {
        m.clone()
    } else {
        mod_inverse(m, n).unwrap_or_default()
    };
    let power_ok = pow_mod_big(&base, &BigUint::from(g.k.unsigned_abs()), n) == BigUint::one() % n;
    let translation_ok = residue(g.r.num(), n).is_zero();
    Ok(power_ok && translation_ok)
}
