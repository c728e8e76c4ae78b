//! Exact arithmetic in `BS(1,m)`.
//!
//! Elements are pairs `(k, r)` standing for the matrix `[[m^k, r], [0, 1]]`
//! with `r` in `Z[1/m]`. The generators are `a = (0, 1)` and `t = (1, 0)`,
//! so `t a t^-1 = a^m`.
//!
//! Words are written over `{a, A, t, T}` with capitals for inverses.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::modular::abs_big;
use crate::error::{Error, Result};
use crate::real::ln_biguint;

/// An element `num / m^exp` of `Z[1/m]` in canonical form: `exp = 0` or
/// `m` does not divide `num`. Zero is `0 / m^0`.
///
/// The base `m` is not stored; every operation takes it explicitly and the
/// [`BsGroup`] wrapper keeps it consistent.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RingElem {
    num: BigInt,
    exp: u32,
}

impl RingElem {
    pub fn zero() -> Self {
        RingElem {
            num: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn integer(n: impl Into<BigInt>) -> Self {
        RingElem { num: n.into(), exp: 0 }
    }

    /// `num / m^exp`, canonicalized.
    pub fn new(num: impl Into<BigInt>, exp: u32, m: &BigInt) -> Self {
        let mut r = RingElem { num: num.into(), exp };
        r.canonicalize(m);
        r
    }

    pub fn num(&self) -> &BigInt {
        &self.num
    }

    pub fn exp(&self) -> u32 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_canonical(&self, m: &BigInt) -> bool {
        if self.num.is_zero() {
            return self.exp == 0;
        }
        self.exp == 0 || !self.num.is_multiple_of(m)
    }

    fn canonicalize(&mut self, m: &BigInt) {
        if self.num.is_zero() {
            self.exp = 0;
            return;
        }
        while self.exp > 0 {
            let (q, rem) = self.num.div_rem(m);
            if !rem.is_zero() {
                break;
            }
            self.num = q;
            self.exp -= 1;
        }
    }

    pub fn neg(&self) -> Self {
        RingElem {
            num: -&self.num,
            exp: self.exp,
        }
    }

    pub fn add(&self, other: &RingElem, m: &BigInt) -> Self {
        let exp = self.exp.max(other.exp);
        let lhs = &self.num * m.pow(exp - self.exp);
        let rhs = &other.num * m.pow(exp - other.exp);
        RingElem::new(lhs + rhs, exp, m)
    }

    /// `self * m^k` for any integer `k`.
    pub fn shift(&self, k: i64, m: &BigInt) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        if k >= 0 {
            let k = k as u64;
            if k <= self.exp as u64 {
                RingElem {
                    num: self.num.clone(),
                    exp: self.exp - k as u32,
                }
            } else {
                let lift = u32::try_from(k - self.exp as u64).expect("exponent overflow");
                RingElem {
                    num: &self.num * m.pow(lift),
                    exp: 0,
                }
            }
        } else {
            let down = u32::try_from(-k).expect("exponent overflow");
            RingElem::new(self.num.clone(), self.exp + down, m)
        }
    }

    /// `m^k` as a ring element.
    pub fn power_of_m(k: i64, m: &BigInt) -> Self {
        RingElem::integer(1).shift(k, m)
    }

    /// The integer value, when `exp = 0`.
    pub fn as_integer(&self) -> Option<&BigInt> {
        (self.exp == 0).then_some(&self.num)
    }

    /// Writes the value as `num` or `num/m^exp` using the given base.
    pub fn display_with(&self, m: &BigInt) -> String {
        if self.exp == 0 {
            alloc::format!("{}", self.num)
        } else {
            alloc::format!("{}/{}", self.num, m.pow(self.exp))
        }
    }
}

/// A group element `(k, r)` = `[[m^k, r], [0, 1]]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BsElem {
    pub k: i64,
    pub r: RingElem,
}

impl BsElem {
    pub fn identity() -> Self {
        BsElem {
            k: 0,
            r: RingElem::zero(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.k == 0 && self.r.is_zero()
    }
}

/// A generator or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    A,
    AInv,
    T,
    TInv,
}

impl Letter {
    /// The fixed generator order `a, A, t, T` used for graphs and exports.
    pub const ALL: [Letter; 4] = [Letter::A, Letter::AInv, Letter::T, Letter::TInv];

    pub fn inverse(self) -> Letter {
        match self {
            Letter::A => Letter::AInv,
            Letter::AInv => Letter::A,
            Letter::T => Letter::TInv,
            Letter::TInv => Letter::T,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::A => 'a',
            Letter::AInv => 'A',
            Letter::T => 't',
            Letter::TInv => 'T',
        }
    }

    pub fn from_char(c: char) -> Option<Letter> {
        match c {
            'a' => Some(Letter::A),
            'A' => Some(Letter::AInv),
            't' => Some(Letter::T),
            'T' => Some(Letter::TInv),
            _ => None,
        }
    }
}

/// A word over `{a, A, t, T}`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn push(&mut self, letter: Letter) {
        self.0.push(letter);
    }

    fn push_n(&mut self, letter: Letter, n: u64) {
        self.0.extend(core::iter::repeat(letter).take(n as usize));
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    /// Cancels adjacent inverse pairs until none remain.
    pub fn free_reduce(&self) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(self.0.len());
        for &l in &self.0 {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            fmt::Write::write_char(f, l.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .enumerate()
            .map(|(i, c)| {
                Letter::from_char(c).ok_or_else(|| {
                    Error::validation(alloc::format!("word letter {i} is `{c}`; expected one of a, A, t, T"))
                })
            })
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }
}

/// The triple `(i, ell, j)` for `t^-i a^ell t^j`.
///
/// Canonical when `i > 0 && j > 0` implies `m` does not divide `ell`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NormalForm {
    pub i: u64,
    pub ell: BigInt,
    pub j: u64,
}

impl NormalForm {
    pub fn new(i: u64, ell: impl Into<BigInt>, j: u64) -> Self {
        NormalForm { i, ell: ell.into(), j }
    }

    pub fn is_canonical(&self, m: &BigInt) -> bool {
        !(self.i > 0 && self.j > 0 && self.ell.is_multiple_of(m))
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t^-{} a^{} t^{}", self.i, self.ell, self.j)
    }
}

/// Two-sided estimate of the word length of an element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LengthBounds {
    /// Present only when the caller supplied the lower-bound constants,
    /// or when the length is known exactly.
    pub lower: Option<f64>,
    pub upper: f64,
    /// Both bounds equal the true word length.
    pub exact: bool,
}

/// `BS(1,m)` for a fixed `m >= 2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BsGroup {
    m: BigInt,
}

impl BsGroup {
    pub fn new(m: &BigUint) -> Result<Self> {
        if *m < BigUint::from(2u8) {
            return Err(Error::domain(alloc::format!("BS(1,m) needs m >= 2, got {m}")));
        }
        Ok(BsGroup {
            m: BigInt::from(m.clone()),
        })
    }

    pub fn with_m(m: u64) -> Result<Self> {
        Self::new(&BigUint::from(m))
    }

    pub fn m(&self) -> &BigInt {
        &self.m
    }

    pub fn m_unsigned(&self) -> BigUint {
        self.m.magnitude().clone()
    }

    pub fn ring(&self, num: impl Into<BigInt>, exp: u32) -> RingElem {
        RingElem::new(num, exp, &self.m)
    }

    pub fn elem(&self, k: i64, r: RingElem) -> BsElem {
        let mut r = r;
        r.canonicalize(&self.m);
        BsElem { k, r }
    }

    pub fn a(&self) -> BsElem {
        BsElem {
            k: 0,
            r: RingElem::integer(1),
        }
    }

    pub fn t(&self) -> BsElem {
        BsElem {
            k: 1,
            r: RingElem::zero(),
        }
    }

    pub fn generator(&self, letter: Letter) -> BsElem {
        match letter {
            Letter::A => self.a(),
            Letter::AInv => BsElem {
                k: 0,
                r: RingElem::integer(-1),
            },
            Letter::T => self.t(),
            Letter::TInv => BsElem {
                k: -1,
                r: RingElem::zero(),
            },
        }
    }

    /// `(k1, r1)(k2, r2) = (k1 + k2, r1 + m^k1 r2)`.
    pub fn mul(&self, x: &BsElem, y: &BsElem) -> BsElem {
        BsElem {
            k: x.k + y.k,
            r: x.r.add(&y.r.shift(x.k, &self.m), &self.m),
        }
    }

    /// `(k, r)^-1 = (-k, -m^-k r)`.
    pub fn inv(&self, x: &BsElem) -> BsElem {
        BsElem {
            k: -x.k,
            r: x.r.shift(-x.k, &self.m).neg(),
        }
    }

    pub fn pow(&self, x: &BsElem, e: i64) -> BsElem {
        let base = if e < 0 { self.inv(x) } else { x.clone() };
        let mut acc = BsElem::identity();
        let mut sq = base;
        let mut e = e.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &sq);
            }
            sq = self.mul(&sq, &sq);
            e >>= 1;
        }
        acc
    }

    /// Right multiplication by a single generator.
    fn step(&self, x: &mut BsElem, letter: Letter) {
        match letter {
            Letter::A => x.r = x.r.add(&RingElem::power_of_m(x.k, &self.m), &self.m),
            Letter::AInv => x.r = x.r.add(&RingElem::power_of_m(x.k, &self.m).neg(), &self.m),
            Letter::T => x.k += 1,
            Letter::TInv => x.k -= 1,
        }
    }

    /// Left-to-right product of the generator images.
    pub fn eval_word(&self, w: &Word) -> BsElem {
        let mut x = BsElem::identity();
        for &l in w.letters() {
            self.step(&mut x, l);
        }
        x
    }

    /// The element `t^-i a^ell t^j = (j - i, ell / m^i)`.
    pub fn eval_normal_form(&self, nf: &NormalForm) -> BsElem {
        let k = nf.j as i64 - nf.i as i64;
        let i = u32::try_from(nf.i).expect("exponent overflow");
        BsElem {
            k,
            r: RingElem::new(nf.ell.clone(), i, &self.m),
        }
    }

    /// The unique canonical normal form of an element.
    ///
    /// With `x = (k, r)` and `r = num / m^exp`: `i` is the least value with
    /// `i >= exp`, `i >= -k` and `i >= 0`; then `ell = r m^i` and `j = i + k`.
    pub fn normal_form(&self, x: &BsElem) -> NormalForm {
        let i = (x.r.exp as i64).max(-x.k).max(0);
        let lift = u32::try_from(i - x.r.exp as i64).expect("exponent overflow");
        let ell = &x.r.num * self.m.pow(lift);
        let j = i + x.k;
        NormalForm {
            i: i as u64,
            ell,
            j: j as u64,
        }
    }

    pub fn normal_form_of_word(&self, w: &Word) -> NormalForm {
        self.normal_form(&self.eval_word(w))
    }

    /// Canonical form of a possibly non-canonical triple.
    pub fn renormalize(&self, nf: &NormalForm) -> NormalForm {
        self.normal_form(&self.eval_normal_form(nf))
    }

    /// A word for `t^-i a^ell t^j`, built from the base-`m` digits of `|ell|`
    /// by the Horner scheme `a^d0 t a^d1 t ... a^dn t^-1 ... t^-1`, then
    /// freely reduced. The input is renormalized first.
    ///
    /// Length is at most `(m + 2)(i + j + log_m(|ell| + 1) + 1)`; see
    /// [`synthesis_length_bound`](Self::synthesis_length_bound).
    pub fn synthesize_word(&self, nf: &NormalForm) -> Word {
        let nf = self.renormalize(nf);
        let mut w = Word::empty();
        w.push_n(Letter::TInv, nf.i);
        let up = if nf.ell.sign() == Sign::Minus {
            Letter::AInv
        } else {
            Letter::A
        };
        let m = self.m_unsigned();
        let mut rest = abs_big(&nf.ell);
        let mut depth = 0u64;
        while !rest.is_zero() {
            let (q, d) = rest.div_rem(&m);
            w.push_n(up, d.to_u64().expect("digit below m"));
            rest = q;
            if !rest.is_zero() {
                w.push(Letter::T);
                depth += 1;
            }
        }
        w.push_n(Letter::TInv, depth);
        w.push_n(Letter::T, nf.j);
        w.free_reduce()
    }

    /// `(m + 2)(i + j + log_m(|ell| + 1) + 1)` for the renormalized triple.
    pub fn synthesis_length_bound(&self, nf: &NormalForm) -> f64 {
        let nf = self.renormalize(nf);
        let m = self.m_unsigned();
        let ln_m = ln_biguint(&m);
        let log_term = ln_biguint(&(abs_big(&nf.ell) + BigUint::one())) / ln_m;
        let m_f = m.to_f64().unwrap_or(f64::INFINITY);
        (m_f + 2.0) * (nf.i as f64 + nf.j as f64 + log_term + 1.0)
    }

    /// Word-length envelope `C1 (i + j + ln|ell|) - D1 <= |w| <= m (i + j + ln|ell|) + m`.
    ///
    /// The upper constants are `C2 = D2 = m`. No values are known for `C1`
    /// and `D1`, so the lower bound is reported only when the caller
    /// supplies them. For `ell = 0` the element is a pure `t`-power whose
    /// length is known exactly.
    pub fn length_bounds(&self, nf: &NormalForm, lower_constants: Option<(f64, f64)>) -> LengthBounds {
        if nf.ell.is_zero() {
            let exact = (nf.j as f64 - nf.i as f64).abs();
            return LengthBounds {
                lower: Some(exact),
                upper: exact,
                exact: true,
            };
        }
        let m = self.m.to_f64().unwrap_or(f64::INFINITY);
        let size = nf.i as f64 + nf.j as f64 + ln_biguint(&abs_big(&nf.ell));
        LengthBounds {
            lower: lower_constants.map(|(c1, d1)| c1 * size - d1),
            upper: m * size + m,
            exact: false,
        }
    }

    /// Renders an element as `(k, r)`.
    pub fn display(&self, x: &BsElem) -> String {
        alloc::format!("({}, {})", x.k, x.r.display_with(&self.m))
    }
}

/// Cheap check that the element is `(k, integer)`.
pub fn is_integral(x: &BsElem) -> bool {
    x.r.exp == 0 || x.r.num.is_zero()
}

/// Magnitude of the translation numerator.
pub fn translation_size(x: &BsElem) -> BigUint {
    x.r.num.abs().to_biguint().unwrap_or_default()
}
