//! Nested modulus chains, `D_alpha` trend tables and covering quotients.
//!
//! A chain `N_1 | N_2 | ...` of moduli coprime to `m` gives the box space of
//! quotients `Q(m, N_k)`. Orders are always exact. Diameters are filled in
//! only for quotients under the vertex cap.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{factorize, mult_order, mult_order_from_multiple, Factorization, OrderCertificate};
use crate::bs::Letter;
use crate::cayley::build_graph;
use crate::error::{Error, Result};
use crate::quotient::{build_covering_quotient, build_quotient};
use crate::real::{ln_biguint, Real};

/// Largest accepted denominator of `alpha`; the ratios raise orders to
/// powers of this size.
pub const ALPHA_MAX_DENOMINATOR: u32 = 10_000;

/// Largest operand, in bits, a single table row may build.
pub const ROW_BIT_CAP: u64 = 1 << 24;

/// A rational exponent `0 < p/q < 1` in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Alpha {
    p: u32,
    q: u32,
}

impl Alpha {
    pub fn new(p: u32, q: u32) -> Result<Self> {
        if q == 0 || p == 0 || p >= q {
            return Err(Error::domain(format!("alpha must lie in (0, 1), got {p}/{q}")));
        }
        let g = p.gcd(&q);
        let (p, q) = (p / g, q / g);
        if q > ALPHA_MAX_DENOMINATOR {
            return Err(Error::validation(format!(
                "alpha denominator {q} exceeds {ALPHA_MAX_DENOMINATOR}"
            )));
        }
        Ok(Alpha { p, q })
    }

    pub fn numer(&self) -> u32 {
        self.p
    }

    pub fn denom(&self) -> u32 {
        self.q
    }

    pub fn to_f64(&self) -> f64 {
        self.p as f64 / self.q as f64
    }

    /// `alpha / (1 - alpha)` as `(p, q - p)`.
    pub fn order_exponent(&self) -> (u32, u32) {
        (self.p, self.q - self.p)
    }

    /// Smallest `D >= 1` with `D / (D + 1) >= alpha`.
    pub fn min_covering_exponent(&self) -> u32 {
        let gap = self.q - self.p;
        self.p.div_ceil(gap).max(1)
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl FromStr for Alpha {
    type Err = Error;

    /// Accepts `"p/q"` or a decimal such as `"0.1"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::validation(format!("cannot parse alpha from {s:?}; use p/q or a decimal"));
        if let Some((p, q)) = s.split_once('/') {
            let p = p.trim().parse::<u32>().map_err(|_| bad())?;
            let q = q.trim().parse::<u32>().map_err(|_| bad())?;
            return Alpha::new(p, q);
        }
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if (int.is_empty() && frac.is_empty()) || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let frac = frac.trim_end_matches('0');
        if frac.len() > 9 {
            return Err(Error::validation(format!("alpha {s} has too many decimal places")));
        }
        let int: u64 = if int.is_empty() {
            0
        } else {
            int.parse().map_err(|_| bad())?
        };
        let den = 10u64.pow(frac.len() as u32);
        let num = int
            .checked_mul(den)
            .and_then(|x| {
                x.checked_add(if frac.is_empty() {
                    0
                } else {
                    frac.parse::<u64>().unwrap()
                })
            })
            .ok_or_else(bad)?;
        if num == 0 || num >= den {
            return Err(Error::domain(format!("alpha must lie in (0, 1), got {s}")));
        }
        let g = num.gcd(&den);
        Alpha::new((num / g) as u32, (den / g) as u32)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SequenceKind {
    /// `N_k = (m^2 - 1)^k`.
    Geometric,
    /// `N_k = m^(2^k) - 1`.
    DoublyExponential,
    /// A validated finite chain.
    Explicit(Vec<BigUint>),
}

impl SequenceKind {
    pub fn name(&self) -> &'static str {
        match self {
            SequenceKind::Geometric => "geometric",
            SequenceKind::DoublyExponential => "doubly_exponential",
            SequenceKind::Explicit(_) => "explicit",
        }
    }
}

/// A divisibility chain of moduli coprime to `m`, indexed from `k = 1`.
#[derive(Debug, Clone)]
pub struct ModulusSequence {
    m: BigUint,
    kind: SequenceKind,
    /// Factorization of `m^2 - 1`, for the geometric family.
    base_factors: Option<Factorization>,
}

pub fn make_sequence(m: &BigUint, kind: SequenceKind) -> Result<ModulusSequence> {
    if *m < BigUint::from(2u8) {
        return Err(Error::domain(format!("m must be >= 2, got {m}")));
    }
    if let SequenceKind::Explicit(terms) = &kind {
        for (i, n) in terms.iter().enumerate() {
            let k = i + 1;
            if n.is_zero() {
                return Err(Error::validation(format!("term N_{k} is 0")));
            }
            let g = n.gcd(m);
            if !g.is_one() {
                return Err(Error::validation(format!(
                    "term N_{k} = {n} shares factor {g} with m = {m}"
                )));
            }
            if i > 0 && !n.is_multiple_of(&terms[i - 1]) {
                return Err(Error::validation(format!(
                    "chain broken at index {k}: N_{} = {} does not divide N_{k} = {n}",
                    k - 1,
                    terms[i - 1]
                )));
            }
        }
    }
    let base_factors = match kind {
        SequenceKind::Geometric => Some(factorize(&(m * m - 1u8))?),
        _ => None,
    };
    Ok(ModulusSequence {
        m: m.clone(),
        kind,
        base_factors,
    })
}

impl ModulusSequence {
    pub fn m(&self) -> &BigUint {
        &self.m
    }

    pub fn kind(&self) -> &SequenceKind {
        &self.kind
    }

    /// `N_k` for `k >= 1`; `None` past the end of an explicit list.
    pub fn term(&self, k: u32) -> Option<BigUint> {
        if k == 0 {
            return None;
        }
        match &self.kind {
            SequenceKind::Geometric => Some((&self.m * &self.m - 1u8).pow(k)),
            SequenceKind::DoublyExponential => {
                let e = 1u32.checked_shl(k)?;
                Some(self.m.pow(e) - 1u8)
            }
            SequenceKind::Explicit(terms) => terms.get(k as usize - 1).cloned(),
        }
    }

    /// Lazy `(k, N_k)` for `k = 1, 2, ...`.
    pub fn terms(&self) -> impl Iterator<Item = (u32, BigUint)> + '_ {
        (1..).map_while(move |k| self.term(k).map(|n| (k, n)))
    }

    /// Estimated bit length of `N_k`.
    pub fn term_bits(&self, k: u32) -> u64 {
        let m_bits = self.m.bits();
        match &self.kind {
            SequenceKind::Geometric => (2 * m_bits).saturating_mul(k as u64),
            SequenceKind::DoublyExponential => m_bits.saturating_mul(1u64.checked_shl(k).unwrap_or(u64::MAX)),
            SequenceKind::Explicit(terms) => terms.get(k as usize - 1).map_or(0, |n| n.bits()),
        }
    }

    /// A multiple of `ord_m(N_k)` known in factored form: `2 (m^2-1)^(k-1)`
    /// for the geometric family, `2^k` for the doubly exponential one.
    pub fn order_multiple(&self, k: u32) -> Option<Factorization> {
        let two = Factorization::from_pairs(alloc::vec![(BigUint::from(2u8), 1)]).ok()?;
        match &self.kind {
            SequenceKind::Geometric => Some(two.mul(&self.base_factors.as_ref()?.pow(k.checked_sub(1)?))),
            SequenceKind::DoublyExponential => Some(two.pow(k)),
            SequenceKind::Explicit(_) => None,
        }
    }

    /// `ord_m(N_k)`, through [`Self::order_multiple`] when available.
    pub fn order(&self, k: u32) -> Result<OrderCertificate> {
        let n = self
            .term(k)
            .ok_or_else(|| Error::domain(format!("sequence has no term N_{k}")))?;
        match self.order_multiple(k) {
            Some(multiple) => mult_order_from_multiple(&self.m, &n, &multiple),
            None => mult_order(&self.m, &n),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DalphaRow {
    pub k: u32,
    pub n: BigUint,
    pub order: BigUint,
    pub group_size: BigUint,
    /// `ord / N^(alpha / (1 - alpha))`.
    pub ratio_order: Real,
    pub diameter: Option<u32>,
    /// `diam / |G|^alpha`.
    pub ratio_diam: Option<Real>,
    /// Empirical exponent `ln diam / ln |G|`.
    pub alpha_hat: Option<f64>,
}

impl DalphaRow {
    /// `ratio_order^(1 - alpha)` scaled to a power with integer exponents:
    /// `(ord^(q-p), N^p)`. Orders rows exactly.
    pub fn ratio_order_power(&self, alpha: Alpha) -> (BigUint, BigUint) {
        let (p, gap) = alpha.order_exponent();
        (self.order.pow(gap), self.n.pow(p))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DalphaReport {
    pub m: BigUint,
    pub kind: &'static str,
    pub alpha: Alpha,
    pub rows: Vec<DalphaRow>,
}

impl DalphaReport {
    /// Whether `ratio_order` strictly decreases over rows with `k >= from_k`,
    /// compared exactly.
    pub fn ratio_order_strictly_decreasing_from(&self, from_k: u32) -> bool {
        let powers: Vec<_> = self
            .rows
            .iter()
            .filter(|r| r.k >= from_k)
            .map(|r| r.ratio_order_power(self.alpha))
            .collect();
        powers.windows(2).all(|w| &w[1].0 * &w[0].1 < &w[0].0 * &w[1].1)
    }
}

/// One row of the table. `vertex_cap = None` skips the diameter.
pub fn dalpha_row(seq: &ModulusSequence, alpha: Alpha, k: u32, vertex_cap: Option<u64>) -> Result<DalphaRow> {
    let work = seq.term_bits(k).saturating_mul(alpha.q as u64);
    if work > ROW_BIT_CAP {
        return Err(Error::ResourceCap {
            what: "growth table row",
            required: format!("about {work} bits for N_{k} raised to alpha's denominator"),
            cap: ROW_BIT_CAP,
        });
    }
    let cert = seq.order(k)?;
    let n = cert.modulus().clone();
    let order = cert.order().clone();
    let group_size = &n * &order;
    let (p, gap) = alpha.order_exponent();
    let ratio_order = Real::ratio_root(&order.pow(gap), &n.pow(p), gap);

    let diameter = match vertex_cap {
        Some(cap) if group_size <= BigUint::from(cap) => {
            let q = build_quotient(&seq.m, &n)?;
            Some(build_graph(&q, cap)?.diameter()?)
        }
        _ => None,
    };
    let ratio_diam =
        diameter.map(|d| Real::ratio_root(&BigUint::from(d).pow(alpha.q), &group_size.pow(alpha.p), alpha.q));
    let alpha_hat = diameter
        .and_then(|d| (group_size > BigUint::one() && d > 0).then(|| libm::log(d as f64) / ln_biguint(&group_size)));
    Ok(DalphaRow {
        k,
        n,
        order,
        group_size,
        ratio_order,
        diameter,
        ratio_diam,
        alpha_hat,
    })
}

/// Rows `k = 1..=k_max` in order (fewer for a short explicit chain).
pub fn analyze_dalpha(
    seq: &ModulusSequence,
    alpha: Alpha,
    k_max: u32,
    vertex_cap: Option<u64>,
) -> Result<DalphaReport> {
    let rows = (1..=k_max)
        .take_while(|k| seq.term(*k).is_some())
        .map(|k| dalpha_row(seq, alpha, k, vertex_cap))
        .collect::<Result<Vec<_>>>()?;
    Ok(DalphaReport {
        m: seq.m.clone(),
        kind: seq.kind.name(),
        alpha,
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoveringParams {
    /// `n = ord_m(N) N^D`.
    pub n: BigUint,
    /// `|Z/N ⋊ Z/n| = n N`.
    pub quotient_size: BigUint,
    /// `(n N)^alpha <= n`, when an alpha was supplied.
    pub inequality_holds: Option<bool>,
}

pub fn covering_params(m: &BigUint, n: &BigUint, d: u32, alpha: Option<Alpha>) -> Result<CoveringParams> {
    if d == 0 {
        return Err(Error::domain("covering exponent D must be >= 1"));
    }
    let cert = mult_order(m, n)?;
    let cover = cert.order() * n.pow(d);
    let quotient_size = &cover * n;
    let inequality_holds = alpha.map(|a| quotient_size.pow(a.p) <= cover.pow(a.q));
    Ok(CoveringParams {
        n: cover,
        quotient_size,
        inequality_holds,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoveringReport {
    pub params: CoveringParams,
    pub order: BigUint,
    /// `None` when the exhaustive checks were skipped for size.
    pub homomorphism: Option<bool>,
    pub kernel_size: Option<BigUint>,
    pub projection_surjective: Option<bool>,
    pub cyclic_image: Option<bool>,
    pub diameter: Option<u32>,
    /// `diam >= n / 3`.
    pub diameter_ok: Option<bool>,
}

impl CoveringReport {
    pub fn expected_kernel_size(&self) -> BigUint {
        &self.params.n / &self.order
    }

    pub fn skipped(&self) -> bool {
        self.homomorphism.is_none() || self.diameter_ok.is_none()
    }

    /// All checks ran and passed.
    pub fn passed(&self) -> bool {
        self.homomorphism == Some(true)
            && self.kernel_size.as_ref() == Some(&self.expected_kernel_size())
            && self.projection_surjective == Some(true)
            && self.cyclic_image == Some(true)
            && self.diameter_ok == Some(true)
    }
}

/// Builds `Z/N ⋊ Z/n` with `n = ord N^D` and checks it against `Q(m, N)`.
///
/// Exhaustive checks run when `nN <= vertex_cap`; otherwise they are left
/// `None`.
pub fn verify_covering(m: &BigUint, n: &BigUint, d: u32, vertex_cap: u64) -> Result<CoveringReport> {
    let params = covering_params(m, n, d, None)?;
    let base = build_quotient(m, n)?;
    let cover = build_covering_quotient(m, n, &params.n)?;
    let order = base.order_certificate().order().clone();
    let mut report = CoveringReport {
        params,
        order,
        homomorphism: None,
        kernel_size: None,
        projection_surjective: None,
        cyclic_image: None,
        diameter: None,
        diameter_ok: None,
    };
    let size = match report.params.quotient_size.to_u64() {
        Some(s) if s <= vertex_cap => s,
        _ => return Ok(report),
    };

    let gens = Letter::ALL.map(|l| (cover.generator(l), base.generator(l)));
    let cover_n = report.params.n.clone();
    let mut homomorphism = true;
    let mut cyclic = true;
    let mut kernel = BigUint::zero();
    let mut hit = alloc::vec![false; base.size().to_usize().unwrap_or(0)];
    let mut k_seen = alloc::vec![false; cover_n.to_usize().unwrap_or(0)];
    for i in 0..size {
        let u = cover.elem_at(i);
        let pu = cover.project(&base, &u)?;
        if pu == base.identity() {
            kernel += 1u8;
        }
        if let Some(slot) = base.index_of(&pu) {
            hit[slot as usize] = true;
        }
        k_seen[u.k.to_usize().unwrap()] = true;
        for (s, ps) in &gens {
            let us = cover.mul(&u, s);
            homomorphism &= cover.project(&base, &us)? == base.mul(&pu, ps);
            cyclic &= us.k == (&u.k + &s.k) % &cover_n;
        }
    }
    // t maps to 1, a generator of Z/n
    cyclic &= cover.generator(Letter::T).k == BigUint::one() % &cover_n && k_seen.iter().all(|s| *s);
    report.homomorphism = Some(homomorphism);
    report.kernel_size = Some(kernel);
    report.projection_surjective = Some(hit.iter().all(|h| *h));
    report.cyclic_image = Some(cyclic);

    let diameter = build_graph(&cover, vertex_cap)?.diameter()?;
    report.diameter = Some(diameter);
    report.diameter_ok = Some(BigUint::from(diameter) * 3u8 >= cover_n);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cayley::DiameterEnvelope;
    use alloc::string::ToString;
    use alloc::vec;

    fn big(x: u64) -> BigUint {
        BigUint::from(x)
    }

    #[test]
    fn alpha_parsing() {
        assert_eq!("0.5".parse::<Alpha>().unwrap(), Alpha::new(1, 2).unwrap());
        assert_eq!("1/2".parse::<Alpha>().unwrap(), Alpha::new(1, 2).unwrap());
        assert_eq!(".1".parse::<Alpha>().unwrap(), Alpha::new(1, 10).unwrap());
        assert_eq!("0.250".parse::<Alpha>().unwrap(), Alpha::new(1, 4).unwrap());
        assert_eq!("2/4".parse::<Alpha>().unwrap().to_string(), "1/2");
        assert!(matches!("1".parse::<Alpha>(), Err(Error::Domain(_))));
        assert!(matches!("0".parse::<Alpha>(), Err(Error::Domain(_))));
        assert!(matches!("1.5".parse::<Alpha>(), Err(Error::Domain(_))));
        assert!(matches!("-0.5".parse::<Alpha>(), Err(Error::Validation(_))));
        assert!(matches!("abc".parse::<Alpha>(), Err(Error::Validation(_))));
        assert_eq!(Alpha::new(1, 10).unwrap().order_exponent(), (1, 9));
        assert_eq!(Alpha::new(1, 2).unwrap().min_covering_exponent(), 1);
        assert_eq!(Alpha::new(2, 3).unwrap().min_covering_exponent(), 2);
        assert_eq!(Alpha::new(3, 4).unwrap().min_covering_exponent(), 3);
    }

    #[test]
    fn sequence_terms() {
        let g = make_sequence(&big(2), SequenceKind::Geometric).unwrap();
        let first: Vec<_> = g.terms().take(3).map(|(_, n)| n).collect();
        assert_eq!(first, vec![big(3), big(9), big(27)]);
        let d = make_sequence(&big(2), SequenceKind::DoublyExponential).unwrap();
        let first: Vec<_> = d.terms().take(4).map(|(_, n)| n).collect();
        assert_eq!(first, vec![big(3), big(15), big(255), big(65535)]);
        let e = make_sequence(&big(2), SequenceKind::Explicit(vec![big(3), big(15)])).unwrap();
        assert_eq!(e.terms().count(), 2);
        assert_eq!(e.term(3), None);
    }

    #[test]
    fn explicit_validation_names_index() {
        let err = make_sequence(&big(2), SequenceKind::Explicit(vec![big(3), big(6)])).unwrap_err();
        assert!(matches!(&err, Error::Validation(msg) if msg.contains("N_2")), "{err}");
        let err = make_sequence(&big(2), SequenceKind::Explicit(vec![big(3), big(5)])).unwrap_err();
        assert!(
            matches!(&err, Error::Validation(msg) if msg.contains("index 2")),
            "{err}"
        );
        assert!(make_sequence(&big(1), SequenceKind::Geometric).is_err());
    }

    #[test]
    fn structured_orders() {
        for m in [2u64, 3, 5] {
            let seq = make_sequence(&big(m), SequenceKind::Geometric).unwrap();
            for k in 1..=6 {
                let expect = big(2) * big(m * m - 1).pow(k - 1);
                assert_eq!(seq.order(k).unwrap().order(), &expect, "m={m} k={k}");
            }
        }
        for m in [2u64, 3] {
            let seq = make_sequence(&big(m), SequenceKind::DoublyExponential).unwrap();
            for k in 1..=5 {
                let cert = seq.order(k).unwrap();
                assert_eq!(cert.order(), &big(1 << k));
                assert_eq!(cert.order(), mult_order(&big(m), cert.modulus()).unwrap().order());
            }
        }
    }

    #[test]
    fn geometric_ratio_is_constant() {
        let seq = make_sequence(&big(2), SequenceKind::Geometric).unwrap();
        let rep = analyze_dalpha(&seq, Alpha::new(1, 2).unwrap(), 4, None).unwrap();
        assert_eq!(rep.rows.len(), 4);
        for row in &rep.rows {
            assert_eq!(row.ratio_order_power(rep.alpha), (row.order.clone(), row.n.clone()));
            assert_eq!(&row.order * 3u8, &row.n * 2u8);
            assert_eq!(row.ratio_order.to_string(), "0.666666666667");
            assert_eq!(row.group_size, &row.n * &row.order);
        }
    }

    #[test]
    fn doubly_exponential_ratio_prefix() {
        let seq = make_sequence(&big(2), SequenceKind::DoublyExponential).unwrap();
        let rep = analyze_dalpha(&seq, "0.1".parse().unwrap(), 8, None).unwrap();
        let values: Vec<f64> = rep.rows.iter().map(|r| r.ratio_order.to_f64()).collect();
        for (row, v) in rep.rows.iter().zip(&values) {
            let direct = (1u64 << row.k) as f64 / libm::pow(row.n.to_f64().unwrap(), 1.0 / 9.0);
            assert!((v - direct).abs() < 1e-12 * direct, "k={} {v} vs {direct}", row.k);
        }
        // rises before it falls; the exact comparison agrees with f64
        assert!(values[1] < values[2]);
        assert!(values[6] > values[7]);
        assert!(!rep.ratio_order_strictly_decreasing_from(2));
        assert!(rep.ratio_order_strictly_decreasing_from(6));
    }

    #[test]
    fn oversized_rows_are_refused() {
        let seq = make_sequence(&big(2), SequenceKind::DoublyExponential).unwrap();
        let err = dalpha_row(&seq, Alpha::new(1, 2).unwrap(), 40, None).unwrap_err();
        assert!(matches!(err, Error::ResourceCap { .. }));
        assert!(dalpha_row(&seq, Alpha::new(1, 2).unwrap(), 10, None).is_ok());
    }

    #[test]
    fn diameters_in_rows() {
        let seq = make_sequence(&big(2), SequenceKind::Geometric).unwrap();
        let rep = analyze_dalpha(&seq, Alpha::new(1, 2).unwrap(), 3, Some(100)).unwrap();
        assert_eq!(rep.rows[0].group_size, big(6));
        assert!(rep.rows[0].diameter.is_some());
        assert!(rep.rows[1].diameter.is_some());
        assert_eq!(rep.rows[2].group_size, big(27 * 18));
        assert_eq!(rep.rows[2].diameter, None);
        for row in rep.rows.iter().filter(|r| r.diameter.is_some()) {
            let a = row.alpha_hat.unwrap();
            assert!((0.0..=1.0).contains(&a));
            let env = DiameterEnvelope::new(2, &row.order);
            assert!(env.contains(row.diameter.unwrap() as u64));
        }
    }

    #[test]
    fn covering_parameters() {
        let p = covering_params(&big(2), &big(3), 1, Some(Alpha::new(1, 2).unwrap())).unwrap();
        assert_eq!(
            (p.n, p.quotient_size, p.inequality_holds),
            (big(6), big(18), Some(true))
        );
        let p = covering_params(&big(2), &big(5), 1, None).unwrap();
        assert_eq!((p.n, p.quotient_size), (big(20), big(100)));
        assert!(covering_params(&big(2), &big(5), 0, None).is_err());
        assert!(covering_params(&big(2), &big(4), 1, None).is_err());
    }

    #[test]
    fn covering_verification() {
        for n in [3u64, 5] {
            let rep = verify_covering(&big(2), &big(n), 1, 1_000).unwrap();
            assert!(rep.passed(), "{rep:?}");
            assert_eq!(rep.kernel_size, Some(big(n)));
        }
        let rep = verify_covering(&big(2), &big(5), 1, 50).unwrap();
        assert!(rep.skipped());
        assert!(!rep.passed());
    }
}
