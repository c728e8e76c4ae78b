//! The acceptance suite: eleven exact checks, each with a pinned time
//! budget where one applies. Shared by `boxscope verify` and the
//! `acceptance` test target.

use std::fmt;
use std::time::{Duration, Instant};

use boxscope_core::arith::{eta, factorize, mult_order, mult_order_bruteforce, Factorization, BRUTE_FORCE_CAP};
use boxscope_core::boxspace::{analyze_dalpha, make_sequence, verify_covering, Alpha, SequenceKind};
use boxscope_core::bs::{BsElem, BsGroup, Letter, Word};
use boxscope_core::cayley::{build_graph, DiameterEnvelope, DEFAULT_VERTEX_CAP};
use boxscope_core::density::{euler_product_partial, totient_ratio_bound, PrimeSet};
use boxscope_core::oddorder::{odd_order_moduli, OddOrderModulus, UnitSpec, DEFAULT_K_CUTOFF};
use boxscope_core::quotient::{build_quotient, congruence_conditions, QuotientGroup};
use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::cache::measure;
use crate::pool::map_ordered;

/// Seed for every randomized criterion.
pub const SEED: u64 = 0x5eed_b0c5;

pub const CRITERIA: [(u8, &str); 11] = [
    (1, "worked example Q(2,5)"),
    (2, "structural order equals brute force"),
    (3, "prime-power order formula"),
    (4, "geometric family orders"),
    (5, "doubly exponential family"),
    (6, "diameter envelope"),
    (7, "reduction homomorphism and kernel"),
    (8, "covering construction"),
    (9, "totient envelope and Euler product"),
    (10, "odd-order moduli"),
    (11, "normal form and synthesis round trip"),
];

fn budget(id: u8) -> Option<Duration> {
    match id {
        1 => Some(Duration::from_millis(1)),
        2 | 3 => Some(Duration::from_secs(60)),
        6 => Some(Duration::from_secs(600)),
        11 => Some(Duration::from_secs(30)),
        _ => None,
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: u8,
    pub title: &'static str,
    /// The exact checks held.
    pub checks_ok: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Option<Duration>,
}

impl Outcome {
    pub fn within_budget(&self) -> bool {
        self.budget.map_or(true, |b| self.elapsed <= b)
    }

    pub fn passed(&self) -> bool {
        self.checks_ok && self.within_budget()
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let time = match self.budget {
            Some(b) => format!("{:.3?} of {:?}", self.elapsed, b),
            None => format!("{:.3?}", self.elapsed),
        };
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{verdict} #{:<2} {}: {} [{time}]", self.id, self.title, self.detail)?;
        if self.checks_ok && !self.within_budget() {
            write!(f, " (over time budget)")?;
        }
        Ok(())
    }
}

/// Runs criterion `id` (1..=11) with `jobs` workers where parallel.
pub fn run(id: u8, jobs: usize) -> Option<Outcome> {
    let title = CRITERIA.iter().find(|(i, _)| *i == id)?.1;
    let start = Instant::now();
    let (checks_ok, detail) = match id {
        1 => worked_example(),
        2 => order_oracle(),
        3 => prime_power_orders(),
        4 => geometric_family(),
        5 => doubly_exponential_family(),
        6 => diameter_envelope(jobs),
        7 => homomorphism_and_kernel(),
        8 => covering(),
        9 => density_envelope(),
        10 => odd_order(),
        11 => normal_form_round_trip(),
        _ => return None,
    };
    Some(Outcome {
        id,
        title,
        checks_ok,
        detail,
        elapsed: start.elapsed(),
        budget: budget(id),
    })
}

pub fn run_all(jobs: usize) -> Vec<Outcome> {
    CRITERIA.iter().filter_map(|(id, _)| run(*id, jobs)).collect()
}

fn big(x: u64) -> BigUint {
    BigUint::from(x)
}

fn coprime_moduli(m: u64, n_max: u64) -> impl Iterator<Item = u64> {
    (1..=n_max).filter(move |n| n.gcd(&m) == 1)
}

fn order_of(m: u64, n: u64) -> BigUint {
    mult_order(&big(m), &big(n)).expect("coprime input").order().clone()
}

fn worked_example() -> (bool, String) {
    let ord = order_of(2, 5);
    let q = build_quotient(&big(2), &big(5)).expect("Q(2,5)");
    let ok = ord == big(4) && q.label() == "Z/5 ⋊_2 Z/4" && q.size() == big(20);
    (
        ok,
        format!("ord_2(5) = {ord}, quotient {} of size {}", q.label(), q.size()),
    )
}

fn order_oracle() -> (bool, String) {
    let mut checked = 0;
    let mut bad = Vec::new();
    for m in [2u64, 3, 5, 6, 10] {
        for n in coprime_moduli(m, 5000) {
            let slow = mult_order_bruteforce(&big(m), &big(n), BRUTE_FORCE_CAP).expect("within cap");
            if order_of(m, n) != slow {
                bad.push((m, n));
            }
            checked += 1;
        }
    }
    (
        bad.is_empty(),
        format!(
            "{checked} pairs, {} mismatches {:?}",
            bad.len(),
            &bad[..bad.len().min(5)]
        ),
    )
}

fn prime_power_orders() -> (bool, String) {
    let mut checked = 0;
    let mut bad = Vec::new();
    for m in [2u64, 3] {
        for n in coprime_moduli(m, 200) {
            let base = order_of(m, n);
            for k in 1..=4u32 {
                let direct = mult_order(&big(m), &big(n).pow(k)).expect("coprime").order().clone();
                let formula = &base * eta(&big(m), &big(n), k).expect("k >= 1");
                if direct != formula {
                    bad.push(format!("m={m} N={n} k={k}: ord={direct} formula={formula}"));
                }
                checked += 1;
            }
        }
    }
    let first = bad.first().cloned().unwrap_or_default();
    (
        bad.is_empty(),
        format!("{checked} cases, {} counterexamples; first: {first}", bad.len()),
    )
}

fn geometric_family() -> (bool, String) {
    let mut ok = true;
    for m in [2u64, 3, 5] {
        let seq = make_sequence(&big(m), SequenceKind::Geometric).expect("m >= 2");
        let base = big(m * m - 1);
        for k in 1..=6u32 {
            let n = base.pow(k);
            let expect = big(2) * base.pow(k - 1);
            let general = mult_order(&big(m), &n).expect("coprime").order().clone();
            let structured = seq.order(k).expect("structured").order().clone();
            let ratio = Ratio::new(general.clone(), n);
            ok &= general == expect && structured == expect && ratio == Ratio::new(big(2), base.clone());
        }
    }
    (
        ok,
        "ord_m((m^2-1)^k) = 2(m^2-1)^(k-1) and ord/N = 2/(m^2-1) for m in {2,3,5}, k <= 6".into(),
    )
}

/// Prefix length used for the monotonicity check.
pub const DOUBLY_EXPONENTIAL_PREFIX: u32 = 6;

fn doubly_exponential_family() -> (bool, String) {
    let mut orders_ok = true;
    for m in [2u64, 3] {
        for k in 1..=5u32 {
            let n = big(m).pow(1 << k) - 1u8;
            let one = BigUint::one();
            let hits: Vec<bool> = (0..=k).map(|j| big(m).modpow(&big(1 << j), &n) == one).collect();
            let structural = hits[k as usize] && hits[..k as usize].iter().all(|h| !h);
            let general = mult_order(&big(m), &n).expect("coprime").order().clone();
            orders_ok &= structural && general == big(1 << k);
        }
    }
    let alpha = Alpha::new(1, 10).expect("1/10");
    let mut decreasing = true;
    let mut trace = Vec::new();
    for m in [2u64, 3] {
        let seq = make_sequence(&big(m), SequenceKind::DoublyExponential).expect("m >= 2");
        let report = analyze_dalpha(&seq, alpha, DOUBLY_EXPONENTIAL_PREFIX, None).expect("orders");
        decreasing &= report.ratio_order_strictly_decreasing_from(2);
        let values: Vec<String> = report.rows.iter().map(|r| r.ratio_order.to_sig_string(4)).collect();
        trace.push(format!("m={m}: {}", values.join(", ")));
    }
    (
        orders_ok && decreasing,
        format!(
            "orders 2^k: {}; ratio strictly decreasing for k >= 2 on k <= {DOUBLY_EXPONENTIAL_PREFIX}: {} ({})",
            if orders_ok { "ok" } else { "FAILED" },
            decreasing,
            trace.join("; ")
        ),
    )
}

fn diameter_envelope(jobs: usize) -> (bool, String) {
    const N_MAX: u64 = 3000;
    const SIZE_MAX: u64 = 200_000;
    let mut cases = Vec::new();
    for m in [2u64, 3] {
        for n in coprime_moduli(m, N_MAX) {
            if order_of(m, n) * n <= big(SIZE_MAX) {
                cases.push((m, n));
            }
        }
    }
    let results = map_ordered(
        &cases,
        jobs,
        |&(m, n)| {
            let r = measure(&big(m), &big(n), SIZE_MAX).expect("under cap");
            let d = r.diameter.expect("under cap") as u64;
            (
                DiameterEnvelope::new(m, &r.ord).contains(d),
                d,
                r.ord.to_u64().unwrap_or(u64::MAX),
            )
        },
        |_, _| {},
    );
    let violations: Vec<_> = cases
        .iter()
        .zip(&results)
        .filter(|(_, r)| !r.0)
        .map(|(c, r)| (c, r.1, r.2))
        .collect();
    let worst = results.iter().map(|r| r.1 as f64 / r.2 as f64).fold(0.0, f64::max);
    let q25 = build_graph(&build_quotient(&big(2), &big(5)).expect("Q(2,5)"), DEFAULT_VERTEX_CAP)
        .and_then(|g| g.diameter())
        .expect("Q(2,5) diameter");
    (
        violations.is_empty() && q25 == 3,
        format!(
            "{} graphs, {} violations {:?}, max diam/ord {worst:.3}, diam Q(2,5) = {q25}",
            cases.len(),
            violations.len(),
            violations
                .iter()
                .take(5)
                .map(|((m, n), d, ord)| format!("m={m} N={n} diam={d} ord={ord}"))
                .collect::<Vec<_>>()
        ),
    )
}

fn random_word(rng: &mut StdRng, max_len: usize) -> Word {
    let len = rng.random_range(0..=max_len);
    Word((0..len).map(|_| Letter::ALL[rng.random_range(0..4)]).collect())
}

/// Visits every word of length `<= depth` (as its evaluated element).
fn each_word_element(g: &BsGroup, depth: u32, visit: &mut impl FnMut(&BsElem)) {
    fn walk(g: &BsGroup, x: &BsElem, depth: u32, gens: &[BsElem; 4], visit: &mut impl FnMut(&BsElem)) {
        visit(x);
        if depth == 0 {
            return;
        }
        for s in gens {
            walk(g, &g.mul(x, s), depth - 1, gens, visit);
        }
    }
    let gens = Letter::ALL.map(|l| g.generator(l));
    walk(g, &BsElem::identity(), depth, &gens, visit);
}

fn homomorphism_and_kernel() -> (bool, String) {
    const PAIRS: usize = 10_000;
    const WORD_DEPTH: u32 = 8;
    let mut rng = StdRng::seed_from_u64(SEED);
    let mut ok = true;
    let mut members = 0u64;
    let mut words = 0u64;
    for (m, n) in [(2u64, 5u64), (2, 9), (3, 7)] {
        let g = BsGroup::with_m(m).expect("m >= 2");
        let q: QuotientGroup = build_quotient(&big(m), &big(n)).expect("coprime");
        for _ in 0..PAIRS {
            let x = g.eval_word(&random_word(&mut rng, 30));
            let y = g.eval_word(&random_word(&mut rng, 30));
            ok &= q.reduce(&g.mul(&x, &y)) == q.mul(&q.reduce(&x), &q.reduce(&y));
        }
        let identity = q.identity();
        each_word_element(&g, WORD_DEPTH, &mut |x| {
            let in_kernel = q.reduce(x) == identity;
            ok &= in_kernel == congruence_conditions(x, &big(m), &big(n)).expect("coprime");
            members += in_kernel as u64;
            words += 1;
        });
    }
    (
        ok,
        format!("{PAIRS} random pairs per (m,N); {words} words of length <= {WORD_DEPTH}, {members} in the kernel"),
    )
}

fn covering() -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for n in [3u64, 5] {
        let r = verify_covering(&big(2), &big(n), 1, DEFAULT_VERTEX_CAP).expect("coprime");
        ok &= r.passed();
        parts.push(format!(
            "N={n}: n={}, kernel {:?}, diameter {:?}",
            r.params.n,
            r.kernel_size.map(|k| k.to_string()),
            r.diameter
        ));
    }
    (ok, parts.join("; "))
}

fn density_envelope() -> (bool, String) {
    let mut ok = true;
    let mut checked = 0;
    for m in [2u64, 3] {
        for n in coprime_moduli(m, 5000) {
            let f = if n == 1 {
                Factorization::one()
            } else {
                factorize(&big(n)).expect("n >= 2")
            };
            ok &= Ratio::new(order_of(m, n), big(n)) <= totient_ratio_bound(&f);
            checked += 1;
        }
    }
    let euler = euler_product_partial(&PrimeSet::All, 100).expect("count >= 1");
    let strictly = !euler.short && euler.partials().windows(2).all(|w| w[1] < w[0]);
    (
        ok && strictly,
        format!("{checked} moduli within phi(N)/N; Euler product over 100 primes strictly decreasing: {strictly}"),
    )
}

fn odd_order() -> (bool, String) {
    let s = UnitSpec::new(&big(2), &big(1), &big(2)).expect("unit");
    let first = odd_order_moduli(&s, &big(2), 2, DEFAULT_K_CUTOFF).expect("found");
    let expect = [
        OddOrderModulus {
            k: Some(3),
            n: big(7),
            order: big(3),
        },
        OddOrderModulus {
            k: Some(5),
            n: big(31),
            order: big(5),
        },
    ];
    let longer = odd_order_moduli(&s, &big(2), 12, DEFAULT_K_CUTOFF).expect("found");
    let direct_ok = longer.iter().all(|r| {
        let direct = mult_order(&big(2), &r.n).expect("odd modulus").order().clone();
        direct == r.order && direct.is_odd() && big(r.k.unwrap_or(1)).is_multiple_of(&direct)
    });
    let listed: Vec<String> = first.iter().map(|r| format!("N={} ord={}", r.n, r.order)).collect();
    (
        first == expect && direct_ok,
        format!("{}; {} moduli pass the direct check", listed.join(", "), longer.len()),
    )
}

fn normal_form_round_trip() -> (bool, String) {
    const WORDS: usize = 10_000;
    let mut rng = StdRng::seed_from_u64(SEED ^ 11);
    let groups: Vec<BsGroup> = [2u64, 3, 5, 7]
        .iter()
        .map(|m| BsGroup::with_m(*m).expect("m >= 2"))
        .collect();
    let mut ok = true;
    let mut longest = 0;
    for i in 0..WORDS {
        let g = &groups[i % groups.len()];
        let x = g.eval_word(&random_word(&mut rng, 30));
        let nf = g.normal_form(&x);
        let synth = g.synthesize_word(&nf);
        ok &= g.eval_normal_form(&nf) == x
            && g.eval_word(&synth) == x
            && synth.len() as f64 <= g.synthesis_length_bound(&nf);
        longest = longest.max(synth.len());
    }
    (ok, format!("{WORDS} words, longest synthesized word {longest}"))
}
