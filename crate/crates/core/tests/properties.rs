use boxscope_core::arith::modular::coprime;
use boxscope_core::arith::{
    factorize, lcm_fold, lcm_many, lcm_product_formula, mult_order, mult_order_bruteforce, Factorization,
    BRUTE_FORCE_CAP,
};
use boxscope_core::bs::{BsGroup, Letter, Word};
use boxscope_core::cayley::{build_graph, DiameterEnvelope, DEFAULT_VERTEX_CAP};
use boxscope_core::density::{euler_product_partial, natural_density_partial, ratio_scan, PrimeSet};
use boxscope_core::oddorder::strip_m_part;
use boxscope_core::quotient::{build_quotient, congruence_conditions, is_congruence_member};
use boxscope_core::real::Real;
use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive};
use proptest::prelude::*;

fn big(x: u64) -> BigUint {
    BigUint::from(x)
}

fn letter() -> impl Strategy<Value = Letter> {
    prop::sample::select(Letter::ALL.to_vec())
}

fn word(max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(letter(), 0..=max_len).prop_map(Word)
}

fn unit_pair() -> impl Strategy<Value = (u64, u64)> {
    (2u64..12, 1u64..400).prop_filter("coprime", |(m, n)| m.gcd(n) == 1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn order_matches_brute_force((m, n) in unit_pair()) {
        let fast = mult_order(&big(m), &big(n)).unwrap();
        let slow = mult_order_bruteforce(&big(m), &big(n), BRUTE_FORCE_CAP).unwrap();
        prop_assert_eq!(fast.order(), &slow);
        prop_assert!(fast.verify());
    }

    #[test]
    fn mu_relation((m, n) in unit_pair()) {
        let cert = mult_order(&big(m), &big(n)).unwrap();
        let mu = cert.mu().unwrap();
        prop_assert_eq!(big(m).pow(cert.order().to_u32().unwrap()), mu * big(n) + 1u8);
    }

    #[test]
    fn lcm_routes_agree(values in prop::collection::vec(1u64..10_000, 1..8)) {
        let v: Vec<BigUint> = values.iter().map(|x| big(*x)).collect();
        let l = lcm_many(&v).unwrap();
        prop_assert_eq!(&l, &lcm_fold(&v));
        prop_assert_eq!(&l, &lcm_product_formula(&v));
        prop_assert!(v.iter().all(|x| l.is_multiple_of(x)));
    }

    #[test]
    fn factorization_round_trip(n in 2u64..u64::MAX) {
        let f = factorize(&big(n)).unwrap();
        prop_assert_eq!(f.value(), big(n));
        let parsed: Factorization = f.to_string().parse().unwrap();
        prop_assert_eq!(parsed, f);
    }

    #[test]
    fn normal_form_round_trip(m in 2u64..8, w in word(30)) {
        let g = BsGroup::with_m(m).unwrap();
        let x = g.eval_word(&w);
        let nf = g.normal_form(&x);
        prop_assert!(nf.is_canonical(g.m()));
        prop_assert_eq!(g.eval_normal_form(&nf), x.clone());
        let synth = g.synthesize_word(&nf);
        prop_assert_eq!(g.eval_word(&synth), x);
        prop_assert!(synth.len() as f64 <= g.synthesis_length_bound(&nf));
    }

    #[test]
    fn words_and_inverses(m in 2u64..8, w in word(20)) {
        let g = BsGroup::with_m(m).unwrap();
        let x = g.eval_word(&w);
        prop_assert_eq!(g.eval_word(&w.inverse()), g.inv(&x));
        prop_assert_eq!(g.eval_word(&w.free_reduce()), x.clone());
        prop_assert!(g.mul(&x, &g.inv(&x)).is_identity());
    }

    #[test]
    fn reduce_is_multiplicative((m, n) in unit_pair(), u in word(16), v in word(16)) {
        let g = BsGroup::with_m(m).unwrap();
        let q = build_quotient(&big(m), &big(n)).unwrap();
        let (x, y) = (g.eval_word(&u), g.eval_word(&v));
        prop_assert_eq!(q.reduce(&g.mul(&x, &y)), q.mul(&q.reduce(&x), &q.reduce(&y)));
        prop_assert_eq!(q.reduce(&g.inv(&x)), q.inv(&q.reduce(&x)));
    }

    #[test]
    fn membership_two_ways((m, n) in unit_pair(), w in word(12)) {
        let g = BsGroup::with_m(m).unwrap();
        let x = g.eval_word(&w);
        prop_assert_eq!(
            is_congruence_member(&x, &big(m), &big(n)).unwrap(),
            congruence_conditions(&x, &big(m), &big(n)).unwrap()
        );
    }

    #[test]
    fn strip_round_trip(n in 1u64..u64::MAX, m in 2u64..1000) {
        let (core, q) = strip_m_part(&big(n), &big(m)).unwrap();
        prop_assert_eq!(&core * &q, big(n));
        prop_assert!(coprime(&core, &big(m)));
        let (rest, _) = strip_m_part(&q, &big(m)).unwrap();
        prop_assert!(rest.is_one() || q.is_one());
    }

    #[test]
    fn real_ratio_order(a in 0u64..1_000_000, b in 1u64..1_000_000, c in 0u64..1_000_000, d in 1u64..1_000_000) {
        let (x, y) = (Real::ratio(&big(a), &big(b)), Real::ratio(&big(c), &big(d)));
        let exact = Ratio::new(big(a), big(b)).cmp(&Ratio::new(big(c), big(d)));
        // truncation keeps >= 96 bits, far finer than any gap between these
        prop_assert_eq!(x.cmp(&y), exact);
        prop_assert!((x.to_f64() - a as f64 / b as f64).abs() <= 1e-15 * (a as f64 / b as f64));
    }

    #[test]
    fn natural_density_in_unit_interval(modulus in 1u64..30, residue in 0u64..30, x in 2u64..5000) {
        let set = PrimeSet::residue_class(modulus, residue).unwrap();
        let d = natural_density_partial(&set, x).unwrap();
        prop_assert!(d <= Ratio::one());
    }
}

#[test]
fn trivial_quotient_sits_below_envelope() {
    for m in [2u64, 3] {
        let q = build_quotient(&big(m), &big(1)).unwrap();
        let diam = build_graph(&q, DEFAULT_VERTEX_CAP).unwrap().diameter().unwrap();
        assert_eq!(diam, 0);
        assert!(!DiameterEnvelope::new(m, q.order_certificate().order()).contains(0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn diameter_within_envelope((m, n) in (2u64..4, 2u64..120).prop_filter("coprime", |(m, n)| m.gcd(n) == 1)) {
        let q = build_quotient(&big(m), &big(n)).unwrap();
        let graph = build_graph(&q, DEFAULT_VERTEX_CAP).unwrap();
        prop_assert!(graph.is_inverse_closed());
        let diam = graph.diameter().unwrap();
        let env = DiameterEnvelope::new(m, q.order_certificate().order());
        prop_assert!(env.contains(diam as u64), "diam {} outside [{}, {}]", diam, env.lower(), env.upper);
    }

    #[test]
    fn scan_minimum_monotone_in_bound(small in 1u64..2000, extra in 0u64..20_000, m in 2u64..4) {
        let primes: Vec<u64> = [3u64, 5, 7, 11].into_iter().filter(|p| m % p != 0).collect();
        let a = ratio_scan(&big(m), &primes, &big(small)).unwrap();
        let b = ratio_scan(&big(m), &primes, &big(small + extra)).unwrap();
        prop_assert!(b.min_ratio <= a.min_ratio);
    }

    #[test]
    fn euler_product_non_increasing(count in 1usize..60) {
        let p = euler_product_partial(&PrimeSet::All, count).unwrap();
        let partials = p.partials();
        prop_assert!(partials.windows(2).all(|w| w[1] <= w[0]));
        prop_assert_eq!(partials.last().unwrap(), &p.value);
    }
}

#[test]
fn q25_word_distances_match_bfs() {
    // BFS distance from the identity equals the shortest word reaching each element
    let (m, n) = (2u64, 5u64);
    let g = BsGroup::with_m(m).unwrap();
    let q = build_quotient(&big(m), &big(n)).unwrap();
    let graph = build_graph(&q, DEFAULT_VERTEX_CAP).unwrap();
    let dist = graph.bfs_distances(0).unwrap();
    let mut best = vec![u32::MAX; graph.vertex_count()];
    let mut frontier = vec![Word::empty()];
    for len in 0..=4u32 {
        let mut next = Vec::new();
        for w in &frontier {
            let idx = q.index_of(&q.reduce(&g.eval_word(w))).unwrap() as usize;
            best[idx] = best[idx].min(len);
            for l in Letter::ALL {
                let mut longer = w.clone();
                longer.0.push(l);
                next.push(longer);
            }
        }
        frontier = next;
    }
    assert_eq!(best, dist);
}
