use mdd_core::circle::{classify, dirichlet_approx, ArcParams};
use mdd_core::digitset::DigitSet;
use mdd_core::expsum::{
    expsum_digitset_block, expsum_digitset_direct, expsum_digitset_interval, expsum_digitset_prefix,
};
use mdd_core::ntheory::{gcd, mod_inverse, ramanujan_sum, sieve_divisor_count, SieveTable};
use proptest::prelude::*;

fn close(a: mdd_core::Complex64, b: mdd_core::Complex64, scale: f64) -> bool {
    (a - b).norm() <= 1e-9 * scale.max(1.0)
}

proptest! {
    #[test]
    fn ramanujan_periodic_in_n(q in 1u64..300, n in 0u64..10_000) {
        prop_assert_eq!(ramanujan_sum(q, n).unwrap(), ramanujan_sum(q, n + q).unwrap());
    }

    #[test]
    fn ramanujan_multiplicative_in_q(q1 in 1u64..60, q2 in 1u64..60, n in 0u64..5000) {
        prop_assume!(gcd(q1, q2) == 1);
        prop_assert_eq!(
            ramanujan_sum(q1 * q2, n).unwrap(),
            ramanujan_sum(q1, n).unwrap() * ramanujan_sum(q2, n).unwrap()
        );
    }

    #[test]
    fn inverse_is_inverse(q in 2u64..10_000, a in 1u64..10_000) {
        prop_assume!(gcd(a, q) == 1);
        let inv = mod_inverse(a, q).unwrap();
        prop_assert!(inv < q);
        prop_assert_eq!((a as u128 * inv as u128) % q as u128, 1);
    }

    #[test]
    fn block_matches_direct(g in 3u64..13, b_off in 0u64..10, k in 0u32..4, alpha in 0.0f64..1.0) {
        let b = 2 + b_off % (g - 2);
        let ds = DigitSet::new(g, b).unwrap();
        let gk = ds.pow(k).unwrap();
        let block = expsum_digitset_block(&ds, alpha, k).unwrap();
        // the block includes n = 0
        let direct = expsum_digitset_direct(&ds, alpha, 0, gk - 1) + 1.0;
        prop_assert!(close(block, direct, (g - 1).pow(k) as f64));
    }

    #[test]
    fn prefix_matches_direct(h in 1u64..5000, alpha in 0.0f64..1.0) {
        let ds = DigitSet::new(10, 7).unwrap();
        let prefix = expsum_digitset_prefix(&ds, alpha, h).unwrap();
        let direct = expsum_digitset_direct(&ds, alpha, 0, h);
        prop_assert!(close(prefix, direct, h as f64));
    }

    #[test]
    fn interval_matches_direct(m in 2u32..5, h in 1u64..3000, alpha in 0.0f64..1.0) {
        let ds = DigitSet::new(10, 7).unwrap();
        let x = 10u64.pow(m);
        let via = expsum_digitset_interval(&ds, alpha, x, h).unwrap();
        let direct = expsum_digitset_direct(&ds, alpha, x, x + h);
        prop_assert!(close(via, direct, h as f64));
    }

    #[test]
    fn digitset_sum_conjugate_symmetry(h in 1u64..3000, alpha in 0.0f64..1.0) {
        let ds = DigitSet::new(12, 2).unwrap();
        let s = expsum_digitset_prefix(&ds, alpha, h).unwrap();
        let t = expsum_digitset_prefix(&ds, 1.0 - alpha, h).unwrap();
        prop_assert!(close(s, t.conj(), h as f64));
    }

    #[test]
    fn count_range_agrees_with_enumeration(lo in 0u64..20_000, len in 0u64..5_000) {
        let ds = DigitSet::new(10, 7).unwrap();
        prop_assert_eq!(ds.count_range(lo, lo + len), ds.enumerate(lo, lo + len).len() as u64);
    }

    #[test]
    fn dirichlet_inequality(alpha in 0.0f64..1.0, bound in 1u64..100_000) {
        let (a, q) = dirichlet_approx(alpha, bound).unwrap();
        prop_assert!(q >= 1 && q <= bound);
        prop_assert_eq!(gcd(a, q), 1);
        prop_assert!((alpha - a as f64 / q as f64).abs() <= 1.0 / (q as f64 * bound as f64) * (1.0 + 1e-9));
    }

    #[test]
    fn major_classification_is_membership(alpha in 0.0f64..1.0) {
        let params = ArcParams::new(100_000_000, 0.02).unwrap();
        let c = classify(&params, alpha);
        let brute = params.major_arcs().into_iter().find(|arc| arc.contains(alpha));
        prop_assert_eq!(c.is_major(), brute.is_some());
    }

    #[test]
    fn sieve_cache_round_trip(lo in 1u64..100_000, len in 0u64..2000) {
        let t = sieve_divisor_count(lo, lo + len).unwrap();
        let mut buf = Vec::new();
        t.write_cache(&mut buf).unwrap();
        let back = SieveTable::read_cache(buf.as_slice()).unwrap();
        prop_assert_eq!(back, t);
    }
}

#[test]
fn divisor_sieve_matches_trial_division() {
    let lo = 999_000;
    let t = sieve_divisor_count(lo, lo + 1000).unwrap();
    for n in lo..=lo + 1000 {
        let brute = (1..=n).filter(|d| d * d <= n && n % d == 0).map(|d| if d * d == n { 1 } else { 2 }).sum::<i64>();
        assert_eq!(t.get(n), Some(brute), "n = {n}");
    }
}
