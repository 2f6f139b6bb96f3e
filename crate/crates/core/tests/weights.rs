use balanced_gaps::balanced::StarSetSpec;
use balanced_gaps::build_factor_table;
use balanced_gaps::tuples::AdmissibleTuple;
use balanced_gaps::weights::{
    lambda_r_batch, lambda_r_naive, lemma1_main_term, lemma2_main_term, moment_lemma1, moment_lemma2,
    moment_lemma3, s_statistic, squarefree_divisors_up_to, MomentOptions, WeightConfig,
};
use proptest::prelude::*;

fn cfg(offs: &[u64], l: u32, r: f64) -> WeightConfig {
    WeightConfig::new(AdmissibleTuple::new(offs.to_vec()).unwrap(), l, r).unwrap()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1e-3)
}

#[test]
fn batch_matches_naive_on_several_configs() {
    let lo = 1_000_000;
    let hi = lo + 10_000;
    let t = build_factor_table(lo, hi + 20).unwrap();
    for c in [cfg(&[0, 2], 0, 500.0), cfg(&[0, 4, 6], 2, 2_000.0), cfg(&[0, 2, 6, 8, 12], 1, 300.0)] {
        let fast = lambda_r_batch(lo, hi, &c).unwrap();
        for (i, n) in (lo..hi).enumerate() {
            let slow = lambda_r_naive(n, &c, &t).unwrap();
            assert!(close(fast[i], slow), "n = {n}: {} vs {slow}", fast[i]);
        }
    }
}

#[test]
fn large_prime_does_not_change_small_divisors() {
    // if n + h is a prime above R, dropping h leaves the divisors d ≤ R of
    // the offset product unchanged
    let lo = 100_000;
    let hi = lo + 1_000;
    let offsets = [0u64, 2, 6, 8, 12];
    let t = build_factor_table(lo, hi + 12).unwrap();
    let mut checked = 0;
    for big_r in [50.0, 300.0, 5_000.0] {
        for n in lo..hi {
            for &h in &offsets {
                if !t.is_prime(n + h).unwrap() || (n + h) as f64 <= big_r {
                    continue;
                }
                let rest: Vec<u64> = offsets.iter().copied().filter(|&x| x != h).collect();
                let mut with = squarefree_divisors_up_to(n, &offsets, big_r, &t).unwrap();
                let mut without = squarefree_divisors_up_to(n, &rest, big_r, &t).unwrap();
                with.sort_unstable();
                without.sort_unstable();
                assert_eq!(with, without, "n = {n}, h = {h}");
                checked += 1;
            }
        }
    }
    assert!(checked > 500);
}

#[test]
fn main_terms_scale_with_log_r() {
    let n = 1_000_000;
    for (offs, l) in [(&[0u64, 2][..], 1u32), (&[0, 2, 6], 2), (&[0, 4, 6, 10], 0)] {
        let (a, b) = (cfg(offs, l, 30.0), cfg(offs, l, 900.0));
        let power = (offs.len() as u32 + 2 * l) as i32;
        let expect = 2f64.powi(power);
        let r1 = lemma1_main_term(n, &b, 1.0) / lemma1_main_term(n, &a, 1.0);
        let r2 = lemma2_main_term(n, &b, 1.0) / lemma2_main_term(n, &a, 1.0);
        assert!((r1 / expect - 1.0).abs() < 1e-12);
        assert!((r2 / (2.0 * expect) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn moment_ratios_finite_and_positive() {
    let opts = MomentOptions { singular_p_max: 100_000, ..Default::default() };
    let n = 100_000;
    for (offs, l) in [(&[0u64, 2][..], 1u32), (&[0, 2, 6], 1), (&[0, 4, 6, 10], 0)] {
        let c = cfg(offs, l, (n as f64).powf(0.25));
        let m1 = moment_lemma1(n, &c, &opts).unwrap();
        let m2 = moment_lemma2(n, &c, offs[0], &opts).unwrap();
        for rep in [&m1, &m2] {
            let r = rep.ratio.unwrap();
            assert!(r.is_finite() && r > 0.0, "{offs:?}: {r}");
            assert!(!rep.degenerate);
        }
    }
}

#[test]
fn lemma3_dominates_lemma2() {
    let opts = MomentOptions { singular_p_max: 100_000, ..Default::default() };
    let n = 100_000;
    let c = cfg(&[0, 2, 6], 1, (n as f64).powf(0.25));
    let m2 = moment_lemma2(n, &c, 2, &opts).unwrap();
    let spec = StarSetSpec::new(n, 2, 0.3).unwrap();
    let m3 = moment_lemma3(n, &c, 2, &spec, &opts).unwrap();
    assert!(m3.empirical >= m2.empirical);
    let tiny = StarSetSpec::new(n, 2, 1e-3).unwrap();
    let m3 = moment_lemma3(n, &c, 2, &tiny, &opts).unwrap();
    assert!((m3.empirical - m2.empirical).abs() <= 1e-3 * m2.empirical);
}

#[test]
fn s_statistic_is_deterministic() {
    let opts = MomentOptions { singular_p_max: 10_000, ..Default::default() };
    let c = cfg(&[0, 2, 6], 1, 20.0);
    let spec = StarSetSpec::new(50_000, 2, 0.3).unwrap();
    let a = s_statistic(50_000, &c, &spec, &opts).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let b = pool.install(|| s_statistic(50_000, &c, &spec, &opts)).unwrap();
    assert_eq!(a, b);
    let small = MomentOptions { segment_len: 7_777, ..opts };
    let c_ = s_statistic(50_000, &c, &spec, &small).unwrap();
    assert!((a.empirical - c_.empirical).abs() <= 1e-9 * a.empirical.abs());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn weight_depends_on_residue_mod_primorial(n in 10_000u64..1_000_000, j in 1u64..50) {
        // every squarefree d ≤ 10 divides 210
        let c = cfg(&[0, 2, 6], 1, 10.0);
        let m = n + 210 * j;
        let a = lambda_r_batch(n, n + 1, &c).unwrap()[0];
        let b = lambda_r_batch(m, m + 1, &c).unwrap()[0];
        prop_assert_eq!(a, b);
    }
}
