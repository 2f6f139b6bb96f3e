use balanced_gaps::tuples::{
    generate_tuple, gpy_constants, is_admissible, min_k_for_two, nu_p, parse_tuple_file, positivity_factor,
    singular_series, sqrt_rule_l, AdmissibleTuple, GpyConstantsQuery,
};
use proptest::prelude::*;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn tuple(v: &[u64]) -> AdmissibleTuple {
    AdmissibleTuple::new(v.to_vec()).unwrap()
}

#[test]
fn admissible_iff_nonzero_series() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut both = [0, 0];
    for _ in 0..100 {
        let k = rng.random_range(1..=10);
        let mut offs = vec![0u64];
        while offs.len() < k {
            let h = rng.random_range(1..60);
            if !offs.contains(&h) {
                offs.push(h);
            }
        }
        let h = AdmissibleTuple::new(offs).unwrap();
        let s = singular_series(&h, 10_000).unwrap();
        assert_eq!(is_admissible(&h), s.value != 0.0, "{h}");
        both[usize::from(is_admissible(&h))] += 1;
    }
    assert!(both[0] > 0 && both[1] > 0);
}

#[test]
fn euler_product_is_stable() {
    for h in [tuple(&[0, 2]), tuple(&[0, 2, 6]), tuple(&[0, 4, 6, 10, 12]), generate_tuple(8).unwrap()] {
        for p_max in [1_000, 10_000, 100_000] {
            let a = singular_series(&h, p_max).unwrap();
            let b = singular_series(&h, 2 * p_max).unwrap();
            assert!((a.value.ln() - b.value.ln()).abs() <= a.tail_log_bound, "{h} at {p_max}");
            assert!(b.tail_log_bound < a.tail_log_bound);
        }
    }
}

#[test]
fn twin_constant() {
    let s = singular_series(&tuple(&[0, 2]), 10_000_000).unwrap();
    let two_c2 = 1.320_323_631_693_739_1f64;
    assert!((s.value.ln() - two_c2.ln()).abs() <= s.tail_log_bound);
    assert!((s.value - two_c2).abs() < 1e-6);
}

#[test]
fn trivial_series() {
    assert_eq!(singular_series(&tuple(&[0]), 1_000_000).unwrap().value, 1.0);
    assert_eq!(singular_series(&tuple(&[0, 1]), 1_000_000).unwrap().value, 0.0);
}

#[test]
fn generated_tuples_are_admissible() {
    let mut last = 0;
    for k in 1..=60 {
        let h = generate_tuple(k).unwrap();
        assert_eq!(h.k(), k);
        assert_eq!(h.offsets()[0], 0);
        assert!(is_admissible(&h), "k = {k}");
        assert!(h.diameter() >= last);
        last = h.diameter();
    }
}

fn admissible_by_search(offs: &[u64]) -> bool {
    let k = offs.len() as u64;
    (2..=k.max(2)).filter(|&p| (2..p).all(|q| p % q != 0)).all(|p| {
        let mut hit = vec![false; p as usize];
        offs.iter().for_each(|&h| hit[(h % p) as usize] = true);
        hit.contains(&false)
    })
}

#[test]
fn greedy_width_against_exhaustive_minimum() {
    // minimal diameters of admissible k-tuples for k ≤ 8
    let minimal = [0u64, 2, 6, 8, 12, 16, 20, 26];
    for k in 1..=8usize {
        let mut best = None;
        'diam: for d in 0..=40u64 {
            // all subsets of [0, d] of size k containing 0 and d
            let inner: Vec<u64> = (1..d).collect();
            let need = k.saturating_sub(2);
            if k >= 2 && d == 0 || k == 1 && d > 0 {
                continue;
            }
            let mut idx: Vec<usize> = (0..need).collect();
            loop {
                if need <= inner.len() {
                    let mut offs = vec![0];
                    offs.extend(idx.iter().map(|&i| inner[i]));
                    if k >= 2 {
                        offs.push(d);
                    }
                    if admissible_by_search(&offs) {
                        best = Some(d);
                        break 'diam;
                    }
                } else {
                    break;
                }
                // next combination
                let mut i = need;
                loop {
                    if i == 0 {
                        continue 'diam;
                    }
                    i -= 1;
                    if idx[i] < inner.len() - need + i {
                        idx[i] += 1;
                        for j in i + 1..need {
                            idx[j] = idx[j - 1] + 1;
                        }
                        break;
                    }
                }
            }
        }
        assert_eq!(best, Some(minimal[k - 1]), "k = {k}");
        assert!(generate_tuple(k).unwrap().diameter() >= minimal[k - 1]);
    }
}

#[test]
fn six_tuple_gap_at_least_sixteen() {
    assert!(generate_tuple(6).unwrap().diameter() >= 16);
}

#[test]
fn tuple_file_round_trip() {
    let text = "# comment\n0, 2, 6\n\n0,4,6 # trailing\n";
    let ts = parse_tuple_file(text).unwrap();
    assert_eq!(ts, vec![tuple(&[0, 2, 6]), tuple(&[0, 4, 6])]);
    assert!(parse_tuple_file("0,2,2").is_err());
    assert!(parse_tuple_file("0,x").is_err());
}

#[test]
fn positivity_never_holds_without_star_set() {
    for k in 1..=1000u64 {
        for l in 0..=k {
            assert!(positivity_factor(k, l, 0.0) < 0.0, "k = {k}, l = {l}");
        }
    }
}

#[test]
fn min_k_nonincreasing_in_eps() {
    let ks: Vec<u64> = [0.05, 0.1, 0.2, 0.3]
        .iter()
        .map(|&e| min_k_for_two(2, e, 5_000).unwrap().optimal.unwrap().0)
        .collect();
    assert!(ks.windows(2).all(|w| w[0] >= w[1]), "{ks:?}");
}

#[test]
fn min_k_matches_exhaustive_scan() {
    let c0 = 2.0 * (1.1f64 / 0.9).ln();
    let scan = (1..=200u64).find(|&k| (0..=k).any(|l| positivity_factor(k, l, c0) > 0.0));
    let mk = min_k_for_two(2, 0.2, 200).unwrap();
    assert_eq!(mk.optimal.map(|p| p.0), scan);
    assert_eq!(mk.optimal, Some((30, 2)));
    let (k, l) = mk.sqrt_rule.unwrap();
    assert_eq!(l, sqrt_rule_l(k));
    assert!(k >= 30);
}

#[test]
fn constants_formula() {
    let c = gpy_constants(GpyConstantsQuery::from_delta(0.05).unwrap()).unwrap();
    assert_eq!(c.k0, 441);
    let c = gpy_constants(GpyConstantsQuery::from_theta(0.971).unwrap()).unwrap();
    assert_eq!(c.reference, Some((6, 16)));
    // δ = 1/(2m) sits exactly on a ceiling boundary
    let c = gpy_constants(GpyConstantsQuery::from_delta(0.1).unwrap()).unwrap();
    assert_eq!(c.k0, 121);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn series_translation_invariant(offs in proptest::collection::btree_set(0u64..80, 1..7), c in 0u64..1_000_000) {
        let h = AdmissibleTuple::new(offs.into_iter().collect()).unwrap();
        let g = h.shifted(c);
        for p in [2u64, 3, 5, 7, 11, 13, 101] {
            prop_assert_eq!(nu_p(&h, p), nu_p(&g, p));
        }
        let a = singular_series(&h, 20_000).unwrap().value;
        let b = singular_series(&g, 20_000).unwrap().value;
        if a == 0.0 {
            prop_assert_eq!(b, 0.0);
        } else {
            prop_assert!((a - b).abs() <= 1e-12 * a);
        }
    }
}
