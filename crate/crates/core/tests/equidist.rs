use balanced_gaps::balanced::StarSetSpec;
use balanced_gaps::build_factor_table;
use balanced_gaps::equidist::{
    bv_prime_discrepancy, bv_star_discrepancy, q_max_from_log_power, weighted_discrepancy, DiscrepancyConfig,
    WeightFn,
};

#[test]
fn class_counts_partition_both_targets() {
    let n = 100_000;
    let primes_table = build_factor_table(2, n + 1).unwrap();
    let rep = bv_prime_discrepancy(&DiscrepancyConfig::primes(n, 100).unwrap(), &primes_table).unwrap();
    assert_eq!(rep.set_size, 9592.0);
    for row in &rep.per_q {
        assert_eq!(row.coprime_count + row.noncoprime_count, rep.set_size, "q = {}", row.q);
    }
    let spec = StarSetSpec::new(n, 2, 0.3).unwrap();
    let window = build_factor_table(n, 2 * n).unwrap();
    let rep = bv_star_discrepancy(&DiscrepancyConfig::star(spec, 100).unwrap(), &window).unwrap();
    assert!(rep.set_size > 0.0);
    for row in &rep.per_q {
        assert_eq!(row.coprime_count + row.noncoprime_count, rep.set_size, "q = {}", row.q);
    }
}

#[test]
fn totals_grow_with_budget() {
    let n = 200_000;
    let t = build_factor_table(2, n + 1).unwrap();
    let mut last = 0.0;
    for q in [1, 5, 20, 80, 200] {
        let total = bv_prime_discrepancy(&DiscrepancyConfig::primes(n, q).unwrap(), &t).unwrap().total;
        assert!(total >= last);
        last = total;
    }
    let mut last = 0.0;
    for q in [1, 5, 20, 80] {
        let rep = weighted_discrepancy(&DiscrepancyConfig::primes(n, q).unwrap(), 0.6, &WeightFn::Mobius).unwrap();
        assert!(rep.total >= last);
        last = rep.total;
    }
}

#[test]
fn relative_discrepancy_shrinks_with_scale() {
    let rel = |n: u64| {
        let q = q_max_from_log_power(n, 3.0);
        let t = build_factor_table(2, n + 1).unwrap();
        bv_prime_discrepancy(&DiscrepancyConfig::primes(n, q).unwrap(), &t).unwrap().total / n as f64
    };
    assert!(rel(1_000_000) < rel(10_000));
}

#[test]
fn per_q_rows_ascend() {
    let n = 50_000;
    let t = build_factor_table(2, n + 1).unwrap();
    let rep = bv_prime_discrepancy(&DiscrepancyConfig::primes(n, 60).unwrap(), &t).unwrap();
    let qs: Vec<u64> = rep.per_q.iter().map(|r| r.q).collect();
    assert_eq!(qs, (1..=60).collect::<Vec<_>>());
    assert!(rep.per_q.iter().all(|r| r.max_abs_dev >= 0.0));
}
