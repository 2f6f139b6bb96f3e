//! Windowed sieving, factorization and the arithmetic functions built on it.

mod arith;
mod li;
mod table;

pub use arith::{euler_phi, mobius, SmallSieve};
pub use li::{log_integral, LI_AT_2};
pub use table::{
    build_factor_table, FactorShape, FactorTable, Factorization, PrimeFactors,
    DEFAULT_SEGMENT_LEN, MAX_TABLE_HI,
};

/// ⌊√n⌋ for any u64.
pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u64;
    while x.checked_mul(x).is_none_or(|sq| sq > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|sq| sq <= n) {
        x += 1;
    }
    x
}

/// All primes `p ≤ limit`, by an odd-only sieve of Eratosthenes.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let half = (limit as usize - 1) / 2; // odd numbers 3, 5, ..., ≤ limit
    let mut composite = vec![false; half + 1];
    let mut i = 1usize;
    while (2 * i + 1) * (2 * i + 1) <= limit as usize {
        if !composite[i] {
            let p = 2 * i + 1;
            let mut j = (p * p - 1) / 2;
            while j <= half {
                composite[j] = true;
                j += p;
            }
        }
        i += 1;
    }
    let mut primes = vec![2];
    primes.extend((1..=half).filter(|&i| !composite[i]).map(|i| 2 * i as u64 + 1));
    primes
}

/// Split `[lo, hi)` into consecutive half-open pieces of at most `len` entries.
pub fn segments(lo: u64, hi: u64, len: u64) -> impl Iterator<Item = (u64, u64)> {
    let len = len.max(1);
    let mut at = lo;
    std::iter::from_fn(move || {
        if at >= hi {
            return None;
        }
        let end = hi.min(at.saturating_add(len));
        let seg = (at, end);
        at = end;
        Some(seg)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isqrt_edges() {
        for n in 0..10_000u64 {
            let r = isqrt(n);
            assert!(r * r <= n && (r + 1) * (r + 1) > n, "{n}");
        }
        assert_eq!(isqrt(u64::MAX), u32::MAX as u64);
        assert_eq!(isqrt((1 << 32) - 1), 65535);
    }

    #[test]
    fn prime_counts() {
        assert_eq!(primes_up_to(1), Vec::<u64>::new());
        assert_eq!(primes_up_to(2), vec![2]);
        assert_eq!(primes_up_to(30), vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert_eq!(primes_up_to(10_000).len(), 1229);
        assert_eq!(primes_up_to(1_000_000).len(), 78_498);
    }

    #[test]
    fn segment_cover() {
        let segs: Vec<_> = segments(10, 35, 10).collect();
        assert_eq!(segs, vec![(10, 20), (20, 30), (30, 35)]);
        assert_eq!(segments(5, 5, 3).count(), 0);
    }
}
