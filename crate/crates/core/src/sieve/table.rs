use rayon::prelude::*;
use serde::Serialize;

use super::{primes_up_to, segments, isqrt};
use crate::{Error, Result};

/// Default number of entries sieved per segment.
pub const DEFAULT_SEGMENT_LEN: usize = 1 << 22;

/// Exclusive upper bound on table windows; keeps every sieving prime below 2¹⁶.
pub const MAX_TABLE_HI: u64 = 1 << 32;

const EXP_BITS: u32 = 8;
const EXP_MASK: u32 = (1 << EXP_BITS) - 1;

/// Smallest-prime-factor index over a window `[lo, hi)`.
///
/// Every entry records, in increasing order, the primes `p ≤ √(hi − 1)` that
/// divide it together with their exponents. Whatever is left after dividing
/// those out is either 1 or a single prime larger than the sieving bound, so
/// each entry carries a complete factorization. Entries are packed
/// `(p << 8) | e` in a flat buffer indexed by per-entry start offsets.
///
/// The table is immutable once built and can be shared between threads.
#[derive(Clone, Debug)]
pub struct FactorTable {
    lo: u64,
    hi: u64,
    starts: Vec<u32>,
    packed: Vec<u32>,
}

/// Build a table over `[lo, hi)` using [`DEFAULT_SEGMENT_LEN`] segments.
pub fn build_factor_table(lo: u64, hi: u64) -> Result<FactorTable> {
    FactorTable::build_segmented(lo, hi, DEFAULT_SEGMENT_LEN)
}

struct Segment {
    counts: Vec<u8>,
    packed: Vec<u32>,
}

fn sieve_segment(lo: u64, hi: u64, primes: &[u64]) -> Segment {
    let len = (hi - lo) as usize;
    let mut counts = vec![0u8; len];
    for &p in primes {
        if p >= hi {
            break;
        }
        let mut m = lo.div_ceil(p) * p;
        while m < hi {
            counts[(m - lo) as usize] += 1;
            m += p;
        }
    }

    let mut cursor = Vec::with_capacity(len);
    let mut total = 0usize;
    for &c in &counts {
        cursor.push(total);
        total += c as usize;
    }
    let mut packed = vec![0u32; total];
    for &p in primes {
        if p >= hi {
            break;
        }
        let mut m = lo.div_ceil(p) * p;
        while m < hi {
            let i = (m - lo) as usize;
            packed[cursor[i]] = ((p as u32) << EXP_BITS) | 1;
            cursor[i] += 1;
            m += p;
        }
        // Higher powers bump the entry just written for p.
        let mut pk = p * p;
        while pk < hi {
            let mut m = lo.div_ceil(pk) * pk;
            while m < hi {
                let i = (m - lo) as usize;
                packed[cursor[i] - 1] += 1;
                m += pk;
            }
            match pk.checked_mul(p) {
                Some(next) => pk = next,
                None => break,
            }
        }
    }
    Segment { counts, packed }
}

impl FactorTable {
    /// Build a table over `[lo, hi)`, sieving `segment_len` entries at a time.
    ///
    /// Segments are independent and are sieved in parallel; the result does
    /// not depend on `segment_len` or on the number of worker threads.
    pub fn build_segmented(lo: u64, hi: u64, segment_len: usize) -> Result<Self> {
        if lo < 2 {
            return Err(Error::InvalidWindow { lo, hi, reason: "window floor is 2" });
        }
        if hi <= lo {
            return Err(Error::InvalidWindow { lo, hi, reason: "empty window" });
        }
        if hi > MAX_TABLE_HI {
            return Err(Error::InvalidWindow { lo, hi, reason: "hi exceeds 2^32" });
        }
        if segment_len == 0 {
            return Err(Error::param("segment_len", "must be positive"));
        }
        let primes = primes_up_to(isqrt(hi - 1));
        let parts: Vec<Segment> = segments(lo, hi, segment_len as u64)
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|(a, b)| sieve_segment(a, b, &primes))
            .collect();

        let len = (hi - lo) as usize;
        let total: usize = parts.iter().map(|s| s.packed.len()).sum();
        if total >= u32::MAX as usize {
            return Err(Error::Budget(format!("{total} packed factors exceed table capacity")));
        }
        let mut starts = Vec::with_capacity(len + 1);
        let mut packed = Vec::with_capacity(total);
        for seg in parts {
            let mut at = packed.len() as u32;
            for c in seg.counts {
                starts.push(at);
                at += c as u32;
            }
            packed.extend_from_slice(&seg.packed);
        }
        starts.push(packed.len() as u32);
        Ok(FactorTable { lo, hi, starts, packed })
    }

    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.hi == self.lo
    }

    pub fn contains(&self, n: u64) -> bool {
        self.lo <= n && n < self.hi
    }

    /// Largest prime used for sieving; primes above it appear only as the
    /// trailing cofactor of an entry.
    pub fn sieve_bound(&self) -> u64 {
        isqrt(self.hi - 1)
    }

    fn small(&self, n: u64) -> Result<&[u32]> {
        if !self.contains(n) {
            return Err(Error::OutOfWindow { n, lo: self.lo, hi: self.hi });
        }
        let i = (n - self.lo) as usize;
        Ok(&self.packed[self.starts[i] as usize..self.starts[i + 1] as usize])
    }

    /// Smallest prime factor of `n` if it is at most [`Self::sieve_bound`];
    /// `None` means `n` has no such factor and is therefore prime.
    pub fn spf(&self, n: u64) -> Result<Option<u32>> {
        Ok(self.small(n)?.first().map(|&e| e >> EXP_BITS))
    }

    pub fn is_prime(&self, n: u64) -> Result<bool> {
        let small = self.small(n)?;
        Ok(match small {
            [] => true,
            [e] => (e & EXP_MASK) == 1 && u64::from(e >> EXP_BITS) == n,
            _ => false,
        })
    }

    /// Iterate the prime factorization of `n` as `(prime, exponent)` pairs in
    /// increasing prime order, without allocating.
    pub fn prime_factors(&self, n: u64) -> Result<PrimeFactors<'_>> {
        let small = self.small(n)?;
        let mut rest = n;
        for &e in small {
            let p = u64::from(e >> EXP_BITS);
            for _ in 0..(e & EXP_MASK) {
                rest /= p;
            }
        }
        Ok(PrimeFactors { small: small.iter(), rest })
    }

    /// Ω(n), P⁻(n) and P⁺(n) without materialising the factor list.
    pub fn shape(&self, n: u64) -> Result<FactorShape> {
        let mut shape = FactorShape { omega_big: 0, distinct: 0, p_minus: 0, p_plus: 0 };
        for (p, e) in self.prime_factors(n)? {
            if shape.distinct == 0 {
                shape.p_minus = p;
            }
            shape.p_plus = p;
            shape.distinct += 1;
            shape.omega_big += e;
        }
        Ok(shape)
    }

    pub fn factorize(&self, n: u64) -> Result<Factorization> {
        let factors: Vec<(u64, u32)> = self.prime_factors(n)?.collect();
        Ok(Factorization::from_sorted(n, factors))
    }
}

/// Iterator returned by [`FactorTable::prime_factors`].
#[derive(Clone, Debug)]
pub struct PrimeFactors<'a> {
    small: std::slice::Iter<'a, u32>,
    rest: u64,
}

impl Iterator for PrimeFactors<'_> {
    type Item = (u64, u32);

    fn next(&mut self) -> Option<(u64, u32)> {
        if let Some(&e) = self.small.next() {
            return Some((u64::from(e >> EXP_BITS), e & EXP_MASK));
        }
        if self.rest > 1 {
            let p = self.rest;
            self.rest = 1;
            return Some((p, 1));
        }
        None
    }
}

/// Summary of a factorization used by the window scans.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FactorShape {
    pub omega_big: u32,
    pub distinct: u32,
    pub p_minus: u64,
    pub p_plus: u64,
}

/// Prime factorization of a single integer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Factorization {
    n: u64,
    factors: Vec<(u64, u32)>,
    omega_big: u32,
}

impl Factorization {
    fn from_sorted(n: u64, factors: Vec<(u64, u32)>) -> Self {
        let omega_big = factors.iter().map(|&(_, e)| e).sum();
        Factorization { n, factors, omega_big }
    }

    /// The empty factorization of 1.
    pub fn unit() -> Self {
        Factorization { n: 1, factors: Vec::new(), omega_big: 0 }
    }

    /// Assemble a factorization from `(prime, exponent)` pairs.
    ///
    /// Primes must be strictly increasing and exponents positive; primality of
    /// the bases is the caller's responsibility.
    pub fn from_factors(factors: Vec<(u64, u32)>) -> Result<Self> {
        let mut n: u64 = 1;
        let mut prev = 1u64;
        for &(p, e) in &factors {
            if p <= prev {
                return Err(Error::param("factors", "primes must be strictly increasing and > 1"));
            }
            if e == 0 {
                return Err(Error::param("factors", "exponents must be positive"));
            }
            for _ in 0..e {
                n = n
                    .checked_mul(p)
                    .ok_or_else(|| Error::param("factors", "product overflows u64"))?;
            }
            prev = p;
        }
        Ok(Self::from_sorted(n, factors))
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    /// Ω(n), the number of prime factors counted with multiplicity.
    pub fn omega_big(&self) -> u32 {
        self.omega_big
    }

    /// Number of distinct prime factors.
    pub fn omega(&self) -> usize {
        self.factors.len()
    }

    /// P⁻(n); `None` for n = 1.
    pub fn p_minus(&self) -> Option<u64> {
        self.factors.first().map(|&(p, _)| p)
    }

    /// P⁺(n); `None` for n = 1.
    pub fn p_plus(&self) -> Option<u64> {
        self.factors.last().map(|&(p, _)| p)
    }

    pub fn is_prime(&self) -> bool {
        matches!(self.factors.as_slice(), [(_, 1)])
    }

    pub fn is_prime_power(&self) -> bool {
        self.factors.len() == 1
    }
}
