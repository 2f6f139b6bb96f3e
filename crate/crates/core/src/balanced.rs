//! ε-balanced integers and the star sets `P*_{r,ε}(N)`.
//!
//! An integer `n ≥ 2` is ε-balanced when every pair of its prime divisors
//! satisfies `min(p, q) ≥ max(p, q)^{1−ε}`; by monotonicity it suffices to
//! compare `P⁻(n)` with `P⁺(n)`. The star set restricts further to
//! `N ≤ n < 2N`, `Ω(n) = r` and all prime factors inside
//! `[N^{(1−ε/2)/r}, N^{(1+ε/2)/r}]`.
//!
//! Interval endpoints are compared in log space with [`TIE_TOLERANCE`]; a
//! prime that lands on an endpoint up to that tolerance counts as inside.

use rayon::prelude::*;
use serde::Serialize;

use crate::density;
use crate::sieve::{FactorShape, FactorTable, Factorization};
use crate::{Error, Result};

/// Slack used for every log-space boundary comparison.
pub const TIE_TOLERANCE: f64 = 1e-12;

const SCAN_CHUNK: u64 = 1 << 16;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BalanceClassification {
    pub n: u64,
    pub omega_big: u32,
    /// Smallest ε for which `n` is ε-balanced: `1 − ln P⁻(n) / ln P⁺(n)`.
    pub threshold: f64,
    pub is_prime: bool,
}

fn check_eps(eps: f64) -> Result<()> {
    if (0.0..1.0).contains(&eps) {
        Ok(())
    } else {
        Err(Error::param("eps", format!("expected 0 ≤ ε < 1, got {eps}")))
    }
}

fn extremes(f: &Factorization) -> Result<(u64, u64)> {
    match (f.p_minus(), f.p_plus()) {
        (Some(lo), Some(hi)) => Ok((lo, hi)),
        _ => Err(Error::param("n", "1 is not ε-balanced for any ε")),
    }
}

fn balanced_by_extremes(p_minus: u64, p_plus: u64, eps: f64) -> bool {
    (1.0 - eps) * (p_plus as f64).ln() <= (p_minus as f64).ln() + TIE_TOLERANCE
}

/// Whether `P⁻(n) ≥ P⁺(n)^{1−ε}`. Rejects n = 1 and ε outside `[0, 1)`.
pub fn is_eps_balanced(f: &Factorization, eps: f64) -> Result<bool> {
    check_eps(eps)?;
    let (lo, hi) = extremes(f)?;
    Ok(balanced_by_extremes(lo, hi, eps))
}

pub fn classify(f: &Factorization) -> Result<BalanceClassification> {
    let (lo, hi) = extremes(f)?;
    let threshold = 1.0 - (lo as f64).ln() / (hi as f64).ln();
    Ok(BalanceClassification {
        n: f.n(),
        omega_big: f.omega_big(),
        threshold,
        is_prime: f.is_prime(),
    })
}

/// Parameters of the star set `P*_{r,ε}(N)` over the window `[N, 2N)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StarSetSpec {
    n_base: u64,
    r: u32,
    eps: f64,
    a1: f64,
    a2: f64,
}

impl StarSetSpec {
    pub fn new(n_base: u64, r: u32, eps: f64) -> Result<Self> {
        if n_base < 2 {
            return Err(Error::param("N", "window base must be at least 2"));
        }
        if r == 0 {
            return Err(Error::param("r", "need at least one prime factor"));
        }
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::param("eps", format!("expected 0 < ε < 1, got {eps}")));
        }
        let r_f = f64::from(r);
        Ok(StarSetSpec {
            n_base,
            r,
            eps,
            a1: (1.0 - eps / 2.0) / r_f,
            a2: (1.0 + eps / 2.0) / r_f,
        })
    }

    pub fn n_base(&self) -> u64 {
        self.n_base
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn a1(&self) -> f64 {
        self.a1
    }

    pub fn a2(&self) -> f64 {
        self.a2
    }

    /// The window `[N, 2N)`.
    pub fn window(&self) -> (u64, u64) {
        (self.n_base, 2 * self.n_base)
    }

    /// The prime interval `[N^{a₁}, N^{a₂}]` as reals.
    pub fn prime_interval(&self) -> (f64, f64) {
        let ln_n = (self.n_base as f64).ln();
        ((self.a1 * ln_n).exp(), (self.a2 * ln_n).exp())
    }

    fn in_window(&self, n: u64) -> bool {
        self.n_base <= n && n < 2 * self.n_base
    }

    fn primes_inside(&self, p_minus: u64, p_plus: u64) -> bool {
        let ln_n = (self.n_base as f64).ln();
        (p_minus as f64).ln() >= self.a1 * ln_n - TIE_TOLERANCE
            && (p_plus as f64).ln() <= self.a2 * ln_n + TIE_TOLERANCE
    }

    pub(crate) fn contains_shape(&self, n: u64, s: &FactorShape) -> bool {
        self.in_window(n) && s.omega_big == self.r && self.primes_inside(s.p_minus, s.p_plus)
    }

    pub(crate) fn ptilde_contains_shape(&self, n: u64, s: &FactorShape) -> bool {
        self.in_window(n) && (s.omega_big == 1 || self.contains_shape(n, s))
    }
}

/// Membership in `P*_{r,ε}(N)`.
pub fn in_star_set(f: &Factorization, spec: &StarSetSpec) -> bool {
    match (f.p_minus(), f.p_plus()) {
        (Some(lo), Some(hi)) => {
            spec.in_window(f.n()) && f.omega_big() == spec.r && spec.primes_inside(lo, hi)
        }
        _ => false,
    }
}

/// Membership in `P̃ = P(N) ∪ P*_{r,ε}(N)`: a prime in `[N, 2N)` or a star-set member.
pub fn in_ptilde(f: &Factorization, spec: &StarSetSpec) -> bool {
    spec.in_window(f.n()) && (f.is_prime() || in_star_set(f, spec))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StarCount {
    pub n_base: u64,
    pub r: u32,
    pub eps: f64,
    /// `#P*_{r,ε}(N)`, each integer counted once.
    pub count: u64,
    /// Number of ordered prime tuples `(p₁, …, p_r)` with product in the set,
    /// i.e. each member weighted by `r! / ∏ eᵢ!`.
    pub ordered_count: u64,
    /// `C₀(r, ε)·N / ln N`.
    pub predicted: f64,
    pub ratio: f64,
    pub ordered_ratio: f64,
}

fn ordered_weight(table: &FactorTable, n: u64, r: u32) -> Result<u64> {
    let mut w: u64 = (1..=u64::from(r)).product();
    for (_, e) in table.prime_factors(n)? {
        w /= (1..=u64::from(e)).product::<u64>();
    }
    Ok(w)
}

fn require_window(table: &FactorTable, lo: u64, hi: u64) -> Result<()> {
    if table.lo() <= lo && hi <= table.hi() {
        Ok(())
    } else {
        Err(Error::InvalidWindow {
            lo: table.lo(),
            hi: table.hi(),
            reason: "table does not cover [N, 2N)",
        })
    }
}

/// Density predicted for the star set relative to `N / ln N`. For `r = 1` the
/// defining integral has no variables and equals 1.
fn density_constant(spec: &StarSetSpec) -> Result<f64> {
    if spec.r == 1 {
        Ok(1.0)
    } else {
        Ok(density::c0(spec.r, spec.eps)?.value)
    }
}

fn scan_chunks<T, F>(lo: u64, hi: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, u64) -> Result<T> + Sync,
{
    crate::sieve::segments(lo, hi, SCAN_CHUNK)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(a, b)| f(a, b))
        .collect()
}

/// Exact `π*_{r,ε}(N)` by a full scan of `[N, 2N)`, with the density prediction.
pub fn count_star(spec: &StarSetSpec, table: &FactorTable) -> Result<StarCount> {
    let (lo, hi) = spec.window();
    require_window(table, lo, hi)?;
    let parts = scan_chunks(lo, hi, |a, b| {
        let mut count = 0u64;
        let mut ordered = 0u64;
        for n in a..b {
            let s = table.shape(n)?;
            if spec.contains_shape(n, &s) {
                count += 1;
                ordered += ordered_weight(table, n, spec.r)?;
            }
        }
        Ok((count, ordered))
    })?;
    let (count, ordered_count) =
        parts.into_iter().fold((0, 0), |(c, o), (dc, dor)| (c + dc, o + dor));
    let n_f = spec.n_base as f64;
    let predicted = density_constant(spec)? * n_f / n_f.ln();
    Ok(StarCount {
        n_base: spec.n_base,
        r: spec.r,
        eps: spec.eps,
        count,
        ordered_count,
        predicted,
        ratio: count as f64 / predicted,
        ordered_ratio: ordered_count as f64 / predicted,
    })
}

/// [`count_star`] without a caller-supplied table: the window is sieved in
/// segments of `segment_len` entries, keeping memory bounded.
pub fn count_star_streaming(spec: &StarSetSpec, segment_len: u64) -> Result<StarCount> {
    let (lo, hi) = spec.window();
    let mut count = 0u64;
    let mut ordered_count = 0u64;
    for (a, b) in crate::sieve::segments(lo, hi, segment_len) {
        let table = FactorTable::build_segmented(a, b, segment_len as usize)?;
        let parts = scan_chunks(a, b, |x, y| {
            let mut c = 0u64;
            let mut o = 0u64;
            for n in x..y {
                if spec.contains_shape(n, &table.shape(n)?) {
                    c += 1;
                    o += ordered_weight(&table, n, spec.r)?;
                }
            }
            Ok((c, o))
        })?;
        for (c, o) in parts {
            count += c;
            ordered_count += o;
        }
    }
    let n_f = spec.n_base as f64;
    let predicted = density_constant(spec)? * n_f / n_f.ln();
    Ok(StarCount {
        n_base: spec.n_base,
        r: spec.r,
        eps: spec.eps,
        count,
        ordered_count,
        predicted,
        ratio: count as f64 / predicted,
        ordered_ratio: ordered_count as f64 / predicted,
    })
}

/// `#{N ≤ n < 2N : Ω(n) = r and n is ε-balanced}`.
pub fn count_eps_r(n_base: u64, r: u32, eps: f64, table: &FactorTable) -> Result<u64> {
    check_eps(eps)?;
    if n_base < 2 {
        return Err(Error::param("N", "window base must be at least 2"));
    }
    let (lo, hi) = (n_base, 2 * n_base);
    require_window(table, lo, hi)?;
    let parts = scan_chunks(lo, hi, |a, b| {
        let mut c = 0u64;
        for n in a..b {
            let s = table.shape(n)?;
            if s.omega_big == r && balanced_by_extremes(s.p_minus, s.p_plus, eps) {
                c += 1;
            }
        }
        Ok(c)
    })?;
    Ok(parts.into_iter().sum())
}
