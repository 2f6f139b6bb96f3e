//! The truncated divisor-sum weight
//!
//! ```text
//! Λ_R(n; H, l) = 1/(k+l)! · Σ_{d | P_H(n), d ≤ R} μ(d) · ln^{k+l}(R/d),   P_H(n) = ∏ (n + hᵢ)
//! ```
//!
//! and its second moments over `n ∈ [N, 2N)`, plain and twisted by the
//! indicator of primes (or of `P̃ = P(N) ∪ P*_{r,ε}(N)`) at a shifted position.
//!
//! Two evaluation paths exist. [`lambda_r_naive`] factors each `n + hᵢ` and
//! enumerates squarefree divisors depth-first. [`WeightPlan`] goes the other
//! way: for each squarefree `d ≤ R` it finds by CRT the `∏_{p|d} ν_p(H)`
//! classes of `n` mod `d` with `d | P_H(n)` and adds the coefficient of `d` to
//! every such `n` in a range.

use serde::Serialize;

use crate::balanced::StarSetSpec;
use crate::density;
use crate::sieve::{FactorTable, SmallSieve, DEFAULT_SEGMENT_LEN};
use crate::tuples::{nu_p, positivity_factor, singular_series, AdmissibleTuple};
use crate::{Error, Result};

/// Default cap on the number of residue classes a [`WeightPlan`] may hold.
pub const DEFAULT_CLASS_BUDGET: u64 = 20_000_000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeightConfig {
    tuple: AdmissibleTuple,
    l: u32,
    big_r: f64,
}

impl WeightConfig {
    pub fn new(tuple: AdmissibleTuple, l: u32, big_r: f64) -> Result<Self> {
        if !(big_r >= 2.0) || !big_r.is_finite() {
            return Err(Error::param("R", format!("expected finite R ≥ 2, got {big_r}")));
        }
        if big_r > u32::MAX as f64 {
            return Err(Error::param("R", "R above 2^32 is not supported"));
        }
        Ok(WeightConfig { tuple, l, big_r })
    }

    pub fn tuple(&self) -> &AdmissibleTuple {
        &self.tuple
    }

    pub fn k(&self) -> usize {
        self.tuple.k()
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn big_r(&self) -> f64 {
        self.big_r
    }

    /// The common exponent and factorial order `k + l`.
    pub fn order(&self) -> u32 {
        self.k() as u32 + self.l
    }

    fn r_floor(&self) -> u64 {
        self.big_r.floor() as u64
    }

    /// `μ(d) ln^{k+l}(R/d) / (k+l)!` for a squarefree `d` with `ω` primes.
    fn coefficient(&self, d: u64, omega: usize) -> f64 {
        let m = self.order();
        let sign = if omega % 2 == 0 { 1.0 } else { -1.0 };
        sign * (self.big_r / d as f64).ln().powi(m as i32) / factorial(m)
    }
}

fn factorial(m: u32) -> f64 {
    (1..=m).map(f64::from).product()
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

/// Distinct primes `p ≤ R` dividing `P_H(n)` for the given offsets.
fn small_primes_of_product(
    n: u64,
    offsets: &[u64],
    r_floor: u64,
    table: &FactorTable,
) -> Result<Vec<u64>> {
    let mut ps = Vec::new();
    for &h in offsets {
        for (p, _) in table.prime_factors(n + h)? {
            if p <= r_floor {
                ps.push(p);
            }
        }
    }
    ps.sort_unstable();
    ps.dedup();
    Ok(ps)
}

/// Squarefree divisors `d ≤ R` of `∏_{h ∈ offsets} (n + h)`, with the number
/// of primes in each, in depth-first order.
pub fn squarefree_divisors_up_to(
    n: u64,
    offsets: &[u64],
    big_r: f64,
    table: &FactorTable,
) -> Result<Vec<(u64, usize)>> {
    let ps = small_primes_of_product(n, offsets, big_r.floor() as u64, table)?;
    let mut out = vec![(1, 0)];
    fn dfs(ps: &[u64], start: usize, d: u64, omega: usize, limit: u64, out: &mut Vec<(u64, usize)>) {
        for j in start..ps.len() {
            let nd = d * ps[j];
            if nd > limit {
                // primes are increasing, so later ones overshoot too
                break;
            }
            out.push((nd, omega + 1));
            dfs(ps, j + 1, nd, omega + 1, limit, out);
        }
    }
    dfs(&ps, 0, 1, 0, big_r.floor() as u64, &mut out);
    Ok(out)
}

/// Λ_R(n; H, l) by factoring every `n + hᵢ` in `table`, with compensated
/// summation over the divisors.
pub fn lambda_r_naive(n: u64, cfg: &WeightConfig, table: &FactorTable) -> Result<f64> {
    let divisors = squarefree_divisors_up_to(n, cfg.tuple.offsets(), cfg.big_r, table)?;
    let mut acc = Sum::default();
    for &(d, omega) in &divisors {
        acc.add(cfg.coefficient(d, omega));
    }
    Ok(acc.value())
}

/// Residue classes `c mod d` (for squarefree `d` with the given primes) such
/// that `d | P_H(c)`. There are `∏ ν_p(H)` of them, in increasing order.
pub fn residue_classes(tuple: &AdmissibleTuple, primes: &[u64]) -> Vec<u64> {
    let mut classes = vec![0u64];
    let mut modulus = 1u64;
    for &p in primes {
        let mut roots: Vec<u64> = tuple.offsets().iter().map(|h| (p - h % p) % p).collect();
        roots.sort_unstable();
        roots.dedup();
        let inv = mod_inverse(modulus % p, p);
        let mut next = Vec::with_capacity(classes.len() * roots.len());
        for &c in &classes {
            for &root in &roots {
                // x = c + modulus·t with t ≡ (root − c)·modulus⁻¹ (mod p)
                let t = ((root + p - c % p) % p) as u128 * inv as u128 % p as u128;
                next.push(c + modulus * t as u64);
            }
        }
        modulus *= p;
        classes = next;
    }
    classes.sort_unstable();
    classes
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    if p == 1 {
        return 0;
    }
    let (mut old_r, mut r) = (a as i128, p as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    old_s.rem_euclid(p as i128) as u64
}

#[derive(Clone, Debug)]
struct PlanTerm {
    d: u64,
    coef: f64,
    classes: Vec<u64>,
}

/// Precomputed `(d, coefficient, classes mod d)` for every squarefree
/// `d ≤ R`, in increasing `d`.
#[derive(Clone, Debug)]
pub struct WeightPlan {
    cfg: WeightConfig,
    terms: Vec<PlanTerm>,
}

impl WeightPlan {
    pub fn new(cfg: &WeightConfig) -> Result<Self> {
        Self::with_budget(cfg, DEFAULT_CLASS_BUDGET)
    }

    /// Fails with [`Error::Budget`] when the classes would exceed `budget`.
    pub fn with_budget(cfg: &WeightConfig, budget: u64) -> Result<Self> {
        let over = || Error::Budget(format!("R = {} needs more than {budget} residue classes", cfg.big_r));
        // at least half of all d ≤ R are squarefree, each contributing a class
        if cfg.r_floor() / 2 > budget {
            return Err(over());
        }
        let limit = cfg.r_floor() as usize;
        let sieve = SmallSieve::new(limit);
        let mut nu_cache = vec![0u32; limit + 1];
        let mut planned = Vec::new();
        let mut total = 0u64;
        for d in 1..=limit {
            let Some(primes) = sieve.squarefree_primes(d) else { continue };
            let count: u64 = primes
                .iter()
                .map(|&p| {
                    let slot = &mut nu_cache[p as usize];
                    if *slot == 0 {
                        *slot = nu_p(&cfg.tuple, p) as u32;
                    }
                    u64::from(*slot)
                })
                .product();
            total += count;
            if total > budget {
                return Err(over());
            }
            planned.push((d as u64, primes));
        }
        let terms = planned
            .into_iter()
            .map(|(d, primes)| PlanTerm {
                d,
                coef: cfg.coefficient(d, primes.len()),
                classes: residue_classes(&cfg.tuple, &primes),
            })
            .collect();
        Ok(WeightPlan { cfg: cfg.clone(), terms })
    }

    pub fn config(&self) -> &WeightConfig {
        &self.cfg
    }

    /// Total number of residue classes across all `d`.
    pub fn class_count(&self) -> usize {
        self.terms.iter().map(|t| t.classes.len()).sum()
    }

    /// Weights for every `n ∈ [lo, hi)`, accumulated with per-entry
    /// compensated summation in increasing `d`.
    pub fn weights(&self, lo: u64, hi: u64) -> Vec<f64> {
        let len = hi.saturating_sub(lo) as usize;
        let mut sum = vec![0.0f64; len];
        let mut comp = vec![0.0f64; len];
        for term in &self.terms {
            let d = term.d;
            for &c in &term.classes {
                let mut n = lo + (c + d - lo % d) % d;
                while n < hi {
                    let i = (n - lo) as usize;
                    let s = sum[i];
                    let t = s + term.coef;
                    if s.abs() >= term.coef.abs() {
                        comp[i] += (s - t) + term.coef;
                    } else {
                        comp[i] += (term.coef - t) + s;
                    }
                    sum[i] = t;
                    n += d;
                }
            }
        }
        sum.iter().zip(&comp).map(|(s, c)| s + c).collect()
    }
}

/// Λ_R(n; H, l) for every `n ∈ [lo, hi)` through a [`WeightPlan`].
pub fn lambda_r_batch(lo: u64, hi: u64, cfg: &WeightConfig) -> Result<Vec<f64>> {
    if hi < lo {
        return Err(Error::InvalidWindow { lo, hi, reason: "hi < lo" });
    }
    Ok(WeightPlan::new(cfg)?.weights(lo, hi))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Lemma1,
    Lemma2,
    Lemma3,
    SStatistic,
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Variant::Lemma1 => "lemma1",
            Variant::Lemma2 => "lemma2",
            Variant::Lemma3 => "lemma3",
            Variant::SStatistic => "s_statistic",
        })
    }
}

/// Knobs shared by the moment computations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentOptions {
    /// Exponent `C` in the ranges `R ≤ √N/ln^C N` and `R ≤ N^{1/4}/ln^C N`;
    /// exceeding them only produces a warning.
    pub log_power: f64,
    /// Truncation point for the singular series in the predictions.
    pub singular_p_max: u64,
    pub segment_len: u64,
    pub class_budget: u64,
}

impl Default for MomentOptions {
    fn default() -> Self {
        MomentOptions {
            log_power: 1.0,
            singular_p_max: 1_000_000,
            segment_len: DEFAULT_SEGMENT_LEN as u64,
            class_budget: DEFAULT_CLASS_BUDGET,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentReport {
    pub n_base: u64,
    pub tuple: Vec<u64>,
    pub k: usize,
    pub l: u32,
    pub big_r: f64,
    pub variant: Variant,
    pub empirical: f64,
    pub predicted_main_term: f64,
    /// `empirical / predicted_main_term`; absent when the prediction is 0.
    pub ratio: Option<f64>,
    pub singular_series: f64,
    pub h: Option<u64>,
    pub r: Option<u32>,
    pub eps: Option<f64>,
    pub c0: Option<f64>,
    pub positivity_factor: Option<f64>,
    /// `n` with at least two of `n + hᵢ` in the target set.
    pub witnesses: Option<u64>,
    /// Target elements that share a prime factor `≤ R` with the weight.
    pub property_ii_violations: Option<u64>,
    /// Set when `𝔖(H) = 0` and the prediction vanishes.
    pub degenerate: bool,
    pub warnings: Vec<String>,
}

/// Neumaier accumulator.
#[derive(Clone, Copy, Debug, Default)]
struct Sum {
    s: f64,
    c: f64,
}

impl Sum {
    fn add(&mut self, x: f64) {
        let t = self.s + x;
        if self.s.abs() >= x.abs() {
            self.c += (self.s - t) + x;
        } else {
            self.c += (x - t) + self.s;
        }
        self.s = t;
    }

    fn value(self) -> f64 {
        self.s + self.c
    }
}

fn check_n(n_base: u64) -> Result<()> {
    if n_base < 2 {
        return Err(Error::param("N", "window base must be at least 2"));
    }
    Ok(())
}

fn base_report(n_base: u64, cfg: &WeightConfig, variant: Variant, sing: f64) -> MomentReport {
    MomentReport {
        n_base,
        tuple: cfg.tuple.offsets().to_vec(),
        k: cfg.k(),
        l: cfg.l,
        big_r: cfg.big_r,
        variant,
        empirical: 0.0,
        predicted_main_term: 0.0,
        ratio: None,
        singular_series: sing,
        h: None,
        r: None,
        eps: None,
        c0: None,
        positivity_factor: None,
        witnesses: None,
        property_ii_violations: None,
        degenerate: sing == 0.0,
        warnings: Vec::new(),
    }
}

fn finish(mut rep: MomentReport, empirical: f64, predicted: f64) -> MomentReport {
    rep.empirical = empirical;
    rep.predicted_main_term = predicted;
    rep.ratio = (predicted != 0.0).then(|| empirical / predicted);
    rep
}

fn range_warnings(n_base: u64, cfg: &WeightConfig, quarter: bool, opts: &MomentOptions) -> Vec<String> {
    let n = n_base as f64;
    let ln_n = n.ln();
    let mut out = Vec::new();
    let (power, label) = if quarter { (0.25, "N^{1/4}") } else { (0.5, "N^{1/2}") };
    let limit = n.powf(power) / ln_n.powf(opts.log_power);
    if cfg.big_r > limit {
        out.push(format!(
            "R = {} exceeds {label}/ln^{} N = {limit:.6}",
            cfg.big_r, opts.log_power
        ));
    }
    let h_cap = 50.0 * ln_n;
    if cfg.tuple.max_offset() as f64 > h_cap {
        out.push(format!("max offset {} exceeds 50·ln N = {h_cap:.3}", cfg.tuple.max_offset()));
    }
    out
}

/// Main term `C(2l, l)·N·(ln R)^{k+2l}·𝔖(H)/(k+2l)!` of the plain second moment.
pub fn lemma1_main_term(n_base: u64, cfg: &WeightConfig, sing: f64) -> f64 {
    let (k, l) = (cfg.k() as u32, cfg.l);
    binomial(2 * l, l) * n_base as f64 * cfg.big_r.ln().powi((k + 2 * l) as i32) * sing
        / factorial(k + 2 * l)
}

/// Main term `C(2l+2, l+1)·N·(ln R)^{k+2l+1}·𝔖(H)/((k+2l+1)!·ln N)` of the
/// prime-twisted moment.
pub fn lemma2_main_term(n_base: u64, cfg: &WeightConfig, sing: f64) -> f64 {
    let (k, l) = (cfg.k() as u32, cfg.l);
    let n = n_base as f64;
    binomial(2 * l + 2, l + 1) * n * cfg.big_r.ln().powi((k + 2 * l + 1) as i32) * sing
        / (factorial(k + 2 * l + 1) * n.ln())
}

/// Walk `[N, 2N)` segment by segment, handing each `n`, its weight and a
/// factor table covering `n + max(H)` to `visit`.
fn scan<F>(n_base: u64, cfg: &WeightConfig, opts: &MomentOptions, need_table: bool, mut visit: F) -> Result<()>
where
    F: FnMut(u64, f64, Option<&FactorTable>) -> Result<()>,
{
    let plan = WeightPlan::with_budget(cfg, opts.class_budget)?;
    let reach = cfg.tuple.max_offset();
    for (a, b) in crate::sieve::segments(n_base, 2 * n_base, opts.segment_len) {
        let weights = plan.weights(a, b);
        let table = if need_table {
            Some(FactorTable::build_segmented(a, b + reach, opts.segment_len as usize)?)
        } else {
            None
        };
        for (i, &w) in weights.iter().enumerate() {
            visit(a + i as u64, w, table.as_ref())?;
        }
    }
    Ok(())
}

/// `Σ_{N ≤ n < 2N} Λ_R(n; H, l)²` against its predicted main term.
pub fn moment_lemma1(n_base: u64, cfg: &WeightConfig, opts: &MomentOptions) -> Result<MomentReport> {
    check_n(n_base)?;
    let sing = singular_series(&cfg.tuple, opts.singular_p_max.max(cfg.k() as u64))?.value;
    let mut rep = base_report(n_base, cfg, Variant::Lemma1, sing);
    rep.warnings = range_warnings(n_base, cfg, false, opts);
    let mut acc = Sum::default();
    scan(n_base, cfg, opts, false, |_, w, _| {
        acc.add(w * w);
        Ok(())
    })?;
    Ok(finish(rep, acc.value(), lemma1_main_term(n_base, cfg, sing)))
}

/// `Σ Λ_R(n; H, l)² · χ_P(n + h)` for an offset `h ∈ H`.
pub fn moment_lemma2(n_base: u64, cfg: &WeightConfig, h: u64, opts: &MomentOptions) -> Result<MomentReport> {
    check_n(n_base)?;
    if !cfg.tuple.contains(h) {
        return Err(Error::param("h", format!("{h} is not an offset of the tuple")));
    }
    let sing = singular_series(&cfg.tuple, opts.singular_p_max.max(cfg.k() as u64))?.value;
    let mut rep = base_report(n_base, cfg, Variant::Lemma2, sing);
    rep.h = Some(h);
    rep.warnings = range_warnings(n_base, cfg, true, opts);
    let r_floor = cfg.r_floor();
    let mut acc = Sum::default();
    let mut violations = 0u64;
    scan(n_base, cfg, opts, true, |n, w, table| {
        let table = table.expect("table requested");
        if table.is_prime(n + h)? {
            // a prime above R has no prime divisor ≤ R
            if n + h <= r_floor {
                violations += 1;
            }
            acc.add(w * w);
        }
        Ok(())
    })?;
    rep.property_ii_violations = Some(violations);
    Ok(finish(rep, acc.value(), lemma2_main_term(n_base, cfg, sing)))
}

fn check_star(n_base: u64, spec: &StarSetSpec) -> Result<()> {
    if !(spec.r() == 2 || spec.r() == 3) {
        return Err(Error::param("r", "the twisted moments need r ∈ {2, 3}"));
    }
    if spec.n_base() != n_base {
        return Err(Error::param("spec", "star-set window base must equal N"));
    }
    Ok(())
}

/// Whether star-set members are guaranteed to have every prime factor above R.
fn star_above_r(cfg: &WeightConfig, spec: &StarSetSpec) -> bool {
    cfg.big_r < spec.prime_interval().0
}

/// `Σ Λ_R(n; H, l)² · χ_P̃(n + h)` with `P̃ = P(N) ∪ P*_{r,ε}(N)`.
pub fn moment_lemma3(
    n_base: u64,
    cfg: &WeightConfig,
    h: u64,
    spec: &StarSetSpec,
    opts: &MomentOptions,
) -> Result<MomentReport> {
    check_n(n_base)?;
    check_star(n_base, spec)?;
    if !cfg.tuple.contains(h) {
        return Err(Error::param("h", format!("{h} is not an offset of the tuple")));
    }
    let sing = singular_series(&cfg.tuple, opts.singular_p_max.max(cfg.k() as u64))?.value;
    let c0 = density::c0(spec.r(), spec.eps())?.value;
    let mut rep = base_report(n_base, cfg, Variant::Lemma3, sing);
    rep.h = Some(h);
    rep.r = Some(spec.r());
    rep.eps = Some(spec.eps());
    rep.c0 = Some(c0);
    rep.warnings = range_warnings(n_base, cfg, true, opts);
    let check_ii = star_above_r(cfg, spec);
    if !check_ii {
        rep.warnings.push("R ≥ N^{a₁}: star-set members may share primes ≤ R with the weight".into());
    }
    let r_floor = cfg.r_floor();
    let mut acc = Sum::default();
    let mut violations = 0u64;
    scan(n_base, cfg, opts, true, |n, w, table| {
        let table = table.expect("table requested");
        let s = table.shape(n + h)?;
        if spec.ptilde_contains_shape(n + h, &s) {
            if s.p_minus <= r_floor {
                violations += 1;
            }
            acc.add(w * w);
        }
        Ok(())
    })?;
    if check_ii && violations > 0 {
        return Err(Error::Invariant(format!(
            "{violations} members of P̃ have a prime factor ≤ R although R < N^{{a₁}}"
        )));
    }
    rep.property_ii_violations = Some(violations);
    let predicted = lemma2_main_term(n_base, cfg, sing) * (1.0 + c0);
    Ok(finish(rep, acc.value(), predicted))
}

/// `S = Σ_{n ∼ N} (Σᵢ χ_P̃(n + hᵢ) − 1) Λ_R(n; H, l)²` against
/// `lemma-1 main term × positivity_factor(k, l, C₀)`.
pub fn s_statistic(
    n_base: u64,
    cfg: &WeightConfig,
    spec: &StarSetSpec,
    opts: &MomentOptions,
) -> Result<MomentReport> {
    check_n(n_base)?;
    check_star(n_base, spec)?;
    let sing = singular_series(&cfg.tuple, opts.singular_p_max.max(cfg.k() as u64))?.value;
    let c0 = density::c0(spec.r(), spec.eps())?.value;
    let factor = positivity_factor(cfg.k() as u64, u64::from(cfg.l), c0);
    let mut rep = base_report(n_base, cfg, Variant::SStatistic, sing);
    rep.r = Some(spec.r());
    rep.eps = Some(spec.eps());
    rep.c0 = Some(c0);
    rep.positivity_factor = Some(factor);
    rep.warnings = range_warnings(n_base, cfg, true, opts);
    let offsets = cfg.tuple.offsets().to_vec();
    let mut acc = Sum::default();
    let mut witnesses = 0u64;
    scan(n_base, cfg, opts, true, |n, w, table| {
        let table = table.expect("table requested");
        let mut hits = 0u32;
        for &h in &offsets {
            if spec.ptilde_contains_shape(n + h, &table.shape(n + h)?) {
                hits += 1;
            }
        }
        if hits >= 2 {
            witnesses += 1;
        }
        acc.add((f64::from(hits) - 1.0) * w * w);
        Ok(())
    })?;
    rep.witnesses = Some(witnesses);
    let predicted = lemma1_main_term(n_base, cfg, sing) * factor;
    Ok(finish(rep, acc.value(), predicted))
}
