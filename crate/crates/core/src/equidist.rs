//! Bombieri–Vinogradov style discrepancy sums
//!
//! ```text
//! Σ_{q ≤ Q} max_{(a,q)=1} | #{x ∈ A : x ≡ a (q)} − M / φ(q) |
//! ```
//!
//! for `A` the primes up to `N` (main term `M = Li(N)`), the star set
//! `P*_{r,ε}(N)` over `[N, 2N)` (main term `C₀(r,ε)·Li(N)`, with
//! `C₀(r,ε)·(Li(2N) − Li(N))` reported alongside), and a weighted variant over
//! products `m·p` with a bounded coefficient `f(m)`.
//!
//! Everything is computed exactly from class counts; each modulus is
//! independent and rows come back in increasing `q`.

use rayon::prelude::*;
use serde::Serialize;

use crate::balanced::StarSetSpec;
use crate::density;
use crate::sieve::{log_integral, primes_up_to, FactorTable, SmallSieve};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    PrimesLeN,
    StarSetWindow,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscrepancyConfig {
    pub n: u64,
    pub q_max: u64,
    pub target: Target,
    pub spec: Option<StarSetSpec>,
}

impl DiscrepancyConfig {
    pub fn primes(n: u64, q_max: u64) -> Result<Self> {
        let cfg = DiscrepancyConfig { n, q_max, target: Target::PrimesLeN, spec: None };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn star(spec: StarSetSpec, q_max: u64) -> Result<Self> {
        let cfg = DiscrepancyConfig {
            n: spec.n_base(),
            q_max,
            target: Target::StarSetWindow,
            spec: Some(spec),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::param("N", "need N ≥ 2"));
        }
        if self.q_max == 0 {
            return Err(Error::param("q_max", "need q_max ≥ 1"));
        }
        if self.q_max >= self.n {
            return Err(Error::param("q_max", format!("need q_max < N = {}", self.n)));
        }
        match (self.target, &self.spec) {
            (Target::StarSetWindow, None) => Err(Error::param("spec", "star target needs a spec")),
            (Target::StarSetWindow, Some(s)) if s.n_base() != self.n => {
                Err(Error::param("spec", "spec window base must equal N"))
            }
            _ => Ok(()),
        }
    }
}

/// `⌊√N / ln^C N⌋`, clamped below at 1.
pub fn q_max_from_log_power(n: u64, log_power: f64) -> u64 {
    let nf = n as f64;
    let q = (nf.sqrt() / nf.ln().powf(log_power)).floor();
    if q.is_finite() && q >= 1.0 {
        q as u64
    } else {
        1
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidueRow {
    pub q: u64,
    /// Smallest coprime class attaining the maximum deviation.
    pub worst_a: u64,
    pub max_abs_dev: f64,
    /// `M / φ(q)`.
    pub main_term: f64,
    pub phi_q: u64,
    /// Elements in classes coprime to `q`.
    pub coprime_count: f64,
    /// Elements in the remaining classes.
    pub noncoprime_count: f64,
    /// Window-matched alternative main term, star target only.
    pub alt_main_term: Option<f64>,
    pub alt_max_abs_dev: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscrepancyReport {
    pub n: u64,
    pub q_max: u64,
    pub target: Target,
    pub per_q: Vec<ResidueRow>,
    /// `Σ_q max_abs_dev`.
    pub total: f64,
    pub alt_total: Option<f64>,
    /// `M`, the main term before division by φ(q).
    pub main_term_used: f64,
    pub alt_main_term_used: Option<f64>,
    /// Size (or total weight) of the counted set.
    pub set_size: f64,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// One row from the class weights `counts[a]`, `a ∈ [0, q)`.
fn row(q: u64, counts: &[f64], main: f64, alt: Option<f64>) -> ResidueRow {
    let phi = (0..q).filter(|&a| gcd(a, q) == 1).count() as u64;
    let expect = main / phi as f64;
    let alt_expect = alt.map(|m| m / phi as f64);
    let mut worst_a = 0;
    let mut max_dev = f64::NEG_INFINITY;
    let mut alt_dev = 0.0f64;
    let mut coprime = 0.0;
    let mut other = 0.0;
    for (a, &c) in counts.iter().enumerate() {
        let a = a as u64;
        if gcd(a, q) != 1 {
            other += c;
            continue;
        }
        coprime += c;
        let dev = (c - expect).abs();
        if dev > max_dev {
            max_dev = dev;
            worst_a = a;
        }
        if let Some(e) = alt_expect {
            alt_dev = alt_dev.max((c - e).abs());
        }
    }
    ResidueRow {
        q,
        worst_a,
        max_abs_dev: max_dev,
        main_term: expect,
        phi_q: phi,
        coprime_count: coprime,
        noncoprime_count: other,
        alt_main_term: alt_expect,
        alt_max_abs_dev: alt.map(|_| alt_dev),
    }
}

fn count_rows(set: &[u64], q_max: u64, main: f64, alt: Option<f64>) -> Vec<ResidueRow> {
    (1..=q_max)
        .into_par_iter()
        .map(|q| {
            let mut counts = vec![0.0f64; q as usize];
            for &x in set {
                counts[(x % q) as usize] += 1.0;
            }
            row(q, &counts, main, alt)
        })
        .collect()
}

fn report(
    cfg: &DiscrepancyConfig,
    per_q: Vec<ResidueRow>,
    main: f64,
    alt: Option<f64>,
    set_size: f64,
) -> DiscrepancyReport {
    let total = per_q.iter().map(|r| r.max_abs_dev).sum();
    let alt_total = alt.map(|_| per_q.iter().filter_map(|r| r.alt_max_abs_dev).sum());
    DiscrepancyReport {
        n: cfg.n,
        q_max: cfg.q_max,
        target: cfg.target,
        per_q,
        total,
        alt_total,
        main_term_used: main,
        alt_main_term_used: alt,
        set_size,
    }
}

/// Discrepancy of the primes `p ≤ N` against `Li(N)/φ(q)`; `table` must
/// cover `[2, N]`.
pub fn bv_prime_discrepancy(cfg: &DiscrepancyConfig, table: &FactorTable) -> Result<DiscrepancyReport> {
    cfg.validate()?;
    if cfg.target != Target::PrimesLeN {
        return Err(Error::param("target", "expected the prime target"));
    }
    if table.lo() > 2 || table.hi() <= cfg.n {
        return Err(Error::InvalidWindow {
            lo: table.lo(),
            hi: table.hi(),
            reason: "table must cover [2, N]",
        });
    }
    let mut primes = Vec::new();
    for n in 2..=cfg.n {
        if table.is_prime(n)? {
            primes.push(n);
        }
    }
    let main = log_integral(cfg.n as f64)?;
    let rows = count_rows(&primes, cfg.q_max, main, None);
    Ok(report(cfg, rows, main, None, primes.len() as f64))
}

/// Discrepancy of `P*_{r,ε}(N)` over `[N, 2N)` against `C₀(r,ε)·Li(N)/φ(q)`,
/// with `C₀(r,ε)·(Li(2N) − Li(N))/φ(q)` as the secondary column.
pub fn bv_star_discrepancy(cfg: &DiscrepancyConfig, table: &FactorTable) -> Result<DiscrepancyReport> {
    cfg.validate()?;
    let spec = match (cfg.target, &cfg.spec) {
        (Target::StarSetWindow, Some(spec)) => spec,
        _ => return Err(Error::param("spec", "star target with a spec required")),
    };
    let (lo, hi) = spec.window();
    if table.lo() > lo || table.hi() < hi {
        return Err(Error::InvalidWindow {
            lo: table.lo(),
            hi: table.hi(),
            reason: "table must cover [N, 2N)",
        });
    }
    let mut members = Vec::new();
    for n in lo..hi {
        if spec.contains_shape(n, &table.shape(n)?) {
            members.push(n);
        }
    }
    let c0 = if spec.r() == 1 { 1.0 } else { density::c0(spec.r(), spec.eps())?.value };
    let li_n = log_integral(lo as f64)?;
    let main = c0 * li_n;
    let alt = c0 * (log_integral(hi as f64)? - li_n);
    let rows = count_rows(&members, cfg.q_max, main, Some(alt));
    Ok(report(cfg, rows, main, Some(alt), members.len() as f64))
}

/// Coefficient sequence `f(m)` for the weighted sum; must satisfy `|f(m)| ≤ 1`.
#[derive(Clone, Debug, PartialEq)]
pub enum WeightFn {
    Const1,
    Mobius,
    /// Explicit values; `m` missing from the table has `f(m) = 0`.
    Table(Vec<(u64, f64)>),
}

impl WeightFn {
    /// Parse a two-column `m, f(m)` file (comma or whitespace separated, `#`
    /// comments).
    pub fn parse_table(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut cols = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty());
            let bad = || Error::param("f", format!("line {}: expected `m, f(m)`", i + 1));
            let m: u64 = cols.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            let v: f64 = cols.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            if cols.next().is_some() || m == 0 {
                return Err(bad());
            }
            rows.push((m, v));
        }
        Ok(WeightFn::Table(rows))
    }

    fn values(&self, m_max: u64) -> Result<Vec<f64>> {
        let len = m_max as usize + 1;
        let mut out = vec![0.0; len];
        match self {
            WeightFn::Const1 => out[1..].iter_mut().for_each(|v| *v = 1.0),
            WeightFn::Mobius => {
                let sieve = SmallSieve::new(m_max as usize);
                for (m, v) in out.iter_mut().enumerate().skip(1) {
                    *v = match sieve.squarefree_primes(m) {
                        Some(ps) if ps.len() % 2 == 0 => 1.0,
                        Some(_) => -1.0,
                        None => 0.0,
                    };
                }
            }
            WeightFn::Table(rows) => {
                for &(m, v) in rows {
                    if !v.is_finite() || v.abs() > 1.0 {
                        return Err(Error::param("f", format!("|f({m})| = {v} exceeds 1")));
                    }
                    if m <= m_max {
                        out[m as usize] = v;
                    }
                }
            }
        }
        Ok(out)
    }
}

/// `Σ_q max_{(a,q)=1} |Σ_{m ≤ N^{1−α}} f(m) (#{p : mp ≤ N, mp ≡ a (q)} − Li(N/m)/φ(q))|`.
pub fn weighted_discrepancy(cfg: &DiscrepancyConfig, alpha: f64, f: &WeightFn) -> Result<DiscrepancyReport> {
    cfg.validate()?;
    if cfg.target != Target::PrimesLeN {
        return Err(Error::param("target", "the weighted sum runs over primes up to N"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::param("alpha", format!("expected 0 < α < 1, got {alpha}")));
    }
    let n = cfg.n;
    let nf = n as f64;
    let bound = nf.powf(1.0 - alpha) * (1.0 + 1e-12);
    let m_max = (bound.floor() as u64).max(1);
    if (nf / m_max as f64) < 2.0 {
        return Err(Error::param("alpha", "N^α must be at least 2 so that Li(N/m) is defined"));
    }
    let fm = f.values(m_max)?;
    let primes = primes_up_to(n);
    let mut products: Vec<(u64, f64)> = Vec::new();
    let mut main = 0.0;
    for m in 1..=m_max {
        let w = fm[m as usize];
        if w == 0.0 {
            continue;
        }
        main += w * log_integral(nf / m as f64)?;
        let cap = n / m;
        for &p in primes.iter().take_while(|&&p| p <= cap) {
            products.push((m * p, w));
        }
    }
    let set_size = products.iter().map(|&(_, w)| w).sum();
    let rows = (1..=cfg.q_max)
        .into_par_iter()
        .map(|q| {
            let mut acc = vec![0.0f64; q as usize];
            for &(x, w) in &products {
                acc[(x % q) as usize] += w;
            }
            row(q, &acc, main, None)
        })
        .collect();
    Ok(report(cfg, rows, main, None, set_size))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::build_factor_table;

    #[test]
    fn q1_and_q2() {
        let n = 10_000;
        let t = build_factor_table(2, n + 1).unwrap();
        let rep = bv_prime_discrepancy(&DiscrepancyConfig::primes(n, 2).unwrap(), &t).unwrap();
        let li = log_integral(n as f64).unwrap();
        assert!((rep.per_q[0].max_abs_dev - (1229.0 - li).abs()).abs() < 1e-9);
        assert_eq!(rep.per_q[1].worst_a, 1);
        assert!((rep.per_q[1].max_abs_dev - (1228.0 - li).abs()).abs() < 1e-9);
        assert_eq!(rep.per_q[1].noncoprime_count, 1.0);
    }

    #[test]
    fn config_checks() {
        assert!(DiscrepancyConfig::primes(100, 100).is_err());
        assert!(DiscrepancyConfig::primes(100, 0).is_err());
        let spec = StarSetSpec::new(1_000, 2, 0.3).unwrap();
        assert!(DiscrepancyConfig::star(spec, 10).is_ok());
        let mut bad = DiscrepancyConfig::star(spec, 10).unwrap();
        bad.spec = None;
        let t = build_factor_table(1_000, 2_000).unwrap();
        assert!(bv_star_discrepancy(&bad, &t).is_err());
    }

    #[test]
    fn zero_weight_is_zero() {
        let cfg = DiscrepancyConfig::primes(10_000, 10).unwrap();
        let rep = weighted_discrepancy(&cfg, 0.5, &WeightFn::Table(vec![])).unwrap();
        assert_eq!(rep.total, 0.0);
    }

    #[test]
    fn unbounded_weight_rejected() {
        let cfg = DiscrepancyConfig::primes(10_000, 10).unwrap();
        let f = WeightFn::Table(vec![(2, 1.5)]);
        assert!(weighted_discrepancy(&cfg, 0.5, &f).is_err());
        assert!(WeightFn::parse_table("1, 0.5\n2 -1\n# c\n").is_ok());
        assert!(WeightFn::parse_table("1, x\n").is_err());
    }

    #[test]
    fn single_m_matches_prime_sum() {
        let n = 20_000;
        let cfg = DiscrepancyConfig::primes(n, 30).unwrap();
        let t = build_factor_table(2, n + 1).unwrap();
        let plain = bv_prime_discrepancy(&cfg, &t).unwrap();
        let w = weighted_discrepancy(&cfg, 0.99, &WeightFn::Const1).unwrap();
        for (a, b) in plain.per_q.iter().zip(&w.per_q) {
            assert_eq!(a.worst_a, b.worst_a);
            assert!((a.max_abs_dev - b.max_abs_dev).abs() < 1e-9);
        }
    }

    #[test]
    fn derived_q_max() {
        assert_eq!(q_max_from_log_power(10_000, 3.0), 1);
        assert_eq!(q_max_from_log_power(1_000_000, 3.0), 1);
        assert_eq!(q_max_from_log_power(1_000_000, 1.0), 72);
    }
}
