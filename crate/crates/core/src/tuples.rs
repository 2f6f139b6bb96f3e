//! Admissible tuples, the singular series and the positivity calculus that
//! decides how large a tuple has to be before two of its translates are
//! expected to land in the target set.

use std::fmt;

use serde::Serialize;

use crate::density;
use crate::sieve::primes_up_to;
use crate::{Error, Result};

/// A set of distinct non-negative offsets `h₁ < … < h_k`.
///
/// The type does not enforce admissibility; use [`is_admissible`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct AdmissibleTuple {
    offsets: Vec<u64>,
}

impl AdmissibleTuple {
    /// Sort the offsets; duplicates and empty sets are rejected.
    pub fn new(mut offsets: Vec<u64>) -> Result<Self> {
        if offsets.is_empty() {
            return Err(Error::param("tuple", "a tuple needs at least one offset"));
        }
        offsets.sort_unstable();
        if offsets.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::param("tuple", "offsets must be distinct"));
        }
        Ok(AdmissibleTuple { offsets })
    }

    pub fn offsets(&self) -> &[u64] {
        &self.offsets
    }

    pub fn k(&self) -> usize {
        self.offsets.len()
    }

    pub fn diameter(&self) -> u64 {
        self.offsets[self.offsets.len() - 1] - self.offsets[0]
    }

    pub fn max_offset(&self) -> u64 {
        self.offsets[self.offsets.len() - 1]
    }

    /// `H + c`.
    pub fn shifted(&self, c: u64) -> Self {
        AdmissibleTuple { offsets: self.offsets.iter().map(|h| h + c).collect() }
    }

    pub fn contains(&self, h: u64) -> bool {
        self.offsets.binary_search(&h).is_ok()
    }
}

impl fmt::Display for AdmissibleTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, h) in self.offsets.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{h}")?;
        }
        Ok(())
    }
}

/// Parse the tuple file format: one tuple per line, comma-separated offsets,
/// `#` starts a comment, blank lines are skipped.
pub fn parse_tuple_file(text: &str) -> Result<Vec<AdmissibleTuple>> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let offsets = line
            .split(',')
            .map(|s| s.trim().parse::<u64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::param("tuple-file", format!("line {}: {e}", lineno + 1)))?;
        out.push(
            AdmissibleTuple::new(offsets)
                .map_err(|e| Error::param("tuple-file", format!("line {}: {e}", lineno + 1)))?,
        );
    }
    Ok(out)
}

/// Render tuples in the tuple file format.
pub fn format_tuple_file(tuples: &[AdmissibleTuple]) -> String {
    tuples.iter().map(|t| format!("{t}\n")).collect()
}

/// ν_p(H): the number of residue classes mod `p` hit by `H`.
pub fn nu_p(h: &AdmissibleTuple, p: u64) -> usize {
    let mut residues: Vec<u64> = h.offsets.iter().map(|x| x % p).collect();
    residues.sort_unstable();
    residues.dedup();
    residues.len()
}

/// `ν_p(H) < p` for every prime `p ≤ k`; larger primes cannot be covered.
pub fn is_admissible(h: &AdmissibleTuple) -> bool {
    primes_up_to(h.k() as u64).into_iter().all(|p| (nu_p(h, p) as u64) < p)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingularSeriesValue {
    pub value: f64,
    /// Largest prime included in the product.
    pub p_max: u64,
    /// Bound on `|ln(𝔖(H) / value)|` from the omitted primes.
    pub tail_log_bound: f64,
}

/// Truncated Euler product `∏_{p ≤ p_max} (1 − ν_p/p)(1 − 1/p)^{−k}`.
///
/// The truncation point is raised to the tuple diameter if needed, so every
/// omitted prime has `ν_p = k`. For those primes
/// `|ln((1 − k/p)(1 − 1/p)^{−k})| ≤ k(k−1) / (2(p−k)(p−1))`, and summing the
/// right side over all integers above the cut gives the reported bound
/// `(k/2)·ln((P−1)/(P−k))`.
pub fn singular_series(h: &AdmissibleTuple, p_max: u64) -> Result<SingularSeriesValue> {
    let k = h.k() as u64;
    if p_max < k {
        return Err(Error::param("p_max", format!("need p_max ≥ k = {k}")));
    }
    let cut = p_max.max(h.diameter()).max(2);
    if !is_admissible(h) {
        return Ok(SingularSeriesValue { value: 0.0, p_max: cut, tail_log_bound: 0.0 });
    }
    let kf = k as f64;
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for p in primes_up_to(cut) {
        let pf = p as f64;
        let nu = nu_p(h, p) as f64;
        let term = (-nu / pf).ln_1p() - kf * (-1.0 / pf).ln_1p();
        // Neumaier summation
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
    }
    let cut_f = cut as f64;
    let tail_log_bound = if k <= 1 {
        0.0
    } else {
        0.5 * kf * ((cut_f - 1.0) / (cut_f - kf)).ln()
    };
    Ok(SingularSeriesValue { value: (sum + comp).exp(), p_max: cut, tail_log_bound })
}

/// Greedy admissible `k`-tuple starting at 0.
///
/// Offsets are taken in increasing order, each accepted when it keeps at
/// least one residue class free modulo every prime `p ≤ k`. Deterministic but
/// not of minimal diameter in general.
pub fn generate_tuple(k: usize) -> Result<AdmissibleTuple> {
    if k == 0 {
        return Err(Error::param("k", "need k ≥ 1"));
    }
    let primes = primes_up_to(k as u64);
    let mut occupied: Vec<Vec<bool>> = primes.iter().map(|&p| vec![false; p as usize]).collect();
    let mut used: Vec<usize> = vec![0; primes.len()];
    let mut offsets = Vec::with_capacity(k);
    let mut h = 0u64;
    while offsets.len() < k {
        let fits = primes.iter().enumerate().all(|(i, &p)| {
            occupied[i][(h % p) as usize] || (used[i] as u64) + 1 < p
        });
        if fits {
            for (i, &p) in primes.iter().enumerate() {
                let slot = &mut occupied[i][(h % p) as usize];
                if !*slot {
                    *slot = true;
                    used[i] += 1;
                }
            }
            offsets.push(h);
        }
        h += 1;
    }
    AdmissibleTuple::new(offsets)
}

/// Level of distribution ϑ and its excess δ = ϑ − 1/2 over Bombieri–Vinogradov.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GpyConstantsQuery {
    pub theta: f64,
    pub delta: f64,
}

impl GpyConstantsQuery {
    pub fn from_theta(theta: f64) -> Result<Self> {
        if !(theta > 0.5 && theta <= 1.0) {
            return Err(Error::param("theta", format!("expected 1/2 < ϑ ≤ 1, got {theta}")));
        }
        Ok(GpyConstantsQuery { theta, delta: theta - 0.5 })
    }

    pub fn from_delta(delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta <= 0.5) {
            return Err(Error::param("delta", format!("expected 0 < δ ≤ 1/2, got {delta}")));
        }
        Ok(GpyConstantsQuery { theta: 0.5 + delta, delta })
    }
}

/// Tabulated reference point: ϑ ≥ 0.971 gives `k₀ = 6` and gaps ≤ 16.
pub const REFERENCE_THETA: f64 = 0.971;
pub const REFERENCE_K0: u64 = 6;
pub const REFERENCE_GAP: u64 = 16;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GpyConstants {
    pub theta: f64,
    pub delta: f64,
    /// `(2⌈1/(2δ)⌉ + 1)²`.
    pub k0: u64,
    /// `2δ⁻² ln(1/δ)`, an asymptotic expression as δ → 0⁺, not a bound.
    pub c_asymptotic: f64,
    /// Tabulated `(k₀, C)` when ϑ is the reference level 0.971.
    pub reference: Option<(u64, u64)>,
}

fn robust_ceil(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * r.abs().max(1.0) {
        r
    } else {
        x.ceil()
    }
}

pub fn gpy_constants(q: GpyConstantsQuery) -> Result<GpyConstants> {
    if !(q.delta > 0.0) {
        return Err(Error::param("delta", "δ must be positive"));
    }
    let m = robust_ceil(1.0 / (2.0 * q.delta)) as u64;
    let k0 = (2 * m + 1).pow(2);
    let c_asymptotic = 2.0 / (q.delta * q.delta) * (1.0 / q.delta).ln();
    let reference = ((q.theta - REFERENCE_THETA).abs() < 1e-12)
        .then_some((REFERENCE_K0, REFERENCE_GAP));
    Ok(GpyConstants { theta: q.theta, delta: q.delta, k0, c_asymptotic, reference })
}

/// `k/(k + 2l + 1) · (2l + 1)/(2l + 2) · (1 + C₀) − 1`; positive means the
/// weighted count of hits exceeds one per `n` on average.
pub fn positivity_factor(k: u64, l: u64, c0_val: f64) -> f64 {
    let (k, l) = (k as f64, l as f64);
    k / (k + 2.0 * l + 1.0) * (2.0 * l + 1.0) / (2.0 * l + 2.0) * (1.0 + c0_val) - 1.0
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MinK {
    pub r: u32,
    pub eps: f64,
    pub c0: f64,
    pub k_cap: u64,
    /// Smallest `k` with a positive factor for some `0 ≤ l ≤ k`, and the `l`
    /// maximising the factor there.
    pub optimal: Option<(u64, u64)>,
    /// Smallest `k` with a positive factor at `l = ⌊√k / 2⌋`.
    pub sqrt_rule: Option<(u64, u64)>,
}

pub fn sqrt_rule_l(k: u64) -> u64 {
    crate::sieve::isqrt(k) / 2
}

/// Search `k ≤ k_cap` for the first tuple size where [`positivity_factor`]
/// turns positive, given `C₀(r, ε)` from the density module.
pub fn min_k_for_two(r: u32, eps: f64, k_cap: u64) -> Result<MinK> {
    if !(r == 2 || r == 3) {
        return Err(Error::param("r", "expected r ∈ {2, 3}"));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::param("eps", format!("expected 0 < ε < 1, got {eps}")));
    }
    let c0 = density::c0(r, eps)?.value;
    Ok(min_k_with_c0(r, eps, c0, k_cap))
}

/// [`min_k_for_two`] with an explicit density constant.
pub fn min_k_with_c0(r: u32, eps: f64, c0: f64, k_cap: u64) -> MinK {
    let mut optimal = None;
    let mut sqrt_rule = None;
    for k in 1..=k_cap {
        if optimal.is_none() {
            let (best_l, best) = (0..=k)
                .map(|l| (l, positivity_factor(k, l, c0)))
                .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best > 0.0 {
                optimal = Some((k, best_l));
            }
        }
        if sqrt_rule.is_none() {
            let l = sqrt_rule_l(k);
            if positivity_factor(k, l, c0) > 0.0 {
                sqrt_rule = Some((k, l));
            }
        }
        if optimal.is_some() && sqrt_rule.is_some() {
            break;
        }
    }
    MinK { r, eps, c0, k_cap, optimal, sqrt_rule }
}
