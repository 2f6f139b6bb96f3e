//! The density constant
//!
//! ```text
//! C₀(r, ε) = ∫_{[a₁,a₂]^{r−1}} 1[a₁ ≤ 1 − Σα ≤ a₂] dα₁⋯dα_{r−1} / (α₁⋯α_{r−1}(1 − Σα))
//! ```
//!
//! with `a₁ = (1 − ε/2)/r`, `a₂ = (1 + ε/2)/r`, so that the star set
//! `P*_{r,ε}(N)` has about `C₀(r, ε)·N / ln N` ordered prime factorizations.
//! The indicator keeps the last prime inside the same interval as the others;
//! for `r = 2` it is automatic because `a₁ + a₂ = 1`.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::quad::integrate;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Quadrature,
    MonteCarlo,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::ClosedForm => "closed_form",
            Method::Quadrature => "quadrature",
            Method::MonteCarlo => "monte_carlo",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityResult {
    pub r: u32,
    pub eps: f64,
    pub value: f64,
    pub method: Method,
    pub abs_error_estimate: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MonteCarloOptions {
    pub samples: u64,
    pub seed: u64,
}

impl Default for MonteCarloOptions {
    fn default() -> Self {
        MonteCarloOptions { samples: 4_000_000, seed: 0x5eed }
    }
}

const QUAD_ABS_TOL: f64 = 1e-11;
const MC_SHARD: u64 = 1 << 18;

fn check(r: u32, eps: f64) -> Result<()> {
    if r < 2 {
        return Err(Error::param("r", format!("C₀ needs r ≥ 2, got {r}")));
    }
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::param("eps", format!("expected 0 ≤ ε < 1, got {eps}")));
    }
    Ok(())
}

fn bounds(r: u32, eps: f64) -> (f64, f64) {
    let r = f64::from(r);
    ((1.0 - eps / 2.0) / r, (1.0 + eps / 2.0) / r)
}

fn zero(r: u32, eps: f64, method: Method) -> DensityResult {
    DensityResult { r, eps, value: 0.0, method, abs_error_estimate: 0.0 }
}

/// `C₀(r, ε)` by the default route: closed form for `r = 2`, adaptive
/// quadrature for `r = 3`, Monte Carlo with default options above that.
pub fn c0(r: u32, eps: f64) -> Result<DensityResult> {
    match r {
        2 => c0_closed_form(eps).map(|value| DensityResult {
            r,
            eps,
            value,
            method: Method::ClosedForm,
            abs_error_estimate: 0.0,
        }),
        3 => c0_quadrature(r, eps),
        _ => c0_monte_carlo(r, eps, MonteCarloOptions::default()),
    }
}

/// `C₀(2, ε) = 2·ln((1 + ε/2)/(1 − ε/2))`.
pub fn c0_closed_form(eps: f64) -> Result<f64> {
    check(2, eps)?;
    Ok(2.0 * ((1.0 + eps / 2.0) / (1.0 - eps / 2.0)).ln())
}

/// Adaptive Gauss–Kronrod evaluation for `r ∈ {2, 3}`.
///
/// For `r = 3` the inner variable runs over
/// `[max(a₁, s − a₂), min(a₂, s − a₁)]` with `s = 1 − α₁`; both limits switch
/// branch at `α₁ = 1 − a₁ − a₂`, which is passed to the outer rule as a break.
pub fn c0_quadrature(r: u32, eps: f64) -> Result<DensityResult> {
    check(r, eps)?;
    if eps == 0.0 {
        return Ok(zero(r, eps, Method::Quadrature));
    }
    let (a1, a2) = bounds(r, eps);
    match r {
        2 => {
            let f = |x: f64| {
                let last = 1.0 - x;
                if last >= a1 && last <= a2 {
                    1.0 / (x * last)
                } else {
                    0.0
                }
            };
            let res = integrate(f, a1, a2, &[], QUAD_ABS_TOL * 1e-3, 1e-14)?;
            Ok(DensityResult {
                r,
                eps,
                value: res.value,
                method: Method::Quadrature,
                abs_error_estimate: res.abs_error,
            })
        }
        3 => {
            let mut inner_err = 0.0f64;
            let outer = |x: f64| {
                let s = 1.0 - x;
                let lo = a1.max(s - a2);
                let hi = a2.min(s - a1);
                if hi <= lo {
                    return 0.0;
                }
                match integrate(|y| 1.0 / (y * (s - y)), lo, hi, &[], QUAD_ABS_TOL * 1e-2, 1e-13) {
                    Ok(res) => {
                        inner_err = inner_err.max(res.abs_error);
                        res.value / x
                    }
                    Err(_) => f64::NAN,
                }
            };
            let res = integrate(outer, a1, a2, &[1.0 - a1 - a2], QUAD_ABS_TOL, 1e-13)?;
            if !res.value.is_finite() {
                return Err(Error::Invariant("inner quadrature failed".into()));
            }
            let (value, abs_error) = (res.value, res.abs_error);
            Ok(DensityResult {
                r,
                eps,
                value,
                method: Method::Quadrature,
                abs_error_estimate: abs_error + inner_err * (a2 - a1) / a1,
            })
        }
        _ => Err(Error::param("r", "quadrature route covers r = 2 and r = 3; use monte_carlo")),
    }
}

/// Plain Monte Carlo over the box `[a₁, a₂]^{r−1}`.
///
/// Samples are drawn in fixed-size shards, shard `i` seeded from
/// `(seed, i)`, and reduced in shard order, so the estimate depends only on
/// `(r, ε, samples, seed)`.
pub fn c0_monte_carlo(r: u32, eps: f64, opts: MonteCarloOptions) -> Result<DensityResult> {
    check(r, eps)?;
    if opts.samples == 0 {
        return Err(Error::param("samples", "need at least one sample"));
    }
    if eps == 0.0 {
        return Ok(zero(r, eps, Method::MonteCarlo));
    }
    let (a1, a2) = bounds(r, eps);
    let dim = (r - 1) as usize;
    let width = a2 - a1;
    let volume = width.powi(dim as i32);
    let shards = opts.samples.div_ceil(MC_SHARD);
    let partial: Vec<(f64, f64)> = (0..shards)
        .into_par_iter()
        .map(|shard| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(shard);
            let n = MC_SHARD.min(opts.samples - shard * MC_SHARD);
            let (mut s1, mut s2) = (0.0, 0.0);
            for _ in 0..n {
                let mut prod = 1.0;
                let mut sum = 0.0;
                for _ in 0..dim {
                    let x = a1 + width * rng.random::<f64>();
                    prod *= x;
                    sum += x;
                }
                let last = 1.0 - sum;
                if last >= a1 && last <= a2 {
                    let v = 1.0 / (prod * last);
                    s1 += v;
                    s2 += v * v;
                }
            }
            (s1, s2)
        })
        .collect();
    let (s1, s2) = partial.iter().fold((0.0, 0.0), |(a, b), &(x, y)| (a + x, b + y));
    let n = opts.samples as f64;
    let mean = s1 / n;
    let var = (s2 / n - mean * mean).max(0.0);
    Ok(DensityResult {
        r,
        eps,
        value: volume * mean,
        method: Method::MonteCarlo,
        abs_error_estimate: volume * (var / n).sqrt(),
    })
}

/// `r·ε^{r−1} / (1 − ε/2)^r`.
pub fn c0_upper_bound(r: u32, eps: f64) -> f64 {
    f64::from(r) * eps.powi(r as i32 - 1) / (1.0 - eps / 2.0).powi(r as i32)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailSum {
    pub eps: f64,
    pub r_max: u32,
    pub terms: Vec<DensityResult>,
    /// `Σ_{r=2}^{r_max} C₀(r, ε)`.
    pub sum: f64,
    /// Summed error estimates of the terms.
    pub abs_error: f64,
    /// `Σ_{r > r_max} r·ε^{r−1}/(1 − ε/2)^r`, summed in closed form.
    pub tail_bound: f64,
    /// `sum + abs_error + tail_bound < 3ε`.
    pub below_three_eps: bool,
}

/// Partial sum of `C₀(r, ε)` over `2 ≤ r ≤ r_max` plus an analytic bound on
/// the remaining terms.
pub fn c0_tail_sum(eps: f64, r_max: u32, mc: MonteCarloOptions) -> Result<TailSum> {
    if !(eps > 0.0 && eps <= 0.1) {
        return Err(Error::param("eps", format!("expected 0 < ε ≤ 0.1, got {eps}")));
    }
    if r_max < 3 {
        return Err(Error::param("r_max", "need r_max ≥ 3"));
    }
    let mut terms = Vec::new();
    for r in 2..=r_max {
        terms.push(match r {
            2 | 3 => c0(r, eps)?,
            _ => c0_monte_carlo(r, eps, mc)?,
        });
    }
    let sum = terms.iter().map(|t| t.value).sum();
    let abs_error = terms.iter().map(|t| t.abs_error_estimate).sum();
    // Σ_{r>m} r x^{r−1} = ((m+1)x^m − m x^{m+1}) / (1−x)², with x = ε/(1−ε/2).
    let c = 1.0 - eps / 2.0;
    let x = eps / c;
    let m = f64::from(r_max);
    let tail_bound = ((m + 1.0) * x.powf(m) - m * x.powf(m + 1.0)) / ((1.0 - x).powi(2) * c);
    Ok(TailSum {
        eps,
        r_max,
        terms,
        sum,
        abs_error,
        tail_bound,
        below_three_eps: sum + abs_error + tail_bound < 3.0 * eps,
    })
}
