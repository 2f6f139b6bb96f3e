use std::path::PathBuf;

use balanced_gaps::balanced::{classify, count_star_streaming, is_eps_balanced, StarSetSpec};
use balanced_gaps::density::{self, MonteCarloOptions};
use balanced_gaps::equidist::{
    bv_prime_discrepancy, bv_star_discrepancy, q_max_from_log_power, weighted_discrepancy, DiscrepancyConfig,
    DiscrepancyReport, WeightFn,
};
use balanced_gaps::sieve::DEFAULT_SEGMENT_LEN;
use balanced_gaps::tuples::{
    format_tuple_file, generate_tuple, gpy_constants, is_admissible, min_k_for_two, parse_tuple_file,
    singular_series, AdmissibleTuple, GpyConstantsQuery, REFERENCE_THETA,
};
use balanced_gaps::weights::{
    lambda_r_batch, lambda_r_naive, moment_lemma1, moment_lemma2, moment_lemma3, s_statistic, MomentOptions,
    MomentReport, WeightConfig,
};
use balanced_gaps::{build_factor_table, FactorTable};
use clap::{Args, ValueEnum};
use serde_json::json;

use crate::output::{Report, RunManifest};
use crate::{CliError, Command};

type Out = Result<Report, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<serde_json::Value, CliError> {
    serde_json::to_value(v).map_err(|e| CliError::Compute(e.to_string()))
}

fn read(path: &PathBuf) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn window_table(lo: u64, hi: u64) -> Result<FactorTable, CliError> {
    Ok(FactorTable::build_segmented(lo, hi, DEFAULT_SEGMENT_LEN)?)
}

fn two_n(n: u64) -> Result<u64, CliError> {
    n.checked_mul(2).ok_or_else(|| usage("N is too large"))
}

pub(crate) fn dispatch(cmd: &Command, seed: u64, m: &mut RunManifest) -> Out {
    match cmd {
        Command::Classify(a) => cmd_classify(a, m),
        Command::CountStar(a) => cmd_count_star(a, m),
        Command::Density(a) => cmd_density(a, seed, m),
        Command::Tuple(a) => cmd_tuple(a, m),
        Command::SingularSeries(a) => cmd_singular(a, m),
        Command::Constants(a) => cmd_constants(a, m),
        Command::Weights(a) => cmd_weights(a, m),
        Command::Moments(a) => cmd_moments(a, m),
        Command::SStat(a) => cmd_s_stat(a, m),
        Command::Bv(a) => cmd_bv(a, m),
        Command::BvStar(a) => cmd_bv_star(a, m),
        Command::BvWeighted(a) => cmd_bv_weighted(a, m),
    }
}

/// A tuple given inline or through a tuple file.
#[derive(Args, Debug, Clone)]
pub struct TupleInput {
    /// Offsets, comma separated, e.g. `0,2,6`.
    #[arg(long, value_name = "OFFSETS", conflicts_with = "tuple_file")]
    tuple: Option<String>,
    /// File with one comma-separated tuple per line; `#` starts a comment.
    #[arg(long, value_name = "PATH")]
    tuple_file: Option<PathBuf>,
}

impl TupleInput {
    fn all(&self, m: &mut RunManifest) -> Result<Option<Vec<AdmissibleTuple>>, CliError> {
        let tuples = match (&self.tuple, &self.tuple_file) {
            (Some(t), _) => parse_tuple_file(t)?,
            (None, Some(p)) => {
                m.param("tuple_file", p.display());
                parse_tuple_file(&read(p)?)?
            }
            (None, None) => return Ok(None),
        };
        if tuples.is_empty() {
            return Err(usage("no tuple given"));
        }
        Ok(Some(tuples))
    }

    fn one(&self, m: &mut RunManifest) -> Result<AdmissibleTuple, CliError> {
        let tuples = self.all(m)?.ok_or_else(|| usage("pass --tuple or --tuple-file"))?;
        if tuples.len() > 1 {
            return Err(usage("expected exactly one tuple"));
        }
        let t = tuples.into_iter().next().expect("non-empty");
        m.param("tuple", &t);
        Ok(t)
    }
}

// ---------------------------------------------------------------- classify

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    /// A single integer n ≥ 2.
    #[arg(long, conflicts_with = "n_window", required_unless_present = "n_window")]
    n: Option<u64>,
    /// Classify every n in [N, 2N).
    #[arg(long, value_name = "N")]
    n_window: Option<u64>,
    /// Also report whether n is ε-balanced.
    #[arg(long)]
    eps: Option<f64>,
}

fn cmd_classify(a: &ClassifyArgs, m: &mut RunManifest) -> Out {
    let (lo, hi) = match (a.n, a.n_window) {
        (Some(n), _) => {
            m.param("n", n);
            (n, n.checked_add(1).ok_or_else(|| usage("n is too large"))?)
        }
        (None, Some(n)) => {
            m.param("n_window", n);
            (n, two_n(n)?)
        }
        (None, None) => return Err(usage("pass --n or --n-window")),
    };
    if let Some(e) = a.eps {
        m.param("eps", e);
    }
    let table = window_table(lo, hi)?;
    let mut report = Report::new(json!(null), vec!["n", "omega", "threshold", "is_prime", "factors", "balanced"]);
    let mut items = Vec::new();
    for n in lo..hi {
        let f = table.factorize(n)?;
        let c = classify(&f)?;
        let balanced = a.eps.map(|e| is_eps_balanced(&f, e)).transpose()?;
        let factors = f
            .factors()
            .iter()
            .map(|&(p, e)| if e == 1 { p.to_string() } else { format!("{p}^{e}") })
            .collect::<Vec<_>>()
            .join("*");
        report.row(vec![
            c.n.into(),
            c.omega_big.into(),
            c.threshold.into(),
            c.is_prime.into(),
            factors.into(),
            balanced.into(),
        ]);
        items.push(json!({
            "n": c.n,
            "omega": c.omega_big,
            "threshold": c.threshold,
            "is_prime": c.is_prime,
            "factors": f.factors(),
            "balanced": balanced,
        }));
    }
    report.json = if a.n.is_some() { items.pop().expect("one row") } else { json!(items) };
    Ok(report)
}

// -------------------------------------------------------------- count-star

#[derive(Args, Debug)]
pub struct CountStarArgs {
    /// Window base N; the scan covers [N, 2N).
    #[arg(long, value_name = "N")]
    n_window: u64,
    #[arg(long)]
    r: u32,
    #[arg(long)]
    eps: f64,
}

fn cmd_count_star(a: &CountStarArgs, m: &mut RunManifest) -> Out {
    m.param("n_window", a.n_window);
    m.param("r", a.r);
    m.param("eps", a.eps);
    let spec = StarSetSpec::new(a.n_window, a.r, a.eps)?;
    let c = count_star_streaming(&spec, DEFAULT_SEGMENT_LEN as u64)?;
    let mut report = Report::new(
        to_json(&c)?,
        vec!["n_base", "r", "eps", "count", "ordered_count", "predicted", "ratio", "ordered_ratio"],
    );
    report.row(vec![
        c.n_base.into(),
        c.r.into(),
        c.eps.into(),
        c.count.into(),
        c.ordered_count.into(),
        c.predicted.into(),
        c.ratio.into(),
        c.ordered_ratio.into(),
    ]);
    Ok(report)
}

// ----------------------------------------------------------------- density

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DensityMethod {
    /// Closed form for r = 2, quadrature for r = 3, Monte Carlo above.
    Auto,
    ClosedForm,
    Quadrature,
    MonteCarlo,
}

#[derive(Args, Debug)]
pub struct DensityArgs {
    #[arg(long, default_value_t = 2)]
    r: u32,
    #[arg(long)]
    eps: f64,
    #[arg(long, value_enum, default_value_t = DensityMethod::Auto)]
    method: DensityMethod,
    /// Monte Carlo sample count.
    #[arg(long, default_value_t = MonteCarloOptions::default().samples)]
    samples: u64,
    /// Sum C₀(r, ε) over 2 ≤ r ≤ R_MAX plus an analytic tail bound instead.
    #[arg(long, value_name = "R_MAX")]
    tail_r_max: Option<u32>,
}

fn cmd_density(a: &DensityArgs, seed: u64, m: &mut RunManifest) -> Out {
    m.param("eps", a.eps);
    let mc = MonteCarloOptions { samples: a.samples, seed };
    let header = vec!["r", "eps", "c0", "method", "error", "upper_bound"];
    if let Some(r_max) = a.tail_r_max {
        m.param("tail_r_max", r_max);
        m.param("samples", a.samples);
        let t = density::c0_tail_sum(a.eps, r_max, mc)?;
        let mut report = Report::new(to_json(&t)?, header);
        for d in &t.terms {
            report.row(vec![
                d.r.into(),
                d.eps.into(),
                d.value.into(),
                d.method.to_string().into(),
                d.abs_error_estimate.into(),
                density::c0_upper_bound(d.r, d.eps).into(),
            ]);
        }
        return Ok(report);
    }
    m.param("r", a.r);
    m.param("method", format!("{:?}", a.method).to_lowercase());
    let d = match a.method {
        DensityMethod::Auto if a.r > 3 => density::c0_monte_carlo(a.r, a.eps, mc)?,
        DensityMethod::Auto => density::c0(a.r, a.eps)?,
        DensityMethod::ClosedForm => {
            if a.r != 2 {
                return Err(usage("the closed form exists only for r = 2"));
            }
            density::c0(2, a.eps)?
        }
        DensityMethod::Quadrature => density::c0_quadrature(a.r, a.eps)?,
        DensityMethod::MonteCarlo => density::c0_monte_carlo(a.r, a.eps, mc)?,
    };
    if d.method == density::Method::MonteCarlo {
        m.param("samples", a.samples);
    }
    let bound = density::c0_upper_bound(d.r, d.eps);
    let mut json = to_json(&d)?;
    json["upper_bound"] = json!(bound);
    let mut report = Report::new(json, header);
    report.row(vec![
        d.r.into(),
        d.eps.into(),
        d.value.into(),
        d.method.to_string().into(),
        d.abs_error_estimate.into(),
        bound.into(),
    ]);
    Ok(report)
}

// ------------------------------------------------------------------- tuple

#[derive(Args, Debug)]
pub struct TupleArgs {
    /// Generate a narrow admissible tuple of this size.
    #[arg(long, conflicts_with_all = ["tuple", "tuple_file"])]
    k: Option<usize>,
    #[command(flatten)]
    input: TupleInput,
    /// Truncation point for the singular series column.
    #[arg(long, default_value_t = 100_000)]
    p_max: u64,
    /// Also write the tuples in tuple-file format to this path.
    #[arg(long, value_name = "PATH")]
    write_tuples: Option<PathBuf>,
}

fn cmd_tuple(a: &TupleArgs, m: &mut RunManifest) -> Out {
    let tuples = match a.k {
        Some(k) => {
            m.param("k", k);
            vec![generate_tuple(k)?]
        }
        None => a.input.all(m)?.ok_or_else(|| usage("pass --k, --tuple or --tuple-file"))?,
    };
    if let Some(t) = &a.input.tuple {
        m.param("tuple", t);
    }
    m.param("p_max", a.p_max);
    if let Some(path) = &a.write_tuples {
        std::fs::write(path, format_tuple_file(&tuples))
            .map_err(|e| CliError::Compute(format!("cannot write {}: {e}", path.display())))?;
    }
    let mut report = Report::new(json!(null), vec!["tuple", "k", "diameter", "admissible", "singular_series"]);
    let mut items = Vec::new();
    for t in &tuples {
        let admissible = is_admissible(t);
        let s = singular_series(t, a.p_max.max(t.k() as u64))?;
        report.row(vec![
            t.to_string().into(),
            t.k().into(),
            t.diameter().into(),
            admissible.into(),
            s.value.into(),
        ]);
        items.push(json!({
            "offsets": t.offsets(),
            "k": t.k(),
            "diameter": t.diameter(),
            "admissible": admissible,
            "singular_series": s,
        }));
    }
    report.json = json!(items);
    Ok(report)
}

// --------------------------------------------------------- singular-series

#[derive(Args, Debug)]
pub struct SingularArgs {
    #[command(flatten)]
    input: TupleInput,
    #[arg(long, default_value_t = 1_000_000)]
    p_max: u64,
}

fn cmd_singular(a: &SingularArgs, m: &mut RunManifest) -> Out {
    let tuples = a.input.all(m)?.ok_or_else(|| usage("pass --tuple or --tuple-file"))?;
    if let Some(t) = &a.input.tuple {
        m.param("tuple", t);
    }
    m.param("p_max", a.p_max);
    let mut report = Report::new(json!(null), vec!["tuple", "k", "p_max", "value", "tail_log_bound"]);
    let mut items = Vec::new();
    for t in &tuples {
        let s = singular_series(t, a.p_max)?;
        report.row(vec![
            t.to_string().into(),
            t.k().into(),
            s.p_max.into(),
            s.value.into(),
            s.tail_log_bound.into(),
        ]);
        items.push(json!({ "offsets": t.offsets(), "k": t.k(), "singular_series": s }));
    }
    report.json = json!(items);
    Ok(report)
}

// --------------------------------------------------------------- constants

#[derive(Args, Debug)]
pub struct ConstantsArgs {
    /// Level of distribution ϑ ∈ (1/2, 1].
    #[arg(long, conflicts_with = "delta", required_unless_present = "delta")]
    theta: Option<f64>,
    /// Excess δ = ϑ − 1/2 ∈ (0, 1/2].
    #[arg(long)]
    delta: Option<f64>,
    /// With --eps, also report the smallest k making the positivity factor
    /// positive for the star set of this r.
    #[arg(long, requires = "eps")]
    r: Option<u32>,
    #[arg(long, requires = "r")]
    eps: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    k_cap: u64,
}

fn cmd_constants(a: &ConstantsArgs, m: &mut RunManifest) -> Out {
    let q = match (a.theta, a.delta) {
        (Some(t), _) => {
            m.param("theta", t);
            GpyConstantsQuery::from_theta(t)?
        }
        (None, Some(d)) => {
            m.param("delta", d);
            GpyConstantsQuery::from_delta(d)?
        }
        (None, None) => return Err(usage("pass --theta or --delta")),
    };
    let c = gpy_constants(q)?;
    let mut json = json!({
        "formula": { "theta": c.theta, "delta": c.delta, "k0": c.k0, "c_asymptotic": c.c_asymptotic },
        "reference": c.reference.map(|(k0, gap)| json!({ "theta": REFERENCE_THETA, "k0": k0, "gap": gap })),
    });
    let min_k = match (a.r, a.eps) {
        (Some(r), Some(eps)) => {
            m.param("r", r);
            m.param("eps", eps);
            m.param("k_cap", a.k_cap);
            let mk = min_k_for_two(r, eps, a.k_cap)?;
            json["min_k"] = to_json(&mk)?;
            Some(mk)
        }
        _ => None,
    };
    let mut report = Report::new(
        json,
        vec![
            "theta",
            "delta",
            "k0",
            "c_asymptotic",
            "reference_k0",
            "reference_gap",
            "min_k",
            "min_k_l",
            "sqrt_rule_k",
            "sqrt_rule_l",
        ],
    );
    let (ref_k0, ref_gap) = match c.reference {
        Some((k0, gap)) => (Some(k0), Some(gap)),
        None => (None, None),
    };
    let opt = min_k.as_ref().and_then(|mk| mk.optimal);
    let sq = min_k.as_ref().and_then(|mk| mk.sqrt_rule);
    report.row(vec![
        c.theta.into(),
        c.delta.into(),
        c.k0.into(),
        c.c_asymptotic.into(),
        ref_k0.into(),
        ref_gap.into(),
        opt.map(|p| p.0).into(),
        opt.map(|p| p.1).into(),
        sq.map(|p| p.0).into(),
        sq.map(|p| p.1).into(),
    ]);
    Ok(report)
}

// ----------------------------------------------------------------- weights

#[derive(Args, Debug)]
pub struct WeightsArgs {
    #[command(flatten)]
    input: TupleInput,
    #[arg(long)]
    l: u32,
    #[arg(long)]
    big_r: f64,
    /// First n of the range.
    #[arg(long, value_name = "N")]
    n_window: u64,
    /// Number of consecutive n.
    #[arg(long, default_value_t = 1000)]
    len: u64,
    /// Add a column from direct divisor enumeration.
    #[arg(long)]
    naive: bool,
}

fn cmd_weights(a: &WeightsArgs, m: &mut RunManifest) -> Out {
    let tuple = a.input.one(m)?;
    m.param("l", a.l);
    m.param("big_r", a.big_r);
    m.param("n_window", a.n_window);
    m.param("len", a.len);
    m.param("naive", a.naive);
    let cfg = WeightConfig::new(tuple, a.l, a.big_r)?;
    let lo = a.n_window;
    let hi = lo.checked_add(a.len).ok_or_else(|| usage("range overflows"))?;
    let fast = lambda_r_batch(lo, hi, &cfg)?;
    let naive = if a.naive {
        let top = hi + cfg.tuple().max_offset();
        let table = window_table(lo.max(2), top)?;
        Some((lo..hi).map(|n| lambda_r_naive(n, &cfg, &table)).collect::<Result<Vec<_>, _>>()?)
    } else {
        None
    };
    let mut report = Report::new(json!(null), vec!["n", "lambda", "lambda_naive"]);
    for (i, n) in (lo..hi).enumerate() {
        report.row(vec![n.into(), fast[i].into(), naive.as_ref().map(|v| v[i]).into()]);
    }
    report.json = json!({
        "tuple": cfg.tuple().offsets(),
        "l": cfg.l(),
        "big_r": cfg.big_r(),
        "lo": lo,
        "hi": hi,
        "lambda": fast,
        "lambda_naive": naive,
    });
    Ok(report)
}

// ----------------------------------------------------------------- moments

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MomentVariant {
    Lemma1,
    Lemma2,
    Lemma3,
}

#[derive(Args, Debug)]
pub struct MomentArgs {
    /// Window base N; sums run over [N, 2N).
    #[arg(long, value_name = "N")]
    n_window: u64,
    #[command(flatten)]
    input: TupleInput,
    #[arg(long)]
    l: u32,
    /// Sieve level R (default N^{1/4}).
    #[arg(long)]
    big_r: Option<f64>,
    /// Exponent C in the admissible ranges of R.
    #[arg(long, default_value_t = MomentOptions::default().log_power)]
    log_power: f64,
    #[arg(long, default_value_t = MomentOptions::default().singular_p_max)]
    singular_p_max: u64,
}

impl MomentArgs {
    fn setup(&self, m: &mut RunManifest) -> Result<(WeightConfig, MomentOptions), CliError> {
        let tuple = self.input.one(m)?;
        let big_r = self.big_r.unwrap_or_else(|| (self.n_window as f64).powf(0.25));
        m.param("n_window", self.n_window);
        m.param("l", self.l);
        m.param("big_r", big_r);
        m.param("log_power", self.log_power);
        m.param("singular_p_max", self.singular_p_max);
        let cfg = WeightConfig::new(tuple, self.l, big_r)?;
        let opts = MomentOptions { log_power: self.log_power, singular_p_max: self.singular_p_max, ..Default::default() };
        Ok((cfg, opts))
    }
}

#[derive(Args, Debug)]
pub struct MomentsArgs {
    #[arg(long, value_enum)]
    variant: MomentVariant,
    #[command(flatten)]
    common: MomentArgs,
    /// Offset h ∈ H for lemma2 and lemma3.
    #[arg(long)]
    h: Option<u64>,
    /// Star-set parameters for lemma3.
    #[arg(long)]
    r: Option<u32>,
    #[arg(long)]
    eps: Option<f64>,
}

fn moment_report(rep: &MomentReport) -> Out {
    let mut report = Report::new(to_json(rep)?, vec!["n", "variant", "empirical", "predicted", "ratio"]);
    report.row(vec![
        rep.n_base.into(),
        rep.variant.to_string().into(),
        rep.empirical.into(),
        rep.predicted_main_term.into(),
        rep.ratio.into(),
    ]);
    Ok(report)
}

fn star_spec(n: u64, r: Option<u32>, eps: Option<f64>, m: &mut RunManifest) -> Result<StarSetSpec, CliError> {
    let (r, eps) = match (r, eps) {
        (Some(r), Some(e)) => (r, e),
        _ => return Err(usage("pass --r and --eps")),
    };
    m.param("r", r);
    m.param("eps", eps);
    Ok(StarSetSpec::new(n, r, eps)?)
}

fn cmd_moments(a: &MomentsArgs, m: &mut RunManifest) -> Out {
    let (cfg, opts) = a.common.setup(m)?;
    let n = a.common.n_window;
    m.param("variant", format!("{:?}", a.variant).to_lowercase());
    let need_h = |m: &mut RunManifest| {
        let h = a.h.ok_or_else(|| usage("pass --h"))?;
        m.param("h", h);
        Ok::<u64, CliError>(h)
    };
    let rep = match a.variant {
        MomentVariant::Lemma1 => moment_lemma1(n, &cfg, &opts)?,
        MomentVariant::Lemma2 => moment_lemma2(n, &cfg, need_h(m)?, &opts)?,
        MomentVariant::Lemma3 => {
            let h = need_h(m)?;
            let spec = star_spec(n, a.r, a.eps, m)?;
            moment_lemma3(n, &cfg, h, &spec, &opts)?
        }
    };
    moment_report(&rep)
}

#[derive(Args, Debug)]
pub struct SStatArgs {
    #[command(flatten)]
    common: MomentArgs,
    #[arg(long)]
    r: u32,
    #[arg(long)]
    eps: f64,
}

fn cmd_s_stat(a: &SStatArgs, m: &mut RunManifest) -> Out {
    let (cfg, opts) = a.common.setup(m)?;
    let spec = star_spec(a.common.n_window, Some(a.r), Some(a.eps), m)?;
    moment_report(&s_statistic(a.common.n_window, &cfg, &spec, &opts)?)
}

// ---------------------------------------------------------------------- bv

#[derive(Args, Debug, Clone)]
pub struct QRange {
    /// Largest modulus.
    #[arg(long, conflicts_with = "log_power", required_unless_present = "log_power")]
    q_max: Option<u64>,
    /// Derive q_max = ⌊√N / ln^A N⌋.
    #[arg(long, value_name = "A")]
    log_power: Option<f64>,
}

impl QRange {
    fn resolve(&self, n: u64, m: &mut RunManifest) -> Result<u64, CliError> {
        let q = match (self.q_max, self.log_power) {
            (Some(q), _) => q,
            (None, Some(a)) => {
                m.param("log_power", a);
                q_max_from_log_power(n, a)
            }
            (None, None) => return Err(usage("pass --q-max or --log-power")),
        };
        m.param("q_max", q);
        Ok(q)
    }
}

fn discrepancy_report(d: &DiscrepancyReport) -> Out {
    let mut report = Report::new(
        to_json(d)?,
        vec!["q", "worst_a", "max_abs_dev", "main_term", "phi_q", "coprime_count", "noncoprime_count", "alt_main_term", "alt_max_abs_dev"],
    );
    for row in &d.per_q {
        report.row(vec![
            row.q.into(),
            row.worst_a.into(),
            row.max_abs_dev.into(),
            row.main_term.into(),
            row.phi_q.into(),
            row.coprime_count.into(),
            row.noncoprime_count.into(),
            row.alt_main_term.into(),
            row.alt_max_abs_dev.into(),
        ]);
    }
    Ok(report)
}

#[derive(Args, Debug)]
pub struct BvArgs {
    /// Count primes p ≤ N.
    #[arg(long = "n-window", visible_alias = "n", value_name = "N")]
    n: u64,
    #[command(flatten)]
    q: QRange,
}

fn cmd_bv(a: &BvArgs, m: &mut RunManifest) -> Out {
    m.param("n", a.n);
    let q = a.q.resolve(a.n, m)?;
    let cfg = DiscrepancyConfig::primes(a.n, q)?;
    let table = build_factor_table(2, a.n + 1)?;
    discrepancy_report(&bv_prime_discrepancy(&cfg, &table)?)
}

#[derive(Args, Debug)]
pub struct BvStarArgs {
    /// Window base N; the star set lives in [N, 2N).
    #[arg(long, value_name = "N")]
    n_window: u64,
    #[arg(long)]
    r: u32,
    #[arg(long)]
    eps: f64,
    #[command(flatten)]
    q: QRange,
}

fn cmd_bv_star(a: &BvStarArgs, m: &mut RunManifest) -> Out {
    m.param("n_window", a.n_window);
    let spec = star_spec(a.n_window, Some(a.r), Some(a.eps), m)?;
    let q = a.q.resolve(a.n_window, m)?;
    let cfg = DiscrepancyConfig::star(spec, q)?;
    let (lo, hi) = spec.window();
    let table = window_table(lo, hi)?;
    discrepancy_report(&bv_star_discrepancy(&cfg, &table)?)
}

#[derive(Args, Debug)]
pub struct BvWeightedArgs {
    #[arg(long = "n-window", visible_alias = "n", value_name = "N")]
    n: u64,
    #[command(flatten)]
    q: QRange,
    /// m runs up to N^{1−α}.
    #[arg(long)]
    alpha: f64,
    /// `const1`, `mobius`, or a path to a two-column `m, f(m)` file.
    #[arg(long, default_value = "const1")]
    f: String,
}

fn cmd_bv_weighted(a: &BvWeightedArgs, m: &mut RunManifest) -> Out {
    m.param("n", a.n);
    m.param("alpha", a.alpha);
    m.param("f", &a.f);
    let q = a.q.resolve(a.n, m)?;
    let f = match a.f.as_str() {
        "const1" => WeightFn::Const1,
        "mobius" => WeightFn::Mobius,
        path => WeightFn::parse_table(&read(&PathBuf::from(path))?)?,
    };
    let cfg = DiscrepancyConfig::primes(a.n, q)?;
    discrepancy_report(&weighted_discrepancy(&cfg, a.alpha, &f)?)
}
