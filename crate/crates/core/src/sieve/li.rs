use crate::quad::integrate;
use crate::{Error, Result};

/// li(2) = ∫₀² dt/ln t (principal value), the offset between li and Li.
pub const LI_AT_2: f64 = 1.045_163_780_117_492_784_844_588_889_194_613_136_5;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_606_512_090_082_402_43;

/// Below this point Li(x) is small enough that li(x) − li(2) would cancel, so
/// the integral is evaluated directly.
const DIRECT_BELOW: f64 = 3.0;

/// Offset logarithmic integral Li(x) = ∫₂ˣ dt / ln t.
///
/// For `x ≥ 3` this is li(x) − li(2) with li from Ramanujan's series
///
/// ```text
/// li(x) = γ + ln ln x + √x Σₙ (−1)ⁿ⁻¹ (ln x)ⁿ / (n! 2ⁿ⁻¹) Σ_{j<⌈n/2⌉} 1/(2j+1)
/// ```
///
/// and for `2 ≤ x < 3` the integral is taken by adaptive Gauss–Kronrod.
pub fn log_integral(x: f64) -> Result<f64> {
    if !(x >= 2.0) || !x.is_finite() {
        return Err(Error::param("x", format!("Li(x) needs finite x ≥ 2, got {x}")));
    }
    if x < DIRECT_BELOW {
        return Ok(integrate(|t: f64| 1.0 / t.ln(), 2.0, x, &[], 0.0, 1e-15)?.value);
    }
    Ok(li_series(x) - LI_AT_2)
}

fn li_series(x: f64) -> f64 {
    let lx = x.ln();
    let mut sum = 0.0;
    let mut term = 1.0; // (ln x)^n / (n! 2^(n-1)) with sign, built incrementally
    let mut inner = 0.0; // Σ_{j ≤ (n-1)/2} 1/(2j+1)
    let mut n = 1u32;
    loop {
        term *= if n == 1 { lx } else { -lx / (f64::from(n) * 2.0) };
        if (n - 1) % 2 == 0 {
            inner += 1.0 / f64::from(n);
        }
        let delta = term * inner;
        sum += delta;
        if delta.abs() < 1e-17 * sum.abs() && n > lx as u32 {
            break;
        }
        n += 1;
    }
    EULER_GAMMA + lx.ln() + x.sqrt() * sum
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn pinned_values() {
        assert_eq!(log_integral(2.0).unwrap(), 0.0);
        // Reference values from a 30-digit quadrature.
        assert!(rel(log_integral(1e6).unwrap(), 78_626.503_995_682_064) < 1e-12);
        assert!(rel(log_integral(1e4).unwrap(), 1_245.092_052_119_270_97) < 1e-12);
        assert!(rel(log_integral(1e5).unwrap(), 9_628.763_837_270_680_7) < 1e-12);
        assert!(rel(log_integral(3.0).unwrap(), 1.118_424_814_549_699_2) < 1e-12);
        assert!(rel(log_integral(2.5).unwrap(), 0.622_130_887_388_831_17) < 1e-12);
        assert!(rel(log_integral(1e9).unwrap(), 50_849_233.911_838_018) < 1e-12);
    }

    #[test]
    fn sanity_against_prime_counts() {
        assert!((log_integral(1e6).unwrap() - 78_498.0).abs() < 300.0);
        assert!((log_integral(1e4).unwrap() - 1_229.0).abs() < 30.0);
    }

    #[test]
    fn rejects_below_two() {
        assert!(log_integral(1.99).is_err());
        assert!(log_integral(f64::NAN).is_err());
        assert!(log_integral(f64::INFINITY).is_err());
    }

    #[test]
    fn continuous_across_switch() {
        let below = log_integral(DIRECT_BELOW - 1e-12).unwrap();
        let above = log_integral(DIRECT_BELOW).unwrap();
        assert!((above - below).abs() < 1e-11);
    }
}
