//! Standard-normal special functions, the truncation endpoint and the weight
//! integrals of the truncated statistic.
//!
//! The four weight integrals all carry the factor `1/φ(x) = √(2π)·e^{x²/2}`,
//! which grows steeply towards the ends of `[-a_n, a_n]`. Intervals that
//! straddle zero are split there before adaptive quadrature.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadratureConfig};

const SQRT_2PI: f64 = 2.506_628_274_631_000_5;
const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Largest sample size whose endpoint keeps `e^{a_n²/2}` comfortably finite.
pub const MAX_SAMPLE_SIZE: usize = 10_000_000;

/// Standard normal density.
pub fn pdf(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Standard normal distribution function.
pub fn cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// Upper tail `1 - Φ(x)`, accurate for large positive `x`.
pub fn sf(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

/// `1/φ(x)`.
#[inline]
pub fn recip_pdf(x: f64) -> f64 {
    SQRT_2PI * (0.5 * x * x).exp()
}

/// Inverse of [`cdf`].
///
/// Acklam's rational approximation (relative error about 1e-9) followed by one
/// Newton step. The upper half is obtained by symmetry so that `1 - p` is
/// formed exactly.
pub fn quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("quantile needs 0 < p < 1, got {p}")));
    }
    if p > 0.5 {
        return Ok(-lower_quantile(1.0 - p));
    }
    Ok(lower_quantile(p))
}

fn lower_quantile(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    let x = if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    };

    let density = pdf(x);
    if density > 0.0 {
        x - (cdf(x) - p) / density
    } else {
        x
    }
}

/// Truncation endpoint `a_n = Φ⁻¹(1 - 1/n)` for a given sample size.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Endpoint {
    pub n: usize,
    pub a_n: f64,
}

pub fn endpoint(n: usize) -> Result<Endpoint> {
    if n < 2 {
        return Err(Error::Domain(format!("endpoint needs n >= 2, got {n}")));
    }
    if n > MAX_SAMPLE_SIZE {
        return Err(Error::Domain(format!(
            "n = {n} exceeds the supported maximum {MAX_SAMPLE_SIZE}"
        )));
    }
    let a_n = if n == 2 {
        0.0
    } else {
        quantile(1.0 - 1.0 / n as f64)?
    };
    Ok(Endpoint { n, a_n })
}

fn split_at_zero<F: Fn(f64) -> f64 + Copy>(
    f: F,
    lo: f64,
    hi: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    if !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Domain(format!(
            "integration bounds must be finite, got [{lo}, {hi}]"
        )));
    }
    if lo > hi {
        return Err(Error::Domain(format!(
            "lower bound {lo} exceeds upper bound {hi}"
        )));
    }
    if lo < 0.0 && hi > 0.0 {
        Ok(integrate(f, lo, 0.0, cfg)? + integrate(f, 0.0, hi, cfg)?)
    } else {
        integrate(f, lo, hi, cfg)
    }
}

/// `∫_lo^hi dx / φ(x)`.
pub fn int_recip_pdf(lo: f64, hi: f64, cfg: &QuadratureConfig) -> Result<f64> {
    split_at_zero(recip_pdf, lo, hi, cfg)
}

/// `∫_lo^hi Φ(x) / φ(x) dx`.
pub fn int_cdf_over_pdf(lo: f64, hi: f64, cfg: &QuadratureConfig) -> Result<f64> {
    split_at_zero(|x| cdf(x) * recip_pdf(x), lo, hi, cfg)
}

/// `∫_lo^hi Φ(x)² / φ(x) dx`.
pub fn int_cdf_sq_over_pdf(lo: f64, hi: f64, cfg: &QuadratureConfig) -> Result<f64> {
    split_at_zero(
        |x| {
            let p = cdf(x);
            p * p * recip_pdf(x)
        },
        lo,
        hi,
        cfg,
    )
}

/// `∫_lo^hi Φ(x)(1 - Φ(x)) / φ(x) dx`.
pub fn int_bridge_variance(lo: f64, hi: f64, cfg: &QuadratureConfig) -> Result<f64> {
    split_at_zero(|x| cdf(x) * sf(x) * recip_pdf(x), lo, hi, cfg)
}

/// `C_n = n ∫_{-a_n}^{a_n} Φ²/φ dx`.
pub fn c_n(n: usize, cfg: &QuadratureConfig) -> Result<f64> {
    let a = endpoint(n)?.a_n;
    Ok(n as f64 * int_cdf_sq_over_pdf(-a, a, cfg)?)
}

/// `D_n = ∫_{-a_n}^{a_n} Φ(1-Φ)/φ dx`, the integrated variance of the
/// Brownian bridge over the truncation window.
pub fn d_n(n: usize, cfg: &QuadratureConfig) -> Result<f64> {
    let a = endpoint(n)?.a_n;
    if a == 0.0 {
        return Ok(0.0);
    }
    // symmetric integrand
    Ok(2.0 * int_bridge_variance(0.0, a, cfg)?)
}

/// `∫_a^b Φ⁻¹(t) dt = φ(Φ⁻¹(a)) - φ(Φ⁻¹(b))`, with `φ(Φ⁻¹(0)) = φ(Φ⁻¹(1)) = 0`.
pub fn int_quantile(a: f64, b: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) {
        return Err(Error::Domain(format!(
            "probabilities must lie in [0, 1], got {a}, {b}"
        )));
    }
    let density_at = |t: f64| -> Result<f64> {
        if t <= 0.0 || t >= 1.0 {
            Ok(0.0)
        } else {
            Ok(pdf(quantile(t)?))
        }
    };
    Ok(density_at(a)? - density_at(b)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simpson<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, panels: usize) -> f64 {
        let h = (hi - lo) / panels as f64;
        let mut sum = f(lo) + f(hi);
        for i in 1..panels {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            sum += w * f(lo + i as f64 * h);
        }
        sum * h / 3.0
    }

    #[test]
    fn pdf_values() {
        assert_eq!(pdf(0.0), 0.398_942_280_401_432_7);
        assert_eq!(pdf(1.0), pdf(-1.0));
        assert!((pdf(2.0) - 0.053_990_966_513_188_06).abs() < 1e-17);
    }

    #[test]
    fn cdf_values() {
        assert_eq!(cdf(0.0), 0.5);
        let lower = 1.0 * pdf(1.0) / 2.0;
        let upper = pdf(1.0);
        assert!(cdf(-1.0) >= lower && cdf(-1.0) <= upper);
        assert!((cdf(1.2816) - 0.9).abs() < 5e-5);
        for i in -80..=80 {
            let x = i as f64 * 0.1;
            assert!((cdf(x) + cdf(-x) - 1.0).abs() <= 1e-15, "{x}");
        }
    }

    #[test]
    fn quantile_values() {
        assert_eq!(quantile(0.5).unwrap(), 0.0);
        assert!((quantile(0.9).unwrap() - 1.2816).abs() < 5e-5);
        assert!((quantile(0.99).unwrap() - 2.3263).abs() < 5e-5);
        for p in [1e-300, 1e-12, 1e-5, 0.02, 0.3, 0.7, 0.98, 1.0 - 1e-12] {
            let x = quantile(p).unwrap();
            assert!((cdf(x) - p).abs() <= 1e-13, "{p}");
            // relative accuracy in whichever tail p sits
            let (got, want) = if p > 0.5 {
                (sf(x), 1.0 - p)
            } else {
                (cdf(x), p)
            };
            assert!(((got - want) / want).abs() <= 1e-12, "{p}");
        }
    }

    #[test]
    fn quantile_rejects_out_of_range() {
        for p in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(matches!(quantile(p), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn endpoint_values() {
        assert!((endpoint(50).unwrap().a_n - 2.0537).abs() < 5e-5);
        assert!((endpoint(200).unwrap().a_n - 2.5758).abs() < 5e-5);
        assert_eq!(endpoint(2).unwrap().a_n, 0.0);
        assert!(endpoint(1).is_err());
        assert!(endpoint(MAX_SAMPLE_SIZE + 1).is_err());
    }

    #[test]
    fn recip_pdf_integral_edge_cases() {
        let cfg = QuadratureConfig::default();
        assert_eq!(int_recip_pdf(0.7, 0.7, &cfg).unwrap(), 0.0);
        let whole = int_recip_pdf(-1.0, 1.0, &cfg).unwrap();
        let left = int_recip_pdf(-1.0, 0.0, &cfg).unwrap();
        let right = int_recip_pdf(0.0, 1.0, &cfg).unwrap();
        assert!((left - right).abs() <= 1e-14 * right);
        assert!((whole - left - right).abs() <= 1e-14 * whole);
        assert!(int_recip_pdf(1.0, 0.0, &cfg).is_err());
        assert!(int_recip_pdf(f64::NEG_INFINITY, 0.0, &cfg).is_err());
    }

    #[test]
    fn weight_integrals_match_simpson() {
        let cfg = QuadratureConfig::default();
        let a = int_recip_pdf(0.0, 1.0, &cfg).unwrap();
        let a_ref = simpson(recip_pdf, 0.0, 1.0, 1_000_000);
        assert!(((a - a_ref) / a_ref).abs() < 1e-8);

        let b = int_cdf_over_pdf(0.0, 1.0, &cfg).unwrap();
        let b_ref = simpson(|x| cdf(x) / pdf(x), 0.0, 1.0, 1_000_000);
        assert!(((b - b_ref) / b_ref).abs() < 1e-8);
        assert!(b <= a);
    }

    #[test]
    fn b_never_exceeds_a() {
        let cfg = QuadratureConfig::default();
        for (lo, hi) in [(-3.0, -2.0), (-0.3, 0.4), (1.0, 2.5), (-2.0, 2.0)] {
            let a = int_recip_pdf(lo, hi, &cfg).unwrap();
            let b = int_cdf_over_pdf(lo, hi, &cfg).unwrap();
            assert!(b > 0.0 && b <= a);
        }
    }

    #[test]
    fn c_n_matches_printed_values() {
        let cfg = QuadratureConfig::default();
        for (n, printed) in [(10, 28.5798), (50, 534.8787), (100, 1814.0555)] {
            let v = c_n(n, &cfg).unwrap();
            assert!(((v - printed) / printed).abs() < 1e-3, "{n}: {v}");
        }
        assert!(c_n(11, &cfg).unwrap() > c_n(10, &cfg).unwrap());
    }

    #[test]
    fn d_n_values() {
        let cfg = QuadratureConfig::default();
        assert_eq!(d_n(2, &cfg).unwrap(), 0.0);
        let a = endpoint(10).unwrap().a_n;
        let reference = simpson(|x| cdf(x) * sf(x) / pdf(x), -a, a, 1_000_000);
        assert!((d_n(10, &cfg).unwrap() - reference).abs() < 1e-8);
        assert!(d_n(1000, &cfg).unwrap() > d_n(100, &cfg).unwrap());
    }

    #[test]
    fn quantile_integral_closed_form() {
        let cfg = QuadratureConfig::default();
        let closed = int_quantile(0.2, 0.7).unwrap();
        let numeric =
            crate::quadrature::integrate(|t| quantile(t).unwrap(), 0.2, 0.7, &cfg).unwrap();
        assert!((closed - numeric).abs() < 1e-10);
        assert!(int_quantile(0.0, 1.0).unwrap().abs() < 1e-300);
    }
}
