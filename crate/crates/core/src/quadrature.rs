//! Adaptive Gauss-Kronrod (10-point Gauss / 21-point Kronrod) integration.
//!
//! Only used for the smooth, positive weight integrands of the normal kernel,
//! so there is no extrapolation or singularity handling. Intervals are bisected
//! largest-error-first until the global error bound satisfies
//! `err <= max(abs_tol, rel_tol * |I|)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances for every numerical integral in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureConfig {
    pub fn new(rel_tol: f64, abs_tol: f64, max_subdivisions: usize) -> Result<Self> {
        let cfg = Self {
            rel_tol,
            abs_tol,
            max_subdivisions,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_rel_tol(self, rel_tol: f64) -> Result<Self> {
        Self::new(rel_tol, self.abs_tol, self.max_subdivisions)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(Error::Domain(format!(
                "rel_tol must be positive, got {}",
                self.rel_tol
            )));
        }
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::Domain(format!(
                "abs_tol must be positive, got {}",
                self.abs_tol
            )));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::Domain("max_subdivisions must be at least 1".into()));
        }
        Ok(())
    }
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

fn gk21<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Segment {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let f_center = f(center);

    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    let mut gauss = 0.0;
    let mut kronrod = WGK[10] * f_center;
    let mut res_abs = kronrod.abs();

    for j in 0..5 {
        let k = 2 * j + 1;
        let dx = half * XGK[k];
        let (f1, f2) = (f(center - dx), f(center + dx));
        fv1[k] = f1;
        fv2[k] = f2;
        gauss += WG[j] * (f1 + f2);
        kronrod += WGK[k] * (f1 + f2);
        res_abs += WGK[k] * (f1.abs() + f2.abs());
    }
    for j in 0..5 {
        let k = 2 * j;
        let dx = half * XGK[k];
        let (f1, f2) = (f(center - dx), f(center + dx));
        fv1[k] = f1;
        fv2[k] = f2;
        kronrod += WGK[k] * (f1 + f2);
        res_abs += WGK[k] * (f1.abs() + f2.abs());
    }

    let mean = 0.5 * kronrod;
    let mut res_asc = WGK[10] * (f_center - mean).abs();
    for k in 0..10 {
        res_asc += WGK[k] * ((fv1[k] - mean).abs() + (fv2[k] - mean).abs());
    }

    let scale = half.abs();
    let value = kronrod * half;
    res_abs *= scale;
    res_asc *= scale;

    // QUADPACK error rescaling
    let mut error = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }

    Segment {
        lo,
        hi,
        value,
        error,
    }
}

/// Integrates `f` over `[lo, hi]`. Reversed bounds give the negated integral.
///
/// On failure to meet the tolerance within `cfg.max_subdivisions` segments the
/// returned [`Error::Convergence`] carries the best estimate.
pub fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Domain(format!(
            "integration bounds must be finite, got [{lo}, {hi}]"
        )));
    }
    if lo == hi {
        return Ok(0.0);
    }
    if lo > hi {
        return integrate(f, hi, lo, cfg).map(|v| -v);
    }

    let first = gk21(&f, lo, hi);
    let mut total = first.value;
    let mut total_err = first.error;
    if !total.is_finite() {
        return Err(Error::Domain(format!(
            "integrand is not finite on [{lo}, {hi}]"
        )));
    }
    let mut segments = vec![first];

    loop {
        let tol = cfg.abs_tol.max(cfg.rel_tol * total.abs());
        if total_err <= tol {
            return Ok(segments.iter().map(|s| s.value).sum());
        }
        if segments.len() >= cfg.max_subdivisions {
            return Err(Error::Convergence {
                lo,
                hi,
                estimate: total,
                error_bound: total_err,
            });
        }

        let (worst, _) = segments
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.error.total_cmp(&b.1.error))
            .expect("at least one segment");
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.lo + seg.hi);
        if mid <= seg.lo || mid >= seg.hi {
            // interval cannot be split further in double precision
            return Err(Error::Convergence {
                lo,
                hi,
                estimate: total,
                error_bound: total_err,
            });
        }
        let left = gk21(&f, seg.lo, mid);
        let right = gk21(&f, mid, seg.hi);
        total += left.value + right.value - seg.value;
        total_err += left.error + right.error - seg.error;
        segments.push(left);
        segments.push(right);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let cfg = QuadratureConfig::default();
        let v = integrate(|x| 3.0 * x * x + 1.0, -1.0, 2.0, &cfg).unwrap();
        assert!((v - 12.0).abs() < 1e-13);
    }

    #[test]
    fn reversed_bounds_negate() {
        let cfg = QuadratureConfig::default();
        let a = integrate(f64::exp, 0.0, 1.5, &cfg).unwrap();
        let b = integrate(f64::exp, 1.5, 0.0, &cfg).unwrap();
        assert_eq!(a, -b);
        assert!((a - (1.5f64.exp() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn steep_integrand_needs_subdivision() {
        let cfg = QuadratureConfig::default();
        let v = integrate(|x| (x * x / 2.0).exp(), 0.0, 5.0, &cfg).unwrap();
        // reference value from 30-digit mpmath quadrature
        let reference = 56_148.438_701_839_655_6;
        assert!(((v - reference) / reference).abs() < 1e-10, "{v}");
    }

    #[test]
    fn budget_exhaustion_reports_estimate() {
        let cfg = QuadratureConfig::new(1e-15, 1e-300, 1).unwrap();
        let err = integrate(|x| (x * x / 2.0).exp(), 0.0, 5.0, &cfg).unwrap_err();
        match err {
            Error::Convergence { estimate, .. } => {
                assert!((estimate / 56_148.438_701_839_655_6 - 1.0).abs() < 1e-3)
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_config_and_bounds() {
        assert!(QuadratureConfig::new(0.0, 1e-12, 10).is_err());
        assert!(QuadratureConfig::new(1e-10, -1.0, 10).is_err());
        assert!(QuadratureConfig::new(1e-10, 1e-12, 0).is_err());
        let cfg = QuadratureConfig::default();
        assert!(integrate(|x| x, 0.0, f64::INFINITY, &cfg).is_err());
    }
}
