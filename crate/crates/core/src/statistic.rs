//! The TCVM statistic: stepwise evaluation, a direct-quadrature oracle and the
//! table-based decision rule.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normal::{self, Endpoint};
use crate::quadrature::{integrate, QuadratureConfig};
use crate::table::CriticalValueTable;

/// Smallest sample the statistic accepts.
pub const MIN_SAMPLE_SIZE: usize = 3;

/// A validated sample: at least three finite observations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    values: Vec<f64>,
}

impl Sample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < MIN_SAMPLE_SIZE {
            return Err(Error::TooFewObservations {
                required: MIN_SAMPLE_SIZE,
                got: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

impl TryFrom<Vec<f64>> for Sample {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

/// `Y_i = (X_i - mean) / S_n` with the divisor-n standard deviation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardizedSample {
    pub y: Vec<f64>,
    pub mean: f64,
    pub s_n: f64,
    pub n: usize,
}

impl StandardizedSample {
    /// Standardized values in ascending order.
    pub fn sorted(&self) -> Vec<f64> {
        let mut y = self.y.clone();
        y.sort_by(f64::total_cmp);
        y
    }
}

/// Divisor of the variance used to standardize the data.
///
/// The statistic is defined with the divisor-n standard deviation. The
/// embedded critical-value table was generated with the divisor-(n-1) one,
/// so a table records which estimator its values belong to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaleEstimator {
    /// `S_n² = (1/n) Σ (X_i - mean)²`.
    #[default]
    Population,
    /// `S² = (1/(n-1)) Σ (X_i - mean)²`.
    Unbiased,
}

impl ScaleEstimator {
    pub fn name(self) -> &'static str {
        match self {
            Self::Population => "population",
            Self::Unbiased => "unbiased",
        }
    }

    fn divisor(self, n: usize) -> f64 {
        match self {
            Self::Population => n as f64,
            Self::Unbiased => (n - 1) as f64,
        }
    }
}

impl std::fmt::Display for ScaleEstimator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ScaleEstimator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "population" | "n" => Ok(Self::Population),
            "unbiased" | "n-1" => Ok(Self::Unbiased),
            _ => Err(Error::Domain(format!(
                "unknown scale estimator `{s}` (expected population or unbiased)"
            ))),
        }
    }
}

/// Mean and divisor-n standard deviation of ascending `sorted`.
///
/// Sums run over the sorted values so the result does not depend on the
/// input order.
pub(crate) fn moments(sorted: &[f64]) -> Result<(f64, f64)> {
    moments_with(sorted, ScaleEstimator::Population)
}

pub(crate) fn moments_with(sorted: &[f64], scale: ScaleEstimator) -> Result<(f64, f64)> {
    let n = sorted.len() as f64;
    let mean = sorted.iter().sum::<f64>() / n;
    let ss = sorted.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>();
    let s_n = (ss / scale.divisor(sorted.len())).sqrt();
    let extent = sorted
        .first()
        .unwrap_or(&0.0)
        .abs()
        .max(sorted.last().unwrap_or(&0.0).abs());
    if !(s_n > 4.0 * f64::EPSILON * extent) {
        return Err(Error::DegenerateSample);
    }
    Ok((mean, s_n))
}

pub fn standardize(sample: &Sample) -> Result<StandardizedSample> {
    standardize_with(sample, ScaleEstimator::Population)
}

pub fn standardize_with(sample: &Sample, scale: ScaleEstimator) -> Result<StandardizedSample> {
    let mut sorted = sample.values().to_vec();
    sorted.sort_by(f64::total_cmp);
    let (mean, s_n) = moments_with(&sorted, scale)?;
    Ok(StandardizedSample {
        y: sample.values().iter().map(|x| (x - mean) / s_n).collect(),
        mean,
        s_n,
        n: sample.len(),
    })
}

/// Every intermediate of the stepwise evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TcvmResult {
    pub t_star: f64,
    pub t_centered: f64,
    pub n: usize,
    pub a_n: f64,
    pub c_n: f64,
    /// Observations deleted on the left.
    pub k: usize,
    /// Observations retained inside the window.
    pub m: usize,
    /// `-a_n`, the standardized retained order statistics, `a_n`.
    pub tilde_y: Vec<f64>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

/// Per-n constants of the statistic, computed once and reused across
/// replications.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TcvmKernel {
    pub endpoint: Endpoint,
    pub c_n: f64,
    pub d_n: f64,
    pub cfg: QuadratureConfig,
    pub scale: ScaleEstimator,
}

impl TcvmKernel {
    pub fn new(n: usize, cfg: &QuadratureConfig) -> Result<Self> {
        Self::with_scale(n, cfg, ScaleEstimator::Population)
    }

    pub fn with_scale(n: usize, cfg: &QuadratureConfig, scale: ScaleEstimator) -> Result<Self> {
        cfg.validate()?;
        if n < MIN_SAMPLE_SIZE {
            return Err(Error::TooFewObservations {
                required: MIN_SAMPLE_SIZE,
                got: n,
            });
        }
        Ok(Self {
            endpoint: normal::endpoint(n)?,
            c_n: normal::c_n(n, cfg)?,
            d_n: normal::d_n(n, cfg)?,
            cfg: *cfg,
            scale,
        })
    }

    pub fn n(&self) -> usize {
        self.endpoint.n
    }

    fn check_len(&self, got: usize) -> Result<()> {
        if got != self.n() {
            return Err(Error::Domain(format!(
                "kernel built for n = {}, sample has {got} observations",
                self.n()
            )));
        }
        Ok(())
    }

    pub fn evaluate(&self, sample: &Sample) -> Result<TcvmResult> {
        self.check_len(sample.len())?;
        let mut sorted = sample.values().to_vec();
        sorted.sort_by(f64::total_cmp);
        self.evaluate_sorted(&sorted)
    }

    /// Stepwise evaluation on values already sorted ascending.
    pub fn evaluate_sorted(&self, sorted: &[f64]) -> Result<TcvmResult> {
        self.check_len(sorted.len())?;
        let n = self.n();
        let a_n = self.endpoint.a_n;
        let (mean, s_n) = moments_with(sorted, self.scale)?;
        let lower = mean - a_n * s_n;
        let upper = mean + a_n * s_n;

        let k = sorted.iter().take_while(|&&x| x <= lower).count();
        let retained = sorted[k..].iter().take_while(|&&x| x < upper);

        let mut tilde_y = Vec::with_capacity(n + 2);
        tilde_y.push(-a_n);
        // rounding may put a standardized point a hair outside the window
        tilde_y.extend(retained.map(|x| ((x - mean) / s_n).clamp(-a_n, a_n)));
        tilde_y.push(a_n);
        let m = tilde_y.len() - 2;

        let mut a = Vec::with_capacity(m + 1);
        let mut b = Vec::with_capacity(m + 1);
        let mut sum = Neumaier::default();
        let nf = n as f64;
        for (j, w) in tilde_y.windows(2).enumerate() {
            let (aj, bj) = if w[1] > w[0] {
                (
                    normal::int_recip_pdf(w[0], w[1], &self.cfg)?,
                    normal::int_cdf_over_pdf(w[0], w[1], &self.cfg)?,
                )
            } else {
                (0.0, 0.0)
            };
            let jk = (j + k) as f64;
            sum.add(jk * jk * aj / nf);
            sum.add(-2.0 * jk * bj);
            a.push(aj);
            b.push(bj);
        }
        sum.add(self.c_n);
        let t_star = sum.total();

        Ok(TcvmResult {
            t_star,
            t_centered: t_star - self.d_n,
            n,
            a_n,
            c_n: self.c_n,
            k,
            m,
            tilde_y,
            a,
            b,
        })
    }

    /// `T_n*` by quadrature of `b̂_n(x)² / φ(x)` piece by piece.
    pub fn evaluate_direct(&self, sample: &Sample) -> Result<f64> {
        self.check_len(sample.len())?;
        let n = self.n() as f64;
        let a_n = self.endpoint.a_n;
        let y = standardize_with(sample, self.scale)?.sorted();

        let mut breaks = vec![-a_n];
        breaks.extend(y.iter().copied().filter(|&v| v > -a_n && v < a_n));
        if -a_n < 0.0 && !breaks.contains(&0.0) {
            breaks.push(0.0);
        }
        breaks.push(a_n);
        breaks.sort_by(f64::total_cmp);

        let mut total = Neumaier::default();
        for w in breaks.windows(2) {
            if w[1] <= w[0] {
                continue;
            }
            let integrand = |x: f64| {
                let count = y.iter().filter(|&&v| v <= x).count() as f64;
                let gap = count / n - normal::cdf(x);
                n * gap * gap * normal::recip_pdf(x)
            };
            total.add(integrate(integrand, w[0], w[1], &self.cfg)?);
        }
        Ok(total.total())
    }
}

/// Stepwise `T_n*` with a freshly computed kernel.
pub fn compute_tstar(sample: &Sample, cfg: &QuadratureConfig) -> Result<TcvmResult> {
    TcvmKernel::new(sample.len(), cfg)?.evaluate(sample)
}

/// Direct-quadrature `T_n*`, independent of the stepwise weights.
pub fn compute_tstar_direct(sample: &Sample, cfg: &QuadratureConfig) -> Result<f64> {
    TcvmKernel::new(sample.len(), cfg)?.evaluate_direct(sample)
}

/// Decision of the test at one level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub statistic: f64,
    pub critical_value: f64,
    /// `statistic > critical_value`.
    pub reject: bool,
    pub alpha: f64,
    pub n: usize,
    /// The critical value was interpolated between table rows.
    pub interpolated: bool,
}

impl TestOutcome {
    pub fn decide(
        statistic: f64,
        n: usize,
        alpha: f64,
        table: &CriticalValueTable,
    ) -> Result<Self> {
        let lookup = table.lookup(n, alpha)?;
        Ok(Self {
            statistic,
            critical_value: lookup.value,
            reject: statistic > lookup.value,
            alpha,
            n,
            interpolated: lookup.interpolated,
        })
    }
}

pub fn tcvm_test(sample: &Sample, alpha: f64, table: &CriticalValueTable) -> Result<TestOutcome> {
    tcvm_test_with(sample, alpha, table, &QuadratureConfig::default())
}

pub fn tcvm_test_with(
    sample: &Sample,
    alpha: f64,
    table: &CriticalValueTable,
    cfg: &QuadratureConfig,
) -> Result<TestOutcome> {
    Ok(run_test(sample, alpha, table, cfg)?.1)
}

/// The statistic, standardized with the table's scale estimator, and the
/// decision against the table.
pub fn run_test(
    sample: &Sample,
    alpha: f64,
    table: &CriticalValueTable,
    cfg: &QuadratureConfig,
) -> Result<(TcvmResult, TestOutcome)> {
    // fail on coverage before paying for the statistic
    table.lookup(sample.len(), alpha)?;
    let result = TcvmKernel::with_scale(sample.len(), cfg, table.scale)?.evaluate(sample)?;
    let outcome = TestOutcome::decide(result.t_star, sample.len(), alpha, table)?;
    Ok((result, outcome))
}

/// Compensated summation; the Step-5 sum cancels heavily against `C_n`.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn sample_validation() {
        assert!(matches!(
            Sample::new(vec![1.0, 2.0]),
            Err(Error::TooFewObservations {
                required: 3,
                got: 2
            })
        ));
        assert!(matches!(
            Sample::new(vec![1.0, f64::NAN, 2.0]),
            Err(Error::NonFinite { index: 1 })
        ));
    }

    #[test]
    fn standardize_three_points() {
        let s = standardize(&Sample::new(vec![-1.0, 0.0, 1.0]).unwrap()).unwrap();
        let r = 1.5f64.sqrt();
        assert!((s.y[0] + r).abs() < 1e-15);
        assert_eq!(s.y[1], 0.0);
        assert!((s.y[2] - r).abs() < 1e-15);
    }

    #[test]
    fn standardize_by_hand() {
        let s = standardize(&Sample::new(vec![1.0, 2.0, 3.0, 4.0]).unwrap()).unwrap();
        assert_eq!(s.mean, 2.5);
        assert!((s.s_n - 1.25f64.sqrt()).abs() < 1e-15);
        let want = [-1.5, -0.5, 0.5, 1.5].map(|d| d / 1.25f64.sqrt());
        for (g, w) in s.y.iter().zip(want) {
            assert!((g - w).abs() < 1e-15);
        }
    }

    #[test]
    fn constant_sample_is_degenerate() {
        let s = Sample::new(vec![3.0; 5]).unwrap();
        assert_eq!(standardize(&s), Err(Error::DegenerateSample));
        assert_eq!(
            compute_tstar(&s, &cfg()).unwrap_err(),
            Error::DegenerateSample
        );
    }

    #[test]
    fn grid_shape() {
        let s = Sample::new(vec![0.3, -1.2, 2.2, 0.1, -0.4, 0.9, -2.9, 0.0, 1.4, -0.2]).unwrap();
        let r = compute_tstar(&s, &cfg()).unwrap();
        assert_eq!(r.tilde_y.len(), r.m + 2);
        assert_eq!(r.a.len(), r.m + 1);
        assert_eq!(r.tilde_y[0], -r.a_n);
        assert_eq!(r.tilde_y[r.m + 1], r.a_n);
        assert!(r.tilde_y.windows(2).all(|w| w[0] <= w[1]));
        assert!(r.k + r.m <= r.n);
        // mean 0.02, S_n 1.3325, window ±1.7077 around the mean:
        // -2.9 is deleted on the left, 2.2 on the right
        assert_eq!(r.k, 1);
        assert_eq!(r.m, 8);
    }

    #[test]
    fn empty_interior_grid() {
        // n = 3 has a_3 = 0.4307 and the extremes of [-1, 0, 1] at ±1.2247,
        // so only the middle point survives; pushing it to the edge leaves none.
        let s = Sample::new(vec![-1.0, 0.0, 1.0]).unwrap();
        let r = compute_tstar(&s, &cfg()).unwrap();
        assert_eq!((r.k, r.m), (1, 1));

        let kernel = TcvmKernel::new(4, &cfg()).unwrap();
        // a_4 = 0.6745; y = ±1 for a symmetric two-point sample
        let r = kernel
            .evaluate(&Sample::new(vec![-1.0, -1.0, 1.0, 1.0]).unwrap())
            .unwrap();
        assert_eq!((r.k, r.m), (2, 0));
        let a0 = normal::int_recip_pdf(-r.a_n, r.a_n, &cfg()).unwrap();
        let b0 = normal::int_cdf_over_pdf(-r.a_n, r.a_n, &cfg()).unwrap();
        let want = 4.0 / 4.0 * a0 - 2.0 * 2.0 * b0 + r.c_n;
        assert!((r.t_star - want).abs() < 1e-12);
    }

    #[test]
    fn stepwise_matches_direct_on_fixed_sample() {
        let s = Sample::new(vec![
            0.41, -1.37, 0.05, 2.31, -0.66, 0.92, -0.14, 1.58, -2.02, 0.27, 0.74, -0.88,
        ])
        .unwrap();
        let step = compute_tstar(&s, &cfg()).unwrap().t_star;
        let direct = compute_tstar_direct(&s, &cfg()).unwrap();
        assert!((step - direct).abs() < 1e-8, "{step} vs {direct}");
    }

    #[test]
    fn kernel_rejects_wrong_length() {
        let kernel = TcvmKernel::new(5, &cfg()).unwrap();
        let s = Sample::new(vec![1.0, 2.0, 4.0]).unwrap();
        assert!(matches!(kernel.evaluate(&s), Err(Error::Domain(_))));
    }

    #[test]
    fn neumaier_recovers_cancellation() {
        let mut s = Neumaier::default();
        for x in [1e16, 1.0, -1e16] {
            s.add(x);
        }
        assert_eq!(s.total(), 1.0);
    }
}
