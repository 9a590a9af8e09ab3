//! Seeded, parallel Monte Carlo: critical values, power, the centering
//! constant and moment checks.
//!
//! Replication `r` always draws from `replication_rng(seed, r)` and results
//! are gathered in replication order, so every output is a pure function of
//! its arguments whatever the thread count.

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alternatives::AlternativeSpec;
use crate::baselines::{BaselineKind, StatisticSuite};
use crate::error::{Error, Result};
use crate::normal;
use crate::process::{self, MomentPoint};
use crate::quadrature::QuadratureConfig;
use crate::rng::{derive_seed, replication_rng};
use crate::statistic::{ScaleEstimator, TcvmKernel};
use crate::table::{CriticalValueTable, Provenance, TableRow};

/// Smallest replication count accepted for quantile estimates.
pub const MIN_REPS: usize = 100;

/// Smallest replication count accepted by [`verify_fourth_moment`].
pub const MIN_MOMENT_REPS: usize = 10_000;

fn check_reps(reps: usize, min: usize) -> Result<()> {
    if reps < min {
        return Err(Error::Domain(format!(
            "need at least {min} replications, got {reps}"
        )));
    }
    Ok(())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    Ok(())
}

/// 1-based rank `⌈(1-α)·reps⌉`, guarded against `(1-α)·reps` landing a
/// rounding error above an integer.
pub fn quantile_rank(alpha: f64, reps: usize) -> usize {
    let x = (1.0 - alpha) * reps as f64;
    let r = x.round();
    let k = if (x - r).abs() <= 1e-9 * reps as f64 {
        r
    } else {
        x.ceil()
    };
    (k as usize).clamp(1, reps)
}

/// Upper empirical quantile of ascending `sorted`: its `⌈(1-α)·reps⌉`-th value.
pub fn upper_quantile(sorted: &[f64], alpha: f64) -> f64 {
    sorted[quantile_rank(alpha, sorted.len()) - 1]
}

fn standard_normal_draws<R: Rng>(rng: &mut R, n: usize, out: &mut Vec<f64>) {
    out.clear();
    out.extend((0..n).map(|_| rng.sample::<f64, _>(StandardNormal)));
}

/// Simulated null statistics for several tests on shared samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullDistribution {
    pub n: usize,
    pub reps: usize,
    pub seed: u64,
    pub scale: ScaleEstimator,
    pub kinds: Vec<BaselineKind>,
    /// `values[i][r]`: statistic `kinds[i]` on replication `r`, natural scale.
    pub values: Vec<Vec<f64>>,
}

/// Draws `reps` standard normal samples of size `n` and evaluates every kind
/// on each.
pub fn simulate_null(
    kinds: &[BaselineKind],
    n: usize,
    reps: usize,
    seed: u64,
    cfg: &QuadratureConfig,
) -> Result<NullDistribution> {
    simulate_null_with(&StatisticSuite::new(n, cfg)?, kinds, reps, seed)
}

/// [`simulate_null`] with a prepared suite.
pub fn simulate_null_with(
    suite: &StatisticSuite,
    kinds: &[BaselineKind],
    reps: usize,
    seed: u64,
) -> Result<NullDistribution> {
    check_reps(reps, MIN_REPS)?;
    let n = suite.n();
    let rows: Vec<Vec<f64>> = (0..reps as u64)
        .into_par_iter()
        .map_init(Vec::new, |buf, r| {
            let mut rng = replication_rng(seed, r);
            standard_normal_draws(&mut rng, n, buf);
            suite.evaluate(kinds, buf)
        })
        .collect::<Result<_>>()?;
    let values = (0..kinds.len())
        .map(|i| rows.iter().map(|row| row[i]).collect())
        .collect();
    Ok(NullDistribution {
        n,
        reps,
        seed,
        scale: suite.scale(),
        kinds: kinds.to_vec(),
        values,
    })
}

/// Simulated critical values at one `(n, alpha)`, natural scale per test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalValues {
    pub n: usize,
    pub alpha: f64,
    pub reps: usize,
    pub seed: u64,
    pub scale: ScaleEstimator,
    pub values: BTreeMap<BaselineKind, f64>,
}

impl CriticalValues {
    /// Quantiles of the oriented null statistics, mapped back to each
    /// statistic's own scale.
    pub fn from_null(null: &NullDistribution, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        let mut values = BTreeMap::new();
        for (kind, stats) in null.kinds.iter().zip(&null.values) {
            let mut oriented: Vec<f64> = stats.iter().map(|&v| kind.orient(v)).collect();
            oriented.sort_by(f64::total_cmp);
            values.insert(*kind, kind.orient(upper_quantile(&oriented, alpha)));
        }
        Ok(Self {
            n: null.n,
            alpha,
            reps: null.reps,
            seed: null.seed,
            scale: null.scale,
            values,
        })
    }

    pub fn simulate(
        kinds: &[BaselineKind],
        n: usize,
        alpha: f64,
        reps: usize,
        seed: u64,
        cfg: &QuadratureConfig,
    ) -> Result<Self> {
        check_alpha(alpha)?;
        Self::from_null(&simulate_null(kinds, n, reps, seed, cfg)?, alpha)
    }

    pub fn get(&self, kind: BaselineKind) -> Result<f64> {
        self.values.get(&kind).copied().ok_or_else(|| {
            Error::MissingCriticalValue(format!("{kind} at n = {}, alpha = {}", self.n, self.alpha))
        })
    }

    /// Replaces the TCVM entry with the table value at `(n, alpha)`.
    pub fn with_table_tcvm(mut self, table: &CriticalValueTable) -> Result<Self> {
        if table.scale != self.scale {
            return Err(Error::Domain(format!(
                "table uses the {} scale estimator, critical values use {}",
                table.scale, self.scale
            )));
        }
        let v = table.lookup(self.n, self.alpha)?.value;
        self.values.insert(BaselineKind::Tcvm, v);
        Ok(self)
    }
}

/// A simulated table row for `T_n*` at each of `alphas`, with the data
/// standardized by `scale`.
///
/// Replications draw from streams of `derive_seed(seed, n)`, so a row does
/// not depend on which other rows are generated with it.
pub fn estimate_critical_values(
    n: usize,
    alphas: &[f64],
    reps: usize,
    seed: u64,
    cfg: &QuadratureConfig,
    scale: ScaleEstimator,
) -> Result<TableRow> {
    check_reps(reps, MIN_REPS)?;
    for &a in alphas {
        check_alpha(a)?;
    }
    let kernel = TcvmKernel::with_scale(n, cfg, scale)?;
    let row_seed = derive_seed(seed, n as u64);
    let mut stats: Vec<f64> = (0..reps as u64)
        .into_par_iter()
        .map_init(Vec::new, |buf, r| {
            let mut rng = replication_rng(row_seed, r);
            standard_normal_draws(&mut rng, n, buf);
            buf.sort_by(f64::total_cmp);
            kernel.evaluate_sorted(buf).map(|res| res.t_star)
        })
        .collect::<Result<_>>()?;
    stats.sort_by(f64::total_cmp);
    Ok(TableRow {
        n,
        critical: alphas.iter().map(|&a| upper_quantile(&stats, a)).collect(),
        a_n: kernel.endpoint.a_n,
        c_n: kernel.c_n,
    })
}

/// Simulated table over `ns`, one independent row per n.
pub fn estimate_table(
    ns: &[usize],
    alphas: &[f64],
    reps: usize,
    seed: u64,
    cfg: &QuadratureConfig,
    scale: ScaleEstimator,
) -> Result<CriticalValueTable> {
    let rows = ns
        .iter()
        .map(|&n| estimate_critical_values(n, alphas, reps, seed, cfg, scale))
        .collect::<Result<Vec<_>>>()?;
    CriticalValueTable::new(
        alphas.to_vec(),
        rows,
        Provenance::Simulated { reps, seed },
        scale,
    )
}

/// Rejection rates under one alternative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerReport {
    pub spec: String,
    pub n: usize,
    pub alpha: f64,
    pub reps: usize,
    pub seed: u64,
    pub rates: BTreeMap<BaselineKind, f64>,
    /// `√(rate (1 - rate) / reps)`.
    pub se: BTreeMap<BaselineKind, f64>,
}

/// Rejection frequency of each kind on `reps` samples from `spec`; every
/// kind sees the same samples.
#[allow(clippy::too_many_arguments)]
pub fn estimate_power(
    kinds: &[BaselineKind],
    spec: &AlternativeSpec,
    n: usize,
    alpha: f64,
    reps: usize,
    seed: u64,
    critical: &CriticalValues,
    cfg: &QuadratureConfig,
) -> Result<PowerReport> {
    let suite = StatisticSuite::with_scale(n, cfg, critical.scale)?;
    estimate_power_with(&suite, kinds, spec, alpha, reps, seed, critical)
}

/// [`estimate_power`] with a prepared suite.
pub fn estimate_power_with(
    suite: &StatisticSuite,
    kinds: &[BaselineKind],
    spec: &AlternativeSpec,
    alpha: f64,
    reps: usize,
    seed: u64,
    critical: &CriticalValues,
) -> Result<PowerReport> {
    check_reps(reps, 1)?;
    check_alpha(alpha)?;
    let n = suite.n();
    if critical.n != n || (critical.alpha - alpha).abs() > 1e-12 {
        return Err(Error::MissingCriticalValue(format!(
            "critical values are for n = {}, alpha = {}; requested n = {n}, alpha = {alpha}",
            critical.n, critical.alpha
        )));
    }
    if critical.scale != suite.scale() {
        return Err(Error::Domain(format!(
            "critical values use the {} scale estimator, the statistics use {}",
            critical.scale,
            suite.scale()
        )));
    }
    let crits = kinds
        .iter()
        .map(|&k| critical.get(k))
        .collect::<Result<Vec<_>>>()?;
    let decisions: Vec<Vec<bool>> = (0..reps as u64)
        .into_par_iter()
        .map_init(Vec::new, |buf, r| {
            let mut rng = replication_rng(seed, r);
            spec.draw_into(&mut rng, n, buf);
            let stats = suite.evaluate(kinds, buf)?;
            Ok(kinds
                .iter()
                .zip(stats.iter().zip(&crits))
                .map(|(k, (&s, &c))| k.rejects(s, c))
                .collect())
        })
        .collect::<Result<_>>()?;
    let mut rates = BTreeMap::new();
    let mut se = BTreeMap::new();
    for (i, &kind) in kinds.iter().enumerate() {
        let hits = decisions.iter().filter(|d| d[i]).count();
        let rate = hits as f64 / reps as f64;
        rates.insert(kind, rate);
        se.insert(kind, (rate * (1.0 - rate) / reps as f64).sqrt());
    }
    Ok(PowerReport {
        spec: spec.to_string(),
        n,
        alpha,
        reps,
        seed,
        rates,
        se,
    })
}

/// Estimate of the centering constant from the mean of `T_n* - D_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantEstimate {
    pub n: usize,
    pub reps: usize,
    pub seed: u64,
    pub c_hat: f64,
    /// Sample standard deviation of `t_centered`.
    pub sd: f64,
    /// `sd / √reps`.
    pub se: f64,
}

/// `ĉ = mean(t_centered) + 3/2`: the limit law has mean `c - E Z₁² - E Z₂²`
/// with `E Z₁² = 1` and `E Z₂² = 1/2`.
pub fn estimate_constant_c(
    n: usize,
    reps: usize,
    seed: u64,
    cfg: &QuadratureConfig,
) -> Result<ConstantEstimate> {
    check_reps(reps, MIN_REPS)?;
    if n < 100 {
        return Err(Error::Domain(format!(
            "constant estimate needs n >= 100, got {n}"
        )));
    }
    let kernel = TcvmKernel::new(n, cfg)?;
    let centered: Vec<f64> = (0..reps as u64)
        .into_par_iter()
        .map_init(Vec::new, |buf, r| {
            let mut rng = replication_rng(seed, r);
            standard_normal_draws(&mut rng, n, buf);
            buf.sort_by(f64::total_cmp);
            kernel.evaluate_sorted(buf).map(|res| res.t_centered)
        })
        .collect::<Result<_>>()?;
    let (mean, sd) = mean_sd(&centered);
    Ok(ConstantEstimate {
        n,
        reps,
        seed,
        c_hat: mean + 1.5,
        sd,
        se: sd / (reps as f64).sqrt(),
    })
}

/// Mean and (n-1)-divisor standard deviation.
fn mean_sd(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Simulated `E b_n²(x) b_n²(y)` against the closed form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentCheck {
    pub x: f64,
    pub y: f64,
    pub n: usize,
    pub reps: usize,
    pub seed: u64,
    pub empirical: f64,
    pub exact: f64,
    pub std_error: f64,
    pub z: f64,
}

pub fn verify_fourth_moment(
    x: f64,
    y: f64,
    n: usize,
    reps: usize,
    seed: u64,
) -> Result<MomentCheck> {
    check_reps(reps, MIN_MOMENT_REPS)?;
    if n == 0 {
        return Err(Error::Domain("fourth moment needs n >= 1".into()));
    }
    if !x.is_finite() || !y.is_finite() {
        return Err(Error::Domain(format!(
            "abscissae must be finite, got ({x}, {y})"
        )));
    }
    let point = MomentPoint::new(x, y);
    let (lo, hi) = (point.x(), point.y());
    let nf = n as f64;
    let (center_lo, center_hi) = (nf * normal::cdf(lo), nf * normal::cdf(hi));
    let products: Vec<f64> = (0..reps as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = replication_rng(seed, r);
            let (mut below_lo, mut below_hi) = (0usize, 0usize);
            for _ in 0..n {
                let v: f64 = rng.sample(StandardNormal);
                below_lo += (v <= lo) as usize;
                below_hi += (v <= hi) as usize;
            }
            let b_lo = (below_lo as f64 - center_lo) / nf.sqrt();
            let b_hi = (below_hi as f64 - center_hi) / nf.sqrt();
            b_lo * b_lo * b_hi * b_hi
        })
        .collect();
    let (empirical, sd) = mean_sd(&products);
    let std_error = sd / (reps as f64).sqrt();
    let exact = process::fourth_moment_exact(&point, n);
    Ok(MomentCheck {
        x,
        y,
        n,
        reps,
        seed,
        empirical,
        exact,
        std_error,
        z: (empirical - exact) / std_error,
    })
}
