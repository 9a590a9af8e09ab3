//! Comparison statistics: Shapiro-Wilk, Anderson-Darling, Cramér-von Mises
//! and the Wasserstein-distance test, all with estimated mean and variance.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normal::{self, cdf, sf};
use crate::quadrature::{integrate, QuadratureConfig};
use crate::statistic::{moments, Sample, ScaleEstimator, TcvmKernel};

/// Largest sample the Shapiro-Wilk coefficients are defined for.
pub const SW_MAX_N: usize = 5000;

/// Probabilities are clamped to `[CLAMP, 1 - CLAMP]` before taking logs.
pub const CLAMP: f64 = 1e-15;

/// The tests compared in the power study, in report column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum BaselineKind {
    Tcvm,
    Cvm,
    Bcmr,
    Ad,
    Sw,
}

impl BaselineKind {
    pub const ALL: [BaselineKind; 5] = [Self::Tcvm, Self::Cvm, Self::Bcmr, Self::Ad, Self::Sw];

    pub fn name(self) -> &'static str {
        match self {
            Self::Tcvm => "TCVM",
            Self::Cvm => "CVM",
            Self::Bcmr => "BCMR",
            Self::Ad => "AD",
            Self::Sw => "SW",
        }
    }

    /// Large values reject for every test except Shapiro-Wilk.
    pub fn rejects_upper_tail(self) -> bool {
        !matches!(self, Self::Sw)
    }

    /// Maps a statistic so that large values always mean rejection.
    pub fn orient(self, value: f64) -> f64 {
        if self.rejects_upper_tail() {
            value
        } else {
            -value
        }
    }

    /// Decision against a critical value on the statistic's natural scale.
    pub fn rejects(self, value: f64, critical: f64) -> bool {
        self.orient(value) > self.orient(critical)
    }
}

impl fmt::Display for BaselineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BaselineKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                Error::Domain(format!(
                    "unknown test `{s}` (expected TCVM, CVM, BCMR, AD or SW)"
                ))
            })
    }
}

/// An EDF statistic and whether any probability had to be clamped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdfStatistic {
    pub value: f64,
    pub clamped: bool,
}

/// Ascending standardized values of `sample`.
fn standardized_sorted(sample: &Sample) -> Result<Vec<f64>> {
    let mut x = sample.values().to_vec();
    x.sort_by(f64::total_cmp);
    standardize_sorted(&x)
}

fn standardize_sorted(sorted: &[f64]) -> Result<Vec<f64>> {
    let (mean, s_n) = moments(sorted)?;
    Ok(sorted.iter().map(|x| (x - mean) / s_n).collect())
}

/// `Φ(y)` and `1 - Φ(y)`, each clamped away from 0.
fn clamped_tails(y: f64, clamped: &mut bool) -> (f64, f64) {
    let (lo, hi) = (cdf(y), sf(y));
    if lo < CLAMP || hi < CLAMP {
        *clamped = true;
    }
    (lo.max(CLAMP), hi.max(CLAMP))
}

fn anderson_darling_sorted(y: &[f64]) -> EdfStatistic {
    let n = y.len();
    let mut clamped = false;
    let tails: Vec<(f64, f64)> = y.iter().map(|&v| clamped_tails(v, &mut clamped)).collect();
    let mut s = 0.0;
    for i in 0..n {
        let ln_u = tails[i].0.ln();
        let ln_1mu = tails[n - 1 - i].1.ln();
        s += (2 * i + 1) as f64 * (ln_u + ln_1mu);
    }
    EdfStatistic {
        value: -(n as f64) - s / n as f64,
        clamped,
    }
}

fn cramer_von_mises_sorted(y: &[f64]) -> EdfStatistic {
    let n = y.len() as f64;
    let mut clamped = false;
    let mut s = 1.0 / (12.0 * n);
    for (i, &v) in y.iter().enumerate() {
        let (u, _) = clamped_tails(v, &mut clamped);
        let d = u - (2 * i + 1) as f64 / (2.0 * n);
        s += d * d;
    }
    EdfStatistic { value: s, clamped }
}

/// `A² = -n - (1/n) Σ (2i-1) [ln u_i + ln(1 - u_{n+1-i})]`, `u_i = Φ(Y_(i))`.
pub fn anderson_darling(sample: &Sample) -> Result<EdfStatistic> {
    Ok(anderson_darling_sorted(&standardized_sorted(sample)?))
}

/// `W² = 1/(12n) + Σ (u_i - (2i-1)/(2n))²`, `u_i = Φ(Y_(i))`.
pub fn cramer_von_mises(sample: &Sample) -> Result<EdfStatistic> {
    Ok(cramer_von_mises_sorted(&standardized_sorted(sample)?))
}

/// Beyond this |y| the weight `1/φ` overflows; the statistic is reported
/// as infinite.
const FULL_LINE_LIMIT: f64 = 37.0;

/// Width of the tail pieces beyond the extreme observations. The tail
/// integrands decay like `φ(x)/x²`, so ten units is far past double precision.
const TAIL_WIDTH: f64 = 10.0;

fn full_line_sorted(y: &[f64], cfg: &QuadratureConfig) -> Result<f64> {
    let n = y.len();
    let nf = n as f64;
    let first = y[0];
    let last = y[n - 1];
    if first.abs() > FULL_LINE_LIMIT || last.abs() > FULL_LINE_LIMIT {
        return Ok(f64::INFINITY);
    }
    let piece = |j: usize, lo: f64, hi: f64| -> Result<f64> {
        if hi <= lo {
            return Ok(0.0);
        }
        let level = j as f64 / nf;
        let f = move |x: f64| {
            let gap = if j == 0 {
                cdf(x)
            } else if j == n {
                sf(x)
            } else {
                level - cdf(x)
            };
            nf * gap * gap * normal::recip_pdf(x)
        };
        if lo < 0.0 && hi > 0.0 {
            Ok(integrate(f, lo, 0.0, cfg)? + integrate(f, 0.0, hi, cfg)?)
        } else {
            integrate(f, lo, hi, cfg)
        }
    };
    let mut total = piece(0, (first - TAIL_WIDTH).max(-FULL_LINE_LIMIT), first)?;
    for j in 1..n {
        total += piece(j, y[j - 1], y[j])?;
    }
    total += piece(n, last, (last + TAIL_WIDTH).min(FULL_LINE_LIMIT))?;
    Ok(total)
}

/// `∫_ℝ b̂_n(x)² / φ(x) dx`: the weighted statistic without truncation.
pub fn cramer_von_mises_full_line(sample: &Sample, cfg: &QuadratureConfig) -> Result<f64> {
    full_line_sorted(&standardized_sorted(sample)?, cfg)
}

/// Coefficients `a_i` of a Shapiro-Wilk type statistic, ascending order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapiroWilkWeights {
    a: Vec<f64>,
}

fn check_sw_n(n: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::TooFewObservations {
            required: 3,
            got: n,
        });
    }
    if n > SW_MAX_N {
        return Err(Error::Domain(format!(
            "Shapiro-Wilk needs n <= {SW_MAX_N}, got {n}"
        )));
    }
    Ok(())
}

fn blom_scores(n: usize) -> Result<Vec<f64>> {
    let nf = n as f64;
    (1..=n)
        .map(|i| normal::quantile((i as f64 - 0.375) / (nf + 0.25)))
        .collect()
}

fn poly(c: &[f64], u: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * u + ci)
}

impl ShapiroWilkWeights {
    /// `a = m / ||m||` with Blom scores `m_i = Φ⁻¹((i - 3/8)/(n + 1/4))`.
    pub fn normal_scores(n: usize) -> Result<Self> {
        check_sw_n(n)?;
        let m = blom_scores(n)?;
        let norm = m.iter().map(|v| v * v).sum::<f64>().sqrt();
        Ok(Self {
            a: m.iter().map(|v| v / norm).collect(),
        })
    }

    /// Royston's approximation with polynomial corrections to the two
    /// outermost coefficients on each side.
    pub fn royston(n: usize) -> Result<Self> {
        check_sw_n(n)?;
        if n == 3 {
            let r = std::f64::consts::FRAC_1_SQRT_2;
            return Ok(Self {
                a: vec![-r, 0.0, r],
            });
        }
        const C1: [f64; 6] = [0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056];
        const C2: [f64; 6] = [0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633];
        let m = blom_scores(n)?;
        let ssq: f64 = m.iter().map(|v| v * v).sum();
        let u = 1.0 / (n as f64).sqrt();
        let mn = m[n - 1];
        let an = mn / ssq.sqrt() + poly(&C1, u);
        let mut a = vec![0.0; n];
        let outer = if n > 5 { 2 } else { 1 };
        let (phi, an1) = if n > 5 {
            let mn1 = m[n - 2];
            let an1 = mn1 / ssq.sqrt() + poly(&C2, u);
            let phi =
                (ssq - 2.0 * mn * mn - 2.0 * mn1 * mn1) / (1.0 - 2.0 * an * an - 2.0 * an1 * an1);
            (phi, an1)
        } else {
            ((ssq - 2.0 * mn * mn) / (1.0 - 2.0 * an * an), 0.0)
        };
        let root = phi.sqrt();
        for i in outer..n - outer {
            a[i] = m[i] / root;
        }
        a[n - 1] = an;
        a[0] = -an;
        if outer == 2 {
            a[n - 2] = an1;
            a[1] = -an1;
        }
        Ok(Self { a })
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.a
    }

    /// `W = (Σ a_i y_(i))² / Σ y_i²` on standardized ascending values.
    fn statistic_standardized(&self, y: &[f64]) -> f64 {
        let num: f64 = self.a.iter().zip(y).map(|(a, v)| a * v).sum();
        let ss: f64 = y.iter().map(|v| v * v).sum();
        (num * num / ss).min(1.0)
    }

    pub fn statistic(&self, sample: &Sample) -> Result<f64> {
        if sample.len() != self.a.len() {
            return Err(Error::Domain(format!(
                "weights built for n = {}, sample has {}",
                self.a.len(),
                sample.len()
            )));
        }
        Ok(self.statistic_standardized(&standardized_sorted(sample)?))
    }
}

/// Shapiro-Wilk W with normal-score weights.
pub fn shapiro_wilk(sample: &Sample) -> Result<f64> {
    ShapiroWilkWeights::normal_scores(sample.len())?.statistic(sample)
}

/// Shapiro-Wilk W with Royston's corrected coefficients.
pub fn shapiro_wilk_royston(sample: &Sample) -> Result<f64> {
    ShapiroWilkWeights::royston(sample.len())?.statistic(sample)
}

/// Weights `H_i = ∫_{(i-1)/n}^{i/n} Φ⁻¹(t) dt` of the Wasserstein statistic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BcmrWeights {
    h: Vec<f64>,
}

impl BcmrWeights {
    pub fn new(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::TooFewObservations {
                required: 3,
                got: n,
            });
        }
        let nf = n as f64;
        let h = (1..=n)
            .map(|i| normal::int_quantile((i - 1) as f64 / nf, i as f64 / nf))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { h })
    }

    pub fn weights(&self) -> &[f64] {
        &self.h
    }

    fn statistic_standardized(&self, y: &[f64]) -> f64 {
        let s: f64 = self.h.iter().zip(y).map(|(h, v)| h * v).sum();
        1.0 - s * s
    }
}

/// `R_n = 1 - (Σ Y_(i) H_i)²`: the squared L2-Wasserstein distance between
/// the standardized sample and N(0, 1), relative to the sample variance.
pub fn bcmr(sample: &Sample) -> Result<f64> {
    let y = standardized_sorted(sample)?;
    Ok(BcmrWeights::new(sample.len())?.statistic_standardized(&y))
}

/// All five statistics at one sample size, with weights precomputed.
#[derive(Debug, Clone)]
pub struct StatisticSuite {
    n: usize,
    tcvm: TcvmKernel,
    sw: ShapiroWilkWeights,
    bcmr: BcmrWeights,
    cfg: QuadratureConfig,
    scale: ScaleEstimator,
}

impl StatisticSuite {
    pub fn new(n: usize, cfg: &QuadratureConfig) -> Result<Self> {
        Self::with_scale(n, cfg, ScaleEstimator::Population)
    }

    /// `scale` applies to the two weighted integrals of `b̂_n²` (TCVM and
    /// CVM). AD, SW and BCMR keep their standard divisor-n forms.
    pub fn with_scale(n: usize, cfg: &QuadratureConfig, scale: ScaleEstimator) -> Result<Self> {
        Ok(Self {
            n,
            tcvm: TcvmKernel::with_scale(n, cfg, scale)?,
            sw: ShapiroWilkWeights::normal_scores(n)?,
            bcmr: BcmrWeights::new(n)?,
            cfg: *cfg,
            scale,
        })
    }

    pub fn scale(&self) -> ScaleEstimator {
        self.scale
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn tcvm_kernel(&self) -> &TcvmKernel {
        &self.tcvm
    }

    /// Evaluates each of `kinds` on raw values (any order), returning the
    /// statistics on their natural scales in the same order.
    pub fn evaluate(&self, kinds: &[BaselineKind], values: &[f64]) -> Result<Vec<f64>> {
        if values.len() != self.n {
            return Err(Error::Domain(format!(
                "suite built for n = {}, sample has {}",
                self.n,
                values.len()
            )));
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let y = standardize_sorted(&sorted)?;
        let y_weighted: Vec<f64> = match self.scale {
            ScaleEstimator::Population => y.clone(),
            ScaleEstimator::Unbiased => {
                let shrink = ((self.n - 1) as f64 / self.n as f64).sqrt();
                y.iter().map(|v| v * shrink).collect()
            }
        };
        kinds
            .iter()
            .map(|kind| match kind {
                BaselineKind::Tcvm => Ok(self.tcvm.evaluate_sorted(&sorted)?.t_star),
                BaselineKind::Cvm => full_line_sorted(&y_weighted, &self.cfg),
                BaselineKind::Bcmr => Ok(self.bcmr.statistic_standardized(&y)),
                BaselineKind::Ad => Ok(anderson_darling_sorted(&y).value),
                BaselineKind::Sw => Ok(self.sw.statistic_standardized(&y)),
            })
            .collect()
    }
}
