//! Alternative distributions for power studies and a small text grammar
//! for naming them, e.g. `LoConN(0.5,4)`, `Tukey(0.14)`, `t(10)`.
//!
//! Parameters may be separated by `,` or `;`.

use std::fmt;
use std::str::FromStr;

use rand::distr::Open01;
use rand::Rng;
use rand_distr::{Beta, ChiSquared, Distribution, StandardNormal, StudentT};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SpecError};
use crate::normal;
use crate::rng::replication_rng;
use crate::statistic::Sample;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// `(1-p) N(0,1) + p N(a,1)`.
    LoConN,
    /// `(1-p) N(0,1) + p N(0,a)`, `a` a variance.
    ScConN,
    /// N(0,1) truncated to `(a, b)`.
    TruncN,
    /// Johnson bounded: `1/(1 + exp(-(Z-γ)/δ))`.
    SB,
    /// Johnson unbounded: `sinh((Z-γ)/δ)`.
    SU,
    /// Symmetric triangle on `[-a, a]`.
    TriangleI,
    /// Decreasing triangle on `[0, a]`.
    TriangleII,
    Unif,
    Beta,
    StudentT,
    Logistic,
    Laplace,
    /// Shape `k`, optional scale.
    Weibull,
    /// `μ + σ|Z|`.
    HalfN,
    ChiSq,
    Lognormal,
    /// Tukey lambda, `Q(u) = (u^λ - (1-u)^λ)/λ`.
    Tukey,
    Normal,
}

impl Family {
    pub const ALL: [Family; 18] = [
        Self::LoConN,
        Self::ScConN,
        Self::TruncN,
        Self::SB,
        Self::SU,
        Self::TriangleI,
        Self::TriangleII,
        Self::Unif,
        Self::Beta,
        Self::StudentT,
        Self::Logistic,
        Self::Laplace,
        Self::Weibull,
        Self::HalfN,
        Self::ChiSq,
        Self::Lognormal,
        Self::Tukey,
        Self::Normal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::LoConN => "LoConN",
            Self::ScConN => "ScConN",
            Self::TruncN => "TruncN",
            Self::SB => "SB",
            Self::SU => "SU",
            Self::TriangleI => "TriangleI",
            Self::TriangleII => "TriangleII",
            Self::Unif => "Unif",
            Self::Beta => "Beta",
            Self::StudentT => "StudentT",
            Self::Logistic => "Logistic",
            Self::Laplace => "Laplace",
            Self::Weibull => "Weibull",
            Self::HalfN => "HalfN",
            Self::ChiSq => "ChiSq",
            Self::Lognormal => "Lognormal",
            Self::Tukey => "Tukey",
            Self::Normal => "Normal",
        }
    }

    fn lookup(name: &str) -> Option<Self> {
        let key: String = name
            .chars()
            .filter(|c| !c.is_whitespace())
            .collect::<String>()
            .to_ascii_lowercase();
        let alias = match key.as_str() {
            "t" | "student" => Some(Self::StudentT),
            "logist" => Some(Self::Logistic),
            "uniform" => Some(Self::Unif),
            "chi2" | "chisquared" => Some(Self::ChiSq),
            "n" | "norm" => Some(Self::Normal),
            "halfnormal" => Some(Self::HalfN),
            "lognorm" => Some(Self::Lognormal),
            _ => None,
        };
        alias.or_else(|| {
            Self::ALL
                .into_iter()
                .find(|f| f.name().to_ascii_lowercase() == key)
        })
    }

    /// Accepted parameter counts, and parameters used when fewer are given.
    fn arity(self) -> (&'static [usize], &'static str, &'static [f64]) {
        match self {
            Self::LoConN | Self::ScConN | Self::TruncN | Self::SB | Self::SU | Self::Beta => {
                (&[2], "2", &[])
            }
            Self::TriangleI | Self::TriangleII | Self::StudentT | Self::ChiSq | Self::Tukey => {
                (&[1], "1", &[])
            }
            Self::Weibull => (&[1, 2], "1 or 2", &[1.0]),
            Self::Unif => (&[0, 2], "0 or 2", &[0.0, 1.0]),
            Self::Logistic | Self::Laplace | Self::HalfN | Self::Lognormal | Self::Normal => {
                (&[0, 2], "0 or 2", &[0.0, 1.0])
            }
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A validated distribution: family plus its full parameter list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlternativeSpec {
    pub family: Family,
    pub params: Vec<f64>,
}

fn domain(family: Family, message: impl Into<String>) -> SpecError {
    SpecError::ParamDomain {
        family: family.name(),
        message: message.into(),
    }
}

impl AlternativeSpec {
    /// Validates arity and parameter domains, filling optional parameters.
    pub fn new(family: Family, params: Vec<f64>) -> Result<Self, SpecError> {
        let (allowed, expected, defaults) = family.arity();
        if !allowed.contains(&params.len()) {
            return Err(SpecError::Arity {
                family: family.name(),
                expected,
                got: params.len(),
            });
        }
        if let Some(bad) = params.iter().find(|p| !p.is_finite()) {
            return Err(domain(family, format!("parameter {bad} is not finite")));
        }
        let full_len = *allowed.iter().max().expect("non-empty");
        let mut params = params;
        let start = params.len();
        params.extend_from_slice(&defaults[start + defaults.len() - full_len..]);

        let p = &params;
        let positive = |i: usize, what: &str| -> Result<(), SpecError> {
            if p[i] > 0.0 {
                Ok(())
            } else {
                Err(domain(
                    family,
                    format!("{what} must be positive, got {}", p[i]),
                ))
            }
        };
        match family {
            Family::LoConN | Family::ScConN => {
                if !(0.0..=1.0).contains(&p[0]) {
                    return Err(domain(
                        family,
                        format!("p must lie in [0, 1], got {}", p[0]),
                    ));
                }
                if family == Family::ScConN {
                    positive(1, "variance a")?;
                }
            }
            Family::TruncN | Family::Unif => {
                if !(p[0] < p[1]) {
                    return Err(domain(
                        family,
                        format!("need a < b, got a = {}, b = {}", p[0], p[1]),
                    ));
                }
                if family == Family::TruncN
                    && !(normal::cdf(p[1]) > normal::cdf(p[0])
                        || normal::sf(p[0]) > normal::sf(p[1]))
                {
                    return Err(domain(
                        family,
                        "interval has no normal mass in double precision",
                    ));
                }
            }
            Family::SB | Family::SU => positive(1, "delta")?,
            Family::TriangleI | Family::TriangleII => positive(0, "a")?,
            Family::Beta => {
                positive(0, "alpha")?;
                positive(1, "beta")?;
            }
            Family::StudentT => positive(0, "degrees of freedom")?,
            Family::ChiSq => positive(0, "degrees of freedom")?,
            Family::Weibull => {
                positive(0, "shape")?;
                positive(1, "scale")?;
            }
            Family::Logistic
            | Family::Laplace
            | Family::HalfN
            | Family::Lognormal
            | Family::Normal => positive(1, "scale")?,
            Family::Tukey => {}
        }
        Ok(Self { family, params })
    }

    /// Closed-form quantile function, where the family has one.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        quantile_fn(self, u)
    }

    /// `n` draws from replication stream 0 of `seed`.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Sample> {
        let mut rng = replication_rng(seed, 0);
        Sample::new(self.draw(&mut rng, n))
    }

    /// `n` draws from `rng`.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(n);
        self.draw_into(rng, n, &mut out);
        out
    }

    /// Replaces the contents of `out` with `n` draws from `rng`.
    pub fn draw_into<R: Rng + ?Sized>(&self, rng: &mut R, n: usize, out: &mut Vec<f64>) {
        out.clear();
        let p = &self.params;
        match self.family {
            Family::LoConN => out.extend((0..n).map(|_| {
                let shift = if rng.random::<f64>() < p[0] {
                    p[1]
                } else {
                    0.0
                };
                shift + rng.sample::<f64, _>(StandardNormal)
            })),
            Family::ScConN => {
                let sd = p[1].sqrt();
                out.extend((0..n).map(|_| {
                    let scale = if rng.random::<f64>() < p[0] { sd } else { 1.0 };
                    scale * rng.sample::<f64, _>(StandardNormal)
                }))
            }
            Family::SB | Family::SU | Family::HalfN | Family::Lognormal | Family::Normal => {
                out.extend((0..n).map(|_| self.from_normal(rng.sample(StandardNormal))))
            }
            Family::Beta => {
                let d = Beta::new(p[0], p[1]).expect("validated parameters");
                out.extend((0..n).map(|_| d.sample(rng)))
            }
            Family::StudentT => {
                let d = StudentT::new(p[0]).expect("validated parameters");
                out.extend((0..n).map(|_| d.sample(rng)))
            }
            Family::ChiSq => {
                let d = ChiSquared::new(p[0]).expect("validated parameters");
                out.extend((0..n).map(|_| d.sample(rng)))
            }
            _ => out.extend((0..n).map(|_| {
                let u: f64 = rng.sample(Open01);
                self.inverse_cdf(u).expect("family has a quantile")
            })),
        }
    }

    /// Monotone transforms of a standard normal draw.
    fn from_normal(&self, z: f64) -> f64 {
        let p = &self.params;
        match self.family {
            Family::SB => 1.0 / (1.0 + (-(z - p[0]) / p[1]).exp()),
            Family::SU => ((z - p[0]) / p[1]).sinh(),
            Family::HalfN => p[0] + p[1] * z.abs(),
            Family::Lognormal => (p[0] + p[1] * z).exp(),
            Family::Normal => p[0] + p[1] * z,
            _ => unreachable!("not a normal transform family"),
        }
    }

    fn inverse_cdf(&self, u: f64) -> Result<f64, SpecError> {
        let p = &self.params;
        let z = |q: f64| normal::quantile(q).expect("probability in (0, 1)");
        Ok(match self.family {
            Family::Unif => p[0] + (p[1] - p[0]) * u,
            Family::Logistic => p[0] + p[1] * (u / (1.0 - u)).ln(),
            Family::Laplace => {
                if u < 0.5 {
                    p[0] + p[1] * (2.0 * u).ln()
                } else {
                    p[0] - p[1] * (2.0 * (1.0 - u)).ln()
                }
            }
            Family::Weibull => p[1] * (-(-u).ln_1p()).powf(1.0 / p[0]),
            Family::Tukey => tukey_quantile(p[0], u),
            Family::TriangleI => {
                let a = p[0];
                if u < 0.5 {
                    -a + a * (2.0 * u).sqrt()
                } else {
                    a - a * (2.0 * (1.0 - u)).sqrt()
                }
            }
            Family::TriangleII => p[0] * (1.0 - (1.0 - u).sqrt()),
            Family::TruncN => truncated_normal_quantile(p[0], p[1], u),
            Family::SB | Family::SU | Family::Lognormal | Family::Normal => self.from_normal(z(u)),
            Family::HalfN => self.from_normal(z(0.5 + 0.5 * u)),
            Family::LoConN | Family::ScConN | Family::Beta | Family::StudentT | Family::ChiSq => {
                return Err(SpecError::NoQuantile(self.family.name()))
            }
        })
    }
}

fn tukey_quantile(lambda: f64, u: f64) -> f64 {
    if lambda == 0.0 {
        (u / (1.0 - u)).ln()
    } else {
        (u.powf(lambda) - (1.0 - u).powf(lambda)) / lambda
    }
}

/// `Φ⁻¹(Φ(a) + u(Φ(b) - Φ(a)))`, worked in the upper tail when the interval
/// lies right of zero so the probabilities keep their precision.
fn truncated_normal_quantile(a: f64, b: f64, u: f64) -> f64 {
    let q = |p: f64| {
        normal::quantile(p.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0)).expect("clamped")
    };
    let x = if a >= 0.0 {
        let (sa, sb) = (normal::sf(a), normal::sf(b));
        -q(sa - u * (sa - sb))
    } else {
        let (fa, fb) = (normal::cdf(a), normal::cdf(b));
        q(fa + u * (fb - fa))
    };
    x.clamp(a, b)
}

/// Quantile function of `spec` at `u ∈ (0, 1)`.
pub fn quantile_fn(spec: &AlternativeSpec, u: f64) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(crate::error::Error::Domain(format!(
            "u must lie in (0, 1), got {u}"
        )));
    }
    Ok(spec.inverse_cdf(u)?)
}

pub fn parse_spec(text: &str) -> Result<AlternativeSpec, SpecError> {
    let text = text.trim();
    let syntax = || SpecError::Syntax(text.to_string());
    let (name, params) = match text.find('(') {
        Some(open) => {
            let inner = text[open + 1..].strip_suffix(')').ok_or_else(syntax)?;
            if inner.contains(['(', ')']) {
                return Err(syntax());
            }
            (&text[..open], Some(inner))
        }
        None => (text, None),
    };
    let name = name.trim();
    if name.is_empty() {
        return Err(syntax());
    }
    let family = Family::lookup(name).ok_or_else(|| SpecError::UnknownFamily(name.to_string()))?;
    let params = match params.map(str::trim) {
        None | Some("") => Vec::new(),
        Some(inner) => inner
            .split([',', ';'])
            .map(|p| p.trim().parse::<f64>().map_err(|_| syntax()))
            .collect::<Result<Vec<_>, _>>()?,
    };
    AlternativeSpec::new(family, params)
}

impl FromStr for AlternativeSpec {
    type Err = SpecError;

    fn from_str(s: &str) -> Result<Self, SpecError> {
        parse_spec(s)
    }
}

impl fmt::Display for AlternativeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.family)?;
        for (i, p) in self.params.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str(")")
    }
}
