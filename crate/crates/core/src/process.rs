//! Empirical processes `b_n`, `b̂_n` and the closed-form moments of their
//! squares, used to cross-check the simulation engine.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::normal::{self, cdf, sf};
use crate::quadrature::{integrate, QuadratureConfig};
use crate::statistic::{standardize, Sample, StandardizedSample};

fn process_at(values: &[f64], x: f64) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let n = values.len() as f64;
    let count = values.iter().filter(|&&v| v <= x).count() as f64;
    (count - n * cdf(x)) / n.sqrt()
}

/// `b_n(x) = (#{X_i <= x} - n Φ(x)) / √n` for data assumed standard normal.
pub fn b_n(values: &[f64], x: f64) -> f64 {
    process_at(values, x)
}

/// `b̂_n(x)`: the same process on the standardized sample.
pub fn b_hat_n(sample: &Sample, x: f64) -> Result<f64> {
    Ok(b_hat_standardized(&standardize(sample)?, x))
}

pub fn b_hat_standardized(std: &StandardizedSample, x: f64) -> f64 {
    process_at(&std.y, x)
}

/// `E b²(x) = Φ(x)(1 - Φ(x))`.
pub fn ebb2(x: f64) -> f64 {
    cdf(x) * sf(x)
}

/// A pair of abscissae, stored as `(min, max)` with `z = Φ(min)`, `t = Φ(max)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentPoint {
    x: f64,
    y: f64,
    z: f64,
    t: f64,
}

impl MomentPoint {
    /// Infinite abscissae are allowed and map to `Φ = 0` or `1`.
    pub fn new(x: f64, y: f64) -> Self {
        let (x, y) = if x <= y { (x, y) } else { (y, x) };
        Self {
            x,
            y,
            z: cdf(x),
            t: cdf(y),
        }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn t(&self) -> f64 {
        self.t
    }
}

/// `Cov(b²(x), b²(y)) = 2 z²(1 - t)²` for the Φ-Brownian bridge.
pub fn cov_b2(p: &MomentPoint) -> f64 {
    let c = p.z * (1.0 - p.t);
    2.0 * c * c
}

/// Limit of `E b_n²(x) b_n²(y)` as `n → ∞`.
pub fn fourth_moment_limit(p: &MomentPoint) -> f64 {
    let (z, t) = (p.z, p.t);
    z * t - t * t * z - 5.0 * t * z * z + 3.0 * t * t * z * z + 2.0 * z * z
}

/// `n` times the finite-sample correction, `z(t-1)(2t + 4z - 6tz - 1)`.
pub fn fourth_moment_correction(p: &MomentPoint) -> f64 {
    let (z, t) = (p.z, p.t);
    z * (t - 1.0) * (2.0 * t + 4.0 * z - 6.0 * t * z - 1.0)
}

/// Exact `E b_n²(x) b_n²(y)` for an iid standard normal sample of size `n`.
pub fn fourth_moment_exact(p: &MomentPoint, n: usize) -> f64 {
    assert!(n >= 1, "fourth moment needs n >= 1");
    fourth_moment_limit(p) + fourth_moment_correction(p) / n as f64
}

/// `∫∫_{[-L, L]²} cov_b2(x, y) / (φ(x) φ(y)) dx dy`.
///
/// By symmetry of the integrand this is `4 ∫_{-L}^{L} (1-Φ(y))²/φ(y) G(y) dy`
/// with `G(y) = ∫_{-L}^{y} Φ(x)²/φ(x) dx`.
pub fn cov_b2_integral(limit: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if !(limit > 0.0) {
        return Ok(0.0);
    }
    let inner = |y: f64| normal::int_cdf_sq_over_pdf(-limit, y, cfg);
    let outer = |y: f64| {
        let s = sf(y);
        // inner quadrature errors surface as NaN and fail the outer integral
        inner(y).map_or(f64::NAN, |g| s * s * normal::recip_pdf(y) * g)
    };
    let half = integrate(outer, -limit, 0.0, cfg)? + integrate(outer, 0.0, limit, cfg)?;
    Ok(4.0 * half)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn b_n_small_cases() {
        assert_eq!(b_n(&[0.0], 0.0), 0.5);
        assert_eq!(b_n(&[0.3, 1.0], -40.0), 0.0);
        let want = (2.0 - 4.0 * cdf(0.5)) / 2.0;
        assert!((b_n(&[-1.0, 0.0, 1.0, 2.0], 0.5) - want).abs() < 1e-15);
    }

    #[test]
    fn b_hat_uses_standardized_values() {
        let s = Sample::new(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        // Y = (-1.342, -0.447, 0.447, 1.342)
        let want = (3.0 - 4.0 * cdf(0.5)) / 2.0;
        assert!((b_hat_n(&s, 0.5).unwrap() - want).abs() < 1e-15);
        let moved = Sample::new(vec![-7.0, -5.0, -3.0, -1.0]).unwrap();
        assert_eq!(b_hat_n(&moved, 0.5).unwrap(), b_hat_n(&s, 0.5).unwrap());
    }

    #[test]
    fn ebb2_values() {
        assert_eq!(ebb2(0.0), 0.25);
        assert_eq!(ebb2(1.3), ebb2(-1.3));
        let p = cdf(1.0);
        assert!((ebb2(1.0) - p * (1.0 - p)).abs() < 1e-16);
    }

    #[test]
    fn moment_point_is_canonical() {
        let p = MomentPoint::new(1.1, 0.3);
        assert_eq!((p.x(), p.y()), (0.3, 1.1));
        assert!(p.z() <= p.t());
        assert_eq!(MomentPoint::new(0.0, f64::INFINITY).t(), 1.0);
    }

    #[test]
    fn cov_b2_values() {
        assert_eq!(cov_b2(&MomentPoint::new(0.0, 0.0)), 0.125);
        assert_eq!(cov_b2(&MomentPoint::new(-0.5, f64::INFINITY)), 0.0);
    }

    #[test]
    fn origin_fourth_moment() {
        let p = MomentPoint::new(0.0, 0.0);
        for n in [1usize, 2, 5, 20, 1000] {
            let want = 3.0 / 16.0 - 1.0 / (8.0 * n as f64);
            assert!((fourth_moment_exact(&p, n) - want).abs() < 1e-15);
        }
    }
}
