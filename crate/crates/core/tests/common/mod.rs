//! Test-side numerics kept independent of the crate's own quadrature and
//! normal functions.

#![allow(dead_code)]

use std::f64::consts::{PI, SQRT_2};

pub fn phi(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

pub fn big_phi(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

/// `Φ⁻¹(p)` by bisection on `big_phi`.
pub fn inv_phi(p: f64) -> f64 {
    let (mut lo, mut hi) = (-40.0, 40.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if big_phi(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> Vec<(f64, f64)> {
    let n = order as f64;
    (0..order)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (n + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=order {
                    let k = k as f64;
                    let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// Composite Gauss-Legendre on `[lo, hi]` with panels no wider than `width`.
pub fn integrate(f: impl Fn(f64) -> f64, lo: f64, hi: f64, width: f64) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    let rule = gauss_legendre(20);
    let panels = ((hi - lo) / width).ceil().max(1.0) as usize;
    let h = (hi - lo) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let a = lo + p as f64 * h;
        let mid = a + 0.5 * h;
        total += rule
            .iter()
            .map(|&(x, w)| w * f(mid + 0.5 * h * x))
            .sum::<f64>()
            * 0.5
            * h;
    }
    total
}

/// Divisor-`n` or divisor-`(n-1)` standardization, sorted.
pub fn standardized(values: &[f64], divisor_n_minus_1: bool) -> Vec<f64> {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let ss = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>();
    let s = (ss / if divisor_n_minus_1 { n - 1.0 } else { n }).sqrt();
    let mut y: Vec<f64> = values.iter().map(|v| (v - mean) / s).collect();
    y.sort_by(f64::total_cmp);
    y
}

/// `∫_{lo}^{hi} n (F_n(x) - Φ(x))² / φ(x) dx` for sorted `y`, integrating
/// each piece on which the empirical cdf is constant.
pub fn weighted_edf_integral(y: &[f64], lo: f64, hi: f64) -> f64 {
    let n = y.len() as f64;
    let mut cuts = vec![lo];
    cuts.extend(y.iter().copied().filter(|&v| v > lo && v < hi));
    if lo < 0.0 && hi > 0.0 {
        cuts.push(0.0);
    }
    cuts.push(hi);
    cuts.sort_by(f64::total_cmp);
    cuts.windows(2)
        .map(|w| {
            let mid = 0.5 * (w[0] + w[1]);
            let f = y.iter().filter(|&&v| v <= mid).count() as f64 / n;
            integrate(|x| n * (f - big_phi(x)).powi(2) / phi(x), w[0], w[1], 0.1)
        })
        .sum()
}
