//! Quadrature and normal functions written independently of the crate
//! under test.

use std::f64::consts::{PI, SQRT_2};

fn phi(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

fn big_phi(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

fn inv_phi(p: f64) -> f64 {
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

fn gauss_legendre(order: usize) -> Vec<(f64, f64)> {
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

fn integrate(f: impl Fn(f64) -> f64, lo: f64, hi: f64, width: f64) -> f64 {
    let rule = gauss_legendre(20);
    let panels = ((hi - lo) / width).ceil().max(1.0) as usize;
    let h = (hi - lo) / panels as f64;
    (0..panels)
        .map(|p| {
            let mid = lo + (p as f64 + 0.5) * h;
            0.5 * h
                * rule
                    .iter()
                    .map(|&(x, w)| w * f(mid + 0.5 * h * x))
                    .sum::<f64>()
        })
        .sum()
}

/// `(a_n, C_n)` with `C_n = n ∫_{-a_n}^{a_n} Φ²/φ`.
pub fn endpoint_and_c(n: usize) -> (f64, f64) {
    let a = inv_phi(1.0 - 1.0 / n as f64);
    let c = n as f64 * integrate(|x| big_phi(x).powi(2) / phi(x), -a, a, 0.05);
    (a, c)
}
