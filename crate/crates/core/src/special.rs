//! Scalar special functions used across the crate.

use std::f64::consts::PI;

pub use statrs::function::gamma::{gamma, ln_gamma};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

#[inline]
pub fn normal_pdf(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

#[inline]
pub fn ln_normal_pdf(x: f64) -> f64 {
    -0.5 * x * x - 0.5 * (2.0 * PI).ln()
}

/// Φ(x), accurate in both tails.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-x / std::f64::consts::SQRT_2)
}

/// 1 − Φ(x) without cancellation for large positive x.
pub fn normal_sf(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(x / std::f64::consts::SQRT_2)
}

/// Φ(b) − Φ(a) for a < b, choosing the tail that avoids cancellation.
pub fn normal_interval(a: f64, b: f64) -> f64 {
    if a >= 0.0 {
        normal_sf(a) - normal_sf(b)
    } else if b <= 0.0 {
        normal_cdf(b) - normal_cdf(a)
    } else {
        1.0 - normal_cdf(a) - normal_sf(b)
    }
}

/// Exponential integral E1(x) = ∫_x^∞ e^{-s}/s ds for x > 0.
pub fn expint_e1(x: f64) -> f64 {
    if x <= 0.0 {
        return f64::NAN;
    }
    if x.is_infinite() {
        return 0.0;
    }
    if x <= 1.0 {
        // power series
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..200 {
            let kf = k as f64;
            term *= -x / kf;
            let add = -term / kf;
            sum += add;
            if add.abs() < 1e-17 * sum.abs() {
                break;
            }
        }
        -EULER_GAMMA - x.ln() + sum
    } else {
        if x > 745.0 {
            return 0.0;
        }
        expint_e1_scaled(x) * (-x).exp()
    }
}

/// e^x · E1(x) for x > 1, by continued fraction (modified Lentz).
fn expint_e1_scaled(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h
}

/// Lower incomplete gamma γ(k, z) for integer k ≥ 1 and z ≥ 0 (z may be +∞).
pub fn lower_gamma_int(k: u32, z: f64) -> f64 {
    debug_assert!(k >= 1);
    let kf = k as f64;
    let full: f64 = (1..k).map(|j| j as f64).product();
    if z <= 0.0 {
        return 0.0;
    }
    if z.is_infinite() {
        return full;
    }
    if z < kf + 25.0 {
        // z^k e^{-z} Σ z^n / (k (k+1) ... (k+n))
        let mut term = 1.0 / kf;
        let mut sum = term;
        for n in 1..1000 {
            term *= z / (kf + n as f64);
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
        }
        (kf * z.ln() - z).exp() * sum
    } else {
        // (k-1)! [1 - e^{-z} Σ_{j<k} z^j / j!]
        let mut term = 1.0;
        let mut sum = 1.0;
        for j in 1..k {
            term *= z / j as f64;
            sum += term;
        }
        full - full * (-z).exp() * sum
    }
}
