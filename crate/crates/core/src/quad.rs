//! Numerical integration: double-exponential (tanh-sinh) rules for
//! endpoint-singular integrands, adaptive Gauss–Kronrod for smooth pieces,
//! and Wynn's epsilon algorithm for oscillatory tails.

use num_complex::Complex64;
use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

const TS_T_MAX: f64 = 6.0;
const TS_MAX_LEVEL: u32 = 9;

/// Tanh-sinh quadrature of `f` over `[a, b]`.
///
/// The integrand receives `(y, y - a, b - y)`; the two distances are exact
/// even when `y` sits within rounding of an endpoint, so singular factors
/// such as `(b - y)^{-1/2}` can be evaluated without cancellation.
pub fn tanh_sinh<F>(mut f: F, a: f64, b: f64, rel_tol: f64) -> Result<QuadResult>
where
    F: FnMut(f64, f64, f64) -> f64,
{
    tanh_sinh_offset(&mut f, a, b, 0.0, 0.0, rel_tol, TS_MAX_LEVEL)
}

/// Tanh-sinh over `[a, b]` where the distances passed to `f` are measured
/// from `a - off_a` and `b + off_b`.
fn tanh_sinh_offset<F>(
    f: &mut F,
    a: f64,
    b: f64,
    off_a: f64,
    off_b: f64,
    rel_tol: f64,
    max_level: u32,
) -> Result<QuadResult>
where
    F: FnMut(f64, f64, f64) -> f64,
{
    if !(b > a) {
        return Ok(QuadResult { value: 0.0, error: 0.0, evaluations: 0 });
    }
    let half = 0.5 * (b - a);
    let width = b - a;
    let mut evals = 0usize;

    let eval_pair = |t: f64, f: &mut F, evals: &mut usize| -> Result<f64> {
        let u = FRAC_PI_2 * t.sinh();
        let comp = 2.0 / (1.0 + (2.0 * u).exp());
        let sech = 2.0 / (u.exp() + (-u).exp());
        let w = FRAC_PI_2 * t.cosh() * sech * sech;
        let d = half * comp;
        if w == 0.0 || d == 0.0 {
            return Ok(0.0);
        }
        let fr = f(b - d, off_a + (width - d), off_b + d);
        let fl = f(a + d, off_a + d, off_b + (width - d));
        *evals += 2;
        let s = w * (fr + fl);
        if !s.is_finite() {
            return Err(Error::ConvergenceFailure(format!(
                "non-finite integrand near endpoints of [{a}, {b}]"
            )));
        }
        Ok(s)
    };

    let mut h = 1.0;
    let centre = f(a + half, off_a + half, off_b + half);
    evals += 1;
    let mut sum = FRAC_PI_2 * centre;
    let mut j = 1;
    while j as f64 * h <= TS_T_MAX {
        sum += eval_pair(j as f64 * h, f, &mut evals)?;
        j += 1;
    }
    let mut estimate = h * half * sum;
    let mut error = f64::INFINITY;
    for level in 1..=max_level {
        h *= 0.5;
        let mut k = 1;
        while k as f64 * h <= TS_T_MAX {
            sum += eval_pair(k as f64 * h, f, &mut evals)?;
            k += 2;
        }
        let next = h * half * sum;
        error = (next - estimate).abs();
        estimate = next;
        if level >= 3 && error <= rel_tol * estimate.abs() {
            return Ok(QuadResult { value: estimate, error, evaluations: evals });
        }
        if level >= 3 && estimate == 0.0 && error == 0.0 {
            return Ok(QuadResult { value: 0.0, error: 0.0, evaluations: evals });
        }
    }
    Err(Error::ConvergenceFailure(format!(
        "tanh-sinh on [{a}, {b}] stalled at estimate {estimate:e} with error {error:e}"
    )))
}

/// Tanh-sinh with recursive bisection when a panel does not converge.
pub fn integrate<F>(mut f: F, a: f64, b: f64, rel_tol: f64) -> Result<QuadResult>
where
    F: FnMut(f64, f64, f64) -> f64,
{
    fn rec<F: FnMut(f64, f64, f64) -> f64>(
        f: &mut F,
        a: f64,
        b: f64,
        off_a: f64,
        off_b: f64,
        rel_tol: f64,
        depth: u32,
    ) -> Result<QuadResult> {
        match tanh_sinh_offset(f, a, b, off_a, off_b, rel_tol, 6) {
            Ok(r) => Ok(r),
            Err(e) if depth == 0 => Err(e),
            Err(_) => {
                let mid = a + 0.5 * (b - a);
                let left = rec(f, a, mid, off_a, off_b + (b - mid), rel_tol, depth - 1)?;
                let right = rec(f, mid, b, off_a + (mid - a), off_b, rel_tol, depth - 1)?;
                Ok(QuadResult {
                    value: left.value + right.value,
                    error: left.error + right.error,
                    evaluations: left.evaluations + right.evaluations,
                })
            }
        }
    }
    rec(&mut f, a, b, 0.0, 0.0, rel_tol, 14)
}

/// ∫_a^∞ f(y) dy through the map y = a + s/(1-s); `f` receives `(y, y - a)`.
pub fn integrate_half_line<F>(mut f: F, a: f64, rel_tol: f64) -> Result<QuadResult>
where
    F: FnMut(f64, f64) -> f64,
{
    integrate(
        |_s, ds, one_minus_s| {
            let r = ds / one_minus_s;
            let jac = 1.0 / (one_minus_s * one_minus_s);
            if !jac.is_finite() {
                return 0.0;
            }
            let v = f(a + r, r);
            if v == 0.0 {
                0.0
            } else {
                v * jac
            }
        },
        0.0,
        1.0,
        rel_tol,
    )
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One 15-point Kronrod panel; returns (integral, |K15 − G7|).
pub fn gk15<F>(f: &mut F, a: f64, b: f64) -> (Complex64, f64)
where
    F: FnMut(f64) -> Complex64,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for i in 0..7 {
        let dx = h * XGK[i];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        kron += (f1 + f2) * WGK[i];
        if i % 2 == 1 {
            gauss += (f1 + f2) * WG[i / 2];
        }
    }
    (kron * h, ((kron - gauss) * h).norm())
}

#[derive(Debug, Clone, Copy)]
pub struct ComplexQuad {
    pub value: Complex64,
    pub error: f64,
    pub intervals: usize,
}

/// Globally adaptive Gauss–Kronrod (bisect the worst panel until the summed
/// error estimate drops below `abs_tol`).
pub fn adaptive_gk<F>(mut f: F, a: f64, b: f64, abs_tol: f64, max_intervals: usize) -> Result<ComplexQuad>
where
    F: FnMut(f64) -> Complex64,
{
    let (v, e) = gk15(&mut f, a, b);
    let mut panels: Vec<(f64, f64, Complex64, f64)> = vec![(a, b, v, e)];
    let mut total_err = e;
    while total_err > abs_tol {
        if panels.len() >= max_intervals {
            let value: Complex64 = panels.iter().map(|p| p.2).sum();
            return Err(Error::ConvergenceFailure(format!(
                "adaptive Gauss-Kronrod on [{a}, {b}] hit {max_intervals} panels; value {value}, error {total_err:e}"
            )));
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (i, p)| if p.3 > acc.1 { (i, p.3) } else { acc });
        let (lo, hi, _, _) = panels.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // interval exhausted at machine resolution
            break;
        }
        let (v1, e1) = gk15(&mut f, lo, mid);
        let (v2, e2) = gk15(&mut f, mid, hi);
        panels.push((lo, mid, v1, e1));
        panels.push((mid, hi, v2, e2));
        total_err = panels.iter().map(|p| p.3).sum();
    }
    // fixed summation order: left to right
    panels.sort_by(|p, q| p.0.total_cmp(&q.0));
    Ok(ComplexQuad {
        value: panels.iter().map(|p| p.2).sum(),
        error: total_err,
        intervals: panels.len(),
    })
}

/// Real-valued convenience wrapper around [`adaptive_gk`].
pub fn adaptive_gk_real<F>(mut f: F, a: f64, b: f64, abs_tol: f64, max_intervals: usize) -> Result<QuadResult>
where
    F: FnMut(f64) -> f64,
{
    let r = adaptive_gk(|x| Complex64::new(f(x), 0.0), a, b, abs_tol, max_intervals)?;
    Ok(QuadResult { value: r.value.re, error: r.error, evaluations: 15 * (2 * r.intervals - 1) })
}

/// Wynn's epsilon algorithm applied to a sequence of partial sums.
///
/// Returns the highest-order even-column entry on the last diagonal and the
/// distance to the previous even-column entry as an error indicator.
pub fn wynn_epsilon(sums: &[f64]) -> (f64, f64) {
    let n = sums.len();
    if n < 3 {
        let last = *sums.last().unwrap_or(&0.0);
        return (last, f64::INFINITY);
    }
    let mut prev: Vec<f64> = vec![0.0; n + 1];
    let mut cur: Vec<f64> = sums.to_vec();
    let mut estimates = vec![sums[n - 1]];
    let mut k = 0;
    while cur.len() > 1 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let diff = cur[i + 1] - cur[i];
            if diff == 0.0 {
                // exact convergence on this column
                let last = *estimates.last().unwrap();
                return (last, 0.0);
            }
            next.push(prev[i + 1] + 1.0 / diff);
        }
        prev = cur;
        cur = next;
        k += 1;
        if k % 2 == 0 {
            estimates.push(*cur.last().unwrap());
        }
    }
    let m = estimates.len();
    if m < 2 {
        return (estimates[0], f64::INFINITY);
    }
    let best = estimates[m - 1];
    let err = (best - estimates[m - 2]).abs();
    (best, err)
}
