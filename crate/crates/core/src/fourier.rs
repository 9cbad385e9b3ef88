//! Inversion of characteristic-function-type transforms on the half line.
//!
//! For a kernel `K` with `K(-z) = conj(K(z))` the engine evaluates
//!
//! ```text
//! (1/2π) ∫_{-∞}^{∞} e^{-izy} K(z) dz = (1/π) ∫_0^∞ Re[e^{-izy} K(z)] dz
//! ```
//!
//! by summing fixed-width panels (adaptive Gauss–Kronrod inside each) in a
//! fixed order. The tail is truncated once the envelope `|K|` has fallen by
//! the configured floor and a power-law envelope bound on the remainder is
//! below tolerance. Kernels whose envelope decays too slowly for direct
//! summation switch to half-period panels accelerated by Wynn's epsilon
//! algorithm.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quad::{adaptive_gk, gk15, wynn_epsilon};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversionOptions {
    pub rel_tol: f64,
    /// Envelope ratio `|K(z_max)| / peak` required before truncating.
    pub envelope_floor: f64,
    /// Direct panels summed before the slow-decay switch is considered.
    pub extrapolation_after: usize,
    pub max_panels: usize,
    pub max_extrapolation_panels: usize,
    /// Also integrate over negative z and report the imaginary residue.
    pub check_symmetry: bool,
}

impl Default for InversionOptions {
    fn default() -> Self {
        InversionOptions {
            rel_tol: 1e-10,
            envelope_floor: 1e-14,
            extrapolation_after: 48,
            max_panels: 200_000,
            max_extrapolation_panels: 800,
            check_symmetry: false,
        }
    }
}

/// Record of how an inversion was carried out.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InversionGrid {
    /// Tilt λ of the transform, when the caller used one.
    pub lambda: f64,
    pub t: f64,
    pub z_max: f64,
    pub panel_width: f64,
    pub rel_tol: f64,
    pub underflow_floor: f64,
    pub panels: usize,
    pub extrapolated: bool,
    pub tail_bound: f64,
    /// |Im| / |Re| of the full-line integral, when symmetry was checked.
    pub imag_ratio: Option<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct Inversion {
    pub value: f64,
    pub grid: InversionGrid,
}

/// `(1/π) ∫_0^∞ Re[e^{-izy} K(z)] dz` for `y > 0`.
pub fn invert<K>(kernel: K, y: f64, opts: &InversionOptions) -> Result<Inversion>
where
    K: Fn(f64) -> Complex64,
{
    if !(y > 0.0) || !y.is_finite() {
        return Err(Error::domain(format!("inversion abscissa must be positive, got {y}")));
    }
    let sym = opts.check_symmetry;
    // integrand over [0, ∞) whose integral equals 2π × (target value)
    let integrand = |z: f64| -> Complex64 {
        let phase = Complex64::new(0.0, -z * y).exp();
        let k = kernel(z);
        if sym {
            phase * k + phase.conj() * kernel(-z)
        } else {
            Complex64::new(2.0 * (phase * k).re, 0.0)
        }
    };
    let envelope = |z: f64| kernel(z).norm();

    let width = PI / y.max(1.0);
    let mut peak = envelope(0.0).max(f64::MIN_POSITIVE);
    let mut total = Complex64::new(0.0, 0.0);
    let mut l1 = 0.0;
    let (first_guess, _) = gk15(&mut |z| integrand(z), 0.0, width);
    let mut scale = first_guess.norm().max(f64::MIN_POSITIVE);

    let mut z = 0.0;
    let mut panels = 0usize;
    let mut tail_bound;
    loop {
        let z1 = z + width;
        let tol = 0.02 * opts.rel_tol * scale;
        let piece = adaptive_gk(&integrand, z, z1, tol, 400)?;
        total += piece.value;
        let env1 = envelope(z1);
        let env_half = envelope(0.5 * z1);
        peak = peak.max(env1).max(env_half);
        l1 += width * 0.5 * (env1 + envelope(z));
        scale = scale.max(total.norm());
        z = z1;
        panels += 1;

        let value = total.re / (2.0 * PI);
        let target = opts.rel_tol * value.abs().max(1e-6 * l1 / PI);
        if env1 == 0.0 {
            tail_bound = 0.0;
            break;
        }
        let slope = if env_half > 0.0 { (env_half / env1).ln() / std::f64::consts::LN_2 } else { f64::INFINITY };
        tail_bound = if slope > 1.05 { env1 * z1 / ((slope - 1.0) * PI) } else { f64::INFINITY };
        if env1 <= opts.envelope_floor * peak && tail_bound <= target {
            break;
        }
        let slow = slope <= 3.0 || panels >= opts.max_panels / 2;
        if panels >= opts.extrapolation_after && slow && env1 <= 1e-2 * peak {
            return extrapolate(&integrand, y, z, total, panels, peak, l1, width, opts);
        }
        if panels >= opts.max_panels {
            return Err(Error::ConvergenceFailure(format!(
                "inversion at y = {y}: {panels} panels reached z = {z}, envelope ratio {:e}",
                env1 / peak
            )));
        }
    }
    let value = total.re / (2.0 * PI);
    Ok(Inversion {
        value,
        grid: InversionGrid {
            lambda: f64::NAN,
            t: f64::NAN,
            z_max: z,
            panel_width: width,
            rel_tol: opts.rel_tol,
            underflow_floor: opts.envelope_floor,
            panels,
            extrapolated: false,
            tail_bound,
            imag_ratio: sym.then(|| total.im.abs() / total.re.abs().max(f64::MIN_POSITIVE)),
        },
    })
}

#[allow(clippy::too_many_arguments)]
fn extrapolate<F>(
    integrand: &F,
    y: f64,
    z_start: f64,
    start: Complex64,
    direct_panels: usize,
    peak: f64,
    l1: f64,
    width: f64,
    opts: &InversionOptions,
) -> Result<Inversion>
where
    F: Fn(f64) -> Complex64,
{
    const WINDOW: usize = 40;
    let half_period = PI / y;
    let mut re_sums = vec![start.re];
    let mut im_sums = vec![start.im];
    let mut total = start;
    let mut z = z_start;
    let mut previous = f64::NAN;
    let mut scale = start.norm().max(f64::MIN_POSITIVE);
    for k in 0..opts.max_extrapolation_panels {
        let z1 = z + half_period;
        let piece = adaptive_gk(integrand, z, z1, 0.01 * opts.rel_tol * scale, 400)?;
        total += piece.value;
        scale = scale.max(total.norm());
        re_sums.push(total.re);
        im_sums.push(total.im);
        z = z1;
        if k < 6 {
            continue;
        }
        let lo = re_sums.len().saturating_sub(WINDOW);
        let (est, err) = wynn_epsilon(&re_sums[lo..]);
        let combined = err.max((est - previous).abs());
        previous = est;
        let value = est / (2.0 * PI);
        let target = opts.rel_tol * value.abs().max(1e-6 * l1 / PI);
        if combined / (2.0 * PI) <= target {
            let imag_ratio = opts.check_symmetry.then(|| {
                let (im_est, _) = wynn_epsilon(&im_sums[lo..]);
                im_est.abs() / est.abs().max(f64::MIN_POSITIVE)
            });
            return Ok(Inversion {
                value,
                grid: InversionGrid {
                    lambda: f64::NAN,
                    t: f64::NAN,
                    z_max: z,
                    panel_width: width,
                    rel_tol: opts.rel_tol,
                    underflow_floor: opts.envelope_floor,
                    panels: direct_panels + k + 1,
                    extrapolated: true,
                    tail_bound: combined / (2.0 * PI),
                    imag_ratio,
                },
            });
        }
    }
    Err(Error::ConvergenceFailure(format!(
        "epsilon extrapolation at y = {y} did not settle after {} half-periods (peak envelope {peak:e})",
        opts.max_extrapolation_panels
    )))
}
