//! Saddle-point equation ψ'(ρ) = x/t, the local density estimate, regime
//! classification and norming functions.

use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{ExponentValues, SubordinatorSpec};
use crate::scaled::Scaled;
use crate::special::ln_normal_pdf;

/// Below this value of tH the local estimates are flagged pre-asymptotic.
pub const PRE_ASYMPTOTIC_TH: f64 = 3.0;

const MAX_BISECTION_STEPS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SaddlePoint {
    pub t: f64,
    pub x: f64,
    pub x_t: f64,
    pub rho: f64,
    pub exps: ExponentValues,
    /// √t·σ(ρ)
    pub s_t: f64,
    #[serde(rename = "tH")]
    pub t_h: f64,
    pub x_rho: f64,
    pub residual: f64,
}

impl SaddlePoint {
    pub fn pre_asymptotic(&self) -> bool {
        self.t_h < PRE_ASYMPTOTIC_TH
    }
}

/// Solves ψ'(u) = target by geometric bisection. ψ' is strictly decreasing
/// from μ at 0+ to b at ∞.
pub fn solve_psi_prime(spec: &SubordinatorSpec, target: f64) -> Result<f64> {
    let b = spec.drift();
    let mu = spec.mean_mu();
    if !(target > b && target < mu) {
        return Err(Error::OutOfRegime { x_t: target, b, mu });
    }
    let (mut lo, mut hi) = (1.0_f64, 1.0_f64);
    if spec.psi_prime(1.0) > target {
        while spec.psi_prime(hi) > target {
            lo = hi;
            hi *= 2.0;
            if hi > 1e300 {
                return Err(Error::ConvergenceFailure(format!("no upper bracket for psi' = {target}")));
            }
        }
    } else {
        while spec.psi_prime(lo) <= target {
            hi = lo;
            lo *= 0.5;
            if lo < 1e-300 {
                return Err(Error::ConvergenceFailure(format!("no lower bracket for psi' = {target}")));
            }
        }
    }
    // invariant: psi'(lo) > target >= psi'(hi)
    for _ in 0..MAX_BISECTION_STEPS {
        let mid = lo * (hi / lo).sqrt();
        if mid <= lo || mid >= hi {
            break;
        }
        if spec.psi_prime(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let rho = if (spec.psi_prime(lo) - target).abs() < (spec.psi_prime(hi) - target).abs() { lo } else { hi };
    let residual = (spec.psi_prime(rho) - target).abs();
    if residual > 1e-12 * target.max(1.0) {
        return Err(Error::ConvergenceFailure(format!(
            "saddle point residual {residual:e} exceeds tolerance at x/t = {target}"
        )));
    }
    Ok(rho)
}

pub fn solve_rho(spec: &SubordinatorSpec, t: f64, x: f64) -> Result<SaddlePoint> {
    if !(t > 0.0 && t.is_finite()) || !(x > 0.0 && x.is_finite()) {
        return Err(Error::domain(format!("t and x must be positive and finite, got t={t}, x={x}")));
    }
    let x_t = x / t;
    let rho = solve_psi_prime(spec, x_t)?;
    let exps = spec.psi_suite(rho)?;
    Ok(SaddlePoint {
        t,
        x,
        x_t,
        rho,
        exps,
        s_t: (t * exps.sigma2).sqrt(),
        t_h: t * exps.h,
        x_rho: x * rho,
        residual: (exps.psi_prime - x_t).abs(),
    })
}

/// f̂_t(z) = φ((z−x)/s_t) e^{−tH(ρ)} e^{ρ(z−x)} / s_t with ρ solved at the
/// anchor x.
pub fn density_estimate(spec: &SubordinatorSpec, t: f64, x_anchor: f64, z: f64) -> Result<Scaled> {
    let sp = solve_rho(spec, t, x_anchor)?;
    density_estimate_at(&sp, z)
}

pub fn density_estimate_at(sp: &SaddlePoint, z: f64) -> Result<Scaled> {
    if !(z > 0.0) {
        return Err(Error::domain(format!("evaluation point must be positive, got {z}")));
    }
    let d = z - sp.x;
    // ln s_t = ½(ln t + ln σ²) keeps precision when σ² is extreme
    let ln_s = 0.5 * (sp.t.ln() + sp.exps.sigma2.ln());
    Ok(Scaled::from_ln(ln_normal_pdf(d / sp.s_t) - sp.t_h + sp.rho * d - ln_s))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Regime {
    #[serde(rename = "SC0_I")]
    Sc0I,
    #[serde(rename = "SC0_II")]
    Sc0II,
    #[serde(rename = "SCinf")]
    ScInf,
    G,
    Indeterminate,
}

/// Finite-grid proxy for a limsup condition: ratio samples over six decades
/// toward an endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimsupProxy {
    pub max: f64,
    pub at_edge: f64,
    /// Growth of log10(ratio) per decade over the last three decades.
    pub growth_per_decade: f64,
    pub bounded: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeReport {
    pub labels: Vec<Regime>,
    #[serde(rename = "tH")]
    pub t_h: f64,
    pub x_rho: f64,
    pub c_t: f64,
    pub b_t: f64,
    pub c_t_at_bracket_edge: bool,
    pub sc00_ratio: f64,
    pub sc_at_zero: LimsupProxy,
    pub sc_at_infinity: LimsupProxy,
    pub sc00_at_zero: LimsupProxy,
    pub sc00_at_infinity: LimsupProxy,
    pub non_lattice: bool,
    pub pre_asymptotic: bool,
}

const LIMSUP_BOUND: f64 = 1e3;
const LIMSUP_GROWTH: f64 = 0.05;

fn limsup_proxy<F: Fn(f64) -> f64>(ratio: F, toward_zero: bool) -> LimsupProxy {
    let n = 25;
    let ys: Vec<f64> = (0..n)
        .map(|i| {
            let e = 6.0 * i as f64 / (n - 1) as f64;
            if toward_zero { 10f64.powf(-e) } else { 10f64.powf(e) }
        })
        .collect();
    let vals: Vec<f64> = ys.iter().map(|&y| ratio(y)).collect();
    let max = vals.iter().cloned().fold(0.0, f64::max);
    let at_edge = vals[n - 1];
    let from = vals[n - 1 - 12];
    let growth = if at_edge > 0.0 && from > 0.0 && at_edge.is_finite() {
        (at_edge.log10() - from.log10()) / 3.0
    } else if at_edge.is_finite() {
        0.0
    } else {
        f64::INFINITY
    };
    LimsupProxy {
        max,
        at_edge,
        growth_per_decade: growth,
        bounded: max.is_finite() && at_edge <= LIMSUP_BOUND && growth <= LIMSUP_GROWTH,
    }
}

fn sc_ratio(spec: &SubordinatorSpec, y: f64) -> f64 {
    let tail = spec.tail(y).unwrap_or(f64::NAN);
    let k = spec.k_pi(y).unwrap_or(f64::NAN);
    if k > 0.0 { tail / k } else { f64::INFINITY }
}

/// y(b + ∫_0^y zΠ(dz)) / ∫_0^y z²Π(dz)
pub fn sc00_quotient(spec: &SubordinatorSpec, y: f64) -> f64 {
    let m1 = spec.truncated_moment(1, y).unwrap_or(f64::NAN);
    let m2 = spec.truncated_moment(2, y).unwrap_or(f64::NAN);
    if m2 > 0.0 { y * (spec.drift() + m1) / m2 } else { f64::INFINITY }
}

pub fn classify_regime(spec: &SubordinatorSpec, t: f64, x: f64) -> Result<RegimeReport> {
    let sp = solve_rho(spec, t, x)?;
    let norming = norming_pair(spec, t)?;
    let b = spec.drift();
    let mu = spec.mean_mu();

    let sc_at_zero = limsup_proxy(|y| sc_ratio(spec, y), true);
    let sc_at_infinity = limsup_proxy(|y| sc_ratio(spec, y), false);
    let sc00_at_zero = limsup_proxy(|y| sc00_quotient(spec, y), true);
    let sc00_at_infinity = limsup_proxy(|y| sc00_quotient(spec, y), false);

    let mut labels = Vec::new();
    let delta = if mu.is_finite() { 0.05 * (mu - b) } else { 0.05 };
    let near_b = sp.x_t <= b + delta;
    if near_b && sp.t_h >= 10.0 && sp.x_rho >= 10.0 && sc_at_zero.bounded {
        labels.push(if t >= 1.0 { Regime::Sc0I } else { Regime::Sc0II });
    }
    if mu.is_infinite() && t >= 1.0 && sp.x_t >= 10.0 && sc_at_infinity.bounded {
        labels.push(Regime::ScInf);
    }
    if mu.is_finite() && spec.non_lattice() && sp.x_t >= b + delta && sp.x_t <= mu - delta {
        labels.push(Regime::G);
    }
    if labels.is_empty() {
        labels.push(Regime::Indeterminate);
    }
    Ok(RegimeReport {
        labels,
        t_h: sp.t_h,
        x_rho: sp.x_rho,
        c_t: norming.c_t,
        b_t: norming.b_t,
        c_t_at_bracket_edge: norming.at_bracket_edge,
        sc00_ratio: sc00_quotient(spec, norming.c_t),
        sc_at_zero,
        sc_at_infinity,
        sc00_at_zero,
        sc00_at_infinity,
        non_lattice: spec.non_lattice(),
        pre_asymptotic: sp.pre_asymptotic(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormingPair {
    pub c_t: f64,
    pub b_t: f64,
    /// t·Q_Π never reached 1; `c_t` is the edge of the search bracket.
    pub at_bracket_edge: bool,
}

/// c(t) solving t·Q_Π(c) = 1 and 𝐛(t) = t(b + ∫_0^{c} yΠ(dy)).
pub fn norming_pair(spec: &SubordinatorSpec, t: f64) -> Result<NormingPair> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("t must be positive and finite, got {t}")));
    }
    let g = |c: f64| t * spec.q_pi(c).unwrap_or(f64::NAN) - 1.0;
    let (mut lo, mut hi) = (1.0_f64, 1.0_f64);
    let mut edge = false;
    if g(1.0) > 0.0 {
        while g(hi) > 0.0 {
            lo = hi;
            hi *= 2.0;
            if hi > 1e150 {
                edge = true;
                break;
            }
        }
    } else {
        while g(lo) <= 0.0 {
            hi = lo;
            lo *= 0.5;
            if lo < 1e-150 {
                edge = true;
                break;
            }
        }
    }
    let c = if edge {
        if g(1.0) > 0.0 { hi } else { lo }
    } else {
        for _ in 0..MAX_BISECTION_STEPS {
            let mid = lo * (hi / lo).sqrt();
            if mid <= lo || mid >= hi {
                break;
            }
            if g(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        if g(lo).abs() < g(hi).abs() { lo } else { hi }
    };
    let b_t = t * (spec.drift() + spec.truncated_moment(1, c)?);
    Ok(NormingPair { c_t: c, b_t, at_bracket_edge: edge })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LambdaDiagnostic {
    pub lambda_bar: f64,
    #[serde(rename = "tH")]
    pub t_h: f64,
}

/// Upper bound on the Berry–Esseen type quantity Λ built from the third
/// moment bound of the tilted process.
pub fn lambda_diagnostic(spec: &SubordinatorSpec, t: f64, x: f64) -> Result<LambdaDiagnostic> {
    let sp = solve_rho(spec, t, x)?;
    if sp.x_rho < 1.0 {
        return Err(Error::domain(format!("lambda diagnostic needs x*rho >= 1, got {}", sp.x_rho)));
    }
    let rho = sp.rho;
    let sig2 = sp.exps.sigma2;
    let num = 6.0 * t * spec.q_pi(1.0 / rho)? / rho.powi(3) + 2.0 * t * sig2 / rho;
    Ok(LambdaDiagnostic { lambda_bar: num / (t * sig2).powf(1.5), t_h: sp.t_h })
}

/// Exact first-passage density of the jump part for driftless Stable(1/2)
/// with scale s: s/√(πx)·e^{−s²t²/(4x)}.
pub(crate) fn ln_stable_half_hj(s: f64, t: f64, x: f64) -> f64 {
    s.ln() - 0.5 * (PI * x).ln() - s * s * t * t / (4.0 * x)
}
