//! First-passage estimates: jump and creep densities, interval
//! probabilities, the creep split and the stable-limit predictions.

use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{Kind, SubordinatorSpec};
use crate::oracles;
use crate::saddle::{density_estimate_at, solve_rho, SaddlePoint};
use crate::scaled::Scaled;
use crate::special::gamma;

pub const DEFAULT_DELTA_MAX: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateKind {
    JumpDensity,
    JumpInterval,
    CreepInterval,
    CreepDensity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Warning {
    PreAsymptotic,
    Underflow,
    ZeroDrift,
}

/// Pieces that multiply into a passage estimate, kept in log form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Components {
    /// ln of ψ*(ρ) for jumps, bρ for creeping
    pub ln_numerator: f64,
    /// −tH(ρ)
    pub ln_decay: f64,
    /// −ln(√(2πt)·ρ·σ(ρ))
    pub ln_gauss: f64,
    /// ln((1 − e^{−Δψ(ρ)})/ψ(ρ)) for interval estimates
    pub ln_interval_factor: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PassageEstimate {
    pub kind: EstimateKind,
    pub value: Scaled,
    pub sp: SaddlePoint,
    pub delta: Option<f64>,
    pub components: Option<Components>,
    pub warnings: Vec<Warning>,
}

fn warnings_for(sp: &SaddlePoint, value: &Scaled) -> Vec<Warning> {
    let mut w = Vec::new();
    if sp.pre_asymptotic() {
        w.push(Warning::PreAsymptotic);
    }
    if value.underflow {
        w.push(Warning::Underflow);
    }
    w
}

fn ln_gauss(sp: &SaddlePoint) -> f64 {
    -(0.5 * (2.0 * PI * sp.t).ln() + sp.rho.ln() + 0.5 * sp.exps.sigma2.ln())
}

fn ln_interval_factor(sp: &SaddlePoint, delta: f64, delta_max: f64) -> Result<f64> {
    if !(delta > 0.0 && delta <= delta_max) {
        return Err(Error::domain(format!("delta must lie in (0, {delta_max}], got {delta}")));
    }
    let psi = sp.exps.psi;
    Ok((-(-delta * psi).exp_m1()).ln() - psi.ln())
}

fn build(kind: EstimateKind, sp: SaddlePoint, delta: Option<f64>, comp: Components) -> PassageEstimate {
    let ln = comp.ln_numerator + comp.ln_decay + comp.ln_gauss + comp.ln_interval_factor.unwrap_or(0.0);
    let value = Scaled::from_ln(ln);
    let warnings = warnings_for(&sp, &value);
    PassageEstimate { kind, value, sp, delta, components: Some(comp), warnings }
}

fn zero_drift(kind: EstimateKind, sp: SaddlePoint, delta: Option<f64>) -> PassageEstimate {
    let mut warnings = warnings_for(&sp, &Scaled::zero());
    warnings.push(Warning::ZeroDrift);
    PassageEstimate { kind, value: Scaled::zero(), sp, delta, components: None, warnings }
}

/// ψ*(ρ) e^{−tH(ρ)} / (√(2πt) ρ σ(ρ))
pub fn hj_density(spec: &SubordinatorSpec, t: f64, x: f64) -> Result<PassageEstimate> {
    let sp = solve_rho(spec, t, x)?;
    let comp = Components {
        ln_numerator: sp.exps.psi_star.ln(),
        ln_decay: -sp.t_h,
        ln_gauss: ln_gauss(&sp),
        ln_interval_factor: None,
    };
    Ok(build(EstimateKind::JumpDensity, sp, None, comp))
}

pub fn hj_interval(spec: &SubordinatorSpec, t: f64, x: f64, delta: f64) -> Result<PassageEstimate> {
    hj_interval_with_max(spec, t, x, delta, DEFAULT_DELTA_MAX)
}

pub fn hj_interval_with_max(
    spec: &SubordinatorSpec,
    t: f64,
    x: f64,
    delta: f64,
    delta_max: f64,
) -> Result<PassageEstimate> {
    let sp = solve_rho(spec, t, x)?;
    let comp = Components {
        ln_numerator: sp.exps.psi_star.ln(),
        ln_decay: -sp.t_h,
        ln_gauss: ln_gauss(&sp),
        ln_interval_factor: Some(ln_interval_factor(&sp, delta, delta_max)?),
    };
    Ok(build(EstimateKind::JumpInterval, sp, Some(delta), comp))
}

pub fn hc_interval(spec: &SubordinatorSpec, t: f64, x: f64, delta: f64) -> Result<PassageEstimate> {
    hc_interval_with_max(spec, t, x, delta, DEFAULT_DELTA_MAX)
}

pub fn hc_interval_with_max(
    spec: &SubordinatorSpec,
    t: f64,
    x: f64,
    delta: f64,
    delta_max: f64,
) -> Result<PassageEstimate> {
    let sp = solve_rho(spec, t, x)?;
    let factor = ln_interval_factor(&sp, delta, delta_max)?;
    let b = spec.drift();
    if b == 0.0 {
        return Ok(zero_drift(EstimateKind::CreepInterval, sp, Some(delta)));
    }
    let comp = Components {
        ln_numerator: (b * sp.rho).ln(),
        ln_decay: -sp.t_h,
        ln_gauss: ln_gauss(&sp),
        ln_interval_factor: Some(factor),
    };
    Ok(build(EstimateKind::CreepInterval, sp, Some(delta), comp))
}

/// b·f̂_t(x), the creeping density in t.
pub fn hc_density(spec: &SubordinatorSpec, t: f64, x: f64) -> Result<PassageEstimate> {
    let b = spec.drift();
    if !(x > b * t) {
        return Err(Error::domain(format!("creep density needs x > b*t, got x={x}, b*t={}", b * t)));
    }
    let sp = solve_rho(spec, t, x)?;
    if b == 0.0 {
        return Ok(zero_drift(EstimateKind::CreepDensity, sp, None));
    }
    let value = density_estimate_at(&sp, x)?.scale(b);
    let warnings = warnings_for(&sp, &value);
    Ok(PassageEstimate { kind: EstimateKind::CreepDensity, value, sp, delta: None, components: None, warnings })
}

/// P(creep over x | T_x = t) ≈ bρ/ψ(ρ).
pub fn creep_conditional(spec: &SubordinatorSpec, t: f64, x: f64) -> Result<f64> {
    let sp = solve_rho(spec, t, x)?;
    let b = spec.drift();
    if b == 0.0 {
        return Ok(0.0);
    }
    Ok(1.0 / (1.0 + sp.exps.psi_star / (b * sp.rho)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StableLimitEstimate {
    pub alpha: f64,
    /// c(t) from t·Π̄(c(t)) = 1
    pub c_t: f64,
    pub y_t: f64,
    /// prediction for t·h^J_x(t)
    pub hj_scaled: f64,
    pub ln_hj_scaled: f64,
    /// prediction for c(t)·h^C_x(t, Δ)
    pub hc_scaled: f64,
    pub ln_hc_scaled: f64,
}

/// Limit-process predictions for the stable domain of attraction. The
/// limit has exponent Γ(1−α)λ^α, i.e. tail y^{−α}.
pub fn stable_limit(spec: &SubordinatorSpec, t: f64, x: f64, delta: f64) -> Result<StableLimitEstimate> {
    let (alpha, s) = match spec.kind() {
        Kind::Stable { alpha, s } => (alpha, s),
        _ => return Err(Error::Unsupported("stable limit needs a regularly varying tail".into())),
    };
    if !(t > 0.0 && x > 0.0 && delta > 0.0) {
        return Err(Error::domain("t, x and delta must be positive"));
    }
    let c_t = (t * s / gamma(1.0 - alpha)).powf(1.0 / alpha);
    let y_t = x / c_t;
    let limit = SubordinatorSpec::stable(alpha, gamma(1.0 - alpha))?;
    let hj = oracles::exact_hj(&limit, 1.0, y_t)?;
    let hc = oracles::exact_density(&limit, 1.0, y_t)?.scale(spec.drift() * delta);
    Ok(StableLimitEstimate {
        alpha,
        c_t,
        y_t,
        hj_scaled: hj.value,
        ln_hj_scaled: hj.ln_value,
        hc_scaled: hc.value,
        ln_hc_scaled: hc.ln_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs()
    }

    fn cp() -> SubordinatorSpec {
        SubordinatorSpec::cp_exp(1.0, 1.0).unwrap().with_drift(0.5).unwrap()
    }

    #[test]
    fn jump_density_examples() {
        let m = SubordinatorSpec::stable_half();
        assert!(close(hj_density(&m, 2.0, 1.0).unwrap().value.value, 0.107_981_933_026_376_1, 1e-12));
        assert!(close(hj_density(&m, 4.0, 1.0).unwrap().value.value, 2.676_604_515_297_707e-4, 1e-12));
        let g = SubordinatorSpec::gamma(1.0, 1.0).unwrap();
        assert!(close(hj_density(&g, 10.0, 5.0).unwrap().value.value, 0.025_347_665_971_275_76, 1e-12));
    }

    #[test]
    fn jump_interval_examples() {
        let m = SubordinatorSpec::stable_half();
        let e = hj_interval(&m, 2.0, 1.0, 0.5).unwrap();
        assert!(close(e.value.value, 0.034_128_8, 2e-6));
        assert!(e.warnings.contains(&Warning::PreAsymptotic));
        let far = hj_interval(&m, 20.0, 1.0, 0.1).unwrap();
        assert!(!far.value.underflow);
        let d = hj_density(&m, 20.0, 1.0).unwrap().value;
        let expect = d.ln_value + (1.0 / 20.0f64).ln() + (-(-0.1f64 * 20.0).exp_m1()).ln();
        assert!((far.value.ln_value - expect).abs() < 1e-12);
        assert!(close(d.value, 1.104_189_672_431_952_6e-87, 1e-10));
        let gone = hj_interval(&m, 100.0, 0.05, 0.1).unwrap();
        assert!(gone.value.underflow && gone.warnings.contains(&Warning::Underflow));
        assert!(close(gone.value.ln_value, -1e5, 1e-4));
        assert!(matches!(hj_interval(&m, 2.0, 1.0, 0.0), Err(Error::Domain(_))));
        assert!(matches!(hj_interval(&m, 2.0, 1.0, 11.0), Err(Error::Domain(_))));
    }

    #[test]
    fn small_delta_limit() {
        let m = SubordinatorSpec::gamma(2.0, 1.0).unwrap();
        let d = hj_density(&m, 5.0, 3.0).unwrap();
        for &delta in &[1e-2, 1e-4, 1e-6] {
            let i = hj_interval(&m, 5.0, 3.0, delta).unwrap();
            let gap = (i.value.value / (delta * d.value.value) - 1.0).abs();
            assert!(gap <= delta * d.sp.exps.psi);
        }
    }

    #[test]
    fn creep_examples() {
        let m = cp();
        let hc = hc_interval(&m, 20.0, 20.0, 1.0).unwrap();
        assert!(close(hc.value.value, 7.506_403_993_717_113e-3, 1e-12), "{}", hc.value.value);
        let hj = hj_interval(&m, 20.0, 20.0, 1.0).unwrap();
        let split = hc.value.value / (hc.value.value + hj.value.value);
        let ratio = creep_conditional(&m, 20.0, 20.0).unwrap();
        assert!(close(split, ratio, 1e-12));
        assert!(close(ratio, 2f64.sqrt() - 1.0, 1e-12));
        assert!(close(hc_density(&m, 20.0, 20.0).unwrap().value.value, 9.538_740_665_581_316e-3, 1e-12));
        assert!(matches!(hc_density(&m, 20.0, 10.0), Err(Error::Domain(_))));
        // ρ → 0 end of the conditional creep probability
        assert!(close(creep_conditional(&m, 1e6, 1.5e6 * (1.0 - 1e-9)).unwrap(), 1.0 / 3.0, 1e-6));
    }

    #[test]
    fn zero_drift_creep() {
        let m = SubordinatorSpec::stable_half();
        let hc = hc_interval(&m, 2.0, 1.0, 0.5).unwrap();
        assert_eq!(hc.value.value, 0.0);
        assert!(hc.warnings.contains(&Warning::ZeroDrift));
        assert!(hc_density(&m, 2.0, 1.0).unwrap().warnings.contains(&Warning::ZeroDrift));
        assert_eq!(creep_conditional(&m, 2.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn stable_limit_examples() {
        let m = SubordinatorSpec::stable_half();
        let e = stable_limit(&m, 2.0, 1.0, 1.0).unwrap();
        assert!(close(e.c_t, 8.0 / PI, 1e-14));
        assert!(close(e.y_t, PI / 8.0, 1e-14));
        assert!(close(e.hj_scaled, 0.215_963_8, 1e-6));
        assert!(close(e.hj_scaled, 2.0 * hj_density(&m, 2.0, 1.0).unwrap().value.value, 1e-8));
        let e8 = stable_limit(&m, 8.0, 2.0, 1.0).unwrap();
        assert!(close(e8.c_t, 128.0 / PI, 1e-13));
        assert!(close(e8.hj_scaled, 8.0 * hj_density(&m, 8.0, 2.0).unwrap().value.value, 1e-8));
        assert!(matches!(
            stable_limit(&SubordinatorSpec::gamma(1.0, 1.0).unwrap(), 2.0, 1.0, 1.0),
            Err(Error::Unsupported(_))
        ));
    }
}
