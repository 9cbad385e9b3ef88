//! Exact marginal samplers and compound-Poisson path simulation.

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma, Poisson, StandardNormal};

use crate::error::{Error, Result};
use crate::model::{Kind, SubordinatorSpec};
use crate::special::expint_e1;

/// Draws X_t exactly.
#[derive(Debug, Clone)]
pub(crate) enum Marginal {
    /// X_t = level²/Z², the hitting time of `level` by Brownian motion.
    StableHalf { level: f64, shift: f64 },
    Gamma { law: Gamma<f64>, shift: f64 },
    CompoundPoisson { count: Option<Poisson<f64>>, eta: f64, shift: f64 },
}

impl Marginal {
    pub(crate) fn new(spec: &SubordinatorSpec, t: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::domain(format!("t must be positive and finite, got {t}")));
        }
        let shift = spec.drift() * t;
        Ok(match spec.kind() {
            Kind::Stable { alpha: 0.5, s } => {
                Marginal::StableHalf { level: s * t / std::f64::consts::SQRT_2, shift }
            }
            Kind::Stable { alpha, .. } => {
                return Err(Error::Unsupported(format!("no exact marginal sampler for stable alpha = {alpha}")))
            }
            Kind::Gamma { a, theta } => Marginal::Gamma {
                law: Gamma::new(a * t, 1.0 / theta).map_err(|e| Error::domain(e.to_string()))?,
                shift,
            },
            Kind::CompoundPoissonExp { rate, eta } => Marginal::CompoundPoisson {
                count: if rate * t > 0.0 {
                    Some(Poisson::new(rate * t).map_err(|e| Error::domain(e.to_string()))?)
                } else {
                    None
                },
                eta,
                shift,
            },
        })
    }

    pub(crate) fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            Marginal::StableHalf { level, shift } => {
                let z: f64 = rng.sample(StandardNormal);
                shift + level * level / (z * z)
            }
            Marginal::Gamma { law, shift } => shift + law.sample(rng),
            Marginal::CompoundPoisson { count, eta, shift } => {
                let n = count.as_ref().map_or(0.0, |c| c.sample(rng));
                if n > 0.0 {
                    shift + Gamma::new(n, 1.0 / eta).expect("positive shape").sample(rng)
                } else {
                    *shift
                }
            }
        }
    }
}

/// Law of the jumps kept in a path simulation.
#[derive(Debug, Clone, Copy)]
enum JumpLaw {
    Exp { eta: f64 },
    /// Stable jumps above eps: eps·U^{−1/α}.
    Pareto { eps: f64, alpha: f64 },
    /// Gamma jumps above eps, density ∝ e^{−θy}/y, by two-region rejection.
    GammaTail { eps: f64, theta: f64, p_low: f64 },
}

/// Compound Poisson approximation of a subordinator: jumps of size ≥ eps at
/// rate Π̄(eps), small jumps replaced by their mean as extra drift.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PathModel {
    rate: f64,
    drift: f64,
    creep_possible: bool,
    law: JumpLaw,
    pub(crate) approximate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Outcome {
    Creep(f64),
    Jump(f64),
    Survived,
    Capped,
}

impl PathModel {
    pub(crate) fn new(spec: &SubordinatorSpec, eps: f64) -> Result<Self> {
        let b = spec.drift();
        let (rate, law, drift_eps, approximate) = match spec.kind() {
            Kind::CompoundPoissonExp { rate, eta } => (rate, JumpLaw::Exp { eta }, 0.0, false),
            kind => {
                if !(eps > 0.0 && eps.is_finite()) {
                    return Err(Error::domain(format!("eps must be positive, got {eps}")));
                }
                let law = match kind {
                    Kind::Stable { alpha, .. } => JumpLaw::Pareto { eps, alpha },
                    Kind::Gamma { theta, .. } => {
                        let cut = 1.0 / theta;
                        let low = if eps < cut { expint_e1(theta * eps) - expint_e1(1.0) } else { 0.0 };
                        let high = expint_e1(theta * eps.max(cut));
                        JumpLaw::GammaTail { eps, theta, p_low: low / (low + high) }
                    }
                    Kind::CompoundPoissonExp { .. } => unreachable!(),
                };
                (spec.tail(eps)?, law, spec.truncated_moment(1, eps)?, true)
            }
        };
        Ok(PathModel { rate, drift: b + drift_eps, creep_possible: b > 0.0, law, approximate })
    }

    fn jump<R: Rng>(&self, rng: &mut R) -> f64 {
        match self.law {
            JumpLaw::Exp { eta } => {
                let e: f64 = rng.sample(Exp1);
                e / eta
            }
            JumpLaw::Pareto { eps, alpha } => {
                let u: f64 = 1.0 - rng.random::<f64>();
                eps * u.powf(-1.0 / alpha)
            }
            JumpLaw::GammaTail { eps, theta, p_low } => {
                let cut = 1.0 / theta;
                if rng.random::<f64>() < p_low {
                    // proposal ∝ 1/y on (eps, 1/θ], accept with e^{−θy}
                    let span = (cut / eps).ln();
                    loop {
                        let y = eps * (span * rng.random::<f64>()).exp();
                        if rng.random::<f64>() < (-theta * y).exp() {
                            return y;
                        }
                    }
                } else {
                    // proposal θe^{−θ(y−lo)} on (lo, ∞), accept with lo/y
                    let lo = eps.max(cut);
                    loop {
                        let e: f64 = rng.sample(Exp1);
                        let y = lo + e / theta;
                        if rng.random::<f64>() < lo / y {
                            return y;
                        }
                    }
                }
            }
        }
    }

    /// Simulates until the path exceeds `x`, the time passes `horizon`, or
    /// `cap` events have been drawn.
    pub(crate) fn first_passage<R: Rng>(&self, x: f64, horizon: Option<f64>, cap: u64, rng: &mut R) -> Outcome {
        let mut pos = 0.0;
        let mut time = 0.0;
        let beyond = |s: f64| horizon.is_some_and(|h| s > h);
        for _ in 0..cap {
            let dt = if self.rate > 0.0 {
                let e: f64 = rng.sample(Exp1);
                e / self.rate
            } else {
                f64::INFINITY
            };
            if self.drift > 0.0 && pos + self.drift * dt >= x {
                let hit = time + (x - pos) / self.drift;
                if beyond(hit) {
                    return Outcome::Survived;
                }
                return if self.creep_possible { Outcome::Creep(hit) } else { Outcome::Jump(hit) };
            }
            time += dt;
            if beyond(time) || !time.is_finite() {
                return Outcome::Survived;
            }
            pos += self.drift * dt + self.jump(rng);
            if pos > x {
                return Outcome::Jump(time);
            }
        }
        Outcome::Capped
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::rng::replicate_rng;

    #[test]
    fn gamma_tail_jumps_match_tail_function() {
        let spec = SubordinatorSpec::gamma(1.0, 2.0).unwrap();
        let eps = 1e-3;
        let m = PathModel::new(&spec, eps).unwrap();
        let mut rng = replicate_rng(3, 0);
        let n = 200_000;
        let level = 0.2;
        let above = (0..n).filter(|_| m.jump(&mut rng) > level).count() as f64 / n as f64;
        let expect = spec.tail(level).unwrap() / spec.tail(eps).unwrap();
        let se = (expect * (1.0 - expect) / n as f64).sqrt();
        assert!((above - expect).abs() < 4.0 * se, "{above} vs {expect}");
    }

    #[test]
    fn pareto_jumps_stay_above_eps() {
        let m = PathModel::new(&SubordinatorSpec::stable_half(), 1e-4).unwrap();
        let mut rng = replicate_rng(1, 1);
        assert!((0..10_000).all(|_| m.jump(&mut rng) >= 1e-4));
        assert!(m.approximate);
    }

    #[test]
    fn pure_drift_creeps_at_x_over_b() {
        let spec = SubordinatorSpec::cp_exp(1e-300, 1.0).unwrap().with_drift(2.0).unwrap();
        let m = PathModel::new(&spec, 1e-6).unwrap();
        let mut rng = replicate_rng(1, 0);
        assert_eq!(m.first_passage(3.0, None, 10, &mut rng), Outcome::Creep(1.5));
        assert_eq!(m.first_passage(3.0, Some(1.0), 10, &mut rng), Outcome::Survived);
    }
}
