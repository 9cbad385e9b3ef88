//! Parametric subordinators and their exponent-level functionals.
//!
//! A subordinator is described by a drift `b ≥ 0` and a Lévy measure `Π`
//! on `(0, ∞)`. Its Laplace exponent is
//!
//! ```text
//! ψ(λ) = bλ + ∫ (1 − e^{−λy}) Π(dy),      ψ*(λ) = ψ(λ) − bλ.
//! ```
//!
//! Three measure families are supported, all with closed-form exponents:
//!
//! | kind                   | Π(dy)                          | ψ*(λ)             |
//! |------------------------|--------------------------------|-------------------|
//! | `Stable { alpha, s }`  | sα/Γ(1−α) · y^{−1−α} dy        | s·λ^α             |
//! | `Gamma { a, theta }`   | a·y^{−1}·e^{−θy} dy            | a·ln(1 + λ/θ)     |
//! | `CompoundPoissonExp`   | rate·η·e^{−ηy} dy              | rate·λ/(λ + η)    |

use num_complex::Complex64;
use serde::Serialize;
use std::fmt;

use crate::error::{Error, Result};
use crate::quad;
use crate::special::{expint_e1, gamma, lower_gamma_int};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Kind {
    /// ψ*(λ) = s·λ^α with 0 < α < 1.
    Stable { alpha: f64, s: f64 },
    /// Gamma subordinator, X_1 ~ Gamma(shape a, rate θ).
    Gamma { a: f64, theta: f64 },
    /// Compound Poisson with Exp(η) jumps at the given rate.
    CompoundPoissonExp { rate: f64, eta: f64 },
}

/// A subordinator: drift plus one of the parametric Lévy measures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubordinatorSpec {
    kind: Kind,
    drift_b: f64,
}

/// ψ and its derived quantities at one argument.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentValues {
    pub u: f64,
    pub psi: f64,
    pub psi_star: f64,
    pub psi_prime: f64,
    /// σ²(u) = ∫ y² e^{−uy} Π(dy)
    pub sigma2: f64,
    /// H(u) = ψ(u) − u ψ'(u)
    pub h: f64,
}

/// Tail functionals of Π at one level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailRatios {
    pub x: f64,
    /// Π̄(x) = Π(x, ∞)
    pub tail: f64,
    /// K_Π(x) = x^{−2} ∫_{(0,x)} y² Π(dy)
    pub k_pi: f64,
    /// Q_Π(x) = Π̄(x) + K_Π(x)
    pub q_pi: f64,
    /// Q_Π(x) recomputed as 2x^{−2} ∫_0^x y Π̄(y) dy by quadrature.
    pub q_identity: f64,
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::domain(format!("{name} must be a positive finite number, got {v}")))
    }
}

impl SubordinatorSpec {
    pub fn stable(alpha: f64, s: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::domain(format!("alpha must lie in (0,1), got {alpha}")));
        }
        Ok(SubordinatorSpec { kind: Kind::Stable { alpha, s: positive("s", s)? }, drift_b: 0.0 })
    }

    /// Stable(1/2) normalised so that ψ(λ) = √(2λ): X_t is the first hitting
    /// time of level t by a standard Brownian motion.
    pub fn stable_half() -> Self {
        SubordinatorSpec {
            kind: Kind::Stable { alpha: 0.5, s: std::f64::consts::SQRT_2 },
            drift_b: 0.0,
        }
    }

    pub fn gamma(a: f64, theta: f64) -> Result<Self> {
        Ok(SubordinatorSpec {
            kind: Kind::Gamma { a: positive("a", a)?, theta: positive("theta", theta)? },
            drift_b: 0.0,
        })
    }

    pub fn cp_exp(rate: f64, eta: f64) -> Result<Self> {
        Ok(SubordinatorSpec {
            kind: Kind::CompoundPoissonExp { rate: positive("rate", rate)?, eta: positive("eta", eta)? },
            drift_b: 0.0,
        })
    }

    pub fn with_drift(self, b: f64) -> Result<Self> {
        if !(b >= 0.0 && b.is_finite()) {
            return Err(Error::domain(format!("drift b must be finite and >= 0, got {b}")));
        }
        Ok(SubordinatorSpec { drift_b: b, ..self })
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn drift(&self) -> f64 {
        self.drift_b
    }

    /// The same measure without drift.
    pub fn driftless(&self) -> Self {
        SubordinatorSpec { drift_b: 0.0, ..*self }
    }

    /// μ = ψ'(0+) = E X_1 (infinite for stable measures).
    pub fn mean_mu(&self) -> f64 {
        self.drift_b
            + match self.kind {
                Kind::Stable { .. } => f64::INFINITY,
                Kind::Gamma { a, theta } => a / theta,
                Kind::CompoundPoissonExp { rate, eta } => rate / eta,
            }
    }

    /// All three families are strongly non-lattice (absolutely continuous
    /// jump laws).
    pub fn non_lattice(&self) -> bool {
        true
    }

    pub fn is_finite_activity(&self) -> bool {
        matches!(self.kind, Kind::CompoundPoissonExp { .. })
    }

    pub fn stable_half_family(&self) -> bool {
        matches!(self.kind, Kind::Stable { alpha, .. } if alpha == 0.5)
    }

    /// Density of Π with respect to Lebesgue measure.
    pub fn levy_density(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        match self.kind {
            Kind::Stable { alpha, s } => s * alpha / gamma(1.0 - alpha) * y.powf(-1.0 - alpha),
            Kind::Gamma { a, theta } => a * (-theta * y).exp() / y,
            Kind::CompoundPoissonExp { rate, eta } => rate * eta * (-eta * y).exp(),
        }
    }

    /// Π̄(x) = Π(x, ∞). `x = +∞` gives 0.
    pub fn tail(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::domain(format!("tail needs x > 0, got {x}")));
        }
        if x.is_infinite() {
            return Ok(0.0);
        }
        Ok(match self.kind {
            Kind::Stable { alpha, s } => s * x.powf(-alpha) / gamma(1.0 - alpha),
            Kind::Gamma { a, theta } => a * expint_e1(theta * x),
            Kind::CompoundPoissonExp { rate, eta } => rate * (-eta * x).exp(),
        })
    }

    /// ∫_{(0,x)} y^k Π(dy) for k ∈ {1, 2, 3}; `x = +∞` is allowed.
    pub fn truncated_moment(&self, k: u32, x: f64) -> Result<f64> {
        if !(1..=3).contains(&k) {
            return Err(Error::domain(format!("truncated moment order must be 1, 2 or 3, got {k}")));
        }
        if !(x > 0.0) {
            return Err(Error::domain(format!("truncated moment needs x > 0, got {x}")));
        }
        let kf = k as f64;
        Ok(match self.kind {
            Kind::Stable { alpha, s } => {
                if x.is_infinite() {
                    f64::INFINITY
                } else {
                    s * alpha / gamma(1.0 - alpha) * x.powf(kf - alpha) / (kf - alpha)
                }
            }
            Kind::Gamma { a, theta } => a * lower_gamma_int(k, theta * x) / theta.powi(k as i32),
            Kind::CompoundPoissonExp { rate, eta } => rate * lower_gamma_int(k + 1, eta * x) / eta.powi(k as i32),
        })
    }

    pub fn psi_star(&self, u: f64) -> f64 {
        match self.kind {
            Kind::Stable { alpha, s } => s * u.powf(alpha),
            Kind::Gamma { a, theta } => a * (u / theta).ln_1p(),
            Kind::CompoundPoissonExp { rate, eta } => rate * u / (u + eta),
        }
    }

    pub fn psi(&self, u: f64) -> f64 {
        self.drift_b * u + self.psi_star(u)
    }

    pub fn psi_prime(&self, u: f64) -> f64 {
        self.drift_b
            + match self.kind {
                Kind::Stable { alpha, s } => s * alpha * u.powf(alpha - 1.0),
                Kind::Gamma { a, theta } => a / (theta + u),
                Kind::CompoundPoissonExp { rate, eta } => rate * eta / ((u + eta) * (u + eta)),
            }
    }

    pub fn sigma2(&self, u: f64) -> f64 {
        match self.kind {
            Kind::Stable { alpha, s } => s * alpha * (1.0 - alpha) * u.powf(alpha - 2.0),
            Kind::Gamma { a, theta } => a / ((theta + u) * (theta + u)),
            Kind::CompoundPoissonExp { rate, eta } => 2.0 * rate * eta / (u + eta).powi(3),
        }
    }

    /// ∫ y³ e^{−uy} Π(dy), the third cumulant rate of the tilted process.
    pub fn third_cumulant_rate(&self, u: f64) -> f64 {
        match self.kind {
            Kind::Stable { alpha, s } => s * alpha * (1.0 - alpha) * (2.0 - alpha) * u.powf(alpha - 3.0),
            Kind::Gamma { a, theta } => 2.0 * a / (theta + u).powi(3),
            Kind::CompoundPoissonExp { rate, eta } => 6.0 * rate * eta / (u + eta).powi(4),
        }
    }

    /// H(u) = ψ(u) − uψ'(u) in a cancellation-free closed form. The drift
    /// contributes nothing.
    pub fn h(&self, u: f64) -> f64 {
        match self.kind {
            Kind::Stable { alpha, s } => s * (1.0 - alpha) * u.powf(alpha),
            Kind::Gamma { a, theta } => {
                let v = u / theta;
                if v < 0.1 {
                    // Σ_{k≥2} (−1)^k (k−1)/k v^k
                    let mut sum = 0.0;
                    let mut pow = -v;
                    for k in 2..40 {
                        pow *= -v;
                        let term = pow * (k as f64 - 1.0) / k as f64;
                        sum += term;
                        if term.abs() < 1e-18 * sum.abs() {
                            break;
                        }
                    }
                    a * sum
                } else {
                    a * (v.ln_1p() - v / (1.0 + v))
                }
            }
            Kind::CompoundPoissonExp { rate, eta } => rate * u * u / ((u + eta) * (u + eta)),
        }
    }

    pub fn psi_suite(&self, u: f64) -> Result<ExponentValues> {
        if !(u > 0.0 && u.is_finite()) {
            return Err(Error::domain(format!("exponent argument must be positive and finite, got {u}")));
        }
        let psi_star = self.psi_star(u);
        Ok(ExponentValues {
            u,
            psi: self.drift_b * u + psi_star,
            psi_star,
            psi_prime: self.psi_prime(u),
            sigma2: self.sigma2(u),
            h: self.h(u),
        })
    }

    pub fn k_pi(&self, x: f64) -> Result<f64> {
        Ok(self.truncated_moment(2, x)? / x / x)
    }

    pub fn q_pi(&self, x: f64) -> Result<f64> {
        Ok(self.tail(x)? + self.k_pi(x)?)
    }

    /// Q_Π through its integral representation 2x^{−2} ∫_0^x y Π̄(y) dy.
    pub fn q_pi_identity(&self, x: f64) -> Result<f64> {
        if !(x > 0.0 && x.is_finite()) {
            return Err(Error::domain(format!("Q identity needs finite x > 0, got {x}")));
        }
        let r = quad::integrate(|_, y, _| if y > 0.0 { y * self.tail(y).unwrap_or(0.0) } else { 0.0 }, 0.0, x, 1e-13)?;
        Ok(2.0 * r.value / (x * x))
    }

    pub fn ratio_suite(&self, x: f64) -> Result<TailRatios> {
        let tail = self.tail(x)?;
        let k_pi = self.k_pi(x)?;
        Ok(TailRatios { x, tail, k_pi, q_pi: tail + k_pi, q_identity: self.q_pi_identity(x)? })
    }

    /// ψ*(λ) recomputed as λ ∫_0^∞ e^{−λy} Π̄(y) dy.
    pub fn psi_star_by_quadrature(&self, lambda: f64) -> Result<f64> {
        if !(lambda > 0.0) {
            return Err(Error::domain("lambda must be positive"));
        }
        let r = quad::integrate_half_line(
            |_, y| if y > 0.0 { (-lambda * y).exp() * self.tail(y).unwrap_or(0.0) } else { 0.0 },
            0.0,
            1e-13,
        )?;
        Ok(lambda * r.value)
    }

    /// ψ*(w) for complex `w` with Re w ≥ 0 (principal branches).
    pub(crate) fn psi_star_c(&self, w: Complex64) -> Complex64 {
        match self.kind {
            Kind::Stable { alpha, s } => {
                if w.norm() == 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    s * w.powf(alpha)
                }
            }
            Kind::Gamma { a, theta } => a * (Complex64::new(1.0, 0.0) + w / theta).ln(),
            Kind::CompoundPoissonExp { rate, eta } => rate * w / (w + eta),
        }
    }

    pub(crate) fn psi_c(&self, w: Complex64) -> Complex64 {
        self.drift_b * w + self.psi_star_c(w)
    }

    /// ψ(λ − iz) on the principal branch.
    pub fn psi_complex(&self, lambda: f64, z: f64) -> Result<Complex64> {
        if !(lambda >= 0.0) || !lambda.is_finite() || !z.is_finite() {
            return Err(Error::domain(format!("psi_complex needs finite lambda >= 0 and finite z, got ({lambda}, {z})")));
        }
        if lambda == 0.0 {
            if let Kind::Gamma { .. } = self.kind {
                return Err(Error::Branch("gamma exponent requires Re(argument) > 0".into()));
            }
        }
        Ok(self.psi_c(Complex64::new(lambda, -z)))
    }
}

impl fmt::Display for SubordinatorSpec {
    /// Canonical model string, e.g. `gamma:a=1,theta=1,b=0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            Kind::Stable { alpha, s } => write!(f, "stable:alpha={alpha:?},s={s:?}")?,
            Kind::Gamma { a, theta } => write!(f, "gamma:a={a:?},theta={theta:?}")?,
            Kind::CompoundPoissonExp { rate, eta } => write!(f, "cpexp:rate={rate:?},eta={eta:?}")?,
        }
        write!(f, ",b={:?}", self.drift_b)
    }
}
