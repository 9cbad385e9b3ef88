//! Reproducible Monte Carlo for marginals and first passage.
//!
//! Replicate `i` draws from its own ChaCha8 stream keyed by `(seed, i)`.
//! Replicates are folded in fixed blocks and merged in block order, so a
//! summary is bit-identical for any worker count.

mod rng;
mod sampler;

pub use rng::replicate_rng;

use serde::Serialize;
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::exec::{fold_blocks, Execution, DEFAULT_BLOCK};
use crate::model::SubordinatorSpec;
use crate::saddle::solve_rho;
use sampler::{Marginal, Outcome, PathModel};

/// Runs fail once more than this fraction of paths hit the step cap.
pub const MAX_DISCARD_FRACTION: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McConfig {
    pub n: u64,
    pub seed: u64,
    /// Small-jump truncation for infinite-activity paths.
    pub eps: f64,
    /// Events allowed per path before it is discarded.
    pub step_cap: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig { n: 1_000_000, seed: 1, eps: 1e-6, step_cap: 10_000_000 }
    }
}

impl McConfig {
    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::domain("n must be at least 1"));
        }
        if !(self.eps > 0.0) {
            return Err(Error::domain(format!("eps must be positive, got {}", self.eps)));
        }
        if self.step_cap == 0 {
            return Err(Error::domain("step_cap must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub p: f64,
    pub se: f64,
}

impl Estimate {
    fn from_count(k: u64, n: u64) -> Self {
        let p = k as f64 / n as f64;
        Estimate { p, se: (p * (1.0 - p) / n as f64).sqrt() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub se: f64,
    pub variance: f64,
}

/// Streaming mean and variance with the pairwise merge of Chan et al.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, v: f64) {
        self.n += 1;
        let d = v - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (v - self.mean);
    }

    fn merge(self, o: Moments) -> Moments {
        if self.n == 0 {
            return o;
        }
        if o.n == 0 {
            return self;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        Moments {
            n,
            mean: self.mean + d * (o.n as f64 / n as f64),
            m2: self.m2 + o.m2 + d * d * (self.n as f64 * o.n as f64 / n as f64),
        }
    }

    fn estimate(&self) -> MeanEstimate {
        let variance = if self.n > 1 { self.m2 / (self.n - 1) as f64 } else { 0.0 };
        MeanEstimate { mean: self.mean, se: (variance / self.n as f64).sqrt(), variance }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McSummary {
    pub n: u64,
    pub n_crossed_by_t: u64,
    pub n_crossed_in_window: u64,
    pub n_creep: u64,
    pub n_jump: u64,
    pub n_discarded: u64,
    /// Probabilities with binomial standard errors.
    pub estimates: BTreeMap<String, Estimate>,
    /// Sample means with standard errors.
    pub moments: BTreeMap<String, MeanEstimate>,
    pub approximate_creep_flag: bool,
    pub seed: u64,
    pub eps: Option<f64>,
}

impl McSummary {
    fn new(cfg: &McConfig, n: u64) -> Self {
        McSummary {
            n,
            n_crossed_by_t: 0,
            n_crossed_in_window: 0,
            n_creep: 0,
            n_jump: 0,
            n_discarded: 0,
            estimates: BTreeMap::new(),
            moments: BTreeMap::new(),
            approximate_creep_flag: false,
            seed: cfg.seed,
            eps: None,
        }
    }

    pub fn estimate(&self, name: &str) -> Option<Estimate> {
        self.estimates.get(name).copied()
    }

    pub fn moment(&self, name: &str) -> Option<MeanEstimate> {
        self.moments.get(name).copied()
    }
}

#[derive(Debug, Clone, Default)]
struct MarginalAcc {
    below: Vec<u64>,
    value: Moments,
    tilt: Moments,
}

fn probe_key(x: f64) -> String {
    format!("cdf@{x:?}")
}

/// Empirical law of X_t from the exact sampler: P(X_t ≤ probe) for each
/// probe, the sample mean and, when `tilt` is given, the mean of
/// e^{−ρX_t + tψ(ρ)} (which equals 1).
pub fn sample_marginal(
    spec: &SubordinatorSpec,
    t: f64,
    probes: &[f64],
    tilt: Option<f64>,
    cfg: &McConfig,
    exec: Execution,
) -> Result<McSummary> {
    cfg.validate()?;
    let marginal = Marginal::new(spec, t)?;
    let log_norm = tilt.map(|r| (r, t * spec.psi(r)));
    let run = |start: u64, end: u64| -> Result<MarginalAcc> {
        let mut acc = MarginalAcc { below: vec![0; probes.len()], ..Default::default() };
        for i in start..end {
            let mut rng = replicate_rng(cfg.seed, i);
            let v = marginal.sample(&mut rng);
            for (k, &p) in probes.iter().enumerate() {
                if v <= p {
                    acc.below[k] += 1;
                }
            }
            acc.value.push(v);
            if let Some((r, ln)) = log_norm {
                acc.tilt.push((-r * v + ln).exp());
            }
        }
        Ok(acc)
    };
    let merge = |mut a: MarginalAcc, b: MarginalAcc| {
        for (x, y) in a.below.iter_mut().zip(b.below) {
            *x += y;
        }
        a.value = a.value.merge(b.value);
        a.tilt = a.tilt.merge(b.tilt);
        a
    };
    let acc = fold_blocks(exec, cfg.n, DEFAULT_BLOCK, run, merge)?.expect("n >= 1");
    let mut out = McSummary::new(cfg, cfg.n);
    for (k, &p) in probes.iter().enumerate() {
        out.estimates.insert(probe_key(p), Estimate::from_count(acc.below[k], cfg.n));
    }
    out.moments.insert("mean".into(), acc.value.estimate());
    if tilt.is_some() {
        out.moments.insert("tilt_weight".into(), acc.tilt.estimate());
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum PassageWindow {
    /// Estimate P(T_x > t) and P(T_x ∈ (t, t+Δ]) with the creep split.
    Window { t: f64, delta: f64 },
    /// Follow every path until it crosses.
    RunToCrossing,
}

#[derive(Debug, Clone, Copy, Default)]
struct PassageAcc {
    by_t: u64,
    window: u64,
    creep: u64,
    jump: u64,
    window_creep: u64,
    window_jump: u64,
    discarded: u64,
}

/// Simulates first passage over `x`. Compound Poisson paths are exact;
/// infinite-activity models keep jumps ≥ eps and replace the rest by their
/// mean, which makes the creep/jump classification approximate.
pub fn simulate_passage(
    spec: &SubordinatorSpec,
    x: f64,
    window: PassageWindow,
    cfg: &McConfig,
    exec: Execution,
) -> Result<McSummary> {
    cfg.validate()?;
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::domain(format!("level must be positive, got {x}")));
    }
    let (t, horizon) = match window {
        PassageWindow::Window { t, delta } => {
            if !(t >= 0.0 && delta > 0.0) {
                return Err(Error::domain(format!("need t >= 0 and delta > 0, got t={t}, delta={delta}")));
            }
            (t, Some(t + delta))
        }
        PassageWindow::RunToCrossing => {
            if spec.drift() == 0.0 && spec.is_finite_activity() {
                return Err(Error::ZeroDrift);
            }
            (f64::INFINITY, None)
        }
    };
    let model = PathModel::new(spec, cfg.eps)?;
    let run = |start: u64, end: u64| -> Result<PassageAcc> {
        let mut acc = PassageAcc::default();
        for i in start..end {
            let mut rng = replicate_rng(cfg.seed, i);
            let (time, creep) = match model.first_passage(x, horizon, cfg.step_cap, &mut rng) {
                Outcome::Creep(s) => (s, true),
                Outcome::Jump(s) => (s, false),
                Outcome::Survived => continue,
                Outcome::Capped => {
                    acc.discarded += 1;
                    continue;
                }
            };
            if creep { acc.creep += 1 } else { acc.jump += 1 }
            if time <= t {
                acc.by_t += 1;
            } else if horizon.is_some() {
                acc.window += 1;
                if creep { acc.window_creep += 1 } else { acc.window_jump += 1 }
            }
        }
        Ok(acc)
    };
    let merge = |a: PassageAcc, b: PassageAcc| PassageAcc {
        by_t: a.by_t + b.by_t,
        window: a.window + b.window,
        creep: a.creep + b.creep,
        jump: a.jump + b.jump,
        window_creep: a.window_creep + b.window_creep,
        window_jump: a.window_jump + b.window_jump,
        discarded: a.discarded + b.discarded,
    };
    let acc = fold_blocks(exec, cfg.n, DEFAULT_BLOCK, run, merge)?.expect("n >= 1");
    if acc.discarded as f64 > MAX_DISCARD_FRACTION * cfg.n as f64 {
        return Err(Error::StepCapExceeded { discarded: acc.discarded, n: cfg.n });
    }
    let n = cfg.n - acc.discarded;
    let mut out = McSummary::new(cfg, n);
    out.n_discarded = acc.discarded;
    out.n_creep = acc.creep;
    out.n_jump = acc.jump;
    out.approximate_creep_flag = model.approximate;
    out.eps = model.approximate.then_some(cfg.eps);
    out.estimates.insert("p_creep".into(), Estimate::from_count(acc.creep, n));
    out.estimates.insert("p_jump".into(), Estimate::from_count(acc.jump, n));
    if horizon.is_some() {
        out.n_crossed_by_t = acc.by_t;
        out.n_crossed_in_window = acc.window;
        out.estimates.insert("p_survive_t".into(), Estimate::from_count(n - acc.by_t, n));
        out.estimates.insert("p_window".into(), Estimate::from_count(acc.window, n));
        out.estimates.insert("p_window_creep".into(), Estimate::from_count(acc.window_creep, n));
        out.estimates.insert("p_window_jump".into(), Estimate::from_count(acc.window_jump, n));
    } else {
        out.n_crossed_by_t = acc.creep + acc.jump;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TiltedCheck {
    pub summary: McSummary,
    pub rho: f64,
    /// Target tilted mean x.
    pub mean_target: f64,
    /// Target tilted variance tσ²(ρ).
    pub variance_target: f64,
    /// 6tρ^{−3}Q_Π(1/ρ) + 2x·tσ²(ρ)
    pub third_bound: f64,
    pub third_bound_holds: bool,
}

/// Reweights exact marginal draws by e^{−ρX_t + tψ(ρ)} to estimate the
/// tilted mean, variance about x and third absolute central moment.
pub fn tilted_moment_check(
    spec: &SubordinatorSpec,
    t: f64,
    x: f64,
    cfg: &McConfig,
    exec: Execution,
) -> Result<TiltedCheck> {
    cfg.validate()?;
    let sp = solve_rho(spec, t, x)?;
    let marginal = Marginal::new(spec, t)?;
    let rho = sp.rho;
    let ln_norm = t * sp.exps.psi;
    let run = |start: u64, end: u64| -> Result<[Moments; 4]> {
        let mut acc = [Moments::default(); 4];
        for i in start..end {
            let mut rng = replicate_rng(cfg.seed, i);
            let v = marginal.sample(&mut rng);
            let w = (-rho * v + ln_norm).exp();
            let d = v - x;
            acc[0].push(w);
            acc[1].push(w * v);
            acc[2].push(w * d * d);
            acc[3].push(w * (d * d).abs() * d.abs());
        }
        Ok(acc)
    };
    let merge = |a: [Moments; 4], b: [Moments; 4]| [a[0].merge(b[0]), a[1].merge(b[1]), a[2].merge(b[2]), a[3].merge(b[3])];
    let acc = fold_blocks(exec, cfg.n, DEFAULT_BLOCK, run, merge)?.expect("n >= 1");
    let mut summary = McSummary::new(cfg, cfg.n);
    for (name, m) in ["tilt_weight", "tilted_mean", "tilted_variance", "tilted_third_abs"].iter().zip(acc) {
        summary.moments.insert((*name).into(), m.estimate());
    }
    let variance_target = t * sp.exps.sigma2;
    let third_bound = 6.0 * t * spec.q_pi(1.0 / rho)? / rho.powi(3) + 2.0 * x * variance_target;
    let third = acc[3].estimate();
    Ok(TiltedCheck {
        summary,
        rho,
        mean_target: x,
        variance_target,
        third_bound,
        third_bound_holds: third.mean + 4.0 * third.se <= third_bound,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpsSensitivity {
    pub eps: f64,
    pub creep_fraction: Estimate,
    pub creep_fraction_half_eps: Estimate,
    pub difference: f64,
    /// max(4·SE, 2·d_eps·ρ) with d_eps = ∫_0^eps yΠ(dy)
    pub band: f64,
    pub within_band: bool,
}

/// Re-runs a window simulation at eps/2 and compares creep fractions.
pub fn eps_sensitivity(
    spec: &SubordinatorSpec,
    x: f64,
    t: f64,
    delta: f64,
    cfg: &McConfig,
    exec: Execution,
) -> Result<EpsSensitivity> {
    let w = PassageWindow::Window { t, delta };
    let a = simulate_passage(spec, x, w, cfg, exec)?;
    let half = McConfig { eps: cfg.eps / 2.0, ..*cfg };
    let b = simulate_passage(spec, x, w, &half, exec)?;
    let fa = a.estimate("p_window_creep").expect("window run");
    let fb = b.estimate("p_window_creep").expect("window run");
    let rho = solve_rho(spec, t, x).map(|s| s.rho).unwrap_or(0.0);
    let d_eps = if spec.is_finite_activity() { 0.0 } else { spec.truncated_moment(1, cfg.eps)? };
    let se = (fa.se * fa.se + fb.se * fb.se).sqrt();
    let band = (4.0 * se).max(2.0 * d_eps * rho);
    let difference = (fa.p - fb.p).abs();
    Ok(EpsSensitivity {
        eps: cfg.eps,
        creep_fraction: fa,
        creep_fraction_half_eps: fb,
        difference,
        band,
        within_band: difference <= band,
    })
}
