//! Named verification suites and the full battery run by `verify`.

use serde::Serialize;

use crate::error::Result;
use crate::exec::Execution;
use crate::model::SubordinatorSpec;
use crate::montecarlo::{self, McConfig, PassageWindow};
use crate::oracles::{self, Verdict};
use crate::passage;
use crate::saddle::{self, solve_rho};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckItem {
    pub name: String,
    pub passed: bool,
    /// A failure here is the documented outcome (e.g. (H) for compound
    /// Poisson), not a defect.
    pub expected_fail: bool,
    pub detail: String,
}

impl CheckItem {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        CheckItem { name: name.into(), passed, expected_fail: false, detail: detail.into() }
    }

    pub fn ok(&self) -> bool {
        self.passed != self.expected_fail
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub model: Option<String>,
    pub items: Vec<CheckItem>,
}

impl SuiteReport {
    fn new(suite: &str, model: Option<&SubordinatorSpec>) -> Self {
        SuiteReport { suite: suite.into(), model: model.map(|m| m.to_string()), items: Vec::new() }
    }

    pub fn ok(&self) -> bool {
        self.items.iter().all(CheckItem::ok)
    }

    fn push(&mut self, item: CheckItem) {
        self.items.push(item);
    }

    fn push_result(&mut self, name: &str, r: Result<CheckItem>) {
        self.items.push(r.unwrap_or_else(|e| CheckItem::new(name, false, format!("error: {e}"))));
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SuiteName {
    Lemma2,
    Moments,
    #[serde(rename = "hypH")]
    HypH,
    Sc,
    Determinism,
}

impl SuiteName {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "lemma2" => SuiteName::Lemma2,
            "moments" => SuiteName::Moments,
            "hypH" | "hyph" => SuiteName::HypH,
            "sc" => SuiteName::Sc,
            "determinism" => SuiteName::Determinism,
            _ => return None,
        })
    }

    pub const ALL: [&'static str; 5] = ["lemma2", "moments", "hypH", "sc", "determinism"];
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatteryConfig {
    pub mc: McConfig,
    pub exec: Execution,
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
}

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

/// Lemma 2 (a)–(c) and the monotonicity facts on 60 log-spaced u in [1e-3, 1e3].
pub fn lemma2(spec: &SubordinatorSpec) -> SuiteReport {
    let mut rep = SuiteReport::new("lemma2", Some(spec));
    let grid = log_grid(1e-3, 1e3, 60);
    let slack = 1e-12;
    let (mut va, mut vb, mut vc, mut vmono, mut vineq, mut vq) = (0, 0, 0, 0, 0, 0);
    let mut prev: Option<(f64, f64, f64)> = None;
    for &u in &grid {
        let e = match spec.psi_suite(u) {
            Ok(e) => e,
            Err(_) => {
                va += 1;
                continue;
            }
        };
        let r = match spec.ratio_suite(1.0 / u) {
            Ok(r) => r,
            Err(_) => {
                va += 1;
                continue;
            }
        };
        if !(r.q_pi / (2.0 * std::f64::consts::E) <= e.h * (1.0 + slack) && e.h <= r.q_pi * (1.0 + slack)) {
            va += 1;
        }
        let u2s = u * u * e.sigma2;
        if u2s > 2.0 * e.h * (1.0 + slack) {
            vb += 1;
        }
        let lower = (-1.0f64).exp() / (1.0 + r.tail / r.k_pi);
        if u2s / e.h < lower * (1.0 - slack) {
            vc += 1;
        }
        if u * e.psi_prime > e.psi * (1.0 + slack) {
            vineq += 1;
        }
        if rel(r.q_identity, r.q_pi) > 1e-10 {
            vq += 1;
        }
        if let Some((pp, ph, pq)) = prev {
            // Q_Π(1/u) must not decrease as u grows
            if !(e.psi_prime < pp && e.h > ph && r.q_pi >= pq * (1.0 - slack)) {
                vmono += 1;
            }
        }
        prev = Some((e.psi_prime, e.h, r.q_pi));
    }
    for (name, v) in [
        ("lemma2_a", va),
        ("lemma2_b", vb),
        ("lemma2_c", vc),
        ("u_psi_prime_le_psi", vineq),
        ("psi_prime_decreasing_h_increasing", vmono),
        ("q_identity_1e-10", vq),
    ] {
        rep.push(CheckItem::new(name, v == 0, format!("{v} violations on {} grid points", grid.len())));
    }
    rep
}

/// Tilted moment identities by quadrature and, when `mc` is given, by
/// reweighted Monte Carlo.
pub fn moments(spec: &SubordinatorSpec, t: f64, x: f64, mc: Option<&BatteryConfig>) -> SuiteReport {
    let mut rep = SuiteReport::new("moments", Some(spec));
    rep.push_result(
        "tilted_moments_measure_1e-8",
        (|| {
            let sp = solve_rho(spec, t, x)?;
            let m = oracles::tilted_moments_from_measure(spec, t, sp.rho)?;
            let worst = rel(m.mean, x).max(rel(m.variance, t * sp.exps.sigma2));
            Ok(CheckItem::new("tilted_moments_measure_1e-8", worst <= 1e-8, format!("max relative gap {worst:.3e}")))
        })(),
    );
    if !spec.is_finite_activity() {
        rep.push_result(
            "tilted_moments_density_1e-8",
            (|| {
                let sp = solve_rho(spec, t, x)?;
                let m = oracles::tilted_moments_from_density(spec, t, sp.rho)?;
                let worst = rel(m.mean, x).max(rel(m.variance, t * sp.exps.sigma2)).max((m.mass - 1.0).abs());
                Ok(CheckItem::new("tilted_moments_density_1e-8", worst <= 1e-8, format!("max relative gap {worst:.3e}")))
            })(),
        );
    }
    if let Some(cfg) = mc {
        rep.push_result(
            "tilted_moments_mc_4se",
            (|| {
                let c = montecarlo::tilted_moment_check(spec, t, x, &cfg.mc, cfg.exec)?;
                let m = c.summary.moment("tilted_mean").expect("present");
                let v = c.summary.moment("tilted_variance").expect("present");
                let ok = (m.mean - c.mean_target).abs() <= 4.0 * m.se
                    && (v.mean - c.variance_target).abs() <= 4.0 * v.se
                    && c.third_bound_holds;
                Ok(CheckItem::new(
                    "tilted_moments_mc_4se",
                    ok,
                    format!(
                        "mean {:.6}±{:.1e} (target {}), variance {:.6}±{:.1e} (target {}), third-moment bound {}",
                        m.mean, m.se, c.mean_target, v.mean, v.se, c.variance_target, c.third_bound
                    ),
                ))
            })(),
        );
    }
    rep
}

pub fn hyp_h(spec: &SubordinatorSpec) -> SuiteReport {
    let mut rep = SuiteReport::new("hypH", Some(spec));
    let r = oracles::hypothesis_h_check(spec, &oracles::DEFAULT_T0_CANDIDATES);
    let mut item = CheckItem::new(
        "hypothesis_h",
        r.verdict == Verdict::Pass,
        format!("verdict {:?}, t0 {}, decay exponent {:.3}", r.verdict, r.t0_used, r.decay_exponent_estimate),
    );
    if spec.is_finite_activity() {
        item.expected_fail = true;
        item.detail.push_str("; compound Poisson cannot satisfy (H)");
    }
    rep.push(item);
    rep
}

pub fn sc(spec: &SubordinatorSpec, t: f64, x: f64) -> SuiteReport {
    let mut rep = SuiteReport::new("sc", Some(spec));
    rep.push_result(
        "regime_report",
        (|| {
            let r = saddle::classify_regime(spec, t, x)?;
            Ok(CheckItem::new(
                "regime_report",
                !r.labels.is_empty() && r.c_t > 0.0,
                format!(
                    "labels {:?}, tH {:.4}, x_rho {:.4}, c_t {:.6e}, b_t {:.6e}, sc00 {:.4e}, SC at 0 max {:.4e}, SC at inf max {:.4e}",
                    r.labels, r.t_h, r.x_rho, r.c_t, r.b_t, r.sc00_ratio, r.sc_at_zero.max, r.sc_at_infinity.max
                ),
            ))
        })(),
    );
    rep.push_result(
        "norming_equation_1e-10",
        (|| {
            let n = saddle::norming_pair(spec, t)?;
            if n.at_bracket_edge {
                return Ok(CheckItem::new("norming_equation_1e-10", true, "t*Q never reaches 1; bracket edge reported"));
            }
            let g = t * spec.q_pi(n.c_t)?;
            Ok(CheckItem::new("norming_equation_1e-10", rel(g, 1.0) <= 1e-10, format!("t*Q(c_t) = {g:.15}")))
        })(),
    );
    rep
}

/// Identical summaries for 1, 4 and 8 workers.
pub fn determinism(spec: &SubordinatorSpec, cfg: &McConfig) -> SuiteReport {
    let mut rep = SuiteReport::new("determinism", Some(spec));
    let run = |w: usize| -> Result<montecarlo::McSummary> {
        let exec = Execution::with_workers(w);
        if spec.is_finite_activity() {
            montecarlo::simulate_passage(spec, 2.0, PassageWindow::Window { t: 1.0, delta: 1.0 }, cfg, exec)
        } else {
            montecarlo::sample_marginal(spec, 1.0, &[0.5, 1.0, 2.0], None, cfg, exec)
        }
    };
    rep.push_result(
        "workers_1_4_8_identical",
        (|| {
            let base = run(1)?;
            let same = [4, 8].iter().map(|&w| run(w)).collect::<Result<Vec<_>>>()?.iter().all(|s| *s == base);
            Ok(CheckItem::new("workers_1_4_8_identical", same, format!("n = {}, seed = {}", cfg.n, cfg.seed)))
        })(),
    );
    rep
}

/// Runs one named suite with the standard arguments.
pub fn run_suite(name: SuiteName, spec: &SubordinatorSpec, t: f64, x: f64, cfg: &BatteryConfig) -> SuiteReport {
    match name {
        SuiteName::Lemma2 => lemma2(spec),
        SuiteName::Moments => moments(spec, t, x, Some(cfg)),
        SuiteName::HypH => hyp_h(spec),
        SuiteName::Sc => sc(spec, t, x),
        SuiteName::Determinism => {
            let small = McConfig { n: cfg.mc.n.min(50_000), ..cfg.mc };
            determinism(spec, &small)
        }
    }
}

/// Exactness and convergence checks on the shipped models.
pub fn estimates(cfg: &BatteryConfig) -> SuiteReport {
    let mut rep = SuiteReport::new("estimates", None);
    let half = SubordinatorSpec::stable_half();
    let grid_t = [0.1, 1.0, 10.0, 100.0];
    let grid_x = [0.05, 0.5, 5.0, 50.0];

    rep.push_result(
        "stable_half_density_exact_1e-8",
        (|| {
            let mut worst: f64 = 0.0;
            for &t in &grid_t {
                for &x in &grid_x {
                    let est = saddle::density_estimate(&half, t, x, x)?;
                    worst = worst.max(est.rel_diff(&oracles::exact_density(&half, t, x)?));
                }
            }
            Ok(CheckItem::new("stable_half_density_exact_1e-8", worst <= 1e-8, format!("worst {worst:.3e}")))
        })(),
    );
    rep.push_result(
        "stable_half_hj_exact_1e-8",
        (|| {
            let mut worst: f64 = 0.0;
            for &t in &grid_t {
                for &x in &grid_x {
                    let est = passage::hj_density(&half, t, x)?.value;
                    worst = worst.max(est.rel_diff(&oracles::exact_hj(&half, t, x)?));
                }
            }
            Ok(CheckItem::new("stable_half_hj_exact_1e-8", worst <= 1e-8, format!("worst {worst:.3e}")))
        })(),
    );
    rep.push_result(
        "stable_half_interval_2pct",
        (|| {
            let mut worst: f64 = 0.0;
            for &(t, x) in &[(10.0, 1.0), (20.0, 1.0), (40.0, 4.0), (16.0, 0.5)] {
                for &k in &[0.01, 0.1, 1.0, 10.0] {
                    let d = k * x / t;
                    let est = passage::hj_interval(&half, t, x, d)?.value.value;
                    worst = worst.max(rel(est, oracles::stable_half_passage_interval(&half, t, x, d)?));
                }
            }
            Ok(CheckItem::new("stable_half_interval_2pct", worst <= 0.02, format!("worst {worst:.3e}")))
        })(),
    );
    rep.push_result(
        "gamma_stirling_rate",
        (|| {
            let g = SubordinatorSpec::gamma(1.0, 1.0)?;
            let mut ok = true;
            let mut detail = String::new();
            for &at in &[10.0, 100.0, 1000.0] {
                let x = 0.5 * at;
                let r = saddle::density_estimate(&g, at, x, x)?.value / oracles::exact_density(&g, at, x)?.value;
                ok &= (r - 1.0).abs() <= 1.0 / (10.0 * at);
                detail.push_str(&format!("at={at}: {:.3e}; ", (r - 1.0).abs()));
            }
            Ok(CheckItem::new("gamma_stirling_rate", ok, detail))
        })(),
    );
    rep.push_result(
        "oracle_triangle_1e-5",
        (|| {
            let mut worst: f64 = 0.0;
            let g = SubordinatorSpec::gamma(1.0, 1.0)?;
            let mut cases = Vec::new();
            for &t in &[2.0, 3.0, 4.0] {
                for &x in &[0.25, 0.5, 1.0] {
                    cases.push((half, t, x));
                }
            }
            for &t in &[10.0, 20.0, 40.0] {
                for &xt in &[0.2, 0.3, 0.4] {
                    cases.push((g, t, xt * t));
                }
            }
            for (m, t, x) in cases {
                let rho = solve_rho(&m, t, x)?.rho;
                let inv = oracles::invert_g(&m, t, x, rho)?.hj_value;
                worst = worst.max(inv.rel_diff(&oracles::convolve_hj(&m, t, x)?));
            }
            Ok(CheckItem::new("oracle_triangle_1e-5", worst <= 1e-5, format!("worst {worst:.3e}")))
        })(),
    );
    rep.push_result(
        "stable_limit_scaling_1e-8",
        (|| {
            let mut worst: f64 = 0.0;
            for &t in &[0.5, 2.0, 8.0, 32.0] {
                for &x in &[0.1, 1.0, 10.0, 100.0] {
                    let lim = passage::stable_limit(&half, t, x, 1.0)?;
                    let h = passage::hj_density(&half, t, x)?.value.scale(t);
                    worst = worst.max(h.rel_diff(&crate::Scaled::from_ln(lim.ln_hj_scaled)));
                }
            }
            Ok(CheckItem::new("stable_limit_scaling_1e-8", worst <= 1e-8, format!("worst {worst:.3e}")))
        })(),
    );
    rep.push_result(
        "creep_split_identity_1e-12",
        (|| {
            let cp = SubordinatorSpec::cp_exp(1.0, 1.0)?.with_drift(0.5)?;
            let mut worst: f64 = 0.0;
            for &(t, x) in &[(20.0, 20.0), (5.0, 3.0), (50.0, 70.0)] {
                for &d in &[0.01, 1.0, 10.0] {
                    let hc = passage::hc_interval(&cp, t, x, d)?.value.value;
                    let hj = passage::hj_interval(&cp, t, x, d)?.value.value;
                    worst = worst.max(rel(hc / (hc + hj), passage::creep_conditional(&cp, t, x)?));
                }
            }
            Ok(CheckItem::new("creep_split_identity_1e-12", worst <= 1e-12, format!("worst {worst:.3e}")))
        })(),
    );
    rep.push_result(
        "kesten_creep_fraction_mc",
        (|| {
            let cp = SubordinatorSpec::cp_exp(1.0, 1.0)?.with_drift(0.5)?;
            let s = montecarlo::simulate_passage(&cp, 1.0, PassageWindow::RunToCrossing, &cfg.mc, cfg.exec)?;
            let e = s.estimate("p_creep").expect("present");
            let target = 0.5 * oracles::potential_density(&cp, oracles::Horizon::Infinite, 1.0)?;
            Ok(CheckItem::new(
                "kesten_creep_fraction_mc",
                (e.p - target).abs() <= 4.0 * e.se,
                format!("{:.6} ± {:.1e} vs {target:.7}", e.p, e.se),
            ))
        })(),
    );
    rep
}

/// The full battery: exactness checks plus every named suite on the
/// shipped models.
pub fn full_battery(cfg: &BatteryConfig) -> Vec<SuiteReport> {
    let models = [
        SubordinatorSpec::stable_half(),
        SubordinatorSpec::stable(0.3, 2.0).expect("valid"),
        SubordinatorSpec::gamma(1.0, 1.0).expect("valid"),
        SubordinatorSpec::cp_exp(1.0, 1.0).expect("valid").with_drift(0.5).expect("valid"),
    ];
    let mut out = vec![estimates(cfg)];
    for m in &models {
        out.push(lemma2(m));
        out.push(hyp_h(m));
    }
    out.push(moments(&models[0], 2.0, 1.0, Some(cfg)));
    out.push(moments(&models[2], 10.0, 5.0, Some(cfg)));
    out.push(moments(&models[3], 20.0, 20.0, None));
    out.push(sc(&models[0], 100.0, 1.0));
    out.push(sc(&models[2], 100.0, 50.0));
    out.push(determinism(&models[3], &McConfig { n: cfg.mc.n.min(50_000), ..cfg.mc }));
    out.push(determinism(&models[0], &McConfig { n: cfg.mc.n.min(50_000), ..cfg.mc }));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lemma2_holds_on_shipped_models() {
        for m in [
            SubordinatorSpec::stable_half(),
            SubordinatorSpec::stable(0.3, 2.0).unwrap(),
            SubordinatorSpec::gamma(1.0, 1.0).unwrap(),
            SubordinatorSpec::cp_exp(1.0, 1.0).unwrap().with_drift(0.5).unwrap(),
        ] {
            let r = lemma2(&m);
            assert!(r.ok(), "{r:?}");
        }
    }

    #[test]
    fn cp_hypothesis_is_an_expected_failure() {
        let r = hyp_h(&SubordinatorSpec::cp_exp(1.0, 1.0).unwrap());
        assert!(!r.items[0].passed && r.items[0].expected_fail && r.ok());
    }

    #[test]
    fn suite_names() {
        for n in SuiteName::ALL {
            assert!(SuiteName::parse(n).is_some());
        }
        assert!(SuiteName::parse("nope").is_none());
    }
}
