mod json;
mod sweep;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use passagekit::battery::{self, BatteryConfig, SuiteName, SuiteReport};
use passagekit::exec::Execution;
use passagekit::modelstr::parse_model;
use passagekit::montecarlo::{self, McConfig, PassageWindow};
use passagekit::oracles::{self, Horizon};
use passagekit::passage::{self, PassageEstimate, Warning};
use passagekit::saddle::{self, solve_rho};
use passagekit::{Scaled, SubordinatorSpec};

use json::{number, to_value};

pub const SCHEMA_VERSION: &str = "1.0.0";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] passagekit::Error),
    #[error("config: {0}")]
    Config(String),
    #[error("usage: {0}")]
    Usage(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) => e.exit_code() as u8,
            _ => 2,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Parser)]
#[command(name = "passagekit", version, about = "Saddle-point passage estimates for subordinators")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Global {
    /// JSON file with model aliases: {"models": {"name": "gamma:a=2"}}
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, env = "PASSAGEKIT_SEED", default_value_t = 1)]
    seed: u64,
    /// Worker threads for Monte Carlo; results do not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Monte Carlo replicates
    #[arg(long, global = true, default_value_t = 1_000_000)]
    n: u64,
    /// Small-jump truncation for infinite-activity paths
    #[arg(long, global = true, default_value_t = 1e-6)]
    eps: f64,
    #[arg(long, global = true, default_value_t = 10_000_000)]
    step_cap: u64,
    #[arg(long, global = true)]
    pretty: bool,
}

#[derive(Args, Clone)]
struct ModelArg {
    /// name[:key=val,...] or an alias from --config
    #[arg(long, default_value = "stable_half")]
    model: String,
}

#[derive(Args, Clone)]
struct Point {
    #[arg(long)]
    t: f64,
    #[arg(long)]
    x: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleKind {
    ExactDensity,
    ConvolveHj,
    ExactHj,
    InvertG,
    Interval,
    Potential,
    HypH,
    TiltedMoments,
}

#[derive(Clone, Copy, ValueEnum)]
enum McMode {
    Marginal,
    Passage,
    Crossing,
    Tilted,
    Eps,
}

#[derive(Subcommand)]
enum Cmd {
    /// Saddle point, regime labels and norming functions
    Saddle {
        #[command(flatten)]
        m: ModelArg,
        #[command(flatten)]
        p: Point,
    },
    /// Saddle-point density estimate at z, anchored at x
    Density {
        #[command(flatten)]
        m: ModelArg,
        #[command(flatten)]
        p: Point,
        #[arg(long)]
        z: Option<f64>,
    },
    /// Jump and creep passage estimates
    Passage {
        #[command(flatten)]
        m: ModelArg,
        #[command(flatten)]
        p: Point,
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
    },
    /// Exact or numerical reference values
    Oracle {
        #[command(flatten)]
        m: ModelArg,
        #[arg(long, value_enum)]
        kind: OracleKind,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        x: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
        /// tilt for invert-g; defaults to the saddle point
        #[arg(long)]
        lambda: Option<f64>,
    },
    /// Monte Carlo runs
    Mc {
        #[command(flatten)]
        m: ModelArg,
        #[arg(long, value_enum)]
        mode: McMode,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        x: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
        /// CDF probe points for marginal mode
        #[arg(long, value_delimiter = ',')]
        probe: Vec<f64>,
        /// tilt for the marginal weight check
        #[arg(long)]
        tilt: Option<f64>,
    },
    /// Evaluate quantities along an axis and write CSV
    Sweep(sweep::SweepArgs),
    /// Run one named suite on one model
    Check {
        #[command(flatten)]
        m: ModelArg,
        #[arg(long)]
        suite: String,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        x: Option<f64>,
    },
    /// Full acceptance battery, or one suite with --suite
    Verify {
        #[arg(long)]
        suite: Option<String>,
        #[arg(long)]
        model: Option<String>,
    },
}

struct Ctx {
    global: Global,
    aliases: BTreeMap<String, String>,
}

impl Ctx {
    fn new(global: Global) -> Result<Self> {
        let mut aliases = BTreeMap::new();
        if let Some(path) = &global.config {
            let text = std::fs::read_to_string(path)?;
            let v: Value = serde_json::from_str(&text).map_err(|e| CliError::Config(e.to_string()))?;
            if let Some(models) = v.get("models") {
                let obj = models.as_object().ok_or_else(|| CliError::Config("\"models\" must be an object".into()))?;
                for (k, v) in obj {
                    let s = v.as_str().ok_or_else(|| CliError::Config(format!("alias {k} must map to a string")))?;
                    aliases.insert(k.clone(), s.to_string());
                }
            }
        }
        Ok(Ctx { global, aliases })
    }

    fn model(&self, text: &str) -> Result<SubordinatorSpec> {
        let resolved = self.aliases.get(text).map(String::as_str).unwrap_or(text);
        Ok(parse_model(resolved)?)
    }

    fn mc(&self) -> McConfig {
        McConfig { n: self.global.n, seed: self.global.seed, eps: self.global.eps, step_cap: self.global.step_cap }
    }

    fn exec(&self) -> Execution {
        match self.global.workers {
            Some(w) => Execution::with_workers(w),
            None => Execution::default(),
        }
    }

    fn battery(&self) -> BatteryConfig {
        BatteryConfig { mc: self.mc(), exec: self.exec() }
    }
}

pub struct Output {
    command: &'static str,
    inputs: Map<String, Value>,
    diagnostics: Map<String, Value>,
    results: Map<String, Value>,
    warnings: Vec<String>,
    exit: u8,
    /// stdout already carries the result
    quiet: bool,
}

impl Output {
    fn new(command: &'static str) -> Self {
        Output {
            command,
            inputs: Map::new(),
            diagnostics: Map::new(),
            results: Map::new(),
            warnings: Vec::new(),
            exit: 0,
            quiet: false,
        }
    }

    fn warn(&mut self, w: impl Into<String>) {
        let w = w.into();
        if !self.warnings.contains(&w) {
            self.warnings.push(w);
        }
    }

    fn finish(self) -> (Option<Value>, u8) {
        if self.quiet {
            return (None, self.exit);
        }
        let v = json!({
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "inputs": self.inputs,
            "diagnostics": self.diagnostics,
            "results": self.results,
            "warnings": self.warnings,
        });
        (Some(v), self.exit)
    }
}

// value as a plain number, or "underflow" when only the log survives
fn scaled_number(s: &Scaled) -> Value {
    if s.underflow {
        Value::String("underflow".into())
    } else {
        number(s.value)
    }
}

fn echo_model(out: &mut Output, spec: &SubordinatorSpec) {
    out.inputs.insert("model".into(), Value::String(spec.to_string()));
}

fn echo(out: &mut Output, key: &str, v: f64) {
    out.inputs.insert(key.into(), number(v));
}

fn echo_mc(out: &mut Output, cfg: &McConfig) {
    out.inputs.insert("mc".into(), to_value(cfg));
}

fn saddle_cmd(ctx: &Ctx, model: &str, p: &Point) -> Result<Output> {
    let spec = ctx.model(model)?;
    let mut out = Output::new("saddle");
    echo_model(&mut out, &spec);
    echo(&mut out, "t", p.t);
    echo(&mut out, "x", p.x);
    let sp = solve_rho(&spec, p.t, p.x)?;
    let regime = saddle::classify_regime(&spec, p.t, p.x)?;
    out.diagnostics.insert("saddle_point".into(), to_value(&sp));
    out.diagnostics.insert("regime".into(), to_value(&regime));
    out.diagnostics.insert("tH".into(), number(sp.t_h));
    out.results.insert("rho".into(), number(sp.rho));
    out.results.insert("x_rho".into(), number(sp.x_rho));
    out.results.insert("tH".into(), number(sp.t_h));
    out.results.insert("s_t".into(), number(sp.s_t));
    out.results.insert("labels".into(), to_value(&regime.labels));
    out.results.insert("c_t".into(), number(regime.c_t));
    out.results.insert("b_t".into(), number(regime.b_t));
    match saddle::lambda_diagnostic(&spec, p.t, p.x) {
        Ok(l) => {
            out.results.insert("lambda_bar".into(), number(l.lambda_bar));
        }
        Err(e) => out.warn(format!("lambda diagnostic unavailable: {e}")),
    }
    if regime.c_t_at_bracket_edge {
        out.warn("norming c(t) at bracket edge");
    }
    if sp.pre_asymptotic() {
        out.warn("pre-asymptotic");
    }
    Ok(out)
}

fn density_cmd(ctx: &Ctx, model: &str, p: &Point, z: Option<f64>) -> Result<Output> {
    let spec = ctx.model(model)?;
    let z = z.unwrap_or(p.x);
    let mut out = Output::new("density");
    echo_model(&mut out, &spec);
    echo(&mut out, "t", p.t);
    echo(&mut out, "x", p.x);
    echo(&mut out, "z", z);
    let sp = solve_rho(&spec, p.t, p.x)?;
    let est = saddle::density_estimate_at(&sp, z)?;
    out.diagnostics.insert("saddle_point".into(), to_value(&sp));
    out.diagnostics.insert("tH".into(), number(sp.t_h));
    out.results.insert("density".into(), scaled_number(&est));
    out.results.insert("ln_density".into(), number(est.ln_value));
    match oracles::exact_density(&spec, p.t, z) {
        Ok(ex) => {
            out.results.insert("exact_density".into(), scaled_number(&ex));
            out.results.insert("ln_exact_density".into(), number(ex.ln_value));
            out.results.insert("ratio".into(), number((est.ln_value - ex.ln_value).exp()));
        }
        Err(passagekit::Error::Unsupported(why)) => out.warn(format!("no exact density: {why}")),
        Err(e) => return Err(e.into()),
    }
    if est.underflow {
        out.warn("underflow");
    }
    if sp.pre_asymptotic() {
        out.warn("pre-asymptotic");
    }
    Ok(out)
}

fn passage_cmd(ctx: &Ctx, model: &str, p: &Point, delta: f64) -> Result<Output> {
    let spec = ctx.model(model)?;
    let mut out = Output::new("passage");
    echo_model(&mut out, &spec);
    echo(&mut out, "t", p.t);
    echo(&mut out, "x", p.x);
    echo(&mut out, "delta", delta);
    let ests: [(&str, PassageEstimate); 4] = [
        ("hJ_density", passage::hj_density(&spec, p.t, p.x)?),
        ("hJ_interval", passage::hj_interval(&spec, p.t, p.x, delta)?),
        ("hC_density", passage::hc_density(&spec, p.t, p.x)?),
        ("hC_interval", passage::hc_interval(&spec, p.t, p.x, delta)?),
    ];
    let sp = ests[0].1.sp;
    out.diagnostics.insert("saddle_point".into(), to_value(&sp));
    out.diagnostics.insert("tH".into(), number(sp.t_h));
    let mut ln = Map::new();
    let mut components = Map::new();
    for (name, e) in &ests {
        out.results.insert((*name).into(), scaled_number(&e.value));
        // exact zeros (no drift) have no log to report
        if e.value.ln_value > f64::NEG_INFINITY {
            ln.insert((*name).into(), number(e.value.ln_value));
        }
        components.insert((*name).into(), to_value(&e.components));
        for w in &e.warnings {
            // zero drift is a fact about the model, reported below
            if *w != Warning::ZeroDrift {
                out.warn(to_value(w).as_str().unwrap_or_default().to_string());
            }
        }
    }
    out.results.insert("creep_conditional".into(), number(passage::creep_conditional(&spec, p.t, p.x)?));
    out.results.insert("creep_possible".into(), Value::Bool(spec.drift() > 0.0));
    out.results.insert("ln".into(), Value::Object(ln));
    out.diagnostics.insert("components".into(), Value::Object(components));
    if let passagekit::Kind::Stable { .. } = spec.kind() {
        let lim = passage::stable_limit(&spec, p.t, p.x, delta)?;
        out.diagnostics.insert("stable_limit".into(), to_value(&lim));
    }
    Ok(out)
}

fn need(v: Option<f64>, name: &str) -> Result<f64> {
    v.ok_or_else(|| CliError::Usage(format!("--{name} is required here")))
}

fn oracle_cmd(
    ctx: &Ctx,
    model: &str,
    kind: OracleKind,
    t: Option<f64>,
    x: Option<f64>,
    delta: Option<f64>,
    lambda: Option<f64>,
) -> Result<Output> {
    let spec = ctx.model(model)?;
    let mut out = Output::new("oracle");
    echo_model(&mut out, &spec);
    let kind_name = kind.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
    out.inputs.insert("kind".into(), Value::String(kind_name));
    for (k, v) in [("t", t), ("x", x), ("delta", delta), ("lambda", lambda)] {
        if let Some(v) = v {
            echo(&mut out, k, v);
        }
    }
    match kind {
        OracleKind::ExactDensity => {
            let v = oracles::exact_density(&spec, need(t, "t")?, need(x, "x")?)?;
            out.results.insert("exact_density".into(), scaled_number(&v));
            out.results.insert("ln_value".into(), number(v.ln_value));
        }
        OracleKind::ConvolveHj | OracleKind::ExactHj => {
            let (t, x) = (need(t, "t")?, need(x, "x")?);
            let v = match kind {
                OracleKind::ConvolveHj => oracles::convolve_hj(&spec, t, x)?,
                _ => oracles::exact_hj(&spec, t, x)?,
            };
            out.results.insert("hJ".into(), scaled_number(&v));
            out.results.insert("ln_value".into(), number(v.ln_value));
        }
        OracleKind::InvertG => {
            let (t, x) = (need(t, "t")?, need(x, "x")?);
            let lambda = match lambda {
                Some(l) => l,
                None => solve_rho(&spec, t, x)?.rho,
            };
            let g = oracles::invert_g(&spec, t, x, lambda)?;
            out.results.insert("g_value".into(), number(g.g_value));
            out.results.insert("hJ_value".into(), scaled_number(&g.hj_value));
            out.results.insert("ln_hJ_value".into(), number(g.hj_value.ln_value));
            out.diagnostics.insert("grid".into(), to_value(&g.grid));
        }
        OracleKind::Interval => {
            let v = oracles::stable_half_passage_interval(&spec, need(t, "t")?, need(x, "x")?, need(delta, "delta")?)?;
            out.results.insert("passage_interval".into(), number(v));
        }
        OracleKind::Potential => {
            let y = need(x, "x")?;
            let horizon = match delta {
                Some(d) => Horizon::Finite(d),
                None => Horizon::Infinite,
            };
            out.results.insert("potential_density".into(), number(oracles::potential_density(&spec, horizon, y)?));
        }
        OracleKind::HypH => {
            let r = oracles::hypothesis_h_check(&spec, &oracles::DEFAULT_T0_CANDIDATES);
            out.results.insert("verdict".into(), to_value(&r.verdict));
            out.diagnostics.insert("report".into(), to_value(&r));
        }
        OracleKind::TiltedMoments => {
            let (t, x) = (need(t, "t")?, need(x, "x")?);
            let sp = solve_rho(&spec, t, x)?;
            let m = oracles::tilted_moments_from_measure(&spec, t, sp.rho)?;
            out.results.insert("from_measure".into(), to_value(&m));
            match oracles::tilted_moments_from_density(&spec, t, sp.rho) {
                Ok(d) => {
                    out.results.insert("from_density".into(), to_value(&d));
                }
                Err(passagekit::Error::Unsupported(why)) => out.warn(format!("no density route: {why}")),
                Err(e) => return Err(e.into()),
            }
            out.results.insert("mean_target".into(), number(x));
            out.results.insert("variance_target".into(), number(t * sp.exps.sigma2));
        }
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn mc_cmd(
    ctx: &Ctx,
    model: &str,
    mode: McMode,
    t: Option<f64>,
    x: Option<f64>,
    delta: f64,
    probe: &[f64],
    tilt: Option<f64>,
) -> Result<Output> {
    let spec = ctx.model(model)?;
    let cfg = ctx.mc();
    let exec = ctx.exec();
    let mut out = Output::new("mc");
    echo_model(&mut out, &spec);
    echo_mc(&mut out, &cfg);
    let mode_name = mode.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
    out.inputs.insert("mode".into(), Value::String(mode_name));
    let summary = match mode {
        McMode::Marginal => {
            let t = need(t, "t")?;
            echo(&mut out, "t", t);
            out.inputs.insert("probe".into(), to_value(probe));
            if let Some(r) = tilt {
                echo(&mut out, "tilt", r);
            }
            to_value(&montecarlo::sample_marginal(&spec, t, probe, tilt, &cfg, exec)?)
        }
        McMode::Passage => {
            let (t, x) = (need(t, "t")?, need(x, "x")?);
            echo(&mut out, "t", t);
            echo(&mut out, "x", x);
            echo(&mut out, "delta", delta);
            let s = montecarlo::simulate_passage(&spec, x, PassageWindow::Window { t, delta }, &cfg, exec)?;
            if s.approximate_creep_flag {
                out.warn("approximate-creep");
            }
            to_value(&s)
        }
        McMode::Crossing => {
            let x = need(x, "x")?;
            echo(&mut out, "x", x);
            let s = montecarlo::simulate_passage(&spec, x, PassageWindow::RunToCrossing, &cfg, exec)?;
            if s.approximate_creep_flag {
                out.warn("approximate-creep");
            }
            to_value(&s)
        }
        McMode::Tilted => {
            let (t, x) = (need(t, "t")?, need(x, "x")?);
            echo(&mut out, "t", t);
            echo(&mut out, "x", x);
            to_value(&montecarlo::tilted_moment_check(&spec, t, x, &cfg, exec)?)
        }
        McMode::Eps => {
            let (t, x) = (need(t, "t")?, need(x, "x")?);
            echo(&mut out, "t", t);
            echo(&mut out, "x", x);
            echo(&mut out, "delta", delta);
            to_value(&montecarlo::eps_sensitivity(&spec, x, t, delta, &cfg, exec)?)
        }
    };
    out.results.insert("mc".into(), summary);
    Ok(out)
}

// t = 2 and x_t halfway into (b, μ), or b + 1/2 when μ is infinite
fn default_point(spec: &SubordinatorSpec, t: Option<f64>, x: Option<f64>) -> (f64, f64) {
    let t = t.unwrap_or(2.0);
    let b = spec.drift();
    let mu = spec.mean_mu();
    let xt = if mu.is_finite() { 0.5 * (b + mu) } else { b + 0.5 };
    (t, x.unwrap_or(xt * t))
}

fn suite_name(s: &str) -> Result<SuiteName> {
    SuiteName::parse(s).ok_or_else(|| CliError::Usage(format!("unknown suite '{s}', expected one of {:?}", SuiteName::ALL)))
}

fn report_exit(out: &mut Output, reports: &[SuiteReport]) {
    let ok = reports.iter().all(SuiteReport::ok);
    out.results.insert("all_passed".into(), Value::Bool(ok));
    let expected: Vec<String> = reports
        .iter()
        .flat_map(|r| r.items.iter().filter(|i| i.expected_fail).map(move |i| format!("{}/{}", r.suite, i.name)))
        .collect();
    if !expected.is_empty() {
        out.results.insert("expected_failures".into(), to_value(&expected));
    }
    out.exit = if ok { 0 } else { 4 };
}

fn check_cmd(ctx: &Ctx, model: &str, suite: &str, t: Option<f64>, x: Option<f64>) -> Result<Output> {
    let spec = ctx.model(model)?;
    let name = suite_name(suite)?;
    let (t, x) = default_point(&spec, t, x);
    let mut out = Output::new("check");
    echo_model(&mut out, &spec);
    out.inputs.insert("suite".into(), Value::String(suite.into()));
    echo(&mut out, "t", t);
    echo(&mut out, "x", x);
    if matches!(name, SuiteName::Moments | SuiteName::Determinism) {
        echo_mc(&mut out, &ctx.mc());
    }
    let rep = battery::run_suite(name, &spec, t, x, &ctx.battery());
    out.results.insert("report".into(), to_value(&rep));
    report_exit(&mut out, std::slice::from_ref(&rep));
    Ok(out)
}

fn verify_cmd(ctx: &Ctx, suite: Option<&str>, model: Option<&str>) -> Result<Output> {
    let mut out = Output::new("verify");
    echo_mc(&mut out, &ctx.mc());
    let reports = match suite {
        Some(s) => {
            let name = suite_name(s)?;
            let spec = ctx.model(model.unwrap_or("stable_half"))?;
            let (t, x) = default_point(&spec, None, None);
            echo_model(&mut out, &spec);
            out.inputs.insert("suite".into(), Value::String(s.into()));
            vec![battery::run_suite(name, &spec, t, x, &ctx.battery())]
        }
        None => {
            if model.is_some() {
                return Err(CliError::Usage("--model needs --suite; the full battery fixes its own models".into()));
            }
            battery::full_battery(&ctx.battery())
        }
    };
    out.results.insert("suites".into(), to_value(&reports));
    report_exit(&mut out, &reports);
    Ok(out)
}

fn run(cli: Cli) -> Result<Output> {
    let ctx = Ctx::new(cli.global)?;
    match &cli.cmd {
        Cmd::Saddle { m, p } => saddle_cmd(&ctx, &m.model, p),
        Cmd::Density { m, p, z } => density_cmd(&ctx, &m.model, p, *z),
        Cmd::Passage { m, p, delta } => passage_cmd(&ctx, &m.model, p, *delta),
        Cmd::Oracle { m, kind, t, x, delta, lambda } => oracle_cmd(&ctx, &m.model, *kind, *t, *x, *delta, *lambda),
        Cmd::Mc { m, mode, t, x, delta, probe, tilt } => mc_cmd(&ctx, &m.model, *mode, *t, *x, *delta, probe, *tilt),
        Cmd::Sweep(a) => {
            let spec = ctx.model(&a.model)?;
            sweep::run(&spec, a)
        }
        Cmd::Check { m, suite, t, x } => check_cmd(&ctx, &m.model, suite, *t, *x),
        Cmd::Verify { suite, model } => verify_cmd(&ctx, suite.as_deref(), model.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pretty = cli.global.pretty;
    match run(cli) {
        Ok(out) => {
            let (v, code) = out.finish();
            let Some(v) = v else { return ExitCode::from(code) };
            let text = if pretty { serde_json::to_string_pretty(&v) } else { serde_json::to_string(&v) };
            // a closed pipe downstream is not our failure
            let _ = writeln!(std::io::stdout().lock(), "{}", text.expect("values are valid JSON"));
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
