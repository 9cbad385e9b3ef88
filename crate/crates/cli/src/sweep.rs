//! Evaluations along one axis, written as CSV.
//!
//! Axis syntax: `t=1..32:log6`, `x=0.5..5:lin10` or `t=1,2,4`. The file is
//! written to a temporary sibling and renamed into place, so a failed sweep
//! leaves nothing behind.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::Args;
use serde_json::Value;

use passagekit::passage;
use passagekit::saddle::{self, solve_rho};
use passagekit::{oracles, Error, Scaled, SubordinatorSpec};

use crate::json::number;
use crate::{CliError, Output, Result};

#[derive(Args, Clone)]
pub struct SweepArgs {
    #[arg(long, default_value = "stable_half")]
    pub model: String,
    /// `t=a..b:logN`, `t=a..b:linN`, `x=...` or a comma list `t=1,2,4`
    #[arg(long)]
    pub axis: String,
    /// density, hJ_density, hJ_interval, hC_density, hC_interval, creep_conditional
    #[arg(long, value_delimiter = ',', default_value = "hJ_density")]
    pub quantity: Vec<String>,
    /// fixed level for a t-axis
    #[arg(long, conflicts_with = "xt")]
    pub x: Option<f64>,
    /// fixed x/t for a t-axis
    #[arg(long)]
    pub xt: Option<f64>,
    /// fixed time for an x-axis
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub delta: f64,
    /// CSV destination; `-` writes to stdout
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AxisVar {
    T,
    X,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub var: AxisVar,
    pub values: Vec<f64>,
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Usage(format!("axis: {}", msg.into()))
}

fn num(s: &str) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|_| bad(format!("'{s}' is not a number")))
}

pub fn parse_axis(text: &str) -> Result<Axis> {
    let (name, spec) = text.split_once('=').ok_or_else(|| bad("expected name=range"))?;
    let var = match name.trim() {
        "t" => AxisVar::T,
        "x" => AxisVar::X,
        other => return Err(bad(format!("unknown axis variable '{other}', expected t or x"))),
    };
    let values = if let Some((range, steps)) = spec.split_once(':') {
        let (a, b) = range.split_once("..").ok_or_else(|| bad("expected a..b before ':'"))?;
        let (a, b) = (num(a)?, num(b)?);
        let (log, n) = if let Some(n) = steps.strip_prefix("log") {
            (true, n)
        } else if let Some(n) = steps.strip_prefix("lin") {
            (false, n)
        } else {
            return Err(bad("expected logN or linN after ':'"));
        };
        let n: usize = n.parse().map_err(|_| bad(format!("'{n}' is not a point count")))?;
        if n < 2 {
            return Err(bad("need at least 2 points"));
        }
        if !(a > 0.0 && b > a && b.is_finite()) {
            return Err(bad("need 0 < a < b"));
        }
        // integer powers of the ratio keep 1..32:log6 exact
        let r = (b / a).powf(1.0 / (n - 1) as f64);
        (0..n)
            .map(|i| {
                if i == n - 1 {
                    b
                } else if log {
                    a * r.powi(i as i32)
                } else {
                    a + (b - a) * (i as f64 / (n - 1) as f64)
                }
            })
            .collect()
    } else {
        spec.split(',').map(num).collect::<Result<Vec<_>>>()?
    };
    if values.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(bad("axis values must be positive"));
    }
    Ok(Axis { var, values })
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Quantity {
    Density,
    HjDensity,
    HjInterval,
    HcDensity,
    HcInterval,
    CreepConditional,
}

impl Quantity {
    fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "density" => Quantity::Density,
            "hJ_density" | "hJ" => Quantity::HjDensity,
            "hJ_interval" => Quantity::HjInterval,
            "hC_density" => Quantity::HcDensity,
            "hC_interval" => Quantity::HcInterval,
            "creep_conditional" => Quantity::CreepConditional,
            _ => return Err(CliError::Usage(format!("unknown quantity '{s}'"))),
        })
    }

    fn name(self) -> &'static str {
        match self {
            Quantity::Density => "density",
            Quantity::HjDensity => "hJ_density",
            Quantity::HjInterval => "hJ_interval",
            Quantity::HcDensity => "hC_density",
            Quantity::HcInterval => "hC_interval",
            Quantity::CreepConditional => "creep_conditional",
        }
    }

    fn estimate(self, spec: &SubordinatorSpec, t: f64, x: f64, d: f64) -> passagekit::Result<Scaled> {
        Ok(match self {
            Quantity::Density => saddle::density_estimate(spec, t, x, x)?,
            Quantity::HjDensity => passage::hj_density(spec, t, x)?.value,
            Quantity::HjInterval => passage::hj_interval(spec, t, x, d)?.value,
            Quantity::HcDensity => passage::hc_density(spec, t, x)?.value,
            Quantity::HcInterval => passage::hc_interval(spec, t, x, d)?.value,
            Quantity::CreepConditional => Scaled::from_value(passage::creep_conditional(spec, t, x)?),
        })
    }

    // None when no reference exists for this model
    fn oracle(self, spec: &SubordinatorSpec, t: f64, x: f64, d: f64) -> passagekit::Result<Option<Scaled>> {
        let r = match self {
            Quantity::Density => oracles::exact_density(spec, t, x),
            Quantity::HjDensity => oracles::convolve_hj(spec, t, x),
            Quantity::HjInterval => oracles::stable_half_passage_interval(spec, t, x, d).map(Scaled::from_value),
            _ => return Ok(None),
        };
        match r {
            Ok(v) => Ok(Some(v)),
            Err(Error::Unsupported(_)) => Ok(None),
            Err(e) => Err(e),
        }
    }
}

fn cell(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v == f64::NEG_INFINITY {
        "underflow".into()
    } else if v == f64::INFINITY {
        "overflow".into()
    } else {
        String::new()
    }
}

pub fn render(spec: &SubordinatorSpec, a: &SweepArgs) -> Result<(String, usize, Vec<String>)> {
    let axis = parse_axis(&a.axis)?;
    let quantities = a.quantity.iter().map(|q| Quantity::parse(q)).collect::<Result<Vec<_>>>()?;
    if quantities.is_empty() {
        return Err(CliError::Usage("no quantity requested".into()));
    }
    let point = |v: f64| -> Result<(f64, f64)> {
        match axis.var {
            AxisVar::T => match (a.x, a.xt) {
                (Some(x), None) => Ok((v, x)),
                (None, Some(xt)) => Ok((v, xt * v)),
                _ => Err(CliError::Usage("a t-axis needs exactly one of --x or --xt".into())),
            },
            AxisVar::X => match a.t {
                Some(t) => Ok((t, v)),
                None => Err(CliError::Usage("an x-axis needs --t".into())),
            },
        }
    };
    let mut header = vec![
        match axis.var {
            AxisVar::T => "t",
            AxisVar::X => "x",
        }
        .to_string(),
        match axis.var {
            AxisVar::T => "x",
            AxisVar::X => "t",
        }
        .to_string(),
        "rho".into(),
        "tH".into(),
    ];
    for q in &quantities {
        let n = q.name();
        header.extend([n.to_string(), format!("ln_{n}"), format!("{n}_oracle"), format!("{n}_ratio"), format!("{n}_rel_err")]);
    }
    let mut text = header.join(",");
    text.push('\n');
    for &v in &axis.values {
        let (t, x) = point(v)?;
        let sp = solve_rho(spec, t, x)?;
        let mut row = vec![cell(v), cell(if axis.var == AxisVar::T { x } else { t }), cell(sp.rho), cell(sp.t_h)];
        for q in &quantities {
            let est = q.estimate(spec, t, x, a.delta)?;
            row.push(cell(est.value));
            row.push(cell(est.ln_value));
            match q.oracle(spec, t, x, a.delta)? {
                Some(o) => {
                    let ratio = (est.ln_value - o.ln_value).exp();
                    row.push(cell(o.value));
                    row.push(cell(ratio));
                    row.push(cell((est.ln_value - o.ln_value).exp_m1().abs()));
                }
                None => row.extend([String::new(), String::new(), String::new()]),
            }
        }
        text.push_str(&row.join(","));
        text.push('\n');
    }
    Ok((text, axis.values.len(), header))
}

fn write_atomic(path: &Path, text: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(text.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| CliError::Io(e.error))?;
    Ok(())
}

pub fn run(spec: &SubordinatorSpec, a: &SweepArgs) -> Result<Output> {
    let (text, rows, header) = render(spec, a)?;
    let mut out = Output::new("sweep");
    out.inputs.insert("model".into(), Value::String(spec.to_string()));
    out.inputs.insert("axis".into(), Value::String(a.axis.clone()));
    out.inputs.insert("quantity".into(), serde_json::to_value(&a.quantity).expect("strings"));
    for (k, v) in [("x", a.x), ("xt", a.xt), ("t", a.t)] {
        if let Some(v) = v {
            out.inputs.insert(k.into(), number(v));
        }
    }
    out.inputs.insert("delta".into(), number(a.delta));
    if a.out.as_os_str() == "-" {
        // CSV replaces the JSON summary on stdout
        print!("{text}");
        out.quiet = true;
        out.results.insert("path".into(), Value::String("-".into()));
    } else {
        write_atomic(&a.out, &text)?;
        out.results.insert("path".into(), Value::String(a.out.display().to_string()));
    }
    out.results.insert("rows".into(), rows.into());
    out.results.insert("columns".into(), serde_json::to_value(&header).expect("strings"));
    Ok(out)
}
