//! Command-line front end. Every sub-command prints one JSON `RunReport`
//! (index scans print CSV).

mod commands;
mod selftest;

use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::angles::Angle;
use crate::dynamics::C64;

#[derive(Debug, Parser)]
#[command(name = "multicorn", version, about = "Parameter rays of the multicorns")]
pub struct Cli {
    /// Worker threads (falls back to MULTICORN_THREADS).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Write the report (or CSV, or image) here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Accepted for compatibility; reports are always JSON.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

/// `re,im`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(pub C64);

impl FromStr for Point {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (re, im) = s.split_once(',').ok_or_else(|| format!("expected re,im but got {s:?}"))?;
        let p = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}"));
        Ok(Point(C64::new(p(re)?, p(im)?)))
    }
}

/// `WxH`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Px(pub u32, pub u32);

impl FromStr for Px {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (w, h) = s.split_once('x').ok_or_else(|| format!("expected WxH but got {s:?}"))?;
        let p = |x: &str| match x.parse::<u32>() {
            Ok(v) if v > 0 => Ok(v),
            _ => Err(format!("bad pixel count {x:?}")),
        };
        Ok(Px(p(w)?, p(h)?))
    }
}

/// `a:b:n`, `n` equally spaced samples from `a` to `b` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub start: f64,
    pub end: f64,
    pub n: usize,
}

impl FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("expected a:b:n but got {s:?}"));
        }
        let f = |x: &str| x.parse::<f64>().map_err(|e| format!("{x:?}: {e}"));
        let n = parts[2].parse::<usize>().map_err(|e| format!("{:?}: {e}", parts[2]))?;
        if n == 0 {
            return Err("n must be positive".into());
        }
        Ok(Range { start: f(parts[0])?, end: f(parts[1])?, n })
    }
}

impl Range {
    pub fn values(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.start];
        }
        (0..self.n).map(|i| self.start + (self.end - self.start) * i as f64 / (self.n - 1) as f64).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceKind {
    Param,
    Dyn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RenderTarget {
    Multicorn,
    Julia,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Classify the parameter ray at a rational angle.
    Classify {
        #[arg(long, default_value_t = 2)]
        degree: u32,
        #[arg(long)]
        angle: Angle,
    },
    /// Orbit of an angle under t -> -d t.
    Orbit {
        #[arg(long, default_value_t = 2)]
        degree: u32,
        #[arg(long)]
        angle: Angle,
    },
    /// Candidate orbit portrait and its validation.
    Portrait {
        #[arg(long, default_value_t = 2)]
        degree: u32,
        #[arg(long)]
        angle: Angle,
    },
    /// Trace a parameter or dynamical ray.
    Trace {
        #[arg(long, value_enum)]
        kind: TraceKind,
        #[arg(long, default_value_t = 2)]
        degree: u32,
        #[arg(long)]
        angle: Angle,
        /// Parameter for dynamical rays.
        #[arg(long, allow_hyphen_values = true)]
        param: Option<Point>,
        #[arg(long, default_value_t = 1.000001)]
        rmin: f64,
        #[arg(long, default_value_t = 1.1)]
        ratio: f64,
    },
    /// Fatou coordinates at a period-1 arc point.
    Fatou {
        #[arg(long, default_value_t = 2)]
        degree: u32,
        #[arg(long, allow_hyphen_values = true, conflicts_with = "height")]
        phi: Option<f64>,
        /// Critical Ecalle height to locate on the arc.
        #[arg(long, allow_hyphen_values = true)]
        height: Option<f64>,
    },
    /// Project a dynamical ray into the repelling Ecalle cylinder.
    Cylinder {
        #[arg(long, default_value_t = 2)]
        degree: u32,
        #[arg(long)]
        angle: Angle,
        /// Defaults to the arc point c_d when the period is 1.
        #[arg(long, allow_hyphen_values = true)]
        param: Option<Point>,
        #[arg(long, default_value_t = 1)]
        period: usize,
    },
    /// Certificate for a round escaping annulus at a period-1 arc point.
    Undecorated {
        #[arg(long, default_value_t = 2)]
        degree: u32,
        #[arg(long, allow_hyphen_values = true)]
        param: Option<Point>,
        #[arg(long, default_value_t = 0.02)]
        floor: f64,
        #[arg(long, default_value_t = 1024)]
        probes: usize,
    },
    /// Transit counts through the gate for perturbations off an arc point.
    Gate {
        #[arg(long, default_value_t = 2)]
        degree: u32,
        #[arg(long, required = true, num_args = 1..)]
        s: Vec<f64>,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        phi: f64,
    },
    /// Fixed-point index along the period-1 arc, as CSV.
    IndexScan {
        #[arg(long, default_value_t = 2)]
        degree: u32,
        #[arg(long = "phi-range", allow_hyphen_values = true)]
        phi_range: Range,
    },
    /// Trace, wiggle metric and height interval for one angle.
    WiggleReport {
        #[arg(long, default_value_t = 2)]
        degree: u32,
        #[arg(long)]
        angle: Angle,
        #[arg(long, default_value_t = 1.0000001)]
        rmin: f64,
        #[arg(long, default_value_t = 1.0001)]
        rcut: f64,
    },
    /// Render the parameter plane or a filled Julia set as PPM.
    Render {
        #[arg(value_enum)]
        target: RenderTarget,
        #[arg(long, default_value_t = 2)]
        degree: u32,
        #[arg(long, allow_hyphen_values = true)]
        param: Option<Point>,
        #[arg(long, allow_hyphen_values = true, default_value = "0,0")]
        center: Point,
        #[arg(long, default_value_t = 4.5)]
        width: f64,
        #[arg(long, default_value = "600x600")]
        px: Px,
        #[arg(long, default_value_t = 1000)]
        max_iter: usize,
        #[arg(long, default_value_t = 0)]
        palette: u32,
        /// JSON list of overlays.
        #[arg(long)]
        overlay: Option<PathBuf>,
    },
    /// Fast subset of the acceptance checks.
    Selftest,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Classify { .. } => "classify",
            Command::Orbit { .. } => "orbit",
            Command::Portrait { .. } => "portrait",
            Command::Trace { .. } => "trace",
            Command::Fatou { .. } => "fatou",
            Command::Cylinder { .. } => "cylinder",
            Command::Undecorated { .. } => "undecorated",
            Command::Gate { .. } => "gate",
            Command::IndexScan { .. } => "index-scan",
            Command::WiggleReport { .. } => "wiggle-report",
            Command::Render { .. } => "render",
            Command::Selftest => "selftest",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub parameters: Value,
    pub results: Value,
    pub version: String,
    pub timing: Timing,
}

/// What a command produced, or why it stopped.
pub enum Failure {
    Usage(String),
    Numeric { message: String, partial: Value },
}

impl<E: std::error::Error> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Numeric { message: e.to_string(), partial: Value::Null }
    }
}

pub enum Output {
    Report(Value),
    Csv(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn configure_threads(n: Option<usize>) {
    let n = n.or_else(|| std::env::var("MULTICORN_THREADS").ok().and_then(|v| v.parse().ok()));
    if let Some(n) = n {
        // the global pool can only be set once per process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn parameters(cmd: &Command) -> Value {
    match serde_json::to_value(cmd) {
        Ok(Value::Object(map)) if map.len() == 1 => map.into_iter().next().map(|x| x.1).unwrap_or(Value::Null),
        _ => Value::Object(Default::default()),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    configure_threads(cli.threads);
    let start = Instant::now();
    let mut stderr = String::new();
    let result = commands::execute(&cli, &mut stderr);
    let report = |results: Value| RunReport {
        command: cli.command.name().to_string(),
        parameters: parameters(&cli.command),
        results,
        version: env!("CARGO_PKG_VERSION").to_string(),
        timing: Timing { seconds: start.elapsed().as_secs_f64() },
    };
    let (code, text) = match result {
        Ok(Output::Csv(csv)) => (0, csv),
        Ok(Output::Report(v)) => {
            let failed = v.get("passed") == Some(&Value::Bool(false));
            (i32::from(failed), to_json(&report(v)))
        }
        Err(Failure::Usage(msg)) => {
            stderr.push_str(&format!("error: {msg}\n\nFor more information, try '--help'.\n"));
            return Outcome { code: 2, stdout: String::new(), stderr };
        }
        Err(Failure::Numeric { message, partial }) => {
            stderr.push_str(&format!("error: {message}\n"));
            (1, to_json(&report(serde_json::json!({ "error": message, "partial": partial }))))
        }
    };
    // the render command writes its image to --out; everything else may redirect its report
    let to_file = match &cli.command {
        Command::Render { .. } => None,
        _ => cli.out.as_ref(),
    };
    match to_file {
        Some(path) => match std::fs::write(path, &text) {
            Ok(()) => Outcome { code, stdout: String::new(), stderr },
            Err(e) => {
                stderr.push_str(&format!("error: cannot write {}: {e}\n", path.display()));
                Outcome { code: 1, stdout: text, stderr }
            }
        },
        None => Outcome { code, stdout: text, stderr },
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}
