//! The `subell` command line: config loading, task dispatch, reports.

mod config;
mod output;
mod tasks;

pub use config::{config_schema, Format, OutputConfig, RunConfig, TaskConfig};
pub use output::{tabulate, RunReport};
pub use tasks::{execute, Description, Payload, ResidualRow, ResidualTable};

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;
use thiserror::Error;

use crate::geometry::GeometrySpec;
use crate::liouville::{ConditionId, CounterexampleId, LiouvilleError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config error in {source_name} at '{pointer}': {message}")]
    Config {
        source_name: String,
        pointer: String,
        message: String,
    },
    #[error(transparent)]
    Run(#[from] LiouvilleError),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Parser)]
#[command(name = "subell", version, about = "Sub-Riemannian calculus and Liouville-condition checker")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Dimensions, homogeneous dimension and singular set of a geometry.
    Describe,
    /// Operator residual of an expression at points.
    Residual,
    /// Sign of the residual of a Lyapunov candidate on an annulus.
    VerifyLyapunov,
    /// A sufficient condition from the catalog, plus its Lyapunov follow-up.
    Check,
    /// Pointwise certificate of an explicit counterexample.
    Certify,
    /// Zero residual of a radial fundamental solution.
    Fundamental,
    /// Scaled suprema on dyadic annuli.
    Growth,
    /// Premises of the comparison principle for a pair `u`, `v`.
    Compare,
    /// Print the JSON Schema of the config file.
    Schema,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Describe => "describe",
            Command::Residual => "residual",
            Command::VerifyLyapunov => "verify-lyapunov",
            Command::Check => "check",
            Command::Certify => "certify",
            Command::Fundamental => "fundamental",
            Command::Growth => "growth",
            Command::Compare => "compare",
            Command::Schema => "schema",
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// JSON run config.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Inline geometry JSON, overriding the config.
    #[arg(long, global = true)]
    pub geometry: Option<String>,
    /// Counterexample id for `certify`.
    #[arg(long, global = true)]
    pub id: Option<String>,
    /// Condition id for `check`.
    #[arg(long, global = true)]
    pub condition: Option<String>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub rungs: Option<usize>,
    #[arg(long, global = true)]
    pub r0: Option<f64>,
    #[arg(long, global = true)]
    pub per_rung: Option<usize>,
    /// Report path; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Size of the worker pool.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Record wall-clock time in the report.
    #[arg(long, global = true)]
    pub timing: bool,
}

/// JSON pointer of a `serde_path_to_error` path.
fn pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => out.push_str(&format!("/{index}")),
            Segment::Map { key } => out.push_str(&format!("/{}", key.replace('~', "~0").replace('/', "~1"))),
            Segment::Enum { .. } | Segment::Unknown => {}
        }
    }
    if out.is_empty() {
        out.push('/');
    }
    out
}

type ValueTest = Box<dyn Fn(&Value) -> bool>;

/// The JSON value named by the message's "invalid type: ..." clause.
fn unexpected(message: &str) -> Option<ValueTest> {
    let rest = message
        .strip_prefix("invalid type: ")
        .or_else(|| message.strip_prefix("invalid value: "))?;
    let ticked = |prefix: &str| {
        rest.strip_prefix(prefix)
            .and_then(|r| r.strip_prefix('`'))
            .and_then(|r| r.split('`').next())
            .map(str::to_string)
    };
    if let Some(r) = rest.strip_prefix("string \"") {
        let text = r.rsplit_once("\", expected").map_or(r, |(t, _)| t).to_string();
        return Some(Box::new(move |v| v.as_str() == Some(text.as_str())));
    }
    if let Some(n) = ticked("integer ").or_else(|| ticked("floating point ")) {
        let n: f64 = n.parse().ok()?;
        return Some(Box::new(move |v| v.as_f64() == Some(n)));
    }
    if let Some(b) = ticked("boolean ") {
        let b: bool = b.parse().ok()?;
        return Some(Box::new(move |v| v.as_bool() == Some(b)));
    }
    if rest.starts_with("null") {
        return Some(Box::new(Value::is_null));
    }
    if rest.starts_with("map") {
        return Some(Box::new(Value::is_object));
    }
    if rest.starts_with("sequence") {
        return Some(Box::new(Value::is_array));
    }
    None
}

fn find(v: &Value, path: &mut Vec<String>, hit: &dyn Fn(&str, &Value) -> bool, out: &mut Vec<String>) {
    let mut visit = |key: String, child: &Value, path: &mut Vec<String>| {
        path.push(key.replace('~', "~0").replace('/', "~1"));
        if hit(&key, child) {
            out.push(format!("/{}", path.join("/")));
        }
        find(child, path, hit, out);
        path.pop();
    };
    match v {
        Value::Object(m) => m.iter().for_each(|(k, c)| visit(k.clone(), c, path)),
        Value::Array(a) => a.iter().enumerate().for_each(|(i, c)| visit(i.to_string(), c, path)),
        _ => {}
    }
}

/// Serde reports errors inside tagged enums at the enum itself; this
/// narrows the pointer to the unique key the message singles out.
fn refine(root: &Value, pointer: &str, message: &str) -> String {
    let node = if pointer == "/" { Some(root) } else { root.pointer(pointer) };
    let Some(node) = node else {
        return pointer.to_string();
    };
    let mut out = Vec::new();
    if let Some(name) = message.strip_prefix("unknown field `").and_then(|r| r.split('`').next()) {
        find(node, &mut Vec::new(), &|k, _| k == name, &mut out);
    } else if let Some(pred) = unexpected(message) {
        find(node, &mut Vec::new(), &|_, v| pred(v), &mut out);
    }
    match out.as_slice() {
        [one] => format!("{}{one}", pointer.trim_end_matches('/')),
        _ => pointer.to_string(),
    }
}

fn parse_json<T: serde::de::DeserializeOwned>(src: &str, source_name: &str, prefix: &str) -> Result<T, CliError> {
    let de = &mut serde_json::Deserializer::from_str(src);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let message = e.inner().to_string();
        let mut p = pointer(e.path());
        if let Ok(root) = serde_json::from_str::<Value>(src) {
            p = refine(&root, &p, &message);
        }
        let pointer = match (prefix, p.as_str()) {
            ("", _) => p.clone(),
            (_, "/") => prefix.to_string(),
            _ => format!("{prefix}{p}"),
        };
        CliError::Config {
            source_name: source_name.to_string(),
            pointer,
            message,
        }
    })
}

/// Parses a run config, reporting the JSON pointer of the offending key.
pub fn parse_config(src: &str, source_name: &str) -> Result<RunConfig, CliError> {
    parse_json(src, source_name, "")
}

/// Applies command-line overrides and fills in the task for `cmd`.
pub fn resolve(cmd: Command, mut cfg: RunConfig, args: &CommonArgs) -> Result<RunConfig, CliError> {
    if let Some(src) = &args.geometry {
        cfg.geometry = Some(parse_json::<GeometrySpec>(src, "--geometry", "/geometry")?);
    }
    if let Some(seed) = args.seed {
        cfg.sampling.seed = seed;
    }
    if let Some(r) = args.rungs {
        cfg.sampling.rungs = r;
    }
    if let Some(r0) = args.r0 {
        cfg.sampling.r0 = r0;
    }
    if let Some(n) = args.per_rung {
        cfg.sampling.per_rung = n;
    }
    if let Some(out) = &args.out {
        cfg.output.path = Some(out.display().to_string());
    }
    if let Some(f) = args.format {
        cfg.output.format = f;
    }
    let id = args.id.as_deref().map(str::parse::<CounterexampleId>).transpose()?;
    let condition = args.condition.as_deref().map(str::parse::<ConditionId>).transpose()?;
    let task = match (cmd, cfg.task.take()) {
        (_, Some(t)) if t.name() != cmd.name() => {
            return Err(CliError::Usage(format!(
                "config task is '{}' but the subcommand is '{}'",
                t.name(),
                cmd.name()
            )))
        }
        (_, Some(mut t)) => {
            match &mut t {
                TaskConfig::Certify { id: cur, .. } => *cur = id.unwrap_or(*cur),
                TaskConfig::Check { condition: cur, .. } => *cur = condition.unwrap_or(*cur),
                _ => {}
            }
            t
        }
        (Command::Describe, None) => TaskConfig::Describe,
        (Command::Certify, None) => TaskConfig::Certify {
            id: id.ok_or_else(|| CliError::Usage("certify needs --id or a task section".into()))?,
            options: Default::default(),
        },
        (Command::Check, None) => TaskConfig::Check {
            condition: condition.ok_or_else(|| CliError::Usage("check needs --condition or a task section".into()))?,
            params: Default::default(),
            lyapunov: true,
        },
        (Command::VerifyLyapunov, None) => TaskConfig::VerifyLyapunov {
            candidate: crate::liouville::CandidateJson::LogRho,
            annulus: None,
        },
        (c, None) => return Err(CliError::Usage(format!("{} needs a task section in the config", c.name()))),
    };
    if let TaskConfig::Certify { id, .. } = &task {
        if cfg.geometry.is_none() {
            cfg.geometry = Some(id.default_geometry());
        }
    }
    cfg.task = Some(task);
    cfg.sampling.validate().map_err(|m| CliError::Config {
        source_name: "sampling".into(),
        pointer: "/sampling".into(),
        message: m,
    })?;
    Ok(cfg)
}

fn load(cmd: Command, args: &CommonArgs) -> Result<RunConfig, CliError> {
    let cfg = match &args.config {
        Some(path) => {
            let src = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            parse_config(&src, &path.display().to_string())?
        }
        None => RunConfig::default(),
    };
    resolve(cmd, cfg, args)
}

fn run_parsed(cli: &Cli) -> Result<i32, CliError> {
    if cli.command == Command::Schema {
        print!("{}", config_schema());
        return Ok(0);
    }
    let cfg = load(cli.command, &cli.common)?;
    let start = Instant::now();
    let work = || execute(&cfg);
    let payload = match cli.common.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| CliError::Usage(format!("worker pool: {e}")))?
            .install(work)?,
        None => work()?,
    };
    let wall = cli.common.timing.then(|| start.elapsed().as_secs_f64());
    let report = RunReport::new(cfg.clone(), payload, wall);
    let body = match cfg.output.format {
        Format::Json => report.to_json(),
        Format::Csv => tabulate(&report)?,
    };
    match &cfg.output.path {
        Some(path) => {
            std::fs::write(path, body.as_bytes())?;
            eprintln!("{}: {} (exit {})", report.task, report.summary(), report.exit_status);
        }
        None => std::io::stdout().write_all(body.as_bytes())?,
    }
    Ok(report.exit_status)
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run_parsed(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
