//! `invforge`: run invariance, rank and completeness checks from the shell.

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{Layer, RunConfig};
use report::ReportDocument;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Config(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

#[derive(Parser)]
#[command(name = "invforge", version, about = "Verify second-order differential invariants numerically")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List algebras, bases, equations or tensors.
    List {
        /// One of: algebras, bases, equations, tensors.
        kind: String,
    },
    /// Check invariance of a basis, an equation or an expression.
    ///
    /// Items: `basis [ALGEBRA]`, `equation NAME`, `expression TEXT [under ALGEBRA]`,
    /// plus any `key=value` setting.
    Verify(RunArgs),
    /// Generic rank of the prolonged algebra (and of its basis, if any).
    Rank(RunArgs),
    /// Compare a basis against the expected count of functionally independent invariants.
    Completeness(RunArgs),
    /// Evaluate an expression at given or sampled jet points.
    Eval(RunArgs),
}

#[derive(Args, Default)]
struct RunArgs {
    /// Flat `key = value` settings file; command-line values override it.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    #[arg(long)]
    algebra: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    mass: Option<String>,
    /// real or complex.
    #[arg(long)]
    field: Option<String>,
    /// linear or log.
    #[arg(long)]
    chart: Option<String>,
    /// printed, binomial or corrected.
    #[arg(long)]
    reading: Option<String>,
    /// Defaults to $INVFORGE_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    tol: Option<String>,
    /// Write the JSON report here.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    expr: Option<String>,
    /// Order k for indexed equations.
    #[arg(long)]
    k: Option<usize>,
    /// Constant value of the free function in equations.
    #[arg(long, allow_hyphen_values = true)]
    coupling: Option<String>,
    /// Drop the last K basis members.
    #[arg(long, value_name = "K")]
    truncate: Option<usize>,
    /// Comma-separated jet coordinates in storage order.
    #[arg(long, allow_hyphen_values = true)]
    point: Option<String>,
    /// Treat --point as a `u` jet and convert it to the log chart.
    #[arg(long)]
    from_u: bool,
    /// Polynomial coefficients in u for the AP_inf functions.
    #[arg(long, allow_hyphen_values = true)]
    apinf_b: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    apinf_a: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    apinf_eta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    apinf_d: Option<String>,
    /// Bare words and `key=value` settings.
    items: Vec<String>,
}

const TARGETS: &[&str] = &["basis", "equation", "expression"];

impl RunArgs {
    fn flag_layer(&self) -> Result<Layer, CliError> {
        let mut l = Layer::default();
        let mut put = |k: &str, v: Option<String>| match v {
            Some(v) => l.set(k, v),
            None => Ok(()),
        };
        put("algebra", self.algebra.clone())?;
        put("n", self.n.map(|v| v.to_string()))?;
        put("m", self.m.map(|v| v.to_string()))?;
        put("lambda", self.lambda.clone())?;
        put("mu", self.mu.clone())?;
        put("mass", self.mass.clone())?;
        put("field", self.field.clone())?;
        put("chart", self.chart.clone())?;
        put("reading", self.reading.clone())?;
        put("seed", self.seed.map(|v| v.to_string()))?;
        put("samples", self.samples.map(|v| v.to_string()))?;
        put("tol", self.tol.clone())?;
        put("out", self.out.as_ref().map(|p| p.display().to_string()))?;
        put("expr", self.expr.clone())?;
        put("k", self.k.map(|v| v.to_string()))?;
        put("coupling", self.coupling.clone())?;
        put("truncate", self.truncate.map(|v| v.to_string()))?;
        put("point", self.point.clone())?;
        put("from_u", self.from_u.then(|| "true".to_string()))?;
        put("apinf_b", self.apinf_b.clone())?;
        put("apinf_a", self.apinf_a.clone())?;
        put("apinf_eta", self.apinf_eta.clone())?;
        put("apinf_d", self.apinf_d.clone())?;
        Ok(l)
    }

    /// Positional items: `key=value` settings and bare words, read by command.
    fn item_layer(&self, command: &str) -> Result<Layer, CliError> {
        let mut l = Layer::default();
        let mut words = Vec::new();
        for item in &self.items {
            match item.split_once('=') {
                Some((k, v)) if !k.is_empty() && config::KEYS.contains(&k.replace('-', "_").as_str()) => {
                    l.set(k, v)?
                }
                _ => words.push(item.as_str()),
            }
        }
        let mut words = words.into_iter();
        let extra = |w: &str| CliError::Usage(format!("unexpected argument `{w}`"));
        match command {
            "verify" => {
                let first = words.next();
                match first {
                    None => {}
                    Some(t) if TARGETS.contains(&t) => {
                        l.set("target", t)?;
                        match t {
                            "equation" => {
                                if let Some(w) = words.next() {
                                    l.set("equation", w)?;
                                }
                            }
                            "expression" => {
                                if let Some(w) = words.next() {
                                    l.set("expr", w)?;
                                }
                                if let Some(w) = words.next() {
                                    if w != "under" {
                                        return Err(extra(w));
                                    }
                                    let a = words
                                        .next()
                                        .ok_or_else(|| CliError::Usage("`under` needs an algebra".into()))?;
                                    l.set("algebra", a)?;
                                }
                            }
                            _ => {
                                if let Some(w) = words.next() {
                                    l.set("algebra", w)?;
                                }
                            }
                        }
                    }
                    Some(a) => l.set("algebra", a)?,
                }
            }
            "eval" => {
                if let Some(w) = words.next() {
                    l.set("expr", w)?;
                }
            }
            _ => {
                if let Some(w) = words.next() {
                    l.set("algebra", w)?;
                }
            }
        }
        match words.next() {
            Some(w) => Err(extra(w)),
            None => Ok(l),
        }
    }

    fn resolve(&self, command: &str) -> Result<RunConfig, CliError> {
        let mut layer = match &self.config {
            Some(path) => Layer::read(path)?,
            None => Layer::default(),
        };
        layer.merge(&self.item_layer(command)?);
        layer.merge(&self.flag_layer()?);
        let env_seed = std::env::var("INVFORGE_SEED").ok();
        RunConfig::resolve(command, &layer, env_seed.as_deref())
    }
}

fn emit(config: &RunConfig, doc: &ReportDocument, summary: &str) -> Result<ExitCode, CliError> {
    print!("{summary}");
    if let Some(path) = &config.out {
        std::fs::write(path, doc.to_json())
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(ExitCode::from(if doc.verdict.is_pass() { 0 } else { 1 }))
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let (name, args) = match &cli.command {
        Command::List { kind } => {
            print!("{}", commands::list(kind)?);
            return Ok(ExitCode::SUCCESS);
        }
        Command::Verify(a) => ("verify", a),
        Command::Rank(a) => ("rank", a),
        Command::Completeness(a) => ("completeness", a),
        Command::Eval(a) => ("eval", a),
    };
    let config = args.resolve(name)?;
    let (doc, summary) = match name {
        "verify" => commands::verify(&config)?,
        "rank" => commands::rank(&config)?,
        "completeness" => commands::completeness_cmd(&config)?,
        _ => {
            let explicit = args.samples.is_some() || args.items.iter().any(|i| i.starts_with("samples="));
            commands::eval(&config, explicit)?
        }
    };
    emit(&config, &doc, &summary)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| run(cli))) {
        Ok(Ok(code)) => code,
        Ok(Err(e)) => {
            eprintln!("invforge: {e}");
            ExitCode::from(e.exit_code())
        }
        Err(_) => ExitCode::from(3),
    }
}
