//! `gjq`: Gauss-Jacobi quadrature rules, accuracy reports against the
//! extended-precision oracle, and benchmarks.
//!
//! Exit codes: 0 success, 2 domain or configuration error, 3 oracle size
//! guard exceeded.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use gjq_core::dd;
use gjq_core::evaluator::{self, DerivMethod};
use gjq_core::nodes::CorrectionOrder;
use gjq_core::oracle;
use gjq_core::rule::{gauss_jacobi_rule, Method, RuleOptions};
use gjq_core::{Error, JacobiParams};

#[derive(Parser)]
#[command(name = "gjq", version, about = "Gauss-Jacobi quadrature for large degree and parameters")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Classical,
    Scaled,
    Both,
}

#[derive(Args)]
struct Common {
    /// Quadrature degree (number of nodes)
    #[arg(long)]
    n: u32,
    /// Exponent of (1 - x)
    #[arg(long)]
    alpha: f64,
    /// Exponent of (1 + x)
    #[arg(long)]
    beta: f64,
    /// Node correction order: 0, 2 or 4
    #[arg(long, default_value_t = 4)]
    order: u8,
    /// Truncation order of the asymptotic series
    #[arg(long, default_value_t = 3)]
    j: usize,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output path (stdout when omitted)
    #[arg(long)]
    output: Option<String>,
    /// Force the extended-precision oracle path
    #[arg(long, default_value_t = false)]
    oracle: bool,
    /// Significant digits printed (up to 17 plain, 32 with --oracle)
    #[arg(long, default_value_t = 17)]
    digits: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Print the nodes
    Nodes(Common),
    /// Print the weights
    Weights {
        #[command(flatten)]
        common: Common,
        /// Which weight family
        #[arg(long, value_enum, default_value_t = Kind::Both)]
        kind: Kind,
    },
    /// Print nodes and weights together
    Rule(Common),
    /// Evaluate the polynomial and its companions at a point
    Eval {
        #[command(flatten)]
        common: Common,
        /// Evaluation point in (-1, 1)
        #[arg(long)]
        x: f64,
    },
    /// Per-index error report against the oracle
    Check(Common),
    /// Wall-time per construction phase
    Bench(Common),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gjq: {e}");
            match e {
                CliError::Core(Error::OracleSizeGuard { .. }) => ExitCode::from(3),
                CliError::Io(_) => ExitCode::FAILURE,
                _ => ExitCode::from(2),
            }
        }
    }
}

enum CliError {
    Core(Error),
    Config(String),
    Io(io::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Config(m) => write!(f, "{m}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

fn threads_from_env() -> Result<usize, CliError> {
    match std::env::var("GJQ_THREADS") {
        Ok(v) => {
            let t: usize = v
                .parse()
                .map_err(|_| CliError::Config(format!("GJQ_THREADS must be an integer >= 1, got {v:?}")))?;
            if t < 1 {
                return Err(CliError::Config("GJQ_THREADS must be >= 1".into()));
            }
            Ok(t)
        }
        Err(_) => Ok(0), // rayon default
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let threads = threads_from_env()?;
    if threads > 0 {
        // ignore failure if a pool already exists (repeated runs in tests)
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    match cli.command {
        Command::Nodes(c) => nodes_cmd(&c),
        Command::Weights { common, kind } => weights_cmd(&common, kind),
        Command::Rule(c) => rule_cmd(&c),
        Command::Eval { common, x } => eval_cmd(&common, x),
        Command::Check(c) => check_cmd(&c),
        Command::Bench(c) => bench_cmd(&c),
    }
}

fn check_digits(c: &Common) -> Result<(), CliError> {
    let cap = if c.oracle { 32 } else { 17 };
    if c.digits == 0 || c.digits > cap {
        return Err(CliError::Config(format!(
            "--digits must be in 1..={cap} ({} output)",
            if c.oracle { "oracle" } else { "plain" }
        )));
    }
    Ok(())
}

fn parse_order(c: &Common) -> Result<CorrectionOrder, CliError> {
    CorrectionOrder::from_u8(c.order)
        .ok_or_else(|| CliError::Config(format!("--order must be 0, 2 or 4, got {}", c.order)))
}

fn options(c: &Common, threads: usize) -> Result<RuleOptions, CliError> {
    Ok(RuleOptions {
        order: parse_order(c)?,
        truncation: c.j,
        method: c.oracle.then_some(Method::Oracle),
        strict: false,
        parallel: threads != 1,
    })
}

fn fmt_f64(v: f64, digits: usize) -> String {
    format!("{:.*e}", digits.saturating_sub(1), v)
}

fn emit(c: &Common, text: String) -> Result<(), CliError> {
    match &c.output {
        Some(path) => fs::write(path, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn json_f64s(values: &[f64]) -> serde_json::Value {
    json!(values)
}

fn nodes_cmd(c: &Common) -> Result<(), CliError> {
    check_digits(c)?;
    if c.oracle && c.digits > 17 {
        // extended-precision listing straight from the oracle
        let zeros = oracle::oracle_nodes(c.n, c.alpha, c.beta)?;
        let text = match c.format {
            Format::Csv => {
                let mut out = String::from("ell,node\n");
                for (i, z) in zeros.iter().enumerate() {
                    let _ = writeln!(out, "{},{}", i + 1, dd::to_decimal_string(*z, c.digits));
                }
                out
            }
            Format::Json => {
                let strings: Vec<String> = zeros
                    .iter()
                    .map(|z| dd::to_decimal_string(*z, c.digits))
                    .collect();
                let v = json!({
                    "n": c.n, "alpha": c.alpha, "beta": c.beta,
                    "nodes": strings,
                });
                serde_json::to_string_pretty(&v).expect("json") + "\n"
            }
        };
        return emit(c, text);
    }
    let rule = gauss_jacobi_rule(c.n, c.alpha, c.beta, &options(c, threads_from_env()?)?)?;
    let text = match c.format {
        Format::Csv => {
            let mut out = String::from("ell,node\n");
            for (i, x) in rule.nodes.iter().enumerate() {
                let _ = writeln!(out, "{},{}", i + 1, fmt_f64(*x, c.digits));
            }
            out
        }
        Format::Json => {
            let v = json!({
                "n": c.n, "alpha": c.alpha, "beta": c.beta,
                "order": rule.meta.node_order, "J": rule.meta.truncation,
                "nodes": json_f64s(&rule.nodes),
            });
            serde_json::to_string_pretty(&v).expect("json") + "\n"
        }
    };
    emit(c, text)
}

fn weights_cmd(c: &Common, kind: Kind) -> Result<(), CliError> {
    check_digits(c)?;
    let rule = gauss_jacobi_rule(c.n, c.alpha, c.beta, &options(c, threads_from_env()?)?)?;
    let d = c.digits;
    let text = match c.format {
        Format::Csv => {
            let mut out = String::new();
            match kind {
                Kind::Classical => {
                    out.push_str("ell,weight,log_weight\n");
                    for i in 0..rule.nodes.len() {
                        let _ = writeln!(
                            out,
                            "{},{},{}",
                            i + 1,
                            fmt_f64(rule.classical_weight(i), d),
                            fmt_f64(rule.log_weights_classical[i], d)
                        );
                    }
                }
                Kind::Scaled => {
                    out.push_str("ell,weight_scaled\n");
                    for (i, w) in rule.weights_scaled.iter().enumerate() {
                        let _ = writeln!(out, "{},{}", i + 1, fmt_f64(*w, d));
                    }
                }
                Kind::Both => {
                    out.push_str("ell,weight,log_weight,weight_scaled\n");
                    for i in 0..rule.nodes.len() {
                        let _ = writeln!(
                            out,
                            "{},{},{},{}",
                            i + 1,
                            fmt_f64(rule.classical_weight(i), d),
                            fmt_f64(rule.log_weights_classical[i], d),
                            fmt_f64(rule.weights_scaled[i], d)
                        );
                    }
                }
            }
            out
        }
        Format::Json => {
            let classical: Vec<f64> = (0..rule.nodes.len())
                .map(|i| rule.classical_weight(i))
                .collect();
            let v = json!({
                "n": c.n, "alpha": c.alpha, "beta": c.beta,
                "order": rule.meta.node_order, "J": rule.meta.truncation,
                "weights": json_f64s(&classical),
                "weights_scaled": json_f64s(&rule.weights_scaled),
            });
            serde_json::to_string_pretty(&v).expect("json") + "\n"
        }
    };
    emit(c, text)
}

fn rule_cmd(c: &Common) -> Result<(), CliError> {
    check_digits(c)?;
    let rule = gauss_jacobi_rule(c.n, c.alpha, c.beta, &options(c, threads_from_env()?)?)?;
    let d = c.digits;
    let text = match c.format {
        Format::Csv => {
            let mut out = String::from("ell,node,weight,weight_scaled\n");
            for (i, x) in rule.nodes.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    i + 1,
                    fmt_f64(*x, d),
                    fmt_f64(rule.classical_weight(i), d),
                    fmt_f64(rule.weights_scaled[i], d)
                );
            }
            out
        }
        Format::Json => {
            let classical: Vec<f64> = (0..rule.nodes.len())
                .map(|i| rule.classical_weight(i))
                .collect();
            let flags: Vec<String> = rule
                .meta
                .flags
                .iter()
                .map(|f| {
                    serde_json::to_value(f)
                        .expect("flag")
                        .as_str()
                        .expect("flag string")
                        .to_string()
                })
                .collect();
            let v = json!({
                "n": c.n, "alpha": c.alpha, "beta": c.beta,
                "order": rule.meta.node_order, "J": rule.meta.truncation,
                "nodes": json_f64s(&rule.nodes),
                "weights": json_f64s(&classical),
                "weights_scaled": json_f64s(&rule.weights_scaled),
                "flags": flags,
            });
            serde_json::to_string_pretty(&v).expect("json") + "\n"
        }
    };
    emit(c, text)
}

fn eval_cmd(c: &Common, x: f64) -> Result<(), CliError> {
    check_digits(c)?;
    let p = JacobiParams::new(c.n, c.alpha, c.beta)?;
    let r = evaluator::eval_jacobi(&p, x, c.j)?;
    let deriv = evaluator::eval_jacobi_deriv(&p, x, c.j, DerivMethod::SameParams)?;
    let v = evaluator::eval_v(&p, x, c.j)?;
    let vp = evaluator::eval_v_prime(&p, x, c.j)?;
    let d = c.digits;
    let text = match c.format {
        Format::Csv => {
            let mut out =
                String::from("x,value,log_envelope,w_osc,derivative,v,v_prime\n");
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                fmt_f64(x, d),
                fmt_f64(r.value, d),
                fmt_f64(r.log_envelope, d),
                fmt_f64(r.w_osc, d),
                fmt_f64(deriv.value, d),
                fmt_f64(v, d),
                fmt_f64(vp, d)
            );
            out
        }
        Format::Json => {
            let val = json!({
                "n": c.n, "alpha": c.alpha, "beta": c.beta, "J": c.j, "x": x,
                "value": r.value,
                "log_envelope": r.log_envelope,
                "w_osc": r.w_osc,
                "representable": r.representable,
                "derivative": deriv.value,
                "v": v,
                "v_prime": vp,
            });
            serde_json::to_string_pretty(&val).expect("json") + "\n"
        }
    };
    emit(c, text)
}

fn check_cmd(c: &Common) -> Result<(), CliError> {
    check_digits(c)?;
    let p = JacobiParams::new(c.n, c.alpha, c.beta)?;
    let report = oracle::compare_report(&p, parse_order(c)?, c.j)?;
    let d = c.digits;
    let text = match c.format {
        Format::Csv => {
            let mut out = String::from("ell,node_err_abs,node_err_rel,w_err_rel,omega_err_rel\n");
            for row in &report.rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    row.ell,
                    fmt_f64(row.node_err_abs, d),
                    fmt_f64(row.node_err_rel, d),
                    fmt_f64(row.w_err_rel, d),
                    fmt_f64(row.omega_err_rel, d)
                );
            }
            out
        }
        Format::Json => serde_json::to_string_pretty(&report).expect("json") + "\n",
    };
    emit(c, text)
}

fn bench_cmd(c: &Common) -> Result<(), CliError> {
    check_digits(c)?;
    let order = parse_order(c)?;
    let t0 = Instant::now();
    let p = JacobiParams::new(c.n, c.alpha, c.beta)?;
    let params_time = t0.elapsed();
    let t1 = Instant::now();
    let est = gjq_core::nodes::all_nodes(&p, order)?;
    let nodes_time = t1.elapsed();
    let xs: Vec<f64> = est.iter().map(|e| e.value()).collect();
    let t2 = Instant::now();
    let _w = gjq_core::weights::all_weights(&p, &xs, c.j, gjq_core::weights::WeightKind::Both)?;
    let weights_time = t2.elapsed();
    let n = c.n as f64;
    let text = match c.format {
        Format::Csv => {
            let mut out = String::from("phase,total_seconds,per_node_microseconds\n");
            for (name, t) in [
                ("params", params_time),
                ("nodes", nodes_time),
                ("weights", weights_time),
            ] {
                let _ = writeln!(
                    out,
                    "{name},{:.6},{:.3}",
                    t.as_secs_f64(),
                    t.as_secs_f64() * 1e6 / n
                );
            }
            out
        }
        Format::Json => {
            let v = json!({
                "n": c.n, "alpha": c.alpha, "beta": c.beta,
                "order": c.order, "J": c.j,
                "params_seconds": params_time.as_secs_f64(),
                "nodes_seconds": nodes_time.as_secs_f64(),
                "weights_seconds": weights_time.as_secs_f64(),
                "nodes_per_node_us": nodes_time.as_secs_f64() * 1e6 / n,
                "weights_per_node_us": weights_time.as_secs_f64() * 1e6 / n,
            });
            serde_json::to_string_pretty(&v).expect("json") + "\n"
        }
    };
    emit(c, text)
}
