//! Command-line front end. `run` takes the argument list and output sinks so
//! the binary and the tests share one code path.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::encodings::Encoding;
use crate::error::{Error, Result};
use crate::models::ModelKind;
use crate::task::{estimate, linear_grid, sweep, CostReport, SweepAxis, SweepRow, TaskSpec};
use crate::trotter::{Convention, TaskKind};
use crate::verify::{run as run_suite, Suite};

pub const CSV_HEADER: [&str; 9] = ["axis", "value", "r", "depth", "rz", "T", "qubits", "ell_or_nb", "notes"];

#[derive(Parser, Debug)]
#[command(name = "nuceft", version, about = "Quantum resource estimates for lattice nuclear EFT simulations")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Cost one evolution or QPE task.
    Estimate(EstimateArgs),
    /// Cost a task over a parameter grid and emit CSV.
    Sweep(SweepArgs),
    /// Run the built-in invariant suites.
    Verify {
        /// pauli, encodings, seminorm, trotter or all
        suite: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Default, Clone)]
struct SpecFlags {
    /// JSON run configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    task: Option<String>,
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    encoding: Option<String>,
    #[arg(long)]
    order: Option<u32>,
    #[arg(long = "L")]
    l: Option<usize>,
    #[arg(long = "aL-fm")]
    a_fm: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long = "Ekin-MeV")]
    e_kin: Option<f64>,
    #[arg(long = "deltaE-MeV")]
    delta_e: Option<f64>,
    #[arg(long = "Emax-MeV")]
    e_max: Option<f64>,
    #[arg(long = "success-prob")]
    success_prob: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    convention: Option<String>,
    /// Use the closed-form dynamical-pion step counts.
    #[arg(long)]
    strict_statement: bool,
    #[arg(long)]
    ell: Option<usize>,
    #[arg(long = "nb")]
    n_b: Option<u32>,
    #[arg(long, short)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long, short)]
    verbose: bool,
}

#[derive(Args, Debug)]
struct EstimateArgs {
    #[command(flatten)]
    spec: SpecFlags,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    spec: SpecFlags,
    /// eta, L, epsilon, ell or n_b
    #[arg(long)]
    axis: Option<String>,
    #[arg(long)]
    from: Option<f64>,
    #[arg(long)]
    to: Option<f64>,
    #[arg(long)]
    step: Option<f64>,
    /// Geometric grid with this many points from `from` to `to`.
    #[arg(long)]
    log_points: Option<usize>,
    /// Explicit comma-separated grid.
    #[arg(long, value_delimiter = ',')]
    values: Option<Vec<f64>>,
    #[arg(long, env = "NUCEFT_JOBS")]
    jobs: Option<usize>,
}

/// On-disk run configuration. Every key is optional; unknown keys are errors.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub task: Option<TaskKind>,
    pub model: Option<ModelKind>,
    pub encoding: Option<Encoding>,
    pub order: Option<u32>,
    #[serde(rename = "L")]
    pub l: Option<usize>,
    pub a_fm: Option<f64>,
    pub eta: Option<f64>,
    pub e_kin: Option<f64>,
    pub delta_e: Option<f64>,
    pub e_max: Option<f64>,
    pub success_prob: Option<f64>,
    pub eps: Option<f64>,
    pub convention: Option<Convention>,
    pub strict_statement: Option<bool>,
    pub ell: Option<usize>,
    pub n_b: Option<u32>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    pub verbose: Option<bool>,
    pub axis: Option<String>,
    pub from: Option<f64>,
    pub to: Option<f64>,
    pub step: Option<f64>,
    pub log_points: Option<usize>,
    pub values: Option<Vec<f64>>,
    pub jobs: Option<usize>,
}

impl RunConfig {
    pub fn load(path: &std::path::Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

fn parse_enum<T: for<'de> Deserialize<'de>>(field: &str, v: &str) -> Result<T> {
    serde_json::from_value(serde_json::Value::String(v.to_string()))
        .map_err(|_| Error::Config(format!("invalid value {v:?} for {field}")))
}

fn required<T>(v: Option<T>, field: &str, flag: &str) -> Result<T> {
    v.ok_or_else(|| Error::Config(format!("missing required field `{field}` (--{flag} or config key)")))
}

/// Flags over config over defaults.
/// `swept` names the sweep axis, whose base value may be absent.
fn merge(flags: &SpecFlags, cfg: &RunConfig, swept: Option<SweepAxis>) -> Result<(TaskSpec, Option<PathBuf>, Format, bool)> {
    let free = |ax: SweepAxis| swept == Some(ax);
    let task = match &flags.task {
        Some(s) => parse_enum("task", s)?,
        None => cfg.task.unwrap_or(TaskKind::Evolve),
    };
    let model = match &flags.model {
        Some(s) => parse_enum("model", s)?,
        None => required(cfg.model, "model", "model")?,
    };
    let encoding = match &flags.encoding {
        Some(s) => parse_enum("encoding", s)?,
        None => cfg.encoding.unwrap_or(Encoding::VerstraeteCirac),
    };
    let convention = match &flags.convention {
        Some(s) => parse_enum("convention", s)?,
        None => cfg.convention.unwrap_or(Convention::NearTerm),
    };
    let e_kin = flags.e_kin.or(cfg.e_kin);
    let delta_e = flags.delta_e.or(cfg.delta_e);
    let success_prob = flags.success_prob.or(cfg.success_prob);
    let eps = flags.eps.or(cfg.eps);
    let (e_kin, delta_e, success_prob, eps) = match task {
        TaskKind::Evolve => (
            Some(required(e_kin, "e_kin", "Ekin-MeV")?),
            delta_e,
            success_prob,
            if free(SweepAxis::Epsilon) { eps.unwrap_or(0.0) } else { required(eps, "eps", "eps")? },
        ),
        TaskKind::Qpe => (
            e_kin,
            Some(required(delta_e, "delta_e", "deltaE-MeV")?),
            Some(required(success_prob, "success_prob", "success-prob")?),
            // the QPE budget follows from the precision; eps is informational
            eps.unwrap_or(0.0),
        ),
    };
    let spec = TaskSpec {
        task,
        model,
        encoding,
        order: flags.order.or(cfg.order).unwrap_or(1),
        l: match flags.l.or(cfg.l) {
            None if free(SweepAxis::L) => 0,
            l => required(l, "L", "L")?,
        },
        a_fm: required(flags.a_fm.or(cfg.a_fm), "a_fm", "aL-fm")?,
        eta: match flags.eta.or(cfg.eta) {
            None if free(SweepAxis::Eta) => 0.0,
            eta => required(eta, "eta", "eta")?,
        },
        e_kin,
        delta_e,
        e_max: flags.e_max.or(cfg.e_max).unwrap_or(140.0),
        success_prob,
        eps,
        convention,
        strict_statement: flags.strict_statement || cfg.strict_statement.unwrap_or(false),
        ell: flags.ell.or(cfg.ell),
        n_b: flags.n_b.or(cfg.n_b),
    };
    let out = flags.out.clone().or_else(|| cfg.output.clone());
    let verbose = flags.verbose || cfg.verbose.unwrap_or(false);
    Ok((spec, out, flags.format.or(cfg.format).unwrap_or(Format::Json), verbose))
}

/// 12 significant digits, no locale.
pub fn fmt_num(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x:.11e}")
    }
}

fn csv_record(axis: &str, value: f64, r: &std::result::Result<CostReport, String>) -> Vec<String> {
    let mut row = vec![axis.to_string(), fmt_num(value)];
    match r {
        Ok(rep) => {
            row.push(fmt_num(rep.r));
            row.push(fmt_num(rep.depth_total));
            row.push(fmt_num(rep.rz_total));
            row.push(rep.t_count.map(fmt_num).unwrap_or_default());
            row.push(rep.qubits.to_string());
            row.push(
                rep.ell
                    .map(|k| k.to_string())
                    .or(rep.n_b.map(|n| n.to_string()))
                    .unwrap_or_default(),
            );
            row.push(rep.notes.join("; "));
        }
        Err(e) => {
            row.extend(std::iter::repeat(String::new()).take(6));
            row.push(format!("error: {e}"));
        }
    }
    row
}

pub fn rows_to_csv(rows: &[(String, f64, std::result::Result<CostReport, String>)]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
    let io = |e: csv::Error| Error::Config(format!("csv: {e}"));
    w.write_record(CSV_HEADER).map_err(io)?;
    for (axis, v, r) in rows {
        w.write_record(csv_record(axis, *v, r)).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Config(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn emit(text: &str, out: Option<&PathBuf>, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Config(format!("cannot write {}: {e}", p.display()))),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Error::Config(format!("stdout: {e}"))),
    }
}

fn load_cfg(flags: &SpecFlags) -> Result<RunConfig> {
    flags.config.as_deref().map(RunConfig::load).transpose().map(|c| c.unwrap_or_default())
}

fn cmd_estimate(a: &EstimateArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let cfg = load_cfg(&a.spec)?;
    let (spec, out, format, verbose) = merge(&a.spec, &cfg, None)?;
    let rep = estimate(&spec)?;
    if verbose {
        let _ = writeln!(
            stderr,
            "{} {} {:?}: r = {}, depth = {}, T = {}",
            spec.model,
            spec.encoding.name(),
            spec.convention,
            fmt_num(rep.r),
            fmt_num(rep.depth_total),
            rep.t_count.map(fmt_num).unwrap_or_else(|| "-".into())
        );
    }
    let text = match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&rep).map_err(|e| Error::Config(e.to_string()))?;
            s.push('\n');
            s
        }
        Format::Csv => rows_to_csv(&[("point".into(), 0.0, Ok(rep))])?,
    };
    emit(&text, out.as_ref(), stdout)
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn cmd_sweep(a: &SweepArgs, stdout: &mut dyn Write) -> Result<()> {
    let cfg = load_cfg(&a.spec)?;
    let axis_name = required(a.axis.clone().or(cfg.axis.clone()), "axis", "axis")?;
    let axis = SweepAxis::parse(&axis_name)
        .ok_or_else(|| Error::Config(format!("unknown sweep axis {axis_name:?}")))?;
    let (spec, out, _, _) = merge(&a.spec, &cfg, Some(axis))?;
    let grid = match a.values.clone().or(cfg.values.clone()) {
        Some(v) => v,
        None => {
            let from = required(a.from.or(cfg.from), "from", "from")?;
            let to = required(a.to.or(cfg.to), "to", "to")?;
            match a.log_points.or(cfg.log_points) {
                Some(n) => log_grid(from, to, n)?,
                None => linear_grid(from, to, required(a.step.or(cfg.step), "step", "step")?)?,
            }
        }
    };
    if grid.is_empty() {
        return Err(Error::Config("sweep grid is empty".into()));
    }
    let jobs = a.jobs.or(cfg.jobs).unwrap_or_else(default_jobs);
    let rows: Vec<_> = sweep(&spec, axis, &grid, jobs)?
        .into_iter()
        .map(|SweepRow { axis, value, result }| (axis.name().to_string(), value, result))
        .collect();
    emit(&rows_to_csv(&rows)?, out.as_ref(), stdout)
}

/// `n` points spaced evenly in log from `from` to `to`, endpoints included.
pub fn log_grid(from: f64, to: f64, n: usize) -> Result<Vec<f64>> {
    if n == 0 || !(from > 0.0) || !(to > 0.0) {
        return Err(Error::Config(format!("empty log grid from {from} to {to} with {n} points")));
    }
    if n == 1 {
        return Ok(vec![from]);
    }
    let (a, b) = (from.ln(), to.ln());
    Ok((0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect())
}

fn cmd_verify(suite: &str, stdout: &mut dyn Write) -> Result<bool> {
    let s = Suite::parse(suite).ok_or_else(|| {
        Error::Config(format!("unknown suite {suite:?}; expected pauli, encodings, seminorm, trotter or all"))
    })?;
    let checks = run_suite(s);
    for c in &checks {
        let _ = writeln!(stdout, "{}", c.line());
    }
    Ok(checks.iter().all(|c| c.passed))
}

/// Parse `args` (program name first), run, and return the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", e.render());
                    0
                }
                _ => {
                    let _ = write!(stderr, "{}", e.render());
                    1
                }
            };
        }
    };
    let res = match &cli.cmd {
        Command::Estimate(a) => cmd_estimate(a, stdout, stderr).map(|_| true),
        Command::Sweep(a) => cmd_sweep(a, stdout).map(|_| true),
        Command::Verify { suite } => cmd_verify(suite, stdout),
    };
    match res {
        Ok(true) => 0,
        Ok(false) => 2,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
