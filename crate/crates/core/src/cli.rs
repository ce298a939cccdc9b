//! Command-line front end. [`run_command`] does all the work so the binary
//! and the tests share one code path.
//!
//! Exit codes: 0 success (and `order`: dominates), 1 `order`: does not
//! dominate, 2 malformed input, 3 numerical ambiguity or unsupported input.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::choquet::{check_dominates, OrderStatus};
use crate::error::{Error, Result};
use crate::functionals::{
    approx_char_fn, CharFnCase, ChannelOutputEntropy, CharFnApprox, Entropy, KyFan, LogBase, PurityGap, ReducedEntropy,
    StateFunctional, TruncatedEntropy,
};
use crate::io::{self, csv_number, ensemble_value, state_value, to_canonical_json};
use crate::linalg::HermitianMatrix;
use crate::oracles::{brute_force_roof, concurrence, wootters_eof};
use crate::roof::{concave_hull, convex_roof, efn, eof, RoofOptions, RoofResult};
use crate::states::{refine_to_pure, steer_barycenter, DensityMatrix};

pub const THREADS_ENV: &str = "CHOQUET_ROOF_THREADS";

#[derive(Parser, Debug)]
#[command(name = "choquet-roof", version, about = "Convex roofs, concave hulls and Choquet order on finite-dimensional quantum states")]
pub struct Cli {
    #[command(flatten)]
    pub config: RunConfig,
    #[command(subcommand)]
    pub command: Command,
}

/// Settings shared by every subcommand.
#[derive(Args, Clone, Debug)]
pub struct RunConfig {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Optimizer restarts.
    #[arg(long, global = true, default_value_t = 32)]
    pub restarts: usize,
    /// Decomposition length m (default rank²).
    #[arg(long, global = true)]
    pub members: Option<usize>,
    /// Stop a restart when a full sweep improves by less than this.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Logarithm base: 2 or e.
    #[arg(long, global = true, default_value = "2")]
    pub base: LogBase,
    /// Output format (json or csv). Defaults to csv for `approx` and `demo`, json otherwise.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Entanglement of formation of a bipartite state.
    ///
    /// CSV columns: value,bound_direction,restarts,seed
    Eof { state: PathBuf },
    /// Convex roof of the truncated entropy H_n.
    ///
    /// CSV columns: value,bound_direction,restarts,seed
    Efn {
        state: PathBuf,
        #[arg(long)]
        n: usize,
    },
    /// Convex roof of a functional.
    ///
    /// Selectors: entropy, entropyA, hn:<n>, kyfan:<n>, purity-gap,
    /// charfn:<set|face|rank>:<n> (with --params), channel:<kraus.json>.
    /// CSV columns: value,bound_direction,restarts,seed
    Roof {
        #[arg(long = "fn")]
        selector: String,
        #[arg(long)]
        params: Option<PathBuf>,
        state: PathBuf,
    },
    /// Concave hull of a functional over pure atoms mixed toward the state.
    ///
    /// CSV columns: value,bound_direction,restarts,seed,mixing
    Hat {
        #[arg(long = "fn")]
        selector: String,
        #[arg(long)]
        params: Option<PathBuf>,
        /// Fix the mixing parameter instead of optimizing it.
        #[arg(long)]
        mixing: Option<f64>,
        state: PathBuf,
    },
    /// Decide whether ensemble MU dominates ensemble NU in the Choquet order.
    ///
    /// Exit 0: dominates (plan emitted), 1: does not, 3: ambiguous.
    /// CSV columns: status,residual
    Order { mu: PathBuf, nu: PathBuf },
    /// Replace every atom by its spectral decomposition.
    Refine { mu: PathBuf },
    /// Deform an ensemble so its barycenter becomes TARGET.
    ///
    /// CSV columns: epsilon
    Steer { mu: PathBuf, target: PathBuf },
    /// Approximators f_n of a characteristic function, n = 1..N.
    ///
    /// Params: set {"vectors": [...]}, face {"projector": [...]}, rank {"k": k}.
    /// CSV columns: n,value
    Approx {
        #[arg(long, value_enum)]
        case: CaseArg,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        params: Option<PathBuf>,
        state: PathBuf,
    },
    /// Reproducible demonstrations.
    Demo {
        #[command(subcommand)]
        demo: Demo,
    },
    /// Reference values from independent methods.
    Oracle {
        #[command(subcommand)]
        oracle: OracleCommand,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CaseArg {
    Set,
    Face,
    Rank,
}

#[derive(Subcommand, Debug)]
pub enum Demo {
    /// Concave hull of the purity gap at the maximally mixed qubit for
    /// decreasing mixing parameters.
    ///
    /// CSV columns: lambda,value
    Remark1 {
        #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.01, 0.001])]
        deltas: Vec<f64>,
    },
    /// Truncated-entropy roofs for n = 2..MAX_N.
    ///
    /// CSV columns: n,value
    EfnSweep {
        state: PathBuf,
        #[arg(long)]
        max_n: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum OracleCommand {
    /// Closed-form two-qubit entanglement of formation.
    ///
    /// CSV columns: value,concurrence
    Wootters { state: PathBuf },
    /// Exhaustive grid search for the convex roof of a qubit functional.
    ///
    /// CSV columns: value,resolution,members
    BruteForce {
        #[arg(long = "fn")]
        selector: String,
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long, default_value_t = 400)]
        resolution: usize,
        state: PathBuf,
    },
}

/// Result of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Report {
    json: Value,
    csv_header: &'static str,
    csv_rows: Vec<Vec<String>>,
    default: Format,
    code: i32,
}

impl Report {
    fn json_only(json: Value) -> Self {
        Report { json, csv_header: "", csv_rows: Vec::new(), default: Format::Json, code: 0 }
    }

    fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => Ok(to_canonical_json(self.json.clone())),
            Format::Csv if self.csv_header.is_empty() => Err(Error::InvalidParameter("this subcommand has no CSV output".into())),
            Format::Csv => {
                let mut s = String::from(self.csv_header);
                s.push('\n');
                for row in &self.csv_rows {
                    s.push_str(&row.join(","));
                    s.push('\n');
                }
                Ok(s)
            }
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run_command<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    Outcome { code: 0, stdout: text, stderr: String::new() }
                }
                _ => Outcome { code: 2, stdout: String::new(), stderr: text },
            };
        }
    };
    match configure_threads().and_then(|_| execute(&cli)) {
        Ok(out) => out,
        Err(e) => Outcome { code: if e.is_input_error() { 2 } else { 3 }, stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

/// Applies `CHOQUET_ROOF_THREADS` to the global thread pool (first call wins).
fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| Error::InvalidParameter(format!("{THREADS_ENV} must be an integer >= 1, got {raw:?}")))?;
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn execute(cli: &Cli) -> Result<Outcome> {
    let cfg = &cli.config;
    if !(cfg.tol > 0.0) {
        return Err(Error::InvalidParameter(format!("--tol must be positive, got {}", cfg.tol)));
    }
    let report = dispatch(&cli.command, cfg)?;
    let text = report.render(cfg.format.unwrap_or(report.default))?;
    let stdout = match &cfg.output {
        Some(path) => {
            std::fs::write(path, &text)?;
            String::new()
        }
        None => text,
    };
    Ok(Outcome { code: report.code, stdout, stderr: String::new() })
}

fn roof_options(cfg: &RunConfig) -> RoofOptions {
    RoofOptions { members: cfg.members, restarts: cfg.restarts, tol: cfg.tol, seed: cfg.seed, ..RoofOptions::default() }
}

fn base_label(base: LogBase) -> &'static str {
    match base {
        LogBase::Two => "2",
        LogBase::E => "e",
    }
}

fn roof_report(r: &RoofResult, cfg: &RunConfig, functional: &str) -> Report {
    let bound = serde_json::to_value(r.bound).expect("bound serializes");
    let mut json = json!({
        "value": r.value,
        "ensemble": ensemble_value(&r.ensemble),
        "bound_direction": bound,
        "restarts": r.restarts,
        "seed": cfg.seed,
        "members": r.members,
        "converged": r.converged,
        "best_per_restart": r.best_per_restart,
        "functional": functional,
        "base": base_label(cfg.base),
    });
    let bound = bound.as_str().unwrap_or_default().to_string();
    let mut row = vec![csv_number(r.value), bound, r.restarts.to_string(), cfg.seed.to_string()];
    let header = match r.mixing {
        Some(l) => {
            json["mixing"] = json!(l);
            row.push(csv_number(l));
            "value,bound_direction,restarts,seed,mixing"
        }
        None => "value,bound_direction,restarts,seed",
    };
    Report { json, csv_header: header, csv_rows: vec![row], default: Format::Json, code: 0 }
}

fn bipartite(rho: &DensityMatrix) -> Result<(usize, usize)> {
    rho.dims().ok_or_else(|| Error::InvalidParameter("state file needs \"dims\" for this functional".into()))
}

fn parse_index(s: &str, what: &str) -> Result<usize> {
    s.parse().map_err(|_| Error::InvalidParameter(format!("{what} must be a nonnegative integer, got {s:?}")))
}

fn read_case(case: CaseArg, params: Option<&Path>) -> Result<CharFnCase> {
    let need = || Error::InvalidParameter("this case needs --params".into());
    match case {
        CaseArg::Set => CharFnCase::pure_set(io::read_vectors(params.ok_or_else(need)?)?),
        CaseArg::Face => {
            let p = io::read_projector(params.ok_or_else(need)?)?;
            CharFnCase::face(HermitianMatrix::new(p)?)
        }
        CaseArg::Rank => CharFnCase::rank_at_most(io::read_rank(params.ok_or_else(need)?)?),
    }
}

/// Builds a functional from a selector string.
pub fn parse_selector(
    selector: &str,
    params: Option<&Path>,
    rho: &DensityMatrix,
    base: LogBase,
) -> Result<Box<dyn StateFunctional>> {
    let parts: Vec<&str> = selector.splitn(3, ':').collect();
    let f: Box<dyn StateFunctional> = match parts.as_slice() {
        ["entropy"] => Box::new(Entropy { dim: rho.dim(), base }),
        ["entropyA"] => Box::new(ReducedEntropy { dims: bipartite(rho)?, base }),
        ["hn", n] => Box::new(TruncatedEntropy::new(bipartite(rho)?, parse_index(n, "n")?, base)?),
        ["kyfan", n] => {
            let n = parse_index(n, "n")?;
            if n < 1 || n > rho.dim() {
                return Err(Error::InvalidParameter(format!("Ky Fan index {n} outside 1..={}", rho.dim())));
            }
            Box::new(KyFan { n })
        }
        ["purity-gap"] => Box::new(PurityGap),
        ["charfn", case, n] => {
            let case = CaseArg::from_str(case, false).map_err(|_| Error::InvalidParameter(format!("unknown case {case:?}")))?;
            let n = u32::try_from(parse_index(n, "n")?).map_err(|_| Error::InvalidParameter("n too large".into()))?;
            if n < 1 {
                return Err(Error::InvalidParameter("n must be at least 1".into()));
            }
            Box::new(CharFnApprox { case: read_case(case, params)?, n })
        }
        ["channel", file] => Box::new(ChannelOutputEntropy { channel: io::read_channel(Path::new(file))?, base }),
        _ => return Err(Error::InvalidParameter(format!("unknown functional selector {selector:?}"))),
    };
    Ok(f)
}

fn dispatch(cmd: &Command, cfg: &RunConfig) -> Result<Report> {
    let opts = roof_options(cfg);
    match cmd {
        Command::Eof { state } => {
            let rho = io::read_state(state)?;
            Ok(roof_report(&eof(&rho, &opts, cfg.base)?, cfg, "entropyA"))
        }
        Command::Efn { state, n } => {
            let rho = io::read_state(state)?;
            Ok(roof_report(&efn(&rho, *n, &opts, cfg.base)?, cfg, &format!("hn:{n}")))
        }
        Command::Roof { selector, params, state } => {
            let rho = io::read_state(state)?;
            let f = parse_selector(selector, params.as_deref(), &rho, cfg.base)?;
            Ok(roof_report(&convex_roof(f.as_ref(), &rho, &opts)?, cfg, selector))
        }
        Command::Hat { selector, params, mixing, state } => {
            let rho = io::read_state(state)?;
            let f = parse_selector(selector, params.as_deref(), &rho, cfg.base)?;
            let opts = RoofOptions { fixed_mixing: *mixing, ..opts };
            Ok(roof_report(&concave_hull(f.as_ref(), &rho, &opts)?, cfg, selector))
        }
        Command::Order { mu, nu } => {
            let (mu, nu) = (io::read_ensemble(mu)?, io::read_ensemble(nu)?);
            let verdict = check_dominates(&mu, &nu)?;
            let status = serde_json::to_value(verdict.status).expect("status serializes");
            let mut json = json!({ "status": status, "residual": verdict.residual });
            if let Some(plan) = &verdict.plan {
                json["plan"] = json!(plan.rows);
            }
            if let Some(w) = &verdict.violation {
                json["witness_gap"] = json!(w.integral(&nu) - w.integral(&mu));
            }
            let code = match verdict.status {
                OrderStatus::Dominates => 0,
                OrderStatus::NotDominates => 1,
                OrderStatus::NumericallyAmbiguous => 3,
            };
            let row = vec![status.as_str().unwrap_or_default().to_string(), csv_number(verdict.residual)];
            Ok(Report { json, csv_header: "status,residual", csv_rows: vec![row], default: Format::Json, code })
        }
        Command::Refine { mu } => {
            let refined = refine_to_pure(&io::read_ensemble(mu)?);
            Ok(Report::json_only(ensemble_value(refined.ensemble())))
        }
        Command::Steer { mu, target } => {
            let s = steer_barycenter(&io::read_ensemble(mu)?, &io::read_state(target)?)?;
            let json = json!({
                "ensemble": ensemble_value(&s.ensemble),
                "epsilon": s.epsilon,
                "mixing_state": state_value(&s.mixing_state),
            });
            Ok(Report { json, csv_header: "epsilon", csv_rows: vec![vec![csv_number(s.epsilon)]], default: Format::Json, code: 0 })
        }
        Command::Approx { case, n, params, state } => {
            if *n < 1 {
                return Err(Error::InvalidParameter("--n must be at least 1".into()));
            }
            let rho = io::read_state(state)?;
            let case = read_case(*case, params.as_deref())?;
            let values = (1..=*n).map(|k| approx_char_fn(&case, k, &rho)).collect::<Result<Vec<_>>>()?;
            let json = json!({
                "case": case.label(),
                "g": case.g(&rho)?,
                "n": n,
                "value": values[values.len() - 1],
                "sweep": values,
            });
            let rows = values.iter().enumerate().map(|(k, v)| vec![(k + 1).to_string(), csv_number(*v)]).collect();
            Ok(Report { json, csv_header: "n,value", csv_rows: rows, default: Format::Csv, code: 0 })
        }
        Command::Demo { demo: Demo::Remark1 { deltas } } => {
            let rho = DensityMatrix::maximally_mixed(2);
            let mut rows = Vec::new();
            let mut points = Vec::new();
            for &l in deltas {
                let r = concave_hull(&PurityGap, &rho, &RoofOptions { fixed_mixing: Some(l), ..opts.clone() })?;
                rows.push(vec![csv_number(l), csv_number(r.value)]);
                points.push(json!({ "lambda": l, "value": r.value }));
            }
            Ok(Report { json: json!({ "rows": points }), csv_header: "lambda,value", csv_rows: rows, default: Format::Csv, code: 0 })
        }
        Command::Demo { demo: Demo::EfnSweep { state, max_n } } => {
            if *max_n < 2 {
                return Err(Error::InvalidParameter("--max-n must be at least 2".into()));
            }
            let rho = io::read_state(state)?;
            let mut rows = Vec::new();
            let mut points = Vec::new();
            for n in 2..=*max_n {
                let v = efn(&rho, n, &opts, cfg.base)?.value;
                rows.push(vec![n.to_string(), csv_number(v)]);
                points.push(json!({ "n": n, "value": v }));
            }
            Ok(Report { json: json!({ "rows": points }), csv_header: "n,value", csv_rows: rows, default: Format::Csv, code: 0 })
        }
        Command::Oracle { oracle: OracleCommand::Wootters { state } } => {
            let rho = io::read_state(state)?;
            let (v, c) = (wootters_eof(&rho, cfg.base)?, concurrence(&rho)?);
            let json = json!({ "value": v, "concurrence": c, "method": "wootters", "base": base_label(cfg.base) });
            Ok(Report { json, csv_header: "value,concurrence", csv_rows: vec![vec![csv_number(v), csv_number(c)]], default: Format::Json, code: 0 })
        }
        Command::Oracle { oracle: OracleCommand::BruteForce { selector, params, resolution, state } } => {
            let rho = io::read_state(state)?;
            let f = parse_selector(selector, params.as_deref(), &rho, cfg.base)?;
            let r = brute_force_roof(f.as_ref(), &rho, cfg.members.unwrap_or(2), *resolution)?;
            let row = vec![csv_number(r.value), resolution.to_string(), r.members.unwrap_or(0).to_string()];
            let json = serde_json::to_value(&r).expect("report serializes");
            Ok(Report { json, csv_header: "value,resolution,members", csv_rows: vec![row], default: Format::Json, code: 0 })
        }
    }
}
