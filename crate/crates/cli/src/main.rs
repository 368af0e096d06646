//! `totality` command-line frontend.
//!
//! Results go to `--output` (or stdout). Anything that is not a result is
//! reported as a single-line JSON object on stderr, and the exit code says
//! what happened:
//!
//! | code | meaning                                   |
//! |------|-------------------------------------------|
//! | 0    | solved / holds / certificate replays      |
//! | 1    | usage, malformed input or internal error  |
//! | 2    | outside the solver's regime               |
//! | 3    | not in the lattice, infeasible, rejected  |
//! | 4    | search budget exhausted                   |

mod report;

use clap::{Args, Parser, Subcommand, ValueEnum};
use report::{Outcome, RunReport};
use serde_json::{json, Value};
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;
use totality::hardness::{self, HardnessError, InfeasibilityCertificate};
use totality::ilpe::{self, IlpeError};
use totality::instance::matrix_rows;
use totality::lattice::hnf_of_matrix;
use totality::oracle::{self, OracleError, SearchBudget};
use totality::uss::{self, FallbackBudget, UssError};
use totality::{Instance, Int, Solution};

#[derive(Parser)]
#[command(name = "totality", version, about = "Exact solvers for total integer programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Unbounded subset sum.
    #[command(subcommand)]
    Uss(UssCommand),
    /// Integer programs with equality constraints.
    #[command(subcommand)]
    Ilpe(IlpeCommand),
    /// Integer programs with inequality constraints.
    #[command(subcommand)]
    Ilp(SolveOnly),
    /// Integer programs with both kinds of constraints.
    #[command(subcommand)]
    Hilp(SolveOnly),
    /// Hard instances and bounds.
    #[command(subcommand)]
    Hardness(HardnessCommand),
    /// Brute-force checks.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Lattice utilities.
    #[command(subcommand)]
    Lattice(LatticeCommand),
}

#[derive(Subcommand)]
enum UssCommand {
    /// Find x >= 0 with sum a_i x_i = b.
    Solve {
        #[command(flatten)]
        io: Io,
        /// Regime parameter: b (i - 1) >= a_i^2 is required for i > k.
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Report out-of-regime instances (exit 2) instead of deciding them
        /// with the exact fallback search.
        #[arg(long)]
        strict: bool,
    },
    /// Report which regime hypotheses hold.
    Check {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
}

#[derive(Subcommand)]
enum IlpeCommand {
    /// Solve A x = b, x >= 0 in the total regime.
    Solve {
        #[command(flatten)]
        io: Io,
        /// Reduce rank and search for a certifying column order first.
        #[arg(long)]
        auto: bool,
    },
    /// Print V, Delta, M and the coarse threshold.
    Profile {
        #[command(flatten)]
        io: Io,
    },
}

#[derive(Subcommand)]
enum SolveOnly {
    /// Solve through the reduction to equality form.
    Solve {
        #[command(flatten)]
        io: Io,
    },
}

#[derive(Subcommand)]
enum HardnessCommand {
    /// Generate the hard d x (d+1) instance and its certificate.
    Gen {
        #[command(flatten)]
        io: Io,
        #[arg(long)]
        d: usize,
    },
    /// d (2 d ||A||_inf + 1)^d for an instance's matrix.
    BachBound {
        #[command(flatten)]
        io: Io,
    },
    /// Replay an infeasibility certificate against an instance.
    Verify {
        #[command(flatten)]
        io: Io,
    },
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Check a solution file against an instance file.
    Check {
        #[command(flatten)]
        io: Io,
        #[arg(long)]
        solution: PathBuf,
    },
    /// Frobenius number of a small coin set.
    Frobenius {
        #[command(flatten)]
        io: Io,
        /// Comma-separated coins; otherwise the weights of a USS instance.
        #[arg(long, value_delimiter = ',')]
        coins: Vec<String>,
    },
}

#[derive(Subcommand)]
enum LatticeCommand {
    /// Hermite normal form of the columns of an instance's matrix.
    Hnf {
        #[command(flatten)]
        io: Io,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
}

#[derive(Args, Clone)]
struct Io {
    /// Instance file (stdin if omitted).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Result file (stdout if omitted).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Work budget for searches.
    #[arg(long)]
    budget: Option<u64>,
    /// Re-verify solutions before writing them.
    #[arg(long, overrides_with = "no_verify", default_value_t = true)]
    verify: bool,
    #[arg(long = "no-verify", overrides_with = "verify")]
    no_verify: bool,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Certificate file (written by `hardness gen`, read by `hardness verify`).
    #[arg(long)]
    certificate: Option<PathBuf>,
    /// Write a run report here.
    #[arg(long)]
    report: Option<PathBuf>,
}

impl Io {
    fn verify(&self) -> bool {
        self.verify && !self.no_verify
    }
}

/// A finished command: what to write and how it ended.
struct Done {
    outcome: Outcome,
    body: Option<String>,
    message: Option<String>,
    certificate: Option<String>,
}

impl Done {
    fn ok(body: String) -> Self {
        Done {
            outcome: Outcome::Solved,
            body: Some(body),
            message: None,
            certificate: None,
        }
    }

    fn status(outcome: Outcome, message: impl Into<String>) -> Self {
        Done {
            outcome,
            body: None,
            message: Some(message.into()),
            certificate: None,
        }
    }
}

/// Failure before a command could produce an outcome.
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

fn read_input(io: &Io) -> Result<String, Failure> {
    match &io.input {
        Some(p) => std::fs::read_to_string(p).map_err(|e| Failure(format!("cannot read {}: {e}", p.display()))),
        None => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            Ok(s)
        }
    }
}

fn write_output(path: Option<&Path>, body: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, body).map_err(|e| Failure(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn json_line(v: &Value) -> String {
    let mut s = serde_json::to_string(v).expect("json value serializes");
    s.push('\n');
    s
}

fn json_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value serializes");
    s.push('\n');
    s
}

fn solution_body(inst: &Instance, s: Solution, io: &Io) -> Result<Done, Failure> {
    if io.verify() && !inst.verify(&s.x)? {
        return Ok(Done::status(Outcome::Error, "solver returned an invalid solution"));
    }
    Ok(Done::ok(s.to_json()))
}

fn fallback_budget(io: &Io) -> FallbackBudget {
    let mut b = FallbackBudget::default();
    if let Some(steps) = io.budget {
        b.steps = steps;
    }
    b
}

fn uss_error(e: UssError) -> Done {
    match e {
        UssError::NotInRegime(m) => Done::status(Outcome::NotInRegime, m),
        UssError::NoSolution => Done::status(Outcome::Infeasible, "no non-negative solution exists"),
        UssError::ResourceExceeded(n) => Done::status(Outcome::BudgetExceeded, format!("budget of {n} steps exhausted")),
        other => Done::status(Outcome::Error, other.to_string()),
    }
}

fn ilpe_error(e: IlpeError) -> Done {
    match e {
        IlpeError::NotInRegime(m) => Done::status(Outcome::NotInRegime, m),
        IlpeError::DependentLeadingColumns(_) | IlpeError::NotFound => {
            Done::status(Outcome::NotInRegime, e.to_string())
        }
        IlpeError::NotInLattice => Done::status(Outcome::NotInLattice, e.to_string()),
        IlpeError::Inconsistent => Done::status(Outcome::Infeasible, e.to_string()),
        IlpeError::BudgetExceeded(_) => Done::status(Outcome::BudgetExceeded, e.to_string()),
        other => Done::status(Outcome::Error, other.to_string()),
    }
}

fn expect_kind<'a>(inst: &'a Instance, kinds: &[&str]) -> Result<&'a Instance, Failure> {
    if kinds.contains(&inst.kind()) {
        Ok(inst)
    } else {
        Err(Failure(format!("expected a {} instance, got {}", kinds.join(" or "), inst.kind())))
    }
}

fn search_budget(io: &Io) -> SearchBudget {
    let mut b = SearchBudget::default();
    if let Some(states) = io.budget {
        b.max_states = states.max(1);
    }
    b
}

fn run(command: &Command, io: &Io, input: &str) -> Result<Done, Failure> {
    let load = || Instance::from_json(input).map_err(Failure::from);
    match command {
        Command::Uss(UssCommand::Solve { k, strict, .. }) => {
            let inst = load()?;
            let Instance::Uss(u) = expect_kind(&inst, &["uss"])? else { unreachable!() };
            let budget = fallback_budget(io);
            let in_regime = match uss::check_regime(u, *k) {
                Ok(v) => v,
                Err(e) => return Ok(uss_error(e)),
            };
            let result = if in_regime || *strict {
                uss::solve_uss_with_budget(u, *k, budget)
            } else {
                uss::fallback_solve_with_budget(u, budget)
            };
            match result {
                Ok(s) => solution_body(&inst, s, io),
                Err(e) => Ok(uss_error(e)),
            }
        }
        Command::Uss(UssCommand::Check { k, .. }) => {
            let inst = load()?;
            let Instance::Uss(u) = expect_kind(&inst, &["uss"])? else { unreachable!() };
            let in_regime = match uss::check_regime(u, *k) {
                Ok(v) => v,
                Err(e) => return Ok(uss_error(e)),
            };
            let r = uss::regime_report(u);
            let body = json_pretty(&json!({
                "k": k,
                "in_regime": in_regime,
                "k_min": r.k_min,
                "gcd_divides": r.gcd_divides,
                "erdos_graham": r.erdos_graham,
            }));
            Ok(if in_regime {
                Done::ok(body)
            } else {
                Done {
                    outcome: Outcome::NotInRegime,
                    body: Some(body),
                    message: Some(format!("not in the regime for k = {k}")),
                    certificate: None,
                }
            })
        }
        Command::Ilpe(IlpeCommand::Solve { auto, .. }) => {
            let inst = load()?;
            let Instance::Ilpe(p) = expect_kind(&inst, &["ilpe"])? else { unreachable!() };
            let result = if *auto {
                ilpe::solve_ilpe_auto(p, io.budget.unwrap_or(ilpe::DEFAULT_SEARCH_BUDGET))
            } else {
                ilpe::solve_ilpe_total(p)
            };
            match result {
                Ok(s) => solution_body(&inst, s, io),
                Err(e) => Ok(ilpe_error(e)),
            }
        }
        Command::Ilpe(IlpeCommand::Profile { .. }) => {
            let inst = load()?;
            let Instance::Ilpe(p) = expect_kind(&inst, &["ilpe"])? else { unreachable!() };
            match ilpe::compute_profile(p) {
                Ok(pr) => Ok(Done::ok(json_pretty(&json!({
                    "V": pr.v.to_string(),
                    "Delta": pr.delta.to_string(),
                    "M": pr.m.to_string(),
                    "coarse_threshold": ilpe::coarse_threshold(p).to_string(),
                })))),
                Err(e) => Ok(Done::status(Outcome::Error, e.to_string())),
            }
        }
        Command::Ilp(SolveOnly::Solve { .. }) => {
            let inst = load()?;
            let Instance::Ilp(p) = expect_kind(&inst, &["ilp"])? else { unreachable!() };
            match ilpe::solve_ilp(p, io.budget.unwrap_or(ilpe::DEFAULT_SEARCH_BUDGET)) {
                Ok(s) => solution_body(&inst, s, io),
                Err(e) => Ok(ilpe_error(e)),
            }
        }
        Command::Hilp(SolveOnly::Solve { .. }) => {
            let inst = load()?;
            let Instance::Hilp(p) = expect_kind(&inst, &["hilp"])? else { unreachable!() };
            match ilpe::solve_hilp(p, io.budget.unwrap_or(ilpe::DEFAULT_SEARCH_BUDGET)) {
                Ok(s) => solution_body(&inst, s, io),
                Err(e) => Ok(ilpe_error(e)),
            }
        }
        Command::Hardness(HardnessCommand::Gen { d, .. }) => {
            let g = match hardness::gen_lower_bound_instance(*d) {
                Ok(g) => g,
                Err(HardnessError::BudgetExceeded(m)) => return Ok(Done::status(Outcome::BudgetExceeded, m)),
                Err(e) => return Err(e.into()),
            };
            let cert = hardness::certify_infeasible(&g)?;
            let cert_path = io.certificate.clone().or_else(|| io.output.as_ref().map(|p| certificate_path(p)));
            if let Some(path) = &cert_path {
                write_output(Some(path), &cert.to_json())?;
            }
            let mut done = Done::ok(Instance::Ilpe(g.to_ilpe()).to_json());
            done.certificate = cert_path.map(|p| p.display().to_string());
            Ok(done)
        }
        Command::Hardness(HardnessCommand::BachBound { .. }) => {
            let inst = load()?;
            let a = match &inst {
                Instance::Ilpe(p) => p.a.clone(),
                Instance::Ilp(p) => p.a.clone(),
                other => return Err(Failure(format!("expected an ilpe or ilp instance, got {}", other.kind()))),
            };
            Ok(Done::ok(json_line(&json!({ "bach_bound": hardness::bach_bound(&a).to_string() }))))
        }
        Command::Hardness(HardnessCommand::Verify { .. }) => {
            let inst = load()?;
            let Instance::Ilpe(p) = expect_kind(&inst, &["ilpe"])? else { unreachable!() };
            let path = io
                .certificate
                .as_ref()
                .ok_or_else(|| Failure("--certificate is required".into()))?;
            let text = std::fs::read_to_string(path).map_err(|e| Failure(format!("cannot read {}: {e}", path.display())))?;
            let cert = InfeasibilityCertificate::from_json(&text)?;
            Ok(match cert.verify(p) {
                Ok(()) => Done::ok(json_line(&json!({ "certificate": "valid" }))),
                Err(e) => Done::status(Outcome::Infeasible, e.to_string()),
            })
        }
        Command::Oracle(OracleCommand::Check { solution, .. }) => {
            let inst = load()?;
            let text = std::fs::read_to_string(solution)
                .map_err(|e| Failure(format!("cannot read {}: {e}", solution.display())))?;
            let s = Solution::from_json(&text)?;
            Ok(if inst.verify(&s.x)? {
                Done::ok(json_line(&json!({ "valid": true })))
            } else {
                Done::status(Outcome::Infeasible, "x does not solve the instance")
            })
        }
        Command::Oracle(OracleCommand::Frobenius { coins, .. }) => {
            let a: Vec<Int> = if coins.is_empty() {
                match load()? {
                    Instance::Uss(u) => u.weights().to_vec(),
                    other => return Err(Failure(format!("expected a uss instance, got {}", other.kind()))),
                }
            } else {
                coins
                    .iter()
                    .map(|c| totality::arith::parse_int(c.trim()))
                    .collect::<Result<_, _>>()?
            };
            match oracle::brute_frobenius(&a, &search_budget(io)) {
                Ok(g) => Ok(Done::ok(json_line(&json!({ "frobenius": g.to_string() })))),
                Err(OracleError::BudgetExceeded(m)) => Ok(Done::status(Outcome::BudgetExceeded, m)),
                Err(e) => Err(e.into()),
            }
        }
        Command::Lattice(LatticeCommand::Hnf { .. }) => {
            let inst = load()?;
            let a = match &inst {
                Instance::Ilpe(p) => p.a.clone(),
                Instance::Ilp(p) => p.a.clone(),
                other => return Err(Failure(format!("expected an ilpe or ilp instance, got {}", other.kind()))),
            };
            if a.is_zero() {
                return Err(Failure("the zero lattice has no basis".into()));
            }
            let basis = hnf_of_matrix(&a)?;
            let volume: Value = basis.volume().map_or(Value::Null, |v| Value::String(v.to_string()));
            Ok(Done::ok(json_pretty(&json!({
                "basis": matrix_rows(basis.matrix()),
                "pivot_rows": basis.pivot_rows(),
                "rank": basis.rank(),
                "volume": volume,
                "transform": matrix_rows(basis.transform()),
            }))))
        }
    }
}

fn certificate_path(output: &Path) -> PathBuf {
    let stem = output.file_stem().map_or_else(|| "instance".into(), |s| s.to_string_lossy().into_owned());
    output.with_file_name(format!("{stem}.cert.json"))
}

fn io_of(command: &Command) -> &Io {
    match command {
        Command::Uss(UssCommand::Solve { io, .. } | UssCommand::Check { io, .. })
        | Command::Ilpe(IlpeCommand::Solve { io, .. } | IlpeCommand::Profile { io })
        | Command::Ilp(SolveOnly::Solve { io })
        | Command::Hilp(SolveOnly::Solve { io })
        | Command::Hardness(
            HardnessCommand::Gen { io, .. } | HardnessCommand::BachBound { io } | HardnessCommand::Verify { io },
        )
        | Command::Oracle(OracleCommand::Check { io, .. } | OracleCommand::Frobenius { io, .. })
        | Command::Lattice(LatticeCommand::Hnf { io }) => io,
    }
}

fn name_of(command: &Command) -> &'static str {
    match command {
        Command::Uss(UssCommand::Solve { .. }) => "uss solve",
        Command::Uss(UssCommand::Check { .. }) => "uss check",
        Command::Ilpe(IlpeCommand::Solve { .. }) => "ilpe solve",
        Command::Ilpe(IlpeCommand::Profile { .. }) => "ilpe profile",
        Command::Ilp(_) => "ilp solve",
        Command::Hilp(_) => "hilp solve",
        Command::Hardness(HardnessCommand::Gen { .. }) => "hardness gen",
        Command::Hardness(HardnessCommand::BachBound { .. }) => "hardness bach-bound",
        Command::Hardness(HardnessCommand::Verify { .. }) => "hardness verify",
        Command::Oracle(OracleCommand::Check { .. }) => "oracle check",
        Command::Oracle(OracleCommand::Frobenius { .. }) => "oracle frobenius",
        Command::Lattice(LatticeCommand::Hnf { .. }) => "lattice hnf",
    }
}

/// Commands that do not read an instance.
fn reads_input(command: &Command) -> bool {
    match command {
        Command::Hardness(HardnessCommand::Gen { .. }) => false,
        Command::Oracle(OracleCommand::Frobenius { coins, .. }) => coins.is_empty(),
        _ => true,
    }
}

fn emit_status(outcome: Outcome, message: &str) {
    eprintln!(
        "{}",
        serde_json::to_string(&json!({ "outcome": outcome.as_str(), "message": message })).expect("serializes")
    );
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let first = e.to_string().lines().next().unwrap_or("usage error").trim_start_matches("error: ").to_string();
            emit_status(Outcome::Error, &first);
            return ExitCode::from(1);
        }
    };
    let start = Instant::now();
    let io = io_of(&cli.command).clone();
    let Format::Json = io.format;
    let input = if reads_input(&cli.command) {
        match read_input(&io) {
            Ok(s) => s,
            Err(Failure(m)) => {
                emit_status(Outcome::Error, &m);
                return ExitCode::from(1);
            }
        }
    } else {
        String::new()
    };

    let done = match run(&cli.command, &io, &input) {
        Ok(done) => done,
        Err(Failure(m)) => Done::status(Outcome::Error, m),
    };
    if let Some(body) = &done.body {
        if let Err(Failure(m)) = write_output(io.output.as_deref(), body) {
            emit_status(Outcome::Error, &m);
            return ExitCode::from(1);
        }
    }
    if let Some(m) = &done.message {
        emit_status(done.outcome, m);
    }
    if let Some(path) = &io.report {
        let output = done
            .body
            .as_ref()
            .map(|_| io.output.as_ref().map_or_else(|| "stdout".to_string(), |p| p.display().to_string()));
        let mut report = RunReport::new(name_of(&cli.command), &input, done.outcome, output, start.elapsed());
        report.certificate = done.certificate.clone();
        if let Err(Failure(m)) = write_output(Some(path), &report.to_json()) {
            emit_status(Outcome::Error, &m);
            return ExitCode::from(1);
        }
    }
    ExitCode::from(done.outcome.exit_code())
}
