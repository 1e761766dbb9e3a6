use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mdopt::bench::{
    default_fixture_dir, fixture_path, load_fixture, run_config, run_suite, BenchConfig, Method,
    Suite,
};
use mdopt::problems::{compute_reference, Problem};
use mdopt::verify::{verify_problem, VerifyOptions};
use mdopt::Error;

const EXIT_CONFIG: u8 = 2;
const EXIT_CHECK: u8 = 3;
const EXIT_FIXTURE: u8 = 4;

#[derive(Parser)]
#[command(name = "mdopt", version, about = "Adaptive mirror descent benchmarks")]
struct Cli {
    /// Directory with problem fixtures.
    #[arg(long, global = true)]
    fixtures: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run algorithms on one problem.
    Run {
        #[arg(long)]
        problem: Option<String>,
        /// alg1, alg2, alg5, alg6, restart_alg1 or restart_alg2; repeatable.
        #[arg(long = "alg")]
        algorithms: Vec<String>,
        /// Repeatable.
        #[arg(long = "eps")]
        eps_list: Vec<f64>,
        /// Check the per-step three-point inequality.
        #[arg(long)]
        audit: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        /// JSON config replacing the flags above.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Fill the wall_ms column.
        #[arg(long)]
        timings: bool,
    },
    /// Reproduce a published table.
    Suite {
        #[arg(value_parser = ["table1", "table2", "table3"])]
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        timings: bool,
        /// Also write per-run JSONL traces.
        #[arg(long)]
        traces: bool,
    },
    /// Run the invariant battery against a fixture.
    Verify {
        #[arg(long)]
        problem: String,
    },
    /// Compute a reference optimum and write a new fixture.
    Reference {
        #[arg(long)]
        problem: String,
        #[arg(long, default_value_t = 2_000_000)]
        budget: u64,
        /// Output file; defaults to the fixture directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn fail(code: u8, err: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(code)
}

fn error_code(err: &Error) -> u8 {
    match err {
        Error::MissingFixture(_) => EXIT_FIXTURE,
        Error::UnknownProblem(_) | Error::InvalidArgument(_) | Error::Json(_) => EXIT_CONFIG,
        _ => EXIT_CHECK,
    }
}

fn load_run_problem(fixtures: &Path, id: &str) -> Result<Problem, Error> {
    match load_fixture(fixtures, id) {
        Err(Error::MissingFixture(_)) => Problem::by_id(id),
        other => other,
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_run(
    fixtures: &Path,
    problem: Option<String>,
    algorithms: Vec<String>,
    eps_list: Vec<f64>,
    audit: bool,
    out: Option<PathBuf>,
    config: Option<PathBuf>,
    timings: bool,
) -> Result<ExitCode, Error> {
    let config = match config {
        Some(path) => BenchConfig::from_json_file(&path)?,
        None => BenchConfig {
            problem: problem
                .ok_or_else(|| Error::InvalidArgument("--problem is required".into()))?,
            algorithms: algorithms
                .iter()
                .map(|a| a.parse::<Method>())
                .collect::<Result<_, _>>()?,
            eps_list,
            audit,
            seed: 0,
            output_dir: out,
        },
    };
    config.validate()?;
    let problem = load_run_problem(fixtures, &config.problem)?;
    let outcome = run_config(&config, &problem, timings)?;
    for r in &outcome.rows {
        let stage = r.p.map(|p| format!(" p={p}")).unwrap_or_default();
        println!(
            "{} {} eps={}{stage}: {} iterations ({} productive), f={:.6} g={:.3e}, {}",
            r.problem, r.algorithm, r.eps, r.iterations, r.productive, r.f_out, r.g_out, r.stop_reason
        );
    }
    if let Some((cell, report)) = outcome.first_audit_failure() {
        let first = report.first_violation.as_ref().expect("failed audits record a violation");
        eprintln!("audit failed in {cell}: {first}");
        return Ok(ExitCode::from(EXIT_CHECK));
    }
    if !outcome.all_succeeded() {
        eprintln!("some runs stopped at the iteration cap");
        return Ok(ExitCode::from(EXIT_CHECK));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_suite(fixtures: &Path, name: &str, out: Option<PathBuf>, timings: bool, traces: bool) -> Result<ExitCode, Error> {
    let suite: Suite = name.parse()?;
    let outcome = run_suite(suite, fixtures, timings, traces)?;
    println!("{:<16} {:<14} {:>7} {:>9} {:>9} {:>7}", "problem", "algorithm", "eps", "observed", "published", "ratio");
    for c in &outcome.report.comparisons {
        println!(
            "{:<16} {:<14} {:>7} {:>9} {:>9} {:>7.3}",
            c.problem, c.algorithm, c.eps, c.observed, c.published, c.ratio
        );
    }
    for o in &outcome.report.orderings {
        println!("{} {} eps={}: {}", if o.holds { "ok  " } else { "FAIL" }, o.problem, o.eps, o.claim);
    }
    for c in &outcome.report.contraction {
        let ok = c.stages.iter().all(|(_, ok)| *ok) && c.final_within;
        println!("{} {} contraction {:?}", if ok { "ok  " } else { "FAIL" }, c.problem, c.stages);
    }
    if let Some(dir) = out {
        outcome.write(&dir, traces)?;
    }
    Ok(if outcome.report.all_succeeded {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_CHECK)
    })
}

fn cmd_verify(fixtures: &Path, id: &str) -> Result<ExitCode, Error> {
    let problem = load_fixture(fixtures, id)?;
    if problem.reference.is_none() {
        return Err(Error::MissingFixture(fixture_path(fixtures, id)));
    }
    let report = verify_problem(&problem, &VerifyOptions::for_problem(&problem))?;
    for c in &report.checks {
        let tag = match (c.passed, c.gating) {
            (true, _) => "pass",
            (false, true) => "FAIL",
            (false, false) => "note",
        };
        println!("{tag} {}: {}", c.name, c.detail);
    }
    Ok(if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_CHECK)
    })
}

fn cmd_reference(fixtures: &Path, id: &str, budget: u64, out: Option<PathBuf>) -> Result<ExitCode, Error> {
    let path = out.unwrap_or_else(|| fixture_path(fixtures, id));
    if path.exists() {
        return Err(Error::InvalidArgument(format!(
            "{} exists; fixtures are never overwritten",
            path.display()
        )));
    }
    let problem = Problem::by_id(id)?;
    let problem = match problem.reference {
        Some(_) => problem,
        None => {
            let reference = compute_reference(&problem, budget)?;
            problem.with_reference(reference)
        }
    };
    let r = problem.reference.as_ref().expect("set above");
    println!("{id}: f_* = {} (residual {:e}, {} iterations)", r.f_star, r.residual, r.budget);
    problem.save(&path)?;
    println!("wrote {}", path.display());
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let fixtures = cli.fixtures.unwrap_or_else(default_fixture_dir);
    let result = match cli.command {
        Command::Run {
            problem,
            algorithms,
            eps_list,
            audit,
            out,
            config,
            timings,
        } => cmd_run(&fixtures, problem, algorithms, eps_list, audit, out, config, timings),
        Command::Suite {
            name,
            out,
            timings,
            traces,
        } => cmd_suite(&fixtures, &name, out, timings, traces),
        Command::Verify { problem } => cmd_verify(&fixtures, &problem),
        Command::Reference {
            problem,
            budget,
            out,
        } => cmd_reference(&fixtures, &problem, budget, out),
    };
    result.unwrap_or_else(|e| fail(error_code(&e), e))
}
