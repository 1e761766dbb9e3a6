//! Benchmark runs, published-table suites and their output files.
//!
//! A *cell* is one `(problem, method, eps)` run. Cells are independent and
//! run on the rayon pool; rows are sorted before anything is written, so
//! output files do not depend on scheduling.

use std::fmt;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problems::Problem;
use crate::restarts::{
    contraction_audit, final_point_within, solve_restarted, InnerSolver, RestartOptions,
    RestartReport,
};
use crate::solvers::{solve, Algorithm, AuditReport, RunResult, SolveOptions, StepRecord};

/// Directory holding the committed problem fixtures.
pub fn default_fixture_dir() -> PathBuf {
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures"))
}

pub fn fixture_path(dir: &Path, problem: &str) -> PathBuf {
    dir.join(format!("{problem}.json"))
}

/// Loads `<dir>/<id>.json`.
pub fn load_fixture(dir: &Path, problem: &str) -> Result<Problem> {
    let path = fixture_path(dir, problem);
    if !path.exists() {
        // distinguish a typo from a missing file
        Problem::by_id(problem)?;
        return Err(Error::MissingFixture(path));
    }
    Problem::load(path)
}

/// A runnable method: one of the single-run algorithms or a restart scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Method {
    Single(Algorithm),
    Restarted(InnerSolver),
}

impl Method {
    pub fn id(&self) -> &'static str {
        match self {
            Method::Single(a) => a.id(),
            Method::Restarted(r) => r.id(),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.parse::<Algorithm>()
            .map(Method::Single)
            .or_else(|_| s.parse::<InnerSolver>().map(Method::Restarted))
            .map_err(|_| Error::InvalidArgument(format!("unknown algorithm `{s}`")))
    }
}

/// Configuration of `mdopt run`, also accepted as a JSON file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub problem: String,
    pub algorithms: Vec<Method>,
    pub eps_list: Vec<f64>,
    #[serde(default)]
    pub audit: bool,
    /// Seed for randomized checks; the solvers themselves are deterministic.
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.algorithms.is_empty() {
            return Err(Error::InvalidArgument("no algorithms given".into()));
        }
        if self.eps_list.is_empty() {
            return Err(Error::InvalidArgument("eps list is empty".into()));
        }
        if let Some(e) = self.eps_list.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
            return Err(Error::InvalidArgument(format!("eps must be positive, got {e}")));
        }
        Problem::by_id(&self.problem).map(|_| ())
    }

    pub fn from_json_file(path: &Path) -> Result<BenchConfig> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }
}

/// One line of `summary.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub algorithm: String,
    pub problem: String,
    pub eps: f64,
    pub iterations: u64,
    pub productive: u64,
    pub nonproductive: u64,
    pub f_out: f64,
    pub g_out: f64,
    /// Filled only when timings are requested, so that the other columns stay
    /// byte-identical between runs.
    pub wall_ms: Option<f64>,
    pub stop_reason: String,
    /// Restart stage; empty for single runs and restart totals.
    pub p: Option<u32>,
}

impl SummaryRow {
    fn sort_key(&self) -> (String, String, u64, Option<u32>) {
        (
            self.problem.clone(),
            self.algorithm.clone(),
            self.eps.to_bits(),
            self.p,
        )
    }
}

fn row_for(problem: &Problem, label: &str, run: &RunResult, p: Option<u32>, timings: bool) -> SummaryRow {
    SummaryRow {
        algorithm: label.to_string(),
        problem: problem.name.clone(),
        eps: run.eps,
        iterations: run.iterations,
        productive: run.productive,
        nonproductive: run.nonproductive(),
        f_out: problem.objective.value(&run.output),
        g_out: problem.constraint_value(&run.output),
        wall_ms: timings.then(|| run.wall_time.as_secs_f64() * 1e3),
        stop_reason: run.stop_reason.as_str().to_string(),
        p,
    }
}

/// Outcome of a single cell.
#[derive(Debug)]
pub enum CellRun {
    Single(RunResult),
    Restarted(RestartReport),
}

#[derive(Debug)]
pub struct Cell {
    pub problem: String,
    pub method: Method,
    pub eps: f64,
    pub run: CellRun,
}

impl Cell {
    /// Total iterations (inner iterations summed for restarts).
    pub fn iterations(&self) -> u64 {
        match &self.run {
            CellRun::Single(r) => r.iterations,
            CellRun::Restarted(r) => r.total_inner_iterations,
        }
    }

    /// Whether every run in the cell ended by its own stopping rule.
    pub fn succeeded(&self) -> bool {
        match &self.run {
            CellRun::Single(r) => r.stop_reason.is_success(),
            CellRun::Restarted(r) => r.chain.iter().all(|s| s.inner.stop_reason.is_success()),
        }
    }

    pub fn audits(&self) -> Vec<&AuditReport> {
        match &self.run {
            CellRun::Single(r) => r.audit.iter().collect(),
            CellRun::Restarted(r) => r.chain.iter().filter_map(|s| s.inner.audit.as_ref()).collect(),
        }
    }

    /// Summary rows: one for a single run; one per stage plus a total for
    /// restarts.
    pub fn rows(&self, problem: &Problem, timings: bool) -> Vec<SummaryRow> {
        match &self.run {
            CellRun::Single(r) => vec![row_for(problem, self.method.id(), r, None, timings)],
            CellRun::Restarted(report) => {
                let mut rows: Vec<SummaryRow> = report
                    .chain
                    .iter()
                    .map(|s| row_for(problem, self.method.id(), &s.inner, Some(s.p), timings))
                    .collect();
                let productive = report.chain.iter().map(|s| s.inner.productive).sum::<u64>();
                let wall: f64 = report
                    .chain
                    .iter()
                    .map(|s| s.inner.wall_time.as_secs_f64() * 1e3)
                    .sum();
                let stop = report
                    .chain
                    .last()
                    .map_or("criterion_met", |s| s.inner.stop_reason.as_str());
                rows.push(SummaryRow {
                    algorithm: self.method.id().to_string(),
                    problem: problem.name.clone(),
                    eps: report.eps,
                    iterations: report.total_inner_iterations,
                    productive,
                    nonproductive: report.total_inner_iterations - productive,
                    f_out: problem.objective.value(&report.output),
                    g_out: problem.constraint_value(&report.output),
                    wall_ms: timings.then_some(wall),
                    stop_reason: stop.to_string(),
                    p: None,
                });
                rows
            }
        }
    }

    /// `(file stem, trace)` pairs.
    pub fn traces(&self) -> Vec<(String, &[StepRecord])> {
        let stem = format!("{}-{}-eps{}", self.problem, self.method, self.eps);
        match &self.run {
            CellRun::Single(r) => vec![(stem, r.trace.as_slice())],
            CellRun::Restarted(report) => report
                .chain
                .iter()
                .map(|s| (format!("{stem}-p{}", s.p), s.inner.trace.as_slice()))
                .collect(),
        }
    }
}

/// Runs one cell from the problem's own starting point.
pub fn run_cell(problem: &Problem, method: Method, eps: f64, audit: bool, record_trace: bool) -> Result<Cell> {
    let options = SolveOptions {
        audit,
        record_trace,
        ..SolveOptions::default()
    };
    let run = match method {
        Method::Single(alg) => {
            let setup = problem.prox_setup();
            CellRun::Single(solve(alg, problem, &setup, eps, &problem.x0, &options)?)
        }
        Method::Restarted(inner) => {
            let options = RestartOptions {
                solve: options,
                ..RestartOptions::default()
            };
            CellRun::Restarted(match solve_restarted(problem, inner, eps, &options) {
                Ok(report) => report,
                // keep the partial chain; the cell reports the cap
                Err(Error::RestartCapped(report)) => *report,
                Err(e) => return Err(e),
            })
        }
    };
    Ok(Cell {
        problem: problem.name.clone(),
        method,
        eps,
        run,
    })
}

/// Runs every `(method, eps)` pair of a grid in parallel, returning cells in
/// sorted `(problem, method, eps)` order.
pub fn run_grid(
    jobs: &[(Problem, Method, f64)],
    audit: bool,
    record_trace: bool,
) -> Result<Vec<Cell>> {
    let mut cells = jobs
        .par_iter()
        .map(|(p, m, e)| run_cell(p, *m, *e, audit, record_trace))
        .collect::<Result<Vec<_>>>()?;
    cells.sort_by(|a, b| {
        (&a.problem, a.method.id(), a.eps.to_bits()).cmp(&(&b.problem, b.method.id(), b.eps.to_bits()))
    });
    Ok(cells)
}

/// Sorted summary rows of a set of cells.
pub fn summary_rows(cells: &[Cell], problems: &[Problem], timings: bool) -> Vec<SummaryRow> {
    let mut rows: Vec<SummaryRow> = cells
        .iter()
        .flat_map(|c| {
            let p = problems
                .iter()
                .find(|p| p.name == c.problem)
                .expect("every cell comes from a listed problem");
            c.rows(p, timings)
        })
        .collect();
    rows.sort_by_key(|r| r.sort_key());
    rows
}

/// Writes `summary.csv`.
pub fn write_summary(path: &Path, rows: &[SummaryRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes one JSONL file per trace in `dir`.
pub fn write_traces(dir: &Path, cells: &[Cell]) -> Result<()> {
    for cell in cells {
        for (stem, trace) in cell.traces() {
            let file = fs::File::create(dir.join(format!("trace-{stem}.jsonl")))?;
            let mut out = BufWriter::new(file);
            for record in trace {
                serde_json::to_writer(&mut out, record)?;
                out.write_all(b"\n")?;
            }
            out.flush()?;
        }
    }
    Ok(())
}

#[derive(Debug)]
pub struct BenchOutcome {
    pub cells: Vec<Cell>,
    pub rows: Vec<SummaryRow>,
}

impl BenchOutcome {
    pub fn all_succeeded(&self) -> bool {
        self.cells.iter().all(Cell::succeeded)
    }

    /// First failed audit, as `(cell label, report)`.
    pub fn first_audit_failure(&self) -> Option<(String, &AuditReport)> {
        self.cells.iter().find_map(|c| {
            c.audits()
                .into_iter()
                .find(|a| !a.passed())
                .map(|a| (format!("{} {} eps={}", c.problem, c.method, c.eps), a))
        })
    }
}

/// Executes a [`BenchConfig`] on `problem`, writing outputs when the config
/// names a directory.
pub fn run_config(config: &BenchConfig, problem: &Problem, timings: bool) -> Result<BenchOutcome> {
    config.validate()?;
    let jobs: Vec<_> = config
        .algorithms
        .iter()
        .flat_map(|m| config.eps_list.iter().map(move |e| (problem.clone(), *m, *e)))
        .collect();
    let cells = run_grid(&jobs, config.audit, true)?;
    let rows = summary_rows(&cells, std::slice::from_ref(problem), timings);
    if let Some(dir) = &config.output_dir {
        fs::create_dir_all(dir)?;
        write_summary(&dir.join("summary.csv"), &rows)?;
        write_traces(dir, &cells)?;
    }
    Ok(BenchOutcome { cells, rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Table1,
    Table2,
    Table3,
}

/// Iteration counts as published, `(problem, method, eps, count)`.
pub type Published = (&'static str, &'static str, f64, u64);

const TABLE1: [Published; 9] = [
    ("fts-quadratic", "alg5", 0.5, 1659),
    ("fts-quadratic", "alg1", 0.5, 283),
    ("fts-quadratic", "alg6", 0.5, 231),
    ("fts-quadratic", "alg5", 0.25, 5951),
    ("fts-quadratic", "alg1", 0.25, 899),
    ("fts-quadratic", "alg6", 0.25, 774),
    ("fts-quadratic", "alg5", 0.125, 22356),
    ("fts-quadratic", "alg1", 0.125, 3159),
    ("fts-quadratic", "alg6", 0.125, 2850),
];

const TABLE2: [Published; 9] = [
    ("fts-nonsmooth", "alg5", 0.5, 3709),
    ("fts-nonsmooth", "alg1", 0.5, 671),
    ("fts-nonsmooth", "alg6", 0.5, 437),
    ("fts-nonsmooth", "alg5", 0.25, 14212),
    ("fts-nonsmooth", "alg1", 0.25, 2418),
    ("fts-nonsmooth", "alg6", 0.25, 1970),
    ("fts-nonsmooth", "alg5", 0.125, 54655),
    ("fts-nonsmooth", "alg1", 0.125, 8979),
    ("fts-nonsmooth", "alg6", 0.125, 8329),
];

const TABLE3: [Published; 10] = [
    ("sc-example-1", "alg1", 0.05, 115_973),
    ("sc-example-1", "restart_alg1", 0.05, 95_447),
    ("sc-example-2", "alg1", 0.05, 57_798),
    ("sc-example-2", "restart_alg1", 0.05, 45_455),
    ("sc-example-3", "alg1", 0.05, 56_874),
    ("sc-example-3", "restart_alg1", 0.05, 50_747),
    ("sc-example-4", "alg1", 0.05, 13_720),
    ("sc-example-4", "restart_alg1", 0.05, 6_764),
    ("sc-example-5", "alg1", 0.05, 64_324),
    ("sc-example-5", "restart_alg1", 0.05, 55_073),
];

impl Suite {
    pub fn name(&self) -> &'static str {
        match self {
            Suite::Table1 => "table1",
            Suite::Table2 => "table2",
            Suite::Table3 => "table3",
        }
    }

    pub fn published(&self) -> &'static [Published] {
        match self {
            Suite::Table1 => &TABLE1,
            Suite::Table2 => &TABLE2,
            Suite::Table3 => &TABLE3,
        }
    }

    pub fn problems(&self) -> Vec<&'static str> {
        let mut ids: Vec<_> = self.published().iter().map(|p| p.0).collect();
        ids.dedup();
        ids
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table1" => Ok(Suite::Table1),
            "table2" => Ok(Suite::Table2),
            "table3" => Ok(Suite::Table3),
            _ => Err(Error::InvalidArgument(format!("unknown suite `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub problem: String,
    pub algorithm: String,
    pub eps: f64,
    pub observed: u64,
    pub published: u64,
    /// observed / published
    pub ratio: f64,
}

/// Ordering claims of a table: `alg6 <= alg1 < alg5` per eps for the FTS
/// tables, restarted `<` plain per example for the strongly convex one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingCheck {
    pub problem: String,
    pub eps: f64,
    pub claim: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionCheck {
    pub problem: String,
    /// `(p, holds)` for `p = 0, 1, ...`.
    pub stages: Vec<(u32, bool)>,
    pub final_within: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub comparisons: Vec<Comparison>,
    pub orderings: Vec<OrderingCheck>,
    pub contraction: Vec<ContractionCheck>,
    pub all_succeeded: bool,
    /// Published wall-clock times are not reproduced; only counts and
    /// orderings are compared.
    pub note: String,
}

#[derive(Debug)]
pub struct SuiteOutcome {
    pub cells: Vec<Cell>,
    pub rows: Vec<SummaryRow>,
    pub report: SuiteReport,
}

fn count(cells: &[Cell], problem: &str, method: &str, eps: f64) -> u64 {
    cells
        .iter()
        .find(|c| c.problem == problem && c.method.id() == method && c.eps == eps)
        .map(Cell::iterations)
        .expect("cell present in the grid")
}

/// Reproduces one of the published tables from the fixtures in `fixtures`.
pub fn run_suite(suite: Suite, fixtures: &Path, timings: bool, record_trace: bool) -> Result<SuiteOutcome> {
    let problems = suite
        .problems()
        .into_iter()
        .map(|id| load_fixture(fixtures, id))
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<_> = suite
        .published()
        .iter()
        .map(|(id, m, e, _)| {
            let p = problems.iter().find(|p| p.name == *id).expect("loaded above");
            Ok((p.clone(), m.parse::<Method>()?, *e))
        })
        .collect::<Result<_>>()?;
    let cells = run_grid(&jobs, false, record_trace)?;
    let rows = summary_rows(&cells, &problems, timings);

    let comparisons = suite
        .published()
        .iter()
        .map(|(id, m, e, published)| {
            let observed = count(&cells, id, m, *e);
            Comparison {
                problem: id.to_string(),
                algorithm: m.to_string(),
                eps: *e,
                observed,
                published: *published,
                ratio: observed as f64 / *published as f64,
            }
        })
        .collect();

    let mut orderings = Vec::new();
    let mut contraction = Vec::new();
    match suite {
        Suite::Table1 | Suite::Table2 => {
            let problem = suite.problems()[0];
            for eps in [0.5, 0.25, 0.125] {
                let (a5, a1, a6) = (
                    count(&cells, problem, "alg5", eps),
                    count(&cells, problem, "alg1", eps),
                    count(&cells, problem, "alg6", eps),
                );
                orderings.push(OrderingCheck {
                    problem: problem.to_string(),
                    eps,
                    claim: format!("alg6 ({a6}) <= alg1 ({a1}) < alg5 ({a5})"),
                    holds: a6 <= a1 && a1 < a5,
                });
            }
        }
        Suite::Table3 => {
            for p in &problems {
                let plain = count(&cells, &p.name, "alg1", 0.05);
                let restarted = count(&cells, &p.name, "restart_alg1", 0.05);
                orderings.push(OrderingCheck {
                    problem: p.name.clone(),
                    eps: 0.05,
                    claim: format!("restart_alg1 ({restarted}) < alg1 ({plain})"),
                    holds: restarted < plain,
                });
                let reference = p
                    .reference
                    .as_ref()
                    .ok_or_else(|| Error::Fixture(format!("`{}` has no reference optimum", p.name)))?;
                let cell = cells
                    .iter()
                    .find(|c| c.problem == p.name && matches!(c.run, CellRun::Restarted(_)))
                    .expect("restart cell present");
                if let CellRun::Restarted(report) = &cell.run {
                    contraction.push(ContractionCheck {
                        problem: p.name.clone(),
                        stages: contraction_audit(report, &reference.x_star),
                        final_within: final_point_within(report, &reference.x_star),
                    });
                }
            }
        }
    }

    let report = SuiteReport {
        suite,
        comparisons,
        orderings,
        contraction,
        all_succeeded: cells.iter().all(Cell::succeeded),
        note: "published wall-clock times come from different hardware and are not compared".into(),
    };
    Ok(SuiteOutcome {
        cells,
        rows,
        report,
    })
}

impl SuiteOutcome {
    /// Writes `summary.csv`, `report-<suite>.json` and, if recorded, traces.
    pub fn write(&self, dir: &Path, traces: bool) -> Result<()> {
        fs::create_dir_all(dir)?;
        write_summary(&dir.join("summary.csv"), &self.rows)?;
        let mut text = serde_json::to_string_pretty(&self.report)?;
        text.push('\n');
        fs::write(dir.join(format!("report-{}.json", self.report.suite.name())), text)?;
        if traces {
            write_traces(dir, &self.cells)?;
        }
        Ok(())
    }
}
