//! Mirror descent with productive and non-productive steps.
//!
//! All four methods share one loop. At `x^N` the method checks the
//! constraint: if `g(x^N) <= eps` it takes a *productive* step along a
//! subgradient of `f`, otherwise a *non-productive* step along a subgradient
//! of the constraint. They differ only in step sizes, stopping rule and how
//! the output is assembled:
//!
//! | method | productive `h` | non-productive `h` | stop | output |
//! |---|---|---|---|---|
//! | [`Algorithm::Adaptive`] | `eps / ‖∇f‖*` | `eps / ‖∇g‖*²` | `Θ₀² ≤ eps²/2 (|I| + Σ 1/‖∇g‖*²)` | best productive |
//! | [`Algorithm::PartiallyAdaptive`] | `eps / (M_g ‖∇f‖*)` | `eps / M_g²` | `N = ⌈2 M_g² Θ₀² / eps²⌉` | best productive |
//! | [`Algorithm::Lipschitz`] | `eps / ‖∇f‖*²` | `eps / ‖∇g‖*²` | `Σ 1/M_j² ≥ 2 Θ₀² / eps²` | `h`-weighted average |
//! | [`Algorithm::MultiConstraint`] | `eps / ‖∇f‖*` | `eps / ‖∇g_m‖*²` | as adaptive | best productive |

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracles::SelectionRule;
use crate::problems::Problem;
use crate::prox::{check_dim, ProxSetup, Vector, FEASIBILITY_TOL};

/// Safety cap on the adaptive stopping rules.
pub const DEFAULT_ITERATION_CAP: u64 = 10_000_000;

/// Absolute tolerance of the per-step three-point inequality audit.
pub const AUDIT_TOL: f64 = 1e-8;

/// Number of fixed probe points the audit checks each step against.
pub const AUDIT_PROBES: usize = 8;

const PROBE_SEED: u64 = 0x6d64_6f70_7431;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Algorithm {
    /// Fully adaptive steps and stopping rule.
    #[serde(rename = "alg1")]
    Adaptive,
    /// Uses the known `M_g` and a fixed iteration count.
    #[serde(rename = "alg2")]
    PartiallyAdaptive,
    /// Steps `eps / M_N²` for Lipschitz objectives, averaged output.
    #[serde(rename = "alg5")]
    Lipschitz,
    /// Adaptive method that steps on one selected violated constraint.
    #[serde(rename = "alg6")]
    MultiConstraint,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Adaptive,
        Algorithm::PartiallyAdaptive,
        Algorithm::Lipschitz,
        Algorithm::MultiConstraint,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            Algorithm::Adaptive => "alg1",
            Algorithm::PartiallyAdaptive => "alg2",
            Algorithm::Lipschitz => "alg5",
            Algorithm::MultiConstraint => "alg6",
        }
    }

    pub fn output_rule(&self) -> OutputRule {
        match self {
            Algorithm::Lipschitz => OutputRule::WeightedAverage,
            _ => OutputRule::BestProductive,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.id() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown algorithm `{s}`")))
    }
}

/// Norm used to turn subgradients into step sizes and stopping-sum terms.
///
/// Both coincide for the base prox setup (scale 1). They differ inside
/// restarts, where the setup is rescaled by `R_p`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepNorm {
    /// Plain Euclidean norm `‖p‖`, independent of the setup's scale.
    #[default]
    Euclidean,
    /// The setup's dual norm `R ‖p‖`.
    Prox,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    Productive,
    Nonproductive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputRule {
    BestProductive,
    WeightedAverage,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    CriterionMet,
    ZeroObjectiveGradient,
    IterationCap,
}

impl StopReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            StopReason::CriterionMet => "criterion_met",
            StopReason::ZeroObjectiveGradient => "zero_objective_gradient",
            StopReason::IterationCap => "iteration_cap",
        }
    }

    /// Whether the run ended by one of its own termination rules.
    pub fn is_success(&self) -> bool {
        !matches!(self, StopReason::IterationCap)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub index: u64,
    pub kind: StepKind,
    pub step_size: f64,
    /// Constraint stepped on; set only by [`Algorithm::MultiConstraint`].
    pub constraint_index: Option<usize>,
    /// `f(x^k)`, evaluated on productive steps only.
    pub f_value: Option<f64>,
    /// `max_i g_i(x^k)`.
    pub g_value: f64,
    /// Norm of the subgradient used, as measured for the step size.
    pub grad_dual_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditViolation {
    pub step: u64,
    pub probe: usize,
    pub lhs: f64,
    pub rhs: f64,
}

impl fmt::Display for AuditViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "step {} probe {}: {:e} > {:e} (excess {:e})",
            self.step,
            self.probe,
            self.lhs,
            self.rhs,
            self.lhs - self.rhs
        )
    }
}

/// Outcome of checking `h<p, x - u> <= h²/2 ‖p‖*² + V(x, u) - V(z, u)` on
/// every step `z = Mirr_x(h p)` against fixed probes `u` in `X`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub checks: u64,
    pub violations: u64,
    pub first_violation: Option<AuditViolation>,
    /// Largest `lhs - rhs` seen.
    pub max_excess: f64,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub cap: u64,
    pub audit: bool,
    pub step_norm: StepNorm,
    /// Constraint choice of [`Algorithm::MultiConstraint`].
    pub selection: SelectionRule,
    pub record_trace: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            cap: DEFAULT_ITERATION_CAP,
            audit: false,
            step_norm: StepNorm::default(),
            selection: SelectionRule::default(),
            record_trace: true,
        }
    }
}

impl SolveOptions {
    pub fn audited() -> Self {
        SolveOptions {
            audit: true,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub algorithm: Algorithm,
    pub eps: f64,
    pub output: Vector,
    pub output_rule: OutputRule,
    /// Completed mirror steps `N = |I| + |J|`.
    pub iterations: u64,
    /// `|I|`.
    pub productive: u64,
    pub trace: Vec<StepRecord>,
    /// The productive iterates `x^k, k in I`, in order.
    pub productive_points: Vec<Vector>,
    pub stop_reason: StopReason,
    pub wall_time: Duration,
    pub audit: Option<AuditReport>,
}

impl RunResult {
    /// `|J|`.
    pub fn nonproductive(&self) -> u64 {
        self.iterations - self.productive
    }

    /// `min_{k in I} v_f(x^k, y)`, or `None` without productive steps.
    pub fn min_v_f(&self, problem: &Problem, setup: &ProxSetup, y: &Vector) -> Option<f64> {
        self.productive_points
            .iter()
            .map(|x| v_f(problem, setup, x, y))
            .reduce(f64::min)
    }
}

/// `v_f(x, y) = <∇f(x) / ‖∇f(x)‖*, x - y>`, and 0 where `∇f(x) = 0`.
pub fn v_f(problem: &Problem, setup: &ProxSetup, x: &Vector, y: &Vector) -> f64 {
    let grad = problem.objective.subgradient(x);
    let norm = setup.dual_norm(&grad);
    if norm == 0.0 {
        0.0
    } else {
        grad.dot(&(x - y)) / norm
    }
}

/// `⌈v⌉`, treating values within a relative `1e-9` of an integer as that
/// integer so that products like `2·16·9/0.25` do not round up by one.
pub fn ceil_snap(v: f64) -> u64 {
    let r = v.round();
    if (v - r).abs() <= 1e-9 * v.abs().max(1.0) {
        r.max(0.0) as u64
    } else {
        v.ceil().max(0.0) as u64
    }
}

/// Iteration bound of the adaptive method: `⌈2 max{1, M_g²} Θ₀² / eps²⌉`.
pub fn adaptive_bound(m_g: f64, theta0: f64, eps: f64) -> u64 {
    ceil_snap(2.0 * (m_g * m_g).max(1.0) * theta0 * theta0 / (eps * eps))
}

/// Exact iteration count of the partially adaptive method:
/// `⌈2 M_g² Θ₀² / eps²⌉`.
pub fn partially_adaptive_iterations(m_g: f64, theta0: f64, eps: f64) -> u64 {
    ceil_snap(2.0 * m_g * m_g * theta0 * theta0 / (eps * eps))
}

/// Iteration bound of the Lipschitz-objective method:
/// `⌈2 max{M_f², M_g²} Θ₀² / eps²⌉`.
pub fn lipschitz_bound(m_f: f64, m_g: f64, theta0: f64, eps: f64) -> u64 {
    ceil_snap(2.0 * (m_f * m_f).max(m_g * m_g) * theta0 * theta0 / (eps * eps))
}

/// The eight probe points of the step audit: fixed pseudo-random points of
/// the bounding region, projected onto `X`.
pub fn audit_probes(setup: &ProxSetup) -> Vec<Vector> {
    let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
    let center = setup.center();
    let spread = 2.0 * setup.scale();
    (0..AUDIT_PROBES)
        .map(|_| {
            let noise = Vector::from_fn(center.len(), |_, _| rng.gen_range(-spread..=spread));
            setup.feasible_set().project(&(center + noise))
        })
        .collect()
}

struct Auditor {
    probes: Vec<Vector>,
    report: AuditReport,
}

impl Auditor {
    fn check(&mut self, setup: &ProxSetup, step: u64, x: &Vector, z: &Vector, p: &Vector, h: f64) {
        let dual = setup.dual_norm(p);
        for (i, u) in self.probes.iter().enumerate() {
            let lhs = h * p.dot(&(x - u));
            let rhs = 0.5 * h * h * dual * dual + bregman(setup, x, u) - bregman(setup, z, u);
            let excess = lhs - rhs;
            self.report.checks += 1;
            self.report.max_excess = self.report.max_excess.max(excess);
            if excess > AUDIT_TOL {
                self.report.violations += 1;
                self.report.first_violation.get_or_insert(AuditViolation {
                    step,
                    probe: i,
                    lhs,
                    rhs,
                });
            }
        }
    }
}

fn bregman(setup: &ProxSetup, x: &Vector, y: &Vector) -> f64 {
    let r = setup.scale();
    (y - x).norm_squared() / (2.0 * r * r)
}

/// Runs `algorithm` from `start` with accuracy `eps`.
pub fn solve(
    algorithm: Algorithm,
    problem: &Problem,
    setup: &ProxSetup,
    eps: f64,
    start: &Vector,
    options: &SolveOptions,
) -> Result<RunResult> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
    }
    check_dim(setup.dim(), start)?;
    check_dim(problem.dim(), start)?;
    if !setup.feasible_set().contains(start, FEASIBILITY_TOL) {
        return Err(Error::InvalidArgument("start lies outside the feasible set".into()));
    }

    let began = Instant::now();
    let theta_sq = problem.theta0 * problem.theta0;
    let measure = |p: &Vector| match options.step_norm {
        StepNorm::Euclidean => p.norm(),
        StepNorm::Prox => setup.dual_norm(p),
    };
    let m_g = match options.step_norm {
        StepNorm::Euclidean => problem.m_g(),
        StepNorm::Prox => setup.scale() * problem.m_g(),
    };
    let fixed_n = match algorithm {
        Algorithm::PartiallyAdaptive => Some(partially_adaptive_iterations(
            m_g,
            problem.theta0,
            eps,
        )),
        _ => None,
    };
    let mut auditor = options.audit.then(|| Auditor {
        probes: audit_probes(setup),
        report: AuditReport::default(),
    });

    let mut x = start.clone();
    let mut trace = Vec::new();
    let mut productive_points = Vec::new();
    let mut best: Option<(f64, usize)> = None;
    let mut weighted_sum = Vector::zeros(start.len());
    let mut weight = 0.0;
    // Stopping accumulator: |I| + Σ 1/‖∇g‖² for the adaptive rules,
    // Σ 1/M_j² for the Lipschitz rule.
    let mut acc = 0.0;
    let mut n: u64 = 0;
    let mut productive: u64 = 0;

    let stop_reason = loop {
        let done = match (algorithm, fixed_n) {
            (_, Some(total)) => n >= total,
            (Algorithm::Lipschitz, _) => n > 0 && acc >= 2.0 * theta_sq / (eps * eps),
            _ => n > 0 && theta_sq <= 0.5 * eps * eps * acc,
        };
        if done {
            break StopReason::CriterionMet;
        }
        if n >= options.cap {
            break StopReason::IterationCap;
        }

        let (max_index, g_value) = problem.constraints.max_value(&x);
        let record;
        let (direction, h);
        if g_value <= eps {
            let grad = problem.objective.subgradient(&x);
            let norm = measure(&grad);
            if norm == 0.0 {
                // v_f vanishes here; kept for certificates but not a step
                productive_points.push(x.clone());
                break StopReason::ZeroObjectiveGradient;
            }
            let f_value = problem.objective.value(&x);
            h = match algorithm {
                Algorithm::Adaptive | Algorithm::MultiConstraint => eps / norm,
                Algorithm::PartiallyAdaptive => eps / (m_g * norm),
                Algorithm::Lipschitz => eps / (norm * norm),
            };
            acc += match algorithm {
                Algorithm::Lipschitz => 1.0 / (norm * norm),
                _ => 1.0,
            };
            if best.map_or(true, |(fb, _)| f_value < fb) {
                best = Some((f_value, productive_points.len()));
            }
            weighted_sum += &x * h;
            weight += h;
            productive_points.push(x.clone());
            productive += 1;
            record = StepRecord {
                index: n,
                kind: StepKind::Productive,
                step_size: h,
                constraint_index: None,
                f_value: Some(f_value),
                g_value,
                grad_dual_norm: norm,
            };
            direction = grad;
        } else {
            let (index, value) = match algorithm {
                Algorithm::MultiConstraint => problem
                    .constraints
                    .select(&x, eps, options.selection)
                    .expect("some constraint exceeds eps"),
                _ => (max_index, g_value),
            };
            let grad = problem.constraints.subgradient(index, &x);
            let norm = measure(&grad);
            if norm == 0.0 {
                return Err(Error::InfeasibilityCertificate {
                    step: n,
                    constraint: index,
                    value,
                });
            }
            h = match algorithm {
                Algorithm::PartiallyAdaptive => eps / (m_g * m_g),
                _ => eps / (norm * norm),
            };
            acc += match algorithm {
                Algorithm::PartiallyAdaptive => 0.0,
                _ => 1.0 / (norm * norm),
            };
            record = StepRecord {
                index: n,
                kind: StepKind::Nonproductive,
                step_size: h,
                constraint_index: (algorithm == Algorithm::MultiConstraint).then_some(index),
                f_value: None,
                g_value,
                grad_dual_norm: norm,
            };
            direction = grad;
        }

        let next = setup.mirror_step(&x, &direction, h)?;
        if let Some(a) = auditor.as_mut() {
            a.check(setup, n, &x, &next, &direction, h);
        }
        if options.record_trace {
            trace.push(record);
        }
        x = next;
        n += 1;
    };

    let output = if productive_points.is_empty() {
        if stop_reason == StopReason::CriterionMet {
            let result = RunResult {
                algorithm,
                eps,
                output: x,
                output_rule: algorithm.output_rule(),
                iterations: n,
                productive,
                trace,
                productive_points,
                stop_reason,
                wall_time: began.elapsed(),
                audit: auditor.map(|a| a.report),
            };
            return Err(Error::NoProductiveSteps(Box::new(result)));
        }
        // capped before any productive step: report where the run ended
        x
    } else if stop_reason == StopReason::ZeroObjectiveGradient {
        productive_points.last().cloned().expect("pushed above")
    } else {
        match algorithm.output_rule() {
            OutputRule::WeightedAverage => weighted_sum / weight,
            OutputRule::BestProductive => {
                productive_points[best.expect("productive steps recorded").1].clone()
            }
        }
    };
    Ok(RunResult {
        algorithm,
        eps,
        output,
        output_rule: algorithm.output_rule(),
        iterations: n,
        productive,
        trace,
        productive_points,
        stop_reason,
        wall_time: began.elapsed(),
        audit: auditor.map(|a| a.report),
    })
}

pub fn solve_adaptive(
    problem: &Problem,
    setup: &ProxSetup,
    eps: f64,
    start: &Vector,
    options: &SolveOptions,
) -> Result<RunResult> {
    solve(Algorithm::Adaptive, problem, setup, eps, start, options)
}

pub fn solve_partially_adaptive(
    problem: &Problem,
    setup: &ProxSetup,
    eps: f64,
    start: &Vector,
    options: &SolveOptions,
) -> Result<RunResult> {
    solve(Algorithm::PartiallyAdaptive, problem, setup, eps, start, options)
}

pub fn solve_lipschitz(
    problem: &Problem,
    setup: &ProxSetup,
    eps: f64,
    start: &Vector,
    options: &SolveOptions,
) -> Result<RunResult> {
    solve(Algorithm::Lipschitz, problem, setup, eps, start, options)
}

pub fn solve_multi_constraint(
    problem: &Problem,
    setup: &ProxSetup,
    eps: f64,
    start: &Vector,
    options: &SolveOptions,
) -> Result<RunResult> {
    solve(Algorithm::MultiConstraint, problem, setup, eps, start, options)
}
