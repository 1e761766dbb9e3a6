//! Invariant checks on a problem with a known reference optimum.
//!
//! Each check yields a [`Check`]; `mdopt verify` prints one line per check
//! and fails if any gating check fails. Informational checks document
//! properties that are reported but known not to hold in general.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::problems::{Problem, ReferenceOpt};
use crate::prox::Vector;
use crate::restarts::{contraction_audit, final_point_within, solve_restarted, InnerSolver, RestartOptions};
use crate::solvers::{solve, Algorithm, SolveOptions};

const SAMPLES: usize = 500;
const CERT_TOL: f64 = 1e-9;
/// Allowance for the error in the reference optimum.
pub const FIXTURE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Informational checks never fail the battery.
    pub gating: bool,
    pub detail: String,
}

impl Check {
    fn gate(name: &str, passed: bool, detail: String) -> Check {
        Check {
            name: name.into(),
            passed,
            gating: true,
            detail,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub problem: String,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed || !c.gating)
    }
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    /// Accuracy of the certificate runs.
    pub eps: f64,
    /// Accuracy of the restart run, for strongly convex problems.
    pub restart_eps: f64,
    pub seed: u64,
}

impl VerifyOptions {
    /// Accuracies that keep every run short: 0.1 for the toy, 0.25 elsewhere.
    pub fn for_problem(problem: &Problem) -> VerifyOptions {
        VerifyOptions {
            eps: if problem.dim() == 1 { 0.1 } else { 0.25 },
            restart_eps: 0.05,
            seed: 2024,
        }
    }
}

fn sample_points(problem: &Problem, rng: &mut ChaCha8Rng, n: usize) -> Vec<Vector> {
    let setup = problem.prox_setup();
    let spread = match &problem.feasible_set {
        crate::prox::FeasibleSet::Ball { radius, .. } => 1.5 * radius,
        _ => 2.0 * (1.0 + setup.center().amax()),
    };
    (0..n)
        .map(|_| {
            let v = Vector::from_fn(problem.dim(), |_, _| rng.gen_range(-spread..=spread));
            problem.feasible_set.project(&(setup.center() + v))
        })
        .collect()
}

/// `f(y) >= f(x) + <s, y - x>` for the reported subgradients of the
/// objective and of every constraint.
fn subgradient_check(problem: &Problem, pts: &[Vector]) -> Check {
    let mut worst = 0.0f64;
    let mut pairs = 0;
    for (x, y) in pts.iter().zip(pts.iter().skip(1)) {
        let mut check = |value: &dyn Fn(&Vector) -> f64, sub: Vector| {
            let gap = value(x) + sub.dot(&(y - x)) - value(y);
            worst = worst.max(gap / (1.0 + value(y).abs()));
        };
        check(&|v| problem.objective.value(v), problem.objective.subgradient(x));
        for g in problem.constraints.members() {
            check(&|v| g.value(v), g.subgradient(x));
        }
        pairs += 1;
    }
    Check::gate(
        "subgradient certificates",
        worst <= CERT_TOL,
        format!("{pairs} pairs, worst relative violation {worst:e}"),
    )
}

/// `‖∇g_i(x)‖ <= M_g` at sampled points, and the same for `f` when `M_f`
/// is known.
fn lipschitz_check(problem: &Problem, pts: &[Vector]) -> Check {
    let m_g = problem.m_g();
    let worst_g = pts
        .iter()
        .flat_map(|x| problem.constraints.members().iter().map(move |g| g.subgradient(x).norm()))
        .fold(0.0, f64::max);
    let mut ok = worst_g <= m_g * (1.0 + 1e-12);
    let mut detail = format!("max ‖∇g‖ = {worst_g:.6} vs M_g = {m_g:.6}");
    if let Some(m_f) = problem.m_f() {
        let worst_f = pts
            .iter()
            .map(|x| problem.objective.subgradient(x).norm())
            .fold(0.0, f64::max);
        ok &= worst_f <= m_f * (1.0 + 1e-12);
        detail.push_str(&format!(", max ‖∇f‖ = {worst_f:.6} vs M_f = {m_f:.6}"));
    }
    Check::gate("Lipschitz sampling", ok, detail)
}

fn theta_check(problem: &Problem, reference: &ReferenceOpt) -> Check {
    let d = problem.prox_setup().prox_value(&reference.x_star);
    let theta_sq = problem.theta0 * problem.theta0;
    Check::gate(
        "Theta0 validity",
        d <= theta_sq,
        format!("d(x_*) = {d:.6} <= Theta0^2 = {theta_sq}"),
    )
}

fn certificate_checks(problem: &Problem, reference: &ReferenceOpt, eps: f64) -> Result<Vec<Check>> {
    let setup = problem.prox_setup();
    let options = SolveOptions {
        record_trace: false,
        ..SolveOptions::default()
    };
    let a1 = solve(Algorithm::Adaptive, problem, &setup, eps, &problem.x0, &options)?;
    let a2 = solve(Algorithm::PartiallyAdaptive, problem, &setup, eps, &problem.x0, &options)?;
    let x_star = &reference.x_star;
    let v1 = a1.min_v_f(problem, &setup, x_star).unwrap_or(f64::INFINITY);
    let v2 = a2.min_v_f(problem, &setup, x_star).unwrap_or(f64::INFINITY);
    let m_g = problem.m_g();
    let mut checks = vec![
        Check::gate(
            "v_f certificate (alg1)",
            v1 < eps,
            format!("min v_f = {v1:.6e} < eps = {eps} after {} iterations", a1.iterations),
        ),
        Check::gate(
            "v_f certificate (alg2)",
            v2 < eps / m_g,
            format!(
                "min v_f = {v2:.6e} < eps/M_g = {:.6e} after {} iterations",
                eps / m_g,
                a2.iterations
            ),
        ),
    ];
    let info = problem.objective.info();
    if let Some(m_f) = info.lipschitz {
        let gap = problem.objective.value(&a1.output) - reference.f_star;
        checks.push(Check::gate(
            "objective gap (alg1, Lipschitz f)",
            gap <= m_f * eps + FIXTURE_TOL,
            format!("f(out) - f_* = {gap:.6e} <= M_f eps = {}", m_f * eps),
        ));
    }
    if let Some(l) = info.grad_lipschitz {
        let grad_star = problem.objective.subgradient(x_star).norm();
        let bound = grad_star * eps / m_g + l * eps * eps / (2.0 * m_g * m_g);
        let gap = problem.objective.value(&a2.output) - reference.f_star;
        checks.push(Check::gate(
            "objective gap (alg2, smooth f)",
            gap <= bound + FIXTURE_TOL,
            format!("f(out) - f_* = {gap:.6e} <= {bound:.6e}"),
        ));
    }
    Ok(checks)
}

fn restart_checks(problem: &Problem, reference: &ReferenceOpt, eps: f64) -> Result<Vec<Check>> {
    let options = RestartOptions {
        solve: SolveOptions {
            record_trace: false,
            ..SolveOptions::default()
        },
        ..RestartOptions::default()
    };
    let report = solve_restarted(problem, InnerSolver::Adaptive, eps, &options)?;
    let audit = contraction_audit(&report, &reference.x_star);
    let failed: Vec<u32> = audit.iter().filter(|(_, ok)| !ok).map(|(p, _)| *p).collect();
    let dist = (&report.output - &reference.x_star).norm_squared();
    let gaps: Vec<String> = report
        .chain
        .iter()
        .map(|s| {
            let gap = problem.objective.value(&s.point) - reference.f_star;
            format!("p={}: {gap:.3e}/{:.3e}", s.p, s.eps)
        })
        .collect();
    let gaps_hold = report
        .chain
        .iter()
        .all(|s| problem.objective.value(&s.point) - reference.f_star <= s.eps + FIXTURE_TOL);
    Ok(vec![
        Check::gate(
            "restart contraction",
            failed.is_empty(),
            format!("{} stages checked, failing p: {failed:?}", audit.len()),
        ),
        Check::gate(
            "restart final distance",
            final_point_within(&report, &reference.x_star),
            format!("‖x_out - x_*‖² = {dist:.3e} <= 2 eps / mu = {}", 2.0 * eps / report.mu),
        ),
        Check {
            // The inner method certifies v_f, not the objective gap, so this
            // can fail on ill-conditioned objectives.
            name: "restart stage gaps f(x^p) - f_* <= eps_p".into(),
            passed: gaps_hold,
            gating: false,
            detail: gaps.join(", "),
        },
    ])
}

/// Runs the whole battery on a problem that carries a reference optimum.
pub fn verify_problem(problem: &Problem, options: &VerifyOptions) -> Result<VerifyReport> {
    let reference = problem
        .reference
        .as_ref()
        .ok_or_else(|| Error::Fixture(format!("`{}` has no reference optimum", problem.name)))?;
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let pts = sample_points(problem, &mut rng, SAMPLES);
    let mut checks = vec![
        subgradient_check(problem, &pts),
        lipschitz_check(problem, &pts),
        Check::gate(
            "reference feasibility",
            reference.residual <= 0.0 && problem.feasible_set.contains(&reference.x_star, 1e-9),
            format!("max g(x_*) = {:e}", reference.residual),
        ),
        theta_check(problem, reference),
    ];
    checks.extend(certificate_checks(problem, reference, options.eps)?);
    if problem.mu > 0.0 && problem.r0.is_some() {
        checks.extend(restart_checks(problem, reference, options.restart_eps)?);
    }
    Ok(VerifyReport {
        problem: problem.name.clone(),
        checks,
    })
}
