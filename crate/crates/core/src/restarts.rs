//! Restarts for strongly convex problems.
//!
//! Stage `p = 1, 2, ...` halves the squared radius, `R_p² = R₀² 2^{-p}`, and
//! runs an inner method with accuracy `eps_p = μ R_p² / 2` from `x^{p-1}` in
//! the prox geometry `d((x - x^{p-1}) / R_{p-1})`. With `Θ₀` unchanged this
//! turns the `O(1/eps²)` inner rate into `O(1/eps)` overall.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problems::Problem;
use crate::prox::Vector;
use crate::solvers::{solve, Algorithm, RunResult, SolveOptions, StopReason};

/// Slack added to every contraction check.
pub const CONTRACTION_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum InnerSolver {
    #[serde(rename = "restart_alg1")]
    Adaptive,
    #[serde(rename = "restart_alg2")]
    PartiallyAdaptive,
}

impl InnerSolver {
    pub fn id(&self) -> &'static str {
        match self {
            InnerSolver::Adaptive => "restart_alg1",
            InnerSolver::PartiallyAdaptive => "restart_alg2",
        }
    }

    pub fn algorithm(&self) -> Algorithm {
        match self {
            InnerSolver::Adaptive => Algorithm::Adaptive,
            InnerSolver::PartiallyAdaptive => Algorithm::PartiallyAdaptive,
        }
    }
}

impl fmt::Display for InnerSolver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for InnerSolver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [InnerSolver::Adaptive, InnerSolver::PartiallyAdaptive]
            .into_iter()
            .find(|a| a.id() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown restart scheme `{s}`")))
    }
}

/// How many stages to run for `L = log2(μ R₀² / (2 eps))`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RestartSchedule {
    /// The loop `repeat ... p <- p + 1 until p > L`: `floor(L)` stages,
    /// at least one once `L > 0`.
    #[default]
    Pseudocode,
    /// `ceil(L)` stages, the count the convergence guarantee is stated for.
    Ceil,
}

impl RestartSchedule {
    /// Number of stages for `L`; zero when `L <= 0`.
    pub fn stages(&self, log_ratio: f64) -> u32 {
        if log_ratio <= 0.0 {
            return 0;
        }
        let snapped = log_ratio.round();
        let near = (log_ratio - snapped).abs() <= 1e-12 * log_ratio.max(1.0);
        let count = match (self, near) {
            (_, true) => snapped,
            (RestartSchedule::Pseudocode, false) => log_ratio.floor().max(1.0),
            (RestartSchedule::Ceil, false) => log_ratio.ceil(),
        };
        count as u32
    }
}

/// `p_hat = ceil(log2(μ R₀² / (2 eps)))`, clamped at zero.
pub fn p_hat(mu: f64, r0: f64, eps: f64) -> u32 {
    RestartSchedule::Ceil.stages((mu * r0 * r0 / (2.0 * eps)).log2())
}

#[derive(Debug, Clone, Default)]
pub struct RestartOptions {
    pub schedule: RestartSchedule,
    /// Options for every inner run.
    pub solve: SolveOptions,
}

#[derive(Debug, Clone)]
pub struct RestartStage {
    pub p: u32,
    /// `R_p²`.
    pub radius_sq: f64,
    /// `eps_p`.
    pub eps: f64,
    pub inner: RunResult,
    /// `x^p`.
    pub point: Vector,
}

#[derive(Debug, Clone)]
pub struct RestartReport {
    pub inner: InnerSolver,
    pub eps: f64,
    pub mu: f64,
    pub r0: f64,
    pub x0: Vector,
    pub chain: Vec<RestartStage>,
    /// Stages actually run.
    pub restarts: u32,
    /// `ceil(log2(μ R₀² / (2 eps)))`, recorded whatever the schedule.
    pub p_hat: u32,
    pub total_inner_iterations: u64,
    pub output: Vector,
    /// Set when `eps >= μ R₀² / 2`, so that `x^0` is returned as is.
    pub zero_restarts: bool,
}

impl RestartReport {
    /// `(p, x^p)` for `p = 0, 1, ...`.
    pub fn points(&self) -> impl Iterator<Item = (u32, &Vector)> {
        std::iter::once((0, &self.x0)).chain(self.chain.iter().map(|s| (s.p, &s.point)))
    }

    /// `R_p²` for any `p`.
    pub fn radius_sq(&self, p: u32) -> f64 {
        self.r0 * self.r0 * 0.5f64.powi(p as i32)
    }
}

/// Runs the restart scheme with `inner` as the stage method.
pub fn solve_restarted(
    problem: &Problem,
    inner: InnerSolver,
    eps: f64,
    options: &RestartOptions,
) -> Result<RestartReport> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
    }
    if !(problem.mu > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "restarts need a strongly convex objective, got mu = {}",
            problem.mu
        )));
    }
    let r0 = problem
        .r0
        .filter(|r| *r > 0.0)
        .ok_or_else(|| Error::InvalidArgument("restarts need a positive R0".into()))?;
    // The Euclidean d is bounded by 1/2 on the unit ball; every rescaled d_p
    // reuses the same Θ₀, so Θ₀² must cover that bound.
    if problem.theta0 * problem.theta0 < 0.5 {
        return Err(Error::InvalidArgument(format!(
            "Theta0 = {} does not bound the prox function on the unit ball",
            problem.theta0
        )));
    }

    let mu = problem.mu;
    let stages = options.schedule.stages((mu * r0 * r0 / (2.0 * eps)).log2());
    let base = problem.prox_setup();
    let mut report = RestartReport {
        inner,
        eps,
        mu,
        r0,
        x0: problem.x0.clone(),
        chain: Vec::with_capacity(stages as usize),
        restarts: 0,
        p_hat: p_hat(mu, r0, eps),
        total_inner_iterations: 0,
        output: problem.x0.clone(),
        zero_restarts: stages == 0,
    };

    let mut x = problem.x0.clone();
    let mut radius_sq = r0 * r0;
    for p in 1..=stages {
        let setup = base.shifted_scaled(&x, radius_sq.sqrt())?;
        radius_sq = report.radius_sq(p);
        let stage_eps = mu * radius_sq / 2.0;
        let run = solve(inner.algorithm(), problem, &setup, stage_eps, &x, &options.solve)?;
        report.total_inner_iterations += run.iterations;
        let capped = run.stop_reason == StopReason::IterationCap;
        x = run.output.clone();
        report.chain.push(RestartStage {
            p,
            radius_sq,
            eps: stage_eps,
            inner: run,
            point: x.clone(),
        });
        report.restarts = p;
        report.output = x.clone();
        if capped {
            return Err(Error::RestartCapped(Box::new(report)));
        }
    }
    Ok(report)
}

/// Checks `‖x^p - x_*‖² <= R_p² + 1e-6` for every `p`, starting at `p = 0`.
pub fn contraction_audit(report: &RestartReport, x_star: &Vector) -> Vec<(u32, bool)> {
    report
        .points()
        .map(|(p, x)| (p, (x - x_star).norm_squared() <= report.radius_sq(p) + CONTRACTION_TOL))
        .collect()
}

/// Checks `‖x^out - x_*‖² <= 2 eps / μ + 1e-6`.
pub fn final_point_within(report: &RestartReport, x_star: &Vector) -> bool {
    (&report.output - x_star).norm_squared() <= 2.0 * report.eps / report.mu + CONTRACTION_TOL
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{strongly_convex_example, toy_1d};

    #[test]
    fn stage_counts() {
        let l = (4.0f64 / 0.1).log2();
        assert_eq!(RestartSchedule::Ceil.stages(l), 6);
        assert_eq!(RestartSchedule::Pseudocode.stages(l), 5);
        assert_eq!(p_hat(1.0, 2.0, 0.05), 6);
        assert_eq!(RestartSchedule::Pseudocode.stages(3.0), 3);
        assert_eq!(RestartSchedule::Ceil.stages(3.0), 3);
        assert_eq!(RestartSchedule::Pseudocode.stages(0.4), 1);
        assert_eq!(RestartSchedule::Ceil.stages(0.0), 0);
        assert_eq!(RestartSchedule::Pseudocode.stages(-1.0), 0);
    }

    #[test]
    fn large_eps_returns_start() {
        let p = strongly_convex_example(4);
        let r = solve_restarted(&p, InnerSolver::Adaptive, 2.0, &RestartOptions::default()).unwrap();
        assert!(r.zero_restarts);
        assert_eq!(r.restarts, 0);
        assert_eq!(r.output, p.x0);
        assert_eq!(r.total_inner_iterations, 0);
    }

    #[test]
    fn requires_strong_convexity() {
        let p = toy_1d().unwrap();
        assert!(matches!(
            solve_restarted(&p, InnerSolver::Adaptive, 0.1, &RestartOptions::default()),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn halving_schedule_is_exact() {
        let p = strongly_convex_example(4);
        let r = solve_restarted(&p, InnerSolver::Adaptive, 0.05, &RestartOptions::default()).unwrap();
        assert_eq!(r.restarts, 5);
        assert_eq!(r.p_hat, 6);
        let mut prev = (4.0, 2.0);
        for s in &r.chain {
            assert_eq!(s.radius_sq / prev.0, 0.5);
            assert_eq!(s.eps / prev.1, 0.5);
            assert_eq!(s.eps, s.radius_sq / 2.0);
            assert!(p.constraint_value(&s.point) <= s.eps + 1e-9);
            prev = (s.radius_sq, s.eps);
        }
        let total: u64 = r.chain.iter().map(|s| s.inner.iterations).sum();
        assert_eq!(total, r.total_inner_iterations);
    }

    #[test]
    fn corrupted_chain_fails_the_audit() {
        let p = strongly_convex_example(4);
        let mut r =
            solve_restarted(&p, InnerSolver::Adaptive, 0.05, &RestartOptions::default()).unwrap();
        let x_star = Vector::zeros(10);
        assert!(contraction_audit(&r, &x_star).iter().all(|(_, ok)| *ok));
        r.chain[0].point = Vector::from_element(10, 10.0);
        let audit = contraction_audit(&r, &x_star);
        assert_eq!(audit[0], (0, true));
        assert_eq!(audit[1], (1, false));
    }
}
