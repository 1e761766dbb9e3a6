use mdopt::oracles::ConstraintOracle;
use mdopt::problems::{strongly_convex_example, Problem, PROBLEM_IDS};
use mdopt::restarts::{solve_restarted, InnerSolver, RestartOptions};
use mdopt::solvers::{
    adaptive_bound, lipschitz_bound, solve, Algorithm, OutputRule, SolveOptions, StepKind,
};
use mdopt::Vector;

fn quiet() -> SolveOptions {
    SolveOptions {
        record_trace: false,
        ..SolveOptions::default()
    }
}

#[test]
fn runs_are_deterministic() {
    let p = Problem::by_id("fts-nonsmooth-unit-ball").unwrap();
    let setup = p.prox_setup();
    for alg in Algorithm::ALL {
        let a = solve(alg, &p, &setup, 0.5, &p.x0, &SolveOptions::default()).unwrap();
        let b = solve(alg, &p, &setup, 0.5, &p.x0, &SolveOptions::default()).unwrap();
        assert_eq!(a.iterations, b.iterations, "{alg}");
        assert_eq!(a.output, b.output, "{alg}");
        assert_eq!(a.trace, b.trace, "{alg}");
    }
}

#[test]
fn single_constraint_multi_method_matches_adaptive() {
    let mut p = Problem::by_id("fts-quadratic-unit-ball").unwrap();
    let g = p.constraints.members()[3].clone();
    p.constraints = ConstraintOracle::single(g, p.m_g()).unwrap();
    let setup = p.prox_setup();
    let a = solve(Algorithm::Adaptive, &p, &setup, 0.25, &p.x0, &SolveOptions::default()).unwrap();
    let b = solve(Algorithm::MultiConstraint, &p, &setup, 0.25, &p.x0, &SolveOptions::default()).unwrap();
    assert_eq!(a.iterations, b.iterations);
    for (s, t) in a.trace.iter().zip(&b.trace) {
        assert_eq!((s.kind, s.step_size, s.g_value), (t.kind, t.step_size, t.g_value));
    }
    assert_eq!(a.output, b.output);
}

#[test]
fn outputs_are_eps_feasible_productive_points() {
    for id in PROBLEM_IDS {
        let p = Problem::by_id(id).unwrap();
        let setup = p.prox_setup();
        let eps = if p.dim() == 1 { 0.1 } else { 0.5 };
        for alg in [Algorithm::Adaptive, Algorithm::PartiallyAdaptive, Algorithm::MultiConstraint] {
            let r = solve(alg, &p, &setup, eps, &p.x0, &quiet()).unwrap();
            assert!(r.stop_reason.is_success(), "{id} {alg}");
            assert_eq!(r.output_rule, OutputRule::BestProductive);
            assert!(p.constraint_value(&r.output) <= eps, "{id} {alg}");
            assert!(r.productive_points.iter().any(|x| x == &r.output), "{id} {alg}");
            let best = r
                .productive_points
                .iter()
                .map(|x| p.objective.value(x))
                .fold(f64::INFINITY, f64::min);
            assert_eq!(p.objective.value(&r.output), best, "{id} {alg}");
        }
    }
}

#[test]
fn adaptive_steps_follow_the_rule() {
    let p = Problem::by_id("fts-quadratic").unwrap();
    let eps = 0.5;
    let r = solve(Algorithm::Adaptive, &p, &p.prox_setup(), eps, &p.x0, &SolveOptions::default()).unwrap();
    assert_eq!(r.trace.len() as u64, r.iterations);
    assert!(r.iterations <= adaptive_bound(p.m_g(), p.theta0, eps));
    for s in &r.trace {
        match s.kind {
            StepKind::Productive => {
                assert!(s.g_value <= eps);
                assert!((s.step_size * s.grad_dual_norm - eps).abs() <= 1e-12);
            }
            StepKind::Nonproductive => {
                assert!(s.g_value > eps);
                assert!((s.step_size * s.grad_dual_norm * s.grad_dual_norm - eps).abs() <= 1e-12);
            }
        }
    }
}

#[test]
fn lipschitz_method_respects_its_bound() {
    for id in ["fts-quadratic-unit-ball", "fts-nonsmooth-unit-ball"] {
        let p = Problem::by_id(id).unwrap();
        let r = solve(Algorithm::Lipschitz, &p, &p.prox_setup(), 0.5, &p.x0, &quiet()).unwrap();
        let m_f = p.m_f().unwrap();
        assert!(r.iterations <= lipschitz_bound(m_f, p.m_g(), p.theta0, 0.5), "{id}");
        assert_eq!(r.output_rule, OutputRule::WeightedAverage);
    }
}

#[test]
fn iteration_cap_is_reported() {
    let p = Problem::by_id("fts-quadratic").unwrap();
    let options = SolveOptions {
        cap: 25,
        ..quiet()
    };
    let r = solve(Algorithm::Adaptive, &p, &p.prox_setup(), 0.01, &p.x0, &options).unwrap();
    assert_eq!(r.iterations, 25);
    assert!(!r.stop_reason.is_success());
}

#[test]
fn start_outside_the_set_is_rejected() {
    let p = Problem::by_id("fts-quadratic-unit-ball").unwrap();
    let outside = Vector::from_element(p.dim(), 5.0);
    assert!(solve(Algorithm::Adaptive, &p, &p.prox_setup(), 0.5, &outside, &quiet()).is_err());
    assert!(solve(Algorithm::Adaptive, &p, &p.prox_setup(), -1.0, &p.x0, &quiet()).is_err());
}

#[test]
fn restarted_total_is_the_sum_of_stages() {
    let p = strongly_convex_example(2);
    for inner in [InnerSolver::Adaptive, InnerSolver::PartiallyAdaptive] {
        let r = solve_restarted(&p, inner, 0.1, &RestartOptions::default()).unwrap();
        let sum: u64 = r.chain.iter().map(|s| s.inner.iterations).sum();
        assert_eq!(r.total_inner_iterations, sum);
        assert_eq!(r.output, r.chain.last().unwrap().point);
        assert_eq!(r.restarts as usize, r.chain.len());
    }
}
