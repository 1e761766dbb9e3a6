//! Reference optima by a long projected-subgradient run.
//!
//! The method is a level-target Polyak scheme on
//! `phi(x) = max{ f(x) - t, g(x) + kappa }` with `t = f_best - delta`: each
//! step is `x <- P_X(x - phi(x) s / ||s||^2)` for a subgradient `s` of the
//! active piece. Whenever `budget / 100` steps pass without `f_best`
//! dropping by `delta / 2`, the gap `delta` and the margin
//! `kappa = delta / 100` are halved and the iterate returns to the best
//! point. Only points with `g(x) <= 0` are ever recorded, so the result is
//! feasible by construction.

use super::{Problem, ReferenceOpt};
use crate::error::{Error, Result};
use crate::prox::Vector;

/// Smallest accepted iteration budget.
pub const MIN_REFERENCE_BUDGET: u64 = 100_000;

const MARGIN_RATIO: f64 = 1e-2;

/// Approximates `min f(x)` subject to `g(x) <= 0` on `X` with `budget`
/// subgradient steps, returning the best feasible point found.
pub fn compute_reference(problem: &Problem, budget: u64) -> Result<ReferenceOpt> {
    if budget < MIN_REFERENCE_BUDGET {
        return Err(Error::InvalidArgument(format!(
            "reference budget {budget} is below {MIN_REFERENCE_BUDGET}"
        )));
    }
    let f = &problem.objective;
    let set = &problem.feasible_set;
    let mut x = set.project(&problem.x0);

    let mut best: Option<(f64, Vector)> = None;
    let mut least_violation = f64::INFINITY;
    let mut delta = 0.0;
    let mut level_ref = f64::INFINITY;
    let mut stall = 0u64;
    let mut used = 0u64;
    let patience = (budget / 100).max(1_000);

    for _ in 0..budget {
        used += 1;
        let fx = f.value(&x);
        let (gi, gx) = problem.constraints.max_value(&x);
        least_violation = least_violation.min(gx);
        if gx <= 0.0 && best.as_ref().map_or(true, |(fb, _)| fx < *fb) {
            if best.is_none() {
                delta = 0.1 * (1.0 + fx.abs());
                level_ref = fx;
            }
            best = Some((fx, x.clone()));
        }

        let kappa = MARGIN_RATIO * delta;
        let g_piece = || (gx + kappa, problem.constraints.subgradient(gi, &x));
        let (phi, s) = match &best {
            None => g_piece(),
            Some((fb, _)) => {
                let lead = fx - (fb - delta);
                if lead >= gx + kappa {
                    let s = f.subgradient(&x);
                    if s.norm_squared() > 0.0 {
                        (lead, s)
                    } else if gx > 0.0 {
                        g_piece()
                    } else {
                        // a feasible unconstrained minimizer of f
                        break;
                    }
                } else {
                    g_piece()
                }
            }
        };
        let norm_sq = s.norm_squared();
        if norm_sq == 0.0 || !(phi > 0.0) {
            break;
        }
        x = set.project(&(&x - s * (phi / norm_sq)));

        if let Some((fb, _)) = &best {
            if level_ref - fb >= 0.5 * delta {
                level_ref = *fb;
                stall = 0;
            } else {
                stall += 1;
                if stall >= patience {
                    delta *= 0.5;
                    level_ref = *fb;
                    stall = 0;
                    x = best.as_ref().expect("checked above").1.clone();
                    if delta <= f64::EPSILON * (1.0 + fb.abs()) * 1e-2 {
                        break;
                    }
                }
            }
        }
    }

    let (f_star, x_star) = best.ok_or(Error::InfeasibleReference {
        residual: least_violation,
    })?;
    let residual = problem.constraint_value(&x_star);
    Ok(ReferenceOpt {
        x_star,
        f_star,
        budget: used,
        residual,
        note: format!(
            "level-target Polyak subgradient method, {used} of {budget} iterations"
        ),
    })
}
