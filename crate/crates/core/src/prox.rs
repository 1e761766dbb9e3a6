//! Euclidean prox geometry: feasible sets, the prox-function, its Bregman
//! divergence and the mirror step.
//!
//! A [`ProxSetup`] carries a center `c` and a scale `R`. Its prox-function is
//!
//! ```text
//! d(x) = ||x - c||^2 / (2 R^2)
//! ```
//!
//! which is 1-strongly convex with respect to the norm `||.|| / R`. The dual
//! of that norm is `R ||.||`. Restart schemes recenter and rescale the base
//! setup through [`ProxSetup::shifted_scaled`].

use nalgebra::DVector;

use crate::error::{Error, Result};

/// Dense point in `R^n`.
pub type Vector = DVector<f64>;

/// Precondition tolerance for "point lies in the feasible set".
pub const FEASIBILITY_TOL: f64 = 1e-9;

pub(crate) fn check_dim(expected: usize, x: &Vector) -> Result<()> {
    if x.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            got: x.len(),
        });
    }
    Ok(())
}

pub(crate) fn check_finite(what: &str, x: &Vector) -> Result<()> {
    if x.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{what} has non-finite entries")))
    }
}

/// Closed convex set with a closed-form Euclidean projection.
#[derive(Debug, Clone, PartialEq)]
pub enum FeasibleSet {
    Ball { center: Vector, radius: f64 },
    Box { lower: Vector, upper: Vector },
    WholeSpace { dim: usize },
}

impl FeasibleSet {
    pub fn ball(center: Vector, radius: f64) -> Result<Self> {
        check_finite("ball center", &center)?;
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "ball radius must be positive, got {radius}"
            )));
        }
        Ok(FeasibleSet::Ball { center, radius })
    }

    /// Ball of the given radius around the origin.
    pub fn centered_ball(dim: usize, radius: f64) -> Result<Self> {
        Self::ball(Vector::zeros(dim), radius)
    }

    pub fn unit_ball(dim: usize) -> Self {
        FeasibleSet::Ball {
            center: Vector::zeros(dim),
            radius: 1.0,
        }
    }

    pub fn boxed(lower: Vector, upper: Vector) -> Result<Self> {
        check_dim(lower.len(), &upper)?;
        check_finite("box lower bound", &lower)?;
        check_finite("box upper bound", &upper)?;
        if lower.iter().zip(upper.iter()).any(|(l, u)| l > u) {
            return Err(Error::InvalidArgument("box has lower > upper".into()));
        }
        Ok(FeasibleSet::Box { lower, upper })
    }

    pub fn dim(&self) -> usize {
        match self {
            FeasibleSet::Ball { center, .. } => center.len(),
            FeasibleSet::Box { lower, .. } => lower.len(),
            FeasibleSet::WholeSpace { dim } => *dim,
        }
    }

    /// Euclidean projection onto the set.
    pub fn project(&self, x: &Vector) -> Vector {
        match self {
            FeasibleSet::Ball { center, radius } => {
                let offset = x - center;
                let dist = offset.norm();
                if dist <= *radius {
                    x.clone()
                } else {
                    center + offset * (*radius / dist)
                }
            }
            FeasibleSet::Box { lower, upper } => {
                Vector::from_fn(x.len(), |i, _| x[i].clamp(lower[i], upper[i]))
            }
            FeasibleSet::WholeSpace { .. } => x.clone(),
        }
    }

    /// Euclidean distance from `x` to the set.
    pub fn distance(&self, x: &Vector) -> f64 {
        (x - self.project(x)).norm()
    }

    pub fn contains(&self, x: &Vector, tol: f64) -> bool {
        x.len() == self.dim() && self.distance(x) <= tol
    }
}

/// Euclidean prox structure `d(x) = ||x - c||^2 / (2 R^2)` on a feasible set.
#[derive(Debug, Clone, PartialEq)]
pub struct ProxSetup {
    center: Vector,
    scale: f64,
    set: FeasibleSet,
}

impl ProxSetup {
    /// Standard Euclidean setup, `d(x) = ||x - c||^2 / 2` with `c` the point of
    /// the set closest to the origin (the origin itself for centered balls).
    pub fn euclidean(set: FeasibleSet) -> Self {
        let center = set.project(&Vector::zeros(set.dim()));
        ProxSetup {
            center,
            scale: 1.0,
            set,
        }
    }

    pub fn with_center(set: FeasibleSet, center: Vector, scale: f64) -> Result<Self> {
        check_dim(set.dim(), &center)?;
        check_finite("prox center", &center)?;
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "prox scale must be positive, got {scale}"
            )));
        }
        Ok(ProxSetup { center, scale, set })
    }

    pub fn dim(&self) -> usize {
        self.set.dim()
    }

    pub fn center(&self) -> &Vector {
        &self.center
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn feasible_set(&self) -> &FeasibleSet {
        &self.set
    }

    /// Primal norm of the geometry, `||x|| / R`.
    pub fn norm(&self, x: &Vector) -> f64 {
        x.norm() / self.scale
    }

    /// Dual of [`ProxSetup::norm`], `R ||p||`.
    pub fn dual_norm(&self, p: &Vector) -> f64 {
        p.norm() * self.scale
    }

    /// Value of the prox-function.
    pub fn prox_value(&self, x: &Vector) -> f64 {
        (x - &self.center).norm_squared() / (2.0 * self.scale * self.scale)
    }

    pub fn prox_gradient(&self, x: &Vector) -> Vector {
        (x - &self.center) / (self.scale * self.scale)
    }

    /// Bregman divergence `V(x, y) = d(y) - d(x) - <grad d(x), y - x>`.
    pub fn bregman(&self, x: &Vector, y: &Vector) -> Result<f64> {
        check_dim(self.dim(), x)?;
        check_dim(self.dim(), y)?;
        // For the quadratic d this is exactly ||y - x||^2 / (2 R^2); the
        // closed form avoids the cancellation of the three-term definition.
        Ok((y - x).norm_squared() / (2.0 * self.scale * self.scale))
    }

    /// Mirror step `argmin_{u in X} { <h p, u> + V(x, u) }`.
    ///
    /// For the Euclidean structure this is the projection of `x - h R^2 p`.
    pub fn mirror_step(&self, x: &Vector, p: &Vector, h: f64) -> Result<Vector> {
        check_dim(self.dim(), x)?;
        check_dim(self.dim(), p)?;
        check_finite("mirror step direction", p)?;
        check_finite("mirror step point", x)?;
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "step size must be positive and finite, got {h}"
            )));
        }
        if !self.set.contains(x, FEASIBILITY_TOL) {
            return Err(Error::InvalidArgument(format!(
                "mirror step base point is {:e} away from the feasible set",
                self.set.distance(x)
            )));
        }
        let r2 = self.scale * self.scale;
        let raw = x - p * (h * r2);
        Ok(self.set.project(&raw))
    }

    /// Setup with prox-function `x -> d((x - new_center) / new_scale)`.
    ///
    /// The primal norm picks up a factor `1 / new_scale` and the dual norm a
    /// factor `new_scale`; the feasible set is unchanged.
    pub fn shifted_scaled(&self, new_center: &Vector, new_scale: f64) -> Result<ProxSetup> {
        check_dim(self.dim(), new_center)?;
        check_finite("prox center", new_center)?;
        if !(new_scale > 0.0 && new_scale.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "prox scale must be positive, got {new_scale}"
            )));
        }
        // d((x - a) / s) = ||x - (a + s c)||^2 / (2 (s R)^2)
        Ok(ProxSetup {
            center: new_center + &self.center * new_scale,
            scale: self.scale * new_scale,
            set: self.set.clone(),
        })
    }
}
