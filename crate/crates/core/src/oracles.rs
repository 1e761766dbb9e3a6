//! First-order oracles: a value and one subgradient per query.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::prox::{check_dim, Vector};

/// Known constants of a functional, all with respect to the Euclidean norm.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct OracleInfo {
    /// Lipschitz constant of the function itself (`M_f`).
    pub lipschitz: Option<f64>,
    /// Lipschitz constant of the gradient (`L`).
    pub grad_lipschitz: Option<f64>,
    /// Strong convexity modulus (`mu`), zero for plain convex functions.
    pub strong_convexity: f64,
}

pub trait Oracle: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;

    fn value(&self, x: &Vector) -> f64;

    /// One subgradient at `x`. Implementations are deterministic.
    fn subgradient(&self, x: &Vector) -> Vector;

    fn info(&self) -> OracleInfo {
        OracleInfo::default()
    }
}

pub type FunctionOracle = Arc<dyn Oracle>;

/// `f(x) = x^T A x / 2 - b^T x + c`.
#[derive(Debug, Clone)]
pub struct Quadratic {
    a: DMatrix<f64>,
    b: Vector,
    c: f64,
    info: OracleInfo,
}

impl Quadratic {
    pub fn new(a: DMatrix<f64>, b: Vector, c: f64) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::InvalidArgument(format!(
                "quadratic form must be square, got {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        check_dim(a.nrows(), &b)?;
        let scale = a.amax().max(1.0);
        for i in 0..a.nrows() {
            for j in (i + 1)..a.ncols() {
                if (a[(i, j)] - a[(j, i)]).abs() > 1e-12 * scale {
                    return Err(Error::InvalidArgument(format!(
                        "quadratic form is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        let eig = a.clone().symmetric_eigen().eigenvalues;
        let info = OracleInfo {
            lipschitz: None,
            grad_lipschitz: Some(eig.max().max(0.0)),
            strong_convexity: eig.min().max(0.0),
        };
        Ok(Quadratic { a, b, c, info })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn linear(&self) -> &Vector {
        &self.b
    }

    pub fn constant(&self) -> f64 {
        self.c
    }
}

/// Builds the quadratic oracle `x^T A x / 2 - b^T x + c`.
pub fn quadratic_oracle(a: DMatrix<f64>, b: Vector, c: f64) -> Result<FunctionOracle> {
    Ok(Arc::new(Quadratic::new(a, b, c)?))
}

impl Oracle for Quadratic {
    fn dim(&self) -> usize {
        self.b.len()
    }

    fn value(&self, x: &Vector) -> f64 {
        0.5 * x.dot(&(&self.a * x)) - self.b.dot(x) + self.c
    }

    fn subgradient(&self, x: &Vector) -> Vector {
        &self.a * x - &self.b
    }

    fn info(&self) -> OracleInfo {
        self.info
    }
}

/// Pointwise maximum of a finite family.
///
/// The subgradient is taken from the lowest-indexed member attaining the
/// maximum, compared exactly on the computed values.
#[derive(Debug, Clone)]
pub struct MaxOf {
    parts: Vec<FunctionOracle>,
}

impl MaxOf {
    pub fn new(parts: Vec<FunctionOracle>) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidArgument("max of an empty family".into()))?;
        let dim = first.dim();
        if let Some(bad) = parts.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: bad.dim(),
            });
        }
        Ok(MaxOf { parts })
    }

    pub fn parts(&self) -> &[FunctionOracle] {
        &self.parts
    }

    /// Index and value of the lowest-indexed maximizing member.
    pub fn active(&self, x: &Vector) -> (usize, f64) {
        argmax_first(self.parts.iter().map(|p| p.value(x)))
    }
}

pub(crate) fn argmax_first(values: impl Iterator<Item = f64>) -> (usize, f64) {
    let mut values = values.enumerate();
    let first = values.next().expect("non-empty family").1;
    values.fold((0, first), |best, (i, v)| if v > best.1 { (i, v) } else { best })
}

/// `max_i parts[i]`, with `L = max L_i`, `mu = min mu_i` and `M_f = max M_f_i`.
pub fn max_oracle(parts: Vec<FunctionOracle>) -> Result<FunctionOracle> {
    Ok(Arc::new(MaxOf::new(parts)?))
}

fn fold_max(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    values.fold(Some(f64::NEG_INFINITY), |acc, v| Some(acc?.max(v?)))
}

impl Oracle for MaxOf {
    fn dim(&self) -> usize {
        self.parts[0].dim()
    }

    fn value(&self, x: &Vector) -> f64 {
        self.active(x).1
    }

    fn subgradient(&self, x: &Vector) -> Vector {
        let (i, _) = self.active(x);
        self.parts[i].subgradient(x)
    }

    fn info(&self) -> OracleInfo {
        let infos: Vec<_> = self.parts.iter().map(|p| p.info()).collect();
        OracleInfo {
            lipschitz: fold_max(infos.iter().map(|i| i.lipschitz)),
            grad_lipschitz: fold_max(infos.iter().map(|i| i.grad_lipschitz)),
            strong_convexity: infos
                .iter()
                .map(|i| i.strong_convexity)
                .fold(f64::INFINITY, f64::min),
        }
    }
}

type ValueFn = dyn Fn(&Vector) -> f64 + Send + Sync;
type GradFn = dyn Fn(&Vector) -> Vector + Send + Sync;

/// Oracle assembled from a pair of closures.
pub struct FnOracle {
    name: String,
    dim: usize,
    value: Box<ValueFn>,
    subgradient: Box<GradFn>,
    info: OracleInfo,
}

impl FnOracle {
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        value: impl Fn(&Vector) -> f64 + Send + Sync + 'static,
        subgradient: impl Fn(&Vector) -> Vector + Send + Sync + 'static,
    ) -> Self {
        FnOracle {
            name: name.into(),
            dim,
            value: Box::new(value),
            subgradient: Box::new(subgradient),
            info: OracleInfo::default(),
        }
    }

    pub fn with_info(mut self, info: OracleInfo) -> Self {
        self.info = info;
        self
    }

    pub fn into_oracle(self) -> FunctionOracle {
        Arc::new(self)
    }
}

impl fmt::Debug for FnOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnOracle")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("info", &self.info)
            .finish()
    }
}

impl Oracle for FnOracle {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &Vector) -> f64 {
        (self.value)(x)
    }

    fn subgradient(&self, x: &Vector) -> Vector {
        (self.subgradient)(x)
    }

    fn info(&self) -> OracleInfo {
        self.info
    }
}

/// How a non-productive step picks the constraint to step on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionRule {
    /// Lowest-indexed constraint whose value exceeds `eps`.
    #[default]
    FirstViolated,
    /// Constraint with the largest value (lowest index on ties).
    MostViolated,
}

/// Family of constraints `g_i(x) <= 0` with a common Lipschitz bound `M_g`.
#[derive(Debug, Clone)]
pub struct ConstraintOracle {
    members: Vec<FunctionOracle>,
    lipschitz: f64,
}

impl ConstraintOracle {
    pub fn new(members: Vec<FunctionOracle>, lipschitz: f64) -> Result<Self> {
        let first = members
            .first()
            .ok_or_else(|| Error::InvalidArgument("constraint family is empty".into()))?;
        let dim = first.dim();
        if let Some(bad) = members.iter().find(|m| m.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: bad.dim(),
            });
        }
        if !(lipschitz > 0.0 && lipschitz.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "M_g must be positive, got {lipschitz}"
            )));
        }
        Ok(ConstraintOracle { members, lipschitz })
    }

    pub fn single(member: FunctionOracle, lipschitz: f64) -> Result<Self> {
        Self::new(vec![member], lipschitz)
    }

    pub fn members(&self) -> &[FunctionOracle] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.members[0].dim()
    }

    /// The given `M_g`.
    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn with_lipschitz(&self, lipschitz: f64) -> Result<Self> {
        Self::new(self.members.clone(), lipschitz)
    }

    pub fn values(&self, x: &Vector) -> Vec<f64> {
        self.members.iter().map(|g| g.value(x)).collect()
    }

    /// `(i, g_i(x))` for the lowest-indexed maximizing member, i.e. the value
    /// of `g = max_i g_i` together with the member whose gradient serves as its
    /// subgradient.
    pub fn max_value(&self, x: &Vector) -> (usize, f64) {
        argmax_first(self.members.iter().map(|g| g.value(x)))
    }

    /// Most violated constraint if its value exceeds `eps`.
    pub fn max_violated(&self, x: &Vector, eps: f64) -> Option<(usize, f64)> {
        let (i, v) = self.max_value(x);
        (v > eps).then_some((i, v))
    }

    /// Lowest-indexed constraint whose value exceeds `eps`.
    pub fn first_violated(&self, x: &Vector, eps: f64) -> Option<(usize, f64)> {
        self.members
            .iter()
            .map(|g| g.value(x))
            .enumerate()
            .find(|&(_, v)| v > eps)
    }

    pub fn select(&self, x: &Vector, eps: f64, rule: SelectionRule) -> Option<(usize, f64)> {
        match rule {
            SelectionRule::FirstViolated => self.first_violated(x, eps),
            SelectionRule::MostViolated => self.max_violated(x, eps),
        }
    }

    pub fn subgradient(&self, index: usize, x: &Vector) -> Vector {
        self.members[index].subgradient(x)
    }
}

/// Free-function form of [`ConstraintOracle::max_violated`].
pub fn max_violated(constraints: &ConstraintOracle, x: &Vector, eps: f64) -> Option<(usize, f64)> {
    constraints.max_violated(x, eps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[f64]) -> Vector {
        Vector::from_column_slice(xs)
    }

    fn linear(coef: f64) -> FunctionOracle {
        FnOracle::new("linear", 1, move |x| coef * x[0], move |_| v(&[coef])).into_oracle()
    }

    fn constant(value: f64) -> FunctionOracle {
        FnOracle::new("constant", 1, move |_| value, |_| v(&[0.0])).into_oracle()
    }

    #[test]
    fn max_of_linear_pair() {
        let f = max_oracle(vec![linear(1.0), linear(-1.0)]).unwrap();
        assert_eq!(f.value(&v(&[2.0])), 2.0);
        assert_eq!(f.subgradient(&v(&[2.0])), v(&[1.0]));
        // tie at zero: lowest index wins
        assert_eq!(f.value(&v(&[0.0])), 0.0);
        assert_eq!(f.subgradient(&v(&[0.0])), v(&[1.0]));
        assert_eq!(f.subgradient(&v(&[-1.0])), v(&[-1.0]));
    }

    #[test]
    fn max_of_empty_family_is_rejected() {
        assert!(matches!(max_oracle(vec![]), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn max_metadata_combines_members() {
        let a = quadratic_oracle(DMatrix::from_diagonal(&v(&[2.0, 4.0])), v(&[0.0, 0.0]), 0.0).unwrap();
        let b = quadratic_oracle(DMatrix::from_diagonal(&v(&[1.0, 7.0])), v(&[0.0, 0.0]), 0.0).unwrap();
        let info = max_oracle(vec![a, b]).unwrap().info();
        assert!((info.grad_lipschitz.unwrap() - 7.0).abs() < 1e-12);
        assert!((info.strong_convexity - 1.0).abs() < 1e-12);
        assert_eq!(info.lipschitz, None);
    }

    #[test]
    fn quadratic_examples() {
        let f = quadratic_oracle(DMatrix::identity(2, 2), v(&[0.0, 0.0]), 0.0).unwrap();
        assert_eq!(f.value(&v(&[3.0, 4.0])), 12.5);
        assert_eq!(f.subgradient(&v(&[3.0, 4.0])), v(&[3.0, 4.0]));

        let f = quadratic_oracle(DMatrix::zeros(2, 2), v(&[1.0, 1.0]), 5.0).unwrap();
        assert_eq!(f.value(&v(&[1.0, 1.0])), 3.0);
        assert_eq!(f.subgradient(&v(&[1.0, 1.0])), v(&[-1.0, -1.0]));

        let f = quadratic_oracle(DMatrix::from_diagonal(&v(&[2.0, 4.0])), v(&[1.0, 0.0]), 0.0).unwrap();
        assert_eq!(f.value(&v(&[1.0, 1.0])), 2.0);
        assert_eq!(f.subgradient(&v(&[1.0, 1.0])), v(&[1.0, 4.0]));
        let info = f.info();
        assert!((info.grad_lipschitz.unwrap() - 4.0).abs() < 1e-12);
        assert!((info.strong_convexity - 2.0).abs() < 1e-12);
    }

    #[test]
    fn quadratic_rejects_asymmetric_matrix() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(matches!(quadratic_oracle(a, v(&[0.0, 0.0]), 0.0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn violated_constraint_selection() {
        let x = v(&[0.0]);
        let feasible = ConstraintOracle::new(vec![constant(-1.0), constant(-2.0)], 1.0).unwrap();
        assert_eq!(max_violated(&feasible, &x, 0.1), None);
        assert_eq!(feasible.first_violated(&x, 0.1), None);

        let one = ConstraintOracle::new(vec![constant(0.05), constant(0.5)], 1.0).unwrap();
        assert_eq!(max_violated(&one, &x, 0.1), Some((1, 0.5)));
        assert_eq!(one.first_violated(&x, 0.1), Some((1, 0.5)));

        let tie = ConstraintOracle::new(vec![constant(0.5), constant(0.5)], 1.0).unwrap();
        assert_eq!(max_violated(&tie, &x, 0.1), Some((0, 0.5)));

        let order = ConstraintOracle::new(vec![constant(0.2), constant(0.9)], 1.0).unwrap();
        assert_eq!(order.select(&x, 0.1, SelectionRule::FirstViolated), Some((0, 0.2)));
        assert_eq!(order.select(&x, 0.1, SelectionRule::MostViolated), Some((1, 0.9)));
    }

    #[test]
    fn constraint_family_validation() {
        assert!(ConstraintOracle::new(vec![], 1.0).is_err());
        assert!(ConstraintOracle::new(vec![constant(0.0)], 0.0).is_err());
        let two_d = FnOracle::new("z", 2, |_| 0.0, |_| Vector::zeros(2)).into_oracle();
        assert!(matches!(
            ConstraintOracle::new(vec![constant(0.0), two_d], 1.0),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
