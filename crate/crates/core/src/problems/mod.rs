//! Benchmark instances: the constrained Fermat–Torricelli–Steiner problems,
//! the five strongly convex examples and a one-dimensional toy.
//!
//! Every [`Problem`] is built from a [`ProblemData`] record (named matrices,
//! vectors and scalars). The same record is what fixture files store, so a
//! fixture reload rebuilds exactly the same oracles.

mod fixture;
mod reference;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::oracles::{
    max_oracle, quadratic_oracle, ConstraintOracle, FnOracle, FunctionOracle, OracleInfo,
};
use crate::prox::{FeasibleSet, ProxSetup, Vector, FEASIBILITY_TOL};

pub use fixture::{Fixture, FixtureMatrix, FixtureReference};
pub use reference::{compute_reference, MIN_REFERENCE_BUDGET};

/// Anchor points of the Fermat–Torricelli–Steiner objective (one per row).
pub const FTS_ANCHORS: [[f64; 10]; 10] = [
    [1., 2., 1., 4., 1., 0., 4., 4., 4., 3.],
    [2., 4., 3., 1., 0., 2., 4., 0., 4., 0.],
    [3., 2., 3., 4., 3., 0., 3., 4., 2., 3.],
    [0., 0., 2., 0., 2., 4., 4., 1., 0., 0.],
    [3., 3., 4., 4., 3., 0., 1., 0., 4., 4.],
    [2., 2., 4., 0., 4., 0., 2., 2., 1., 1.],
    [0., 4., 3., 4., 2., 3., 3., 4., 0., 2.],
    [2., 2., 1., 4., 2., 1., 4., 3., 0., 3.],
    [4., 1., 2., 2., 3., 3., 2., 1., 3., 1.],
    [3., 3., 2., 2., 0., 0., 4., 0., 3., 4.],
];

/// Rows `alpha_i` of the shared constraint `max_i <alpha_i, x> + ||x||^2 / 2`
/// used by the strongly convex examples.
pub const SC_CONSTRAINT_ROWS: [[f64; 10]; 10] = [
    [1., 1., 1., 1., 1., 1., 1., 1., 1., 1.],
    [7., 8., 6., 2., 9., 2., 3., 3., 2., 6.],
    [6., 3., 4., 3., 5., 1., 6., 3., 2., 8.],
    [3., 5., 2., 7., 8., 3., 2., 1., 5., 2.],
    [2., 3., 1., 8., 1., 2., 1., 1., 5., 8.],
    [1., 8., 9., 1., 3., 5., 1., 3., 5., 2.],
    [1., 7., 8., 5., 5., 9., 3., 1., 6., 4.],
    [7., 3., 5., 8., 9., 1., 8., 7., 8., 8.],
    [6., 4., 6., 2., 9., 2., 3., 1., 6., 3.],
    [2., 3., 4., 4., 2., 1., 9., 1., 1., 8.],
];

const SC_MAX_DIAGONALS: [[f64; 10]; 3] = [
    [1., 1., 2., 4., 1., 5., 3., 2., 4., 8.],
    [2., 1., 3., 4., 2., 5., 1., 6., 7., 2.],
    [1., 1., 2., 3., 5., 1., 4., 2., 3., 6.],
];

const SC_REGRESSION_DESIGN: [[f64; 10]; 3] = [
    [5., 3., 3., 5., 4., 4., 3., 3., 5., 1.],
    [2., 4., 3., 5., 3., 4., 2., 2., 5., 4.],
    [5., 2., 1., 4., 1., 1., 2., 3., 5., 5.],
];

const SC_DENOISING_DESIGN: [[f64; 10]; 2] = [
    [9., 2., 4., 2., 2., 3., 6., 3., 5., 5.],
    [6., 7., 2., 4., 8., 6., 8., 8., 5., 1.],
];

/// Every built-in problem id.
pub const PROBLEM_IDS: [&str; 10] = [
    "toy-1d",
    "fts-quadratic",
    "fts-quadratic-unit-ball",
    "fts-nonsmooth",
    "fts-nonsmooth-unit-ball",
    "sc-example-1",
    "sc-example-2",
    "sc-example-3",
    "sc-example-4",
    "sc-example-5",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Toy1d,
    FtsQuadratic,
    FtsNonsmooth,
    StronglyConvex(u8),
}

impl Family {
    pub fn as_str(&self) -> String {
        match self {
            Family::Toy1d => "toy-1d".into(),
            Family::FtsQuadratic => "fts-quadratic".into(),
            Family::FtsNonsmooth => "fts-nonsmooth".into(),
            Family::StronglyConvex(k) => format!("strongly-convex-{k}"),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "toy-1d" => Ok(Family::Toy1d),
            "fts-quadratic" => Ok(Family::FtsQuadratic),
            "fts-nonsmooth" => Ok(Family::FtsNonsmooth),
            _ => s
                .strip_prefix("strongly-convex-")
                .and_then(|k| k.parse::<u8>().ok())
                .filter(|k| (1..=5).contains(k))
                .map(Family::StronglyConvex)
                .ok_or_else(|| Error::Fixture(format!("unknown problem family `{s}`"))),
        }
    }
}

/// Raw numbers a problem is built from.
///
/// Common keys: vector `x0`; scalars `theta0`, `m_g`, `mu`, optional `r0`;
/// the feasible set as either (`set_center`, `set_radius`) or
/// (`set_lower`, `set_upper`). Family-specific keys are documented on the
/// builders.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemData {
    pub family: Family,
    pub matrices: BTreeMap<String, DMatrix<f64>>,
    pub vectors: BTreeMap<String, Vector>,
    pub scalars: BTreeMap<String, f64>,
}

impl ProblemData {
    fn new(family: Family) -> Self {
        ProblemData {
            family,
            matrices: BTreeMap::new(),
            vectors: BTreeMap::new(),
            scalars: BTreeMap::new(),
        }
    }

    fn matrix(&self, key: &str) -> Result<&DMatrix<f64>> {
        self.matrices
            .get(key)
            .ok_or_else(|| Error::Fixture(format!("missing matrix `{key}`")))
    }

    fn vector(&self, key: &str) -> Result<&Vector> {
        self.vectors
            .get(key)
            .ok_or_else(|| Error::Fixture(format!("missing vector `{key}`")))
    }

    fn scalar(&self, key: &str) -> Result<f64> {
        self.scalars
            .get(key)
            .copied()
            .ok_or_else(|| Error::Fixture(format!("missing scalar `{key}`")))
    }

    fn set_ball(&mut self, center: Vector, radius: f64) {
        self.vectors.insert("set_center".into(), center);
        self.scalars.insert("set_radius".into(), radius);
    }

    fn feasible_set(&self) -> Result<FeasibleSet> {
        if let Some(radius) = self.scalars.get("set_radius") {
            FeasibleSet::ball(self.vector("set_center")?.clone(), *radius)
        } else if self.vectors.contains_key("set_lower") {
            FeasibleSet::boxed(self.vector("set_lower")?.clone(), self.vector("set_upper")?.clone())
        } else {
            Err(Error::Fixture("no feasible set description".into()))
        }
    }
}

/// High-accuracy optimum from an independent long run.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceOpt {
    pub x_star: Vector,
    pub f_star: f64,
    /// Iterations spent by the reference method.
    pub budget: u64,
    /// `max_i g_i(x_star)`.
    pub residual: f64,
    pub note: String,
}

#[derive(Clone)]
pub struct Problem {
    pub name: String,
    pub objective: FunctionOracle,
    pub constraints: ConstraintOracle,
    pub feasible_set: FeasibleSet,
    /// `Theta_0`, with `d(x_*) <= Theta_0^2`.
    pub theta0: f64,
    pub mu: f64,
    pub x0: Vector,
    pub r0: Option<f64>,
    pub reference: Option<ReferenceOpt>,
    data: ProblemData,
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("name", &self.name)
            .field("dim", &self.dim())
            .field("constraints", &self.constraints.len())
            .field("theta0", &self.theta0)
            .field("m_g", &self.m_g())
            .field("mu", &self.mu)
            .field("r0", &self.r0)
            .field("has_reference", &self.reference.is_some())
            .finish()
    }
}

impl Problem {
    pub fn dim(&self) -> usize {
        self.x0.len()
    }

    pub fn m_g(&self) -> f64 {
        self.constraints.lipschitz()
    }

    /// Lipschitz constant of the objective, when known.
    pub fn m_f(&self) -> Option<f64> {
        self.objective.info().lipschitz
    }

    pub fn data(&self) -> &ProblemData {
        &self.data
    }

    /// The standard Euclidean prox setup on the problem's feasible set.
    pub fn prox_setup(&self) -> ProxSetup {
        ProxSetup::euclidean(self.feasible_set.clone())
    }

    /// `max_i g_i(x)`.
    pub fn constraint_value(&self, x: &Vector) -> f64 {
        self.constraints.max_value(x).1
    }

    /// Overrides `M_g`, keeping everything else.
    pub fn with_m_g(&self, m_g: f64) -> Result<Problem> {
        let mut p = self.clone();
        p.constraints = self.constraints.with_lipschitz(m_g)?;
        p.data.scalars.insert("m_g".into(), m_g);
        Ok(p)
    }

    pub fn with_reference(mut self, reference: ReferenceOpt) -> Problem {
        self.reference = Some(reference);
        self
    }

    pub fn by_id(id: &str) -> Result<Problem> {
        match id {
            "toy-1d" => toy_1d(),
            "fts-quadratic" => Ok(fts_quadratic()),
            "fts-quadratic-unit-ball" => Ok(fts_quadratic_unit_ball()),
            "fts-nonsmooth" => Ok(fts_nonsmooth()),
            "fts-nonsmooth-unit-ball" => Ok(fts_nonsmooth_unit_ball()),
            _ => {
                let k = id
                    .strip_prefix("sc-example-")
                    .and_then(|k| k.parse::<usize>().ok())
                    .filter(|k| (1..=5).contains(k))
                    .ok_or_else(|| Error::UnknownProblem(id.to_string()))?;
                Ok(strongly_convex_example(k))
            }
        }
    }

    /// Builds a problem from its raw data.
    pub fn from_data(name: &str, data: ProblemData) -> Result<Problem> {
        let set = data.feasible_set()?;
        let dim = set.dim();
        let m_g = data.scalar("m_g")?;
        let (objective, constraints) = match data.family {
            Family::Toy1d => toy_oracles(m_g)?,
            Family::FtsQuadratic => {
                let anchors = data.matrix("anchors")?.clone();
                (distance_sum(anchors), fts_quadratic_constraints(dim, m_g)?)
            }
            Family::FtsNonsmooth => {
                let anchors = data.matrix("anchors")?.clone();
                let weights = data.matrix("weights")?.clone();
                (distance_sum(anchors), weighted_abs_constraints(&weights, m_g)?)
            }
            Family::StronglyConvex(k) => {
                let rows = data.matrix("constraint_rows")?;
                (sc_objective(k, &data)?, sc_constraint(rows, m_g)?)
            }
        };
        let x0 = data.vector("x0")?.clone();
        if x0.len() != dim || objective.dim() != dim || constraints.dim() != dim {
            return Err(Error::Fixture(format!("inconsistent dimensions in `{name}`")));
        }
        if !set.contains(&x0, FEASIBILITY_TOL) {
            return Err(Error::InvalidArgument(format!(
                "starting point of `{name}` lies outside the feasible set"
            )));
        }
        Ok(Problem {
            name: name.to_string(),
            objective,
            constraints,
            feasible_set: set,
            theta0: data.scalar("theta0")?,
            mu: data.scalar("mu")?,
            x0,
            r0: data.scalars.get("r0").copied(),
            reference: None,
            data,
        })
    }
}

fn matrix_from_rows<const C: usize>(rows: &[[f64; C]]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), C, |i, j| rows[i][j])
}

// 1-D toy on X = [-1, 1]: f(x) = x, g(x) = x - 1/2, Theta_0^2 = 1/2, M_g = 1.
// The optimum is the left endpoint, x_* = -1, f_* = -1.
fn toy_data() -> ProblemData {
    let mut data = ProblemData::new(Family::Toy1d);
    data.vectors.insert("set_lower".into(), Vector::from_element(1, -1.0));
    data.vectors.insert("set_upper".into(), Vector::from_element(1, 1.0));
    data.vectors.insert("x0".into(), Vector::zeros(1));
    data.scalars.insert("theta0".into(), 0.5f64.sqrt());
    data.scalars.insert("m_g".into(), 1.0);
    data.scalars.insert("mu".into(), 0.0);
    data
}

fn toy_oracles(m_g: f64) -> Result<(FunctionOracle, ConstraintOracle)> {
    let info = OracleInfo {
        lipschitz: Some(1.0),
        grad_lipschitz: Some(0.0),
        strong_convexity: 0.0,
    };
    let f = FnOracle::new("x", 1, |x| x[0], |_| Vector::from_element(1, 1.0))
        .with_info(info)
        .into_oracle();
    let g = FnOracle::new("x - 1/2", 1, |x| x[0] - 0.5, |_| Vector::from_element(1, 1.0))
        .with_info(info)
        .into_oracle();
    Ok((f, ConstraintOracle::single(g, m_g)?))
}

pub fn toy_1d() -> Result<Problem> {
    let p = Problem::from_data("toy-1d", toy_data())?;
    Ok(p.with_reference(ReferenceOpt {
        x_star: Vector::from_element(1, -1.0),
        f_star: -1.0,
        budget: 0,
        residual: -1.5,
        note: "closed form: the minimum of x over [-1, 1] is the left endpoint".into(),
    }))
}

/// `f(x) = sum_k ||x - A_k||`, `M_f` = number of anchors.
///
/// At an anchor the kink term contributes the zero subgradient.
fn distance_sum(anchors: DMatrix<f64>) -> FunctionOracle {
    let count = anchors.nrows() as f64;
    let dim = anchors.ncols();
    let rows: Vec<Vector> = (0..anchors.nrows())
        .map(|k| anchors.row(k).transpose())
        .collect();
    let rows_grad = rows.clone();
    FnOracle::new(
        "sum of distances",
        dim,
        move |x| rows.iter().map(|a| (x - a).norm()).sum(),
        move |x| {
            let mut g = Vector::zeros(x.len());
            for a in &rows_grad {
                let d = x - a;
                let n = d.norm();
                if n > 0.0 {
                    g += d / n;
                }
            }
            g
        },
    )
    .with_info(OracleInfo {
        lipschitz: Some(count),
        grad_lipschitz: None,
        strong_convexity: 0.0,
    })
    .into_oracle()
}

/// `g_i(x) = ||x||^2 + x_i^2 - 1`, i.e. coordinate `i` counted twice.
fn fts_quadratic_constraints(dim: usize, m_g: f64) -> Result<ConstraintOracle> {
    let members = (0..dim)
        .map(|i| {
            let mut a = DMatrix::<f64>::identity(dim, dim) * 2.0;
            a[(i, i)] = 4.0;
            quadratic_oracle(a, Vector::zeros(dim), -1.0)
        })
        .collect::<Result<Vec<_>>>()?;
    ConstraintOracle::new(members, m_g)
}

/// `g_i(x) = sum_j w_ij |x_j| - 1`; the kink of `|.|` uses subgradient 0.
fn weighted_abs_constraints(weights: &DMatrix<f64>, m_g: f64) -> Result<ConstraintOracle> {
    let members = (0..weights.nrows())
        .map(|i| {
            let w: Vector = weights.row(i).transpose();
            let w_grad = w.clone();
            let lip = w.norm();
            FnOracle::new(
                format!("weighted l1 row {i}"),
                w.len(),
                move |x| w.iter().zip(x.iter()).map(|(c, v)| c * v.abs()).sum::<f64>() - 1.0,
                move |x| Vector::from_fn(x.len(), |j, _| w_grad[j] * sign0(x[j])),
            )
            .with_info(OracleInfo {
                lipschitz: Some(lip),
                grad_lipschitz: None,
                strong_convexity: 0.0,
            })
            .into_oracle()
        })
        .collect();
    ConstraintOracle::new(members, m_g)
}

fn sign0(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn fts_data(family: Family, radius: f64, x0: Vector, m_g: f64) -> ProblemData {
    let mut data = ProblemData::new(family);
    data.matrices
        .insert("anchors".into(), matrix_from_rows(&FTS_ANCHORS));
    data.set_ball(Vector::zeros(10), radius);
    data.vectors.insert("x0".into(), x0);
    data.scalars.insert("theta0".into(), 3.0);
    data.scalars.insert("m_g".into(), m_g);
    data.scalars.insert("mu".into(), 0.0);
    data
}

/// Coefficient matrix of the nonsmooth FTS constraints: all ones, with
/// weight `i + 2` (1-based `i + 1`) on coordinate `i` of row `i`.
pub fn fts_nonsmooth_weights() -> DMatrix<f64> {
    DMatrix::from_fn(10, 10, |i, j| if i == j { (i + 2) as f64 } else { 1.0 })
}

/// Constrained Fermat–Torricelli–Steiner problem with quadratic constraints.
///
/// `X` is the ball of radius `sqrt(10)` around the origin so that the start
/// `x0 = (1, ..., 1)` is admissible. There `||grad g_i(x)|| = ||2x + 2x_i e_i||
/// <= 4 ||x||`, hence `M_g = 4 sqrt(10)`.
pub fn fts_quadratic() -> Problem {
    let r = 10f64.sqrt();
    let data = fts_data(Family::FtsQuadratic, r, Vector::from_element(10, 1.0), 4.0 * r);
    Problem::from_data("fts-quadratic", data).expect("built-in data is consistent")
}

/// Sensitivity variant of [`fts_quadratic`] on the unit ball with the
/// normalized start `(1, ..., 1) / sqrt(10)`; `M_g = 4`.
pub fn fts_quadratic_unit_ball() -> Problem {
    let x0 = Vector::from_element(10, 1.0 / 10f64.sqrt());
    let data = fts_data(Family::FtsQuadratic, 1.0, x0, 4.0);
    Problem::from_data("fts-quadratic-unit-ball", data).expect("built-in data is consistent")
}

fn nonsmooth_data(radius: f64, x0: Vector) -> ProblemData {
    let weights = fts_nonsmooth_weights();
    // sup of ||w_i (.) sign(x)|| is the row norm; the heaviest row (11 on the
    // diagonal, nine ones) gives sqrt(130).
    let m_g = (0..10)
        .map(|i| weights.row(i).norm())
        .fold(0.0, f64::max);
    let mut data = fts_data(Family::FtsNonsmooth, radius, x0, m_g);
    data.matrices.insert("weights".into(), weights);
    data
}

/// FTS objective with the weighted-l1 constraints `sum_j w_ij |x_j| <= 1`.
/// `M_g = sqrt(130)`, independent of the ball.
pub fn fts_nonsmooth() -> Problem {
    let data = nonsmooth_data(10f64.sqrt(), Vector::from_element(10, 1.0));
    Problem::from_data("fts-nonsmooth", data).expect("built-in data is consistent")
}

pub fn fts_nonsmooth_unit_ball() -> Problem {
    let data = nonsmooth_data(1.0, Vector::from_element(10, 1.0 / 10f64.sqrt()));
    Problem::from_data("fts-nonsmooth-unit-ball", data).expect("built-in data is consistent")
}

/// `g(x) = max_i <alpha_i, x> + ||x||^2 / 2`, built as the max of the
/// quadratics `||x||^2 / 2 + <alpha_i, x>`.
fn sc_constraint(rows: &DMatrix<f64>, m_g: f64) -> Result<ConstraintOracle> {
    let dim = rows.ncols();
    let parts = (0..rows.nrows())
        .map(|i| quadratic_oracle(DMatrix::identity(dim, dim), -rows.row(i).transpose(), 0.0))
        .collect::<Result<Vec<_>>>()?;
    ConstraintOracle::single(max_oracle(parts)?, m_g)
}

/// Scalar smoothed absolute value: `|x| - tau/2` for `|x| >= tau`, else
/// `x^2 / (2 tau)`.
pub fn smoothed_abs(x: f64, tau: f64) -> f64 {
    if x.abs() >= tau {
        x.abs() - tau / 2.0
    } else {
        x * x / (2.0 * tau)
    }
}

fn smoothed_abs_derivative(x: f64, tau: f64) -> f64 {
    if x.abs() >= tau {
        sign0(x)
    } else {
        x / tau
    }
}

fn sc_objective(k: u8, data: &ProblemData) -> Result<FunctionOracle> {
    let mu = data.scalar("mu")?;
    match k {
        1 => {
            // (L - mu)/4 { [x_1^2 + sum (x_i - x_{i+1})^2] / 2 - x_1 } + mu/2 ||x||^2
            let big_l = data.scalar("big_l")?;
            let n = data.vector("x0")?.len();
            let mut t = DMatrix::<f64>::zeros(n, n);
            for i in 0..n {
                t[(i, i)] = if i + 1 < n { 2.0 } else { 1.0 };
                if i + 1 < n {
                    t[(i, i + 1)] = -1.0;
                    t[(i + 1, i)] = -1.0;
                }
            }
            let c = (big_l - mu) / 4.0;
            let a = t * c + DMatrix::identity(n, n) * mu;
            let mut b = Vector::zeros(n);
            b[0] = c;
            quadratic_oracle(a, b, 0.0)
        }
        2 => {
            let diag = data.matrix("diagonals")?;
            let lin = data.matrix("linear")?;
            let offsets = data.vector("offsets")?;
            let parts = (0..diag.nrows())
                .map(|j| {
                    quadratic_oracle(
                        DMatrix::from_diagonal(&diag.row(j).transpose()),
                        lin.row(j).transpose(),
                        offsets[j],
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            max_oracle(parts)
        }
        3 => {
            // ||Ax - b||^2 / 2 + mu/2 ||x||^2
            let a = data.matrix("design")?;
            let b = data.vector("target")?;
            let n = a.ncols();
            let q = a.transpose() * a + DMatrix::identity(n, n) * mu;
            quadratic_oracle(q, a.transpose() * b, 0.5 * b.norm_squared())
        }
        4 => {
            // sum_i w_i x_i^4 + mu/2 ||x||^2; on the unit ball the Hessian is
            // bounded by 12 max(w) + mu.
            let w = data.vector("weights")?.clone();
            let wg = w.clone();
            let lip = 12.0 * w.max() + mu;
            Ok(FnOracle::new(
                "weighted quartic",
                w.len(),
                move |x| {
                    w.iter().zip(x.iter()).map(|(c, v)| c * v.powi(4)).sum::<f64>()
                        + 0.5 * mu * x.norm_squared()
                },
                move |x| Vector::from_fn(x.len(), |i, _| 4.0 * wg[i] * x[i].powi(3) + mu * x[i]),
            )
            .with_info(OracleInfo {
                lipschitz: None,
                grad_lipschitz: Some(lip),
                strong_convexity: mu,
            })
            .into_oracle())
        }
        5 => {
            // ||Ax - b||^2 / 2 + lambda ||x||_{l1,tau} + mu/2 ||x||^2
            let a = data.matrix("design")?.clone();
            let b = data.vector("target")?.clone();
            let lambda = data.scalar("lambda")?;
            let tau = data.scalar("tau")?;
            let (ag, bg) = (a.clone(), b.clone());
            let gram_max = (a.transpose() * &a).symmetric_eigen().eigenvalues.max();
            Ok(FnOracle::new(
                "smoothed denoising",
                a.ncols(),
                move |x| {
                    0.5 * (&a * x - &b).norm_squared()
                        + lambda * x.iter().map(|&v| smoothed_abs(v, tau)).sum::<f64>()
                        + 0.5 * mu * x.norm_squared()
                },
                move |x| {
                    let mut g = ag.transpose() * (&ag * x - &bg) + x * mu;
                    for (gi, xi) in g.iter_mut().zip(x.iter()) {
                        *gi += lambda * smoothed_abs_derivative(*xi, tau);
                    }
                    g
                },
            )
            .with_info(OracleInfo {
                lipschitz: None,
                grad_lipschitz: Some(gram_max + lambda / tau + mu),
                strong_convexity: mu,
            })
            .into_oracle())
        }
        _ => Err(Error::Fixture(format!("no strongly convex example {k}"))),
    }
}

fn sc_data(k: u8) -> ProblemData {
    let mut data = ProblemData::new(Family::StronglyConvex(k));
    let rows = matrix_from_rows(&SC_CONSTRAINT_ROWS);
    // On the unit ball grad g = alpha_m + x, so M_g = max_i ||alpha_i|| + 1.
    let m_g = (0..rows.nrows()).map(|i| rows.row(i).norm()).fold(0.0, f64::max) + 1.0;
    data.matrices.insert("constraint_rows".into(), rows);
    data.set_ball(Vector::zeros(10), 1.0);
    data.vectors
        .insert("x0".into(), Vector::from_element(10, 1.0).normalize());
    data.scalars.insert("theta0".into(), 3.0);
    data.scalars.insert("r0".into(), 2.0);
    data.scalars.insert("mu".into(), 1.0);
    data.scalars.insert("m_g".into(), m_g);
    match k {
        1 => {
            data.scalars.insert("big_l".into(), 10_000.0);
        }
        2 => {
            data.matrices
                .insert("diagonals".into(), matrix_from_rows(&SC_MAX_DIAGONALS));
            // linear terms sum_{i} (10 j + i) x_i for member j = 0, 1, 2
            data.matrices.insert(
                "linear".into(),
                DMatrix::from_fn(3, 10, |j, i| (10 * j + i + 1) as f64),
            );
            data.vectors
                .insert("offsets".into(), Vector::from_column_slice(&[5.0, 6.0, 7.0]));
        }
        3 => {
            data.matrices
                .insert("design".into(), matrix_from_rows(&SC_REGRESSION_DESIGN));
            data.vectors
                .insert("target".into(), Vector::from_column_slice(&[1.0, 2.0, 3.0]));
        }
        4 => {
            data.vectors
                .insert("weights".into(), Vector::from_fn(10, |i, _| (i + 1) as f64));
        }
        5 => {
            data.matrices
                .insert("design".into(), matrix_from_rows(&SC_DENOISING_DESIGN));
            data.vectors
                .insert("target".into(), Vector::from_column_slice(&[1.0, 2.0]));
            data.scalars.insert("lambda".into(), 0.05);
            data.scalars.insert("tau".into(), 1e-4);
        }
        _ => unreachable!("examples are numbered 1 to 5"),
    }
    data
}

/// Strongly convex example `k` (1 to 5) on the unit ball of `R^10`.
pub fn strongly_convex_example(k: usize) -> Problem {
    assert!((1..=5).contains(&k), "examples are numbered 1 to 5");
    Problem::from_data(&format!("sc-example-{k}"), sc_data(k as u8))
        .expect("built-in data is consistent")
}

/// All five strongly convex examples in order.
pub fn strongly_convex_suite() -> Vec<Problem> {
    (1..=5).map(strongly_convex_example).collect()
}

/// Shared handle for running several solvers on one problem.
pub type SharedProblem = Arc<Problem>;
