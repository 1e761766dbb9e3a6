//! JSON fixtures.
//!
//! Reals are written as decimal strings in Rust's shortest round-trip form,
//! so a save/load cycle reproduces every value bit for bit.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{Family, Problem, ProblemData, ReferenceOpt};
use crate::error::{Error, Result};
use crate::prox::Vector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureMatrix {
    pub rows: usize,
    pub cols: usize,
    /// Row-major entries.
    pub data: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureReference {
    pub x_star: Vec<String>,
    pub f_star: String,
    pub budget: u64,
    pub residual: String,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fixture {
    pub name: String,
    pub family: String,
    pub dim: usize,
    pub matrices: BTreeMap<String, FixtureMatrix>,
    pub vectors: BTreeMap<String, Vec<String>>,
    pub constants: BTreeMap<String, String>,
    pub x0: Vec<String>,
    pub reference_opt: Option<FixtureReference>,
}

fn real(v: f64) -> String {
    format!("{v:?}")
}

fn parse_real(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::Fixture(format!("`{s}` is not a real number")))
}

fn reals(v: &Vector) -> Vec<String> {
    v.iter().copied().map(real).collect()
}

fn parse_vector(v: &[String]) -> Result<Vector> {
    let values = v.iter().map(|s| parse_real(s)).collect::<Result<Vec<_>>>()?;
    Ok(Vector::from_vec(values))
}

impl Fixture {
    pub fn from_problem(problem: &Problem) -> Fixture {
        let data = problem.data();
        let matrices = data
            .matrices
            .iter()
            .map(|(k, m)| {
                let rows = (0..m.nrows())
                    .map(|i| (0..m.ncols()).map(|j| real(m[(i, j)])).collect())
                    .collect();
                let fm = FixtureMatrix {
                    rows: m.nrows(),
                    cols: m.ncols(),
                    data: rows,
                };
                (k.clone(), fm)
            })
            .collect();
        let vectors = data
            .vectors
            .iter()
            .filter(|(k, _)| k.as_str() != "x0")
            .map(|(k, v)| (k.clone(), reals(v)))
            .collect();
        let constants = data
            .scalars
            .iter()
            .map(|(k, v)| (k.clone(), real(*v)))
            .collect();
        let reference_opt = problem.reference.as_ref().map(|r| FixtureReference {
            x_star: reals(&r.x_star),
            f_star: real(r.f_star),
            budget: r.budget,
            residual: real(r.residual),
            note: r.note.clone(),
        });
        Fixture {
            name: problem.name.clone(),
            family: data.family.as_str(),
            dim: problem.dim(),
            matrices,
            vectors,
            constants,
            x0: reals(&problem.x0),
            reference_opt,
        }
    }

    pub fn to_problem(&self) -> Result<Problem> {
        let mut data = ProblemData::new(Family::parse(&self.family)?);
        for (k, m) in &self.matrices {
            if m.data.len() != m.rows || m.data.iter().any(|r| r.len() != m.cols) {
                return Err(Error::Fixture(format!("matrix `{k}` does not match its shape")));
            }
            let mut out = DMatrix::zeros(m.rows, m.cols);
            for (i, row) in m.data.iter().enumerate() {
                for (j, s) in row.iter().enumerate() {
                    out[(i, j)] = parse_real(s)?;
                }
            }
            data.matrices.insert(k.clone(), out);
        }
        for (k, v) in &self.vectors {
            data.vectors.insert(k.clone(), parse_vector(v)?);
        }
        for (k, s) in &self.constants {
            data.scalars.insert(k.clone(), parse_real(s)?);
        }
        let x0 = parse_vector(&self.x0)?;
        if x0.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x0.len(),
            });
        }
        data.vectors.insert("x0".into(), x0);
        let mut problem = Problem::from_data(&self.name, data)?;
        if let Some(r) = &self.reference_opt {
            problem.reference = Some(ReferenceOpt {
                x_star: parse_vector(&r.x_star)?,
                f_star: parse_real(&r.f_star)?,
                budget: r.budget,
                residual: parse_real(&r.residual)?,
                note: r.note.clone(),
            });
        }
        Ok(problem)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Fixture> {
        Ok(serde_json::from_str(text)?)
    }
}

impl Problem {
    /// Loads a fixture file.
    pub fn load(path: impl AsRef<Path>) -> Result<Problem> {
        Fixture::from_json(&fs::read_to_string(path)?)?.to_problem()
    }

    /// Writes the problem (and its reference optimum, if any) as a fixture.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut text = Fixture::from_problem(self).to_json()?;
        text.push('\n');
        fs::write(path, text)?;
        Ok(())
    }
}
