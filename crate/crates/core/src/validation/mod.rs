//! Analytic oracles, the relative-error metric, and convergence
//! experiments on random geometric graphs.

mod analytic;
mod experiments;

pub use analytic::AnalyticField;
pub use experiments::{
    curvature_convergence_experiment, error_exponent_fit, gradient_convergence_experiment, riemann_gradient_oracle,
    trial_seed, ExperimentPlan,
};

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{GacError, Result};
use crate::field::{ScalarField, VectorField};

/// Field whose per-vertex values have a squared norm.
pub trait FieldEnergy {
    fn len(&self) -> usize;
    fn sq_norm(&self, v: usize) -> f64;
    fn sq_diff(&self, other: &Self, v: usize) -> f64;
}

impl FieldEnergy for ScalarField {
    fn len(&self) -> usize {
        ScalarField::len(self)
    }
    fn sq_norm(&self, v: usize) -> f64 {
        self[v] * self[v]
    }
    fn sq_diff(&self, other: &Self, v: usize) -> f64 {
        let d = self[v] - other[v];
        d * d
    }
}

impl FieldEnergy for VectorField {
    fn len(&self) -> usize {
        VectorField::len(self)
    }
    fn sq_norm(&self, v: usize) -> f64 {
        self[v][0] * self[v][0] + self[v][1] * self[v][1]
    }
    fn sq_diff(&self, other: &Self, v: usize) -> f64 {
        let (dx, dy) = (self[v][0] - other[v][0], self[v][1] - other[v][1]);
        dx * dx + dy * dy
    }
}

/// Error energy over signal energy, skipping vertices flagged in `exclude`.
pub fn relative_error<F: FieldEnergy>(approx: &F, exact: &F, exclude: &[bool]) -> Result<f64> {
    let n = exact.len();
    if approx.len() != n {
        return Err(GacError::FieldMismatch { expected: n, found: approx.len() });
    }
    if exclude.len() != n {
        return Err(GacError::FieldMismatch { expected: n, found: exclude.len() });
    }
    let (mut err, mut sig) = (0.0, 0.0);
    for v in (0..n).filter(|&v| !exclude[v]) {
        err += approx.sq_diff(exact, v);
        sig += exact.sq_norm(v);
    }
    if sig == 0.0 {
        return Err(GacError::ZeroEnergy);
    }
    Ok(err / sig)
}

/// One relative-error measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRow {
    pub n: usize,
    pub trial: usize,
    pub operator: String,
    pub filter: String,
    pub e_r: f64,
}

/// Raw per-trial measurements of an experiment.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ErrorTable {
    pub rows: Vec<ErrorRow>,
}

impl ErrorTable {
    /// Distinct sizes present for an operator/filter pair, ascending.
    pub fn sizes(&self, operator: &str, filter: &str) -> Vec<usize> {
        let mut s: Vec<usize> = self.select(operator, filter).map(|r| r.n).collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    fn select<'a>(&'a self, operator: &'a str, filter: &'a str) -> impl Iterator<Item = &'a ErrorRow> + 'a {
        self.rows.iter().filter(move |r| r.operator == operator && r.filter == filter)
    }

    fn summarize(&self, operator: &str, filter: &str, f: impl Fn(&mut [f64]) -> f64) -> Vec<(usize, f64)> {
        self.sizes(operator, filter)
            .into_iter()
            .map(|n| {
                let mut xs: Vec<f64> = self.select(operator, filter).filter(|r| r.n == n).map(|r| r.e_r).collect();
                (n, f(&mut xs))
            })
            .collect()
    }

    /// Per-size median of `e_r`.
    pub fn medians(&self, operator: &str, filter: &str) -> Vec<(usize, f64)> {
        self.summarize(operator, filter, |xs| crate::filters::median_in_place(xs))
    }

    /// Per-size mean of `e_r`.
    pub fn means(&self, operator: &str, filter: &str) -> Vec<(usize, f64)> {
        self.summarize(operator, filter, |xs| xs.iter().sum::<f64>() / xs.len() as f64)
    }

    /// Distinct (operator, filter) pairs in first-seen order.
    pub fn series(&self) -> Vec<(String, String)> {
        let mut out: Vec<(String, String)> = Vec::new();
        for r in &self.rows {
            if !out.iter().any(|(o, f)| *o == r.operator && *f == r.filter) {
                out.push((r.operator.clone(), r.filter.clone()));
            }
        }
        out
    }

    /// Writes `n,trial,operator,filter,e_r`.
    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for r in &self.rows {
            out.serialize(r)?;
        }
        if self.rows.is_empty() {
            out.write_record(["n", "trial", "operator", "filter", "e_r"])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv(r: impl Read) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let rows = rdr.deserialize().collect::<std::result::Result<Vec<ErrorRow>, _>>()?;
        Ok(ErrorTable { rows })
    }
}
