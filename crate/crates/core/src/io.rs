//! Exchange formats: kernels and vectors as JSON, matrices and vectors as CSV.

use std::io::Write;

use faer::{c64, MatRef};
use serde::{Deserialize, Serialize};

use crate::chain::{MarkovKernel, ProbabilityVector};
use crate::{Error, Result};

/// `{n, rows}` with row-major doubles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelJson {
    pub n: usize,
    pub rows: Vec<Vec<f64>>,
}

impl KernelJson {
    pub fn from_matrix(m: MatRef<'_, f64>) -> Self {
        Self {
            n: m.nrows(),
            rows: (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect(),
        }
    }

    pub fn into_kernel(self) -> Result<MarkovKernel> {
        if self.rows.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: self.rows.len() });
        }
        MarkovKernel::from_rows(&self.rows)
    }
}

impl From<&MarkovKernel> for KernelJson {
    fn from(k: &MarkovKernel) -> Self {
        Self::from_matrix(k.matrix())
    }
}

/// `{n, values}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VectorJson {
    pub n: usize,
    pub values: Vec<f64>,
}

impl From<&ProbabilityVector> for VectorJson {
    fn from(p: &ProbabilityVector) -> Self {
        Self { n: p.len(), values: p.as_slice().to_vec() }
    }
}

impl VectorJson {
    pub fn into_probability(self) -> Result<ProbabilityVector> {
        if self.values.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: self.values.len() });
        }
        ProbabilityVector::new(self.values)
    }
}

/// Nonzero entries as CSV with columns `row, col, re, im`.
pub fn write_operator_csv<W: Write>(m: MatRef<'_, c64>, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["row", "col", "re", "im"])?;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let z = m[(i, j)];
            if z != c64::new(0.0, 0.0) {
                out.write_record([i.to_string(), j.to_string(), z.re.to_string(), z.im.to_string()])?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

/// Statevector as CSV with columns `index, re, im`.
pub fn write_state_csv<W: Write>(state: &[c64], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["index", "re", "im"])?;
    for (k, z) in state.iter().enumerate() {
        out.write_record([k.to_string(), z.re.to_string(), z.im.to_string()])?;
    }
    out.flush()?;
    Ok(())
}
