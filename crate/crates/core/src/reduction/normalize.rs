use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{MetricSchema, MetricVector};

/// Workloads × metrics, before standardization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricMatrix {
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    pub data: Vec<Vec<f64>>,
}

impl MetricMatrix {
    pub fn new(rows: Vec<String>, cols: Vec<String>, data: Vec<Vec<f64>>) -> Result<Self> {
        if rows.len() != data.len() {
            return Err(Error::DimensionMismatch {
                expected: rows.len(),
                actual: data.len(),
            });
        }
        for row in &data {
            if row.len() != cols.len() {
                return Err(Error::DimensionMismatch {
                    expected: cols.len(),
                    actual: row.len(),
                });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid("metric matrix contains a non-finite value"));
            }
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_vectors(vectors: &[MetricVector], schema: &MetricSchema) -> Result<Self> {
        for v in vectors {
            v.check_against(schema)?;
        }
        Self::new(
            vectors.iter().map(|v| v.workload_id().to_string()).collect(),
            schema.names().map(str::to_string).collect(),
            vectors.iter().map(|v| v.values().to_vec()).collect(),
        )
    }
}

/// Z-scored metric matrix. Columns with zero variance are removed and listed
/// in `dropped_cols`; `col_means`/`col_stds` describe the retained columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizedMatrix {
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    pub data: Vec<Vec<f64>>,
    pub col_means: Vec<f64>,
    pub col_stds: Vec<f64>,
    pub dropped_cols: Vec<String>,
}

impl NormalizedMatrix {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.cols.len()
    }

    /// CSV export: `workload,<metric>...`, one row per workload.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("workload");
        for c in &self.cols {
            out.push(',');
            out.push_str(c);
        }
        out.push('\n');
        for (id, row) in self.rows.iter().zip(&self.data) {
            out.push_str(id);
            for v in row {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Standardizes each column to mean 0 and sample standard deviation 1
/// (n - 1 denominator).
pub fn normalize_zscore(matrix: &MetricMatrix) -> Result<NormalizedMatrix> {
    let n = matrix.data.len();
    if n < 2 {
        return Err(Error::invalid(format!(
            "normalization needs at least 2 workloads, got {n}"
        )));
    }
    let mut kept = Vec::new();
    let mut dropped_cols = Vec::new();
    for (j, name) in matrix.cols.iter().enumerate() {
        let col = matrix.data.iter().map(|r| r[j]);
        let mean = col.clone().sum::<f64>() / n as f64;
        let var = col.map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let std = var.sqrt();
        // rounding noise in the mean of a constant column is not variance
        if std == 0.0 || std <= 1e-12 * mean.abs() {
            dropped_cols.push(name.clone());
        } else {
            kept.push((j, mean, std));
        }
    }
    let data = matrix
        .data
        .iter()
        .map(|row| kept.iter().map(|&(j, m, s)| (row[j] - m) / s).collect())
        .collect();
    Ok(NormalizedMatrix {
        rows: matrix.rows.clone(),
        cols: kept.iter().map(|&(j, _, _)| matrix.cols[j].clone()).collect(),
        data,
        col_means: kept.iter().map(|&(_, m, _)| m).collect(),
        col_stds: kept.iter().map(|&(_, _, s)| s).collect(),
        dropped_cols,
    })
}
