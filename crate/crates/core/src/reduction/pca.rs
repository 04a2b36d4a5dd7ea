use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::normalize::NormalizedMatrix;
use crate::error::{Error, Result};

/// Default share of total variance the retained components must explain.
pub const DEFAULT_VARIANCE_TARGET: f64 = 0.85;

/// Principal components of a normalized matrix.
///
/// `components` holds the retained components as rows (`retained × d_in`),
/// `eigenvalues` and `explained_variance_ratio` cover every component in
/// descending order. Each component's largest-magnitude entry is positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    pub input_cols: Vec<String>,
    pub components: Vec<Vec<f64>>,
    pub eigenvalues: Vec<f64>,
    pub explained_variance_ratio: Vec<f64>,
    pub retained: usize,
    pub variance_target: f64,
}

impl PcaModel {
    pub fn input_dim(&self) -> usize {
        self.input_cols.len()
    }
}

/// Orients a component so its largest-magnitude entry is positive (first
/// such entry on ties).
fn orient(v: &mut [f64]) {
    let mut pivot = 0.0f64;
    for &x in v.iter() {
        if x.abs() > pivot.abs() {
            pivot = x;
        }
    }
    if pivot < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Eigendecomposition of the sample covariance of `nm`.
pub fn fit_pca(nm: &NormalizedMatrix, variance_target: f64) -> Result<PcaModel> {
    if !(variance_target > 0.0 && variance_target <= 1.0) {
        return Err(Error::invalid(format!(
            "variance target must lie in (0, 1], got {variance_target}"
        )));
    }
    let n = nm.n_rows();
    let d = nm.n_cols();
    if n < 2 {
        return Err(Error::invalid("PCA needs at least 2 rows"));
    }
    if d == 0 {
        return Ok(PcaModel {
            input_cols: Vec::new(),
            components: Vec::new(),
            eigenvalues: Vec::new(),
            explained_variance_ratio: Vec::new(),
            retained: 0,
            variance_target,
        });
    }

    let x = DMatrix::from_fn(n, d, |i, j| nm.data[i][j]);
    let cov = (x.transpose() * &x) / (n - 1) as f64;
    let eig = SymmetricEigen::new(cov);

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));

    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i].max(0.0)).collect();
    let mut vectors: Vec<Vec<f64>> = order
        .iter()
        .map(|&i| eig.eigenvectors.column(i).iter().copied().collect())
        .collect();
    vectors.iter_mut().for_each(|v| orient(v));

    let total: f64 = eigenvalues.iter().sum();
    let explained_variance_ratio: Vec<f64> = eigenvalues
        .iter()
        .map(|&e| if total > 0.0 { e / total } else { 0.0 })
        .collect();

    let mut retained = d;
    let mut cumulative = 0.0;
    for (m, &e) in eigenvalues.iter().enumerate() {
        cumulative += e;
        if cumulative >= variance_target * total {
            retained = m + 1;
            break;
        }
    }
    vectors.truncate(retained);

    Ok(PcaModel {
        input_cols: nm.cols.clone(),
        components: vectors,
        eigenvalues,
        explained_variance_ratio,
        retained,
        variance_target,
    })
}

/// Projects every row onto the retained components.
pub fn project(nm: &NormalizedMatrix, model: &PcaModel) -> Result<Vec<Vec<f64>>> {
    if nm.n_cols() != model.input_dim() {
        return Err(Error::DimensionMismatch {
            expected: model.input_dim(),
            actual: nm.n_cols(),
        });
    }
    Ok(nm.data.iter().map(|row| project_row(row, model)).collect())
}

pub fn project_row(row: &[f64], model: &PcaModel) -> Vec<f64> {
    model
        .components
        .iter()
        .map(|c| c.iter().zip(row).map(|(a, b)| a * b).sum())
        .collect()
}

/// Maps projected rows back to the normalized space.
pub fn reconstruct(projected: &[Vec<f64>], model: &PcaModel) -> Result<Vec<Vec<f64>>> {
    projected
        .iter()
        .map(|p| {
            if p.len() != model.retained {
                return Err(Error::DimensionMismatch {
                    expected: model.retained,
                    actual: p.len(),
                });
            }
            let mut out = vec![0.0; model.input_dim()];
            for (coef, comp) in p.iter().zip(&model.components) {
                for (o, c) in out.iter_mut().zip(comp) {
                    *o += coef * c;
                }
            }
            Ok(out)
        })
        .collect()
}
