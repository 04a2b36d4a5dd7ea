//! Cluster-count selection by the Bayesian Information Criterion under a
//! spherical Gaussian model with one shared variance.

use serde::{Deserialize, Serialize};

use super::kmeans::{kmeans_best_of, Clustering, KMeansParams};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BicScore {
    pub k: usize,
    /// `+inf` when every cluster collapses onto a single location.
    #[serde(with = "infinite_as_null")]
    pub bic: f64,
    pub inertia: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KChoice {
    pub k: usize,
    pub scores: Vec<BicScore>,
}

/// BIC of a hard clustering (larger is better).
///
/// With `n` points in `d` dimensions, `k` clusters of sizes `n_c` and
/// within-cluster sum of squares `W`, the shared variance is
/// `W / (d (n - k))` and
///
/// `BIC = sum_c n_c ln(n_c / n) - (n d / 2) ln(2 pi var) - W / (2 var) - (p / 2) ln n`
///
/// with `p = (k - 1) + k d + 1` free parameters. A zero-inertia clustering has
/// unbounded likelihood and scores `+inf`.
pub fn bic(points: &[Vec<f64>], clustering: &Clustering) -> f64 {
    let n = points.len() as f64;
    let d = points.first().map_or(0, Vec::len) as f64;
    let k = clustering.k as f64;
    let w = clustering.inertia;
    if w <= 0.0 || d == 0.0 {
        return f64::INFINITY;
    }
    let var = w / (d * (n - k));
    let mixing: f64 = clustering
        .cluster_sizes()
        .iter()
        .filter(|&&s| s > 0)
        .map(|&s| s as f64 * (s as f64 / n).ln())
        .sum();
    let log_likelihood =
        mixing - (n * d / 2.0) * (2.0 * std::f64::consts::PI * var).ln() - w / (2.0 * var);
    let params = (k - 1.0) + k * d + 1.0;
    log_likelihood - params / 2.0 * n.ln()
}

/// Picks the `k` in `k_min..=k_max` with the largest BIC, evaluating the
/// best-of-`restarts` clustering for each `k`. Ties go to the smaller `k`.
pub fn choose_k(
    points: &[Vec<f64>],
    k_min: usize,
    k_max: usize,
    seed: u64,
    restarts: usize,
    params: KMeansParams,
) -> Result<KChoice> {
    if k_min == 0 || k_min > k_max || k_max > points.len() {
        return Err(Error::invalid(format!(
            "need 1 <= k_min <= k_max <= n, got k_min={k_min}, k_max={k_max}, n={}",
            points.len()
        )));
    }
    let mut scores = Vec::with_capacity(k_max - k_min + 1);
    let mut best: Option<BicScore> = None;
    for k in k_min..=k_max {
        let clustering = kmeans_best_of(points, k, seed, restarts, params)?;
        let score = BicScore {
            k,
            bic: bic(points, &clustering),
            inertia: clustering.inertia,
        };
        log::debug!("k={k} bic={} inertia={}", score.bic, score.inertia);
        if best.is_none_or(|b| score.bic > b.bic) {
            best = Some(score);
        }
        scores.push(score);
    }
    Ok(KChoice {
        k: best.expect("non-empty range").k,
        scores,
    })
}

mod infinite_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}
