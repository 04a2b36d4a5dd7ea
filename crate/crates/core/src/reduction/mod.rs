//! Workload subsetting: z-score normalization, PCA, K-means with BIC-based
//! selection of k, and one representative per cluster.

mod bic;
mod kmeans;
mod normalize;
mod pca;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::derive_microarch_metrics;
use crate::model::{MetricSchema, MetricVector, RawProfile};

pub use bic::{bic, choose_k, BicScore, KChoice};
pub use kmeans::{
    inertia, kmeans, kmeans_best_of, select_representatives, squared_distance, Clustering,
    KMeansParams,
};
pub use normalize::{normalize_zscore, MetricMatrix, NormalizedMatrix};
pub use pca::{fit_pca, project, project_row, reconstruct, PcaModel, DEFAULT_VARIANCE_TARGET};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KSelection {
    Fixed(usize),
    Auto { k_min: usize, k_max: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReductionConfig {
    pub variance_target: f64,
    pub k: KSelection,
    pub seed: u64,
    pub restarts: usize,
    pub kmeans: KMeansParams,
}

impl Default for ReductionConfig {
    fn default() -> Self {
        Self {
            variance_target: DEFAULT_VARIANCE_TARGET,
            k: KSelection::Auto { k_min: 1, k_max: 20 },
            seed: 42,
            restarts: 10,
            kmeans: KMeansParams::default(),
        }
    }
}

/// Every artifact of one reduction run, kept for audit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionResult {
    pub config: ReductionConfig,
    pub metrics: MetricMatrix,
    pub normalized: NormalizedMatrix,
    pub pca: PcaModel,
    pub projected: Vec<Vec<f64>>,
    pub k_selection: Option<KChoice>,
    pub clustering: Clustering,
    /// Workload id → cluster index.
    pub assignments: BTreeMap<String, usize>,
    /// `representatives[c]` stands in for cluster `c`.
    pub representatives: Vec<String>,
    pub cluster_sizes: Vec<usize>,
}

impl ReductionResult {
    pub fn dropped_cols(&self) -> &[String] {
        &self.normalized.dropped_cols
    }

    /// Clusters as sets of workload ids, in cluster-index order.
    pub fn clusters(&self) -> Vec<BTreeSet<String>> {
        let mut out = vec![BTreeSet::new(); self.clustering.k];
        for (id, &c) in &self.assignments {
            out[c].insert(id.clone());
        }
        out
    }
}

/// Runs normalize → PCA → project → (choose k) → K-means → representatives.
///
/// Rows are processed in workload-id order, so the outcome does not depend on
/// the order of `vectors`.
pub fn reduce_vectors(
    vectors: &[MetricVector],
    schema: &MetricSchema,
    config: &ReductionConfig,
) -> Result<ReductionResult> {
    if vectors.len() < 2 {
        return Err(Error::invalid(format!(
            "reduction needs at least 2 workloads, got {}",
            vectors.len()
        )));
    }
    let mut sorted: Vec<&MetricVector> = vectors.iter().collect();
    sorted.sort_by(|a, b| a.workload_id().cmp(b.workload_id()));
    if let Some(w) = sorted.windows(2).find(|w| w[0].workload_id() == w[1].workload_id()) {
        return Err(Error::invalid(format!(
            "duplicate workload id `{}`",
            w[0].workload_id()
        )));
    }
    let sorted: Vec<MetricVector> = sorted.into_iter().cloned().collect();

    let metrics = MetricMatrix::from_vectors(&sorted, schema)?;
    let normalized = normalize_zscore(&metrics)?;
    if !normalized.dropped_cols.is_empty() {
        log::info!("dropped zero-variance metrics: {}", normalized.dropped_cols.join(", "));
    }
    let pca = fit_pca(&normalized, config.variance_target)?;
    log::info!(
        "PCA keeps {} of {} components (target {})",
        pca.retained,
        pca.input_dim(),
        config.variance_target
    );
    let projected = project(&normalized, &pca)?;
    let n = projected.len();

    let (k, k_selection) = match config.k {
        KSelection::Fixed(k) => (k, None),
        KSelection::Auto { k_min, k_max } => {
            let k_max = k_max.min(n);
            let choice = choose_k(&projected, k_min, k_max, config.seed, config.restarts, config.kmeans)?;
            log::info!("BIC selects k = {}", choice.k);
            (choice.k, Some(choice))
        }
    };
    let clustering = kmeans_best_of(&projected, k, config.seed, config.restarts, config.kmeans)?;
    let representatives = select_representatives(&clustering, &projected, &metrics.rows)?;
    let assignments = metrics
        .rows
        .iter()
        .cloned()
        .zip(clustering.assignments.iter().copied())
        .collect();
    let cluster_sizes = clustering.cluster_sizes();

    Ok(ReductionResult {
        config: *config,
        metrics,
        normalized,
        pca,
        projected,
        k_selection,
        clustering,
        assignments,
        representatives,
        cluster_sizes,
    })
}

/// Derives metric vectors from raw profiles, then reduces them.
pub fn reduce_pipeline(
    profiles: &[RawProfile],
    schema: &MetricSchema,
    config: &ReductionConfig,
) -> Result<ReductionResult> {
    let vectors = profiles
        .iter()
        .map(|p| derive_microarch_metrics(p, schema))
        .collect::<Result<Vec<_>>>()?;
    reduce_vectors(&vectors, schema, config)
}
