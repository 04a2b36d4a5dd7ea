use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KMeansParams {
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for KMeansParams {
    fn default() -> Self {
        Self {
            max_iter: 300,
            tol: 1e-6,
        }
    }
}

/// Result of one K-means run. `assignments[i]` is the cluster of point `i`;
/// `inertia_history` records the within-cluster sum of squares after every
/// centroid update.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Clustering {
    pub k: usize,
    pub assignments: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    pub inertia: f64,
    pub iterations: usize,
    pub seed: u64,
    pub inertia_history: Vec<f64>,
}

impl Clustering {
    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &a in &self.assignments {
            sizes[a] += 1;
        }
        sizes
    }

    pub fn members(&self, cluster: usize) -> impl Iterator<Item = usize> + '_ {
        self.assignments
            .iter()
            .enumerate()
            .filter(move |(_, &a)| a == cluster)
            .map(|(i, _)| i)
    }
}

pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Sum of squared distances from each point to its assigned centroid.
pub fn inertia(points: &[Vec<f64>], assignments: &[usize], centroids: &[Vec<f64>]) -> f64 {
    points
        .iter()
        .zip(assignments)
        .map(|(p, &a)| squared_distance(p, &centroids[a]))
        .sum()
}

fn check_points(points: &[Vec<f64>], k: usize) -> Result<usize> {
    let n = points.len();
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    if k > n {
        return Err(Error::invalid(format!("k = {k} exceeds the {n} points")));
    }
    let dim = points[0].len();
    if let Some(bad) = points.iter().find(|p| p.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: bad.len(),
        });
    }
    if points.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::invalid("points contain a non-finite coordinate"));
    }
    Ok(dim)
}

/// Index drawn with probability proportional to `weights` (uniform when all
/// weights are zero).
fn sample_weighted(weights: &[f64], total: f64, rng: &mut ChaCha8Rng) -> usize {
    let n = weights.len();
    if !(total > 0.0) {
        return rng.gen_range(0..n);
    }
    let target = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        acc += w;
        if acc > target && w > 0.0 {
            return i;
        }
    }
    // rounding left `target` beyond the accumulated sum: take the last
    // positive weight
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(n - 1)
}

/// Greedy k-means++ seeding. The first center is uniform; each later center
/// is the best of `2 + ln k` candidates drawn proportionally to the squared
/// distance from the nearest chosen center, "best" meaning the candidate
/// that leaves the smallest total squared distance (first drawn on ties).
fn kmeans_plus_plus(points: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = points.len();
    let trials = 2 + (k as f64).ln().floor() as usize;
    let mut centers = vec![points[rng.gen_range(0..n)].clone()];
    let mut nearest: Vec<f64> = points
        .iter()
        .map(|p| squared_distance(p, &centers[0]))
        .collect();
    while centers.len() < k {
        let total: f64 = nearest.iter().sum();
        let mut best: Option<(f64, usize, Vec<f64>)> = None;
        for _ in 0..trials {
            let pick = sample_weighted(&nearest, total, rng);
            let updated: Vec<f64> = nearest
                .iter()
                .zip(points)
                .map(|(&d, p)| d.min(squared_distance(p, &points[pick])))
                .collect();
            let potential: f64 = updated.iter().sum();
            if best.as_ref().is_none_or(|(b, _, _)| potential < *b) {
                best = Some((potential, pick, updated));
            }
        }
        let (_, pick, updated) = best.expect("at least one trial");
        centers.push(points[pick].clone());
        nearest = updated;
    }
    centers
}

/// Nearest centroid per point; ties go to the lower cluster index.
fn assign(points: &[Vec<f64>], centroids: &[Vec<f64>]) -> Vec<usize> {
    points
        .iter()
        .map(|p| {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (c, centroid) in centroids.iter().enumerate() {
                let d = squared_distance(p, centroid);
                if d < best_d {
                    best_d = d;
                    best = c;
                }
            }
            best
        })
        .collect()
}

/// Gives every empty cluster the point farthest from its current centroid,
/// taken from a cluster that keeps at least one member.
fn reseed_empty(points: &[Vec<f64>], labels: &mut [usize], centroids: &[Vec<f64>], k: usize) {
    let mut sizes = vec![0usize; k];
    for &l in labels.iter() {
        sizes[l] += 1;
    }
    for empty in 0..k {
        if sizes[empty] > 0 {
            continue;
        }
        let mut far = None;
        let mut far_d = f64::NEG_INFINITY;
        for (i, p) in points.iter().enumerate() {
            if sizes[labels[i]] < 2 {
                continue;
            }
            let d = squared_distance(p, &centroids[labels[i]]);
            if d > far_d {
                far_d = d;
                far = Some(i);
            }
        }
        let i = far.expect("k <= n leaves a cluster with two or more members");
        sizes[labels[i]] -= 1;
        labels[i] = empty;
        sizes[empty] = 1;
    }
}

fn means(points: &[Vec<f64>], labels: &[usize], k: usize, dim: usize) -> Vec<Vec<f64>> {
    let mut sums = vec![vec![0.0; dim]; k];
    let mut counts = vec![0usize; k];
    for (p, &l) in points.iter().zip(labels) {
        counts[l] += 1;
        for (s, x) in sums[l].iter_mut().zip(p) {
            *s += x;
        }
    }
    for (s, &c) in sums.iter_mut().zip(&counts) {
        s.iter_mut().for_each(|v| *v /= c as f64);
    }
    sums
}

/// Lloyd's algorithm from a k-means++ start seeded by `seed`.
///
/// Stops when no centroid moves by `tol` or more, when assignments stop
/// changing, or after `max_iter` updates. Deterministic in `(points, k, seed)`.
pub fn kmeans(points: &[Vec<f64>], k: usize, seed: u64, params: KMeansParams) -> Result<Clustering> {
    if points.is_empty() {
        return Err(Error::invalid("k-means needs at least one point"));
    }
    let dim = check_points(points, k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = kmeans_plus_plus(points, k, &mut rng);
    let mut labels = assign(points, &centroids);
    let mut history = Vec::new();
    let mut iterations = 0;

    for it in 1..=params.max_iter.max(1) {
        reseed_empty(points, &mut labels, &centroids, k);
        let updated = means(points, &labels, k, dim);
        history.push(inertia(points, &labels, &updated));
        let shift = centroids
            .iter()
            .zip(&updated)
            .map(|(a, b)| squared_distance(a, b).sqrt())
            .fold(0.0, f64::max);
        centroids = updated;
        iterations = it;
        if shift < params.tol || it >= params.max_iter {
            break;
        }
        let relabeled = assign(points, &centroids);
        if relabeled == labels {
            break;
        }
        labels = relabeled;
    }

    let inertia = inertia(points, &labels, &centroids);
    Ok(Clustering {
        k,
        assignments: labels,
        centroids,
        inertia,
        iterations,
        seed,
        inertia_history: history,
    })
}

/// Runs `restarts` seeds starting at `seed` and keeps the lowest inertia;
/// ties go to the earlier seed.
pub fn kmeans_best_of(
    points: &[Vec<f64>],
    k: usize,
    seed: u64,
    restarts: usize,
    params: KMeansParams,
) -> Result<Clustering> {
    let mut best: Option<Clustering> = None;
    for r in 0..restarts.max(1) {
        let run = kmeans(points, k, seed.wrapping_add(r as u64), params)?;
        if best.as_ref().is_none_or(|b| run.inertia < b.inertia) {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one restart"))
}

/// Per cluster, the member nearest the centroid (Euclidean); equal distances
/// go to the lexicographically smallest id.
pub fn select_representatives(
    clustering: &Clustering,
    points: &[Vec<f64>],
    ids: &[String],
) -> Result<Vec<String>> {
    if points.len() != clustering.assignments.len() || ids.len() != points.len() {
        return Err(Error::DimensionMismatch {
            expected: clustering.assignments.len(),
            actual: points.len().min(ids.len()),
        });
    }
    (0..clustering.k)
        .map(|c| {
            let centroid = &clustering.centroids[c];
            clustering
                .members(c)
                .map(|i| (squared_distance(&points[i], centroid), &ids[i]))
                .min_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(b.1)))
                .map(|(_, id)| id.clone())
                .ok_or_else(|| Error::invalid(format!("cluster {c} has no members")))
        })
        .collect()
}
