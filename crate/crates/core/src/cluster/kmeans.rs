//! One-dimensional k-means: k-means++ seeding, Lloyd iterations, best of
//! several restarts by within-cluster sum of squares.
//!
//! Input values are collapsed to sorted distinct values with multiplicities,
//! so replicating the whole multiset (e.g. pooling two speakers with identical
//! normalised distributions) yields bit-identical centroids.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KMeansConfig {
    pub restarts: usize,
    pub max_iter: usize,
    /// Stop once no centroid moves further than this.
    pub tol: f64,
    pub seed: u64,
}

impl Default for KMeansConfig {
    fn default() -> Self {
        Self {
            restarts: 10,
            max_iter: 300,
            tol: 1e-10,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeans {
    /// Strictly ascending.
    pub centroids: Vec<f64>,
    pub wcss: f64,
    pub iterations: usize,
}

/// Sorted distinct values and their multiplicities.
#[derive(Debug, Clone)]
pub(crate) struct Weighted {
    pub values: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Weighted {
    pub fn new(values: &[f64]) -> Self {
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mut out = Weighted {
            values: Vec::new(),
            weights: Vec::new(),
        };
        for v in sorted {
            match out.values.last() {
                Some(&last) if last == v => *out.weights.last_mut().unwrap() += 1.0,
                _ => {
                    out.values.push(v);
                    out.weights.push(1.0);
                }
            }
        }
        out
    }
}

/// Index of the nearest centroid in an ascending list; equidistant values go
/// to the lower index.
pub fn nearest(centroids: &[f64], v: f64) -> usize {
    let j = centroids.partition_point(|&c| c < v);
    if j == 0 {
        0
    } else if j == centroids.len() || v - centroids[j - 1] <= centroids[j] - v {
        j - 1
    } else {
        j
    }
}

pub fn kmeans_1d(values: &[f64], k: usize, cfg: &KMeansConfig) -> Result<KMeans> {
    if k == 0 {
        return Err(Error::Config("k must be at least 1".into()));
    }
    if cfg.restarts == 0 || cfg.max_iter == 0 {
        return Err(Error::Config(
            "restarts and max_iter must be positive".into(),
        ));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Config("non-finite value in k-means input".into()));
    }
    if values.len() < k {
        return Err(Error::InsufficientData {
            what: "values",
            needed: k,
            got: values.len(),
        });
    }
    let data = Weighted::new(values);
    if data.values.len() < k {
        return Err(Error::InsufficientData {
            what: "distinct values",
            needed: k,
            got: data.values.len(),
        });
    }

    let runs = par::map_range(cfg.restarts, |r| lloyd(&data, k, cfg, r as u64, None));
    // strict `<` keeps the lowest restart index on ties
    let mut best = runs[0].clone();
    for run in runs.into_iter().skip(1) {
        if run.wcss < best.wcss {
            best = run;
        }
    }
    Ok(best)
}

fn restart_rng(seed: u64, restart: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart);
    rng
}

/// Index drawn with probability proportional to `weights`.
fn draw(rng: &mut ChaCha8Rng, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    let target = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w <= 0.0 {
            continue;
        }
        acc += w;
        last_positive = i;
        if acc > target {
            return i;
        }
    }
    last_positive
}

fn seed_plus_plus(data: &Weighted, k: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let first = data.values[draw(rng, &data.weights)];
    let mut centroids = vec![first];
    let mut d2: Vec<f64> = data
        .values
        .iter()
        .map(|v| (v - first) * (v - first))
        .collect();
    while centroids.len() < k {
        let scores: Vec<f64> = d2.iter().zip(&data.weights).map(|(d, w)| d * w).collect();
        let c = data.values[draw(rng, &scores)];
        centroids.push(c);
        for (d, v) in d2.iter_mut().zip(&data.values) {
            *d = d.min((v - c) * (v - c));
        }
    }
    centroids.sort_by(f64::total_cmp);
    centroids
}

fn assign(data: &Weighted, centroids: &[f64]) -> Vec<usize> {
    data.values.iter().map(|&v| nearest(centroids, v)).collect()
}

pub(crate) fn wcss(data: &Weighted, centroids: &[f64], labels: &[usize]) -> f64 {
    data.values
        .iter()
        .zip(&data.weights)
        .zip(labels)
        .map(|((v, w), &l)| w * (v - centroids[l]) * (v - centroids[l]))
        .sum()
}

/// Cluster means; each empty cluster takes over the value farthest from its
/// own cluster's mean.
fn update(data: &Weighted, k: usize, labels: &mut [usize]) -> Vec<f64> {
    let mut sum = vec![0.0; k];
    let mut weight = vec![0.0; k];
    for ((v, w), &l) in data.values.iter().zip(&data.weights).zip(labels.iter()) {
        sum[l] += w * v;
        weight[l] += w;
    }
    let mean = |sum: &[f64], weight: &[f64], j: usize| sum[j] / weight[j];
    while let Some(empty) = weight.iter().position(|&w| w == 0.0) {
        let mut far: Option<(usize, f64)> = None;
        for (i, &v) in data.values.iter().enumerate() {
            let l = labels[i];
            if weight[l] <= data.weights[i] {
                // sole member of its cluster
                continue;
            }
            let d = (v - mean(&sum, &weight, l)).abs();
            if far.is_none_or(|(_, best)| d > best) {
                far = Some((i, d));
            }
        }
        let Some((i, _)) = far else { break };
        let (v, w, old) = (data.values[i], data.weights[i], labels[i]);
        sum[old] -= w * v;
        weight[old] -= w;
        sum[empty] = w * v;
        weight[empty] = w;
        labels[i] = empty;
    }
    (0..k)
        .map(|j| {
            if weight[j] > 0.0 {
                mean(&sum, &weight, j)
            } else {
                f64::NAN
            }
        })
        .collect()
}

/// One seeded Lloyd run. `history`, when given, receives the WCSS of each
/// assignment step.
pub(crate) fn lloyd(
    data: &Weighted,
    k: usize,
    cfg: &KMeansConfig,
    restart: u64,
    mut history: Option<&mut Vec<f64>>,
) -> KMeans {
    let mut rng = restart_rng(cfg.seed, restart);
    let mut centroids = seed_plus_plus(data, k, &mut rng);
    let mut prev: Option<Vec<usize>> = None;
    let mut iterations = 0;

    while iterations < cfg.max_iter {
        iterations += 1;
        let mut labels = assign(data, &centroids);
        if let Some(h) = history.as_deref_mut() {
            h.push(wcss(data, &centroids, &labels));
        }
        if prev.as_ref() == Some(&labels) {
            break;
        }
        let means = update(data, k, &mut labels);
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| means[a].total_cmp(&means[b]));
        let mut rank = vec![0; k];
        for (r, &j) in order.iter().enumerate() {
            rank[j] = r;
        }
        let next: Vec<f64> = order.iter().map(|&j| means[j]).collect();
        let moved = next
            .iter()
            .zip(&centroids)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        centroids = next;
        prev = Some(labels.iter().map(|&l| rank[l]).collect());
        if moved <= cfg.tol {
            break;
        }
    }

    let labels = assign(data, &centroids);
    KMeans {
        wcss: wcss(data, &centroids, &labels),
        centroids,
        iterations,
    }
}
