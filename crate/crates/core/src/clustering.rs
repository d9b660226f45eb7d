//! k-medoids (PAM) over precomputed distances, permutation-invariant error
//! counting, and the two-sample Kolmogorov–Smirnov statistic.

use std::collections::BTreeMap;

use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::stream_rng;

/// Symmetric, zero-diagonal, nonnegative matrix of pairwise distances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceMatrix {
    ids: Vec<String>,
    values: Vec<f64>,
}

impl DistanceMatrix {
    /// Validates and wraps a row-major `N × N` matrix.
    pub fn new(ids: Vec<String>, values: Vec<f64>) -> Result<Self> {
        let n = ids.len();
        if values.len() != n * n {
            return Err(Error::Shape {
                expected: n * n,
                found: values.len(),
            });
        }
        for i in 0..n {
            if values[i * n + i] != 0.0 {
                return Err(Error::Validation(format!("nonzero diagonal at {i}")));
            }
            for j in 0..n {
                let (a, b) = (values[i * n + j], values[j * n + i]);
                if !a.is_finite() || a < 0.0 {
                    return Err(Error::Validation(format!("entry ({i}, {j}) = {a} is not a finite nonnegative distance")));
                }
                if (a - b).abs() > 1e-12 * a.abs().max(b.abs()).max(1.0) {
                    return Err(Error::Validation(format!("asymmetric entries at ({i}, {j}): {a} vs {b}")));
                }
            }
        }
        Ok(Self { ids, values })
    }

    /// Builds a matrix from a function on unordered pairs `i < j`.
    pub fn from_pairs(ids: Vec<String>, mut dist: impl FnMut(usize, usize) -> Result<f64>) -> Result<Self> {
        let n = ids.len();
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let d = dist(i, j)?;
                values[i * n + j] = d;
                values[j * n + i] = d;
            }
        }
        Self::new(ids, values)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.ids.len() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.ids.len();
        &self.values[i * n..(i + 1) * n]
    }

    /// Restriction to the listed indices, in the given order.
    pub fn submatrix(&self, idx: &[usize]) -> DistanceMatrix {
        let ids = idx.iter().map(|&i| self.ids[i].clone()).collect();
        let mut values = Vec::with_capacity(idx.len() * idx.len());
        for &i in idx {
            for &j in idx {
                values.push(self.get(i, j));
            }
        }
        DistanceMatrix { ids, values }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusteringResult {
    /// Cluster id per point; cluster `c` is the one whose medoid is `medoids[c]`.
    pub assignments: Vec<usize>,
    /// Medoid indices, ascending.
    pub medoids: Vec<usize>,
    pub total_cost: f64,
}

/// Index of the nearest medoid; ties go to the lowest index in `medoids`.
fn nearest(d: &DistanceMatrix, i: usize, medoids: &[usize]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, &m) in medoids.iter().enumerate() {
        let v = d.get(i, m);
        if v < best.1 {
            best = (c, v);
        }
    }
    best
}

fn total_cost(d: &DistanceMatrix, medoids: &[usize]) -> f64 {
    (0..d.len()).map(|i| nearest(d, i, medoids).1).sum()
}

/// Greedy BUILD initialization.
fn build(d: &DistanceMatrix, k: usize) -> Vec<usize> {
    let n = d.len();
    let mut medoids: Vec<usize> = Vec::with_capacity(k);
    let mut current = vec![f64::INFINITY; n];
    for _ in 0..k {
        let mut best: Option<(usize, f64)> = None;
        for cand in 0..n {
            if medoids.contains(&cand) {
                continue;
            }
            let cost: f64 = (0..n).map(|i| current[i].min(d.get(i, cand))).sum();
            if best.is_none_or(|(_, c)| cost < c) {
                best = Some((cand, cost));
            }
        }
        let (m, _) = best.expect("k <= n leaves a candidate");
        medoids.push(m);
        for (i, c) in current.iter_mut().enumerate() {
            *c = c.min(d.get(i, m));
        }
    }
    medoids.sort_unstable();
    medoids
}

/// Steepest-descent SWAP until no exchange strictly lowers the cost.
fn swap(d: &DistanceMatrix, mut medoids: Vec<usize>) -> (Vec<usize>, f64) {
    let n = d.len();
    let mut cost = total_cost(d, &medoids);
    loop {
        let mut best: Option<(Vec<usize>, f64)> = None;
        for slot in 0..medoids.len() {
            for h in 0..n {
                if medoids.contains(&h) {
                    continue;
                }
                let mut trial = medoids.clone();
                trial[slot] = h;
                trial.sort_unstable();
                let c = total_cost(d, &trial);
                if c < best.as_ref().map_or(cost, |b| b.1) {
                    best = Some((trial, c));
                }
            }
        }
        match best {
            Some((m, c)) => {
                medoids = m;
                cost = c;
            }
            None => return (medoids, cost),
        }
    }
}

fn assign(d: &DistanceMatrix, medoids: &[usize]) -> Vec<usize> {
    (0..d.len())
        .map(|i| match medoids.iter().position(|&m| m == i) {
            Some(c) => c,
            None => nearest(d, i, medoids).0,
        })
        .collect()
}

/// PAM k-medoids: BUILD + SWAP on the first restart, SWAP from seeded random
/// medoid sets on the others; the cheapest result wins (earliest on ties).
pub fn pam_kmedoids(d: &DistanceMatrix, k: usize, seed: u64, restarts: usize) -> Result<ClusteringResult> {
    let n = d.len();
    if k == 0 || k > n {
        return Err(Error::domain(format!("need 1 <= k <= N, got k = {k}, N = {n}")));
    }
    let mut best: Option<(Vec<usize>, f64)> = None;
    for r in 0..restarts.max(1) {
        let init = if r == 0 {
            build(d, k)
        } else {
            let mut rng = stream_rng(seed, r as u64);
            let mut m = sample(&mut rng, n, k).into_vec();
            m.sort_unstable();
            m
        };
        let (m, c) = swap(d, init);
        if best.as_ref().is_none_or(|b| c < b.1) {
            best = Some((m, c));
        }
    }
    let (medoids, total_cost) = best.expect("at least one restart");
    Ok(ClusteringResult {
        assignments: assign(d, &medoids),
        medoids,
        total_cost,
    })
}

/// Assigns each row of `to_medoids` (distances from one point to every
/// medoid) to its nearest medoid, ties toward the lower medoid position.
pub fn assign_to_medoids(to_medoids: &[Vec<f64>]) -> Vec<usize> {
    to_medoids
        .iter()
        .map(|row| {
            let mut best = (0, f64::INFINITY);
            for (c, &v) in row.iter().enumerate() {
                if v < best.1 {
                    best = (c, v);
                }
            }
            best.0
        })
        .collect()
}

/// Maps each distinct value to its rank among the distinct values.
fn dense_ids<T: Ord + Copy>(values: &[T]) -> BTreeMap<T, usize> {
    let mut map: BTreeMap<T, usize> = values.iter().map(|&v| (v, 0)).collect();
    for (i, slot) in map.values_mut().enumerate() {
        *slot = i;
    }
    map
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}

/// Mismatches between clusters and classes under the best one-to-one
/// relabeling of cluster ids.
pub fn clustering_error(assignments: &[usize], labels: &[u32]) -> Result<usize> {
    if assignments.len() != labels.len() {
        return Err(Error::Shape {
            expected: labels.len(),
            found: assignments.len(),
        });
    }
    let classes = dense_ids(labels);
    let clusters = dense_ids(assignments);
    let k = classes.len().max(clusters.len());
    if k > 8 {
        return Err(Error::domain("clustering_error supports at most 8 clusters"));
    }
    Ok(permutations(k)
        .iter()
        .map(|perm| {
            assignments
                .iter()
                .zip(labels)
                .filter(|(a, l)| perm[clusters[a]] != classes[l])
                .count()
        })
        .min()
        .unwrap_or(0))
}

/// `sup_t |F_A(t) - F_B(t)|` of the two empirical CDFs.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::domain("KS statistic needs two nonempty samples"));
    }
    if a.iter().chain(b).any(|v| v.is_nan()) {
        return Err(Error::domain("KS statistic of NaN samples"));
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut sup: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let t = a[i].min(b[j]);
        while i < a.len() && a[i] <= t {
            i += 1;
        }
        while j < b.len() && b[j] <= t {
            j += 1;
        }
        sup = sup.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(sup)
}
