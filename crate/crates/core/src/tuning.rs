//! Selection of window length, bandwidth and quantile level by the best
//! k-medoids clustering of a labeled training split.

use serde::{Deserialize, Serialize};

use crate::baselines::{MeasureSpec, Method, MPDIST_DEFAULT_ALPHA};
use crate::clustering::{clustering_error, pam_kmedoids, ClusteringResult, DistanceMatrix};
use crate::embedding::{Instance, InstanceKind};
use crate::error::{Error, Result};
use crate::pairwise::DistanceCache;

/// Neighbor rank used for the bandwidth scale unless configured otherwise.
pub const DEFAULT_KNN_K: usize = 5;

/// PAM restarts used for every clustering during tuning and testing.
pub const DEFAULT_RESTARTS: usize = 5;

/// Candidate parameters; only the lists a method uses need to be nonempty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuningGrid {
    #[serde(default)]
    pub windows: Vec<usize>,
    #[serde(default)]
    pub sigma_multipliers: Vec<f64>,
    #[serde(default)]
    pub alphas: Vec<f64>,
}

impl TuningGrid {
    /// Default candidates for `method` on data of the given kind.
    pub fn default_for(method: Method, kind: InstanceKind) -> Self {
        let windows = match kind {
            InstanceKind::Field2d { .. } => vec![4, 8, 12],
            _ => vec![5, 10, 25],
        };
        let alphas = vec![0.005, 0.01, 0.02, MPDIST_DEFAULT_ALPHA, 0.10];
        let grid = TuningGrid {
            windows,
            sigma_multipliers: vec![0.25, 0.5, 1.0, 2.0, 4.0],
            alphas,
        };
        grid.restricted(method)
    }

    /// Copy with the lists `method` does not use cleared.
    pub fn restricted(&self, method: Method) -> Self {
        TuningGrid {
            windows: if method.uses_window() { self.windows.clone() } else { Vec::new() },
            sigma_multipliers: if method.uses_sigma() { self.sigma_multipliers.clone() } else { Vec::new() },
            alphas: if method.uses_alpha() { self.alphas.clone() } else { Vec::new() },
        }
    }

    pub fn validate(&self, method: Method) -> Result<()> {
        let need = |used: bool, empty: bool, what: &str| {
            if used && empty {
                Err(Error::Config(format!("{method} needs at least one {what} candidate")))
            } else {
                Ok(())
            }
        };
        need(method.uses_window(), self.windows.is_empty(), "window")?;
        need(method.uses_sigma(), self.sigma_multipliers.is_empty(), "sigma multiplier")?;
        need(method.uses_alpha(), self.alphas.is_empty(), "alpha")?;
        if self.windows.contains(&0) {
            return Err(Error::Config("windows must be at least 1".into()));
        }
        if let Some(m) = self.sigma_multipliers.iter().find(|m| !(**m > 0.0 && m.is_finite())) {
            return Err(Error::Config(format!("sigma multipliers must be positive, got {m}")));
        }
        if let Some(a) = self.alphas.iter().find(|a| !(**a > 0.0 && **a < 1.0)) {
            return Err(Error::Config(format!("alphas must lie in (0, 1), got {a}")));
        }
        Ok(())
    }
}

fn sorted<T: Copy + PartialOrd>(values: &[T]) -> Vec<T> {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("validated finite"));
    v.dedup();
    v
}

/// Bandwidths `multiplier × scale`, where the scale is the mean over all
/// training pairs of the k-NN distance scale of their pooled embedding, or 1
/// when that mean is zero.
pub fn sigma_grid(train: &[Instance], window: usize, multipliers: &[f64], k: usize) -> Result<Vec<f64>> {
    let mut cache = DistanceCache::new(train, k)?;
    let idx: Vec<usize> = (0..train.len()).collect();
    sigma_grid_cached(&mut cache, &idx, window, multipliers)
}

pub fn sigma_grid_cached(cache: &mut DistanceCache, train: &[usize], window: usize, multipliers: &[f64]) -> Result<Vec<f64>> {
    if let Some(m) = multipliers.iter().find(|m| !(**m > 0.0 && m.is_finite())) {
        return Err(Error::domain(format!("sigma multipliers must be positive, got {m}")));
    }
    if train.len() < 2 {
        return Err(Error::domain("sigma grid needs at least one training pair"));
    }
    let mut total = 0.0;
    let mut pairs = 0usize;
    for a in 0..train.len() {
        for b in a + 1..train.len() {
            total += cache.knn_scale(window, train[a], train[b])?;
            pairs += 1;
        }
    }
    let scale = total / pairs as f64;
    let scale = if scale > 0.0 { scale } else { 1.0 };
    Ok(multipliers.iter().map(|m| m * scale).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuningResult {
    pub best_spec: MeasureSpec,
    pub train_errors: usize,
    /// Every evaluated combination with its training error, in search order.
    pub evaluated: Vec<(MeasureSpec, usize)>,
    /// Clustering of the training subset under `best_spec`.
    pub clustering: ClusteringResult,
}

fn labels_of(instances: &[Instance], subset: &[usize]) -> Result<Vec<u32>> {
    let labels = subset
        .iter()
        .map(|&i| {
            instances[i]
                .label
                .ok_or_else(|| Error::Validation(format!("instance {} has no label", instances[i].id)))
        })
        .collect::<Result<Vec<_>>>()?;
    if labels.len() < 2 || labels.iter().all(|&l| l == labels[0]) {
        return Err(Error::DegenerateSplit("training split needs both classes".into()));
    }
    Ok(labels)
}

struct Search {
    labels: Vec<u32>,
    seed: u64,
    restarts: usize,
    best: Option<(MeasureSpec, usize, ClusteringResult)>,
    evaluated: Vec<(MeasureSpec, usize)>,
}

impl Search {
    fn score(&mut self, spec: MeasureSpec, d: &DistanceMatrix) -> Result<()> {
        let clustering = pam_kmedoids(d, 2, self.seed, self.restarts)?;
        let errors = clustering_error(&clustering.assignments, &self.labels)?;
        self.evaluated.push((spec, errors));
        if self.best.as_ref().is_none_or(|b| errors < b.1) {
            self.best = Some((spec, errors, clustering));
        }
        Ok(())
    }
}

/// Exhaustive search over `grid` for the training instances (all of which
/// must be labeled), clustering with k = 2.
pub fn grid_search(train: &[Instance], method: Method, grid: &TuningGrid, seed: u64) -> Result<TuningResult> {
    let mut cache = DistanceCache::new(train, DEFAULT_KNN_K)?;
    let idx: Vec<usize> = (0..train.len()).collect();
    grid_search_cached(&mut cache, &idx, method, grid, seed, DEFAULT_RESTARTS)
}

/// [`grid_search`] over a subset of the instances held by `cache`.
///
/// Combinations are visited by increasing window, then bandwidth, then
/// alpha, and only a strictly smaller error replaces the incumbent.
pub fn grid_search_cached(
    cache: &mut DistanceCache,
    train: &[usize],
    method: Method,
    grid: &TuningGrid,
    seed: u64,
    restarts: usize,
) -> Result<TuningResult> {
    grid.validate(method)?;
    let labels = labels_of(cache.instances(), train)?;
    let ids: Vec<String> = train.iter().map(|&i| cache.instances()[i].id.clone()).collect();
    let mut search = Search {
        labels,
        seed,
        restarts,
        best: None,
        evaluated: Vec::new(),
    };
    let alphas = sorted(&grid.alphas);
    match method {
        Method::Dtw => {
            let d = cache.matrix(train, &MeasureSpec::Dtw)?;
            search.score(MeasureSpec::Dtw, &d)?;
        }
        Method::Mpdist => {
            for window in sorted(&grid.windows) {
                for &alpha in &alphas {
                    let spec = MeasureSpec::Mpdist { window, alpha };
                    let d = cache.matrix(train, &spec)?;
                    search.score(spec, &d)?;
                }
            }
        }
        Method::Kdiff | Method::Mmd => {
            for window in sorted(&grid.windows) {
                let sigmas = sorted(&sigma_grid_cached(cache, train, window, &grid.sigma_multipliers)?);
                let block = cache.kernel_block(window, train, &sigmas)?;
                for (s, &sigma) in sigmas.iter().enumerate() {
                    if method == Method::Mmd {
                        let d = block.matrix(ids.clone(), |p| Ok(p.mmd2), s)?;
                        search.score(MeasureSpec::Mmd { window, sigma }, &d)?;
                        continue;
                    }
                    for &alpha in &alphas {
                        let d = block.matrix(ids.clone(), |p| p.kdiff_squared(alpha), s)?;
                        search.score(MeasureSpec::Kdiff { window, sigma, alpha }, &d)?;
                    }
                }
            }
        }
    }
    let (best_spec, train_errors, clustering) = search.best.ok_or_else(|| Error::Config("empty tuning grid".into()))?;
    Ok(TuningResult {
        best_spec,
        train_errors,
        evaluated: search.evaluated,
        clustering,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(id: &str, label: u32, level: f64, bump: f64) -> Instance {
        let v = (0..60)
            .map(|t| (t as f64 * 0.7).sin() + if t < 10 { bump } else { level })
            .collect();
        Instance::univariate(id, v).unwrap().with_label(label)
    }

    fn data() -> Vec<Instance> {
        vec![
            series("a0", 0, 0.0, 5.0),
            series("a1", 0, 30.0, 5.0),
            series("a2", 0, 60.0, 5.0),
            series("b0", 1, 10.0, -5.0),
            series("b1", 1, 40.0, -5.0),
            series("b2", 1, 70.0, -5.0),
        ]
    }

    #[test]
    fn sigma_grid_scales_multipliers() {
        let d = data();
        let base = sigma_grid(&d, 5, &[1.0], 3).unwrap()[0];
        let g = sigma_grid(&d, 5, &[0.5, 1.0, 2.0], 3).unwrap();
        assert_eq!(g, vec![0.5 * base, base, 2.0 * base]);
        assert!(sigma_grid(&d[..1], 5, &[1.0], 3).is_err());
        assert!(sigma_grid(&d, 5, &[0.0], 3).is_err());
    }

    #[test]
    fn constant_series_fall_back_to_unit_scale() {
        let flat: Vec<Instance> = (0..3)
            .map(|i| Instance::univariate(format!("c{i}"), vec![2.0; 30]).unwrap())
            .collect();
        assert_eq!(sigma_grid(&flat, 5, &[0.5, 1.0, 2.0], 5).unwrap(), vec![0.5, 1.0, 2.0]);
    }

    #[test]
    fn single_combination_is_returned() {
        let grid = TuningGrid {
            windows: vec![5],
            sigma_multipliers: vec![1.0],
            alphas: vec![0.1],
        };
        let r = grid_search(&data(), Method::Kdiff, &grid, 1).unwrap();
        assert_eq!(r.evaluated.len(), 1);
        assert_eq!(r.best_spec, r.evaluated[0].0);
        assert_eq!(r.best_spec.window(), Some(5));
    }

    #[test]
    fn kdiff_separates_shared_background_toy() {
        let grid = TuningGrid::default_for(Method::Kdiff, InstanceKind::Univariate);
        let grid = TuningGrid {
            windows: vec![5, 10],
            ..grid
        };
        let r = grid_search(&data(), Method::Kdiff, &grid, 1).unwrap();
        assert_eq!(r.train_errors, 0);
        assert_eq!(r.evaluated.len(), 2 * 5 * 5);
        assert!(r.evaluated.iter().all(|(_, e)| *e >= r.train_errors));
    }

    #[test]
    fn dtw_and_mpdist_search() {
        let r = grid_search(&data(), Method::Dtw, &TuningGrid::default_for(Method::Dtw, InstanceKind::Univariate), 0).unwrap();
        assert_eq!(r.evaluated.len(), 1);
        let grid = TuningGrid {
            windows: vec![5],
            sigma_multipliers: vec![],
            alphas: vec![0.05, 0.5],
        };
        let r = grid_search(&data(), Method::Mpdist, &grid, 0).unwrap();
        assert_eq!(r.evaluated.len(), 2);
    }

    #[test]
    fn rejects_bad_splits_and_grids() {
        let d = data();
        let grid = TuningGrid::default_for(Method::Mpdist, InstanceKind::Univariate);
        assert!(matches!(grid_search(&d[..3], Method::Mpdist, &grid, 0), Err(Error::DegenerateSplit(_))));
        let empty = TuningGrid {
            windows: vec![],
            sigma_multipliers: vec![1.0],
            alphas: vec![0.1],
        };
        assert!(matches!(grid_search(&d, Method::Kdiff, &empty, 0), Err(Error::Config(_))));
    }
}
