//! Pairwise squared distance matrices, plus a dataset-level cache that lets
//! parameter searches reuse embeddings, neighbor statistics and DTW costs.

use std::collections::HashMap;
use std::sync::Arc;

use crate::baselines::{dtw, mmd2, mmd2_from_totals, mpdist, mpdist_rank, MeasureSpec};
use crate::clustering::DistanceMatrix;
use crate::embedding::{embed, EmbeddingCloud, Instance};
use crate::error::{Error, Result};
use crate::kernels::{cross_kernel_sums, cross_neighbors, kth_of_union, self_kernel_sums, self_neighbors, KernelSpec, Nearest};
use crate::witness::{kdiff_squared, pooled_witness, SortedMagnitudes};

fn check_homogeneous(instances: &[Instance]) -> Result<()> {
    if let Some(first) = instances.first() {
        let kind = first.kind();
        if let Some(other) = instances.iter().find(|i| i.kind() != kind) {
            return Err(Error::Validation(format!(
                "instance {} is {:?} but {} is {:?}",
                other.id,
                other.kind(),
                first.id,
                kind
            )));
        }
    }
    Ok(())
}

/// Squared distance between two instances under `spec`: kdiff², MMD², MPdist
/// (already a squared distance) or the squared DTW cost.
pub fn pair_distance(a: &Instance, b: &Instance, spec: &MeasureSpec) -> Result<f64> {
    spec.validate()?;
    match *spec {
        MeasureSpec::Kdiff { window, sigma, alpha } => {
            kdiff_squared(&KernelSpec::gaussian(sigma)?, &embed(a, window)?, &embed(b, window)?, alpha)
        }
        MeasureSpec::Mmd { window, sigma } => mmd2(&KernelSpec::gaussian(sigma)?, &embed(a, window)?, &embed(b, window)?),
        MeasureSpec::Mpdist { window, alpha } => mpdist(&embed(a, window)?, &embed(b, window)?, alpha),
        MeasureSpec::Dtw => dtw(a, b).map(|d| d * d),
    }
}

/// Matrix of [`pair_distance`] over all unordered pairs.
pub fn pairwise_matrix(instances: &[Instance], spec: &MeasureSpec) -> Result<DistanceMatrix> {
    check_homogeneous(instances)?;
    let ids = instances.iter().map(|i| i.id.clone()).collect();
    DistanceMatrix::from_pairs(ids, |i, j| pair_distance(&instances[i], &instances[j], spec))
}

/// Kernel statistics of one instance pair for one bandwidth.
#[derive(Debug, Clone)]
pub struct KernelPairStats {
    /// Squared witness magnitudes on the pooled cloud, ascending.
    pub squared_witness: SortedMagnitudes,
    pub mmd2: f64,
}

impl KernelPairStats {
    pub fn kdiff_squared(&self, alpha: f64) -> Result<f64> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::domain(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        self.squared_witness.quantile(alpha)
    }
}

fn kernel_pair_stats(
    specs: &[KernelSpec],
    x: &EmbeddingCloud,
    y: &EmbeddingCloud,
    self_x: &[Vec<f64>],
    self_y: &[Vec<f64>],
) -> Result<Vec<KernelPairStats>> {
    let (rows, cols) = cross_kernel_sums(specs, x, y)?;
    (0..specs.len())
        .map(|s| {
            let u = pooled_witness(&self_x[s], &self_y[s], &rows[s], &cols[s]);
            let squares: Vec<f64> = u.iter().map(|u| u.abs() * u.abs()).collect();
            let (sx, sy): (f64, f64) = (self_x[s].iter().sum(), self_y[s].iter().sum());
            let c: f64 = rows[s].iter().sum();
            Ok(KernelPairStats {
                squared_witness: SortedMagnitudes::new(&squares)?,
                mmd2: mmd2_from_totals(sx, sy, c, x.len(), y.len()),
            })
        })
        .collect()
}

/// Kernel statistics for every unordered pair of a subset, for a list of
/// bandwidths, computed in one pass per pair.
#[derive(Debug, Clone)]
pub struct KernelBlock {
    sigmas: Vec<f64>,
    n: usize,
    /// Indexed by `pair_slot(a, b)` then by bandwidth.
    stats: Vec<Vec<KernelPairStats>>,
}

impl KernelBlock {
    fn slot(&self, a: usize, b: usize) -> usize {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        a * self.n - a * (a + 1) / 2 + (b - a - 1)
    }

    pub fn sigmas(&self) -> &[f64] {
        &self.sigmas
    }

    /// Statistics of subset positions `a != b` under bandwidth `sigmas[s]`.
    pub fn get(&self, a: usize, b: usize, s: usize) -> &KernelPairStats {
        &self.stats[self.slot(a, b)][s]
    }

    /// Distance matrix over the subset from a per-pair statistic.
    pub fn matrix(&self, ids: Vec<String>, f: impl Fn(&KernelPairStats) -> Result<f64>, s: usize) -> Result<DistanceMatrix> {
        DistanceMatrix::from_pairs(ids, |a, b| f(self.get(a, b, s)))
    }
}

#[derive(Debug, Clone)]
struct PairNeighbors {
    knn_scale: f64,
    nn_sorted: Vec<f64>,
}

#[derive(Debug)]
struct WindowData {
    clouds: Vec<EmbeddingCloud>,
    self_nn: Vec<Vec<Nearest>>,
    pairs: HashMap<(usize, usize), PairNeighbors>,
}

/// Memoizes per-window embeddings and neighbor statistics, and DTW costs, for
/// a fixed set of instances. Every value equals the corresponding direct call
/// bit for bit; only the work is shared.
#[derive(Debug)]
pub struct DistanceCache<'a> {
    instances: &'a [Instance],
    knn_k: usize,
    windows: HashMap<usize, WindowData>,
    dtw: HashMap<(usize, usize), f64>,
    /// Kernel blocks of the most recent subset, keyed by window and bandwidths.
    blocks: Option<(Vec<usize>, HashMap<(usize, Vec<u64>), Arc<KernelBlock>>)>,
}

impl<'a> DistanceCache<'a> {
    pub fn new(instances: &'a [Instance], knn_k: usize) -> Result<Self> {
        check_homogeneous(instances)?;
        if knn_k == 0 {
            return Err(Error::domain("k must be at least 1"));
        }
        Ok(Self {
            instances,
            knn_k,
            windows: HashMap::new(),
            dtw: HashMap::new(),
            blocks: None,
        })
    }

    pub fn instances(&self) -> &'a [Instance] {
        self.instances
    }

    pub fn knn_k(&self) -> usize {
        self.knn_k
    }

    fn window(&mut self, window: usize) -> Result<&mut WindowData> {
        if !self.windows.contains_key(&window) {
            let clouds = self.instances.iter().map(|i| embed(i, window)).collect::<Result<Vec<_>>>()?;
            let self_nn = clouds.iter().map(|c| self_neighbors(c, self.knn_k)).collect();
            self.windows.insert(
                window,
                WindowData {
                    clouds,
                    self_nn,
                    pairs: HashMap::new(),
                },
            );
        }
        Ok(self.windows.get_mut(&window).expect("inserted above"))
    }

    pub fn cloud(&mut self, window: usize, i: usize) -> Result<&EmbeddingCloud> {
        Ok(&self.window(window)?.clouds[i])
    }

    fn neighbors(&mut self, window: usize, i: usize, j: usize) -> Result<&PairNeighbors> {
        let k = self.knn_k;
        let data = self.window(window)?;
        let key = (i.min(j), i.max(j));
        if !data.pairs.contains_key(&key) {
            let (x, y) = (&data.clouds[key.0], &data.clouds[key.1]);
            if x.dim() != y.dim() {
                return Err(Error::Shape {
                    expected: x.dim(),
                    found: y.dim(),
                });
            }
            let pooled = x.len() + y.len();
            if k >= pooled {
                return Err(Error::InsufficientPoints { k, points: pooled });
            }
            let (rows, cols) = cross_neighbors(x, y, k);
            let (sx, sy) = (&data.self_nn[key.0], &data.self_nn[key.1]);
            let total: f64 = sx
                .iter()
                .zip(&rows)
                .chain(sy.iter().zip(&cols))
                .map(|(own, cross)| kth_of_union(own.values(), cross.values(), k).sqrt())
                .sum();
            let mut nn_sorted: Vec<f64> = rows.iter().chain(&cols).map(Nearest::min).collect();
            nn_sorted.sort_by(f64::total_cmp);
            data.pairs.insert(
                key,
                PairNeighbors {
                    knn_scale: total / pooled as f64,
                    nn_sorted,
                },
            );
        }
        Ok(&data.pairs[&key])
    }

    /// `knn_distance_scale` of the pooled embedding of instances `i` and `j`.
    pub fn knn_scale(&mut self, window: usize, i: usize, j: usize) -> Result<f64> {
        Ok(self.neighbors(window, i, j)?.knn_scale)
    }

    pub fn mpdist(&mut self, window: usize, i: usize, j: usize, alpha: f64) -> Result<f64> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::domain(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        let d2 = &self.neighbors(window, i, j)?.nn_sorted;
        Ok(d2[mpdist_rank(alpha, d2.len()) - 1])
    }

    /// Unsquared DTW cost.
    pub fn dtw(&mut self, i: usize, j: usize) -> Result<f64> {
        let key = (i.min(j), i.max(j));
        if let Some(&d) = self.dtw.get(&key) {
            return Ok(d);
        }
        let d = dtw(&self.instances[key.0], &self.instances[key.1])?;
        self.dtw.insert(key, d);
        Ok(d)
    }

    /// Kernel statistics over all pairs of `subset` for each bandwidth.
    ///
    /// Blocks for the most recently requested subset are kept, so methods
    /// sharing a subset and bandwidths share one kernel pass.
    pub fn kernel_block(&mut self, window: usize, subset: &[usize], sigmas: &[f64]) -> Result<Arc<KernelBlock>> {
        let key = (window, sigmas.iter().map(|s| s.to_bits()).collect::<Vec<_>>());
        if let Some((cached, map)) = &self.blocks {
            if cached == subset {
                if let Some(block) = map.get(&key) {
                    return Ok(Arc::clone(block));
                }
            }
        }
        let block = Arc::new(self.compute_block(window, subset, sigmas)?);
        if subset.len() > 2 {
            match &mut self.blocks {
                Some((cached, map)) if cached == subset => {
                    map.insert(key, Arc::clone(&block));
                }
                slot => *slot = Some((subset.to_vec(), HashMap::from([(key, Arc::clone(&block))]))),
            }
        }
        Ok(block)
    }

    fn compute_block(&mut self, window: usize, subset: &[usize], sigmas: &[f64]) -> Result<KernelBlock> {
        let specs = sigmas.iter().map(|&s| KernelSpec::gaussian(s)).collect::<Result<Vec<_>>>()?;
        let data = self.window(window)?;
        let selfs: Vec<Vec<Vec<f64>>> = subset.iter().map(|&i| self_kernel_sums(&specs, &data.clouds[i])).collect();
        let n = subset.len();
        let mut stats = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for a in 0..n {
            for b in a + 1..n {
                let (x, y) = (&data.clouds[subset[a]], &data.clouds[subset[b]]);
                stats.push(kernel_pair_stats(&specs, x, y, &selfs[a], &selfs[b])?);
            }
        }
        Ok(KernelBlock {
            sigmas: sigmas.to_vec(),
            n,
            stats,
        })
    }

    /// Squared distance between instances `i` and `j`, equal to
    /// [`pair_distance`].
    pub fn distance(&mut self, i: usize, j: usize, spec: &MeasureSpec) -> Result<f64> {
        spec.validate()?;
        if i == j {
            return Ok(0.0);
        }
        match *spec {
            MeasureSpec::Kdiff { window, sigma, alpha } => {
                let block = self.kernel_block(window, &[i, j], &[sigma])?;
                block.get(0, 1, 0).kdiff_squared(alpha)
            }
            MeasureSpec::Mmd { window, sigma } => Ok(self.kernel_block(window, &[i, j], &[sigma])?.get(0, 1, 0).mmd2),
            MeasureSpec::Mpdist { window, alpha } => self.mpdist(window, i, j, alpha),
            MeasureSpec::Dtw => self.dtw(i, j).map(|d| d * d),
        }
    }

    /// Distance matrix over a subset of the cached instances.
    pub fn matrix(&mut self, subset: &[usize], spec: &MeasureSpec) -> Result<DistanceMatrix> {
        let ids = subset.iter().map(|&i| self.instances[i].id.clone()).collect();
        match *spec {
            MeasureSpec::Kdiff { window, sigma, alpha } => {
                let block = self.kernel_block(window, subset, &[sigma])?;
                block.matrix(ids, |s| s.kdiff_squared(alpha), 0)
            }
            MeasureSpec::Mmd { window, sigma } => {
                let block = self.kernel_block(window, subset, &[sigma])?;
                block.matrix(ids, |s| Ok(s.mmd2), 0)
            }
            _ => DistanceMatrix::from_pairs(ids, |a, b| self.distance(subset[a], subset[b], spec)),
        }
    }
}
