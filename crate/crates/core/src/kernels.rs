//! Positive kernels on `R^L` and the block evaluations built on them.
//!
//! Block routines ([`cross_kernel_sums`], [`self_kernel_sums`], the neighbor
//! searches) are the one place where pairwise squared distances are formed.
//! Everything downstream (witness profiles, MMD, MPdist, k-NN scales) goes
//! through them, so two routes to the same statistic see bit-identical
//! kernel values and summation orders.

use serde::{Deserialize, Serialize};

use crate::embedding::EmbeddingCloud;
use crate::error::{Error, Result};

/// Exponent below which `exp` underflows to exactly zero in `f64`.
const GAUSSIAN_ZERO_EXPONENT: f64 = 750.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum KernelSpec {
    /// `exp(-||x - y||^2 / (2 sigma^2))`
    Gaussian { sigma: f64 },
    /// `1` inside the closed ball of radius `radius`, else `0`.
    Indicator { radius: f64 },
}

impl KernelSpec {
    pub fn gaussian(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::domain(format!("gaussian bandwidth must be positive, got {sigma}")));
        }
        Ok(Self::Gaussian { sigma })
    }

    pub fn indicator(radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::domain(format!("indicator radius must be positive, got {radius}")));
        }
        Ok(Self::Indicator { radius })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Gaussian { sigma } => Self::gaussian(sigma).map(|_| ()),
            Self::Indicator { radius } => Self::indicator(radius).map(|_| ()),
        }
    }

    /// Kernel value as a function of the squared distance.
    #[inline]
    pub fn from_squared_distance(&self, d2: f64) -> f64 {
        match *self {
            Self::Gaussian { sigma } => (-0.5 * d2 / (sigma * sigma)).exp(),
            Self::Indicator { radius } => {
                if d2.sqrt() <= radius {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Squared distance beyond which the kernel is exactly zero.
    pub(crate) fn zero_beyond(&self) -> f64 {
        match *self {
            Self::Gaussian { sigma } => 2.0 * GAUSSIAN_ZERO_EXPONENT * sigma * sigma,
            Self::Indicator { radius } => radius * radius * (1.0 + 1e-9),
        }
    }
}

/// Squared Euclidean distance, abandoning with `None` once the partial sum
/// exceeds `bound`. When a value is returned it does not depend on `bound`.
#[inline]
pub(crate) fn squared_distance_within(x: &[f64], y: &[f64], bound: f64) -> Option<f64> {
    debug_assert_eq!(x.len(), y.len());
    let mut acc = [0.0f64; 4];
    let mut xb = x.chunks_exact(16);
    let mut yb = y.chunks_exact(16);
    for (xs, ys) in (&mut xb).zip(&mut yb) {
        for q in 0..4 {
            for l in 0..4 {
                let d = xs[4 * q + l] - ys[4 * q + l];
                acc[l] += d * d;
            }
        }
        if (acc[0] + acc[1]) + (acc[2] + acc[3]) > bound {
            return None;
        }
    }
    let (xr, yr) = (xb.remainder(), yb.remainder());
    for (i, (a, b)) in xr.iter().zip(yr).enumerate() {
        let d = a - b;
        acc[i % 4] += d * d;
    }
    let total = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    if total > bound {
        None
    } else {
        Some(total)
    }
}

/// Squared Euclidean distance `||x - y||^2`.
#[inline]
pub fn squared_distance(x: &[f64], y: &[f64]) -> f64 {
    squared_distance_within(x, y, f64::INFINITY).unwrap_or(f64::INFINITY)
}

pub fn kernel_eval(spec: &KernelSpec, x: &[f64], y: &[f64]) -> Result<f64> {
    spec.validate()?;
    if x.len() != y.len() {
        return Err(Error::Shape {
            expected: x.len(),
            found: y.len(),
        });
    }
    if !x.iter().chain(y).all(|v| v.is_finite()) {
        return Err(Error::domain("kernel inputs must be finite"));
    }
    Ok(spec.from_squared_distance(squared_distance(x, y)))
}

/// Dense `m_A × m_B` kernel block.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    pub rows: usize,
    pub cols: usize,
    values: Vec<f64>,
}

impl KernelMatrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }
}

fn check_dims(a: &EmbeddingCloud, b: &EmbeddingCloud) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::Shape {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(())
}

pub fn kernel_cross_matrix(spec: &KernelSpec, a: &EmbeddingCloud, b: &EmbeddingCloud) -> Result<KernelMatrix> {
    spec.validate()?;
    check_dims(a, b)?;
    let mut values = Vec::with_capacity(a.len() * b.len());
    for x in a.rows() {
        for y in b.rows() {
            values.push(spec.from_squared_distance(squared_distance(x, y)));
        }
    }
    Ok(KernelMatrix {
        rows: a.len(),
        cols: b.len(),
        values,
    })
}

/// Per-spec squared distances beyond which the kernel is exactly zero (so
/// skipping those terms leaves every sum unchanged), and their maximum.
fn kernel_cutoffs(specs: &[KernelSpec]) -> (Vec<f64>, f64) {
    let each: Vec<f64> = specs.iter().map(KernelSpec::zero_beyond).collect();
    let max = each.iter().copied().fold(0.0, f64::max);
    (each, max)
}

/// Row and column sums of the kernel block `K(a_i, b_j)`, one pair of
/// vectors per spec. Rows accumulate in `j` order, columns in `i` order.
pub fn cross_kernel_sums(
    specs: &[KernelSpec],
    a: &EmbeddingCloud,
    b: &EmbeddingCloud,
) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    check_dims(a, b)?;
    let (cutoffs, cutoff) = kernel_cutoffs(specs);
    let mut rows = vec![vec![0.0; a.len()]; specs.len()];
    let mut cols = vec![vec![0.0; b.len()]; specs.len()];
    for (i, x) in a.rows().enumerate() {
        for (j, y) in b.rows().enumerate() {
            if let Some(d2) = squared_distance_within(x, y, cutoff) {
                for (s, spec) in specs.iter().enumerate() {
                    if d2 <= cutoffs[s] {
                        let k = spec.from_squared_distance(d2);
                        rows[s][i] += k;
                        cols[s][j] += k;
                    }
                }
            }
        }
    }
    Ok((rows, cols))
}

/// Row sums of the symmetric kernel block `K(a_i, a_j)`, diagonal included.
///
/// Only the upper triangle is evaluated; each row still accumulates its
/// entries in increasing `j`, matching [`cross_kernel_sums`] on `(a, a)`.
pub fn self_kernel_sums(specs: &[KernelSpec], a: &EmbeddingCloud) -> Vec<Vec<f64>> {
    let (cutoffs, cutoff) = kernel_cutoffs(specs);
    let m = a.len();
    let mut rows = vec![vec![0.0; m]; specs.len()];
    for i in 0..m {
        let x = a.row(i);
        for j in i..m {
            if let Some(d2) = squared_distance_within(x, a.row(j), cutoff) {
                for (s, spec) in specs.iter().enumerate() {
                    if d2 <= cutoffs[s] {
                        let k = spec.from_squared_distance(d2);
                        rows[s][i] += k;
                        if j != i {
                            rows[s][j] += k;
                        }
                    }
                }
            }
        }
    }
    rows
}

/// The `k` smallest squared distances seen so far, ascending.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Nearest {
    k: usize,
    best: Vec<f64>,
}

impl Nearest {
    pub(crate) fn new(k: usize) -> Self {
        Self {
            k,
            best: Vec::with_capacity(k + 1),
        }
    }

    #[inline]
    pub(crate) fn threshold(&self) -> f64 {
        if self.best.len() < self.k {
            f64::INFINITY
        } else {
            self.best[self.k - 1]
        }
    }

    #[inline]
    pub(crate) fn push(&mut self, d2: f64) {
        if d2 >= self.threshold() && self.best.len() >= self.k {
            return;
        }
        let pos = self.best.partition_point(|&v| v <= d2);
        self.best.insert(pos, d2);
        self.best.truncate(self.k);
    }

    pub(crate) fn values(&self) -> &[f64] {
        &self.best
    }

    pub(crate) fn min(&self) -> f64 {
        self.best.first().copied().unwrap_or(f64::INFINITY)
    }
}

/// `k`-th smallest value of the union of two ascending lists.
pub(crate) fn kth_of_union(a: &[f64], b: &[f64], k: usize) -> f64 {
    let (mut i, mut j) = (0, 0);
    let mut last = f64::INFINITY;
    for _ in 0..k {
        let take_a = match (a.get(i), b.get(j)) {
            (Some(x), Some(y)) => x <= y,
            (Some(_), None) => true,
            (None, Some(_)) => false,
            (None, None) => return f64::INFINITY,
        };
        if take_a {
            last = a[i];
            i += 1;
        } else {
            last = b[j];
            j += 1;
        }
    }
    last
}

/// Per-point `k` nearest squared distances within one cloud, excluding the
/// point itself (but not its duplicates).
pub(crate) fn self_neighbors(a: &EmbeddingCloud, k: usize) -> Vec<Nearest> {
    let m = a.len();
    let mut out = vec![Nearest::new(k); m];
    for i in 0..m {
        let x = a.row(i);
        for j in i + 1..m {
            let bound = out[i].threshold().max(out[j].threshold());
            if let Some(d2) = squared_distance_within(x, a.row(j), bound) {
                out[i].push(d2);
                out[j].push(d2);
            }
        }
    }
    out
}

/// Per-row and per-column `k` nearest squared distances across two clouds.
pub(crate) fn cross_neighbors(a: &EmbeddingCloud, b: &EmbeddingCloud, k: usize) -> (Vec<Nearest>, Vec<Nearest>) {
    let mut rows = vec![Nearest::new(k); a.len()];
    let mut cols = vec![Nearest::new(k); b.len()];
    for (i, x) in a.rows().enumerate() {
        let row = &mut rows[i];
        for (j, y) in b.rows().enumerate() {
            let bound = row.threshold().max(cols[j].threshold());
            if let Some(d2) = squared_distance_within(x, y, bound) {
                row.push(d2);
                cols[j].push(d2);
            }
        }
    }
    (rows, cols)
}

/// Mean over all points of the Euclidean distance to their `k`-th nearest
/// neighbor (the point itself excluded).
pub fn knn_distance_scale(z: &EmbeddingCloud, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::domain("k must be at least 1"));
    }
    if k >= z.len() {
        return Err(Error::InsufficientPoints { k, points: z.len() });
    }
    let nn = self_neighbors(z, k);
    let total: f64 = nn.iter().map(|n| n.values()[k - 1].sqrt()).sum();
    Ok(total / z.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn line(points: &[f64]) -> EmbeddingCloud {
        let rows: Vec<Vec<f64>> = points.iter().map(|&p| vec![p]).collect();
        EmbeddingCloud::from_rows("line", &rows).unwrap()
    }

    #[test]
    fn gaussian_values() {
        let g = KernelSpec::gaussian(1.0).unwrap();
        assert_eq!(kernel_eval(&g, &[1.0, 2.0], &[1.0, 2.0]).unwrap(), 1.0);
        let v = kernel_eval(&g, &[0.0, 0.0], &[1.0, 1.0]).unwrap();
        assert_relative_eq!(v, (-1.0f64).exp(), max_relative = 1e-15);
        assert_relative_eq!(v, 0.367879, epsilon = 1e-6);
    }

    #[test]
    fn indicator_values() {
        let k = KernelSpec::indicator(0.5).unwrap();
        assert_eq!(kernel_eval(&k, &[0.0], &[0.7]).unwrap(), 0.0);
        assert_eq!(kernel_eval(&k, &[0.0], &[0.5]).unwrap(), 1.0);
    }

    #[test]
    fn eval_errors() {
        let g = KernelSpec::gaussian(1.0).unwrap();
        assert!(matches!(kernel_eval(&g, &[0.0], &[0.0, 1.0]), Err(Error::Shape { .. })));
        assert!(matches!(kernel_eval(&g, &[f64::INFINITY], &[0.0]), Err(Error::Domain(_))));
        assert!(KernelSpec::gaussian(0.0).is_err());
        assert!(KernelSpec::indicator(-1.0).is_err());
    }

    #[test]
    fn cross_matrix_cases() {
        let g = KernelSpec::gaussian(1.0).unwrap();
        let one = line(&[3.0]);
        let m = kernel_cross_matrix(&g, &one, &one).unwrap();
        assert_eq!((m.rows, m.cols, m.get(0, 0)), (1, 1, 1.0));

        let m = kernel_cross_matrix(&g, &line(&[0.0, 2.0]), &line(&[0.0])).unwrap();
        assert_eq!(m.get(0, 0), 1.0);
        assert_relative_eq!(m.get(1, 0), (-2.0f64).exp(), max_relative = 1e-15);

        let a = line(&[0.0, 0.3, 1.7, -2.0]);
        let m = kernel_cross_matrix(&g, &a, &a).unwrap();
        for i in 0..4 {
            assert_eq!(m.get(i, i), 1.0);
            for j in 0..4 {
                assert_eq!(m.get(i, j), m.get(j, i));
            }
        }
        let wide = EmbeddingCloud::from_rows("w", &[vec![0.0, 1.0]]).unwrap();
        assert!(kernel_cross_matrix(&g, &a, &wide).is_err());
    }

    #[test]
    fn knn_scale_cases() {
        assert_relative_eq!(knn_distance_scale(&line(&[0.0, 1.0, 3.0]), 1).unwrap(), 4.0 / 3.0);
        assert_eq!(knn_distance_scale(&line(&[2.0, 2.0]), 1).unwrap(), 0.0);
        let grid: Vec<f64> = (0..10).map(f64::from).collect();
        assert_eq!(knn_distance_scale(&line(&grid), 1).unwrap(), 1.0);
        assert!(matches!(
            knn_distance_scale(&line(&[0.0, 1.0]), 2),
            Err(Error::InsufficientPoints { .. })
        ));
    }

    #[test]
    fn early_abandon_is_exact() {
        let x: Vec<f64> = (0..37).map(|i| (i as f64 * 0.7).sin()).collect();
        let y: Vec<f64> = (0..37).map(|i| (i as f64 * 0.3).cos()).collect();
        let full = squared_distance(&x, &y);
        assert_eq!(squared_distance_within(&x, &y, full), Some(full));
        assert_eq!(squared_distance_within(&x, &y, full * 0.5), None);
        let naive: f64 = x.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum();
        assert_relative_eq!(full, naive, max_relative = 1e-14);
    }

    #[test]
    fn block_sums_agree_with_dense_matrix() {
        let a = EmbeddingCloud::from_rows(
            "a",
            &(0..13).map(|i| vec![i as f64 * 0.4, (i as f64).sqrt()]).collect::<Vec<_>>(),
        )
        .unwrap();
        let b = EmbeddingCloud::from_rows(
            "b",
            &(0..7).map(|i| vec![1.0 - i as f64 * 0.3, 0.5 * i as f64]).collect::<Vec<_>>(),
        )
        .unwrap();
        let specs = [KernelSpec::gaussian(0.3).unwrap(), KernelSpec::gaussian(2.0).unwrap()];
        let (rows, cols) = cross_kernel_sums(&specs, &a, &b).unwrap();
        for (s, spec) in specs.iter().enumerate() {
            let m = kernel_cross_matrix(spec, &a, &b).unwrap();
            for i in 0..a.len() {
                assert_relative_eq!(rows[s][i], m.row(i).iter().sum::<f64>(), max_relative = 1e-14);
            }
            for j in 0..b.len() {
                let col: f64 = (0..a.len()).map(|i| m.get(i, j)).sum();
                assert_relative_eq!(cols[s][j], col, max_relative = 1e-14);
            }
        }
        // the triangle walk reproduces the full cross walk bit for bit
        let selfs = self_kernel_sums(&specs, &a);
        let (full_rows, full_cols) = cross_kernel_sums(&specs, &a, &a).unwrap();
        assert_eq!(selfs, full_rows);
        assert_eq!(selfs, full_cols);
    }

    fn cholesky_ok(m: &KernelMatrix) -> bool {
        let n = m.rows;
        let mut l = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let s: f64 = (0..j).map(|k| l[i * n + k] * l[j * n + k]).sum();
                if i == j {
                    let d = m.get(i, i) - s;
                    if d <= 0.0 {
                        return false;
                    }
                    l[i * n + i] = d.sqrt();
                } else {
                    l[i * n + j] = (m.get(i, j) - s) / l[j * n + j];
                }
            }
        }
        true
    }

    #[test]
    fn gaussian_gram_positive_definite() {
        for seed in 0..10u64 {
            let pts: Vec<Vec<f64>> = (0..8)
                .map(|i| {
                    let t = (seed * 31 + i) as f64;
                    vec![(t * 1.37).sin() * 3.0, (t * 0.61).cos() * 3.0]
                })
                .collect();
            let c = EmbeddingCloud::from_rows("c", &pts).unwrap();
            let g = KernelSpec::gaussian(1.0).unwrap();
            assert!(cholesky_ok(&kernel_cross_matrix(&g, &c, &c).unwrap()));
        }
    }

    proptest! {
        #[test]
        fn symmetric_and_bounded(
            x in prop::collection::vec(-10f64..10.0, 3),
            y in prop::collection::vec(-10f64..10.0, 3),
            sigma in 0.1f64..5.0,
        ) {
            for spec in [KernelSpec::gaussian(sigma).unwrap(), KernelSpec::indicator(sigma).unwrap()] {
                let a = kernel_eval(&spec, &x, &y).unwrap();
                prop_assert_eq!(a, kernel_eval(&spec, &y, &x).unwrap());
                prop_assert!((0.0..=1.0).contains(&a));
            }
        }

        #[test]
        fn gaussian_strictly_decreasing(r1 in 0.0f64..3.0, gap in 0.01f64..3.0, sigma in 0.5f64..3.0) {
            let g = KernelSpec::gaussian(sigma).unwrap();
            let near = g.from_squared_distance(r1 * r1);
            let far = g.from_squared_distance((r1 + gap) * (r1 + gap));
            prop_assert!(far < near);
            prop_assert!(far < 1.0);
        }
    }
}
