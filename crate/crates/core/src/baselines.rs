//! Comparison distances: kernel MMD, MPdist and dynamic time warping.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::embedding::{EmbeddingCloud, Instance, InstanceKind};
use crate::error::{Error, Result};
use crate::kernels::{cross_kernel_sums, cross_neighbors, self_kernel_sums, squared_distance, KernelSpec};
use crate::witness::DiscreteMeasure;

/// Default MPdist quantile (the fixed 5% of the original method).
pub const MPDIST_DEFAULT_ALPHA: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Kdiff,
    Mmd,
    Mpdist,
    Dtw,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Kdiff, Method::Mmd, Method::Mpdist, Method::Dtw];

    pub fn name(self) -> &'static str {
        match self {
            Method::Kdiff => "kdiff",
            Method::Mmd => "mmd",
            Method::Mpdist => "mpdist",
            Method::Dtw => "dtw",
        }
    }

    pub fn uses_window(self) -> bool {
        self != Method::Dtw
    }

    pub fn uses_sigma(self) -> bool {
        matches!(self, Method::Kdiff | Method::Mmd)
    }

    pub fn uses_alpha(self) -> bool {
        matches!(self, Method::Kdiff | Method::Mpdist)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "kdiff" => Ok(Method::Kdiff),
            "mmd" => Ok(Method::Mmd),
            "mpdist" => Ok(Method::Mpdist),
            "dtw" | "dtwd" => Ok(Method::Dtw),
            other => Err(Error::Config(format!("unknown method {other:?}"))),
        }
    }
}

/// A fully parameterized distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum MeasureSpec {
    Kdiff { window: usize, sigma: f64, alpha: f64 },
    Mmd { window: usize, sigma: f64 },
    Mpdist { window: usize, alpha: f64 },
    Dtw,
}

impl MeasureSpec {
    pub fn method(&self) -> Method {
        match self {
            MeasureSpec::Kdiff { .. } => Method::Kdiff,
            MeasureSpec::Mmd { .. } => Method::Mmd,
            MeasureSpec::Mpdist { .. } => Method::Mpdist,
            MeasureSpec::Dtw => Method::Dtw,
        }
    }

    pub fn window(&self) -> Option<usize> {
        match *self {
            MeasureSpec::Kdiff { window, .. } | MeasureSpec::Mmd { window, .. } | MeasureSpec::Mpdist { window, .. } => {
                Some(window)
            }
            MeasureSpec::Dtw => None,
        }
    }

    pub fn sigma(&self) -> Option<f64> {
        match *self {
            MeasureSpec::Kdiff { sigma, .. } | MeasureSpec::Mmd { sigma, .. } => Some(sigma),
            _ => None,
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        match *self {
            MeasureSpec::Kdiff { alpha, .. } | MeasureSpec::Mpdist { alpha, .. } => Some(alpha),
            _ => None,
        }
    }

    pub fn kernel(&self) -> Option<KernelSpec> {
        self.sigma().map(|sigma| KernelSpec::Gaussian { sigma })
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(w) = self.window() {
            if w == 0 {
                return Err(Error::Config("window must be at least 1".into()));
            }
        }
        if let Some(s) = self.sigma() {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::Config(format!("sigma must be positive, got {s}")));
            }
        }
        if let Some(a) = self.alpha() {
            if !(a > 0.0 && a < 1.0) {
                return Err(Error::Config(format!("alpha must lie in (0, 1), got {a}")));
            }
        }
        Ok(())
    }
}

fn check_pair(x: &EmbeddingCloud, y: &EmbeddingCloud) -> Result<()> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::domain("distance needs two nonempty clouds"));
    }
    if x.dim() != y.dim() {
        return Err(Error::Shape {
            expected: x.dim(),
            found: y.dim(),
        });
    }
    Ok(())
}

/// MMD² from the three kernel block totals, clamped at zero.
pub(crate) fn mmd2_from_totals(self_x: f64, self_y: f64, cross: f64, mx: usize, my: usize) -> f64 {
    let (mx, my) = (mx as f64, my as f64);
    (self_x / (mx * mx) + self_y / (my * my) - 2.0 * cross / (mx * my)).max(0.0)
}

/// Biased (V-statistic) estimate of MMD² between two empirical measures.
pub fn mmd2(spec: &KernelSpec, x: &EmbeddingCloud, y: &EmbeddingCloud) -> Result<f64> {
    spec.validate()?;
    check_pair(x, y)?;
    let specs = [*spec];
    let sx: f64 = self_kernel_sums(&specs, x)[0].iter().sum();
    let sy: f64 = self_kernel_sums(&specs, y)[0].iter().sum();
    let (rows, _) = cross_kernel_sums(&specs, x, y)?;
    let c: f64 = rows[0].iter().sum();
    Ok(mmd2_from_totals(sx, sy, c, x.len(), y.len()))
}

/// Population MMD² between two finitely supported weighted measures.
pub fn mmd2_measures(spec: &KernelSpec, mu1: &DiscreteMeasure, mu2: &DiscreteMeasure) -> Result<f64> {
    if mu1.dim() != mu2.dim() {
        return Err(Error::Shape {
            expected: mu1.dim(),
            found: mu2.dim(),
        });
    }
    let term = |a: &DiscreteMeasure, b: &DiscreteMeasure| -> f64 {
        let mut acc = 0.0;
        for (x, wx) in a.support().rows().zip(a.weights()) {
            for (y, wy) in b.support().rows().zip(b.weights()) {
                acc += wx * wy * spec.from_squared_distance(squared_distance(x, y));
            }
        }
        acc
    };
    Ok((term(mu1, mu1) + term(mu2, mu2) - 2.0 * term(mu1, mu2)).max(0.0))
}

/// Rank `k = max(1, ceil(alpha * n))` used for MPdist's order statistic.
pub(crate) fn mpdist_rank(alpha: f64, n: usize) -> usize {
    ((alpha * n as f64).ceil() as usize).clamp(1, n)
}

/// Squared 1-NN cross distances, X's points first then Y's.
pub(crate) fn cross_nn_squared(x: &EmbeddingCloud, y: &EmbeddingCloud) -> Result<Vec<f64>> {
    check_pair(x, y)?;
    let (rows, cols) = cross_neighbors(x, y, 1);
    Ok(rows.iter().chain(&cols).map(|n| n.min()).collect())
}

/// MPdist: the `ceil(alpha * |D²|)`-th smallest element of the squared
/// cross nearest-neighbor distances `D²`, taken over both clouds.
pub fn mpdist(x: &EmbeddingCloud, y: &EmbeddingCloud, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let mut d2 = cross_nn_squared(x, y)?;
    d2.sort_by(f64::total_cmp);
    Ok(d2[mpdist_rank(alpha, d2.len()) - 1])
}

/// Dependent DTW: unconstrained symmetric steps, Euclidean cost between
/// (vector) samples, unnormalized path cost. Fields are compared as their
/// row-major flattened series.
pub fn dtw(a: &Instance, b: &Instance) -> Result<f64> {
    let flat = |i: &Instance| Instance::univariate(i.id.clone(), i.values().to_vec());
    match (a.kind(), b.kind()) {
        (InstanceKind::Field2d { .. }, InstanceKind::Field2d { .. }) => return dtw(&flat(a)?, &flat(b)?),
        (InstanceKind::Field2d { .. }, _) | (_, InstanceKind::Field2d { .. }) => {
            return Err(Error::domain("dtw cannot compare a field with a series"))
        }
        _ => {}
    }
    for inst in [a, b] {
        if inst.is_empty() {
            return Err(Error::domain("dtw of an empty series"));
        }
    }
    let p = a.channels();
    if b.channels() != p {
        return Err(Error::Shape {
            expected: p,
            found: b.channels(),
        });
    }
    let (n, m) = (a.len(), b.len());
    let mut sa = vec![0.0; n * p];
    for t in 0..n {
        a.sample_into(t, &mut sa[t * p..(t + 1) * p]);
    }
    let mut sb = vec![0.0; m * p];
    for t in 0..m {
        b.sample_into(t, &mut sb[t * p..(t + 1) * p]);
    }
    let cost = |i: usize, j: usize| squared_distance(&sa[i * p..(i + 1) * p], &sb[j * p..(j + 1) * p]).sqrt();

    let mut prev = vec![f64::INFINITY; m];
    let mut cur = vec![f64::INFINITY; m];
    for i in 0..n {
        for j in 0..m {
            let best = match (i, j) {
                (0, 0) => 0.0,
                (0, _) => cur[j - 1],
                (_, 0) => prev[0],
                _ => prev[j - 1].min(prev[j]).min(cur[j - 1]),
            };
            cur[j] = best + cost(i, j);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    Ok(prev[m - 1])
}
