//! Witness functions, their magnitude quantiles, and the kdiff statistic.
//!
//! For two empirical measures the witness is evaluated on the pooled cloud
//! `X ∪ Y` (the uniform reference measure over both samples), so it mixes
//! self similarities (`K(x_i, x_i')`) with cross similarities
//! (`K(x_i, y_j)`). kdiff is a low quantile of its magnitude: it stays small
//! when the two samples agree on some part of their support, even if the
//! rest differs.

mod theory;

pub use theory::{
    hoeffding_rate_check, mixture_kdiff, theorem_bound_check, witness_sup_error, BoundCheck, HoeffdingReport, Mixture,
    TheoremReport,
};

use crate::embedding::EmbeddingCloud;
use crate::error::{Error, Result};
use crate::kernels::{cross_kernel_sums, self_kernel_sums, KernelSpec};

/// Finitely supported probability measure on `R^L`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    support: EmbeddingCloud,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(support: EmbeddingCloud, weights: Vec<f64>) -> Result<Self> {
        if support.len() != weights.len() {
            return Err(Error::Shape {
                expected: support.len(),
                found: weights.len(),
            });
        }
        if weights.iter().any(|&w| !w.is_finite() || w < 0.0) {
            return Err(Error::domain("measure weights must be finite and nonnegative"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::domain(format!("measure weights sum to {total}, not 1")));
        }
        Ok(Self { support, weights })
    }

    pub fn uniform(support: EmbeddingCloud) -> Self {
        let m = support.len();
        Self {
            support,
            weights: vec![1.0 / m as f64; m],
        }
    }

    pub fn dirac(point: &[f64]) -> Result<Self> {
        Ok(Self::uniform(EmbeddingCloud::from_rows("dirac", &[point.to_vec()])?))
    }

    pub fn support(&self) -> &EmbeddingCloud {
        &self.support
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn dim(&self) -> usize {
        self.support.dim()
    }

    /// `U(mu)(z) = sum_i w_i K(z, x_i)`.
    pub fn potential(&self, spec: &KernelSpec, z: &[f64]) -> f64 {
        self.support
            .rows()
            .zip(&self.weights)
            .map(|(x, w)| w * spec.from_squared_distance(crate::kernels::squared_distance(z, x)))
            .sum()
    }
}

/// `U(mu1 - mu2)(z)`.
pub fn witness_at(spec: &KernelSpec, mu1: &DiscreteMeasure, mu2: &DiscreteMeasure, z: &[f64]) -> Result<f64> {
    for d in [mu2.dim(), z.len()] {
        if d != mu1.dim() {
            return Err(Error::Shape {
                expected: mu1.dim(),
                found: d,
            });
        }
    }
    Ok(mu1.potential(spec, z) - mu2.potential(spec, z))
}

/// Signed witness and its magnitude on the pooled cloud `X ∪ Y` (X first).
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessProfile {
    pub eval_points: EmbeddingCloud,
    pub u_values: Vec<f64>,
    pub t_values: Vec<f64>,
}

impl WitnessProfile {
    /// kdiff at level `alpha`: the `alpha` quantile of `t_values`.
    pub fn kdiff(&self, alpha: f64) -> Result<f64> {
        check_alpha(alpha)?;
        inverse_cdf(&self.t_values, alpha)
    }
}

/// Witness values on the pooled cloud from precomputed kernel sums.
///
/// `self_x[i] = sum_i' K(x_i, x_i')`, `cross_rows[i] = sum_j K(x_i, y_j)`,
/// `cross_cols[j] = sum_i K(x_i, y_j)`, `self_y[j] = sum_j' K(y_j, y_j')`.
pub(crate) fn pooled_witness(self_x: &[f64], self_y: &[f64], cross_rows: &[f64], cross_cols: &[f64]) -> Vec<f64> {
    let (mx, my) = (self_x.len() as f64, self_y.len() as f64);
    let mut u = Vec::with_capacity(self_x.len() + self_y.len());
    u.extend(self_x.iter().zip(cross_rows).map(|(s, c)| s / mx - c / my));
    u.extend(cross_cols.iter().zip(self_y).map(|(c, s)| c / mx - s / my));
    u
}

fn check_nonempty(x: &EmbeddingCloud, y: &EmbeddingCloud) -> Result<()> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::domain("witness needs two nonempty clouds"));
    }
    if x.dim() != y.dim() {
        return Err(Error::Shape {
            expected: x.dim(),
            found: y.dim(),
        });
    }
    Ok(())
}

pub fn witness_profile(spec: &KernelSpec, x: &EmbeddingCloud, y: &EmbeddingCloud) -> Result<WitnessProfile> {
    spec.validate()?;
    check_nonempty(x, y)?;
    let specs = [*spec];
    let self_x = self_kernel_sums(&specs, x).pop().unwrap_or_default();
    let self_y = self_kernel_sums(&specs, y).pop().unwrap_or_default();
    let (mut rows, mut cols) = cross_kernel_sums(&specs, x, y)?;
    let u_values = pooled_witness(&self_x, &self_y, &rows.pop().unwrap_or_default(), &cols.pop().unwrap_or_default());
    let t_values = u_values.iter().map(|u| u.abs()).collect();
    Ok(WitnessProfile {
        eval_points: x.concat(y)?,
        u_values,
        t_values,
    })
}

fn check_level(u: f64) -> Result<()> {
    if !(0.0..1.0).contains(&u) {
        return Err(Error::domain(format!("quantile level must lie in [0, 1), got {u}")));
    }
    Ok(())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    Ok(())
}

/// Uniform-weight `Λ(f)(t)`: the fraction of values with `|value| < t`.
pub fn empirical_cdf(values: &[f64], t: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::domain("empirical CDF of an empty set"));
    }
    let below = values.iter().filter(|v| v.abs() < t).count();
    Ok(below as f64 / values.len() as f64)
}

/// One-based rank `r = max{ i : (i - 1) / n <= u }`.
fn uniform_rank(n: usize, u: f64) -> usize {
    let nf = n as f64;
    let mut r = ((u * nf).floor() as usize + 1).clamp(1, n);
    while r < n && (r as f64) / nf <= u {
        r += 1;
    }
    while r > 1 && ((r - 1) as f64) / nf > u {
        r -= 1;
    }
    r
}

/// Ascending magnitudes, ready for repeated quantile queries.
#[derive(Debug, Clone, PartialEq)]
pub struct SortedMagnitudes(Vec<f64>);

impl SortedMagnitudes {
    pub fn new(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("quantile of an empty set"));
        }
        let mut sorted: Vec<f64> = values.iter().map(|v| v.abs()).collect();
        sorted.sort_by(f64::total_cmp);
        Ok(Self(sorted))
    }

    /// `f#(u) = sup{ t : Λ(t) <= u }`, realized as an order statistic.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        check_level(u)?;
        Ok(self.0[uniform_rank(self.0.len(), u) - 1])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Uniform-weight inverse CDF `f#(u)` of the magnitudes of `values`.
pub fn inverse_cdf(values: &[f64], u: f64) -> Result<f64> {
    SortedMagnitudes::new(values)?.quantile(u)
}

/// `ν*({z : |f(z)| < t})` for an explicitly weighted reference measure.
pub fn weighted_cdf(values: &[f64], weights: &[f64], t: f64) -> Result<f64> {
    if values.len() != weights.len() {
        return Err(Error::Shape {
            expected: values.len(),
            found: weights.len(),
        });
    }
    Ok(values.iter().zip(weights).filter(|(v, _)| v.abs() < t).map(|(_, w)| w).sum())
}

/// `sup{ t : ν*(|f| < t) <= u }` for an explicitly weighted reference measure.
///
/// With sorted magnitudes `a_(1) <= ... <= a_(N)` and cumulative weights
/// `W_i`, this is `a_(r)` for the largest `r` with `W_(r-1) <= u`. Cumulative
/// weights are compared with a relative slack of `1e-12` so that weights such
/// as `0.2` reproduce the uniform ranks despite rounding.
pub fn weighted_inverse_cdf(values: &[f64], weights: &[f64], u: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::domain("quantile of an empty set"));
    }
    if values.len() != weights.len() {
        return Err(Error::Shape {
            expected: values.len(),
            found: weights.len(),
        });
    }
    check_level(u)?;
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].abs().total_cmp(&values[b].abs()));
    let mut before = 0.0;
    let mut chosen = values[order[0]].abs();
    for &i in &order {
        if before > u + 1e-12 * u.max(f64::MIN_POSITIVE) {
            break;
        }
        chosen = values[i].abs();
        before += weights[i];
    }
    Ok(chosen)
}

/// kdiff(X, Y; alpha): the alpha quantile of the witness magnitude over the
/// pooled cloud.
pub fn kdiff(spec: &KernelSpec, x: &EmbeddingCloud, y: &EmbeddingCloud, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    witness_profile(spec, x, y)?.kdiff(alpha)
}

/// The alpha quantile of the squared witness magnitude.
pub fn kdiff_squared(spec: &KernelSpec, x: &EmbeddingCloud, y: &EmbeddingCloud, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let profile = witness_profile(spec, x, y)?;
    let squares: Vec<f64> = profile.t_values.iter().map(|t| t * t).collect();
    inverse_cdf(&squares, alpha)
}
