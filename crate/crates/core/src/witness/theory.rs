//! Numerical checks of the separability bounds and of the sampling rate of
//! empirical witness functions, on finitely supported measures where every
//! set measure can be evaluated exactly.

use crate::embedding::EmbeddingCloud;
use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::rng::{stream_rng, uniform};

use super::{weighted_cdf, weighted_inverse_cdf, DiscreteMeasure};

/// A two-component measure `delta * fg + (1 - delta) * bg`; the mixing
/// weight is supplied by the caller of each check.
#[derive(Debug, Clone, PartialEq)]
pub struct Mixture {
    pub fg: DiscreteMeasure,
    pub bg: DiscreteMeasure,
}

impl Mixture {
    pub fn new(fg: DiscreteMeasure, bg: DiscreteMeasure) -> Result<Self> {
        if fg.dim() != bg.dim() {
            return Err(Error::Shape {
                expected: fg.dim(),
                found: bg.dim(),
            });
        }
        Ok(Self { fg, bg })
    }

    /// The mixture as one measure.
    pub fn combined(&self, delta: f64) -> Result<DiscreteMeasure> {
        let support = self.fg.support().concat(self.bg.support())?;
        let weights = self
            .fg
            .weights()
            .iter()
            .map(|w| delta * w)
            .chain(self.bg.weights().iter().map(|w| (1.0 - delta) * w))
            .collect();
        DiscreteMeasure::new(support, weights)
    }
}

/// Witness magnitudes on the support of `ν* = (mu1 + mu2) / 2`.
struct Evaluation {
    weights: Vec<f64>,
    total: Vec<f64>,
    background: Vec<f64>,
    foreground: Vec<f64>,
}

fn evaluate(spec: &KernelSpec, delta: f64, mu1: &Mixture, mu2: &Mixture) -> Result<Evaluation> {
    let dim = mu1.fg.dim();
    for d in [mu1.bg.dim(), mu2.fg.dim(), mu2.bg.dim()] {
        if d != dim {
            return Err(Error::Shape { expected: dim, found: d });
        }
    }
    let parts = [
        (&mu1.fg, 0.5 * delta),
        (&mu1.bg, 0.5 * (1.0 - delta)),
        (&mu2.fg, 0.5 * delta),
        (&mu2.bg, 0.5 * (1.0 - delta)),
    ];
    let mut ev = Evaluation {
        weights: Vec::new(),
        total: Vec::new(),
        background: Vec::new(),
        foreground: Vec::new(),
    };
    for (measure, scale) in parts {
        for (z, w) in measure.support().rows().zip(measure.weights()) {
            let f = mu1.fg.potential(spec, z) - mu2.fg.potential(spec, z);
            let b = mu1.bg.potential(spec, z) - mu2.bg.potential(spec, z);
            ev.weights.push(scale * w);
            ev.total.push((delta * f + (1.0 - delta) * b).abs());
            ev.foreground.push(f.abs());
            ev.background.push(b.abs());
        }
    }
    Ok(ev)
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::domain(format!("delta must lie in (0, 1/2), got {delta}")));
    }
    Ok(())
}

/// kdiff of two mixtures, taken with respect to `ν* = (mu1 + mu2) / 2`.
pub fn mixture_kdiff(spec: &KernelSpec, delta: f64, mu1: &Mixture, mu2: &Mixture, alpha: f64) -> Result<f64> {
    check_delta(delta)?;
    let ev = evaluate(spec, delta, mu1, mu2)?;
    weighted_inverse_cdf(&ev.total, &ev.weights, alpha)
}

/// One inequality of the separability theorem at its least favorable level.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCheck {
    /// Level at which `lhs` was evaluated.
    pub alpha: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TheoremReport {
    pub delta: f64,
    pub eta: f64,
    pub theta: f64,
    pub phi_b: f64,
    pub phi_f: f64,
    pub psi: f64,
    /// Upper bound for shared foregrounds; `None` when foregrounds differ or
    /// no admissible level exists.
    pub shared_foreground: Option<BoundCheck>,
    /// Lower bound for separated foregrounds; `None` when its hypotheses fail.
    pub separated_foreground: Option<BoundCheck>,
}

impl TheoremReport {
    pub fn satisfied(&self) -> bool {
        self.shared_foreground.iter().chain(&self.separated_foreground).all(|c| c.satisfied)
    }
}

/// Relative slack for comparisons that cross a multiplication by `1 - delta`.
const ROUNDING: f64 = 1e-12;

/// Largest order statistic reachable with a level strictly below `level`.
/// Cumulative weights within rounding of `level` count as reaching it.
fn sup_quantile_below(values: &[f64], weights: &[f64], level: f64) -> Option<(f64, f64)> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut before = 0.0;
    let mut best = None;
    for &i in &order {
        if before >= level * (1.0 - ROUNDING) {
            break;
        }
        best = Some((values[i], before));
        before += weights[i];
    }
    best
}

/// Evaluates the set measures `φ_B(η)`, `φ_F(θ)`, `ψ(θ, η)` with
/// `θ = 3(1 - δ)η / δ` and checks whichever bound applies:
///
/// * shared foreground: `kdiff(α) <= (1 - δ)η` for every `α < φ_B(η)`;
/// * otherwise, if `φ_F(θ) < 1` and `ψ(θ, η) > 0`:
///   `kdiff(α) >= 2(1 - δ)η` for every `α >= 1 - ψ(θ, η)`.
///
/// Quantiles are monotone in `α`, so each bound is checked at the end of
/// its admissible range.
pub fn theorem_bound_check(
    spec: &KernelSpec,
    delta: f64,
    eta: f64,
    mu1: &Mixture,
    mu2: &Mixture,
) -> Result<TheoremReport> {
    check_delta(delta)?;
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::domain(format!("eta must be positive, got {eta}")));
    }
    let ev = evaluate(spec, delta, mu1, mu2)?;
    let theta = 3.0 * (1.0 - delta) * eta / delta;
    let phi_b = weighted_cdf(&ev.background, &ev.weights, eta)?;
    let phi_f = weighted_cdf(&ev.foreground, &ev.weights, theta)?;
    let psi: f64 = (0..ev.weights.len())
        .filter(|&i| {
            let (f, b) = (ev.foreground[i], ev.background[i]);
            (f >= theta && b < eta) || (b >= theta && f < eta)
        })
        .map(|i| ev.weights[i])
        .sum();

    let shared = if mu1.fg == mu2.fg {
        sup_quantile_below(&ev.total, &ev.weights, phi_b).map(|(lhs, alpha)| {
            let rhs = (1.0 - delta) * eta;
            BoundCheck {
                alpha,
                lhs,
                rhs,
                satisfied: lhs <= rhs * (1.0 + ROUNDING),
            }
        })
    } else {
        None
    };

    let separated = if phi_f < 1.0 && psi > 0.0 {
        let alpha = (1.0 - psi).max(0.0);
        let lhs = weighted_inverse_cdf(&ev.total, &ev.weights, alpha)?;
        let rhs = 2.0 * (1.0 - delta) * eta;
        Some(BoundCheck {
            alpha,
            lhs,
            rhs,
            satisfied: lhs >= rhs * (1.0 - ROUNDING),
        })
    } else {
        None
    };

    Ok(TheoremReport {
        delta,
        eta,
        theta,
        phi_b,
        phi_f,
        psi,
        shared_foreground: shared,
        separated_foreground: separated,
    })
}

/// `sup_z |U(mu)(z) - (1/M) sum_j K(z, y_j)|` over the points of `grid`.
pub fn witness_sup_error(
    spec: &KernelSpec,
    mu: &DiscreteMeasure,
    sample: &EmbeddingCloud,
    grid: &EmbeddingCloud,
) -> Result<f64> {
    if sample.dim() != mu.dim() || grid.dim() != mu.dim() {
        return Err(Error::Shape {
            expected: mu.dim(),
            found: if sample.dim() != mu.dim() { sample.dim() } else { grid.dim() },
        });
    }
    let empirical = DiscreteMeasure::uniform(sample.clone());
    Ok(grid
        .rows()
        .map(|z| (mu.potential(spec, z) - empirical.potential(spec, z)).abs())
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq)]
pub struct HoeffdingReport {
    pub sample_sizes: Vec<usize>,
    pub median_errors: Vec<f64>,
    /// `median_errors[i + 1] / median_errors[i]`.
    pub ratios: Vec<f64>,
    /// Every consecutive ratio is at most [`HOEFFDING_MAX_RATIO`].
    pub satisfied: bool,
}

/// Largest acceptable error ratio per fourfold increase of the sample size
/// (the expected value is 1/2).
pub const HOEFFDING_MAX_RATIO: f64 = 0.7;

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Support atoms plus the midpoint of every pair of atoms.
fn evaluation_grid(mu: &DiscreteMeasure) -> Result<EmbeddingCloud> {
    let s = mu.support();
    let mut rows: Vec<Vec<f64>> = s.rows().map(<[f64]>::to_vec).collect();
    for i in 0..s.len() {
        for j in i + 1..s.len() {
            rows.push(s.row(i).iter().zip(s.row(j)).map(|(a, b)| 0.5 * (a + b)).collect());
        }
    }
    EmbeddingCloud::from_rows("grid", &rows)
}

fn draw(mu: &DiscreteMeasure, m: usize, rng: &mut crate::rng::Rng) -> Result<EmbeddingCloud> {
    let mut cumulative = Vec::with_capacity(mu.weights().len());
    let mut acc = 0.0;
    for w in mu.weights() {
        acc += w;
        cumulative.push(acc);
    }
    let last = mu.weights().len() - 1;
    let rows: Vec<Vec<f64>> = (0..m)
        .map(|_| {
            let u = uniform(rng) * acc;
            let idx = cumulative.partition_point(|&c| c <= u).min(last);
            mu.support().row(idx).to_vec()
        })
        .collect();
    EmbeddingCloud::from_rows("sample", &rows)
}

/// Median sup-norm error of the sampled witness for each sample size, over
/// `trials` independent draws.
pub fn hoeffding_rate_check(
    spec: &KernelSpec,
    mu: &DiscreteMeasure,
    sample_sizes: &[usize],
    trials: usize,
    seed: u64,
) -> Result<HoeffdingReport> {
    if sample_sizes.is_empty() || trials == 0 {
        return Err(Error::domain("need at least one sample size and one trial"));
    }
    if sample_sizes.windows(2).any(|w| w[1] <= w[0]) || sample_sizes[0] == 0 {
        return Err(Error::domain("sample sizes must be positive and increasing"));
    }
    let grid = evaluation_grid(mu)?;
    let mut median_errors = Vec::with_capacity(sample_sizes.len());
    for (s, &m) in sample_sizes.iter().enumerate() {
        let mut errors = Vec::with_capacity(trials);
        for t in 0..trials {
            let mut rng = stream_rng(seed, ((s as u64) << 32) | t as u64);
            let sample = draw(mu, m, &mut rng)?;
            errors.push(witness_sup_error(spec, mu, &sample, &grid)?);
        }
        median_errors.push(median(&mut errors));
    }
    let ratios: Vec<f64> = median_errors
        .windows(2)
        .map(|w| if w[0] == 0.0 { if w[1] == 0.0 { 0.0 } else { f64::INFINITY } } else { w[1] / w[0] })
        .collect();
    let satisfied = ratios.iter().all(|&r| r <= HOEFFDING_MAX_RATIO);
    Ok(HoeffdingReport {
        sample_sizes: sample_sizes.to_vec(),
        median_errors,
        ratios,
        satisfied,
    })
}
