//! Independent reference implementations and the checks shared by the
//! oracle tests and the acceptance runner. Every check returns `Ok(detail)`
//! on success and `Err(detail)` otherwise.
#![allow(dead_code)]

use kdiff::clustering::{ks_two_sample, pam_kmedoids, DistanceMatrix};
use kdiff::pairwise::pairwise_matrix;
use kdiff::rng::{stream_rng, uniform, Gaussian, Rng};
use kdiff::witness::{hoeffding_rate_check, inverse_cdf, mixture_kdiff, theorem_bound_check, Mixture};
use kdiff::{dtw, embed, kdiff, kdiff_squared, mmd2, mpdist, DiscreteMeasure, EmbeddingCloud, Instance, KernelSpec, MeasureSpec};

pub type Check = std::result::Result<String, String>;

pub fn rng(seed: u64, stream: u64) -> Rng {
    stream_rng(seed, stream)
}

pub fn below(rng: &mut Rng, n: usize) -> usize {
    ((uniform(rng) * n as f64) as usize).min(n - 1)
}

/// Normal deviates from a child stream of `rng`.
pub fn normals(rng: &mut Rng) -> Gaussian {
    Gaussian::new(stream_rng((uniform(rng) * (1u64 << 53) as f64) as u64, 7))
}

pub fn gaussian_cloud(n: usize, dim: usize, shift: f64, rng: &mut Rng) -> EmbeddingCloud {
    let mut g = normals(rng);
    let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..dim).map(|_| shift + g.next()).collect()).collect();
    EmbeddingCloud::from_rows("g", &rows).unwrap()
}

/// Cloud with small integer coordinates: every squared distance is exact
/// in any summation order.
pub fn integer_cloud(n: usize, dim: usize, rng: &mut Rng) -> EmbeddingCloud {
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..dim).map(|_| below(rng, 41) as f64 - 20.0).collect())
        .collect();
    EmbeddingCloud::from_rows("z", &rows).unwrap()
}

fn naive_d2(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

fn gauss(sigma: f64, x: &[f64], y: &[f64]) -> f64 {
    (-naive_d2(x, y) / (2.0 * sigma * sigma)).exp()
}

/// Biased MMD² as three explicit double sums.
pub fn mmd2_oracle(sigma: f64, x: &EmbeddingCloud, y: &EmbeddingCloud) -> f64 {
    let mean = |a: &EmbeddingCloud, b: &EmbeddingCloud| {
        let mut s = 0.0;
        for p in a.rows() {
            for q in b.rows() {
                s += gauss(sigma, p, q);
            }
        }
        s / (a.len() * b.len()) as f64
    };
    (mean(x, x) + mean(y, y) - 2.0 * mean(x, y)).max(0.0)
}

/// MPdist from the full cross distance table.
pub fn mpdist_oracle(x: &EmbeddingCloud, y: &EmbeddingCloud, alpha: f64) -> f64 {
    let table: Vec<Vec<f64>> = x.rows().map(|p| y.rows().map(|q| naive_d2(p, q)).collect()).collect();
    let mut d: Vec<f64> = table.iter().map(|r| r.iter().cloned().fold(f64::INFINITY, f64::min)).collect();
    for j in 0..y.len() {
        d.push(table.iter().map(|r| r[j]).fold(f64::INFINITY, f64::min));
    }
    d.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let k = ((alpha * d.len() as f64).ceil() as usize).clamp(1, d.len());
    d[k - 1]
}

/// DTW by enumerating every monotone alignment path from (0, 0) to the end.
pub fn dtw_oracle(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    fn walk(a: &[Vec<f64>], b: &[Vec<f64>], i: usize, j: usize, acc: f64, best: &mut f64) {
        let acc = acc + naive_d2(&a[i], &b[j]).sqrt();
        if i + 1 == a.len() && j + 1 == b.len() {
            *best = best.min(acc);
            return;
        }
        if i + 1 < a.len() && j + 1 < b.len() {
            walk(a, b, i + 1, j + 1, acc, best);
        }
        if i + 1 < a.len() {
            walk(a, b, i + 1, j, acc, best);
        }
        if j + 1 < b.len() {
            walk(a, b, i, j + 1, acc, best);
        }
    }
    let mut best = f64::INFINITY;
    walk(a, b, 0, 0, 0.0, &mut best);
    best
}

/// Cheapest k = 2 medoid pair by exhaustive search.
pub fn best_pair_cost(d: &DistanceMatrix) -> f64 {
    let n = d.len();
    let mut best = f64::INFINITY;
    for a in 0..n {
        for b in a + 1..n {
            let c: f64 = (0..n).map(|i| d.get(i, a).min(d.get(i, b))).sum();
            best = best.min(c);
        }
    }
    best
}

pub fn check_mmd_oracle(cases: usize, seed: u64) -> Check {
    let mut worst: f64 = 0.0;
    for c in 0..cases {
        let mut r = rng(seed, c as u64);
        let dim = 1 + below(&mut r, 4);
        let x = gaussian_cloud(1 + below(&mut r, 30), dim, 0.0, &mut r);
        let y = gaussian_cloud(1 + below(&mut r, 30), dim, 2.0 * uniform(&mut r), &mut r);
        let sigma = 0.2 + 3.0 * uniform(&mut r);
        let got = mmd2(&KernelSpec::gaussian(sigma).unwrap(), &x, &y).map_err(|e| e.to_string())?;
        worst = worst.max((got - mmd2_oracle(sigma, &x, &y)).abs());
    }
    let detail = format!("{cases} cases, max |diff| = {worst:.2e}");
    if worst <= 1e-12 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

pub fn check_mpdist_oracle(cases: usize, seed: u64) -> Check {
    for c in 0..cases {
        let mut r = rng(seed, c as u64);
        let dim = 1 + below(&mut r, 20);
        let x = integer_cloud(1 + below(&mut r, 50), dim, &mut r);
        let y = integer_cloud(1 + below(&mut r, 50), dim, &mut r);
        let alpha = 0.01 + 0.9 * uniform(&mut r);
        let got = mpdist(&x, &y, alpha).map_err(|e| e.to_string())?;
        let want = mpdist_oracle(&x, &y, alpha);
        if got != want {
            return Err(format!("case {c}: {got} != {want}"));
        }
    }
    Ok(format!("{cases} cases, all exact"))
}

fn samples(inst: &Instance) -> Vec<Vec<f64>> {
    let p = inst.channels();
    (0..inst.len()).map(|t| (0..p).map(|c| inst.channel(c)[t]).collect()).collect()
}

pub fn check_dtw_oracle(cases: usize, seed: u64) -> Check {
    for c in 0..cases {
        let mut r = rng(seed, c as u64);
        let (n, m) = (1 + below(&mut r, 6), 1 + below(&mut r, 6));
        let (a, b) = if c % 2 == 0 {
            let mut g = normals(&mut r);
            let a = Instance::univariate("a", (0..n).map(|_| g.next()).collect()).unwrap();
            let b = Instance::univariate("b", (0..m).map(|_| g.next()).collect()).unwrap();
            (a, b)
        } else {
            let mk = |r: &mut Rng, len: usize| {
                let chans = (0..3).map(|_| (0..len).map(|_| below(r, 11) as f64 - 5.0).collect()).collect();
                Instance::multivariate("m", chans).unwrap()
            };
            (mk(&mut r, n), mk(&mut r, m))
        };
        let got = dtw(&a, &b).map_err(|e| e.to_string())?;
        let want = dtw_oracle(&samples(&a), &samples(&b));
        if got != want {
            return Err(format!("case {c}: {got} != {want}"));
        }
    }
    Ok(format!("{cases} cases, all exact"))
}

pub fn check_pam_oracle(cases: usize, seed: u64) -> Check {
    let mut hits = 0;
    for c in 0..cases {
        let mut r = rng(seed, c as u64);
        let n = 4 + below(&mut r, 9);
        let pts: Vec<[f64; 2]> = (0..n).map(|_| [uniform(&mut r) * 10.0, uniform(&mut r) * 10.0]).collect();
        let ids = (0..n).map(|i| format!("p{i}")).collect();
        let d = DistanceMatrix::from_pairs(ids, |i, j| Ok(naive_d2(&pts[i], &pts[j]).sqrt())).unwrap();
        let res = pam_kmedoids(&d, 2, c as u64, 5).map_err(|e| e.to_string())?;
        let best = best_pair_cost(&d);
        if res.total_cost <= best * (1.0 + 1e-12) {
            hits += 1;
        }
    }
    let share = hits as f64 / cases as f64;
    let detail = format!("{hits}/{cases} instances reach the exhaustive optimum");
    if share >= 0.95 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

pub fn check_pairwise_direct(seed: u64) -> Check {
    let mut g = normals(&mut rng(seed, 0));
    let series: Vec<Instance> = (0..4)
        .map(|i| Instance::univariate(format!("s{i}"), (0..60).map(|_| g.next() + i as f64).collect()).unwrap())
        .collect();
    let specs = [
        MeasureSpec::Kdiff { window: 5, sigma: 1.3, alpha: 0.1 },
        MeasureSpec::Mmd { window: 4, sigma: 0.8 },
        MeasureSpec::Mpdist { window: 6, alpha: 0.05 },
        MeasureSpec::Dtw,
    ];
    for spec in &specs {
        let m = pairwise_matrix(&series, spec).map_err(|e| e.to_string())?;
        for i in 0..series.len() {
            for j in 0..series.len() {
                let want = if i == j {
                    0.0
                } else {
                    let (a, b) = (&series[i], &series[j]);
                    match *spec {
                        MeasureSpec::Kdiff { window, sigma, alpha } => kdiff_squared(
                            &KernelSpec::gaussian(sigma).unwrap(),
                            &embed(a, window).unwrap(),
                            &embed(b, window).unwrap(),
                            alpha,
                        )
                        .unwrap(),
                        MeasureSpec::Mmd { window, sigma } => mmd2(
                            &KernelSpec::gaussian(sigma).unwrap(),
                            &embed(a, window).unwrap(),
                            &embed(b, window).unwrap(),
                        )
                        .unwrap(),
                        MeasureSpec::Mpdist { window, alpha } => {
                            mpdist_oracle(&embed(a, window).unwrap(), &embed(b, window).unwrap(), alpha)
                        }
                        MeasureSpec::Dtw => dtw(a, b).unwrap().powi(2),
                    }
                };
                let got = m.get(i, j);
                if (got - want).abs() > 1e-12 * want.abs().max(1.0) {
                    return Err(format!("{} ({i},{j}): {got} != {want}", spec.method()));
                }
            }
        }
    }
    Ok("kdiff, mmd, mpdist, dtw matrices match per-pair calls".into())
}

pub fn check_ks_suite(cases: usize, seed: u64) -> Check {
    for c in 0..cases {
        let mut r = rng(seed, c as u64);
        let a: Vec<f64> = (0..1 + below(&mut r, 40)).map(|_| below(&mut r, 15) as f64).collect();
        let b: Vec<f64> = (0..1 + below(&mut r, 40)).map(|_| below(&mut r, 15) as f64 + 2.0).collect();
        let ks = ks_two_sample(&a, &b).map_err(|e| e.to_string())?;
        let cdf = |s: &[f64], t: f64| s.iter().filter(|&&v| v <= t).count() as f64 / s.len() as f64;
        let want = a.iter().chain(&b).map(|&t| (cdf(&a, t) - cdf(&b, t)).abs()).fold(0.0, f64::max);
        if (ks - want).abs() > 1e-15 {
            return Err(format!("case {c}: {ks} vs brute force {want}"));
        }
        if ks != ks_two_sample(&b, &a).unwrap() || !(0.0..=1.0).contains(&ks) {
            return Err(format!("case {c}: asymmetric or out of range"));
        }
        let warped: Vec<f64> = a.iter().map(|v| v.exp()).collect();
        let warped_b: Vec<f64> = b.iter().map(|v| v.exp()).collect();
        if ks_two_sample(&warped, &warped_b).unwrap() != ks {
            return Err(format!("case {c}: not invariant under a monotone map"));
        }
        if ks_two_sample(&a, &a).unwrap() != 0.0 {
            return Err(format!("case {c}: KS(a, a) != 0"));
        }
    }
    let disjoint = ks_two_sample(&[0.0, 1.0], &[5.0, 6.0, 7.0]).unwrap();
    if disjoint != 1.0 {
        return Err(format!("disjoint samples give {disjoint}"));
    }
    Ok(format!("{cases} cases match brute force; symmetric, monotone-invariant, KS(a,a)=0, disjoint=1"))
}

fn random_pair(r: &mut Rng) -> (EmbeddingCloud, EmbeddingCloud, KernelSpec) {
    let dim = 1 + below(r, 5);
    let x = gaussian_cloud(2 + below(r, 40), dim, 0.0, r);
    let y = gaussian_cloud(2 + below(r, 40), dim, 3.0 * uniform(r), r);
    (x, y, KernelSpec::gaussian(0.3 + 2.0 * uniform(r)).unwrap())
}

pub fn check_kdiff_invariants(seed: u64) -> Check {
    let alphas = [0.01, 0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99];
    let mut worst_identity: f64 = 0.0;
    for c in 0..100 {
        let mut r = rng(seed, c);
        let (x, _, k) = random_pair(&mut r);
        let alpha = 0.01 + 0.98 * uniform(&mut r);
        worst_identity = worst_identity.max(kdiff(&k, &x, &x, alpha).unwrap());
    }
    if worst_identity != 0.0 {
        return Err(format!("identity: kdiff(X, X) reached {worst_identity:e}"));
    }
    let mut worst_sym: f64 = 0.0;
    for c in 0..100 {
        let mut r = rng(seed ^ 1, c);
        let (x, y, k) = random_pair(&mut r);
        let mut last = 0.0;
        for &a in &alphas {
            let (v, w) = (kdiff(&k, &x, &y, a).unwrap(), kdiff(&k, &y, &x, a).unwrap());
            worst_sym = worst_sym.max((v - w).abs());
            if v < last {
                return Err(format!("monotonicity: kdiff fell from {last} to {v} at alpha {a}"));
            }
            last = v;
            let sq = kdiff_squared(&k, &x, &y, a).unwrap();
            if (sq - v * v).abs() > 1e-12 * sq {
                return Err(format!("squares: {sq} but kdiff^2 = {}", v * v));
            }
        }
    }
    if worst_sym > 1e-12 {
        return Err(format!("symmetry: max asymmetry {worst_sym:e}"));
    }
    for c in 0..100 {
        let mut r = rng(seed ^ 2, c);
        let n = 1 + below(&mut r, 60);
        let eps = 0.5 * uniform(&mut r);
        let v: Vec<f64> = (0..n).map(|_| uniform(&mut r)).collect();
        let w: Vec<f64> = v.iter().map(|x| (x + eps * (2.0 * uniform(&mut r) - 1.0)).abs()).collect();
        for &a in &alphas {
            let shift = (inverse_cdf(&v, a).unwrap() - inverse_cdf(&w, a).unwrap()).abs();
            if shift > eps + 1e-15 {
                return Err(format!("stability: shift {shift} > eps {eps}"));
            }
        }
    }
    Ok(format!("identity exact on 100 clouds; symmetry {worst_sym:.1e}; monotone; squares consistent; quantile shift <= eps"))
}

fn line(points: &[f64]) -> DiscreteMeasure {
    let rows: Vec<Vec<f64>> = points.iter().map(|&p| vec![p]).collect();
    DiscreteMeasure::uniform(EmbeddingCloud::from_rows("line", &rows).unwrap())
}

fn weighted_points(n: usize, lo: f64, width: f64, dim: usize, r: &mut Rng) -> DiscreteMeasure {
    let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..dim).map(|_| lo + width * uniform(r)).collect()).collect();
    let raw: Vec<f64> = (0..n).map(|_| 0.1 + uniform(r)).collect();
    let total: f64 = raw.iter().sum();
    let w: Vec<f64> = raw.iter().map(|v| v / total).collect();
    DiscreteMeasure::new(EmbeddingCloud::from_rows("w", &rows).unwrap(), w).unwrap()
}

pub fn check_theorem(seed: u64) -> Check {
    let mut applicable = 0;
    for c in 0..50 {
        let mut r = rng(seed, c);
        let dim = 1 + below(&mut r, 3);
        let fg = weighted_points(2 + below(&mut r, 6), 0.0, 1.0, dim, &mut r);
        let b1 = weighted_points(2 + below(&mut r, 8), 2.0 * uniform(&mut r), 6.0, dim, &mut r);
        let b2 = weighted_points(2 + below(&mut r, 8), 2.0 * uniform(&mut r), 6.0, dim, &mut r);
        let m1 = Mixture::new(fg.clone(), b1).unwrap();
        let m2 = Mixture::new(fg, b2).unwrap();
        let delta = 0.05 + 0.4 * uniform(&mut r);
        let eta = 0.01 + 0.3 * uniform(&mut r);
        let k = KernelSpec::gaussian(0.3 + uniform(&mut r)).unwrap();
        let rep = theorem_bound_check(&k, delta, eta, &m1, &m2).map_err(|e| e.to_string())?;
        if !rep.satisfied() {
            return Err(format!("mixture {c}: {rep:?}"));
        }
        applicable += rep.shared_foreground.is_some() as usize;
    }
    let k = KernelSpec::indicator(0.5).unwrap();
    let fg = line(&[0.0, 0.1, 0.2]);
    let m1 = Mixture::new(fg.clone(), line(&[10.0, 10.1, 10.2])).unwrap();
    let m2 = Mixture::new(fg, line(&[20.0, 20.1, 20.2])).unwrap();
    let delta = 0.25;
    for alpha in [0.01, 0.1, 0.2, 0.249] {
        let v = mixture_kdiff(&k, delta, &m1, &m2, alpha).unwrap();
        if v != 0.0 {
            return Err(format!("indicator construction: kdiff = {v} at alpha {alpha} < delta"));
        }
    }
    let s1 = Mixture::new(line(&[0.0, 0.1, 0.2]), line(&[10.0, 10.1, 10.2])).unwrap();
    let s2 = Mixture::new(line(&[-5.0, -5.1, -5.2]), line(&[20.0, 20.1, 20.2])).unwrap();
    let rep = theorem_bound_check(&k, delta, 0.1, &s1, &s2).unwrap();
    match &rep.separated_foreground {
        Some(b) if b.satisfied => {}
        other => return Err(format!("separated foregrounds: {other:?}")),
    }
    Ok(format!(
        "upper bound holds on 50 shared-foreground mixtures ({applicable} with an admissible level); indicator kdiff = 0 below delta; lower bound holds when separated"
    ))
}

pub fn check_hoeffding(seed: u64) -> Check {
    let mut r = rng(seed, 0);
    let mu = weighted_points(8, -2.0, 4.0, 2, &mut r);
    let rep = hoeffding_rate_check(&KernelSpec::gaussian(1.0).unwrap(), &mu, &[100, 400, 1600], 20, seed)
        .map_err(|e| e.to_string())?;
    let detail = format!("median errors {:.4?}, ratios {:.3?}", rep.median_errors, rep.ratios);
    if rep.satisfied {
        Ok(detail)
    } else {
        Err(detail)
    }
}
