mod common;

use common::*;
use kdiff::clustering::{clustering_error, pam_kmedoids, DistanceMatrix};
use kdiff::tuning::{grid_search, TuningGrid};
use kdiff::datagen::build_univariate_dataset;
use kdiff::{kdiff, kdiff_squared, mmd2, EmbeddingCloud, KernelSpec, Method};
use proptest::prelude::*;

fn ok(check: Check) {
    if let Err(detail) = check {
        panic!("{detail}");
    }
}

#[test]
fn mmd_matches_triple_sum() {
    ok(check_mmd_oracle(200, 11));
}

#[test]
fn mpdist_matches_all_pairs() {
    ok(check_mpdist_oracle(200, 12));
}

#[test]
fn dtw_matches_path_enumeration() {
    ok(check_dtw_oracle(300, 13));
}

#[test]
fn pam_reaches_exhaustive_optimum() {
    ok(check_pam_oracle(200, 14));
}

#[test]
fn pairwise_matrix_matches_direct_calls() {
    ok(check_pairwise_direct(15));
}

#[test]
fn ks_properties() {
    ok(check_ks_suite(200, 16));
}

#[test]
fn kdiff_invariants() {
    ok(check_kdiff_invariants(17));
}

#[test]
fn separability_bounds() {
    ok(check_theorem(18));
}

#[test]
fn witness_sampling_rate() {
    ok(check_hoeffding(19));
}

#[test]
fn univariate_training_split_tunes_to_zero_errors() {
    let data = build_univariate_dataset(1.0, 5).unwrap();
    let train: Vec<_> = data.instances[..10].to_vec();
    let grid = TuningGrid {
        windows: vec![25, 50, 100],
        sigma_multipliers: vec![0.5, 1.0, 2.0],
        alphas: vec![0.02, 0.05, 0.1],
    };
    let res = grid_search(&train, Method::Kdiff, &grid, 0).unwrap();
    assert_eq!(res.train_errors, 0, "{:?}", res.best_spec);
    assert_eq!(res.evaluated.len(), 27);
}

fn cloud(points: &[Vec<f64>]) -> EmbeddingCloud {
    EmbeddingCloud::from_rows("p", points).unwrap()
}

fn points(max: usize, dim: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-5.0..5.0f64, dim), 1..max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kdiff_is_symmetric_and_bounded(x in points(25, 2), y in points(25, 2), sigma in 0.1..3.0f64, alpha in 0.01..0.99f64) {
        let k = KernelSpec::gaussian(sigma).unwrap();
        let (x, y) = (cloud(&x), cloud(&y));
        let v = kdiff(&k, &x, &y, alpha).unwrap();
        prop_assert!((v - kdiff(&k, &y, &x, alpha).unwrap()).abs() <= 1e-12);
        // |U| <= sup K = 1 for the Gaussian kernel
        prop_assert!((0.0..=1.0 + 1e-12).contains(&v));
        prop_assert_eq!(kdiff(&k, &x, &x, alpha).unwrap(), 0.0);
        let sq = kdiff_squared(&k, &x, &y, alpha).unwrap();
        prop_assert!((sq - v * v).abs() <= 1e-12 * sq.max(f64::MIN_POSITIVE));
    }

    #[test]
    fn kdiff_never_exceeds_higher_quantiles(x in points(20, 1), y in points(20, 1), a in 0.01..0.5f64, b in 0.5..0.99f64) {
        let k = KernelSpec::gaussian(1.0).unwrap();
        let (x, y) = (cloud(&x), cloud(&y));
        prop_assert!(kdiff(&k, &x, &y, a).unwrap() <= kdiff(&k, &x, &y, b).unwrap());
    }

    #[test]
    fn mmd_is_symmetric_and_nonnegative(x in points(20, 3), y in points(20, 3), sigma in 0.1..3.0f64) {
        let k = KernelSpec::gaussian(sigma).unwrap();
        let (x, y) = (cloud(&x), cloud(&y));
        let v = mmd2(&k, &x, &y).unwrap();
        prop_assert!(v >= 0.0);
        prop_assert!((v - mmd2(&k, &y, &x).unwrap()).abs() <= 1e-12);
        prop_assert!(mmd2(&k, &x, &x).unwrap() <= 1e-12);
    }

    #[test]
    fn clustering_error_ignores_cluster_names(labels in prop::collection::vec(0u32..2, 1..30), flip in any::<bool>()) {
        let assign: Vec<usize> = labels.iter().map(|&l| l as usize).collect();
        prop_assert_eq!(clustering_error(&assign, &labels).unwrap(), 0);
        let renamed: Vec<usize> = assign.iter().map(|&a| if flip { 1 - a } else { a + 5 }).collect();
        prop_assert_eq!(clustering_error(&renamed, &labels).unwrap(), 0);
        prop_assert!(clustering_error(&vec![0; labels.len()], &labels).unwrap() <= labels.len() / 2);
    }

    #[test]
    fn pam_output_is_consistent(pts in prop::collection::vec((-10.0..10.0f64, -10.0..10.0f64), 2..15), seed in any::<u64>()) {
        let ids = (0..pts.len()).map(|i| i.to_string()).collect();
        let d = DistanceMatrix::from_pairs(ids, |i, j| Ok(((pts[i].0 - pts[j].0).powi(2) + (pts[i].1 - pts[j].1).powi(2)).sqrt())).unwrap();
        let r = pam_kmedoids(&d, 2, seed, 3).unwrap();
        prop_assert!(r.medoids.windows(2).all(|w| w[0] < w[1]));
        let cost: f64 = (0..d.len()).map(|i| d.get(i, r.medoids[r.assignments[i]])).sum();
        prop_assert!((cost - r.total_cost).abs() <= 1e-9 * cost.max(1.0));
        for i in 0..d.len() {
            let own = d.get(i, r.medoids[r.assignments[i]]);
            prop_assert!(r.medoids.iter().all(|&m| own <= d.get(i, m)));
        }
        prop_assert_eq!(r, pam_kmedoids(&d, 2, seed, 3).unwrap());
    }
}
