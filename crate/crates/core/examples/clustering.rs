//! k-medoids on a precomputed matrix, scoring against labels, and the
//! two-sample KS statistic.
//!
//! ```text
//! cargo run --example clustering
//! ```

use kdiff::{clustering_error, ks_two_sample, pam_kmedoids, DistanceMatrix};

fn main() -> kdiff::Result<()> {
    let points: [f64; 9] = [0.0, 0.4, 1.1, 0.7, 9.0, 9.5, 10.2, 8.8, 5.2];
    let labels = [0, 0, 0, 0, 1, 1, 1, 1, 1];
    let ids = (0..points.len()).map(|i| format!("p{i}")).collect();
    let d = DistanceMatrix::from_pairs(ids, |i, j| Ok((points[i] - points[j]).abs()))?;

    let result = pam_kmedoids(&d, 2, 42, 5)?;
    println!("medoids {:?}, total cost {:.2}", result.medoids, result.total_cost);
    println!("assignments {:?}", result.assignments);
    println!("errors against labels: {}", clustering_error(&result.assignments, &labels)?);

    let a = [0.1, 0.5, 0.9, 1.3, 2.0];
    let b = [1.0, 1.5, 2.5, 3.0];
    println!("KS(a, b) = {:.3}", ks_two_sample(&a, &b)?);
    Ok(())
}
