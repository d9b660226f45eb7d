//! Sliding-window embeddings of the three instance kinds.
//!
//! ```text
//! cargo run --example embedding
//! ```

use kdiff::{embed, knn_distance_scale, Instance};

fn main() -> kdiff::Result<()> {
    let series = Instance::univariate("ramp", (0..8).map(f64::from).collect())?;
    let cloud = embed(&series, 3)?;
    println!("univariate: {} windows of dimension {}", cloud.len(), cloud.dim());
    for row in cloud.rows().take(3) {
        println!("  {row:?}");
    }

    let two = Instance::multivariate("xy", vec![vec![0.0, 1.0, 2.0, 3.0], vec![10.0, 11.0, 12.0, 13.0]])?;
    let cloud = embed(&two, 2)?;
    println!("bivariate, SL = 2: rows hold (x_t, y_t, x_t+1, y_t+1)");
    for row in cloud.rows() {
        println!("  {row:?}");
    }

    let rows: Vec<Vec<f64>> = (0..5).map(|i| (0..5).map(|j| (i * 5 + j) as f64).collect()).collect();
    let field = Instance::field("grid", rows)?;
    let patches = embed(&field, 2)?;
    println!("5x5 field: {} patches of dimension {}", patches.len(), patches.dim());
    println!("  first patch {:?}", patches.row(0));

    let noisy = Instance::univariate("wave", (0..200).map(|t| (t as f64 * 0.3).sin()).collect())?;
    let z = embed(&noisy, 10)?;
    println!("mean 5-NN distance of a sine embedding: {:.4}", knn_distance_scale(&z, 5)?);
    Ok(())
}
