//! Parameter selection on a training split of the univariate dataset.
//!
//! ```text
//! cargo run --release --example tuning
//! ```

use kdiff::datagen::build_univariate_dataset;
use kdiff::tuning::{grid_search, sigma_grid, TuningGrid, DEFAULT_KNN_K};
use kdiff::{InstanceKind, Method};

fn main() -> kdiff::Result<()> {
    let data = build_univariate_dataset(1.0, 11)?;
    let train = &data.instances[..10];

    let multipliers = [0.5, 1.0, 2.0];
    println!("sigma candidates at SL = 10: {:?}", sigma_grid(train, 10, &multipliers, DEFAULT_KNN_K)?);

    for method in [Method::Kdiff, Method::Mpdist, Method::Dtw] {
        let grid = TuningGrid::default_for(method, InstanceKind::Univariate);
        let result = grid_search(train, method, &grid, 0)?;
        println!(
            "{method}: {} combinations, best {:?} with {} training errors",
            result.evaluated.len(),
            result.best_spec,
            result.train_errors
        );
    }
    Ok(())
}
