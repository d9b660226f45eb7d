//! The comparison distances side by side, plus a full pairwise matrix.
//!
//! ```text
//! cargo run --release --example baselines
//! ```

use kdiff::pairwise::pairwise_matrix;
use kdiff::{dtw, embed, mmd2, mpdist, Instance, KernelSpec, MeasureSpec};

fn main() -> kdiff::Result<()> {
    let a = Instance::univariate("a", (0..120).map(|t| (t as f64 * 0.2).sin()).collect())?;
    let b = Instance::univariate("b", (0..120).map(|t| (t as f64 * 0.2 + 0.8).sin()).collect())?;
    let c = Instance::univariate("c", (0..120).map(|t| ((t % 20) as f64) / 10.0).collect())?;

    let (xa, xb) = (embed(&a, 10)?, embed(&b, 10)?);
    println!("phase-shifted sines:");
    println!("  MMD²   {:.6}", mmd2(&KernelSpec::gaussian(1.0)?, &xa, &xb)?);
    println!("  MPdist {:.6}", mpdist(&xa, &xb, 0.05)?);
    println!("  DTW    {:.6}", dtw(&a, &b)?);

    let all = [a, b, c];
    for spec in [
        MeasureSpec::Kdiff { window: 10, sigma: 1.0, alpha: 0.05 },
        MeasureSpec::Mpdist { window: 10, alpha: 0.05 },
        MeasureSpec::Dtw,
    ] {
        let m = pairwise_matrix(&all, &spec)?;
        println!("{} (squared):", spec.method());
        for i in 0..m.len() {
            let row: Vec<String> = m.row(i).iter().map(|v| format!("{v:10.4}")).collect();
            println!("  {} {}", m.ids()[i], row.join(" "));
        }
    }
    Ok(())
}
