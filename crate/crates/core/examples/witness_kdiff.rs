//! Two series with very different backgrounds that share a short motif:
//! kdiff at a low level sees the shared part, MMD sees mostly the
//! backgrounds.
//!
//! ```text
//! cargo run --release --example witness_kdiff
//! ```

use kdiff::rng::{stream_rng, Gaussian};
use kdiff::{embed, kdiff, mmd2, witness_profile, Instance, KernelSpec};

fn series(id: &str, level: f64, motif: Option<&[f64]>, seed: u64) -> kdiff::Result<Instance> {
    let mut g = Gaussian::new(stream_rng(seed, 0));
    let mut v: Vec<f64> = (0..300).map(|_| level + 0.3 * g.next()).collect();
    if let Some(m) = motif {
        v[100..100 + m.len()].copy_from_slice(m);
    }
    Instance::univariate(id, v)
}

fn main() -> kdiff::Result<()> {
    let motif: Vec<f64> = (0..40).map(|t| 4.0 * (t as f64 * 0.4).sin()).collect();
    let a = series("a", 0.0, Some(&motif), 1)?;
    let b = series("b", 6.0, Some(&motif), 2)?;
    let c = series("c", 6.0, None, 3)?;

    let window = 8;
    let k = KernelSpec::gaussian(1.0)?;
    let (xa, xb, xc) = (embed(&a, window)?, embed(&b, window)?, embed(&c, window)?);

    let profile = witness_profile(&k, &xa, &xb)?;
    let small = profile.t_values.iter().filter(|t| **t < 0.05).count();
    println!("witness |U| below 0.05 on {small} of {} pooled points", profile.t_values.len());

    println!("{:>6} {:>12} {:>12}", "alpha", "kdiff(a,b)", "kdiff(b,c)");
    for alpha in [0.02, 0.05, 0.1, 0.25, 0.5] {
        println!("{alpha:>6} {:>12.5} {:>12.5}", kdiff(&k, &xa, &xb, alpha)?, kdiff(&k, &xb, &xc, alpha)?);
    }
    println!("MMD²(a,b) = {:.4}, MMD²(b,c) = {:.4}", mmd2(&k, &xa, &xb)?, mmd2(&k, &xb, &xc)?);
    Ok(())
}
