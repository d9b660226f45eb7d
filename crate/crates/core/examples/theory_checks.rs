//! Separability bounds on explicit mixtures and the sampling rate of the
//! empirical witness.
//!
//! ```text
//! cargo run --release --example theory_checks
//! ```

use kdiff::witness::{hoeffding_rate_check, mixture_kdiff, theorem_bound_check, Mixture};
use kdiff::{DiscreteMeasure, EmbeddingCloud, KernelSpec};

fn atoms(points: &[f64]) -> kdiff::Result<DiscreteMeasure> {
    let rows: Vec<Vec<f64>> = points.iter().map(|&p| vec![p]).collect();
    Ok(DiscreteMeasure::uniform(EmbeddingCloud::from_rows("atoms", &rows)?))
}

fn main() -> kdiff::Result<()> {
    let k = KernelSpec::indicator(0.5)?;
    let delta = 0.25;
    let shared = atoms(&[0.0, 0.1, 0.2])?;
    let m1 = Mixture::new(shared.clone(), atoms(&[10.0, 10.1, 10.2])?)?;
    let m2 = Mixture::new(shared, atoms(&[20.0, 20.1, 20.2])?)?;
    println!("shared foreground, weight {delta}:");
    for alpha in [0.1, 0.2, 0.24, 0.3, 0.6] {
        println!("  kdiff at alpha {alpha}: {:.4}", mixture_kdiff(&k, delta, &m1, &m2, alpha)?);
    }
    let report = theorem_bound_check(&k, delta, 0.1, &m1, &m2)?;
    println!("  phi_B = {:.3}, upper bound {:?}", report.phi_b, report.shared_foreground);

    let m3 = Mixture::new(atoms(&[-5.0, -5.1])?, atoms(&[20.0, 20.1])?)?;
    let report = theorem_bound_check(&k, delta, 0.1, &m1, &m3)?;
    println!("separated foregrounds: psi = {:.3}, lower bound {:?}", report.psi, report.separated_foreground);

    let mu = atoms(&[-1.0, 0.0, 0.5, 2.0])?;
    let rate = hoeffding_rate_check(&KernelSpec::gaussian(1.0)?, &mu, &[100, 400, 1600], 20, 3)?;
    println!("witness sup error by sample size {:?}: {:.4?}", rate.sample_sizes, rate.median_errors);
    println!("ratios per 4x step {:.3?} (expected near 0.5)", rate.ratios);
    Ok(())
}
