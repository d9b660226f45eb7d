//! Runs the desk-scale benchmarks on the synthetic datasets and prints one
//! error table per dataset.
//!
//! ```text
//! cargo run --release --example reproduce_tables -- [univariate|noisy|spherical|fields|all] [runs]
//! ```

use std::time::Instant;

use kdiff::datagen::FieldDatasetSpec;
use kdiff::harness::{render_report, run_experiment, DatasetSource, ExperimentConfig, ReportFormat};
use kdiff::Method;

fn config(name: &str, runs: usize) -> Option<ExperimentConfig> {
    let (dataset, train_size, test_size) = match name {
        "univariate" => (DatasetSource::Univariate { tau_fg: 1.0 }, 10, 11),
        "noisy" => (DatasetSource::Univariate { tau_fg: 10.0 }, 10, 11),
        "spherical" => (DatasetSource::Spherical, 10, 11),
        "fields" => (DatasetSource::Fields(FieldDatasetSpec::default()), 10, 10),
        _ => return None,
    };
    Some(ExperimentConfig {
        dataset,
        methods: Method::ALL.to_vec(),
        runs,
        train_size,
        test_size,
        grids: Default::default(),
        seed: 2024,
        knn_k: kdiff::tuning::DEFAULT_KNN_K,
        restarts: kdiff::tuning::DEFAULT_RESTARTS,
    })
}

fn main() -> kdiff::Result<()> {
    let mut args = std::env::args().skip(1);
    let which = args.next().unwrap_or_else(|| "all".into());
    let runs = args.next().and_then(|r| r.parse().ok()).unwrap_or(10);
    let names: Vec<&str> = match which.as_str() {
        "all" => vec!["univariate", "noisy", "spherical", "fields"],
        other => vec![other],
    };
    for name in names {
        let Some(cfg) = config(name, runs) else {
            eprintln!("unknown dataset {name:?}");
            std::process::exit(2);
        };
        let start = Instant::now();
        let report = run_experiment(&cfg)?;
        println!("== {name} ({:.1}s)", start.elapsed().as_secs_f64());
        print!("{}", render_report(&report, ReportFormat::Table)?);
        for m in &report.methods {
            let chosen: Vec<String> = m.runs.iter().map(|r| format!("{:?}", r.chosen)).collect();
            println!("  {} {:.1}s: {}", m.method, m.seconds, chosen.join(" | "));
        }
    }
    Ok(())
}
