//! A small benchmark from a JSON config, rendered in every report format.
//!
//! ```text
//! cargo run --release --example benchmark_report
//! ```

use kdiff::harness::{render_report, run_experiment, ExperimentConfig, ReportFormat};

const CONFIG: &str = r#"{
    "dataset": {"kind": "univariate", "tau_fg": 1.0},
    "methods": ["kdiff", "mpdist", "dtw"],
    "runs": 2,
    "train_size": 10,
    "test_size": 11,
    "seed": 99,
    "grids": {
        "kdiff": {"windows": [5, 10], "sigma_multipliers": [0.5, 1.0], "alphas": [0.01, 0.05]},
        "mpdist": {"windows": [5, 10], "alphas": [0.01, 0.05]}
    }
}"#;

fn main() -> kdiff::Result<()> {
    let config = ExperimentConfig::from_json(CONFIG)?;
    let report = run_experiment(&config)?;
    for format in [ReportFormat::Table, ReportFormat::Csv, ReportFormat::Json] {
        println!("--- {format:?}");
        print!("{}", render_report(&report, format)?);
    }
    Ok(())
}
