use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use kdiff::datagen::{build_field_dataset, build_spherical_dataset, build_univariate_dataset, read_dataset, write_dataset, FieldDatasetSpec};
use kdiff::harness::{render_report, run_experiment, ExperimentConfig, ReportFormat};
use kdiff::pairwise::pairwise_matrix;
use kdiff::tuning::{grid_search, TuningGrid};
use kdiff::{pam_kmedoids, DistanceMatrix, Error, MeasureSpec, Method, Result};

#[derive(Parser)]
#[command(version, about = "kdiff distances, clustering and benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Generator {
    Univariate,
    Spherical,
    Fields,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
    Table,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => ReportFormat::Csv,
            Format::Json => ReportFormat::Json,
            Format::Table => ReportFormat::Table,
        }
    }
}

#[derive(clap::Args)]
struct SpecArgs {
    /// kdiff, mmd, mpdist or dtw
    #[arg(long)]
    method: Method,
    #[arg(long)]
    window: Option<usize>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
}

impl SpecArgs {
    fn spec(&self) -> Result<MeasureSpec> {
        let need = |v: Option<f64>, what: &str| v.ok_or_else(|| Error::Config(format!("{} needs --{what}", self.method)));
        let window = || self.window.ok_or_else(|| Error::Config(format!("{} needs --window", self.method)));
        let spec = match self.method {
            Method::Kdiff => MeasureSpec::Kdiff {
                window: window()?,
                sigma: need(self.sigma, "sigma")?,
                alpha: need(self.alpha, "alpha")?,
            },
            Method::Mmd => MeasureSpec::Mmd {
                window: window()?,
                sigma: need(self.sigma, "sigma")?,
            },
            Method::Mpdist => MeasureSpec::Mpdist {
                window: window()?,
                alpha: self.alpha.unwrap_or(kdiff::baselines::MPDIST_DEFAULT_ALPHA),
            },
            Method::Dtw => MeasureSpec::Dtw,
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset as instance CSVs plus a manifest.
    Gen {
        generator: Generator,
        #[arg(long, default_value_t = 1.0)]
        tau_fg: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Pairwise squared distance matrix of a dataset, as CSV.
    Dist {
        #[arg(long)]
        data: PathBuf,
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// k-medoids clustering of a distance matrix CSV.
    Cluster {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        restarts: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Select parameters for one method on a labeled dataset.
    Tune {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        method: Method,
        /// JSON file with windows, sigma_multipliers and alphas.
        #[arg(long)]
        grid: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a benchmark described by a JSON config file.
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn matrix_csv(m: &DistanceMatrix) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(std::iter::once("id").chain(m.ids().iter().map(String::as_str)))?;
    for (i, id) in m.ids().iter().enumerate() {
        let row: Vec<String> = m.row(i).iter().map(f64::to_string).collect();
        w.write_record(std::iter::once(id.as_str()).chain(row.iter().map(String::as_str)))?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| Error::Validation(e.to_string()))?).expect("utf-8"))
}

fn read_matrix(path: &Path) -> Result<DistanceMatrix> {
    let parse = |line: usize, msg: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut r = csv::Reader::from_path(path)?;
    let ids: Vec<String> = r.headers()?.iter().skip(1).map(str::to_string).collect();
    let mut values = Vec::with_capacity(ids.len() * ids.len());
    for (n, rec) in r.records().enumerate() {
        let rec = rec?;
        for cell in rec.iter().skip(1) {
            values.push(cell.trim().parse::<f64>().map_err(|e| parse(n + 2, format!("{cell:?}: {e}")))?);
        }
    }
    DistanceMatrix::new(ids, values)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen {
            generator,
            tau_fg,
            seed,
            out,
        } => {
            let data = match generator {
                Generator::Univariate => build_univariate_dataset(tau_fg, seed)?,
                Generator::Spherical => build_spherical_dataset(seed)?,
                Generator::Fields => build_field_dataset(&FieldDatasetSpec::default(), seed)?,
            };
            let manifest = write_dataset(&data, &out)?;
            println!("wrote {} instances, manifest {}", data.len(), manifest.display());
        }
        Command::Dist { data, spec, out } => {
            let spec = spec.spec()?;
            let data = read_dataset(&data)?;
            let m = pairwise_matrix(&data.instances, &spec)?;
            emit(&matrix_csv(&m)?, out.as_deref())?;
        }
        Command::Cluster {
            matrix,
            k,
            seed,
            restarts,
            out,
        } => {
            let m = read_matrix(&matrix)?;
            let result = pam_kmedoids(&m, k, seed, restarts)?;
            let mut text = String::from("id,cluster,medoid\n");
            for (i, id) in m.ids().iter().enumerate() {
                let is_medoid = result.medoids.contains(&i);
                text.push_str(&format!("{id},{},{is_medoid}\n", result.assignments[i]));
            }
            emit(&text, out.as_deref())?;
        }
        Command::Tune {
            data,
            method,
            grid,
            seed,
            out,
        } => {
            let data = read_dataset(&data)?;
            let grid = match grid {
                Some(path) => {
                    let text = std::fs::read_to_string(&path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
                    serde_json::from_str::<TuningGrid>(&text)?.restricted(method)
                }
                None => {
                    let kind = data.instances.first().ok_or_else(|| Error::Validation("empty dataset".into()))?.kind();
                    TuningGrid::default_for(method, kind)
                }
            };
            let result = grid_search(&data.instances, method, &grid, seed)?;
            emit(&(serde_json::to_string_pretty(&result)? + "\n"), out.as_deref())?;
        }
        Command::Bench { config, format, out } => {
            let config = ExperimentConfig::load(&config)?;
            let report = run_experiment(&config)?;
            emit(&render_report(&report, format.into())?, out.as_deref())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
