//! Monte-Carlo benchmark: repeated random train/test splits, parameter tuning
//! on the training part, and nearest-medoid classification of the test part.

mod report;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::baselines::{MeasureSpec, Method};
use crate::clustering::{assign_to_medoids, clustering_error};
use crate::datagen::{build_field_dataset, build_spherical_dataset, build_univariate_dataset, read_dataset, FieldDatasetSpec, LabeledDataset};
use crate::error::{Error, Result};
use crate::pairwise::DistanceCache;
use crate::rng::{derive_seed, stream_rng};
use crate::tuning::{grid_search_cached, TuningGrid, DEFAULT_KNN_K, DEFAULT_RESTARTS};

pub use report::{emit_report, format_percent, render_report, ReportFormat};

/// Where the instances come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DatasetSource {
    Univariate { tau_fg: f64 },
    Spherical,
    Fields(FieldDatasetSpec),
    /// A directory (or manifest file) written by `write_dataset`.
    External { path: PathBuf },
}

fn default_knn_k() -> usize {
    DEFAULT_KNN_K
}

fn default_restarts() -> usize {
    DEFAULT_RESTARTS
}

/// A benchmark run description, usually read from a JSON file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dataset: DatasetSource,
    pub methods: Vec<Method>,
    pub runs: usize,
    pub train_size: usize,
    pub test_size: usize,
    /// Per-method grid overrides; missing methods use the defaults.
    #[serde(default)]
    pub grids: BTreeMap<Method, TuningGrid>,
    pub seed: u64,
    #[serde(default = "default_knn_k")]
    pub knn_k: usize,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
}

/// Attempts at drawing a training split that contains both classes.
pub const MAX_SPLIT_ATTEMPTS: usize = 1000;

const DATA_STREAM: u64 = 0;
const SPLIT_STREAM: u64 = 1;
const CLUSTER_STREAM: u64 = 2;

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text)?;
        config.validate_fields()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    fn validate_fields(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::Config("runs must be at least 1".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("at least one method is required".into()));
        }
        if self.train_size < 2 || self.test_size == 0 {
            return Err(Error::Config("need train_size >= 2 and test_size >= 1".into()));
        }
        if self.knn_k == 0 || self.restarts == 0 {
            return Err(Error::Config("knn_k and restarts must be at least 1".into()));
        }
        if let DatasetSource::Univariate { tau_fg } = self.dataset {
            if !(tau_fg > 0.0 && tau_fg.is_finite()) {
                return Err(Error::Config(format!("tau_fg must be positive, got {tau_fg}")));
            }
        }
        for (method, grid) in &self.grids {
            grid.validate(*method)?;
        }
        Ok(())
    }

    /// Seed of the generated dataset.
    pub fn data_seed(&self) -> u64 {
        derive_seed(self.seed, DATA_STREAM)
    }

    pub fn load_dataset(&self) -> Result<LabeledDataset> {
        match &self.dataset {
            DatasetSource::Univariate { tau_fg } => build_univariate_dataset(*tau_fg, self.data_seed()),
            DatasetSource::Spherical => build_spherical_dataset(self.data_seed()),
            DatasetSource::Fields(spec) => build_field_dataset(spec, self.data_seed()),
            DatasetSource::External { path } => read_dataset(path),
        }
    }

    /// Grid for `method`, either configured or the default for the data kind.
    pub fn grid(&self, method: Method, dataset: &LabeledDataset) -> Result<TuningGrid> {
        if let Some(g) = self.grids.get(&method) {
            return Ok(g.restricted(method));
        }
        let kind = dataset
            .instances
            .first()
            .map(|i| i.kind())
            .ok_or_else(|| Error::Validation("dataset is empty".into()))?;
        Ok(TuningGrid::default_for(method, kind))
    }
}

/// Outcome of one method on one split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run: usize,
    pub test_errors: usize,
    pub train_errors: usize,
    pub chosen: MeasureSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodReport {
    pub method: Method,
    pub runs: Vec<RunRecord>,
    pub total_errors: usize,
    pub percent_error: f64,
    /// Wall-clock time spent on this method, excluded from CSV output.
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub runs: usize,
    pub test_size: usize,
    pub methods: Vec<MethodReport>,
}

impl RunReport {
    pub fn method(&self, method: Method) -> Option<&MethodReport> {
        self.methods.iter().find(|m| m.method == method)
    }
}

/// `total / (runs × test_size) × 100`.
pub fn percent_error(total: usize, runs: usize, test_size: usize) -> f64 {
    if runs == 0 || test_size == 0 {
        return 0.0;
    }
    total as f64 / (runs * test_size) as f64 * 100.0
}

/// A seeded split into training and test positions whose training part holds
/// at least two classes.
pub fn draw_split(labels: &[u32], train_size: usize, test_size: usize, seed: u64, run: usize) -> Result<(Vec<usize>, Vec<usize>)> {
    if train_size + test_size > labels.len() {
        return Err(Error::Config(format!(
            "train_size + test_size = {} exceeds the {} instances",
            train_size + test_size,
            labels.len()
        )));
    }
    let stream = derive_seed(seed, SPLIT_STREAM);
    for attempt in 0..MAX_SPLIT_ATTEMPTS {
        let mut order: Vec<usize> = (0..labels.len()).collect();
        order.shuffle(&mut stream_rng(derive_seed(stream, run as u64), attempt as u64));
        let train = order[..train_size].to_vec();
        if train.iter().any(|&i| labels[i] != labels[train[0]]) {
            let test = order[train_size..train_size + test_size].to_vec();
            return Ok((train, test));
        }
        log::info!("run {run}: single-class training split, resampling (attempt {attempt})");
    }
    Err(Error::DegenerateSplit(format!("no two-class training split after {MAX_SPLIT_ATTEMPTS} attempts")))
}

fn run_method(
    cache: &mut DistanceCache,
    config: &ExperimentConfig,
    method: Method,
    grid: &TuningGrid,
    train: &[usize],
    test: &[usize],
    labels: &[u32],
    run: usize,
) -> Result<RunRecord> {
    let pam_seed = derive_seed(derive_seed(config.seed, CLUSTER_STREAM), run as u64);
    let tuned = grid_search_cached(cache, train, method, grid, pam_seed, config.restarts)?;
    let medoids: Vec<usize> = tuned.clustering.medoids.iter().map(|&m| train[m]).collect();
    let to_medoids = test
        .iter()
        .map(|&t| medoids.iter().map(|&m| cache.distance(t, m, &tuned.best_spec)).collect())
        .collect::<Result<Vec<Vec<f64>>>>()?;
    let assigned = assign_to_medoids(&to_medoids);
    let truth: Vec<u32> = test.iter().map(|&t| labels[t]).collect();
    Ok(RunRecord {
        run,
        test_errors: clustering_error(&assigned, &truth)?,
        train_errors: tuned.train_errors,
        chosen: tuned.best_spec,
    })
}

/// Runs the benchmark on an already loaded dataset.
pub fn run_on_dataset(config: &ExperimentConfig, dataset: &LabeledDataset) -> Result<RunReport> {
    config.validate_fields()?;
    if config.train_size + config.test_size != dataset.len() {
        return Err(Error::Config(format!(
            "train_size + test_size = {} but the dataset has {} instances",
            config.train_size + config.test_size,
            dataset.len()
        )));
    }
    let labels = dataset
        .instances
        .iter()
        .map(|i| i.label.ok_or_else(|| Error::Validation(format!("instance {} has no label", i.id))))
        .collect::<Result<Vec<u32>>>()?;
    let grids = config
        .methods
        .iter()
        .map(|&m| config.grid(m, dataset))
        .collect::<Result<Vec<_>>>()?;
    let mut cache = DistanceCache::new(&dataset.instances, config.knn_k)?;
    let mut reports: Vec<MethodReport> = config
        .methods
        .iter()
        .map(|&method| MethodReport {
            method,
            runs: Vec::with_capacity(config.runs),
            total_errors: 0,
            percent_error: 0.0,
            seconds: 0.0,
        })
        .collect();
    for run in 0..config.runs {
        let (train, test) = draw_split(&labels, config.train_size, config.test_size, config.seed, run)?;
        for (report, grid) in reports.iter_mut().zip(&grids) {
            let start = Instant::now();
            let record = run_method(&mut cache, config, report.method, grid, &train, &test, &labels, run)?;
            report.seconds += start.elapsed().as_secs_f64();
            log::debug!("{} run {run}: {} test errors with {:?}", report.method, record.test_errors, record.chosen);
            report.runs.push(record);
        }
    }
    for report in &mut reports {
        report.total_errors = report.runs.iter().map(|r| r.test_errors).sum();
        report.percent_error = percent_error(report.total_errors, config.runs, config.test_size);
    }
    Ok(RunReport {
        runs: config.runs,
        test_size: config.test_size,
        methods: reports,
    })
}

/// Builds or loads the dataset and runs the benchmark.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunReport> {
    let dataset = config.load_dataset()?;
    run_on_dataset(config, &dataset)
}
