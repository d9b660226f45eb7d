//! Seeded synthetic datasets and plain-text dataset I/O.
//!
//! Three generators are provided: univariate AR series with a leading
//! class-specific foreground, their spherical three-channel analogue, and
//! square fields made of AR backgrounds with a constant class patch. Instance
//! `j` draws from its own seed stream, so any instance can be regenerated
//! without the others.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng as _, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::embedding::{Instance, InstanceKind};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, stream_rng, Gaussian, Rng};

/// `Y_t = mean + W_t`, `W_t = sum_i coefficients[i] W_{t-1-i} + noise_sd ε_t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ARModelSpec {
    pub coefficients: Vec<f64>,
    pub noise_sd: f64,
    pub mean: f64,
    pub length: usize,
    pub burn_in: usize,
}

impl ARModelSpec {
    pub fn order(&self) -> usize {
        self.coefficients.len()
    }

    fn validate(&self) -> Result<()> {
        if !(self.noise_sd >= 0.0 && self.noise_sd.is_finite()) {
            return Err(Error::domain(format!("noise sd must be nonnegative, got {}", self.noise_sd)));
        }
        if self.length == 0 {
            return Err(Error::domain("AR series length must be at least 1"));
        }
        if !self.mean.is_finite() || self.coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::domain("AR parameters must be finite"));
        }
        Ok(())
    }
}

/// Runs the recursion from `p` zero initial values for `burn_in + length`
/// steps and keeps the last `length`, shifted by the mean.
pub fn simulate_ar(spec: &ARModelSpec, seed: u64) -> Result<Vec<f64>> {
    spec.validate()?;
    let mut noise = Gaussian::new(Rng::seed_from_u64(seed));
    let p = spec.order();
    let total = spec.burn_in + spec.length;
    let mut w = vec![0.0; p + total];
    for t in p..p + total {
        let mut v = spec.noise_sd * noise.next();
        for (i, c) in spec.coefficients.iter().enumerate() {
            v += c * w[t - 1 - i];
        }
        w[t] = v;
    }
    Ok(w[p + spec.burn_in..].iter().map(|x| x + spec.mean).collect())
}

/// Instances plus the parameters that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledDataset {
    pub instances: Vec<Instance>,
    pub metadata: serde_json::Value,
}

impl LabeledDataset {
    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn labels(&self) -> Vec<Option<u32>> {
        self.instances.iter().map(|i| i.label).collect()
    }
}

/// Number of instances in the series datasets.
pub const SERIES_INSTANCES: usize = 21;
/// Length of every series instance.
pub const SERIES_LENGTH: usize = 1000;
/// Foreground lengths for odd (class A) and even (class B) instances.
pub const FOREGROUND_A: usize = 50;
pub const FOREGROUND_B: usize = 25;

const BACKGROUND_AR5: [f64; 5] = [0.5, 0.1, 0.1, 0.1, 0.1];
const FOREGROUND_AR1: f64 = 0.1;
const BURN_IN: usize = 500;

/// Background level of instance `j` (1-based).
pub fn background_mean(j: usize) -> f64 {
    match j {
        1..=10 => 100.0 * j as f64,
        11..=20 => 100.0 * (10.0 - j as f64),
        _ => 0.0,
    }
}

/// Class of instance `j`: its parity (1 for odd, class A; 0 for even, class B).
pub fn parity_label(j: usize) -> u32 {
    (j % 2) as u32
}

fn instance_id(j: usize) -> String {
    format!("z{j:02}")
}

const BACKGROUND_STREAM: u64 = 0;
const FOREGROUND_STREAM: u64 = 1;
const EXTRA_STREAM: u64 = 2;

/// Seed for sub-stream `part` of instance `j`.
fn part_seed(seed: u64, j: usize, part: u64) -> u64 {
    derive_seed(derive_seed(seed, j as u64), part)
}

fn ar(coefficients: &[f64], noise_sd: f64, mean: f64, length: usize) -> ARModelSpec {
    ARModelSpec {
        coefficients: coefficients.to_vec(),
        noise_sd,
        mean,
        length,
        burn_in: BURN_IN,
    }
}

/// 21 univariate series of length 1000. Odd `j` start with 50 samples of an
/// AR(1) foreground with mean 10 and noise sd `tau_fg`; even `j` start with 25
/// samples of an AR(1) foreground with mean −10 and unit noise. The rest is an
/// AR(5) background at level [`background_mean`].
pub fn build_univariate_dataset(tau_fg: f64, seed: u64) -> Result<LabeledDataset> {
    if !(tau_fg > 0.0 && tau_fg.is_finite()) {
        return Err(Error::domain(format!("foreground noise sd must be positive, got {tau_fg}")));
    }
    let instances = (1..=SERIES_INSTANCES)
        .map(|j| {
            let mut y = simulate_ar(
                &ar(&BACKGROUND_AR5, 1.0, background_mean(j), SERIES_LENGTH),
                part_seed(seed, j, BACKGROUND_STREAM),
            )?;
            let fg = if j % 2 == 1 {
                ar(&[FOREGROUND_AR1], tau_fg, 10.0, FOREGROUND_A)
            } else {
                ar(&[FOREGROUND_AR1], 1.0, -10.0, FOREGROUND_B)
            };
            let f = simulate_ar(&fg, part_seed(seed, j, FOREGROUND_STREAM))?;
            y[..f.len()].copy_from_slice(&f);
            Ok(Instance::univariate(instance_id(j), y)?.with_label(parity_label(j)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LabeledDataset {
        instances,
        metadata: serde_json::json!({
            "generator": "univariate",
            "tau_fg": tau_fg,
            "seed": seed,
            "instances": SERIES_INSTANCES,
            "length": SERIES_LENGTH,
        }),
    })
}

/// Fraction of each background partition left empty at its top, so that
/// neighboring partitions never touch.
pub const PARTITION_GAP: f64 = 0.01;

/// Angular band `[lo, hi)` of background `j` (1-based) among 21.
pub fn partition(j: usize) -> (f64, f64) {
    let width = PI / 2.0 / SERIES_INSTANCES as f64;
    ((j - 1) as f64 * width, j as f64 * width)
}

/// Min-max linear map of `values` onto `[lo, hi]`; constant input maps to
/// the midpoint.
pub fn rescale(values: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max <= min {
        return vec![0.5 * (lo + hi); values.len()];
    }
    values.iter().map(|v| lo + (v - min) / (max - min) * (hi - lo)).collect()
}

/// Point on the unit sphere for mapped angles `(a, b)`.
pub fn to_sphere(a: f64, b: f64) -> [f64; 3] {
    [b.sin() * a.cos(), b.sin() * a.sin(), b.cos()]
}

/// Pair of AR(1) series rescaled into `[lo, hi]`.
fn angle_pair(mean: f64, length: usize, lo: f64, hi: f64, seed: u64) -> Result<[Vec<f64>; 2]> {
    let spec = ar(&[FOREGROUND_AR1], 1.0, mean, length);
    let a = simulate_ar(&spec, derive_seed(seed, 0))?;
    let b = simulate_ar(&spec, derive_seed(seed, 1))?;
    Ok([rescale(&a, lo, hi), rescale(&b, lo, hi)])
}

/// 21 three-channel series of length 1000 on the unit sphere. Background `j`
/// is a pair of AR(1) series mapped into angular partition `j`; odd `j` start
/// with 50 samples mapped into `[π/2, 5π/8]`, even `j` with 25 samples mapped
/// into `[3π/4, 7π/8]`.
pub fn build_spherical_dataset(seed: u64) -> Result<LabeledDataset> {
    let instances = (1..=SERIES_INSTANCES)
        .map(|j| {
            let (lo, hi) = partition(j);
            let top = hi - PARTITION_GAP * (hi - lo);
            let [mut a, mut b] = angle_pair(background_mean(j), SERIES_LENGTH, lo, top, part_seed(seed, j, BACKGROUND_STREAM))?;
            let (mean, len, flo, fhi) = if j % 2 == 1 {
                (10.0, FOREGROUND_A, PI / 2.0, 5.0 * PI / 8.0)
            } else {
                (-10.0, FOREGROUND_B, 3.0 * PI / 4.0, 7.0 * PI / 8.0)
            };
            let [fa, fb] = angle_pair(mean, len, flo, fhi, part_seed(seed, j, FOREGROUND_STREAM))?;
            a[..len].copy_from_slice(&fa);
            b[..len].copy_from_slice(&fb);
            let mut channels: Vec<Vec<f64>> = (0..3).map(|_| Vec::with_capacity(SERIES_LENGTH)).collect();
            for (&ya, &yb) in a.iter().zip(&b) {
                for (c, v) in channels.iter_mut().zip(to_sphere(ya, yb)) {
                    c.push(v);
                }
            }
            Ok(Instance::multivariate(instance_id(j), channels)?.with_label(parity_label(j)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LabeledDataset {
        instances,
        metadata: serde_json::json!({
            "generator": "spherical",
            "seed": seed,
            "instances": SERIES_INSTANCES,
            "length": SERIES_LENGTH,
        }),
    })
}

/// Parameters of the synthetic patch-on-background field dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FieldDatasetSpec {
    pub side: usize,
    pub instances: usize,
    /// Side of the constant patch in class 1 and class 0 instances.
    pub patch_a: usize,
    pub patch_b: usize,
    /// Class 1 patches hold `+patch_value`, class 0 patches `-patch_value`.
    pub patch_value: f64,
    /// Instance `j` (1-based) has background level `j × offset_step`.
    pub offset_step: f64,
    /// Row and column AR(1) coefficients of the background.
    pub ar_row: f64,
    pub ar_col: f64,
    pub noise_sd: f64,
}

impl Default for FieldDatasetSpec {
    fn default() -> Self {
        Self {
            side: 28,
            instances: 20,
            patch_a: 10,
            patch_b: 8,
            patch_value: 15.0,
            offset_step: 40.0,
            ar_row: 0.4,
            ar_col: 0.4,
            noise_sd: 1.0,
        }
    }
}

/// Square field `W[r][c] = ar_row W[r-1][c] + ar_col W[r][c-1] + sd ε`,
/// simulated on a larger grid whose leading margin is discarded.
fn ar_field(spec: &FieldDatasetSpec, seed: u64) -> Vec<Vec<f64>> {
    const MARGIN: usize = 20;
    let n = spec.side + MARGIN;
    let mut noise = Gaussian::new(Rng::seed_from_u64(seed));
    let mut w = vec![vec![0.0; n]; n];
    for r in 0..n {
        for c in 0..n {
            let up = if r > 0 { w[r - 1][c] } else { 0.0 };
            let left = if c > 0 { w[r][c - 1] } else { 0.0 };
            w[r][c] = spec.ar_row * up + spec.ar_col * left + spec.noise_sd * noise.next();
        }
    }
    w[MARGIN..].iter().map(|row| row[MARGIN..].to_vec()).collect()
}

/// Fields with distinct per-instance background levels and one constant
/// patch at a random position; odd `j` get the class 1 patch.
pub fn build_field_dataset(spec: &FieldDatasetSpec, seed: u64) -> Result<LabeledDataset> {
    if spec.side == 0 || spec.patch_a > spec.side || spec.patch_b > spec.side || spec.instances == 0 {
        return Err(Error::domain("field dataset needs 1 <= patch sides <= side and at least one instance"));
    }
    let instances = (1..=spec.instances)
        .map(|j| {
            let mut rows = ar_field(spec, part_seed(seed, j, BACKGROUND_STREAM));
            let offset = spec.offset_step * j as f64;
            for v in rows.iter_mut().flatten() {
                *v += offset;
            }
            let (size, value) = if j % 2 == 1 {
                (spec.patch_a, spec.patch_value)
            } else {
                (spec.patch_b, -spec.patch_value)
            };
            let mut rng = stream_rng(part_seed(seed, j, EXTRA_STREAM), 0);
            let (r0, c0) = (rng.random_range(0..=spec.side - size), rng.random_range(0..=spec.side - size));
            for row in &mut rows[r0..r0 + size] {
                row[c0..c0 + size].fill(value);
            }
            Ok(Instance::field(instance_id(j), rows)?.with_label(parity_label(j)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LabeledDataset {
        instances,
        metadata: serde_json::json!({ "generator": "fields", "seed": seed, "spec": spec }),
    })
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        msg: msg.into(),
    }
}

/// Comma-separated numeric rows, split into blocks at blank lines.
fn parse_blocks(path: &Path, text: &str) -> Result<Vec<Vec<Vec<f64>>>> {
    let mut blocks: Vec<Vec<Vec<f64>>> = Vec::new();
    let mut current: Vec<Vec<f64>> = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            if !current.is_empty() {
                blocks.push(std::mem::take(&mut current));
            }
            continue;
        }
        let row = line
            .split(',')
            .map(|cell| {
                let cell = cell.trim();
                match cell.parse::<f64>() {
                    Ok(v) if v.is_finite() => Ok(v),
                    _ => Err(parse_err(path, n + 1, format!("not a finite number: {cell:?}"))),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = current.first() {
            if first.len() != row.len() {
                return Err(parse_err(path, n + 1, format!("expected {} columns, found {}", first.len(), row.len())));
            }
        }
        current.push(row);
    }
    if !current.is_empty() {
        blocks.push(current);
    }
    Ok(blocks)
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Reads a square field from a headerless CSV grid. Three blank-line
/// separated blocks are treated as color channels and averaged.
pub fn load_field_csv(path: impl AsRef<Path>) -> Result<Instance> {
    let path = path.as_ref();
    let blocks = parse_blocks(path, &read_text(path)?)?;
    let grid = match blocks.len() {
        1 => blocks.into_iter().next().expect("one block"),
        3 => {
            if blocks.iter().any(|b| b.len() != blocks[0].len() || b[0].len() != blocks[0][0].len()) {
                return Err(parse_err(path, 0, "channel blocks differ in shape"));
            }
            let mut out = blocks[0].clone();
            for (r, row) in out.iter_mut().enumerate() {
                for (c, v) in row.iter_mut().enumerate() {
                    *v = (blocks[0][r][c] + blocks[1][r][c] + blocks[2][r][c]) / 3.0;
                }
            }
            out
        }
        n => return Err(parse_err(path, 0, format!("expected 1 or 3 channel blocks, found {n}"))),
    };
    let id = path.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
    Instance::field(id, grid).map_err(|e| parse_err(path, 0, e.to_string()))
}

/// One manifest entry per instance file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub label: Option<u32>,
    #[serde(flatten)]
    pub kind: InstanceKind,
    pub file: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub instances: Vec<ManifestEntry>,
    pub metadata: serde_json::Value,
}

pub const MANIFEST_FILE: &str = "manifest.json";

fn instance_rows(inst: &Instance) -> Vec<Vec<f64>> {
    match inst.kind() {
        InstanceKind::Univariate => inst.values().iter().map(|&v| vec![v]).collect(),
        InstanceKind::Multivariate { channels } => (0..inst.len())
            .map(|t| (0..channels).map(|c| inst.channel(c)[t]).collect())
            .collect(),
        InstanceKind::Field2d { side } => inst.values().chunks(side).map(<[f64]>::to_vec).collect(),
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Writes `<id>.csv` per instance (one time step or field row per line,
/// channels as columns) and a `manifest.json` into `dir`.
pub fn write_dataset(dataset: &LabeledDataset, dir: impl AsRef<Path>) -> Result<PathBuf> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut entries = Vec::with_capacity(dataset.len());
    for inst in &dataset.instances {
        let file = format!("{}.csv", inst.id);
        let mut text = String::new();
        for row in instance_rows(inst) {
            let cells: Vec<String> = row.iter().map(f64::to_string).collect();
            text.push_str(&cells.join(","));
            text.push('\n');
        }
        write_file(&dir.join(&file), &text)?;
        entries.push(ManifestEntry {
            id: inst.id.clone(),
            label: inst.label,
            kind: inst.kind(),
            file,
        });
    }
    let manifest = Manifest {
        instances: entries,
        metadata: dataset.metadata.clone(),
    };
    let path = dir.join(MANIFEST_FILE);
    write_file(&path, &serde_json::to_string_pretty(&manifest)?)?;
    Ok(path)
}

/// Reads a dataset written by [`write_dataset`]; `path` is the manifest or
/// the directory holding it.
pub fn read_dataset(path: impl AsRef<Path>) -> Result<LabeledDataset> {
    let path = path.as_ref();
    let manifest_path = if path.is_dir() { path.join(MANIFEST_FILE) } else { path.to_path_buf() };
    let dir = manifest_path.parent().unwrap_or(Path::new("."));
    let manifest: Manifest = serde_json::from_str(&read_text(&manifest_path)?)
        .map_err(|e| parse_err(&manifest_path, e.line(), e.to_string()))?;
    let instances = manifest
        .instances
        .iter()
        .map(|entry| {
            let file = dir.join(&entry.file);
            let blocks = parse_blocks(&file, &read_text(&file)?)?;
            let rows = match blocks.len() {
                1 => blocks.into_iter().next().expect("one block"),
                n => return Err(parse_err(&file, 0, format!("expected one block, found {n}"))),
            };
            let shape_err = |e: Error| parse_err(&file, 0, e.to_string());
            let inst = match entry.kind {
                InstanceKind::Univariate => {
                    if rows[0].len() != 1 {
                        return Err(parse_err(&file, 1, "univariate rows must hold one value"));
                    }
                    Instance::univariate(&entry.id, rows.into_iter().map(|r| r[0]).collect()).map_err(shape_err)?
                }
                InstanceKind::Multivariate { channels } => {
                    if rows[0].len() != channels {
                        return Err(parse_err(&file, 1, format!("expected {channels} columns")));
                    }
                    let cols = (0..channels).map(|c| rows.iter().map(|r| r[c]).collect()).collect();
                    Instance::multivariate(&entry.id, cols).map_err(shape_err)?
                }
                InstanceKind::Field2d { side } => {
                    if rows.len() != side {
                        return Err(parse_err(&file, 0, format!("expected {side} rows")));
                    }
                    Instance::field(&entry.id, rows).map_err(shape_err)?
                }
            };
            Ok(match entry.label {
                Some(l) => inst.with_label(l),
                None => inst,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LabeledDataset {
        instances,
        metadata: manifest.metadata,
    })
}

/// Reads every `*.csv` field in `dir` (sorted by name), unlabeled.
pub fn load_field_dir(dir: impl AsRef<Path>) -> Result<Vec<Instance>> {
    let dir = dir.as_ref();
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .collect();
    paths.sort();
    paths.iter().map(load_field_csv).collect()
}
