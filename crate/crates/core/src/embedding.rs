//! Sliding-window embeddings of series and fields into point clouds.
//!
//! Every distance in this crate operates on an [`EmbeddingCloud`]: the set of
//! all contiguous windows of an [`Instance`], each flattened to a point in
//! `R^L`. Windows are emitted in increasing offset order (row-major offsets
//! for fields) and are never normalized.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Layout of an instance's values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InstanceKind {
    /// A single series of length `n`.
    Univariate,
    /// `channels` series of equal length, stored channel-major.
    Multivariate { channels: usize },
    /// A square `side × side` grid, stored row-major.
    Field2d { side: usize },
}

/// A labeled gridded data object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub id: String,
    pub label: Option<u32>,
    kind: InstanceKind,
    values: Vec<f64>,
}

fn check_finite(values: &[f64]) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::domain("instance values must be finite"))
    }
}

impl Instance {
    pub fn univariate(id: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("series must have at least one value"));
        }
        check_finite(&values)?;
        Ok(Self {
            id: id.into(),
            label: None,
            kind: InstanceKind::Univariate,
            values,
        })
    }

    /// Builds a p-variate series from one vector per channel.
    pub fn multivariate(id: impl Into<String>, channels: Vec<Vec<f64>>) -> Result<Self> {
        let p = channels.len();
        if p == 0 {
            return Err(Error::domain("multivariate series needs at least one channel"));
        }
        let n = channels[0].len();
        if n == 0 {
            return Err(Error::domain("series must have at least one value"));
        }
        let mut values = Vec::with_capacity(p * n);
        for c in &channels {
            if c.len() != n {
                return Err(Error::Shape {
                    expected: n,
                    found: c.len(),
                });
            }
            values.extend_from_slice(c);
        }
        check_finite(&values)?;
        Ok(Self {
            id: id.into(),
            label: None,
            kind: InstanceKind::Multivariate { channels: p },
            values,
        })
    }

    /// Builds a square field from its rows.
    pub fn field(id: impl Into<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let side = rows.len();
        if side == 0 {
            return Err(Error::domain("field must have at least one row"));
        }
        let mut values = Vec::with_capacity(side * side);
        for r in &rows {
            if r.len() != side {
                return Err(Error::Shape {
                    expected: side,
                    found: r.len(),
                });
            }
            values.extend_from_slice(r);
        }
        check_finite(&values)?;
        Ok(Self {
            id: id.into(),
            label: None,
            kind: InstanceKind::Field2d { side },
            values,
        })
    }

    pub fn with_label(mut self, label: u32) -> Self {
        self.label = Some(label);
        self
    }

    pub fn kind(&self) -> InstanceKind {
        self.kind
    }

    /// Raw storage: channel-major for multivariate series, row-major for fields.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Number of time points (series) or the side length (fields).
    pub fn len(&self) -> usize {
        match self.kind {
            InstanceKind::Univariate => self.values.len(),
            InstanceKind::Multivariate { channels } => self.values.len() / channels,
            InstanceKind::Field2d { side } => side,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn channels(&self) -> usize {
        match self.kind {
            InstanceKind::Multivariate { channels } => channels,
            _ => 1,
        }
    }

    /// Channel `c` of a series (the whole series for univariate data).
    pub fn channel(&self, c: usize) -> &[f64] {
        let n = self.len();
        &self.values[c * n..(c + 1) * n]
    }

    /// The sample at time `t` across channels, written into `out`.
    pub(crate) fn sample_into(&self, t: usize, out: &mut [f64]) {
        let n = self.len();
        for (c, o) in out.iter_mut().enumerate() {
            *o = self.values[c * n + t];
        }
    }
}

/// The `m × L` matrix of windows of one instance (or any point set in `R^L`).
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingCloud {
    points: Vec<f64>,
    dim: usize,
    pub source_id: String,
    pub window: usize,
}

impl EmbeddingCloud {
    /// Wraps arbitrary points, all of dimension `dim`.
    pub fn from_rows(source_id: impl Into<String>, rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map(Vec::len).unwrap_or(0);
        if rows.is_empty() || dim == 0 {
            return Err(Error::domain("a cloud needs at least one point of positive dimension"));
        }
        let mut points = Vec::with_capacity(rows.len() * dim);
        for r in rows {
            if r.len() != dim {
                return Err(Error::Shape {
                    expected: dim,
                    found: r.len(),
                });
            }
            points.extend_from_slice(r);
        }
        check_finite(&points)?;
        Ok(Self {
            points,
            dim,
            source_id: source_id.into(),
            window: 0,
        })
    }

    pub(crate) fn from_flat(source_id: impl Into<String>, points: Vec<f64>, dim: usize, window: usize) -> Self {
        debug_assert!(dim > 0 && points.len().is_multiple_of(dim));
        Self {
            points,
            dim,
            source_id: source_id.into(),
            window,
        }
    }

    /// Number of points `m`.
    pub fn len(&self) -> usize {
        self.points.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Ambient dimension `L`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.points.chunks_exact(self.dim)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.points
    }

    /// `self` followed by `other`, as one cloud.
    pub fn concat(&self, other: &EmbeddingCloud) -> Result<EmbeddingCloud> {
        if self.dim != other.dim {
            return Err(Error::Shape {
                expected: self.dim,
                found: other.dim,
            });
        }
        let mut points = self.points.clone();
        points.extend_from_slice(&other.points);
        Ok(Self::from_flat(
            format!("{}+{}", self.source_id, other.source_id),
            points,
            self.dim,
            self.window,
        ))
    }
}

fn check_window(window: usize, len: usize) -> Result<()> {
    if window < 1 || window > len {
        Err(Error::InvalidWindow { window, len })
    } else {
        Ok(())
    }
}

/// All `n - SL + 1` windows of a univariate series.
pub fn embed_univariate(series: &Instance, window: usize) -> Result<EmbeddingCloud> {
    if series.kind() != InstanceKind::Univariate {
        return Err(Error::domain("embed_univariate needs a univariate instance"));
    }
    let values = series.values();
    check_window(window, values.len())?;
    let m = values.len() - window + 1;
    let mut points = Vec::with_capacity(m * window);
    for w in values.windows(window) {
        points.extend_from_slice(w);
    }
    Ok(EmbeddingCloud::from_flat(series.id.clone(), points, window, window))
}

/// Windows over time of a p-variate series; each row holds `SL` consecutive
/// samples, all channels of one time step before the next (`L = p * SL`).
pub fn embed_multivariate(series: &Instance, window: usize) -> Result<EmbeddingCloud> {
    let p = match series.kind() {
        InstanceKind::Multivariate { channels } => channels,
        InstanceKind::Univariate => 1,
        InstanceKind::Field2d { .. } => {
            return Err(Error::domain("embed_multivariate needs a series"));
        }
    };
    let n = series.len();
    check_window(window, n)?;
    // time-major copy so every window is a contiguous slice
    let mut interleaved = vec![0.0; n * p];
    for t in 0..n {
        series.sample_into(t, &mut interleaved[t * p..(t + 1) * p]);
    }
    let m = n - window + 1;
    let dim = p * window;
    let mut points = Vec::with_capacity(m * dim);
    for start in 0..m {
        points.extend_from_slice(&interleaved[start * p..start * p + dim]);
    }
    Ok(EmbeddingCloud::from_flat(series.id.clone(), points, dim, window))
}

/// All `(n - SL + 1)^2` square patches of a field, each flattened row-major.
pub fn embed_field(field: &Instance, window: usize) -> Result<EmbeddingCloud> {
    let side = match field.kind() {
        InstanceKind::Field2d { side } => side,
        _ => return Err(Error::domain("embed_field needs a 2-D field")),
    };
    check_window(window, side)?;
    let values = field.values();
    let per_axis = side - window + 1;
    let dim = window * window;
    let mut points = Vec::with_capacity(per_axis * per_axis * dim);
    for i in 0..per_axis {
        for j in 0..per_axis {
            for r in 0..window {
                let start = (i + r) * side + j;
                points.extend_from_slice(&values[start..start + window]);
            }
        }
    }
    Ok(EmbeddingCloud::from_flat(field.id.clone(), points, dim, window))
}

/// Embeds any instance with the embedding matching its kind.
pub fn embed(instance: &Instance, window: usize) -> Result<EmbeddingCloud> {
    match instance.kind() {
        InstanceKind::Univariate => embed_univariate(instance, window),
        InstanceKind::Multivariate { .. } => embed_multivariate(instance, window),
        InstanceKind::Field2d { .. } => embed_field(instance, window),
    }
}
