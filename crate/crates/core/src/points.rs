//! Datapoint containers: sparse rows as read from LIBSVM files and dense
//! matrices, both behind the [`PointSet`] trait consumed by featurization.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_len, Error, Result};
use crate::linalg::{dot, Matrix};

/// One sparse datapoint. Indices are 1-based and strictly ascending.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseRow {
    indices: Vec<u32>,
    values: Vec<f64>,
}

impl SparseRow {
    pub fn new(indices: Vec<u32>, values: Vec<f64>) -> Result<Self> {
        check_len(indices.len(), values.len())?;
        if indices.first() == Some(&0) {
            return Err(Error::InvalidArgument("sparse indices are 1-based"));
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("sparse indices must be strictly ascending"));
        }
        Ok(Self { indices, values })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    /// Largest index present, 0 for an empty row.
    pub fn max_index(&self) -> u32 {
        self.indices.last().copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.indices.iter().copied().zip(self.values.iter().copied())
    }
}

/// Rows plus optional labels. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    rows: Vec<SparseRow>,
    labels: Option<Vec<f64>>,
    dim: usize,
}

impl Dataset {
    /// `dim` defaults to the largest index seen; pass `Some(d)` to widen it
    /// (for example so a test split matches its training split).
    pub fn new(rows: Vec<SparseRow>, labels: Option<Vec<f64>>, dim: Option<usize>) -> Result<Self> {
        if let Some(l) = &labels {
            check_len(rows.len(), l.len())?;
        }
        let seen = rows.iter().map(|r| r.max_index() as usize).max().unwrap_or(0);
        let dim = match dim {
            Some(d) if d < seen => {
                return Err(Error::InvalidArgument("dim is smaller than the largest feature index"))
            }
            Some(d) => d,
            None => seen,
        };
        Ok(Self { rows, labels, dim })
    }

    pub fn from_dense(points: &Matrix, labels: Option<Vec<f64>>) -> Result<Self> {
        let rows = points
            .row_iter()
            .map(|r| {
                let (idx, val): (Vec<u32>, Vec<f64>) = r
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| **v != 0.0)
                    .map(|(k, v)| (k as u32 + 1, *v))
                    .unzip();
                SparseRow::new(idx, val)
            })
            .collect::<Result<Vec<_>>>()?;
        let rows = if points.cols() == 0 {
            vec![SparseRow::empty(); points.rows()]
        } else {
            rows
        };
        Self::new(rows, labels, Some(points.cols()))
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[SparseRow] {
        &self.rows
    }

    pub fn labels(&self) -> Option<&[f64]> {
        self.labels.as_deref()
    }

    /// Same rows with a wider `dim`.
    pub fn with_dim(mut self, dim: usize) -> Result<Self> {
        let seen = self.rows.iter().map(|r| r.max_index() as usize).max().unwrap_or(0);
        if dim < seen {
            return Err(Error::InvalidArgument("dim is smaller than the largest feature index"));
        }
        self.dim = dim;
        Ok(self)
    }

    /// Dense expansion of row `i` (0-based) with zeros at absent indices.
    pub fn dense_row(&self, i: usize) -> Result<Vec<f64>> {
        let row = self.rows.get(i).ok_or(Error::IndexOutOfRange {
            index: i,
            len: self.rows.len(),
        })?;
        let mut out = vec![0.0; self.dim];
        for (k, v) in row.iter() {
            out[k as usize - 1] = v;
        }
        Ok(out)
    }

    /// Keep only the listed rows, in the given order.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let mut rows = Vec::with_capacity(indices.len());
        let mut labels = self.labels.as_ref().map(|_| Vec::with_capacity(indices.len()));
        for &i in indices {
            let row = self.rows.get(i).ok_or(Error::IndexOutOfRange {
                index: i,
                len: self.rows.len(),
            })?;
            rows.push(row.clone());
            if let (Some(out), Some(src)) = (labels.as_mut(), self.labels.as_ref()) {
                out.push(src[i]);
            }
        }
        Self::new(rows, labels, Some(self.dim))
    }
}

/// Borrowed view of a single datapoint.
#[derive(Debug, Clone, Copy)]
pub enum PointRef<'a> {
    Dense(&'a [f64]),
    /// 1-based ascending indices, as in [`SparseRow`].
    Sparse { indices: &'a [u32], values: &'a [f64] },
}

impl PointRef<'_> {
    /// Inner product with a dense vector of length `dim`.
    #[inline]
    pub fn dot(&self, w: &[f64]) -> f64 {
        match *self {
            PointRef::Dense(x) => dot(x, w),
            PointRef::Sparse { indices, values } => indices
                .iter()
                .zip(values)
                .map(|(&k, &v)| w[k as usize - 1] * v)
                .sum(),
        }
    }

    pub fn to_dense(&self, dim: usize) -> Vec<f64> {
        match *self {
            PointRef::Dense(x) => x.to_vec(),
            PointRef::Sparse { indices, values } => {
                let mut out = vec![0.0; dim];
                for (&k, &v) in indices.iter().zip(values) {
                    out[k as usize - 1] = v;
                }
                out
            }
        }
    }
}

/// Anything that can hand out datapoints by 0-based index.
pub trait PointSet {
    fn len(&self) -> usize;
    fn dim(&self) -> usize;
    fn point(&self, i: usize) -> PointRef<'_>;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl PointSet for Dataset {
    fn len(&self) -> usize {
        self.rows.len()
    }
    fn dim(&self) -> usize {
        self.dim
    }
    fn point(&self, i: usize) -> PointRef<'_> {
        let r = &self.rows[i];
        PointRef::Sparse {
            indices: &r.indices,
            values: &r.values,
        }
    }
}

impl PointSet for Matrix {
    fn len(&self) -> usize {
        self.rows()
    }
    fn dim(&self) -> usize {
        self.cols()
    }
    fn point(&self, i: usize) -> PointRef<'_> {
        PointRef::Dense(self.row(i))
    }
}
