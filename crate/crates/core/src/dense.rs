//! Row-major real matrices.

use crate::bits::BitMatrix;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl std::fmt::Debug for RealMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "RealMatrix({}x{})", self.rows, self.cols)
    }
}

impl RealMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RealMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Wraps row-major data, rejecting NaN and infinities.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Format(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / cols.max(1),
                col: pos % cols.max(1),
            });
        }
        Ok(RealMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Format("ragged rows".into()));
        }
        Self::from_vec(rows.len(), cols, rows.concat())
    }

    pub fn from_bits(bits: &BitMatrix) -> Self {
        let (rows, cols) = bits.shape();
        let mut data = vec![0.0; rows * cols];
        for i in 0..rows {
            for k in bits.support(i) {
                data[i * cols + k] = 1.0;
            }
        }
        RealMatrix { rows, cols, data }
    }

    /// Internal constructor for data already known to be finite.
    pub(crate) fn from_raw(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        RealMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn get(&self, i: usize, k: usize) -> f64 {
        self.data[i * self.cols + k]
    }

    /// Matrix whose row `perm[i]` is row `i` of `self`.
    pub fn scatter_rows(&self, perm: &[usize]) -> RealMatrix {
        assert_eq!(perm.len(), self.rows);
        let mut out = vec![0.0; self.data.len()];
        let c = self.cols;
        for (i, &target) in perm.iter().enumerate() {
            out[target * c..(target + 1) * c].copy_from_slice(self.row(i));
        }
        RealMatrix::from_raw(self.rows, c, out)
    }

    /// Matrix whose row `i` is row `perm[i]` of `self`.
    pub fn gather_rows(&self, perm: &[usize]) -> RealMatrix {
        assert_eq!(perm.len(), self.rows);
        let c = self.cols;
        let mut out = Vec::with_capacity(self.data.len());
        for &source in perm {
            out.extend_from_slice(self.row(source));
        }
        RealMatrix::from_raw(self.rows, c, out)
    }

    /// Squared Euclidean norm of each row.
    pub fn row_norms_sq(&self) -> Vec<f64> {
        (0..self.rows).map(|i| dot(self.row(i), self.row(i))).collect()
    }

    /// `self * other^T`, i.e. all row inner products.
    pub fn gram(&self, other: &RealMatrix) -> Vec<f64> {
        assert_eq!(self.cols, other.cols);
        let (n, m, k) = (self.rows, other.rows, self.cols);
        let mut out = vec![0.0; n * m];
        if n == 0 || m == 0 || k == 0 {
            return out;
        }
        // Mostly-zero inputs (noiseless features) take a sparse path.
        let nnz = self.data.iter().filter(|v| **v != 0.0).count();
        if nnz * 8 < self.data.len() {
            for i in 0..n {
                let support: Vec<(usize, f64)> = self
                    .row(i)
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| **v != 0.0)
                    .map(|(c, v)| (c, *v))
                    .collect();
                let out_row = &mut out[i * m..(i + 1) * m];
                for (j, o) in out_row.iter_mut().enumerate() {
                    let r = other.row(j);
                    *o = support.iter().map(|&(c, v)| v * r[c]).sum();
                }
            }
            return out;
        }
        unsafe {
            // SAFETY: the slices cover exactly the n*k, m*k and n*m
            // row-major extents described by the strides.
            matrixmultiply::dgemm(
                n,
                k,
                m,
                1.0,
                self.data.as_ptr(),
                k as isize,
                1,
                other.data.as_ptr(),
                1,
                k as isize,
                0.0,
                out.as_mut_ptr(),
                m as isize,
                1,
            );
        }
        out
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
