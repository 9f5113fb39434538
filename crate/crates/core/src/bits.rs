//! Row-major bit-packed binary matrices.
//!
//! Row `i` occupies `words_per_row` consecutive `u64` words; column `k` is bit
//! `k % 64` of word `k / 64`. Padding bits past the last column are always
//! zero, so popcounts over whole words are exact.

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    words: Vec<u64>,
}

impl std::fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BitMatrix({}x{})", self.rows, self.cols)
    }
}

#[inline]
fn words_for(cols: usize) -> usize {
    cols.div_ceil(64)
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words_per_row = words_for(cols);
        BitMatrix {
            rows,
            cols,
            words_per_row,
            words: vec![0; rows * words_per_row],
        }
    }

    pub fn ones(rows: usize, cols: usize) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for k in 0..cols {
                m.set(i, k, true);
            }
        }
        m
    }

    /// Builds a matrix from packed row words. Fails if a padding bit is set.
    pub fn from_words(rows: usize, cols: usize, words: Vec<u64>) -> Result<Self> {
        let words_per_row = words_for(cols);
        if words.len() != rows * words_per_row {
            return Err(Error::Format(format!(
                "expected {} words for a {rows}x{cols} bit matrix, got {}",
                rows * words_per_row,
                words.len()
            )));
        }
        let m = BitMatrix {
            rows,
            cols,
            words_per_row,
            words,
        };
        let mask = m.tail_mask();
        if words_per_row > 0 && (0..rows).any(|i| m.row(i)[words_per_row - 1] & !mask != 0) {
            return Err(Error::Format("padding bits set past last column".into()));
        }
        Ok(m)
    }

    /// Assembles a matrix from independently produced packed rows.
    pub fn from_rows(cols: usize, rows: Vec<Vec<u64>>) -> Self {
        let words_per_row = words_for(cols);
        let n = rows.len();
        let mut words = Vec::with_capacity(n * words_per_row);
        for r in rows {
            assert_eq!(r.len(), words_per_row);
            words.extend_from_slice(&r);
        }
        BitMatrix {
            rows: n,
            cols,
            words_per_row,
            words,
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for k in 0..cols {
                if f(i, k) {
                    m.set(i, k, true);
                }
            }
        }
        m
    }

    fn tail_mask(&self) -> u64 {
        match self.cols % 64 {
            0 => u64::MAX,
            r => (1u64 << r) - 1,
        }
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

    pub fn words_per_row(&self) -> usize {
        self.words_per_row
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u64] {
        &self.words[i * self.words_per_row..(i + 1) * self.words_per_row]
    }

    #[inline]
    pub fn get(&self, i: usize, k: usize) -> bool {
        debug_assert!(i < self.rows && k < self.cols);
        self.row(i)[k / 64] >> (k % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, k: usize, value: bool) {
        assert!(i < self.rows && k < self.cols, "index out of bounds");
        let w = &mut self.words[i * self.words_per_row + k / 64];
        let bit = 1u64 << (k % 64);
        if value {
            *w |= bit;
        } else {
            *w &= !bit;
        }
    }

    /// Number of ones in row `i`.
    #[inline]
    pub fn row_count(&self, i: usize) -> u32 {
        self.row(i).iter().map(|w| w.count_ones()).sum()
    }

    /// Total number of ones.
    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// Column indices of the ones in row `i`, ascending.
    pub fn support(&self, i: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for (wi, &w) in self.row(i).iter().enumerate() {
            let mut w = w;
            while w != 0 {
                let b = w.trailing_zeros() as usize;
                out.push(wi * 64 + b);
                w &= w - 1;
            }
        }
        out
    }

    /// Matrix whose row `perm[i]` is row `i` of `self`.
    pub fn scatter_rows(&self, perm: &[usize]) -> BitMatrix {
        assert_eq!(perm.len(), self.rows);
        let mut out = BitMatrix::zeros(self.rows, self.cols);
        let w = self.words_per_row;
        for (i, &target) in perm.iter().enumerate() {
            out.words[target * w..(target + 1) * w].copy_from_slice(self.row(i));
        }
        out
    }

    /// Matrix whose row `i` is row `perm[i]` of `self`.
    pub fn gather_rows(&self, perm: &[usize]) -> BitMatrix {
        assert_eq!(perm.len(), self.rows);
        let mut out = BitMatrix::zeros(self.rows, self.cols);
        let w = self.words_per_row;
        for (i, &source) in perm.iter().enumerate() {
            out.words[i * w..(i + 1) * w].copy_from_slice(self.row(source));
        }
        out
    }

    /// Number of positions where the two matrices differ.
    pub fn hamming(&self, other: &BitMatrix) -> u64 {
        assert_eq!(self.shape(), other.shape());
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as u64)
            .sum()
    }
}

/// `<a, b>` for packed binary rows.
#[inline]
pub fn and_count(a: &[u64], b: &[u64]) -> u32 {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones()).sum()
}

/// `||a - b||^2` for packed binary rows.
#[inline]
pub fn xor_count(a: &[u64], b: &[u64]) -> u32 {
    a.iter().zip(b).map(|(x, y)| (x ^ y).count_ones()).sum()
}

/// Whether `<a, b> >= threshold`, stopping as soon as it is decided.
#[inline]
pub fn and_count_at_least(a: &[u64], b: &[u64], threshold: u32) -> bool {
    let mut acc = 0u32;
    for (x, y) in a.iter().zip(b) {
        acc += (x & y).count_ones();
        if acc >= threshold {
            return true;
        }
    }
    false
}
