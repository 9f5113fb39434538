//! Matching two observed graphs by a linear assignment on feature rows.
//!
//! Both pipelines minimize `sum_i ||a_i - b_{pi(i)}||^2`. Because the row norms
//! do not depend on `pi`, this is the same as maximizing
//! `sum_i <a_i, b_{pi(i)}>`.

use rand::Rng;

use crate::bits::{and_count, xor_count, BitMatrix};
use crate::dense::{dist_sq, dot, RealMatrix};
use crate::error::{Error, Result};
use crate::gnn::DenoisedFeatures;
use crate::lap::{lap_solve, CostMatrix};
use crate::perm::Permutation;
use crate::rng::stream;

#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentResult {
    pub perm: Permutation,
    /// Achieved value of the assignment objective.
    pub objective: f64,
    /// `perm(i) == truth(i)` for each vertex, once a truth is attached.
    pub correct_flags: Option<Vec<bool>>,
}

impl AlignmentResult {
    fn new(perm: Permutation, objective: f64) -> Self {
        AlignmentResult {
            perm,
            objective,
            correct_flags: None,
        }
    }

    /// Attaches per-vertex correctness against `truth`.
    pub fn score(&mut self, truth: &Permutation) -> Result<f64> {
        let err = alignment_error(&self.perm, truth)?;
        self.correct_flags = Some(
            (0..truth.len())
                .map(|i| self.perm.apply(i) == truth.apply(i))
                .collect(),
        );
        Ok(err)
    }

    pub fn is_perfect(&self) -> Option<bool> {
        self.correct_flags.as_ref().map(|f| f.iter().all(|&c| c))
    }
}

fn same_shape(left: (usize, usize), right: (usize, usize)) -> Result<()> {
    if left != right {
        return Err(Error::ShapeMismatch { left, right });
    }
    Ok(())
}

/// Integer costs `c(i, j) = ||a_i - b_j||^2` for binary rows.
pub fn binary_cost_matrix(a: &BitMatrix, b: &BitMatrix) -> Result<CostMatrix<i64>> {
    same_shape(a.shape(), b.shape())?;
    CostMatrix::from_fn(a.rows(), |i, j| xor_count(a.row(i), b.row(j)) as i64)
}

/// Float costs `c(i, j) = ||a_i - b_j||^2`, evaluated as
/// `||a_i||^2 + ||b_j||^2 - 2 <a_i, b_j>` so the inner products go through a
/// matrix multiply.
pub fn real_cost_matrix(a: &RealMatrix, b: &RealMatrix) -> Result<CostMatrix<f64>> {
    same_shape(a.shape(), b.shape())?;
    let n = a.rows();
    let na = a.row_norms_sq();
    let nb = b.row_norms_sq();
    let gram = a.gram(b);
    let mut data = gram;
    for i in 0..n {
        for j in 0..n {
            let c = &mut data[i * n + j];
            *c = na[i] + nb[j] - 2.0 * *c;
        }
    }
    CostMatrix::from_vec(n, n, data)
}

/// Matches denoised features: `argmin_pi sum_i ||z_i - z'_{pi(i)}||^2`.
pub fn align_features(z: &DenoisedFeatures, z_prime: &DenoisedFeatures) -> Result<AlignmentResult> {
    let cost = binary_cost_matrix(z.bits(), z_prime.bits())?;
    let (perm, obj) = lap_solve(&cost);
    Ok(AlignmentResult::new(perm, obj as f64))
}

/// Matches raw observed features directly (the linear model).
///
/// The reported objective is recomputed from the rows of the chosen pairs,
/// not read back from the expanded cost matrix.
pub fn align_linear(y: &RealMatrix, y_prime: &RealMatrix) -> Result<AlignmentResult> {
    let cost = real_cost_matrix(y, y_prime)?;
    let (perm, _) = lap_solve(&cost);
    let objective = (0..y.rows())
        .map(|i| dist_sq(y.row(i), y_prime.row(perm.apply(i))))
        .sum();
    Ok(AlignmentResult::new(perm, objective))
}

/// Fraction of vertices mapped differently from `truth`.
pub fn alignment_error(found: &Permutation, truth: &Permutation) -> Result<f64> {
    if found.len() != truth.len() {
        return Err(Error::ShapeMismatch {
            left: (found.len(), 1),
            right: (truth.len(), 1),
        });
    }
    if truth.is_empty() {
        return Ok(0.0);
    }
    let wrong = (0..truth.len())
        .filter(|&i| found.apply(i) != truth.apply(i))
        .count();
    Ok(wrong as f64 / truth.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureError {
    /// `||Z - X||_F / ||X||_F`, with `0/0 = 0`.
    pub relative_distance: f64,
    /// `Z == X` entrywise.
    pub exact: bool,
}

pub fn feature_error(z: &DenoisedFeatures, x: &BitMatrix) -> Result<FeatureError> {
    same_shape(z.bits().shape(), x.shape())?;
    let diff = z.bits().hamming(x);
    let norm = x.count_ones();
    let relative_distance = if diff == 0 {
        0.0
    } else {
        (diff as f64 / norm as f64).sqrt()
    };
    Ok(FeatureError {
        relative_distance,
        exact: diff == 0,
    })
}

/// Row-wise inner products for the swap diagnostic.
pub trait RowInner {
    type Value: Copy + PartialOrd + std::ops::Add<Output = Self::Value>;

    fn shape(&self) -> (usize, usize);
    fn inner(&self, i: usize, other: &Self, j: usize) -> Self::Value;
}

impl RowInner for BitMatrix {
    type Value = i64;

    fn shape(&self) -> (usize, usize) {
        BitMatrix::shape(self)
    }

    fn inner(&self, i: usize, other: &Self, j: usize) -> i64 {
        and_count(self.row(i), other.row(j)) as i64
    }
}

impl RowInner for RealMatrix {
    type Value = f64;

    fn shape(&self) -> (usize, usize) {
        RealMatrix::shape(self)
    }

    fn inner(&self, i: usize, other: &Self, j: usize) -> f64 {
        dot(self.row(i), other.row(j))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SwapCount {
    pub count: u64,
    pub pairs_examined: u64,
}

/// Counts pairs `i < j` with `<a_i,b_j> + <a_j,b_i> >= <a_i,b_i> + <a_j,b_j>`.
///
/// Rows of `a` and `b` must already be index-aligned under the candidate
/// truth. Every such pair means exchanging `i` and `j` does not increase the
/// assignment cost, so the truth is not the unique optimum. With
/// `pair_budget` set, that many pairs are drawn uniformly (with replacement)
/// instead of enumerating all of them.
pub fn count_swap_events<M: RowInner>(
    a: &M,
    b: &M,
    pair_budget: Option<u64>,
    seed: u64,
) -> Result<SwapCount> {
    same_shape(a.shape(), b.shape())?;
    let n = a.shape().0;
    let diag: Vec<M::Value> = (0..n).map(|i| a.inner(i, b, i)).collect();
    let is_swap = |i: usize, j: usize| a.inner(i, b, j) + a.inner(j, b, i) >= diag[i] + diag[j];
    match pair_budget {
        None => {
            let mut count = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if is_swap(i, j) {
                        count += 1;
                    }
                }
            }
            Ok(SwapCount {
                count,
                pairs_examined: (n as u64 * n.saturating_sub(1) as u64) / 2,
            })
        }
        Some(budget) => {
            if n < 2 {
                return Ok(SwapCount {
                    count: 0,
                    pairs_examined: 0,
                });
            }
            let mut rng = stream(seed, crate::rng::label::VALIDATE, 0);
            let mut count = 0;
            for _ in 0..budget {
                let i = rng.gen_range(0..n);
                let mut j = rng.gen_range(0..n - 1);
                if j >= i {
                    j += 1;
                }
                if is_swap(i.min(j), i.max(j)) {
                    count += 1;
                }
            }
            Ok(SwapCount {
                count,
                pairs_examined: budget,
            })
        }
    }
}
