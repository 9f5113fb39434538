//! Dense linear assignment by the Jonker-Volgenant shortest augmenting path
//! method.
//!
//! Phases: column reduction with reduction transfer, two rounds of
//! augmenting row reduction, then one Dijkstra-style shortest augmenting
//! path per remaining free row. The search stops at the first unassigned
//! column reached, and column prices are updated only for scanned columns.
//!
//! R. Jonker, A. Volgenant. A Shortest Augmenting Path Algorithm for Dense
//! and Sparse Linear Assignment Problems. Computing 38, 325-340 (1987).

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Sub, SubAssign};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::perm::Permutation;

/// Scalar cost type accepted by the solver.
pub trait Cost:
    Copy
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + AddAssign
    + SubAssign
    + Send
    + Sync
    + Debug
    + 'static
{
    const ZERO: Self;
    /// Larger than any reduced cost the solver can produce.
    const LARGE: Self;

    fn is_finite(self) -> bool;
    fn to_f64(self) -> f64;
}

impl Cost for i64 {
    const ZERO: Self = 0;
    const LARGE: Self = i64::MAX;

    fn is_finite(self) -> bool {
        true
    }

    fn to_f64(self) -> f64 {
        self as f64
    }
}

impl Cost for f64 {
    const ZERO: Self = 0.0;
    const LARGE: Self = f64::INFINITY;

    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }

    fn to_f64(self) -> f64 {
        self
    }
}

/// A square matrix of finite costs, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix<C> {
    n: usize,
    data: Vec<C>,
}

impl<C: Cost> CostMatrix<C> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C>) -> Result<Self> {
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        if data.len() != rows * cols {
            return Err(Error::Format(format!(
                "expected {} costs, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / cols,
                col: pos % cols,
            });
        }
        Ok(CostMatrix { n: rows, data })
    }

    pub fn from_rows(rows: &[Vec<C>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::NotSquare {
                rows: n,
                cols: bad.len(),
            });
        }
        Self::from_vec(n, n, rows.concat())
    }

    /// Builds the matrix with rows computed in parallel.
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> C + Sync) -> Result<Self> {
        let rows: Vec<Vec<C>> = (0..n)
            .into_par_iter()
            .map(|i| (0..n).map(|j| f(i, j)).collect())
            .collect();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            data.extend_from_slice(&r);
        }
        Self::from_vec(n, n, data)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[C] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    /// `sum_i c(i, perm(i))`, accumulated in row order.
    pub fn objective(&self, perm: &Permutation) -> C {
        assert_eq!(perm.len(), self.n);
        (0..self.n).fold(C::ZERO, |acc, i| acc + self.get(i, perm.apply(i)))
    }
}

const NONE: usize = usize::MAX;

/// Minimum-cost perfect assignment. Returns the permutation `i -> j` and its
/// total cost. Deterministic for a given matrix.
pub fn lap_solve<C: Cost>(cost: &CostMatrix<C>) -> (Permutation, C) {
    let n = cost.n;
    if n == 0 {
        return (Permutation::identity(0), C::ZERO);
    }
    if n == 1 {
        return (Permutation::identity(1), cost.get(0, 0));
    }
    let mut solver = Solver {
        cost,
        n,
        row_to_col: vec![NONE; n],
        col_to_row: vec![NONE; n],
        v: vec![C::LARGE; n],
    };
    let mut free = solver.column_reduction();
    for _ in 0..2 {
        if free.is_empty() {
            break;
        }
        free = solver.augmenting_row_reduction(free);
    }
    if !free.is_empty() {
        solver.augment(free);
    }
    let perm = Permutation::new(solver.row_to_col).expect("solver produces a bijection");
    let total = cost.objective(&perm);
    (perm, total)
}

struct Solver<'a, C> {
    cost: &'a CostMatrix<C>,
    n: usize,
    row_to_col: Vec<usize>,
    col_to_row: Vec<usize>,
    /// Column prices.
    v: Vec<C>,
}

impl<C: Cost> Solver<'_, C> {
    /// Column reduction and reduction transfer. Returns the free rows.
    fn column_reduction(&mut self) -> Vec<usize> {
        let n = self.n;
        for i in 0..n {
            for (j, &c) in self.cost.row(i).iter().enumerate() {
                if c < self.v[j] {
                    self.v[j] = c;
                    self.col_to_row[j] = i;
                }
            }
        }
        let mut unique = vec![true; n];
        for j in (0..n).rev() {
            let i = self.col_to_row[j];
            if self.row_to_col[i] == NONE {
                self.row_to_col[i] = j;
            } else {
                unique[i] = false;
                self.col_to_row[j] = NONE;
            }
        }
        let mut free = Vec::new();
        for i in 0..n {
            if self.row_to_col[i] == NONE {
                free.push(i);
            } else if unique[i] {
                let j = self.row_to_col[i];
                let mut min = C::LARGE;
                for (j2, &c) in self.cost.row(i).iter().enumerate() {
                    if j2 != j {
                        let reduced = c - self.v[j2];
                        if reduced < min {
                            min = reduced;
                        }
                    }
                }
                self.v[j] -= min;
            }
        }
        free
    }

    /// Smallest and second-smallest reduced costs of row `i` with columns.
    fn two_minima(&self, i: usize) -> (C, C, usize, usize) {
        let row = self.cost.row(i);
        let mut u1 = row[0] - self.v[0];
        let mut j1 = 0;
        let mut u2 = C::LARGE;
        let mut j2 = NONE;
        for j in 1..self.n {
            let h = row[j] - self.v[j];
            if h < u2 {
                if h >= u1 {
                    u2 = h;
                    j2 = j;
                } else {
                    u2 = u1;
                    u1 = h;
                    j2 = j1;
                    j1 = j;
                }
            }
        }
        (u1, u2, j1, j2)
    }

    fn augmenting_row_reduction(&mut self, mut free: Vec<usize>) -> Vec<usize> {
        let n = self.n;
        let n_free = free.len();
        let mut current = 0;
        let mut kept = 0;
        let mut iterations = 0usize;
        while current < n_free {
            iterations += 1;
            let free_i = free[current];
            current += 1;
            let (u1, u2, mut j1, j2) = self.two_minima(free_i);
            let mut i0 = self.col_to_row[j1];
            let lowered = self.v[j1] - (u2 - u1);
            // Compare against the old price rather than u1 < u2 so float
            // round-off cannot make the price move without a strict drop.
            let lowers = lowered < self.v[j1];
            if iterations < current * n {
                if lowers {
                    self.v[j1] = lowered;
                } else if i0 != NONE && j2 != NONE {
                    j1 = j2;
                    i0 = self.col_to_row[j1];
                }
                if i0 != NONE {
                    if lowers {
                        current -= 1;
                        free[current] = i0;
                    } else {
                        free[kept] = i0;
                        kept += 1;
                    }
                }
            } else if i0 != NONE {
                free[kept] = i0;
                kept += 1;
            }
            self.row_to_col[free_i] = j1;
            self.col_to_row[j1] = free_i;
        }
        free.truncate(kept);
        free
    }

    fn augment(&mut self, free: Vec<usize>) {
        let n = self.n;
        let mut pred = vec![0usize; n];
        let mut dist = vec![C::ZERO; n];
        let mut cols: Vec<usize> = (0..n).collect();
        for start in free {
            let mut j = self.shortest_path(start, &mut pred, &mut dist, &mut cols);
            let mut steps = 0;
            loop {
                let i = pred[j];
                self.col_to_row[j] = i;
                std::mem::swap(&mut j, &mut self.row_to_col[i]);
                steps += 1;
                assert!(steps <= n, "augmenting path longer than n");
                if i == start {
                    break;
                }
            }
        }
    }

    /// Shortest alternating path from free row `start` to an unassigned
    /// column. Updates column prices and returns the end column.
    fn shortest_path(
        &mut self,
        start: usize,
        pred: &mut [usize],
        dist: &mut [C],
        cols: &mut [usize],
    ) -> usize {
        let n = self.n;
        for (j, c) in cols.iter_mut().enumerate() {
            *c = j;
        }
        let row = self.cost.row(start);
        for j in 0..n {
            dist[j] = row[j] - self.v[j];
            pred[j] = start;
        }
        // cols[..ready] are finalized, cols[ready..lo] scanned at the current
        // minimum, cols[lo..hi] waiting at the current minimum, cols[hi..]
        // still to be reached.
        let mut lo = 0;
        let mut hi = 0;
        let mut ready = 0;
        let end = loop {
            if lo == hi {
                ready = lo;
                hi = collect_minima(lo, dist, cols);
                if let Some(&j) = cols[lo..hi].iter().find(|&&j| self.col_to_row[j] == NONE) {
                    break j;
                }
            }
            if let Some(j) = self.scan(&mut lo, &mut hi, dist, cols, pred) {
                break j;
            }
        };
        // The end column always sits at the current minimum distance.
        let min = dist[end];
        for &j in &cols[..ready] {
            self.v[j] += dist[j] - min;
        }
        end
    }

    fn scan(
        &self,
        lo: &mut usize,
        hi: &mut usize,
        dist: &mut [C],
        cols: &mut [usize],
        pred: &mut [usize],
    ) -> Option<usize> {
        let n = self.n;
        while *lo != *hi {
            let j = cols[*lo];
            *lo += 1;
            let i = self.col_to_row[j];
            let min = dist[j];
            let row = self.cost.row(i);
            let h = row[j] - self.v[j] - min;
            for k in *hi..n {
                let j = cols[k];
                let reduced = row[j] - self.v[j] - h;
                if reduced < dist[j] {
                    dist[j] = reduced;
                    pred[j] = i;
                    if reduced == min {
                        if self.col_to_row[j] == NONE {
                            return Some(j);
                        }
                        cols[k] = cols[*hi];
                        cols[*hi] = j;
                        *hi += 1;
                    }
                }
            }
        }
        None
    }
}

/// Moves every column of minimal distance among `cols[lo..]` to the front of
/// that range and returns the end of the moved block.
fn collect_minima<C: Cost>(lo: usize, dist: &[C], cols: &mut [usize]) -> usize {
    let mut hi = lo + 1;
    let mut min = dist[cols[lo]];
    for k in hi..cols.len() {
        let j = cols[k];
        if dist[j] <= min {
            if dist[j] < min {
                hi = lo;
                min = dist[j];
            }
            cols[k] = cols[hi];
            cols[hi] = j;
            hi += 1;
        }
    }
    hi
}
