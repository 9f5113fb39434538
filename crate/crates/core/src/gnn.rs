//! The fixed one-layer message-passing network.
//!
//! For each vertex the layer averages the observed features of its
//! neighbors, scales by `s/t`, and thresholds every coordinate at 1/2:
//!
//! ```text
//! u_i = s / (t |N_i|) * sum_{j in N_i} y_j
//! z_i = 1{u_i >= 1/2}
//! ```
//!
//! The vertex's own feature is not part of the sum. Isolated vertices get
//! `u_i = 0` and therefore `z_i = 0`.

use rayon::prelude::*;

use crate::bits::BitMatrix;
use crate::dense::RealMatrix;
use crate::error::{Error, Result};
use crate::graphgen::ObservedGraph;

pub const THRESHOLD: f64 = 0.5;

/// The aggregated messages `U`.
#[derive(Debug, Clone, PartialEq)]
pub struct MessageMatrix(RealMatrix);

impl MessageMatrix {
    pub fn new(u: RealMatrix) -> Self {
        MessageMatrix(u)
    }

    pub fn as_matrix(&self) -> &RealMatrix {
        &self.0
    }
}

/// The layer output `Z`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenoisedFeatures(BitMatrix);

impl DenoisedFeatures {
    pub fn new(z: BitMatrix) -> Self {
        DenoisedFeatures(z)
    }

    pub fn bits(&self) -> &BitMatrix {
        &self.0
    }

    pub fn into_bits(self) -> BitMatrix {
        self.0
    }
}

fn check_scale(s: f64, t: u32) -> Result<()> {
    if !(s.is_finite() && s > 0.0) {
        return Err(Error::invalid("s", s, "must be finite and > 0"));
    }
    if t == 0 {
        return Err(Error::invalid("t", 0.0, "must be >= 1"));
    }
    Ok(())
}

/// Neighbor aggregation. Sums run over each neighbor list in ascending
/// vertex order, so results are identical for any thread count.
pub fn message_pass(obs: &ObservedGraph, s: f64, t: u32) -> Result<MessageMatrix> {
    check_scale(s, t)?;
    let y = obs.features();
    let g = obs.graph();
    let (n, d) = y.shape();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut acc = vec![0.0; d];
            let nbrs = g.neighbors(i);
            if nbrs.is_empty() {
                return acc;
            }
            for &j in nbrs {
                for (a, v) in acc.iter_mut().zip(y.row(j as usize)) {
                    *a += v;
                }
            }
            let scale = s / (t as f64 * nbrs.len() as f64);
            for a in acc.iter_mut() {
                *a *= scale;
            }
            acc
        })
        .collect();
    let mut data = Vec::with_capacity(n * d);
    for r in rows {
        data.extend_from_slice(&r);
    }
    Ok(MessageMatrix(RealMatrix::from_raw(n, d, data)))
}

/// Entrywise `1{u >= 1/2}`.
pub fn threshold(u: &MessageMatrix) -> DenoisedFeatures {
    let m = &u.0;
    let (n, d) = m.shape();
    let rows: Vec<Vec<u64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut row = vec![0u64; d.div_ceil(64)];
            for (k, &v) in m.row(i).iter().enumerate() {
                if v >= THRESHOLD {
                    row[k / 64] |= 1 << (k % 64);
                }
            }
            row
        })
        .collect();
    DenoisedFeatures(BitMatrix::from_rows(d, rows))
}

pub fn denoise(obs: &ObservedGraph, s: f64, t: u32) -> Result<DenoisedFeatures> {
    Ok(threshold(&message_pass(obs, s, t)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    fn obs(rows: &[Vec<f64>], edges: &[(u32, u32)]) -> ObservedGraph {
        let y = RealMatrix::from_rows(rows).unwrap();
        let g = Graph::from_edges(rows.len(), edges).unwrap();
        ObservedGraph::new(y, g).unwrap()
    }

    #[test]
    fn isolated_vertex_gets_zero_row() {
        let o = obs(&[vec![5.0, 5.0], vec![1.0, 1.0], vec![2.0, 0.0]], &[(1, 2)]);
        let u = message_pass(&o, 10.0, 3).unwrap();
        assert_eq!(u.as_matrix().row(0), &[0.0, 0.0]);
        assert_eq!(denoise(&o, 10.0, 3).unwrap().bits().row_count(0), 0);
    }

    #[test]
    fn single_neighbor_scales_by_s_over_t() {
        let o = obs(&[vec![0.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]], &[(0, 1)]);
        let u = message_pass(&o, 10.0, 3).unwrap();
        assert_eq!(u.as_matrix().row(0), &[0.0, 10.0 / 3.0, 0.0]);
    }

    #[test]
    fn threshold_boundary_is_inclusive() {
        let u = MessageMatrix::new(
            RealMatrix::from_rows(&[vec![0.5, 0.4999, -3.0, 7.0]]).unwrap(),
        );
        let z = threshold(&u);
        assert!(z.bits().get(0, 0));
        assert!(!z.bits().get(0, 1));
        assert!(!z.bits().get(0, 2));
        assert!(z.bits().get(0, 3));

        let zero = threshold(&MessageMatrix::new(RealMatrix::zeros(3, 70)));
        assert_eq!(zero.bits().count_ones(), 0);
    }

    #[test]
    fn empty_graph_denoises_to_zero() {
        let o = obs(&[vec![3.0, 1.0], vec![1.0, 9.0]], &[]);
        assert_eq!(denoise(&o, 2.0, 1).unwrap().bits().count_ones(), 0);
    }

    #[test]
    fn rejects_bad_scale() {
        let o = obs(&[vec![1.0]], &[]);
        assert!(message_pass(&o, 0.0, 1).is_err());
        assert!(message_pass(&o, 1.0, 0).is_err());
    }

    #[test]
    fn own_feature_is_ignored() {
        let rows = vec![vec![0.3, 0.9], vec![0.2, 0.1], vec![0.7, 0.8]];
        let a = obs(&rows, &[(0, 1), (0, 2)]);
        let mut zeroed = rows.clone();
        zeroed[0] = vec![0.0, 0.0];
        let b = obs(&zeroed, &[(0, 1), (0, 2)]);
        let za = denoise(&a, 1.0, 1).unwrap();
        let zb = denoise(&b, 1.0, 1).unwrap();
        assert_eq!(za.bits().row(0), zb.bits().row(0));
    }
}
