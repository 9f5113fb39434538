//! Sampling of random intersection graphs and their noisy, subsampled
//! observations.
//!
//! Convention for correlated pairs: vertex `i` of `G` corresponds to vertex
//! `hidden_perm(i)` of `G'`, so `y'_{hidden_perm(i)} = x_i + eps'` and a
//! perfect alignment returns `hidden_perm` itself.

use std::collections::HashMap;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::bits::{and_count_at_least, BitMatrix};
use crate::dense::RealMatrix;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::model::{ModelParams, NoiseParams};
use crate::perm::Permutation;
use crate::rng::{derive, label, stream};

/// The binary truth features `X`, one row per vertex.
pub type FeatureMatrix = BitMatrix;

/// Below this entry probability rows are sampled by geometric gap skipping,
/// above it entry by entry. Both are exact i.i.d. Bernoulli samplers.
const SKIP_SAMPLING_MAX_P: f64 = 0.25;

fn sample_row<R: Rng>(rng: &mut R, d: usize, p: f64) -> Vec<u64> {
    let mut row = vec![0u64; d.div_ceil(64)];
    if p >= 1.0 {
        for k in 0..d {
            row[k / 64] |= 1 << (k % 64);
        }
    } else if p <= SKIP_SAMPLING_MAX_P {
        let ln_q = (-p).ln_1p();
        let mut pos = -1.0f64;
        loop {
            let u: f64 = rng.gen();
            // Number of zeros before the next one: Geometric(p) on {0, 1, ...}.
            let gap = ((-u).ln_1p() / ln_q).floor();
            pos += gap + 1.0;
            if !(pos < d as f64) {
                break;
            }
            let k = pos as usize;
            row[k / 64] |= 1 << (k % 64);
        }
    } else {
        for k in 0..d {
            if rng.gen::<f64>() < p {
                row[k / 64] |= 1 << (k % 64);
            }
        }
    }
    row
}

/// Draws `X` with i.i.d. Bernoulli(`s/d`) entries. Row `i` uses its own
/// stream, so the result does not depend on thread count.
pub fn sample_features(params: &ModelParams, seed: u64) -> FeatureMatrix {
    let (n, d) = (params.n(), params.d());
    let p = params.entry_probability();
    let rows: Vec<Vec<u64>> = (0..n)
        .into_par_iter()
        .map(|i| sample_row(&mut stream(seed, label::FEATURES, i as u64), d, p))
        .collect();
    BitMatrix::from_rows(d, rows)
}

/// All pairs `{i, j}` with `<x_i, x_j> >= t`.
pub fn intersection_graph(x: &FeatureMatrix, t: u32) -> Graph {
    let n = x.rows();
    let upper: Vec<Vec<u32>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let xi = x.row(i);
            if (xi.iter().map(|w| w.count_ones()).sum::<u32>()) < t {
                return Vec::new();
            }
            (i + 1..n)
                .filter(|&j| and_count_at_least(xi, x.row(j), t))
                .map(|j| j as u32)
                .collect()
        })
        .collect();
    Graph::from_upper_lists(upper)
}

/// Draws the truth graph `G_0 = (X, E_0)`.
pub fn sample_rig(params: &ModelParams, seed: u64) -> (FeatureMatrix, Graph) {
    let x = sample_features(params, seed);
    let e0 = intersection_graph(&x, params.t());
    (x, e0)
}

/// One noisy, incomplete observation `G = (Y, E)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservedGraph {
    features: RealMatrix,
    graph: Graph,
}

impl ObservedGraph {
    pub fn new(features: RealMatrix, graph: Graph) -> Result<Self> {
        if features.rows() != graph.n() {
            return Err(Error::ShapeMismatch {
                left: features.shape(),
                right: (graph.n(), graph.n()),
            });
        }
        Ok(ObservedGraph { features, graph })
    }

    pub fn features(&self) -> &RealMatrix {
        &self.features
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    /// Same observation with vertex `i` renamed `perm[i]`.
    pub fn relabel(&self, perm: &[usize]) -> ObservedGraph {
        ObservedGraph {
            features: self.features.scatter_rows(perm),
            graph: self.graph.relabel(perm),
        }
    }
}

/// Adds `N(0, sigma^2)` noise to every feature entry and keeps each edge of
/// `e0` independently with probability `q`.
pub fn perturb(x: &FeatureMatrix, e0: &Graph, noise: NoiseParams, seed: u64) -> Result<ObservedGraph> {
    let (n, d) = x.shape();
    if e0.n() != n {
        return Err(Error::ShapeMismatch {
            left: x.shape(),
            right: (e0.n(), e0.n()),
        });
    }
    let sigma = noise.sigma();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut row = vec![0.0; d];
            for k in x.support(i) {
                row[k] = 1.0;
            }
            if sigma > 0.0 {
                let mut rng = stream(seed, label::NOISE, i as u64);
                for v in row.iter_mut() {
                    let z: f64 = rng.sample(StandardNormal);
                    *v += sigma * z;
                }
            }
            row
        })
        .collect();
    let mut data = Vec::with_capacity(n * d);
    for r in rows {
        data.extend_from_slice(&r);
    }
    let features = RealMatrix::from_raw(n, d, data);

    Ok(ObservedGraph {
        features,
        graph: subsample_edges(e0, noise.q(), seed),
    })
}

/// Keeps each edge of `e0` independently with probability `q`. The coin for
/// edge `{i, j}`, `i < j`, comes from row `i`'s stream.
pub fn subsample_edges(e0: &Graph, q: f64, seed: u64) -> Graph {
    let upper: Vec<Vec<u32>> = (0..e0.n())
        .into_par_iter()
        .map(|i| {
            let above = e0.neighbors(i).iter().filter(|&&j| j as usize > i);
            if q >= 1.0 {
                return above.copied().collect();
            }
            let mut rng = stream(seed, label::SUBSAMPLE, i as u64);
            above.filter(|_| rng.gen::<f64>() < q).copied().collect()
        })
        .collect();
    Graph::from_upper_lists(upper)
}

/// How the hidden permutation is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PermMode {
    Identity,
    #[default]
    Uniform,
}

impl std::str::FromStr for PermMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identity" => Ok(PermMode::Identity),
            "uniform" => Ok(PermMode::Uniform),
            other => Err(Error::Format(format!("unknown permutation mode `{other}`"))),
        }
    }
}

/// Two independent observations of one truth graph, the second relabeled by
/// a hidden permutation.
#[derive(Debug, Clone)]
pub struct CorrelatedInstance {
    pub truth: FeatureMatrix,
    pub base_edges: Graph,
    pub g: ObservedGraph,
    pub g_prime: ObservedGraph,
    pub hidden_perm: Permutation,
}

/// Samples `(G, G')`. The truth graph, the permutation and the two
/// observations draw from separate streams derived from `seed`.
pub fn sample_correlated_pair(
    params: &ModelParams,
    noise: NoiseParams,
    seed: u64,
    mode: PermMode,
) -> CorrelatedInstance {
    let (truth, base_edges) = sample_rig(params, derive(seed, label::FEATURES));
    let n = params.n();
    let hidden_perm = match mode {
        PermMode::Identity => Permutation::identity(n),
        PermMode::Uniform => Permutation::random(n, &mut stream(seed, label::PERMUTATION, 0)),
    };
    let g = perturb(&truth, &base_edges, noise, derive(seed, label::COPY_G))
        .expect("truth and base graph share n");
    let x_prime = truth.scatter_rows(hidden_perm.as_slice());
    let e_prime = base_edges.relabel(hidden_perm.as_slice());
    let g_prime = perturb(&x_prime, &e_prime, noise, derive(seed, label::COPY_G_PRIME))
        .expect("relabeling preserves n");
    CorrelatedInstance {
        truth,
        base_edges,
        g,
        g_prime,
        hidden_perm,
    }
}

/// Number of rows that equal at least one other row.
pub fn duplicate_rows(x: &BitMatrix) -> usize {
    let mut counts: HashMap<&[u64], usize> = HashMap::with_capacity(x.rows());
    for i in 0..x.rows() {
        *counts.entry(x.row(i)).or_default() += 1;
    }
    counts.values().filter(|&&c| c > 1).sum()
}
