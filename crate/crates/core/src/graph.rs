//! Undirected simple graphs in compressed adjacency form.

use crate::error::{Error, Result};

/// Undirected graph without self-loops. Neighbor lists are sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            offsets: vec![0; n + 1],
            neighbors: Vec::new(),
        }
    }

    pub fn complete(n: usize) -> Self {
        let edges: Vec<(u32, u32)> = (0..n as u32)
            .flat_map(|i| (i + 1..n as u32).map(move |j| (i, j)))
            .collect();
        Self::from_edges(n, &edges).expect("complete graph edges are valid")
    }

    /// Builds a graph from unordered pairs. Duplicates are merged; self-loops
    /// and out-of-range endpoints are rejected.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Result<Self> {
        let mut degree = vec![0usize; n];
        let mut canon: Vec<(u32, u32)> = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a == b {
                return Err(Error::Format(format!("self-loop at vertex {a}")));
            }
            if a as usize >= n || b as usize >= n {
                return Err(Error::Format(format!("edge ({a}, {b}) out of range for n = {n}")));
            }
            canon.push((a.min(b), a.max(b)));
        }
        canon.sort_unstable();
        canon.dedup();
        for &(a, b) in &canon {
            degree[a as usize] += 1;
            degree[b as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for deg in &degree {
            offsets.push(offsets.last().unwrap() + deg);
        }
        let mut fill = offsets[..n].to_vec();
        let mut neighbors = vec![0u32; offsets[n]];
        for &(a, b) in &canon {
            neighbors[fill[a as usize]] = b;
            fill[a as usize] += 1;
            neighbors[fill[b as usize]] = a;
            fill[b as usize] += 1;
        }
        for i in 0..n {
            neighbors[offsets[i]..offsets[i + 1]].sort_unstable();
        }
        Ok(Graph { offsets, neighbors })
    }

    /// Builds a graph from per-vertex lists of higher-numbered neighbors,
    /// each sorted ascending.
    pub(crate) fn from_upper_lists(upper: Vec<Vec<u32>>) -> Self {
        let n = upper.len();
        let mut degree = vec![0usize; n];
        for (i, list) in upper.iter().enumerate() {
            degree[i] += list.len();
            for &j in list {
                degree[j as usize] += 1;
            }
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for deg in &degree {
            offsets.push(offsets.last().unwrap() + deg);
        }
        let mut fill = offsets[..n].to_vec();
        let mut neighbors = vec![0u32; offsets[n]];
        // Visiting i in ascending order writes lower neighbors of j in
        // ascending order before j's own upper list is appended.
        for (i, list) in upper.iter().enumerate() {
            for &j in list {
                neighbors[fill[j as usize]] = i as u32;
                fill[j as usize] += 1;
            }
            let start = fill[i];
            neighbors[start..start + list.len()].copy_from_slice(list);
            fill[i] += list.len();
        }
        Graph { offsets, neighbors }
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    #[inline]
    pub fn neighbors(&self, i: usize) -> &[u32] {
        &self.neighbors[self.offsets[i]..self.offsets[i + 1]]
    }

    #[inline]
    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.neighbors(i).binary_search(&(j as u32)).is_ok()
    }

    /// Edges `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.n()).flat_map(move |i| {
            self.neighbors(i)
                .iter()
                .filter(move |&&j| j as usize > i)
                .map(move |&j| (i as u32, j))
        })
    }

    /// Same graph with vertex `i` renamed `perm[i]`.
    pub fn relabel(&self, perm: &[usize]) -> Graph {
        assert_eq!(perm.len(), self.n());
        let edges: Vec<(u32, u32)> = self
            .edges()
            .map(|(i, j)| (perm[i as usize] as u32, perm[j as usize] as u32))
            .collect();
        Graph::from_edges(self.n(), &edges).expect("relabeling preserves validity")
    }

    /// Whether every edge of `self` is also an edge of `other`.
    pub fn is_subgraph_of(&self, other: &Graph) -> bool {
        self.n() == other.n() && self.edges().all(|(i, j)| other.has_edge(i as usize, j as usize))
    }

    pub fn mean_degree(&self) -> f64 {
        if self.n() == 0 {
            0.0
        } else {
            2.0 * self.edge_count() as f64 / self.n() as f64
        }
    }
}

/// Exact degree summary of a graph.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeStats {
    pub min: usize,
    pub max: usize,
    pub mean: f64,
    /// Population standard deviation of the degrees.
    pub std_dev: f64,
    /// `histogram[k]` is the number of vertices of degree `k`.
    pub histogram: Vec<usize>,
}

pub fn degree_stats(g: &Graph) -> DegreeStats {
    let n = g.n();
    if n == 0 {
        return DegreeStats {
            min: 0,
            max: 0,
            mean: 0.0,
            std_dev: 0.0,
            histogram: vec![],
        };
    }
    let degrees: Vec<usize> = (0..n).map(|i| g.degree(i)).collect();
    let min = *degrees.iter().min().unwrap();
    let max = *degrees.iter().max().unwrap();
    let mut histogram = vec![0; max + 1];
    for &d in &degrees {
        histogram[d] += 1;
    }
    let mean = degrees.iter().sum::<usize>() as f64 / n as f64;
    let var = degrees.iter().map(|&d| (d as f64 - mean).powi(2)).sum::<f64>() / n as f64;
    DegreeStats {
        min,
        max,
        mean,
        std_dev: var.sqrt(),
        histogram,
    }
}
