//! Edge-weighted undirected graphs and coverage evaluation.

use crate::error::{input_err, Result};
use crate::vertex_set::VertexSet;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

/// Undirected graph with nonnegative edge weights. Parallel edges are kept as
/// separate entries; self-loops are rejected.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedGraph {
    vertex_count: usize,
    edges: Vec<Edge>,
}

impl WeightedGraph {
    pub fn new(vertex_count: usize, edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        if vertex_count == 0 {
            return input_err("graph must have at least one vertex");
        }
        let mut out = Vec::with_capacity(edges.len());
        for (idx, (u, v, w)) in edges.into_iter().enumerate() {
            if u >= vertex_count || v >= vertex_count {
                return input_err(format!(
                    "edge {idx} ({u},{v}) references a vertex outside 0..{vertex_count}"
                ));
            }
            if u == v {
                return input_err(format!("edge {idx} is a self-loop on vertex {u}"));
            }
            if !w.is_finite() || w < 0.0 {
                return input_err(format!("edge {idx} has invalid weight {w}"));
            }
            out.push(Edge { u, v, w });
        }
        Ok(WeightedGraph {
            vertex_count,
            edges: out,
        })
    }

    /// Complete graph on `n` vertices with unit weights.
    pub fn complete(n: usize) -> Result<Self> {
        let mut edges = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v, 1.0));
            }
        }
        Self::new(n, edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.w).sum()
    }

    /// Weighted degree `W_v` of every vertex.
    pub fn weighted_degrees(&self) -> Vec<f64> {
        let mut deg = vec![0.0; self.vertex_count];
        for e in &self.edges {
            deg[e.u] += e.w;
            deg[e.v] += e.w;
        }
        deg
    }
}

/// Total weight of edges with at least one endpoint in `s`.
pub fn coverage_weight(g: &WeightedGraph, s: &VertexSet) -> f64 {
    if let Some(mask) = s.mask() {
        return coverage_weight_mask(g, mask);
    }
    g.edges
        .iter()
        .filter(|e| s.contains(e.u) || s.contains(e.v))
        .map(|e| e.w)
        .sum()
}

pub(crate) fn coverage_weight_mask(g: &WeightedGraph, mask: u64) -> f64 {
    g.edges
        .iter()
        .filter(|e| (e.u < 64 && mask >> e.u & 1 == 1) || (e.v < 64 && mask >> e.v & 1 == 1))
        .map(|e| e.w)
        .sum()
}
