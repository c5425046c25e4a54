//! Undirected weighted graphs, the experiment graph builders and the
//! Laplacian.

mod delaunay;

use std::collections::VecDeque;
use std::f64::consts::TAU;
use std::ops::Deref;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use delaunay::{build_delaunay_graph, delaunay_triangles, in_circumcircle, Triangle};

/// A real value per vertex.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Signal(Vec<f64>);

impl Signal {
    /// Wraps `values`, rejecting NaN and infinities.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "signal value at index {i} is not finite"
            )));
        }
        Ok(Signal(values))
    }

    pub fn zeros(n: usize) -> Self {
        Signal(vec![0.0; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        norm2(&self.0)
    }
}

impl Deref for Signal {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Signal> for Vec<f64> {
    fn from(s: Signal) -> Self {
        s.0
    }
}

pub(crate) fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub weight: f64,
}

/// Vertex coordinates the graph was built from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Embedding {
    /// Angles in radians on the unit circle, one per vertex.
    Circle(Vec<f64>),
    /// Cartesian coordinates in the plane.
    Plane(Vec<[f64; 2]>),
}

impl Embedding {
    pub fn len(&self) -> usize {
        match self {
            Embedding::Circle(a) => a.len(),
            Embedding::Plane(p) => p.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    embedding: Option<Embedding>,
    offsets: Vec<usize>,
    adjacency: Vec<(usize, f64)>,
    connected: bool,
}

impl Graph {
    /// Builds a simple undirected graph. Edges are stored with `i < j` and
    /// sorted; reversed duplicates count as duplicates.
    pub fn new(n: usize, edges: Vec<Edge>, embedding: Option<Embedding>) -> Result<Self> {
        if let Some(emb) = &embedding {
            if emb.len() != n {
                return Err(Error::invalid(format!(
                    "embedding has {} coordinates for {n} vertices",
                    emb.len()
                )));
            }
        }
        let mut canon = Vec::with_capacity(edges.len());
        for e in edges {
            if e.i >= n || e.j >= n {
                return Err(Error::invalid(format!(
                    "edge ({}, {}) references a vertex outside 0..{n}",
                    e.i, e.j
                )));
            }
            if e.i == e.j {
                return Err(Error::invalid(format!("self-loop at vertex {}", e.i)));
            }
            if !(e.weight.is_finite() && e.weight > 0.0) {
                return Err(Error::invalid(format!(
                    "edge ({}, {}) has weight {}; weights must be positive and finite",
                    e.i, e.j, e.weight
                )));
            }
            let (i, j) = if e.i < e.j { (e.i, e.j) } else { (e.j, e.i) };
            canon.push(Edge {
                i,
                j,
                weight: e.weight,
            });
        }
        canon.sort_by_key(|e| (e.i, e.j));
        if let Some(w) = canon.windows(2).find(|w| (w[0].i, w[0].j) == (w[1].i, w[1].j)) {
            return Err(Error::invalid(format!(
                "duplicate edge ({}, {})",
                w[0].i, w[0].j
            )));
        }

        let mut degree = vec![0usize; n];
        for e in &canon {
            degree[e.i] += 1;
            degree[e.j] += 1;
        }
        let mut offsets = vec![0usize; n + 1];
        for v in 0..n {
            offsets[v + 1] = offsets[v] + degree[v];
        }
        let mut fill = offsets.clone();
        let mut adjacency = vec![(0usize, 0.0f64); offsets[n]];
        for e in &canon {
            adjacency[fill[e.i]] = (e.j, e.weight);
            fill[e.i] += 1;
            adjacency[fill[e.j]] = (e.i, e.weight);
            fill[e.j] += 1;
        }
        for v in 0..n {
            adjacency[offsets[v]..offsets[v + 1]].sort_by_key(|&(u, _)| u);
        }

        let mut g = Graph {
            n,
            edges: canon,
            embedding,
            offsets,
            adjacency,
            connected: false,
        };
        g.connected = g.component_count() <= 1;
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn embedding(&self) -> Option<&Embedding> {
        self.embedding.as_ref()
    }

    /// False when the graph has more than one connected component. Such
    /// graphs are accepted, but the Laplacian then has a null space of
    /// dimension equal to the component count.
    pub fn is_connected(&self) -> bool {
        self.connected
    }

    /// `(neighbor, weight)` pairs of `v`, sorted by neighbor index.
    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.adjacency[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn weighted_degree(&self, v: usize) -> f64 {
        self.neighbors(v).iter().map(|&(_, w)| w).sum()
    }

    pub fn adjacency_matrix(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.n, self.n);
        for e in &self.edges {
            a[(e.i, e.j)] = e.weight;
            a[(e.j, e.i)] = e.weight;
        }
        a
    }

    pub fn component_count(&self) -> usize {
        let mut seen = vec![false; self.n];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            count += 1;
            seen[start] = true;
            queue.push_back(start);
            while let Some(v) = queue.pop_front() {
                for &(u, _) in self.neighbors(v) {
                    if !seen[u] {
                        seen[u] = true;
                        queue.push_back(u);
                    }
                }
            }
        }
        count
    }

    /// Checks that `s` is a finite signal on this graph.
    pub fn check_signal(&self, s: &[f64]) -> Result<()> {
        if s.len() != self.n {
            return Err(Error::invalid(format!(
                "signal has {} values for a graph with {} vertices",
                s.len(),
                self.n
            )));
        }
        if let Some(i) = s.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "signal value at vertex {i} is not finite"
            )));
        }
        Ok(())
    }
}

/// Arc length between two angles on the unit circle.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    d.min(TAU - d)
}

/// Ring graph on sorted angles: every vertex is joined to its
/// `neighbors_per_side` successors and predecessors in circular order, with
/// weight `1 / arc length`.
pub fn build_ring_graph(angles: &[f64], neighbors_per_side: usize) -> Result<Graph> {
    if neighbors_per_side == 0 {
        return Err(Error::invalid("neighbors_per_side must be positive"));
    }
    let n = angles.len();
    let needed = (2 * neighbors_per_side + 1).max(3);
    if n < needed {
        return Err(Error::invalid(format!(
            "a ring with {neighbors_per_side} neighbors per side needs at least {needed} vertices, got {n}"
        )));
    }
    if let Some(i) = angles.iter().position(|a| !(0.0..TAU).contains(a)) {
        return Err(Error::invalid(format!(
            "angle {} at index {i} is outside [0, 2pi)",
            angles[i]
        )));
    }
    if let Some(i) = angles.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::invalid(format!(
            "angles must be strictly increasing; index {} has {} after {}",
            i + 1,
            angles[i + 1],
            angles[i]
        )));
    }
    let mut edges = Vec::with_capacity(n * neighbors_per_side);
    for i in 0..n {
        for step in 1..=neighbors_per_side {
            let j = (i + step) % n;
            let d = circular_distance(angles[i], angles[j]);
            edges.push(Edge {
                i,
                j,
                weight: 1.0 / d,
            });
        }
    }
    Graph::new(n, edges, Some(Embedding::Circle(angles.to_vec())))
}

/// Combinatorial Laplacian `L = D - A` as a dense matrix.
pub fn laplacian(g: &Graph) -> DMatrix<f64> {
    let mut l = DMatrix::zeros(g.n(), g.n());
    for e in g.edges() {
        l[(e.i, e.j)] -= e.weight;
        l[(e.j, e.i)] -= e.weight;
        l[(e.i, e.i)] += e.weight;
        l[(e.j, e.j)] += e.weight;
    }
    l
}

/// Number of strict local maxima plus strict local minima of `s`, where a
/// vertex is compared against all of its graph neighbors. A vertex with an
/// equal-valued neighbor is never an extremum.
pub fn count_extrema(g: &Graph, s: &[f64]) -> Result<usize> {
    if s.len() != g.n() {
        return Err(Error::invalid(format!(
            "signal has {} values for a graph with {} vertices",
            s.len(),
            g.n()
        )));
    }
    let mut count = 0;
    for v in 0..g.n() {
        let nbrs = g.neighbors(v);
        if nbrs.is_empty() {
            return Err(Error::IsolatedVertex { vertex: v });
        }
        let x = s[v];
        if nbrs.iter().all(|&(u, _)| x > s[u]) || nbrs.iter().all(|&(u, _)| x < s[u]) {
            count += 1;
        }
    }
    Ok(count)
}

/// Strict extrema of a sequence read circularly; the 1D analogue of
/// [`count_extrema`] on a ring with one neighbor per side.
pub fn count_extrema_circular(values: &[f64]) -> usize {
    let n = values.len();
    if n < 3 {
        return 0;
    }
    (0..n)
        .filter(|&i| {
            let prev = values[(i + n - 1) % n];
            let next = values[(i + 1) % n];
            let x = values[i];
            (x > prev && x > next) || (x < prev && x < next)
        })
        .count()
}
