//! Vertex distance matrices for the distance-based decomposition.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::TAU;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{circular_distance, Graph};

/// Dense symmetric matrix of pairwise vertex distances with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix(DMatrix<f64>);

impl DistanceMatrix {
    /// Validates symmetry, the zero diagonal, and that entries are finite
    /// and non-negative.
    pub fn new(values: DMatrix<f64>) -> Result<Self> {
        let n = values.nrows();
        if values.ncols() != n {
            return Err(Error::invalid("distance matrix must be square"));
        }
        for j in 0..n {
            if values[(j, j)] != 0.0 {
                return Err(Error::invalid(format!(
                    "distance matrix has nonzero diagonal at {j}"
                )));
            }
            for i in 0..n {
                let v = values[(i, j)];
                if !(v.is_finite() && v >= 0.0) {
                    return Err(Error::invalid(format!(
                        "distance ({i}, {j}) = {v} is not a finite non-negative value"
                    )));
                }
                if v != values[(j, i)] {
                    return Err(Error::invalid(format!(
                        "distance matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(DistanceMatrix(values))
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    /// Distances from vertex `i` to every vertex. Stored as a column, which
    /// is the same as the row by symmetry.
    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.n();
        &self.0.as_slice()[i * n..(i + 1) * n]
    }

    pub fn max(&self) -> f64 {
        self.0.iter().fold(0.0, |m, &v| m.max(v))
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }
}

/// Arc distances between angles on the unit circle.
pub fn circular_distance_matrix(angles: &[f64]) -> Result<DistanceMatrix> {
    if let Some(i) = angles.iter().position(|a| !(0.0..TAU).contains(a)) {
        return Err(Error::invalid(format!(
            "angle {} at index {i} is outside [0, 2pi)",
            angles[i]
        )));
    }
    let n = angles.len();
    Ok(DistanceMatrix(DMatrix::from_fn(n, n, |i, j| {
        circular_distance(angles[i], angles[j])
    })))
}

/// Euclidean distances between planar points.
pub fn euclidean_distance_matrix(points: &[[f64; 2]]) -> Result<DistanceMatrix> {
    if let Some(i) = points
        .iter()
        .position(|p| !(p[0].is_finite() && p[1].is_finite()))
    {
        return Err(Error::invalid(format!("point {i} has non-finite coordinates")));
    }
    let n = points.len();
    Ok(DistanceMatrix(DMatrix::from_fn(n, n, |i, j| {
        (points[i][0] - points[j][0]).hypot(points[i][1] - points[j][1])
    })))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ShortestPathMethod {
    #[default]
    Dijkstra,
    FloydWarshall,
}

/// How an edge weight turns into a path length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum EdgeLength {
    /// Length equals the weight.
    Weight,
    /// Length is `1 / weight`; recovers geometric distance for `1/d` weights.
    #[default]
    InverseWeight,
}

impl EdgeLength {
    fn of(self, weight: f64) -> f64 {
        match self {
            EdgeLength::Weight => weight,
            EdgeLength::InverseWeight => 1.0 / weight,
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
struct Frontier {
    dist: f64,
    vertex: usize,
}

impl Eq for Frontier {}

impl Ord for Frontier {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn dijkstra_from(g: &Graph, source: usize, mode: EdgeLength, dist: &mut [f64]) {
    dist.fill(f64::INFINITY);
    dist[source] = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(Frontier {
        dist: 0.0,
        vertex: source,
    });
    while let Some(Frontier { dist: d, vertex: v }) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        for &(u, w) in g.neighbors(v) {
            let nd = d + mode.of(w);
            if nd < dist[u] {
                dist[u] = nd;
                heap.push(Frontier { dist: nd, vertex: u });
            }
        }
    }
}

/// All-pairs shortest-path distances. Both methods agree to rounding; the
/// Dijkstra result is symmetrized by taking the smaller of `d(i,j)` and
/// `d(j,i)`.
pub fn shortest_path_matrix(
    g: &Graph,
    method: ShortestPathMethod,
    edge_length: EdgeLength,
) -> Result<DistanceMatrix> {
    let n = g.n();
    let mut c = DMatrix::from_element(n, n, f64::INFINITY);
    match method {
        ShortestPathMethod::Dijkstra => {
            let mut dist = vec![0.0; n];
            for s in 0..n {
                dijkstra_from(g, s, edge_length, &mut dist);
                c.column_mut(s).copy_from_slice(&dist);
            }
            for j in 0..n {
                for i in (j + 1)..n {
                    let m = c[(i, j)].min(c[(j, i)]);
                    c[(i, j)] = m;
                    c[(j, i)] = m;
                }
            }
        }
        ShortestPathMethod::FloydWarshall => {
            for v in 0..n {
                c[(v, v)] = 0.0;
            }
            for e in g.edges() {
                let len = edge_length.of(e.weight);
                if len < c[(e.i, e.j)] {
                    c[(e.i, e.j)] = len;
                    c[(e.j, e.i)] = len;
                }
            }
            // Column-major storage: iterate so the inner loop walks a column.
            for k in 0..n {
                let col_k: Vec<f64> = c.column(k).iter().copied().collect();
                for j in 0..n {
                    let dkj = c[(k, j)];
                    if dkj == f64::INFINITY {
                        continue;
                    }
                    let mut col = c.column_mut(j);
                    for i in 0..n {
                        let via = col_k[i] + dkj;
                        if via < col[i] {
                            col[i] = via;
                        }
                    }
                }
            }
        }
    }
    for j in 0..n {
        for i in 0..n {
            if c[(i, j)] == f64::INFINITY {
                return Err(Error::UnreachablePair {
                    from: i.min(j),
                    to: i.max(j),
                });
            }
        }
    }
    Ok(DistanceMatrix(c))
}
