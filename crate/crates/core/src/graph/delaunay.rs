//! Bowyer-Watson incremental Delaunay triangulation.
//!
//! The unbounded outside of the hull is covered by ghost triangles that
//! share a single vertex at infinity, which plays the role of the usual
//! super-triangle without the precision loss of huge coordinates. A ghost
//! triangle on hull edge `a -> b` has as its "circumcircle" the open
//! half-plane left of `a -> b` plus the open segment itself.
//!
//! Predicates use a forward error bound: when the determinant is smaller
//! than the bound it is reported as zero. Zero in-circle results count as
//! "outside", which is the same as lifting the point being inserted (always
//! the highest index so far) slightly above the paraboloid.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::graph::{Edge, Embedding, Graph};

/// Vertex indices of a counter-clockwise triangle.
pub type Triangle = [usize; 3];

const GHOST: usize = usize::MAX;
const EPS: f64 = f64::EPSILON / 2.0;
const CCW_ERRBOUND: f64 = (3.0 + 16.0 * EPS) * EPS;
const INCIRCLE_ERRBOUND: f64 = (10.0 + 96.0 * EPS) * EPS;

/// Twice the signed area of `abc`; positive when counter-clockwise, zero when
/// the sign cannot be certified.
fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    let left = (a[0] - c[0]) * (b[1] - c[1]);
    let right = (a[1] - c[1]) * (b[0] - c[0]);
    let det = left - right;
    if det.abs() <= CCW_ERRBOUND * (left.abs() + right.abs()) {
        0.0
    } else {
        det
    }
}

/// Positive when `d` is strictly inside the circumcircle of the
/// counter-clockwise triangle `abc`, zero when uncertain.
pub fn in_circumcircle(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> f64 {
    let (adx, ady) = (a[0] - d[0], a[1] - d[1]);
    let (bdx, bdy) = (b[0] - d[0], b[1] - d[1]);
    let (cdx, cdy) = (c[0] - d[0], c[1] - d[1]);
    let alift = adx * adx + ady * ady;
    let blift = bdx * bdx + bdy * bdy;
    let clift = cdx * cdx + cdy * cdy;
    let (bc1, bc2) = (bdx * cdy, cdx * bdy);
    let (ca1, ca2) = (cdx * ady, adx * cdy);
    let (ab1, ab2) = (adx * bdy, bdx * ady);
    let det = alift * (bc1 - bc2) + blift * (ca1 - ca2) + clift * (ab1 - ab2);
    let permanent = (bc1.abs() + bc2.abs()) * alift
        + (ca1.abs() + ca2.abs()) * blift
        + (ab1.abs() + ab2.abs()) * clift;
    if det.abs() <= INCIRCLE_ERRBOUND * permanent {
        0.0
    } else {
        det
    }
}

struct Mesh<'a> {
    pts: &'a [[f64; 2]],
    tris: Vec<Triangle>,
    alive: Vec<bool>,
    /// Directed edge `(u, v)` to the live triangle that has it in ccw order.
    edges: HashMap<(usize, usize), usize>,
    last: usize,
}

impl<'a> Mesh<'a> {
    fn new(pts: &'a [[f64; 2]]) -> Self {
        Mesh {
            pts,
            tris: Vec::new(),
            alive: Vec::new(),
            edges: HashMap::new(),
            last: 0,
        }
    }

    fn add(&mut self, t: Triangle) -> usize {
        let id = self.tris.len();
        for k in 0..3 {
            self.edges.insert((t[k], t[(k + 1) % 3]), id);
        }
        self.tris.push(t);
        self.alive.push(true);
        self.last = id;
        id
    }

    fn kill(&mut self, id: usize) {
        let t = self.tris[id];
        for k in 0..3 {
            let key = (t[k], t[(k + 1) % 3]);
            if self.edges.get(&key) == Some(&id) {
                self.edges.remove(&key);
            }
        }
        self.alive[id] = false;
    }

    fn neighbor(&self, u: usize, v: usize) -> Option<usize> {
        self.edges.get(&(v, u)).copied()
    }

    fn is_bad(&self, id: usize, p: usize) -> bool {
        let [a, b, c] = self.tris[id];
        let q = self.pts[p];
        if c == GHOST {
            let (pa, pb) = (self.pts[a], self.pts[b]);
            let o = orient(pa, pb, q);
            if o > 0.0 {
                return true;
            }
            if o < 0.0 {
                return false;
            }
            // Collinear with the hull edge: bad only strictly inside the segment.
            let t = (q[0] - pa[0]) * (pb[0] - pa[0]) + (q[1] - pa[1]) * (pb[1] - pa[1]);
            let len2 = (pb[0] - pa[0]).powi(2) + (pb[1] - pa[1]).powi(2);
            t > 0.0 && t < len2
        } else {
            in_circumcircle(self.pts[a], self.pts[b], self.pts[c], q) > 0.0
        }
    }

    /// Visibility walk from the most recent triangle toward `p`; returns a
    /// triangle whose closure contains `p`, or a ghost that sees it.
    fn locate(&self, p: usize) -> Option<usize> {
        let q = self.pts[p];
        let mut cur = self.last;
        if !self.alive[cur] {
            cur = self.alive.iter().rposition(|&a| a)?;
        }
        let limit = 4 * self.tris.len() + 16;
        for step in 0..limit {
            let t = self.tris[cur];
            if t[2] == GHOST {
                return Some(cur);
            }
            let mut moved = false;
            for k in 0..3 {
                let k = (k + step) % 3;
                let (u, v) = (t[k], t[(k + 1) % 3]);
                if orient(self.pts[u], self.pts[v], q) < 0.0 {
                    cur = self.neighbor(u, v)?;
                    moved = true;
                    break;
                }
            }
            if !moved {
                return Some(cur);
            }
        }
        None
    }

    fn insert(&mut self, p: usize) -> Result<()> {
        let seed = match self.locate(p).filter(|&t| self.is_bad(t, p)) {
            Some(t) => t,
            None => (0..self.tris.len())
                .find(|&t| self.alive[t] && self.is_bad(t, p))
                .ok_or_else(|| {
                    Error::TriangulationFailure(format!("no cavity found for point {p}"))
                })?,
        };

        let mut bad = vec![seed];
        let mut in_cavity: HashMap<usize, bool> = HashMap::from([(seed, true)]);
        let mut head = 0;
        while head < bad.len() {
            let t = self.tris[bad[head]];
            head += 1;
            for k in 0..3 {
                let (u, v) = (t[k], t[(k + 1) % 3]);
                if let Some(nb) = self.neighbor(u, v) {
                    if let std::collections::hash_map::Entry::Vacant(e) = in_cavity.entry(nb) {
                        let is_bad = self.is_bad(nb, p);
                        e.insert(is_bad);
                        if is_bad {
                            bad.push(nb);
                        }
                    }
                }
            }
        }

        let mut boundary = Vec::new();
        for &id in &bad {
            let t = self.tris[id];
            for k in 0..3 {
                let (u, v) = (t[k], t[(k + 1) % 3]);
                let outside = match self.neighbor(u, v) {
                    Some(nb) => !in_cavity.get(&nb).copied().unwrap_or(false),
                    None => true,
                };
                if outside {
                    boundary.push((u, v));
                }
            }
        }
        for &id in &bad {
            self.kill(id);
        }
        for (u, v) in boundary {
            let t = if u == GHOST {
                [v, p, GHOST]
            } else if v == GHOST {
                [p, u, GHOST]
            } else {
                [u, v, p]
            };
            self.add(t);
        }
        Ok(())
    }
}

/// Delaunay triangles of `points`, each listed counter-clockwise.
pub fn delaunay_triangles(points: &[[f64; 2]]) -> Result<Vec<Triangle>> {
    let n = points.len();
    if n < 3 {
        return Err(Error::invalid(format!(
            "triangulation needs at least 3 points, got {n}"
        )));
    }
    if let Some(i) = points
        .iter()
        .position(|p| !(p[0].is_finite() && p[1].is_finite()))
    {
        return Err(Error::invalid(format!("point {i} has non-finite coordinates")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        points[a][0]
            .total_cmp(&points[b][0])
            .then(points[a][1].total_cmp(&points[b][1]))
    });
    if let Some(w) = order.windows(2).find(|w| points[w[0]] == points[w[1]]) {
        return Err(Error::invalid(format!(
            "points {} and {} coincide",
            w[0].min(w[1]),
            w[0].max(w[1])
        )));
    }

    let (a, b) = (0, 1);
    let c = (2..n)
        .find(|&k| orient(points[a], points[b], points[k]) != 0.0)
        .ok_or_else(|| Error::TriangulationFailure("all points are collinear".into()))?;
    let (b, c) = if orient(points[a], points[b], points[c]) > 0.0 {
        (b, c)
    } else {
        (c, b)
    };

    let mut mesh = Mesh::new(points);
    mesh.add([b, a, GHOST]);
    mesh.add([c, b, GHOST]);
    mesh.add([a, c, GHOST]);
    mesh.add([a, b, c]);
    for p in 0..n {
        if p == a || p == b || p == c {
            continue;
        }
        mesh.insert(p)?;
    }

    Ok(mesh
        .tris
        .iter()
        .zip(&mesh.alive)
        .filter(|(t, &alive)| alive && t[2] != GHOST)
        .map(|(t, _)| *t)
        .collect())
}

/// Graph of Delaunay edges, each weighted by the reciprocal Euclidean length.
pub fn build_delaunay_graph(points: &[[f64; 2]]) -> Result<Graph> {
    let tris = delaunay_triangles(points)?;
    let mut pairs = BTreeSet::new();
    for t in &tris {
        for k in 0..3 {
            let (u, v) = (t[k], t[(k + 1) % 3]);
            pairs.insert((u.min(v), u.max(v)));
        }
    }
    let edges = pairs
        .into_iter()
        .map(|(i, j)| {
            let d = (points[i][0] - points[j][0]).hypot(points[i][1] - points[j][1]);
            Edge {
                i,
                j,
                weight: 1.0 / d,
            }
        })
        .collect();
    Graph::new(points.len(), edges, Some(Embedding::Plane(points.to_vec())))
}
