//! Distance-based iterative filtering.

use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::distances::DistanceMatrix;
use crate::error::{Error, Result};
use crate::graph::{Embedding, Graph};
use crate::sifting::{decompose, DecomposeOptions, DecompositionResult};

use super::window::{build_window_operator_with, db_window_length, Storage, WindowMode};
use super::DEFAULT_NU;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DbIfOptions {
    pub nu: f64,
    pub mode: WindowMode,
    pub storage: Storage,
    /// Domain extent for the window-length rule. Derived from the graph
    /// embedding when absent.
    pub extent: Option<f64>,
    #[serde(default)]
    pub planar_rule: PlanarWindowRule,
    pub decompose: DecomposeOptions,
}

impl Default for DbIfOptions {
    fn default() -> Self {
        DbIfOptions {
            nu: DEFAULT_NU,
            mode: WindowMode::RowStochastic,
            storage: Storage::Auto,
            extent: None,
            planar_rule: PlanarWindowRule::default(),
            decompose: DecomposeOptions::default(),
        }
    }
}

/// Window-length rule for planar embeddings with bounding-box area `A`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PlanarWindowRule {
    /// `l = 2ν · sqrt(A / k)`: the one-dimensional rule with the mean
    /// spacing between extrema, `sqrt(A / k)`, in place of `extent / k`.
    #[default]
    ExtremaSpacing,
    /// `l = 2ν · sqrt(A) / k`.
    BoundingBox,
}

/// Extent of the embedding domain: `2π` for points on the circle, the square
/// root of the bounding-box area for planar points. The second value is true
/// for the planar rule.
pub fn domain_extent(g: &Graph) -> Result<(f64, bool)> {
    match g.embedding() {
        Some(Embedding::Circle(_)) => Ok((TAU, false)),
        Some(Embedding::Plane(pts)) => {
            let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
            for p in pts {
                for d in 0..2 {
                    lo[d] = lo[d].min(p[d]);
                    hi[d] = hi[d].max(p[d]);
                }
            }
            let area = (hi[0] - lo[0]) * (hi[1] - lo[1]);
            if !(area > 0.0) {
                return Err(Error::invalid("planar embedding has a degenerate bounding box"));
            }
            Ok((area.sqrt(), true))
        }
        None => Err(Error::invalid(
            "graph has no embedding; supply the domain extent explicitly",
        )),
    }
}

/// Decomposes `s` with windows `B = normalize(hann(C / l))` and `W = B·B`,
/// sizing `l` from the extrema count of each residual.
pub fn db_if(g: &Graph, c: &DistanceMatrix, s: &[f64], opts: &DbIfOptions) -> Result<DecompositionResult> {
    if c.n() != g.n() {
        return Err(Error::invalid(format!(
            "distance matrix is {0}x{0} but the graph has {1} vertices",
            c.n(),
            g.n()
        )));
    }
    let extent = match opts.extent {
        Some(e) => Extent::Given(e),
        None => match domain_extent(g)? {
            (e, false) => Extent::Given(e),
            (side, true) => Extent::Planar(side * side),
        },
    };
    decompose(
        |_, k| {
            let (l, experimental) = match extent {
                Extent::Given(e) => (db_window_length(e, k, opts.nu)?, false),
                Extent::Planar(area) => match opts.planar_rule {
                    PlanarWindowRule::ExtremaSpacing => {
                        (db_window_length((area * k as f64).sqrt(), k, opts.nu)?, true)
                    }
                    PlanarWindowRule::BoundingBox => (db_window_length(area.sqrt(), k, opts.nu)?, true),
                },
            };
            let mut op = build_window_operator_with(c, l, opts.mode, opts.storage)?;
            op.nu = Some(opts.nu);
            op.experimental = experimental;
            Ok(op)
        },
        s,
        g,
        &opts.decompose,
    )
}

#[derive(Clone, Copy)]
enum Extent {
    Given(f64),
    Planar(f64),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distances::circular_distance_matrix;
    use crate::graph::{build_ring_graph, count_extrema};
    use crate::sifting::StoppingRule;

    fn equispaced(n: usize) -> Vec<f64> {
        (0..n).map(|i| TAU * i as f64 / n as f64).collect()
    }

    #[test]
    fn constant_signal_has_no_imfs() {
        let a = equispaced(32);
        let g = build_ring_graph(&a, 2).unwrap();
        let c = circular_distance_matrix(&a).unwrap();
        let s = vec![1.5; 32];
        let res = db_if(&g, &c, &s, &DbIfOptions::default()).unwrap();
        assert!(res.imfs.is_empty());
        assert_eq!(res.residual.as_slice(), &s[..]);
    }

    #[test]
    fn two_tone_separation_on_ring() {
        let a = equispaced(256);
        let g = build_ring_graph(&a, 2).unwrap();
        let c = circular_distance_matrix(&a).unwrap();
        let fast: Vec<f64> = a.iter().map(|t| (20.0 * t).sin()).collect();
        let slow: Vec<f64> = a.iter().map(|t| (2.0 * t).cos()).collect();
        let s: Vec<f64> = fast.iter().zip(&slow).map(|(x, y)| x + y).collect();
        let mut opts = DbIfOptions::default();
        opts.decompose.max_imfs = 1;
        let res = db_if(&g, &c, &s, &opts).unwrap();
        assert_eq!(res.imfs.len(), 1);
        let err: f64 = res.imfs[0]
            .iter()
            .zip(&fast)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
        assert!(err < 0.1 * (128.0f64).sqrt(), "{err}");
        assert!(res.reconstruction_error(&s) <= 1e-12);
        let meta = &res.meta[0];
        assert_eq!(meta.extrema_count, 40);
        assert_eq!(meta.operator.nu, Some(DEFAULT_NU));
        assert!(!meta.operator.experimental);
    }

    #[test]
    fn fixed_iterations_are_reported() {
        let a = equispaced(64);
        let g = build_ring_graph(&a, 1).unwrap();
        let c = circular_distance_matrix(&a).unwrap();
        let s: Vec<f64> = a.iter().map(|t| (5.0 * t).sin() + 0.1 * t).collect();
        let opts = DbIfOptions {
            decompose: DecomposeOptions::with_rule(StoppingRule::fixed(10), 3),
            ..Default::default()
        };
        let res = db_if(&g, &c, &s, &opts).unwrap();
        assert!(res.meta.iter().all(|m| m.iterations == 10));
    }

    #[test]
    fn planar_window_rules() {
        use crate::distances::euclidean_distance_matrix;
        use crate::graph::build_delaunay_graph;
        let pts: Vec<[f64; 2]> = (0..36).map(|i| [(i % 6) as f64 * 0.8 + 0.1 * (i / 6) as f64, (i / 6) as f64 * 0.6]).collect();
        let g = build_delaunay_graph(&pts).unwrap();
        let c = euclidean_distance_matrix(&pts).unwrap();
        let s: Vec<f64> = pts.iter().map(|p| (3.0 * p[0]).sin() * (2.0 * p[1]).cos()).collect();
        let (side, experimental) = domain_extent(&g).unwrap();
        assert!(experimental);
        let area: f64 = (4.0 + 0.5) * 3.0;
        assert!((side - area.sqrt()).abs() < 1e-12);
        let k = count_extrema(&g, &s).unwrap() as f64;
        let mut opts = DbIfOptions::default();
        opts.decompose.max_imfs = 1;
        let res = db_if(&g, &c, &s, &opts).unwrap();
        let l = res.meta[0].operator.window_length.unwrap();
        assert!((l - 2.0 * DEFAULT_NU * (area / k).sqrt()).abs() < 1e-12);
        assert!(res.meta[0].operator.experimental);
        opts.planar_rule = PlanarWindowRule::BoundingBox;
        let res = db_if(&g, &c, &s, &opts).unwrap();
        let l = res.meta[0].operator.window_length.unwrap();
        assert!((l - 2.0 * DEFAULT_NU * area.sqrt() / k).abs() < 1e-12);
    }

    #[test]
    fn mismatched_distance_matrix() {
        let a = equispaced(16);
        let g = build_ring_graph(&a, 1).unwrap();
        let c = circular_distance_matrix(&a[..8]).unwrap();
        assert!(db_if(&g, &c, &[0.0; 16], &DbIfOptions::default()).is_err());
    }
}
