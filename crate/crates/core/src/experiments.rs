//! Synthetic test signals and sampling layouts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

/// Fast chirp of the one-dimensional example: `½ sin[(30 - 5x/2π) x + 1]`.
pub fn example1_b0(x: f64) -> f64 {
    0.5 * ((30.0 - 5.0 * x / TAU) * x + 1.0).sin()
}

/// Slow chirp of the one-dimensional example: `sin[(2 + 2x/2π) x - 1.5]`.
pub fn example1_b1(x: f64) -> f64 {
    ((2.0 + 2.0 * x / TAU) * x - 1.5).sin()
}

/// Fast plane wave of the two-dimensional example: `½ sin(5x + 5y)`.
pub fn example2_b0(x: f64, y: f64) -> f64 {
    0.5 * (5.0 * x + 5.0 * y).sin()
}

/// Slow plane wave of the two-dimensional example: `cos(x - y)`.
pub fn example2_b1(x: f64, y: f64) -> f64 {
    (x - y).cos()
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` distinct uniform angles in `[0, 2π)`, ascending.
pub fn random_sorted_angles<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    let mut a: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..TAU)).collect();
    loop {
        a.sort_by(f64::total_cmp);
        a.dedup();
        if a.len() == n {
            return a;
        }
        a.push(rng.random_range(0.0..TAU));
    }
}

pub fn equispaced_angles(n: usize) -> Vec<f64> {
    (0..n).map(|i| TAU * i as f64 / n as f64).collect()
}

/// `n` distinct uniform points in `[0, 2π)²`.
pub fn random_points<R: Rng>(n: usize, rng: &mut R) -> Vec<[f64; 2]> {
    let mut pts = Vec::with_capacity(n);
    let mut seen = std::collections::HashSet::new();
    while pts.len() < n {
        let p = [rng.random_range(0.0..TAU), rng.random_range(0.0..TAU)];
        if seen.insert((p[0].to_bits(), p[1].to_bits())) {
            pts.push(p);
        }
    }
    pts
}

/// Samples of a two-component signal with its ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct Components {
    pub b0: Vec<f64>,
    pub b1: Vec<f64>,
    pub signal: Vec<f64>,
}

pub fn example1_at(angles: &[f64]) -> Components {
    let b0: Vec<f64> = angles.iter().map(|&x| example1_b0(x)).collect();
    let b1: Vec<f64> = angles.iter().map(|&x| example1_b1(x)).collect();
    let signal = b0.iter().zip(&b1).map(|(a, b)| a + b).collect();
    Components { b0, b1, signal }
}

pub fn example2_at(points: &[[f64; 2]]) -> Components {
    let b0: Vec<f64> = points.iter().map(|p| example2_b0(p[0], p[1])).collect();
    let b1: Vec<f64> = points.iter().map(|p| example2_b1(p[0], p[1])).collect();
    let signal = b0.iter().zip(&b1).map(|(a, b)| a + b).collect();
    Components { b0, b1, signal }
}
