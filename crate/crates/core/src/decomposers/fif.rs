//! Fast iterative filtering for equispaced periodic sequences.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::count_extrema_circular;
use crate::sifting::{outer_loop, run_sift, DecomposeOptions, DecompositionResult, Extracted, OperatorDescriptor};
use crate::spectral::hann;

use super::DEFAULT_NU;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FifOptions {
    pub nu: f64,
    pub decompose: DecomposeOptions,
}

impl Default for FifOptions {
    fn default() -> Self {
        FifOptions {
            nu: DEFAULT_NU,
            decompose: DecomposeOptions::default(),
        }
    }
}

/// `l = 2⌊ν n / k⌋` samples.
pub fn fif_window_length(n: usize, extrema: usize, nu: f64) -> Result<usize> {
    if extrema < 2 {
        return Err(Error::OuterLoopTerminal { extrema });
    }
    if !(nu.is_finite() && nu > 0.0) {
        return Err(Error::invalid(format!("nu must be positive, got {nu}")));
    }
    let l = 2 * (nu * n as f64 / extrema as f64).floor() as usize;
    if l == 0 {
        return Err(Error::WindowDegenerate { nu, n, extrema });
    }
    Ok(l)
}

/// DFT of the squared base window, in FFT index order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FifKernel {
    pub values: Vec<f64>,
    pub window_length: usize,
}

/// Base window `v_i = hann(i / l)` for `|i| ≤ l`, wrapped onto `n` points
/// and normalized to unit sum; returns the DFT of `v * v`, which is `v̂²`.
pub fn fif_kernel(n: usize, l: usize, planner: &mut FftPlanner<f64>) -> Result<FifKernel> {
    if n == 0 || l == 0 {
        return Err(Error::invalid("window and signal lengths must be positive"));
    }
    let mut v = vec![0.0; n];
    let li = l as i64;
    for i in -li..=li {
        v[i.rem_euclid(n as i64) as usize] += hann(i as f64 / l as f64);
    }
    let sum: f64 = v.iter().sum();
    let mut buf: Vec<Complex<f64>> = v.iter().map(|x| Complex::new(x / sum, 0.0)).collect();
    planner.plan_fft_forward(n).process(&mut buf);
    // The window is even, so its spectrum is real.
    let values = buf.iter().map(|c| c.re * c.re).collect();
    Ok(FifKernel {
        values,
        window_length: l,
    })
}

/// FIF on a periodic equispaced sequence: sifting is a Hadamard product on
/// the DFT of the residual, with one inverse transform per IMF.
pub fn fif_1d(values: &[f64], opts: &FifOptions) -> Result<DecompositionResult> {
    let n = values.len();
    if n < 3 {
        return Err(Error::invalid(format!("need at least 3 samples, got {n}")));
    }
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::invalid(format!("sample {i} is not finite")));
    }
    let mut planner = FftPlanner::new();
    let forward = planner.plan_fft_forward(n);
    let inverse = planner.plan_fft_inverse(n);

    let mut spectrum: Vec<Complex<f64>> = values.iter().map(|&x| Complex::new(x, 0.0)).collect();
    forward.process(&mut spectrum);
    // Interleaved (re, im) so the real-valued sifting loop can run on it.
    let mut residual_hat: Vec<f64> = spectrum.iter().flat_map(|c| [c.re, c.im]).collect();

    outer_loop(
        values,
        &opts.decompose,
        |r| Ok(count_extrema_circular(r)),
        |_, k| {
            let l = fif_window_length(n, k, opts.nu)?;
            let kernel = fif_kernel(n, l, &mut planner)?;
            let (imf_hat, iterations) = run_sift(&residual_hat, &opts.decompose.rule, |x, out| {
                for (i, w) in kernel.values.iter().enumerate() {
                    out[2 * i] = w * x[2 * i];
                    out[2 * i + 1] = w * x[2 * i + 1];
                }
            })?;
            for (r, v) in residual_hat.iter_mut().zip(&imf_hat) {
                *r -= v;
            }
            let mut buf: Vec<Complex<f64>> = imf_hat.chunks(2).map(|c| Complex::new(c[0], c[1])).collect();
            inverse.process(&mut buf);
            let imf = buf.iter().map(|c| c.re / n as f64).collect();
            Ok(Some(Extracted {
                imf,
                iterations,
                operator: OperatorDescriptor {
                    window_length: Some(l as f64),
                    nu: Some(opts.nu),
                    ..OperatorDescriptor::new("fif")
                },
            }))
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sifting::StoppingRule;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::TAU;

    #[test]
    fn window_length_rule() {
        assert_eq!(fif_window_length(512, 16, 1.6).unwrap(), 102);
        assert!(matches!(
            fif_window_length(10, 40, 1.6),
            Err(Error::WindowDegenerate { .. })
        ));
        assert!(matches!(
            fif_window_length(10, 0, 1.6),
            Err(Error::OuterLoopTerminal { .. })
        ));
    }

    #[test]
    fn kernel_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut planner = FftPlanner::new();
        for _ in 0..30 {
            let n = rng.random_range(3..300);
            let l = rng.random_range(1..2 * n);
            let k = fif_kernel(n, l, &mut planner).unwrap();
            assert!((k.values[0] - 1.0).abs() <= 1e-12);
            assert!(k.values.iter().all(|&w| (0.0..=1.0 + 1e-12).contains(&w)));
        }
    }

    #[test]
    fn kernel_matches_direct_dft() {
        let (n, l) = (40usize, 6usize);
        let mut planner = FftPlanner::new();
        let k = fif_kernel(n, l, &mut planner).unwrap();
        let v: Vec<f64> = (0..n)
            .map(|i| {
                let j = if i <= n / 2 { i as f64 } else { i as f64 - n as f64 };
                hann(j / l as f64)
            })
            .collect();
        let sum: f64 = v.iter().sum();
        for f in 0..n {
            let re: f64 = v
                .iter()
                .enumerate()
                .map(|(i, x)| x / sum * (TAU * (f * i) as f64 / n as f64).cos())
                .sum();
            assert!((k.values[f] - re * re).abs() <= 1e-12);
        }
    }

    #[test]
    fn pure_tone_is_captured_by_the_first_imf() {
        let n = 256;
        let s: Vec<f64> = (0..n).map(|i| (TAU * 4.0 * i as f64 / n as f64).sin()).collect();
        let res = fif_1d(&s, &FifOptions::default()).unwrap();
        assert!(!res.imfs.is_empty());
        let r: f64 = res.imfs[0].iter().zip(&s).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let norm = s.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!(r <= 1e-3 * norm, "{r}");
        assert!(res.residual.norm() <= 1e-3 * norm);
        assert!(res.reconstruction_error(&s) <= 1e-12);
    }

    #[test]
    fn constant_sequence_has_no_imfs() {
        let res = fif_1d(&[2.0; 10], &FifOptions::default()).unwrap();
        assert!(res.imfs.is_empty());
    }

    #[test]
    fn rejects_short_or_non_finite_input() {
        assert!(fif_1d(&[1.0, 2.0], &FifOptions::default()).is_err());
        assert!(fif_1d(&[1.0, f64::NAN, 0.0], &FifOptions::default()).is_err());
    }

    #[test]
    fn fixed_iterations_match_geometric_series() {
        let n = 128;
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let s: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let opts = FifOptions {
            nu: 1.6,
            decompose: DecomposeOptions::with_rule(StoppingRule::fixed(5), 1),
        };
        let res = fif_1d(&s, &opts).unwrap();
        let l = res.meta[0].operator.window_length.unwrap() as usize;
        let mut planner = FftPlanner::new();
        let k = fif_kernel(n, l, &mut planner).unwrap();
        let mut buf: Vec<Complex<f64>> = s.iter().map(|&x| Complex::new(x, 0.0)).collect();
        planner.plan_fft_forward(n).process(&mut buf);
        for (c, w) in buf.iter_mut().zip(&k.values) {
            *c *= (1.0 - w).powi(5);
        }
        planner.plan_fft_inverse(n).process(&mut buf);
        for (a, c) in res.imfs[0].iter().zip(&buf) {
            assert!((a - c.re / n as f64).abs() <= 1e-12);
        }
    }
}
