//! Iterative filtering with spectral kernels in the graph Fourier domain.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{count_extrema, Graph};
use crate::sifting::{outer_loop, run_sift, DecomposeOptions, DecompositionResult, Extracted, OperatorDescriptor};
use crate::spectral::{gft, hann_spectral_kernel, igft, spectral_sifting_limit, SpectralBasis, SpectralKernel};

/// How the spectral cutoff `l` of each IMF is chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutoffChoice {
    /// One cutoff per IMF, in extraction order. The decomposition stops when
    /// the list runs out.
    Manual(Vec<f64>),
    /// [`auto_gft_cutoff`] from the extrema count of each residual.
    Auto,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GftIfOptions {
    pub cutoff: CutoffChoice,
    pub decompose: DecomposeOptions,
}

impl Default for GftIfOptions {
    fn default() -> Self {
        GftIfOptions {
            cutoff: CutoffChoice::Auto,
            decompose: DecomposeOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GftIfResult {
    pub decomposition: DecompositionResult,
    /// Kernel used for each IMF.
    pub kernels: Vec<SpectralKernel>,
    /// Graph Fourier coefficients of each IMF.
    pub imf_spectra: Vec<Vec<f64>>,
}

/// Heuristic cutoff: the eigenvalue at index `min(n - 1, max(1, k))`.
pub fn auto_gft_cutoff(basis: &SpectralBasis, extrema: usize) -> Result<f64> {
    if extrema < 2 {
        return Err(Error::OuterLoopTerminal { extrema });
    }
    let n = basis.n();
    if n < 2 {
        return Err(Error::invalid("automatic cutoff needs at least two eigenvalues"));
    }
    Ok(basis.eigenvalues()[extrema.max(1).min(n - 1)])
}

/// GFT-IF with Hann kernels.
pub fn gft_if(basis: &SpectralBasis, g: &Graph, s: &[f64], opts: &GftIfOptions) -> Result<GftIfResult> {
    if let CutoffChoice::Manual(cutoffs) = &opts.cutoff {
        if let Some(l) = cutoffs.iter().find(|l| !(l.is_finite() && **l > 0.0)) {
            return Err(Error::invalid(format!(
                "kernel cutoff must be positive and finite, got {l}"
            )));
        }
    }
    gft_if_with_kernels(
        basis,
        g,
        s,
        &opts.decompose,
        |index, k| -> Result<Option<(SpectralKernel, bool)>> {
            let (cutoff, experimental) = match &opts.cutoff {
                CutoffChoice::Manual(list) => match list.get(index) {
                    Some(&l) => (l, false),
                    None => return Ok(None),
                },
                CutoffChoice::Auto => (auto_gft_cutoff(basis, k)?, true),
            };
            Ok(Some((hann_spectral_kernel(basis, cutoff)?, experimental)))
        },
    )
}

/// GFT-IF with kernels from `kernel_for(imf_index, extrema_count)`, which
/// returns the kernel and whether it is experimental, or `None` to stop.
/// The inner loop `ŝ ← ŝ - ŵ ⊙ ŝ` runs on spectral coefficients; each IMF
/// is transformed back once.
pub fn gft_if_with_kernels<K>(
    basis: &SpectralBasis,
    g: &Graph,
    s: &[f64],
    opts: &DecomposeOptions,
    mut kernel_for: K,
) -> Result<GftIfResult>
where
    K: FnMut(usize, usize) -> Result<Option<(SpectralKernel, bool)>>,
{
    g.check_signal(s)?;
    if basis.n() != g.n() {
        return Err(Error::invalid(format!(
            "spectral basis has dimension {} but the graph has {} vertices",
            basis.n(),
            g.n()
        )));
    }
    let mut residual_hat = gft(basis, s)?;
    let mut kernels = Vec::new();
    let mut imf_spectra = Vec::new();
    let decomposition = outer_loop(
        s,
        opts,
        |r| count_extrema(g, r),
        |_, k| {
            let Some((kernel, experimental)) = kernel_for(kernels.len(), k)? else {
                return Ok(None);
            };
            basis_len_check(basis, &kernel)?;
            spectral_sifting_limit(&kernel)?;
            let (imf_hat, iterations) = run_sift(&residual_hat, &opts.rule, |x, out| {
                for ((o, xi), w) in out.iter_mut().zip(x).zip(&kernel.values) {
                    *o = w * xi;
                }
            })?;
            let imf = igft(basis, &imf_hat)?;
            for (r, v) in residual_hat.iter_mut().zip(&imf_hat) {
                *r -= v;
            }
            let operator = OperatorDescriptor {
                cutoff: Some(kernel.cutoff),
                experimental,
                ..OperatorDescriptor::new("gft_if")
            };
            kernels.push(kernel);
            imf_spectra.push(imf_hat);
            Ok(Some(Extracted {
                imf,
                iterations,
                operator,
            }))
        },
    )?;
    Ok(GftIfResult {
        decomposition,
        kernels,
        imf_spectra,
    })
}

fn basis_len_check(basis: &SpectralBasis, kernel: &SpectralKernel) -> Result<()> {
    if kernel.len() != basis.n() {
        return Err(Error::invalid(format!(
            "kernel has {} values but the basis has dimension {}",
            kernel.len(),
            basis.n()
        )));
    }
    Ok(())
}
