//! Convergence checks and timing runs over generated data.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::decomposers::{db_if, fif_1d, gft_if, CutoffChoice, DbIfOptions, FifOptions, GftIfOptions, Storage};
use crate::distances::circular_distance_matrix;
use crate::error::{Error, Result};
use crate::experiments::{equispaced_angles, example1_at, random_sorted_angles, rng_from_seed};
use crate::graph::{build_ring_graph, laplacian, norm2};
use crate::sifting::{sift, sifting_limit, DecomposeOptions, DenseOperator, StoppingRule};
use crate::spectral::eigendecompose;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    GftIf,
    DbIf,
    Fif,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::GftIf, Method::DbIf, Method::Fif];

    pub fn name(self) -> &'static str {
        match self {
            Method::GftIf => "gft_if",
            Method::DbIf => "db_if",
            Method::Fif => "fif",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").to_ascii_lowercase().as_str() {
            "gft_if" => Ok(Method::GftIf),
            "db_if" => Ok(Method::DbIf),
            "fif" => Ok(Method::Fif),
            _ => Err(Error::invalid(format!("unknown method {s:?}; expected gft_if, db_if or fif"))),
        }
    }
}

/// Random symmetric matrix `Q diag(λ) Qᵀ`, `Q` the orthogonal factor of a
/// uniform random matrix.
pub fn random_symmetric_operator<R: Rng>(eigenvalues: &[f64], rng: &mut R) -> DMatrix<f64> {
    let n = eigenvalues.len();
    let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    let q = a.qr().q();
    let w = &q * DMatrix::from_diagonal(&DVector::from_column_slice(eigenvalues)) * q.transpose();
    (&w + w.transpose()) * 0.5
}

/// Spectrum with one planted zero; every other eigenvalue is zero with
/// probability 1/4 and otherwise uniform in `[lo, hi]`.
pub fn random_sifting_spectrum<R: Rng>(n: usize, lo: f64, hi: f64, rng: &mut R) -> Vec<f64> {
    let mut eigs = vec![0.0];
    eigs.extend((1..n).map(|_| if rng.random_bool(0.25) { 0.0 } else { rng.random_range(lo..=hi) }));
    eigs
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitCheckConfig {
    pub trials: usize,
    pub n: usize,
    pub iterations: usize,
    pub seed: u64,
    /// Nonzero eigenvalues are drawn from `[min_eigenvalue, max_eigenvalue]`.
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    pub violation_eigenvalue: f64,
    pub tolerance: f64,
}

impl Default for LimitCheckConfig {
    fn default() -> Self {
        LimitCheckConfig {
            trials: 100,
            n: 8,
            iterations: 10_000,
            seed: 0,
            min_eigenvalue: 0.01,
            max_eigenvalue: 1.9,
            violation_eigenvalue: 2.1,
            tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitCheckReport {
    pub config: LimitCheckConfig,
    /// Largest `‖s_m - s_∞‖ / ‖s_0‖` over all trials.
    pub max_relative_error: f64,
    pub within_tolerance: bool,
    pub violation_detected: bool,
    pub violation_detail: String,
    pub zero_operator_exact: bool,
}

/// Compares long sifting runs against the closed-form limit on random
/// symmetric operators, then checks one operator with an eigenvalue past 2
/// and the zero operator.
pub fn limit_check(config: &LimitCheckConfig) -> Result<LimitCheckReport> {
    if config.n == 0 || config.trials == 0 || config.iterations == 0 {
        return Err(Error::invalid("trials, n and iterations must be positive"));
    }
    let mut rng = rng_from_seed(config.seed);
    let rule = StoppingRule::fixed(config.iterations);
    let mut max_err: f64 = 0.0;
    for _ in 0..config.trials {
        let eigs = random_sifting_spectrum(config.n, config.min_eigenvalue, config.max_eigenvalue, &mut rng);
        let w = random_symmetric_operator(&eigs, &mut rng);
        let s0: Vec<f64> = (0..config.n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let limit = sifting_limit(&w, &s0, Some(1e-10))?;
        let out = sift(&DenseOperator::new(w)?, &s0, &rule)?;
        let diff: Vec<f64> = out.imf.iter().zip(&limit).map(|(a, b)| a - b).collect();
        max_err = max_err.max(norm2(&diff) / norm2(&s0));
    }

    let mut eigs = random_sifting_spectrum(config.n, config.min_eigenvalue, config.max_eigenvalue, &mut rng);
    let last = eigs.len() - 1;
    eigs[last] = config.violation_eigenvalue;
    let w = random_symmetric_operator(&eigs, &mut rng);
    let s0: Vec<f64> = (0..config.n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let sifted = sift(&DenseOperator::new(w.clone())?, &s0, &rule);
    let limit = sifting_limit(&w, &s0, None);
    let violation_detected =
        matches!(sifted, Err(Error::Divergence { .. })) && matches!(limit, Err(Error::NonConvergence { .. }));
    let violation_detail = format!(
        "sift: {}; limit: {}",
        sifted.map(|_| "converged".to_string()).unwrap_or_else(|e| e.to_string()),
        limit.map(|_| "computed".to_string()).unwrap_or_else(|e| e.to_string())
    );

    let zero = DMatrix::zeros(config.n, config.n);
    let s0: Vec<f64> = (0..config.n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let zero_operator_exact = sifting_limit(&zero, &s0, None)? == s0
        && sift(&DenseOperator::new(zero)?, &s0, &rule)?.imf == s0;

    Ok(LimitCheckReport {
        config: config.clone(),
        max_relative_error: max_err,
        within_tolerance: max_err <= config.tolerance,
        violation_detected,
        violation_detail,
        zero_operator_exact,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkConfig {
    pub sizes: Vec<usize>,
    pub methods: Vec<Method>,
    /// Inner iterations per IMF.
    pub iterations: usize,
    /// IMFs extracted per run, whatever the extrema count.
    pub imfs: usize,
    pub seed: u64,
    pub warmup: bool,
    /// Cells whose estimated working set exceeds this are marked failed
    /// without running.
    pub memory_limit_bytes: u64,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        BenchmarkConfig {
            sizes: vec![128, 512, 2048],
            methods: Method::ALL.to_vec(),
            iterations: 10,
            imfs: 10,
            seed: 0,
            warmup: true,
            memory_limit_bytes: 8 << 30,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRow {
    pub n: usize,
    pub method: Method,
    pub precompute_seconds: Option<f64>,
    pub run_seconds: Option<f64>,
    pub imfs_extracted: Option<usize>,
    pub failed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub config: BenchmarkConfig,
    pub environment: String,
    pub rows: Vec<BenchmarkRow>,
}

impl BenchmarkReport {
    pub fn row(&self, n: usize, method: Method) -> Option<&BenchmarkRow> {
        self.rows.iter().find(|r| r.n == n && r.method == method)
    }
}

/// CPU model, logical core count and OS.
pub fn environment_note() -> String {
    let cpu = std::fs::read_to_string("/proc/cpuinfo")
        .ok()
        .and_then(|s| {
            s.lines()
                .find(|l| l.starts_with("model name"))
                .and_then(|l| l.split(':').nth(1))
                .map(|m| m.trim().to_string())
        })
        .unwrap_or_else(|| "unknown CPU".into());
    let cores = std::thread::available_parallelism().map_or(1, |c| c.get());
    format!("{cpu}; {cores} logical cores; {} {}", std::env::consts::OS, std::env::consts::ARCH)
}

/// Rough peak working set of one cell in bytes.
pub fn estimated_bytes(n: usize, method: Method) -> u64 {
    let n2 = (n as u64) * (n as u64) * 8;
    match method {
        // Laplacian, eigenvector matrix and solver workspace.
        Method::GftIf => 4 * n2,
        // Distance matrix and dense window matrix.
        Method::DbIf => 3 * n2,
        Method::Fif => 64 * n as u64,
    }
}

struct Timing {
    precompute: f64,
    run: f64,
    imfs: usize,
}

fn time_cell(n: usize, method: Method, config: &BenchmarkConfig) -> Result<Timing> {
    let decompose = DecomposeOptions {
        rule: StoppingRule::fixed(config.iterations),
        max_imfs: config.imfs,
        force_imfs: true,
    };
    match method {
        Method::GftIf => {
            let angles = random_sorted_angles(n, &mut rng_from_seed(config.seed));
            let data = example1_at(&angles);
            let g = build_ring_graph(&angles, 2)?;
            let t = Instant::now();
            let basis = eigendecompose(&laplacian(&g))?;
            let precompute = t.elapsed().as_secs_f64();
            let opts = GftIfOptions {
                cutoff: CutoffChoice::Auto,
                decompose,
            };
            let t = Instant::now();
            let res = gft_if(&basis, &g, &data.signal, &opts)?;
            Ok(Timing {
                precompute,
                run: t.elapsed().as_secs_f64(),
                imfs: res.decomposition.imfs.len(),
            })
        }
        Method::DbIf => {
            let angles = random_sorted_angles(n, &mut rng_from_seed(config.seed));
            let data = example1_at(&angles);
            let g = build_ring_graph(&angles, 2)?;
            let t = Instant::now();
            let c = circular_distance_matrix(&angles)?;
            let precompute = t.elapsed().as_secs_f64();
            let opts = DbIfOptions {
                storage: Storage::Dense,
                decompose,
                ..Default::default()
            };
            let t = Instant::now();
            let res = db_if(&g, &c, &data.signal, &opts)?;
            Ok(Timing {
                precompute,
                run: t.elapsed().as_secs_f64(),
                imfs: res.imfs.len(),
            })
        }
        Method::Fif => {
            let data = example1_at(&equispaced_angles(n));
            let opts = FifOptions {
                decompose,
                ..Default::default()
            };
            let t = Instant::now();
            let res = fif_1d(&data.signal, &opts)?;
            Ok(Timing {
                precompute: 0.0,
                run: t.elapsed().as_secs_f64(),
                imfs: res.imfs.len(),
            })
        }
    }
}

/// Times every `(n, method)` cell in order. A failing cell is recorded and
/// the run continues.
pub fn benchmark(config: &BenchmarkConfig) -> Result<BenchmarkReport> {
    if config.sizes.is_empty() || config.methods.is_empty() {
        return Err(Error::invalid("benchmark needs at least one size and one method"));
    }
    if config.sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("benchmark sizes must be strictly ascending"));
    }
    if let Some(&n) = config.sizes.iter().find(|&&n| n < 8) {
        return Err(Error::invalid(format!("benchmark sizes must be at least 8, got {n}")));
    }
    if config.iterations == 0 || config.imfs == 0 {
        return Err(Error::invalid("iterations and imfs must be positive"));
    }
    let mut rows = Vec::new();
    for &n in &config.sizes {
        for &method in &config.methods {
            let bytes = estimated_bytes(n, method);
            let outcome = if bytes > config.memory_limit_bytes {
                Err(format!(
                    "estimated memory {bytes} bytes exceeds the limit of {} bytes",
                    config.memory_limit_bytes
                ))
            } else {
                catch_unwind(AssertUnwindSafe(|| {
                    if config.warmup {
                        time_cell(n, method, config)?;
                    }
                    time_cell(n, method, config)
                }))
                .map_err(|p| {
                    p.downcast_ref::<String>()
                        .cloned()
                        .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                        .unwrap_or_else(|| "panic".into())
                })
                .and_then(|r| r.map_err(|e| e.to_string()))
            };
            rows.push(match outcome {
                Ok(t) => BenchmarkRow {
                    n,
                    method,
                    precompute_seconds: Some(t.precompute),
                    run_seconds: Some(t.run),
                    imfs_extracted: Some(t.imfs),
                    failed: false,
                    error: None,
                },
                Err(e) => BenchmarkRow {
                    n,
                    method,
                    precompute_seconds: None,
                    run_seconds: None,
                    imfs_extracted: None,
                    failed: true,
                    error: Some(e),
                },
            });
        }
    }
    Ok(BenchmarkReport {
        config: config.clone(),
        environment: environment_note(),
        rows,
    })
}
