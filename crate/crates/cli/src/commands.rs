use std::f64::consts::TAU;
use std::path::PathBuf;

use graphif::decomposers::{
    auto_gft_cutoff, db_if, fif_1d, gft_if, CutoffChoice, DbIfOptions, FifOptions, GftIfOptions,
};
use graphif::distances::{circular_distance_matrix, euclidean_distance_matrix, shortest_path_matrix, DistanceMatrix};
use graphif::experiments::{equispaced_angles, example1_at, example2_at, random_points, random_sorted_angles, rng_from_seed};
use graphif::graph::{build_delaunay_graph, build_ring_graph, count_extrema, laplacian};
use graphif::harness::{benchmark, limit_check, BenchmarkConfig, LimitCheckConfig, Method};
use graphif::io::{self, Coordinates};
use graphif::sifting::{DecomposeOptions, StopMode};
use graphif::spectral::{eigendecompose, gft, hann_spectral_kernel};
use graphif::{DecompositionResult, Embedding, Error, Graph, Result, StoppingRule};
use serde_json::json;

use crate::config::{DistanceSource, GraphKind, RunConfig};
use crate::{BenchmarkArgs, Cli, Command, GenerateArgs, IngestArgs, LimitCheckArgs, RunArgs};

struct Context {
    config: Option<PathBuf>,
    seed: Option<u64>,
    out: PathBuf,
    quiet: bool,
}

impl Context {
    fn say(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            println!("{}", msg.as_ref());
        }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn seed(&self, config: Option<u64>) -> u64 {
        self.seed.or(config).unwrap_or(0)
    }
}

pub fn run(cli: Cli) -> Result<()> {
    let ctx = Context {
        config: cli.config,
        seed: cli.seed,
        out: cli.out,
        quiet: cli.quiet,
    };
    std::fs::create_dir_all(&ctx.out).map_err(|e| Error::io(&ctx.out, e))?;
    match cli.command {
        Command::Generate(a) => generate(&ctx, a),
        Command::Ingest(a) => ingest(&ctx, a),
        Command::Decompose(a) => decompose(&ctx, resolve(&ctx, a)?),
        Command::Spectrum(a) => spectrum(&ctx, resolve(&ctx, a)?),
        Command::Benchmark(a) => bench(&ctx, a),
        Command::LimitCheck(a) => limits(&ctx, a),
    }
}

fn generate(ctx: &Context, a: GenerateArgs) -> Result<()> {
    if a.n < 8 {
        return Err(Error::invalid(format!("n must be at least 8, got {}", a.n)));
    }
    let mut rng = rng_from_seed(ctx.seed(None));
    let (coords, comps) = match a.example {
        1 => {
            let angles = if a.equispaced {
                equispaced_angles(a.n)
            } else {
                random_sorted_angles(a.n, &mut rng)
            };
            let c = example1_at(&angles);
            (Coordinates::Line(angles), c)
        }
        _ => {
            if a.equispaced {
                return Err(Error::invalid("--equispaced applies to example 1 only"));
            }
            let pts = random_points(a.n, &mut rng);
            let c = example2_at(&pts);
            (Coordinates::Plane(pts), c)
        }
    };
    io::write_points(&ctx.path("points.csv"), &coords)?;
    io::write_signal(&ctx.path("signal.csv"), &comps.signal)?;
    io::write_signal(&ctx.path("b0.csv"), &comps.b0)?;
    io::write_signal(&ctx.path("b1.csv"), &comps.b1)?;
    ctx.say(format!("example {} with {} vertices written to {}", a.example, a.n, ctx.out.display()));
    Ok(())
}

fn ingest(ctx: &Context, a: IngestArgs) -> Result<()> {
    let points = io::read_points(&a.points)?;
    let rows = io::read_signal(&a.signal)?;
    let values = io::bind_signal(&points.ids, &rows)?;
    let n = values.len();
    let (graph, coords, order, extra) = match (&points.coords, a.graph) {
        (Coordinates::Line(t), GraphKind::Auto | GraphKind::Ring) => {
            if n < 3 {
                return Err(Error::invalid("need at least 3 samples"));
            }
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&i, &j| t[i].total_cmp(&t[j]));
            if let Some(w) = order.windows(2).find(|w| t[w[0]] == t[w[1]]) {
                return Err(Error::invalid(format!(
                    "ids {} and {} share the timestamp {}",
                    points.ids[w[0]], points.ids[w[1]], t[w[0]]
                )));
            }
            let t_min = t[order[0]];
            let span = t[order[n - 1]] - t_min;
            let period = span * n as f64 / (n - 1) as f64;
            let angles: Vec<f64> = order.iter().map(|&i| TAU * (t[i] - t_min) / period).collect();
            let g = build_ring_graph(&angles, a.neighbors)?;
            let extra = json!({ "t_min": t_min, "period": period, "neighbors_per_side": a.neighbors });
            (g, Coordinates::Line(angles), order, extra)
        }
        (Coordinates::Plane(p), GraphKind::Auto | GraphKind::Delaunay) => {
            let g = build_delaunay_graph(p)?;
            (g, Coordinates::Plane(p.clone()), (0..n).collect(), json!({}))
        }
        (Coordinates::Line(_), kind) | (Coordinates::Plane(_), kind) => {
            return Err(Error::invalid(format!(
                "graph kind {kind:?} does not fit {}-dimensional points",
                if matches!(points.coords, Coordinates::Line(_)) { 1 } else { 2 }
            )));
        }
    };
    let kind = match coords {
        Coordinates::Line(_) => GraphKind::Ring,
        Coordinates::Plane(_) => GraphKind::Delaunay,
    };
    let signal: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    io::write_points(&ctx.path("points.csv"), &coords)?;
    io::write_signal(&ctx.path("signal.csv"), &signal)?;
    io::write_edges(&ctx.path("edges.csv"), graph.edges())?;
    let ids_path = ctx.path("ids.csv");
    let mut ids_csv = String::from("id,source_id\n");
    for (v, &i) in order.iter().enumerate() {
        ids_csv.push_str(&format!("{v},{}\n", points.ids[i]));
    }
    std::fs::write(&ids_path, ids_csv).map_err(|e| Error::io(&ids_path, e))?;
    let abs_out = std::fs::canonicalize(&ctx.out).map_err(|e| Error::io(&ctx.out, e))?;
    let mut cfg = RunConfig {
        points: Some(abs_out.join("points.csv")),
        signal: Some(abs_out.join("signal.csv")),
        ..Default::default()
    };
    cfg.graph.kind = kind;
    cfg.graph.neighbors_per_side = a.neighbors;
    io::write_json(&ctx.path("config.json"), &cfg)?;
    io::write_json(
        &ctx.path("bundle.json"),
        &json!({
            "graph": kind,
            "n": n,
            "edges": graph.edges().len(),
            "connected": graph.is_connected(),
            "points_source": a.points,
            "signal_source": a.signal,
            "mapping": extra,
        }),
    )?;
    if !graph.is_connected() {
        eprintln!("warning: graph has {} connected components", graph.component_count());
    }
    ctx.say(format!(
        "{n} vertices, {} edges ({kind:?}) written to {}",
        graph.edges().len(),
        ctx.out.display()
    ));
    Ok(())
}

/// Merges the JSON configuration with command-line overrides.
fn resolve(ctx: &Context, a: RunArgs) -> Result<RunConfig> {
    let mut c = RunConfig::load(ctx.config.as_deref())?;
    if let Some(v) = a.method {
        c.method = v;
    }
    if a.points.is_some() {
        c.points = a.points;
    }
    if a.signal.is_some() {
        c.signal = a.signal;
    }
    if let Some(v) = a.graph {
        c.graph.kind = v;
    }
    if a.edges.is_some() {
        c.graph.edges = a.edges;
        if a.graph.is_none() {
            c.graph.kind = GraphKind::EdgeList;
        }
    }
    if let Some(v) = a.neighbors {
        c.graph.neighbors_per_side = v;
    }
    if let Some(v) = a.nu {
        c.nu = v;
    }
    if a.cutoff.is_some() {
        c.cutoffs = a.cutoff;
    }
    if let Some(v) = a.mode {
        c.mode = v;
    }
    if let Some(v) = a.storage {
        c.storage = v;
    }
    if let Some(v) = a.planar_rule {
        c.planar_rule = v;
    }
    if a.extent.is_some() {
        c.extent = a.extent;
    }
    if let Some(m) = a.fixed_iterations {
        c.rule = StoppingRule::fixed(m);
    }
    if let Some(d) = a.delta {
        c.rule.mode = StopMode::RelativeChange;
        c.rule.delta = d;
    }
    if let Some(m) = a.max_iterations {
        c.rule.max_iterations = m;
    }
    if let Some(k) = a.max_imfs {
        c.max_imfs = k;
    }
    if let Some(path) = a.distances {
        c.distance = DistanceSource::File { path };
    }
    if let Some(method) = a.shortest_path {
        c.distance = DistanceSource::ShortestPath {
            method,
            edge_length: Default::default(),
        };
    }
    c.seed = ctx.seed(Some(c.seed));
    Ok(c)
}

struct Inputs {
    coords: Option<Coordinates>,
    signal: Vec<f64>,
}

fn load_inputs(cfg: &RunConfig) -> Result<Inputs> {
    let signal_path = cfg
        .signal
        .as_ref()
        .ok_or_else(|| Error::invalid("no signal file given (--signal or \"signal\" in the config)"))?;
    match &cfg.points {
        Some(p) => {
            let points = io::read_points(p)?;
            let signal = io::bind_signal(&points.ids, &io::read_signal(signal_path)?)?;
            Ok(Inputs {
                coords: Some(points.coords),
                signal,
            })
        }
        None => Ok(Inputs {
            coords: None,
            signal: io::read_signal_values(signal_path)?,
        }),
    }
}

fn build_graph(cfg: &RunConfig, inputs: &Inputs) -> Result<Graph> {
    let kind = match (cfg.graph.kind, &inputs.coords) {
        (GraphKind::Auto, _) if cfg.graph.edges.is_some() => GraphKind::EdgeList,
        (GraphKind::Auto, Some(Coordinates::Line(_))) => GraphKind::Ring,
        (GraphKind::Auto, Some(Coordinates::Plane(_))) => GraphKind::Delaunay,
        (GraphKind::Auto, None) => {
            return Err(Error::invalid("a graph needs a points file or an edge list"));
        }
        (k, _) => k,
    };
    match (kind, &inputs.coords) {
        (GraphKind::Ring, Some(Coordinates::Line(a))) => build_ring_graph(a, cfg.graph.neighbors_per_side),
        (GraphKind::Delaunay, Some(Coordinates::Plane(p))) => build_delaunay_graph(p),
        (GraphKind::EdgeList, coords) => {
            let path = cfg
                .graph
                .edges
                .as_ref()
                .ok_or_else(|| Error::invalid("edge-list graph needs an edges file"))?;
            let embedding = match coords {
                Some(Coordinates::Line(a)) => Some(Embedding::Circle(a.clone())),
                Some(Coordinates::Plane(p)) => Some(Embedding::Plane(p.clone())),
                None => None,
            };
            Graph::new(inputs.signal.len(), io::read_edges(path)?, embedding)
        }
        (k, _) => Err(Error::invalid(format!(
            "graph kind {k:?} needs {} points",
            if k == GraphKind::Ring { "one-dimensional" } else { "planar" }
        ))),
    }
}

fn distance_matrix(cfg: &RunConfig, g: &Graph) -> Result<DistanceMatrix> {
    match &cfg.distance {
        DistanceSource::Embedding => match g.embedding() {
            Some(Embedding::Circle(a)) => circular_distance_matrix(a),
            Some(Embedding::Plane(p)) => euclidean_distance_matrix(p),
            None => Err(Error::invalid(
                "graph has no coordinates; use shortest-path distances or a distance file",
            )),
        },
        DistanceSource::ShortestPath { method, edge_length } => shortest_path_matrix(g, *method, *edge_length),
        DistanceSource::File { path } => io::read_distance_matrix(path),
    }
}

fn fif_guard(cfg: &RunConfig, inputs: &Inputs) -> Result<()> {
    let reject = |why: &str| {
        Err(Error::invalid(format!(
            "FIF needs equispaced one-dimensional samples ({why}); use gft_if or db_if for irregularly sampled or graph data"
        )))
    };
    if cfg.graph.kind == GraphKind::Delaunay || cfg.graph.kind == GraphKind::EdgeList || cfg.graph.edges.is_some() {
        return reject("a graph was requested");
    }
    match &inputs.coords {
        None => Ok(()),
        Some(Coordinates::Plane(_)) => reject("the points are planar"),
        Some(Coordinates::Line(x)) => {
            let n = x.len();
            if n < 2 {
                return Ok(());
            }
            let step = (x[n - 1] - x[0]) / (n - 1) as f64;
            let tol = 1e-9 * (x[n - 1] - x[0]).abs().max(1.0);
            if !(step > 0.0) || x.iter().enumerate().any(|(i, &xi)| (xi - x[0] - i as f64 * step).abs() > tol) {
                return reject("the points are not evenly spaced");
            }
            Ok(())
        }
    }
}

fn decompose_options(cfg: &RunConfig) -> DecomposeOptions {
    DecomposeOptions::with_rule(cfg.rule, cfg.max_imfs)
}

fn decompose(ctx: &Context, cfg: RunConfig) -> Result<()> {
    let inputs = load_inputs(&cfg)?;
    let mut extra = serde_json::Map::new();
    extra.insert("config".into(), serde_json::to_value(&cfg)?);
    let result: DecompositionResult = match cfg.method {
        Method::Fif => {
            fif_guard(&cfg, &inputs)?;
            let opts = FifOptions {
                nu: cfg.nu,
                decompose: decompose_options(&cfg),
            };
            fif_1d(&inputs.signal, &opts)?
        }
        Method::DbIf => {
            let g = build_graph(&cfg, &inputs)?;
            let c = distance_matrix(&cfg, &g)?;
            let opts = DbIfOptions {
                nu: cfg.nu,
                mode: cfg.mode,
                storage: cfg.storage,
                extent: cfg.extent,
                planar_rule: cfg.planar_rule,
                decompose: decompose_options(&cfg),
            };
            db_if(&g, &c, &inputs.signal, &opts)?
        }
        Method::GftIf => {
            let g = build_graph(&cfg, &inputs)?;
            let basis = eigendecompose(&laplacian(&g))?;
            let opts = GftIfOptions {
                cutoff: match &cfg.cutoffs {
                    Some(c) => CutoffChoice::Manual(c.clone()),
                    None => CutoffChoice::Auto,
                },
                decompose: decompose_options(&cfg),
            };
            let res = gft_if(&basis, &g, &inputs.signal, &opts)?;
            for (k, (kernel, coeffs)) in res.kernels.iter().zip(&res.imf_spectra).enumerate() {
                io::write_imf_spectrum(
                    &ctx.path(&format!("imf_spectrum_{k}.csv")),
                    basis.eigenvalues(),
                    &kernel.values,
                    coeffs,
                )?;
            }
            res.decomposition
        }
    };
    io::write_decomposition(
        &ctx.path("decomposition.csv"),
        &ctx.path("decomposition.json"),
        cfg.method.name(),
        &result,
        extra,
    )?;
    ctx.say(format!(
        "{}: {} IMFs, reconstruction error {:.3e}",
        cfg.method.name(),
        result.imfs.len(),
        result.reconstruction_error(&inputs.signal)
    ));
    Ok(())
}

fn spectrum(ctx: &Context, cfg: RunConfig) -> Result<()> {
    let inputs = load_inputs(&cfg)?;
    let g = build_graph(&cfg, &inputs)?;
    let basis = eigendecompose(&laplacian(&g))?;
    let coeffs = gft(&basis, &inputs.signal)?;
    let cutoff = match cfg.cutoffs.as_ref().and_then(|c| c.first()) {
        Some(&l) => Some(l),
        None => {
            let k = count_extrema(&g, &inputs.signal)?;
            if k >= 2 {
                Some(auto_gft_cutoff(&basis, k)?)
            } else {
                None
            }
        }
    };
    let kernel = cutoff.map(|l| hann_spectral_kernel(&basis, l)).transpose()?;
    io::write_spectrum(
        &ctx.path("spectrum.csv"),
        basis.eigenvalues(),
        &coeffs,
        kernel.as_ref().map(|k| k.values.as_slice()),
    )?;
    ctx.say(match cutoff {
        Some(l) => format!("spectrum of {} modes with kernel cutoff {l}", basis.n()),
        None => format!("spectrum of {} modes (no kernel: fewer than 2 extrema)", basis.n()),
    });
    Ok(())
}

fn bench(ctx: &Context, a: BenchmarkArgs) -> Result<()> {
    let config = BenchmarkConfig {
        sizes: a.sizes,
        methods: a.methods,
        iterations: a.m,
        imfs: a.k,
        seed: ctx.seed(None),
        warmup: !a.no_warmup,
        memory_limit_bytes: a.memory_limit_mb.saturating_mul(1 << 20),
    };
    let report = benchmark(&config)?;
    let path = ctx.path("benchmark.csv");
    let mut text = String::from("n,method,precompute_seconds,run_seconds,imfs_extracted,status,error\n");
    let opt = |v: Option<f64>| v.map(io::fmt_f64).unwrap_or_default();
    for r in &report.rows {
        text.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.n,
            r.method.name(),
            opt(r.precompute_seconds),
            opt(r.run_seconds),
            r.imfs_extracted.map(|k| k.to_string()).unwrap_or_default(),
            if r.failed { "failed" } else { "ok" },
            r.error.as_deref().unwrap_or("").replace(',', ";")
        ));
    }
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    io::write_json(&ctx.path("benchmark.json"), &report)?;
    for r in &report.rows {
        ctx.say(format!(
            "n={:>6} {:<7} precompute {:>10} run {:>10}{}",
            r.n,
            r.method.name(),
            r.precompute_seconds.map_or("-".into(), |s| format!("{s:.3e}")),
            r.run_seconds.map_or("-".into(), |s| format!("{s:.3e}")),
            r.error.as_ref().map_or(String::new(), |e| format!("  FAILED: {e}"))
        ));
    }
    Ok(())
}

fn limits(ctx: &Context, a: LimitCheckArgs) -> Result<()> {
    let config = LimitCheckConfig {
        trials: a.trials,
        n: a.n,
        iterations: a.iterations,
        seed: ctx.seed(None),
        ..Default::default()
    };
    let report = limit_check(&config)?;
    io::write_json(&ctx.path("limit_check.json"), &report)?;
    ctx.say(format!(
        "{} trials, n = {}: max relative error {:.3e} ({}); violation detected: {}; zero operator exact: {}",
        config.trials,
        config.n,
        report.max_relative_error,
        if report.within_tolerance { "within tolerance" } else { "ABOVE tolerance" },
        report.violation_detected,
        report.zero_operator_exact
    ));
    Ok(())
}
