use std::path::Path;
use std::process::{Command, Output};

use graphif::experiments::{example1_b0, example1_b1};
use graphif::io;

fn graphif(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_graphif"))
        .arg("--quiet")
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(out: &Path, args: &[&str]) {
    let o = graphif(out, args);
    assert!(o.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&o.stderr));
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn error_json(o: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&o.stderr);
    serde_json::from_str(text.trim()).unwrap_or_else(|_| panic!("stderr is not JSON: {text}"))
}

#[test]
fn generate_is_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, c) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));
    ok(&a, &["--seed", "7", "generate", "--example", "1", "-n", "64"]);
    ok(&b, &["--seed", "7", "generate", "--example", "1", "-n", "64"]);
    ok(&c, &["--seed", "8", "generate", "--example", "1", "-n", "64"]);
    for f in ["points.csv", "signal.csv", "b0.csv", "b1.csv"] {
        let x = std::fs::read(a.join(f)).unwrap();
        assert_eq!(x, std::fs::read(b.join(f)).unwrap(), "{f}");
        assert_ne!(x, std::fs::read(c.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn generated_components_match_closed_forms() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["generate", "--example", "1", "-n", "32", "--equispaced"]);
    let points = io::read_points(&dir.path().join("points.csv")).unwrap();
    let io::Coordinates::Line(x) = points.coords else { panic!("expected angles") };
    assert_eq!(x[0], 0.0);
    let b0 = io::read_signal_values(&dir.path().join("b0.csv")).unwrap();
    let b1 = io::read_signal_values(&dir.path().join("b1.csv")).unwrap();
    let sig = io::read_signal_values(&dir.path().join("signal.csv")).unwrap();
    for i in 0..x.len() {
        assert!((b0[i] - example1_b0(x[i])).abs() < 1e-15);
        assert!((b1[i] - example1_b1(x[i])).abs() < 1e-15);
        assert!((sig[i] - b0[i] - b1[i]).abs() < 1e-14);
    }
}

#[test]
fn decompositions_reconstruct_the_input() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g");
    ok(&g, &["--seed", "1", "generate", "--example", "1", "-n", "128"]);
    let signal = io::read_signal_values(&g.join("signal.csv")).unwrap();
    for method in ["db_if", "gft_if"] {
        let out = dir.path().join(method);
        ok(&out, &[
            "decompose", "--method", method,
            "--points", s(&g.join("points.csv")),
            "--signal", s(&g.join("signal.csv")),
        ]);
        let (imfs, residual) = io::read_decomposition(&out.join("decomposition.csv")).unwrap();
        assert!(!imfs.is_empty());
        for i in 0..signal.len() {
            let sum: f64 = imfs.iter().map(|m| m[i]).sum::<f64>() + residual[i];
            assert!((sum - signal[i]).abs() <= 1e-10 * (1.0 + signal[i].abs()), "{method}");
        }
        let meta: serde_json::Value = io::read_json(&out.join("decomposition.json")).unwrap();
        assert_eq!(meta["method"], method);
        assert_eq!(meta["imf_count"].as_u64().unwrap() as usize, imfs.len());
    }
}

#[test]
fn fif_rejects_irregular_samples() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g");
    ok(&g, &["generate", "--example", "1", "-n", "64"]);
    let o = graphif(&dir.path().join("f"), &[
        "decompose", "--method", "fif",
        "--points", s(&g.join("points.csv")),
        "--signal", s(&g.join("signal.csv")),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let e = error_json(&o);
    assert_eq!(e["class"], "invalid_input");
    let msg = e["message"].as_str().unwrap();
    assert!(msg.contains("gft_if") && msg.contains("db_if"), "{msg}");
}

#[test]
fn zero_cutoff_is_invalid_input() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g");
    ok(&g, &["generate", "--example", "1", "-n", "64"]);
    let o = graphif(&dir.path().join("o"), &[
        "decompose", "--method", "gft_if", "--cutoff", "0",
        "--points", s(&g.join("points.csv")),
        "--signal", s(&g.join("signal.csv")),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_json(&o)["class"], "invalid_input");
}

#[test]
fn missing_file_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = graphif(dir.path(), &["decompose", "--signal", s(&dir.path().join("nope.csv"))]);
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(error_json(&o)["class"], "io");
}

#[test]
fn spectrum_of_constant_signal_and_parseval() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g");
    ok(&g, &["--seed", "2", "generate", "--example", "1", "-n", "64"]);
    let n = 64;
    let constant = dir.path().join("const.csv");
    io::write_signal(&constant, &vec![3.0; n]).unwrap();
    ok(dir.path(), &["spectrum", "--points", s(&g.join("points.csv")), "--signal", s(&constant)]);
    let cols = io::read_columns(&dir.path().join("spectrum.csv")).unwrap();
    let coeff = &cols.iter().find(|(h, _)| h == "coefficient").unwrap().1;
    assert!((coeff[0].abs() - 3.0 * (n as f64).sqrt()).abs() < 1e-10);
    assert!(coeff[1..].iter().all(|c| c.abs() < 1e-10));
    assert!(cols.iter().all(|(h, _)| h != "kernel"));

    ok(dir.path(), &["spectrum", "--points", s(&g.join("points.csv")), "--signal", s(&g.join("signal.csv"))]);
    let cols = io::read_columns(&dir.path().join("spectrum.csv")).unwrap();
    let coeff = &cols.iter().find(|(h, _)| h == "coefficient").unwrap().1;
    let signal = io::read_signal_values(&g.join("signal.csv")).unwrap();
    let e_signal: f64 = signal.iter().map(|v| v * v).sum();
    let e_coeff: f64 = coeff.iter().map(|v| v * v).sum();
    assert!((e_signal - e_coeff).abs() < 1e-10 * e_signal);
    let kernel = &cols.iter().find(|(h, _)| h == "kernel").unwrap().1;
    assert!(kernel.iter().all(|&k| (0.0..=1.0).contains(&k)));
}

#[test]
fn ingest_maps_ids_and_rejects_mismatches() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("p.csv");
    std::fs::write(&p, "id,t\n10,5.0\n11,1.0\n12,3.0\n13,2.0\n14,4.0\n").unwrap();
    let sig = dir.path().join("s.csv");
    std::fs::write(&sig, "id,value\n14,4\n11,1\n10,5\n12,3\n13,2\n").unwrap();
    let out = dir.path().join("in");
    ok(&out, &["ingest", "--points", s(&p), "--signal", s(&sig)]);
    assert_eq!(io::read_signal_values(&out.join("signal.csv")).unwrap(), vec![1.0, 2.0, 3.0, 4.0, 5.0]);
    let ids = std::fs::read_to_string(out.join("ids.csv")).unwrap();
    assert_eq!(ids, "id,source_id\n0,11\n1,13\n2,12\n3,14\n4,10\n");
    ok(&dir.path().join("run"), &["--config", s(&out.join("config.json")), "decompose"]);

    let missing = dir.path().join("m.csv");
    std::fs::write(&missing, "id,value\n14,4\n11,1\n10,5\n12,3\n").unwrap();
    let o = graphif(&dir.path().join("x"), &["ingest", "--points", s(&p), "--signal", s(&missing)]);
    assert_eq!(o.status.code(), Some(2));
    let e = error_json(&o);
    assert_eq!(e["error"], "ingestion");
    assert!(e["message"].as_str().unwrap().contains("13"));

    let dup = dir.path().join("d.csv");
    std::fs::write(&dup, "id,value\n14,4\n11,1\n10,5\n12,3\n13,2\n12,9\n").unwrap();
    let o = graphif(&dir.path().join("y"), &["ingest", "--points", s(&p), "--signal", s(&dup)]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_json(&o)["error"], "ingestion");
}

#[test]
fn ingest_planar_points_builds_delaunay() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g");
    ok(&g, &["--seed", "4", "generate", "--example", "2", "-n", "100"]);
    let out = dir.path().join("in");
    ok(&out, &["ingest", "--points", s(&g.join("points.csv")), "--signal", s(&g.join("signal.csv"))]);
    let bundle: serde_json::Value = io::read_json(&out.join("bundle.json")).unwrap();
    assert_eq!(bundle["graph"], "delaunay");
    assert_eq!(bundle["connected"], true);
    let edges = io::read_edges(&out.join("edges.csv")).unwrap();
    assert!(edges.len() <= 3 * 100 - 6);
    ok(&dir.path().join("run"), &[
        "decompose", "--points", s(&out.join("points.csv")), "--signal", s(&out.join("signal.csv")),
        "--edges", s(&out.join("edges.csv")), "--shortest-path", "dijkstra",
    ]);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g");
    ok(&g, &["generate", "--example", "1", "-n", "64"]);
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        format!(
            r#"{{"method": "gft_if", "cutoffs": [4.0], "max_imfs": 1, "points": {:?}, "signal": {:?}}}"#,
            g.join("points.csv"),
            g.join("signal.csv")
        ),
    )
    .unwrap();
    let a = dir.path().join("a");
    ok(&a, &["--config", s(&cfg), "decompose"]);
    let meta: serde_json::Value = io::read_json(&a.join("decomposition.json")).unwrap();
    assert_eq!(meta["method"], "gft_if");
    assert_eq!(meta["imf_count"], 1);
    let b = dir.path().join("b");
    ok(&b, &["--config", s(&cfg), "decompose", "--method", "db_if"]);
    let meta: serde_json::Value = io::read_json(&b.join("decomposition.json")).unwrap();
    assert_eq!(meta["method"], "db_if");
    assert_eq!(meta["imf_count"], 1);
}

#[test]
fn limit_check_and_benchmark_write_reports() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["limit-check", "--trials", "5"]);
    let r: serde_json::Value = io::read_json(&dir.path().join("limit_check.json")).unwrap();
    assert_eq!(r["within_tolerance"], true);
    assert_eq!(r["violation_detected"], true);
    ok(dir.path(), &["benchmark", "--sizes", "16,32", "--no-warmup"]);
    let text = std::fs::read_to_string(dir.path().join("benchmark.csv")).unwrap();
    assert_eq!(text.lines().count(), 1 + 2 * 3);
    assert!(text.lines().skip(1).all(|l| l.contains(",ok,")));
}
