use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ebzip::analysis::best_layer_scan;
use ebzip::analysis::generators::SinesField;
use ebzip::{CompressorConfig, DataGrid, ElementWidth, ErrorBoundSpec};
use tempfile::TempDir;

fn ebzip(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ebzip"))
        .args(args)
        .env_remove("EBZIP_WORKERS")
        .output()
        .expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn generate(dir: &Path, name: &str, generator: &str, dims: &str, seed: u64, width: &str) -> PathBuf {
    let path = dir.join(name);
    let seed = seed.to_string();
    let o =
        ebzip(&["generate", generator, "--dims", dims, "--seed", &seed, "--width", width, "--out", s(&path)]);
    assert!(o.status.success(), "{o:?}");
    path
}

/// Parse CSV output into a header and rows of fields.
fn csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines().map(|l| l.split(',').map(str::to_string).collect::<Vec<_>>());
    let header = lines.next().unwrap_or_default();
    (header, lines.collect())
}

fn column(header: &[String], row: &[String], name: &str) -> f64 {
    let i = header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
    row[i].parse().unwrap()
}

#[test]
fn compress_then_decompress_single_file() {
    let dir = TempDir::new().unwrap();
    let input = generate(dir.path(), "field.f32", "sines", "100x100", 1, "32");
    let o = ebzip(&["compress", s(&input), "--dims", "100x100", "--rel-bound", "1e-4", "--csv", "-"]);
    assert!(o.status.success(), "{o:?}");
    let (header, rows) = csv(&stdout(&o));
    assert_eq!(rows.len(), 1);
    let cf = column(&header, &rows[0], "compression_factor");
    let br = column(&header, &rows[0], "bit_rate");
    assert!((br * cf - 32.0).abs() <= 32.0 * 1e-9);
    assert!(column(&header, &rows[0], "hitting_rate") > 0.9);

    let container = dir.path().join("field.f32.ebz");
    assert!(container.is_file());
    let out = dir.path().join("restored");
    fs::create_dir(&out).unwrap();
    let o = ebzip(&["decompress", s(&container), "--out", s(&out)]);
    assert!(o.status.success(), "{o:?}");
    let restored = fs::read(out.join("field.f32")).unwrap();
    assert_eq!(restored.len(), 40_000);

    let original =
        DataGrid::from_le_bytes(vec![100, 100], ElementWidth::F32, &fs::read(&input).unwrap()).unwrap();
    let back = DataGrid::from_le_bytes(vec![100, 100], ElementWidth::F32, &restored).unwrap();
    let eb = 1e-4 * original.range().unwrap();
    for (a, b) in original.values().iter().zip(back.values()) {
        assert!((a - b).abs() <= eb);
    }
}

#[test]
fn decompress_does_not_clobber_without_force() {
    let dir = TempDir::new().unwrap();
    let input = generate(dir.path(), "g.f32", "sines", "20x20", 3, "32");
    let before = fs::read(&input).unwrap();
    assert!(ebzip(&["compress", s(&input), "--dims", "20x20", "--abs-bound", "0.1"]).status.success());
    let container = dir.path().join("g.f32.ebz");
    let o = ebzip(&["decompress", s(&container)]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(fs::read(&input).unwrap(), before);
    let o = ebzip(&["decompress", s(&container), "--force"]);
    assert!(o.status.success());
    assert_eq!(fs::read(&input).unwrap().len(), 1600);
}

#[test]
fn batch_output_is_independent_of_worker_count() {
    let dir = TempDir::new().unwrap();
    let gens = ["sines", "noise", "spiky", "poly"];
    let inputs: Vec<PathBuf> = (0..8)
        .map(|i| generate(dir.path(), &format!("f{i}.f32"), gens[i % 4], "64x48", i as u64, "32"))
        .collect();
    let mut outputs = Vec::new();
    for workers in ["1", "4"] {
        let out = dir.path().join(format!("w{workers}"));
        fs::create_dir(&out).unwrap();
        let mut args = vec![
            "compress",
            "--dims",
            "64x48",
            "--rel-bound",
            "1e-3",
            "--workers",
            workers,
            "--out",
            s(&out),
        ];
        args.extend(inputs.iter().map(|p| s(p)));
        let o = ebzip(&args);
        assert!(o.status.success(), "{o:?}");
        outputs.push(out);
    }
    for i in 0..8 {
        let name = format!("f{i}.f32.ebz");
        let a = fs::read(outputs[0].join(&name)).unwrap();
        let b = fs::read(outputs[1].join(&name)).unwrap();
        assert_eq!(a, b, "{name}");
    }
}

#[test]
fn workers_default_from_environment() {
    let dir = TempDir::new().unwrap();
    let input = generate(dir.path(), "e.f32", "noise", "50", 1, "32");
    let o = Command::new(env!("CARGO_BIN_EXE_ebzip"))
        .args(["compress", s(&input), "--dims", "50", "--abs-bound", "0.01"])
        .env("EBZIP_WORKERS", "3")
        .output()
        .unwrap();
    assert!(o.status.success());
    let o = Command::new(env!("CARGO_BIN_EXE_ebzip"))
        .args(["compress", s(&input), "--dims", "50", "--abs-bound", "0.01"])
        .env("EBZIP_WORKERS", "0")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn partial_failure_exit_code() {
    let dir = TempDir::new().unwrap();
    let good = generate(dir.path(), "good.f32", "sines", "10x10", 1, "32");
    let bad = generate(dir.path(), "bad.f32", "sines", "10x11", 1, "32");
    let o = ebzip(&["compress", s(&good), s(&bad), "--dims", "10x10", "--rel-bound", "1e-3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("expected 400 bytes"));
    assert!(dir.path().join("good.f32.ebz").is_file());
    assert!(!dir.path().join("bad.f32.ebz").exists());
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("nope.f32");
    for args in [
        vec!["compress", s(&missing), "--dims", "4x4", "--rel-bound", "1e-3"],
        vec!["compress", "--dims", "4x4"],
        vec!["generate", "waves", "--dims", "4", "--out", "x"],
        vec!["compress", s(&missing), "--dims", "4x0", "--rel-bound", "1e-3"],
        vec!["bogus"],
    ] {
        assert_eq!(ebzip(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn auto_m_raises_interval_count() {
    let dir = TempDir::new().unwrap();
    let input = generate(dir.path(), "n.f64", "noise", "64x64", 2, "64");
    let run = |extra: &[&str]| {
        let mut args = vec![
            "compress",
            s(&input),
            "--dims",
            "64x64",
            "--width",
            "64",
            "--rel-bound",
            "1e-5",
            "--intervals-exp",
            "4",
            "--csv",
            "-",
        ];
        args.extend_from_slice(extra);
        let o = ebzip(&args);
        assert!(o.status.success(), "{o:?}");
        let (h, rows) = csv(&stdout(&o));
        (
            column(&h, &rows[0], "interval_exponent"),
            column(&h, &rows[0], "hitting_rate"),
            String::from_utf8_lossy(&o.stderr).into_owned(),
        )
    };
    let (m, rate, err) = run(&[]);
    assert_eq!(m, 4.0);
    assert!(rate < 0.9);
    assert!(err.contains("warning"));
    let (m2, rate2, _) = run(&["--auto-m"]);
    assert!(m2 > 4.0);
    assert!(rate2 > rate);
    assert!(rate2 >= 0.9 || m2 == 16.0);
}

#[test]
fn analyze_metrics_emits_one_full_row() {
    let dir = TempDir::new().unwrap();
    let input = generate(dir.path(), "m.f32", "sines", "40x40", 5, "32");
    let out = dir.path().join("o");
    fs::create_dir(&out).unwrap();
    assert!(ebzip(&["compress", s(&input), "--dims", "40x40", "--rel-bound", "1e-3", "--out", s(&out)])
        .status
        .success());
    let container = out.join("m.f32.ebz");
    assert!(ebzip(&["decompress", s(&container), "--out", s(&out)]).status.success());
    let rec = out.join("m.f32");
    let o = ebzip(&[
        "analyze",
        "metrics",
        s(&input),
        "--dims",
        "40x40",
        "--reconstructed",
        s(&rec),
        "--container",
        s(&container),
    ]);
    assert!(o.status.success(), "{o:?}");
    let (h, rows) = csv(&stdout(&o));
    assert_eq!(
        h,
        [
            "label",
            "points",
            "value_range",
            "max_abs_error",
            "max_rel_error",
            "rmse",
            "nrmse",
            "psnr",
            "pearson",
            "compression_factor",
            "bit_rate",
            "autocorr_lag1"
        ]
    );
    assert_eq!(rows.len(), 1);
    assert_eq!(column(&h, &rows[0], "points"), 1600.0);
    assert!(column(&h, &rows[0], "max_rel_error") <= 1e-3);
    let cf = column(&h, &rows[0], "compression_factor");
    assert_eq!(cf, 6400.0 / fs::metadata(&container).unwrap().len() as f64);
}

#[test]
fn analyze_rate_distortion_sorted_rows() {
    let o = ebzip(&[
        "analyze",
        "rate-distortion",
        "--generator",
        "sines",
        "--dims",
        "64x64",
        "--seed",
        "2",
        "--rel-bounds",
        "1e-5,1e-2,1e-4,1e-3",
    ]);
    assert!(o.status.success(), "{o:?}");
    let (h, rows) = csv(&stdout(&o));
    assert_eq!(rows.len(), 4);
    let rates: Vec<f64> = rows.iter().map(|r| column(&h, r, "bit_rate")).collect();
    assert!(rates.windows(2).all(|w| w[0] <= w[1]), "{rates:?}");
}

#[test]
fn analyze_best_layer_matches_library() {
    let o = ebzip(&[
        "analyze",
        "best-layer",
        "--generator",
        "poly",
        "--dims",
        "64x64",
        "--seed",
        "3",
        "--width",
        "64",
        "--abs-bound",
        "1e-6",
    ]);
    assert!(o.status.success(), "{o:?}");
    let (h, rows) = csv(&stdout(&o));
    assert_eq!(rows.len(), 4);
    let grid = ebzip::analysis::Generator::Poly.generate(&[64, 64], 3, ElementWidth::F64).unwrap();
    let cfg = CompressorConfig::new(ErrorBoundSpec::absolute(1e-6).unwrap());
    let report = best_layer_scan(&grid, &cfg, &[1, 2, 3, 4]).unwrap();
    for (row, lib) in rows.iter().zip(&report.rows) {
        assert_eq!(column(&h, row, "layers"), lib.layers as f64);
        assert_eq!(column(&h, row, "hitting_rate_original"), lib.hitting_rate_original);
        assert_eq!(column(&h, row, "hitting_rate_decompressed"), lib.hitting_rate_decompressed);
    }
}

#[test]
fn analyze_interval_sweep_to_file() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("sweep.csv");
    let o = ebzip(&[
        "analyze",
        "interval-sweep",
        "--generator",
        "sines",
        "--dims",
        "32x32",
        "--rel-bounds",
        "1e-3,1e-4",
        "--exponents",
        "4,8,12",
        "--csv",
        s(&path),
    ]);
    assert!(o.status.success(), "{o:?}");
    let (h, rows) = csv(&fs::read_to_string(&path).unwrap());
    assert_eq!(h, ["rel_bound", "interval_exponent", "intervals", "hitting_rate", "selected"]);
    assert_eq!(rows.len(), 6);
}

#[test]
fn generate_constant_and_noise() {
    let dir = TempDir::new().unwrap();
    let c = fs::read(generate(dir.path(), "c", "constant", "10x10", 9, "32")).unwrap();
    assert_eq!(c.len(), 400);
    assert!(c.chunks(4).all(|w| w == &c[..4]));
    let a = fs::read(generate(dir.path(), "n1", "noise", "100", 7, "32")).unwrap();
    let b = fs::read(generate(dir.path(), "n2", "noise", "100", 7, "32")).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.len(), 400);
}

#[test]
fn generated_sines_match_closed_form_statistics() {
    let dir = TempDir::new().unwrap();
    let bytes = fs::read(generate(dir.path(), "s", "sines", "50x50", 1, "64")).unwrap();
    let values: Vec<f64> = bytes.chunks(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    let f = SinesField::from_seed(1, 2);
    let tau = std::f64::consts::TAU;
    let mut expected = Vec::new();
    for y in 0..50 {
        for x in 0..50 {
            let (u, v) = (x as f64 / 50.0, y as f64 / 50.0);
            let w = |i: usize, t: f64| {
                f.axes[i].amplitude * (tau * f.axes[i].frequency * t + f.axes[i].phase).sin()
            };
            let d = &f.diagonal;
            expected.push(w(0, u) + w(1, v) + d.amplitude * (tau * d.frequency * (u + v) + d.phase).sin());
        }
    }
    let stats = |v: &[f64]| {
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        (mean, (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / v.len() as f64).sqrt())
    };
    let (m1, s1) = stats(&values);
    let (m2, s2) = stats(&expected);
    assert!((m1 - m2).abs() <= 1e-12);
    assert!((s1 - s2).abs() <= 1e-12);
}
