use std::f64::consts::TAU;

use ebzip::analysis::generators::{noisy_sines, Generator, SinesField};
use ebzip::analysis::{best_layer_scan, interval_sweep, rate_distortion_sweep};
use ebzip::container::header_size;
use ebzip::{compress, CompressorConfig, DataGrid, ElementWidth, ErrorBoundSpec};

fn rel(b: f64) -> ErrorBoundSpec {
    ErrorBoundSpec::relative(b).unwrap()
}

#[test]
fn decompressed_rates_equal_codec_hitting_rate() {
    let g = Generator::Spiky.generate(&[48, 40], 2, ElementWidth::F32).unwrap();
    for m in [4, 8] {
        let cfg = CompressorConfig::new(rel(1e-4)).with_interval_exponent(m);
        let report = best_layer_scan(&g, &cfg, &[1, 2, 3, 4]).unwrap();
        for row in &report.rows {
            let out = compress(&g, &cfg.with_layers(row.layers)).unwrap();
            assert_eq!(row.hitting_rate_decompressed, out.hitting_rate);
        }
    }
}

#[test]
fn polynomial_field_prefers_more_layers() {
    let g = Generator::Poly.generate(&[64, 64], 3, ElementWidth::F64).unwrap();
    let cfg = CompressorConfig::new(ErrorBoundSpec::absolute(1e-6).unwrap());
    let report = best_layer_scan(&g, &cfg, &[1, 2, 3, 4]).unwrap();
    let best = report
        .rows
        .iter()
        .max_by(|a, b| a.hitting_rate_original.total_cmp(&b.hitting_rate_original))
        .unwrap();
    assert!(best.layers >= 2, "{report:?}");
    assert!(report.rows[1].hitting_rate_original > report.rows[0].hitting_rate_original);
}

#[test]
fn sweep_monotone_in_bound_and_exponent() {
    let bounds = [1e-3, 1e-4, 1e-5, 1e-6];
    let exps = [4, 6, 8, 10, 12];
    for seed in 0..4 {
        let g = noisy_sines(&[64, 64], seed, 1e-4, ElementWidth::F64).unwrap();
        for layers in 1..=2 {
            let cfg = CompressorConfig::new(rel(1e-3)).with_layers(layers);
            let sweep = interval_sweep(&g, &cfg, &bounds, &exps).unwrap();
            for b in 0..bounds.len() {
                for e in 1..exps.len() {
                    assert!(sweep.rates[b][e] >= sweep.rates[b][e - 1], "seed {seed} b {b} e {e}");
                }
            }
            for e in 0..exps.len() {
                for b in 1..bounds.len() {
                    assert!(sweep.rates[b][e] <= sweep.rates[b - 1][e], "seed {seed} b {b} e {e}");
                }
            }
            assert_eq!(sweep.rows().len(), bounds.len() * exps.len());
        }
    }
}

fn rate_at(noise: f64, rel_bound: f64) -> f64 {
    let g = noisy_sines(&[128, 128], 21, noise, ElementWidth::F64).unwrap();
    let cfg = CompressorConfig::new(rel(1e-3));
    interval_sweep(&g, &cfg, &[rel_bound], &[8]).unwrap().rates[0][0]
}

#[test]
fn drop_off_is_flagged() {
    // largest noise amplitude keeping m = 8 comfortable at 1e-4, by bisection
    let (mut lo, mut hi) = (-8.0f64, 0.0f64);
    assert!(rate_at(10f64.powf(lo), 1e-4) >= 0.95);
    assert!(rate_at(10f64.powf(hi), 1e-4) < 0.95);
    for _ in 0..30 {
        let mid = 0.5 * (lo + hi);
        if rate_at(10f64.powf(mid), 1e-4) >= 0.95 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let noise = 10f64.powf(lo);
    let g = noisy_sines(&[128, 128], 21, noise, ElementWidth::F64).unwrap();
    let cfg = CompressorConfig::new(rel(1e-3));
    let sweep = interval_sweep(&g, &cfg, &[1e-4, 1e-6], &[8]).unwrap();
    assert!(sweep.rates[0][0] >= 0.95);
    assert!(sweep.rates[1][0] < 0.5, "{:?}", sweep.rates);
    assert_eq!(sweep.selected, vec![Some(8), None]);
    assert_eq!(sweep.needs_more_intervals(), vec![1e-6]);
}

#[test]
fn rate_distortion_monotone_on_smooth_data() {
    let g = Generator::Sines.generate(&[128, 128], 1, ElementWidth::F32).unwrap();
    let cfg = CompressorConfig::new(rel(1e-3));
    let bounds: Vec<_> = [1e-2, 1e-3, 1e-4, 1e-5].into_iter().map(rel).collect();
    let pts = rate_distortion_sweep(&g, &cfg, &bounds).unwrap();
    assert_eq!(pts.len(), 4);
    for w in pts.windows(2) {
        assert!(w[1].bit_rate >= w[0].bit_rate);
        assert!(w[1].psnr >= w[0].psnr);
        assert!(w[1].error_bound < w[0].error_bound);
    }
}

#[test]
fn huge_bound_reaches_overhead_floor() {
    let dims = [64usize, 48];
    let n = dims[0] * dims[1];
    let g = Generator::Sines.generate(&dims, 4, ElementWidth::F64).unwrap();
    let cfg = CompressorConfig::new(ErrorBoundSpec::absolute(1e3).unwrap());
    let pts = rate_distortion_sweep(&g, &cfg, &[cfg.bound]).unwrap();
    let floor_bytes = header_size(2) + 256 + n.div_ceil(8);
    assert_eq!(pts[0].hitting_rate, 1.0);
    assert_eq!(pts[0].bit_rate, floor_bytes as f64 * 8.0 / n as f64);
}

#[test]
fn sines_generator_matches_closed_form() {
    let dims = [50usize, 50];
    let g = Generator::Sines.generate(&dims, 1, ElementWidth::F64).unwrap();
    let f = SinesField::from_seed(1, 2);
    let mut expected = Vec::new();
    for y in 0..dims[1] {
        for x in 0..dims[0] {
            let (u, v) = (x as f64 / 50.0, y as f64 / 50.0);
            let a = &f.axes;
            let d = &f.diagonal;
            expected.push(
                a[0].amplitude * (TAU * a[0].frequency * u + a[0].phase).sin()
                    + a[1].amplitude * (TAU * a[1].frequency * v + a[1].phase).sin()
                    + d.amplitude * (TAU * d.frequency * (u + v) + d.phase).sin(),
            );
        }
    }
    let stats = |v: &[f64]| {
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        let sd = (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / v.len() as f64).sqrt();
        (mean, sd)
    };
    let (m1, s1) = stats(g.values());
    let (m2, s2) = stats(&expected);
    assert!((m1 - m2).abs() <= 1e-12 * s2.max(1.0));
    assert!((s1 - s2).abs() <= 1e-12 * s2);
    for (a, b) in g.values().iter().zip(&expected) {
        assert!((a - b).abs() <= 1e-12);
    }
}

#[test]
fn constant_grid_rejects_relative_only_bound() {
    let g = DataGrid::from_f64(vec![10, 10], vec![3.0; 100]).unwrap();
    assert!(compress(&g, &CompressorConfig::new(rel(1e-3))).is_err());
}
