use std::fs::{self, File};
use std::io;
use std::path::Path;

use ebzip::analysis::{best_layer_scan, interval_sweep, rate_distortion_sweep, Generator};
use ebzip::metrics::{compute_metrics, write_csv, MetricsRow};
use ebzip::{decompress_bytes, DataGrid, ErrorBoundSpec};
use serde::Serialize;

use crate::args::{AnalyzeArgs, AnalyzeMode, Cli, Command, CompressArgs, DecompressArgs, GenerateArgs};
use crate::batch::{compress_batch, decompress_batch, CompressSummary, DecompressSummary, JobSpec};
use crate::{CliError, Status};

pub const DEFAULT_REL_BOUNDS: [f64; 4] = [1e-3, 1e-4, 1e-5, 1e-6];

pub fn run(cli: Cli) -> Status {
    let result = match cli.command {
        Command::Compress(a) => cmd_compress(&a),
        Command::Decompress(a) => cmd_decompress(&a),
        Command::Analyze(a) => cmd_analyze(&a).map(|_| Status::Success),
        Command::Generate(a) => cmd_generate(&a).map(|_| Status::Success),
    };
    result.unwrap_or_else(|e| {
        eprintln!("ebzip: {e}");
        e.status()
    })
}

fn csv_to<R: Serialize>(target: Option<&Path>, rows: &[R]) -> Result<(), CliError> {
    fn io_err(path: &Path) -> impl Fn(io::Error) -> CliError + '_ {
        move |source| CliError::Io { path: path.to_path_buf(), source }
    }
    match target {
        Some(p) if p != Path::new("-") => {
            let f = File::create(p).map_err(io_err(p))?;
            write_csv(f, rows).map_err(io_err(p))
        }
        _ => write_csv(io::stdout().lock(), rows).map_err(io_err(Path::new("-"))),
    }
}

fn finish<T: Serialize>(
    results: Vec<Result<T, CliError>>,
    csv: Option<&Path>,
    line: impl Fn(&T) -> String,
) -> Result<Status, CliError> {
    let mut ok = Vec::new();
    let mut failed = 0;
    for r in results {
        match r {
            Ok(s) => {
                if csv != Some(Path::new("-")) {
                    println!("{}", line(&s));
                }
                ok.push(s);
            }
            Err(e) => {
                eprintln!("ebzip: {e}");
                failed += 1;
            }
        }
    }
    if let Some(p) = csv {
        csv_to(Some(p), &ok)?;
    }
    Ok(if failed > 0 { Status::PartialFailure } else { Status::Success })
}

pub fn job_from_args(a: &CompressArgs) -> Result<JobSpec, CliError> {
    Ok(JobSpec {
        inputs: a.inputs.clone(),
        dims: a.dims.0.clone(),
        width: a.width,
        config: a.codec.config()?,
        workers: a.workers.get(),
        out_dir: a.out.clone(),
        auto_m: a.auto_m,
    })
}

pub fn cmd_compress(a: &CompressArgs) -> Result<Status, CliError> {
    let job = job_from_args(a)?;
    let results = compress_batch(&job)?;
    for s in results.iter().flatten() {
        if !s.warning.is_empty() {
            eprintln!("warning: {}: {}", s.input, s.warning);
        }
    }
    finish(results, a.csv.as_deref(), |s: &CompressSummary| {
        format!(
            "{} -> {}: CF {:.3}, {:.4} bits/value, hitting rate {:.4}, m = {}, {:.1} MB/s",
            s.input,
            s.output,
            s.compression_factor,
            s.bit_rate,
            s.hitting_rate,
            s.interval_exponent,
            s.mb_per_s
        )
    })
}

pub fn cmd_decompress(a: &DecompressArgs) -> Result<Status, CliError> {
    let results = decompress_batch(&a.inputs, a.out.as_deref(), a.workers.get(), a.force)?;
    finish(results, a.csv.as_deref(), |s: &DecompressSummary| {
        format!("{} -> {}: {} points, {:.1} MB/s", s.input, s.output, s.points, s.mb_per_s)
    })
}

fn read_grid(path: &Path, dims: &[usize], width: ebzip::ElementWidth) -> Result<DataGrid, CliError> {
    let bytes = fs::read(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    let expected = dims.iter().product::<usize>() * width.bytes();
    if bytes.len() != expected {
        return Err(CliError::SizeMismatch { path: path.to_path_buf(), expected, actual: bytes.len() });
    }
    DataGrid::from_le_bytes(dims.to_vec(), width, &bytes)
        .map_err(|source| CliError::Codec { path: path.to_path_buf(), source })
}

fn parse_generator(name: &str) -> Result<Generator, CliError> {
    name.parse().map_err(|e: ebzip::Error| CliError::Usage(e.to_string()))
}

fn analysis_input(a: &AnalyzeArgs) -> Result<(DataGrid, String), CliError> {
    let dims = a.dims.as_ref().ok_or_else(|| CliError::Usage("--dims is required".into()))?;
    match (&a.input, &a.generator) {
        (Some(p), None) => Ok((read_grid(p, &dims.0, a.width)?, p.display().to_string())),
        (None, Some(name)) => {
            let g = parse_generator(name)?;
            let grid = g.generate(&dims.0, a.seed, a.width).map_err(|e| CliError::Usage(e.to_string()))?;
            Ok((grid, format!("{g}:{}", a.seed)))
        }
        _ => Err(CliError::Usage("give an input file or --generator".into())),
    }
}

#[derive(Debug, Serialize)]
struct LayerCsvRow {
    layers: usize,
    hitting_rate_original: f64,
    hitting_rate_decompressed: f64,
    error_bound: f64,
    interval_exponent: u32,
    recommended: bool,
}

fn bound_list(a: &AnalyzeArgs) -> Result<Vec<ErrorBoundSpec>, CliError> {
    let usage = |e: ebzip::Error| CliError::Usage(e.to_string());
    let mut out = Vec::new();
    for &b in &a.abs_bounds {
        out.push(ErrorBoundSpec::absolute(b).map_err(usage)?);
    }
    for &b in &a.rel_bounds {
        out.push(ErrorBoundSpec::relative(b).map_err(usage)?);
    }
    if out.is_empty() {
        for b in [1e-2].into_iter().chain(DEFAULT_REL_BOUNDS) {
            out.push(ErrorBoundSpec::relative(b).map_err(usage)?);
        }
    }
    Ok(out)
}

/// Sweeps carry their own bounds; the flattened codec bound is optional.
fn sweep_config(a: &AnalyzeArgs, fallback: ErrorBoundSpec) -> Result<ebzip::CompressorConfig, CliError> {
    match a.codec.bound() {
        Ok(b) => a.codec.config_with(b),
        Err(_) => a.codec.config_with(fallback),
    }
}

pub fn cmd_analyze(a: &AnalyzeArgs) -> Result<(), CliError> {
    let csv = a.csv.as_deref();
    match a.mode {
        AnalyzeMode::BestLayer => {
            let (grid, _) = analysis_input(a)?;
            let report = best_layer_scan(&grid, &a.codec.config()?, &a.layer_set)?;
            let rows: Vec<_> = report
                .rows
                .iter()
                .map(|r| LayerCsvRow {
                    layers: r.layers,
                    hitting_rate_original: r.hitting_rate_original,
                    hitting_rate_decompressed: r.hitting_rate_decompressed,
                    error_bound: report.error_bound,
                    interval_exponent: report.interval_exponent,
                    recommended: r.layers == report.recommended,
                })
                .collect();
            csv_to(csv, &rows)
        }
        AnalyzeMode::IntervalSweep => {
            let (grid, _) = analysis_input(a)?;
            let rel =
                if a.rel_bounds.is_empty() { DEFAULT_REL_BOUNDS.to_vec() } else { a.rel_bounds.clone() };
            let cfg = sweep_config(a, ErrorBoundSpec::relative(rel[0])?)?;
            let sweep = interval_sweep(&grid, &cfg, &rel, &a.exponents)?;
            for b in sweep.needs_more_intervals() {
                eprintln!(
                    "warning: no swept interval count reaches hitting rate {} at relative bound {b:e}",
                    sweep.threshold
                );
            }
            csv_to(csv, &sweep.rows())
        }
        AnalyzeMode::RateDistortion => {
            let (grid, _) = analysis_input(a)?;
            let bounds = bound_list(a)?;
            let cfg = sweep_config(a, bounds[0])?;
            csv_to(csv, &rate_distortion_sweep(&grid, &cfg, &bounds)?)
        }
        AnalyzeMode::Metrics => csv_to(csv, &[metrics_row(a)?]),
    }
}

fn metrics_row(a: &AnalyzeArgs) -> Result<MetricsRow, CliError> {
    let (original, label) = analysis_input(a)?;
    let container = match &a.container {
        Some(p) => Some(fs::read(p).map_err(|source| CliError::Io { path: p.clone(), source })?),
        None => None,
    };
    let reconstructed = match (&a.reconstructed, &container) {
        (Some(p), _) => read_grid(p, original.dims(), original.width())?,
        (None, Some(bytes)) => decompress_bytes(bytes)
            .map_err(|source| CliError::Codec { path: a.container.clone().unwrap_or_default(), source })?,
        (None, None) => return Err(CliError::Usage("metrics needs --reconstructed or --container".into())),
    };
    if reconstructed.dims() != original.dims() {
        return Err(CliError::Usage(format!(
            "reconstruction dims {:?} differ from {:?}",
            reconstructed.dims(),
            original.dims()
        )));
    }
    // without a container the size-based columns are undefined
    let size = container.as_ref().map_or(0, Vec::len);
    let report = if size > 0 {
        compute_metrics(&original, &reconstructed, size)?
    } else {
        let mut r = compute_metrics(&original, &reconstructed, 1)?;
        r.compression_factor = f64::NAN;
        r.bit_rate = f64::NAN;
        r
    };
    Ok(report.to_row(label))
}

pub fn cmd_generate(a: &GenerateArgs) -> Result<(), CliError> {
    let g = parse_generator(&a.generator)?;
    let grid = g.generate(&a.dims.0, a.seed, a.width).map_err(|e| CliError::Usage(e.to_string()))?;
    fs::write(&a.out, grid.to_le_bytes()).map_err(|source| CliError::Io { path: a.out.clone(), source })?;
    Ok(())
}
