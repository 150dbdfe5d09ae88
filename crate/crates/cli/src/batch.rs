//! File-level parallel compression.
//!
//! Workers pull file indices from a shared counter and send finished
//! results to the calling thread, which puts them back in input order.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::thread;
use std::time::Instant;

use ebzip::config::MAX_INTERVAL_EXPONENT;
use ebzip::grid::checked_len;
use ebzip::{compress, decompress_bytes, CompressorConfig, DataGrid, ElementWidth};
use serde::Serialize;

use crate::CliError;

pub const CONTAINER_EXT: &str = "ebz";

/// Everything needed to compress a batch of raw files.
#[derive(Debug, Clone)]
pub struct JobSpec {
    pub inputs: Vec<PathBuf>,
    pub dims: Vec<usize>,
    pub width: ElementWidth,
    pub config: CompressorConfig,
    pub workers: usize,
    pub out_dir: Option<PathBuf>,
    pub auto_m: bool,
}

impl JobSpec {
    /// Checks that run before any file is touched.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.workers == 0 {
            return Err(CliError::Usage("worker count must be at least 1".into()));
        }
        checked_len(&self.dims).map_err(|e| CliError::Usage(e.to_string()))?;
        self.config.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        check_inputs(&self.inputs)?;
        check_out_dir(self.out_dir.as_deref())
    }

    pub fn expected_bytes(&self) -> usize {
        self.dims.iter().product::<usize>() * self.width.bytes()
    }
}

pub(crate) fn check_inputs(inputs: &[PathBuf]) -> Result<(), CliError> {
    if inputs.is_empty() {
        return Err(CliError::Usage("no input files".into()));
    }
    for p in inputs {
        if !p.is_file() {
            return Err(CliError::Usage(format!("{}: not a readable file", p.display())));
        }
    }
    Ok(())
}

pub(crate) fn check_out_dir(dir: Option<&Path>) -> Result<(), CliError> {
    match dir {
        Some(d) if !d.is_dir() => Err(CliError::Usage(format!("{}: not a directory", d.display()))),
        _ => Ok(()),
    }
}

/// Run `task(i)` for `i in 0..count` on up to `workers` threads.
/// Results come back in index order.
pub fn run_pool<T, F>(count: usize, workers: usize, task: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let next = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel();
    let mut slots: Vec<Option<T>> = (0..count).map(|_| None).collect();
    thread::scope(|s| {
        for _ in 0..workers.clamp(1, count.max(1)) {
            let tx = tx.clone();
            let (next, task) = (&next, &task);
            s.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= count {
                    break;
                }
                if tx.send((i, task(i))).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        for (i, result) in rx {
            slots[i] = Some(result);
        }
    });
    slots.into_iter().map(|s| s.expect("every task reports")).collect()
}

fn output_path(input: &Path, out_dir: Option<&Path>, name: String) -> PathBuf {
    match out_dir {
        Some(d) => d.join(name),
        None => input.with_file_name(name),
    }
}

fn file_name(p: &Path) -> String {
    p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default()
}

/// `<name>.ebz` next to the input or in `out_dir`.
pub fn container_path(input: &Path, out_dir: Option<&Path>) -> PathBuf {
    output_path(input, out_dir, format!("{}.{CONTAINER_EXT}", file_name(input)))
}

/// Strips a trailing `.ebz`, or appends `.raw` when there is none.
pub fn restored_path(input: &Path, out_dir: Option<&Path>) -> PathBuf {
    let name = file_name(input);
    let restored = match name.strip_suffix(".ebz") {
        Some(stem) if !stem.is_empty() => stem.to_string(),
        _ => format!("{name}.raw"),
    };
    output_path(input, out_dir, restored)
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn mb_per_s(bytes: usize, seconds: f64) -> f64 {
    if seconds > 0.0 {
        bytes as f64 / seconds / 1e6
    } else {
        f64::INFINITY
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompressSummary {
    pub input: String,
    pub output: String,
    pub points: usize,
    pub width_bits: u32,
    pub input_bytes: usize,
    pub output_bytes: usize,
    pub compression_factor: f64,
    pub bit_rate: f64,
    pub hitting_rate: f64,
    pub layers: usize,
    pub interval_exponent: u32,
    pub error_bound: f64,
    pub seconds: f64,
    pub mb_per_s: f64,
    pub warning: String,
}

pub fn compress_file(job: &JobSpec, input: &Path) -> Result<CompressSummary, CliError> {
    let start = Instant::now();
    let bytes = read(input)?;
    let expected = job.expected_bytes();
    if bytes.len() != expected {
        return Err(CliError::SizeMismatch { path: input.to_path_buf(), expected, actual: bytes.len() });
    }
    let codec_err = |source| CliError::Codec { path: input.to_path_buf(), source };
    let grid = DataGrid::from_le_bytes(job.dims.clone(), job.width, &bytes).map_err(codec_err)?;
    let mut config = job.config;
    let outcome = loop {
        let outcome = compress(&grid, &config).map_err(codec_err)?;
        if job.auto_m && outcome.warning.is_some() && config.interval_exponent < MAX_INTERVAL_EXPONENT {
            config = config.with_interval_exponent((config.interval_exponent + 2).min(MAX_INTERVAL_EXPONENT));
            continue;
        }
        break outcome;
    };
    let container = outcome.stream.to_bytes();
    let output = container_path(input, job.out_dir.as_deref());
    write(&output, &container)?;
    let seconds = start.elapsed().as_secs_f64();
    let points = grid.len();
    Ok(CompressSummary {
        input: input.display().to_string(),
        output: output.display().to_string(),
        points,
        width_bits: job.width.bits(),
        input_bytes: bytes.len(),
        output_bytes: container.len(),
        compression_factor: bytes.len() as f64 / container.len() as f64,
        bit_rate: container.len() as f64 * 8.0 / points as f64,
        hitting_rate: outcome.hitting_rate,
        layers: config.layers,
        interval_exponent: config.interval_exponent,
        error_bound: outcome.stream.header.error_bound,
        seconds,
        mb_per_s: mb_per_s(bytes.len(), seconds),
        warning: outcome.warning.map(|w| w.to_string()).unwrap_or_default(),
    })
}

/// Compress every input; results are in input order.
pub fn compress_batch(job: &JobSpec) -> Result<Vec<Result<CompressSummary, CliError>>, CliError> {
    job.validate()?;
    Ok(run_pool(job.inputs.len(), job.workers, |i| compress_file(job, &job.inputs[i])))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompressSummary {
    pub input: String,
    pub output: String,
    pub points: usize,
    pub width_bits: u32,
    pub input_bytes: usize,
    pub output_bytes: usize,
    pub seconds: f64,
    pub mb_per_s: f64,
}

/// Refuses to replace an existing file unless `overwrite` is set, so that
/// restoring next to the original dump cannot clobber it.
pub fn decompress_file(
    input: &Path,
    out_dir: Option<&Path>,
    overwrite: bool,
) -> Result<DecompressSummary, CliError> {
    let start = Instant::now();
    let output = restored_path(input, out_dir);
    if !overwrite && output.exists() {
        return Err(CliError::Io {
            path: output,
            source: std::io::Error::new(std::io::ErrorKind::AlreadyExists, "output exists (use --force)"),
        });
    }
    let bytes = read(input)?;
    let grid =
        decompress_bytes(&bytes).map_err(|source| CliError::Codec { path: input.to_path_buf(), source })?;
    let raw = grid.to_le_bytes();
    write(&output, &raw)?;
    let seconds = start.elapsed().as_secs_f64();
    Ok(DecompressSummary {
        input: input.display().to_string(),
        output: output.display().to_string(),
        points: grid.len(),
        width_bits: grid.width().bits(),
        input_bytes: bytes.len(),
        output_bytes: raw.len(),
        seconds,
        mb_per_s: mb_per_s(raw.len(), seconds),
    })
}

pub fn decompress_batch(
    inputs: &[PathBuf],
    out_dir: Option<&Path>,
    workers: usize,
    overwrite: bool,
) -> Result<Vec<Result<DecompressSummary, CliError>>, CliError> {
    if workers == 0 {
        return Err(CliError::Usage("worker count must be at least 1".into()));
    }
    check_inputs(inputs)?;
    check_out_dir(out_dir)?;
    Ok(run_pool(inputs.len(), workers, |i| decompress_file(&inputs[i], out_dir, overwrite)))
}
