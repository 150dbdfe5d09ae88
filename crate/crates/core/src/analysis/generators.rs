//! Deterministic synthetic fields.
//!
//! Every generator is a pure function of `(dims, seed)`; random parameters
//! come from a ChaCha8 stream so output is identical across platforms.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::grid::{checked_len, DataGrid, ElementWidth};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Generator {
    Constant,
    /// Cubic polynomial in normalised coordinates.
    Poly,
    /// Sum of per-axis sinusoids plus one diagonal wave.
    Sines,
    /// i.i.d. standard normal values.
    Noise,
    /// Sinusoids with a step discontinuity and sparse spikes.
    Spiky,
}

impl Generator {
    pub const ALL: [Generator; 5] =
        [Generator::Constant, Generator::Poly, Generator::Sines, Generator::Noise, Generator::Spiky];

    pub fn name(self) -> &'static str {
        match self {
            Generator::Constant => "constant",
            Generator::Poly => "poly",
            Generator::Sines => "sines",
            Generator::Noise => "noise",
            Generator::Spiky => "spiky",
        }
    }

    pub fn generate(self, dims: &[usize], seed: u64, width: ElementWidth) -> Result<DataGrid> {
        let len = checked_len(dims)?;
        let values = match self {
            Generator::Constant => {
                let v = ChaCha8Rng::seed_from_u64(seed).gen_range(-10.0..10.0);
                vec![v; len]
            }
            Generator::Poly => {
                let p = PolyField::from_seed(seed, dims.len());
                fill(dims, |c| p.eval(c, dims))
            }
            Generator::Sines => {
                let s = SinesField::from_seed(seed, dims.len());
                fill(dims, |c| s.eval(c, dims))
            }
            Generator::Noise => gaussian(len, seed, 1.0),
            Generator::Spiky => spiky(dims, seed),
        };
        DataGrid::new(dims.to_vec(), values, width)
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Generator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Generator::ALL
            .into_iter()
            .find(|g| g.name() == s)
            .ok_or_else(|| Error::UnknownGenerator(s.to_string()))
    }
}

/// Evaluate `f` at every coordinate in scan order.
pub fn fill<F: FnMut(&[usize]) -> f64>(dims: &[usize], mut f: F) -> Vec<f64> {
    let len: usize = dims.iter().product();
    let mut coord = vec![0usize; dims.len()];
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(f(&coord));
        for (axis, c) in coord.iter_mut().enumerate() {
            *c += 1;
            if *c < dims[axis] {
                break;
            }
            *c = 0;
        }
    }
    out
}

/// Seeded i.i.d. normal samples with standard deviation `sigma`.
pub fn gaussian(len: usize, seed: u64, sigma: f64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len)
        .map(|_| sigma * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng))
        .collect()
}

/// A `sines` field with seeded Gaussian noise of standard deviation
/// `noise` added on top.
pub fn noisy_sines(dims: &[usize], seed: u64, noise: f64, width: ElementWidth) -> Result<DataGrid> {
    let clean = Generator::Sines.generate(dims, seed, ElementWidth::F64)?;
    let values =
        clean.values().iter().zip(gaussian(clean.len(), seed ^ 0x5eed, noise)).map(|(v, e)| v + e).collect();
    DataGrid::new(dims.to_vec(), values, width)
}

fn normalised<'a>(coord: &'a [usize], dims: &'a [usize]) -> impl Iterator<Item = f64> + 'a {
    coord.iter().zip(dims).map(|(&c, &d)| c as f64 / d as f64)
}

/// Wave parameters: amplitude, frequency (cycles across the axis), phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wave {
    pub amplitude: f64,
    pub frequency: f64,
    pub phase: f64,
}

/// `sum_j a_j sin(2π f_j u_j + φ_j) + b sin(2π g Σ_j u_j + ψ)` with
/// `u_j = c_j / dims_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct SinesField {
    pub axes: Vec<Wave>,
    pub diagonal: Wave,
}

impl SinesField {
    pub fn from_seed(seed: u64, ndim: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let wave = |rng: &mut ChaCha8Rng| Wave {
            amplitude: rng.gen_range(0.5..1.5),
            frequency: rng.gen_range(1.0..4.0),
            phase: rng.gen_range(0.0..TAU),
        };
        let axes = (0..ndim).map(|_| wave(&mut rng)).collect();
        let diagonal = wave(&mut rng);
        Self { axes, diagonal }
    }

    pub fn eval(&self, coord: &[usize], dims: &[usize]) -> f64 {
        let mut sum = 0.0;
        let mut diag = 0.0;
        for (w, u) in self.axes.iter().zip(normalised(coord, dims)) {
            sum += w.amplitude * (TAU * w.frequency * u + w.phase).sin();
            diag += u;
        }
        let d = &self.diagonal;
        sum + d.amplitude * (TAU * d.frequency * diag + d.phase).sin()
    }
}

/// Cubic polynomial `sum c_e u^e` over all exponent vectors of total
/// degree <= 3, with `u_j = c_j / dims_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyField {
    pub terms: Vec<(Vec<u32>, f64)>,
}

impl PolyField {
    pub const DEGREE: u32 = 3;

    pub fn from_seed(seed: u64, ndim: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let side = Self::DEGREE as usize + 1;
        let mut terms = Vec::new();
        for index in 0..side.pow(ndim as u32) {
            let mut exps = vec![0u32; ndim];
            let mut rest = index;
            for e in exps.iter_mut() {
                *e = (rest % side) as u32;
                rest /= side;
            }
            if exps.iter().sum::<u32>() <= Self::DEGREE {
                terms.push((exps, rng.gen_range(-1.0..1.0)));
            }
        }
        Self { terms }
    }

    pub fn eval(&self, coord: &[usize], dims: &[usize]) -> f64 {
        let u: Vec<f64> = normalised(coord, dims).collect();
        self.terms
            .iter()
            .map(|(exps, c)| c * exps.iter().zip(&u).map(|(&e, &x)| x.powi(e as i32)).product::<f64>())
            .sum()
    }
}

fn spiky(dims: &[usize], seed: u64) -> Vec<f64> {
    let smooth = SinesField::from_seed(seed, dims.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    let step_axis = rng.gen_range(0..dims.len());
    let step_at = rng.gen_range(0..dims[step_axis]);
    let step = rng.gen_range(2.0..4.0);
    let mut values = fill(dims, |c| smooth.eval(c, dims) + if c[step_axis] >= step_at { step } else { 0.0 });
    for v in values.iter_mut() {
        if rng.gen_bool(0.01) {
            *v += rng.gen_range(-6.0..6.0);
        }
    }
    values
}
