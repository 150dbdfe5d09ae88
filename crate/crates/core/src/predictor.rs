//! Multilayer stencil prediction.
//!
//! An `n`-layer predictor in `d` dimensions estimates a point from the
//! `(n+1)^d - 1` preceding points whose offsets lie in `[0, n]` along every
//! axis. The weight of offset `(k_1, .., k_d)` is
//! `-prod_j (-1)^{k_j} C(n, k_j)`. For `n = 1` this is the Lorenzo
//! predictor; in 2-D the `n`-layer form reproduces every polynomial of total
//! degree `<= 2n - 1`.
//!
//! Near the low edges of the grid the stencil shrinks: axes where the point
//! sits at coordinate 0 are dropped and the layer count is clipped to the
//! smallest remaining coordinate. The very first point predicts 0.

use crate::config::MAX_LAYERS;
use crate::error::{Error, Result};
use crate::grid::MAX_DIMS;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StencilTerm {
    /// Backward offset along each axis, `dims[0]` axis first.
    pub offset: Vec<usize>,
    pub coefficient: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredictorStencil {
    layers: usize,
    ndim: usize,
    terms: Vec<StencilTerm>,
}

impl PredictorStencil {
    pub fn layers(&self) -> usize {
        self.layers
    }

    pub fn ndim(&self) -> usize {
        self.ndim
    }

    /// Terms in lexicographic offset order.
    pub fn terms(&self) -> &[StencilTerm] {
        &self.terms
    }

    pub fn coefficient(&self, offset: &[usize]) -> Option<i64> {
        self.terms.iter().find(|t| t.offset == offset).map(|t| t.coefficient)
    }
}

fn binomial_row(n: usize) -> Vec<i64> {
    let mut row = vec![1i64];
    for _ in 0..n {
        let mut next = vec![1i64; row.len() + 1];
        for i in 1..row.len() {
            next[i] = row[i - 1] + row[i];
        }
        row = next;
    }
    row
}

pub fn build_stencil(layers: usize, ndim: usize) -> Result<PredictorStencil> {
    if !(1..=MAX_LAYERS).contains(&layers) {
        return Err(Error::InvalidLayers(layers));
    }
    if !(1..=MAX_DIMS).contains(&ndim) {
        return Err(Error::UnsupportedDimensionality(ndim));
    }
    let binom = binomial_row(layers);
    let side = layers + 1;
    let total = side.pow(ndim as u32);
    let mut terms = Vec::with_capacity(total - 1);
    // Counting in base (n+1) with the first axis most significant walks the
    // offsets in lexicographic order.
    for index in 1..total {
        let mut offset = vec![0usize; ndim];
        let mut rest = index;
        for slot in offset.iter_mut().rev() {
            *slot = rest % side;
            rest /= side;
        }
        let mut product = 1i64;
        for &k in &offset {
            let sign = if k % 2 == 0 { 1 } else { -1 };
            product *= sign * binom[k];
        }
        terms.push(StencilTerm { offset, coefficient: -product });
    }
    Ok(PredictorStencil { layers, ndim, terms })
}

/// Layer count and active-axis mask the boundary rule assigns to `coord`.
///
/// Returns `None` for the origin.
fn boundary_case(layers: usize, coord: &[usize]) -> Option<(usize, usize)> {
    let mut mask = 0usize;
    let mut n_eff = layers;
    for (axis, &c) in coord.iter().enumerate() {
        if c > 0 {
            mask |= 1 << axis;
            n_eff = n_eff.min(c);
        }
    }
    (mask != 0).then_some((n_eff, mask))
}

/// Predict the value at `coord` from preceding values supplied by `lookup`.
///
/// Applies the boundary rule; `lookup` is only called with coordinates that
/// precede `coord` in scan order. This is the reference evaluation; the
/// codec uses [`Predictor`], which sums the same terms in the same order.
pub fn predict<F>(stencil: &PredictorStencil, lookup: F, coord: &[usize]) -> f64
where
    F: Fn(&[usize]) -> f64,
{
    debug_assert_eq!(coord.len(), stencil.ndim);
    let Some((n_eff, mask)) = boundary_case(stencil.layers, coord) else {
        return 0.0;
    };
    let axes: Vec<usize> = (0..coord.len()).filter(|a| mask & (1 << a) != 0).collect();
    let owned;
    let reduced = if n_eff == stencil.layers && axes.len() == stencil.ndim {
        stencil
    } else {
        owned = build_stencil(n_eff, axes.len()).expect("reduced stencil is in range");
        &owned
    };
    let mut at = coord.to_vec();
    let mut acc = 0.0;
    for term in &reduced.terms {
        for (&axis, &k) in axes.iter().zip(&term.offset) {
            at[axis] = coord[axis] - k;
        }
        acc += term.coefficient as f64 * lookup(&at);
    }
    acc
}

#[derive(Debug, Clone)]
struct FlatStencil {
    deltas: Vec<usize>,
    weights: Vec<f64>,
}

impl FlatStencil {
    #[inline]
    fn apply(&self, buffer: &[f64], index: usize) -> f64 {
        let mut acc = 0.0;
        for (&delta, &w) in self.deltas.iter().zip(&self.weights) {
            acc += w * buffer[index - delta];
        }
        acc
    }
}

/// Stencils for every boundary case of a fixed grid shape, expressed as
/// flat-index displacements into a scan-order buffer.
#[derive(Debug, Clone)]
pub struct Predictor {
    layers: usize,
    dims: Vec<usize>,
    // cases[mask][n_eff - 1]; mask 0 is unused.
    cases: Vec<Vec<FlatStencil>>,
}

impl Predictor {
    pub fn new(layers: usize, dims: &[usize]) -> Result<Self> {
        let ndim = dims.len();
        build_stencil(layers, ndim)?;
        let mut strides = vec![1usize; ndim];
        for axis in 1..ndim {
            strides[axis] = strides[axis - 1] * dims[axis - 1];
        }
        let mut cases = Vec::with_capacity(1 << ndim);
        cases.push(Vec::new());
        for mask in 1usize..(1 << ndim) {
            let axes: Vec<usize> = (0..ndim).filter(|a| mask & (1 << a) != 0).collect();
            let per_layer = (1..=layers)
                .map(|n| {
                    let st = build_stencil(n, axes.len()).expect("in range");
                    let (deltas, weights) = st
                        .terms
                        .iter()
                        .map(|t| {
                            let delta: usize =
                                axes.iter().zip(&t.offset).map(|(&a, &k)| k * strides[a]).sum();
                            (delta, t.coefficient as f64)
                        })
                        .unzip();
                    FlatStencil { deltas, weights }
                })
                .collect();
            cases.push(per_layer);
        }
        Ok(Self { layers, dims: dims.to_vec(), cases })
    }

    pub fn layers(&self) -> usize {
        self.layers
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Predict point `index` (with coordinates `coord`) from `buffer`, whose
    /// entries before `index` hold the values to predict from.
    #[inline]
    pub fn predict_at(&self, buffer: &[f64], index: usize, coord: &[usize]) -> f64 {
        match boundary_case(self.layers, coord) {
            None => 0.0,
            Some((n_eff, mask)) => self.cases[mask][n_eff - 1].apply(buffer, index),
        }
    }

    /// Visit every point in scan order, handing `f` the flat index and the
    /// prediction from the current buffer contents. `f` may write the
    /// buffer at the visited index before the next point is predicted.
    pub fn scan<F>(&self, buffer: &mut [f64], mut f: F)
    where
        F: FnMut(usize, f64, &mut [f64]),
    {
        let ndim = self.dims.len();
        let mut coord = [0usize; MAX_DIMS];
        for index in 0..buffer.len() {
            let pred = self.predict_at(buffer, index, &coord[..ndim]);
            f(index, pred, buffer);
            for (c, &extent) in coord.iter_mut().zip(&self.dims) {
                *c += 1;
                if *c < extent {
                    break;
                }
                *c = 0;
            }
        }
    }
}
