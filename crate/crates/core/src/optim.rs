//! Derivative-free maximization over small boxes.
//!
//! [`maximize_box`] scans a dense grid, then polishes the incumbent with
//! coordinate-wise golden-section searches confined to one grid cell around
//! it. Refinement only ever accepts strict improvements, so the reported value
//! is never below the best feasible grid point. Ties on the grid go to the
//! lexicographically smallest point.

use alloc::vec::Vec;

use crate::{par, Error, Result};

pub const MAX_DIMS: usize = 4;
pub const DEFAULT_REFINE_ROUNDS: usize = 3;

/// Default grid resolution for a box of the given dimension.
pub const fn default_grid_points(dims: usize) -> usize {
    match dims {
        1 => 513,
        2 => 129,
        3 => 65,
        _ => 33,
    }
}

/// Search space for [`maximize_box`].
#[derive(Debug, Clone, PartialEq)]
pub struct BoxSpec {
    dims: Vec<(f64, f64)>,
    grid_points_per_dim: usize,
    refine_rounds: usize,
}

impl BoxSpec {
    pub fn new(dims: Vec<(f64, f64)>, grid_points_per_dim: usize, refine_rounds: usize) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidBox("no dimensions"));
        }
        if dims.len() > MAX_DIMS {
            return Err(Error::InvalidBox("more than four dimensions"));
        }
        if dims.iter().any(|&(lo, hi)| !(lo <= hi) || !lo.is_finite() || !hi.is_finite()) {
            return Err(Error::InvalidBox("lower bound above upper bound"));
        }
        if grid_points_per_dim < 2 {
            return Err(Error::InvalidBox("fewer than two grid points per dimension"));
        }
        Ok(BoxSpec { dims, grid_points_per_dim, refine_rounds })
    }

    /// Box with the default grid for its dimension and three refinement rounds.
    pub fn with_defaults(dims: Vec<(f64, f64)>) -> Result<Self> {
        let g = default_grid_points(dims.len());
        BoxSpec::new(dims, g, DEFAULT_REFINE_ROUNDS)
    }

    pub fn dims(&self) -> &[(f64, f64)] {
        &self.dims
    }

    pub fn grid_points_per_dim(&self) -> usize {
        self.grid_points_per_dim
    }

    pub fn refine_rounds(&self) -> usize {
        self.refine_rounds
    }

    pub(crate) fn grid_coord(&self, d: usize, i: usize) -> f64 {
        let (lo, hi) = self.dims[d];
        if i + 1 == self.grid_points_per_dim {
            hi
        } else {
            lo + (hi - lo) * i as f64 / (self.grid_points_per_dim - 1) as f64
        }
    }

    fn cell(&self, d: usize) -> f64 {
        let (lo, hi) = self.dims[d];
        (hi - lo) / (self.grid_points_per_dim - 1) as f64
    }
}

/// Outcome of [`maximize_box`].
#[derive(Debug, Clone, PartialEq)]
pub enum Maximum {
    Found {
        point: Vec<f64>,
        value: f64,
    },
    /// No grid point satisfied the feasibility predicate.
    Infeasible,
}

impl Maximum {
    pub fn value(&self) -> Option<f64> {
        match self {
            Maximum::Found { value, .. } => Some(*value),
            Maximum::Infeasible => None,
        }
    }

    pub fn point(&self) -> Option<&[f64]> {
        match self {
            Maximum::Found { point, .. } => Some(point),
            Maximum::Infeasible => None,
        }
    }
}

/// Best feasible value found in one slice of the grid.
type SliceBest = Result<Option<(f64, Vec<f64>)>>;

/// Maximizes `objective` over the feasible points of `spec`.
pub fn maximize_box<F, G>(objective: F, feasible: G, spec: &BoxSpec) -> Result<Maximum>
where
    F: Fn(&[f64]) -> f64 + Sync,
    G: Fn(&[f64]) -> bool + Sync,
{
    let g = spec.grid_points_per_dim;
    let d = spec.dims.len();
    let inner = g.pow(d as u32 - 1);

    // One work item per coordinate of the first dimension. Items are reduced
    // in index order, which is lexicographic order over the grid.
    let slices: Vec<SliceBest> = par::map_indexed(g, |first| {
        let mut best: Option<(f64, Vec<f64>)> = None;
        let mut point = alloc::vec![0.0; d];
        point[0] = spec.grid_coord(0, first);
        for flat in 0..inner {
            let mut rem = flat;
            for k in (1..d).rev() {
                point[k] = spec.grid_coord(k, rem % g);
                rem /= g;
            }
            if !feasible(&point) {
                continue;
            }
            let v = objective(&point);
            if !v.is_finite() {
                return Err(Error::NonFiniteObjective);
            }
            if best.as_ref().map_or(true, |(b, _)| v > *b) {
                best = Some((v, point.clone()));
            }
        }
        Ok(best)
    });

    let mut best: Option<(f64, Vec<f64>)> = None;
    for slice in slices {
        if let Some((v, p)) = slice? {
            if best.as_ref().map_or(true, |(b, _)| v > *b) {
                best = Some((v, p));
            }
        }
    }
    let Some((mut value, mut point)) = best else {
        return Ok(Maximum::Infeasible);
    };

    let eval = |p: &[f64]| -> f64 {
        if feasible(p) {
            let v = objective(p);
            if v.is_finite() {
                v
            } else {
                f64::NEG_INFINITY
            }
        } else {
            f64::NEG_INFINITY
        }
    };
    for _ in 0..spec.refine_rounds {
        for k in 0..d {
            let (lo, hi) = spec.dims[k];
            let h = spec.cell(k);
            let a = (point[k] - h).max(lo);
            let b = (point[k] + h).min(hi);
            let mut trial = point.clone();
            let (t, v) = golden_max(
                |t| {
                    trial[k] = t;
                    eval(&trial)
                },
                a,
                b,
            );
            if v > value {
                value = v;
                point[k] = t;
            }
        }
    }
    Ok(Maximum::Found { point, value })
}

const GOLDEN_ITERS: usize = 90;

/// Golden-section search for a maximum of `f` on `[a, b]`. The endpoints are
/// compared against the interior estimate so boundary maxima are kept.
fn golden_max(mut f: impl FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let inv_phi = 0.5 * (libm::sqrt(5.0) - 1.0);
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..GOLDEN_ITERS {
        if hi - lo <= 1e-15 * (1.0 + lo.abs().max(hi.abs())) {
            break;
        }
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    let mut best = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    for t in [a, b] {
        let v = f(t);
        if v > best.1 {
            best = (t, v);
        }
    }
    best
}

/// Closed interval where `a x^2 + b x + c >= 0` for a downward parabola
/// (`a < 0`), or `None` when the discriminant is negative.
pub fn quad_roots(a: f64, b: f64, c: f64) -> Result<Option<(f64, f64)>> {
    if !(a < 0.0) || !b.is_finite() || !c.is_finite() {
        return Err(Error::NotDownwardParabola { a });
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Ok(None);
    }
    let sq = libm::sqrt(disc);
    // Citardauq form avoids cancellation in the smaller root.
    let q = -0.5 * (b + if b >= 0.0 { sq } else { -sq });
    let (r1, r2) = if q == 0.0 { (0.0, 0.0) } else { (q / a, c / q) };
    Ok(Some((r1.min(r2), r1.max(r2))))
}
