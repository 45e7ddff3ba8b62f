//! Bounds for the BEC/BSC model with one channel use per source symbol.
//!
//! All four bounds are maximizations of closed-form objectives in binary
//! entropies over crossover parameters in `[0, 1/2]`, done with
//! [`maximize_box`] at its default resolution.

use alloc::vec;
use alloc::vec::Vec;

pub use crate::bound::{Argmax, BecBscAux, BoundResult, JointBranch};
use crate::info::{h2f, starf, Prob};
use crate::models::BecBscModel;
use crate::optim::{maximize_box, BoxSpec, Maximum};
use crate::{par, Error, Result};

const HALF_BOX: (f64, f64) = (0.0, 0.5);

fn always(_: &[f64]) -> bool {
    true
}

fn params(model: &BecBscModel) -> (f64, f64, f64) {
    (model.zeta().get(), model.beta().get(), model.epsilon().get())
}

/// Outer-bound objective `(1-β) h2(v) + h2(ε) - h2(v⋆ε) + h2(ζ)`.
pub fn outer_objective(model: &BecBscModel, v: f64) -> f64 {
    let (z, b, e) = params(model);
    (1.0 - b) * h2f(v) + h2f(e) - h2f(starf(v, e)) + h2f(z)
}

/// Two-layer separate-scheme rate at `(u, v, q)` and the margin of its
/// constraint `1 - h2(q) - β [1 - h2(v⋆u)]`.
pub fn inner_separate_objective(model: &BecBscModel, aux: BecBscAux) -> (f64, f64) {
    let (z, _, e) = params(model);
    let BecBscAux { u: _, v, q } = aux;
    let terms = Terms { h_v: h2f(v), h_ve: h2f(starf(v, e)), h_q: h2f(q), h_zq: h2f(starf(z, q)), h_z: h2f(z) };
    let h_vu = h2f(starf(v, aux.u));
    (separate_rate(model, aux, h_vu, &terms), separate_slack(model, h_vu, terms.h_q))
}

/// Terms of the separate objective that depend on at most one coordinate.
struct Terms {
    h_v: f64,
    h_ve: f64,
    h_q: f64,
    h_zq: f64,
    h_z: f64,
}

fn separate_rate(model: &BecBscModel, aux: BecBscAux, h_vu: f64, t: &Terms) -> f64 {
    let (_, b, e) = params(model);
    let vu = starf(aux.v, aux.u);
    (1.0 - b) * (h_vu - t.h_v) + t.h_ve - h2f(starf(vu, e)) + t.h_z + t.h_q - t.h_zq
}

fn separate_slack(model: &BecBscModel, h_vu: f64, h_q: f64) -> f64 {
    1.0 - h_q - model.beta().get() * (1.0 - h_vu)
}

/// Single-coordinate terms of the separate objective, tabulated on the grid
/// of a box whose dimensions all span [`HALF_BOX`]. Off-grid points (during
/// refinement) are computed directly.
struct SeparateTables {
    coords: Vec<f64>,
    h: Vec<f64>,
    h_ve: Vec<f64>,
    h_zq: Vec<f64>,
    h_z: f64,
}

impl SeparateTables {
    fn new(model: &BecBscModel, spec: &BoxSpec) -> Self {
        let (z, _, e) = params(model);
        let coords: Vec<f64> = (0..spec.grid_points_per_dim()).map(|i| spec.grid_coord(0, i)).collect();
        SeparateTables {
            h: coords.iter().map(|&x| h2f(x)).collect(),
            h_ve: coords.iter().map(|&x| h2f(starf(x, e))).collect(),
            h_zq: coords.iter().map(|&x| h2f(starf(z, x))).collect(),
            h_z: h2f(z),
            coords,
        }
    }

    fn index(&self, x: f64) -> Option<usize> {
        let i = libm::round(x / HALF_BOX.1 * (self.coords.len() - 1) as f64);
        if i < 0.0 {
            return None;
        }
        let i = i as usize;
        (self.coords.get(i) == Some(&x)).then_some(i)
    }

    fn h_q(&self, q: f64) -> f64 {
        self.index(q).map_or_else(|| h2f(q), |i| self.h[i])
    }

    fn rate(&self, model: &BecBscModel, aux: BecBscAux) -> f64 {
        let (z, _, e) = params(model);
        let (h_v, h_ve) = match self.index(aux.v) {
            Some(i) => (self.h[i], self.h_ve[i]),
            None => (h2f(aux.v), h2f(starf(aux.v, e))),
        };
        let h_zq = self.index(aux.q).map_or_else(|| h2f(starf(z, aux.q)), |i| self.h_zq[i]);
        let terms = Terms { h_v, h_ve, h_q: self.h_q(aux.q), h_zq, h_z: self.h_z };
        separate_rate(model, aux, h2f(starf(aux.v, aux.u)), &terms)
    }

    fn slack(&self, model: &BecBscModel, aux: BecBscAux) -> f64 {
        separate_slack(model, h2f(starf(aux.v, aux.u)), self.h_q(aux.q))
    }
}

/// Margin of the fine-layer constraint `I(T;Y) - I(V;A|B) = 1 - β [1 - h2(v)]`
/// for the two-layer input family. It is never negative.
pub fn inner_separate_fine_slack(model: &BecBscModel, v: f64) -> f64 {
    1.0 - model.beta().get() * (1.0 - h2f(v))
}

/// One-layer separate-scheme objective `h2(v⋆ε) - (1-β) h2(v) - β + h2(ζ)`.
pub fn inner_separate_1layer_objective(model: &BecBscModel, v: f64) -> f64 {
    let (z, b, e) = params(model);
    h2f(starf(v, e)) - (1.0 - b) * h2f(v) - b + h2f(z)
}

/// Coupled branch of the joint bound,
/// `(1-β) h2(v) + h2(ε⋆ζ) - h2(v⋆ε⋆ζ)`.
pub fn inner_joint_coupled_objective(model: &BecBscModel, v: f64) -> f64 {
    let (z, b, e) = params(model);
    let c = starf(e, z);
    (1.0 - b) * h2f(v) + h2f(c) - h2f(starf(v, c))
}

fn maximize_1d(f: impl Fn(f64) -> f64 + Sync) -> (f64, f64) {
    let spec = BoxSpec::with_defaults(vec![HALF_BOX]).expect("static box");
    match maximize_box(|p| f(p[0]), always, &spec).expect("objective is finite on [0, 1/2]") {
        Maximum::Found { point, value } => (point[0], value),
        Maximum::Infeasible => unreachable!("unconstrained search"),
    }
}

/// Outer bound: maximum over `v` of [`outer_objective`]. Its constraint
/// reduces to `β <= 1`, so it is always feasible; the reported slack is
/// `1 - β`.
pub fn outer_bound(model: &BecBscModel) -> BoundResult {
    let (v, value) = maximize_1d(|v| outer_objective(model, v));
    BoundResult::searched(value, Argmax::V(v), 1.0 - model.beta().get())
}

/// Two-layer separate inner bound over `(u, v, q) ∈ [0, 1/2]^3`.
pub fn inner_separate(model: &BecBscModel) -> BoundResult {
    let spec = BoxSpec::with_defaults(vec![HALF_BOX; 3]).expect("static box");
    let tables = SeparateTables::new(model, &spec);
    let aux = |p: &[f64]| BecBscAux { u: p[0], v: p[1], q: p[2] };
    let found = maximize_box(|p| tables.rate(model, aux(p)), |p| tables.slack(model, aux(p)) >= 0.0, &spec)
        .expect("objective is finite on the box");
    match found {
        Maximum::Found { point, value } => {
            let best = aux(&point);
            let (_, slack) = inner_separate_objective(model, best);
            let mut result = BoundResult::searched(value, Argmax::BecBsc(best), slack);
            result.secondary_slack = Some(inner_separate_fine_slack(model, best.v));
            result
        }
        // u = v = q = 1/2 always satisfies the constraint.
        Maximum::Infeasible => unreachable!("the box always has feasible points"),
    }
}

/// One-layer separate inner bound, the `u = q = 1/2` slice of
/// [`inner_separate`].
pub fn inner_separate_1layer(model: &BecBscModel) -> BoundResult {
    let (v, value) = maximize_1d(|v| inner_separate_1layer_objective(model, v));
    BoundResult::searched(value, Argmax::V(v), 0.0)
}

/// Joint-scheme inner bound: the larger of the coupled branch maximized over
/// `v` and the channel-only rate `h2(ζ)`. Ties go to the coupled branch.
pub fn inner_joint(model: &BecBscModel) -> BoundResult {
    let (v, coupled) = maximize_1d(|v| inner_joint_coupled_objective(model, v));
    let channel_only = h2f(model.zeta().get());
    if channel_only > coupled {
        BoundResult::searched(channel_only, Argmax::Joint { branch: JointBranch::ChannelOnly, v: 0.5 }, 0.0)
    } else {
        BoundResult::searched(coupled, Argmax::Joint { branch: JointBranch::Coupled, v }, 0.0)
    }
}

/// One row of the sweep table: all four bounds at one erasure probability.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SweepRow {
    pub beta: f64,
    pub outer: f64,
    pub i_sep: f64,
    pub i_sep_1l: f64,
    pub i_jscc: f64,
}

impl SweepRow {
    pub fn at(zeta: Prob, epsilon: Prob, beta: Prob) -> Result<SweepRow> {
        let model = BecBscModel::new(zeta.get(), beta.get(), epsilon.get())?;
        Ok(SweepRow {
            beta: beta.get(),
            outer: outer_bound(&model).rk,
            i_sep: inner_separate(&model).rk,
            i_sep_1l: inner_separate_1layer(&model).rk,
            i_jscc: inner_joint(&model).rk,
        })
    }
}

/// Bounds over a grid of β values, one row per grid point in input order.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SweepTable {
    pub zeta: f64,
    pub epsilon: f64,
    pub rows: Vec<SweepRow>,
}

/// Evaluates every bound on each β of an ascending grid.
pub fn sweep(zeta: Prob, epsilon: Prob, beta_grid: &[Prob]) -> Result<SweepTable> {
    if beta_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if beta_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::GridNotSorted);
    }
    // Validates ζ and ε once up front.
    BecBscModel::new(zeta.get(), 0.0, epsilon.get())?;
    let rows = par::map_indexed(beta_grid.len(), |i| SweepRow::at(zeta, epsilon, beta_grid[i]));
    Ok(SweepTable { zeta: zeta.get(), epsilon: epsilon.get(), rows: rows.into_iter().collect::<Result<_>>()? })
}

/// `steps` evenly spaced values from `lo` to `hi` inclusive (a single `lo`
/// when `steps == 1`).
pub fn linear_grid(lo: f64, hi: f64, steps: usize) -> Result<Vec<Prob>> {
    if steps == 0 {
        return Err(Error::EmptyGrid);
    }
    if !(lo <= hi) {
        return Err(Error::GridNotSorted);
    }
    (0..steps)
        .map(|i| {
            let x = if steps == 1 {
                lo
            } else if i + 1 == steps {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (steps - 1) as f64
            };
            Prob::new(x)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn model(z: f64, b: f64, e: f64) -> BecBscModel {
        BecBscModel::new(z, b, e).unwrap()
    }

    // Reference values are h2 sums evaluated independently.
    const H2_001: f64 = 0.080_793_135_895_911_18;
    const H2_005: f64 = 0.286_396_957_115_956_25;
    const H2_0059: f64 = 0.323_462_435_872_185_37;

    #[test]
    fn tabulated_terms_match_direct() {
        let m = model(0.03, 0.4, 0.12);
        let spec = BoxSpec::with_defaults(vec![HALF_BOX; 3]).unwrap();
        let t = SeparateTables::new(&m, &spec);
        let on_grid = spec.grid_coord(0, 17);
        for (u, v, q) in [(0.1, on_grid, on_grid), (on_grid, 0.123, 0.5), (0.0, 0.5, 0.2345)] {
            let aux = BecBscAux { u, v, q };
            let (rate, slack) = inner_separate_objective(&m, aux);
            assert_eq!(t.rate(&m, aux), rate);
            assert_eq!(t.slack(&m, aux), slack);
        }
    }

    #[test]
    fn outer_endpoints() {
        let r = outer_bound(&model(0.01, 1.0, 0.05));
        assert_abs_diff_eq!(r.rk, H2_001, epsilon = 1e-9);
        assert_eq!(r.argmax, Argmax::V(0.0));
        let r = outer_bound(&model(0.01, 0.0, 0.05));
        assert_abs_diff_eq!(r.rk, H2_001 + H2_005, epsilon = 1e-9);
        assert!(matches!(r.argmax, Argmax::V(v) if (v - 0.5).abs() < 1e-6));
        for b in [0.0, 0.4, 1.0] {
            assert_abs_diff_eq!(outer_bound(&model(0.0, b, 0.0)).rk, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn separate_endpoints() {
        let r = inner_separate(&model(0.01, 0.0, 0.05));
        assert_abs_diff_eq!(r.rk, H2_001 + H2_005, epsilon = 1e-9);
        let Argmax::BecBsc(aux) = r.argmax else { panic!("wrong argmax") };
        // The channel term h2(ζ) + h2(q) - h2(ζ⋆q) peaks at q = 1/2, where Q
        // carries nothing and the whole channel goes to the secure layer.
        assert_abs_diff_eq!(aux.u, 0.5, epsilon = 1e-6);
        assert_abs_diff_eq!(aux.v, 0.0, epsilon = 1e-6);
        assert_abs_diff_eq!(aux.q, 0.5, epsilon = 1e-6);
        assert!(r.slack >= -1e-9);
        assert!(r.secondary_slack.unwrap() >= 0.0);
        assert_abs_diff_eq!(inner_separate(&model(0.01, 1.0, 0.05)).rk, H2_001, epsilon = 1e-9);
    }

    #[test]
    fn one_layer_is_the_half_slice() {
        let m = model(0.02, 0.37, 0.11);
        for v in [0.0, 0.1, 0.27, 0.5] {
            let (two, slack) = inner_separate_objective(&m, BecBscAux { u: 0.5, v, q: 0.5 });
            assert_abs_diff_eq!(two, inner_separate_1layer_objective(&m, v), epsilon = 1e-14);
            assert_abs_diff_eq!(slack, 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn one_layer_endpoints_and_gap() {
        let r = inner_separate_1layer(&model(0.01, 1.0, 0.05));
        assert_abs_diff_eq!(r.rk, H2_001, epsilon = 1e-9);
        let r = inner_separate_1layer(&model(0.01, 0.0, 0.05));
        assert_abs_diff_eq!(r.rk, H2_001 + H2_005, epsilon = 1e-9);
        let m = model(0.01, 0.25, 0.05);
        assert!(inner_separate(&m).rk - inner_separate_1layer(&m).rk >= 5e-3);
    }

    #[test]
    fn joint_branches() {
        let r = inner_joint(&model(0.01, 0.0, 0.05));
        assert_abs_diff_eq!(r.rk, H2_0059, epsilon = 1e-9);
        assert!(matches!(
            r.argmax,
            Argmax::Joint { branch: JointBranch::Coupled, v } if (v - 0.5).abs() < 1e-6
        ));
        let r = inner_joint(&model(0.01, 1.0, 0.05));
        assert_abs_diff_eq!(r.rk, H2_001, epsilon = 1e-12);
        assert!(matches!(r.argmax, Argmax::Joint { branch: JointBranch::ChannelOnly, .. }));
        // With a noiseless eavesdropper channel the coupled branch is the
        // outer objective.
        let m = model(0.0, 0.3, 0.1);
        for v in [0.0, 0.2, 0.5] {
            assert_abs_diff_eq!(inner_joint_coupled_objective(&m, v), outer_objective(&m, v), epsilon = 1e-14);
        }
    }

    #[test]
    fn sweep_shapes() {
        let z = Prob::new(0.01).unwrap();
        let e = Prob::new(0.05).unwrap();
        let table = sweep(z, e, &[Prob::new(0.5).unwrap()]).unwrap();
        assert_eq!(table.rows.len(), 1);
        assert_eq!(sweep(z, e, &[]).unwrap_err(), Error::EmptyGrid);
        let unsorted = [Prob::new(0.5).unwrap(), Prob::new(0.1).unwrap()];
        assert_eq!(sweep(z, e, &unsorted).unwrap_err(), Error::GridNotSorted);
    }

    #[test]
    fn grid_endpoints_are_exact() {
        let g = linear_grid(0.0, 1.0, 201).unwrap();
        assert_eq!(g.len(), 201);
        assert_eq!(g[0].get(), 0.0);
        assert_eq!(g[200].get(), 1.0);
        assert_eq!(linear_grid(0.5, 0.5, 1).unwrap(), vec![Prob::new(0.5).unwrap()]);
    }
}
