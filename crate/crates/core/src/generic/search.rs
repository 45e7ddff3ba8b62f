//! Multi-start search over auxiliary distributions.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use super::{
    axis, eval_inner_joint_thm3, eval_inner_sep_thm2, eval_outer_thm1, AuxSpecJoint, AuxSpecOuter, AuxSpecSeparate,
    SystemSpec,
};
use crate::bound::{Argmax, BoundResult};
use crate::info::{Axis, FinitePmf, Kernel};
use crate::rng::{stream, Domain};
use crate::{par, Error, Result};

/// Which rate expression to maximize.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Which {
    Outer,
    InnerSep,
    InnerJoint,
}

/// Alphabet sizes of the auxiliaries. `t` and `q` are ignored by the joint
/// scheme, `q` by the outer bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AuxCardinalities {
    pub t: usize,
    pub q: usize,
    pub u: usize,
    pub v: usize,
}

/// Auxiliaries attaining a searched bound.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum GenericArgmax {
    Outer(AuxSpecOuter),
    Separate(AuxSpecSeparate),
    Joint(AuxSpecJoint),
}

const PENALTY: f64 = 10.0;
const FEASIBLE_TOL: f64 = 1e-12;
const STEP_START: f64 = 0.25;
const STEP_END: f64 = 1e-4;
const MAX_SWEEPS: usize = 50;

/// One probability vector inside the flat parameter array.
#[derive(Debug, Clone, Copy)]
struct Row {
    start: usize,
    len: usize,
}

/// Layout of the parameter array: each table is a run of rows.
struct Layout {
    which: Which,
    na: usize,
    nx: usize,
    cards: AuxCardinalities,
    rows: Vec<Row>,
    len: usize,
}

impl Layout {
    fn new(sys: &SystemSpec, which: Which, cards: AuxCardinalities) -> Layout {
        let (na, nx) = (sys.a_size(), sys.x_size());
        let AuxCardinalities { t, q, u, v } = cards;
        let tables: Vec<(usize, usize)> = match which {
            Which::Outer => vec![(1, t * nx), (na, v), (v, u)],
            Which::InnerSep => vec![(1, t * nx), (na, v), (v, u), (t, q)],
            Which::InnerJoint => vec![(na, v * nx), (v, u)],
        };
        let mut rows = Vec::new();
        let mut start = 0;
        for (count, len) in tables {
            for _ in 0..count {
                rows.push(Row { start, len });
                start += len;
            }
        }
        Layout { which, na, nx, cards, rows, len: start }
    }

    fn aux(&self, p: &[f64]) -> GenericArgmax {
        let AuxCardinalities { t, q, u, v } = self.cards;
        let (na, nx) = (self.na, self.nx);
        let ax = |name: &str, n: usize| vec![Axis::new(name, n)];
        let mut at = 0;
        let mut take = |n: usize| {
            let s = p[at..at + n].to_vec();
            at += n;
            s
        };
        match self.which {
            Which::Outer | Which::InnerSep => {
                let p_tx = FinitePmf::from_parts(vec![Axis::new(axis::T, t), Axis::new(axis::X, nx)], take(t * nx));
                let va = Kernel::from_parts(ax(axis::A, na), ax(axis::V, v), take(na * v));
                let uv = Kernel::from_parts(ax(axis::V, v), ax(axis::U, u), take(v * u));
                if self.which == Which::Outer {
                    GenericArgmax::Outer(AuxSpecOuter { p_tx, p_v_given_a: va, p_u_given_v: uv })
                } else {
                    let qt = Kernel::from_parts(ax(axis::T, t), ax(axis::Q, q), take(t * q));
                    GenericArgmax::Separate(AuxSpecSeparate { p_tx, p_q_given_t: qt, p_v_given_a: va, p_u_given_v: uv })
                }
            }
            Which::InnerJoint => {
                let vx = Kernel::from_parts(
                    ax(axis::A, na),
                    vec![Axis::new(axis::V, v), Axis::new(axis::X, nx)],
                    take(na * v * nx),
                );
                let uv = Kernel::from_parts(ax(axis::V, v), ax(axis::U, u), take(v * u));
                GenericArgmax::Joint(AuxSpecJoint { p_vx_given_a: vx, p_u_given_v: uv })
            }
        }
    }
}

/// Rate and constraint margins at one point.
#[derive(Debug, Clone, Copy)]
struct Score {
    rate: f64,
    slack: f64,
    secondary: Option<f64>,
}

impl Score {
    fn feasible(&self) -> bool {
        self.slack >= -FEASIBLE_TOL && self.secondary.map_or(true, |s| s >= -FEASIBLE_TOL)
    }

    fn penalized(&self) -> f64 {
        let violation = (-self.slack).max(0.0) + self.secondary.map_or(0.0, |s| (-s).max(0.0));
        self.rate - PENALTY * violation
    }
}

fn score(sys: &SystemSpec, aux: &GenericArgmax) -> Result<Score> {
    Ok(match aux {
        GenericArgmax::Outer(a) => {
            let r = eval_outer_thm1(sys, a)?;
            Score { rate: r.rate, slack: r.slack, secondary: None }
        }
        GenericArgmax::Separate(a) => {
            let r = eval_inner_sep_thm2(sys, a)?;
            Score { rate: r.rate, slack: r.slack_u, secondary: Some(r.slack_v) }
        }
        GenericArgmax::Joint(a) => {
            let r = eval_inner_joint_thm3(sys, a)?;
            Score { rate: r.rate, slack: r.slack_u, secondary: Some(r.slack_v) }
        }
    })
}

/// Dirichlet(1, ..., 1) sample on every row.
fn random_start(layout: &Layout, rng: &mut impl Rng) -> Vec<f64> {
    let mut p = vec![0.0; layout.len];
    for row in &layout.rows {
        let slice = &mut p[row.start..row.start + row.len];
        let mut sum = 0.0;
        for x in slice.iter_mut() {
            // 1 - U lies in (0, 1], so the logarithm is finite.
            *x = -libm::log(1.0 - rng.gen::<f64>());
            sum += *x;
        }
        for x in slice.iter_mut() {
            *x /= sum;
        }
    }
    p
}

struct Best {
    rate: f64,
    point: Vec<f64>,
}

/// Projected pattern search from one start: moves mass between pairs of
/// entries of a row, keeping every row on its simplex. Returns the best
/// feasible point seen.
fn local_search(sys: &SystemSpec, layout: &Layout, mut p: Vec<f64>) -> Result<Option<Best>> {
    let mut best: Option<Best> = None;
    let eval = |p: &[f64], best: &mut Option<Best>| -> Result<f64> {
        let s = score(sys, &layout.aux(p))?;
        if s.feasible() && best.as_ref().map_or(true, |b| s.rate > b.rate) {
            *best = Some(Best { rate: s.rate, point: p.to_vec() });
        }
        Ok(s.penalized())
    };
    let mut current = eval(&p, &mut best)?;
    let mut step = STEP_START;
    while step >= STEP_END {
        for _ in 0..MAX_SWEEPS {
            let mut improved = false;
            for row in &layout.rows {
                for i in 0..row.len {
                    for j in 0..row.len {
                        let (to, from) = (row.start + i, row.start + j);
                        if i == j || p[from] <= 0.0 {
                            continue;
                        }
                        let (old_to, old_from) = (p[to], p[from]);
                        let amount = step.min(old_from);
                        p[from] = if amount == old_from { 0.0 } else { old_from - amount };
                        p[to] = old_to + amount;
                        let s = eval(&p, &mut best)?;
                        if s > current {
                            current = s;
                            improved = true;
                        } else {
                            p[to] = old_to;
                            p[from] = old_from;
                        }
                    }
                }
            }
            if !improved {
                break;
            }
        }
        step *= 0.5;
    }
    Ok(best)
}

/// Best-found value of the chosen rate expression over auxiliaries of the
/// given sizes: `restarts` Dirichlet starts, each polished by projected
/// pattern search with steps shrinking from 0.25 to 1e-4. Only points that
/// satisfy every rate constraint count. The result is not certified.
///
/// Restart `i` draws from its own stream of `seed`, so adding restarts never
/// lowers the result and parallel runs reproduce serial ones.
pub fn optimize_generic(
    sys: &SystemSpec,
    which: Which,
    cards: AuxCardinalities,
    restarts: usize,
    seed: u64,
) -> Result<BoundResult> {
    if restarts == 0 {
        return Err(Error::InvalidConfig("restarts must be at least 1".into()));
    }
    for (name, n) in [("t", cards.t), ("q", cards.q), ("u", cards.u), ("v", cards.v)] {
        if n == 0 {
            return Err(Error::InvalidConfig(alloc::format!("cardinality {name} must be at least 1")));
        }
    }
    let layout = Layout::new(sys, which, cards);
    // Surfaces cap and coupling errors before spawning work.
    score(sys, &layout.aux(&random_start(&layout, &mut stream(seed, Domain::SearchStart, 0))))?;

    let runs = par::map_indexed(restarts, |i| {
        let mut rng = stream(seed, Domain::SearchStart, i as u64);
        local_search(sys, &layout, random_start(&layout, &mut rng))
    });
    let mut best: Option<Best> = None;
    for run in runs {
        if let Some(b) = run? {
            if best.as_ref().map_or(true, |cur| b.rate > cur.rate) {
                best = Some(b);
            }
        }
    }
    let Some(best) = best else {
        return Ok(BoundResult::infeasible(Argmax::None));
    };
    let aux = layout.aux(&best.point);
    let s = score(sys, &aux)?;
    let mut result = BoundResult::searched(s.rate, Argmax::Generic(aux), s.slack);
    result.secondary_slack = s.secondary;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::BecBscModel;

    #[test]
    fn singleton_auxiliaries_give_zero() {
        let sys = BecBscModel::new(0.1, 0.3, 0.2).unwrap().system();
        let ones = AuxCardinalities { t: 1, q: 1, u: 1, v: 1 };
        for which in [Which::Outer, Which::InnerSep, Which::InnerJoint] {
            let r = optimize_generic(&sys, which, ones, 2, 1).unwrap();
            assert_eq!(r.rk, 0.0);
            assert!(!r.certified);
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        let sys = BecBscModel::new(0.1, 0.3, 0.2).unwrap().system();
        let cards = AuxCardinalities { t: 2, q: 2, u: 2, v: 2 };
        assert!(optimize_generic(&sys, Which::Outer, cards, 0, 1).is_err());
        let big = AuxCardinalities { t: 3, q: 2, u: 2, v: 2 };
        assert_eq!(
            optimize_generic(&sys, Which::Outer, big, 1, 1).unwrap_err(),
            Error::CardinalityCap { aux: "T", got: 3, cap: 2 }
        );
    }

    #[test]
    fn deterministic_and_monotone_in_restarts() {
        let sys = BecBscModel::new(0.05, 0.4, 0.1).unwrap().system();
        let cards = AuxCardinalities { t: 2, q: 2, u: 2, v: 2 };
        let a = optimize_generic(&sys, Which::InnerJoint, cards, 3, 9).unwrap();
        let b = optimize_generic(&sys, Which::InnerJoint, cards, 3, 9).unwrap();
        assert_eq!(a, b);
        let c = optimize_generic(&sys, Which::InnerJoint, cards, 6, 9).unwrap();
        assert!(c.rk >= a.rk);
    }
}
