//! Rate expressions for arbitrary finite systems.
//!
//! A [`SystemSpec`] holds the source law `p(a, b, e)`, the channel
//! `p(y, z | x)` (or `p(y, z | x, a)` when the state drives the channel) and
//! the bandwidth ratio η. The evaluators take explicit auxiliary
//! distributions and return the rate together with the margins of its rate
//! constraints; [`optimize_generic`] searches over auxiliaries.

mod search;

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

pub use search::{optimize_generic, AuxCardinalities, GenericArgmax, Which};

use crate::info::{cond_mutual_info, Axis, FinitePmf, Kernel};
use crate::{Error, Result};

/// Axis names used by the systems and auxiliaries.
pub mod axis {
    pub const A: &str = "A";
    pub const B: &str = "B";
    pub const E: &str = "E";
    pub const X: &str = "X";
    pub const Y: &str = "Y";
    pub const Z: &str = "Z";
    pub const T: &str = "T";
    pub const Q: &str = "Q";
    pub const U: &str = "U";
    pub const V: &str = "V";
}

fn require_axes(what: &str, got: &[Axis], want: &[&str]) -> Result<()> {
    let names: Vec<&str> = got.iter().map(Axis::name).collect();
    if names != want {
        let mut msg = what.to_string();
        msg.push_str(": expected axes ");
        msg.push_str(&want.join(","));
        msg.push_str(", got ");
        msg.push_str(&names.join(","));
        return Err(Error::InvalidConfig(msg));
    }
    Ok(())
}

fn size_of(axes: &[Axis], name: &str) -> usize {
    axes.iter().find(|a| a.name() == name).map_or(1, Axis::size)
}

/// Sources, channel and bandwidth ratio.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SystemSpec {
    source: FinitePmf,
    channel: Kernel,
    eta: f64,
    state_coupled: bool,
}

impl SystemSpec {
    /// `source` must have axes `A, B, E`. `channel` maps `X` (or `X, A` when
    /// `state_coupled`) to `Y, Z`.
    pub fn new(source: FinitePmf, channel: Kernel, eta: f64, state_coupled: bool) -> Result<Self> {
        require_axes("source", source.axes(), &[axis::A, axis::B, axis::E])?;
        let parents: &[&str] = if state_coupled { &[axis::X, axis::A] } else { &[axis::X] };
        require_axes("channel inputs", channel.parents(), parents)?;
        require_axes("channel outputs", channel.children(), &[axis::Y, axis::Z])?;
        if state_coupled && channel.parents()[1].size() != source.axes()[0].size() {
            return Err(Error::ShapeMismatch { expected: source.axes()[0].size(), got: channel.parents()[1].size() });
        }
        if !(eta >= 0.0) || !eta.is_finite() {
            return Err(Error::Domain { what: "eta", value: eta });
        }
        Ok(SystemSpec { source, channel, eta, state_coupled })
    }

    pub fn source(&self) -> &FinitePmf {
        &self.source
    }

    pub fn channel(&self) -> &Kernel {
        &self.channel
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn state_coupled(&self) -> bool {
        self.state_coupled
    }

    pub fn a_size(&self) -> usize {
        self.source.axes()[0].size()
    }

    pub fn x_size(&self) -> usize {
        self.channel.parents()[0].size()
    }

    fn require_independent(&self, what: &'static str) -> Result<()> {
        if self.state_coupled {
            return Err(Error::StateCoupled(what));
        }
        Ok(())
    }
}

fn cap(aux: &'static str, got: usize, cap: usize) -> Result<()> {
    if got > cap {
        return Err(Error::CardinalityCap { aux, got, cap });
    }
    Ok(())
}

fn check_kernel(what: &str, k: &Kernel, parents: &[&str], children: &[&str]) -> Result<()> {
    require_axes(what, k.parents(), parents)?;
    require_axes(what, k.children(), children)
}

/// Auxiliaries of the outer bound: `p(t, x)`, `p(v | a)`, `p(u | v)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct AuxSpecOuter {
    pub p_tx: FinitePmf,
    pub p_v_given_a: Kernel,
    pub p_u_given_v: Kernel,
}

impl AuxSpecOuter {
    pub fn new(p_tx: FinitePmf, p_v_given_a: Kernel, p_u_given_v: Kernel) -> Result<Self> {
        require_axes("p(t,x)", p_tx.axes(), &[axis::T, axis::X])?;
        check_kernel("p(v|a)", &p_v_given_a, &[axis::A], &[axis::V])?;
        check_kernel("p(u|v)", &p_u_given_v, &[axis::V], &[axis::U])?;
        Ok(AuxSpecOuter { p_tx, p_v_given_a, p_u_given_v })
    }

    fn check_caps(&self, sys: &SystemSpec) -> Result<()> {
        let (na, nx) = (sys.a_size(), sys.x_size());
        cap("T", size_of(self.p_tx.axes(), axis::T), nx)?;
        cap("U", size_of(self.p_u_given_v.children(), axis::U), na + 1)?;
        cap("V", size_of(self.p_v_given_a.children(), axis::V), (na + 1) * (na + 1))
    }
}

/// Auxiliaries of the separate scheme: `p(t, x)`, `p(q | t)`, `p(v | a)`,
/// `p(u | v)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct AuxSpecSeparate {
    pub p_tx: FinitePmf,
    pub p_q_given_t: Kernel,
    pub p_v_given_a: Kernel,
    pub p_u_given_v: Kernel,
}

impl AuxSpecSeparate {
    pub fn new(p_tx: FinitePmf, p_q_given_t: Kernel, p_v_given_a: Kernel, p_u_given_v: Kernel) -> Result<Self> {
        require_axes("p(t,x)", p_tx.axes(), &[axis::T, axis::X])?;
        check_kernel("p(q|t)", &p_q_given_t, &[axis::T], &[axis::Q])?;
        check_kernel("p(v|a)", &p_v_given_a, &[axis::A], &[axis::V])?;
        check_kernel("p(u|v)", &p_u_given_v, &[axis::V], &[axis::U])?;
        Ok(AuxSpecSeparate { p_tx, p_q_given_t, p_v_given_a, p_u_given_v })
    }

    /// The outer-bound auxiliaries obtained by dropping `Q`.
    pub fn without_q(&self) -> AuxSpecOuter {
        AuxSpecOuter {
            p_tx: self.p_tx.clone(),
            p_v_given_a: self.p_v_given_a.clone(),
            p_u_given_v: self.p_u_given_v.clone(),
        }
    }

    fn check_caps(&self, sys: &SystemSpec) -> Result<()> {
        let (na, nx) = (sys.a_size(), sys.x_size());
        cap("U", size_of(self.p_u_given_v.children(), axis::U), na + 2)?;
        cap("V", size_of(self.p_v_given_a.children(), axis::V), (na + 1) * (na + 2))?;
        cap("Q", size_of(self.p_q_given_t.children(), axis::Q), nx + 2)?;
        cap("T", size_of(self.p_tx.axes(), axis::T), (nx + 1) * (nx + 2))
    }
}

/// Auxiliaries of the joint scheme: `p(v, x | a)` and `p(u | v)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct AuxSpecJoint {
    pub p_vx_given_a: Kernel,
    pub p_u_given_v: Kernel,
}

impl AuxSpecJoint {
    pub fn new(p_vx_given_a: Kernel, p_u_given_v: Kernel) -> Result<Self> {
        check_kernel("p(v,x|a)", &p_vx_given_a, &[axis::A], &[axis::V, axis::X])?;
        check_kernel("p(u|v)", &p_u_given_v, &[axis::V], &[axis::U])?;
        Ok(AuxSpecJoint { p_vx_given_a, p_u_given_v })
    }

    pub fn u_size(&self) -> usize {
        self.p_u_given_v.children()[0].size()
    }

    pub fn v_size(&self) -> usize {
        self.p_vx_given_a.children()[0].size()
    }

    fn check_caps(&self, sys: &SystemSpec) -> Result<()> {
        let xa = sys.a_size() * sys.x_size();
        cap("U", self.u_size(), xa + 4)?;
        cap("V", self.v_size(), (xa + 2) * (xa + 4))
    }
}

/// Rate of the outer bound and the margin of its constraint.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct OuterEval {
    pub rate: f64,
    pub slack: f64,
}

/// Rate of an inner bound and the margins of its two constraints.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct InnerEval {
    pub rate: f64,
    pub slack_u: f64,
    pub slack_v: f64,
}

impl InnerEval {
    pub fn feasible(&self, tol: f64) -> bool {
        self.slack_u >= -tol && self.slack_v >= -tol
    }
}

fn mi(p: &FinitePmf, x: &[&str], y: &[&str], z: &[&str]) -> f64 {
    cond_mutual_info(p, x, y, z).expect("axes of an assembled joint")
}

/// `p(a, b, e, v, u)`.
fn source_joint(sys: &SystemSpec, v_given_a: &Kernel, u_given_v: &Kernel) -> Result<FinitePmf> {
    sys.source.extend(v_given_a)?.extend(u_given_v)
}

/// Source part shared by the separate and joint inner bounds: `I(V;B|U) - I(V;E|U)`, `I(V;A|B)`,
/// `I(U;A|B)`.
fn source_terms(s: &FinitePmf) -> (f64, f64, f64) {
    let (a, b, e, u, v) = (axis::A, axis::B, axis::E, axis::U, axis::V);
    let key = mi(s, &[v], &[b], &[u]) - mi(s, &[v], &[e], &[u]);
    (key, mi(s, &[v], &[a], &[b]), mi(s, &[u], &[a], &[b]))
}

/// Outer bound `η[I(T;Y) - I(T;Z)] + I(V;B|U) - I(V;E|U)` with slack
/// `η I(X;Y) - I(V;A|B)`. Rejects state-coupled systems.
pub fn eval_outer_thm1(sys: &SystemSpec, aux: &AuxSpecOuter) -> Result<OuterEval> {
    sys.require_independent("the outer bound")?;
    aux.check_caps(sys)?;
    let s = source_joint(sys, &aux.p_v_given_a, &aux.p_u_given_v)?;
    let c = aux.p_tx.extend(&sys.channel)?;
    let (t, x, y, z) = (axis::T, axis::X, axis::Y, axis::Z);
    let (key, v_a_b, _) = source_terms(&s);
    let eta = sys.eta;
    Ok(OuterEval {
        rate: eta * (mi(&c, &[t], &[y], &[]) - mi(&c, &[t], &[z], &[])) + key,
        slack: eta * mi(&c, &[x], &[y], &[]) - v_a_b,
    })
}

/// Separate-scheme rate `η[I(T;Y|Q) - I(T;Z|Q)] + I(V;B|U) - I(V;E|U)` with
/// slacks `η I(Q;Y) - I(U;A|B)` and `η I(T;Y) - I(V;A|B)`. Rejects
/// state-coupled systems.
pub fn eval_inner_sep_thm2(sys: &SystemSpec, aux: &AuxSpecSeparate) -> Result<InnerEval> {
    sys.require_independent("the separate scheme")?;
    aux.check_caps(sys)?;
    let s = source_joint(sys, &aux.p_v_given_a, &aux.p_u_given_v)?;
    let c = aux.p_tx.extend(&aux.p_q_given_t)?.extend(&sys.channel)?;
    let (t, q, y, z) = (axis::T, axis::Q, axis::Y, axis::Z);
    let (key, v_a_b, u_a_b) = source_terms(&s);
    let eta = sys.eta;
    Ok(InnerEval {
        rate: eta * (mi(&c, &[t], &[y], &[q]) - mi(&c, &[t], &[z], &[q])) + key,
        slack_u: eta * mi(&c, &[q], &[y], &[]) - u_a_b,
        slack_v: eta * mi(&c, &[t], &[y], &[]) - v_a_b,
    })
}

/// Joint-scheme rate `I(V;BY|U) - I(V;EZ|U)` with slacks
/// `I(U;BY) - I(U;A)` and `I(V;BY|U) - I(V;A|U)`. Requires `η = 1`.
pub fn eval_inner_joint_thm3(sys: &SystemSpec, aux: &AuxSpecJoint) -> Result<InnerEval> {
    if sys.eta != 1.0 {
        return Err(Error::EtaNotOne { eta: sys.eta });
    }
    aux.check_caps(sys)?;
    let p = sys.source.extend(&aux.p_vx_given_a)?.extend(&aux.p_u_given_v)?.extend(&sys.channel)?;
    let (a, b, e, u, v, y, z) = (axis::A, axis::B, axis::E, axis::U, axis::V, axis::Y, axis::Z);
    let v_by_u = mi(&p, &[v], &[b, y], &[u]);
    Ok(InnerEval {
        rate: v_by_u - mi(&p, &[v], &[e, z], &[u]),
        slack_u: mi(&p, &[u], &[b, y], &[]) - mi(&p, &[u], &[a], &[]),
        slack_v: v_by_u - mi(&p, &[v], &[a], &[u]),
    })
}

fn bit(name: &str) -> Axis {
    Axis::new(name, 2)
}

fn bsc(parent: &str, child: &str, p: f64) -> Kernel {
    Kernel::bsc(parent, child, p).expect("crossover in [0, 1]")
}

/// Constant auxiliary `child` (singleton alphabet) of a parent of the given
/// size.
pub fn constant_kernel(parent: &str, parent_size: usize, child: &str) -> Kernel {
    Kernel::new(vec![Axis::new(parent, parent_size)], vec![Axis::new(child, 1)], vec![1.0; parent_size])
        .expect("constant kernel")
}

/// Two-layer family for binary sources and channels: `T = X` uniform,
/// `Q = X ⊕ Q'`, `V = A ⊕ V'`, `U = V ⊕ U'` with `Q' ~ B(q)`, `V' ~ B(v)`,
/// `U' ~ B(u)`.
pub fn two_layer_aux(u: f64, v: f64, q: f64) -> AuxSpecSeparate {
    let p_tx = FinitePmf::new(vec![bit(axis::T), bit(axis::X)], vec![0.5, 0.0, 0.0, 0.5]).expect("uniform diagonal");
    AuxSpecSeparate::new(p_tx, bsc(axis::T, axis::Q, q), bsc(axis::A, axis::V, v), bsc(axis::V, axis::U, u))
        .expect("well-formed family")
}

/// Joint-scheme family for the BEC/BSC model: `V ~ B(1/2)` independent of
/// `A`, `X = V ⊕ A`, `U = V ⊕ V'` with `V' ~ B(v)`.
pub fn coupled_joint_aux(v: f64) -> AuxSpecJoint {
    let vx = Kernel::from_fn(vec![bit(axis::A)], vec![bit(axis::V), bit(axis::X)], |a, vx| {
        if vx[1] == vx[0] ^ a[0] {
            0.5
        } else {
            0.0
        }
    })
    .expect("stochastic");
    AuxSpecJoint::new(vx, bsc(axis::V, axis::U, v)).expect("well-formed family")
}

/// Joint-scheme choice for the binary state model: `X = V = V' ⊕ A` with
/// `V' ~ B(1/2)` and `U` constant.
pub fn state_masking_aux() -> AuxSpecJoint {
    let vx =
        Kernel::from_fn(
            vec![bit(axis::A)],
            vec![bit(axis::V), bit(axis::X)],
            |_, vx| {
                if vx[0] == vx[1] {
                    0.5
                } else {
                    0.0
                }
            },
        )
        .expect("stochastic");
    AuxSpecJoint::new(vx, constant_kernel(axis::V, 2, axis::U)).expect("well-formed family")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::becbsc::{inner_joint_coupled_objective, inner_separate_objective, outer_objective};
    use crate::bound::BecBscAux;
    use crate::info::{h2f, starf};
    use crate::models::{BecBscModel, BinaryStateModel};
    use approx::assert_abs_diff_eq;

    fn becbsc(z: f64, b: f64, e: f64) -> (BecBscModel, SystemSpec) {
        let m = BecBscModel::new(z, b, e).unwrap();
        (m, m.system())
    }

    #[test]
    fn outer_wiretap_only() {
        let (_, sys) = becbsc(0.1, 0.3, 0.2);
        let p_tx = FinitePmf::new(vec![bit(axis::T), bit(axis::X)], vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        let aux = AuxSpecOuter::new(p_tx, constant_kernel(axis::A, 2, axis::V), constant_kernel(axis::V, 1, axis::U))
            .unwrap();
        let r = eval_outer_thm1(&sys, &aux).unwrap();
        assert_abs_diff_eq!(r.rate, h2f(0.1), epsilon = 1e-12);
        assert_abs_diff_eq!(r.slack, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn outer_source_only() {
        let (_, sys) = becbsc(0.1, 0.3, 0.2);
        let p_tx = FinitePmf::new(vec![Axis::new(axis::T, 1), bit(axis::X)], vec![0.5, 0.5]).unwrap();
        let v_eq_a = Kernel::deterministic(vec![bit(axis::A)], bit(axis::V), |a| a[0]).unwrap();
        let aux = AuxSpecOuter::new(p_tx, v_eq_a, constant_kernel(axis::V, 2, axis::U)).unwrap();
        let r = eval_outer_thm1(&sys, &aux).unwrap();
        // I(A;B) - I(A;E) and 1 - H(A|B).
        assert_abs_diff_eq!(r.rate, 0.7 - (1.0 - h2f(0.2)), epsilon = 1e-12);
        assert_abs_diff_eq!(r.slack, 1.0 - 0.3, epsilon = 1e-12);
    }

    #[test]
    fn outer_matches_closed_form_slice() {
        for (z, b, e, v) in [(0.01, 0.25, 0.05, 0.0), (0.1, 0.6, 0.2, 0.3), (0.0, 0.1, 0.4, 0.5)] {
            let (m, sys) = becbsc(z, b, e);
            let p_tx = FinitePmf::new(vec![bit(axis::T), bit(axis::X)], vec![0.5, 0.0, 0.0, 0.5]).unwrap();
            let v_eq_a = Kernel::deterministic(vec![bit(axis::A)], bit(axis::V), |a| a[0]).unwrap();
            let aux = AuxSpecOuter::new(p_tx, v_eq_a, bsc(axis::V, axis::U, v)).unwrap();
            let r = eval_outer_thm1(&sys, &aux).unwrap();
            assert_abs_diff_eq!(r.rate, outer_objective(&m, v), epsilon = 1e-12);
            assert_abs_diff_eq!(r.slack, 1.0 - b, epsilon = 1e-12);
        }
    }

    #[test]
    fn separate_matches_two_layer_family() {
        let (m, sys) = becbsc(0.03, 0.4, 0.12);
        for (u, v, q) in [(0.1, 0.2, 0.3), (0.5, 0.0, 0.5), (0.0, 0.5, 0.1)] {
            let r = eval_inner_sep_thm2(&sys, &two_layer_aux(u, v, q)).unwrap();
            let (rate, slack) = inner_separate_objective(&m, BecBscAux { u, v, q });
            assert_abs_diff_eq!(r.rate, rate, epsilon = 1e-10);
            assert_abs_diff_eq!(r.slack_u, slack, epsilon = 1e-10);
            assert_abs_diff_eq!(r.slack_v, 1.0 - 0.4 * (1.0 - h2f(v)), epsilon = 1e-10);
        }
    }

    #[test]
    fn collapsed_superposition() {
        // Q = T and U = V: both slacks coincide and the channel term vanishes.
        let (_, sys) = becbsc(0.1, 0.3, 0.2);
        let p_tx = FinitePmf::new(vec![bit(axis::T), bit(axis::X)], vec![0.4, 0.1, 0.2, 0.3]).unwrap();
        let copy = |p: &str, c: &str| Kernel::deterministic(vec![bit(p)], bit(c), |x| x[0]).unwrap();
        let aux =
            AuxSpecSeparate::new(p_tx, copy(axis::T, axis::Q), bsc(axis::A, axis::V, 0.2), copy(axis::V, axis::U))
                .unwrap();
        let r = eval_inner_sep_thm2(&sys, &aux).unwrap();
        assert_abs_diff_eq!(r.slack_u, r.slack_v, epsilon = 1e-12);
        assert_abs_diff_eq!(r.rate, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn joint_matches_coupled_branch() {
        let (m, sys) = becbsc(0.02, 0.35, 0.07);
        for v in [0.0, 0.13, 0.5] {
            let r = eval_inner_joint_thm3(&sys, &coupled_joint_aux(v)).unwrap();
            assert_abs_diff_eq!(r.rate, inner_joint_coupled_objective(&m, v), epsilon = 1e-10);
        }
    }

    #[test]
    fn joint_matches_state_masking() {
        let m = BinaryStateModel::new(0.3, 0.1, 0.2, 0.6).unwrap();
        let r = eval_inner_joint_thm3(&m.system(), &state_masking_aux()).unwrap();
        let (a, z, b, e) = (0.3, 0.1, 0.2, 0.6);
        let closed = e * h2f(starf(a, z)) - b * h2f(a) + (1.0 - e) * h2f(z);
        assert_abs_diff_eq!(r.rate, closed, epsilon = 1e-10);
        assert!(r.feasible(1e-10));
    }

    #[test]
    fn rejections() {
        let state = BinaryStateModel::new(0.3, 0.1, 0.2, 0.6).unwrap().system();
        assert_eq!(
            eval_inner_sep_thm2(&state, &two_layer_aux(0.1, 0.1, 0.1)).unwrap_err(),
            Error::StateCoupled("the separate scheme")
        );
        assert!(matches!(
            eval_outer_thm1(&state, &two_layer_aux(0.1, 0.1, 0.1).without_q()),
            Err(Error::StateCoupled(_))
        ));
        let (_, sys) = becbsc(0.1, 0.3, 0.2);
        let half = SystemSpec::new(sys.source().clone(), sys.channel().clone(), 0.5, false).unwrap();
        assert_eq!(eval_inner_joint_thm3(&half, &coupled_joint_aux(0.1)).unwrap_err(), Error::EtaNotOne { eta: 0.5 });
        let big_u = Kernel::from_fn(vec![bit(axis::V)], vec![Axis::new(axis::U, 9)], |_, _| 1.0 / 9.0).unwrap();
        let aux = AuxSpecJoint::new(coupled_joint_aux(0.1).p_vx_given_a, big_u).unwrap();
        assert_eq!(eval_inner_joint_thm3(&sys, &aux).unwrap_err(), Error::CardinalityCap { aux: "U", got: 9, cap: 8 });
    }
}
