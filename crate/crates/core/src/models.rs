//! The three concrete systems and the BEC/BSC source-regime classifier.

use alloc::vec;

use crate::generic::{axis, SystemSpec};
use crate::info::{h2, Axis, FinitePmf, Kernel, Prob};
use crate::{Error, Result};

/// Symbol index of an erasure on a ternary BEC output axis.
pub const ERASURE: usize = 2;

fn at_most_half(what: &'static str, p: f64) -> Result<Prob> {
    let p = Prob::new(p)?;
    if p.get() > 0.5 {
        return Err(Error::Domain { what, value: p.get() });
    }
    Ok(p)
}

/// Noiseless main channel `Y = X`, eavesdropper BSC(ζ), Bob's source a
/// BEC(β) of a uniform bit `A`, Eve's source a BSC(ε) of `A`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BecBscModel {
    zeta: Prob,
    beta: Prob,
    epsilon: Prob,
}

impl BecBscModel {
    pub fn new(zeta: f64, beta: f64, epsilon: f64) -> Result<Self> {
        Ok(BecBscModel {
            zeta: at_most_half("zeta", zeta)?,
            beta: Prob::new(beta)?,
            epsilon: at_most_half("epsilon", epsilon)?,
        })
    }

    pub fn zeta(&self) -> Prob {
        self.zeta
    }

    pub fn beta(&self) -> Prob {
        self.beta
    }

    pub fn epsilon(&self) -> Prob {
        self.epsilon
    }

    pub fn regime(&self) -> SourceRegime {
        classify_source_regime(self.beta, self.epsilon).expect("model invariants keep epsilon in [0, 1/2]")
    }

    /// The model as a generic system with `η = 1`.
    pub fn system(&self) -> SystemSpec {
        let channel = Kernel::from_fn(
            vec![Axis::new(axis::X, 2)],
            vec![Axis::new(axis::Y, 2), Axis::new(axis::Z, 2)],
            |x, yz| {
                let z = self.zeta.get();
                let pz = if yz[1] == x[0] { 1.0 - z } else { z };
                if yz[0] == x[0] {
                    pz
                } else {
                    0.0
                }
            },
        )
        .expect("BSC rows are stochastic");
        SystemSpec::new(becbsc_joint_pmf(self), channel, 1.0, false).expect("BEC/BSC system is well formed")
    }
}

/// Channel `Y = X ⊕ A`, `Z = Y ⊕ W` with state `A ~ B(a)`, `W ~ B(ζ)`, and
/// side information at Bob and Eve through BEC(β) and BEC(ε) of the state.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BinaryStateModel {
    a: Prob,
    zeta: Prob,
    beta: Prob,
    epsilon: Prob,
}

impl BinaryStateModel {
    pub fn new(a: f64, zeta: f64, beta: f64, epsilon: f64) -> Result<Self> {
        Ok(BinaryStateModel {
            a: Prob::new(a)?,
            zeta: at_most_half("zeta", zeta)?,
            beta: Prob::new(beta)?,
            epsilon: Prob::new(epsilon)?,
        })
    }

    pub fn a(&self) -> Prob {
        self.a
    }

    pub fn zeta(&self) -> Prob {
        self.zeta
    }

    pub fn beta(&self) -> Prob {
        self.beta
    }

    pub fn epsilon(&self) -> Prob {
        self.epsilon
    }

    /// `p(a, b, e)` with both side-information outputs ternary.
    pub fn source_pmf(&self) -> FinitePmf {
        let pa = [1.0 - self.a.get(), self.a.get()];
        let src = FinitePmf::new(vec![Axis::new(axis::A, 2)], pa.to_vec()).expect("valid bias");
        src.extend(&bec(axis::A, axis::B, self.beta.get()))
            .and_then(|p| p.extend(&bec(axis::A, axis::E, self.epsilon.get())))
            .expect("BEC rows are stochastic")
    }

    /// The model as a state-coupled generic system with `η = 1`.
    pub fn system(&self) -> SystemSpec {
        let z = self.zeta.get();
        let channel = Kernel::from_fn(
            vec![Axis::new(axis::X, 2), Axis::new(axis::A, 2)],
            vec![Axis::new(axis::Y, 2), Axis::new(axis::Z, 2)],
            |xa, yz| {
                let y = xa[0] ^ xa[1];
                if yz[0] != y {
                    0.0
                } else if yz[1] == y {
                    1.0 - z
                } else {
                    z
                }
            },
        )
        .expect("channel rows are stochastic");
        SystemSpec::new(self.source_pmf(), channel, 1.0, true).expect("state system is well formed")
    }
}

/// `Y = X + S + W1`, `Z = X + S + W2` with `S ~ N(0, Q)`, `Wi ~ N(0, Ni)` and
/// `E[X^2] <= P`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GaussianStateModel {
    p: f64,
    q: f64,
    n1: f64,
    n2: f64,
}

impl GaussianStateModel {
    pub fn new(p: f64, q: f64, n1: f64, n2: f64) -> Result<Self> {
        let nonneg = |what, v: f64| {
            if v >= 0.0 && v.is_finite() {
                Ok(v)
            } else {
                Err(Error::Domain { what, value: v })
            }
        };
        let positive = |what, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(v)
            } else {
                Err(Error::Domain { what, value: v })
            }
        };
        Ok(GaussianStateModel {
            p: nonneg("power P", p)?,
            q: nonneg("state variance Q", q)?,
            n1: positive("noise N1", n1)?,
            n2: positive("noise N2", n2)?,
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn n1(&self) -> f64 {
        self.n1
    }

    pub fn n2(&self) -> f64 {
        self.n2
    }
}

/// How Bob's BEC source compares with Eve's BSC source, from weakest to
/// strongest ordering failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SourceRegime {
    /// `A - B - E`: Eve's source is a degraded version of Bob's.
    Degraded,
    /// Bob's source is less noisy than Eve's.
    LessNoisy,
    /// Bob's source is more capable than Eve's.
    MoreCapable,
    Unordered,
}

/// Regime of a BEC(β) versus BSC(ε) pair on a uniform bit, using the
/// half-open thresholds `2ε`, `4ε(1-ε)` and `h2(ε)`.
pub fn classify_source_regime(beta: Prob, epsilon: Prob) -> Result<SourceRegime> {
    let (b, e) = (beta.get(), epsilon.get());
    if e > 0.5 {
        return Err(Error::Domain { what: "epsilon", value: e });
    }
    let [t1, t2, t3] = regime_thresholds(epsilon);
    Ok(if b < t1 {
        SourceRegime::Degraded
    } else if b < t2 {
        SourceRegime::LessNoisy
    } else if b < t3 {
        SourceRegime::MoreCapable
    } else {
        SourceRegime::Unordered
    })
}

/// Regime boundaries `[2ε, 4ε(1-ε), h2(ε)]` in β.
pub fn regime_thresholds(epsilon: Prob) -> [f64; 3] {
    let e = epsilon.get();
    [2.0 * e, 4.0 * e * (1.0 - e), h2(epsilon)]
}

fn bec(parent: &str, child: &str, erasure: f64) -> Kernel {
    Kernel::new(
        vec![Axis::new(parent, 2)],
        vec![Axis::new(child, 3)],
        vec![1.0 - erasure, 0.0, erasure, 0.0, 1.0 - erasure, erasure],
    )
    .expect("BEC rows are stochastic")
}

/// `p(a, b, e) = p(a) p(b|a) p(e|a)` for the BEC/BSC sources: `A` uniform,
/// `B` ternary with the erasure as symbol [`ERASURE`], `E` binary.
pub fn becbsc_joint_pmf(model: &BecBscModel) -> FinitePmf {
    FinitePmf::uniform(vec![Axis::new(axis::A, 2)])
        .and_then(|p| p.extend(&bec(axis::A, axis::B, model.beta.get())))
        .and_then(|p| p.extend(&Kernel::bsc(axis::A, axis::E, model.epsilon.get())?))
        .expect("BEC/BSC kernels are stochastic")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info::cond_mutual_info;
    use approx::assert_abs_diff_eq;

    fn regime(beta: f64, eps: f64) -> SourceRegime {
        classify_source_regime(Prob::new(beta).unwrap(), Prob::new(eps).unwrap()).unwrap()
    }

    #[test]
    fn regimes_around_fig_boundaries() {
        assert_eq!(regime(0.05, 0.05), SourceRegime::Degraded);
        assert_eq!(regime(0.15, 0.05), SourceRegime::LessNoisy);
        assert_eq!(regime(0.25, 0.05), SourceRegime::MoreCapable);
        assert_eq!(regime(0.30, 0.05), SourceRegime::Unordered);
        // Half-open intervals: each threshold belongs to the next regime.
        assert_eq!(regime(0.1, 0.05), SourceRegime::LessNoisy);
        // Every interval is empty when ε = 0.
        assert_eq!(regime(0.0, 0.0), SourceRegime::Unordered);
        assert!(classify_source_regime(Prob::new(0.1).unwrap(), Prob::new(0.6).unwrap()).is_err());
    }

    #[test]
    fn noiseless_sources_are_copies() {
        let pmf = becbsc_joint_pmf(&BecBscModel::new(0.0, 0.0, 0.0).unwrap());
        assert_eq!(pmf.get(&[0, 0, 0]), 0.5);
        assert_eq!(pmf.get(&[1, 1, 1]), 0.5);
        assert_abs_diff_eq!(pmf.table().iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn full_erasure() {
        let pmf = becbsc_joint_pmf(&BecBscModel::new(0.0, 1.0, 0.1).unwrap());
        let b = pmf.marginal(&[axis::B]).unwrap();
        assert_eq!(b.table()[ERASURE], 1.0);
    }

    #[test]
    fn bec_capacity_identity() {
        let pmf = becbsc_joint_pmf(&BecBscModel::new(0.0, 0.2, 0.05).unwrap());
        let i = cond_mutual_info(&pmf, &[axis::A], &[axis::B], &[]).unwrap();
        assert_abs_diff_eq!(i, 0.8, epsilon = 1e-12);
    }

    #[test]
    fn parameter_ranges() {
        assert!(BecBscModel::new(0.6, 0.1, 0.1).is_err());
        assert!(BecBscModel::new(0.1, 1.1, 0.1).is_err());
        assert!(BinaryStateModel::new(0.5, 0.1, 0.2, 1.0).is_ok());
        assert!(GaussianStateModel::new(1.0, 1.0, 0.0, 1.0).is_err());
        assert!(GaussianStateModel::new(-1.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn binary_state_channel_is_state_coupled() {
        let sys = BinaryStateModel::new(0.3, 0.1, 0.2, 0.4).unwrap().system();
        assert!(sys.state_coupled());
        assert_eq!(sys.source().axis(axis::E).unwrap().size(), 3);
    }
}
