use crate::generic::GenericArgmax;

/// Auxiliary crossover parameters of the two-layer separate scheme on the
/// BEC/BSC model: `V = A ⊕ V'`, `U = V ⊕ U'`, `Q = X ⊕ Q'` with
/// `V' ~ B(v)`, `U' ~ B(u)`, `Q' ~ B(q)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BecBscAux {
    pub u: f64,
    pub v: f64,
    pub q: f64,
}

/// Which of the two input choices attains the joint-scheme bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum JointBranch {
    /// `X = V ⊕ A`, `U = V ⊕ V'`: source and channel used together.
    Coupled,
    /// `X = V`, `U` constant: wiretap coding on the channel alone.
    ChannelOnly,
}

/// Maximizing parameters of a Gaussian state-channel bound.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GaussianAux {
    /// Correlation coefficient between `X` and the state.
    pub rho: f64,
    /// Offset between the state weights in `V` and `X`.
    pub gamma: f64,
    /// Whether the fine layer carries the key (`μ̄ = 1`) or not.
    pub mu_bar: bool,
    pub delta1: f64,
    pub delta2: f64,
    pub quad_a: f64,
    pub quad_b: f64,
    pub quad_c: f64,
    /// Set when `P = 0` left the correlation undefined and it was taken as 0.
    pub rho_undefined: bool,
}

/// What attained a bound.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum Argmax {
    /// Closed form with no free parameter.
    None,
    /// Single crossover parameter `v`.
    V(f64),
    BecBsc(BecBscAux),
    Joint {
        branch: JointBranch,
        v: f64,
    },
    Gaussian(GaussianAux),
    Generic(GenericArgmax),
}

/// A bound on the secret-key rate in bits per source symbol.
///
/// `rk` is floored at zero. When the search space is empty, `feasible` is
/// false and `rk` is zero.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct BoundResult {
    pub rk: f64,
    pub argmax: Argmax,
    pub feasible: bool,
    /// Margin of the binding rate constraint at the argmax (non-negative when
    /// feasible).
    pub slack: f64,
    /// Margin of a second constraint, where the bound has one.
    pub secondary_slack: Option<f64>,
    /// False when the value is a best-found search result rather than an
    /// exact optimum.
    pub certified: bool,
}

impl BoundResult {
    pub(crate) fn closed_form(value: f64, argmax: Argmax, slack: f64) -> Self {
        BoundResult { rk: value.max(0.0), argmax, feasible: true, slack, secondary_slack: None, certified: true }
    }

    pub(crate) fn searched(value: f64, argmax: Argmax, slack: f64) -> Self {
        BoundResult { certified: false, ..BoundResult::closed_form(value, argmax, slack) }
    }

    pub(crate) fn infeasible(argmax: Argmax) -> Self {
        BoundResult {
            rk: 0.0,
            argmax,
            feasible: false,
            slack: f64::NEG_INFINITY,
            secondary_slack: None,
            certified: false,
        }
    }
}
