//! Monte Carlo simulation of the two random-binning key-agreement schemes at
//! small blocklengths.
//!
//! Both schemes draw fresh random codebooks per batch of trials, run the
//! encoder and decoder on i.i.d. source and channel realizations, and report
//! key agreement, encoder and decoder failures, and the key leakage to the
//! eavesdropper.
//!
//! Every random draw comes from a stream keyed by `(seed, purpose, index)`,
//! so reports do not depend on thread scheduling.

mod joint;
mod leakage;
mod separate;
mod typical;

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

pub use joint::{JointCodebook, JointEncoding, JointSim, JointSimConfig};
pub use leakage::{exact_leakage_joint, plugin_leakage, LEAKAGE_BUDGET_LOG2};
pub use separate::{DecodeStage, SeparateCodebook, SeparateEncoding, SeparateSim, SeparateSimConfig};
pub use typical::{TypicalSet, MAX_TYPICAL_ATTEMPTS};

use crate::{Error, Result};

/// Codebook sizes are capped at `2^MAX_CODEBOOK_BITS` words.
pub const MAX_CODEBOOK_BITS: u32 = 20;
/// Default strong-typicality tolerance.
pub const DEFAULT_DELTA: f64 = 0.1;
/// Default number of trials sharing one random codebook.
pub const DEFAULT_TRIALS_PER_CODEBOOK: usize = 50;

/// Index bits for `2^{n R}` codewords, rounded up. A tiny slack keeps exact
/// products such as `10 * 0.3` from rounding to the next integer.
pub fn codeword_bits(n: usize, rate: f64) -> u32 {
    let x = n as f64 * rate - 1e-9;
    if x <= 0.0 {
        0
    } else {
        libm::ceil(x) as u32
    }
}

/// Key bits for `2^{n R_k}` bins, rounded down so every bin is non-empty.
pub fn key_bits(n: usize, rate: f64) -> u32 {
    libm::floor(n as f64 * rate + 1e-9).max(0.0) as u32
}

pub(crate) fn check_rate(what: &'static str, r: f64) -> Result<()> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::Domain { what, value: r });
    }
    Ok(())
}

pub(crate) fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::Domain { what: "delta", value: delta });
    }
    Ok(())
}

/// How the leakage figure was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum LeakageMethod {
    /// Exact `I(K; E^n Z^n) / n` for each codebook, averaged over codebooks.
    Exact,
    /// Empirical mutual information between the key and an eavesdropper
    /// statistic, per codebook, averaged over codebooks.
    Plugin,
}

/// Eavesdropper observation used by the plug-in estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum PluginStatistic {
    /// The full observed sequences.
    Sequence,
    /// Counts of each eavesdropper symbol pair.
    CountVector,
}

/// Aggregate outcome of a simulation run.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SimReport {
    /// Fraction of all trials where Bob decoded Alice's key.
    pub agreement_rate: f64,
    /// Fraction of trials where some encoder search found no typical index.
    pub encode_failure_rate: f64,
    /// Fraction of trials where Bob's key differs from Alice's, including
    /// trials where the decoder found no unique candidate.
    pub decode_error_rate: f64,
    pub leakage_bits_per_symbol: f64,
    pub leakage_method: LeakageMethod,
    /// Set for plug-in estimates.
    pub plugin_statistic: Option<PluginStatistic>,
    /// First-order bias of the plug-in estimate, `(|K|-1)(|S|-1) / (2 N ln 2)`
    /// per symbol with observed alphabet sizes. Not subtracted.
    pub plugin_bias_bits_per_symbol: Option<f64>,
    /// Decoder failures (no unique candidate) by stage, separate scheme only.
    pub decode_errors_by_stage: Option<BTreeMap<DecodeStage, usize>>,
    pub codebooks: usize,
    pub trials_run: usize,
}

/// Result of one trial, shared by both schemes.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct TrialOutcome {
    pub codebook: usize,
    pub key: u64,
    pub decoded: core::result::Result<u64, DecodeStage>,
    pub encode_failure: bool,
    /// Eavesdropper statistic, encoded as a vector of symbols or counts.
    pub eve: Vec<u32>,
}

pub(crate) struct Tally {
    pub agreement_rate: f64,
    pub encode_failure_rate: f64,
    pub decode_error_rate: f64,
    pub by_stage: BTreeMap<DecodeStage, usize>,
}

pub(crate) fn tally(outcomes: &[TrialOutcome]) -> Tally {
    let n = outcomes.len() as f64;
    let mut agree = 0usize;
    let mut enc = 0usize;
    let mut dec = 0usize;
    let mut by_stage = BTreeMap::new();
    for o in outcomes {
        enc += o.encode_failure as usize;
        match o.decoded {
            Ok(k) if k == o.key => agree += 1,
            Ok(_) => dec += 1,
            Err(stage) => {
                dec += 1;
                *by_stage.entry(stage).or_insert(0) += 1;
            }
        }
    }
    Tally {
        agreement_rate: agree as f64 / n,
        encode_failure_rate: enc as f64 / n,
        decode_error_rate: dec as f64 / n,
        by_stage,
    }
}
