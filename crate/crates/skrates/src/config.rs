//! JSON experiment configurations for `skrates simulate`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use skrates_core::generic::{
    coupled_joint_aux, state_masking_aux, two_layer_aux, AuxSpecJoint, AuxSpecSeparate, SystemSpec,
};
use skrates_core::models::{BecBscModel, BinaryStateModel};
use skrates_core::sim::{JointSimConfig, SeparateSimConfig, SimReport, DEFAULT_DELTA, DEFAULT_TRIALS_PER_CODEBOOK};

use crate::CliError;

/// The only configuration layout this build understands.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    BinaryState { a: f64, zeta: f64, beta: f64, epsilon: f64 },
    Becbsc { zeta: f64, beta: f64, epsilon: f64 },
}

impl ModelSpec {
    pub fn system(&self) -> Result<SystemSpec, CliError> {
        let sys = match *self {
            ModelSpec::BinaryState { a, zeta, beta, epsilon } => {
                BinaryStateModel::new(a, zeta, beta, epsilon).map(|m| m.system())
            }
            ModelSpec::Becbsc { zeta, beta, epsilon } => BecBscModel::new(zeta, beta, epsilon).map(|m| m.system()),
        };
        sys.map_err(|e| CliError::Config(format!("model: {e}")))
    }
}

/// Named auxiliary families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AuxChoice {
    /// `X = V = V' ⊕ A`, `U` constant (binary state model).
    StateMasking,
    /// `X = V ⊕ A`, `U = V ⊕ V'` with `V' ~ B(v)` (BEC/BSC model).
    CoupledJoint { v: f64 },
    /// `T = X`, `Q = X ⊕ Q'`, `V = A ⊕ V'`, `U = V ⊕ U'` (separate scheme).
    TwoLayer { u: f64, v: f64, q: f64 },
}

fn check_param(what: &str, p: f64) -> Result<f64, CliError> {
    if (0.0..=0.5).contains(&p) {
        Ok(p)
    } else {
        Err(CliError::Config(format!("aux.{what}: {p} is outside [0, 1/2]")))
    }
}

impl AuxChoice {
    fn joint(&self) -> Result<AuxSpecJoint, CliError> {
        match *self {
            AuxChoice::StateMasking => Ok(state_masking_aux()),
            AuxChoice::CoupledJoint { v } => Ok(coupled_joint_aux(check_param("v", v)?)),
            AuxChoice::TwoLayer { .. } => {
                Err(CliError::Config("aux.kind: two_layer is a separate-scheme family".into()))
            }
        }
    }

    fn separate(&self) -> Result<AuxSpecSeparate, CliError> {
        match *self {
            AuxChoice::TwoLayer { u, v, q } => {
                Ok(two_layer_aux(check_param("u", u)?, check_param("v", v)?, check_param("q", q)?))
            }
            _ => Err(CliError::Config("aux.kind: the separate scheme needs two_layer".into())),
        }
    }
}

/// Optional pass/fail thresholds checked after the run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Acceptance {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_agreement: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_decode_error: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_decode_error: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_encode_failure: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_leakage: Option<f64>,
}

/// Outcome of one acceptance predicate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub threshold: f64,
    pub value: f64,
    pub pass: bool,
}

impl Acceptance {
    pub fn evaluate(&self, r: &SimReport) -> Vec<Check> {
        let mut out = Vec::new();
        let mut at_least = |name, t: Option<f64>, v: f64| {
            if let Some(t) = t {
                out.push(Check { name, threshold: t, value: v, pass: v >= t });
            }
        };
        at_least("min_agreement", self.min_agreement, r.agreement_rate);
        at_least("min_decode_error", self.min_decode_error, r.decode_error_rate);
        let mut at_most = |name, t: Option<f64>, v: f64| {
            if let Some(t) = t {
                out.push(Check { name, threshold: t, value: v, pass: v <= t });
            }
        };
        at_most("max_decode_error", self.max_decode_error, r.decode_error_rate);
        at_most("max_encode_failure", self.max_encode_failure, r.encode_failure_rate);
        at_most("max_leakage", self.max_leakage, r.leakage_bits_per_symbol);
        out
    }
}

fn default_delta() -> f64 {
    DEFAULT_DELTA
}

fn default_trials() -> usize {
    500
}

fn default_per_codebook() -> usize {
    DEFAULT_TRIALS_PER_CODEBOOK
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JointRates {
    pub r1: f64,
    pub r2: f64,
    pub rf: f64,
    pub rk: f64,
}

/// `skrates simulate joint` configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JointFile {
    pub schema_version: u32,
    pub model: ModelSpec,
    /// Defaults to `state_masking` for the binary state model and to
    /// `coupled_joint` with `v = 0` for the BEC/BSC model.
    #[serde(default)]
    pub aux: Option<AuxChoice>,
    pub n: usize,
    pub rates: JointRates,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_per_codebook")]
    pub trials_per_codebook: usize,
    #[serde(default)]
    pub acceptance: Acceptance,
}

impl JointFile {
    pub fn aux(&self) -> Result<AuxSpecJoint, CliError> {
        match (&self.aux, &self.model) {
            (Some(a), _) => a.joint(),
            (None, ModelSpec::BinaryState { .. }) => Ok(state_masking_aux()),
            (None, ModelSpec::Becbsc { .. }) => Ok(coupled_joint_aux(0.0)),
        }
    }

    pub fn sim_config(&self) -> JointSimConfig {
        let r = &self.rates;
        JointSimConfig {
            n: self.n,
            r1: r.r1,
            r2: r.r2,
            rf: r.rf,
            rk: r.rk,
            delta: self.delta,
            trials: self.trials,
            seed: self.seed,
            trials_per_codebook: self.trials_per_codebook,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeparateRates {
    pub s1: f64,
    pub s2p: f64,
    pub s2pp: f64,
    pub r1: f64,
    pub r2: f64,
    pub rc: f64,
    pub rp: f64,
    pub rf: f64,
    pub rk: f64,
}

/// `skrates simulate separate` configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeparateFile {
    pub schema_version: u32,
    pub model: ModelSpec,
    pub aux: AuxChoice,
    pub n: usize,
    /// Channel uses; defaults to `n`.
    #[serde(default)]
    pub m: Option<usize>,
    pub rates: SeparateRates,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_per_codebook")]
    pub trials_per_codebook: usize,
    #[serde(default)]
    pub acceptance: Acceptance,
}

impl SeparateFile {
    pub fn aux(&self) -> Result<AuxSpecSeparate, CliError> {
        self.aux.separate()
    }

    pub fn sim_config(&self) -> SeparateSimConfig {
        let r = &self.rates;
        SeparateSimConfig {
            n: self.n,
            m: self.m.unwrap_or(self.n),
            s1: r.s1,
            s2p: r.s2p,
            s2pp: r.s2pp,
            r1: r.r1,
            r2: r.r2,
            rc: r.rc,
            rp: r.rp,
            rf: r.rf,
            rk: r.rk,
            delta: self.delta,
            trials: self.trials,
            seed: self.seed,
            trials_per_codebook: self.trials_per_codebook,
        }
    }
}

/// Parses a configuration, naming the offending field on failure.
pub fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, CliError> {
    // Version first, so an old or future file gets a clear message.
    if let Ok(v) = serde_json::from_str::<serde_json::Value>(text) {
        match v.get("schema_version") {
            None => return Err(CliError::Config("schema_version: missing field".into())),
            Some(sv) if sv.as_u64() != Some(SCHEMA_VERSION as u64) => {
                return Err(CliError::Config(format!(
                    "schema_version: unsupported value {sv} (this build reads {SCHEMA_VERSION})"
                )))
            }
            _ => {}
        }
    }
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        if path == "." {
            CliError::Config(e.inner().to_string())
        } else {
            CliError::Config(format!("{path}: {}", e.inner()))
        }
    })
}

pub fn read<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    const JOINT: &str = r#"{
        "schema_version": 1,
        "model": {"kind": "binary_state", "a": 0.5, "zeta": 0.1, "beta": 0.0, "epsilon": 0.5},
        "n": 10,
        "rates": {"r1": 0.0, "r2": 0.25, "rf": 0.1, "rk": 0.25},
        "delta": 0.35,
        "acceptance": {"min_agreement": 0.95}
    }"#;

    #[test]
    fn parses_with_defaults() {
        let f: JointFile = parse(JOINT).unwrap();
        assert_eq!(f.trials, 500);
        assert_eq!(f.seed, 0);
        assert_eq!(f.acceptance.min_agreement, Some(0.95));
        assert!(f.aux().is_ok());
    }

    #[test]
    fn names_offending_field() {
        let bad = JOINT.replace("\"r2\": 0.25", "\"r2\": \"fast\"");
        let msg = parse::<JointFile>(&bad).unwrap_err().to_string();
        assert!(msg.contains("rates.r2"), "{msg}");
        let bad = JOINT.replace("\"delta\"", "\"delt\"");
        let msg = parse::<JointFile>(&bad).unwrap_err().to_string();
        assert!(msg.contains("delt"), "{msg}");
        let bad = JOINT.replace("\"n\": 10,", "");
        let msg = parse::<JointFile>(&bad).unwrap_err().to_string();
        assert!(msg.contains("`n`"), "{msg}");
        let bad = JOINT.replace("\"schema_version\": 1", "\"schema_version\": 9");
        let msg = parse::<JointFile>(&bad).unwrap_err().to_string();
        assert!(msg.contains("schema_version"), "{msg}");
        let bad = JOINT.replace("\"binary_state\"", "\"ternary\"");
        let msg = parse::<JointFile>(&bad).unwrap_err().to_string();
        assert!(msg.contains("model"), "{msg}");
    }
}
