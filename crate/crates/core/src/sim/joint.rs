//! Joint source-channel scheme: one superposition codebook `u^n(r1)`,
//! `v^n(r1, r2, rf)` whose fine words are binned into key bins.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::leakage::{exact_leakage_joint, plugin_by_codebook, LEAKAGE_BUDGET_LOG2};
use super::typical::{sample, sample_typical, TypicalSet};
use super::{
    check_delta, check_rate, codeword_bits, key_bits, tally, DecodeStage, LeakageMethod, PluginStatistic, SimReport,
    TrialOutcome, DEFAULT_DELTA, DEFAULT_TRIALS_PER_CODEBOOK, MAX_CODEBOOK_BITS,
};
use crate::generic::{axis, eval_inner_joint_thm3, AuxSpecJoint, InnerEval, SystemSpec};
use crate::info::{cond_mutual_info, FinitePmf};
use crate::rng::{stream, Domain};
use crate::{par, Error, Result};

/// Plug-in leakage uses whole sequences while `|E x Z|^n <= 2^16`.
const PLUGIN_SEQUENCE_MAX_LOG2: f64 = 16.0;

/// Rates and run parameters of the joint scheme. Rates are in bits per
/// symbol; codebook sizes are `2^ceil(n R)` and the key has
/// `floor(n Rk)` bits.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct JointSimConfig {
    pub n: usize,
    pub r1: f64,
    pub r2: f64,
    pub rf: f64,
    pub rk: f64,
    pub delta: f64,
    pub trials: usize,
    pub seed: u64,
    pub trials_per_codebook: usize,
}

impl JointSimConfig {
    pub fn new(n: usize, r1: f64, r2: f64, rf: f64, rk: f64) -> Self {
        JointSimConfig {
            n,
            r1,
            r2,
            rf,
            rk,
            delta: DEFAULT_DELTA,
            trials: 500,
            seed: 0,
            trials_per_codebook: DEFAULT_TRIALS_PER_CODEBOOK,
        }
    }
}

/// Index bit widths of a joint codebook.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct JointBits {
    pub r1: u32,
    pub r2: u32,
    pub rf: u32,
    pub k: u32,
}

/// One random codebook of the joint scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct JointCodebook {
    pub(crate) n: usize,
    pub(crate) bits: JointBits,
    /// `u^n(r1)`, row-major.
    pub(crate) u_words: Vec<u8>,
    /// `v^n(r1, r2, rf)`, row-major over `(r1, r2, rf)`.
    pub(crate) v_words: Vec<u8>,
    /// Key bin of each fine word, same indexing as `v_words`.
    pub(crate) key_of: Vec<u32>,
}

impl JointCodebook {
    pub fn bits(&self) -> JointBits {
        self.bits
    }

    pub fn n1(&self) -> usize {
        1 << self.bits.r1
    }

    pub fn n2(&self) -> usize {
        1 << self.bits.r2
    }

    pub fn nf(&self) -> usize {
        1 << self.bits.rf
    }

    pub fn key_bins(&self) -> usize {
        1 << self.bits.k
    }

    pub(crate) fn word_index(&self, r1: usize, r2: usize, rf: usize) -> usize {
        (r1 * self.n2() + r2) * self.nf() + rf
    }

    pub fn u_word(&self, r1: usize) -> &[u8] {
        &self.u_words[r1 * self.n..(r1 + 1) * self.n]
    }

    pub fn v_word(&self, r1: usize, r2: usize, rf: usize) -> &[u8] {
        let w = self.word_index(r1, r2, rf);
        &self.v_words[w * self.n..(w + 1) * self.n]
    }

    pub fn key(&self, r1: usize, r2: usize, rf: usize) -> u32 {
        self.key_of[self.word_index(r1, r2, rf)]
    }
}

/// Encoder output.
#[derive(Debug, Clone, PartialEq)]
pub struct JointEncoding {
    pub r1: usize,
    pub r2: usize,
    pub rf: usize,
    pub key: u32,
    pub x: Vec<u8>,
    /// Some typicality search came up empty and a uniform index was used.
    pub encode_failure: bool,
}

/// A validated joint-scheme experiment.
#[derive(Debug, Clone)]
pub struct JointSim {
    pub(crate) cfg: JointSimConfig,
    pub(crate) bits: JointBits,
    pub(crate) sizes: Sizes,
    /// `p(a)`.
    pub(crate) p_a: Vec<f64>,
    /// `p(a, b, e)` flattened.
    p_abe: Vec<f64>,
    p_u: Vec<f64>,
    /// `p(v | u)`, one row per `u`.
    p_v_given_u: Vec<Vec<f64>>,
    /// `p(x | v, a)`, one row per `(v, a)`.
    pub(crate) p_x_given_va: Vec<Vec<f64>>,
    /// `p(e | a)`, one row per `a`.
    pub(crate) p_e_given_a: Vec<Vec<f64>>,
    /// `p(y, z | x[, a])`, one row per `(x, a)`.
    pub(crate) channel: Vec<Vec<f64>>,
    t_u: TypicalSet,
    t_uv: TypicalSet,
    pub(crate) t_ua: TypicalSet,
    pub(crate) t_uva: TypicalSet,
    t_uvby: TypicalSet,
    region: InnerEval,
    v_ez_u: f64,
    eps_tilde: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Sizes {
    pub a: usize,
    pub b: usize,
    pub e: usize,
    pub v: usize,
    pub x: usize,
    pub u: usize,
    pub y: usize,
    pub z: usize,
}

pub(crate) fn cond_rows(joint: &FinitePmf, parents: &[&str], children: &[&str]) -> Result<Vec<Vec<f64>>> {
    let mut names = parents.to_vec();
    names.extend_from_slice(children);
    let m = joint.marginal(&names)?;
    let mut width = 1;
    for c in children {
        width *= joint.axis(c)?.size();
    }
    Ok(m.table()
        .chunks(width)
        .map(|row| {
            let total: f64 = row.iter().sum();
            if total > 0.0 {
                row.iter().map(|p| p / total).collect()
            } else {
                row.to_vec()
            }
        })
        .collect())
}

impl JointSim {
    /// Validates the configuration against the system and auxiliaries:
    /// `η = 1`, alphabet caps, codebook size at most `2^20`, equal-size key
    /// bins, and the bin-size relation `R2 + Rf = Rk + I(V;EZ|U) - ε̃` with
    /// `ε̃ >= -1/n` (one bit of rounding).
    pub fn new(cfg: JointSimConfig, sys: &SystemSpec, aux: &AuxSpecJoint) -> Result<Self> {
        let region = eval_inner_joint_thm3(sys, aux)?;
        if cfg.n < 2 {
            return Err(Error::InvalidConfig("n must be at least 2".into()));
        }
        if cfg.trials == 0 || cfg.trials_per_codebook == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        for (what, r) in [("r1", cfg.r1), ("r2", cfg.r2), ("rf", cfg.rf), ("rk", cfg.rk)] {
            check_rate(what, r)?;
        }
        check_delta(cfg.delta)?;
        let n = cfg.n;
        let bits = JointBits {
            r1: codeword_bits(n, cfg.r1),
            r2: codeword_bits(n, cfg.r2),
            rf: codeword_bits(n, cfg.rf),
            k: key_bits(n, cfg.rk),
        };
        let total = bits.r1 + bits.r2 + bits.rf;
        if total > MAX_CODEBOOK_BITS {
            return Err(Error::MemoryBound { bits: total, max: MAX_CODEBOOK_BITS });
        }
        if bits.k > bits.r2 + bits.rf {
            return Err(Error::RateConsistency(alloc::format!(
                "{} key bits exceed the {} index bits of a u-cloud",
                bits.k,
                bits.r2 + bits.rf
            )));
        }

        let joint = sys.source().extend(&aux.p_vx_given_a)?.extend(&aux.p_u_given_v)?.extend(sys.channel())?;
        let (a, b, e, v, x, u, y, z) = (axis::A, axis::B, axis::E, axis::V, axis::X, axis::U, axis::Y, axis::Z);
        let v_ez_u = cond_mutual_info(&joint, &[v], &[e, z], &[u])?;
        let eps_tilde = cfg.rk + v_ez_u - (cfg.r2 + cfg.rf);
        if eps_tilde < -1.0 / n as f64 {
            return Err(Error::RateConsistency(alloc::format!(
                "R2 + Rf = {} exceeds Rk + I(V;EZ|U) = {} by more than rounding",
                cfg.r2 + cfg.rf,
                cfg.rk + v_ez_u
            )));
        }
        let size = |name: &str| joint.axis(name).map(|ax| ax.size());
        let sizes = Sizes {
            a: size(a)?,
            b: size(b)?,
            e: size(e)?,
            v: size(v)?,
            x: size(x)?,
            u: size(u)?,
            y: size(y)?,
            z: size(z)?,
        };
        if [sizes.a, sizes.b, sizes.e, sizes.v, sizes.x, sizes.u, sizes.y, sizes.z].iter().any(|&s| s > 255) {
            return Err(Error::InvalidConfig("alphabets larger than 255 symbols".into()));
        }

        let p_x_given_va = {
            let rows = cond_rows(&joint, &[v, a], &[x])?;
            let fallback = cond_rows(&joint, &[v], &[x])?;
            rows.into_iter()
                .enumerate()
                .map(|(i, row)| {
                    // (v, a) pairs the auxiliary never produces can still occur
                    // after an encoder fallback; use p(x | v) there.
                    if row.iter().sum::<f64>() > 0.0 {
                        row
                    } else if fallback[i / sizes.a].iter().sum::<f64>() > 0.0 {
                        fallback[i / sizes.a].clone()
                    } else {
                        vec![1.0 / sizes.x as f64; sizes.x]
                    }
                })
                .collect()
        };
        let channel = if sys.state_coupled() {
            sys.channel().table().chunks(sizes.y * sizes.z).map(<[f64]>::to_vec).collect()
        } else {
            // Replicate rows over `a` so lookups are uniform.
            let mut rows = Vec::new();
            for xi in 0..sizes.x {
                for _ in 0..sizes.a {
                    rows.push(sys.channel().row(xi).to_vec());
                }
            }
            rows
        };

        Ok(JointSim {
            bits,
            sizes,
            p_a: joint.marginal(&[a])?.table().to_vec(),
            p_abe: sys.source().table().to_vec(),
            p_u: joint.marginal(&[u])?.table().to_vec(),
            p_v_given_u: cond_rows(&joint, &[u], &[v])?,
            p_x_given_va,
            p_e_given_a: cond_rows(&joint, &[a], &[e])?,
            channel,
            t_u: TypicalSet::from_joint(&joint, &[u])?,
            t_uv: TypicalSet::from_joint(&joint, &[u, v])?,
            t_ua: TypicalSet::conditional(&joint, &[u], &[a])?,
            t_uva: TypicalSet::conditional(&joint, &[v], &[u, a])?,
            t_uvby: TypicalSet::from_joint(&joint, &[u, v, b, y])?,
            region,
            v_ez_u,
            eps_tilde,
            cfg,
        })
    }

    pub fn config(&self) -> &JointSimConfig {
        &self.cfg
    }

    pub fn bits(&self) -> JointBits {
        self.bits
    }

    /// Rate and constraint margins of the auxiliaries.
    pub fn region(&self) -> InnerEval {
        self.region
    }

    /// `I(V;EZ|U)`.
    pub fn eve_information(&self) -> f64 {
        self.v_ez_u
    }

    /// `ε̃ = Rk + I(V;EZ|U) - (R2 + Rf)`.
    pub fn eps_tilde(&self) -> f64 {
        self.eps_tilde
    }

    pub fn n(&self) -> usize {
        self.cfg.n
    }

    /// Codebook number `index` of this experiment.
    pub fn build_codebook(&self, index: usize) -> Result<JointCodebook> {
        let mut rng = stream(self.cfg.seed, Domain::Codebook, index as u64);
        self.build_codebook_with(&mut rng)
    }

    fn build_codebook_with(&self, rng: &mut ChaCha8Rng) -> Result<JointCodebook> {
        let n = self.cfg.n;
        let bits = self.bits;
        let (n1, cloud) = (1usize << bits.r1, 1usize << (bits.r2 + bits.rf));
        let delta = self.cfg.delta;
        let mut u_words = Vec::with_capacity(n1 * n);
        for _ in 0..n1 {
            let w = sample_typical(n, |_| &self.p_u[..], |s| self.t_u.contains(&[s], delta), rng, "U")?;
            u_words.extend_from_slice(&w);
        }
        let mut v_words = Vec::with_capacity(n1 * cloud * n);
        let mut key_of = Vec::with_capacity(n1 * cloud);
        let shift = bits.r2 + bits.rf - bits.k;
        let mut perm: Vec<u32> = (0..cloud as u32).collect();
        for r1 in 0..n1 {
            let u = &u_words[r1 * n..(r1 + 1) * n];
            for _ in 0..cloud {
                let w = sample_typical(
                    n,
                    |i| &self.p_v_given_u[u[i] as usize][..],
                    |s| self.t_uv.contains(&[u, s], delta),
                    rng,
                    "V given u",
                )?;
                v_words.extend_from_slice(&w);
            }
            perm.shuffle(rng);
            key_of.extend(perm.iter().map(|&p| p >> shift));
        }
        Ok(JointCodebook { n, bits, u_words, v_words, key_of })
    }

    /// Coarse indices with `u(r1)` conditionally typical given `a`.
    pub(crate) fn coarse_candidates(&self, cb: &JointCodebook, a: &[u8]) -> Vec<usize> {
        (0..cb.n1()).filter(|&r1| self.t_ua.contains(&[cb.u_word(r1), a], self.cfg.delta)).collect()
    }

    /// `r2` with `v(r1, r2, rf)` conditionally typical given `(u(r1), a)`.
    pub(crate) fn fine_candidates(&self, cb: &JointCodebook, a: &[u8], r1: usize, rf: usize) -> Vec<usize> {
        let u = cb.u_word(r1);
        (0..cb.n2()).filter(|&r2| self.t_uva.contains(&[cb.v_word(r1, r2, rf), u, a], self.cfg.delta)).collect()
    }

    /// Encoder: uniform choice among typical indices, uniform over all
    /// indices when there are none. `x^n` is drawn per symbol from
    /// `p(x | v, a)`.
    pub fn encode(&self, cb: &JointCodebook, a: &[u8], rf: usize, rng: &mut impl Rng) -> JointEncoding {
        let mut failure = false;
        let mut pick = |cands: Vec<usize>, all: usize, rng: &mut dyn rand::RngCore| {
            if cands.is_empty() {
                failure = true;
                rng.gen_range(0..all)
            } else {
                cands[rng.gen_range(0..cands.len())]
            }
        };
        let r1 = pick(self.coarse_candidates(cb, a), cb.n1(), rng);
        let r2 = pick(self.fine_candidates(cb, a, r1, rf), cb.n2(), rng);
        let v = cb.v_word(r1, r2, rf);
        let x = v
            .iter()
            .zip(a)
            .map(|(&vi, &ai)| sample(&self.p_x_given_va[vi as usize * self.sizes.a + ai as usize], rng) as u8)
            .collect();
        JointEncoding { r1, r2, rf, key: cb.key(r1, r2, rf), x, encode_failure: failure }
    }

    /// Decoder: the unique `(r1, r2, rf)` with `(u, v, b, y)` typical, and
    /// its key bin.
    pub fn decode(
        &self,
        cb: &JointCodebook,
        b: &[u8],
        y: &[u8],
    ) -> core::result::Result<(usize, usize, usize, u32), DecodeStage> {
        let mut found = None;
        for r1 in 0..cb.n1() {
            let u = cb.u_word(r1);
            for r2 in 0..cb.n2() {
                for rf in 0..cb.nf() {
                    if self.t_uvby.contains(&[u, cb.v_word(r1, r2, rf), b, y], self.cfg.delta) {
                        if found.is_some() {
                            return Err(DecodeStage::Joint);
                        }
                        found = Some((r1, r2, rf));
                    }
                }
            }
        }
        let (r1, r2, rf) = found.ok_or(DecodeStage::Joint)?;
        Ok((r1, r2, rf, cb.key(r1, r2, rf)))
    }

    /// Draws `(a, b, e)` i.i.d. from the source.
    pub(crate) fn sample_source(&self, rng: &mut impl Rng) -> (Vec<u8>, Vec<u8>, Vec<u8>) {
        let n = self.cfg.n;
        let (sb, se) = (self.sizes.b, self.sizes.e);
        let (mut a, mut b, mut e) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
        for _ in 0..n {
            let i = sample(&self.p_abe, rng);
            a.push((i / (sb * se)) as u8);
            b.push((i / se % sb) as u8);
            e.push((i % se) as u8);
        }
        (a, b, e)
    }

    /// Passes `x` through the channel (with state `a`).
    pub(crate) fn sample_channel(&self, x: &[u8], a: &[u8], rng: &mut impl Rng) -> (Vec<u8>, Vec<u8>) {
        let sz = self.sizes.z;
        x.iter()
            .zip(a)
            .map(|(&xi, &ai)| {
                let j = sample(&self.channel[xi as usize * self.sizes.a + ai as usize], rng);
                ((j / sz) as u8, (j % sz) as u8)
            })
            .unzip()
    }

    pub(crate) fn plugin_statistic(&self) -> PluginStatistic {
        let cells = (self.sizes.e * self.sizes.z) as f64;
        if self.cfg.n as f64 * libm::log2(cells) <= PLUGIN_SEQUENCE_MAX_LOG2 {
            PluginStatistic::Sequence
        } else {
            PluginStatistic::CountVector
        }
    }

    pub(crate) fn trial(&self, cb: &JointCodebook, codebook: usize, t: usize, stat: PluginStatistic) -> TrialOutcome {
        let mut rng = stream(self.cfg.seed, Domain::Trial, t as u64);
        let (a, b, e) = self.sample_source(&mut rng);
        let rf = rng.gen_range(0..cb.nf());
        let enc = self.encode(cb, &a, rf, &mut rng);
        let (y, z) = self.sample_channel(&enc.x, &a, &mut rng);
        let decoded = self.decode(cb, &b, &y).map(|(_, _, _, k)| k as u64);
        TrialOutcome {
            codebook,
            key: enc.key as u64,
            decoded,
            encode_failure: enc.encode_failure,
            eve: eve_statistic(&e, &z, self.sizes.z, self.sizes.e * self.sizes.z, stat),
        }
    }

    /// Whether [`exact_leakage_joint`] fits its enumeration budget.
    pub fn exact_leakage_in_budget(&self) -> bool {
        let cells = self.cfg.n as f64 * libm::log2((self.sizes.e * self.sizes.z) as f64);
        self.cfg.n <= 6 && cells + self.bits.k as f64 <= LEAKAGE_BUDGET_LOG2
    }

    /// Runs all trials. Codebook `c` serves trials
    /// `c * trials_per_codebook ..`; leakage is exact when in budget,
    /// otherwise a plug-in estimate.
    pub fn run(&self) -> Result<SimReport> {
        let per = self.cfg.trials_per_codebook;
        let n_cb = self.cfg.trials.div_ceil(per);
        let codebooks: Vec<JointCodebook> =
            par::map_indexed(n_cb, |c| self.build_codebook(c)).into_iter().collect::<Result<_>>()?;
        let stat = self.plugin_statistic();
        let outcomes = par::map_indexed(self.cfg.trials, |t| self.trial(&codebooks[t / per], t / per, t, stat));
        let tally = tally(&outcomes);
        let n = self.cfg.n as f64;
        let (leakage, method, plugin_statistic, bias) = if self.exact_leakage_in_budget() {
            let per_cb = par::map_indexed(n_cb, |c| exact_leakage_joint(self, &codebooks[c]));
            let mut sum = 0.0;
            for l in per_cb {
                sum += l?;
            }
            (sum / n_cb as f64, LeakageMethod::Exact, None, None)
        } else {
            let (leak, bias) = plugin_by_codebook(&outcomes);
            (leak / n, LeakageMethod::Plugin, Some(stat), Some(bias / n))
        };
        Ok(SimReport {
            agreement_rate: tally.agreement_rate,
            encode_failure_rate: tally.encode_failure_rate,
            decode_error_rate: tally.decode_error_rate,
            leakage_bits_per_symbol: leakage.max(0.0),
            leakage_method: method,
            plugin_statistic,
            plugin_bias_bits_per_symbol: bias,
            decode_errors_by_stage: None,
            codebooks: n_cb,
            trials_run: self.cfg.trials,
        })
    }
}

/// Eavesdropper statistic: the pair sequence or its count vector.
pub(crate) fn eve_statistic(e: &[u8], z: &[u8], nz: usize, cells: usize, stat: PluginStatistic) -> Vec<u32> {
    match stat {
        PluginStatistic::Sequence => {
            let mut s: Vec<u32> = e.iter().map(|&ei| ei as u32).collect();
            s.extend(z.iter().map(|&zi| zi as u32 + u16::MAX as u32));
            s
        }
        PluginStatistic::CountVector => {
            if e.len() == z.len() {
                let mut c = vec![0u32; cells];
                for (&ei, &zi) in e.iter().zip(z) {
                    c[ei as usize * nz + zi as usize] += 1;
                }
                c
            } else {
                // Different source and channel lengths: count each side.
                let ne = cells / nz;
                let mut c = vec![0u32; ne + nz];
                for &ei in e {
                    c[ei as usize] += 1;
                }
                for &zi in z {
                    c[ne + zi as usize] += 1;
                }
                c
            }
        }
    }
}
