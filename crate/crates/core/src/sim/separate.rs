//! Separate source/channel scheme: a two-layer binned source codebook
//! `u^n(s1)`, `v^n(s1, s2', s2'')` carried over a superposition channel code
//! `q^m(rc)`, `t^m(rc, rp, rf)`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use super::joint::{cond_rows, eve_statistic};
use super::leakage::plugin_by_codebook;
use super::typical::{sample, sample_typical, TypicalSet};
use super::{
    check_delta, check_rate, codeword_bits, key_bits, tally, LeakageMethod, PluginStatistic, SimReport, TrialOutcome,
    DEFAULT_DELTA, DEFAULT_TRIALS_PER_CODEBOOK, MAX_CODEBOOK_BITS,
};
use crate::generic::{axis, eval_inner_sep_thm2, AuxSpecSeparate, InnerEval, SystemSpec};
use crate::rng::{stream, Domain};
use crate::{par, Error, Result};

const PLUGIN_SEQUENCE_MAX_LOG2: f64 = 16.0;

/// Decoder stage that failed to find a unique candidate. `Joint` is the
/// single stage of the joint scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum DecodeStage {
    Joint,
    /// `(rc, rp, rf)` from `(q, t, y)`.
    Channel,
    /// `s1` inside bin `B1(r1)` from `(u, b)`.
    Coarse,
    /// `(s2', s2'')` inside bin `B2(s1, r2)` from `(u, v, b)`.
    Fine,
}

/// Rates and run parameters of the separate scheme. All rates are per
/// source symbol; the channel block has `m = k n` uses.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SeparateSimConfig {
    pub n: usize,
    pub m: usize,
    pub s1: f64,
    pub s2p: f64,
    pub s2pp: f64,
    pub r1: f64,
    pub r2: f64,
    pub rc: f64,
    pub rp: f64,
    pub rf: f64,
    pub rk: f64,
    pub delta: f64,
    pub trials: usize,
    pub seed: u64,
    pub trials_per_codebook: usize,
}

impl SeparateSimConfig {
    /// All nine rates set to `rate`, `m = n`.
    pub fn uniform(n: usize, rate: f64) -> Self {
        SeparateSimConfig {
            n,
            m: n,
            s1: rate,
            s2p: rate,
            s2pp: rate,
            r1: rate,
            r2: rate,
            rc: rate,
            rp: rate,
            rf: rate,
            rk: rate,
            delta: DEFAULT_DELTA,
            trials: 500,
            seed: 0,
            trials_per_codebook: DEFAULT_TRIALS_PER_CODEBOOK,
        }
    }
}

/// Index bit widths of a separate codebook.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SeparateBits {
    pub s1: u32,
    pub s2p: u32,
    pub s2pp: u32,
    pub r1: u32,
    pub r2: u32,
    pub rc: u32,
    /// `r1 + r2 - rc`, so `M` is a bijection.
    pub rp: u32,
    pub rf: u32,
    pub k: u32,
}

impl SeparateBits {
    fn s2(&self) -> u32 {
        self.s2p + self.s2pp
    }

    /// `(rc, rp) = M(r1, r2)`: concatenate, then split after `rc` bits.
    pub fn map(&self, r1: usize, r2: usize) -> (usize, usize) {
        let c = (r1 << self.r2) | r2;
        (c >> self.rp, c & ((1 << self.rp) - 1))
    }

    pub fn unmap(&self, rc: usize, rp: usize) -> (usize, usize) {
        let c = (rc << self.rp) | rp;
        (c >> self.r2, c & ((1 << self.r2) - 1))
    }

    /// `r1 = M'(rc)`.
    pub fn coarse_of(&self, rc: usize) -> usize {
        rc >> (self.rc - self.r1)
    }
}

/// One random codebook of the separate scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparateCodebook {
    n: usize,
    m: usize,
    bits: SeparateBits,
    u_words: Vec<u8>,
    /// `v^n(s1, s2', s2'')`, row-major.
    v_words: Vec<u8>,
    /// `B1` bin of each `s1`.
    bin1: Vec<u32>,
    /// `B2` bin of each `(s1, s2', s2'')`.
    bin2: Vec<u32>,
    key_of: Vec<u32>,
    q_words: Vec<u8>,
    /// `t^m(rc, rp, rf)`, row-major.
    t_words: Vec<u8>,
}

impl SeparateCodebook {
    pub fn bits(&self) -> SeparateBits {
        self.bits
    }

    fn s2_index(&self, s1: usize, s2p: usize, s2pp: usize) -> usize {
        (s1 << self.bits.s2()) | (s2p << self.bits.s2pp) | s2pp
    }

    fn t_index(&self, rc: usize, rp: usize, rf: usize) -> usize {
        (((rc << self.bits.rp) | rp) << self.bits.rf) | rf
    }

    pub fn u_word(&self, s1: usize) -> &[u8] {
        &self.u_words[s1 * self.n..(s1 + 1) * self.n]
    }

    pub fn v_word(&self, s1: usize, s2p: usize, s2pp: usize) -> &[u8] {
        let w = self.s2_index(s1, s2p, s2pp);
        &self.v_words[w * self.n..(w + 1) * self.n]
    }

    pub fn q_word(&self, rc: usize) -> &[u8] {
        &self.q_words[rc * self.m..(rc + 1) * self.m]
    }

    pub fn t_word(&self, rc: usize, rp: usize, rf: usize) -> &[u8] {
        let w = self.t_index(rc, rp, rf);
        &self.t_words[w * self.m..(w + 1) * self.m]
    }

    pub fn bin1(&self, s1: usize) -> u32 {
        self.bin1[s1]
    }

    pub fn bin2(&self, s1: usize, s2p: usize, s2pp: usize) -> u32 {
        self.bin2[self.s2_index(s1, s2p, s2pp)]
    }

    pub fn key(&self, s1: usize, s2p: usize, s2pp: usize) -> u32 {
        self.key_of[self.s2_index(s1, s2p, s2pp)]
    }
}

/// Encoder output.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparateEncoding {
    pub s1: usize,
    pub s2p: usize,
    pub s2pp: usize,
    pub r1: usize,
    pub r2: usize,
    pub rc: usize,
    pub rp: usize,
    pub rf: usize,
    pub key: u32,
    pub x: Vec<u8>,
    pub encode_failure: bool,
}

/// A validated separate-scheme experiment.
#[derive(Debug, Clone)]
pub struct SeparateSim {
    cfg: SeparateSimConfig,
    bits: SeparateBits,
    sizes_b: usize,
    sizes_e: usize,
    sizes_z: usize,
    p_abe: Vec<f64>,
    p_u: Vec<f64>,
    p_v_given_u: Vec<Vec<f64>>,
    p_q: Vec<f64>,
    p_t_given_q: Vec<Vec<f64>>,
    p_x_given_t: Vec<Vec<f64>>,
    channel: Vec<Vec<f64>>,
    t_u: TypicalSet,
    t_uv: TypicalSet,
    t_ua: TypicalSet,
    t_uva: TypicalSet,
    t_ub: TypicalSet,
    t_uvb: TypicalSet,
    t_q: TypicalSet,
    t_qt: TypicalSet,
    t_qty: TypicalSet,
    region: InnerEval,
}

fn layer(what: &str, bits: u32, total: u32) -> Result<()> {
    if bits > total {
        return Err(Error::RateConsistency(alloc::format!("{what}: {bits} bits exceed {total}")));
    }
    Ok(())
}

impl SeparateSim {
    /// Validates rates and the index map conditions `R1 + R2 = Rc + Rp` and
    /// `R1 <= Rc` (after rounding to bits), plus `R1 <= S1`,
    /// `R2 <= S2' + S2''` and `Rk <= S1 + S2' + S2''`.
    pub fn new(cfg: SeparateSimConfig, sys: &SystemSpec, aux: &AuxSpecSeparate) -> Result<Self> {
        if sys.state_coupled() {
            return Err(Error::StateCoupled("separate scheme needs a state-free channel"));
        }
        let region = eval_inner_sep_thm2(sys, aux)?;
        if cfg.n < 2 {
            return Err(Error::InvalidConfig("n must be at least 2".into()));
        }
        if cfg.m < cfg.n || cfg.m % cfg.n != 0 {
            return Err(Error::InvalidConfig("m must be a positive multiple of n".into()));
        }
        if cfg.trials == 0 || cfg.trials_per_codebook == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        let rates = [
            ("s1", cfg.s1),
            ("s2p", cfg.s2p),
            ("s2pp", cfg.s2pp),
            ("r1", cfg.r1),
            ("r2", cfg.r2),
            ("rc", cfg.rc),
            ("rp", cfg.rp),
            ("rf", cfg.rf),
            ("rk", cfg.rk),
        ];
        for (what, r) in rates {
            check_rate(what, r)?;
        }
        check_delta(cfg.delta)?;
        if (cfg.r1 + cfg.r2 - cfg.rc - cfg.rp).abs() > 1e-9 {
            return Err(Error::RateConsistency(alloc::format!(
                "R1 + R2 = {} but Rc + Rp = {}",
                cfg.r1 + cfg.r2,
                cfg.rc + cfg.rp
            )));
        }
        let n = cfg.n;
        let (r1, r2, rc) = (codeword_bits(n, cfg.r1), codeword_bits(n, cfg.r2), codeword_bits(n, cfg.rc));
        if r1 > rc {
            return Err(Error::RateConsistency(alloc::format!("R1 ({r1} bits) exceeds Rc ({rc} bits)")));
        }
        layer("Rc", rc, r1 + r2)?;
        let bits = SeparateBits {
            s1: codeword_bits(n, cfg.s1),
            s2p: codeword_bits(n, cfg.s2p),
            s2pp: codeword_bits(n, cfg.s2pp),
            r1,
            r2,
            rc,
            rp: r1 + r2 - rc,
            rf: codeword_bits(n, cfg.rf),
            k: key_bits(n, cfg.rk),
        };
        layer("R1", bits.r1, bits.s1)?;
        layer("R2", bits.r2, bits.s2())?;
        layer("Rk", bits.k, bits.s1 + bits.s2())?;
        for total in [bits.s1 + bits.s2(), bits.rc + bits.rp + bits.rf] {
            if total > MAX_CODEBOOK_BITS {
                return Err(Error::MemoryBound { bits: total, max: MAX_CODEBOOK_BITS });
            }
        }

        let src = sys.source().extend(&aux.p_v_given_a)?.extend(&aux.p_u_given_v)?;
        let ch = aux.p_tx.extend(&aux.p_q_given_t)?.extend(sys.channel())?;
        let (a, b, e, u, v) = (axis::A, axis::B, axis::E, axis::U, axis::V);
        let (q, t, x, y, z) = (axis::Q, axis::T, axis::X, axis::Y, axis::Z);
        let size = |p: &crate::info::FinitePmf, name: &str| p.axis(name).map(|ax| ax.size());
        let all = [
            size(&src, a)?,
            size(&src, b)?,
            size(&src, e)?,
            size(&src, u)?,
            size(&src, v)?,
            size(&ch, q)?,
            size(&ch, t)?,
            size(&ch, x)?,
            size(&ch, y)?,
            size(&ch, z)?,
        ];
        if all.iter().any(|&s| s > 255) {
            return Err(Error::InvalidConfig("alphabets larger than 255 symbols".into()));
        }
        let nx = size(&ch, x)?;
        let p_x_given_t = cond_rows(&ch, &[t], &[x])?
            .into_iter()
            .map(|row| if row.iter().sum::<f64>() > 0.0 { row } else { alloc::vec![1.0 / nx as f64; nx] })
            .collect();

        Ok(SeparateSim {
            bits,
            sizes_b: size(&src, b)?,
            sizes_e: size(&src, e)?,
            sizes_z: size(&ch, z)?,
            p_abe: sys.source().table().to_vec(),
            p_u: src.marginal(&[u])?.table().to_vec(),
            p_v_given_u: cond_rows(&src, &[u], &[v])?,
            p_q: ch.marginal(&[q])?.table().to_vec(),
            p_t_given_q: cond_rows(&ch, &[q], &[t])?,
            p_x_given_t,
            channel: sys.channel().table().chunks(size(&ch, y)? * size(&ch, z)?).map(<[f64]>::to_vec).collect(),
            t_u: TypicalSet::from_joint(&src, &[u])?,
            t_uv: TypicalSet::from_joint(&src, &[u, v])?,
            t_ua: TypicalSet::conditional(&src, &[u], &[a])?,
            t_uva: TypicalSet::conditional(&src, &[v], &[u, a])?,
            t_ub: TypicalSet::from_joint(&src, &[u, b])?,
            t_uvb: TypicalSet::from_joint(&src, &[u, v, b])?,
            t_q: TypicalSet::from_joint(&ch, &[q])?,
            t_qt: TypicalSet::from_joint(&ch, &[q, t])?,
            t_qty: TypicalSet::from_joint(&ch, &[q, t, y])?,
            region,
            cfg,
        })
    }

    pub fn config(&self) -> &SeparateSimConfig {
        &self.cfg
    }

    pub fn bits(&self) -> SeparateBits {
        self.bits
    }

    /// Rate and constraint margins of the auxiliaries.
    pub fn region(&self) -> InnerEval {
        self.region
    }

    pub fn build_codebook(&self, index: usize) -> Result<SeparateCodebook> {
        let rng = &mut stream(self.cfg.seed, Domain::Codebook, index as u64);
        let (n, m, bits, delta) = (self.cfg.n, self.cfg.m, self.bits, self.cfg.delta);
        let n_s1 = 1usize << bits.s1;
        let n_s2 = 1usize << bits.s2();

        let mut u_words = Vec::with_capacity(n_s1 * n);
        for _ in 0..n_s1 {
            let w = sample_typical(n, |_| &self.p_u[..], |s| self.t_u.contains(&[s], delta), rng, "U")?;
            u_words.extend_from_slice(&w);
        }
        let mut v_words = Vec::with_capacity(n_s1 * n_s2 * n);
        for s1 in 0..n_s1 {
            let u = &u_words[s1 * n..(s1 + 1) * n];
            for _ in 0..n_s2 {
                let w = sample_typical(
                    n,
                    |i| &self.p_v_given_u[u[i] as usize][..],
                    |s| self.t_uv.contains(&[u, s], delta),
                    rng,
                    "V given u",
                )?;
                v_words.extend_from_slice(&w);
            }
        }
        let mut bins = |size: usize, bin_bits: u32, total_bits: u32| -> Vec<u32> {
            let mut perm: Vec<u32> = (0..size as u32).collect();
            perm.shuffle(rng);
            perm.iter().map(|&p| p >> (total_bits - bin_bits)).collect()
        };
        let bin1 = bins(n_s1, bits.r1, bits.s1);
        let mut bin2 = Vec::with_capacity(n_s1 * n_s2);
        for _ in 0..n_s1 {
            bin2.extend(bins(n_s2, bits.r2, bits.s2()));
        }
        let key_of = bins(n_s1 * n_s2, bits.k, bits.s1 + bits.s2());

        let n_rc = 1usize << bits.rc;
        let n_t = 1usize << (bits.rp + bits.rf);
        let mut q_words = Vec::with_capacity(n_rc * m);
        for _ in 0..n_rc {
            let w = sample_typical(m, |_| &self.p_q[..], |s| self.t_q.contains(&[s], delta), rng, "Q")?;
            q_words.extend_from_slice(&w);
        }
        let mut t_words = Vec::with_capacity(n_rc * n_t * m);
        for rc in 0..n_rc {
            let q = &q_words[rc * m..(rc + 1) * m];
            for _ in 0..n_t {
                let w = sample_typical(
                    m,
                    |i| &self.p_t_given_q[q[i] as usize][..],
                    |s| self.t_qt.contains(&[q, s], delta),
                    rng,
                    "T given q",
                )?;
                t_words.extend_from_slice(&w);
            }
        }
        Ok(SeparateCodebook { n, m, bits, u_words, v_words, bin1, bin2, key_of, q_words, t_words })
    }

    /// Smallest typical `s1`, then smallest typical `s2''`; index 0 with the
    /// failure flag when a search is empty.
    pub fn encode(
        &self,
        cb: &SeparateCodebook,
        a: &[u8],
        s2p: usize,
        rf: usize,
        rng: &mut impl Rng,
    ) -> SeparateEncoding {
        let delta = self.cfg.delta;
        let bits = self.bits;
        let mut failure = false;
        let s1 = (0..1usize << bits.s1).find(|&s1| self.t_ua.contains(&[cb.u_word(s1), a], delta));
        let s1 = s1.unwrap_or_else(|| {
            failure = true;
            0
        });
        let u = cb.u_word(s1);
        let s2pp = (0..1usize << bits.s2pp).find(|&j| self.t_uva.contains(&[cb.v_word(s1, s2p, j), u, a], delta));
        let s2pp = s2pp.unwrap_or_else(|| {
            failure = true;
            0
        });
        let (r1, r2) = (cb.bin1(s1) as usize, cb.bin2(s1, s2p, s2pp) as usize);
        let (rc, rp) = bits.map(r1, r2);
        let x = cb.t_word(rc, rp, rf).iter().map(|&t| sample(&self.p_x_given_t[t as usize], rng) as u8).collect();
        SeparateEncoding { s1, s2p, s2pp, r1, r2, rc, rp, rf, key: cb.key(s1, s2p, s2pp), x, encode_failure: failure }
    }

    /// Channel indices from `(q, t, y)`, then `s1` in `B1(r1)` from `(u, b)`,
    /// then `(s2', s2'')` in `B2(s1, r2)` from `(u, v, b)`. Returns the
    /// source indices and the key.
    pub fn decode(
        &self,
        cb: &SeparateCodebook,
        b: &[u8],
        y: &[u8],
    ) -> core::result::Result<(usize, usize, usize, u32), DecodeStage> {
        let delta = self.cfg.delta;
        let bits = self.bits;
        let mut chan = None;
        for rc in 0..1usize << bits.rc {
            let q = cb.q_word(rc);
            for rp in 0..1usize << bits.rp {
                for rf in 0..1usize << bits.rf {
                    if self.t_qty.contains(&[q, cb.t_word(rc, rp, rf), y], delta) {
                        if chan.is_some() {
                            return Err(DecodeStage::Channel);
                        }
                        chan = Some((rc, rp));
                    }
                }
            }
        }
        let (rc, rp) = chan.ok_or(DecodeStage::Channel)?;
        let (r1, r2) = bits.unmap(rc, rp);
        debug_assert_eq!(bits.coarse_of(rc), r1);

        let mut s1_hat = None;
        for s1 in (0..1usize << bits.s1).filter(|&s| cb.bin1(s) as usize == r1) {
            if self.t_ub.contains(&[cb.u_word(s1), b], delta) {
                if s1_hat.is_some() {
                    return Err(DecodeStage::Coarse);
                }
                s1_hat = Some(s1);
            }
        }
        let s1 = s1_hat.ok_or(DecodeStage::Coarse)?;
        let u = cb.u_word(s1);

        let mut fine = None;
        for s2p in 0..1usize << bits.s2p {
            for s2pp in 0..1usize << bits.s2pp {
                if cb.bin2(s1, s2p, s2pp) as usize == r2
                    && self.t_uvb.contains(&[u, cb.v_word(s1, s2p, s2pp), b], delta)
                {
                    if fine.is_some() {
                        return Err(DecodeStage::Fine);
                    }
                    fine = Some((s2p, s2pp));
                }
            }
        }
        let (s2p, s2pp) = fine.ok_or(DecodeStage::Fine)?;
        Ok((s1, s2p, s2pp, cb.key(s1, s2p, s2pp)))
    }

    fn plugin_statistic(&self) -> PluginStatistic {
        let log2 = |k: usize| libm::log2(k as f64);
        let seq = self.cfg.n as f64 * log2(self.sizes_e) + self.cfg.m as f64 * log2(self.sizes_z);
        if seq <= PLUGIN_SEQUENCE_MAX_LOG2 {
            PluginStatistic::Sequence
        } else {
            PluginStatistic::CountVector
        }
    }

    fn trial(&self, cb: &SeparateCodebook, codebook: usize, t: usize, stat: PluginStatistic) -> TrialOutcome {
        let rng = &mut stream(self.cfg.seed, Domain::Trial, t as u64);
        let (n, se, sb) = (self.cfg.n, self.sizes_e, self.sizes_b);
        let (mut a, mut b, mut e) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
        for _ in 0..n {
            let i = sample(&self.p_abe, rng);
            a.push((i / (sb * se)) as u8);
            b.push((i / se % sb) as u8);
            e.push((i % se) as u8);
        }
        let s2p = rng.gen_range(0..1usize << self.bits.s2p);
        let rf = rng.gen_range(0..1usize << self.bits.rf);
        let enc = self.encode(cb, &a, s2p, rf, rng);
        let sz = self.sizes_z;
        let (y, z): (Vec<u8>, Vec<u8>) = enc
            .x
            .iter()
            .map(|&xi| {
                let j = sample(&self.channel[xi as usize], rng);
                ((j / sz) as u8, (j % sz) as u8)
            })
            .unzip();
        let decoded = self.decode(cb, &b, &y).map(|(_, _, _, k)| k as u64);
        let cells = if self.cfg.n == self.cfg.m { se * sz } else { se * sz.max(1) };
        TrialOutcome {
            codebook,
            key: enc.key as u64,
            decoded,
            encode_failure: enc.encode_failure,
            eve: eve_statistic(&e, &z, sz, cells, stat),
        }
    }

    /// Runs all trials; leakage is a plug-in estimate.
    pub fn run(&self) -> Result<SimReport> {
        let per = self.cfg.trials_per_codebook;
        let n_cb = self.cfg.trials.div_ceil(per);
        let codebooks: Vec<SeparateCodebook> =
            par::map_indexed(n_cb, |c| self.build_codebook(c)).into_iter().collect::<Result<_>>()?;
        let stat = self.plugin_statistic();
        let outcomes = par::map_indexed(self.cfg.trials, |t| self.trial(&codebooks[t / per], t / per, t, stat));
        let tally = tally(&outcomes);
        let (leak, bias) = plugin_by_codebook(&outcomes);
        let n = self.cfg.n as f64;
        let mut by_stage = BTreeMap::new();
        for s in [DecodeStage::Channel, DecodeStage::Coarse, DecodeStage::Fine] {
            by_stage.insert(s, tally.by_stage.get(&s).copied().unwrap_or(0));
        }
        Ok(SimReport {
            agreement_rate: tally.agreement_rate,
            encode_failure_rate: tally.encode_failure_rate,
            decode_error_rate: tally.decode_error_rate,
            leakage_bits_per_symbol: leak / n,
            leakage_method: LeakageMethod::Plugin,
            plugin_statistic: Some(stat),
            plugin_bias_bits_per_symbol: Some(bias / n),
            decode_errors_by_stage: Some(by_stage),
            codebooks: n_cb,
            trials_run: self.cfg.trials,
        })
    }
}
