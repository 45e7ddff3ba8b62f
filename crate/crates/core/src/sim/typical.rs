//! Strong typicality and per-symbol sampling.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::info::FinitePmf;
use crate::{Error, Result};

/// Reference law for a tuple of sequences, optionally conditioned on some
/// observed sequences.
///
/// A tuple is typical when every cell count `N(f, g)` is within `n delta` of
/// `N(g) p(f | g)` and cells of conditional probability zero are never
/// visited. Without conditioning axes this is plain strong typicality.
#[derive(Debug, Clone, PartialEq)]
pub struct TypicalSet {
    sizes: Vec<usize>,
    /// `p(f | g)` over `(free..., given...)`, given axes fastest.
    probs: Vec<f64>,
    given_len: usize,
}

impl TypicalSet {
    /// Typicality with respect to the marginal of `joint` on `axes`, in that
    /// order.
    pub fn from_joint(joint: &FinitePmf, axes: &[&str]) -> Result<Self> {
        Self::conditional(joint, axes, &[])
    }

    /// Conditional typicality of the `free` sequences given the `given`
    /// ones. [`contains`](Self::contains) takes the free sequences first.
    pub fn conditional(joint: &FinitePmf, free: &[&str], given: &[&str]) -> Result<Self> {
        let mut names = free.to_vec();
        names.extend_from_slice(given);
        let m = joint.marginal(&names)?;
        let given_len: usize = m.sizes()[free.len()..].iter().product();
        let mut pg = vec![0.0; given_len];
        for (i, &p) in m.table().iter().enumerate() {
            pg[i % given_len] += p;
        }
        let probs = m
            .table()
            .iter()
            .enumerate()
            .map(|(i, &p)| if pg[i % given_len] > 0.0 { p / pg[i % given_len] } else { 0.0 })
            .collect();
        Ok(TypicalSet { sizes: m.sizes(), probs, given_len })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// `seqs[j][i]` is symbol `i` of the sequence on axis `j`. All sequences
    /// share one length.
    pub fn contains(&self, seqs: &[&[u8]], delta: f64) -> bool {
        debug_assert_eq!(seqs.len(), self.sizes.len());
        let n = seqs[0].len();
        let mut counts = vec![0u32; self.probs.len()];
        for i in 0..n {
            let mut cell = 0usize;
            for (s, &size) in seqs.iter().zip(&self.sizes) {
                cell = cell * size + s[i] as usize;
            }
            if self.probs[cell] == 0.0 {
                return false;
            }
            counts[cell] += 1;
        }
        let mut given = vec![0u32; self.given_len];
        for (i, &c) in counts.iter().enumerate() {
            given[i % self.given_len] += c;
        }
        let n = n as f64;
        counts
            .iter()
            .zip(&self.probs)
            .enumerate()
            .all(|(i, (&c, &p))| (c as f64 - given[i % self.given_len] as f64 * p).abs() <= delta * n)
    }
}

/// Draws an index from unnormalized non-negative weights.
pub(crate) fn sample(weights: &[f64], rng: &mut impl Rng) -> usize {
    let total: f64 = weights.iter().sum();
    let mut x = rng.gen::<f64>() * total;
    let mut last = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            if x < w {
                return i;
            }
            x -= w;
            last = i;
        }
    }
    // Rounding left a sliver past the final positive weight.
    last
}

/// Maximum number of i.i.d. draws when sampling from a typical set.
pub const MAX_TYPICAL_ATTEMPTS: usize = 100_000;

/// Draws `x^n` i.i.d. from `row(i)` and keeps the first draw that passes
/// `accept`. Used for codewords "picked at random from the typical set".
pub(crate) fn sample_typical<'a>(
    n: usize,
    row: impl Fn(usize) -> &'a [f64],
    accept: impl Fn(&[u8]) -> bool,
    rng: &mut impl Rng,
    what: &'static str,
) -> Result<Vec<u8>> {
    let mut seq = vec![0u8; n];
    for _ in 0..MAX_TYPICAL_ATTEMPTS {
        for (i, s) in seq.iter_mut().enumerate() {
            *s = sample(row(i), rng) as u8;
        }
        if accept(&seq) {
            return Ok(seq);
        }
    }
    Err(Error::EmptyTypicalSet(what))
}
