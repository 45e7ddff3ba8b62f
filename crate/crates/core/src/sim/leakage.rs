//! Key leakage to the eavesdropper: exact enumeration for tiny joint
//! configurations, plug-in estimates otherwise.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use super::joint::{JointCodebook, JointSim};
use super::TrialOutcome;
use crate::{Error, Result};

/// Exact enumeration needs `|E x Z|^n * 2^{key bits} <= 2^22`.
pub const LEAKAGE_BUDGET_LOG2: f64 = 22.0;

/// `I(K; E^n Z^n) / n` for one fixed codebook, summing over every source
/// sequence and every encoder random choice.
pub fn exact_leakage_joint(sim: &JointSim, cb: &JointCodebook) -> Result<f64> {
    let (table, cells) = exact_key_eve_table(sim, cb)?;
    let keys = table.len() / cells;
    Ok(mutual_info(&table, keys, cells) / sim.n() as f64)
}

/// Assembles `p(k, e^n z^n)` as a `keys x cells` row-major table.
pub(crate) fn exact_key_eve_table(sim: &JointSim, cb: &JointCodebook) -> Result<(Vec<f64>, usize)> {
    let n = sim.n();
    let s = sim.sizes;
    let nez = s.e * s.z;
    let log_cells = n as f64 * libm::log2(nez as f64);
    if n > 6 || log_cells + cb.bits.k as f64 > LEAKAGE_BUDGET_LOG2 {
        return Err(Error::LeakageBudget {
            cells: libm::exp2(log_cells + cb.bits.k as f64),
            max: libm::exp2(LEAKAGE_BUDGET_LOG2),
        });
    }
    let cells = nez.pow(n as u32);

    // p(e, z | v, a) = p(e | a) sum_x p(x | v, a) p(z | x, a)
    let mut q = vec![0.0; s.v * s.a * nez];
    for v in 0..s.v {
        for a in 0..s.a {
            let px = &sim.p_x_given_va[v * s.a + a];
            let base = (v * s.a + a) * nez;
            for e in 0..s.e {
                for z in 0..s.z {
                    let mut pz = 0.0;
                    for (x, &p) in px.iter().enumerate() {
                        let row = &sim.channel[x * s.a + a];
                        pz += p * (0..s.y).map(|y| row[y * s.z + z]).sum::<f64>();
                    }
                    q[base + e * s.z + z] = sim.p_e_given_a[a][e] * pz;
                }
            }
        }
    }

    let mut table = vec![0.0; cb.key_bins() * cells];
    let mut cur = Vec::with_capacity(cells);
    let mut next = Vec::with_capacity(cells);
    let mut a = vec![0u8; n];
    loop {
        let pa: f64 = a.iter().map(|&ai| sim.p_a[ai as usize]).product();
        if pa > 0.0 {
            let c1 = sim.coarse_candidates(cb, &a);
            let r1s: Vec<usize> = if c1.is_empty() { (0..cb.n1()).collect() } else { c1 };
            let w1 = pa / (r1s.len() * cb.nf()) as f64;
            for &r1 in &r1s {
                for rf in 0..cb.nf() {
                    let c2 = sim.fine_candidates(cb, &a, r1, rf);
                    let r2s: Vec<usize> = if c2.is_empty() { (0..cb.n2()).collect() } else { c2 };
                    let w = w1 / r2s.len() as f64;
                    for r2 in r2s {
                        let v = cb.v_word(r1, r2, rf);
                        // Kronecker product over symbols, first symbol most significant.
                        cur.clear();
                        cur.push(w);
                        for i in 0..n {
                            let qi = &q[(v[i] as usize * s.a + a[i] as usize) * nez..][..nez];
                            next.clear();
                            for &c in &cur {
                                next.extend(qi.iter().map(|&p| c * p));
                            }
                            core::mem::swap(&mut cur, &mut next);
                        }
                        let k = cb.key(r1, r2, rf) as usize;
                        for (t, &p) in table[k * cells..(k + 1) * cells].iter_mut().zip(&cur) {
                            *t += p;
                        }
                    }
                }
            }
        }
        // Odometer over a^n, last symbol fastest.
        let mut d = n;
        loop {
            if d == 0 {
                return Ok((table, cells));
            }
            d -= 1;
            a[d] += 1;
            if (a[d] as usize) < s.a {
                break;
            }
            a[d] = 0;
        }
    }
}

fn mutual_info(table: &[f64], rows: usize, cols: usize) -> f64 {
    if rows <= 1 {
        return 0.0;
    }
    let pr: Vec<f64> = table.chunks(cols).map(|r| r.iter().sum()).collect();
    let mut pc = vec![0.0; cols];
    for r in table.chunks(cols) {
        for (c, &p) in pc.iter_mut().zip(r) {
            *c += p;
        }
    }
    let mut mi = 0.0;
    for k in 0..rows {
        for j in 0..cols {
            let p = table[k * cols + j];
            if p > 0.0 {
                mi += p * libm::log2(p / (pr[k] * pc[j]));
            }
        }
    }
    mi.max(0.0)
}

/// Empirical `I(K; S)` in bits from `(key, statistic)` samples, and the
/// first-order bias `(|K| - 1)(|S| - 1) / (2 N ln 2)` over observed values.
pub fn plugin_leakage(samples: &[(u64, &[u32])]) -> (f64, f64) {
    if samples.is_empty() {
        return (0.0, 0.0);
    }
    let mut joint: BTreeMap<(u64, &[u32]), usize> = BTreeMap::new();
    let mut pk: BTreeMap<u64, usize> = BTreeMap::new();
    let mut ps: BTreeMap<&[u32], usize> = BTreeMap::new();
    for &(k, s) in samples {
        *joint.entry((k, s)).or_insert(0) += 1;
        *pk.entry(k).or_insert(0) += 1;
        *ps.entry(s).or_insert(0) += 1;
    }
    let n = samples.len() as f64;
    let mut mi = 0.0;
    for (&(k, s), &c) in &joint {
        let c = c as f64;
        mi += c / n * libm::log2(c * n / (pk[&k] as f64 * ps[s] as f64));
    }
    let bias = (pk.len() as f64 - 1.0) * (ps.len() as f64 - 1.0) / (2.0 * n * core::f64::consts::LN_2);
    (mi.max(0.0), bias)
}

/// Plug-in leakage per codebook, averaged with trial-count weights. Returns
/// total bits (not per symbol) and the matching bias term.
pub(crate) fn plugin_by_codebook(outcomes: &[TrialOutcome]) -> (f64, f64) {
    let mut groups: BTreeMap<usize, Vec<(u64, &[u32])>> = BTreeMap::new();
    for o in outcomes {
        groups.entry(o.codebook).or_default().push((o.key, &o.eve[..]));
    }
    let total = outcomes.len() as f64;
    let (mut mi, mut bias) = (0.0, 0.0);
    for g in groups.values() {
        let (m, b) = plugin_leakage(g);
        let w = g.len() as f64 / total;
        mi += w * m;
        bias += w * b;
    }
    (mi, bias)
}
