//! Code evaluation and exhaustive code search.
//!
//! The value of a parity-check code for private queries is the distribution
//! it induces on the per-block error probability `e_k`: a code should give
//! the user a small, controlled probability of `e_k <= t_u` (bits learned)
//! while keeping the probability of `e_k <= t_d` (partial information) low.
//!
//! Because per-bit tag and error processes are independent across positions,
//! `e_k` depends on a block outcome only through the tag pattern and the
//! effective syndrome, so the exact distribution is computable by enumerating
//! `2^k` tag patterns × `2^r` syndromes. The same independence makes codes
//! that differ by a column permutation equivalent, which cuts the exhaustive
//! search from all RREF matrices to one representative per column multiset.

use crate::decode::{TagRates, Thresholds};
use crate::parity::ParityCheckMatrix;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashMap;
use thiserror::Error;

/// Enumeration bound for the exact distribution (2^k × 2^r table).
pub const MAX_EXACT_K: usize = 12;
/// Search bound for exhaustive code enumeration.
pub const MAX_SEARCH_K: usize = 10;

#[derive(Debug, Error, PartialEq)]
pub enum DesignError {
    #[error("block length {0} exceeds the exact-enumeration bound {MAX_EXACT_K}")]
    BlockTooLong(usize),
    #[error("code search requires 1 <= r < k <= {MAX_SEARCH_K}, got r={r}, k={k}")]
    BadSearchShape { r: usize, k: usize },
    #[error("no candidate code reaches the target range of known bits")]
    NoCandidateInRange,
}

/// How block outcomes are generated when computing the exact distribution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SyndromeModel {
    /// Honest database: the announced syndrome differs from the user's local
    /// one by the syndrome of the true error pattern.
    Correlated,
    /// A database whose records are uncorrelated with the user's bits: the
    /// effective syndrome is uniform on `2^r` values, independent of tags.
    UniformRandom,
}

/// Generative model for block outcomes plus the rates the decoder assumes.
/// Keeping the two rate sets separate covers mismatched-estimate scenarios
/// (the decoder believes different rates than the channel applies).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlockProcess {
    /// Per-bit probability of a conclusive tag.
    pub p_c: f64,
    /// Rates that generate the actual errors.
    pub true_rates: TagRates,
    /// Rates the decoder weights candidates with.
    pub decode_rates: TagRates,
    pub syndrome_model: SyndromeModel,
}

impl BlockProcess {
    /// Honest operation: decoder rates match the channel, syndromes honest.
    pub fn honest(p_c: f64, rates: TagRates) -> Self {
        Self {
            p_c,
            true_rates: rates,
            decode_rates: rates,
            syndrome_model: SyndromeModel::Correlated,
        }
    }
}

/// Exact distribution of `e_k` for one code under one block process.
#[derive(Clone, Debug, Serialize)]
pub struct CodeEvaluation {
    /// P(e_k <= t_u) per block.
    pub p_known: f64,
    /// P(t_u < e_k <= t_d) per block.
    pub p_partial: f64,
    /// Distribution atoms (e_k value, probability), sorted by e_k.
    pub atoms: Vec<(f64, f64)>,
}

impl CodeEvaluation {
    /// Expected known bits over a database of `n` blocks.
    pub fn nbar(&self, n: usize) -> f64 {
        self.p_known * n as f64
    }

    /// Expected fraction with significant partial information.
    pub fn mbar(&self) -> f64 {
        self.p_partial
    }

    /// P(e_k >= x).
    pub fn tail_ge(&self, x: f64) -> f64 {
        self.atoms
            .iter()
            .filter(|(ek, _)| *ek >= x)
            .map(|(_, p)| p)
            .sum()
    }

    pub fn total_probability(&self) -> f64 {
        self.atoms.iter().map(|(_, p)| p).sum()
    }
}

/// Exact `e_k` distribution by enumeration of tag patterns and error
/// patterns. Exactness rests on coset sufficiency: the decoded `e_k` is a
/// function of (tag pattern, effective syndrome) only.
pub fn exact_ek_distribution(
    h: &ParityCheckMatrix,
    process: &BlockProcess,
    thresholds: Thresholds,
) -> Result<CodeEvaluation, DesignError> {
    let k = h.k();
    if k > MAX_EXACT_K {
        return Err(DesignError::BlockTooLong(k));
    }
    let r = h.r();
    let nk = 1usize << k;
    let ns = 1usize << r;

    // Syndrome of every k-bit pattern, built incrementally from columns.
    let mut syn = vec![0u16; nk];
    let col_syndromes: Vec<u16> = (0..k).map(|j| h.syndrome(1 << j) as u16).collect();
    for e in 1..nk {
        let low = e.trailing_zeros() as usize;
        syn[e] = syn[e & (e - 1)] ^ col_syndromes[low];
    }

    let same_rates = process.true_rates == process.decode_rates;

    let per_tag: Vec<(f64, f64, Vec<(f64, f64)>)> = (0..nk as u32)
        .into_par_iter()
        .map(|tag_mask| {
            let w_i = tag_mask.count_ones() as usize;
            let p_tags = process.p_c.powi((k - w_i) as i32)
                * (1.0 - process.p_c).powi(w_i as i32);

            // Decode-weight mass of each (syndrome, error parity) cell.
            let dec = fold_weights(k, &syn, tag_mask, process.decode_rates, ns);
            // True-process mass over syndromes.
            let true_mass: Vec<f64> = match process.syndrome_model {
                SyndromeModel::UniformRandom => vec![1.0 / ns as f64; ns],
                SyndromeModel::Correlated => {
                    if same_rates {
                        (0..ns).map(|s| dec[s].0 + dec[s].1).collect()
                    } else {
                        let tm = fold_weights(k, &syn, tag_mask, process.true_rates, ns);
                        (0..ns).map(|s| tm[s].0 + tm[s].1).collect()
                    }
                }
            };

            let mut p_known = 0.0;
            let mut p_partial = 0.0;
            let mut atoms = Vec::with_capacity(ns);
            for s in 0..ns {
                let prob = p_tags * true_mass[s];
                if prob == 0.0 {
                    continue;
                }
                let (w_even, w_odd) = dec[s];
                let total = w_even + w_odd;
                let e_k = if total > 0.0 && w_even != w_odd {
                    w_even.min(w_odd) / total
                } else {
                    0.5
                };
                if e_k <= thresholds.t_u {
                    p_known += prob;
                } else if e_k <= thresholds.t_d {
                    p_partial += prob;
                }
                atoms.push((e_k, prob));
            }
            (p_known, p_partial, atoms)
        })
        .collect();

    // Deterministic sequential reduction (float addition order is fixed).
    let mut p_known = 0.0;
    let mut p_partial = 0.0;
    let mut merged: HashMap<u64, f64> = HashMap::new();
    for (pk, pp, atoms) in per_tag {
        p_known += pk;
        p_partial += pp;
        for (ek, p) in atoms {
            *merged.entry(ek.to_bits()).or_insert(0.0) += p;
        }
    }
    let mut atoms: Vec<(f64, f64)> = merged
        .into_iter()
        .map(|(bits, p)| (f64::from_bits(bits), p))
        .collect();
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));

    Ok(CodeEvaluation {
        p_known,
        p_partial,
        atoms,
    })
}

/// Per-(syndrome, parity) total probability of error patterns, weighting bit
/// `i` by `rate(tag_i)` when flipped and its complement otherwise.
fn fold_weights(
    k: usize,
    syn: &[u16],
    tag_mask: u32,
    rates: TagRates,
    ns: usize,
) -> Vec<(f64, f64)> {
    let nk = 1usize << k;
    let mut buf = vec![0.0f64; nk];
    buf[0] = 1.0;
    for bit in 0..k {
        let rate = rates.rate_for(tag_mask & (1 << bit) != 0);
        let half = 1usize << bit;
        for e in 0..half {
            let w = buf[e];
            buf[e + half] = w * rate;
            buf[e] = w * (1.0 - rate);
        }
    }
    let mut acc = vec![(0.0f64, 0.0f64); ns];
    for (e, &w) in buf.iter().enumerate() {
        let cell = &mut acc[syn[e] as usize];
        if (e.count_ones() & 1) == 0 {
            cell.0 += w;
        } else {
            cell.1 += w;
        }
    }
    acc
}

/// Every RREF matrix of rank `r` over GF(2)^k, exactly once. Exposed for
/// oracle checks; the search itself uses [`enumerate_codes`].
pub fn enumerate_rref(k: usize, r: usize) -> Vec<ParityCheckMatrix> {
    assert!(r >= 1 && r <= k && k <= MAX_SEARCH_K);
    let mut out = Vec::new();
    let mut pivots = (0..r).collect::<Vec<usize>>();
    loop {
        // Free cells: row i may have arbitrary entries at non-pivot columns
        // beyond its pivot.
        let mut cells: Vec<(usize, usize)> = Vec::new();
        for (i, &p) in pivots.iter().enumerate() {
            for j in p + 1..k {
                if !pivots.contains(&j) {
                    cells.push((i, j));
                }
            }
        }
        for assign in 0u64..1 << cells.len() {
            let mut rows: Vec<u32> = pivots.iter().map(|&p| 1u32 << p).collect();
            for (idx, &(i, j)) in cells.iter().enumerate() {
                if assign & (1 << idx) != 0 {
                    rows[i] |= 1 << j;
                }
            }
            out.push(ParityCheckMatrix::new(k, rows).expect("constructed RREF"));
        }
        // Next pivot combination in lexicographic order.
        let mut i = r;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if pivots[i] < k - (r - i) {
                pivots[i] += 1;
                for j in i + 1..r {
                    pivots[j] = pivots[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Number of rank-`r` RREF matrices over GF(2)^k: the Gaussian binomial
/// coefficient, via the subspace recurrence G(n, m) = G(n−1, m−1) + 2^m G(n−1, m).
pub fn rref_matrix_count(k: usize, r: usize) -> u128 {
    let mut g = vec![0u128; r + 1];
    g[0] = 1;
    for n in 1..=k {
        for m in (1..=r.min(n)).rev() {
            g[m] = g[m - 1] + (g[m] << m);
        }
    }
    g[r]
}

/// Number of column-permutation classes: multisets of `k − r` free columns
/// over the `2^r` possible column values.
pub fn canonical_code_count(k: usize, r: usize) -> u128 {
    // C(2^r + (k-r) - 1, k-r)
    let n = (1u128 << r) + (k - r) as u128 - 1;
    let mut num = 1u128;
    let mut den = 1u128;
    for i in 0..(k - r) as u128 {
        num *= n - i;
        den *= i + 1;
    }
    num / den
}

/// One representative per column-permutation class of rank-`r` RREF codes:
/// `[I_r | F]` with the free columns of `F` in non-increasing value order.
/// Every class has such a representative because pivots can always be
/// permuted to the front.
pub fn enumerate_codes(k: usize, r: usize) -> Result<Vec<ParityCheckMatrix>, DesignError> {
    if !(r >= 1 && r < k && k <= MAX_SEARCH_K) {
        return Err(DesignError::BadSearchShape { r, k });
    }
    let free = k - r;
    let nvals = 1u32 << r;
    let mut out = Vec::new();
    // Non-decreasing sequences v_0 <= v_1 <= ... over 0..2^r.
    let mut vals = vec![0u32; free];
    loop {
        let mut rows: Vec<u32> = (0..r).map(|i| 1u32 << i).collect();
        for (m, &v) in vals.iter().rev().enumerate() {
            let col = r + m;
            for (i, row) in rows.iter_mut().enumerate() {
                if v & (1 << i) != 0 {
                    *row |= 1 << col;
                }
            }
        }
        out.push(ParityCheckMatrix::new(k, rows).expect("constructed RREF"));
        // Advance the multiset odometer.
        let mut i = free;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if vals[i] + 1 < nvals {
                let v = vals[i] + 1;
                for x in vals.iter_mut().skip(i) {
                    *x = v;
                }
                break;
            }
        }
    }
}

/// Search result: the candidate whose expected known-bit count lands in the
/// target range while leaking the least partial information.
#[derive(Clone, Debug)]
pub struct SelectedCode {
    pub matrix: ParityCheckMatrix,
    pub evaluation: CodeEvaluation,
}

/// Among `candidates`, keeps those with `N·p_known` inside `target_nbar`
/// (inclusive) and returns the one minimizing `p_partial`; ties break toward
/// the lexicographically smallest text serialization.
pub fn select_code(
    candidates: &[ParityCheckMatrix],
    process: &BlockProcess,
    thresholds: Thresholds,
    target_nbar: (f64, f64),
    n_database: usize,
) -> Result<SelectedCode, DesignError> {
    let best = candidates
        .par_iter()
        .filter_map(|h| {
            let eval = exact_ek_distribution(h, process, thresholds).ok()?;
            let nbar = eval.nbar(n_database);
            (nbar >= target_nbar.0 && nbar <= target_nbar.1).then(|| SelectedCode {
                matrix: h.clone(),
                evaluation: eval,
            })
        })
        .reduce_with(|a, b| {
            match a
                .evaluation
                .p_partial
                .total_cmp(&b.evaluation.p_partial)
                .then_with(|| a.matrix.to_text().cmp(&b.matrix.to_text()))
            {
                std::cmp::Ordering::Greater => b,
                _ => a,
            }
        });
    best.ok_or(DesignError::NoCandidateInRange)
}
