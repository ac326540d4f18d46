//! Bayesian block decoding of oblivious-key bits.
//!
//! For each `k`-bit block the user holds a measured vector `u` with a
//! conclusive/inconclusive tag per bit, and receives the block syndrome from
//! the database. Decoding follows the enumerated procedure: restrict to the
//! candidate blocks consistent with the syndrome, split them by block parity,
//! weight each candidate by the per-tag flip probabilities, pick the heavier
//! parity class as the key bit, and report the posterior probability `e_k`
//! that this choice is wrong.
//!
//! The candidate set `{d : H·d = p}` is the coset `u ⊕ {e : H·e = p ⊕ H·u}`,
//! so the posterior depends on the observation only through the tag pattern
//! and the *effective syndrome* `s = p ⊕ H·u`. All hot paths work in that
//! coset form.

use crate::parity::{CodeError, ParityCheckMatrix};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DecodeError {
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error("tag error rate must lie in [0, 1/2], got {0}")]
    InvalidRate(f64),
    #[error("thresholds must satisfy 0 < t_u <= t_d < 1/2, got ({0}, {1})")]
    InvalidThresholds(f64, f64),
    #[error("observation carries zero posterior mass (contradictory syndrome at zero error rates)")]
    ImpossibleObservation,
}

/// Per-tag error rates used as decoding weights. A rate of exactly 1/2 is
/// admitted (bits carrying no information), which adversary analysis relies
/// on; honest channels keep rates strictly below 1/2.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TagRates {
    pub e_c: f64,
    pub e_i: f64,
}

impl TagRates {
    pub fn new(e_c: f64, e_i: f64) -> Result<Self, DecodeError> {
        for r in [e_c, e_i] {
            if !(0.0..=0.5).contains(&r) {
                return Err(DecodeError::InvalidRate(r));
            }
        }
        Ok(Self { e_c, e_i })
    }

    #[inline]
    pub fn rate_for(&self, inconclusive: bool) -> f64 {
        if inconclusive {
            self.e_i
        } else {
            self.e_c
        }
    }
}

/// Classification thresholds: the user considers a bit known when
/// `e_k <= t_u`; the database considers her to hold significant partial
/// information when `e_k <= t_d`. Both comparisons are closed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub t_u: f64,
    pub t_d: f64,
}

impl Thresholds {
    pub fn new(t_u: f64, t_d: f64) -> Result<Self, DecodeError> {
        if !(t_u > 0.0 && t_u <= t_d && t_d < 0.5) {
            return Err(DecodeError::InvalidThresholds(t_u, t_d));
        }
        Ok(Self { t_u, t_d })
    }

    /// The working point used throughout: t_u = 10⁻³, t_d = 1/3.
    pub fn standard() -> Self {
        Self {
            t_u: 1e-3,
            t_d: 1.0 / 3.0,
        }
    }

    pub fn classify(&self, e_k: f64) -> BitClass {
        if e_k <= self.t_u {
            BitClass::Known
        } else if e_k <= self.t_d {
            BitClass::Partial
        } else {
            BitClass::Unknown
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BitClass {
    Known,
    Partial,
    Unknown,
}

/// One block as the user sees it: her sifted bits, the tag pattern, and the
/// syndrome received from the database. Bit `j` of each word is position `j`
/// of the block; the low `r` bits of `syndrome` are rows `0..r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlockObservation {
    pub k: usize,
    pub bits: u32,
    pub inconclusive: u32,
    pub syndrome: u32,
}

impl BlockObservation {
    pub fn new(k: usize, bits: u32, inconclusive: u32, syndrome: u32) -> Self {
        Self {
            k,
            bits,
            inconclusive,
            syndrome,
        }
    }

    pub fn inconclusive_count(&self) -> usize {
        self.inconclusive.count_ones() as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockDecodeResult {
    pub key_bit: bool,
    pub e_k: f64,
    pub class: BitClass,
}

/// Precomputed coset structure for one parity-check matrix.
pub struct BlockDecoder<'h> {
    h: &'h ParityCheckMatrix,
    null_basis: Vec<u32>,
}

impl<'h> BlockDecoder<'h> {
    pub fn new(h: &'h ParityCheckMatrix) -> Self {
        Self {
            h,
            null_basis: h.null_space_basis(),
        }
    }

    pub fn matrix(&self) -> &ParityCheckMatrix {
        self.h
    }

    /// Total likelihood of the even-parity and odd-parity error patterns in
    /// the coset `{e : H·e = s_eff}`, up to the common factor
    /// `∏(1 − rᵢ)` which cancels in every posterior.
    pub fn coset_class_weights(
        &self,
        inconclusive: u32,
        s_eff: u32,
        rates: TagRates,
    ) -> (f64, f64) {
        // weight(e) ∝ ratio_c^{#conclusive flips} · ratio_i^{#inconclusive flips}
        let ratio_c = rates.e_c / (1.0 - rates.e_c);
        let ratio_i = rates.e_i / (1.0 - rates.e_i);
        let k = self.h.k();
        let mut pow_c = [0.0f64; 33];
        let mut pow_i = [0.0f64; 33];
        pow_c[0] = 1.0;
        pow_i[0] = 1.0;
        for i in 1..=k {
            pow_c[i] = pow_c[i - 1] * ratio_c;
            pow_i[i] = pow_i[i - 1] * ratio_i;
        }
        let base = self.h.particular_solution(s_eff);
        let mut weights = (0.0f64, 0.0f64);
        let combos = 1u32 << self.null_basis.len();
        for combo in 0..combos {
            let mut e = base;
            let mut c = combo;
            while c != 0 {
                let idx = c.trailing_zeros() as usize;
                e ^= self.null_basis[idx];
                c &= c - 1;
            }
            let flips_i = (e & inconclusive).count_ones() as usize;
            let flips_c = (e & !inconclusive).count_ones() as usize;
            let w = pow_c[flips_c] * pow_i[flips_i];
            if e.count_ones() & 1 == 0 {
                weights.0 += w;
            } else {
                weights.1 += w;
            }
        }
        weights
    }

    /// Full decoding of one observation.
    pub fn decode(
        &self,
        obs: &BlockObservation,
        rates: TagRates,
        thresholds: Thresholds,
    ) -> Result<BlockDecodeResult, DecodeError> {
        if obs.k != self.h.k() {
            return Err(CodeError::DimensionMismatch {
                expected: self.h.k(),
                got: obs.k,
            }
            .into());
        }
        let s_eff = obs.syndrome ^ self.h.syndrome(obs.bits);
        let (w_even, w_odd) = self.coset_class_weights(obs.inconclusive, s_eff, rates);
        let total = w_even + w_odd;
        if total <= 0.0 {
            return Err(DecodeError::ImpossibleObservation);
        }
        let u_parity = obs.bits.count_ones() & 1 == 1;
        // Candidate key values: parity(u) for even error patterns, its
        // complement for odd ones.
        let (w_key0, w_key1) = if u_parity {
            (w_odd, w_even)
        } else {
            (w_even, w_odd)
        };
        let result = if w_key0 == w_key1 {
            // Ties carry no information; resolved deterministically.
            BlockDecodeResult {
                key_bit: false,
                e_k: 0.5,
                class: thresholds.classify(0.5),
            }
        } else {
            let key_bit = w_key1 > w_key0;
            let e_k = w_key0.min(w_key1) / total;
            BlockDecodeResult {
                key_bit,
                e_k,
                class: thresholds.classify(e_k),
            }
        };
        Ok(result)
    }

    /// Decoding with the computational gate: blocks with more than `budget`
    /// inconclusive tags are not decoded (the known threshold is out of
    /// reach) and instead carry the tag-only prior with class `Unknown`.
    /// `budget: None` means no inconclusive count is decodable.
    pub fn decode_gated(
        &self,
        obs: &BlockObservation,
        rates: TagRates,
        thresholds: Thresholds,
        budget: Option<usize>,
    ) -> Result<BlockDecodeResult, DecodeError> {
        match budget {
            Some(b) if obs.inconclusive_count() <= b => self.decode(obs, rates, thresholds),
            _ => {
                let e_k = prior_ek(
                    obs.k - obs.inconclusive_count(),
                    obs.inconclusive_count(),
                    rates,
                );
                Ok(BlockDecodeResult {
                    key_bit: obs.bits.count_ones() & 1 == 1,
                    e_k,
                    class: BitClass::Unknown,
                })
            }
        }
    }
}

/// Largest inconclusive count for which `e_k <= t_u` is achievable at the
/// given rates, found by scanning every tag pattern and effective syndrome.
/// `None` if not even an all-conclusive block can reach the threshold.
pub fn max_decodable_inconclusive(
    h: &ParityCheckMatrix,
    rates: TagRates,
    t_u: f64,
) -> Option<usize> {
    let decoder = BlockDecoder::new(h);
    let k = h.k();
    let mut best: Option<usize> = None;
    for mask in 0u32..1 << k {
        let count = mask.count_ones() as usize;
        if best.is_some_and(|b| count <= b) {
            continue;
        }
        for s in 0..1u32 << h.r() {
            let (w_even, w_odd) = decoder.coset_class_weights(mask, s, rates);
            let total = w_even + w_odd;
            if total > 0.0 && w_even.min(w_odd) / total <= t_u {
                best = Some(count);
                break;
            }
        }
    }
    best
}

/// Posterior error of the block parity from tags alone (no syndrome): the
/// parity of `k` independent bits flips with probability
/// `(1 − (1−2e_c)^{w_c} (1−2e_i)^{w_i}) / 2`.
pub fn prior_ek(conclusive: usize, inconclusive: usize, rates: TagRates) -> f64 {
    let lam_c = 1.0 - 2.0 * rates.e_c;
    let lam_i = 1.0 - 2.0 * rates.e_i;
    0.5 * (1.0 - lam_c.powi(conclusive as i32) * lam_i.powi(inconclusive as i32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parity::code_35_6;

    fn small_code() -> ParityCheckMatrix {
        // H = [[1,0,1],[0,1,1]]
        ParityCheckMatrix::new(3, vec![0b101, 0b110]).unwrap()
    }

    #[test]
    fn worked_example_all_conclusive() {
        // u = 000, all conclusive, e_c = 0.1, syndrome (0,0):
        // candidates {000, 111}, weights 0.729 vs 0.001.
        let h = small_code();
        let dec = BlockDecoder::new(&h);
        let obs = BlockObservation::new(3, 0, 0, 0);
        let r = dec
            .decode(
                &obs,
                TagRates::new(0.1, 0.4).unwrap(),
                Thresholds::standard(),
            )
            .unwrap();
        assert!(!r.key_bit);
        assert!((r.e_k - 0.001 / 0.730).abs() < 1e-12, "e_k = {}", r.e_k);
    }

    #[test]
    fn worked_example_one_inconclusive() {
        // Same but bit 3 inconclusive with e_i = 0.4: weights 0.486 vs 0.004.
        let h = small_code();
        let dec = BlockDecoder::new(&h);
        let obs = BlockObservation::new(3, 0, 0b100, 0);
        let r = dec
            .decode(
                &obs,
                TagRates::new(0.1, 0.4).unwrap(),
                Thresholds::standard(),
            )
            .unwrap();
        assert!((r.e_k - 0.004 / 0.490).abs() < 1e-12, "e_k = {}", r.e_k);
    }

    #[test]
    fn noiseless_consistent_block_is_known_exactly() {
        let h = code_35_6();
        let dec = BlockDecoder::new(&h);
        let rates = TagRates::new(0.0, 0.0).unwrap();
        for u in [0u32, 0b1010110011, 0b1111111111] {
            let obs = BlockObservation::new(10, u, 0, h.syndrome(u));
            let r = dec.decode(&obs, rates, Thresholds::standard()).unwrap();
            assert_eq!(r.key_bit, u.count_ones() & 1 == 1);
            assert_eq!(r.e_k, 0.0);
            assert_eq!(r.class, BitClass::Known);
        }
    }

    #[test]
    fn noiseless_contradictory_syndrome_is_an_error() {
        let h = small_code();
        let dec = BlockDecoder::new(&h);
        let obs = BlockObservation::new(3, 0, 0, 0b01);
        let r = dec.decode(
            &obs,
            TagRates::new(0.0, 0.0).unwrap(),
            Thresholds::standard(),
        );
        assert_eq!(r, Err(DecodeError::ImpossibleObservation));
    }

    #[test]
    fn half_rates_give_uninformative_tie() {
        let h = small_code();
        let dec = BlockDecoder::new(&h);
        let obs = BlockObservation::new(3, 0b010, 0b111, 0b11);
        let r = dec
            .decode(
                &obs,
                TagRates::new(0.5, 0.5).unwrap(),
                Thresholds::standard(),
            )
            .unwrap();
        assert!(!r.key_bit);
        assert_eq!(r.e_k, 0.5);
        assert_eq!(r.class, BitClass::Unknown);
    }

    #[test]
    fn coset_sufficiency() {
        // decode(u, p) and decode(u ⊕ d, p ⊕ H·d) agree in e_k for any d.
        let h = code_35_6();
        let dec = BlockDecoder::new(&h);
        let rates = TagRates::new(0.044, 0.4124).unwrap();
        let t = Thresholds::standard();
        for (u, p, d) in [
            (0b0000000000u32, 0b00000u32, 0b1011001110u32),
            (0b1100101011, 0b10110, 0b0000000001),
            (0b0101010101, 0b01001, 0b1111111111),
        ] {
            let a = dec
                .decode(&BlockObservation::new(10, u, 0b10010, p), rates, t)
                .unwrap();
            let b = dec
                .decode(
                    &BlockObservation::new(10, u ^ d, 0b10010, p ^ h.syndrome(d)),
                    rates,
                    t,
                )
                .unwrap();
            assert!((a.e_k - b.e_k).abs() < 1e-15);
        }
    }

    #[test]
    fn ek_monotone_in_conclusive_error() {
        let h = code_35_6();
        let dec = BlockDecoder::new(&h);
        let obs = BlockObservation::new(10, 0b0000110000, 0, h.syndrome(0b0000110000));
        let mut last = f64::INFINITY;
        for e_c in [0.2, 0.1, 0.05, 0.01, 0.001] {
            let r = dec
                .decode(
                    &obs,
                    TagRates::new(e_c, 0.4124).unwrap(),
                    Thresholds::standard(),
                )
                .unwrap();
            assert!(r.e_k <= last);
            last = r.e_k;
        }
    }

    #[test]
    fn gate_budget_at_table_rates() {
        // At the standard-detector working point the scan admits at most two
        // inconclusive bits; recorded here as the operating value.
        let h = code_35_6();
        let rates = TagRates::new(0.044, 0.4124).unwrap();
        let b = max_decodable_inconclusive(&h, rates, 1e-3);
        assert_eq!(b, Some(2));
        // All tags inconclusive can never be decodable at these rates.
        assert!(b.unwrap() < 10);
    }

    #[test]
    fn gated_decode_uses_prior_beyond_budget() {
        let h = code_35_6();
        let dec = BlockDecoder::new(&h);
        let rates = TagRates::new(0.044, 0.4124).unwrap();
        let t = Thresholds::standard();
        let obs = BlockObservation::new(10, 0b1111100000, 0b1111111111, 0b00110);
        let r = dec.decode_gated(&obs, rates, t, Some(2)).unwrap();
        assert_eq!(r.class, BitClass::Unknown);
        assert!((r.e_k - prior_ek(0, 10, rates)).abs() < 1e-15);
        // Within budget the gate defers to the full decoder.
        let obs2 = BlockObservation::new(10, 0, 0b10, h.syndrome(0));
        let full = dec.decode(&obs2, rates, t).unwrap();
        let gated = dec.decode_gated(&obs2, rates, t, Some(2)).unwrap();
        assert_eq!(full, gated);
    }

    #[test]
    fn prior_ek_closed_form() {
        let rates = TagRates::new(0.044, 0.4124).unwrap();
        // All-conclusive block of 10: (1 - 0.912^10) / 2.
        let expect = 0.5 * (1.0 - 0.912f64.powi(10));
        assert!((prior_ek(10, 0, rates) - expect).abs() < 1e-12);
        // A rate of 1/2 wipes out all information.
        assert_eq!(prior_ek(3, 1, TagRates::new(0.0, 0.5).unwrap()), 0.5);
    }

    #[test]
    fn classification_boundaries_are_closed() {
        let t = Thresholds::standard();
        assert_eq!(t.classify(1e-3), BitClass::Known);
        assert_eq!(t.classify(1e-3 + 1e-12), BitClass::Partial);
        assert_eq!(t.classify(1.0 / 3.0), BitClass::Partial);
        assert_eq!(t.classify(1.0 / 3.0 + 1e-12), BitClass::Unknown);
    }
}
