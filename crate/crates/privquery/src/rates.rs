//! Error-rate estimation from parity comparisons.
//!
//! The user never sees the database's raw bits, but every announced parity
//! row is a noisy observation of her own: a row whose support covers `w_c`
//! conclusive and `w_i` inconclusive bits mismatches her locally computed
//! parity with probability `(1 − λ_c^{w_c} λ_i^{w_i}) / 2`, where
//! `λ = 1 − 2e`. Inverting those moments over the observed row population
//! yields `(ê_c, ê_i)`.
//!
//! Rows with all-conclusive support identify `λ_c` on their own; mixed rows
//! then identify `λ_i` through a weighted least-squares step in log domain.
//! A mismatch fraction at or above 1/2 in either stratum is the signature of
//! a database whose records are uncorrelated with the user's — that outcome
//! is reported as an error and feeds cheat detection.

use serde::Serialize;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum RateEstimateError {
    #[error("stratum {stratum} has {got} rows, need at least {need}")]
    InsufficientStrata {
        stratum: &'static str,
        got: usize,
        need: usize,
    },
    #[error("mismatch fraction {fraction:.4} in {stratum} stratum is consistent with an uncorrelated database")]
    UncorrelatedDatabase {
        stratum: &'static str,
        fraction: f64,
    },
}

/// One announced parity row compared against the locally computed parity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RowObservation {
    /// Conclusively tagged bits in the row's support.
    pub conclusive: u32,
    /// Inconclusively tagged bits in the row's support.
    pub inconclusive: u32,
    pub mismatch: bool,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct RateEstimate {
    pub e_c: f64,
    pub e_i: f64,
    pub conclusive_rows: usize,
    pub mixed_rows: usize,
    /// Pooled mismatch fraction of the all-conclusive stratum, kept around
    /// for anomaly reporting.
    pub conclusive_mismatch_fraction: f64,
}

/// Expected mismatch probability of a single row.
pub fn row_mismatch_prob(w_c: u32, w_i: u32, e_c: f64, e_i: f64) -> f64 {
    0.5 * (1.0 - (1.0 - 2.0 * e_c).powi(w_c as i32) * (1.0 - 2.0 * e_i).powi(w_i as i32))
}

/// Method-of-moments inversion over the row population. `min_rows` is the
/// required row count per stratum (all-conclusive-support rows vs mixed
/// rows).
pub fn estimate_rates(
    rows: &[RowObservation],
    min_rows: usize,
) -> Result<RateEstimate, RateEstimateError> {
    // Group rows by support composition.
    let mut groups: HashMap<(u32, u32), (u64, u64)> = HashMap::new();
    for row in rows {
        let entry = groups.entry((row.conclusive, row.inconclusive)).or_insert((0, 0));
        entry.0 += 1;
        entry.1 += row.mismatch as u64;
    }

    let stratum_total = |mixed: bool| {
        groups
            .iter()
            .filter(|((_, wi), _)| (*wi > 0) == mixed)
            .fold((0u64, 0u64), |acc, (_, &(n, m))| (acc.0 + n, acc.1 + m))
    };
    let (n_conc, mis_conc) = stratum_total(false);
    let (n_mixed, mis_mixed) = stratum_total(true);

    for (name, n) in [("conclusive", n_conc), ("mixed", n_mixed)] {
        if (n as usize) < min_rows {
            return Err(RateEstimateError::InsufficientStrata {
                stratum: name,
                got: n as usize,
                need: min_rows,
            });
        }
    }
    for (name, n, m) in [
        ("conclusive", n_conc, mis_conc),
        ("mixed", n_mixed, mis_mixed),
    ] {
        let fraction = m as f64 / n as f64;
        if fraction >= 0.5 {
            return Err(RateEstimateError::UncorrelatedDatabase {
                stratum: name,
                fraction,
            });
        }
    }

    // Weighted log-linear fit: ln y = w_c ln λ_c + w_i ln λ_i with
    // y = 1 − 2·(mismatch fraction). Groups at or past y = 0 carry no usable
    // signal and are skipped; the pooled check above already guarantees the
    // strata are signal-bearing overall. Weight n·y² approximates inverse
    // variance of ln y.
    let fit = |mixed: bool, ln_lambda_c: f64| -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for (&(w_c, w_i), &(n, m)) in &groups {
            if (w_i > 0) != mixed {
                continue;
            }
            let y = 1.0 - 2.0 * (m as f64 / n as f64);
            if y <= 0.0 {
                continue;
            }
            let weight = n as f64 * y * y;
            let (target, regressor) = if mixed {
                (y.ln() - w_c as f64 * ln_lambda_c, w_i as f64)
            } else {
                (y.ln(), w_c as f64)
            };
            num += weight * regressor * target;
            den += weight * regressor * regressor;
        }
        if den == 0.0 {
            0.0
        } else {
            num / den
        }
    };

    let ln_lambda_c = fit(false, 0.0);
    let ln_lambda_i = fit(true, ln_lambda_c);
    let to_rate = |ln_lambda: f64| ((1.0 - ln_lambda.exp()) / 2.0).clamp(0.0, 0.5);

    Ok(RateEstimate {
        e_c: to_rate(ln_lambda_c),
        e_i: to_rate(ln_lambda_i),
        conclusive_rows: n_conc as usize,
        mixed_rows: n_mixed as usize,
        conclusive_mismatch_fraction: mis_conc as f64 / n_conc as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parity::code_35_6;
    use crate::rng::{substream, Domain};
    use rand::Rng;

    #[test]
    fn single_row_mismatch_probability() {
        // Support of two conclusive bits at e_c = 4.4%.
        let p = row_mismatch_prob(2, 0, 0.044, 0.0);
        assert!((p - 0.08413).abs() < 1e-5);
    }

    #[test]
    fn zero_mismatches_give_zero_rates() {
        let rows: Vec<RowObservation> = (0..200)
            .map(|i| RowObservation {
                conclusive: 2 + (i % 2),
                inconclusive: i % 3,
                mismatch: false,
            })
            .collect();
        let est = estimate_rates(&rows, 10).unwrap();
        assert_eq!(est.e_c, 0.0);
        assert_eq!(est.e_i, 0.0);
    }

    #[test]
    fn round_trip_against_generator() {
        // Synthetic row stream from the 35.6° code supports at the
        // standard-detector rates; the estimate must land within ±0.002.
        let h = code_35_6();
        let (e_c, e_i) = (0.044, 0.4124);
        let p_c = 0.161;
        let mut rng = substream(3, Domain::Scenario, 77);
        let mut rows = Vec::new();
        for _ in 0..1_000_000 {
            let mut tag_mask = 0u32;
            for bit in 0..h.k() {
                if !rng.gen_bool(p_c) {
                    tag_mask |= 1 << bit;
                }
            }
            for &row in h.rows() {
                let w_i = (row & tag_mask).count_ones();
                let w_c = (row & !tag_mask).count_ones();
                let p = row_mismatch_prob(w_c, w_i, e_c, e_i);
                rows.push(RowObservation {
                    conclusive: w_c,
                    inconclusive: w_i,
                    mismatch: rng.gen_bool(p),
                });
            }
        }
        let est = estimate_rates(&rows, 100).unwrap();
        assert!((est.e_c - e_c).abs() < 0.002, "e_c estimate {}", est.e_c);
        assert!((est.e_i - e_i).abs() < 0.002, "e_i estimate {}", est.e_i);
    }

    #[test]
    fn uncorrelated_database_detected() {
        let mut rng = substream(4, Domain::Scenario, 78);
        let rows: Vec<RowObservation> = (0..20_000)
            .map(|i| RowObservation {
                conclusive: 2,
                inconclusive: i % 2,
                mismatch: rng.gen_bool(0.5),
            })
            .collect();
        match estimate_rates(&rows, 100) {
            Err(RateEstimateError::UncorrelatedDatabase { .. }) => {}
            other => panic!("expected uncorrelated-database error, got {other:?}"),
        }
    }

    #[test]
    fn missing_stratum_is_an_error() {
        let rows: Vec<RowObservation> = (0..500)
            .map(|_| RowObservation {
                conclusive: 3,
                inconclusive: 0,
                mismatch: false,
            })
            .collect();
        assert!(matches!(
            estimate_rates(&rows, 100),
            Err(RateEstimateError::InsufficientStrata { stratum: "mixed", .. })
        ));
    }
}
