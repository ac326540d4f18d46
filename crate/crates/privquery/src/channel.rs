//! Channel models and per-pulse sampling.
//!
//! Two ways to describe the link between sender and receiver:
//!
//! * **direct** — the post-sifting statistics `(p_c, e_c, e_i)` are given
//!   outright, as they appear in a parameter table. Every sampled pulse is
//!   "detected": the direct mode models the view after undetected pulses have
//!   been discarded. The inconclusive probability is always `1 − p_c` and is
//!   never stored.
//! * **physical** — the statistics are induced from the state geometry plus a
//!   two-parameter noise model: a depolarizing mixture (with probability
//!   `depolarizing_prob` the photon arrives maximally mixed, so the outcome in
//!   either basis is uniform) and a dark-count floor (`dark_count_fraction` of
//!   detections are detector noise, again a uniform outcome). Loss is explicit
//!   through `transmission`.
//!
//! Both noise legs produce a uniformly random outcome conditioned on
//! detection, so the induced statistics depend on them only through the
//! combined uniform-outcome probability `q = 1 − (1−depol)(1−dark)`; the split
//! matters for detection accounting, not for the sifted statistics.

use crate::decode::TagRates;
use crate::geometry::{GeometryError, StateGeometry};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ChannelError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("conclusive probability must lie in (0, 1), got {0}")]
    InvalidConclusiveProb(f64),
    #[error("conclusive error rate must lie in [0, 1/2), got {0}")]
    InvalidConclusiveError(f64),
    #[error("inconclusive error rate must lie in [0, 1/2), got {0}")]
    InvalidInconclusiveError(f64),
    #[error("transmission must lie in (0, 1], got {0}")]
    InvalidTransmission(f64),
    #[error("noise probability must lie in [0, 1), got {0}")]
    InvalidNoiseProb(f64),
    #[error("dark counts would push the detection probability above 1 (t={t}, dark fraction={dark})")]
    DetectionOverflow { t: f64, dark: f64 },
}

/// Post-sifting per-pulse statistics: conclusive probability and the error
/// rates for conclusively / inconclusively tagged bits.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelStats {
    pub p_c: f64,
    pub e_c: f64,
    pub e_i: f64,
}

impl ChannelStats {
    pub fn tag_rates(&self) -> TagRates {
        TagRates {
            e_c: self.e_c,
            e_i: self.e_i,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ChannelModel {
    Direct {
        p_c: f64,
        e_c: f64,
        e_i: f64,
        /// Descriptive mean-photon-number tag carried through to reports.
        /// Metadata only; multi-photon effects are not modeled.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mu_label: Option<String>,
    },
    Physical {
        theta_deg: f64,
        transmission: f64,
        depolarizing_prob: f64,
        dark_count_fraction: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mu_label: Option<String>,
    },
}

impl ChannelModel {
    pub fn direct(p_c: f64, e_c: f64, e_i: f64) -> Result<Self, ChannelError> {
        let m = ChannelModel::Direct {
            p_c,
            e_c,
            e_i,
            mu_label: None,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn physical(
        theta_deg: f64,
        transmission: f64,
        depolarizing_prob: f64,
        dark_count_fraction: f64,
    ) -> Result<Self, ChannelError> {
        let m = ChannelModel::Physical {
            theta_deg,
            transmission,
            depolarizing_prob,
            dark_count_fraction,
            mu_label: None,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        match *self {
            ChannelModel::Direct { p_c, e_c, e_i, .. } => {
                if !(p_c > 0.0 && p_c < 1.0) {
                    return Err(ChannelError::InvalidConclusiveProb(p_c));
                }
                if !(0.0..0.5).contains(&e_c) {
                    return Err(ChannelError::InvalidConclusiveError(e_c));
                }
                if !(0.0..0.5).contains(&e_i) {
                    return Err(ChannelError::InvalidInconclusiveError(e_i));
                }
                Ok(())
            }
            ChannelModel::Physical {
                theta_deg,
                transmission,
                depolarizing_prob,
                dark_count_fraction,
                ..
            } => {
                StateGeometry::new(theta_deg)?;
                if !(transmission > 0.0 && transmission <= 1.0) {
                    return Err(ChannelError::InvalidTransmission(transmission));
                }
                for p in [depolarizing_prob, dark_count_fraction] {
                    if !(0.0..1.0).contains(&p) {
                        return Err(ChannelError::InvalidNoiseProb(p));
                    }
                }
                if transmission / (1.0 - dark_count_fraction) > 1.0 {
                    return Err(ChannelError::DetectionOverflow {
                        t: transmission,
                        dark: dark_count_fraction,
                    });
                }
                // The induced statistics must land back in the direct-mode
                // ranges; e_c >= 1/2 is impossible for this model but the
                // check keeps the contract explicit.
                let stats = Self::induced_physical(
                    StateGeometry::new(theta_deg)?,
                    depolarizing_prob,
                    dark_count_fraction,
                );
                if stats.e_c >= 0.5 {
                    return Err(ChannelError::InvalidConclusiveError(stats.e_c));
                }
                Ok(())
            }
        }
    }

    /// The deterministic post-sifting statistics of this channel. Direct mode
    /// returns its stored triple unchanged.
    pub fn induced_statistics(&self) -> ChannelStats {
        match *self {
            ChannelModel::Direct { p_c, e_c, e_i, .. } => ChannelStats { p_c, e_c, e_i },
            ChannelModel::Physical {
                theta_deg,
                depolarizing_prob,
                dark_count_fraction,
                ..
            } => Self::induced_physical(
                StateGeometry::new(theta_deg).expect("validated on construction"),
                depolarizing_prob,
                dark_count_fraction,
            ),
        }
    }

    fn induced_physical(geometry: StateGeometry, depol: f64, dark: f64) -> ChannelStats {
        // Combined probability that the recorded outcome is uniform rather
        // than Born-rule distributed.
        let q = 1.0 - (1.0 - depol) * (1.0 - dark);
        let ideal_pc = geometry.conclusive_prob();
        let c2 = 1.0 - 2.0 * ideal_pc; // cos²θ
        let p_c = q / 2.0 + (1.0 - q) * ideal_pc;
        // Wrong conclusives come only from the uniform branch (outcome and
        // basis mismatch half the time each): q/4 of all detections.
        let e_c = (q / 4.0) / p_c;
        let e_i = (q / 4.0 + (1.0 - q) * c2 / 2.0) / (1.0 - p_c);
        ChannelStats { p_c, e_c, e_i }
    }

    /// Probability that a transmitted pulse produces a detection event.
    /// Direct mode is a post-selection view: every sampled pulse is detected.
    pub fn detection_prob(&self) -> f64 {
        match *self {
            ChannelModel::Direct { .. } => 1.0,
            ChannelModel::Physical {
                transmission,
                dark_count_fraction,
                ..
            } => transmission / (1.0 - dark_count_fraction),
        }
    }

    pub fn mu_label(&self) -> Option<&str> {
        match self {
            ChannelModel::Direct { mu_label, .. } | ChannelModel::Physical { mu_label, .. } => {
                mu_label.as_deref()
            }
        }
    }

    /// Samples one pulse: the sender encodes `(dave_basis, dave_state)`, the
    /// receiver measures in a uniformly random basis. All measurement fields
    /// of the returned record are meaningful only if `detected`.
    pub fn sample_pulse(
        &self,
        dave_basis: bool,
        dave_state: bool,
        rng: &mut impl Rng,
    ) -> PulseRecord {
        let detected = rng.gen_bool(self.detection_prob());
        if !detected {
            return PulseRecord {
                dave_basis,
                dave_state,
                detected: false,
                ursula_basis: false,
                conclusive: false,
                ursula_bit: false,
            };
        }
        let stats = self.induced_statistics();
        let conclusive = rng.gen_bool(stats.p_c);
        let wrong = rng.gen_bool(if conclusive { stats.e_c } else { stats.e_i });
        let ursula_bit = dave_basis ^ wrong;
        // Identification rule: a conclusive outcome is orthogonal to one of
        // the disclosed pair, so the inferred basis is the *other* one —
        // anti-correlated with the measurement basis. Inconclusive outcomes
        // point at the measurement basis itself.
        let ursula_basis = if conclusive { !ursula_bit } else { ursula_bit };
        PulseRecord {
            dave_basis,
            dave_state,
            detected,
            ursula_basis,
            conclusive,
            ursula_bit,
        }
    }
}

/// Everything both simulation endpoints know about one pulse. The sender-side
/// fields (`dave_basis`, `dave_state`) exist because the channel is simulated
/// in one process; honest receiver logic reads only the measurement fields.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PulseRecord {
    /// Raw-key bit: which basis the state was prepared in.
    pub dave_basis: bool,
    /// ψ/φ selector within the basis (disclosed after sifting).
    pub dave_state: bool,
    pub detected: bool,
    /// Basis the receiver measured in.
    pub ursula_basis: bool,
    pub conclusive: bool,
    /// The receiver's most likely value for the raw-key bit.
    pub ursula_bit: bool,
}

/// Outcome of fitting the two-parameter physical noise model against a target
/// statistics triple at fixed geometry.
///
/// The conditional statistics identify only the combined uniform-outcome
/// probability `q`, so the fit reports the canonical split
/// `(depolarizing_prob = 0, dark_count_fraction = q)`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct NoiseFit {
    pub depolarizing_prob: f64,
    pub dark_count_fraction: f64,
    /// Worst absolute deviation from the target triple, in percentage points.
    pub residual_pp: f64,
    pub fitted: ChannelStats,
}

/// Fits `(depolarizing_prob, dark_count_fraction)` so the induced statistics
/// approximate `target`, minimizing the worst deviation in percentage points
/// across the triple. The model cannot produce `p_c` below the noiseless
/// value `sin²θ/2` (uniform noise only pushes `p_c` toward 1/2), so targets
/// measured below it carry an irreducible residual which the caller should
/// inspect.
pub fn fit_uniform_noise(geometry: StateGeometry, target: ChannelStats) -> NoiseFit {
    let eval = |q: f64| {
        let stats = ChannelModel::Physical {
            theta_deg: geometry.theta_deg(),
            transmission: 1.0,
            depolarizing_prob: 0.0,
            dark_count_fraction: q,
            mu_label: None,
        }
        .induced_statistics();
        let resid = (stats.p_c - target.p_c)
            .abs()
            .max((stats.e_c - target.e_c).abs())
            .max((stats.e_i - target.e_i).abs());
        (resid, stats)
    };
    // Coarse grid, then local refinement. The objective is piecewise smooth
    // and unimodal in q for targets in range.
    let mut best_q = 0.0;
    let mut best = eval(0.0);
    for i in 0..=1000 {
        let q = i as f64 * 0.999 / 1000.0;
        let r = eval(q);
        if r.0 < best.0 {
            best = r;
            best_q = q;
        }
    }
    let mut step = 0.001;
    while step > 1e-12 {
        for q in [best_q - step, best_q + step] {
            if (0.0..1.0).contains(&q) {
                let r = eval(q);
                if r.0 < best.0 {
                    best = r;
                    best_q = q;
                }
            }
        }
        step *= 0.5;
    }
    NoiseFit {
        depolarizing_prob: 0.0,
        dark_count_fraction: best_q,
        residual_pp: best.0 * 100.0,
        fitted: best.1,
    }
}
