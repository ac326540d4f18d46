//! Simulator and analysis library for a cheat-sensitive quantum private-query
//! protocol.
//!
//! A database holder (Dave) transmits qubits drawn from four non-orthogonal
//! polarization states to a user (Ursula), who measures in one of two bases and
//! builds an *oblivious key*: an `N`-bit key fully known to Dave of which Ursula
//! learns only a few bits, at positions hidden from Dave. A parity-based forward
//! error-correction step over `k`-bit blocks controls exactly how many bits she
//! learns and doubles as a cheat-detection opportunity. The key then drives a
//! shifted one-time-pad retrieval of a single database bit.
//!
//! Everything quantum here is *simulated*: measurement statistics are sampled
//! classically from the Born-rule probabilities of the four-state geometry.
//!
//! Module map:
//!
//! * [`geometry`] / [`channel`] — four-state geometry, ideal and noisy
//!   measurement statistics, per-pulse sampling.
//! * [`parity`], [`decode`], [`rates`] — parity-check codes over GF(2),
//!   Bayesian block decoding with per-bit error probability `e_k`, and error
//!   rate estimation from parity comparisons.
//! * [`design`] — exhaustive code enumeration and exact `e_k` distribution
//!   analysis used to select codes.
//! * [`protocol`] — executable two-party state machines with a framed wire
//!   format.
//! * [`adversary`] — steering and unambiguous-state-discrimination attacks plus
//!   the user-side anomaly detector.
//! * [`mc`] — seeded Monte Carlo scenario driver and report/histogram output.
//! * [`database`], [`config`], [`net`] — file formats, JSON configuration and
//!   the TCP transport behind the CLI.

pub mod adversary;
pub mod bits;
pub mod channel;
pub mod config;
pub mod database;
pub mod decode;
pub mod design;
pub mod geometry;
pub mod mc;
pub mod net;
pub mod parity;
pub mod protocol;
pub mod rates;
pub mod rng;

pub use bits::BitVec;
pub use channel::{ChannelModel, ChannelStats, PulseRecord};
pub use decode::{BitClass, BlockDecodeResult, BlockObservation, TagRates, Thresholds};
pub use geometry::StateGeometry;
pub use parity::ParityCheckMatrix;
