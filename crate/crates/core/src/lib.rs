//! Phase-sensitive two-channel light storage in a four-level tripod ensemble.
//!
//! A weak probe on `|a> -> |e>` is written into two ground-state coherences
//! (`sigma_ca` through the sigma+ coupling component, `sigma_ba` through the
//! sigma- component). While stored, the two spin waves pick up a relative
//! Larmor phase `2 Omega_L t`. Reading with two coupling components of
//! relative phase `delta_R` converts only the bright superposition back into
//! light, so the total readout interferes with the total phase
//! `Delta = delta_R - delta_W + 2 Omega_L tau`.
//!
//! The crate has three layers:
//!
//! * [`analytic`]: closed-form store / Larmor evolution / projective read
//!   algebra together with the fringe, efficiency and population formulas.
//! * [`dynamics`]: an independent fixed-step RK4 integration of the
//!   single-excitation amplitude equations of the tripod atom coupled to a
//!   propagating probe envelope. It is the numerical oracle for the
//!   closed-form engine.
//! * [`experiments`]: scenario runners assembling either engine into the
//!   storage/readout experiments (single vs. two-channel reads, destructive
//!   read followed by a late read, fringe and storage-time sweeps, channel
//!   isolation, randomized oracle equivalence).
//!
//! The crate is `no_std` and only needs `alloc`. IO, configuration files and
//! the command line live in the companion `tripod-memory-cli` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analytic;
pub mod dynamics;
mod error;
pub mod experiments;
pub mod fit;
mod params;
pub mod phase;

pub use error::{Error, Result};
pub use params::{BeamPair, MagneticEnvironment, ProbePulse, PulseShape};

pub use num_complex::Complex64;
