//! Closed-form storage, Larmor evolution and phase-controlled readout.
//!
//! Spin-wave amplitudes are c-number expectation values of the collective
//! coherences `sigma_ca` and `sigma_ba` normalized so that
//! `|s_ca|^2 + |s_ba|^2` is the stored excitation in units of the input probe
//! energy. The shared spatial envelope only tags along: readout intensities do
//! not depend on it.
//!
//! Conventions:
//!
//! * the whole relative Larmor phase `2 Omega_L tau` is put on `s_ba`; `s_ca`
//!   is phase-stationary (the common global phase is unobservable);
//! * both components decay with amplitude rate `1/(2 t0)`, so stored energy
//!   decays as `e^{-t/t0}`;
//! * a read converts the complete bright component (the projection onto the
//!   direction selected by the read pair) into light and leaves the dark
//!   component stored.
//!
//! With unequal coupling magnitudes the weights `w+-` generalize the
//! equal-amplitude case; the two-beam fringe visibility then becomes
//! `2 w+ w- / (w+^2 + w-^2)`. That case goes beyond the balanced beams used in
//! the experiments and is provided as an extension.

use core::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::params::{BeamPair, MagneticEnvironment, ProbePulse, PulseShape};
use crate::phase;

/// Pair of stored collective coherences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinWaveState {
    pub s_ca: Complex64,
    pub s_ba: Complex64,
    /// Shape of the pulse that was written (opaque shape metadata).
    pub envelope: Option<PulseShape>,
    /// Total storage time accumulated by [`evolve`], seconds.
    pub elapsed: f64,
}

impl SpinWaveState {
    pub fn new(s_ca: Complex64, s_ba: Complex64) -> Self {
        Self {
            s_ca,
            s_ba,
            envelope: None,
            elapsed: 0.0,
        }
    }

    pub fn empty() -> Self {
        Self::new(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
    }

    /// `|s_ca|^2 + |s_ba|^2`.
    pub fn stored_norm(&self) -> f64 {
        self.s_ca.norm_sqr() + self.s_ba.norm_sqr()
    }

    /// Relative phase `arg(s_ba) - arg(s_ca)`, wrapped.
    pub fn relative_phase(&self) -> f64 {
        phase::wrap(self.s_ba.arg() - self.s_ca.arg())
    }
}

/// Dark-state polariton: light and total spin wave mixed by `theta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolaritonState {
    pub light: Complex64,
    pub spin: SpinWaveState,
    pub theta: f64,
}

impl PolaritonState {
    pub fn new(light: Complex64, spin: SpinWaveState, pair: &BeamPair, gn: f64) -> Result<Self> {
        Ok(Self {
            light,
            spin,
            theta: mixing_angle(pair, gn)?,
        })
    }

    /// `Psi = cos(theta) eps - sin(theta) S`, with `S` the total spin wave
    /// seen by `pair`. For a fully dark pair (`theta = pi/2`) the polariton is
    /// pure spin wave and this returns the negated stored amplitude along the
    /// last bright direction supplied.
    pub fn amplitude(&self, pair: &BeamPair) -> Result<Complex64> {
        let s = compose_spin_wave(pair, &self.spin)?;
        Ok(self.light * self.theta.cos() - s * self.theta.sin())
    }

    pub fn is_pure_spin_wave(&self) -> bool {
        self.theta == FRAC_PI_2
    }
}

/// Light emitted by a read and what stays behind.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReadOutcome {
    /// Output amplitude; `|output|^2` is the retrieved energy.
    pub output: Complex64,
    pub remaining: SpinWaveState,
}

impl ReadOutcome {
    pub fn energy(&self) -> f64 {
        self.output.norm_sqr()
    }
}

/// Mixing angle `theta = atan(gN / sqrt(|Omega+|^2 + |Omega-|^2))`.
pub fn mixing_angle(pair: &BeamPair, gn: f64) -> Result<f64> {
    if !(gn > 0.0) || !gn.is_finite() {
        return Err(Error::param("gn", gn, "collective coupling must be finite and > 0"));
    }
    Ok(gn.atan2(pair.total_magnitude()))
}

/// Total spin wave seen by `pair`: `w+ s_ca e^{-i phi+} + w- s_ba e^{-i phi-}`.
///
/// This is the bright amplitude that a read with `pair` converts into light.
pub fn compose_spin_wave(pair: &BeamPair, state: &SpinWaveState) -> Result<Complex64> {
    let (u_ca, u_ba) = pair.bright_direction().ok_or(Error::InvalidRead)?;
    Ok(u_ca.conj() * state.s_ca + u_ba.conj() * state.s_ba)
}

/// Map a probe pulse onto the two spin waves with storage efficiency
/// `efficiency` (stored norm = `efficiency * probe.energy`).
pub fn store(probe: &ProbePulse, write: &BeamPair, efficiency: f64) -> Result<SpinWaveState> {
    if !(0.0..=1.0).contains(&efficiency) {
        return Err(Error::param("efficiency", efficiency, "storage efficiency must lie in [0, 1]"));
    }
    let (u_ca, u_ba) = write.bright_direction().ok_or(Error::InvalidWrite)?;
    let amp = (efficiency * probe.energy).sqrt();
    Ok(SpinWaveState {
        s_ca: u_ca * amp,
        s_ba: u_ba * amp,
        envelope: Some(probe.shape),
        elapsed: 0.0,
    })
}

/// Free evolution for `tau` seconds: relative Larmor phase `2 Omega_L tau` on
/// `s_ba` and amplitude decay `e^{-tau/(2 t0)}` on both channels.
///
/// `t0 = f64::INFINITY` disables decay.
pub fn evolve(state: &SpinWaveState, tau: f64, env: &MagneticEnvironment, t0: f64) -> Result<SpinWaveState> {
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(Error::param("tau", tau, "storage interval must be finite and >= 0"));
    }
    if !(t0 > 0.0) {
        return Err(Error::param("t0", t0, "lifetime must be > 0"));
    }
    let decay = (-tau / (2.0 * t0)).exp();
    let larmor = Complex64::from_polar(1.0, 2.0 * env.larmor() * tau);
    Ok(SpinWaveState {
        s_ca: state.s_ca * decay,
        s_ba: state.s_ba * larmor * decay,
        envelope: state.envelope,
        elapsed: state.elapsed + tau,
    })
}

/// Projective read: the bright component leaves as light, the dark component
/// stays stored. `|output|^2 + remaining.stored_norm() == state.stored_norm()`.
pub fn read(state: &SpinWaveState, readpair: &BeamPair) -> Result<ReadOutcome> {
    let (u_ca, u_ba) = readpair.bright_direction().ok_or(Error::InvalidRead)?;
    let bright = u_ca.conj() * state.s_ca + u_ba.conj() * state.s_ba;
    Ok(ReadOutcome {
        output: bright,
        remaining: SpinWaveState {
            s_ca: state.s_ca - bright * u_ca,
            s_ba: state.s_ba - bright * u_ba,
            ..*state
        },
    })
}

/// Total phase `Delta = delta_R - delta_W + 2 Omega_L tau`, wrapped.
pub fn total_phase(delta_r: f64, delta_w: f64, larmor: f64, tau: f64) -> f64 {
    phase::wrap(delta_r - delta_w + 2.0 * larmor * tau)
}

/// Two-beam readout intensity in units of a single-channel readout at the same
/// storage time: `2 cos^2(delta_R/2 - delta_W/2 + Omega_L tau)`.
pub fn readout_intensity(delta_r: f64, delta_w: f64, larmor: f64, tau: f64) -> f64 {
    2.0 * phase::cos2(0.5 * delta_r - 0.5 * delta_w + larmor * tau)
}

/// `R_e(t) = A [1 + cos(2 Omega_L t - phi)] e^{-t/t0}`.
pub fn retrieval_efficiency(t: f64, a: f64, larmor: f64, phi: f64, t0: f64) -> Result<f64> {
    if !(t0 > 0.0) {
        return Err(Error::param("t0", t0, "lifetime must be > 0"));
    }
    if !(a >= 0.0) {
        return Err(Error::param("a", a, "baseline efficiency must be >= 0"));
    }
    if !(t >= 0.0) {
        return Err(Error::param("t", t, "storage time must be >= 0"));
    }
    Ok(a * (1.0 + (2.0 * larmor * t - phi).cos()) * (-t / t0).exp())
}

/// Populations of `(sigma_ba + sigma_ca)|a>/sqrt2` and
/// `(sigma_ba - sigma_ca)|a>/sqrt2` for an equal-amplitude spin wave written
/// with relative phase `delta_w` after time `t`.
pub fn superposition_populations(t: f64, delta_w: f64, larmor: f64) -> (f64, f64) {
    let x = larmor * t - 0.5 * delta_w;
    let (s, c) = x.sin_cos();
    (c * c, s * s)
}

/// Population projected onto `(e^{-i delta_R/2} sigma_ba + e^{i delta_R/2} sigma_ca)|a>/sqrt2`.
///
/// Equal to `readout_intensity(...) / 2` for every input.
pub fn projected_population(delta_r: f64, delta_w: f64, larmor: f64, t: f64) -> f64 {
    phase::cos2(0.5 * delta_r - 0.5 * delta_w + larmor * t)
}

/// Read-pair relative phase that makes `Delta = 0` at storage time `tau`.
pub fn compensation_phase(tau: f64, larmor: f64, delta_w: f64) -> f64 {
    phase::wrap(delta_w - 2.0 * larmor * tau)
}
