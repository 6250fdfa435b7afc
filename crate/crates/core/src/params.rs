//! Beam, field and probe descriptions shared by both engines.

use core::f64::consts::{LN_2, PI};

use num_complex::Complex64;
#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::phase;

/// Bohr magneton, J/T.
const BOHR_MAGNETON: f64 = 9.274_010_078_3e-24;
/// Reduced Planck constant, J s.
const HBAR: f64 = 1.054_571_817e-34;
const TESLA_PER_GAUSS: f64 = 1e-4;

/// The two circularly polarized components of a write or read coupling beam.
///
/// The slowly varying Rabi frequencies are `Omega+ = |Omega+| e^{-i phi+}`
/// (drives `|c> <-> |e>`) and `Omega- = |Omega-| e^{-i phi-}` (drives
/// `|b> <-> |e>`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamPair {
    pub omega_plus_mag: f64,
    pub omega_minus_mag: f64,
    pub phi_plus: f64,
    pub phi_minus: f64,
}

impl BeamPair {
    pub fn new(omega_plus_mag: f64, omega_minus_mag: f64, phi_plus: f64, phi_minus: f64) -> Result<Self> {
        for (name, v) in [("omega_plus_mag", omega_plus_mag), ("omega_minus_mag", omega_minus_mag)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::param(name, v, "Rabi magnitude must be finite and >= 0"));
            }
        }
        for (name, v) in [("phi_plus", phi_plus), ("phi_minus", phi_minus)] {
            if !v.is_finite() {
                return Err(Error::param(name, v, "phase must be finite"));
            }
        }
        Ok(Self {
            omega_plus_mag,
            omega_minus_mag,
            phi_plus,
            phi_minus,
        })
    }

    /// Equal-magnitude pair with relative phase `delta`, split symmetrically
    /// as `phi+ = delta/2`, `phi- = -delta/2`.
    pub fn balanced(magnitude: f64, delta: f64) -> Result<Self> {
        Self::new(magnitude, magnitude, 0.5 * delta, -0.5 * delta)
    }

    /// Only the sigma+ component (reads/writes `sigma_ca`).
    pub fn plus_only(magnitude: f64, phi_plus: f64) -> Result<Self> {
        Self::new(magnitude, 0.0, phi_plus, 0.0)
    }

    /// Only the sigma- component (reads/writes `sigma_ba`).
    pub fn minus_only(magnitude: f64, phi_minus: f64) -> Result<Self> {
        Self::new(0.0, magnitude, 0.0, phi_minus)
    }

    /// Relative phase `phi+ - phi-`, wrapped to `[0, 2pi)`.
    pub fn delta(&self) -> f64 {
        phase::wrap(self.phi_plus - self.phi_minus)
    }

    /// `sqrt(|Omega+|^2 + |Omega-|^2)`.
    pub fn total_magnitude(&self) -> f64 {
        self.omega_plus_mag.hypot(self.omega_minus_mag)
    }

    pub fn is_dark(&self) -> bool {
        self.total_magnitude() == 0.0
    }

    /// Normalized weights `(w+, w-)`, `None` when both magnitudes vanish.
    pub fn weights(&self) -> Option<(f64, f64)> {
        let total = self.total_magnitude();
        (total > 0.0).then(|| (self.omega_plus_mag / total, self.omega_minus_mag / total))
    }

    /// Complex Rabi frequencies `(Omega+, Omega-)`.
    pub fn rabi(&self) -> (Complex64, Complex64) {
        (
            Complex64::from_polar(self.omega_plus_mag, -self.phi_plus),
            Complex64::from_polar(self.omega_minus_mag, -self.phi_minus),
        )
    }

    /// Unit spin-wave direction `(w+ e^{i phi+}, w- e^{i phi-})` that this
    /// pair writes into and reads out of, ordered `(sigma_ca, sigma_ba)`.
    pub fn bright_direction(&self) -> Option<(Complex64, Complex64)> {
        let (wp, wm) = self.weights()?;
        Some((
            Complex64::from_polar(wp, self.phi_plus),
            Complex64::from_polar(wm, self.phi_minus),
        ))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            omega_plus_mag: self.omega_plus_mag * factor,
            omega_minus_mag: self.omega_minus_mag * factor,
            ..*self
        }
    }
}

/// Bias field along the quantization axis and the resulting Larmor frequency.
///
/// `larmor` is always `g_F mu_B B / hbar`; `2 larmor` is the Zeeman splitting
/// between `|b>` and `|c>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagneticEnvironment {
    b_field: f64,
    g_factor: f64,
    larmor: f64,
}

impl MagneticEnvironment {
    /// `b_field` in gauss.
    pub fn new(b_field: f64, g_factor: f64) -> Result<Self> {
        if !(b_field >= 0.0) || !b_field.is_finite() {
            return Err(Error::param("b_field", b_field, "field must be finite and >= 0"));
        }
        if !g_factor.is_finite() || g_factor == 0.0 {
            return Err(Error::param("g_factor", g_factor, "Lande factor must be finite and nonzero"));
        }
        Ok(Self {
            b_field,
            g_factor,
            larmor: g_factor * BOHR_MAGNETON * b_field * TESLA_PER_GAUSS / HBAR,
        })
    }

    /// Environment with a prescribed Larmor frequency (rad/s); the field is
    /// back-computed so that the two stay consistent.
    pub fn from_larmor(larmor: f64, g_factor: f64) -> Result<Self> {
        if !(larmor >= 0.0) || !larmor.is_finite() {
            return Err(Error::param("larmor", larmor, "Larmor frequency must be finite and >= 0"));
        }
        if !g_factor.is_finite() || g_factor == 0.0 {
            return Err(Error::param("g_factor", g_factor, "Lande factor must be finite and nonzero"));
        }
        let b_field = larmor * HBAR / (g_factor * BOHR_MAGNETON * TESLA_PER_GAUSS);
        Ok(Self {
            b_field,
            g_factor,
            larmor,
        })
    }

    /// No field: no precession.
    pub fn field_free() -> Self {
        Self {
            b_field: 0.0,
            g_factor: 0.5,
            larmor: 0.0,
        }
    }

    pub fn b_field(&self) -> f64 {
        self.b_field
    }

    pub fn g_factor(&self) -> f64 {
        self.g_factor
    }

    /// Larmor angular frequency, rad/s.
    pub fn larmor(&self) -> f64 {
        self.larmor
    }

    /// Larmor frequency in Hz (`g_F mu_B B / h`).
    pub fn larmor_hz(&self) -> f64 {
        self.larmor / (2.0 * PI)
    }

    /// Zeeman splitting between `|b>` and `|c>`, rad/s.
    pub fn zeeman_splitting(&self) -> f64 {
        2.0 * self.larmor
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PulseShape {
    /// Gaussian intensity profile with the given full width at half maximum.
    Gaussian { center: f64, fwhm: f64 },
    /// Flat-top pulse.
    Square { start: f64, duration: f64 },
}

/// Input probe envelope, real and positive (initial phase zero), normalized so
/// that `integral |eps(t)|^2 dt = energy`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbePulse {
    pub shape: PulseShape,
    pub energy: f64,
}

impl ProbePulse {
    pub fn gaussian(center: f64, fwhm: f64, energy: f64) -> Result<Self> {
        if !(fwhm > 0.0) || !fwhm.is_finite() {
            return Err(Error::param("fwhm", fwhm, "pulse width must be finite and > 0"));
        }
        if !center.is_finite() {
            return Err(Error::param("center", center, "pulse center must be finite"));
        }
        Self::checked(PulseShape::Gaussian { center, fwhm }, energy)
    }

    pub fn square(start: f64, duration: f64, energy: f64) -> Result<Self> {
        if !(duration > 0.0) || !duration.is_finite() {
            return Err(Error::param("duration", duration, "pulse duration must be finite and > 0"));
        }
        if !start.is_finite() {
            return Err(Error::param("start", start, "pulse start must be finite"));
        }
        Self::checked(PulseShape::Square { start, duration }, energy)
    }

    fn checked(shape: PulseShape, energy: f64) -> Result<Self> {
        if !(energy >= 0.0) || !energy.is_finite() {
            return Err(Error::param("energy", energy, "pulse energy must be finite and >= 0"));
        }
        Ok(Self { shape, energy })
    }

    /// Intensity FWHM (the full duration for a square pulse).
    pub fn duration(&self) -> f64 {
        match self.shape {
            PulseShape::Gaussian { fwhm, .. } => fwhm,
            PulseShape::Square { duration, .. } => duration,
        }
    }

    /// `|eps(t)|^2`.
    pub fn intensity(&self, t: f64) -> f64 {
        if self.energy == 0.0 {
            return 0.0;
        }
        match self.shape {
            PulseShape::Gaussian { center, fwhm } => {
                let a = 4.0 * LN_2 / (fwhm * fwhm);
                let x = t - center;
                self.energy * (a / PI).sqrt() * (-a * x * x).exp()
            }
            PulseShape::Square { start, duration } => {
                if t >= start && t < start + duration {
                    self.energy / duration
                } else {
                    0.0
                }
            }
        }
    }

    pub fn amplitude(&self, t: f64) -> Complex64 {
        Complex64::new(self.intensity(t).sqrt(), 0.0)
    }

    /// Time before which the pulse is negligible (intensity below `e^-25` of peak).
    pub fn start(&self) -> f64 {
        match self.shape {
            PulseShape::Gaussian { center, fwhm } => center - 3.0 * fwhm,
            PulseShape::Square { start, .. } => start,
        }
    }

    /// Time after which the pulse is negligible.
    pub fn end(&self) -> f64 {
        match self.shape {
            PulseShape::Gaussian { center, fwhm } => center + 3.0 * fwhm,
            PulseShape::Square { start, duration } => start + duration,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn larmor_from_reference_field() {
        // g_F mu_B B / h at B = 300 mG, g_F = 1/2
        let env = MagneticEnvironment::new(0.3, 0.5).unwrap();
        let mhz = env.larmor_hz() / 1e6;
        assert!((mhz - 0.21).abs() / 0.21 < 5e-3, "{mhz}");
        assert!((env.zeeman_splitting() - 2.0 * env.larmor()).abs() < 1e-9);
    }

    #[test]
    fn larmor_round_trip() {
        let env = MagneticEnvironment::from_larmor(2.0 * PI * 0.21e6, 0.5).unwrap();
        let back = MagneticEnvironment::new(env.b_field(), 0.5).unwrap();
        assert!((back.larmor() - env.larmor()).abs() / env.larmor() < 1e-12);
        assert!((env.b_field() - 0.3).abs() < 1e-3);
    }

    #[test]
    fn delta_is_wrapped() {
        let p = BeamPair::new(1.0, 1.0, 0.1, 0.3).unwrap();
        assert!((p.delta() - (2.0 * PI - 0.2)).abs() < 1e-12);
        assert!(BeamPair::new(-1.0, 1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn gaussian_energy_normalization() {
        let p = ProbePulse::gaussian(0.0, 100e-9, 2.5).unwrap();
        let n = 20_000;
        let (a, b) = (p.start(), p.end());
        let h = (b - a) / n as f64;
        let sum: f64 = (0..=n)
            .map(|k| {
                let w = if k == 0 || k == n { 0.5 } else { 1.0 };
                w * p.intensity(a + k as f64 * h)
            })
            .sum();
        assert!((sum * h - 2.5).abs() < 1e-9);
        // half maximum at +-fwhm/2
        let peak = p.intensity(0.0);
        assert!((p.intensity(50e-9) / peak - 0.5).abs() < 1e-12);
    }
}
