use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::params::{MagneticEnvironment, ProbePulse};

const MHZ: f64 = 2.0 * PI * 1e6;

/// Physical parameters shared by both engines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicsParams {
    pub env: MagneticEnvironment,
    /// Write-pair relative phase `delta_W`, rad.
    pub delta_w: f64,
    /// Fixed read-pair relative phase for uncompensated sweeps, rad.
    pub delta_r: f64,
    /// Spin-wave lifetime `t0` (intensity), s.
    pub lifetime: f64,
    /// Two-channel storage efficiency (stored norm per unit probe energy).
    pub store_efficiency: f64,
    /// Storage efficiency of the single-channel reference.
    pub lambda_efficiency: f64,
    pub probe_fwhm: f64,
    pub probe_energy: f64,
}

/// Read times, s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingParams {
    pub tau: f64,
    pub second_read: f64,
    pub sweep_start: f64,
    pub sweep_end: f64,
}

/// Time-domain model settings. Rabi frequencies are per beam component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericParams {
    pub gn: f64,
    pub gamma_e: f64,
    pub length: f64,
    pub nz: usize,
    pub dt: f64,
    pub write_rabi: f64,
    pub read_rabi: f64,
    /// Write beams are on from `-write_duration` to `0`.
    pub write_duration: f64,
    pub write_ramp: f64,
    pub read_ramp: f64,
    pub read_duration: f64,
    /// Probe peak relative to the write switch-off.
    pub probe_center: f64,
    pub closed_system: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ExperimentConfig {
    pub physics: PhysicsParams,
    pub timing: TimingParams,
    pub numeric: NumericParams,
}

impl Default for PhysicsParams {
    fn default() -> Self {
        let baseline = 0.05;
        Self {
            env: MagneticEnvironment::from_larmor(0.21 * MHZ, 0.5).expect("default Larmor frequency is valid"),
            delta_w: 0.5 * PI,
            delta_r: 0.2 * PI,
            lifetime: 90e-6,
            store_efficiency: 2.0 * baseline,
            lambda_efficiency: baseline,
            probe_fwhm: 100e-9,
            probe_energy: 1.0,
        }
    }
}

impl Default for TimingParams {
    fn default() -> Self {
        Self {
            tau: 380e-9,
            second_read: 3.4e-6,
            sweep_start: 0.38e-6,
            sweep_end: 100e-6,
        }
    }
}

impl Default for NumericParams {
    fn default() -> Self {
        Self {
            gn: 1000.0 * MHZ,
            gamma_e: 5.75 * MHZ,
            length: 1.0,
            nz: 1,
            dt: 12e-12,
            write_rabi: 50.0 * MHZ,
            read_rabi: 150.0 * MHZ,
            write_duration: 4e-9,
            write_ramp: 2e-9,
            read_ramp: 3e-9,
            read_duration: 12e-9,
            probe_center: 0.0,
            closed_system: false,
        }
    }
}

fn non_negative(name: &'static str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::param(name, v, "must be finite and >= 0"))
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::param(name, v, "must be finite and > 0"))
    }
}

fn fraction(name: &'static str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::param(name, v, "must lie in [0, 1]"))
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let p = &self.physics;
        for (name, v) in [("delta_w", p.delta_w), ("delta_r", p.delta_r)] {
            if !v.is_finite() {
                return Err(Error::param(name, v, "phase must be finite"));
            }
        }
        if !(p.lifetime > 0.0) {
            return Err(Error::param("lifetime", p.lifetime, "must be > 0"));
        }
        fraction("store_efficiency", p.store_efficiency)?;
        fraction("lambda_efficiency", p.lambda_efficiency)?;
        positive("probe_fwhm", p.probe_fwhm)?;
        non_negative("probe_energy", p.probe_energy)?;

        let t = &self.timing;
        non_negative("tau", t.tau)?;
        non_negative("second_read", t.second_read)?;
        non_negative("sweep_start", t.sweep_start)?;
        non_negative("sweep_end", t.sweep_end)?;
        if t.second_read <= t.tau {
            return Err(Error::param("second_read", t.second_read, "second read must come after tau"));
        }
        if t.sweep_end < t.sweep_start {
            return Err(Error::param("sweep_end", t.sweep_end, "sweep must end after it starts"));
        }

        let n = &self.numeric;
        positive("gn", n.gn)?;
        positive("gamma_e", n.gamma_e)?;
        positive("length", n.length)?;
        positive("dt", n.dt)?;
        if n.nz == 0 {
            return Err(Error::param("nz", 0.0, "need at least one slice"));
        }
        positive("write_rabi", n.write_rabi)?;
        positive("read_rabi", n.read_rabi)?;
        positive("write_duration", n.write_duration)?;
        positive("write_ramp", n.write_ramp)?;
        positive("read_ramp", n.read_ramp)?;
        positive("read_duration", n.read_duration)?;
        if !n.probe_center.is_finite() {
            return Err(Error::param("probe_center", n.probe_center, "must be finite"));
        }
        Ok(())
    }

    /// Gaussian probe of the configured width and energy.
    pub fn probe(&self) -> Result<ProbePulse> {
        ProbePulse::gaussian(self.numeric.probe_center, self.physics.probe_fwhm, self.physics.probe_energy)
    }
}
