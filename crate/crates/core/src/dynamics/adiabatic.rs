use alloc::vec::Vec;

#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;

use super::{simulate, BeamRamp, SimConfig, SimResult};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiabaticityThresholds {
    /// Limit on `max |d theta/dt| / gN`.
    pub mixing_rate: f64,
    /// Limit on the excited-state population while a coupling beam is on.
    pub excited: f64,
}

impl Default for AdiabaticityThresholds {
    fn default() -> Self {
        Self {
            mixing_rate: 0.1,
            excited: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdiabaticityReport {
    pub max_mixing_rate: f64,
    pub peak_excited: f64,
    pub warnings: Vec<&'static str>,
}

impl AdiabaticityReport {
    pub fn is_adiabatic(&self) -> bool {
        self.warnings.is_empty()
    }

    pub fn from_result(cfg: &SimConfig, result: &SimResult, thresholds: AdiabaticityThresholds) -> Self {
        let gn = cfg.atoms.gn;
        let max_mixing_rate = core::iter::once(&cfg.write)
            .chain(&cfg.reads)
            .map(|r| ramp_mixing_rate(r, gn, cfg.grid.dt))
            .fold(0.0, f64::max);
        let peak_excited = result.peak_excited;
        let mut warnings = Vec::new();
        if max_mixing_rate > thresholds.mixing_rate {
            warnings.push("mixing angle changes too fast: beam switching is not adiabatic");
        }
        if peak_excited > thresholds.excited {
            warnings.push("excited-state population too large while coupling beams are on");
        }
        Self {
            max_mixing_rate,
            peak_excited,
            warnings,
        }
    }
}

/// Largest `|d theta/dt| / gN` along the edges of one ramp, with
/// `theta = atan(gN / |Omega(t)|)`, so `|d theta/dt| / gN = |dOmega/dt| / (gN^2 + Omega^2)`.
fn ramp_mixing_rate(ramp: &BeamRamp, gn: f64, dt: f64) -> f64 {
    let magnitude = ramp.pair.total_magnitude();
    if magnitude == 0.0 {
        return 0.0;
    }
    let w = ramp.ramp_width;
    let samples = ((w / dt).ceil() as usize).clamp(1000, 100_000);
    let mut worst = 0.0f64;
    for center in [ramp.on_time, ramp.off_time] {
        if !center.is_finite() {
            continue;
        }
        for k in 0..=samples {
            let t = center - 0.5 * w + w * k as f64 / samples as f64;
            let (f, df) = ramp.envelope_with_rate(t);
            let omega = magnitude * f;
            worst = worst.max((magnitude * df).abs() / (gn * gn + omega * omega));
        }
    }
    worst
}

/// Check a configuration for non-adiabatic switching: runs [`simulate`] for
/// the excited-state population.
pub fn adiabaticity_report(cfg: &SimConfig, thresholds: AdiabaticityThresholds) -> Result<AdiabaticityReport> {
    let result = simulate(cfg)?;
    Ok(AdiabaticityReport::from_result(cfg, &result, thresholds))
}
