use alloc::vec::Vec;

use super::{simulate, SimConfig};
use crate::error::{Error, Result};
use crate::params::BeamPair;

/// Run [`simulate`] once per read-pair relative phase, changing nothing but
/// the phases of the read ramps (`phi+ = delta/2`, `phi- = -delta/2`).
/// Returns `(delta_R, retrieved energy of the first read)`.
pub fn fringe_scan(base: &SimConfig, delta_r_values: &[f64]) -> Result<Vec<(f64, f64)>> {
    if base.reads.is_empty() {
        return Err(Error::InvalidSchedule("fringe scan needs at least one read"));
    }
    delta_r_values
        .iter()
        .map(|&delta| {
            if !delta.is_finite() {
                return Err(Error::param("delta_r", delta, "relative phase must be finite"));
            }
            let mut cfg = base.clone();
            for read in &mut cfg.reads {
                let p = read.pair;
                read.pair = BeamPair::new(p.omega_plus_mag, p.omega_minus_mag, 0.5 * delta, -0.5 * delta)?;
            }
            let result = simulate(&cfg)?;
            Ok((delta, result.reads[0].energy))
        })
        .collect()
}
