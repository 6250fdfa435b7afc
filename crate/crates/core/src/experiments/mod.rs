//! Scenario runners built on both engines.
//!
//! Every scenario is a write followed by a list of timed reads
//! ([`ExperimentSchedule`]). The analytic engine runs it through
//! store / evolve / projective read, the numeric engine through
//! [`dynamics::simulate`]. Both report per-read [`Reading`]s in the same units:
//!
//! * `energy`: retrieved energy in units of the probe energy, referred to the
//!   schedule's storage efficiency.
//! * `intensity`: energy divided by a single-channel readout of an
//!   equal-amplitude two-channel store at the same storage time, i.e.
//!   `store_efficiency / 2 * probe_energy * e^{-t/t0}`.
//!
//! Numeric energies are rescaled by the ratio of the schedule's storage
//! efficiency to the simulated stored norm and divided by the collective
//! retrieval fraction `kappa / (kappa + Gamma_e)`, so that the numeric oracle
//! and the closed form can be compared number for number.

mod config;
mod scenarios;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;

use crate::analytic;
use crate::dynamics::{self, AtomParams, BeamRamp, SimConfig, SimGrid};
use crate::error::{Error, Result};
use crate::params::{BeamPair, ProbePulse};

pub use config::{ExperimentConfig, NumericParams, PhysicsParams, TimingParams};
pub use scenarios::{
    fig4_grid, fig5_times, fit_fringe, fringe_grid, oracle_cases, run_fig2, run_fig3, run_fig4, run_fig5,
    run_fringe, run_isolation, run_oracle, Fig2, Fig3, Fig4Row, OracleCase, OracleOutcome,
};

/// Largest accepted analytic / numeric discrepancy, as a fraction of the
/// full-scale two-channel intensity.
pub const DISCREPANCY_TOLERANCE: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Engine {
    Analytic,
    Numeric,
    Both,
}

impl Engine {
    pub fn runs_analytic(self) -> bool {
        matches!(self, Engine::Analytic | Engine::Both)
    }

    pub fn runs_numeric(self) -> bool {
        matches!(self, Engine::Numeric | Engine::Both)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Engine::Analytic => "analytic",
            Engine::Numeric => "numeric",
            Engine::Both => "both",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownEngine;

impl fmt::Display for UnknownEngine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("expected one of: analytic, numeric, both")
    }
}

impl FromStr for Engine {
    type Err = UnknownEngine;

    fn from_str(s: &str) -> core::result::Result<Self, Self::Err> {
        match s {
            "analytic" => Ok(Engine::Analytic),
            "numeric" => Ok(Engine::Numeric),
            "both" => Ok(Engine::Both),
            _ => Err(UnknownEngine),
        }
    }
}

/// A read pair applied at `time` seconds after the write beams switch off.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReadEvent {
    pub time: f64,
    pub pair: BeamPair,
}

/// Write, probe and timed reads of one scenario.
///
/// Beam magnitudes are relative weights; the numeric engine multiplies them
/// by the configured write / read Rabi frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSchedule {
    pub scenario: String,
    pub write: BeamPair,
    pub probe: ProbePulse,
    pub store_efficiency: f64,
    pub events: Vec<ReadEvent>,
    pub engine: Engine,
}

impl ExperimentSchedule {
    pub fn new(
        scenario: impl Into<String>,
        write: BeamPair,
        probe: ProbePulse,
        store_efficiency: f64,
        events: Vec<ReadEvent>,
        engine: Engine,
    ) -> Result<Self> {
        if write.is_dark() {
            return Err(Error::InvalidWrite);
        }
        if !(0.0..=1.0).contains(&store_efficiency) {
            return Err(Error::param("store_efficiency", store_efficiency, "storage efficiency must lie in [0, 1]"));
        }
        let mut last = probe.end();
        for ev in &events {
            if !ev.time.is_finite() || ev.time <= last {
                return Err(Error::InvalidSchedule(
                    "read times must be finite, strictly increasing and after the probe has passed",
                ));
            }
            if ev.pair.is_dark() {
                return Err(Error::InvalidRead);
            }
            last = ev.time;
        }
        Ok(Self {
            scenario: scenario.into(),
            write,
            probe,
            store_efficiency,
            events,
            engine,
        })
    }
}

/// One engine's view of one read.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reading {
    pub intensity: f64,
    pub energy: f64,
    pub remaining_norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventRecord {
    pub time: f64,
    /// Relative phase of the read pair, wrapped.
    pub delta_r: f64,
    /// `delta_R - delta_W + 2 Omega_L t`, wrapped.
    pub total_phase: f64,
    pub analytic: Option<Reading>,
    pub numeric: Option<Reading>,
}

impl EventRecord {
    /// Analytic reading when available, numeric otherwise.
    pub fn reading(&self) -> Reading {
        self.analytic.or(self.numeric).expect("an event carries at least one engine reading")
    }

    pub fn discrepancy(&self) -> Option<f64> {
        Some(discrepancy(self.analytic?.intensity, self.numeric?.intensity))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReadoutRecord {
    pub schedule: ExperimentSchedule,
    pub events: Vec<EventRecord>,
}

impl ReadoutRecord {
    /// Largest per-event discrepancy; `None` unless both engines ran.
    pub fn max_discrepancy(&self) -> Option<f64> {
        self.events
            .iter()
            .filter_map(EventRecord::discrepancy)
            .fold(None, |acc, d| Some(acc.map_or(d, |a: f64| a.max(d))))
    }
}

/// `|numeric - analytic| / 2`: difference in units of the full two-channel
/// intensity.
pub fn discrepancy(analytic: f64, numeric: f64) -> f64 {
    (numeric - analytic).abs() / 2.0
}

/// Run a schedule on the engines it selects.
pub fn run_schedule(cfg: &ExperimentConfig, schedule: &ExperimentSchedule) -> Result<ReadoutRecord> {
    let analytic = if schedule.engine.runs_analytic() {
        Some(run_analytic(cfg, schedule)?)
    } else {
        None
    };
    let numeric = if schedule.engine.runs_numeric() {
        Some(run_numeric(cfg, schedule)?)
    } else {
        None
    };
    let delta_w = schedule.write.delta();
    let events = schedule
        .events
        .iter()
        .enumerate()
        .map(|(k, ev)| EventRecord {
            time: ev.time,
            delta_r: ev.pair.delta(),
            total_phase: analytic::total_phase(ev.pair.delta(), delta_w, cfg.physics.env.larmor(), ev.time),
            analytic: analytic.as_ref().map(|r| r[k]),
            numeric: numeric.as_ref().map(|r| r[k]),
        })
        .collect();
    Ok(ReadoutRecord {
        schedule: schedule.clone(),
        events,
    })
}

fn run_analytic(cfg: &ExperimentConfig, schedule: &ExperimentSchedule) -> Result<Vec<Reading>> {
    let p = &cfg.physics;
    let mut state = analytic::store(&schedule.probe, &schedule.write, schedule.store_efficiency)?;
    let mut now = 0.0;
    let mut out = Vec::with_capacity(schedule.events.len());
    for ev in &schedule.events {
        state = analytic::evolve(&state, ev.time - now, &p.env, p.lifetime)?;
        now = ev.time;
        let r = analytic::read(&state, &ev.pair)?;
        let energy = r.energy();
        state = r.remaining;
        out.push(Reading {
            intensity: cfg.intensity(energy, ev.time),
            energy,
            remaining_norm: state.stored_norm(),
        });
    }
    Ok(out)
}

/// Time-domain configuration the numeric engine integrates for `schedule`.
pub fn numeric_config(cfg: &ExperimentConfig, schedule: &ExperimentSchedule) -> Result<SimConfig> {
    let n = &cfg.numeric;
    let write = BeamRamp::new(schedule.write.scaled(n.write_rabi), -n.write_duration, 0.0, n.write_ramp)?;
    let reads = schedule
        .events
        .iter()
        .map(|ev| BeamRamp::new(ev.pair.scaled(n.read_rabi), ev.time, ev.time + n.read_duration, n.read_ramp))
        .collect::<Result<Vec<_>>>()?;
    Ok(SimConfig {
        probe: schedule.probe,
        write,
        reads,
        env: cfg.physics.env,
        atoms: cfg.atoms()?,
        grid: SimGrid::new(n.nz, n.dt)?,
    })
}

fn run_numeric(cfg: &ExperimentConfig, schedule: &ExperimentSchedule) -> Result<Vec<Reading>> {
    let sim_cfg = numeric_config(cfg, schedule)?;
    let sim = dynamics::simulate(&sim_cfg)?;
    let stored = sim.energies.stored;
    let target = schedule.store_efficiency * schedule.probe.energy;
    let scale = if stored > 0.0 { target / stored } else { 0.0 };
    let rho = sim_cfg.atoms.retrieval_fraction();
    Ok(schedule
        .events
        .iter()
        .zip(&sim.reads)
        .map(|(ev, w)| {
            let energy = w.energy * scale / rho;
            Reading {
                intensity: cfg.intensity(energy, ev.time),
                energy,
                remaining_norm: w.remaining_norm * scale,
            }
        })
        .collect())
}

impl ExperimentConfig {
    /// Energy of a single-channel readout of an equal-amplitude two-channel
    /// store after `t` seconds.
    pub fn single_channel_energy(&self, t: f64) -> f64 {
        let p = &self.physics;
        0.5 * p.store_efficiency * p.probe_energy * (-t / p.lifetime).exp()
    }

    /// `energy` in units of [`single_channel_energy`](Self::single_channel_energy).
    pub fn intensity(&self, energy: f64, t: f64) -> f64 {
        let unit = self.single_channel_energy(t);
        if unit > 0.0 {
            energy / unit
        } else {
            0.0
        }
    }

    /// Retrieved energy per unit probe energy.
    pub fn efficiency(&self, reading: &Reading) -> f64 {
        if self.physics.probe_energy > 0.0 {
            reading.energy / self.physics.probe_energy
        } else {
            0.0
        }
    }

    pub fn atoms(&self) -> Result<AtomParams> {
        let n = &self.numeric;
        let atoms = AtomParams::new(n.gn, n.gamma_e, self.physics.lifetime, n.length)?;
        Ok(if n.closed_system { atoms.closed() } else { atoms })
    }
}
