use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{run_schedule, Engine, EventRecord, ExperimentConfig, ExperimentSchedule, ReadEvent, ReadoutRecord};
use crate::analytic::compensation_phase;
use crate::error::{Error, Result};
use crate::fit::{fit_sinusoid, SinusoidFit};
use crate::params::BeamPair;
use crate::phase;

fn balanced(delta: f64) -> Result<BeamPair> {
    BeamPair::balanced(1.0, delta)
}

fn two_channel(
    cfg: &ExperimentConfig,
    scenario: &str,
    delta_w: f64,
    events: Vec<ReadEvent>,
    engine: Engine,
) -> Result<ExperimentSchedule> {
    ExperimentSchedule::new(scenario, balanced(delta_w)?, cfg.probe()?, cfg.physics.store_efficiency, events, engine)
}

fn at(time: f64, pair: BeamPair) -> ReadEvent {
    ReadEvent { time, pair }
}

fn compensated(cfg: &ExperimentConfig, t: f64) -> f64 {
    compensation_phase(t, cfg.physics.env.larmor(), cfg.physics.delta_w)
}

/// Single-channel reference and the three reads of a two-channel store.
#[derive(Debug, Clone, PartialEq)]
pub struct Fig2 {
    /// sigma+ write, sigma+ read.
    pub a: ReadoutRecord,
    /// Two-channel write, sigma- read.
    pub b: ReadoutRecord,
    /// Two-channel write, sigma+ read.
    pub c: ReadoutRecord,
    /// Two-channel write, two-beam read at zero total phase.
    pub d: ReadoutRecord,
}

pub fn run_fig2(cfg: &ExperimentConfig, engine: Engine) -> Result<Fig2> {
    cfg.validate()?;
    let tau = cfg.timing.tau;
    let dw = cfg.physics.delta_w;
    let single = ExperimentSchedule::new(
        "fig2a",
        BeamPair::plus_only(1.0, 0.5 * dw)?,
        cfg.probe()?,
        cfg.physics.lambda_efficiency,
        vec![at(tau, BeamPair::plus_only(1.0, 0.0)?)],
        engine,
    )?;
    let b = two_channel(cfg, "fig2b", dw, vec![at(tau, BeamPair::minus_only(1.0, 0.0)?)], engine)?;
    let c = two_channel(cfg, "fig2c", dw, vec![at(tau, BeamPair::plus_only(1.0, 0.0)?)], engine)?;
    let d = two_channel(cfg, "fig2d", dw, vec![at(tau, balanced(compensated(cfg, tau))?)], engine)?;
    Ok(Fig2 {
        a: run_schedule(cfg, &single)?,
        b: run_schedule(cfg, &b)?,
        c: run_schedule(cfg, &c)?,
        d: run_schedule(cfg, &d)?,
    })
}

/// Destructive first read followed by a late read, and the late read alone.
#[derive(Debug, Clone, PartialEq)]
pub struct Fig3 {
    pub a: ReadoutRecord,
    pub b: ReadoutRecord,
}

pub fn run_fig3(cfg: &ExperimentConfig, engine: Engine) -> Result<Fig3> {
    cfg.validate()?;
    let (t1, t2) = (cfg.timing.tau, cfg.timing.second_read);
    let dw = cfg.physics.delta_w;
    let late = at(t2, balanced(dw)?);
    let a = two_channel(cfg, "fig3a", dw, vec![at(t1, balanced(compensated(cfg, t1) + PI)?), late], engine)?;
    let b = two_channel(cfg, "fig3b", dw, vec![late], engine)?;
    Ok(Fig3 {
        a: run_schedule(cfg, &a)?,
        b: run_schedule(cfg, &b)?,
    })
}

/// One point of the two-read phase sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fig4Row {
    pub delta_r: f64,
    pub first: EventRecord,
    /// Second read aligned with the component the first read left behind.
    pub second: EventRecord,
    /// Second read with the write-pair phase instead.
    pub second_literal: EventRecord,
}

impl Fig4Row {
    /// `(E1 e^{t1/t0} + E2 e^{t2/t0}) / (store_efficiency * probe_energy)`,
    /// from the analytic reading when present.
    pub fn corrected_sum(&self) -> f64 {
        0.5 * (self.first.reading().intensity + self.second.reading().intensity)
    }

    pub fn corrected_sum_numeric(&self) -> Option<f64> {
        Some(0.5 * (self.first.numeric?.intensity + self.second.numeric?.intensity))
    }
}

/// `points` read phases spaced by `2 pi / points`, starting at the
/// compensated phase for `tau`, wrapped and sorted.
pub fn fig4_grid(cfg: &ExperimentConfig, points: usize) -> Vec<f64> {
    let start = compensated(cfg, cfg.timing.tau);
    let mut grid: Vec<f64> = (0..points)
        .map(|k| phase::wrap(start + TAU * k as f64 / points as f64))
        .collect();
    grid.sort_by(f64::total_cmp);
    grid
}

pub fn run_fig4(cfg: &ExperimentConfig, engine: Engine, delta_r: &[f64]) -> Result<Vec<Fig4Row>> {
    cfg.validate()?;
    if delta_r.is_empty() {
        return Err(Error::InvalidSchedule("phase grid is empty"));
    }
    let (t1, t2) = (cfg.timing.tau, cfg.timing.second_read);
    let dw = cfg.physics.delta_w;
    let drift = 2.0 * cfg.physics.env.larmor() * (t2 - t1);
    delta_r
        .iter()
        .map(|&dr| {
            let first = at(t1, balanced(dr)?);
            let aligned = two_channel(cfg, "fig4", dw, vec![first, at(t2, balanced(dr + PI - drift)?)], engine)?;
            let literal = two_channel(cfg, "fig4", dw, vec![first, at(t2, balanced(dw)?)], engine)?;
            let aligned = run_schedule(cfg, &aligned)?;
            let literal = run_schedule(cfg, &literal)?;
            Ok(Fig4Row {
                delta_r: phase::wrap(dr),
                first: aligned.events[0],
                second: aligned.events[1],
                second_literal: literal.events[1],
            })
        })
        .collect()
}

/// `points` storage times evenly spaced over the configured sweep range.
pub fn fig5_times(cfg: &ExperimentConfig, points: usize) -> Vec<f64> {
    let (a, b) = (cfg.timing.sweep_start, cfg.timing.sweep_end);
    match points {
        0 => Vec::new(),
        1 => vec![a],
        n => (0..n)
            .map(|k| if k + 1 == n { b } else { a + (b - a) * k as f64 / (n - 1) as f64 })
            .collect(),
    }
}

/// Storage-time sweep. Uncompensated reads use the configured fixed
/// `delta_r`; compensated reads use the compensation phase of each time.
pub fn run_fig5(cfg: &ExperimentConfig, engine: Engine, times: &[f64], compensated_read: bool) -> Result<Vec<EventRecord>> {
    cfg.validate()?;
    if times.windows(2).any(|w| !(w[1] > w[0])) || times.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::InvalidSchedule("storage times must be positive and ascending"));
    }
    let dw = cfg.physics.delta_w;
    times
        .iter()
        .map(|&t| {
            let dr = if compensated_read { compensated(cfg, t) } else { cfg.physics.delta_r };
            let s = two_channel(cfg, "fig5", dw, vec![at(t, balanced(dr)?)], engine)?;
            Ok(run_schedule(cfg, &s)?.events[0])
        })
        .collect()
}

/// Store in `sigma_ba` only, read the `sigma_ca` channel, then the
/// `sigma_ba` channel at the second read time.
pub fn run_isolation(cfg: &ExperimentConfig, engine: Engine) -> Result<ReadoutRecord> {
    cfg.validate()?;
    let s = ExperimentSchedule::new(
        "isolation",
        BeamPair::minus_only(1.0, -0.5 * cfg.physics.delta_w)?,
        cfg.probe()?,
        cfg.physics.store_efficiency,
        vec![
            at(cfg.timing.tau, BeamPair::plus_only(1.0, 0.0)?),
            at(cfg.timing.second_read, BeamPair::minus_only(1.0, 0.0)?),
        ],
        engine,
    )?;
    run_schedule(cfg, &s)
}

/// `points` phases `2 pi k / points`.
pub fn fringe_grid(points: usize) -> Vec<f64> {
    (0..points).map(|k| TAU * k as f64 / points as f64).collect()
}

/// Two-beam read at `tau` for every read phase in `delta_r`.
pub fn run_fringe(cfg: &ExperimentConfig, engine: Engine, delta_r: &[f64]) -> Result<Vec<EventRecord>> {
    cfg.validate()?;
    let dw = cfg.physics.delta_w;
    delta_r
        .iter()
        .map(|&dr| {
            let s = two_channel(cfg, "fringe", dw, vec![at(cfg.timing.tau, balanced(dr)?)], engine)?;
            Ok(run_schedule(cfg, &s)?.events[0])
        })
        .collect()
}

/// Sinusoid fit of intensity against read phase. `numeric` selects the
/// engine column.
pub fn fit_fringe(points: &[EventRecord], numeric: bool) -> Option<SinusoidFit> {
    let mut xs = Vec::with_capacity(points.len());
    let mut ys = Vec::with_capacity(points.len());
    for p in points {
        let r = if numeric { p.numeric? } else { p.analytic? };
        xs.push(p.delta_r);
        ys.push(r.intensity);
    }
    fit_sinusoid(&xs, &ys, 0.5, 2.0)
}

/// A randomized `(delta_W, delta_R, tau)` equivalence case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleCase {
    pub delta_w: f64,
    pub delta_r: f64,
    pub tau: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOutcome {
    pub case: OracleCase,
    pub event: EventRecord,
}

impl OracleOutcome {
    pub fn discrepancy(&self) -> f64 {
        self.event.discrepancy().expect("oracle cases run both engines")
    }
}

/// `count` cases with phases uniform in `[0, 2pi)` and `tau` uniform in
/// `[tau_min, tau_max)`, reproducible from `seed`.
pub fn oracle_cases(seed: u64, count: usize, tau_min: f64, tau_max: f64) -> Vec<OracleCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| OracleCase {
            delta_w: rng.gen_range(0.0..TAU),
            delta_r: rng.gen_range(0.0..TAU),
            tau: rng.gen_range(tau_min..tau_max),
        })
        .collect()
}

/// Run every case on both engines.
pub fn run_oracle(cfg: &ExperimentConfig, cases: &[OracleCase]) -> Result<Vec<OracleOutcome>> {
    cfg.validate()?;
    cases
        .iter()
        .map(|&case| {
            let s = two_channel(cfg, "oracle", case.delta_w, vec![at(case.tau, balanced(case.delta_r)?)], Engine::Both)?;
            Ok(OracleOutcome {
                case,
                event: run_schedule(cfg, &s)?.events[0],
            })
        })
        .collect()
}
