//! Time-domain oracle: single-excitation amplitude equations of the tripod
//! atom driven by ramped coupling beams and a propagating probe envelope.
//!
//! Per medium slice `j` the amplitudes are `p` (excited state, `sigma_ea`),
//! `c` (`sigma_ca`) and `b` (`sigma_ba`); the ground state `|a>` stays
//! undepleted. With `Omega+-(t)` the complex Rabi frequencies of all active
//! ramps, `kappa_j = kappa / nz` and `E_{j-1}` the probe entering the slice:
//!
//! ```text
//! dp/dt = -(kappa_j + Gamma_e)/2 p + i (Omega+ c + Omega- b) + sqrt(kappa_j) E_{j-1}
//! dc/dt =  i conj(Omega+) p - (i Omega_L + 1/(2 t0)) c
//! db/dt =  i conj(Omega-) p + (i Omega_L - 1/(2 t0)) b
//! E_j   =  E_{j-1} - sqrt(kappa_j) p
//! ```
//!
//! The field is swept upwind through the slices in retarded time, so the
//! output of the last slice is the transmitted / retrieved probe. `kappa =
//! gN * length` is the collective emission rate into the forward probe mode;
//! `Gamma_e` is the spontaneous loss out of the mode. Without loss and
//! without ground-state decay, `sum |amplitudes|^2 + emitted = input` holds
//! exactly.
//!
//! Stretches where every beam is off and the probe has passed are propagated
//! in closed form, so storage times of hundreds of microseconds cost nothing.

mod adiabatic;
mod fringe;
mod rk4;
#[cfg(test)]
mod tests;

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::params::{BeamPair, MagneticEnvironment, ProbePulse};

pub use adiabatic::{adiabaticity_report, AdiabaticityReport, AdiabaticityThresholds};
pub use fringe::fringe_scan;

use rk4::Rk4;

/// Explicit-step stability bound: `dt * max rate` must stay below this.
pub const STABILITY_BOUND: f64 = 0.1;

/// Number of excited-state decay times integrated after every active window
/// before switching to closed-form free evolution.
const SETTLE_DECAYS: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomParams {
    /// Collective coupling `g sqrt(N)`, rad/s.
    pub gn: f64,
    /// Excited-state decay rate out of the probe mode, rad/s.
    pub gamma_e: f64,
    /// Ground-coherence lifetime (energy), seconds. May be infinite.
    pub t0: f64,
    /// Medium length in units of `c / gN`; sets `kappa = gN * length`.
    pub length: f64,
    /// Closed-system check mode: all excited-state decay goes back into the
    /// probe mode, `Gamma_e` is not applied as a loss.
    pub closed_system: bool,
}

impl AtomParams {
    pub fn new(gn: f64, gamma_e: f64, t0: f64, length: f64) -> Result<Self> {
        if !(gn > 0.0) || !gn.is_finite() {
            return Err(Error::param("gn", gn, "collective coupling must be finite and > 0"));
        }
        if !(gamma_e > 0.0) || !gamma_e.is_finite() {
            return Err(Error::param("gamma_e", gamma_e, "excited-state decay must be finite and > 0"));
        }
        if !(t0 > 0.0) {
            return Err(Error::param("t0", t0, "lifetime must be > 0"));
        }
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::param("length", length, "medium length must be finite and > 0"));
        }
        Ok(Self {
            gn,
            gamma_e,
            t0,
            length,
            closed_system: false,
        })
    }

    pub fn closed(mut self) -> Self {
        self.closed_system = true;
        self
    }

    /// Collective forward-emission rate `kappa`, rad/s.
    pub fn emission_rate(&self) -> f64 {
        self.gn * self.length
    }

    fn loss_rate(&self) -> f64 {
        if self.closed_system {
            0.0
        } else {
            self.gamma_e
        }
    }

    /// Resonant two-level optical depth `4 kappa / Gamma_e` (diagnostic only).
    pub fn optical_depth(&self) -> f64 {
        4.0 * self.emission_rate() / self.gamma_e
    }

    /// Fraction of a bright spin wave that leaves in the probe mode during an
    /// adiabatic read, `kappa / (kappa + Gamma_e)`.
    pub fn retrieval_fraction(&self) -> f64 {
        let k = self.emission_rate();
        k / (k + self.loss_rate())
    }
}

/// A coupling beam pair switched on and off with raised-cosine edges of width
/// `ramp_width` centered on `on_time` and `off_time`. `on_time` may be
/// `-inf` (already on) and `off_time` `+inf` (never switched off).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamRamp {
    pub pair: BeamPair,
    pub on_time: f64,
    pub off_time: f64,
    pub ramp_width: f64,
}

impl BeamRamp {
    pub fn new(pair: BeamPair, on_time: f64, off_time: f64, ramp_width: f64) -> Result<Self> {
        if !(ramp_width > 0.0) || !ramp_width.is_finite() {
            return Err(Error::param("ramp_width", ramp_width, "ramp width must be finite and > 0"));
        }
        if on_time.is_nan() || off_time.is_nan() || on_time == f64::INFINITY || off_time == f64::NEG_INFINITY {
            return Err(Error::InvalidSchedule("ramp times must be ordered and not NaN"));
        }
        if !(off_time > on_time) {
            return Err(Error::InvalidSchedule("ramp must switch off after it switches on"));
        }
        Ok(Self {
            pair,
            on_time,
            off_time,
            ramp_width,
        })
    }

    /// Beam that is on from the start and switched off at `off_time`.
    pub fn switch_off(pair: BeamPair, off_time: f64, ramp_width: f64) -> Result<Self> {
        Self::new(pair, f64::NEG_INFINITY, off_time, ramp_width)
    }

    /// First instant with a nonzero field.
    pub fn start(&self) -> f64 {
        self.on_time - 0.5 * self.ramp_width
    }

    /// Last instant with a nonzero field.
    pub fn end(&self) -> f64 {
        self.off_time + 0.5 * self.ramp_width
    }

    fn edge(&self, x: f64) -> (f64, f64) {
        let w = self.ramp_width;
        if x <= -0.5 * w {
            (0.0, 0.0)
        } else if x >= 0.5 * w {
            (1.0, 0.0)
        } else {
            let arg = PI * x / w;
            (0.5 * (1.0 + arg.sin()), 0.5 * PI / w * arg.cos())
        }
    }

    /// Envelope in `[0, 1]` and its time derivative.
    pub fn envelope_with_rate(&self, t: f64) -> (f64, f64) {
        let (rise, d_rise) = if self.on_time.is_finite() {
            self.edge(t - self.on_time)
        } else {
            (1.0, 0.0)
        };
        let (fall, d_fall) = if self.off_time.is_finite() {
            let (f, d) = self.edge(self.off_time - t);
            (f, -d)
        } else {
            (1.0, 0.0)
        };
        (rise * fall, d_rise * fall + rise * d_fall)
    }

    pub fn envelope(&self, t: f64) -> f64 {
        self.envelope_with_rate(t).0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimGrid {
    /// Number of medium slices; 1 is the uniform-medium approximation.
    pub nz: usize,
    /// Maximum time step, seconds.
    pub dt: f64,
}

impl SimGrid {
    pub fn new(nz: usize, dt: f64) -> Result<Self> {
        if nz == 0 {
            return Err(Error::param("nz", 0.0, "need at least one slice"));
        }
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::param("dt", dt, "time step must be finite and > 0"));
        }
        Ok(Self { nz, dt })
    }

    /// Slice length in the same units as [`AtomParams::length`].
    pub fn dz(&self, atoms: &AtomParams) -> f64 {
        atoms.length / self.nz as f64
    }
}

/// Everything [`simulate`] needs.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub probe: ProbePulse,
    pub write: BeamRamp,
    pub reads: Vec<BeamRamp>,
    pub env: MagneticEnvironment,
    pub atoms: AtomParams,
    pub grid: SimGrid,
}

impl SimConfig {
    /// Largest rate the explicit step has to resolve.
    pub fn max_rate(&self) -> f64 {
        let beams = core::iter::once(&self.write)
            .chain(&self.reads)
            .map(|r| r.pair.total_magnitude())
            .fold(0.0, f64::max);
        [
            self.atoms.gn,
            self.atoms.emission_rate(),
            beams,
            self.env.larmor(),
            self.atoms.gamma_e,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn check_stability(&self) -> Result<()> {
        let max_rate = self.max_rate();
        if self.grid.dt * max_rate < STABILITY_BOUND {
            Ok(())
        } else {
            Err(Error::Unstable {
                dt: self.grid.dt,
                max_rate,
                bound: STABILITY_BOUND,
            })
        }
    }

    fn settle_time(&self) -> f64 {
        let slowest = self.atoms.emission_rate() / self.grid.nz as f64 + self.atoms.loss_rate();
        SETTLE_DECAYS * 2.0 / slowest
    }

    /// Sum of the complex Rabi frequencies of all ramps at time `t`.
    fn rabi_at(&self, t: f64) -> (Complex64, Complex64, bool) {
        let mut plus = Complex64::new(0.0, 0.0);
        let mut minus = Complex64::new(0.0, 0.0);
        let mut any = false;
        for ramp in core::iter::once(&self.write).chain(&self.reads) {
            let f = ramp.envelope(t);
            if f > 0.0 {
                let (p, m) = ramp.pair.rabi();
                plus += p * f;
                minus += m * f;
                any |= !ramp.pair.is_dark();
            }
        }
        (plus, minus, any)
    }
}

/// Energy bookkeeping of one read window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReadWindow {
    pub start: f64,
    pub end: f64,
    /// Probe-mode energy emitted inside the window.
    pub energy: f64,
    /// Spin-wave norm left after the window.
    pub remaining_norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Energies {
    /// `integral |eps_in|^2 dt` over the simulated span.
    pub input: f64,
    /// Spin-wave norm once the write beam is off and the probe has passed.
    pub stored: f64,
    /// Total energy emitted in the probe mode (transmitted + retrieved).
    pub emitted: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub times: Vec<f64>,
    pub probe_out: Vec<Complex64>,
    /// Slice-summed `sigma_ba`, `sigma_ca`, `sigma_ea` amplitudes.
    pub sigma_ba: Vec<Complex64>,
    pub sigma_ca: Vec<Complex64>,
    pub sigma_ea: Vec<Complex64>,
    pub energies: Energies,
    pub reads: Vec<ReadWindow>,
    /// Largest excited-state population while any coupling beam is on.
    pub peak_excited: f64,
    /// Final total population in `b`, `c`, `e`.
    pub final_population: f64,
    /// Integration steps taken.
    pub steps: usize,
}

impl SimResult {
    pub fn retrieved(&self) -> f64 {
        self.reads.iter().map(|r| r.energy).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Segment {
    Integrate(f64, f64),
    Free(f64, f64),
}

/// Split `[from, to)` into an integrated part while the probe is still
/// present and a closed-form part afterwards.
fn gap_segments(out: &mut Vec<Segment>, from: f64, to: f64, probe_end: f64, settle: f64) {
    if to <= from {
        return;
    }
    let busy_until = if probe_end > from { (probe_end + settle).min(to) } else { from };
    if busy_until > from {
        out.push(Segment::Integrate(from, busy_until));
    }
    if to > busy_until {
        out.push(Segment::Free(busy_until, to));
    }
}

struct Layout {
    segments: Vec<Segment>,
    store_checkpoint: f64,
    windows: Vec<(f64, f64)>,
}

fn layout(cfg: &SimConfig) -> Result<Layout> {
    let settle = cfg.settle_time();
    let probe_live = cfg.probe.energy > 0.0;
    let begin = if probe_live {
        cfg.probe.start().min(cfg.write.start())
    } else {
        cfg.write.start()
    };
    let begin = if begin.is_finite() {
        begin
    } else if probe_live {
        cfg.probe.start()
    } else {
        cfg.write.off_time - cfg.write.ramp_width
    };
    if !cfg.write.off_time.is_finite() && !cfg.reads.is_empty() {
        return Err(Error::InvalidSchedule("write beam never switches off before the reads"));
    }
    let probe_end = if probe_live { cfg.probe.end() } else { f64::NEG_INFINITY };

    let mut windows: Vec<(f64, f64)> = Vec::with_capacity(cfg.reads.len());
    let mut prev_end = cfg.write.end();
    for r in &cfg.reads {
        if !r.on_time.is_finite() || !r.off_time.is_finite() {
            return Err(Error::InvalidSchedule("read ramps need finite on and off times"));
        }
        if r.start() < prev_end {
            return Err(Error::InvalidSchedule("read ramp overlaps the write ramp or a previous read"));
        }
        windows.push((r.start(), r.end() + settle));
        prev_end = r.end();
    }
    // clip settle tails against the next window
    for k in 0..windows.len().saturating_sub(1) {
        windows[k].1 = windows[k].1.min(windows[k + 1].0);
    }

    let write_done = cfg.write.end().max(probe_end) + settle;
    let store_checkpoint = match windows.first() {
        Some(&(s, _)) => write_done.min(s),
        None => write_done,
    }
    .max(begin);

    let mut segments = vec![Segment::Integrate(begin, store_checkpoint)];
    let mut cursor = store_checkpoint;
    for &(s, e) in &windows {
        gap_segments(&mut segments, cursor, s, probe_end, settle);
        segments.push(Segment::Integrate(s, e));
        cursor = e;
    }
    Ok(Layout {
        segments,
        store_checkpoint,
        windows,
    })
}

// state layout: [p_0, c_0, b_0, p_1, c_1, b_1, ..., W_in, W_out]
struct Model<'a> {
    cfg: &'a SimConfig,
    sqrt_kj: f64,
    half_width: f64,
    zeeman_c: Complex64,
    zeeman_b: Complex64,
    nz: usize,
}

impl<'a> Model<'a> {
    fn new(cfg: &'a SimConfig) -> Self {
        let nz = cfg.grid.nz;
        let kj = cfg.atoms.emission_rate() / nz as f64;
        let r = 0.5 / cfg.atoms.t0;
        let l = cfg.env.larmor();
        Self {
            cfg,
            sqrt_kj: kj.sqrt(),
            half_width: 0.5 * (kj + cfg.atoms.loss_rate()),
            zeeman_c: Complex64::new(-r, -l),
            zeeman_b: Complex64::new(-r, l),
            nz,
        }
    }

    fn derivative(&self, t: f64, y: &[Complex64], dy: &mut [Complex64]) {
        let i = Complex64::i();
        let (op, om, _) = self.cfg.rabi_at(t);
        let (op_c, om_c) = (op.conj(), om.conj());
        let mut field = self.cfg.probe.amplitude(t);
        let w_in = field.norm_sqr();
        for j in 0..self.nz {
            let (p, c, b) = (y[3 * j], y[3 * j + 1], y[3 * j + 2]);
            dy[3 * j] = -p * self.half_width + i * (op * c + om * b) + field * self.sqrt_kj;
            dy[3 * j + 1] = i * op_c * p + self.zeeman_c * c;
            dy[3 * j + 2] = i * om_c * p + self.zeeman_b * b;
            field -= p * self.sqrt_kj;
        }
        let n = 3 * self.nz;
        dy[n] = Complex64::new(w_in, 0.0);
        dy[n + 1] = Complex64::new(field.norm_sqr(), 0.0);
    }

    fn output(&self, t: f64, y: &[Complex64]) -> Complex64 {
        let mut field = self.cfg.probe.amplitude(t);
        for j in 0..self.nz {
            field -= y[3 * j] * self.sqrt_kj;
        }
        field
    }

    fn free(&self, y: &mut [Complex64], dt: f64) {
        let dp = (-self.half_width * dt).exp();
        let dc = (self.zeeman_c * dt).exp();
        let db = (self.zeeman_b * dt).exp();
        for j in 0..self.nz {
            y[3 * j] *= dp;
            y[3 * j + 1] *= dc;
            y[3 * j + 2] *= db;
        }
    }

    fn spin_norm(&self, y: &[Complex64]) -> f64 {
        (0..self.nz).map(|j| y[3 * j + 1].norm_sqr() + y[3 * j + 2].norm_sqr()).sum()
    }

    fn excited(&self, y: &[Complex64]) -> f64 {
        (0..self.nz).map(|j| y[3 * j].norm_sqr()).sum()
    }
}

struct Recorder {
    times: Vec<f64>,
    probe_out: Vec<Complex64>,
    sigma_ba: Vec<Complex64>,
    sigma_ca: Vec<Complex64>,
    sigma_ea: Vec<Complex64>,
}

impl Recorder {
    fn push(&mut self, model: &Model<'_>, t: f64, y: &[Complex64]) {
        let (mut p, mut c, mut b) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for j in 0..model.nz {
            p += y[3 * j];
            c += y[3 * j + 1];
            b += y[3 * j + 2];
        }
        self.times.push(t);
        self.probe_out.push(model.output(t, y));
        self.sigma_ea.push(p);
        self.sigma_ca.push(c);
        self.sigma_ba.push(b);
    }
}

/// Integrate a write, storage and any number of reads.
///
/// Deterministic: identical configurations give bit-identical results.
pub fn simulate(cfg: &SimConfig) -> Result<SimResult> {
    cfg.check_stability()?;
    let plan = layout(cfg)?;
    let model = Model::new(cfg);
    let n = 3 * cfg.grid.nz;
    let mut y = vec![Complex64::new(0.0, 0.0); n + 2];
    let mut rk = Rk4::new(n + 2);

    let cap = plan
        .segments
        .iter()
        .map(|s| match *s {
            Segment::Integrate(a, b) => ((b - a) / cfg.grid.dt).ceil() as usize + 1,
            Segment::Free(..) => 1,
        })
        .sum::<usize>();
    let mut rec = Recorder {
        times: Vec::with_capacity(cap),
        probe_out: Vec::with_capacity(cap),
        sigma_ba: Vec::with_capacity(cap),
        sigma_ca: Vec::with_capacity(cap),
        sigma_ea: Vec::with_capacity(cap),
    };

    let first = match plan.segments[0] {
        Segment::Integrate(a, _) | Segment::Free(a, _) => a,
    };
    rec.push(&model, first, &y);

    let mut stored = None;
    let mut window_marks: Vec<(f64, f64)> = Vec::with_capacity(plan.windows.len());
    let mut reads = Vec::with_capacity(plan.windows.len());
    let mut peak_excited = 0.0f64;
    let mut steps = 0usize;

    for seg in &plan.segments {
        match *seg {
            Segment::Integrate(a, b) => {
                if let Some(k) = plan.windows.iter().position(|w| w.0 == a) {
                    if window_marks.len() == k {
                        window_marks.push((y[n + 1].re, 0.0));
                    }
                }
                let count = ((b - a) / cfg.grid.dt).ceil().max(1.0) as usize;
                let h = (b - a) / count as f64;
                for s in 0..count {
                    let t = a + s as f64 * h;
                    rk.step(t, h, &mut y, |t, y, dy| model.derivative(t, y, dy));
                    let t_next = if s + 1 == count { b } else { a + (s + 1) as f64 * h };
                    rec.push(&model, t_next, &y);
                    if cfg.rabi_at(t_next).2 {
                        peak_excited = peak_excited.max(model.excited(&y));
                    }
                }
                steps += count;
                if b == plan.store_checkpoint && stored.is_none() {
                    stored = Some(model.spin_norm(&y));
                }
                if let Some(k) = plan.windows.iter().position(|w| w.1 == b) {
                    if reads.len() == k {
                        let (w0, _) = window_marks[k];
                        reads.push(ReadWindow {
                            start: plan.windows[k].0,
                            end: b,
                            energy: y[n + 1].re - w0,
                            remaining_norm: model.spin_norm(&y),
                        });
                    }
                }
            }
            Segment::Free(a, b) => {
                model.free(&mut y, b - a);
                rec.push(&model, b, &y);
            }
        }
    }

    let final_population = model.spin_norm(&y) + model.excited(&y);
    Ok(SimResult {
        times: rec.times,
        probe_out: rec.probe_out,
        sigma_ba: rec.sigma_ba,
        sigma_ca: rec.sigma_ca,
        sigma_ea: rec.sigma_ea,
        energies: Energies {
            input: y[n].re,
            stored: stored.unwrap_or(0.0),
            emitted: y[n + 1].re,
        },
        reads,
        peak_excited,
        final_population,
        steps,
    })
}
