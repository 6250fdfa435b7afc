use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use super::*;
use crate::analytic::compensation_phase;
use crate::fit::fit_sinusoid;

const MHZ: f64 = 2.0 * PI * 1e6;
const TAU1: f64 = 380e-9;

fn larmor() -> MagneticEnvironment {
    MagneticEnvironment::from_larmor(0.21 * MHZ, 0.5).unwrap()
}

fn atoms() -> AtomParams {
    AtomParams::new(1000.0 * MHZ, 5.75 * MHZ, 90e-6, 1.0).unwrap()
}

fn write(pair: BeamPair) -> BeamRamp {
    BeamRamp::new(pair.scaled(50.0 * MHZ), -4e-9, 0.0, 2e-9).unwrap()
}

fn read_at(t: f64, pair: BeamPair) -> BeamRamp {
    BeamRamp::new(pair.scaled(150.0 * MHZ), t, t + 12e-9, 3e-9).unwrap()
}

fn config(write_pair: BeamPair, reads: Vec<BeamRamp>, env: MagneticEnvironment) -> SimConfig {
    SimConfig {
        probe: ProbePulse::gaussian(0.0, 100e-9, 1.0).unwrap(),
        write: write(write_pair),
        reads,
        env,
        atoms: atoms(),
        grid: SimGrid::new(1, 12e-12).unwrap(),
    }
}

fn two_channel(delta_r: f64, tau: f64, env: MagneticEnvironment) -> SimConfig {
    let w = BeamPair::balanced(1.0, 0.5 * PI).unwrap();
    config(w, vec![read_at(tau, BeamPair::balanced(1.0, delta_r).unwrap())], env)
}

#[test]
fn vacuum_in_vacuum_out() {
    let mut cfg = two_channel(0.0, TAU1, larmor());
    cfg.probe = ProbePulse::gaussian(0.0, 100e-9, 0.0).unwrap();
    let r = simulate(&cfg).unwrap();
    let zero = Complex64::new(0.0, 0.0);
    assert!(r.probe_out.iter().all(|&x| x == zero));
    assert!(r.sigma_ba.iter().chain(&r.sigma_ca).chain(&r.sigma_ea).all(|&x| x == zero));
    assert_eq!(r.energies.emitted, 0.0);
}

#[test]
fn single_channel_limit_retrieves_stored_energy() {
    let m = BeamPair::minus_only(1.0, 0.0).unwrap();
    let cfg = config(m, vec![read_at(TAU1, m)], larmor());
    let r = simulate(&cfg).unwrap();
    assert!(r.energies.stored > 0.0);
    let ratio = r.reads[0].energy / r.energies.stored;
    assert!(ratio > 0.98, "retrieved / stored = {ratio}");
    assert!(r.retrieved() <= r.energies.input);
}

#[test]
fn destructive_read_is_suppressed() {
    let env = larmor();
    let dc = compensation_phase(TAU1, env.larmor(), 0.5 * PI);
    let con = simulate(&two_channel(dc, TAU1, env)).unwrap().reads[0].energy;
    let des = simulate(&two_channel(dc + PI, TAU1, env)).unwrap().reads[0].energy;
    assert!(con > 100.0 * des, "constructive {con}, destructive {des}");
}

#[test]
fn fringe_scan_period_and_visibility() {
    let base = two_channel(0.0, TAU1, larmor());
    let grid: Vec<f64> = (0..16).map(|k| TAU * k as f64 / 16.0).collect();
    let scan = fringe_scan(&base, &grid).unwrap();
    let (xs, ys): (Vec<f64>, Vec<f64>) = scan.into_iter().unzip();
    let fit = fit_sinusoid(&xs, &ys, 0.5, 2.0).unwrap();
    assert!((fit.period() / TAU - 1.0).abs() < 0.01, "period {}", fit.period());
    assert!(fit.visibility() >= 0.95, "visibility {}", fit.visibility());
}

#[test]
fn no_field_no_write_phase_peaks_at_zero() {
    let w = BeamPair::balanced(1.0, 0.0).unwrap();
    let base = config(w, vec![read_at(TAU1, w)], MagneticEnvironment::field_free());
    let grid: Vec<f64> = (0..8).map(|k| TAU * k as f64 / 8.0).collect();
    let scan = fringe_scan(&base, &grid).unwrap();
    let best = scan.iter().copied().fold((f64::NAN, -1.0), |a, b| if b.1 > a.1 { b } else { a });
    assert_eq!(best.0, 0.0);
    let (xs, ys): (Vec<f64>, Vec<f64>) = scan.into_iter().unzip();
    let peak = fit_sinusoid(&xs, &ys, 0.5, 2.0).unwrap().first_maximum();
    assert!(peak.min(TAU - peak) < 1e-3, "fitted maximum at {peak}");
}

#[test]
fn storage_time_sweep_follows_larmor_fringe() {
    // delta_R fixed, tau swept over two fringe periods
    let env = larmor();
    let period = PI / env.larmor();
    let mut atoms = atoms();
    atoms.t0 = f64::INFINITY;
    let taus: Vec<f64> = (0..14).map(|k| 0.4e-6 + 2.0 * period * k as f64 / 14.0).collect();
    let ys: Vec<f64> = taus
        .iter()
        .map(|&tau| {
            let mut cfg = two_channel(0.2 * PI, tau, env);
            cfg.atoms = atoms;
            simulate(&cfg).unwrap().reads[0].energy
        })
        .collect();
    let fit = fit_sinusoid(&taus, &ys, env.larmor(), 4.0 * env.larmor()).unwrap();
    assert!((fit.frequency / (2.0 * env.larmor()) - 1.0).abs() < 0.01, "frequency {}", fit.frequency);
    assert!(fit.visibility() > 0.95);
    // maxima where Delta = 0: 2 Omega_L tau = delta_W - delta_R (mod 2 pi)
    let expected = crate::phase::rem_euclid(0.3 * PI / (2.0 * env.larmor()), period);
    let got = fit.first_maximum();
    let miss = (got - expected).abs().min(period - (got - expected).abs());
    assert!(miss < 0.02 * period, "maximum at {got}, expected {expected}");
}

#[test]
fn instantaneous_switch_warns() {
    let mut cfg = two_channel(0.0, TAU1, larmor());
    cfg.reads[0].ramp_width = cfg.grid.dt;
    cfg.write.ramp_width = cfg.grid.dt;
    let rep = adiabaticity_report(&cfg, AdiabaticityThresholds::default()).unwrap();
    assert!(!rep.is_adiabatic());
    assert!(rep.max_mixing_rate > 0.1);
}

#[test]
fn slow_ramps_do_not_warn() {
    let w = BeamPair::balanced(1.0, 0.5 * PI).unwrap();
    let mut cfg = two_channel(0.0, 1.5e-6, larmor());
    cfg.write = BeamRamp::new(w.scaled(50.0 * MHZ), -400e-9, 0.0, 200e-9).unwrap();
    cfg.reads[0] = BeamRamp::new(BeamPair::balanced(150.0 * MHZ, 0.0).unwrap(), 1.5e-6, 2.0e-6, 200e-9).unwrap();
    let rep = adiabaticity_report(&cfg, AdiabaticityThresholds::default()).unwrap();
    assert!(rep.is_adiabatic(), "{rep:?}");
}

#[test]
fn dark_beams_give_empty_report() {
    let dark = BeamPair::new(0.0, 0.0, 0.0, 0.0).unwrap();
    let cfg = SimConfig {
        probe: ProbePulse::gaussian(0.0, 100e-9, 1.0).unwrap(),
        write: BeamRamp::new(dark, -4e-9, 0.0, 2e-9).unwrap(),
        reads: vec![BeamRamp::new(dark, TAU1, TAU1 + 12e-9, 3e-9).unwrap()],
        env: larmor(),
        atoms: atoms(),
        grid: SimGrid::new(1, 12e-12).unwrap(),
    };
    let rep = adiabaticity_report(&cfg, AdiabaticityThresholds::default()).unwrap();
    assert_eq!(rep.max_mixing_rate, 0.0);
    assert_eq!(rep.peak_excited, 0.0);
    assert!(rep.is_adiabatic());
}

#[test]
fn overlapping_ramps_are_rejected() {
    let mut cfg = two_channel(0.0, TAU1, larmor());
    cfg.reads.push(read_at(TAU1 + 5e-9, BeamPair::balanced(1.0, 0.0).unwrap()));
    assert!(matches!(simulate(&cfg), Err(Error::InvalidSchedule(_))));
    let mut cfg = two_channel(0.0, 1e-9, larmor());
    cfg.reads[0].on_time = 0.0;
    assert!(matches!(simulate(&cfg), Err(Error::InvalidSchedule(_))));
}

#[test]
fn coarse_step_is_refused() {
    let mut cfg = two_channel(0.0, TAU1, larmor());
    cfg.grid.dt = 1e-10;
    assert!(matches!(simulate(&cfg), Err(Error::Unstable { .. })));
}

#[test]
fn closed_system_conserves_norm() {
    let mut cfg = two_channel(0.3, TAU1, larmor());
    cfg.atoms = AtomParams::new(1000.0 * MHZ, 5.75 * MHZ, f64::INFINITY, 1.0).unwrap().closed();
    let r = simulate(&cfg).unwrap();
    let total = r.final_population + r.energies.emitted;
    assert!((total - r.energies.input).abs() < 1e-6, "{total} vs {}", r.energies.input);
}

#[test]
fn lossy_system_stays_below_input() {
    let r = simulate(&two_channel(0.3, TAU1, larmor())).unwrap();
    assert!(r.final_population + r.energies.emitted <= r.energies.input);
    assert!(r.retrieved() <= r.energies.input);
}

#[test]
fn identical_inputs_identical_results() {
    let cfg = two_channel(1.1, TAU1, larmor());
    assert_eq!(simulate(&cfg).unwrap(), simulate(&cfg).unwrap());
}

#[test]
fn halving_the_step_barely_moves_the_readout() {
    let cfg = two_channel(0.7, TAU1, larmor());
    let mut fine = cfg.clone();
    fine.grid.dt *= 0.5;
    let a = simulate(&cfg).unwrap().reads[0].energy;
    let b = simulate(&fine).unwrap().reads[0].energy;
    assert!((a - b).abs() < 0.005 * a);
}

#[test]
fn sliced_medium_stores_and_retrieves() {
    let mut cfg = two_channel(compensation_phase(TAU1, larmor().larmor(), 0.5 * PI), TAU1, larmor());
    cfg.grid.nz = 4;
    cfg.reads[0].off_time = TAU1 + 100e-9;
    let r = simulate(&cfg).unwrap();
    assert!(r.energies.stored > 0.0);
    // forward retrieval through the rest of the medium costs some absorption
    assert!(r.reads[0].energy / r.energies.stored > 0.8);
    assert!(r.reads[0].remaining_norm < 1e-3 * r.energies.stored);
}
