use std::f64::consts::{PI, TAU};

use proptest::prelude::*;
use tripod_memory::analytic::{self, SpinWaveState};
use tripod_memory::dynamics::{simulate, AtomParams, BeamRamp, SimConfig, SimGrid};
use tripod_memory::phase;
use tripod_memory::{BeamPair, Complex64, MagneticEnvironment, ProbePulse};

const MHZ: f64 = 2.0 * PI * 1e6;

fn amp() -> impl Strategy<Value = Complex64> {
    (0.0..1.0f64, 0.0..TAU).prop_map(|(r, a)| Complex64::from_polar(r, a))
}

fn state() -> impl Strategy<Value = SpinWaveState> {
    (amp(), amp()).prop_map(|(c, b)| SpinWaveState::new(c, b))
}

fn pair() -> impl Strategy<Value = BeamPair> {
    (0.0..10.0f64, 0.0..10.0f64, -10.0..10.0f64, -10.0..10.0f64)
        .prop_filter("needs a lit beam", |(p, m, _, _)| p + m > 1e-3)
        .prop_map(|(p, m, a, b)| BeamPair::new(p, m, a, b).unwrap())
}

fn env() -> impl Strategy<Value = MagneticEnvironment> {
    (0.0..2.0f64).prop_map(|l| MagneticEnvironment::from_larmor(l * MHZ, 0.5).unwrap())
}

fn probe() -> ProbePulse {
    ProbePulse::gaussian(0.0, 100e-9, 1.0).unwrap()
}

proptest! {
    #[test]
    fn read_conserves_energy(s in state(), p in pair()) {
        let out = analytic::read(&s, &p).unwrap();
        prop_assert!((out.energy() + out.remaining.stored_norm() - s.stored_norm()).abs() < 1e-12);
        prop_assert!(out.remaining.stored_norm() <= s.stored_norm() + 1e-15);
    }

    #[test]
    fn read_leaves_only_the_dark_part(s in state(), p in pair()) {
        let out = analytic::read(&s, &p).unwrap();
        prop_assert!(analytic::compose_spin_wave(&p, &out.remaining).unwrap().norm() < 1e-12);
    }

    #[test]
    fn intensity_is_twice_projected_population(dr in -20.0..20.0f64, dw in -20.0..20.0f64, l in 0.0..2.0f64, t in 0.0..1e-4f64) {
        let i = analytic::readout_intensity(dr, dw, l * MHZ, t);
        prop_assert!((i - 2.0 * analytic::projected_population(dr, dw, l * MHZ, t)).abs() < 1e-12);
        prop_assert!((0.0..=2.0).contains(&i));
    }

    #[test]
    fn intensity_is_periodic_in_read_phase(dr in -20.0..20.0f64, dw in -20.0..20.0f64, l in 0.0..2.0f64, t in 0.0..1e-5f64) {
        let a = analytic::readout_intensity(dr, dw, l * MHZ, t);
        let b = analytic::readout_intensity(dr + TAU, dw, l * MHZ, t);
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn algebra_reproduces_fringe_formula(dr in 0.0..TAU, dw in 0.0..TAU, e in env(), t in 0.0..1e-5f64) {
        let s = analytic::store(&probe(), &BeamPair::balanced(1.0, dw).unwrap(), 0.1).unwrap();
        let s = analytic::evolve(&s, t, &e, f64::INFINITY).unwrap();
        let out = analytic::read(&s, &BeamPair::balanced(1.0, dr).unwrap()).unwrap();
        let single = analytic::read(&s, &BeamPair::plus_only(1.0, 0.0).unwrap()).unwrap();
        prop_assert!((out.energy() / single.energy() - analytic::readout_intensity(dr, dw, e.larmor(), t)).abs() < 1e-9);
    }

    #[test]
    fn two_beams_in_phase_double_one_beam(dw in 0.0..TAU, e in env(), t in 0.0..1e-5f64, mag in 0.1..10.0f64) {
        let s = analytic::store(&probe(), &BeamPair::balanced(1.0, dw).unwrap(), 0.1).unwrap();
        let s = analytic::evolve(&s, t, &e, 90e-6).unwrap();
        let dr = analytic::compensation_phase(t, e.larmor(), dw);
        let two = analytic::read(&s, &BeamPair::balanced(mag, dr).unwrap()).unwrap().energy();
        let plus = analytic::read(&s, &BeamPair::plus_only(mag, 0.0).unwrap()).unwrap().energy();
        let minus = analytic::read(&s, &BeamPair::minus_only(mag, 0.0).unwrap()).unwrap().energy();
        prop_assert!((two - 2.0 * plus).abs() < 1e-12);
        prop_assert!((plus - minus).abs() < 1e-12);
    }

    #[test]
    fn populations_sum_to_one(t in 0.0..1e-3f64, dw in -20.0..20.0f64, l in 0.0..2.0f64) {
        let (p, m) = analytic::superposition_populations(t, dw, l * MHZ);
        prop_assert!((p + m - 1.0).abs() < 1e-12);
    }

    #[test]
    fn opposite_channels_are_isolated(e in env(), t in 0.0..1e-4f64, phw in -10.0..10.0f64, phr in -10.0..10.0f64) {
        let s = analytic::store(&probe(), &BeamPair::minus_only(1.0, phw).unwrap(), 0.1).unwrap();
        let s = analytic::evolve(&s, t, &e, 90e-6).unwrap();
        let out = analytic::read(&s, &BeamPair::plus_only(2.0, phr).unwrap()).unwrap();
        prop_assert_eq!(out.output, Complex64::new(0.0, 0.0));
        prop_assert_eq!(out.remaining.stored_norm(), s.stored_norm());
    }

    #[test]
    fn first_and_second_read_are_complementary(
        dr in 0.0..TAU, dw in 0.0..TAU, e in env(), t1 in 0.0..5e-6f64, gap in 1e-9..1e-5f64,
    ) {
        let t0 = 90e-6;
        let t2 = t1 + gap;
        let s = analytic::store(&probe(), &BeamPair::balanced(1.0, dw).unwrap(), 0.1).unwrap();
        let first = analytic::read(&analytic::evolve(&s, t1, &e, t0).unwrap(), &BeamPair::balanced(1.0, dr).unwrap()).unwrap();
        let rest = analytic::evolve(&first.remaining, gap, &e, t0).unwrap();
        // align the second read with whatever is left
        let d2 = dr + PI - 2.0 * e.larmor() * gap;
        let second = analytic::read(&rest, &BeamPair::balanced(1.0, d2).unwrap()).unwrap();
        let sum = first.energy() * (t1 / t0).exp() + second.energy() * (t2 / t0).exp();
        prop_assert!((sum - s.stored_norm()).abs() < 1e-9);
    }

    #[test]
    fn compensation_keeps_readout_maximal(dw in 0.0..TAU, e in env(), t in 0.0..1e-3f64) {
        let dr = analytic::compensation_phase(t, e.larmor(), dw);
        prop_assert!((0.0..TAU).contains(&dr));
        prop_assert!((analytic::readout_intensity(dr, dw, e.larmor(), t) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn storage_decays_strictly(s in state(), e in env(), a in 0.0..1e-4f64, b in 1e-9..1e-4f64) {
        prop_assume!(s.stored_norm() > 1e-6);
        let t0 = 90e-6;
        let x = analytic::evolve(&s, a, &e, t0).unwrap().stored_norm();
        let y = analytic::evolve(&s, a + b, &e, t0).unwrap().stored_norm();
        prop_assert!(y < x);
        prop_assert!(x <= s.stored_norm());
    }

    #[test]
    fn balanced_write_splits_evenly(dw in -10.0..10.0f64, eta in 0.0..1.0f64, energy in 0.0..5.0f64) {
        let p = ProbePulse::gaussian(0.0, 100e-9, energy).unwrap();
        let s = analytic::store(&p, &BeamPair::balanced(3.0, dw).unwrap(), eta).unwrap();
        prop_assert!((s.s_ca.norm() - s.s_ba.norm()).abs() < 1e-12);
        prop_assert!((s.stored_norm() - eta * energy).abs() < 1e-12);
    }

    #[test]
    fn mixing_angle_in_range_and_monotone(p in pair(), gn in 0.1..100.0f64, k in 0.0..1.0f64) {
        let a = analytic::mixing_angle(&p, gn).unwrap();
        let b = analytic::mixing_angle(&p.scaled(k), gn).unwrap();
        prop_assert!((0.0..=PI / 2.0).contains(&a));
        prop_assert!(b >= a);
    }

    #[test]
    fn wrap_lands_in_range(x in -1e3..1e3f64) {
        let w = phase::wrap(x);
        prop_assert!((0.0..TAU).contains(&w));
        prop_assert!(phase::difference(w, x).abs() < 1e-9);
    }
}

fn sim(dw: f64, dr: f64, tau: f64, closed: bool) -> SimConfig {
    let atoms = AtomParams::new(1000.0 * MHZ, 5.75 * MHZ, if closed { f64::INFINITY } else { 90e-6 }, 1.0).unwrap();
    SimConfig {
        probe: probe(),
        write: BeamRamp::new(BeamPair::balanced(50.0 * MHZ, dw).unwrap(), -4e-9, 0.0, 2e-9).unwrap(),
        reads: vec![BeamRamp::new(BeamPair::balanced(150.0 * MHZ, dr).unwrap(), tau, tau + 12e-9, 3e-9).unwrap()],
        env: MagneticEnvironment::from_larmor(0.21 * MHZ, 0.5).unwrap(),
        atoms: if closed { atoms.closed() } else { atoms },
        grid: SimGrid::new(1, 12e-12).unwrap(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn closed_system_norm_is_exact(dw in 0.0..TAU, dr in 0.0..TAU, tau in 0.35e-6..2e-6f64) {
        let r = simulate(&sim(dw, dr, tau, true)).unwrap();
        prop_assert!((r.final_population + r.energies.emitted - r.energies.input).abs() < 1e-6);
    }

    #[test]
    fn open_system_never_creates_energy(dw in 0.0..TAU, dr in 0.0..TAU, tau in 0.35e-6..2e-6f64) {
        let r = simulate(&sim(dw, dr, tau, false)).unwrap();
        prop_assert!(r.final_population + r.energies.emitted <= r.energies.input);
        prop_assert!(r.retrieved() <= r.energies.input);
        prop_assert!(r.reads[0].energy <= r.energies.stored);
    }

    #[test]
    fn simulation_is_bit_reproducible(dw in 0.0..TAU, dr in 0.0..TAU) {
        let cfg = sim(dw, dr, 0.4e-6, false);
        prop_assert_eq!(simulate(&cfg).unwrap(), simulate(&cfg).unwrap());
    }
}
