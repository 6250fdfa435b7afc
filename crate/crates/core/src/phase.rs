//! Phase wrapping helpers. All reported phases live in `[0, 2pi)`.

use core::f64::consts::{PI, TAU};

#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;

/// Values this close below `2pi` are reported as `0` so that a phase that is
/// zero up to rounding never shows up as `6.283185...`.
const WRAP_SNAP: f64 = 1e-12;

/// Wrap an angle into `[0, 2pi)`.
pub fn wrap(angle: f64) -> f64 {
    let w = rem_euclid(angle, TAU);
    if w >= TAU - WRAP_SNAP {
        0.0
    } else {
        w
    }
}

/// Signed distance between two angles, in `(-pi, pi]`.
pub fn difference(a: f64, b: f64) -> f64 {
    let d = wrap(a - b);
    if d > PI {
        d - TAU
    } else {
        d
    }
}

/// Angle in units of pi, for human-readable output.
pub fn in_pi(angle: f64) -> f64 {
    angle / PI
}

/// `x mod m` in `[0, m)` (`f64::rem_euclid` is not available without std).
pub(crate) fn rem_euclid(x: f64, m: f64) -> f64 {
    let r = x % m;
    if r < 0.0 {
        r + m
    } else {
        r
    }
}

pub(crate) fn cos2(x: f64) -> f64 {
    let c = x.cos();
    c * c
}
