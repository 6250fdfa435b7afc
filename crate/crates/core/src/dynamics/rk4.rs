use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

/// Classic fixed-step fourth-order Runge-Kutta on a complex state vector,
/// with preallocated stage buffers.
pub(crate) struct Rk4 {
    k1: Vec<Complex64>,
    k2: Vec<Complex64>,
    k3: Vec<Complex64>,
    k4: Vec<Complex64>,
    tmp: Vec<Complex64>,
}

impl Rk4 {
    pub(crate) fn new(len: usize) -> Self {
        let z = Complex64::new(0.0, 0.0);
        Self {
            k1: vec![z; len],
            k2: vec![z; len],
            k3: vec![z; len],
            k4: vec![z; len],
            tmp: vec![z; len],
        }
    }

    /// Advance `y` from `t` to `t + h` for `dy/dt = f(t, y)`; `f` writes the
    /// derivative into its third argument.
    pub(crate) fn step<F>(&mut self, t: f64, h: f64, y: &mut [Complex64], mut f: F)
    where
        F: FnMut(f64, &[Complex64], &mut [Complex64]),
    {
        let half = 0.5 * h;
        f(t, y, &mut self.k1);
        for ((tmp, &y), &k) in self.tmp.iter_mut().zip(y.iter()).zip(&self.k1) {
            *tmp = y + k * half;
        }
        f(t + half, &self.tmp, &mut self.k2);
        for ((tmp, &y), &k) in self.tmp.iter_mut().zip(y.iter()).zip(&self.k2) {
            *tmp = y + k * half;
        }
        f(t + half, &self.tmp, &mut self.k3);
        for ((tmp, &y), &k) in self.tmp.iter_mut().zip(y.iter()).zip(&self.k3) {
            *tmp = y + k * h;
        }
        f(t + h, &self.tmp, &mut self.k4);
        let sixth = h / 6.0;
        for i in 0..y.len() {
            y[i] += (self.k1[i] + (self.k2[i] + self.k3[i]) * 2.0 + self.k4[i]) * sixth;
        }
    }
}
