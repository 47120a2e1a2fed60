//! Adaptive Dormand–Prince 5(4) integration of complex linear systems.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth-order minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub rel: f64,
    pub abs: f64,
    pub max_steps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rel: 1e-8,
            abs: 1e-10,
            max_steps: 2_000_000,
        }
    }
}

/// Dormand–Prince stepper with first-same-as-last reuse and stored step size.
pub struct Dopri5<F> {
    rhs: F,
    tol: Tolerances,
    h: Option<f64>,
    k: [Vec<C64>; 7],
    scratch: Vec<C64>,
    trial: Vec<C64>,
    pub steps: usize,
}

impl<F> Dopri5<F>
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    pub fn new(dim: usize, tol: Tolerances, rhs: F) -> Self {
        let z = || vec![C64::new(0.0, 0.0); dim];
        Self {
            rhs,
            tol,
            h: None,
            k: [z(), z(), z(), z(), z(), z(), z()],
            scratch: z(),
            trial: z(),
            steps: 0,
        }
    }

    fn stage(&mut self, t: f64, y: &[C64], coeffs: &[(usize, f64)], h: f64, out: usize) {
        for i in 0..y.len() {
            let mut acc = y[i];
            for &(j, a) in coeffs {
                acc += self.k[j][i] * (h * a);
            }
            self.scratch[i] = acc;
        }
        (self.rhs)(t, &self.scratch, &mut self.k[out]);
    }

    fn initial_step(&mut self, t: f64, y: &[C64], span: f64) -> f64 {
        (self.rhs)(t, y, &mut self.k[0]);
        let scale = |i: usize| self.tol.abs + self.tol.rel * y[i].norm();
        let n = y.len().max(1) as f64;
        let d0 = (y.iter().enumerate().map(|(i, v)| (v.norm() / scale(i)).powi(2)).sum::<f64>() / n).sqrt();
        let d1 = (self.k[0].iter().enumerate().map(|(i, v)| (v.norm() / scale(i)).powi(2)).sum::<f64>() / n).sqrt();
        let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        h.min(span.abs())
    }

    /// Advance `y` from `t0` to exactly `t1`.
    pub fn integrate(&mut self, t0: f64, t1: f64, y: &mut [C64]) -> Result<()> {
        if t1 <= t0 {
            return Ok(());
        }
        let mut t = t0;
        let mut h = match self.h {
            Some(h) => {
                (self.rhs)(t, y, &mut self.k[0]);
                h
            }
            None => self.initial_step(t, y, t1 - t0),
        };
        let n = y.len().max(1) as f64;
        let mut rejected_last = false;
        while t < t1 {
            if self.steps >= self.tol.max_steps {
                return Err(Error::StepFailure { time: t });
            }
            let last = t + h >= t1 - 1e-14 * t1.abs().max(1.0);
            let h_step = if last { t1 - t } else { h };
            if h_step <= f64::EPSILON * t.abs().max(1.0) * 4.0 {
                return Err(Error::StepFailure { time: t });
            }

            self.stage(t + C2 * h_step, y, &[(0, A21)], h_step, 1);
            self.stage(t + C3 * h_step, y, &[(0, A31), (1, A32)], h_step, 2);
            self.stage(t + C4 * h_step, y, &[(0, A41), (1, A42), (2, A43)], h_step, 3);
            self.stage(t + C5 * h_step, y, &[(0, A51), (1, A52), (2, A53), (3, A54)], h_step, 4);
            self.stage(t + h_step, y, &[(0, A61), (1, A62), (2, A63), (3, A64), (4, A65)], h_step, 5);
            for i in 0..y.len() {
                self.trial[i] = y[i]
                    + (self.k[0][i] * B1
                        + self.k[2][i] * B3
                        + self.k[3][i] * B4
                        + self.k[4][i] * B5
                        + self.k[5][i] * B6)
                        * h_step;
            }
            let t_new = t + h_step;
            (self.rhs)(t_new, &self.trial, &mut self.k[6]);
            let mut err = 0.0;
            for i in 0..y.len() {
                let e = (self.k[0][i] * E1
                    + self.k[2][i] * E3
                    + self.k[3][i] * E4
                    + self.k[4][i] * E5
                    + self.k[5][i] * E6
                    + self.k[6][i] * E7)
                    * h_step;
                let sc = self.tol.abs + self.tol.rel * y[i].norm().max(self.trial[i].norm());
                err += (e.norm() / sc).powi(2);
            }
            let err = (err / n).sqrt();
            self.steps += 1;

            if err <= 1.0 {
                t = if last { t1 } else { t_new };
                y.copy_from_slice(&self.trial);
                self.k.swap(0, 6);
                let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                let factor = if rejected_last { factor.min(1.0) } else { factor };
                let proposed = h_step * factor;
                // a step clipped to the segment end says little about the natural size
                h = if last && proposed >= h_step { h.max(proposed) } else { proposed };
                rejected_last = false;
            } else {
                let factor = if err.is_finite() { (0.9 * err.powf(-0.2)).max(0.1) } else { 0.1 };
                h = h_step * factor;
                rejected_last = true;
            }
        }
        self.h = Some(h);
        Ok(())
    }
}
