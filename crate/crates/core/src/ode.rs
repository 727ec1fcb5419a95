//! Adaptive Dormand–Prince 5(4) integrator for small fixed-size systems.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OdeError {
    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },
    #[error("step budget of {max_steps} exhausted at t = {t}")]
    TooManySteps { t: f64, max_steps: usize },
    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeTolerance {
    pub atol: f64,
    pub rtol: f64,
}

impl Default for OdeTolerance {
    fn default() -> Self {
        Self { atol: 1e-12, rtol: 1e-12 }
    }
}

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
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy<const N: usize>(y: &[f64; N], terms: &[(f64, &[f64; N])], h: f64) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// Integrator state that can be advanced segment by segment; the step size
/// and the per-component magnitude scale carry over between segments.
///
/// The absolute tolerance is applied relative to the largest magnitude each
/// component has reached so far, so linear problems may be started with an
/// arbitrary normalisation.
#[derive(Debug, Clone)]
pub struct Dopri5<const N: usize> {
    tol: OdeTolerance,
    max_steps: usize,
    h: f64,
    peak: [f64; N],
    steps: usize,
}

impl<const N: usize> Dopri5<N> {
    pub fn new(tol: OdeTolerance) -> Self {
        Self { tol, max_steps: 200_000, h: 0.0, peak: [0.0; N], steps: 0 }
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Advances `y` from `t0` to `t1` (either direction).
    pub fn advance<F>(&mut self, f: &mut F, t0: f64, y: &mut [f64; N], t1: f64) -> Result<(), OdeError>
    where
        F: FnMut(f64, &[f64; N]) -> [f64; N],
    {
        if t1 == t0 {
            return Ok(());
        }
        let dir = (t1 - t0).signum();
        let span = (t1 - t0).abs();
        for i in 0..N {
            self.peak[i] = self.peak[i].max(y[i].abs());
        }
        let mut t = t0;
        let mut k1 = f(t, y);
        if self.h == 0.0 {
            self.h = self.initial_step(f, t, y, &k1, dir, span);
        }
        let mut h = self.h.min(span);
        let mut last_fac = 1.0;
        loop {
            if self.steps >= self.max_steps {
                return Err(OdeError::TooManySteps { t, max_steps: self.max_steps });
            }
            let remaining = (t1 - t).abs();
            let mut last = false;
            let mut clipped = false;
            if h >= remaining * (1.0 - 1e-12) {
                clipped = h > remaining;
                h = remaining;
                last = true;
            }
            if h <= span * 1e-15 || h < f64::MIN_POSITIVE * 1e3 {
                return Err(OdeError::StepUnderflow { t, h });
            }
            let hs = dir * h;
            let k2 = f(t + C2 * hs, &axpy(y, &[(A21, &k1)], hs));
            let k3 = f(t + C3 * hs, &axpy(y, &[(A31, &k1), (A32, &k2)], hs));
            let k4 = f(t + C4 * hs, &axpy(y, &[(A41, &k1), (A42, &k2), (A43, &k3)], hs));
            let k5 = f(t + C5 * hs, &axpy(y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], hs));
            let k6 = f(t + hs, &axpy(y, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], hs));
            let y_new = axpy(y, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)], hs);
            let t_new = if last { t1 } else { t + hs };
            let k7 = f(t_new, &y_new);
            self.steps += 1;

            let mut err2 = 0.0;
            for i in 0..N {
                let e = hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                if e == 0.0 {
                    continue;
                }
                let peak = self.peak[i].max(y_new[i].abs());
                let sc = self.tol.atol * peak + self.tol.rtol * y[i].abs().max(y_new[i].abs()) + f64::MIN_POSITIVE;
                err2 += (e / sc) * (e / sc);
            }
            let err = (err2 / N as f64).sqrt();
            if !err.is_finite() || y_new.iter().any(|v| !v.is_finite()) {
                if y_new.iter().any(|v| v.is_infinite()) {
                    return Err(OdeError::NonFinite { t });
                }
                h *= 0.2;
                continue;
            }
            if err <= 1.0 {
                t = t_new;
                *y = y_new;
                k1 = k7;
                for i in 0..N {
                    self.peak[i] = self.peak[i].max(y[i].abs());
                }
                let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                let fac = if last_fac < 1.0 { fac.min(1.0) } else { fac };
                last_fac = 1.0;
                let h_next = h * fac;
                if last {
                    // a clipped final step says nothing about the natural step size
                    if !clipped {
                        self.h = h_next;
                    }
                    return Ok(());
                }
                h = h_next;
                self.h = h;
            } else {
                last_fac = (0.9 * err.powf(-0.2)).max(0.2);
                h *= last_fac;
            }
        }
    }

    fn initial_step<F>(&self, f: &mut F, t: f64, y: &[f64; N], k1: &[f64; N], dir: f64, span: f64) -> f64
    where
        F: FnMut(f64, &[f64; N]) -> [f64; N],
    {
        let floor = self.peak.iter().fold(1e-300f64, |m, v| m.max(*v));
        let sc = |i: usize, v: f64| self.tol.atol * self.peak[i].max(floor) + self.tol.rtol * v.abs();
        let d0 = (0..N).map(|i| (y[i] / sc(i, y[i])).powi(2)).sum::<f64>().sqrt();
        let d1 = (0..N).map(|i| (k1[i] / sc(i, y[i])).powi(2)).sum::<f64>().sqrt();
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 * span } else { 0.01 * d0 / d1 };
        let h0 = h0.min(span);
        let y1 = axpy(y, &[(1.0, k1)], dir * h0);
        let k2 = f(t + dir * h0, &y1);
        let d2 = (0..N).map(|i| ((k2[i] - k1[i]) / sc(i, y[i])).powi(2)).sum::<f64>().sqrt() / h0;
        let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6 * span) } else { (0.01 / d1.max(d2)).powf(0.2) };
        (100.0 * h0).min(h1).min(span)
    }
}
