//! Adaptive Dormand-Prince integration of holomorphic flows along real rays in
//! complex time.

use num_complex::Complex64;

#[derive(Clone, Copy, Debug)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub initial_step: f64,
    pub max_steps: usize,
    /// Stop localization stops once the bracket is this short.
    pub event_tolerance: f64,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions { rtol: 1e-10, atol: 1e-12, initial_step: 1e-3, max_steps: 200_000, event_tolerance: 1e-9 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

impl OdeStats {
    pub fn add(&mut self, other: &OdeStats) {
        self.accepted += other.accepted;
        self.rejected += other.rejected;
        self.evaluations += other.evaluations;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OdeOutcome {
    Completed,
    /// `stop` became true; the state is the last one where it was false.
    Stopped,
    Diverged,
}

#[derive(Clone, Debug)]
pub struct OdeResult {
    /// Ray parameter of the returned state.
    pub s: f64,
    pub y: Vec<Complex64>,
    pub outcome: OdeOutcome,
    pub stats: OdeStats,
}

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

type Field<'a> = &'a dyn Fn(&[Complex64]) -> Vec<Complex64>;

fn axpy(y: &[Complex64], h: Complex64, terms: &[(f64, &[Complex64])]) -> Vec<Complex64> {
    let mut out = y.to_vec();
    for (a, k) in terms {
        for (o, ki) in out.iter_mut().zip(k.iter()) {
            *o += h * *a * ki;
        }
    }
    out
}

/// One Dormand-Prince step of size `h` (complex); returns the new state and
/// the scaled error norm.
fn dopri_step(f: Field, y: &[Complex64], h: Complex64, opts: &OdeOptions) -> (Vec<Complex64>, f64) {
    let k1 = f(y);
    let k2 = f(&axpy(y, h, &[(A21, &k1)]));
    let k3 = f(&axpy(y, h, &[(A31, &k1), (A32, &k2)]));
    let k4 = f(&axpy(y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
    let k5 = f(&axpy(y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
    let k6 = f(&axpy(y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]));
    let y1 = axpy(y, h, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
    let k7 = f(&y1);
    let mut err = 0.0f64;
    for i in 0..y.len() {
        let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        let sc = opts.atol + opts.rtol * y[i].norm().max(y1[i].norm());
        err = err.max(e.norm() / sc);
    }
    (y1, err)
}

/// Integrates `dy/ds = dir * f(y)` for real `s` from 0 to `s_end`.
pub fn integrate_ray(
    f: Field,
    y0: &[Complex64],
    dir: Complex64,
    s_end: f64,
    opts: &OdeOptions,
    stop: &dyn Fn(&[Complex64]) -> bool,
) -> OdeResult {
    let mut stats = OdeStats::default();
    let mut s = 0.0;
    let mut y = y0.to_vec();
    let mut h = opts.initial_step.min(s_end);
    if stop(&y) {
        return OdeResult { s, y, outcome: OdeOutcome::Stopped, stats };
    }
    while s < s_end {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return OdeResult { s, y, outcome: OdeOutcome::Diverged, stats };
        }
        let step = h.min(s_end - s);
        let (y1, err) = dopri_step(f, &y, dir * step, opts);
        stats.evaluations += 7;
        if !err.is_finite() || y1.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            stats.rejected += 1;
            h = step * 0.2;
            if h < 1e-14 {
                return OdeResult { s, y, outcome: OdeOutcome::Diverged, stats };
            }
            continue;
        }
        if err <= 1.0 {
            if stop(&y1) {
                if step <= opts.event_tolerance {
                    return OdeResult { s, y, outcome: OdeOutcome::Stopped, stats };
                }
                stats.rejected += 1;
                h = step * 0.5;
                continue;
            }
            stats.accepted += 1;
            s += step;
            y = y1;
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h = step * fac;
        } else {
            stats.rejected += 1;
            h = step * (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
            if h < 1e-14 {
                return OdeResult { s, y, outcome: OdeOutcome::Diverged, stats };
            }
        }
    }
    OdeResult { s: s_end, y, outcome: OdeOutcome::Completed, stats }
}
