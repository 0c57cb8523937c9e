//! Adaptive Dormand–Prince 5(4) integrator for small fixed-size systems.
//!
//! The stepper lands exactly on every requested output time, so a single
//! pass over a sorted grid yields the state at each grid point without
//! interpolation error.

use crate::error::{Error, Result};
use crate::real::Real;

/// Error-control settings for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances<T> {
    pub rtol: T,
    pub atol: T,
    pub max_steps: usize,
}

impl<T: Real> Tolerances<T> {
    /// Builds tolerances, raising `rtol` to what the scalar type can resolve.
    pub fn new(rtol: f64, atol: f64) -> Self {
        Self { rtol: T::tol(rtol), atol: T::tol(atol), max_steps: 2_000_000 }
    }
}

impl<T: Real> Default for Tolerances<T> {
    fn default() -> Self {
        Self::new(1e-12, 1e-14)
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
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[inline]
fn axpy<T: Real, const N: usize>(y: &[T; N], h: T, terms: &[(f64, &[T; N])]) -> [T; N] {
    let mut out = *y;
    for (c, k) in terms {
        let ch = T::lit(*c) * h;
        for i in 0..N {
            out[i] += ch * k[i];
        }
    }
    out
}

fn error_norm<T: Real, const N: usize>(
    y: &[T; N],
    y_new: &[T; N],
    err: &[T; N],
    tol: &Tolerances<T>,
    weights: &[T; N],
) -> T {
    let mut acc = T::zero();
    for i in 0..N {
        let scale = tol.atol * weights[i] + tol.rtol * y[i].abs().max(y_new[i].abs());
        let r = err[i] / scale;
        acc += r * r;
    }
    (acc / T::lit(N as f64)).sqrt()
}

/// Integrates `y' = f(t, y)` from `(t0, y0)` and returns the state at each
/// time in `outputs`.
///
/// `outputs` must be non-decreasing and not earlier than `t0`.
pub fn integrate<T, const N: usize, F>(
    f: F,
    t0: T,
    y0: [T; N],
    outputs: &[T],
    tol: &Tolerances<T>,
) -> Result<Vec<[T; N]>>
where
    T: Real,
    F: FnMut(T, &[T; N]) -> [T; N],
{
    integrate_weighted(f, t0, y0, outputs, tol, &[T::one(); N])
}

/// Like [`integrate`], with the absolute tolerance of component `i` scaled by
/// `weights[i]`.
///
/// Scaling a component's weight together with its magnitude leaves the step
/// sequence unchanged, which keeps outputs exactly linear in a parameter the
/// component is proportional to.
pub fn integrate_weighted<T, const N: usize, F>(
    mut f: F,
    t0: T,
    y0: [T; N],
    outputs: &[T],
    tol: &Tolerances<T>,
    weights: &[T; N],
) -> Result<Vec<[T; N]>>
where
    T: Real,
    F: FnMut(T, &[T; N]) -> [T; N],
{
    if weights.iter().any(|w| !(*w > T::zero()) || !w.is_finite()) {
        return Err(Error::Domain("tolerance weights must be positive and finite".into()));
    }
    let mut prev = t0;
    for &t in outputs {
        if !t.is_finite() || t < prev {
            return Err(Error::Domain(format!(
                "output times must be finite and non-decreasing from t0, got {t}"
            )));
        }
        prev = t;
    }

    let mut out = Vec::with_capacity(outputs.len());
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    let mut h = T::zero();
    let mut steps = 0usize;
    let fifth = T::lit(0.2);

    for &target in outputs {
        if target == t {
            out.push(y);
            continue;
        }
        if h == T::zero() {
            h = initial_step(&mut f, t, &y, &k1, target - t, tol, weights);
        }
        loop {
            let remaining = target - t;
            let last = h >= remaining;
            let step = if last { remaining } else { h };

            let k2 = f(t + T::lit(C2) * step, &axpy(&y, step, &[(A21, &k1)]));
            let k3 = f(t + T::lit(C3) * step, &axpy(&y, step, &[(A31, &k1), (A32, &k2)]));
            let k4 = f(
                t + T::lit(C4) * step,
                &axpy(&y, step, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
            );
            let k5 = f(
                t + T::lit(C5) * step,
                &axpy(&y, step, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
            );
            let k6 = f(
                t + step,
                &axpy(&y, step, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
            );
            let y_new =
                axpy(&y, step, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
            let t_new = if last { target } else { t + step };
            let k7 = f(t_new, &y_new);

            let mut err = [T::zero(); N];
            for i in 0..N {
                err[i] = step
                    * (T::lit(E1) * k1[i]
                        + T::lit(E3) * k3[i]
                        + T::lit(E4) * k4[i]
                        + T::lit(E5) * k5[i]
                        + T::lit(E6) * k6[i]
                        + T::lit(E7) * k7[i]);
            }
            let e = error_norm(&y, &y_new, &err, tol, weights);
            if !e.is_finite() {
                return Err(Error::Integration {
                    tau: t.to_f64_lossy(),
                    step: step.to_f64_lossy(),
                    reason: "non-finite state",
                });
            }

            steps += 1;
            if steps > tol.max_steps {
                return Err(Error::Integration {
                    tau: t.to_f64_lossy(),
                    step: step.to_f64_lossy(),
                    reason: "step budget exhausted",
                });
            }

            let factor = if e == T::zero() {
                T::lit(5.0)
            } else {
                (T::lit(0.9) * e.powf(-fifth)).max(T::lit(0.2)).min(T::lit(5.0))
            };

            if e <= T::one() {
                t = t_new;
                y = y_new;
                k1 = k7;
                // A clipped final step says nothing about the natural size.
                if !last || factor < T::one() {
                    h = step * factor;
                }
                if last {
                    break;
                }
            } else {
                h = step * factor.min(T::one());
                let floor = T::lit(16.0) * T::epsilon() * t.abs().max(T::one());
                if h < floor {
                    return Err(Error::Integration {
                        tau: t.to_f64_lossy(),
                        step: h.to_f64_lossy(),
                        reason: "step size underflow",
                    });
                }
            }
        }
        out.push(y);
    }
    Ok(out)
}

fn initial_step<T, const N: usize, F>(
    f: &mut F,
    t: T,
    y: &[T; N],
    k1: &[T; N],
    span: T,
    tol: &Tolerances<T>,
    weights: &[T; N],
) -> T
where
    T: Real,
    F: FnMut(T, &[T; N]) -> [T; N],
{
    let mut d0 = T::zero();
    let mut d1 = T::zero();
    for i in 0..N {
        let sc = tol.atol * weights[i] + tol.rtol * y[i].abs();
        d0 += (y[i] / sc).powi(2);
        d1 += (k1[i] / sc).powi(2);
    }
    let n = T::lit(N as f64);
    let (d0, d1) = ((d0 / n).sqrt(), (d1 / n).sqrt());
    let tiny = T::lit(1e-5);
    let h0 = if d0 < tiny || d1 < tiny { T::lit(1e-6) } else { T::lit(0.01) * d0 / d1 };
    let h0 = h0.min(span);

    let y1 = axpy(y, h0, &[(1.0, k1)]);
    let k2 = f(t + h0, &y1);
    let mut d2 = T::zero();
    for i in 0..N {
        let sc = tol.atol * weights[i] + tol.rtol * y[i].abs();
        d2 += ((k2[i] - k1[i]) / sc).powi(2);
    }
    let d2 = (d2 / n).sqrt() / h0;
    let big = d1.max(d2);
    let h1 = if big <= T::lit(1e-15) {
        (h0 * T::lit(1e-3)).max(T::lit(1e-6))
    } else {
        (T::lit(0.01) / big).powf(T::lit(0.2))
    };
    (T::lit(100.0) * h0).min(h1).min(span)
}
