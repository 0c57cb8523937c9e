//! Decoupled time evolution: Bogoliubov pair, F and J coefficients.
//!
//! All quantities use the rescaled time `tau = omega_m * t`. The numeric
//! pipeline integrates the two Mathieu-type mode functions together with
//! every F coefficient (including the nested ones) as a single ten-state
//! ODE, so all outputs share one step sequence.

use num_complex::Complex;

use crate::error::{domain, Error, Result};
use crate::interp::Pchip;
use crate::ode::{integrate, integrate_weighted, Tolerances};
use crate::real::{sinc, sq, Real};

/// Linear gravitational drive `D1(tau) = -d1 (a + epsilon cos(omega_d1 tau + phi_d1))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveSpec<T> {
    pub d1: T,
    pub a: T,
    pub epsilon: T,
    pub omega_d1: T,
    pub phi_d1: T,
}

impl<T: Real> DriveSpec<T> {
    pub fn new(d1: T, a: T, epsilon: T, omega_d1: T, phi_d1: T) -> Result<Self> {
        let s = Self { d1, a, epsilon, omega_d1, phi_d1 };
        s.validate()?;
        Ok(s)
    }

    /// Unit-amplitude drive; the form used for derivatives with respect to `d1`.
    pub fn unit(a: T, epsilon: T, omega_d1: T, phi_d1: T) -> Result<Self> {
        Self::new(T::one(), a, epsilon, omega_d1, phi_d1)
    }

    pub fn none() -> Self {
        Self {
            d1: T::zero(),
            a: T::zero(),
            epsilon: T::zero(),
            omega_d1: T::one(),
            phi_d1: T::zero(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.d1, self.a, self.epsilon, self.omega_d1, self.phi_d1];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(domain("drive parameters must be finite"));
        }
        if self.epsilon < T::zero() {
            return Err(domain(format!("drive epsilon must be >= 0, got {}", self.epsilon)));
        }
        Ok(())
    }

    /// Same drive with a different amplitude `d1`.
    pub fn with_d1(&self, d1: T) -> Self {
        Self { d1, ..*self }
    }

    #[inline]
    pub fn eval(&self, tau: T) -> T {
        -self.d1 * (self.a + self.epsilon * (self.omega_d1 * tau + self.phi_d1).cos())
    }
}

/// Optomechanical coupling `k(tau)`.
#[derive(Debug, Clone, PartialEq)]
pub enum CouplingSpec<T> {
    Constant { k0: T },
    Modulated { k0: T, omega_k: T, phi_k: T },
    Sampled(Pchip<T>),
}

impl<T: Real> CouplingSpec<T> {
    pub fn constant(k0: T) -> Result<Self> {
        let s = Self::Constant { k0 };
        s.validate()?;
        Ok(s)
    }

    pub fn modulated(k0: T, omega_k: T, phi_k: T) -> Result<Self> {
        let s = Self::Modulated { k0, omega_k, phi_k };
        s.validate()?;
        Ok(s)
    }

    /// Coupling interpolated monotonically through `(tau, k)` samples.
    pub fn sampled(tau: Vec<T>, k: Vec<T>) -> Result<Self> {
        Ok(Self::Sampled(Pchip::new(tau, k)?))
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Constant { k0 } => check_k0(k0),
            Self::Modulated { k0, omega_k, phi_k } => {
                check_k0(k0)?;
                if !omega_k.is_finite() || !phi_k.is_finite() {
                    return Err(domain("coupling frequency and phase must be finite"));
                }
                Ok(())
            }
            Self::Sampled(_) => Ok(()),
        }
    }

    /// Coupling amplitude used to scale separability thresholds.
    pub fn scale(&self) -> T {
        match self {
            Self::Constant { k0 } | Self::Modulated { k0, .. } => *k0,
            Self::Sampled(p) => p.max_abs(),
        }
    }

    #[inline]
    pub fn eval(&self, tau: T) -> T {
        match self {
            Self::Constant { k0 } => *k0,
            Self::Modulated { k0, omega_k, phi_k } => *k0 * (*omega_k * tau + *phi_k).cos(),
            Self::Sampled(p) => p.eval(tau),
        }
    }

    fn check_range(&self, tau: T) -> Result<()> {
        if let Self::Sampled(p) = self {
            let (lo, hi) = p.domain();
            if lo > T::zero() || tau > hi {
                return Err(domain(format!(
                    "sampled coupling covers [{lo}, {hi}] but [0, {tau}] was requested"
                )));
            }
        }
        Ok(())
    }
}

fn check_k0<T: Real>(k0: T) -> Result<()> {
    if !k0.is_finite() || k0 < T::zero() {
        return Err(domain(format!("k0 must be finite and >= 0, got {k0}")));
    }
    Ok(())
}

/// Mechanical frequency modulation `D2(tau) = d2 cos(omega_d2 tau + phi_d2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreqModSpec<T> {
    pub d2: T,
    pub omega_d2: T,
    pub phi_d2: T,
}

impl<T: Real> FreqModSpec<T> {
    /// Amplitudes at or above this are rejected outright.
    pub const HARD_LIMIT: f64 = 0.5;
    /// Amplitudes below this are inside the perturbative regime.
    pub const SOFT_LIMIT: f64 = 0.1;

    pub fn new(d2: T, omega_d2: T, phi_d2: T) -> Result<Self> {
        let s = Self { d2, omega_d2, phi_d2 };
        s.validate()?;
        Ok(s)
    }

    /// Modulation at parametric resonance (`omega_d2 = 2`).
    pub fn parametric(d2: T, phi_d2: T) -> Result<Self> {
        Self::new(d2, T::lit(2.0), phi_d2)
    }

    pub fn none() -> Self {
        Self { d2: T::zero(), omega_d2: T::zero(), phi_d2: T::zero() }
    }

    pub fn validate(&self) -> Result<()> {
        if ![self.d2, self.omega_d2, self.phi_d2].iter().all(|v| v.is_finite()) {
            return Err(domain("frequency modulation parameters must be finite"));
        }
        if self.d2.abs() >= T::lit(Self::HARD_LIMIT) {
            return Err(domain(format!("|d2| must be < {}, got {}", Self::HARD_LIMIT, self.d2)));
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.d2 == T::zero()
    }

    /// False when `|d2|` is large enough that perturbative closed forms are unreliable.
    pub fn is_perturbative(&self) -> bool {
        self.d2.abs() < T::lit(Self::SOFT_LIMIT)
    }

    #[inline]
    pub fn eval(&self, tau: T) -> T {
        self.d2 * (self.omega_d2 * tau + self.phi_d2).cos()
    }
}

/// Bogoliubov coefficients of the mechanical mode and the real mode functions
/// they are built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BogoliubovPair<T> {
    pub alpha: Complex<T>,
    pub beta: Complex<T>,
    pub p11: T,
    pub p11_dot: T,
    pub ip22: T,
    pub ip22_dot: T,
}

impl<T: Real> BogoliubovPair<T> {
    pub fn from_mode_functions(p11: T, p11_dot: T, ip22: T, ip22_dot: T) -> Self {
        let half = T::lit(0.5);
        let alpha = Complex::new(half * (p11 + ip22_dot), half * (p11_dot - ip22));
        let beta = Complex::new(half * (p11 - ip22_dot), half * (ip22 + p11_dot));
        Self { alpha, beta, p11, p11_dot, ip22, ip22_dot }
    }

    /// Free evolution `alpha = e^{-i tau}`, `beta = 0`.
    pub fn free(tau: T) -> Self {
        Self::from_mode_functions(tau.cos(), -tau.sin(), tau.sin(), tau.cos())
    }

    /// `|alpha|^2 - |beta|^2`, equal to one for a valid pair.
    pub fn normalization(&self) -> T {
        self.alpha.norm_sqr() - self.beta.norm_sqr()
    }

    pub fn xi(&self) -> Complex<T> {
        xi(self)
    }
}

/// `xi = alpha + conj(beta)`.
pub fn xi<T: Real>(bp: &BogoliubovPair<T>) -> Complex<T> {
    bp.alpha + bp.beta.conj()
}

/// The six F coefficients of the factorized evolution operator.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FCoefficients<T> {
    pub f_na: T,
    pub f_na2: T,
    pub f_bp: T,
    pub f_bm: T,
    pub f_nabp: T,
    pub f_nabm: T,
}

impl<T: Real> FCoefficients<T> {
    pub fn linear(&self) -> LinearFCoefficients<T> {
        LinearFCoefficients {
            f_bp: self.f_bp,
            f_bm: self.f_bm,
            f_nabp: self.f_nabp,
            f_nabm: self.f_nabm,
        }
    }

    pub fn is_finite(&self) -> bool {
        [self.f_na, self.f_na2, self.f_bp, self.f_bm, self.f_nabp, self.f_nabm]
            .iter()
            .all(|v| v.is_finite())
    }
}

/// The four first-order F coefficients, which have closed forms whenever
/// the mechanics is unmodulated.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LinearFCoefficients<T> {
    pub f_bp: T,
    pub f_bm: T,
    pub f_nabp: T,
    pub f_nabm: T,
}

/// Squeezing and rotation coefficients generated by the frequency modulation.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct JCoefficients<T> {
    pub j_b: T,
    pub j_plus: T,
    pub j_minus: T,
}

/// Full decoupled state at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evolution<T> {
    pub tau: T,
    pub mechanics: BogoliubovPair<T>,
    pub f: FCoefficients<T>,
}

/// Integrates the mode functions and all F coefficients, returning the state
/// at every time in `taus` (sorted, non-negative).
pub fn evolve<T: Real>(
    drive: &DriveSpec<T>,
    coupling: &CouplingSpec<T>,
    fm: &FreqModSpec<T>,
    taus: &[T],
    tol: &Tolerances<T>,
) -> Result<Vec<Evolution<T>>> {
    drive.validate()?;
    coupling.validate()?;
    fm.validate()?;
    if let Some(&t) = taus.iter().find(|t| !(**t >= T::zero())) {
        return Err(domain(format!("tau must be >= 0, got {t}")));
    }
    if let Some(&last) = taus.last() {
        coupling.check_range(last)?;
    }
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    let rhs = |t: T, y: &[T; 10]| {
        let [p, pd, i, id, sk, sd, _, _, _, _] = *y;
        let w = T::one() + four * fm.eval(t);
        let k = coupling.eval(t);
        let d = drive.eval(t);
        [
            pd,
            -w * p,
            id,
            -w * i,
            k * p,
            d * p,
            -k * i,
            d * i,
            -two * k * i * sk,
            two * i * (d * sk + k * sd),
        ]
    };
    let y0 = [T::one(), T::zero(), T::zero(), T::one(), T::zero(), T::zero(), T::zero(), T::zero(), T::zero(), T::zero()];
    // Drive-linear components get tolerances proportional to |d1| so the step
    // sequence, and hence linearity in d1, does not depend on the amplitude.
    let dw = if drive.d1 == T::zero() { T::one() } else { drive.d1.abs() };
    let one = T::one();
    let weights = [one, one, one, one, one, dw, one, dw, one, dw];
    let states = integrate_weighted(rhs, T::zero(), y0, taus, tol, &weights)?;
    Ok(taus
        .iter()
        .zip(states)
        .map(|(&tau, y)| Evolution {
            tau,
            mechanics: BogoliubovPair::from_mode_functions(y[0], y[1], y[2], y[3]),
            f: FCoefficients {
                f_na: y[9],
                f_na2: y[8],
                f_bp: y[5],
                f_bm: y[7],
                f_nabp: -y[4],
                f_nabm: y[6],
            },
        })
        .collect())
}

/// Single-time evolution.
pub fn evolve_at<T: Real>(
    drive: &DriveSpec<T>,
    coupling: &CouplingSpec<T>,
    fm: &FreqModSpec<T>,
    tau: T,
    tol: &Tolerances<T>,
) -> Result<Evolution<T>> {
    Ok(evolve(drive, coupling, fm, &[tau], tol)?[0])
}

/// Integrates the mode functions and assembles the Bogoliubov pair.
pub fn solve_mechanics<T: Real>(fm: &FreqModSpec<T>, tau: T) -> Result<BogoliubovPair<T>> {
    solve_mechanics_with(fm, tau, &Tolerances::default())
}

pub fn solve_mechanics_with<T: Real>(
    fm: &FreqModSpec<T>,
    tau: T,
    tol: &Tolerances<T>,
) -> Result<BogoliubovPair<T>> {
    fm.validate()?;
    if !(tau >= T::zero()) {
        return Err(domain(format!("tau must be >= 0, got {tau}")));
    }
    let four = T::lit(4.0);
    let rhs = |t: T, y: &[T; 4]| {
        let w = T::one() + four * fm.eval(t);
        [y[1], -w * y[0], y[3], -w * y[2]]
    };
    let y = integrate(rhs, T::zero(), [T::one(), T::zero(), T::zero(), T::one()], &[tau], tol)?[0];
    Ok(BogoliubovPair::from_mode_functions(y[0], y[1], y[2], y[3]))
}

/// All six F coefficients at `tau` from the numeric pipeline.
pub fn f_coefficients_numeric<T: Real>(
    drive: &DriveSpec<T>,
    coupling: &CouplingSpec<T>,
    fm: &FreqModSpec<T>,
    tau: T,
) -> Result<FCoefficients<T>> {
    Ok(evolve_at(drive, coupling, fm, tau, &Tolerances::default())?.f)
}

/// Two-timescale approximation to the mode functions for `omega_d2 = 2`.
///
/// Returns `(P11, I_P22)`; accurate to first order in `d2` while `d2 tau` is O(1).
pub fn mathieu_perturbative<T: Real>(d2: T, phi_d2: T, tau: T) -> Result<(T, T)> {
    let two = T::lit(2.0);
    let den = two * (d2 * phi_d2.cos() - T::one());
    if den == T::zero() {
        return Err(domain("singular denominator: d2 cos(phi_d2) = 1"));
    }
    let e = (two * d2 * tau).exp();
    let decay = (-d2 * tau).exp();
    let (s, c) = tau.sin_cos();
    let (sp, cp) = (tau + phi_d2).sin_cos();
    let p = decay * ((e - T::one()) * (sp - d2 * s) + d2 * (e + T::one()) * cp - (e + T::one()) * c)
        / den;
    let i = decay * ((e - T::one()) * cp - (e + T::one()) * s) / den;
    Ok((p, i))
}

/// `int_0^tau cos(omega t + phi) dt`, well conditioned for any `omega` including 0.
pub(crate) fn cos_integral<T: Real>(omega: T, phi: T, tau: T) -> T {
    let half = T::lit(0.5) * omega * tau;
    tau * (half + phi).cos() * sinc(half)
}

/// `int_0^tau sin(omega t + phi) dt`.
pub(crate) fn sin_integral<T: Real>(omega: T, phi: T, tau: T) -> T {
    let half = T::lit(0.5) * omega * tau;
    tau * (half + phi).sin() * sinc(half)
}

/// First-order F coefficients for `k = k0 cos(omega_k tau + phi_k)`, an
/// arbitrary-frequency drive and no frequency modulation.
///
/// The `1/(omega^2 - 1)` closed forms are evaluated through products with
/// `sin(x)/x`, which stay accurate straight through resonance, so no special
/// branch near `omega = 1` is needed.
pub fn f_coefficients_modulated<T: Real>(
    k0: T,
    omega_k: T,
    phi_k: T,
    drive: &DriveSpec<T>,
    tau: T,
) -> Result<LinearFCoefficients<T>> {
    drive.validate()?;
    check_k0(k0)?;
    if omega_k < T::zero() || drive.omega_d1 < T::zero() {
        return Err(domain("modulation frequencies must be >= 0"));
    }
    if !(tau >= T::zero()) {
        return Err(domain(format!("tau must be >= 0, got {tau}")));
    }
    let half = T::lit(0.5);
    let one = T::one();
    let (s, c) = tau.sin_cos();
    let (o, p) = (drive.omega_d1, drive.phi_d1);
    let cc = half * (cos_integral(o - one, p, tau) + cos_integral(o + one, p, tau));
    let cs = half * (sin_integral(o + one, p, tau) - sin_integral(o - one, p, tau));
    let kc = half * (cos_integral(omega_k - one, phi_k, tau) + cos_integral(omega_k + one, phi_k, tau));
    let ks = half * (sin_integral(omega_k + one, phi_k, tau) - sin_integral(omega_k - one, phi_k, tau));
    Ok(LinearFCoefficients {
        f_bp: -drive.d1 * (drive.a * s + drive.epsilon * cc),
        f_bm: -drive.d1 * (drive.a * (one - c) + drive.epsilon * cs),
        f_nabp: -k0 * kc,
        f_nabm: -k0 * ks,
    })
}

/// `F_{N^2}` for constant coupling and no frequency modulation.
pub fn f_na2_constant<T: Real>(k0: T, tau: T) -> T {
    let (s, c) = tau.sin_cos();
    -sq(k0) * (tau - s * c)
}

/// Constant coupling with a drive at mechanical resonance.
///
/// The first-order coefficients and `F_{N^2}` are closed forms; `F_N` has no
/// compact closed form and is taken from the numeric pipeline.
pub fn f_coefficients_constant_resonant<T: Real>(
    k0: T,
    drive: &DriveSpec<T>,
    tau: T,
) -> Result<FCoefficients<T>> {
    if (drive.omega_d1 - T::one()).abs() > T::lit(1e-12) {
        return Err(Error::Precondition(format!(
            "drive must be resonant (omega_d1 = 1), got {}",
            drive.omega_d1
        )));
    }
    let lin = f_coefficients_modulated(k0, T::zero(), T::zero(), drive, tau)?;
    let coupling = CouplingSpec::constant(k0)?;
    let numeric = f_coefficients_numeric(drive, &coupling, &FreqModSpec::none(), tau)?;
    Ok(FCoefficients {
        f_na: numeric.f_na,
        f_na2: f_na2_constant(k0, tau),
        f_bp: lin.f_bp,
        f_bm: lin.f_bm,
        f_nabp: lin.f_nabp,
        f_nabm: lin.f_nabm,
    })
}

/// J coefficients from a normalized Bogoliubov pair.
pub fn j_coefficients<T: Real>(bp: &BogoliubovPair<T>) -> Result<JCoefficients<T>> {
    let norm = bp.normalization();
    if !((norm - T::one()).abs() <= T::tol(1e-8)) {
        return Err(domain(format!("Bogoliubov pair not normalized: |a|^2 - |b|^2 = {norm}")));
    }
    let w = bp.alpha * bp.alpha - bp.beta * bp.beta;
    let m = w.norm();
    let quarter = T::lit(0.25);
    let j_plus = quarter * m.max(T::one()).acosh();
    let ratio = (T::lit(2.0) * bp.alpha.norm_sqr() - T::one()) / m;
    let j_minus = quarter * ratio.max(T::one()).acosh();
    let mut arg = w.im.atan2(w.re);
    if arg <= -T::PI() {
        arg = T::PI();
    }
    Ok(JCoefficients { j_b: -T::lit(0.5) * arg, j_plus, j_minus })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn tight() -> Tolerances<f64> {
        Tolerances::new(1e-12, 1e-14)
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    /// Literal transcription of the printed `1/(omega^2 - 1)` closed forms.
    fn printed_modulated(k0: f64, ok: f64, pk: f64, d: &DriveSpec<f64>, t: f64) -> [f64; 4] {
        let (o, p) = (d.omega_d1, d.phi_d1);
        let fbp = -d.d1 * d.a * t.sin()
            - d.d1 * d.epsilon
                * ((o + 1.0) * ((o - 1.0) * t + p).sin() + (o - 1.0) * ((o + 1.0) * t + p).sin()
                    - 2.0 * o * p.sin())
                / (2.0 * (o * o - 1.0));
        let fbm = d.d1 * d.a * (t.cos() - 1.0)
            - d.d1 * d.epsilon
                * ((o + 1.0) * ((o - 1.0) * t + p).cos() - (o - 1.0) * ((o + 1.0) * t + p).cos()
                    - 2.0 * p.cos())
                / (2.0 * (o * o - 1.0));
        let fnabp = -k0
            * ((ok + 1.0) * ((ok - 1.0) * t + pk).sin() + (ok - 1.0) * ((ok + 1.0) * t + pk).sin()
                - 2.0 * ok * pk.sin())
            / (2.0 * (ok * ok - 1.0));
        let fnabm = k0 * (pk.cos() - t.cos() * (ok * t + pk).cos() - ok * t.sin() * (ok * t + pk).sin())
            / (ok * ok - 1.0);
        [fbp, fbm, fnabp, fnabm]
    }

    /// Printed closed forms for constant coupling and a resonant drive.
    fn printed_resonant(k0: f64, d: &DriveSpec<f64>, t: f64) -> [f64; 4] {
        let (a, e, p) = (d.a, d.epsilon, d.phi_d1);
        [
            -0.5 * d.d1 * (t * e * p.cos() + (2.0 * a + e * (t + p).cos()) * t.sin()),
            0.25 * d.d1 * (4.0 * a * (t.cos() - 1.0) + e * (2.0 * t * p.sin() + (2.0 * t + p).cos() - p.cos())),
            -k0 * t.sin(),
            k0 * (t.cos() - 1.0),
        ]
    }

    #[test]
    fn free_mechanics_is_a_rotation() {
        for &tau in &[0.0, 0.3, PI, 5.0] {
            let bp = solve_mechanics_with(&FreqModSpec::none(), tau, &tight()).unwrap();
            let want = Complex::new(tau.cos(), -tau.sin());
            assert!((bp.alpha - want).norm() < 1e-10);
            assert!(bp.beta.norm() < 1e-10);
            assert!((bp.xi() - want).norm() < 1e-10);
        }
        let bp = solve_mechanics(&FreqModSpec::none(), PI).unwrap();
        assert!((bp.alpha + 1.0).norm() < 1e-9);
    }

    #[test]
    fn xi_at_zero_is_one() {
        let bp = solve_mechanics(&FreqModSpec::parametric(0.02, 0.3).unwrap(), 0.0).unwrap();
        assert_eq!(bp.xi(), Complex::new(1.0, 0.0));
    }

    #[test]
    fn parametric_xi_stays_inside_growth_envelope() {
        let (d2, tau) = (0.02, 2.0 * PI);
        let bp = solve_mechanics(&FreqModSpec::parametric(d2, -PI / 2.0).unwrap(), tau).unwrap();
        let m = bp.xi().norm();
        assert!(m >= (-d2 * tau).exp() && m <= (d2 * tau).exp(), "|xi| = {m}");
    }

    #[test]
    fn perturbative_mathieu_matches_ode_at_small_amplitude() {
        let fm = FreqModSpec::parametric(1e-3, -PI / 2.0).unwrap();
        let bp = solve_mechanics_with(&fm, 2.0 * PI, &tight()).unwrap();
        let (p, i) = mathieu_perturbative(1e-3, -PI / 2.0, 2.0 * PI).unwrap();
        assert!((p - bp.p11).abs() < 1e-4);
        assert!((i - bp.ip22).abs() < 1e-4);
    }

    #[test]
    fn perturbative_mathieu_limits() {
        let (p, i) = mathieu_perturbative(0.0, 0.7, 1.3).unwrap();
        assert!((p - 1.3f64.cos()).abs() < 1e-15 && (i - 1.3f64.sin()).abs() < 1e-15);
        let (p, i) = mathieu_perturbative(0.02f64, 0.4, 0.0).unwrap();
        assert!((p - 1.0).abs() < 1e-15 && i.abs() < 1e-15);
        let fm = FreqModSpec::parametric(0.02, -PI / 2.0).unwrap();
        let bp = solve_mechanics_with(&fm, PI, &tight()).unwrap();
        let (p, i) = mathieu_perturbative(0.02, -PI / 2.0, PI).unwrap();
        assert!((p - bp.p11).abs() < 0.02 && (i - bp.ip22).abs() < 0.02);
    }

    #[test]
    fn normalization_holds_under_modulation() {
        for &d2 in &[0.0f64, 1e-3, 1e-2, 0.02, 0.3] {
            let fm = FreqModSpec::parametric(d2, 0.4).unwrap();
            for &tau in &[0.5, 3.0, 7.0, 18.0] {
                let bp = solve_mechanics(&fm, tau).unwrap();
                assert!((bp.normalization() - 1.0).abs() < 1e-10, "d2={d2} tau={tau}");
            }
        }
    }

    #[test]
    fn zero_drive_leaves_drive_coefficients_zero() {
        let c = CouplingSpec::modulated(0.7, 1.3, 0.2).unwrap();
        let f = f_coefficients_numeric(&DriveSpec::none(), &c, &FreqModSpec::none(), 4.0).unwrap();
        assert_eq!((f.f_bp, f.f_bm, f.f_na), (0.0, 0.0, 0.0));
        assert!(f.f_nabp != 0.0 && f.f_na2 != 0.0);
    }

    #[test]
    fn zero_coupling_leaves_coupling_coefficients_zero() {
        let d = DriveSpec::new(1.0, 0.3, 0.5, 1.2, 0.1).unwrap();
        let f = f_coefficients_numeric(&d, &CouplingSpec::constant(0.0).unwrap(), &FreqModSpec::none(), 4.0)
            .unwrap();
        assert_eq!((f.f_na, f.f_na2, f.f_nabp, f.f_nabm), (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn resonant_period_zeroes_first_order_coefficients() {
        let d = DriveSpec::new(1.0, 1.0, 0.0, 1.0, 0.0).unwrap();
        let c = CouplingSpec::constant(1.0).unwrap();
        let f = evolve_at(&d, &c, &FreqModSpec::none(), 2.0 * PI, &tight()).unwrap().f;
        for v in [f.f_bp, f.f_bm, f.f_nabp, f.f_nabm] {
            assert!(v.abs() < 1e-9, "{v}");
        }
        let cf = f_coefficients_constant_resonant(1.0, &d, 2.0 * PI).unwrap();
        assert!(cf.f_bp.abs() < 1e-14 && cf.f_bm.abs() < 1e-14);
    }

    #[test]
    fn constant_resonant_half_period_values() {
        let d = DriveSpec::new(1.0, 0.5, 0.5, 1.0, 0.3).unwrap();
        let f = f_coefficients_constant_resonant(1.0, &d, PI).unwrap();
        assert!(f.f_nabp.abs() < 1e-15);
        assert!((f.f_nabm + 2.0).abs() < 1e-15);
        let z = f_coefficients_constant_resonant(1.0, &d.with_d1(0.0), 2.3).unwrap();
        assert_eq!((z.f_bp, z.f_bm), (0.0, 0.0));
    }

    #[test]
    fn constant_resonant_rejects_off_resonance() {
        let d = DriveSpec::new(1.0, 0.5, 0.5, 1.1, 0.3).unwrap();
        assert!(matches!(
            f_coefficients_constant_resonant(1.0, &d, 1.0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn kerr_coefficient_matches_closed_form() {
        let d = DriveSpec::new(0.4, 0.3, 0.2, 1.0, 0.5).unwrap();
        let c = CouplingSpec::constant(0.8).unwrap();
        for &tau in &[0.7, PI, 2.0 * PI, 9.0] {
            let f = evolve_at(&d, &c, &FreqModSpec::none(), tau, &tight()).unwrap().f;
            assert!(close(f.f_na2, f_na2_constant(0.8, tau), 1e-10));
        }
        assert!((f_na2_constant(1.0, 2.0 * PI) + 2.0 * PI).abs() < 1e-14);
    }

    #[test]
    fn stable_form_matches_printed_form_off_resonance() {
        let d = DriveSpec::new(0.9, 0.4, 0.7, 1.6, 0.9).unwrap();
        for &(ok, pk, t) in &[(0.9, 0.0, PI), (0.3, 1.1, 4.2), (2.7, 5.0, 11.0), (0.0, 0.0, 2.0)] {
            let got = f_coefficients_modulated(1.3, ok, pk, &d, t).unwrap();
            let want = printed_modulated(1.3, ok, pk, &d, t);
            let got = [got.f_bp, got.f_bm, got.f_nabp, got.f_nabm];
            for (g, w) in got.iter().zip(&want) {
                assert!(close(*g, *w, 1e-12), "{g} vs {w}");
            }
        }
    }

    #[test]
    fn stable_form_at_resonance_matches_printed_resonant_form() {
        let d = DriveSpec::new(1.0, 0.6, 0.8, 1.0, 2.1).unwrap();
        for &t in &[0.4, 3.0, 10.0] {
            let got = f_coefficients_modulated(1.2, 0.0, 0.0, &d, t).unwrap();
            let want = printed_resonant(1.2, &d, t);
            let got = [got.f_bp, got.f_bm, got.f_nabp, got.f_nabm];
            for (g, w) in got.iter().zip(&want) {
                assert!(close(*g, *w, 1e-13), "{g} vs {w}");
            }
        }
    }

    #[test]
    fn near_resonance_limit_is_continuous() {
        let t = 7.3;
        let at = |o: f64| {
            let d = DriveSpec::new(1.0, 0.2, 0.9, o, 0.4).unwrap();
            f_coefficients_modulated(1.0, o, 0.4, &d, t).unwrap()
        };
        let (a, b) = (at(1.0), at(1.0 + 1e-9));
        assert!((a.f_bp - b.f_bp).abs() < 1e-7);
        assert!((a.f_nabm - b.f_nabm).abs() < 1e-7);
        // the printed form loses most of its digits this close to resonance
        let d = DriveSpec::new(1.0, 0.2, 0.9, 1.0, 0.4).unwrap();
        let r = printed_resonant(1.0, &d, t);
        assert!((a.f_bp - r[0]).abs() < 1e-13);
    }

    #[test]
    fn fractional_frequency_decouples() {
        let d = DriveSpec::new(1.0, 0.0, 1.0, 3.0, 0.0).unwrap();
        let f = f_coefficients_modulated(1.0, 3.0, 0.0, &d, PI).unwrap();
        assert!(f.f_nabp.abs() < 1e-14 && f.f_nabm.abs() < 1e-14);
        let z = f_coefficients_modulated(1.0, 0.6, 0.2, &d, 0.0).unwrap();
        assert_eq!(z, LinearFCoefficients::default());
    }

    #[test]
    fn numeric_matches_modulated_closed_form() {
        let d = DriveSpec::new(1.0, 0.3, 0.6, 1.4, 0.2).unwrap();
        let c = CouplingSpec::modulated(1.0, 0.9, 0.0).unwrap();
        let f = evolve_at(&d, &c, &FreqModSpec::none(), PI, &tight()).unwrap().f;
        let cf = f_coefficients_modulated(1.0, 0.9, 0.0, &d, PI).unwrap();
        for (g, w) in [f.f_bp, f.f_bm, f.f_nabp, f.f_nabm].iter().zip([cf.f_bp, cf.f_bm, cf.f_nabp, cf.f_nabm]) {
            assert!(close(*g, w, 1e-9), "{g} vs {w}");
        }
    }

    #[test]
    fn sampled_coupling_reproduces_constant() {
        let taus: Vec<f64> = (0..=40).map(|i| i as f64 * 0.25).collect();
        let ks = vec![0.5; taus.len()];
        let s = CouplingSpec::sampled(taus, ks).unwrap();
        let c = CouplingSpec::constant(0.5).unwrap();
        let d = DriveSpec::new(1.0, 1.0, 0.3, 1.0, 0.0).unwrap();
        let a = evolve_at(&d, &s, &FreqModSpec::none(), 6.0, &tight()).unwrap().f;
        let b = evolve_at(&d, &c, &FreqModSpec::none(), 6.0, &tight()).unwrap().f;
        assert!(close(a.f_na, b.f_na, 1e-10));
        assert!(matches!(
            evolve_at(&d, &s, &FreqModSpec::none(), 11.0, &tight()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn linearity_in_d1() {
        let c = CouplingSpec::modulated(0.8, 0.75, 0.3).unwrap();
        let fm = FreqModSpec::parametric(0.01, -0.5).unwrap();
        let d = DriveSpec::new(1.0, 0.4, 0.9, 0.75, 1.0).unwrap();
        let f1 = evolve_at(&d, &c, &fm, 5.0, &tight()).unwrap().f;
        let f3 = evolve_at(&d.with_d1(3.0), &c, &fm, 5.0, &tight()).unwrap().f;
        for (x, y) in [(f1.f_bp, f3.f_bp), (f1.f_bm, f3.f_bm), (f1.f_na, f3.f_na)] {
            assert!((3.0 * x - y).abs() <= 1e-12 * (1.0 + y.abs()), "{x} {y}");
        }
        assert!((f1.f_nabm - f3.f_nabm).abs() < 1e-13);
    }

    #[test]
    fn j_coefficients_free_and_initial() {
        for &tau in &[0.0f64, 0.4, 1.5] {
            let j = j_coefficients(&BogoliubovPair::free(tau)).unwrap();
            assert!((j.j_b - tau).abs() < 1e-14);
            assert_eq!((j.j_plus, j.j_minus), (0.0, 0.0));
        }
        let j = j_coefficients(&BogoliubovPair::free(2.0)).unwrap();
        assert!((j.j_b - (2.0 - PI)).abs() < 1e-14);
    }

    #[test]
    fn parametric_driving_generates_squeezing() {
        let bp = solve_mechanics(&FreqModSpec::parametric(0.02, 0.0).unwrap(), PI).unwrap();
        let j = j_coefficients(&bp).unwrap();
        assert!(j.j_plus > 0.0);
    }

    #[test]
    fn j_coefficients_reject_unnormalized_pair() {
        let mut bp = BogoliubovPair::<f64>::free(1.0);
        bp.beta = Complex::new(0.5, 0.0);
        assert!(matches!(j_coefficients(&bp), Err(Error::Domain(_))));
    }

    #[test]
    fn spec_validation() {
        assert!(DriveSpec::new(1.0, 0.0, -0.1, 1.0, 0.0).is_err());
        assert!(CouplingSpec::constant(-1.0).is_err());
        assert!(FreqModSpec::new(0.5, 2.0, 0.0).is_err());
        let fm = FreqModSpec::new(0.2, 2.0, 0.0).unwrap();
        assert!(!fm.is_perturbative());
        assert!(evolve(&DriveSpec::none(), &CouplingSpec::constant(1.0).unwrap(), &fm, &[-1.0], &tight())
            .is_err());
    }

    #[test]
    fn single_precision_pipeline() {
        let d = DriveSpec::<f32>::new(1.0, 1.0, 0.0, 1.0, 0.0).unwrap();
        let c = CouplingSpec::constant(1.0f32).unwrap();
        let f = f_coefficients_numeric(&d, &c, &FreqModSpec::none(), 2.0 * std::f32::consts::PI).unwrap();
        assert!((f.f_na2 + 2.0 * std::f32::consts::PI).abs() < 1e-2);
    }
}
