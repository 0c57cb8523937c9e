//! Dimensionful sensitivity bounds, validity restrictions on the cavity
//! field, and the Casimir systematic.

use num_complex::Complex;

use crate::dynamics::{evolve, CouplingSpec, DriveSpec, Evolution, FreqModSpec};
use crate::error::{domain, Error, Result};
use crate::ode::Tolerances;
use crate::params::{constants, ThermalParameter};
use crate::qfi::PhotonStats;
use crate::real::{sq, Real};

/// Initial thermal state of the mechanics, optionally displaced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MechanicalState<T> {
    pub r_t: ThermalParameter<T>,
    pub mu_m: Complex<T>,
}

impl<T: Real> MechanicalState<T> {
    pub fn ground() -> Self {
        Self { r_t: ThermalParameter::ground(), mu_m: Complex::new(T::zero(), T::zero()) }
    }

    pub fn thermal(r_t: ThermalParameter<T>) -> Self {
        Self { r_t, mu_m: Complex::new(T::zero(), T::zero()) }
    }
}

/// Outcome of comparing the photon statistics with a validity ceiling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Validity<T> {
    pub max_mean_n: T,
    /// `None` when the scheme only constrains the mean.
    pub max_std_n: Option<T>,
    pub safety_factor: T,
    pub mean_ok: bool,
    pub std_ok: bool,
}

impl<T: Real> Validity<T> {
    pub fn ok(&self) -> bool {
        self.mean_ok && self.std_ok
    }
}

/// A sensitivity bound and where it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityReport<T> {
    /// Bound on the acceleration amplitude (m/s^2); infinite when `qfi_used` is 0.
    pub delta_g0: T,
    pub qfi_used: T,
    pub measurements: u64,
    pub scheme: String,
    pub validity: Option<Validity<T>>,
}

impl<T: Real> SensitivityReport<T> {
    pub fn new(scheme: impl Into<String>, qfi: T, measurements: u64, x0: T, omega_m: T) -> Result<Self> {
        Ok(Self {
            delta_g0: qcrb_delta_g0(qfi, measurements, x0, omega_m)?,
            qfi_used: qfi,
            measurements,
            scheme: scheme.into(),
            validity: None,
        })
    }

    pub fn with_validity(mut self, v: Validity<T>) -> Self {
        self.validity = Some(v);
        self
    }

    pub fn is_finite(&self) -> bool {
        self.delta_g0.is_finite()
    }
}

fn check_measurements(m: u64) -> Result<()> {
    if m == 0 {
        return Err(domain("the number of measurements must be >= 1"));
    }
    Ok(())
}

fn check_positive<T: Real>(name: &str, v: T) -> Result<()> {
    if !(v > T::zero()) || !v.is_finite() {
        return Err(domain(format!("{name} must be finite and > 0, got {v}")));
    }
    Ok(())
}

/// `2 x0 omega_m^2 / sqrt(M I)`; infinite for `I = 0`.
pub fn qcrb_delta_g0<T: Real>(qfi: T, measurements: u64, x0: T, omega_m: T) -> Result<T> {
    check_measurements(measurements)?;
    check_positive("x0", x0)?;
    check_positive("omega_m", omega_m)?;
    if qfi < T::zero() || qfi.is_nan() {
        return Err(Error::Consistency(format!("Fisher information must be >= 0, got {qfi}")));
    }
    if qfi == T::zero() {
        return Ok(T::infinity());
    }
    Ok(T::lit(2.0) * x0 * sq(omega_m) / (T::lit(measurements as f64) * qfi).sqrt())
}

fn g0_scale<T: Real>(measurements: u64, x0: T, omega_m: T, ps: &PhotonStats<T>) -> Result<T> {
    check_measurements(measurements)?;
    check_positive("x0", x0)?;
    check_positive("omega_m", omega_m)?;
    check_positive("photon-number spread", ps.var_n)?;
    Ok(T::lit(2.0) * x0 * sq(omega_m) / (T::lit(measurements as f64).sqrt() * ps.delta_n()))
}

/// Resonant constant-coupling bound `sqrt(2 hbar w^3/m) / (sqrt(M) 4 pi n k0 (2a + eps) dN)`.
pub fn delta_g0_resonant<T: Real>(
    n: u32,
    k0: T,
    a: T,
    epsilon: T,
    ps: &PhotonStats<T>,
    measurements: u64,
    x0: T,
    omega_m: T,
) -> Result<T> {
    if n == 0 {
        return Err(domain("n must be >= 1"));
    }
    let scale = g0_scale(measurements, x0, omega_m, ps)?;
    Ok(scale / (T::lit(4.0) * T::PI() * T::lit(n as f64) * k0 * (T::lit(2.0) * a + epsilon)))
}

/// Fractional-frequency bound `sqrt(2 hbar w^3/m) 2 (s - 1) / (sqrt(M) pi k0 s^3 dN)`
/// for `a = 0`, `eps = 1`.
pub fn delta_g0_fractional<T: Real>(
    s: u32,
    k0: T,
    ps: &PhotonStats<T>,
    measurements: u64,
    x0: T,
    omega_m: T,
) -> Result<T> {
    if s < 3 {
        return Err(domain(format!("s must be >= 3, got {s}")));
    }
    let scale = g0_scale(measurements, x0, omega_m, ps)?;
    let sf = T::lit(s as f64);
    Ok(scale * T::lit(2.0) * (sf - T::one()) / (T::PI() * k0 * sf * sf * sf))
}

/// Gravitational-wave strain bound `2 dg0 / (L w^2)`.
pub fn gw_strain_bound<T: Real>(delta_g0: T, baseline: T, omega_m: T) -> Result<T> {
    check_positive("baseline", baseline)?;
    check_positive("omega_m", omega_m)?;
    Ok(T::lit(2.0) * delta_g0 / (baseline * sq(omega_m)))
}

/// Smallest oscillating source mass resolvable with sensitivity `delta_g0`:
/// `m_S = dg0 r0^2 / (ratio G)`, `ratio = 2 dr0 / r0`.
pub fn min_source_mass<T: Real>(delta_g0: T, r0: T, ratio: T) -> Result<T> {
    check_positive("r0", r0)?;
    check_positive("oscillation ratio", ratio)?;
    Ok(delta_g0 * sq(r0) / (ratio * T::lit(constants::G)))
}

/// Radius of a homogeneous sphere.
pub fn sphere_radius<T: Real>(mass: T, density: T) -> Result<T> {
    check_positive("mass", mass)?;
    check_positive("density", density)?;
    Ok((T::lit(3.0) * mass / (T::lit(4.0) * T::PI() * density)).cbrt())
}

/// Casimir acceleration between two spheres of radius `R`, `161 hbar c R^6 / (4 pi m r^8)`.
pub fn casimir_acceleration<T: Real>(mass: T, radius: T, separation: T) -> Result<T> {
    check_positive("mass", mass)?;
    check_positive("radius", radius)?;
    check_positive("separation", separation)?;
    if separation <= T::lit(2.0) * radius {
        return Err(domain(format!(
            "spheres overlap: separation {separation} <= 2R = {}",
            T::lit(2.0) * radius
        )));
    }
    // grouped so that f32 stays in range
    let pref = T::lit(161.0 * constants::HBAR * constants::C / (4.0 * std::f64::consts::PI)) / mass;
    let ratio = radius / separation;
    Ok(pref * sq(ratio * ratio * ratio) / sq(separation))
}

/// Mean and spread of the mechanical position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisplacementStats<T> {
    pub mean_x: T,
    pub std_x: T,
}

/// `Gamma` and `Delta` of the mechanical amplitude `<b> = alpha mu + beta mu* + Gamma + Delta <N>`.
pub fn gamma_delta<T: Real>(ev: &Evolution<T>) -> (Complex<T>, Complex<T>) {
    let (a, b) = (ev.mechanics.alpha, ev.mechanics.beta);
    let i = Complex::new(T::zero(), T::one());
    let (sum, diff) = (a + b, a - b);
    let gamma = sum * ev.f.f_bm - i * diff * ev.f.f_bp;
    let delta = sum * ev.f.f_nabm - i * diff * ev.f.f_nabp;
    (gamma, delta)
}

/// Displacement statistics from a precomputed evolution.
///
/// With `compensate` set, an external linear potential cancels the
/// photon-number part of the mean; the QFI is unaffected.
pub fn displacement_from_evolution<T: Real>(
    ev: &Evolution<T>,
    mech: &MechanicalState<T>,
    ps: &PhotonStats<T>,
    x0: T,
    compensate: bool,
) -> DisplacementStats<T> {
    let (gamma, delta) = gamma_delta(ev);
    let (a, b) = (ev.mechanics.alpha, ev.mechanics.beta);
    let mut amp = a * mech.mu_m + b * mech.mu_m.conj() + gamma;
    if !compensate {
        amp += delta * ps.mean_n;
    }
    let two = T::lit(2.0);
    let xi2 = ev.mechanics.xi().norm_sqr();
    let var = sq(x0) * (xi2 * mech.r_t.cosh_2r() + T::lit(4.0) * sq(delta.re) * ps.var_n);
    DisplacementStats { mean_x: two * x0 * amp.re, std_x: var.sqrt() }
}

pub fn displacement_stats<T: Real>(
    drive: &DriveSpec<T>,
    coupling: &CouplingSpec<T>,
    fm: &FreqModSpec<T>,
    mech: &MechanicalState<T>,
    ps: &PhotonStats<T>,
    x0: T,
    tau: T,
    compensate: bool,
) -> Result<DisplacementStats<T>> {
    let ev = evolve(drive, coupling, fm, &[tau], &Tolerances::default())?[0];
    Ok(displacement_from_evolution(&ev, mech, ps, x0, compensate))
}

/// First-order closed form of the mean displacement under parametric
/// modulation (`omega_d2 = 2`, `phi_d2 = -pi/2`, resonant drive with `phi_d1 = 0`,
/// constant coupling). Accurate to O(d2).
pub fn mean_x_parametric_closed<T: Real>(
    k0: T,
    drive: &DriveSpec<T>,
    d2: T,
    mean_n: T,
    x0: T,
    tau: T,
) -> T {
    let (st, ct) = tau.sin_cos();
    let grow = (d2 * tau).exp();
    let first = (drive.a * drive.d1 + k0 * mean_n) * (T::one() - grow * ct);
    let second = if d2 == T::zero() {
        // limit of (1 - e^{-d2 tau})/(4 d2) (d2 e^{d2 tau} cos - 2 sin)
        T::lit(0.5) * tau * st
    } else {
        -(-(-d2 * tau).exp_m1()) / (T::lit(4.0) * d2) * (d2 * grow * ct - T::lit(2.0) * st)
    };
    T::lit(2.0) * x0 * (first + drive.d1 * drive.epsilon * second)
}

/// Phonon number for mechanics initially in its ground state:
/// `|beta|^2 + |Gamma|^2 + 2 Re(Gamma* Delta) <N> + |Delta|^2 <N^2>`.
pub fn phonon_from_evolution<T: Real>(ev: &Evolution<T>, ps: &PhotonStats<T>) -> Result<T> {
    let (gamma, delta) = gamma_delta(ev);
    let n = ev.mechanics.beta.norm_sqr()
        + gamma.norm_sqr()
        + T::lit(2.0) * (gamma.conj() * delta).re * ps.mean_n
        + delta.norm_sqr() * ps.second_moment();
    // <|Gamma + Delta N|^2> >= 0; allow rounding below zero only
    if n < -T::tol(1e-12) * (T::one() + gamma.norm_sqr() + delta.norm_sqr() * ps.second_moment()) {
        return Err(Error::Consistency(format!("phonon number came out negative: {n}")));
    }
    Ok(n.max(T::zero()))
}

pub fn phonon_number<T: Real>(
    drive: &DriveSpec<T>,
    coupling: &CouplingSpec<T>,
    fm: &FreqModSpec<T>,
    ps: &PhotonStats<T>,
    tau: T,
) -> Result<T> {
    let ev = evolve(drive, coupling, fm, &[tau], &Tolerances::default())?[0];
    phonon_from_evolution(&ev, ps)
}

/// Dynamical scheme whose displacement restriction applies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scheme<T> {
    /// Constant coupling.
    Constant,
    /// Coupling modulated at mechanical resonance.
    ResonantCoupling,
    /// Coupling at a fractional frequency with denominator `s`.
    Fractional { s: u32 },
    /// Mechanical frequency modulated at parametric resonance.
    Parametric { d2: T },
}

impl<T: Real> std::str::FromStr for Scheme<T> {
    type Err = Error;

    /// Parses `constant`, `resonant`, `fractional:<s>` or `parametric:<d2>`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let bad = || domain(format!("unknown scheme '{s}'"));
        match (name, arg) {
            ("constant", None) => Ok(Self::Constant),
            ("resonant", None) => Ok(Self::ResonantCoupling),
            ("fractional", Some(a)) => Ok(Self::Fractional { s: a.parse().map_err(|_| bad())? }),
            ("parametric", Some(a)) => {
                let d2: f64 = a.parse().map_err(|_| bad())?;
                Ok(Self::Parametric { d2: T::lit(d2) })
            }
            _ => Err(bad()),
        }
    }
}

/// Photon-number ceilings `(mean, std)` that keep the displacement below `l`.
///
/// For fractional schemes `tau` is the decoupling time at which the state is read out.
pub fn photon_bounds<T: Real>(scheme: Scheme<T>, l: T, x0: T, k0: T, tau: T) -> Result<(T, Option<T>)> {
    check_positive("validity length", l)?;
    check_positive("x0", x0)?;
    check_positive("k0", k0)?;
    let base = l / (x0 * k0);
    match scheme {
        Scheme::Constant => Ok((base / T::lit(2.0), None)),
        Scheme::ResonantCoupling => {
            check_positive("tau", tau)?;
            let c = base / tau;
            Ok((c, Some(c)))
        }
        Scheme::Fractional { s } => {
            if s == 0 {
                return Err(domain("s must be >= 1"));
            }
            check_positive("tau", tau)?;
            let c = T::PI() * base / tau;
            Ok((c, Some(c)))
        }
        Scheme::Parametric { d2 } => {
            let c = base / (T::lit(2.0) * (T::one() + (d2 * tau).exp()));
            Ok((c, Some(c)))
        }
    }
}

/// Checks `value * safety_factor <= ceiling` for the mean and spread.
pub fn check_validity<T: Real>(
    scheme: Scheme<T>,
    l: T,
    x0: T,
    k0: T,
    tau: T,
    ps: &PhotonStats<T>,
    safety_factor: T,
) -> Result<Validity<T>> {
    check_positive("safety factor", safety_factor)?;
    let (max_mean_n, max_std_n) = photon_bounds(scheme, l, x0, k0, tau)?;
    Ok(Validity {
        max_mean_n,
        max_std_n,
        safety_factor,
        mean_ok: ps.mean_n * safety_factor <= max_mean_n,
        std_ok: max_std_n.is_none_or(|c| ps.delta_n() * safety_factor <= c),
    })
}
