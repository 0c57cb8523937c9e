//! Physical constants, system parameters and SI to dimensionless conversion.

use crate::dynamics::DriveSpec;
use crate::error::{domain, Result};
use crate::real::{sech, Real};

/// CODATA 2018 values.
pub mod constants {
    /// Reduced Planck constant (J s).
    pub const HBAR: f64 = 1.054_571_817e-34;
    /// Boltzmann constant (J/K).
    pub const K_B: f64 = 1.380_649e-23;
    /// Newtonian gravitational constant (m^3 kg^-1 s^-2).
    pub const G: f64 = 6.674_30e-11;
    /// Speed of light in vacuum (m/s).
    pub const C: f64 = 299_792_458.0;
    /// Vacuum permittivity (F/m).
    pub const EPSILON_0: f64 = 8.854_187_812_8e-12;
    /// Density of tungsten (kg/m^3).
    pub const TUNGSTEN_DENSITY: f64 = 19_300.0;
}

/// How the coupling amplitude `k0` of a [`SensorConfig`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CouplingSource {
    Given,
    FabryPerot,
    Levitated,
}

/// Physical oscillator plus cavity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorConfig<T> {
    /// Mechanical angular frequency (rad/s).
    pub omega_m: T,
    /// Optical angular frequency (rad/s).
    pub omega_c: Option<T>,
    /// Oscillator mass (kg).
    pub mass: T,
    /// Cavity length (m).
    pub cavity_length: Option<T>,
    /// Dimensionless coupling amplitude.
    pub k0: T,
    pub k0_source: CouplingSource,
}

impl<T: Real> SensorConfig<T> {
    /// Configuration with a directly specified `k0`.
    pub fn with_k0(omega_m: T, mass: T, k0: T) -> Result<Self> {
        let cfg = Self {
            omega_m,
            omega_c: None,
            mass,
            cavity_length: None,
            k0,
            k0_source: CouplingSource::Given,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Moving-end-mirror cavity; `k0` follows from the cavity length.
    pub fn fabry_perot(omega_m: T, mass: T, omega_c: T, cavity_length: T) -> Result<Self> {
        check_mechanics(omega_m, mass)?;
        let x0 = x0_from(mass, omega_m)?;
        let k0 = coupling_fabry_perot(x0, omega_c, cavity_length, omega_m)?;
        Ok(Self {
            omega_m,
            omega_c: Some(omega_c),
            mass,
            cavity_length: Some(cavity_length),
            k0,
            k0_source: CouplingSource::FabryPerot,
        })
    }

    /// Levitated dielectric sphere; `k0` follows from its polarizability.
    pub fn levitated(omega_m: T, mass: T, omega_c: T, p: &LevitatedParams<T>) -> Result<Self> {
        check_mechanics(omega_m, mass)?;
        let x0 = x0_from(mass, omega_m)?;
        let k0 = coupling_levitated(p, x0, omega_c, omega_m)?;
        Ok(Self {
            omega_m,
            omega_c: Some(omega_c),
            mass,
            cavity_length: None,
            k0,
            k0_source: CouplingSource::Levitated,
        })
    }

    pub fn validate(&self) -> Result<()> {
        check_mechanics(self.omega_m, self.mass)?;
        if !self.k0.is_finite() || self.k0 < T::zero() {
            return Err(domain(format!("k0 must be finite and >= 0, got {}", self.k0)));
        }
        Ok(())
    }

    /// Dimensionless time for a duration in seconds.
    pub fn tau_from_seconds(&self, t: T) -> T {
        self.omega_m * t
    }

    /// Dimensionless frequency for an angular frequency in rad/s.
    pub fn rescale_frequency(&self, omega: T) -> T {
        omega / self.omega_m
    }
}

fn check_mechanics<T: Real>(omega_m: T, mass: T) -> Result<()> {
    if !(omega_m > T::zero()) || !omega_m.is_finite() {
        return Err(domain(format!("omega_m must be > 0, got {omega_m}")));
    }
    if !(mass > T::zero()) || !mass.is_finite() {
        return Err(domain(format!("mass must be > 0, got {mass}")));
    }
    Ok(())
}

/// Dielectric sphere in an optical cavity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevitatedParams<T> {
    /// Sphere volume (m^3).
    pub volume: T,
    pub relative_permittivity: T,
    /// Cavity mode volume (m^3).
    pub cavity_mode_volume: T,
    /// Cavity wavelength (m).
    pub wavelength: T,
}

impl<T: Real> LevitatedParams<T> {
    pub fn new(volume: T, relative_permittivity: T, cavity_mode_volume: T, wavelength: T) -> Result<Self> {
        let p = Self { volume, relative_permittivity, cavity_mode_volume, wavelength };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("volume", self.volume),
            ("cavity_mode_volume", self.cavity_mode_volume),
            ("wavelength", self.wavelength),
        ] {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(domain(format!("{name} must be > 0, got {v}")));
            }
        }
        if !(self.relative_permittivity > T::one()) || !self.relative_permittivity.is_finite() {
            return Err(domain(format!(
                "relative permittivity must be > 1, got {}",
                self.relative_permittivity
            )));
        }
        Ok(())
    }

    /// Polarizability `3 V eps0 (eps - 1)/(eps + 2)` (C m^2/V).
    pub fn polarizability(&self) -> T {
        T::lit(3.0) * self.volume * T::lit(constants::EPSILON_0) * self.clausius_mossotti()
    }

    /// Cavity wavenumber `2 pi / lambda` (1/m).
    pub fn wavenumber(&self) -> T {
        T::TAU() / self.wavelength
    }

    fn clausius_mossotti(&self) -> T {
        let e = self.relative_permittivity;
        (e - T::one()) / (e + T::lit(2.0))
    }
}

/// Gravitational acceleration signal `g(t) = g0 (a + epsilon cos(omega_g t + phi_g))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GravitySignal<T> {
    /// Amplitude (m/s^2).
    pub g0: T,
    pub a: T,
    pub epsilon: T,
    /// Angular frequency (rad/s).
    pub omega_g: T,
    pub phi_g: T,
}

impl<T: Real> GravitySignal<T> {
    pub fn new(g0: T, a: T, epsilon: T, omega_g: T, phi_g: T) -> Result<Self> {
        if [g0, a, epsilon, omega_g, phi_g].iter().any(|v| !v.is_finite()) {
            return Err(domain("signal parameters must be finite"));
        }
        if a < T::zero() || epsilon < T::zero() {
            return Err(domain("signal fractions a and epsilon must be >= 0"));
        }
        Ok(Self { g0, a, epsilon, omega_g, phi_g })
    }
}

/// Zero-point fluctuation `sqrt(hbar / (2 m omega_m))` (m).
pub fn zero_point_fluctuation<T: Real>(cfg: &SensorConfig<T>) -> Result<T> {
    x0_from(cfg.mass, cfg.omega_m)
}

/// Zero-point fluctuation from mass and frequency.
pub fn x0_from<T: Real>(mass: T, omega_m: T) -> Result<T> {
    check_mechanics(omega_m, mass)?;
    // Split the product so f32 does not underflow.
    Ok((T::lit(constants::HBAR * 0.5) / mass / omega_m).sqrt())
}

/// `k0 = x0 omega_c / (L omega_m)`.
pub fn coupling_fabry_perot<T: Real>(x0: T, omega_c: T, cavity_length: T, omega_m: T) -> Result<T> {
    if !(cavity_length > T::zero()) {
        return Err(domain(format!("cavity length must be > 0, got {cavity_length}")));
    }
    if !(omega_m > T::zero()) || omega_c < T::zero() || x0 < T::zero() {
        return Err(domain("x0 and omega_c must be >= 0 and omega_m > 0"));
    }
    Ok(x0 * omega_c / (cavity_length * omega_m))
}

/// `k0 = P k_c x0 omega_c / (2 omega_m V_c eps0)` with the `eps0` factors cancelled.
pub fn coupling_levitated<T: Real>(p: &LevitatedParams<T>, x0: T, omega_c: T, omega_m: T) -> Result<T> {
    p.validate()?;
    if !(omega_m > T::zero()) || omega_c < T::zero() || x0 < T::zero() {
        return Err(domain("x0 and omega_c must be >= 0 and omega_m > 0"));
    }
    let p_over_eps0 = T::lit(3.0) * p.volume * p.clausius_mossotti();
    Ok(p_over_eps0 * p.wavenumber() * x0 * omega_c / (T::lit(2.0) * omega_m * p.cavity_mode_volume))
}

/// Dimensionless drive for a signal acting on a sensor.
pub fn d1_from_signal<T: Real>(sig: &GravitySignal<T>, cfg: &SensorConfig<T>) -> Result<DriveSpec<T>> {
    cfg.validate()?;
    let x0 = zero_point_fluctuation(cfg)?;
    let d1 = sig.g0 / (T::lit(2.0) * x0 * cfg.omega_m * cfg.omega_m);
    DriveSpec::new(d1, sig.a, sig.epsilon, sig.omega_g / cfg.omega_m, sig.phi_g)
}

/// Temperature of the initial mechanical thermal state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Temperature<T> {
    Kelvin(T),
    Infinite,
}

/// Thermal parameter `r_T`; the infinite value is kept symbolic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThermalParameter<T> {
    Finite(T),
    Infinite,
}

impl<T: Real> ThermalParameter<T> {
    pub fn ground() -> Self {
        Self::Finite(T::zero())
    }

    /// `sech(2 r_T)`; exactly zero for the infinite sentinel.
    pub fn sech_2r(&self) -> T {
        match *self {
            Self::Finite(r) => sech(T::lit(2.0) * r),
            Self::Infinite => T::zero(),
        }
    }

    /// `cosh(2 r_T) = 2 n + 1`; infinite for the sentinel.
    pub fn cosh_2r(&self) -> T {
        match *self {
            Self::Finite(r) => (T::lit(2.0) * r).cosh(),
            Self::Infinite => T::infinity(),
        }
    }

    pub fn value(&self) -> T {
        match *self {
            Self::Finite(r) => r,
            Self::Infinite => T::infinity(),
        }
    }
}

/// `r_T = artanh(exp(-hbar omega_m / (2 k_B T)))`.
pub fn thermal_parameter<T: Real>(temp: Temperature<T>, omega_m: T) -> Result<ThermalParameter<T>> {
    if !(omega_m > T::zero()) {
        return Err(domain(format!("omega_m must be > 0, got {omega_m}")));
    }
    match temp {
        Temperature::Infinite => Ok(ThermalParameter::Infinite),
        Temperature::Kelvin(t) if !(t >= T::zero()) || t.is_infinite() => {
            Err(domain(format!("temperature must be finite and >= 0, got {t}")))
        }
        Temperature::Kelvin(t) if t == T::zero() => Ok(ThermalParameter::Finite(T::zero())),
        Temperature::Kelvin(t) => {
            let x = T::lit(constants::HBAR / (2.0 * constants::K_B)) * omega_m / t;
            Ok(ThermalParameter::Finite(thermal_parameter_from_ratio(x)))
        }
    }
}

/// `artanh(exp(-x))` for `x = hbar omega_m / (2 k_B T)`.
pub fn thermal_parameter_from_ratio<T: Real>(x: T) -> T {
    // artanh(e^{-x}) = 0.5 ln((1 + e^{-x})/(1 - e^{-x})) = 0.5 ln(coth(x/2))
    let e = (-x).exp();
    T::lit(0.5) * ((T::one() + e) / -(-x).exp_m1()).ln()
}

/// Squeezing factor from decibels, `r = S_dB / (20 log10 e)`.
pub fn squeeze_from_db<T: Real>(s_db: T) -> Result<T> {
    if !(s_db >= T::zero()) || !s_db.is_finite() {
        return Err(domain(format!("squeezing in dB must be finite and >= 0, got {s_db}")));
    }
    Ok(s_db / (T::lit(20.0) * T::LOG10_E()))
}
