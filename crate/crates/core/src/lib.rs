//! Fisher information for gravimetry with a nonlinear optomechanical probe.
//!
//! Time is dimensionless (`tau = omega_m t`) everywhere except in
//! [`params`] and [`sensitivity`], which convert to and from SI units.
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix the scalar for the common case.
//!
//! ```
//! use optomech::{dynamics::{CouplingSpec, DriveSpec, FreqModSpec}, qfi};
//! use optomech::params::ThermalParameter;
//!
//! let drive = DriveSpec::unit(0.0, 1.0, 1.0, std::f64::consts::PI).unwrap();
//! let coupling = CouplingSpec::constant(1.0).unwrap();
//! let ps = qfi::PhotonStats::with_variance(1.0);
//! let tau = 2.0 * std::f64::consts::PI;
//! let i = qfi::qfi_global_numeric(&drive, &coupling, &FreqModSpec::none(), tau, &ps, ThermalParameter::ground())
//!     .unwrap();
//! assert!((i - 20.0 * std::f64::consts::PI.powi(2)).abs() < 1e-6);
//! ```

pub mod cfi;
pub mod dynamics;
pub mod error;
pub mod interp;
pub mod ode;
pub mod params;
pub mod qfi;
pub mod real;
pub mod sensitivity;
pub mod separability;

/// Library version, recorded in every emitted artifact.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use dynamics::{evolve, BogoliubovPair, CouplingSpec, DriveSpec, Evolution, FCoefficients, FreqModSpec};
pub use error::{Error, Result};
pub use params::{SensorConfig, Temperature, ThermalParameter};
pub use qfi::{photon_stats, qfi_global, qfi_global_numeric, CavityState, GeneratorCoefficients, PhotonStats};
pub use real::Real;
pub use sensitivity::{qcrb_delta_g0, DisplacementStats, MechanicalState, Scheme, SensitivityReport};
pub use separability::{is_separable, k_na_squared, FractionalFrequency};

pub type Drive = DriveSpec<f64>;
pub type Coupling = CouplingSpec<f64>;
pub type FreqMod = FreqModSpec<f64>;
pub type Cavity = CavityState<f64>;
pub type Photons = PhotonStats<f64>;
pub type Thermal = ThermalParameter<f64>;
pub type Sensor = SensorConfig<f64>;
pub type Fcoef = FCoefficients<f64>;

pub type Drive32 = DriveSpec<f32>;
pub type Coupling32 = CouplingSpec<f32>;
pub type FreqMod32 = FreqModSpec<f32>;
pub type Cavity32 = CavityState<f32>;
pub type Photons32 = PhotonStats<f32>;
pub type Thermal32 = ThermalParameter<f32>;
