//! JSON scenario files and their validation into library types.

use std::path::Path;

use num_complex::Complex;
use optomech::params::{squeeze_from_db, thermal_parameter, x0_from, SensorConfig, Temperature, ThermalParameter};
use optomech::qfi::{photon_stats, CavityState, PhotonStats};
use optomech::sensitivity::{MechanicalState, Scheme};
use optomech::{CouplingSpec, DriveSpec, FreqModSpec};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub sensor: Option<SensorSection>,
    #[serde(default)]
    pub drive: DriveSection,
    #[serde(default)]
    pub coupling: CouplingSection,
    #[serde(default)]
    pub freq_mod: FreqModSection,
    #[serde(default)]
    pub cavity: CavitySection,
    #[serde(default)]
    pub mechanics: MechanicsSection,
    #[serde(default = "one_u64")]
    pub measurements: u64,
    #[serde(default)]
    pub validity: Option<ValiditySection>,
    /// Homodyne local-oscillator phase; optimal when absent.
    #[serde(default)]
    pub homodyne_angle: Option<f64>,
    /// Cancel the radiation-pressure part of the mean displacement.
    #[serde(default)]
    pub compensate: bool,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            sensor: None,
            drive: DriveSection::default(),
            coupling: CouplingSection::default(),
            freq_mod: FreqModSection::default(),
            cavity: CavitySection::default(),
            mechanics: MechanicsSection::default(),
            measurements: 1,
            validity: None,
            homodyne_angle: None,
            compensate: false,
        }
    }
}

fn one_u64() -> u64 {
    1
}

fn one() -> f64 {
    1.0
}

/// Physical oscillator; needed only for dimensionful outputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensorSection {
    pub omega_m: f64,
    pub mass: f64,
    #[serde(default)]
    pub omega_c: Option<f64>,
    #[serde(default)]
    pub cavity_length: Option<f64>,
    /// Detector baseline for strain bounds (m).
    #[serde(default)]
    pub baseline: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveSection {
    #[serde(default = "one")]
    pub d1: f64,
    #[serde(default)]
    pub a: f64,
    #[serde(default = "one")]
    pub epsilon: f64,
    #[serde(default = "one")]
    pub omega_d1: f64,
    #[serde(default)]
    pub phi_d1: f64,
}

impl Default for DriveSection {
    fn default() -> Self {
        Self { d1: 1.0, a: 0.0, epsilon: 1.0, omega_d1: 1.0, phi_d1: 0.0 }
    }
}

/// `k0` may be omitted when the sensor section describes a Fabry-Perot cavity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CouplingSection {
    Constant {
        #[serde(default)]
        k0: Option<f64>,
    },
    Modulated {
        #[serde(default)]
        k0: Option<f64>,
        omega_k: f64,
        #[serde(default)]
        phi_k: f64,
    },
    Sampled {
        tau: Vec<f64>,
        k: Vec<f64>,
    },
}

impl Default for CouplingSection {
    fn default() -> Self {
        CouplingSection::Constant { k0: Some(1.0) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FreqModSection {
    #[serde(default)]
    pub d2: f64,
    #[serde(default = "two")]
    pub omega_d2: f64,
    #[serde(default)]
    pub phi_d2: f64,
}

fn two() -> f64 {
    2.0
}

impl Default for FreqModSection {
    fn default() -> Self {
        Self { d2: 0.0, omega_d2: 2.0, phi_d2: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavitySection {
    /// Coherent amplitude `[re, im]`.
    #[serde(default = "unit_mu")]
    pub mu: [f64; 2],
    #[serde(default)]
    pub r: Option<f64>,
    #[serde(default)]
    pub squeeze_db: Option<f64>,
    /// Squeezing phase; the variance-maximizing phase when absent.
    #[serde(default)]
    pub varphi: Option<f64>,
}

fn unit_mu() -> [f64; 2] {
    [1.0, 0.0]
}

impl Default for CavitySection {
    fn default() -> Self {
        Self { mu: unit_mu(), r: None, squeeze_db: None, varphi: None }
    }
}

/// `r_T` as a number or the string `"inf"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ThermalValue {
    Value(f64),
    Named(String),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MechanicsSection {
    #[serde(default)]
    pub r_t: Option<ThermalValue>,
    /// Kelvin; needs the sensor section.
    #[serde(default)]
    pub temperature: Option<f64>,
    #[serde(default)]
    pub mu_m: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValiditySection {
    /// `constant`, `resonant`, `fractional:<s>` or `parametric:<d2>`.
    pub scheme: String,
    /// Largest tolerated displacement (m).
    pub length: f64,
    #[serde(default)]
    pub safety_factor: Option<f64>,
}

/// A scenario checked and converted into library types.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub drive: DriveSpec<f64>,
    pub coupling: CouplingSpec<f64>,
    pub freq_mod: FreqModSpec<f64>,
    pub cavity: CavityState<f64>,
    pub photons: PhotonStats<f64>,
    pub mechanics: MechanicalState<f64>,
    pub sensor: Option<SensorConfig<f64>>,
    /// Zero-point fluctuation, 1 without a sensor section.
    pub x0: f64,
    pub measurements: u64,
    pub baseline: Option<f64>,
    pub validity: Option<(Scheme<f64>, f64, Option<f64>)>,
    pub homodyne_angle: Option<f64>,
    pub compensate: bool,
}

impl Scenario {
    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// SHA-256 of the canonical JSON form, so formatting does not change it.
    pub fn hash(&self) -> String {
        let canon = serde_json::to_vec(self).expect("scenario serializes");
        Sha256::digest(&canon).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn resolve(&self) -> CliResult<Resolved> {
        let sensor = match &self.sensor {
            None => None,
            Some(s) => {
                let k0 = self.explicit_k0();
                let cfg = match (k0, s.omega_c, s.cavity_length) {
                    (Some(k0), _, _) => SensorConfig::with_k0(s.omega_m, s.mass, k0),
                    (None, Some(wc), Some(l)) => SensorConfig::fabry_perot(s.omega_m, s.mass, wc, l),
                    (None, _, _) => SensorConfig::with_k0(s.omega_m, s.mass, 1.0),
                };
                Some(cfg.map_err(CliError::field("sensor"))?)
            }
        };
        let k0 = match (self.explicit_k0(), &sensor) {
            (Some(k), _) => k,
            (None, Some(cfg)) if cfg.omega_c.is_some() => cfg.k0,
            (None, _) => 1.0,
        };
        let coupling = match &self.coupling {
            CouplingSection::Constant { .. } => CouplingSpec::constant(k0),
            CouplingSection::Modulated { omega_k, phi_k, .. } => CouplingSpec::modulated(k0, *omega_k, *phi_k),
            CouplingSection::Sampled { tau, k } => CouplingSpec::sampled(tau.clone(), k.clone()),
        }
        .map_err(CliError::field("coupling"))?;

        let d = &self.drive;
        let drive = DriveSpec::new(d.d1, d.a, d.epsilon, d.omega_d1, d.phi_d1).map_err(CliError::field("drive"))?;
        let f = &self.freq_mod;
        let freq_mod = FreqModSpec::new(f.d2, f.omega_d2, f.phi_d2).map_err(CliError::field("freq_mod"))?;

        let c = &self.cavity;
        let mu = Complex::new(c.mu[0], c.mu[1]);
        let r = match (c.r, c.squeeze_db) {
            (Some(_), Some(_)) => return Err(CliError::Config("cavity: give r or squeeze_db, not both".into())),
            (Some(r), None) => r,
            (None, Some(db)) => squeeze_from_db(db).map_err(CliError::field("cavity.squeeze_db"))?,
            (None, None) => 0.0,
        };
        let cavity = match c.varphi {
            _ if r == 0.0 && c.varphi.is_none() => CavityState::coherent(mu),
            Some(p) => CavityState::squeezed(mu, r, p),
            None => CavityState::squeezed_optimal(mu, r),
        }
        .map_err(CliError::field("cavity"))?;

        let m = &self.mechanics;
        let r_t = match (&m.r_t, m.temperature) {
            (Some(_), Some(_)) => {
                return Err(CliError::Config("mechanics: give r_t or temperature, not both".into()))
            }
            (Some(ThermalValue::Value(v)), None) if *v >= 0.0 && v.is_finite() => ThermalParameter::Finite(*v),
            (Some(ThermalValue::Value(v)), None) if *v == f64::INFINITY => ThermalParameter::Infinite,
            (Some(ThermalValue::Named(s)), None) if matches!(s.as_str(), "inf" | "infinity") => {
                ThermalParameter::Infinite
            }
            (Some(v), None) => {
                return Err(CliError::Config(format!("mechanics.r_t: expected a number >= 0 or \"inf\", got {v:?}")))
            }
            (None, Some(t)) => {
                let s = sensor
                    .as_ref()
                    .ok_or_else(|| CliError::Config("mechanics.temperature needs the sensor section".into()))?;
                thermal_parameter(Temperature::Kelvin(t), s.omega_m).map_err(CliError::field("mechanics.temperature"))?
            }
            (None, None) => ThermalParameter::ground(),
        };
        let mechanics = MechanicalState { r_t, mu_m: Complex::new(m.mu_m[0], m.mu_m[1]) };

        if self.measurements == 0 {
            return Err(CliError::Config("measurements: must be >= 1".into()));
        }
        let x0 = match &sensor {
            Some(s) => x0_from(s.mass, s.omega_m).map_err(CliError::field("sensor"))?,
            None => 1.0,
        };
        let validity = match &self.validity {
            None => None,
            Some(v) => {
                let scheme = v.scheme.parse().map_err(CliError::field("validity.scheme"))?;
                if !(v.length > 0.0) {
                    return Err(CliError::Config(format!("validity.length: must be > 0, got {}", v.length)));
                }
                Some((scheme, v.length, v.safety_factor))
            }
        };
        Ok(Resolved {
            photons: photon_stats(&cavity),
            drive,
            coupling,
            freq_mod,
            cavity,
            mechanics,
            x0,
            measurements: self.measurements,
            baseline: self.sensor.and_then(|s| s.baseline),
            sensor,
            validity,
            homodyne_angle: self.homodyne_angle,
            compensate: self.compensate,
        })
    }

    fn explicit_k0(&self) -> Option<f64> {
        match &self.coupling {
            CouplingSection::Constant { k0 } | CouplingSection::Modulated { k0, .. } => *k0,
            CouplingSection::Sampled { .. } => None,
        }
    }
}

/// Parses `a:b:n` into `n` evenly spaced points from `a` to `b` inclusive.
pub fn parse_tau_range(s: &str) -> CliResult<Vec<f64>> {
    let bad = || CliError::Config(format!("--tau-range: expected start:end:points, got '{s}'"));
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, n] = parts.as_slice() else { return Err(bad()) };
    let (a, b): (f64, f64) = (parse_tau(a).map_err(|_| bad())?, parse_tau(b).map_err(|_| bad())?);
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    if !(a >= 0.0) || !(b > a) || !b.is_finite() {
        return Err(CliError::Config(format!("--tau-range: need 0 <= start < end, got {a}:{b}")));
    }
    if n < 2 {
        return Err(CliError::Config(format!("--tau-range: need at least 2 points, got {n}")));
    }
    Ok(linspace(a, b, n))
}

/// Accepts plain numbers and multiples of pi such as `20pi` or `pi`.
pub fn parse_tau(s: &str) -> CliResult<f64> {
    let t = s.trim();
    let v = match t.strip_suffix("pi") {
        Some("") => Ok(std::f64::consts::PI),
        Some(m) => m.trim_end_matches('*').parse::<f64>().map(|m| m * std::f64::consts::PI),
        None => t.parse::<f64>(),
    };
    v.map_err(|_| CliError::Config(format!("--tau: cannot parse '{s}'")))
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    let step = (b - a) / (n - 1) as f64;
    (0..n).map(|i| if i + 1 == n { b } else { a + step * i as f64 }).collect()
}
