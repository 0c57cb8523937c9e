use std::path::Path;

use optomech::sensitivity::{check_validity, gw_strain_bound, qcrb_delta_g0, Validity};
use optomech::separability::{fractional_frequencies, separability_threshold, verify_decoupling};
use serde::Serialize;

use crate::config::{Resolved, Scenario};
use crate::engine::{evaluate, evaluate_at, Point, Quantity};
use crate::error::{CliError, CliResult};
use crate::output::{write_csv_with_meta, write_json};

pub const DEFAULT_SAFETY_FACTOR: f64 = 100.0;

#[derive(Debug, Clone, Serialize)]
pub struct ValidityReport {
    pub scheme: String,
    pub max_mean_n: f64,
    pub max_std_n: Option<f64>,
    pub mean_n: f64,
    pub std_n: f64,
    pub safety_factor: f64,
    pub ok: bool,
}

impl ValidityReport {
    fn new(scheme: &str, v: &Validity<f64>, res: &Resolved) -> Self {
        Self {
            scheme: scheme.to_string(),
            max_mean_n: v.max_mean_n,
            max_std_n: v.max_std_n,
            mean_n: res.photons.mean_n,
            std_n: res.photons.delta_n(),
            safety_factor: v.safety_factor,
            ok: v.ok(),
        }
    }
}

fn validity(scenario: &Scenario, res: &Resolved, tau: f64, safety: Option<f64>) -> CliResult<Option<ValidityReport>> {
    let Some((scheme, l, sf)) = res.validity else { return Ok(None) };
    let sf = safety.or(sf).unwrap_or(DEFAULT_SAFETY_FACTOR);
    let v = check_validity(scheme, l, res.x0, res.coupling.scale(), tau, &res.photons, sf)
        .map_err(CliError::field("validity"))?;
    let name = scenario.validity.as_ref().map(|v| v.scheme.as_str()).unwrap_or_default();
    Ok(Some(ValidityReport::new(name, &v, res)))
}

#[derive(Debug, Clone, Serialize)]
pub struct EvalOutput {
    pub version: &'static str,
    pub config_hash: String,
    pub quantity: &'static str,
    pub tau: f64,
    pub value: Option<f64>,
    pub separable: bool,
    pub kerr_phase_trivial: bool,
    /// Global QFI when a cavity-only quantity is undefined.
    pub upper_bound: Option<f64>,
    pub validity: Option<ValidityReport>,
    pub warnings: Vec<String>,
}

fn warnings(q: Quantity, p: &Point) -> Vec<String> {
    let mut w = Vec::new();
    if q.needs_separability() && !p.separable {
        w.push("light and mechanics are not separable at this time; only the global QFI bounds the sensitivity".into());
    }
    if matches!(q, Quantity::CfiHomodyne | Quantity::CfiHeterodyne) && p.separable && !p.kerr_trivial {
        w.push("F_N^2 is not a multiple of 2 pi; the measurement formulas assume it is".into());
    }
    w
}

pub fn run_eval(scenario: &Scenario, q: Quantity, tau: f64, safety: Option<f64>) -> CliResult<EvalOutput> {
    let res = scenario.resolve()?;
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(CliError::Config(format!("--tau: must be finite and >= 0, got {tau}")));
    }
    let p = evaluate_at(&res, q, tau)?;
    Ok(EvalOutput {
        version: optomech::VERSION,
        config_hash: scenario.hash(),
        quantity: q.name(),
        tau,
        value: p.value,
        separable: p.separable,
        kerr_phase_trivial: p.kerr_trivial,
        upper_bound: p.upper_bound,
        validity: validity(scenario, &res, tau, safety)?,
        warnings: warnings(q, &p),
    })
}

/// Writes `tau,<quantity>` for every time to `out`, plus the metadata sidecar.
pub fn run_sweep(scenario: &Scenario, q: Quantity, taus: &[f64], out: &Path) -> CliResult<Vec<Point>> {
    let res = scenario.resolve()?;
    let pts = evaluate(&res, q, taus)?;
    let rows: Vec<Vec<Option<f64>>> = pts.iter().map(|p| vec![Some(p.tau), p.value]).collect();
    write_csv_with_meta(out, &["tau", q.name()], &rows, &scenario.hash(), &format!("sweep {}", q.name()))?;
    Ok(pts)
}

#[derive(Debug, Clone, Serialize)]
pub struct FractionalRow {
    pub n1: i64,
    pub s: i64,
    pub omega: String,
    pub tau_sep: f64,
    pub decouples: bool,
}

/// Every fractional frequency up to `s_max`, checked at `q = 1..=q_max`.
pub fn run_fractional_table(s_max: i64, q_max: u32, k0: f64) -> CliResult<Vec<FractionalRow>> {
    if q_max == 0 {
        return Err(CliError::Config("--q-max: must be >= 1".into()));
    }
    let all = fractional_frequencies(s_max).map_err(CliError::field("--s-max"))?;
    all.iter()
        .map(|ff| {
            let mut ok = true;
            for q in 1..=q_max {
                ok &= verify_decoupling(ff, k0, q)?;
            }
            Ok(FractionalRow {
                n1: ff.n1(),
                s: ff.s(),
                omega: ff.omega_frac().to_string(),
                tau_sep: ff.tau_sep(),
                decouples: ok,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct SeparabilityPoint {
    pub version: &'static str,
    pub config_hash: String,
    pub tau: f64,
    pub k_na_squared: f64,
    pub threshold: f64,
    pub separable: bool,
}

pub fn run_separability_at(scenario: &Scenario, tau: f64) -> CliResult<SeparabilityPoint> {
    let res = scenario.resolve()?;
    let p = evaluate_at(&res, Quantity::KNaSquared, tau)?;
    Ok(SeparabilityPoint {
        version: optomech::VERSION,
        config_hash: scenario.hash(),
        tau,
        k_na_squared: p.value.unwrap_or(f64::NAN),
        threshold: separability_threshold(res.coupling.scale()),
        separable: p.separable,
    })
}

/// `tau,k_na_squared,separable` with the flag written as 0 or 1.
pub fn run_separability_sweep(scenario: &Scenario, taus: &[f64], out: &Path) -> CliResult<()> {
    let res = scenario.resolve()?;
    let pts = evaluate(&res, Quantity::KNaSquared, taus)?;
    let rows: Vec<_> = pts.iter().map(|p| vec![Some(p.tau), p.value, Some(if p.separable { 1.0 } else { 0.0 })]).collect();
    write_csv_with_meta(out, &["tau", "k_na_squared", "separable"], &rows, &scenario.hash(), "separability")
}

#[derive(Debug, Clone, Serialize)]
pub struct SensitivityOutput {
    pub version: &'static str,
    pub config_hash: String,
    pub tau: f64,
    /// `local` at a disentangling time, otherwise `global` (an upper bound).
    pub information: &'static str,
    pub qfi: f64,
    pub measurements: u64,
    pub x0: f64,
    pub delta_g0: f64,
    pub delta_h: Option<f64>,
    pub validity: Option<ValidityReport>,
}

pub fn run_sensitivity(scenario: &Scenario, tau: f64, safety: Option<f64>) -> CliResult<SensitivityOutput> {
    let res = scenario.resolve()?;
    let sensor = res
        .sensor
        .ok_or_else(|| CliError::Config("sensitivity needs the sensor section (omega_m, mass)".into()))?;
    let p = evaluate_at(&res, Quantity::QfiLocal, tau)?;
    let (information, qfi) = match (p.value, p.upper_bound) {
        (Some(v), _) => ("local", v),
        (None, Some(g)) => ("global", g),
        (None, None) => unreachable!("local QFI falls back to the global value"),
    };
    let delta_g0 = qcrb_delta_g0(qfi, res.measurements, res.x0, sensor.omega_m)?;
    let delta_h = match res.baseline {
        Some(l) => Some(gw_strain_bound(delta_g0, l, sensor.omega_m).map_err(CliError::field("sensor.baseline"))?),
        None => None,
    };
    Ok(SensitivityOutput {
        version: optomech::VERSION,
        config_hash: scenario.hash(),
        tau,
        information,
        qfi,
        measurements: res.measurements,
        x0: res.x0,
        delta_g0,
        delta_h,
        validity: validity(scenario, &res, tau, safety)?,
    })
}

pub fn print_json<S: Serialize>(value: &S, out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(p) => write_json(p, value),
        None => {
            println!("{}", serde_json::to_string_pretty(value).expect("serializable output"));
            Ok(())
        }
    }
}
