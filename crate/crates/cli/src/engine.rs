//! Evaluates a requested quantity over a set of times.

use clap::ValueEnum;
use num_complex::Complex;
use optomech::cfi::{
    cfi_heterodyne_coherent, cfi_heterodyne_squeezed, cfi_homodyne_coherent, cfi_homodyne_squeezed,
    kerr_phase_is_trivial, optimal_homodyne_angle, optimal_vacuum_angle, rotate_amplitude, HomodyneSetting,
    SqueezedHomodyne,
};
use optomech::dynamics::evolve;
use optomech::ode::Tolerances;
use optomech::qfi::{generator_coefficients_grid, qfi_global, qfi_local_from_unit_drive, CavityState};
use optomech::sensitivity::{displacement_from_evolution, phonon_from_evolution};
use optomech::separability::{is_separable, k_na_squared};
use optomech::{Evolution, FCoefficients, GeneratorCoefficients};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Resolved;
use crate::error::CliResult;

/// Times integrated together in one task. Fixed so that output does not
/// depend on the number of threads: the integrator lands exactly on every
/// requested time, which shapes its step sequence.
pub const CHUNK: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Quantity {
    QfiGlobal,
    QfiLocal,
    CfiHomodyne,
    CfiHeterodyne,
    KNaSquared,
    MeanX,
    StdX,
    PhononNumber,
}

impl Quantity {
    pub fn name(&self) -> &'static str {
        match self {
            Quantity::QfiGlobal => "qfi_global",
            Quantity::QfiLocal => "qfi_local",
            Quantity::CfiHomodyne => "cfi_homodyne",
            Quantity::CfiHeterodyne => "cfi_heterodyne",
            Quantity::KNaSquared => "k_na_squared",
            Quantity::MeanX => "mean_x",
            Quantity::StdX => "std_x",
            Quantity::PhononNumber => "phonon_number",
        }
    }

    fn needs_unit_drive(&self) -> bool {
        matches!(self, Quantity::QfiGlobal | Quantity::QfiLocal | Quantity::CfiHomodyne | Quantity::CfiHeterodyne)
    }

    /// Cavity-only quantities, defined only where light and mechanics separate.
    pub fn needs_separability(&self) -> bool {
        matches!(self, Quantity::QfiLocal | Quantity::CfiHomodyne | Quantity::CfiHeterodyne)
    }
}

/// Value at one time; `value` is `None` where the quantity is undefined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub tau: f64,
    pub value: Option<f64>,
    pub separable: bool,
    /// Whether `F_{N^2}` is a multiple of `2 pi`, which the CFI forms assume.
    pub kerr_trivial: bool,
    /// Global QFI, reported as an upper bound where `value` is undefined.
    pub upper_bound: Option<f64>,
}

struct Sample<'a> {
    actual: &'a Evolution<f64>,
    unit: Option<&'a (GeneratorCoefficients<f64>, FCoefficients<f64>)>,
}

fn point(res: &Resolved, q: Quantity, s: Sample<'_>) -> CliResult<Point> {
    let ev = s.actual;
    let k0 = res.coupling.scale();
    let separable = is_separable(&ev.f, k0);
    let kerr_trivial = kerr_phase_is_trivial(ev.f.f_na2);
    let global = s.unit.map(|(gc, _)| qfi_global(gc, &res.photons, res.mechanics.r_t));
    let mut p = Point { tau: ev.tau, value: None, separable, kerr_trivial, upper_bound: None };
    if q.needs_separability() && !separable {
        p.upper_bound = global;
        return Ok(p);
    }
    p.value = Some(match q {
        Quantity::QfiGlobal => global.expect("unit drive evaluated"),
        Quantity::QfiLocal => qfi_local_from_unit_drive(&s.unit.expect("unit drive evaluated").1, k0, &res.photons)?,
        Quantity::CfiHomodyne | Quantity::CfiHeterodyne => {
            let b = s.unit.expect("unit drive evaluated").1.f_na;
            let (r, varphi) = res.cavity.squeezing();
            let ra = rotate_amplitude(res.cavity.mu(), varphi, ev.f.f_na);
            match (q, &res.cavity) {
                (Quantity::CfiHomodyne, CavityState::Coherent { .. }) => {
                    let h = res.homodyne_angle.map_or_else(|| optimal_homodyne_angle(&ra), |lambda| HomodyneSetting { lambda });
                    cfi_homodyne_coherent(b, &ra, &h)
                }
                (Quantity::CfiHomodyne, _) if ra.mu_tilde == Complex::new(0.0, 0.0) => {
                    let h = res
                        .homodyne_angle
                        .map_or_else(|| optimal_vacuum_angle(ra.varphi_tilde, r), |lambda| HomodyneSetting { lambda });
                    cfi_homodyne_squeezed(b, &ra, r, SqueezedHomodyne::Vacuum(h))?
                }
                (Quantity::CfiHomodyne, _) => cfi_homodyne_squeezed(b, &ra, r, SqueezedHomodyne::Optimal)?,
                (_, CavityState::Coherent { mu }) => cfi_heterodyne_coherent(b, *mu),
                _ => cfi_heterodyne_squeezed(b, &ra, r)?,
            }
        }
        Quantity::KNaSquared => k_na_squared(&ev.f),
        Quantity::MeanX | Quantity::StdX => {
            let d = displacement_from_evolution(ev, &res.mechanics, &res.photons, res.x0, res.compensate);
            if q == Quantity::MeanX { d.mean_x } else { d.std_x }
        }
        Quantity::PhononNumber => phonon_from_evolution(ev, &res.photons)?,
    });
    Ok(p)
}

fn chunk(res: &Resolved, q: Quantity, taus: &[f64]) -> CliResult<Vec<Point>> {
    let tol = Tolerances::default();
    let actual = evolve(&res.drive, &res.coupling, &res.freq_mod, taus, &tol)?;
    let unit = if q.needs_unit_drive() {
        Some(generator_coefficients_grid(&res.drive, &res.coupling, &res.freq_mod, taus)?)
    } else {
        None
    };
    actual
        .iter()
        .enumerate()
        .map(|(i, ev)| point(res, q, Sample { actual: ev, unit: unit.as_ref().map(|u| &u[i]) }))
        .collect()
}

/// Evaluates `q` at sorted, non-negative `taus`, in parallel over fixed-size chunks.
pub fn evaluate(res: &Resolved, q: Quantity, taus: &[f64]) -> CliResult<Vec<Point>> {
    let parts: Vec<CliResult<Vec<Point>>> = taus.par_chunks(CHUNK).map(|c| chunk(res, q, c)).collect();
    let mut out = Vec::with_capacity(taus.len());
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

pub fn evaluate_at(res: &Resolved, q: Quantity, tau: f64) -> CliResult<Point> {
    Ok(chunk(res, q, &[tau])?[0])
}
