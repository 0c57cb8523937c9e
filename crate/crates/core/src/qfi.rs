//! Quantum Fisher information for estimating the drive amplitude `d1`.
//!
//! The generator coefficients are derivatives with respect to `d1`. Every
//! drive-dependent F coefficient is linear in `d1`, so the derivative is the
//! coefficient evaluated at `d1 = 1`; no finite differences are taken.
//!
//! Closed forms return the QFI directly (factor 4 and photon variance
//! included) and are cross-checked against the numeric pipeline in tests.

use num_complex::Complex;

use crate::dynamics::{evolve, CouplingSpec, DriveSpec, FCoefficients, FreqModSpec};
use crate::error::{domain, Error, Result};
use crate::ode::Tolerances;
use crate::params::ThermalParameter;
use crate::real::{sq, Real};
use crate::separability::{is_separable_value, k_na_squared, FractionalFrequency};

/// Probe state of the cavity field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CavityState<T> {
    Coherent { mu: Complex<T> },
    /// `S(zeta)|mu>` with `zeta = r e^{i varphi}`.
    SqueezedCoherent { mu: Complex<T>, r: T, varphi: T },
}

impl<T: Real> CavityState<T> {
    pub fn coherent(mu: Complex<T>) -> Result<Self> {
        let s = Self::Coherent { mu };
        s.validate()?;
        Ok(s)
    }

    pub fn squeezed(mu: Complex<T>, r: T, varphi: T) -> Result<Self> {
        let s = Self::SqueezedCoherent { mu, r, varphi };
        s.validate()?;
        Ok(s)
    }

    /// Squeezed state whose phase satisfies `Re[e^{-i varphi/2} mu] = 0`,
    /// which maximizes the photon-number variance.
    pub fn squeezed_optimal(mu: Complex<T>, r: T) -> Result<Self> {
        let varphi = T::lit(2.0) * mu.im.atan2(mu.re) + T::PI();
        Self::squeezed(mu, r, varphi)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Coherent { mu } => check_mu(mu),
            Self::SqueezedCoherent { mu, r, varphi } => {
                check_mu(mu)?;
                if !(r >= T::zero()) || !r.is_finite() || !varphi.is_finite() {
                    return Err(domain(format!("squeezing must be finite with r >= 0, got r = {r}")));
                }
                Ok(())
            }
        }
    }

    pub fn mu(&self) -> Complex<T> {
        match *self {
            Self::Coherent { mu } | Self::SqueezedCoherent { mu, .. } => mu,
        }
    }

    /// `(r, varphi)`; zero for a coherent state.
    pub fn squeezing(&self) -> (T, T) {
        match *self {
            Self::Coherent { .. } => (T::zero(), T::zero()),
            Self::SqueezedCoherent { r, varphi, .. } => (r, varphi),
        }
    }
}

fn check_mu<T: Real>(mu: Complex<T>) -> Result<()> {
    if !mu.re.is_finite() || !mu.im.is_finite() {
        return Err(domain("coherent amplitude must be finite"));
    }
    Ok(())
}

/// Mean and variance of the cavity photon number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonStats<T> {
    pub mean_n: T,
    pub var_n: T,
}

impl<T: Real> PhotonStats<T> {
    /// Statistics given directly by their variance, for closed-form checks.
    pub fn with_variance(var_n: T) -> Self {
        Self { mean_n: var_n, var_n }
    }

    pub fn delta_n(&self) -> T {
        self.var_n.sqrt()
    }

    /// `<N^2> = Var + <N>^2`.
    pub fn second_moment(&self) -> T {
        self.var_n + sq(self.mean_n)
    }
}

/// `Re[e^{-i varphi/2} mu]`.
pub(crate) fn rotated_quadrature<T: Real>(mu: Complex<T>, varphi: T) -> T {
    (mu * Complex::from_polar(T::one(), -T::lit(0.5) * varphi)).re
}

pub fn photon_stats<T: Real>(state: &CavityState<T>) -> PhotonStats<T> {
    match *state {
        CavityState::Coherent { mu } => {
            let n = mu.norm_sqr();
            PhotonStats { mean_n: n, var_n: n }
        }
        CavityState::SqueezedCoherent { mu, r, varphi } => {
            let two = T::lit(2.0);
            let n = mu.norm_sqr();
            let x2 = sq(rotated_quadrature(mu, varphi));
            let mean_n = n * (two * r).exp() + sq(r.sinh()) - two * x2 * (two * r).sinh();
            let var_n = n * (T::lit(4.0) * r).exp() + T::lit(0.5) * sq((two * r).sinh())
                - two * x2 * (T::lit(4.0) * r).sinh();
            PhotonStats { mean_n, var_n }
        }
    }
}

/// Coefficients of the QFI generator.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GeneratorCoefficients<T> {
    pub b: T,
    pub c_plus: T,
    pub c_minus: T,
}

/// Generator coefficients from F coefficients computed with `d1 = 1`.
pub fn generator_from_unit_drive<T: Real>(f: &FCoefficients<T>) -> GeneratorCoefficients<T> {
    GeneratorCoefficients {
        b: -f.f_na - T::lit(2.0) * f.f_nabm * f.f_bp,
        c_plus: -f.f_bp,
        c_minus: -f.f_bm,
    }
}

/// Generator coefficients at each time in `taus` (sorted).
pub fn generator_coefficients_grid<T: Real>(
    drive: &DriveSpec<T>,
    coupling: &CouplingSpec<T>,
    fm: &FreqModSpec<T>,
    taus: &[T],
) -> Result<Vec<(GeneratorCoefficients<T>, FCoefficients<T>)>> {
    let unit = drive.with_d1(T::one());
    let evs = evolve(&unit, coupling, fm, taus, &Tolerances::default())?;
    Ok(evs.iter().map(|e| (generator_from_unit_drive(&e.f), e.f)).collect())
}

/// `B = -dF_N - 2 F_{NaB-} dF_{B+}`, `C+- = -dF_{B+-}`, derivatives in `d1`.
pub fn generator_coefficients<T: Real>(
    drive: &DriveSpec<T>,
    coupling: &CouplingSpec<T>,
    fm: &FreqModSpec<T>,
    tau: T,
) -> Result<GeneratorCoefficients<T>> {
    Ok(generator_coefficients_grid(drive, coupling, fm, &[tau])?[0].0)
}

/// `4 [B^2 Var(N) + sech(2 r_T)(C+^2 + C-^2)]`.
pub fn qfi_global<T: Real>(gc: &GeneratorCoefficients<T>, ps: &PhotonStats<T>, rt: ThermalParameter<T>) -> T {
    let thermal = match rt {
        ThermalParameter::Infinite => T::zero(),
        _ => rt.sech_2r() * (sq(gc.c_plus) + sq(gc.c_minus)),
    };
    T::lit(4.0) * (sq(gc.b) * ps.var_n + thermal)
}

/// Global QFI straight from the numeric pipeline.
pub fn qfi_global_numeric<T: Real>(
    drive: &DriveSpec<T>,
    coupling: &CouplingSpec<T>,
    fm: &FreqModSpec<T>,
    tau: T,
    ps: &PhotonStats<T>,
    rt: ThermalParameter<T>,
) -> Result<T> {
    Ok(qfi_global(&generator_coefficients(drive, coupling, fm, tau)?, ps, rt))
}

/// Local QFI `4 (dF_N)^2 Var(N)` from F coefficients computed with `d1 = 1`.
///
/// Fails unless the state is separable by criterion.
pub fn qfi_local_from_unit_drive<T: Real>(f: &FCoefficients<T>, k0: T, ps: &PhotonStats<T>) -> Result<T> {
    let k = k_na_squared(f);
    if !is_separable_value(k, k0) {
        return Err(Error::Precondition(format!(
            "light and mechanics are not separable (|K|^2 = {k:e}); only the global QFI bounds the sensitivity"
        )));
    }
    Ok(T::lit(4.0) * sq(f.f_na) * ps.var_n)
}

/// QFI of the cavity state alone at a disentangling time.
pub fn qfi_local_cavity<T: Real>(
    drive: &DriveSpec<T>,
    coupling: &CouplingSpec<T>,
    fm: &FreqModSpec<T>,
    tau_sep: T,
    ps: &PhotonStats<T>,
) -> Result<T> {
    let (_, f) = generator_coefficients_grid(drive, coupling, fm, &[tau_sep])?[0];
    qfi_local_from_unit_drive(&f, coupling.scale(), ps)
}

fn require_resonant<T: Real>(omega: T, what: &str) -> Result<()> {
    if (omega - T::one()).abs() > T::lit(1e-12) {
        return Err(Error::Precondition(format!("{what} must be resonant (= 1), got {omega}")));
    }
    Ok(())
}

fn require_tau<T: Real>(tau: T) -> Result<()> {
    if !(tau >= T::zero()) || !tau.is_finite() {
        return Err(domain(format!("tau must be finite and >= 0, got {tau}")));
    }
    Ok(())
}

fn thermal<T: Real>(rt: ThermalParameter<T>, value: impl FnOnce() -> T) -> T {
    match rt {
        ThermalParameter::Infinite => T::zero(),
        _ => rt.sech_2r() * value(),
    }
}

/// Constant coupling, resonant drive, arbitrary `tau`.
pub fn qfi_resonant_closed<T: Real>(
    k0: T,
    drive: &DriveSpec<T>,
    tau: T,
    ps: &PhotonStats<T>,
    rt: ThermalParameter<T>,
) -> Result<T> {
    require_resonant(drive.omega_d1, "drive frequency")?;
    require_tau(tau)?;
    let (a, e, p, t) = (drive.a, drive.epsilon, drive.phi_d1, tau);
    let c = T::lit;
    let local = sq(k0)
        * ps.var_n
        * sq(-c(4.0) * a * (t - t.sin())
            + e * (c(2.0) * t * p.cos() - c(4.0) * (t + p).sin() + (c(2.0) * t + p).sin() + c(3.0) * p.sin()));
    let th = thermal(rt, || {
        c(0.25)
            * (c(4.0) * sq(t * e * p.cos() + t.sin() * (e * (t + p).cos() + c(2.0) * a))
                + sq(c(2.0) * t * e * p.sin() + e * (c(2.0) * t + p).cos() - e * p.cos()
                    + c(4.0) * a * (t.cos() - T::one())))
    });
    Ok(local + th)
}

/// Constant coupling, resonant drive, at `tau = 2 pi n`:
/// `16 pi^2 n^2 k0^2 Var(N) (2a - eps cos phi_d1)^2 + (2 pi n)^2 eps^2 sech(2 r_T)`.
pub fn qfi_resonant_at_period<T: Real>(
    n: u32,
    k0: T,
    drive: &DriveSpec<T>,
    ps: &PhotonStats<T>,
    rt: ThermalParameter<T>,
) -> Result<T> {
    require_resonant(drive.omega_d1, "drive frequency")?;
    let tn = T::TAU() * T::lit(n as f64);
    let local = T::lit(4.0) * sq(tn * k0) * ps.var_n * sq(T::lit(2.0) * drive.a - drive.epsilon * drive.phi_d1.cos());
    Ok(local + thermal(rt, || sq(tn * drive.epsilon)))
}

/// Benchmark local QFI for an oscillating field with constant coupling:
/// `(4 pi n)^2 k0^2 eps^2 Var(N)`.
pub fn qfi_benchmark<T: Real>(n: u32, k0: T, epsilon: T, ps: &PhotonStats<T>) -> T {
    sq(T::lit(4.0) * T::PI() * T::lit(n as f64) * k0 * epsilon) * ps.var_n
}

/// Coupling and drive both resonant, arbitrary `tau`.
pub fn qfi_doubly_resonant<T: Real>(
    k0: T,
    phi_k: T,
    drive: &DriveSpec<T>,
    tau: T,
    ps: &PhotonStats<T>,
    rt: ThermalParameter<T>,
) -> Result<T> {
    require_resonant(drive.omega_d1, "drive frequency")?;
    require_tau(tau)?;
    let (a, e, pd, pk, t) = (drive.a, drive.epsilon, drive.phi_d1, phi_k, tau);
    let c = T::lit;
    let two_t = c(2.0) * t;
    let br = c(4.0) * a * (t - pk).sin() - c(12.0) * a * (t + pk).sin()
        + c(8.0) * a * t * (t + pk).cos()
        + c(16.0) * a * pk.sin()
        + c(2.0) * t * t * e * (pd - pk).sin()
        + e * (two_t - pk + pd).sin()
        - c(2.0) * e * (two_t + pk + pd).sin()
        - two_t * e * (pd - pk).cos()
        + two_t * e * (pk + pd).cos()
        + two_t * e * (two_t + pk + pd).cos()
        - e * (pd - pk).sin()
        + c(2.0) * e * (pk + pd).sin();
    let local = sq(k0) * ps.var_n * sq(br) / c(16.0);
    let th = thermal(rt, || {
        c(0.25)
            * (c(4.0) * sq(t.sin() * (c(2.0) * a + e * (t + pd).cos()) + t * e * pd.cos())
                + sq(c(4.0) * a * t.cos() - c(4.0) * a + two_t * e * pd.sin() + e * (two_t + pd).cos()
                    - e * pd.cos()))
    });
    Ok(local + th)
}

/// Doubly resonant QFI at `tau = 2 pi n`.
pub fn qfi_doubly_resonant_at_period<T: Real>(
    n: u32,
    k0: T,
    phi_k: T,
    drive: &DriveSpec<T>,
    ps: &PhotonStats<T>,
    rt: ThermalParameter<T>,
) -> Result<T> {
    require_resonant(drive.omega_d1, "drive frequency")?;
    let c = T::lit;
    let nn = c(n as f64);
    let (a, e, pd, pk) = (drive.a, drive.epsilon, drive.phi_d1, phi_k);
    let inner = c(4.0) * a * pk.cos()
        + e * (T::TAU() * nn * (pd - pk).sin() + c(2.0) * (pd + pk).cos() - (pd - pk).cos());
    let local = sq(T::PI() * nn * k0) * ps.var_n * sq(inner);
    Ok(local + thermal(rt, || sq(T::TAU() * nn * e)))
}

/// Leading doubly resonant QFI at optimal phases, `4 pi^4 n^4 k0^2 eps^2 Var(N)`.
pub fn qfi_doubly_resonant_optimal<T: Real>(n: u32, k0: T, epsilon: T, ps: &PhotonStats<T>) -> T {
    let pn = T::PI() * T::lit(n as f64);
    T::lit(4.0) * sq(sq(pn)) * sq(k0 * epsilon) * ps.var_n
}

/// Coupling and drive modulated at the same off-resonant frequency `omega_d1`.
///
/// Within `1e-6` of resonance the doubly resonant form is used instead, as
/// the general expression divides by `(omega^2 - 1)^4`.
pub fn qfi_same_frequency<T: Real>(
    k0: T,
    phi_k: T,
    drive: &DriveSpec<T>,
    tau: T,
    ps: &PhotonStats<T>,
    rt: ThermalParameter<T>,
) -> Result<T> {
    require_tau(tau)?;
    let o = drive.omega_d1;
    if !(o > T::zero()) {
        return Err(Error::Precondition(format!("modulation frequency must be > 0, got {o}")));
    }
    if (o - T::one()).abs() <= T::lit(1e-6) {
        return qfi_doubly_resonant(k0, phi_k, &DriveSpec { omega_d1: T::one(), ..*drive }, tau, ps, rt);
    }
    let (a, e, pd, pk, t) = (drive.a, drive.epsilon, drive.phi_d1, phi_k, tau);
    let c = T::lit;
    let s = |x: T| x.sin();
    let (o2, o3, o4) = (o * o, o * o * o, sq(o * o));
    let to = t * o;
    let br = -c(2.0) * a * o4 * s(t + pk) - c(2.0) * a * o3 * s(t + pk)
        + c(2.0) * a * o2 * s(t + pk)
        + c(4.0) * a * o2 * s(to + pk)
        + c(2.0) * a * sq(o - T::one()) * (o + T::one()) * o * s(t - pk)
        + c(2.0) * a * o * s(t + pk)
        - c(4.0) * a * s(to + pk)
        + c(4.0) * a * o4 * s(pk)
        - c(8.0) * a * o2 * s(pk)
        + c(4.0) * a * s(pk)
        + o3 * e * s(to + t - pk + pd)
        - o3 * e * s(to + t + pk + pd)
        - o3 * e * s(-to + t - pk - pd)
        + o3 * e * s(-to + t + pk - pd)
        - c(2.0) * o2 * e * s(to + t - pk + pd)
        + o2 * e * s(c(2.0) * to + pk + pd)
        + c(2.0) * o2 * e * s(-to + t + pk - pd)
        + c(2.0) * t * (o2 - T::one()) * o * e * (pd - pk).cos()
        + o * e * s(to + t - pk + pd)
        + o * e * s(to + t + pk + pd)
        + o * e * s(-to + t - pk - pd)
        + o * e * s(-to + t + pk - pd)
        - e * s(c(2.0) * to + pk + pd)
        + c(4.0) * o2 * e * s(pd - pk)
        - o2 * e * s(pk + pd)
        + e * s(pk + pd);
    let w = o2 - T::one();
    let local = sq(k0) * ps.var_n / (o2 * sq(sq(w))) * sq(br);
    let th = thermal(rt, || {
        let (ct, st) = (t.cos(), t.sin());
        let first = a * (T::one() - ct) + e * (o * st * (to + pd).sin() + ct * (to + pd).cos() - pd.cos()) / w;
        let second = (st * (a * w - e * (to + pd).cos())
            + o * e * (pd.sin() * (ct * to.cos() - T::one()) + ct * pd.cos() * to.sin()))
            / w;
        c(4.0) * (sq(first) + sq(second))
    });
    Ok(local + th)
}

/// Same-frequency QFI at the decoupling time `q s pi` of a fractional frequency.
///
/// `drive.omega_d1` must equal the fractional frequency.
pub fn qfi_fractional_at_sep<T: Real>(
    ff: &FractionalFrequency,
    q: u32,
    k0: T,
    phi_k: T,
    drive: &DriveSpec<T>,
    ps: &PhotonStats<T>,
    rt: ThermalParameter<T>,
) -> Result<T> {
    if q == 0 {
        return Err(domain("q must be >= 1"));
    }
    let om = ff.omega::<T>();
    if (drive.omega_d1 - om).abs() > T::lit(1e-12) * om {
        return Err(Error::Precondition(format!(
            "drive frequency {} differs from the fractional frequency {}",
            drive.omega_d1,
            ff.omega_frac()
        )));
    }
    let c = T::lit;
    let (n1, s) = (c(ff.n1() as f64), c(ff.s() as f64));
    let (a, e, pd, pk) = (drive.a, drive.epsilon, drive.phi_d1, phi_k);
    // (-1)^{qs} - 1 is 0 for even qs and -2 for odd
    let parity = if (q as i64 * ff.s()) % 2 == 0 { T::zero() } else { -c(2.0) };
    let inner = T::PI() * c(q as f64) * s * s * e * (c(2.0) * n1 + s) * (pd - pk).cos()
        - c(8.0) * a * n1 * (n1 + s) * parity * pk.sin();
    let den = c(4.0) * sq(n1 * (n1 + s) * (c(2.0) * n1 + s));
    let local = sq(k0) * ps.var_n * sq(s) * sq(inner) / den;
    Ok(local + thermal(rt, || c(4.0) * sq(a * parity)))
}

/// Fractional QFI for the `1 - 2/s` family with `a = 0`, `phi_d1 = phi_k`, `q = 1`:
/// `pi^2 k0^2 eps^2 s^6 / (4 (1 - s)^2) Var(N)`.
pub fn qfi_fractional_simple<T: Real>(s: u32, k0: T, epsilon: T, ps: &PhotonStats<T>) -> Result<T> {
    if s < 3 {
        return Err(domain(format!("s must be >= 3, got {s}")));
    }
    let sf = T::lit(s as f64);
    Ok(sq(T::PI() * k0 * epsilon) * sq(sf * sf * sf) / (T::lit(4.0) * sq(T::one() - sf)) * ps.var_n)
}

/// Parametric-resonance QFI for constant coupling, resonant drive with
/// `a = 0`, `phi_d1 = 0` and modulation `omega_d2 = 2`, `phi_d2 = -pi/2`.
///
/// First-order in `d2` and without the thermal term (`r_T` infinite).
pub fn qfi_parametric<T: Real>(k0: T, epsilon: T, d2: T, tau: T, ps: &PhotonStats<T>) -> Result<T> {
    check_parametric(d2, tau)?;
    let c = T::lit;
    let (st, ct) = tau.sin_cos();
    let scale = c(2.0 / 3.0) * sq(k0 * epsilon) * ps.var_n;
    if d2 == T::zero() {
        return Ok(scale * c(6.0) * sq(tau + st * (ct - c(2.0))));
    }
    let dt = d2 * tau;
    let x = dt.exp_m1();
    let ec2 = dt.exp() * ct - c(2.0);
    let bracket = c(6.0) * sq(x / d2) - c(15.0) * sq(x)
        + c(6.0) * sq(st * ec2)
        + c(12.0) * x * st * ec2 / d2
        + x * ((c(9.0) * (c(2.0) * tau).cos() + c(3.0)) * dt.sinh() + c(6.0) * sq(st) * dt.cosh()
            + c(16.0) * (ct * ct * ct - T::one()));
    Ok(scale * bracket)
}

/// Dominant parametric term `4 k0^2 eps^2 (e^{d2 tau} - 1)^2 / d2^2 Var(N)`.
pub fn qfi_parametric_dominant<T: Real>(k0: T, epsilon: T, d2: T, tau: T, ps: &PhotonStats<T>) -> Result<T> {
    check_parametric(d2, tau)?;
    let growth = if d2 == T::zero() { tau } else { (d2 * tau).exp_m1() / d2 };
    Ok(T::lit(4.0) * sq(k0 * epsilon * growth) * ps.var_n)
}

fn check_parametric<T: Real>(d2: T, tau: T) -> Result<()> {
    require_tau(tau)?;
    if !(d2.abs() < T::lit(FreqModSpec::<T>::HARD_LIMIT)) {
        return Err(domain(format!("|d2| must be < 0.5, got {d2}")));
    }
    Ok(())
}

/// True when `d2` and `d2 tau` are small enough for the perturbative forms.
pub fn parametric_in_regime<T: Real>(d2: T, tau: T) -> bool {
    d2.abs() < T::lit(FreqModSpec::<T>::SOFT_LIMIT) && (d2 * tau).abs() <= T::lit(1.5)
}

/// Grid of initial phases `(phi_d2, phi_d1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseGrid<T> {
    pub phi_d2: Vec<T>,
    pub phi_d1: Vec<T>,
}

impl<T: Real> PhaseGrid<T> {
    /// `n x n` points covering `[-pi, pi)` in both phases.
    pub fn uniform(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(domain("phase grid needs at least 2 points per axis"));
        }
        let step = T::TAU() / T::lit(n as f64);
        let axis: Vec<T> = (0..n).map(|i| -T::PI() + step * T::lit(i as f64)).collect();
        Ok(Self { phi_d2: axis.clone(), phi_d1: axis })
    }
}

/// QFI values on a phase grid, `values[i][j]` at `(phi_d2[i], phi_d1[j])`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseMap<T> {
    pub grid: PhaseGrid<T>,
    pub values: Vec<Vec<T>>,
}

impl<T: Real> PhaseMap<T> {
    /// `(phi_d2, phi_d1, value)` of the largest entry.
    pub fn argmax(&self) -> (T, T, T) {
        let mut best = (self.grid.phi_d2[0], self.grid.phi_d1[0], T::neg_infinity());
        for (i, row) in self.values.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v > best.2 {
                    best = (self.grid.phi_d2[i], self.grid.phi_d1[j], v);
                }
            }
        }
        best
    }
}

/// Scenario for a parametric phase map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParametricScenario<T> {
    pub k0: T,
    pub epsilon: T,
    pub d2: T,
    pub tau: T,
}

/// Global QFI at one point of the phase map.
pub fn qfi_phase_point<T: Real>(
    sc: &ParametricScenario<T>,
    phi_d2: T,
    phi_d1: T,
    ps: &PhotonStats<T>,
    rt: ThermalParameter<T>,
) -> Result<T> {
    let drive = DriveSpec::unit(T::zero(), sc.epsilon, T::one(), phi_d1)?;
    let coupling = CouplingSpec::constant(sc.k0)?;
    let fm = FreqModSpec::parametric(sc.d2, phi_d2)?;
    qfi_global_numeric(&drive, &coupling, &fm, sc.tau, ps, rt)
}

/// Numeric QFI over a phase grid (`a = 0`, `omega_d1 = 1`, `omega_d2 = 2`).
pub fn qfi_phase_map<T: Real>(
    grid: &PhaseGrid<T>,
    sc: &ParametricScenario<T>,
    ps: &PhotonStats<T>,
    rt: ThermalParameter<T>,
) -> Result<PhaseMap<T>> {
    let values = grid
        .phi_d2
        .iter()
        .map(|&p2| grid.phi_d1.iter().map(|&p1| qfi_phase_point(sc, p2, p1, ps, rt)).collect())
        .collect::<Result<Vec<Vec<T>>>>()?;
    Ok(PhaseMap { grid: grid.clone(), values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const INF: ThermalParameter<f64> = ThermalParameter::Infinite;
    const GROUND: ThermalParameter<f64> = ThermalParameter::Finite(0.0);

    fn unit_var() -> PhotonStats<f64> {
        PhotonStats::with_variance(1.0)
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    fn numeric(d: &DriveSpec<f64>, c: &CouplingSpec<f64>, fm: &FreqModSpec<f64>, t: f64, dn2: f64, rt: ThermalParameter<f64>) -> f64 {
        qfi_global_numeric(d, c, fm, t, &PhotonStats::with_variance(dn2), rt).unwrap()
    }

    #[test]
    fn photon_stats_coherent_and_unsqueezed() {
        let ps = photon_stats(&CavityState::coherent(Complex::new(3.0, 0.0)).unwrap());
        assert_eq!((ps.mean_n, ps.var_n), (9.0, 9.0));
        let mu = Complex::new(1.2f64, -0.7);
        let a = photon_stats(&CavityState::coherent(mu).unwrap());
        let b = photon_stats(&CavityState::squeezed(mu, 0.0, 1.3).unwrap());
        assert!((a.mean_n - b.mean_n).abs() < 1e-15 && (a.var_n - b.var_n).abs() < 1e-15);
        assert!(CavityState::squeezed(mu, -0.1, 0.0).is_err());
    }

    #[test]
    fn squeezed_vacuum_statistics() {
        let r = 0.8f64;
        let ps = photon_stats(&CavityState::squeezed(Complex::new(0.0, 0.0), r, 0.4).unwrap());
        assert!((ps.mean_n - r.sinh().powi(2)).abs() < 1e-14);
        // squeezed vacuum: Var = 2 sinh^2 r cosh^2 r
        assert!((ps.var_n - 2.0 * (r.sinh() * r.cosh()).powi(2)).abs() < 1e-13);
    }

    #[test]
    fn table_state_variance() {
        let st = CavityState::squeezed_optimal(Complex::new(250.0f64, 0.0), 1.73).unwrap();
        if let CavityState::SqueezedCoherent { mu, varphi, .. } = st {
            assert!(rotated_quadrature(mu, varphi).abs() < 1e-12);
        }
        let ps = photon_stats(&st);
        let want = 250.0f64.powi(2) * 6.92f64.exp() + 3.46f64.sinh().powi(2) / 2.0;
        assert!(rel(ps.var_n, want) < 1e-14);
        assert!(rel(ps.var_n, 6.33e7) < 2e-3);
    }

    #[test]
    fn optimal_phase_maximizes_variance() {
        let mu = Complex::from_polar(4.0, 0.6);
        let r = 0.9;
        let opt = photon_stats(&CavityState::squeezed_optimal(mu, r).unwrap()).var_n;
        let mut best = (f64::NEG_INFINITY, 0.0);
        for i in 0..720 {
            let phi = 2.0 * PI * i as f64 / 720.0;
            let v = photon_stats(&CavityState::squeezed(mu, r, phi).unwrap()).var_n;
            assert!(v <= opt * (1.0 + 1e-14));
            if v > best.0 {
                best = (v, phi);
            }
        }
        assert!(rotated_quadrature(mu, best.1).abs() < 4.0 * 2.0 * PI / 720.0);
    }

    #[test]
    fn generator_is_independent_of_d1() {
        let c = CouplingSpec::modulated(0.7, 1.3, 0.4).unwrap();
        let fm = FreqModSpec::parametric(0.01, 0.2).unwrap();
        let d = DriveSpec::new(0.5, 0.3, 0.8, 1.1, 0.6).unwrap();
        let a = generator_coefficients(&d, &c, &fm, 6.0).unwrap();
        let b = generator_coefficients(&d.with_d1(2.0), &c, &fm, 6.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn generator_at_resonant_period() {
        for n in 1..=3u32 {
            let d = DriveSpec::unit(0.0, 1.0, 1.0, PI).unwrap();
            let g = generator_coefficients(&d, &CouplingSpec::constant(0.6).unwrap(), &FreqModSpec::none(), 2.0 * PI * n as f64)
                .unwrap();
            assert!(rel(g.b.abs(), 2.0 * PI * n as f64 * 0.6) < 1e-9, "{}", g.b);
        }
        let d = DriveSpec::unit(0.4, 0.5, 1.3, 0.2).unwrap();
        let g = generator_coefficients(&d, &CouplingSpec::constant(0.0).unwrap(), &FreqModSpec::none(), 3.0).unwrap();
        assert_eq!(g.b, 0.0);
        assert!(g.c_plus != 0.0 && g.c_minus != 0.0);
    }

    #[test]
    fn global_qfi_simple_values() {
        let z = GeneratorCoefficients::default();
        assert_eq!(qfi_global(&z, &unit_var(), GROUND), 0.0);
        let g = GeneratorCoefficients { b: 1.0, c_plus: 3.0, c_minus: 4.0 };
        assert_eq!(qfi_global(&g, &unit_var(), INF), 4.0);
        assert_eq!(qfi_global(&g, &unit_var(), GROUND), 104.0);
        let mut prev = f64::INFINITY;
        for i in 0..40 {
            let v = qfi_global(&g, &unit_var(), ThermalParameter::Finite(i as f64 * 0.1));
            assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn resonant_period_value() {
        // 16 pi^2 (local) + 4 pi^2 (thermal) at n = 1
        let d = DriveSpec::unit(0.0, 1.0, 1.0, PI).unwrap();
        let c = CouplingSpec::constant(1.0).unwrap();
        let num = numeric(&d, &c, &FreqModSpec::none(), 2.0 * PI, 1.0, GROUND);
        assert!(rel(num, 20.0 * PI * PI) < 1e-9, "{num}");
        let cf = qfi_resonant_at_period(1, 1.0, &d, &unit_var(), GROUND).unwrap();
        assert!(rel(cf, 20.0 * PI * PI) < 1e-14);
        let d = DriveSpec::unit(1.0, 0.0, 1.0, 0.0).unwrap();
        let cf = qfi_resonant_at_period(1, 1.0, &d, &unit_var(), INF).unwrap();
        assert!(rel(cf, 64.0 * PI * PI) < 1e-14);
        assert!(rel(numeric(&d, &c, &FreqModSpec::none(), 2.0 * PI, 1.0, INF), 64.0 * PI * PI) < 1e-9);
    }

    #[test]
    fn resonant_closed_forms_match_pipeline() {
        let c = CouplingSpec::constant(0.7).unwrap();
        for &(a, e, p, t) in &[(0.3, 0.8, 1.1, 4.4), (0.0, 1.0, 2.5, 9.0), (1.0, 0.2, 5.0, 0.3)] {
            let d = DriveSpec::unit(a, e, 1.0, p).unwrap();
            for rt in [GROUND, ThermalParameter::Finite(0.4), INF] {
                let num = numeric(&d, &c, &FreqModSpec::none(), t, 1.7, rt);
                let cf = qfi_resonant_closed(0.7, &d, t, &PhotonStats::with_variance(1.7), rt).unwrap();
                assert!(rel(cf, num) < 1e-8, "{cf} vs {num}");
            }
        }
        for n in 1..=4 {
            let d = DriveSpec::unit(0.4, 0.7, 1.0, 0.9).unwrap();
            let t = 2.0 * PI * n as f64;
            let a = qfi_resonant_closed(0.7, &d, t, &unit_var(), GROUND).unwrap();
            let b = qfi_resonant_at_period(n, 0.7, &d, &unit_var(), GROUND).unwrap();
            assert!(rel(a, b) < 1e-12);
        }
    }

    #[test]
    fn resonant_phase_maximum_is_pi() {
        let mut best = (0.0, 0.0);
        for i in 0..360 {
            let p = 2.0 * PI * i as f64 / 360.0;
            let d = DriveSpec::unit(1.0, 0.5, 1.0, p).unwrap();
            let v = qfi_resonant_at_period(1, 1.0, &d, &unit_var(), INF).unwrap();
            if v > best.0 {
                best = (v, p);
            }
        }
        assert!((best.1 - PI).abs() < 1e-12);
        let d = DriveSpec::unit(1.0, 0.5, 1.1, 0.0).unwrap();
        assert!(matches!(qfi_resonant_closed(1.0, &d, 1.0, &unit_var(), INF), Err(Error::Precondition(_))));
    }

    #[test]
    fn benchmark_factor_four() {
        let ps = PhotonStats::with_variance(3.3);
        for n in 1..6 {
            let osc = qfi_benchmark(n, 0.4, 1.0, &ps);
            let d = DriveSpec::unit(1.0, 0.0, 1.0, 0.0).unwrap();
            let cst = qfi_resonant_at_period(n, 0.4, &d, &ps, INF).unwrap();
            assert!(rel(cst / osc, 4.0) < 1e-14);
        }
    }

    #[test]
    fn doubly_resonant_forms_match_pipeline() {
        for &(a, e, pd, pk, t) in &[(0.3, 0.8, 1.1, 0.4, 4.4), (0.0, 1.0, 2.5, 3.0, 9.0), (1.0, 0.2, 5.0, 1.0, 0.3)] {
            let d = DriveSpec::unit(a, e, 1.0, pd).unwrap();
            let c = CouplingSpec::modulated(0.9, 1.0, pk).unwrap();
            let rt = ThermalParameter::Finite(0.3);
            let num = numeric(&d, &c, &FreqModSpec::none(), t, 1.3, rt);
            let cf = qfi_doubly_resonant(0.9, pk, &d, t, &PhotonStats::with_variance(1.3), rt).unwrap();
            assert!(rel(cf, num) < 1e-8, "{cf} vs {num}");
            for n in 1..=3 {
                let t = 2.0 * PI * n as f64;
                let x = qfi_doubly_resonant(0.9, pk, &d, t, &unit_var(), rt).unwrap();
                let y = qfi_doubly_resonant_at_period(n, 0.9, pk, &d, &unit_var(), rt).unwrap();
                assert!(rel(x, y) < 1e-12, "{x} vs {y}");
            }
        }
    }

    #[test]
    fn doubly_resonant_optimum_and_improvement() {
        let d = DriveSpec::unit(0.0, 1.0, 1.0, PI / 2.0).unwrap();
        let v = qfi_doubly_resonant_at_period(1, 1.0, 0.0, &d, &unit_var(), INF).unwrap();
        assert!(rel(v, 4.0 * PI.powi(4)) < 1e-14);
        assert!(rel(qfi_doubly_resonant_optimal(1, 1.0, 1.0, &unit_var()), 389.636) < 1e-5);
        for n in 1..10 {
            let ratio = qfi_doubly_resonant_optimal(n, 0.3, 1.0, &unit_var()) / qfi_benchmark(n, 0.3, 1.0, &unit_var());
            assert!(rel(ratio, (n * n) as f64 * PI * PI / 4.0) < 1e-14);
        }
        let z = DriveSpec::unit(0.0, 0.0, 1.0, 0.3).unwrap();
        assert_eq!(qfi_doubly_resonant(1.0, 0.2, &z, 5.0, &unit_var(), INF).unwrap(), 0.0);
    }

    #[test]
    fn same_frequency_matches_pipeline() {
        for &(o, a, e, pd, pk, t) in &[(1.37, 0.2, 0.9, 0.3, 1.2, 5.1), (0.6, 0.5, 0.5, 2.0, 4.0, 11.0), (2.4, 0.0, 1.0, 0.0, 0.0, 3.0)] {
            let d = DriveSpec::unit(a, e, o, pd).unwrap();
            let c = CouplingSpec::modulated(1.1, o, pk).unwrap();
            let rt = ThermalParameter::Finite(0.2);
            let num = numeric(&d, &c, &FreqModSpec::none(), t, 2.0, rt);
            let cf = qfi_same_frequency(1.1, pk, &d, t, &PhotonStats::with_variance(2.0), rt).unwrap();
            assert!(rel(cf, num) < 1e-8, "{cf} vs {num}");
        }
        let d = DriveSpec::unit(0.3, 0.5, 1.2, 0.1).unwrap();
        assert!(qfi_same_frequency(1.0, 0.0, &d, 0.0, &unit_var(), GROUND).unwrap() < 1e-28);
    }

    #[test]
    fn same_frequency_defers_at_resonance() {
        let d = DriveSpec::unit(0.3, 0.5, 1.0 + 1e-9, 0.1).unwrap();
        let a = qfi_same_frequency(1.0, 0.4, &d, 7.0, &unit_var(), GROUND).unwrap();
        let b = qfi_doubly_resonant(1.0, 0.4, &DriveSpec { omega_d1: 1.0, ..d }, 7.0, &unit_var(), GROUND).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn fractional_forms_agree() {
        let ff = FractionalFrequency::lower(8).unwrap();
        let d = DriveSpec::unit(0.0, 1.0, 0.75, 0.0).unwrap();
        let a = qfi_fractional_at_sep(&ff, 1, 1.0, 0.0, &d, &unit_var(), INF).unwrap();
        let b = qfi_fractional_simple(8, 1.0, 1.0, &unit_var()).unwrap();
        let want = PI * PI * 8f64.powi(6) / 196.0;
        assert!(rel(a, want) < 1e-13 && rel(b, want) < 1e-14);
        assert!(rel(want, 1.320e4) < 1e-3);
        let c = qfi_same_frequency(1.0, 0.0, &d, 8.0 * PI, &unit_var(), INF).unwrap();
        assert!(rel(c, a) < 1e-9);
        let two = qfi_fractional_at_sep(&ff, 2, 1.0, 0.0, &d, &unit_var(), INF).unwrap();
        assert!(rel(two, 4.0 * a) < 1e-13);
    }

    #[test]
    fn fractional_matches_pipeline_and_local_qfi() {
        for &(n1, s, q) in &[(-1i64, 8i64, 1u32), (1, 3, 2), (-1, 5, 1), (2, 5, 3)] {
            let ff = FractionalFrequency::new(n1, s).unwrap();
            let o = ff.omega::<f64>();
            let d = DriveSpec::unit(0.4, 0.7, o, 1.3).unwrap();
            let c = CouplingSpec::modulated(0.8, o, 0.5).unwrap();
            let rt = ThermalParameter::Finite(0.2);
            let t = ff.tau_at::<f64>(q);
            let num = numeric(&d, &c, &FreqModSpec::none(), t, 1.3, rt);
            let cf = qfi_fractional_at_sep(&ff, q, 0.8, 0.5, &d, &PhotonStats::with_variance(1.3), rt).unwrap();
            assert!(rel(cf, num) < 1e-8, "{ff}: {cf} vs {num}");
            let local = qfi_local_cavity(&d, &c, &FreqModSpec::none(), t, &PhotonStats::with_variance(1.3)).unwrap();
            let at_inf = qfi_fractional_at_sep(&ff, q, 0.8, 0.5, &d, &PhotonStats::with_variance(1.3), INF).unwrap();
            assert!(rel(local, at_inf) < 1e-8);
        }
        // even qs kills the constant-drive term
        let ff = FractionalFrequency::lower(8).unwrap();
        let d = DriveSpec::unit(1.0, 0.0, 0.75, 0.0).unwrap();
        assert_eq!(qfi_fractional_at_sep(&ff, 1, 1.0, 0.0, &d, &unit_var(), GROUND).unwrap(), 0.0);
    }

    #[test]
    fn local_qfi_refuses_entangled_times() {
        let d = DriveSpec::unit(0.0, 1.0, 1.0, 0.0).unwrap();
        let c = CouplingSpec::modulated(1.0, 1.0, 0.0).unwrap();
        let r = qfi_local_cavity(&d, &c, &FreqModSpec::none(), 2.0 * PI, &unit_var());
        assert!(matches!(r, Err(Error::Precondition(_))));
        let c = CouplingSpec::constant(1.0).unwrap();
        let v = qfi_local_cavity(&d, &c, &FreqModSpec::none(), 2.0 * PI, &unit_var()).unwrap();
        assert!(rel(v, 16.0 * PI * PI) < 1e-9);
        let z = CouplingSpec::constant(0.0).unwrap();
        assert_eq!(qfi_local_cavity(&d, &z, &FreqModSpec::none(), 2.0, &unit_var()).unwrap(), 0.0);
    }

    #[test]
    fn parametric_closed_forms() {
        let dom = qfi_parametric_dominant(1.0, 1.0, 0.01, 100.0, &unit_var()).unwrap();
        assert!(rel(dom, 4.0 * (1f64.exp() - 1.0).powi(2) / 1e-4) < 1e-13);
        assert!(rel(dom, 1.181e5) < 1e-3);
        let lim = qfi_parametric_dominant(1.0, 1.0, 1e-12, 3.0, &unit_var()).unwrap();
        assert!(rel(lim, 36.0) < 1e-9);
        // d2 -> 0 matches the unmodulated resonant closed form
        let d = DriveSpec::unit(0.0, 1.0, 1.0, 0.0).unwrap();
        let r = qfi_resonant_closed(1.0, &d, 5.0, &unit_var(), INF).unwrap();
        assert!(rel(qfi_parametric(1.0, 1.0, 0.0, 5.0, &unit_var()).unwrap(), r) < 1e-13);
        assert!(rel(qfi_parametric(1.0, 1.0, 1e-7, 5.0, &unit_var()).unwrap(), r) < 1e-5);
        assert!(qfi_parametric(1.0, 1.0, 0.5, 5.0, &unit_var()).is_err());
        // the ratio of dominant terms is exactly (e - 1)^2 at d2 tau = 1
        let t = 2.0 * PI;
        let ratio = qfi_parametric_dominant(1.0, 1.0, 1.0 / t, t, &unit_var()).unwrap() / qfi_benchmark(1, 1.0, 1.0, &unit_var());
        assert!(rel(ratio, (1f64.exp() - 1.0).powi(2)) < 1e-13);
    }

    #[test]
    fn parametric_closed_form_tracks_pipeline() {
        let (d2, t) = (0.005, 50.0);
        let d = DriveSpec::unit(0.0, 1.0, 1.0, 0.0).unwrap();
        let fm = FreqModSpec::parametric(d2, -PI / 2.0).unwrap();
        let num = numeric(&d, &CouplingSpec::constant(1.0).unwrap(), &fm, t, 1.0, INF);
        let cf = qfi_parametric(1.0, 1.0, d2, t, &unit_var()).unwrap();
        assert!(rel(cf, num) < 10.0 * d2, "{cf} vs {num}");
    }

    #[test]
    fn phase_map_properties() {
        let sc = ParametricScenario { k0: 1.0, epsilon: 1.0, d2: 0.0, tau: 2.0 * PI };
        let g = PhaseGrid::uniform(6).unwrap();
        let m = qfi_phase_map(&g, &sc, &unit_var(), INF).unwrap();
        for j in 0..6 {
            for i in 1..6 {
                assert!(rel(m.values[i][j], m.values[0][j]) < 1e-9);
            }
        }
        let sc = ParametricScenario { d2: 0.02, ..sc };
        let a = qfi_phase_point(&sc, 0.3, 1.1, &unit_var(), INF).unwrap();
        let b = qfi_phase_point(&sc, 0.3 + 2.0 * PI, 1.1 - 2.0 * PI, &unit_var(), INF).unwrap();
        assert!(rel(a, b) < 1e-8);
        assert!(PhaseGrid::<f64>::uniform(1).is_err());
    }

    #[test]
    fn single_precision_closed_forms() {
        let ps = PhotonStats::with_variance(1.0f32);
        let v = qfi_fractional_simple(8, 1.0f32, 1.0, &ps).unwrap();
        assert!((v / 13_204.0 - 1.0).abs() < 1e-3);
    }
}
