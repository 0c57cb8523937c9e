//! Classical Fisher information of homodyne and heterodyne measurements on
//! the cavity state at a disentangling time.
//!
//! All expressions assume `F_{N^2}` is a multiple of `2 pi`, so the Kerr
//! phase drops out; [`kerr_phase_is_trivial`] checks this and enforcing it
//! is left to the caller.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::qfi::rotated_quadrature;
use crate::real::{sq, Real};

/// Tolerance on `F_{N^2} mod 2 pi`.
pub const KERR_PHASE_TOL: f64 = 1e-6;

/// Homodyne local-oscillator phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomodyneSetting<T> {
    pub lambda: T,
}

/// Cavity amplitude and squeezing phase after the optical rotation `F_N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotatedAmplitude<T> {
    pub mu_tilde: Complex<T>,
    pub varphi_tilde: T,
}

/// `mu~ = mu e^{-i F_N}`, `varphi~ = varphi - 2 F_N`.
pub fn rotate_amplitude<T: Real>(mu: Complex<T>, varphi: T, f_na: T) -> RotatedAmplitude<T> {
    RotatedAmplitude {
        mu_tilde: mu * Complex::from_polar(T::one(), -f_na),
        varphi_tilde: varphi - T::lit(2.0) * f_na,
    }
}

/// True when `F_{N^2}` is within [`KERR_PHASE_TOL`] of a multiple of `2 pi`.
pub fn kerr_phase_is_trivial<T: Real>(f_na2: T) -> bool {
    let turns = f_na2 / T::TAU();
    (turns - turns.round()).abs() * T::TAU() <= T::lit(KERR_PHASE_TOL)
}

/// `lambda = arg(mu~) - pi/2`, which maximizes the coherent homodyne CFI.
pub fn optimal_homodyne_angle<T: Real>(ra: &RotatedAmplitude<T>) -> HomodyneSetting<T> {
    HomodyneSetting { lambda: ra.mu_tilde.im.atan2(ra.mu_tilde.re) - T::FRAC_PI_2() }
}

/// `4 B^2 Im(mu~ e^{-i lambda})^2`.
pub fn cfi_homodyne_coherent<T: Real>(b: T, ra: &RotatedAmplitude<T>, h: &HomodyneSetting<T>) -> T {
    let im = (ra.mu_tilde * Complex::from_polar(T::one(), -h.lambda)).im;
    T::lit(4.0) * sq(b * im)
}

/// Which squeezed-homodyne expression to evaluate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SqueezedHomodyne<T> {
    /// Phase-optimal settings for a bright state.
    Optimal,
    /// Squeezed vacuum (`mu = 0`) at a given local-oscillator phase.
    Vacuum(HomodyneSetting<T>),
}

pub fn cfi_homodyne_squeezed<T: Real>(
    b: T,
    ra: &RotatedAmplitude<T>,
    r: T,
    branch: SqueezedHomodyne<T>,
) -> Result<T> {
    match branch {
        SqueezedHomodyne::Optimal => Ok(cfi_homodyne_squeezed_optimal(b, ra.mu_tilde.norm(), r)),
        SqueezedHomodyne::Vacuum(h) => {
            if ra.mu_tilde.norm_sqr() != T::zero() {
                return Err(Error::Precondition("the vacuum branch needs mu = 0".into()));
            }
            Ok(cfi_homodyne_squeezed_vacuum(b, ra.varphi_tilde, r, &h))
        }
    }
}

/// `4 B^2 |mu|^2 e^{4r}`.
pub fn cfi_homodyne_squeezed_optimal<T: Real>(b: T, mu_abs: T, r: T) -> T {
    T::lit(4.0) * sq(b * mu_abs) * (T::lit(4.0) * r).exp()
}

/// `2 B^2 sinh^2(2r) sin^2(th) / (cosh 2r - sinh 2r cos th)^2`, `th = varphi~ - 2 lambda`.
pub fn cfi_homodyne_squeezed_vacuum<T: Real>(b: T, varphi_tilde: T, r: T, h: &HomodyneSetting<T>) -> T {
    let th = varphi_tilde - T::lit(2.0) * h.lambda;
    let two_r = T::lit(2.0) * r;
    let den = two_r.cosh() - two_r.sinh() * th.cos();
    T::lit(2.0) * sq(b * two_r.sinh() * th.sin() / den)
}

/// Local-oscillator phase with `cos(varphi~ - 2 lambda) = tanh(2r)`, where the
/// vacuum CFI peaks at `2 B^2 sinh^2(2r)`.
pub fn optimal_vacuum_angle<T: Real>(varphi_tilde: T, r: T) -> HomodyneSetting<T> {
    let th = T::lit(2.0) * (-T::lit(2.0) * r).exp().atan();
    HomodyneSetting { lambda: T::lit(0.5) * (varphi_tilde - th) }
}

/// `2 B^2 |mu|^2`.
pub fn cfi_heterodyne_coherent<T: Real>(b: T, mu: Complex<T>) -> T {
    T::lit(2.0) * sq(b) * mu.norm_sqr()
}

/// `2 B^2 [|mu|^2 e^{3r} sech r + 2 sinh^2 r - 2 Re[e^{-i varphi~/2} mu~]^2 sinh 3r sech r]`.
pub fn cfi_heterodyne_squeezed<T: Real>(b: T, ra: &RotatedAmplitude<T>, r: T) -> Result<T> {
    let three_r = T::lit(3.0) * r;
    let x2 = sq(rotated_quadrature(ra.mu_tilde, ra.varphi_tilde));
    let bracket = (ra.mu_tilde.norm_sqr() * three_r.exp() - T::lit(2.0) * x2 * three_r.sinh()) / r.cosh()
        + T::lit(2.0) * sq(r.sinh());
    let v = T::lit(2.0) * sq(b) * bracket;
    if v < T::zero() {
        return Err(Error::Consistency(format!("heterodyne CFI came out negative: {v}")));
    }
    Ok(v)
}
