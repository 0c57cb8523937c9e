//! Disentangling of light and mechanics, and the fractional modulation
//! frequencies that make it periodic.
//!
//! The criterion used throughout is sufficient, not necessary: a vanishing
//! `|K|^2` means "separable by criterion", never that entanglement is proven
//! otherwise.

use num_integer::Integer;
use num_rational::Ratio;

use crate::dynamics::{f_coefficients_modulated, DriveSpec, FCoefficients, LinearFCoefficients};
use crate::error::{domain, Result};
use crate::real::{sq, Real};

/// Relative threshold on `|K|^2` below which the state counts as separable.
pub const SEPARABILITY_TOL: f64 = 1e-12;

/// A coupling frequency `1 + 2 n1 / s` that decouples at every multiple of `s pi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FractionalFrequency {
    s: i64,
    n1: i64,
}

impl FractionalFrequency {
    /// Canonical pair: `s >= 1`, `n1 != 0`, `n1 > -s/2`, `gcd(|n1|, s) = 1`.
    pub fn new(n1: i64, s: i64) -> Result<Self> {
        if s < 1 {
            return Err(domain(format!("s must be >= 1, got {s}")));
        }
        if n1 == 0 {
            return Err(domain("n1 = 0 is the resonant frequency, which never decouples"));
        }
        if 2 * n1 <= -s {
            return Err(domain(format!("n1 = {n1} gives a non-positive frequency for s = {s}")));
        }
        if n1.abs().gcd(&s) != 1 {
            return Err(domain(format!("({n1}, {s}) is not in lowest terms")));
        }
        Ok(Self { s, n1 })
    }

    /// Member of the `1 - 2/s` family favoured for large improvements.
    pub fn lower(s: i64) -> Result<Self> {
        if s < 3 {
            return Err(domain(format!("the 1 - 2/s family needs s >= 3, got {s}")));
        }
        Self::new(-1, s)
    }

    pub fn n1(&self) -> i64 {
        self.n1
    }

    pub fn s(&self) -> i64 {
        self.s
    }

    /// Exact rational frequency.
    pub fn omega_frac(&self) -> Ratio<i64> {
        Ratio::new(self.s + 2 * self.n1, self.s)
    }

    pub fn omega<T: Real>(&self) -> T {
        T::one() + T::lit(2.0 * self.n1 as f64) / T::lit(self.s as f64)
    }

    /// First decoupling time `s pi`.
    pub fn tau_sep<T: Real>(&self) -> T {
        T::lit(self.s as f64) * T::PI()
    }

    /// The `q`-th decoupling time `q s pi`.
    pub fn tau_at<T: Real>(&self, q: u32) -> T {
        T::lit(q as f64) * self.tau_sep::<T>()
    }
}

impl std::fmt::Display for FractionalFrequency {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} (n1 = {}, s = {})", self.omega_frac(), self.n1, self.s)
    }
}

/// `|K|^2 = F_{NaB-}^2 + F_{NaB+}^2`.
pub fn k_na_squared<T: Real>(f: &FCoefficients<T>) -> T {
    sq(f.f_nabm) + sq(f.f_nabp)
}

pub fn k_na_squared_linear<T: Real>(f: &LinearFCoefficients<T>) -> T {
    sq(f.f_nabm) + sq(f.f_nabp)
}

/// Threshold `1e-12 max(k0^2, 1)` scaled to the coupling amplitude.
pub fn separability_threshold<T: Real>(k0: T) -> T {
    T::lit(SEPARABILITY_TOL) * sq(k0).max(T::one())
}

pub fn is_separable<T: Real>(f: &FCoefficients<T>, k0: T) -> bool {
    k_na_squared(f) < separability_threshold(k0)
}

pub fn is_separable_value<T: Real>(k_sq: T, k0: T) -> bool {
    k_sq < separability_threshold(k0)
}

/// All canonical fractional frequencies with `1 <= s <= s_max` and
/// `|n1| <= s_max`, sorted by `(s, n1)`.
pub fn fractional_frequencies(s_max: i64) -> Result<Vec<FractionalFrequency>> {
    if s_max < 3 {
        return Err(domain(format!("s_max must be >= 3, got {s_max}")));
    }
    let mut out = Vec::new();
    for s in 1..=s_max {
        for n1 in -s_max..=s_max {
            if let Ok(ff) = FractionalFrequency::new(n1, s) {
                out.push(ff);
            }
        }
    }
    Ok(out)
}

/// Checks that coupling at `ff` with zero phase decouples at `tau = q s pi`.
pub fn verify_decoupling<T: Real>(ff: &FractionalFrequency, k0: T, q: u32) -> Result<bool> {
    verify_decoupling_with_phase(ff, k0, T::zero(), q)
}

pub fn verify_decoupling_with_phase<T: Real>(
    ff: &FractionalFrequency,
    k0: T,
    phi_k: T,
    q: u32,
) -> Result<bool> {
    if q == 0 {
        return Err(domain("q must be >= 1"));
    }
    let lin = f_coefficients_modulated(k0, ff.omega::<T>(), phi_k, &DriveSpec::none(), ff.tau_at(q))?;
    Ok(is_separable_value(k_na_squared_linear(&lin), k0))
}
