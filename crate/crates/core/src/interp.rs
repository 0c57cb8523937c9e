//! Shape-preserving piecewise cubic Hermite interpolation (PCHIP).

use crate::error::{domain, Result};
use crate::real::Real;

/// Monotone cubic interpolant through `(x, y)` samples.
///
/// Does not overshoot between samples, so a sampled coupling stays within
/// the envelope of the data.
#[derive(Debug, Clone, PartialEq)]
pub struct Pchip<T> {
    x: Vec<T>,
    y: Vec<T>,
    d: Vec<T>,
}

impl<T: Real> Pchip<T> {
    pub fn new(x: Vec<T>, y: Vec<T>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(domain("sample abscissae and values differ in length"));
        }
        if x.len() < 2 {
            return Err(domain("at least two samples are required"));
        }
        if x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(domain("samples must be finite"));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(domain("sample abscissae must be strictly increasing"));
        }
        let d = slopes(&x, &y);
        Ok(Self { x, y, d })
    }

    pub fn domain(&self) -> (T, T) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    pub fn samples(&self) -> (&[T], &[T]) {
        (&self.x, &self.y)
    }

    /// Largest absolute sample value.
    pub fn max_abs(&self) -> T {
        self.y.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// Evaluates the interpolant; outside the sample range the end value is held.
    pub fn eval(&self, t: T) -> T {
        let n = self.x.len();
        if t <= self.x[0] {
            return self.y[0];
        }
        if t >= self.x[n - 1] {
            return self.y[n - 1];
        }
        let i = match self.x.binary_search_by(|v| v.partial_cmp(&t).unwrap()) {
            Ok(i) => return self.y[i],
            Err(i) => i - 1,
        };
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        let h00 = two * s3 - three * s2 + T::one();
        let h10 = s3 - two * s2 + s;
        let h01 = three * s2 - two * s3;
        let h11 = s3 - s2;
        h00 * self.y[i] + h10 * h * self.d[i] + h01 * self.y[i + 1] + h11 * h * self.d[i + 1]
    }
}

fn same_sign<T: Real>(a: T, b: T) -> bool {
    (a > T::zero() && b > T::zero()) || (a < T::zero() && b < T::zero())
}

fn slopes<T: Real>(x: &[T], y: &[T]) -> Vec<T> {
    let n = x.len();
    let h: Vec<T> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let del: Vec<T> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
    if n == 2 {
        return vec![del[0], del[0]];
    }
    let two = T::lit(2.0);
    let mut d = vec![T::zero(); n];
    for k in 1..n - 1 {
        if same_sign(del[k - 1], del[k]) {
            let w1 = two * h[k] + h[k - 1];
            let w2 = h[k] + two * h[k - 1];
            d[k] = (w1 + w2) / (w1 / del[k - 1] + w2 / del[k]);
        }
    }
    d[0] = end_slope(h[0], h[1], del[0], del[1]);
    d[n - 1] = end_slope(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
    d
}

fn end_slope<T: Real>(h0: T, h1: T, m0: T, m1: T) -> T {
    let d = ((T::lit(2.0) * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
    if !same_sign(d, m0) {
        T::zero()
    } else if !same_sign(m0, m1) && d.abs() > T::lit(3.0) * m0.abs() {
        T::lit(3.0) * m0
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reproduces_samples_and_linear_data() {
        let x = vec![0.0, 0.5, 1.5, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v - 1.0).collect();
        let p = Pchip::new(x.clone(), y.clone()).unwrap();
        for (a, b) in x.iter().zip(&y) {
            assert_eq!(p.eval(*a), *b);
        }
        assert!((p.eval(2.2) - 3.4).abs() < 1e-14);
    }

    #[test]
    fn holds_end_values_outside_range() {
        let p = Pchip::new(vec![0.0, 1.0], vec![3.0, 5.0]).unwrap();
        assert_eq!(p.eval(-1.0), 3.0);
        assert_eq!(p.eval(7.0), 5.0);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(Pchip::new(vec![0.0, 0.0], vec![1.0, 2.0]).is_err());
        assert!(Pchip::new(vec![0.0], vec![1.0]).is_err());
        assert!(Pchip::new(vec![0.0, 1.0], vec![1.0]).is_err());
        assert!(Pchip::new(vec![0.0, f64::NAN], vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn step_data_does_not_overshoot() {
        let x: Vec<f64> = (0..6).map(f64::from).collect();
        let y = vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0];
        let p = Pchip::new(x, y).unwrap();
        for i in 0..=500 {
            let v = p.eval(i as f64 / 100.0);
            assert!((-1e-15..=1.0 + 1e-15).contains(&v));
        }
    }

    proptest! {
        #[test]
        fn monotone_data_gives_monotone_interpolant(
            steps in prop::collection::vec((0.01f64..2.0, 0.0f64..3.0), 3..12)
        ) {
            let mut x = vec![0.0];
            let mut y = vec![0.0];
            for (dx, dy) in &steps {
                x.push(x.last().unwrap() + dx);
                y.push(y.last().unwrap() + dy);
            }
            let end = *x.last().unwrap();
            let p = Pchip::new(x, y).unwrap();
            let mut prev = p.eval(0.0);
            for i in 1..=400 {
                let v = p.eval(end * i as f64 / 400.0);
                prop_assert!(v >= prev - 1e-12);
                prev = v;
            }
        }
    }
}
