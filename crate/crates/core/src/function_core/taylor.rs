//! Truncated Taylor series in one complex variable, up to third order.
//!
//! Coefficient `k` stores `f⁽ᵏ⁾(z)/k!`. Products, quotients and the
//! elementary functions below are exact up to round-off, which is what
//! lets the quotient `f/f′` expose an analytic second derivative.

use num_complex::Complex;

use crate::scalar::Real;

pub(crate) const MAX_ORDER: usize = 3;

#[derive(Clone, Copy, Debug)]
pub(crate) struct Taylor<T> {
    pub c: [Complex<T>; MAX_ORDER + 1],
    pub order: usize,
}

impl<T: Real> Taylor<T> {
    pub fn zero(order: usize) -> Self {
        debug_assert!(order <= MAX_ORDER);
        Self {
            c: [Complex::new(T::zero(), T::zero()); MAX_ORDER + 1],
            order,
        }
    }

    pub fn constant(v: Complex<T>, order: usize) -> Self {
        let mut t = Self::zero(order);
        t.c[0] = v;
        t
    }

    /// `(z0 + t − a)^n` expanded around `z0`.
    pub fn linear_power(w: Complex<T>, n: u32, order: usize) -> Self {
        let mut t = Self::zero(order);
        let mut binom = T::one();
        for k in 0..=order.min(n as usize) {
            t.c[k] = w.powu(n - k as u32) * binom;
            binom = binom * T::lit((n as usize - k) as f64) / T::lit((k + 1) as f64);
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order.min(other.order);
        let mut t = Self::zero(order);
        for k in 0..=order {
            let mut acc = Complex::new(T::zero(), T::zero());
            for i in 0..=k {
                acc = acc + self.c[i] * other.c[k - i];
            }
            t.c[k] = acc;
        }
        t
    }

    /// Series quotient; `None` when the divisor vanishes at the expansion point.
    pub fn div(&self, other: &Self) -> Option<Self> {
        let b0 = other.c[0];
        if !(b0.norm() >= T::SINGULAR_FLOOR) {
            return None;
        }
        let order = self.order.min(other.order);
        let mut q = Self::zero(order);
        for k in 0..=order {
            let mut acc = self.c[k];
            for i in 1..=k {
                acc = acc - other.c[i] * q.c[k - i];
            }
            q.c[k] = acc / b0;
        }
        Some(q)
    }

    /// Series of the derivative; loses one order.
    pub fn derivative(&self) -> Self {
        debug_assert!(self.order >= 1);
        let mut d = Self::zero(self.order - 1);
        for k in 0..self.order {
            d.c[k] = self.c[k + 1] * T::lit((k + 1) as f64);
        }
        d
    }

    /// Series of `exp(z)` around `z0`.
    pub fn exp_at(z0: Complex<T>, order: usize) -> Self {
        let e = z0.exp();
        let mut t = Self::zero(order);
        let mut fact = T::one();
        for k in 0..=order {
            t.c[k] = e / fact;
            fact = fact * T::lit((k + 1) as f64);
        }
        t
    }

    /// Builds a series from derivative values `f⁽ᵏ⁾(z0)`.
    pub fn from_derivatives(d: &[Complex<T>], order: usize) -> Self {
        let mut t = Self::zero(order);
        let mut fact = T::one();
        for (k, (slot, dk)) in t.c.iter_mut().zip(d).take(order + 1).enumerate() {
            *slot = *dk / fact;
            fact = fact * T::lit((k + 1) as f64);
        }
        t
    }

    /// `f⁽ᵏ⁾(z0)`.
    pub fn derivative_value(&self, k: usize) -> Complex<T> {
        let mut fact = T::one();
        for i in 2..=k {
            fact = fact * T::lit(i as f64);
        }
        self.c[k] * fact
    }

    /// All coefficients finite and below the overflow limit.
    pub fn is_tame(&self) -> bool {
        self.c[..=self.order]
            .iter()
            .all(|v| v.re.is_finite() && v.im.is_finite() && v.norm() <= T::OVERFLOW_LIMIT)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type C = Complex<f64>;

    #[test]
    fn power_series_of_cube() {
        // (2 + t)^3 = 8 + 12t + 6t² + t³
        let t = Taylor::linear_power(C::new(2.0, 0.0), 3, 3);
        let want = [8.0, 12.0, 6.0, 1.0];
        for (got, w) in t.c.iter().zip(want) {
            assert_eq!(*got, C::new(w, 0.0));
        }
        // (2 + t)^1 truncates beyond the linear term
        let t = Taylor::linear_power(C::new(2.0, 0.0), 1, 3);
        assert_eq!(t.c[2], C::new(0.0, 0.0));
    }

    #[test]
    fn quotient_inverts_product() {
        let a = Taylor::linear_power(C::new(1.5, -0.5), 3, 3);
        let b = Taylor::exp_at(C::new(0.3, 0.2), 3);
        let q = a.mul(&b).div(&b).unwrap();
        for k in 0..4 {
            assert!((q.c[k] - a.c[k]).norm() < 1e-13);
        }
    }

    #[test]
    fn division_by_vanishing_series_fails() {
        let a = Taylor::constant(C::new(1.0, 0.0), 2);
        let b = Taylor::linear_power(C::new(0.0, 0.0), 1, 2);
        assert!(a.div(&b).is_none());
    }
}
