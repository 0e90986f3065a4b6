//! 2×2 real symmetric spectral toolkit.
//!
//! The objective `F = |f|²/2` lives on the plane, so every Hessian is a
//! [`Sym2`]. The eigenvalue-reflection solve used by the quasi-Newton
//! methods reduces to closed-form arithmetic on two eigenpairs.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Real 2-vector.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec2<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> Vec2<T> {
    #[inline]
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero())
    }

    #[inline]
    pub fn dot(self, other: Self) -> T {
        self.x * other.x + self.y * other.y
    }

    #[inline]
    pub fn norm(self) -> T {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    #[inline]
    pub fn to_complex(self) -> Complex<T> {
        Complex::new(self.x, self.y)
    }

    #[inline]
    pub fn from_complex(z: Complex<T>) -> Self {
        Self::new(z.re, z.im)
    }
}

impl<T: Real> Add for Vec2<T> {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl<T: Real> Sub for Vec2<T> {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl<T: Real> Mul<T> for Vec2<T> {
    type Output = Self;
    #[inline]
    fn mul(self, s: T) -> Self {
        Self::new(self.x * s, self.y * s)
    }
}

impl<T: Real> Neg for Vec2<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

/// Real symmetric 2×2 matrix `[[a11, a12], [a12, a22]]`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Sym2<T> {
    pub a11: T,
    pub a12: T,
    pub a22: T,
}

impl<T: Real> Sym2<T> {
    #[inline]
    pub fn new(a11: T, a12: T, a22: T) -> Self {
        Self { a11, a12, a22 }
    }

    #[inline]
    pub fn identity() -> Self {
        Self::new(T::one(), T::zero(), T::one())
    }

    #[inline]
    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    #[inline]
    pub fn diag(a: T, b: T) -> Self {
        Self::new(a, T::zero(), b)
    }

    /// `self + s·Id`
    #[inline]
    pub fn shifted(self, s: T) -> Self {
        Self::new(self.a11 + s, self.a12, self.a22 + s)
    }

    #[inline]
    pub fn det(self) -> T {
        self.a11 * self.a22 - self.a12 * self.a12
    }

    #[inline]
    pub fn trace(self) -> T {
        self.a11 + self.a22
    }

    #[inline]
    pub fn mul_vec(self, v: Vec2<T>) -> Vec2<T> {
        Vec2::new(
            self.a11 * v.x + self.a12 * v.y,
            self.a12 * v.x + self.a22 * v.y,
        )
    }

    /// Largest absolute entry; a cheap matrix scale.
    #[inline]
    pub fn max_abs(self) -> T {
        self.a11.abs().max(self.a12.abs()).max(self.a22.abs())
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.a11.is_finite() && self.a12.is_finite() && self.a22.is_finite()
    }

    /// Direct solve of `self · x = b` by Cramer's rule.
    pub fn solve(self, b: Vec2<T>) -> Result<Vec2<T>> {
        let det = self.det();
        if !(det.abs() >= T::SINGULAR_FLOOR) {
            return Err(Error::Singular);
        }
        Ok(Vec2::new(
            (self.a22 * b.x - self.a12 * b.y) / det,
            (self.a11 * b.y - self.a12 * b.x) / det,
        ))
    }
}

/// Spectral decomposition with `lambda1 >= lambda2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Eigen2<T> {
    pub lambda1: T,
    pub lambda2: T,
    pub e1: Vec2<T>,
    pub e2: Vec2<T>,
}

/// Closed-form eigendecomposition of a symmetric 2×2 matrix.
///
/// The larger-magnitude eigenvalue comes from `mean ± radius` and the other
/// from `det / big`, which keeps the small one accurate when the spectrum is
/// badly scaled. Near-diagonal input (`|a12| <= 1e-30·(|a11|+|a22|)`) and
/// exact ties return axis-aligned eigenvectors.
pub fn eigen_sym2<T: Real>(a: Sym2<T>) -> Eigen2<T> {
    let half = T::lit(0.5);
    let diagonal_cut = T::lit(1e-30) * (a.a11.abs() + a.a22.abs());
    if a.a12.abs() <= diagonal_cut {
        let (x, y) = (
            Vec2::new(T::one(), T::zero()),
            Vec2::new(T::zero(), T::one()),
        );
        return if a.a11 >= a.a22 {
            Eigen2 {
                lambda1: a.a11,
                lambda2: a.a22,
                e1: x,
                e2: y,
            }
        } else {
            Eigen2 {
                lambda1: a.a22,
                lambda2: a.a11,
                e1: y,
                e2: x,
            }
        };
    }

    let mean = (a.a11 + a.a22) * half;
    let gap = (a.a11 - a.a22) * half;
    let radius = gap.hypot(a.a12);
    let (lambda1, lambda2) = if mean >= T::zero() {
        let big = mean + radius;
        (big, a.det() / big)
    } else {
        let big = mean - radius;
        (a.det() / big, big)
    };
    // Eigenvector of lambda1 = mean + radius, built from the row that avoids cancellation.
    let v = if gap >= T::zero() {
        Vec2::new(gap + radius, a.a12)
    } else {
        Vec2::new(a.a12, radius - gap)
    };
    let e1 = v * (T::one() / v.norm());
    let e2 = Vec2::new(e1.y, -e1.x);
    Eigen2 {
        lambda1,
        lambda2,
        e1,
        e2,
    }
}

/// Spectral radius: `max |λ|`.
pub fn sp<T: Real>(a: Sym2<T>) -> T {
    let e = eigen_sym2(a);
    e.lambda1.abs().max(e.lambda2.abs())
}

/// Smallest eigenvalue magnitude: `min |λ|`; zero exactly when `a` is singular.
pub fn minsp<T: Real>(a: Sym2<T>) -> T {
    let e = eigen_sym2(a);
    e.lambda1.abs().min(e.lambda2.abs())
}

/// Solves with the eigenvalues of `a` replaced by their absolute values.
///
/// Returns `pr₊(A⁻¹g) − pr₋(A⁻¹g)`, i.e. `B⁻¹g` where `B` shares the
/// eigenvectors of `a` and has eigenvalues `|λᵢ|`. `B` is positive definite,
/// so the result is always a descent direction for `g`.
pub fn reflect_abs_solve<T: Real>(a: Sym2<T>, g: Vec2<T>) -> Result<Vec2<T>> {
    let eig = eigen_sym2(a);
    let (l1, l2) = (eig.lambda1.abs(), eig.lambda2.abs());
    if !(l1.min(l2) > T::zero()) {
        return Err(Error::Singular);
    }
    let w = eig.e1 * (eig.e1.dot(g) / l1) + eig.e2 * (eig.e2.dot(g) / l2);
    if !w.is_finite() {
        return Err(Error::Singular);
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn eigen_of_diagonal() {
        let e = eigen_sym2(Sym2::diag(3.0, -2.0));
        assert_eq!((e.lambda1, e.lambda2), (3.0, -2.0));
        assert_eq!(e.e1, Vec2::new(1.0, 0.0));
        assert_eq!(e.e2, Vec2::new(0.0, 1.0));

        let e = eigen_sym2(Sym2::diag(6.0, 2.0));
        assert_eq!((e.lambda1, e.lambda2), (6.0, 2.0));

        let e = eigen_sym2(Sym2::diag(-2.0, 3.0));
        assert_eq!((e.lambda1, e.lambda2), (3.0, -2.0));
        assert_eq!(e.e1, Vec2::new(0.0, 1.0));
    }

    #[test]
    fn eigen_of_offdiagonal() {
        let e = eigen_sym2(Sym2::new(0.0, 2.0, 0.0));
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!(close(e.lambda1, 2.0, 1e-15) && close(e.lambda2, -2.0, 1e-15));
        assert!(close(e.e1.x, s, 1e-15) && close(e.e1.y, s, 1e-15));
        assert!(close(e.e2.x, s, 1e-15) && close(e.e2.y, -s, 1e-15));
    }

    #[test]
    fn ties_are_axis_aligned() {
        let e = eigen_sym2(Sym2::diag(4.0, 4.0));
        assert_eq!(e.e1, Vec2::new(1.0, 0.0));
        assert_eq!(e.e2, Vec2::new(0.0, 1.0));
    }

    #[test]
    fn spectral_radius_and_min() {
        assert_eq!(sp(Sym2::diag(3.0, -2.0)), 3.0);
        assert_eq!(minsp(Sym2::diag(3.0, -2.0)), 2.0);
        assert_eq!(sp(Sym2::<f64>::identity()), 1.0);
        assert_eq!(minsp(Sym2::<f64>::identity()), 1.0);
        assert_eq!(minsp(Sym2::diag(1.0, 0.0)), 0.0);
    }

    #[test]
    fn reflect_examples() {
        let w = reflect_abs_solve(Sym2::diag(2.0, 1.0), Vec2::new(2.0, 1.0)).unwrap();
        assert!(close(w.x, 1.0, 1e-15) && close(w.y, 1.0, 1e-15));

        let a = Sym2::new(0.0, 2.0, 0.0);
        let w = reflect_abs_solve(a, Vec2::new(2.0, 0.0)).unwrap();
        assert!(close(w.x, 1.0, 1e-15) && close(w.y, 0.0, 1e-15), "{w:?}");
        // |A| for this matrix is 2·Id.
        let direct = Sym2::diag(2.0, 2.0).solve(Vec2::new(2.0, 0.0)).unwrap();
        assert!(close(w.x, direct.x, 1e-15) && close(w.y, direct.y, 1e-15));

        let w = reflect_abs_solve(Sym2::diag(-1.0, -1.0), Vec2::new(5.0, -3.0)).unwrap();
        assert!(close(w.x, 5.0, 1e-15) && close(w.y, -3.0, 1e-15));
    }

    #[test]
    fn reflect_rejects_singular() {
        assert!(reflect_abs_solve(Sym2::diag(1.0, 0.0), Vec2::new(1.0, 1.0)).is_err());
        assert!(Sym2::<f64>::zero().solve(Vec2::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn works_in_single_precision() {
        let e = eigen_sym2(Sym2::<f32>::new(0.0, 2.0, 0.0));
        assert!((e.lambda1 - 2.0).abs() < 1e-6 && (e.lambda2 + 2.0).abs() < 1e-6);
        let w = reflect_abs_solve(Sym2::<f32>::diag(-1.0, -1.0), Vec2::new(5.0, -3.0)).unwrap();
        assert_eq!(w, Vec2::new(5.0, -3.0));
    }

    fn entry() -> impl Strategy<Value = f64> {
        -100.0..100.0f64
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn eigenpairs_are_orthonormal(a in entry(), b in entry(), d in entry()) {
            let m = Sym2::new(a, b, d);
            let e = eigen_sym2(m);
            prop_assert!(e.lambda1 >= e.lambda2);
            prop_assert!((e.e1.norm() - 1.0).abs() <= 1e-12);
            prop_assert!((e.e2.norm() - 1.0).abs() <= 1e-12);
            prop_assert!(e.e1.dot(e.e2).abs() <= 1e-12);
            let scale = 1e-10 * (1.0 + sp(m));
            for (l, v) in [(e.lambda1, e.e1), (e.lambda2, e.e2)] {
                let r = m.mul_vec(v) - v * l;
                prop_assert!(r.norm() <= scale, "residual {:?}", r);
            }
            prop_assert_eq!(sp(m), e.lambda1.abs().max(e.lambda2.abs()));
            prop_assert_eq!(minsp(m), e.lambda1.abs().min(e.lambda2.abs()));
        }

        #[test]
        fn reflection_preserves_norm_and_descends(
            a in entry(), b in entry(), d in entry(), gx in entry(), gy in entry()
        ) {
            let m = Sym2::new(a, b, d);
            prop_assume!(minsp(m) > 1e-6 * (1.0 + sp(m)));
            let g = Vec2::new(gx, gy);
            prop_assume!(g.norm() > 1e-9);
            let w = reflect_abs_solve(m, g).unwrap();
            let v = m.solve(g).unwrap();
            prop_assert!((w.norm() - v.norm()).abs() <= 1e-10 * v.norm());
            prop_assert!(w.dot(g) > 0.0);
        }

        #[test]
        fn positive_definite_reflection_is_plain_solve(
            a in 0.1..50.0f64, b in -10.0..10.0f64, d in 0.1..50.0f64, gx in entry(), gy in entry()
        ) {
            let m = Sym2::new(a, b, d);
            prop_assume!(m.det() > 1e-3);
            let g = Vec2::new(gx, gy);
            let w = reflect_abs_solve(m, g).unwrap();
            let v = m.solve(g).unwrap();
            prop_assert!((w - v).norm() <= 1e-10 * (1.0 + v.norm()));
        }
    }
}
