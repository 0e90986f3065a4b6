//! Function catalog and exact 2-jet evaluation.
//!
//! A [`FunctionExpr`] is evaluated as a truncated Taylor series, so `f`,
//! `f′`, `f″` (and the extra order the Newton quotient needs) all come out
//! of a single pass without finite differences.

mod catalog;
mod taylor;

pub use catalog::{catalog_ids, catalog_lookup, f23_listed_roots, f23_roots};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg2::{Sym2, Vec2};
use crate::scalar::Real;
use taylor::{Taylor, MAX_ORDER};

/// A point of the complex plane.
pub type ComplexValue<T> = Complex<T>;

/// Root location with its multiplicity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RootSpec<T> {
    pub location: Complex<T>,
    pub multiplicity: u32,
}

impl<T: Real> RootSpec<T> {
    pub fn new(location: Complex<T>, multiplicity: u32) -> Self {
        Self {
            location,
            multiplicity,
        }
    }

    pub fn simple(re: f64, im: f64) -> Self {
        Self::new(Complex::new(T::lit(re), T::lit(im)), 1)
    }
}

/// Monic polynomial `Π (z − zᵢ)^{nᵢ}` kept in factored form.
///
/// The declared order drives colouring; evaluation walks a canonically
/// sorted copy so that reordering roots never changes a computed value.
#[derive(Clone, Debug, PartialEq)]
pub struct RootPoly<T> {
    roots: Vec<RootSpec<T>>,
    canonical: Vec<RootSpec<T>>,
    coeffs: Vec<Complex<T>>,
}

impl<T: Real> RootPoly<T> {
    pub fn roots(&self) -> &[RootSpec<T>] {
        &self.roots
    }

    /// Monic coefficients, ascending degree.
    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }
}

/// Symbolic description of one of the supported function shapes.
#[derive(Clone, Debug, PartialEq)]
pub enum FunctionExpr<T> {
    PolyFromRoots(RootPoly<T>),
    /// Coefficients in ascending degree.
    PolyCoeffs(Vec<Complex<T>>),
    /// `z² + cos z + 2 sin z − 1 − 0.5i`
    TranscendentalF23,
    /// `f(z)·eᶻ`
    TimesExp(Box<FunctionExpr<T>>),
    /// `f(z)/f′(z)`
    NewtonQuotient(Box<FunctionExpr<T>>),
}

pub const MAX_DEGREE: u32 = 64;

impl<T: Real> FunctionExpr<T> {
    pub fn from_roots(roots: Vec<RootSpec<T>>) -> Result<Self> {
        if roots.is_empty() {
            return Err(Error::config("root list is empty"));
        }
        if let Some(r) = roots.iter().find(|r| r.multiplicity == 0) {
            return Err(Error::config(format!(
                "root {} has multiplicity 0",
                r.location
            )));
        }
        if roots
            .iter()
            .any(|r| !(r.location.re.is_finite() && r.location.im.is_finite()))
        {
            return Err(Error::config("root location is not finite"));
        }
        let degree: u32 = roots.iter().map(|r| r.multiplicity).sum();
        if degree > MAX_DEGREE {
            return Err(Error::config(format!(
                "degree {degree} exceeds {MAX_DEGREE}"
            )));
        }
        let mut canonical = roots.clone();
        canonical.sort_by(|a, b| {
            a.location
                .re
                .partial_cmp(&b.location.re)
                .unwrap()
                .then(a.location.im.partial_cmp(&b.location.im).unwrap())
                .then(a.multiplicity.cmp(&b.multiplicity))
        });
        let coeffs = expand_roots_to_coeffs(&canonical);
        Ok(FunctionExpr::PolyFromRoots(RootPoly {
            roots,
            canonical,
            coeffs,
        }))
    }

    pub fn from_coeffs(coeffs: Vec<Complex<T>>) -> Result<Self> {
        match coeffs.last() {
            None => Err(Error::config("coefficient list is empty")),
            Some(c) if *c == Complex::new(T::zero(), T::zero()) => {
                Err(Error::config("leading coefficient is zero"))
            }
            Some(_) => Ok(FunctionExpr::PolyCoeffs(coeffs)),
        }
    }

    pub fn times_exp(inner: Self) -> Self {
        FunctionExpr::TimesExp(Box::new(inner))
    }

    /// `f/f′`. Only a single quotient is allowed anywhere in the expression.
    pub fn newton_quotient(inner: Self) -> Result<Self> {
        if inner.contains_quotient() {
            return Err(Error::config("f/f' may only be applied once"));
        }
        Ok(FunctionExpr::NewtonQuotient(Box::new(inner)))
    }

    fn contains_quotient(&self) -> bool {
        match self {
            FunctionExpr::NewtonQuotient(_) => true,
            FunctionExpr::TimesExp(inner) => inner.contains_quotient(),
            _ => false,
        }
    }

    /// Polynomial coefficients (ascending), when the expression is a polynomial.
    pub fn poly_coeffs(&self) -> Option<&[Complex<T>]> {
        match self {
            FunctionExpr::PolyFromRoots(p) => Some(p.coeffs()),
            FunctionExpr::PolyCoeffs(c) => Some(c),
            _ => None,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            FunctionExpr::PolyFromRoots(_) => "root-list polynomial",
            FunctionExpr::PolyCoeffs(_) => "coefficient polynomial",
            FunctionExpr::TranscendentalF23 => "f23",
            FunctionExpr::TimesExp(_) => "f·exp(z)",
            FunctionExpr::NewtonQuotient(_) => "f/f'",
        }
    }
}

/// `Π (z − zᵢ)^{nᵢ}` as monic coefficients in ascending degree.
pub fn expand_roots_to_coeffs<T: Real>(roots: &[RootSpec<T>]) -> Vec<Complex<T>> {
    let mut coeffs = vec![Complex::new(T::one(), T::zero())];
    for r in roots {
        for _ in 0..r.multiplicity {
            // multiply by (z − a)
            let mut next = vec![Complex::new(T::zero(), T::zero()); coeffs.len() + 1];
            for (k, c) in coeffs.iter().enumerate() {
                next[k + 1] = next[k + 1] + *c;
                next[k] = next[k] - *c * r.location;
            }
            coeffs = next;
        }
    }
    coeffs
}

/// Why a jet could not be evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JetError {
    /// The expression has a pole at the point (e.g. `f′ = 0` under `f/f′`).
    Pole,
    /// An intermediate value left the representable range.
    Overflow,
}

/// `(f(z), f′(z), f″(z))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet2<T> {
    pub f: Complex<T>,
    pub df: Complex<T>,
    pub d2f: Complex<T>,
}

fn eval_taylor<T: Real>(
    expr: &FunctionExpr<T>,
    z: Complex<T>,
    order: usize,
) -> std::result::Result<Taylor<T>, JetError> {
    if order > MAX_ORDER {
        return Err(JetError::Overflow);
    }
    let series = match expr {
        FunctionExpr::PolyFromRoots(p) => {
            let mut acc = Taylor::constant(Complex::new(T::one(), T::zero()), order);
            for r in &p.canonical {
                acc = acc.mul(&Taylor::linear_power(z - r.location, r.multiplicity, order));
            }
            acc
        }
        FunctionExpr::PolyCoeffs(c) => horner_taylor(c, z, order),
        FunctionExpr::TranscendentalF23 => {
            let (s, c) = (z.sin(), z.cos());
            let one = Complex::new(T::one(), T::zero());
            let two = T::lit(2.0);
            let d = [
                z * z + c + s * two - Complex::new(T::one(), T::lit(0.5)),
                z * two - s + c * two,
                one * two - c - s * two,
                s - c * two,
            ];
            Taylor::from_derivatives(&d, order)
        }
        FunctionExpr::TimesExp(inner) => {
            let f = eval_taylor(inner, z, order)?;
            let e = Taylor::exp_at(z, order);
            if !e.is_tame() {
                return Err(JetError::Overflow);
            }
            f.mul(&e)
        }
        FunctionExpr::NewtonQuotient(inner) => {
            let f = eval_taylor(inner, z, order + 1)?;
            let df = f.derivative();
            let mut f_trunc = f;
            f_trunc.order = order;
            f_trunc.div(&df).ok_or(JetError::Pole)?
        }
    };
    if series.is_tame() {
        Ok(series)
    } else {
        Err(JetError::Overflow)
    }
}

/// Taylor coefficients of a coefficient polynomial by repeated synthetic division.
fn horner_taylor<T: Real>(coeffs: &[Complex<T>], z: Complex<T>, order: usize) -> Taylor<T> {
    let mut out = Taylor::zero(order);
    let mut work: Vec<Complex<T>> = coeffs.to_vec();
    for k in 0..=order {
        if work.is_empty() {
            break;
        }
        let n = work.len();
        let mut acc = work[n - 1];
        for i in (0..n - 1).rev() {
            let next = work[i] + acc * z;
            work[i + 1] = acc;
            acc = next;
        }
        out.c[k] = acc;
        work.remove(0);
    }
    out
}

/// Evaluates `(f, f′, f″)` at `z`.
pub fn eval_jet<T: Real>(
    expr: &FunctionExpr<T>,
    z: Complex<T>,
) -> std::result::Result<Jet2<T>, JetError> {
    let t = eval_taylor(expr, z, 2)?;
    Ok(Jet2 {
        f: t.c[0],
        df: t.c[1],
        d2f: t.derivative_value(2),
    })
}

/// Evaluates `f(z)` alone.
pub fn eval_value<T: Real>(
    expr: &FunctionExpr<T>,
    z: Complex<T>,
) -> std::result::Result<Complex<T>, JetError> {
    Ok(eval_taylor(expr, z, 0)?.c[0])
}

/// Evaluates `(f, f′)`.
pub fn eval_jet1<T: Real>(
    expr: &FunctionExpr<T>,
    z: Complex<T>,
) -> std::result::Result<(Complex<T>, Complex<T>), JetError> {
    let t = eval_taylor(expr, z, 1)?;
    Ok((t.c[0], t.c[1]))
}

/// `F = |f|²/2` with its gradient and Hessian in the `(x, y)` plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ObjectiveJet<T> {
    pub value: T,
    pub gradient: Vec2<T>,
    pub hessian: Sym2<T>,
}

impl<T: Real> ObjectiveJet<T> {
    pub fn from_jet(j: &Jet2<T>) -> Self {
        let half = T::lit(0.5);
        let value = j.f.norm_sqr() * half;
        let g = j.df.conj() * j.f;
        let d2 = j.d2f * j.f.conj();
        let df2 = j.df.norm_sqr();
        ObjectiveJet {
            value,
            gradient: Vec2::new(g.re, g.im),
            hessian: Sym2::new(df2 + d2.re, -d2.im, df2 - d2.re),
        }
    }

    /// `‖∇F‖ <= tol·F`, i.e. `2|f′/f| <= tol`: the gradient is negligible at
    /// the scale of the objective. True at exact roots and exact critical points.
    pub fn gradient_vanishes(&self, tol: T) -> bool {
        self.gradient.norm() <= tol * self.value
    }
}

pub fn objective_jet<T: Real>(
    expr: &FunctionExpr<T>,
    z: Complex<T>,
) -> std::result::Result<ObjectiveJet<T>, JetError> {
    eval_jet(expr, z).map(|j| ObjectiveJet::from_jet(&j))
}

pub fn objective_value<T: Real>(
    expr: &FunctionExpr<T>,
    z: Complex<T>,
) -> std::result::Result<T, JetError> {
    eval_value(expr, z).map(|f| f.norm_sqr() * T::lit(0.5))
}

/// Newton iteration until the step stalls at round-off level.
///
/// Returns the polished point and the number of steps taken.
pub fn polish_root<T: Real>(
    expr: &FunctionExpr<T>,
    z0: Complex<T>,
    max_steps: usize,
) -> std::result::Result<(Complex<T>, usize), JetError> {
    let mut z = z0;
    for step in 1..=max_steps {
        let (f, df) = eval_jet1(expr, z)?;
        if !(df.norm() >= T::SINGULAR_FLOOR) {
            return Err(JetError::Pole);
        }
        let delta = f / df;
        z = z - delta;
        if delta.norm() <= T::lit(4.0) * T::epsilon() * (T::one() + z.norm()) {
            return Ok((z, step));
        }
    }
    Ok((z, max_steps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type C = Complex<f64>;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn poly(coeffs: &[(f64, f64)]) -> FunctionExpr<f64> {
        FunctionExpr::from_coeffs(coeffs.iter().map(|&(a, b)| c(a, b)).collect()).unwrap()
    }

    fn objective_fd(expr: &FunctionExpr<f64>, z: C, h: f64) -> (Vec2<f64>, Sym2<f64>) {
        let f = |x: f64, y: f64| objective_value(expr, c(x, y)).unwrap();
        let (x, y) = (z.re, z.im);
        let gx = (f(x + h, y) - f(x - h, y)) / (2.0 * h);
        let gy = (f(x, y + h) - f(x, y - h)) / (2.0 * h);
        let f0 = f(x, y);
        let hxx = (f(x + h, y) - 2.0 * f0 + f(x - h, y)) / (h * h);
        let hyy = (f(x, y + h) - 2.0 * f0 + f(x, y - h)) / (h * h);
        let hxy =
            (f(x + h, y + h) - f(x + h, y - h) - f(x - h, y + h) + f(x - h, y - h)) / (4.0 * h * h);
        (Vec2::new(gx, gy), Sym2::new(hxx, hxy, hyy))
    }

    #[test]
    fn expand_examples() {
        let r0 = [RootSpec::<f64>::simple(0.0, 0.0)];
        assert_eq!(expand_roots_to_coeffs(&r0), vec![c(0.0, 0.0), c(1.0, 0.0)]);

        let ri2 = [RootSpec::new(c(0.0, 1.0), 2)];
        assert_eq!(
            expand_roots_to_coeffs(&ri2),
            vec![c(-1.0, 0.0), c(0.0, -2.0), c(1.0, 0.0)]
        );

        let f1: [RootSpec<f64>; 3] = [
            RootSpec::simple(0.0, 0.0),
            RootSpec::simple(0.0, 1.0),
            RootSpec::simple(3.0, 2.0),
        ];
        let got = expand_roots_to_coeffs(&f1);
        let want = [c(0.0, 0.0), c(-2.0, 3.0), c(-3.0, -3.0), c(1.0, 0.0)];
        for (g, w) in got.iter().zip(want) {
            assert!((*g - w).norm() < 1e-15, "{got:?}");
        }
        // product rule at 0: (0 − i)(0 − 3 − 2i)
        assert_eq!(got[1], c(0.0, -1.0) * c(-3.0, -2.0));
    }

    #[test]
    fn jet_examples() {
        let f1: FunctionExpr<f64> = catalog_lookup("f1").unwrap();
        let j = eval_jet(&f1, c(0.0, 0.0)).unwrap();
        assert_eq!(j.f, c(0.0, 0.0));
        assert!((j.df - c(-2.0, 3.0)).norm() < 1e-15);
        assert!((j.d2f - c(-6.0, -6.0)).norm() < 1e-14);

        let p = poly(&[(-1.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
        let j = eval_jet(&p, c(2.0, 0.0)).unwrap();
        assert_eq!((j.f, j.df, j.d2f), (c(3.0, 0.0), c(4.0, 0.0), c(2.0, 0.0)));

        let z2 = FunctionExpr::from_roots(vec![RootSpec::new(c(0.0, 0.0), 2)]).unwrap();
        let q = FunctionExpr::newton_quotient(z2).unwrap();
        let j = eval_jet(&q, c(1.0, 0.0)).unwrap();
        assert!((j.f - c(0.5, 0.0)).norm() < 1e-15);
        assert!((j.df - c(0.5, 0.0)).norm() < 1e-15);
        assert!(j.d2f.norm() < 1e-15);
    }

    #[test]
    fn quotient_matches_simplified_form() {
        // f = z³ − 1: g = (z³ − 1)/(3z²); check against direct formulas at a generic point.
        let f = poly(&[(-1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
        let g = FunctionExpr::newton_quotient(f).unwrap();
        let z = c(0.7, -1.3);
        let j = eval_jet(&g, z).unwrap();
        let g0 = (z * z * z - 1.0) / (3.0 * z * z);
        let g1 = 1.0 / 3.0 + 2.0 / (3.0 * z * z * z);
        let g2 = -2.0 / (z * z * z * z);
        assert!((j.f - g0).norm() < 1e-14);
        assert!((j.df - g1).norm() < 1e-14);
        assert!((j.d2f - g2).norm() < 1e-13);
    }

    #[test]
    fn quotient_has_a_pole_at_critical_points() {
        let f = poly(&[(-1.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
        let g = FunctionExpr::newton_quotient(f).unwrap();
        assert_eq!(eval_jet(&g, c(0.0, 0.0)), Err(JetError::Pole));
    }

    #[test]
    fn nested_quotient_is_rejected() {
        let f: FunctionExpr<f64> = catalog_lookup("f1").unwrap();
        let g = FunctionExpr::newton_quotient(f).unwrap();
        assert!(FunctionExpr::newton_quotient(g.clone()).is_err());
        assert!(FunctionExpr::newton_quotient(FunctionExpr::times_exp(g)).is_err());
    }

    #[test]
    fn times_exp_uses_product_rule() {
        let f7: FunctionExpr<f64> = catalog_lookup("f7").unwrap();
        let f24: FunctionExpr<f64> = catalog_lookup("f24").unwrap();
        let z = c(0.4, 0.9);
        let a = eval_jet(&f7, z).unwrap();
        let b = eval_jet(&f24, z).unwrap();
        let e = z.exp();
        assert!((b.f - a.f * e).norm() < 1e-13);
        assert!((b.df - (a.f + a.df) * e).norm() < 1e-13);
        assert!((b.d2f - (a.f + 2.0 * a.df + a.d2f) * e).norm() < 1e-12);
    }

    #[test]
    fn f23_closed_forms() {
        let f23: FunctionExpr<f64> = catalog_lookup("f23").unwrap();
        let z = c(1.1, -0.6);
        let j = eval_jet(&f23, z).unwrap();
        let direct = z * z + z.cos() + 2.0 * z.sin() - c(1.0, 0.5);
        assert!((j.f - direct).norm() < 1e-14);
        assert!((j.df - (2.0 * z - z.sin() + 2.0 * z.cos())).norm() < 1e-14);
        assert!((j.d2f - (2.0 - z.cos() - 2.0 * z.sin())).norm() < 1e-14);
    }

    #[test]
    fn overflow_flags_the_jet() {
        let f24: FunctionExpr<f64> = catalog_lookup("f24").unwrap();
        assert_eq!(eval_jet(&f24, c(400.0, 0.0)), Err(JetError::Overflow));
        let f1: FunctionExpr<f64> = catalog_lookup("f1").unwrap();
        assert_eq!(eval_jet(&f1, c(1e60, 0.0)), Err(JetError::Overflow));
    }

    #[test]
    fn objective_examples() {
        let id = FunctionExpr::from_roots(vec![RootSpec::<f64>::simple(0.0, 0.0)]).unwrap();
        let o = objective_jet(&id, c(1.0, 1.0)).unwrap();
        assert_eq!(o.value, 1.0);
        assert_eq!(o.gradient, Vec2::new(1.0, 1.0));
        assert_eq!(o.hessian, Sym2::identity());

        let sq = FunctionExpr::from_roots(vec![RootSpec::new(c(0.0, 0.0), 2)]).unwrap();
        let o = objective_jet(&sq, c(1.0, 0.0)).unwrap();
        assert_eq!(o.gradient, Vec2::new(2.0, 0.0));
        assert_eq!(o.hessian, Sym2::new(6.0, 0.0, 2.0));
        // oracle: central differences of F = (x² + y²)²/2
        let (g, h) = objective_fd(&sq, c(1.0, 0.0), 1e-5);
        assert!((g - o.gradient).norm() < 1e-8);
        assert!((h.a11 - 6.0).abs() < 1e-4 && h.a12.abs() < 1e-4 && (h.a22 - 2.0).abs() < 1e-4);

        let o = objective_jet(&sq, c(0.0, 0.0)).unwrap();
        assert_eq!(o.gradient, Vec2::zero());
        assert_eq!(o.hessian, Sym2::zero());
        assert!(o.gradient_vanishes(1e-13));
    }

    #[test]
    fn hessian_at_simple_roots_is_scaled_identity() {
        for id in catalog_ids() {
            let f: FunctionExpr<f64> = catalog_lookup(id).unwrap();
            let FunctionExpr::PolyFromRoots(p) = &f else {
                continue;
            };
            for r in p.roots().iter().filter(|r| r.multiplicity == 1) {
                let o = objective_jet(&f, r.location).unwrap();
                let d = eval_jet(&f, r.location).unwrap().df.norm_sqr();
                let h = o.hessian;
                assert!((h.a11 - d).abs() <= 1e-9 * d, "{id}");
                assert!((h.a22 - d).abs() <= 1e-9 * d, "{id}");
                assert!(h.a12.abs() <= 1e-9 * d, "{id}");
            }
        }
    }

    #[test]
    fn quotient_roots_become_simple() {
        for id in ["f3", "f6", "f9"] {
            let f: FunctionExpr<f64> = catalog_lookup(id).unwrap();
            let FunctionExpr::PolyFromRoots(p) = &f else {
                unreachable!()
            };
            let roots: Vec<_> = p.roots().to_vec();
            let g = FunctionExpr::newton_quotient(f).unwrap();
            for r in roots {
                // the quotient is removable at a multiple root; probe just beside it
                let z = r.location + c(1e-7, 0.0);
                let j = eval_jet(&g, z).unwrap();
                assert!(j.f.norm() < 1e-6, "{id}");
                // g ≈ (z − r)/n near a root of multiplicity n
                let want = 1.0 / r.multiplicity as f64;
                assert!((j.df.norm() - want).abs() < 1e-5, "{id}: g' = {}", j.df);
            }
        }
    }

    #[test]
    fn polish_converges_on_f23() {
        let f23: FunctionExpr<f64> = catalog_lookup("f23").unwrap();
        for z0 in f23_listed_roots::<f64>() {
            let (z, steps) = polish_root(&f23, z0, 10).unwrap();
            assert!(steps <= 5);
            assert!(eval_value(&f23, z).unwrap().norm() < 1e-10);
            assert!((z - z0).norm() < 1e-6);
        }
    }

    fn catalog_polys() -> Vec<(&'static str, FunctionExpr<f64>)> {
        catalog_ids()
            .iter()
            .filter_map(|id| {
                let f: FunctionExpr<f64> = catalog_lookup(id).unwrap();
                matches!(f, FunctionExpr::PolyFromRoots(_)).then_some((*id, f))
            })
            .collect()
    }

    #[test]
    fn objective_derivatives_match_finite_differences() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for (id, f) in catalog_polys() {
            for _ in 0..100 {
                let z = c(rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0));
                let o = objective_jet(&f, z).unwrap();
                let h = 1e-5;
                let (g, hs) = objective_fd(&f, z, h);
                let gtol = 1e-6 * (1.0 + o.gradient.norm());
                let htol = 1e-4 * (1.0 + crate::linalg2::sp(o.hessian));
                assert!(
                    (g - o.gradient).norm() <= gtol,
                    "{id} at {z}: {g:?} vs {:?}",
                    o.gradient
                );
                for (a, b) in [
                    (hs.a11, o.hessian.a11),
                    (hs.a12, o.hessian.a12),
                    (hs.a22, o.hessian.a22),
                ] {
                    assert!(
                        (a - b).abs() <= htol,
                        "{id} at {z}: hessian {hs:?} vs {:?}",
                        o.hessian
                    );
                }
            }
        }
    }

    proptest! {
        #[test]
        fn product_form_agrees_with_horner(
            roots in proptest::collection::vec(((-10.0..10.0f64), (-10.0..10.0f64), 1u32..3), 1..5),
            zr in -20.0..20.0f64, zi in -20.0..20.0f64,
        ) {
            let specs: Vec<RootSpec<f64>> =
                roots.iter().map(|&(a, b, n)| RootSpec::new(c(a, b), n)).collect();
            prop_assume!(specs.iter().map(|r| r.multiplicity).sum::<u32>() <= 8);
            let f = FunctionExpr::from_roots(specs.clone()).unwrap();
            let FunctionExpr::PolyFromRoots(p) = &f else { unreachable!() };
            let h = FunctionExpr::PolyCoeffs(p.coeffs().to_vec());
            let z = c(zr, zi);
            let a = eval_jet(&f, z).unwrap();
            let b = eval_jet(&h, z).unwrap();
            // Horner's own round-off scale
            let scale: f64 = p.coeffs().iter().enumerate()
                .map(|(k, ck)| ck.norm() * z.norm().powi(k as i32) * (k * k + 1) as f64)
                .sum();
            prop_assert!((a.f - b.f).norm() <= 1e-10 * scale);
            prop_assert!((a.df - b.df).norm() <= 1e-10 * scale);
            prop_assert!((a.d2f - b.d2f).norm() <= 1e-10 * scale);
        }

        #[test]
        fn root_order_does_not_change_values(zr in -10.0..10.0f64, zi in -10.0..10.0f64) {
            let mut roots = vec![
                RootSpec::simple(0.0, 0.0), RootSpec::simple(0.0, 1.0), RootSpec::simple(3.0, 2.0),
            ];
            let a = FunctionExpr::from_roots(roots.clone()).unwrap();
            roots.rotate_left(1);
            let b = FunctionExpr::from_roots(roots).unwrap();
            let z = c(zr, zi);
            prop_assert_eq!(eval_jet(&a, z).unwrap(), eval_jet(&b, z).unwrap());
        }
    }
}
