//! The named test functions `f1`–`f25`.
//!
//! Root order is significant: it fixes which basin gets which colour.

use num_complex::Complex;

use super::{polish_root, FunctionExpr, RootSpec};
use crate::error::{Error, Result};
use crate::scalar::Real;

// (re, im, multiplicity), in factorisation order.
type Factors = &'static [(f64, f64, u32)];

const POLYS: [(&str, Factors); 22] = [
    ("f1", &[(0.0, 0.0, 1), (0.0, 1.0, 1), (3.0, 2.0, 1)]),
    ("f2", &[(0.0, 0.0, 1), (0.0, 1.0, 1), (0.0, 3.0, 1)]),
    ("f3", &[(0.0, 0.0, 1), (0.0, 1.0, 2)]),
    (
        "f4",
        &[(0.0, 0.0, 1), (0.0, 1.0, 1), (3.0, 2.0, 1), (1.0, 4.0, 1)],
    ),
    (
        "f5",
        &[(0.0, 0.0, 1), (0.0, 1.0, 1), (3.0, 2.0, 1), (2.0, 4.0, 1)],
    ),
    ("f6", &[(0.0, 0.0, 1), (0.0, 1.0, 3)]),
    (
        "f7",
        &[(0.0, 0.0, 1), (0.0, 1.0, 1), (1.0, 1.0, 1), (3.0, 2.0, 1)],
    ),
    (
        "f8",
        &[(0.0, 0.0, 1), (0.0, 1.0, 1), (0.0, 2.0, 1), (3.0, 2.0, 1)],
    ),
    ("f9", &[(0.0, 0.0, 2), (0.0, 1.0, 2)]),
    ("f10", &[(0.0, 0.0, 2), (0.0, 1.0, 1), (1.0, 1.0, 1)]),
    ("f11", &[(0.0, 0.0, 2), (0.0, 1.0, 1), (0.0, 2.0, 1)]),
    (
        "f12",
        &[(0.0, 0.0, 1), (0.0, 1.0, 1), (0.0, 5.0, 1), (3.0, 2.0, 1)],
    ),
    ("f13", &[(0.0, 0.0, 2), (0.0, 1.0, 1), (0.0, 5.0, 1)]),
    (
        "f14",
        &[
            (0.0, 0.0, 1),
            (0.0, 2.0, 1),
            (3.0, -3.0, 1),
            (3.0, 6.0, 1),
            (5.0, 2.0, 1),
        ],
    ),
    (
        "f15",
        &[
            (0.0, 0.0, 1),
            (0.0, 2.0, 1),
            (3.0, 6.0, 1),
            (5.0, 2.0, 1),
            (7.0, -1.0, 1),
        ],
    ),
    (
        "f16",
        &[
            (0.0, 0.0, 1),
            (3.0, 6.0, 1),
            (5.0, 2.0, 1),
            (7.0, -1.0, 1),
            (4.0, 3.4, 1),
        ],
    ),
    (
        "f17",
        &[
            (0.0, 0.0, 1),
            (0.0, 2.0, 1),
            (5.0, 2.0, 1),
            (3.0, -3.0, 1),
            (2.0, 1.0, 1),
        ],
    ),
    (
        "f18",
        &[
            (0.0, 0.0, 1),
            (3.0, 6.0, 1),
            (5.0, 2.0, 1),
            (7.0, -1.0, 1),
            (2.0, 1.0, 1),
        ],
    ),
    (
        "f19",
        &[(0.0, 0.0, 2), (5.0, 2.0, 1), (3.0, -3.0, 1), (7.0, -1.0, 1)],
    ),
    (
        "f20",
        &[(0.0, 0.0, 2), (2.0, 1.0, 1), (5.0, 2.0, 1), (3.0, -3.0, 1)],
    ),
    (
        "f21",
        &[(0.0, 0.0, 2), (2.0, 1.0, 1), (5.0, 2.0, 1), (3.0, 6.0, 1)],
    ),
    (
        "f22",
        &[(0.0, 0.0, 1), (2.0, 1.0, 2), (3.0, -3.0, 1), (3.0, 6.0, 1)],
    ),
];

/// The approximate roots of `f23` inside `[-10, 10]²`, as published (8 decimals).
const F23_ROOTS: [(f64, f64); 8] = [
    (0.01453348, 0.24577632),
    (-1.79690338, -0.16311646),
    (2.65293461, -2.52795741),
    (2.70778504, 2.4386467),
    (-7.27782023, -4.1230358),
    (-7.26685729, 4.13462414),
    (9.62682067, -4.62305718),
    (9.63392763, 4.61683271),
];

pub fn catalog_ids() -> Vec<&'static str> {
    let mut ids: Vec<&'static str> = POLYS.iter().map(|(id, _)| *id).collect();
    ids.extend(["f23", "f24", "f25"]);
    ids
}

fn poly<T: Real>(factors: Factors) -> Result<FunctionExpr<T>> {
    FunctionExpr::from_roots(
        factors
            .iter()
            .map(|&(re, im, n)| RootSpec::new(Complex::new(T::lit(re), T::lit(im)), n))
            .collect(),
    )
}

pub fn catalog_lookup<T: Real>(id: &str) -> Result<FunctionExpr<T>> {
    if let Some((_, factors)) = POLYS.iter().find(|(name, _)| *name == id) {
        return poly(factors);
    }
    match id {
        "f23" => Ok(FunctionExpr::TranscendentalF23),
        "f24" => Ok(FunctionExpr::times_exp(catalog_lookup("f7")?)),
        "f25" => Ok(FunctionExpr::times_exp(catalog_lookup("f17")?)),
        _ => Err(Error::config(format!(
            "unknown function '{id}' (expected f1..f25)"
        ))),
    }
}

pub fn f23_listed_roots<T: Real>() -> Vec<Complex<T>> {
    F23_ROOTS
        .iter()
        .map(|&(re, im)| Complex::new(T::lit(re), T::lit(im)))
        .collect()
}

/// The listed `f23` roots refined to working precision, in listed order.
pub fn f23_roots<T: Real>() -> Vec<Complex<T>> {
    let f = FunctionExpr::TranscendentalF23;
    f23_listed_roots()
        .into_iter()
        .map(|z0| polish_root(&f, z0, 20).map(|(z, _)| z).unwrap_or(z0))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_ids_resolve() {
        let ids = catalog_ids();
        assert_eq!(ids.len(), 25);
        for id in ids {
            assert!(catalog_lookup::<f64>(id).is_ok(), "{id}");
        }
        assert!(catalog_lookup::<f64>("f26").is_err());
        assert!(catalog_lookup::<f64>("sin").is_err());
    }

    #[test]
    fn root_lists_keep_factorisation_order() {
        let FunctionExpr::PolyFromRoots(p) = catalog_lookup::<f64>("f1").unwrap() else {
            panic!()
        };
        let locs: Vec<_> = p
            .roots()
            .iter()
            .map(|r| (r.location, r.multiplicity))
            .collect();
        assert_eq!(
            locs,
            vec![
                (Complex::new(0.0, 0.0), 1),
                (Complex::new(0.0, 1.0), 1),
                (Complex::new(3.0, 2.0), 1)
            ]
        );

        let FunctionExpr::PolyFromRoots(p) = catalog_lookup::<f64>("f9").unwrap() else {
            panic!()
        };
        let locs: Vec<_> = p
            .roots()
            .iter()
            .map(|r| (r.location, r.multiplicity))
            .collect();
        assert_eq!(
            locs,
            vec![(Complex::new(0.0, 0.0), 2), (Complex::new(0.0, 1.0), 2)]
        );
    }

    #[test]
    fn f23_has_eight_listed_roots() {
        let roots = f23_listed_roots::<f64>();
        assert_eq!(roots.len(), 8);
        assert_eq!(roots[0], Complex::new(0.01453348, 0.24577632));
        assert!(roots
            .iter()
            .all(|z| z.re.abs() <= 10.0 && z.im.abs() <= 10.0));
    }
}
