//! Reduced Voronoi diagrams of a function's distinct roots.

use num_complex::Complex;

use crate::basin_engine::{BasinImage, GridSpec, Label, Outcome};
use crate::error::{Error, Result};
use crate::function_core::{f23_roots, FunctionExpr};
use crate::scalar::Real;

/// Distinct root locations in first-occurrence order.
#[derive(Clone, Debug, PartialEq)]
pub struct SiteSet<T> {
    sites: Vec<Complex<T>>,
}

impl<T: Real> SiteSet<T> {
    /// Deduplicates `points`, keeping the first occurrence of each location.
    pub fn new(points: impl IntoIterator<Item = Complex<T>>) -> Result<Self> {
        let mut sites: Vec<Complex<T>> = Vec::new();
        for p in points {
            if !(p.re.is_finite() && p.im.is_finite()) {
                return Err(Error::config("site is not finite"));
            }
            if !sites.contains(&p) {
                sites.push(p);
            }
        }
        if sites.is_empty() {
            return Err(Error::config("site set is empty"));
        }
        Ok(Self { sites })
    }

    pub fn sites(&self) -> &[Complex<T>] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }
}

/// Sites of `f`: its distinct roots with multiplicity dropped.
///
/// `f·eᶻ` and `f/f′` share the zeros of `f`. Coefficient-only polynomials
/// carry no root list and are rejected.
pub fn reduced_sites<T: Real>(f: &FunctionExpr<T>) -> Result<SiteSet<T>> {
    match f {
        FunctionExpr::PolyFromRoots(p) => SiteSet::new(p.roots().iter().map(|r| r.location)),
        FunctionExpr::TranscendentalF23 => SiteSet::new(f23_roots()),
        FunctionExpr::TimesExp(inner) | FunctionExpr::NewtonQuotient(inner) => reduced_sites(inner),
        FunctionExpr::PolyCoeffs(_) => Err(Error::NoRootList),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VoronoiCell {
    Site(usize),
    Boundary,
}

pub const BOUNDARY_TOL: f64 = 1e-12;

/// Strictly nearest site, or `Boundary` when the two smallest distances
/// are within `1e-12` of each other.
pub fn classify_point<T: Real>(z: Complex<T>, sites: &[Complex<T>]) -> VoronoiCell {
    assert!(!sites.is_empty(), "classify_point needs at least one site");
    let mut best = (0usize, T::infinity());
    let mut second = T::infinity();
    for (k, s) in sites.iter().enumerate() {
        let d = (z - s).norm();
        if d < best.1 {
            second = best.1;
            best = (k, d);
        } else if d < second {
            second = d;
        }
    }
    if second - best.1 < T::lit(BOUNDARY_TOL) {
        VoronoiCell::Boundary
    } else {
        VoronoiCell::Site(best.0)
    }
}

/// Classifies every pixel center of `grid`; boundary pixels are black.
pub fn render_voronoi<T: Real>(sites: &SiteSet<T>, grid: &GridSpec<T>) -> BasinImage<T> {
    let n = grid.nx * grid.ny;
    let mut image = BasinImage::with_capacity(grid.nx, grid.ny);
    for idx in 0..n {
        let z = grid.pixel_center_at(idx);
        let (label, outcome) = match classify_point(z, sites.sites()) {
            VoronoiCell::Site(k) => (Label::Root(k), Outcome::Root(k)),
            VoronoiCell::Boundary => (Label::Black, Outcome::Boundary),
        };
        image.push(label, 0, z, outcome);
    }
    image
}
