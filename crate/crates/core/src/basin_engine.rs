//! Pixel-grid sweeps: one run per pixel center, classified by terminal root.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::function_core::FunctionExpr;
use crate::iterative_methods::{
    run_with, FunctionSource, MethodConfig, RandomStream, RunStatus, StepKind,
};
use crate::linalg2::Vec2;
use crate::newton_flows::{integrate_flow, FlowKind, FlowStatus, IntegratorConfig};
use crate::scalar::Real;
use crate::voronoi::{reduced_sites, render_voronoi};

/// Rectangular grid of starting points.
///
/// Pixel `(i, j)` has center `(x_min + (i+½)Δx + jitter.x, y_min + (j+½)Δy + jitter.y)`,
/// with `j = 0` the bottom row. Flat index is `j·nx + i`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec<T> {
    pub x_min: T,
    pub x_max: T,
    pub y_min: T,
    pub y_max: T,
    pub nx: usize,
    pub ny: usize,
    pub center_jitter: Vec2<T>,
}

// Stream index reserved for the grid jitter, disjoint from pixel indices.
const JITTER_STREAM: u64 = u64::MAX;

impl<T: Real> GridSpec<T> {
    pub fn new(x_min: T, x_max: T, y_min: T, y_max: T, nx: usize, ny: usize) -> Result<Self> {
        let finite = [x_min, x_max, y_min, y_max].iter().all(|v| v.is_finite());
        if !finite || !(x_min < x_max) || !(y_min < y_max) {
            return Err(Error::config("grid bounds must be finite with min < max"));
        }
        if nx == 0 || ny == 0 {
            return Err(Error::config("grid must have at least one pixel per axis"));
        }
        Ok(Self {
            x_min,
            x_max,
            y_min,
            y_max,
            nx,
            ny,
            center_jitter: Vec2::zero(),
        })
    }

    /// 240×240 on `[-10, 10]²` with the center jittered from `seed`.
    pub fn standard(seed: u64) -> Self {
        let ten = T::lit(10.0);
        Self::new(-ten, ten, -ten, ten, 240, 240)
            .unwrap()
            .with_seeded_jitter(seed)
    }

    /// Shifts all centers by one offset drawn uniformly from ±half a pixel per axis.
    pub fn with_seeded_jitter(mut self, seed: u64) -> Self {
        let mut stream = RandomStream::for_pixel(seed, JITTER_STREAM);
        let half = T::lit(0.5);
        let jx = (stream.uniform::<T>() - half) * self.dx();
        let jy = (stream.uniform::<T>() - half) * self.dy();
        self.center_jitter = Vec2::new(jx, jy);
        self
    }

    pub fn dx(&self) -> T {
        (self.x_max - self.x_min) / T::lit(self.nx as f64)
    }

    pub fn dy(&self) -> T {
        (self.y_max - self.y_min) / T::lit(self.ny as f64)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn pixel_center(&self, i: usize, j: usize) -> Complex<T> {
        let half = T::lit(0.5);
        Complex::new(
            self.x_min + (T::lit(i as f64) + half) * self.dx() + self.center_jitter.x,
            self.y_min + (T::lit(j as f64) + half) * self.dy() + self.center_jitter.y,
        )
    }

    pub fn pixel_center_at(&self, index: usize) -> Complex<T> {
        self.pixel_center(index % self.nx, index / self.nx)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Label {
    Root(usize),
    Black,
}

/// How a pixel's run ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Outcome {
    Root(usize),
    NonRootCritical,
    Diverged,
    Exhausted,
    Failed,
    /// Voronoi pixel on a cell boundary.
    Boundary,
}

impl Outcome {
    pub fn label(self) -> Label {
        match self {
            Outcome::Root(k) => Label::Root(k),
            _ => Label::Black,
        }
    }
}

impl From<RunStatus> for Outcome {
    fn from(s: RunStatus) -> Self {
        match s {
            RunStatus::ConvergedToRoot(k) => Outcome::Root(k),
            RunStatus::ConvergedToNonRootCritical => Outcome::NonRootCritical,
            RunStatus::Diverged => Outcome::Diverged,
            RunStatus::Exhausted => Outcome::Exhausted,
            RunStatus::Error(_) => Outcome::Failed,
        }
    }
}

impl From<FlowStatus> for Outcome {
    fn from(s: FlowStatus) -> Self {
        match s {
            FlowStatus::ConvergedToRoot(k) => Outcome::Root(k),
            FlowStatus::ConvergedToNonRootCritical => Outcome::NonRootCritical,
            FlowStatus::Diverged => Outcome::Diverged,
            FlowStatus::Exhausted => Outcome::Exhausted,
            FlowStatus::Error(_) => Outcome::Failed,
        }
    }
}

/// Per-pixel labels and run statistics, in grid index order.
#[derive(Clone, Debug, PartialEq)]
pub struct BasinImage<T> {
    pub width: usize,
    pub height: usize,
    pub labels: Vec<Label>,
    pub iterations: Vec<u64>,
    pub terminal: Vec<Complex<T>>,
    pub outcomes: Vec<Outcome>,
}

impl<T: Real> BasinImage<T> {
    pub(crate) fn with_capacity(width: usize, height: usize) -> Self {
        let n = width * height;
        Self {
            width,
            height,
            labels: Vec::with_capacity(n),
            iterations: Vec::with_capacity(n),
            terminal: Vec::with_capacity(n),
            outcomes: Vec::with_capacity(n),
        }
    }

    pub(crate) fn push(
        &mut self,
        label: Label,
        iterations: u64,
        terminal: Complex<T>,
        outcome: Outcome,
    ) {
        self.labels.push(label);
        self.iterations.push(iterations);
        self.terminal.push(terminal);
        self.outcomes.push(outcome);
    }

    /// Image holding only labels; statistics are zeroed.
    pub fn from_labels(width: usize, height: usize, labels: Vec<Label>) -> Result<Self> {
        if labels.len() != width * height {
            return Err(Error::DimensionMismatch(width, height, labels.len(), 1));
        }
        let n = labels.len();
        let outcomes = labels
            .iter()
            .map(|l| match l {
                Label::Root(k) => Outcome::Root(*k),
                Label::Black => Outcome::Failed,
            })
            .collect();
        Ok(Self {
            width,
            height,
            labels,
            iterations: vec![0; n],
            terminal: vec![Complex::new(T::zero(), T::zero()); n],
            outcomes,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, i: usize, j: usize) -> Label {
        self.labels[j * self.width + i]
    }

    pub fn black_fraction(&self) -> f64 {
        self.count(|l| l == Label::Black) as f64 / self.len().max(1) as f64
    }

    pub fn outcome_fraction(&self, pred: impl Fn(Outcome) -> bool) -> f64 {
        self.outcomes.iter().filter(|o| pred(**o)).count() as f64 / self.len().max(1) as f64
    }

    fn count(&self, pred: impl Fn(Label) -> bool) -> usize {
        self.labels.iter().filter(|l| pred(**l)).count()
    }
}

/// Noise model `g(z, ξ) = f(z) + ε ξ (z³ + 2z − 5)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StochasticSpec<T> {
    pub epsilon: T,
    /// Root distance that counts as convergence in stochastic runs.
    pub relaxed_root_tol: T,
}

impl<T: Real> StochasticSpec<T> {
    /// `relaxed_root_tol = 10ε`.
    pub fn new(epsilon: T) -> Self {
        Self {
            epsilon,
            relaxed_root_tol: epsilon * T::lit(10.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon >= T::zero() && self.epsilon.is_finite()) {
            return Err(Error::config("epsilon must be finite and nonnegative"));
        }
        if !(self.relaxed_root_tol > T::zero() && self.relaxed_root_tol >= self.epsilon) {
            return Err(Error::config(
                "relaxed root tolerance must be positive and >= epsilon",
            ));
        }
        Ok(())
    }
}

impl<T: Real> Default for StochasticSpec<T> {
    fn default() -> Self {
        Self::new(T::lit(1e-4))
    }
}

/// `z³ + 2z − 5`, ascending.
fn perturbation<T: Real>() -> [Complex<T>; 4] {
    [-5.0, 2.0, 0.0, 1.0].map(|a| Complex::new(T::lit(a), T::zero()))
}

fn perturbed_coeffs<T: Real>(base: &[Complex<T>], scale: T, out: &mut Vec<Complex<T>>) {
    let p = perturbation::<T>();
    out.clear();
    out.extend_from_slice(base);
    if out.len() < p.len() {
        out.resize(p.len(), Complex::new(T::zero(), T::zero()));
    }
    for (o, pk) in out.iter_mut().zip(p) {
        *o = *o + pk * scale;
    }
    while out.len() > 1 && *out.last().unwrap() == Complex::new(T::zero(), T::zero()) {
        out.pop();
    }
}

/// `f + ε ξ (z³ + 2z − 5)` as a coefficient polynomial; `f` itself when `εξ = 0`.
pub fn stochastic_wrap<T: Real>(f: &FunctionExpr<T>, epsilon: T, xi: T) -> Result<FunctionExpr<T>> {
    let base = f.poly_coeffs().ok_or(Error::NotPolynomial(f.kind_name()))?;
    let scale = epsilon * xi;
    if scale == T::zero() {
        return Ok(f.clone());
    }
    let mut coeffs = Vec::new();
    perturbed_coeffs(base, scale, &mut coeffs);
    FunctionExpr::from_coeffs(coeffs)
}

/// Draws a fresh `ξ ~ N(0, 1)` per iteration and serves the perturbed polynomial.
pub struct NoisyPolynomial<'a, T> {
    base: &'a [Complex<T>],
    epsilon: T,
    scratch: FunctionExpr<T>,
}

impl<'a, T: Real> NoisyPolynomial<'a, T> {
    pub fn new(f: &'a FunctionExpr<T>, epsilon: T) -> Result<Self> {
        let base = f.poly_coeffs().ok_or(Error::NotPolynomial(f.kind_name()))?;
        Ok(Self {
            base,
            epsilon,
            scratch: FunctionExpr::PolyCoeffs(Vec::with_capacity(base.len().max(4))),
        })
    }
}

impl<T: Real> FunctionSource<T> for NoisyPolynomial<'_, T> {
    fn current(&mut self, stream: &mut RandomStream) -> &FunctionExpr<T> {
        let xi: T = stream.normal();
        if let FunctionExpr::PolyCoeffs(c) = &mut self.scratch {
            perturbed_coeffs(self.base, self.epsilon * xi, c);
        }
        &self.scratch
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Engine<T> {
    Method(StepKind<T>),
    Flow(FlowKind),
    Voronoi,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig<T> {
    pub method: MethodConfig<T>,
    pub integrator: IntegratorConfig<T>,
    pub stochastic: Option<StochasticSpec<T>>,
}

impl<T: Real> Default for SweepConfig<T> {
    fn default() -> Self {
        Self {
            method: MethodConfig::default(),
            integrator: IntegratorConfig::default(),
            stochastic: None,
        }
    }
}

struct Pixel<T> {
    iterations: u64,
    terminal: Complex<T>,
    outcome: Outcome,
}

/// Runs `engine` from every pixel center of `grid` and classifies the
/// terminals against the distinct roots of `f`.
///
/// Pixel `k` draws its randomness from `RandomStream::for_pixel(seed, k)`, so
/// the image does not depend on how the work is scheduled.
pub fn sweep<T: Real>(
    engine: Engine<T>,
    f: &FunctionExpr<T>,
    grid: &GridSpec<T>,
    config: &SweepConfig<T>,
) -> Result<BasinImage<T>> {
    let sites = reduced_sites(f)?;
    let roots = sites.sites();
    if let Some(spec) = &config.stochastic {
        spec.validate()?;
        if !matches!(engine, Engine::Method(_)) {
            return Err(Error::config(
                "stochastic mode applies to iterative methods only",
            ));
        }
    }
    let pixels: Vec<Pixel<T>> = match engine {
        Engine::Voronoi => return Ok(render_voronoi(&sites, grid)),
        Engine::Flow(kind) => {
            config.integrator.validate()?;
            (0..grid.len())
                .into_par_iter()
                .map(|idx| {
                    let r = integrate_flow(
                        kind,
                        f,
                        grid.pixel_center_at(idx),
                        &config.integrator,
                        roots,
                    );
                    Pixel {
                        iterations: r.steps as u64,
                        terminal: r.terminal,
                        outcome: r.status.into(),
                    }
                })
                .collect()
        }
        Engine::Method(kind) => {
            let mc = &config.method;
            mc.validate()?;
            if let Some(spec) = &config.stochastic {
                NoisyPolynomial::new(f, spec.epsilon)?;
            }
            (0..grid.len())
                .into_par_iter()
                .map(|idx| {
                    let z0 = grid.pixel_center_at(idx);
                    let mut stream = RandomStream::for_pixel(mc.seed, idx as u64);
                    let r = match &config.stochastic {
                        None => run_with(kind, f, z0, mc, roots, mc.root_tol, &mut stream),
                        Some(spec) => {
                            let noisy =
                                NoisyPolynomial::new(f, spec.epsilon).expect("checked above");
                            run_with(
                                kind,
                                noisy,
                                z0,
                                mc,
                                roots,
                                spec.relaxed_root_tol,
                                &mut stream,
                            )
                        }
                    };
                    Pixel {
                        iterations: r.iterations as u64,
                        terminal: r.terminal,
                        outcome: r.status.into(),
                    }
                })
                .collect()
        }
    };
    let mut image = BasinImage::with_capacity(grid.nx, grid.ny);
    for p in pixels {
        image.push(p.outcome.label(), p.iterations, p.terminal, p.outcome);
    }
    Ok(image)
}

/// Fraction of pixels whose labels differ.
///
/// With `ignore_black`, pixels black in either image are left out of both
/// the count and the total. An empty comparison yields 0.
pub fn compare_images<T>(a: &BasinImage<T>, b: &BasinImage<T>, ignore_black: bool) -> Result<f64> {
    if a.width != b.width || a.height != b.height {
        return Err(Error::DimensionMismatch(
            a.width, a.height, b.width, b.height,
        ));
    }
    let (mut differ, mut total) = (0usize, 0usize);
    for (la, lb) in a.labels.iter().zip(&b.labels) {
        if ignore_black && (*la == Label::Black || *lb == Label::Black) {
            continue;
        }
        total += 1;
        differ += (la != lb) as usize;
    }
    Ok(if total == 0 {
        0.0
    } else {
        differ as f64 / total as f64
    })
}
