//! Discrete root finders: one step function per method plus a shared driver.
//!
//! The Newton family works on `f` directly. `newton_opt`, NQN and BNQN
//! work on the objective `F = |f|²/2` through its gradient and Hessian.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::function_core::{eval_jet1, objective_jet, objective_value, FunctionExpr};
use crate::linalg2::{minsp, reflect_abs_solve, Sym2, Vec2};
use crate::scalar::Real;

/// Tunables shared by every discrete method.
#[derive(Clone, Debug, PartialEq)]
pub struct MethodConfig<T> {
    /// Candidate Hessian shifts `δ₀, δ₁, …`, tried in order.
    pub delta_set: Vec<T>,
    /// Exponent of `‖∇F‖` in the Hessian shift.
    pub tau: T,
    /// Initial Armijo step, in `(0, 1]`.
    pub gamma0: T,
    /// Step normalisation: `ŵ = w / max(1, θ‖w‖)`.
    pub theta: T,
    /// Radius of the disk `|α − 1| <= ρ` for random relaxed Newton.
    pub rho: T,
    pub max_iter: usize,
    pub root_tol: T,
    /// Relative gradient tolerance, see [`ObjectiveJet::gradient_vanishes`].
    ///
    /// [`ObjectiveJet::gradient_vanishes`]: crate::function_core::ObjectiveJet::gradient_vanishes
    pub grad_tol: T,
    pub escape_radius: T,
    pub armijo_max_halvings: u32,
    pub seed: u64,
}

impl<T: Real> Default for MethodConfig<T> {
    fn default() -> Self {
        Self {
            delta_set: vec![T::zero(), T::one(), -T::one()],
            tau: T::lit(1.5),
            gamma0: T::one(),
            theta: T::zero(),
            rho: T::lit(0.9),
            max_iter: 10_000,
            root_tol: T::lit(1e-6),
            grad_tol: T::lit(1e-13),
            escape_radius: T::lit(1e10),
            armijo_max_halvings: 100,
            seed: 0,
        }
    }
}

impl<T: Real> MethodConfig<T> {
    /// `½ · min_{i≠j} |δᵢ − δⱼ|`
    pub fn kappa(&self) -> T {
        let mut best = T::infinity();
        for (i, a) in self.delta_set.iter().enumerate() {
            for b in &self.delta_set[i + 1..] {
                best = best.min((*a - *b).abs());
            }
        }
        best * T::lit(0.5)
    }

    pub fn validate(&self) -> Result<()> {
        if self.delta_set.len() < 3 {
            return Err(Error::config("delta set needs at least 3 values"));
        }
        if self.delta_set.iter().any(|d| !d.is_finite()) {
            return Err(Error::config("delta set values must be finite"));
        }
        if !(self.kappa() > T::zero()) {
            return Err(Error::config("delta set values must be pairwise distinct"));
        }
        if !(self.tau > T::zero()) {
            return Err(Error::config("tau must be positive"));
        }
        if !(self.gamma0 > T::zero() && self.gamma0 <= T::one()) {
            return Err(Error::config("gamma0 must lie in (0, 1]"));
        }
        if !(self.theta >= T::zero()) {
            return Err(Error::config("theta must be non-negative"));
        }
        if !(self.rho > T::lit(0.5) && self.rho < T::one()) {
            return Err(Error::config(format!(
                "rho = {} must lie in (0.5, 1)",
                self.rho
            )));
        }
        if self.max_iter == 0 || self.armijo_max_halvings == 0 {
            return Err(Error::config("iteration caps must be positive"));
        }
        for (name, v) in [
            ("root_tol", self.root_tol),
            ("grad_tol", self.grad_tol),
            ("escape_radius", self.escape_radius),
        ] {
            if !(v > T::zero()) {
                return Err(Error::config(format!("{name} must be positive")));
            }
        }
        Ok(())
    }
}

/// Deterministic pseudo-random source.
///
/// Seeding rule: a ChaCha8 generator keyed by `seed_from_u64(seed)`, with the
/// ChaCha stream id set to the pixel index. Streams for different pixels are
/// independent, so results do not depend on the order pixels are processed.
#[derive(Clone, Debug)]
pub struct RandomStream {
    source: Source,
}

#[derive(Clone, Debug)]
enum Source {
    ChaCha(Box<ChaCha8Rng>),
    Replay { values: Vec<f64>, pos: usize },
}

impl RandomStream {
    pub fn new(seed: u64) -> Self {
        Self::for_pixel(seed, 0)
    }

    pub fn for_pixel(seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        Self {
            source: Source::ChaCha(Box::new(rng)),
        }
    }

    /// Replays `values` cyclically for both uniform and normal draws.
    pub fn replay(values: Vec<f64>) -> Self {
        assert!(!values.is_empty(), "replay stream needs values");
        Self {
            source: Source::Replay { values, pos: 0 },
        }
    }

    fn next_replayed(values: &[f64], pos: &mut usize) -> f64 {
        let v = values[*pos % values.len()];
        *pos += 1;
        v
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform<T: Real>(&mut self) -> T {
        match &mut self.source {
            Source::ChaCha(rng) => T::lit(rng.random::<f64>()),
            Source::Replay { values, pos } => T::lit(Self::next_replayed(values, pos)),
        }
    }

    /// Standard normal draw.
    pub fn normal<T: Real>(&mut self) -> T {
        match &mut self.source {
            Source::ChaCha(rng) => T::lit(rng.sample::<f64, _>(StandardNormal)),
            Source::Replay { values, pos } => T::lit(Self::next_replayed(values, pos)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StepStatus {
    Continue,
    SingularDerivative,
    InvalidJet,
    ArmijoStalled,
    GradientVanished,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepOutcome<T> {
    pub next: Complex<T>,
    pub status: StepStatus,
}

impl<T: Real> StepOutcome<T> {
    fn moved(next: Complex<T>) -> Self {
        if next.re.is_finite() && next.im.is_finite() {
            Self {
                next,
                status: StepStatus::Continue,
            }
        } else {
            Self {
                next,
                status: StepStatus::InvalidJet,
            }
        }
    }

    fn stop(at: Complex<T>, status: StepStatus) -> Self {
        Self { next: at, status }
    }
}

pub fn newton_step<T: Real>(f: &FunctionExpr<T>, z: Complex<T>) -> StepOutcome<T> {
    relaxed_newton_step(f, z, Complex::new(T::one(), T::zero()))
}

/// `z − α·f(z)/f′(z)`
pub fn relaxed_newton_step<T: Real>(
    f: &FunctionExpr<T>,
    z: Complex<T>,
    alpha: Complex<T>,
) -> StepOutcome<T> {
    let Ok((v, dv)) = eval_jet1(f, z) else {
        return StepOutcome::stop(z, StepStatus::InvalidJet);
    };
    if !(dv.norm() >= T::SINGULAR_FLOOR) {
        return StepOutcome::stop(z, StepStatus::SingularDerivative);
    }
    StepOutcome::moved(z - alpha * (v / dv))
}

/// Uniform draw from the disk `|α − 1| <= ρ`.
pub fn sample_alpha<T: Real>(stream: &mut RandomStream, rho: T) -> Complex<T> {
    let u: T = stream.uniform();
    let phi: T = stream.uniform::<T>() * T::TAU();
    let r = rho * u.sqrt();
    Complex::new(T::one() + r * phi.cos(), r * phi.sin())
}

pub fn random_relaxed_newton_step<T: Real>(
    f: &FunctionExpr<T>,
    z: Complex<T>,
    stream: &mut RandomStream,
    rho: T,
) -> StepOutcome<T> {
    let alpha = sample_alpha(stream, rho);
    relaxed_newton_step(f, z, alpha)
}

/// Newton's method on `F = |f|²/2`: `z − (∇²F)⁻¹∇F`.
pub fn newton_opt_step<T: Real>(f: &FunctionExpr<T>, z: Complex<T>, grad_tol: T) -> StepOutcome<T> {
    let Ok(obj) = objective_jet(f, z) else {
        return StepOutcome::stop(z, StepStatus::InvalidJet);
    };
    let Ok(v) = obj.hessian.solve(obj.gradient) else {
        return StepOutcome::stop(z, StepStatus::SingularDerivative);
    };
    if obj.gradient_vanishes(grad_tol) {
        return StepOutcome::stop(z, StepStatus::GradientVanished);
    }
    StepOutcome::moved(z - v.to_complex())
}

/// First `j` with `minsp(∇²F + δⱼ‖∇F‖^τ Id) >= κ‖∇F‖^τ`, and the accepted matrix.
///
/// With at least three `2κ`-separated shifts some `j <= 2` always qualifies,
/// since each of the two eigenvalues can rule out at most one shift. If
/// round-off defeats that, the shift with the largest `minsp` is returned.
pub fn select_delta<T: Real>(
    hessian: Sym2<T>,
    grad_norm: T,
    config: &MethodConfig<T>,
) -> (usize, Sym2<T>) {
    let scale = grad_norm.powf(config.tau);
    let threshold = config.kappa() * scale;
    let mut best = (0, hessian.shifted(config.delta_set[0] * scale), -T::one());
    for (j, delta) in config.delta_set.iter().enumerate() {
        let a = hessian.shifted(*delta * scale);
        let m = minsp(a);
        if m >= threshold {
            return (j, a);
        }
        if m > best.2 {
            best = (j, a, m);
        }
    }
    (best.0, best.1)
}

/// Largest `γ ∈ {γ₀/3ᵏ}` with `F(z − γŵ) − F(z) <= −γ⟨ŵ, ∇F(z)⟩/3`.
pub fn armijo_search<T: Real>(
    f: &FunctionExpr<T>,
    z: Complex<T>,
    w_hat: Vec2<T>,
    gamma0: T,
    max_halvings: u32,
) -> std::result::Result<T, StepStatus> {
    let obj = objective_jet(f, z).map_err(|_| StepStatus::InvalidJet)?;
    armijo_from(f, z, obj.value, obj.gradient, w_hat, gamma0, max_halvings)
}

fn armijo_from<T: Real>(
    f: &FunctionExpr<T>,
    z: Complex<T>,
    value: T,
    gradient: Vec2<T>,
    w_hat: Vec2<T>,
    gamma0: T,
    max_halvings: u32,
) -> std::result::Result<T, StepStatus> {
    let slope = w_hat.dot(gradient);
    let third = T::one() / T::lit(3.0);
    let mut gamma = gamma0;
    for _ in 0..=max_halvings {
        let trial = z - w_hat.to_complex() * gamma;
        if let Ok(v) = objective_value(f, trial) {
            if v - value <= -gamma * slope * third {
                return Ok(gamma);
            }
        }
        gamma = gamma * third;
    }
    Err(StepStatus::ArmijoStalled)
}

/// One step of Backtracking New Q-Newton (new variant, parameter θ).
pub fn bnqn_step<T: Real>(
    f: &FunctionExpr<T>,
    z: Complex<T>,
    config: &MethodConfig<T>,
) -> StepOutcome<T> {
    let Ok(obj) = objective_jet(f, z) else {
        return StepOutcome::stop(z, StepStatus::InvalidJet);
    };
    if obj.gradient_vanishes(config.grad_tol) {
        return StepOutcome::stop(z, StepStatus::GradientVanished);
    }
    let (_, a) = select_delta(obj.hessian, obj.gradient.norm(), config);
    let Ok(w) = reflect_abs_solve(a, obj.gradient) else {
        return StepOutcome::stop(z, StepStatus::SingularDerivative);
    };
    let w_hat = w * (T::one() / T::one().max(config.theta * w.norm()));
    match armijo_from(
        f,
        z,
        obj.value,
        obj.gradient,
        w_hat,
        config.gamma0,
        config.armijo_max_halvings,
    ) {
        Ok(gamma) => StepOutcome::moved(z - w_hat.to_complex() * gamma),
        Err(status) => StepOutcome::stop(z, status),
    }
}

/// One step of New Q-Newton: first invertible shift, reflected solve, unit step.
pub fn nqn_step<T: Real>(
    f: &FunctionExpr<T>,
    z: Complex<T>,
    config: &MethodConfig<T>,
) -> StepOutcome<T> {
    let Ok(obj) = objective_jet(f, z) else {
        return StepOutcome::stop(z, StepStatus::InvalidJet);
    };
    if obj.gradient_vanishes(config.grad_tol) {
        return StepOutcome::stop(z, StepStatus::GradientVanished);
    }
    let scale = obj.gradient.norm().powf(config.tau);
    let accepted = config
        .delta_set
        .iter()
        .map(|d| obj.hessian.shifted(*d * scale))
        .find(|a| minsp(*a) > T::zero());
    let Some(a) = accepted else {
        return StepOutcome::stop(z, StepStatus::SingularDerivative);
    };
    match reflect_abs_solve(a, obj.gradient) {
        Ok(w) => StepOutcome::moved(z - w.to_complex()),
        Err(_) => StepOutcome::stop(z, StepStatus::SingularDerivative),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StepKind<T> {
    Newton,
    Relaxed(Complex<T>),
    RandomRelaxed,
    NewtonOpt,
    Nqn,
    Bnqn,
}

impl<T: Real> StepKind<T> {
    /// Methods that minimise `F` and can therefore stall at non-root critical points.
    pub fn is_optimization(&self) -> bool {
        matches!(self, StepKind::NewtonOpt | StepKind::Nqn | StepKind::Bnqn)
    }
}

pub fn step<T: Real>(
    kind: StepKind<T>,
    f: &FunctionExpr<T>,
    z: Complex<T>,
    config: &MethodConfig<T>,
    stream: &mut RandomStream,
) -> StepOutcome<T> {
    match kind {
        StepKind::Newton => newton_step(f, z),
        StepKind::Relaxed(alpha) => relaxed_newton_step(f, z, alpha),
        StepKind::RandomRelaxed => random_relaxed_newton_step(f, z, stream, config.rho),
        StepKind::NewtonOpt => newton_opt_step(f, z, config.grad_tol),
        StepKind::Nqn => nqn_step(f, z, config),
        StepKind::Bnqn => bnqn_step(f, z, config),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RunStatus {
    ConvergedToRoot(usize),
    ConvergedToNonRootCritical,
    Diverged,
    Exhausted,
    Error(StepStatus),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunResult<T> {
    pub terminal: Complex<T>,
    pub iterations: usize,
    pub status: RunStatus,
}

/// Index of the nearest root and its distance; ties go to the lowest index.
pub fn nearest_root<T: Real>(z: Complex<T>, roots: &[Complex<T>]) -> Option<(usize, T)> {
    let mut best: Option<(usize, T)> = None;
    for (k, r) in roots.iter().enumerate() {
        let d = (z - r).norm();
        if best.is_none_or(|(_, bd)| d < bd) {
            best = Some((k, d));
        }
    }
    best
}

/// Root index when `z` lies strictly within `tol` of its nearest root.
pub fn root_within<T: Real>(z: Complex<T>, roots: &[Complex<T>], tol: T) -> Option<usize> {
    nearest_root(z, roots).and_then(|(k, d)| (d < tol).then_some(k))
}

/// Supplies the function to iterate on at each step.
///
/// The deterministic case hands back the same function every time; the
/// stochastic protocol draws fresh noise per iteration.
pub trait FunctionSource<T> {
    fn current(&mut self, stream: &mut RandomStream) -> &FunctionExpr<T>;
}

impl<T> FunctionSource<T> for &FunctionExpr<T> {
    fn current(&mut self, _: &mut RandomStream) -> &FunctionExpr<T> {
        self
    }
}

/// Runs `kind` from `z0` until a stopping rule fires.
///
/// Checked before every step, in order: a root within `root_tol`
/// (`ConvergedToRoot`), `|z| > escape_radius` (`Diverged`), the iteration cap
/// (`Exhausted`). A step reporting a vanished gradient ends the run as
/// `ConvergedToNonRootCritical`; any other failed step ends it as `Error`.
pub fn run_with<T: Real, S: FunctionSource<T>>(
    kind: StepKind<T>,
    mut source: S,
    z0: Complex<T>,
    config: &MethodConfig<T>,
    roots: &[Complex<T>],
    root_tol: T,
    stream: &mut RandomStream,
) -> RunResult<T> {
    let mut z = z0;
    let finish = |z, iterations, status| RunResult {
        terminal: z,
        iterations,
        status,
    };
    for it in 0..=config.max_iter {
        if let Some(k) = root_within(z, roots, root_tol) {
            return finish(z, it, RunStatus::ConvergedToRoot(k));
        }
        if !(z.norm() <= config.escape_radius) {
            return finish(z, it, RunStatus::Diverged);
        }
        if it == config.max_iter {
            break;
        }
        let f = source.current(stream);
        let out = step(kind, f, z, config, stream);
        match out.status {
            StepStatus::Continue => z = out.next,
            StepStatus::GradientVanished => {
                return finish(z, it, RunStatus::ConvergedToNonRootCritical)
            }
            other => return finish(z, it, RunStatus::Error(other)),
        }
    }
    finish(z, config.max_iter, RunStatus::Exhausted)
}

/// Runs a method with the stream derived from `config.seed`.
pub fn run_method<T: Real>(
    kind: StepKind<T>,
    f: &FunctionExpr<T>,
    z0: Complex<T>,
    config: &MethodConfig<T>,
    roots: &[Complex<T>],
) -> RunResult<T> {
    let mut stream = RandomStream::new(config.seed);
    run_with(kind, f, z0, config, roots, config.root_tol, &mut stream)
}
