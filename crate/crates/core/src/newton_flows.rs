//! Continuous Newton flows and their integrators.
//!
//! * Plain: `ż = −f/f′`
//! * Fraction: `ż = −g/g′` with `g = f/f′`, i.e. `−f f′/((f′)² − f f″)`
//! * Optimization: `ż = −(∇²F)⁻¹∇F` with `F = |f|²/2`

use std::ops::{Add, Mul};

use num_complex::Complex;

use crate::function_core::{eval_jet, eval_jet1, objective_jet, FunctionExpr};
use crate::iterative_methods::root_within;
use crate::linalg2::Vec2;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FlowKind {
    Plain,
    Fraction,
    Optimization,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Stepper {
    /// Classical fixed-step Runge–Kutta.
    Rk4,
    /// Adaptive Dormand–Prince 5(4).
    Dp54,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntegratorConfig<T> {
    /// Fixed step for RK4; initial step for DP54.
    pub h: T,
    pub t_end: T,
    pub stepper: Stepper,
    pub dp_rel_tol: T,
    pub dp_abs_tol: T,
    pub root_tol: T,
    pub escape_radius: T,
    /// Relative gradient tolerance for the optimization flow.
    pub grad_tol: T,
}

impl<T: Real> Default for IntegratorConfig<T> {
    fn default() -> Self {
        Self {
            h: T::lit(0.01),
            t_end: T::lit(100.0),
            stepper: Stepper::Rk4,
            dp_rel_tol: T::lit(1e-6),
            dp_abs_tol: T::lit(1e-9),
            root_tol: T::lit(1e-6),
            escape_radius: T::lit(1e10),
            grad_tol: T::lit(1e-13),
        }
    }
}

impl<T: Real> IntegratorConfig<T> {
    pub fn validate(&self) -> crate::Result<()> {
        use crate::Error;
        if !(self.h > T::zero() && self.t_end > T::zero()) {
            return Err(Error::config("h and t_end must be positive"));
        }
        if self.h > self.t_end {
            return Err(Error::config("h must not exceed t_end"));
        }
        for v in [
            self.dp_rel_tol,
            self.dp_abs_tol,
            self.root_tol,
            self.escape_radius,
            self.grad_tol,
        ] {
            if !(v > T::zero()) {
                return Err(Error::config("integrator tolerances must be positive"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FlowError {
    /// The state hit the flow's singular set.
    Singular,
    /// The function could not be evaluated (pole or overflow).
    InvalidJet,
    /// Adaptive step size collapsed below `1e-12`.
    StepUnderflow,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FlowStatus {
    ConvergedToRoot(usize),
    ConvergedToNonRootCritical,
    Diverged,
    Exhausted,
    Error(FlowError),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlowRunResult<T> {
    pub terminal: Complex<T>,
    pub steps: usize,
    pub t_reached: T,
    pub status: FlowStatus,
}

/// Velocity of the flow at `z`. At an exact root the velocity is zero.
pub fn flow_rhs<T: Real>(
    kind: FlowKind,
    f: &FunctionExpr<T>,
    z: Complex<T>,
) -> Result<Vec2<T>, FlowError> {
    let zero = Complex::new(T::zero(), T::zero());
    let v = match kind {
        FlowKind::Plain => {
            let (v, dv) = eval_jet1(f, z).map_err(|_| FlowError::InvalidJet)?;
            if v == zero {
                return Ok(Vec2::zero());
            }
            if !(dv.norm() >= T::SINGULAR_FLOOR) {
                return Err(FlowError::Singular);
            }
            -(v / dv)
        }
        FlowKind::Fraction => {
            let j = eval_jet(f, z).map_err(|_| FlowError::InvalidJet)?;
            let num = j.f * j.df;
            if j.f == zero {
                return Ok(Vec2::zero());
            }
            let den = j.df * j.df - j.f * j.d2f;
            if !(den.norm() >= T::SINGULAR_FLOOR) {
                return Err(FlowError::Singular);
            }
            -(num / den)
        }
        FlowKind::Optimization => {
            let obj = objective_jet(f, z).map_err(|_| FlowError::InvalidJet)?;
            if obj.gradient == Vec2::zero() {
                return Ok(Vec2::zero());
            }
            let step = obj
                .hessian
                .solve(obj.gradient)
                .map_err(|_| FlowError::Singular)?;
            -step.to_complex()
        }
    };
    let out = Vec2::from_complex(v);
    if out.is_finite() {
        Ok(out)
    } else {
        Err(FlowError::Singular)
    }
}

/// One classical Runge–Kutta step of size `h`.
pub fn rk4_step<T, S, E, F>(mut rhs: F, y: S, h: T) -> Result<S, E>
where
    T: Real,
    S: Copy + Add<Output = S> + Mul<T, Output = S>,
    F: FnMut(S) -> Result<S, E>,
{
    let half = h * T::lit(0.5);
    let k1 = rhs(y)?;
    let k2 = rhs(y + k1 * half)?;
    let k3 = rhs(y + k2 * half)?;
    let k4 = rhs(y + k3 * h)?;
    let two = T::lit(2.0);
    Ok(y + (k1 + k2 * two + k3 * two + k4) * (h / T::lit(6.0)))
}

/// Result of one Dormand–Prince attempt.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dp54Step<T> {
    /// Fifth-order proposal; only meaningful when `accepted`.
    pub y_next: Vec2<T>,
    pub h_next: T,
    pub accepted: bool,
    /// Scaled RMS error estimate; the step is accepted when it is `<= 1`.
    pub error_norm: T,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DpTolerances<T> {
    pub rel: T,
    pub abs: T,
}

const DP_C: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];

// Fifth-order weights minus the embedded fourth-order ones.
const DP_E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

pub const DP_MIN_STEP: f64 = 1e-12;

/// One adaptive Dormand–Prince 5(4) attempt with the usual
/// `0.9·err^{-1/5}` controller, clamped to `[0.2, 5]×h`.
pub fn dp54_step<T, F>(
    mut rhs: F,
    y: Vec2<T>,
    h: T,
    tol: DpTolerances<T>,
) -> Result<Dp54Step<T>, FlowError>
where
    T: Real,
    F: FnMut(Vec2<T>) -> Result<Vec2<T>, FlowError>,
{
    if !(h >= T::lit(DP_MIN_STEP)) {
        return Err(FlowError::StepUnderflow);
    }
    let mut k = [Vec2::zero(); 7];
    k[0] = rhs(y)?;
    for stage in 1..7 {
        let mut acc = y;
        for (j, kj) in k.iter().enumerate().take(stage) {
            let a = DP_C[stage - 1][j];
            if a != 0.0 {
                acc = acc + *kj * (h * T::lit(a));
            }
        }
        if stage == 6 {
            // FSAL: the last stage is evaluated at the fifth-order solution
            k[6] = rhs(acc)?;
            let y_next = acc;
            let mut err = Vec2::zero();
            for (e, kj) in DP_E.iter().zip(k.iter()) {
                err = err + *kj * (h * T::lit(*e));
            }
            let sx = tol.abs + tol.rel * y.x.abs().max(y_next.x.abs());
            let sy = tol.abs + tol.rel * y.y.abs().max(y_next.y.abs());
            let error_norm = (((err.x / sx).powi(2) + (err.y / sy).powi(2)) * T::lit(0.5)).sqrt();
            let factor = if error_norm == T::zero() {
                T::lit(5.0)
            } else {
                (T::lit(0.9) * error_norm.powf(T::lit(-0.2)))
                    .max(T::lit(0.2))
                    .min(T::lit(5.0))
            };
            return Ok(Dp54Step {
                y_next,
                h_next: h * factor,
                accepted: error_norm <= T::one(),
                error_norm,
            });
        }
        k[stage] = rhs(acc)?;
    }
    unreachable!("stage loop always returns at stage 6")
}

struct Monitor<'a, T: Real> {
    kind: FlowKind,
    f: &'a FunctionExpr<T>,
    config: &'a IntegratorConfig<T>,
    roots: &'a [Complex<T>],
}

impl<T: Real> Monitor<'_, T> {
    fn check(&self, z: Complex<T>) -> Option<FlowStatus> {
        if let Some(k) = root_within(z, self.roots, self.config.root_tol) {
            return Some(FlowStatus::ConvergedToRoot(k));
        }
        if !(z.norm() <= self.config.escape_radius) {
            return Some(FlowStatus::Diverged);
        }
        if self.kind == FlowKind::Optimization {
            match objective_jet(self.f, z) {
                Ok(obj) if obj.gradient_vanishes(self.config.grad_tol) => {
                    return Some(FlowStatus::ConvergedToNonRootCritical)
                }
                Err(_) => return Some(FlowStatus::Error(FlowError::InvalidJet)),
                _ => {}
            }
        }
        None
    }
}

/// Integrates a flow from `z0` over `[0, t_end]`, stopping early near a
/// root, on escape, at a vanished gradient (optimization flow), or when
/// the velocity becomes undefined.
pub fn integrate_flow<T: Real>(
    kind: FlowKind,
    f: &FunctionExpr<T>,
    z0: Complex<T>,
    config: &IntegratorConfig<T>,
    roots: &[Complex<T>],
) -> FlowRunResult<T> {
    let monitor = Monitor {
        kind,
        f,
        config,
        roots,
    };
    let rhs = |y: Vec2<T>| flow_rhs(kind, f, y.to_complex());
    let mut y = Vec2::from_complex(z0);
    let mut t = T::zero();
    let mut steps = 0usize;
    let done = |y: Vec2<T>, steps, t, status| FlowRunResult {
        terminal: y.to_complex(),
        steps,
        t_reached: t,
        status,
    };
    // keeps round-off in t from adding a sliver step at the end
    let t_stop = config.t_end - config.h * T::lit(1e-9);
    let mut h = config.h;
    loop {
        if let Some(status) = monitor.check(y.to_complex()) {
            return done(y, steps, t, status);
        }
        if t >= t_stop {
            return done(y, steps, t, FlowStatus::Exhausted);
        }
        let h_try = h.min(config.t_end - t);
        match config.stepper {
            Stepper::Rk4 => match rk4_step(rhs, y, h_try) {
                Ok(next) => {
                    y = next;
                    t = t + h_try;
                    steps += 1;
                }
                Err(e) => return done(y, steps, t, FlowStatus::Error(e)),
            },
            Stepper::Dp54 => {
                let tol = DpTolerances {
                    rel: config.dp_rel_tol,
                    abs: config.dp_abs_tol,
                };
                match dp54_step(rhs, y, h_try, tol) {
                    Ok(s) => {
                        if s.accepted {
                            y = s.y_next;
                            t = t + h_try;
                            steps += 1;
                        }
                        h = s.h_next;
                    }
                    Err(e) => return done(y, steps, t, FlowStatus::Error(e)),
                }
            }
        }
        if !y.is_finite() {
            return done(y, steps, t, FlowStatus::Error(FlowError::Singular));
        }
    }
}
