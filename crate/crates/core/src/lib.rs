//! Basins of attraction for Newton-type root finders on complex functions.
//!
//! The crate evaluates catalog functions with exact 2-jets, runs the
//! discrete methods (Newton, relaxed and random relaxed Newton, Newton on
//! `|f|²/2`, NQN and BNQN) and the three continuous Newton flows from a
//! grid of starting points, and compares the resulting basin images with
//! reduced Voronoi diagrams of the roots.
//!
//! Numerical code is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the scalar at `f64`, which is what the sweeps and the CLI use.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basin_engine;
pub mod cli_io;
pub mod error;
pub mod function_core;
pub mod iterative_methods;
pub mod linalg2;
pub mod newton_flows;
pub mod scalar;
pub mod voronoi;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Complex64 = num_complex::Complex<f64>;
pub type Complex32 = num_complex::Complex<f32>;

pub type Vec2F64 = linalg2::Vec2<f64>;
pub type Sym2F64 = linalg2::Sym2<f64>;
pub type Eigen2F64 = linalg2::Eigen2<f64>;
pub type RootSpecF64 = function_core::RootSpec<f64>;
pub type FunctionExprF64 = function_core::FunctionExpr<f64>;
pub type Jet2F64 = function_core::Jet2<f64>;
pub type ObjectiveJetF64 = function_core::ObjectiveJet<f64>;
pub type MethodConfigF64 = iterative_methods::MethodConfig<f64>;
pub type RunResultF64 = iterative_methods::RunResult<f64>;
pub type IntegratorConfigF64 = newton_flows::IntegratorConfig<f64>;
pub type FlowRunResultF64 = newton_flows::FlowRunResult<f64>;
pub type SiteSetF64 = voronoi::SiteSet<f64>;
pub type GridSpecF64 = basin_engine::GridSpec<f64>;
pub type BasinImageF64 = basin_engine::BasinImage<f64>;
pub type StochasticSpecF64 = basin_engine::StochasticSpec<f64>;

pub type Sym2F32 = linalg2::Sym2<f32>;
pub type FunctionExprF32 = function_core::FunctionExpr<f32>;
pub type MethodConfigF32 = iterative_methods::MethodConfig<f32>;
