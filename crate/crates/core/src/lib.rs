//! Simulation and analysis toolkit for shrinking radial solitons.
//!
//! Three spherically symmetric nonlinear wave equations share a moduli space
//! of constant static solutions `f(r, t) = c` and collapse toward the
//! singular configuration `f = 0` when started with a small inward velocity.
//! This crate evolves them with an iterated leapfrog scheme built on the
//! flux-form differencing of the singular radial operator
//! `r^-n d/dr r^n d/dr`, and provides the analysis machinery used to
//! characterize the collapse: least-squares fits (lines, vertex parabolas,
//! axis-aligned conics), effective-Lagrangian predictions of the collapse
//! trajectory, linearized near-origin stability spectra, plane-wave growth
//! factors of the discrete scheme, and grid-refinement convergence tables.
//!
//! Numerics are generic over the scalar type through the [`Real`] trait;
//! `f64` is the type every reported value was produced with, and the crate
//! root re-exports concrete `f64` aliases for the main run types.

// negated comparisons are deliberate where NaN must fall into the error path
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod convergence;
pub mod domain;
pub mod fitting;
pub mod integrator;
pub mod models;
pub mod predictions;
pub mod quad;
pub mod stability;

mod eigen;

use core::fmt::{Debug, Display, LowerExp};
use core::iter::Sum;
use core::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar the numerics are generic over: `f32` or `f64`.
pub trait Real:
    Float
    + FromPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Shorthand for lifting an `f64` constant into the working scalar type.
#[inline]
pub(crate) fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("constant not representable in scalar type")
}

pub use domain::{
    FieldState, InitialProfile, ModelKind, OuterBc, RadialGrid, SimConfig, SimulationResult,
    StopReason,
};

/// `f64` instantiations of the run types, the precision all reported values use.
pub type Grid64 = RadialGrid<f64>;
pub type Config64 = SimConfig<f64>;
pub type State64 = FieldState<f64>;
pub type Result64 = SimulationResult<f64>;
