//! Spatial right-hand sides of the three equations.
//!
//! The second-derivative-plus-drag part `f'' + n f'/r` is differenced in
//! flux form, `r^-n [ (r+d/2)^n (f(q+1)-f(q))/d - (r-d/2)^n (f(q)-f(q-1))/d ] / d`,
//! which keeps the origin stable where separate centered differences on `f''`
//! and `f'/r` do not. Every other derivative is a plain centered difference.

use thiserror::Error;

use crate::domain::{ModelKind, RadialGrid};
use crate::{lit, Real};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RhsError {
    #[error("node {q} is not interior (valid range 1..={max})")]
    NotInterior { q: usize, max: usize },
    #[error("radial operator exponent must be 3 or 5, got {0}")]
    BadExponent(i32),
    #[error("degenerate denominator at node {q}: {denominator}")]
    DegenerateDenominator { q: usize, denominator: String },
}

/// Per-node evaluation context for [`eval_rhs`].
#[derive(Debug, Clone, Copy)]
pub struct StencilQuery<'a, T> {
    /// Interior node index, `1 <= q <= Q-1`.
    pub q: usize,
    /// Field samples at the current time level.
    pub samples: &'a [T],
    /// Estimate of `df/dt` at node `q`.
    pub fdot: T,
    pub grid: &'a RadialGrid<T>,
}

/// Flux-form discretization of `f'' + n f'/r` at interior node `q`.
pub fn natural_radial_operator<T: Real>(
    samples: &[T],
    q: usize,
    n: i32,
    dr: T,
) -> Result<T, RhsError> {
    if n != 3 && n != 5 {
        return Err(RhsError::BadExponent(n));
    }
    if q == 0 || q + 1 >= samples.len() {
        return Err(RhsError::NotInterior { q, max: samples.len().saturating_sub(2) });
    }
    Ok(natural_radial_operator_unchecked(samples, q, n, dr))
}

#[inline]
pub(crate) fn natural_radial_operator_unchecked<T: Real>(
    samples: &[T],
    q: usize,
    n: i32,
    dr: T,
) -> T {
    let r = lit::<T>(q as f64) * dr;
    let half = lit::<T>(0.5) * dr;
    let outward = (r + half).powi(n) * (samples[q + 1] - samples[q]) / dr;
    let inward = (r - half).powi(n) * (samples[q] - samples[q - 1]) / dr;
    (outward - inward) / (dr * r.powi(n))
}

/// Full acceleration `d^2f/dt^2` at an interior node.
pub fn eval_rhs<T: Real>(model: ModelKind, query: StencilQuery<'_, T>) -> Result<T, RhsError> {
    let StencilQuery { q, samples, fdot, grid } = query;
    let last = grid.node_count() - 1;
    if q == 0 || q >= last || samples.len() != grid.node_count() {
        return Err(RhsError::NotInterior { q, max: last.saturating_sub(1) });
    }
    let dr = grid.dr();
    let r = grid.radius(q);
    let f = samples[q];
    let fprime = (samples[q + 1] - samples[q - 1]) / (lit::<T>(2.0) * dr);
    let two = lit::<T>(2.0);
    match model {
        ModelKind::Ym41 => {
            let denom = f + r * r;
            if denom == T::zero() || !denom.is_finite() {
                return Err(RhsError::DegenerateDenominator { q, denominator: format!("{denom}") });
            }
            let lap = natural_radial_operator_unchecked(samples, q, 5, dr);
            Ok(lap - lit::<T>(8.0) * r * fprime / denom + two * (fdot * fdot - fprime * fprime) / denom)
        }
        ModelKind::Cp1Q1 => {
            let denom = f * f + r * r;
            if denom == T::zero() || !denom.is_finite() {
                return Err(RhsError::DegenerateDenominator { q, denominator: format!("{denom}") });
            }
            let lap = natural_radial_operator_unchecked(samples, q, 3, dr);
            Ok(lap - lit::<T>(4.0) * r * fprime / denom
                + two * f * (fdot * fdot - fprime * fprime) / denom)
        }
        ModelKind::Cp1Q2 => {
            let r2 = r * r;
            let denom = f * f + r2 * r2;
            if denom == T::zero() || !denom.is_finite() {
                return Err(RhsError::DegenerateDenominator { q, denominator: format!("{denom}") });
            }
            let lap = natural_radial_operator_unchecked(samples, q, 5, dr);
            Ok(lap - lit::<T>(8.0) * r2 * r * fprime / denom
                + two * f * (fdot * fdot - fprime * fprime) / denom)
        }
    }
}
