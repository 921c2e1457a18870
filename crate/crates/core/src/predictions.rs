//! Closed-form collapse predictions from the restricted (effective)
//! Lagrangians, the unit-winding trajectory integral and its inversion, and
//! the kinetic-constant / cutoff-radius extraction from origin traces.

use thiserror::Error;

use crate::domain::ModelKind;
use crate::fitting::{fit_line, LineFit};
use crate::quad::adaptive_simpson;
use crate::{lit, Real};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PredictionError {
    #[error("no collapse is predicted for zero initial velocity")]
    ZeroVelocity,
    #[error("inputs must be positive, got {0}")]
    NonPositiveInput(String),
    #[error("{0:?} has no closed-form collapse parabola")]
    UnsupportedModel(ModelKind),
    #[error("times must increase from zero")]
    BadTimes,
    #[error("trace too short for centered derivative estimates")]
    TraceTooShort,
    #[error("regression slope {0} is not negative; no collapse signature")]
    NoCollapseSignature(String),
    #[error(transparent)]
    Fit(#[from] crate::fitting::FitError),
}

/// Collapse parabola `f(0, t) = a (t - t_collapse)^2` predicted for the
/// purely kinetic restricted Lagrangian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictedParabola<T> {
    /// `v0^2 / (4 f0)`
    pub a: T,
    /// `2 f0 / |v0|`
    pub t_collapse: T,
}

impl<T: Real> PredictedParabola<T> {
    pub fn evaluate(&self, t: T) -> T {
        let d = t - self.t_collapse;
        self.a * d * d
    }
}

/// Parabolic spatial profile `f(r, t) = p r^2 + h(t)` that the collapsing
/// solutions settle into, with `h(t) = a (t - t_collapse)^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileParabola<T> {
    /// Curvature; `-v0^2 / (8 f0)` by default.
    pub p: T,
    pub a: T,
    pub t_collapse: T,
}

impl<T: Real> ProfileParabola<T> {
    /// Origin height `h(t)`.
    pub fn height(&self, t: T) -> T {
        let d = t - self.t_collapse;
        self.a * d * d
    }

    pub fn evaluate(&self, r: T, t: T) -> T {
        self.p * r * r + self.height(t)
    }

    /// Same profile with the curvature sign flipped to `+v0^2 / (8 f0)`.
    pub fn with_positive_curvature(mut self) -> Self {
        self.p = self.p.abs();
        self
    }
}

/// Empirical straight-line characterization of the unit-winding collapse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmpiricalLineLaw<T> {
    /// `1.2 f0 / |v0|`
    pub t_zero: T,
    /// `-0.75 |v0|` (the trace decreases)
    pub slope: T,
}

/// Predicted origin trajectory from the cutoff kinetic norm.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianTrajectory<T> {
    pub c: T,
    pub r_eff: T,
    pub points: Vec<TrajectoryPoint<T>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint<T> {
    pub t: T,
    pub f: T,
    /// Set when `t` lies beyond the total collapse time; `f` is reported as 0.
    pub collapsed: bool,
}

/// Kinetic-constant and cutoff-radius extraction result.
#[derive(Debug, Clone, PartialEq)]
pub struct CrExtraction<T> {
    pub c: T,
    pub r_eff: T,
    pub line: LineFit<T>,
}

/// Window controls for [`extract_c_r`]: fractions of the trace dropped at
/// each end before regressing (the relation bends near both endpoints).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrOptions<T> {
    pub skip_head_fraction: T,
    pub skip_tail_fraction: T,
}

impl<T: Real> Default for CrOptions<T> {
    fn default() -> Self {
        Self { skip_head_fraction: lit(0.1), skip_tail_fraction: lit(0.1) }
    }
}

/// `a = v0^2 / (4 f0)`, `t_collapse = 2 f0 / |v0|`; holds for the two models
/// whose restricted Lagrangian is `(const) * fdot^2 / f`.
pub fn predict_parabola<T: Real>(
    model: ModelKind,
    f0: T,
    v0: T,
) -> Result<PredictedParabola<T>, PredictionError> {
    if model == ModelKind::Cp1Q1 {
        return Err(PredictionError::UnsupportedModel(model));
    }
    if v0 == T::zero() {
        return Err(PredictionError::ZeroVelocity);
    }
    if !(f0 > T::zero()) {
        return Err(PredictionError::NonPositiveInput(format!("f0 = {f0}")));
    }
    let four = lit::<T>(4.0);
    Ok(PredictedParabola { a: v0 * v0 / (four * f0), t_collapse: lit::<T>(2.0) * f0 / v0.abs() })
}

/// Spatial profile matching the collapse parabola: `p = -v0^2 / (8 f0)`.
pub fn profile_parabola<T: Real>(f0: T, v0: T) -> Result<ProfileParabola<T>, PredictionError> {
    if v0 == T::zero() {
        return Err(PredictionError::ZeroVelocity);
    }
    if !(f0 > T::zero()) {
        return Err(PredictionError::NonPositiveInput(format!("f0 = {f0}")));
    }
    let a = v0 * v0 / (lit::<T>(4.0) * f0);
    Ok(ProfileParabola {
        p: -v0 * v0 / (lit::<T>(8.0) * f0),
        a,
        t_collapse: lit::<T>(2.0) * f0 / v0.abs(),
    })
}

/// Residual left when the parabolic profile is substituted into the model
/// equation and both sides are put over the common denominator.
pub fn profile_residual<T: Real>(
    model: ModelKind,
    f0: T,
    v0: T,
    r: T,
    t: T,
) -> Result<T, PredictionError> {
    if v0 == T::zero() {
        return Err(PredictionError::ZeroVelocity);
    }
    if !(f0 > T::zero()) {
        return Err(PredictionError::NonPositiveInput(format!("f0 = {f0}")));
    }
    match model {
        ModelKind::Ym41 => {
            let a = v0 * v0 / (lit::<T>(4.0) * f0);
            Ok(lit::<T>(2.0) * a * a * r * r)
        }
        ModelKind::Cp1Q2 => {
            let tau = t - lit::<T>(2.0) * f0 / v0.abs();
            let v6 = v0.powi(6);
            let f3 = f0.powi(3);
            Ok(v6 * r.powi(4) / (lit::<T>(64.0) * f3)
                - v6 * r * r * tau * tau / (lit::<T>(32.0) * f3))
        }
        ModelKind::Cp1Q1 => Err(PredictionError::UnsupportedModel(model)),
    }
}

/// Cutoff kinetic norm `ln(1 + R^2/f^2) - R^2/(f^2 + R^2)`.
pub fn kinetic_norm_q1<T: Real>(f: T, r_cut: T) -> Result<T, PredictionError> {
    if !(f > T::zero() && r_cut > T::zero()) {
        return Err(PredictionError::NonPositiveInput(format!("f = {f}, R = {r_cut}")));
    }
    let ratio = r_cut / f;
    let r2 = r_cut * r_cut;
    Ok((T::one() + ratio * ratio).ln() - r2 / (f * f + r2))
}

/// Empirical constants `t_zero = 1.2 f0/|v0|`, `slope = -0.75 |v0|`.
pub fn empirical_line_law_q1<T: Real>(f0: T, v0: T) -> Result<EmpiricalLineLaw<T>, PredictionError> {
    if v0 == T::zero() {
        return Err(PredictionError::ZeroVelocity);
    }
    if !(f0 > T::zero()) {
        return Err(PredictionError::NonPositiveInput(format!("f0 = {f0}")));
    }
    Ok(EmpiricalLineLaw {
        t_zero: lit::<T>(1.2) * f0 / v0.abs(),
        slope: -lit::<T>(0.75) * v0.abs(),
    })
}

/// Invert the conserved-energy relation: find `f(t)` with
/// `integral_{f(t)}^{f0} sqrt(kinetic_norm(u, R)) du = c t`.
///
/// The cumulative integral is tabulated on a geometric grid in `f` (the
/// integrand steepens only logarithmically toward `f = 0`), each panel by
/// adaptive Simpson; queries bisect the table and then the panel.
pub fn trajectory_q1<T: Real>(
    f0: T,
    c: T,
    r_cut: T,
    times: &[T],
) -> Result<LagrangianTrajectory<T>, PredictionError> {
    if !(f0 > T::zero() && c > T::zero() && r_cut > T::zero()) {
        return Err(PredictionError::NonPositiveInput(format!("f0 = {f0}, c = {c}, R = {r_cut}")));
    }
    if let Some(first) = times.first() {
        if *first < T::zero() {
            return Err(PredictionError::BadTimes);
        }
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(PredictionError::BadTimes);
    }

    let speed = |f: T| kinetic_norm_q1(f, r_cut).map(|k| k.sqrt());
    let integrand = move |f: T| speed(f).unwrap_or_else(|_| T::zero());

    // Geometric grid from f0 down to ~1e-14 f0; the tail below that
    // contributes less than the quadrature tolerance.
    const PANELS: usize = 600;
    let floor = f0 * lit::<T>(1e-14);
    let ratio = (floor / f0).powf(T::one() / lit::<T>(PANELS as f64));
    let tol = lit::<T>(1e-10) * f0 / lit::<T>(PANELS as f64);

    let mut nodes = Vec::with_capacity(PANELS + 1);
    let mut cumulative = Vec::with_capacity(PANELS + 1);
    let mut acc = T::zero();
    let mut upper = f0;
    nodes.push(f0);
    cumulative.push(T::zero());
    for i in 1..=PANELS {
        let lower = if i == PANELS { floor } else { f0 * ratio.powi(i as i32) };
        acc += adaptive_simpson(&integrand, lower, upper, tol);
        nodes.push(lower);
        cumulative.push(acc);
        upper = lower;
    }
    let total = acc;

    let mut points = Vec::with_capacity(times.len());
    for &t in times {
        let target = c * t;
        if t == T::zero() {
            points.push(TrajectoryPoint { t, f: f0, collapsed: false });
            continue;
        }
        if target >= total {
            points.push(TrajectoryPoint { t, f: T::zero(), collapsed: true });
            continue;
        }
        // bracketing panel: cumulative[i] <= target < cumulative[i+1]
        let mut lo = 0usize;
        let mut hi = PANELS;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if cumulative[mid] <= target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        // bisect inside the panel [nodes[hi], nodes[lo]]
        let mut f_hi = nodes[lo]; // larger f, smaller cumulative
        let mut f_lo = nodes[hi];
        let mut g_hi = cumulative[lo];
        let mut g_lo = cumulative[hi];
        let eps = lit::<T>(1e-10) * f0;
        while f_hi - f_lo > eps {
            let mid = (f_hi + f_lo) * lit::<T>(0.5);
            let g_mid = cumulative[lo] + adaptive_simpson(&integrand, mid, nodes[lo], tol);
            if g_mid <= target {
                f_hi = mid;
                g_hi = g_mid;
            } else {
                f_lo = mid;
                g_lo = g_mid;
            }
        }
        let f = if g_lo == g_hi {
            (f_hi + f_lo) * lit::<T>(0.5)
        } else {
            f_hi + (f_lo - f_hi) * (target - g_hi) / (g_lo - g_hi)
        };
        points.push(TrajectoryPoint { t, f, collapsed: false });
    }

    Ok(LagrangianTrajectory { c, r_eff: r_cut, points })
}

/// Regress `1/fdot^2` against `ln f` over the trimmed trace and invert
/// `slope = -2/c^2`, `intercept = (2 ln R - 1)/c^2`.
pub fn extract_c_r<T: Real>(
    trace: &[(T, T)],
    options: &CrOptions<T>,
) -> Result<CrExtraction<T>, PredictionError> {
    if trace.len() < 8 {
        return Err(PredictionError::TraceTooShort);
    }
    let n = trace.len();
    let head = (lit::<T>(n as f64) * options.skip_head_fraction)
        .to_usize()
        .unwrap_or(0)
        .max(1);
    let tail = (lit::<T>(n as f64) * (T::one() - options.skip_tail_fraction))
        .to_usize()
        .unwrap_or(n)
        .min(n - 1);
    if head + 2 >= tail {
        return Err(PredictionError::TraceTooShort);
    }

    let mut points = Vec::with_capacity(tail - head);
    for i in head..tail {
        let (t_prev, f_prev) = trace[i - 1];
        let (_, f) = trace[i];
        let (t_next, f_next) = trace[i + 1];
        if !(f > T::zero()) {
            continue;
        }
        let fdot = (f_next - f_prev) / (t_next - t_prev);
        if fdot == T::zero() || !fdot.is_finite() {
            continue;
        }
        points.push((f.ln(), T::one() / (fdot * fdot)));
    }
    if points.len() < 2 {
        return Err(PredictionError::TraceTooShort);
    }
    let line = fit_line(&points)?;
    if !(line.m < T::zero()) {
        return Err(PredictionError::NoCollapseSignature(format!("{}", line.m)));
    }
    let c = (-lit::<T>(2.0) / line.m).sqrt();
    let r_eff = (-line.b / line.m + lit::<T>(0.5)).exp();
    Ok(CrExtraction { c, r_eff, line })
}
