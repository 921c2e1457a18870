//! Shared domain types: grids, run configuration, field states, run results.

use thiserror::Error;

use crate::{lit, Real};

/// Errors raised while constructing or validating run descriptions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("grid spacing must be positive and finite, got {0}")]
    BadSpacing(String),
    #[error("outer radius must be positive and finite, got {0}")]
    BadRadius(String),
    #[error("grid needs at least 4 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("time step must be positive and finite, got {0}")]
    BadTimeStep(String),
    #[error("initial height must be positive, got {0}")]
    BadInitialHeight(String),
    #[error("horizon t_end must be non-negative and finite, got {0}")]
    BadHorizon(String),
    #[error("corrector_iterations must be at least 1")]
    NoCorrectorIterations,
    #[error("stop_fraction must lie in (0, 1), got {0}")]
    BadStopFraction(String),
    #[error("initial velocity must be finite, got {0}")]
    BadVelocity(String),
}

/// Non-fatal findings from [`SimConfig::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConfigWarning {
    /// `dt` exceeds `dr^(3/2) / 150`, the conservative bound under which the
    /// scheme's growing modes stay controlled.
    TimeStepAboveStabilityBound,
}

/// Uniform radial grid: nodes at `r = q * dr` for `q = 0..=Q`.
///
/// Radii are always recomputed as `q * dr` rather than accumulated, so the
/// near-origin stencil coefficients are bit-reproducible.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialGrid<T> {
    dr: T,
    node_count: usize,
}

impl<T: Real> RadialGrid<T> {
    /// Build a grid from a spacing and a requested outer radius.
    ///
    /// The node count is `round(r_max / dr) + 1` and the outer radius is
    /// adjusted to `(node_count - 1) * dr`.
    pub fn new(dr: T, r_max: T) -> Result<Self, ConfigError> {
        if !(dr.is_finite() && dr > T::zero()) {
            return Err(ConfigError::BadSpacing(format!("{dr}")));
        }
        if !(r_max.is_finite() && r_max > T::zero()) {
            return Err(ConfigError::BadRadius(format!("{r_max}")));
        }
        let segments = (r_max / dr).round();
        let node_count = segments.to_usize().map(|n| n + 1).unwrap_or(0);
        if node_count < 4 {
            return Err(ConfigError::TooFewNodes(node_count));
        }
        Ok(Self { dr, node_count })
    }

    pub fn dr(&self) -> T {
        self.dr
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// Index of the outermost node `Q`.
    pub fn last_index(&self) -> usize {
        self.node_count - 1
    }

    /// Radius of node `q`, exactly `q * dr`.
    pub fn radius(&self, q: usize) -> T {
        lit::<T>(q as f64) * self.dr
    }

    pub fn r_max(&self) -> T {
        self.radius(self.last_index())
    }
}

/// The three radial wave equations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    /// Gauge-field collapse in 4+1 dimensions; scale parameter enters as `f + r^2`.
    Ym41,
    /// Planar sigma-model, unit winding; scale enters as `f^2 + r^2`.
    Cp1Q1,
    /// Planar sigma-model, double winding; scale enters as `f^2 + r^4`.
    Cp1Q2,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::Ym41, ModelKind::Cp1Q1, ModelKind::Cp1Q2];

    /// Exponent `n` of the radial operator `r^-n d/dr r^n d/dr` this model uses.
    pub fn radial_exponent(&self) -> i32 {
        match self {
            ModelKind::Ym41 | ModelKind::Cp1Q2 => 5,
            ModelKind::Cp1Q1 => 3,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Ym41 => "ym41",
            ModelKind::Cp1Q1 => "cp1q1",
            ModelKind::Cp1Q2 => "cp1q2",
        }
    }
}

/// Initial field shape at `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialProfile<T> {
    /// `f(r, 0) = f0`.
    Flat { f0: T },
    /// `f(r, 0) = p * r^2 + f0`.
    Parabolic { f0: T, p: T },
}

impl<T: Real> InitialProfile<T> {
    pub fn f0(&self) -> T {
        match *self {
            InitialProfile::Flat { f0 } | InitialProfile::Parabolic { f0, .. } => f0,
        }
    }

    pub fn evaluate(&self, r: T) -> T {
        match *self {
            InitialProfile::Flat { f0 } => f0,
            InitialProfile::Parabolic { f0, p } => p * r * r + f0,
        }
    }
}

/// Outer boundary rule applied at `r = R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OuterBc {
    /// `f(Q) := f(Q-1)`.
    Flat,
    /// `f(Q)` chosen so the one-sided slope at `R` is `R / (R - dr)` times
    /// the one-sided slope at `R - dr`.
    ParabolicSlope,
}

/// Full description of one evolution run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig<T> {
    pub model: ModelKind,
    pub grid: RadialGrid<T>,
    pub dt: T,
    /// Initial velocity `df/dt(r, 0)`, uniform in `r`.
    pub v0: T,
    pub profile: InitialProfile<T>,
    pub t_end: T,
    pub outer_bc: OuterBc,
    /// Corrector passes per step; the answer stops changing after about six.
    pub corrector_iterations: usize,
    /// The run halts once `f(0, t) <= stop_fraction * f0`.
    pub stop_fraction: T,
    pub snapshot_times: Vec<T>,
    /// Number of initial steps during which the state is held fixed while the
    /// clock advances. Zero for ordinary runs; some historical unit-winding
    /// traces carry a five-step startup delay that this field reproduces.
    pub startup_hold_steps: usize,
}

impl<T: Real> SimConfig<T> {
    pub fn new(
        model: ModelKind,
        grid: RadialGrid<T>,
        dt: T,
        v0: T,
        profile: InitialProfile<T>,
        t_end: T,
    ) -> Self {
        Self {
            model,
            grid,
            dt,
            v0,
            profile,
            t_end,
            outer_bc: OuterBc::Flat,
            corrector_iterations: 6,
            stop_fraction: lit(1e-3),
            snapshot_times: Vec::new(),
            startup_hold_steps: 0,
        }
    }

    /// Check invariants; hard violations are errors, the time-step stability
    /// bound is reported as a warning.
    pub fn validate(&self) -> Result<Vec<ConfigWarning>, ConfigError> {
        if !(self.dt.is_finite() && self.dt > T::zero()) {
            return Err(ConfigError::BadTimeStep(format!("{}", self.dt)));
        }
        if !self.v0.is_finite() {
            return Err(ConfigError::BadVelocity(format!("{}", self.v0)));
        }
        if !(self.profile.f0().is_finite() && self.profile.f0() > T::zero()) {
            return Err(ConfigError::BadInitialHeight(format!("{}", self.profile.f0())));
        }
        if !(self.t_end.is_finite() && self.t_end >= T::zero()) {
            return Err(ConfigError::BadHorizon(format!("{}", self.t_end)));
        }
        if self.corrector_iterations < 1 {
            return Err(ConfigError::NoCorrectorIterations);
        }
        if !(self.stop_fraction > T::zero() && self.stop_fraction < T::one()) {
            return Err(ConfigError::BadStopFraction(format!("{}", self.stop_fraction)));
        }
        let mut warnings = Vec::new();
        let bound = self.grid.dr().powf(lit(1.5)) / lit(150.0);
        if self.dt > bound {
            warnings.push(ConfigWarning::TimeStepAboveStabilityBound);
        }
        Ok(warnings)
    }
}

/// Two stored time levels of the discretized field.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState<T> {
    pub(crate) t: T,
    pub(crate) steps_taken: usize,
    pub(crate) f_curr: Vec<T>,
    pub(crate) f_prev: Vec<T>,
}

impl<T: Real> FieldState<T> {
    /// Initial state: both stored levels hold the profile, `t = 0`.
    ///
    /// The first step supplies the velocity through its predictor, so the
    /// initial state depends on neither `dt` nor `v0`.
    pub fn initial(config: &SimConfig<T>) -> Self {
        let grid = &config.grid;
        let samples: Vec<T> = (0..grid.node_count())
            .map(|q| config.profile.evaluate(grid.radius(q)))
            .collect();
        Self {
            t: T::zero(),
            steps_taken: 0,
            f_curr: samples.clone(),
            f_prev: samples,
        }
    }

    pub fn t(&self) -> T {
        self.t
    }

    pub fn steps_taken(&self) -> usize {
        self.steps_taken
    }

    /// Field samples at time `t`.
    pub fn samples(&self) -> &[T] {
        &self.f_curr
    }

    /// Field samples at time `t - dt`.
    pub fn prev_samples(&self) -> &[T] {
        &self.f_prev
    }
}

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    ReachedTEnd,
    OriginBelowThreshold,
    NonFinite,
}

/// One captured spatial profile.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot<T> {
    pub t: T,
    pub samples: Vec<T>,
}

/// Outputs of a full run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult<T> {
    /// `(t, f(0, t))` for every step, starting at `t = 0`.
    pub origin_trace: Vec<(T, T)>,
    /// Profiles captured at the step nearest each requested snapshot time.
    pub snapshots: Vec<Snapshot<T>>,
    pub stop_reason: StopReason,
}

impl<T: Real> SimulationResult<T> {
    /// Final recorded time.
    pub fn t_final(&self) -> T {
        self.origin_trace.last().map(|&(t, _)| t).unwrap_or_else(T::zero)
    }
}
