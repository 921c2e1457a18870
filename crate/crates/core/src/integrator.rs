//! Iterated leapfrog time integration with origin and outer boundary rules.
//!
//! Each step predicts `f(t+dt)` (from the initial velocity on the first step,
//! by linear extrapolation afterwards), then repeatedly re-solves the
//! three-level difference for the acceleration with `df/dt` re-estimated from
//! the current guess. Interior updates within a pass read only the previous
//! iterate, and both boundary rules are applied at the end of every pass.

use thiserror::Error;

use crate::domain::{
    ConfigError, FieldState, OuterBc, RadialGrid, SimConfig, SimulationResult, Snapshot,
    StopReason,
};
use crate::models::{eval_rhs, RhsError, StencilQuery};
use crate::{lit, Real};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StepError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Rhs(#[from] RhsError),
    #[error("state arrays sized {got}, grid expects {expected}")]
    SizeMismatch { got: usize, expected: usize },
}

/// Even-function origin rule: `f(0) := (4 f(dr) - f(2 dr)) / 3`.
pub fn apply_origin_bc<T: Real>(samples: &mut [T]) {
    debug_assert!(samples.len() >= 3);
    samples[0] = (lit::<T>(4.0) * samples[1] - samples[2]) / lit::<T>(3.0);
}

/// Outer rule at `r = R`.
pub fn apply_outer_bc<T: Real>(samples: &mut [T], kind: OuterBc, grid: &RadialGrid<T>) {
    debug_assert!(samples.len() >= 3);
    let q = samples.len() - 1;
    match kind {
        OuterBc::Flat => samples[q] = samples[q - 1],
        OuterBc::ParabolicSlope => {
            let r_max = grid.r_max();
            let ratio = r_max / (r_max - grid.dr());
            samples[q] = samples[q - 1] + (samples[q - 1] - samples[q - 2]) * ratio;
        }
    }
}

/// Advance the state by one time step.
pub fn step<T: Real>(state: &FieldState<T>, config: &SimConfig<T>) -> Result<FieldState<T>, StepError> {
    let grid = &config.grid;
    let n_nodes = grid.node_count();
    if state.f_curr.len() != n_nodes || state.f_prev.len() != n_nodes {
        return Err(StepError::SizeMismatch { got: state.f_curr.len(), expected: n_nodes });
    }
    let dt = config.dt;
    let next_t = lit::<T>((state.steps_taken + 1) as f64) * dt;

    // Startup hold: the clock advances while the field stays put.
    if state.steps_taken < config.startup_hold_steps {
        return Ok(FieldState {
            t: next_t,
            steps_taken: state.steps_taken + 1,
            f_curr: state.f_curr.clone(),
            f_prev: state.f_prev.clone(),
        });
    }

    let first_dynamic = state.steps_taken == config.startup_hold_steps;

    // On the first dynamic step the previous level is the backward
    // extrapolation `f - v0 dt`, so the centered velocity of the raw
    // predictor equals v0 exactly.
    let prev: Vec<T> = if first_dynamic {
        state.f_curr.iter().map(|&f| f - config.v0 * dt).collect()
    } else {
        state.f_prev.clone()
    };

    let mut guess: Vec<T> = state
        .f_curr
        .iter()
        .zip(prev.iter())
        .map(|(&c, &p)| lit::<T>(2.0) * c - p)
        .collect();

    let two_dt = lit::<T>(2.0) * dt;
    let dt2 = dt * dt;
    let mut next = guess.clone();
    for _ in 0..config.corrector_iterations {
        for q in 1..n_nodes - 1 {
            let fdot = (guess[q] - prev[q]) / two_dt;
            let rhs = eval_rhs(
                config.model,
                StencilQuery { q, samples: &state.f_curr, fdot, grid },
            )?;
            next[q] = lit::<T>(2.0) * state.f_curr[q] - prev[q] + dt2 * rhs;
        }
        apply_origin_bc(&mut next);
        apply_outer_bc(&mut next, config.outer_bc, grid);
        core::mem::swap(&mut guess, &mut next);
    }

    Ok(FieldState {
        t: next_t,
        steps_taken: state.steps_taken + 1,
        f_prev: state.f_curr.clone(),
        f_curr: guess,
    })
}

/// Step index whose time is nearest `target`; ties break to the earlier step.
fn nearest_step<T: Real>(target: T, dt: T, max_step: usize) -> usize {
    let ratio = target / dt;
    let lower = ratio.floor();
    let frac = ratio - lower;
    let lower = lower.to_f64().unwrap_or(0.0).max(0.0) as usize;
    let step = if frac > lit::<T>(0.5) { lower + 1 } else { lower };
    step.min(max_step)
}

/// Run a configuration to its horizon, the collapse threshold, or a
/// non-finite state, recording the origin trace and requested snapshots.
pub fn run<T: Real>(config: &SimConfig<T>) -> Result<SimulationResult<T>, StepError> {
    config.validate()?;
    let dt = config.dt;
    let f0 = config.profile.f0();
    let floor = config.stop_fraction * f0;

    // Total step budget; the horizon test tolerates the rounding of n*dt.
    let horizon = config.t_end * (T::one() + lit::<T>(1e-12));
    let mut total_steps = 0usize;
    while lit::<T>((total_steps + 1) as f64) * dt <= horizon {
        total_steps += 1;
    }

    let snapshot_steps: Vec<usize> = config
        .snapshot_times
        .iter()
        .map(|&s| nearest_step(s, dt, total_steps))
        .collect();

    let mut state = FieldState::initial(config);
    let mut origin_trace = Vec::with_capacity(total_steps + 1);
    origin_trace.push((state.t, state.f_curr[0]));
    let mut snapshots: Vec<Option<Snapshot<T>>> = vec![None; snapshot_steps.len()];
    let capture = |state: &FieldState<T>, snaps: &mut Vec<Option<Snapshot<T>>>| {
        for (slot, &target) in snaps.iter_mut().zip(snapshot_steps.iter()) {
            if target == state.steps_taken && slot.is_none() {
                *slot = Some(Snapshot { t: state.t, samples: state.f_curr.clone() });
            }
        }
    };
    capture(&state, &mut snapshots);

    let mut stop_reason = StopReason::ReachedTEnd;
    while state.steps_taken < total_steps {
        state = step(&state, config)?;
        origin_trace.push((state.t, state.f_curr[0]));
        capture(&state, &mut snapshots);
        if !state.f_curr.iter().all(|v| v.is_finite()) {
            stop_reason = StopReason::NonFinite;
            break;
        }
        if state.f_curr[0] <= floor {
            stop_reason = StopReason::OriginBelowThreshold;
            break;
        }
    }

    // Targets past an early stop capture the last state reached.
    let snapshots = snapshots
        .into_iter()
        .map(|slot| {
            slot.unwrap_or_else(|| Snapshot { t: state.t, samples: state.f_curr.clone() })
        })
        .collect();

    Ok(SimulationResult { origin_trace, snapshots, stop_reason })
}
