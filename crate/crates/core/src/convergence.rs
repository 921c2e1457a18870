//! Grid-refinement harness: errors against a reference run at probe radii,
//! with log-quotient order estimates between consecutive rows.

use thiserror::Error;

use crate::domain::{RadialGrid, SimConfig, SimulationResult, StopReason};
use crate::integrator::{run, StepError};
use crate::{lit, Real};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConvergenceError {
    #[error("reference step {reference} must be smaller than every varied step (got {step})")]
    ReferenceNotFinest { reference: String, step: String },
    #[error("probe radius {radius} is not a node of the dr = {dr} grid")]
    ProbeNotOnGrid { radius: String, dr: String },
    #[error("probe {label} falls outside the grid")]
    ProbeOutsideGrid { label: String },
    #[error("no snapshot captured at the probe time")]
    MissingSnapshot,
    #[error(transparent)]
    Step(#[from] StepError),
}

/// Sampling location for error measurement.
///
/// `node_offset` shifts the sampled node from `round(radius / dr)`; the
/// recorded reference tables read their nonzero-radius indicator one node
/// inside the nominal radius, which `node_offset = -1` reproduces on any grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Probe<T> {
    pub radius: T,
    pub node_offset: i64,
    pub label: String,
}

impl<T: Real> Probe<T> {
    pub fn at(radius: T, label: impl Into<String>) -> Self {
        Self { radius, node_offset: 0, label: label.into() }
    }

    pub fn inside(radius: T, label: impl Into<String>) -> Self {
        Self { radius, node_offset: -1, label: label.into() }
    }

    fn sample_index(&self, grid: &RadialGrid<T>) -> Result<usize, ConvergenceError> {
        let ratio = self.radius / grid.dr();
        let nearest = ratio.round();
        if (ratio - nearest).abs() > lit::<T>(1e-6) {
            return Err(ConvergenceError::ProbeNotOnGrid {
                radius: format!("{}", self.radius),
                dr: format!("{}", grid.dr()),
            });
        }
        let base = nearest.to_isize().ok_or_else(|| ConvergenceError::ProbeOutsideGrid {
            label: self.label.clone(),
        })?;
        let idx = base + self.node_offset as isize;
        if idx < 0 || idx as usize >= grid.node_count() {
            return Err(ConvergenceError::ProbeOutsideGrid { label: self.label.clone() });
        }
        Ok(idx as usize)
    }
}

/// One refinement row.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow<T> {
    /// The varied step (dt or dr).
    pub step: T,
    /// `step - reference_step`, the abscissa of the error model.
    pub h: T,
    /// Field value at each probe.
    pub values: Vec<T>,
    /// `|value - reference_value|` per probe.
    pub errors: Vec<T>,
    /// `ln(E_prev/E_this) / ln(h_prev/h_this)` per probe; absent on the
    /// first row or where the quotient is undefined.
    pub quotients: Vec<Option<T>>,
    pub stop_reason: StopReason,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable<T> {
    pub probes: Vec<Probe<T>>,
    pub reference_step: T,
    pub reference_values: Vec<T>,
    pub rows: Vec<ConvergenceRow<T>>,
}

pub(crate) fn log_quotient<T: Real>(e_a: T, e_b: T, h_a: T, h_b: T) -> Option<T> {
    if e_a > T::zero() && e_b > T::zero() && h_a > T::zero() && h_b > T::zero() && h_a != h_b {
        Some((e_a / e_b).ln() / (h_a / h_b).ln())
    } else {
        None
    }
}

/// Run each config on its own thread (up to `threads` workers), preserving
/// input order in the output.
fn run_many<T: Real>(
    configs: &[SimConfig<T>],
    threads: usize,
) -> Vec<Result<SimulationResult<T>, StepError>> {
    let threads = threads.max(1).min(configs.len().max(1));
    if threads == 1 || configs.len() < 2 {
        return configs.iter().map(run).collect();
    }
    let next = std::sync::atomic::AtomicUsize::new(0);
    let mut slots: Vec<Option<Result<SimulationResult<T>, StepError>>> =
        (0..configs.len()).map(|_| None).collect();
    let slot_refs: Vec<std::sync::Mutex<&mut Option<_>>> =
        slots.iter_mut().map(std::sync::Mutex::new).collect();
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if i >= configs.len() {
                    break;
                }
                let out = run(&configs[i]);
                **slot_refs[i].lock().unwrap() = Some(out);
            });
        }
    });
    slots.into_iter().map(|s| s.expect("worker filled every slot")).collect()
}

fn probe_values<T: Real>(
    result: &SimulationResult<T>,
    grid: &RadialGrid<T>,
    probes: &[Probe<T>],
) -> Result<Vec<T>, ConvergenceError> {
    let snapshot = result.snapshots.first().ok_or(ConvergenceError::MissingSnapshot)?;
    probes
        .iter()
        .map(|p| Ok(snapshot.samples[p.sample_index(grid)?]))
        .collect()
}

fn assemble<T: Real>(
    probes: &[Probe<T>],
    reference_step: T,
    reference_values: Vec<T>,
    steps: &[T],
    outcomes: Vec<(Vec<T>, StopReason)>,
) -> ConvergenceTable<T> {
    let mut rows: Vec<ConvergenceRow<T>> = Vec::with_capacity(steps.len());
    for (&step, (values, stop_reason)) in steps.iter().zip(outcomes) {
        let h = step - reference_step;
        let errors: Vec<T> = values
            .iter()
            .zip(&reference_values)
            .map(|(&v, &r)| (v - r).abs())
            .collect();
        let quotients: Vec<Option<T>> = match rows.last() {
            None => vec![None; probes.len()],
            Some(prev) => errors
                .iter()
                .zip(&prev.errors)
                .map(|(&e_b, &e_a)| log_quotient(e_a, e_b, prev.h, h))
                .collect(),
        };
        rows.push(ConvergenceRow { step, h, values, errors, quotients, stop_reason });
    }
    ConvergenceTable {
        probes: probes.to_vec(),
        reference_step,
        reference_values,
        rows,
    }
}

/// Time refinement: every run shares the base grid, model, and initial data;
/// `dt` takes the listed values and errors are measured against the
/// `reference_dt` run at time `t_probe`.
pub fn refine_time<T: Real>(
    base: &SimConfig<T>,
    dt_values: &[T],
    reference_dt: T,
    probes: &[Probe<T>],
    t_probe: T,
    threads: usize,
) -> Result<ConvergenceTable<T>, ConvergenceError> {
    for &dt in dt_values {
        if reference_dt > dt {
            return Err(ConvergenceError::ReferenceNotFinest {
                reference: format!("{reference_dt}"),
                step: format!("{dt}"),
            });
        }
    }
    for probe in probes {
        probe.sample_index(&base.grid)?;
    }
    let make = |dt: T| {
        let mut config = base.clone();
        config.dt = dt;
        config.t_end = t_probe;
        config.snapshot_times = vec![t_probe];
        config
    };
    let mut configs = vec![make(reference_dt)];
    configs.extend(dt_values.iter().map(|&dt| make(dt)));
    let mut results = run_many(&configs, threads).into_iter();
    let reference = results.next().unwrap()?;
    let reference_values = probe_values(&reference, &base.grid, probes)?;
    let outcomes = results
        .map(|r| {
            let r = r?;
            Ok((probe_values(&r, &base.grid, probes)?, r.stop_reason))
        })
        .collect::<Result<Vec<_>, ConvergenceError>>()?;
    Ok(assemble(probes, reference_dt, reference_values, dt_values, outcomes))
}

/// Space refinement: `dr` takes the listed values on a fixed outer radius;
/// probe radii must be nodes of every grid involved.
pub fn refine_space<T: Real>(
    base: &SimConfig<T>,
    dr_values: &[T],
    reference_dr: T,
    probes: &[Probe<T>],
    t_probe: T,
    threads: usize,
) -> Result<ConvergenceTable<T>, ConvergenceError> {
    for &dr in dr_values {
        if reference_dr > dr {
            return Err(ConvergenceError::ReferenceNotFinest {
                reference: format!("{reference_dr}"),
                step: format!("{dr}"),
            });
        }
    }
    let r_max = base.grid.r_max();
    let make = |dr: T| -> Result<(SimConfig<T>, RadialGrid<T>), ConvergenceError> {
        let grid = RadialGrid::new(dr, r_max).map_err(StepError::from)?;
        for probe in probes {
            probe.sample_index(&grid)?;
        }
        let mut config = base.clone();
        config.grid = grid;
        config.t_end = t_probe;
        config.snapshot_times = vec![t_probe];
        Ok((config, grid))
    };
    let mut configs = Vec::with_capacity(dr_values.len() + 1);
    let mut grids = Vec::with_capacity(dr_values.len() + 1);
    for &dr in core::iter::once(&reference_dr).chain(dr_values) {
        let (config, grid) = make(dr)?;
        configs.push(config);
        grids.push(grid);
    }
    let results = run_many(&configs, threads);
    let mut iter = results.into_iter().zip(grids);
    let (reference, ref_grid) = iter.next().unwrap();
    let reference_values = probe_values(&reference?, &ref_grid, probes)?;
    let outcomes = iter
        .map(|(r, grid)| {
            let r = r?;
            Ok((probe_values(&r, &grid, probes)?, r.stop_reason))
        })
        .collect::<Result<Vec<_>, ConvergenceError>>()?;
    Ok(assemble(probes, reference_dr, reference_values, dr_values, outcomes))
}
