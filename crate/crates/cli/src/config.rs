//! JSON config schemas for the five subcommands; field names mirror the
//! library's run-description types.

use serde::Deserialize;

use collapse_core::{Config64, Grid64, InitialProfile, ModelKind, OuterBc};

#[derive(Debug, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelName {
    Ym41,
    Cp1q1,
    Cp1q2,
}

impl ModelName {
    pub fn kind(&self) -> ModelKind {
        match self {
            ModelName::Ym41 => ModelKind::Ym41,
            ModelName::Cp1q1 => ModelKind::Cp1Q1,
            ModelName::Cp1q2 => ModelKind::Cp1Q2,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileConfig {
    Flat { f0: f64 },
    Parabolic { f0: f64, p: f64 },
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OuterBcConfig {
    Flat,
    ParabolicSlope,
}

fn default_corrector_iterations() -> usize {
    6
}

fn default_stop_fraction() -> f64 {
    1e-3
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub model: ModelName,
    pub dr: f64,
    pub r_max: f64,
    pub dt: f64,
    pub v0: f64,
    pub profile: ProfileConfig,
    pub t_end: f64,
    #[serde(default)]
    pub outer_bc: Option<OuterBcConfig>,
    #[serde(default = "default_corrector_iterations")]
    pub corrector_iterations: usize,
    #[serde(default = "default_stop_fraction")]
    pub stop_fraction: f64,
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
    #[serde(default)]
    pub startup_hold_steps: usize,
}

impl SimulateConfig {
    pub fn build(&self) -> Result<Config64, String> {
        let grid = Grid64::new(self.dr, self.r_max).map_err(|e| e.to_string())?;
        let profile = match self.profile {
            ProfileConfig::Flat { f0 } => InitialProfile::Flat { f0 },
            ProfileConfig::Parabolic { f0, p } => InitialProfile::Parabolic { f0, p },
        };
        let mut config = Config64::new(self.model.kind(), grid, self.dt, self.v0, profile, self.t_end);
        config.outer_bc = match self.outer_bc {
            Some(OuterBcConfig::ParabolicSlope) => OuterBc::ParabolicSlope,
            _ => OuterBc::Flat,
        };
        config.corrector_iterations = self.corrector_iterations;
        config.stop_fraction = self.stop_fraction;
        config.snapshot_times = self.snapshot_times.clone();
        config.startup_hold_steps = self.startup_hold_steps;
        Ok(config)
    }
}

#[derive(Debug, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum WindowConfig {
    AfterFraction { phi: f64 },
    TimeRange { t1: f64, t2: f64 },
    BeforeBoundaryHit { a_max: f64 },
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitterName {
    Line,
    Parabola,
    Ellipse,
    Hyperbola,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    /// Two-column CSV produced by `simulate` (a trace or a snapshot).
    pub input: String,
    pub fitter: FitterName,
    #[serde(default)]
    pub window: Option<WindowConfig>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl TimeGrid {
    pub fn times(&self) -> Vec<f64> {
        let mut times = Vec::new();
        let mut i = 0usize;
        loop {
            let t = self.start + self.step * i as f64;
            if t > self.stop * (1.0 + 1e-12) {
                break;
            }
            times.push(t);
            i += 1;
        }
        times
    }
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PredictConfig {
    /// Closed-form collapse parabola.
    Parabola { model: ModelName, f0: f64, v0: f64, times: TimeGrid },
    /// Parabolic spatial profile at a fixed time.
    Profile { f0: f64, v0: f64, t: f64, radii: TimeGrid },
    /// Inverted trajectory integral for the unit-winding model.
    TrajectoryQ1 { f0: f64, c: f64, r_eff: f64, times: TimeGrid },
    /// Empirical straight-line law for the unit-winding model.
    EmpiricalLineQ1 { f0: f64, v0: f64, times: TimeGrid },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilityContextConfig {
    pub model: ModelName,
    pub n: usize,
    pub f0: f64,
    pub fdot0: f64,
    pub dr: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VnSweepConfig {
    pub model: ModelName,
    pub r: f64,
    pub f0: f64,
    pub dr: f64,
    pub dt: f64,
    /// Wavenumbers to probe.
    pub kappa: TimeGrid,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilityConfig {
    #[serde(default)]
    pub contexts: Vec<StabilityContextConfig>,
    #[serde(default)]
    pub von_neumann: Option<VnSweepConfig>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeConfig {
    pub radius: f64,
    pub label: String,
    #[serde(default)]
    pub node_offset: i64,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VaryParameter {
    Dt,
    Dr,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergeConfig {
    pub base: SimulateConfig,
    pub vary: VaryParameter,
    pub values: Vec<f64>,
    pub reference: f64,
    pub t_probe: f64,
    pub probes: Vec<ProbeConfig>,
}
