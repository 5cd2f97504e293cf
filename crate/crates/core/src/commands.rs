//! Command implementations behind the `livens` binary.

use std::fs;
use std::path::PathBuf;

use log::info;

use crate::config::RunConfig;
use crate::convergence::{convergence_study, ConvergenceReport, Reference};
use crate::error::Result;
use crate::integrator::{check_initial_state, integrate};
use crate::models::BuiltinModel;
use crate::output::{write_convergence_csv, write_diagnostics_csv, write_trajectory_csv};
use crate::parallel::ExecutionMode;

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationSummary {
    pub steps: usize,
    pub max_abs_de: f64,
    pub max_abs_de_tot: f64,
    pub max_g_norm: f64,
    pub newton_iterations: usize,
    pub trajectory_path: PathBuf,
    pub diagnostics_path: PathBuf,
}

impl std::fmt::Display for SimulationSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "steps:                  {}", self.steps)?;
        writeln!(f, "max |E^(n+1) - E^n|:    {:e}", self.max_abs_de)?;
        writeln!(f, "max |dE_tot| per step:  {:e}", self.max_abs_de_tot)?;
        writeln!(f, "max |g(q^n)|:           {:e}", self.max_g_norm)?;
        writeln!(f, "Newton iterations:      {}", self.newton_iterations)?;
        writeln!(f, "trajectory:             {}", self.trajectory_path.display())?;
        write!(f, "diagnostics:            {}", self.diagnostics_path.display())
    }
}

/// Validates the configuration and the consistency of its initial state.
pub fn check_command(config: &RunConfig) -> Result<()> {
    config.validate()?;
    let model = config.build_model()?;
    check_initial_state(model.as_model(), &config.q0, &config.v0)
}

/// Integrates the configured run and writes `trajectory.csv` and
/// `diagnostics.csv` into the output directory.
pub fn run_simulation_command(config: &RunConfig) -> Result<SimulationSummary> {
    config.validate()?;
    let model = config.build_model()?;
    let traj = integrate(model.as_model(), &config.q0, &config.v0, &config.settings)?;

    fs::create_dir_all(&config.output_dir)?;
    let trajectory_path = config.output_dir.join("trajectory.csv");
    let diagnostics_path = config.output_dir.join("diagnostics.csv");
    write_trajectory_csv(&traj, &trajectory_path)?;
    write_diagnostics_csv(&traj, &diagnostics_path)?;
    info!("wrote {} and {}", trajectory_path.display(), diagnostics_path.display());

    Ok(SimulationSummary {
        steps: traj.len() - 1,
        max_abs_de: traj.max_energy_increment(),
        max_abs_de_tot: traj.max_total_energy_increment(),
        max_g_norm: traj.max_constraint_norm(),
        newton_iterations: traj.total_newton_iterations(),
        trajectory_path,
        diagnostics_path,
    })
}

/// Runs a convergence study over `h_list` and writes `convergence.csv`.
///
/// The harmonic oscillator is compared with its closed-form solution; every
/// other model against the same scheme at `min(h_list) / 64`.
pub fn convergence_study_command(config: &RunConfig, h_list: &[f64]) -> Result<ConvergenceReport> {
    config.validate()?;
    let model = config.build_model()?;
    let (q0, v0) = (&config.q0, &config.v0);

    let report = match &model {
        BuiltinModel::HarmonicOscillator(ho) => {
            let exact = |t: f64| ho.exact_solution(q0, v0, t).0;
            convergence_study(
                ho,
                q0,
                v0,
                &config.settings,
                h_list,
                Reference::Exact(&exact),
                ExecutionMode::Parallel,
            )?
        }
        other => convergence_study(
            other.as_model(),
            q0,
            v0,
            &config.settings,
            h_list,
            Reference::Refined,
            ExecutionMode::Parallel,
        )?,
    };

    fs::create_dir_all(&config.output_dir)?;
    write_convergence_csv(&report, &config.output_dir.join("convergence.csv"))?;
    Ok(report)
}
