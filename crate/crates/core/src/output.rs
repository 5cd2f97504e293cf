//! CSV output of trajectories, run summaries and convergence studies.
//!
//! Floating-point values are written in Rust's shortest round-trip form, so
//! reading a file back yields bit-identical numbers.

use std::path::Path;

use crate::convergence::ConvergenceReport;
use crate::error::{Error, Result};
use crate::model::Trajectory;

fn num(x: f64) -> String {
    format!("{x:?}")
}

/// Column names of `trajectory.csv` for `d` coordinates and `m` constraints.
pub fn trajectory_header(d: usize, m: usize) -> Vec<String> {
    let mut header = vec!["t".to_string()];
    for prefix in ["q", "v", "p"] {
        header.extend((1..=d).map(|i| format!("{prefix}_{i}")));
    }
    header.extend((1..=m).map(|k| format!("lambda_{k}")));
    header.extend(["E", "E_tot", "g_norm", "gdot_norm", "newton_iters"].map(String::from));
    header
}

pub fn write_trajectory_csv(traj: &Trajectory, path: &Path) -> Result<()> {
    let first = traj
        .states
        .first()
        .ok_or_else(|| Error::Io("cannot write an empty trajectory".into()))?;
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(trajectory_header(first.q.len(), first.lambda.len()))?;
    for (s, d) in traj.states.iter().zip(&traj.diagnostics) {
        let mut row = vec![num(s.t)];
        row.extend(s.q.iter().chain(&s.v).chain(&s.p).chain(&s.lambda).map(|x| num(*x)));
        row.extend([d.energy, d.total_energy, d.constraint_norm, d.constraint_velocity_norm].map(num));
        row.push(d.newton_iterations.to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub const DIAGNOSTICS_HEADER: [&str; 10] = [
    "model",
    "h",
    "steps",
    "E0",
    "max_abs_dE",
    "max_abs_dE_tot",
    "max_abs_E_drift",
    "max_g_norm",
    "max_gdot_norm",
    "newton_iters_total",
];

/// One-row run summary: extreme per-step energy increments, drift and
/// constraint violations.
pub fn write_diagnostics_csv(traj: &Trajectory, path: &Path) -> Result<()> {
    let e0 = traj
        .diagnostics
        .first()
        .ok_or_else(|| Error::Io("cannot summarize an empty trajectory".into()))?
        .energy;
    let max_gdot = traj
        .diagnostics
        .iter()
        .map(|d| d.constraint_velocity_norm)
        .fold(0.0, f64::max);
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(DIAGNOSTICS_HEADER)?;
    w.write_record([
        traj.model_name.clone(),
        num(traj.step_size),
        (traj.len() - 1).to_string(),
        num(e0),
        num(traj.max_energy_increment()),
        num(traj.max_total_energy_increment()),
        num(traj.max_energy_deviation()),
        num(traj.max_constraint_norm()),
        num(max_gdot),
        traj.total_newton_iterations().to_string(),
    ])?;
    w.flush()?;
    Ok(())
}

/// Columns `h, global_error_q, observed_order`; the order is empty for the
/// coarsest step size.
pub fn write_convergence_csv(report: &ConvergenceReport, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["h", "global_error_q", "observed_order"])?;
    for row in &report.rows {
        w.write_record([
            num(row.h),
            num(row.global_error_q),
            row.observed_order.map(num).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
