//! Observed order of accuracy from runs at several step sizes.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::integrator::{integrate, SolverSettings};
use crate::model::{inf_norm, SystemModel};
use crate::parallel::{map_runs, ExecutionMode};

/// Refinement factor of the self-convergence reference run.
pub const REFERENCE_REFINEMENT: usize = 64;

/// What the final positions are compared against.
pub enum Reference<'a> {
    /// The same scheme at `min(h) / REFERENCE_REFINEMENT`.
    Refined,
    /// A closed-form solution `t ↦ q(t)`.
    Exact(&'a (dyn Fn(f64) -> DVector<f64> + Sync)),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub h: f64,
    /// `‖q_h(T) − q_ref(T)‖∞`
    pub global_error_q: f64,
    /// `ln(e_prev / e) / ln(h_prev / h)`; absent for the coarsest step.
    pub observed_order: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    /// Step size of the reference run, if one was needed.
    pub reference_h: Option<f64>,
}

impl ConvergenceReport {
    pub fn orders(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.observed_order).collect()
    }
}

/// Checks that `h_list` is non-empty, strictly descending and that every
/// entry divides `t_end` to 1e-9 relative.
pub fn validate_step_sizes(h_list: &[f64], t_end: f64) -> Result<()> {
    if h_list.is_empty() {
        return Err(Error::Validation("step-size list is empty".into()));
    }
    if h_list.windows(2).any(|w| !(w[0] > w[1])) {
        return Err(Error::Validation(
            "step sizes must be sorted in strictly descending order".into(),
        ));
    }
    for &h in h_list {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Validation(format!("step size must be positive, got {h}")));
        }
        let ratio = t_end / h;
        if (ratio - ratio.round()).abs() > 1e-9 * ratio.max(1.0) {
            return Err(Error::Validation(format!("step size {h} does not divide T = {t_end}")));
        }
    }
    Ok(())
}

/// Integrates at every `h` in `h_list` and reports the error at `T` with the
/// pairwise observed orders.
pub fn convergence_study(
    model: &dyn SystemModel,
    q0: &DVector<f64>,
    v0: &DVector<f64>,
    base: &SolverSettings,
    h_list: &[f64],
    reference: Reference<'_>,
    mode: ExecutionMode,
) -> Result<ConvergenceReport> {
    validate_step_sizes(h_list, base.t_end)?;

    let reference_h = match reference {
        Reference::Refined => Some(h_list[h_list.len() - 1] / REFERENCE_REFINEMENT as f64),
        Reference::Exact(_) => None,
    };
    let mut jobs: Vec<f64> = h_list.to_vec();
    jobs.extend(reference_h);

    let finals = map_runs(mode, jobs, |h| {
        let settings = SolverSettings { h, ..*base };
        integrate(model, q0, v0, &settings).map(|traj| traj.last().expect("non-empty").q.clone())
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let target = match reference {
        Reference::Refined => finals[h_list.len()].clone(),
        Reference::Exact(solution) => solution(base.t_end),
    };

    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(h_list.len());
    for (i, &h) in h_list.iter().enumerate() {
        let err = inf_norm(&(&finals[i] - &target));
        let observed_order = rows
            .last()
            .map(|prev| (prev.global_error_q / err).ln() / (prev.h / h).ln());
        rows.push(ConvergenceRow {
            h,
            global_error_q: err,
            observed_order,
        });
    }
    Ok(ConvergenceReport { rows, reference_h })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::HarmonicOscillator;
    use nalgebra::dvector;

    #[test]
    fn step_size_validation() {
        assert!(validate_step_sizes(&[0.1, 0.05], 1.0).is_ok());
        assert!(validate_step_sizes(&[], 1.0).is_err());
        assert!(validate_step_sizes(&[0.05, 0.1], 1.0).is_err());
        assert!(validate_step_sizes(&[0.3], 1.0).is_err());
        assert!(validate_step_sizes(&[0.1, -0.1], 1.0).is_err());
    }

    #[test]
    fn oscillator_against_closed_form_is_second_order() {
        let ho = HarmonicOscillator::new(1.0, 1.0, 1).unwrap();
        let (q0, v0) = (dvector![1.0], dvector![0.0]);
        let exact = |t: f64| ho.exact_solution(&q0, &v0, t).0;
        let report = convergence_study(
            &ho,
            &q0,
            &v0,
            &SolverSettings::new(0.1, 1.0),
            &[0.1, 0.05, 0.025],
            Reference::Exact(&exact),
            ExecutionMode::Sequential,
        )
        .unwrap();
        assert_eq!(report.reference_h, None);
        for order in report.orders() {
            assert!((order - 2.0).abs() < 0.1, "order {order}");
        }
    }

    #[test]
    fn single_step_size_has_no_order() {
        let ho = HarmonicOscillator::new(1.0, 1.0, 1).unwrap();
        let (q0, v0) = (dvector![1.0], dvector![0.0]);
        let report = convergence_study(
            &ho,
            &q0,
            &v0,
            &SolverSettings::new(0.1, 1.0),
            &[0.1],
            Reference::Refined,
            ExecutionMode::Parallel,
        )
        .unwrap();
        assert_eq!(report.rows.len(), 1);
        assert_eq!(report.rows[0].observed_order, None);
        assert!((report.reference_h.unwrap() - 0.1 / 64.0).abs() < 1e-18);
    }
}
