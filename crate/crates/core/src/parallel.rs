//! Execution of independent runs (sweeps, convergence studies).
//!
//! A single trajectory is inherently sequential; independent trajectories are
//! mapped over a rayon pool when the `parallel` feature is enabled.

use nalgebra::DVector;
#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::Result;
use crate::integrator::{integrate, SolverSettings};
use crate::model::{SystemModel, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExecutionMode {
    Sequential,
    /// Falls back to sequential execution without the `parallel` feature.
    #[default]
    Parallel,
}

impl ExecutionMode {
    pub fn is_parallel_available() -> bool {
        cfg!(feature = "parallel")
    }
}

/// Maps `f` over `items`, preserving order.
pub fn map_runs<T, R, F>(mode: ExecutionMode, items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Send + Sync,
{
    match mode {
        #[cfg(feature = "parallel")]
        ExecutionMode::Parallel => items.into_par_iter().map(f).collect(),
        _ => items.into_iter().map(f).collect(),
    }
}

/// Integrates one model from each initial condition in `initial`.
pub fn integrate_batch(
    mode: ExecutionMode,
    model: &dyn SystemModel,
    initial: Vec<(DVector<f64>, DVector<f64>)>,
    settings: &SolverSettings,
) -> Vec<Result<Trajectory>> {
    map_runs(mode, initial, |(q0, v0)| integrate(model, &q0, &v0, settings))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_modes_preserve_order() {
        let items: Vec<u64> = (0..64).collect();
        let seq = map_runs(ExecutionMode::Sequential, items.clone(), |x| x * x);
        let par = map_runs(ExecutionMode::Parallel, items, |x| x * x);
        assert_eq!(seq, par);
        assert_eq!(seq[7], 49);
    }

    #[test]
    fn batch_results_do_not_depend_on_mode() {
        let model = crate::models::SpringPendulum::default();
        let initial: Vec<_> = (0..4)
            .map(|k| {
                let (q0, mut v0) = model.default_initial_conditions();
                v0[1] += 0.1 * k as f64;
                (q0, v0)
            })
            .collect();
        let settings = SolverSettings::new(0.01, 0.2);
        let seq = integrate_batch(ExecutionMode::Sequential, &model, initial.clone(), &settings);
        let par = integrate_batch(ExecutionMode::Parallel, &model, initial, &settings);
        for (a, b) in seq.into_iter().zip(par) {
            assert_eq!(a.unwrap().states, b.unwrap().states);
        }
    }
}
