//! Dense linear algebra helpers for the per-step Newton solves.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Pivots smaller than this fraction of `‖A‖∞` are treated as zero.
pub const PIVOT_TOLERANCE: f64 = 1e-14;

/// Solves `A x = b` by LU factorization with partial pivoting.
///
/// Returns [`Error::SingularMatrix`] when a pivot falls below
/// `PIVOT_TOLERANCE · ‖A‖∞`.
pub fn solve_linear(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    if !a.is_square() || a.nrows() != b.len() {
        return Err(Error::DimensionMismatch {
            what: "linear system",
            expected: a.nrows(),
            found: if a.is_square() { b.len() } else { a.ncols() },
        });
    }
    if a.iter().chain(b.iter()).any(|x| !x.is_finite()) {
        return Err(Error::NonFiniteValue("linear system"));
    }
    if a.is_empty() {
        return Ok(DVector::zeros(0));
    }

    let norm = matrix_inf_norm(a);
    let threshold = PIVOT_TOLERANCE * norm;
    let lu = a.clone().lu();
    let u = lu.u();
    let pivot = u.diagonal().iter().fold(f64::INFINITY, |acc, p| acc.min(p.abs()));
    if norm == 0.0 || pivot <= threshold {
        return Err(Error::SingularMatrix { pivot, threshold });
    }
    lu.solve(b).ok_or(Error::SingularMatrix { pivot, threshold })
}

/// Maximum absolute row sum.
pub fn matrix_inf_norm(a: &DMatrix<f64>) -> f64 {
    a.row_iter()
        .map(|row| row.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Forward-difference Jacobian of `residual` at `u`.
///
/// Column `j` uses the step `fd_step_scale · max(|u_j|, 1)`.
pub fn fd_jacobian<F>(mut residual: F, u: &DVector<f64>, fd_step_scale: f64) -> Result<DMatrix<f64>>
where
    F: FnMut(&DVector<f64>) -> Result<DVector<f64>>,
{
    let base = residual(u)?;
    fd_jacobian_at(residual, u, &base, fd_step_scale)
}

/// Same as [`fd_jacobian`] with the residual at `u` already known.
pub(crate) fn fd_jacobian_at<F>(
    mut residual: F,
    u: &DVector<f64>,
    base: &DVector<f64>,
    fd_step_scale: f64,
) -> Result<DMatrix<f64>>
where
    F: FnMut(&DVector<f64>) -> Result<DVector<f64>>,
{
    if base.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFiniteValue("finite-difference base residual"));
    }
    let mut jac = DMatrix::zeros(base.len(), u.len());
    let mut shifted = u.clone();
    for j in 0..u.len() {
        let delta = fd_step_scale * u[j].abs().max(1.0);
        shifted[j] = u[j] + delta;
        // the representable step, not the requested one
        let actual = shifted[j] - u[j];
        let r = residual(&shifted)?;
        shifted[j] = u[j];
        if r.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFiniteValue("finite-difference residual"));
        }
        jac.set_column(j, &((r - base) / actual));
    }
    Ok(jac)
}
