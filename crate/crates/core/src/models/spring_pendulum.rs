use std::f64::consts::FRAC_PI_2;

use nalgebra::{dvector, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::model::SystemModel;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PendulumParams {
    pub mass: f64,
    /// Axial stiffness `EA` of the spring.
    pub ea: f64,
    /// Rest length `l₀`.
    pub l0: f64,
}

impl Default for PendulumParams {
    fn default() -> Self {
        Self {
            mass: 1.0,
            ea: 300.0,
            l0: 1.0,
        }
    }
}

impl PendulumParams {
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [("m", self.mass), ("EA", self.ea), ("l0", self.l0)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {value}")));
            }
        }
        Ok(())
    }
}

/// Spherical spring pendulum in coordinates `(r, θ, φ)` with
/// `M(q) = m·diag(1, r², r² sin²θ)`, singular on the polar axis.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SpringPendulum {
    params: PendulumParams,
}

impl SpringPendulum {
    pub fn new(params: PendulumParams) -> Result<Self> {
        params.validate()?;
        Ok(Self { params })
    }

    pub fn params(&self) -> &PendulumParams {
        &self.params
    }

    /// Green-Lagrange type strain `(r² − l₀²) / (2 l₀²)`.
    pub fn strain(&self, r: f64) -> f64 {
        let l0 = self.params.l0;
        (r * r - l0 * l0) / (2.0 * l0 * l0)
    }

    /// 5% radial elongation with a tangential initial velocity.
    pub fn default_initial_conditions(&self) -> (DVector<f64>, DVector<f64>) {
        (dvector![1.05 * self.params.l0, FRAC_PI_2, 0.0], dvector![0.0, 1.0, 1.0])
    }
}

impl SystemModel for SpringPendulum {
    fn name(&self) -> &str {
        "spring_pendulum"
    }

    fn dim(&self) -> usize {
        3
    }

    fn mass(&self, q: &DVector<f64>) -> DMatrix<f64> {
        let (r, theta) = (q[0], q[1]);
        let r2 = r * r;
        let s = theta.sin();
        DMatrix::from_diagonal(&dvector![1.0, r2, r2 * s * s]) * self.params.mass
    }

    fn kinetic_gradient_q(&self, q: &DVector<f64>, v: &DVector<f64>) -> Option<DVector<f64>> {
        let (r, theta) = (q[0], q[1]);
        let (s, c) = theta.sin_cos();
        let m = self.params.mass;
        Some(dvector![
            m * r * (v[1] * v[1] + s * s * v[2] * v[2]),
            m * r * r * s * c * v[2] * v[2],
            0.0
        ])
    }

    fn potential(&self, q: &DVector<f64>) -> f64 {
        let eps = self.strain(q[0]);
        0.5 * self.params.ea * eps * eps
    }

    fn potential_gradient(&self, q: &DVector<f64>) -> DVector<f64> {
        let r = q[0];
        let l0 = self.params.l0;
        dvector![self.params.ea * self.strain(r) * r / (l0 * l0), 0.0, 0.0]
    }
}
