use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::model::SystemModel;

/// Isotropic linear oscillator `M = m·I`, `V = ½ k ‖q‖²`.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicOscillator {
    mass: f64,
    stiffness: f64,
    dim: usize,
}

impl HarmonicOscillator {
    pub fn new(mass: f64, stiffness: f64, dim: usize) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) || !(stiffness > 0.0 && stiffness.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "mass and stiffness must be positive, got {mass} and {stiffness}"
            )));
        }
        if dim == 0 {
            return Err(Error::InvalidParameter("dim must be at least 1".into()));
        }
        Ok(Self { mass, stiffness, dim })
    }

    pub fn mass_value(&self) -> f64 {
        self.mass
    }

    pub fn stiffness(&self) -> f64 {
        self.stiffness
    }

    pub fn angular_frequency(&self) -> f64 {
        (self.stiffness / self.mass).sqrt()
    }

    /// Closed-form `(q(t), v(t))` from `(q0, v0)`.
    pub fn exact_solution(&self, q0: &DVector<f64>, v0: &DVector<f64>, t: f64) -> (DVector<f64>, DVector<f64>) {
        let w = self.angular_frequency();
        let (s, c) = (w * t).sin_cos();
        (q0 * c + v0 * (s / w), v0 * c - q0 * (w * s))
    }
}

impl SystemModel for HarmonicOscillator {
    fn name(&self) -> &str {
        "harmonic_oscillator"
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn mass(&self, _q: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::identity(self.dim, self.dim) * self.mass
    }

    fn kinetic_gradient_q(&self, _q: &DVector<f64>, _v: &DVector<f64>) -> Option<DVector<f64>> {
        Some(DVector::zeros(self.dim))
    }

    fn potential(&self, q: &DVector<f64>) -> f64 {
        0.5 * self.stiffness * q.norm_squared()
    }

    fn potential_gradient(&self, q: &DVector<f64>) -> DVector<f64> {
        q * self.stiffness
    }
}
