//! Polynomial scalar fields with hand-derived gradients.

use livens::discrete_gradient::ScalarField;
use nalgebra::DVector;
use rand::Rng;

/// `f(x) = Σ_t c_t Π_j x_j^{e_tj}`
#[derive(Debug, Clone)]
pub struct Polynomial {
    pub dim: usize,
    pub terms: Vec<(f64, Vec<u32>)>,
}

impl Polynomial {
    pub fn random<R: Rng>(rng: &mut R, dim: usize, n_terms: usize, max_degree: u32) -> Self {
        let terms = (0..n_terms)
            .map(|_| {
                let c = rng.gen_range(-2.0..2.0);
                let e = (0..dim).map(|_| rng.gen_range(0..=max_degree)).collect();
                (c, e)
            })
            .collect();
        Self { dim, terms }
    }

    /// `½ xᵀAx + bᵀx + c` with random symmetric `A`.
    pub fn random_quadratic<R: Rng>(rng: &mut R, dim: usize) -> Self {
        let mut terms = vec![(rng.gen_range(-2.0..2.0), vec![0; dim])];
        for i in 0..dim {
            let mut e = vec![0; dim];
            e[i] = 1;
            terms.push((rng.gen_range(-2.0..2.0), e));
            for j in i..dim {
                let mut e = vec![0; dim];
                e[i] += 1;
                e[j] += 1;
                terms.push((rng.gen_range(-2.0..2.0), e));
            }
        }
        Self { dim, terms }
    }
}

impl ScalarField for Polynomial {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &DVector<f64>) -> f64 {
        self.terms
            .iter()
            .map(|(c, e)| {
                c * e
                    .iter()
                    .zip(x.iter())
                    .map(|(&k, xi)| xi.powi(k as i32))
                    .product::<f64>()
            })
            .sum()
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut g = DVector::zeros(self.dim);
        for (c, e) in &self.terms {
            for i in 0..self.dim {
                if e[i] == 0 {
                    continue;
                }
                let mut term = c * e[i] as f64;
                for (j, &k) in e.iter().enumerate() {
                    let power = if j == i { k - 1 } else { k };
                    term *= x[j].powi(power as i32);
                }
                g[i] += term;
            }
        }
        g
    }
}

pub fn random_point<R: Rng>(rng: &mut R, dim: usize, radius: f64) -> DVector<f64> {
    DVector::from_fn(dim, |_, _| rng.gen_range(-radius..radius))
}
