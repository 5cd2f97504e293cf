//! Benchmark checks for the integrator: conservation on the mass-spring and
//! spring-pendulum systems, order of accuracy, discrete-gradient properties,
//! agreement with the implicit midpoint rule and singular-mass handling.

pub mod fields;

use std::time::{Duration, Instant};

use fields::{random_point, Polynomial};
use livens::convergence::{convergence_study, Reference};
use livens::discrete_gradient::{discrete_gradient, ScalarField, DEFAULT_EPS_DD};
use livens::model::hamiltonian;
use livens::models::{HarmonicOscillator, MassSpring, SpringPendulum};
use livens::parallel::ExecutionMode;
use livens::{integrate, integrate_midpoint_canonical, Error, SolverSettings, SystemModel, Trajectory};
use nalgebra::{dvector, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Check = fn() -> Outcome;

/// Result of one criterion.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub pass: bool,
    pub detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: String) -> Self {
        Self { pass, detail }
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn mass_spring_run(eps_newton: f64) -> (livens::Result<Trajectory>, Duration) {
    let model = MassSpring::default();
    let (q0, v0) = model.default_initial_conditions();
    let settings = SolverSettings::new(0.1, 10.0).with_eps_newton(eps_newton);
    timed(|| integrate(&model, &q0, &v0, &settings))
}

fn energy_bound(traj: &Trajectory) -> f64 {
    1e-10 * traj.diagnostics[0].energy.abs().max(1.0)
}

pub fn criterion_1() -> Outcome {
    let (traj, elapsed) = mass_spring_run(1e-9);
    let traj = match traj {
        Ok(t) => t,
        Err(e) => return Outcome::new(false, format!("integration failed: {e}")),
    };
    let drift = traj.max_energy_deviation();
    let g = traj.max_constraint_norm();
    let pass = drift <= energy_bound(&traj) && g <= 1e-9 && elapsed < Duration::from_secs(1);
    Outcome::new(
        pass,
        format!("max|E-E0| = {drift:.3e}, max|g| = {g:.3e}, runtime = {elapsed:.2?}"),
    )
}

pub fn criterion_2() -> Outcome {
    let model = MassSpring::default();
    match mass_spring_run(1e-9).0 {
        Ok(traj) => {
            let defect = traj.max_fiber_defect(&model);
            Outcome::new(defect <= 5e-8, format!("max||p - M v||inf = {defect:.3e}"))
        }
        Err(e) => Outcome::new(false, format!("integration failed: {e}")),
    }
}

pub fn criterion_3() -> Outcome {
    let model = SpringPendulum::default();
    let (q0, v0) = (
        dvector![1.05, std::f64::consts::FRAC_PI_2, 0.0],
        dvector![0.0, 1.0, 1.0],
    );
    let settings = SolverSettings::new(0.01, 1.0);
    let (traj, elapsed) = timed(|| integrate(&model, &q0, &v0, &settings));
    let traj = match traj {
        Ok(t) => t,
        Err(e) => return Outcome::new(false, format!("integration failed: {e}")),
    };
    let drift = traj.max_energy_deviation();
    let total = traj.max_total_energy_increment();
    let pass = drift <= energy_bound(&traj) && (1e-6..=1e-3).contains(&total) && elapsed < Duration::from_secs(1);
    Outcome::new(
        pass,
        format!("max|E-E0| = {drift:.3e}, max|dE_tot| per step = {total:.3e}, runtime = {elapsed:.2?}"),
    )
}

pub fn criterion_4() -> Outcome {
    let h_list = [0.04, 0.02, 0.01, 0.005];
    let base = SolverSettings::new(0.01, 1.0);

    let pendulum = SpringPendulum::default();
    let (q0, v0) = pendulum.default_initial_conditions();
    let self_orders = match convergence_study(
        &pendulum,
        &q0,
        &v0,
        &base,
        &h_list,
        Reference::Refined,
        ExecutionMode::Parallel,
    ) {
        Ok(r) => r.orders(),
        Err(e) => return Outcome::new(false, format!("pendulum study failed: {e}")),
    };

    let oscillator = HarmonicOscillator::new(1.0, 1.0, 1).expect("valid oscillator");
    let (hq0, hv0) = (dvector![1.0], dvector![0.0]);
    let exact = |t: f64| oscillator.exact_solution(&hq0, &hv0, t).0;
    let exact_orders = match convergence_study(
        &oscillator,
        &hq0,
        &hv0,
        &base,
        &h_list,
        Reference::Exact(&exact),
        ExecutionMode::Parallel,
    ) {
        Ok(r) => r.orders(),
        Err(e) => return Outcome::new(false, format!("oscillator study failed: {e}")),
    };

    let pass = self_orders.len() == 3
        && self_orders.iter().all(|p| (1.8..=2.2).contains(p))
        && exact_orders.len() == 3
        && exact_orders.iter().all(|p| (p - 2.0).abs() <= 0.1);
    Outcome::new(
        pass,
        format!("pendulum orders = {self_orders:.3?}, oscillator orders = {exact_orders:.3?}"),
    )
}

pub fn criterion_5() -> Outcome {
    const CASES: usize = 1000;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut directionality: f64 = 0.0;
    let mut symmetry: f64 = 0.0;
    let mut quadratic: f64 = 0.0;
    let mut failures = 0usize;

    for _ in 0..CASES {
        let dim = rng.gen_range(1..=4);
        let f = Polynomial::random(&mut rng, dim, 6, 4);
        let x = random_point(&mut rng, dim, 1.5);
        let y = random_point(&mut rng, dim, 1.5);
        if (&y - &x).norm() <= 1e-3 {
            continue;
        }
        let (Ok(a), Ok(b)) = (
            discrete_gradient(&f, &x, &y, DEFAULT_EPS_DD),
            discrete_gradient(&f, &y, &x, DEFAULT_EPS_DD),
        ) else {
            failures += 1;
            continue;
        };
        let (fx, fy) = (f.value(&x), f.value(&y));
        let scale = 1f64.max(fx.abs()).max(fy.abs());
        directionality = directionality.max((a.dot(&(&y - &x)) - (fy - fx)).abs() / scale);
        symmetry = symmetry.max((&a - &b).amax());

        let fq = Polynomial::random_quadratic(&mut rng, dim);
        match discrete_gradient(&fq, &x, &y, DEFAULT_EPS_DD) {
            Ok(g) => {
                let mid = fq.gradient(&((&x + &y) * 0.5));
                quadratic = quadratic.max((&g - &mid).amax() / mid.amax().max(1.0));
            }
            Err(_) => failures += 1,
        }
    }

    let ratios = consistency_ratios();
    let ratios_ok = ratios.iter().all(|r| (5.0..=20.0).contains(r));
    let pass = failures == 0 && directionality <= 1e-12 && symmetry <= 1e-13 && quadratic <= 1e-13 && ratios_ok;
    Outcome::new(
        pass,
        format!(
            "{CASES} fields: directionality = {directionality:.2e}, symmetry = {symmetry:.2e}, \
             quadratic = {quadratic:.2e}; consistency ratios = {ratios:.2?} (required in [5, 20])"
        ),
    )
}

/// Ratios of `‖D̄f(x, x+εu) − Df(x+εu/2)‖` between ε = 1e-2, 1e-3, 1e-4.
fn consistency_ratios() -> Vec<f64> {
    let f = Polynomial {
        dim: 2,
        terms: vec![
            (1.0, vec![3, 0]),
            (0.5, vec![1, 2]),
            (-0.3, vec![2, 2]),
            (0.7, vec![0, 3]),
        ],
    };
    let x = dvector![0.4, -0.2];
    let u = dvector![0.6, 0.8];
    let defect = |eps: f64| {
        let y = &x + &u * eps;
        let g = discrete_gradient(&f, &x, &y, DEFAULT_EPS_DD).expect("finite field");
        (g - f.gradient(&((&x + &y) * 0.5))).norm()
    };
    let levels = [1e-2, 1e-3, 1e-4].map(defect);
    levels.windows(2).map(|w| w[0] / w[1]).collect()
}

pub fn criterion_6() -> Outcome {
    let model = HarmonicOscillator::new(1.0, 1.0, 1).expect("valid oscillator");
    let (q0, v0) = (dvector![1.0], dvector![0.0]);
    let settings = SolverSettings::new(0.1, 10.0);
    let (a, b) = match (
        integrate(&model, &q0, &v0, &settings),
        integrate_midpoint_canonical(&model, &q0, &v0, &settings),
    ) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return Outcome::new(false, format!("integration failed: {e}")),
    };
    let stacked =
        |s: &livens::State| DVector::from_iterator(3, s.q.iter().chain(s.v.iter()).chain(s.p.iter()).copied());
    let gap = a
        .states
        .iter()
        .zip(&b.states)
        .map(|(x, y)| (stacked(x) - stacked(y)).amax())
        .fold(0.0, f64::max);
    let (q1, v1) = (a.states[1].q[0], a.states[1].v[0]);
    let pass = a.len() == 101
        && b.len() == 101
        && gap <= 1e-8
        && (q1 - 0.99501247).abs() <= 1e-7
        && (v1 + 0.09975062).abs() <= 1e-7;
    Outcome::new(
        pass,
        format!("100 steps max gap = {gap:.3e}; q1 = {q1:.8}, v1 = {v1:.8}"),
    )
}

pub fn criterion_7() -> Outcome {
    let model = MassSpring::default();
    let (q0, v0) = model.default_initial_conditions();
    let p0 = model.mass(&q0) * &v0;
    let singular = matches!(hamiltonian(&model, &q0, &p0), Err(Error::SingularMass { .. }));
    let completed = matches!(mass_spring_run(1e-9).0, Ok(ref t) if t.len() == 101);
    Outcome::new(
        singular && completed,
        format!("hamiltonian raises SingularMass: {singular}; integrate completes 100 steps: {completed}"),
    )
}

pub fn criterion_8() -> Outcome {
    match mass_spring_run(1e-6).0 {
        Ok(traj) => {
            let drift = traj.max_energy_deviation();
            Outcome::new(
                drift > 1e-8,
                format!("eps_newton = 1e-6: max|E-E0| = {drift:.3e} (required > 1e-8)"),
            )
        }
        Err(e) => Outcome::new(false, format!("integration failed: {e}")),
    }
}

/// Every criterion with a short name, in order.
pub const CRITERIA: [(&str, Check); 8] = [
    ("mass-spring energy and constraint", criterion_1),
    ("constant-mass fiber derivative", criterion_2),
    ("spring pendulum energies", criterion_3),
    ("second-order convergence", criterion_4),
    ("discrete-gradient properties", criterion_5),
    ("midpoint equivalence", criterion_6),
    ("singular mass matrix", criterion_7),
    ("energy error tracks Newton tolerance", criterion_8),
];
