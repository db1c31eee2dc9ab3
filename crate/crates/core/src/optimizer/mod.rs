//! Maximizing the guessing probability over probe states and measurements.
//!
//! The qubit game has a closed-form optimum; for `d = 3` a multistart
//! see-saw alternates between the exact measurement half-step and a local
//! search over pure probe states. Strategies are selected by name through
//! [`optimizer`].

pub mod nelder_mead;
pub mod seesaw;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::discrimination::{helstrom, DiscriminationProblem};
use crate::error::{check_range, Error, Result};
use crate::game::{guessing_probability, ideal_ensemble, post_measurement_ensemble, register_state, GameConfig};
use crate::linalg::C64;
use crate::measurement::Measurement;
use crate::parallel;
use crate::state::DensityMatrix;

pub use seesaw::{SeesawOptions, StateStep};

pub const DEFAULT_RESTARTS: usize = 64;

#[derive(Debug, Clone, Serialize)]
pub struct OptimizationResult {
    pub method: &'static str,
    pub d: usize,
    pub gamma: f64,
    pub best_state: Vec<C64>,
    pub best_measurement: Measurement,
    pub p_guess: f64,
    pub restarts_used: usize,
    pub seed: u64,
    /// Per-restart success after every see-saw iteration, if requested.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub traces: Vec<Vec<f64>>,
}

/// Settings shared by the registry strategies.
#[derive(Debug, Clone, Copy)]
pub struct OptimizeOptions {
    pub restarts: usize,
    pub seed: u64,
    pub max_iterations: usize,
    pub tolerance: f64,
    /// Worker cap; `None` uses the global pool.
    pub threads: Option<usize>,
    pub record_trace: bool,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self {
            restarts: DEFAULT_RESTARTS,
            seed: 0,
            max_iterations: 500,
            tolerance: 1e-10,
            threads: None,
            record_trace: false,
        }
    }
}

/// Amplitudes of the normalized `|0⟩ + |−⟩`, optimal for every `γ` when `d = 2`.
pub fn optimal_state_d2() -> Vec<C64> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let (a, b) = (1.0 + h, -h);
    let n = (a * a + b * b).sqrt();
    vec![C64::new(a / n, 0.0), C64::new(b / n, 0.0)]
}

/// Closed-form qubit optimum: the `|0⟩ + |−⟩` probe and its Helstrom measurement.
pub fn optimize_d2(gamma: f64) -> Result<OptimizationResult> {
    check_range("gamma", gamma, 0.0, 1.0, "[0, 1]")?;
    let config = GameConfig::new(2, gamma)?;
    let state = optimal_state_d2();
    let e = ideal_ensemble(&config, &DensityMatrix::pure(&state)?)?;
    let h = helstrom(&DiscriminationProblem::from(&e))?;
    Ok(OptimizationResult {
        method: AnalyticD2.name(),
        d: 2,
        gamma,
        best_state: state,
        best_measurement: h.measurement,
        p_guess: h.p_success,
        restarts_used: 0,
        seed: 0,
        traces: Vec::new(),
    })
}

/// Multistart see-saw with simplex state updates.
pub fn optimize_numeric(config: &GameConfig, restarts: usize, seed: u64) -> Result<OptimizationResult> {
    let opts = OptimizeOptions {
        restarts,
        seed,
        threads: parallel::threads_from_env()?,
        ..Default::default()
    };
    multistart(config, &opts, StateStep::NelderMead)
}

/// Success probability of a given probe and measurement in the ideal game.
pub fn evaluate_strategy(config: &GameConfig, rho_b: &DensityMatrix, m: &Measurement) -> Result<f64> {
    let e = post_measurement_ensemble(config, rho_b, &register_state(config.gamma)?)?;
    guessing_probability(&e, m)
}

/// Restart `i` draws its start from stream `i` of a ChaCha generator seeded
/// with `seed`, so results do not depend on how restarts are scheduled.
fn multistart(config: &GameConfig, opts: &OptimizeOptions, step: StateStep) -> Result<OptimizationResult> {
    if !(2..=3).contains(&config.d) {
        return Err(Error::Unsupported(format!("numeric optimization for d={}", config.d)));
    }
    if opts.restarts == 0 {
        return Err(Error::OutOfRange {
            name: "restarts",
            value: 0.0,
            range: "≥ 1",
        });
    }
    let ss = SeesawOptions {
        max_iterations: opts.max_iterations,
        tolerance: opts.tolerance,
        step,
        record_trace: opts.record_trace,
    };
    let runs: Vec<Result<seesaw::SeesawRun>> = parallel::run_with_threads(opts.threads, || {
        (0..opts.restarts)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
                rng.set_stream(i as u64);
                let init = seesaw::random_params(config.d, &mut rng);
                seesaw::run(config, &init, &ss)
            })
            .collect()
    })?;
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
    let best = runs
        .iter()
        .enumerate()
        .max_by(|(i, a), (j, b)| a.p_guess.total_cmp(&b.p_guess).then(i.cmp(j)))
        .map(|(_, r)| r.clone())
        .expect("at least one restart");
    Ok(OptimizationResult {
        method: match step {
            StateStep::NelderMead => SeesawNelderMead.name(),
            StateStep::Eigen => SeesawEigen.name(),
        },
        d: config.d,
        gamma: config.gamma,
        best_state: best.amplitudes,
        best_measurement: best.measurement,
        p_guess: best.p_guess,
        restarts_used: opts.restarts,
        seed: opts.seed,
        traces: runs.into_iter().map(|r| r.trace).filter(|t| !t.is_empty()).collect(),
    })
}

/// An optimization strategy selectable by name.
pub trait Optimizer: Send + Sync {
    fn name(&self) -> &'static str;
    fn optimize(&self, config: &GameConfig, opts: &OptimizeOptions) -> Result<OptimizationResult>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct AnalyticD2;

impl Optimizer for AnalyticD2 {
    fn name(&self) -> &'static str {
        "analytic-d2"
    }
    fn optimize(&self, config: &GameConfig, _opts: &OptimizeOptions) -> Result<OptimizationResult> {
        if config.d != 2 {
            return Err(Error::Unsupported(format!("{} needs d=2, got d={}", self.name(), config.d)));
        }
        optimize_d2(config.gamma)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SeesawNelderMead;

impl Optimizer for SeesawNelderMead {
    fn name(&self) -> &'static str {
        "seesaw-nm"
    }
    fn optimize(&self, config: &GameConfig, opts: &OptimizeOptions) -> Result<OptimizationResult> {
        multistart(config, opts, StateStep::NelderMead)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SeesawEigen;

impl Optimizer for SeesawEigen {
    fn name(&self) -> &'static str {
        "seesaw-eigen"
    }
    fn optimize(&self, config: &GameConfig, opts: &OptimizeOptions) -> Result<OptimizationResult> {
        multistart(config, opts, StateStep::Eigen)
    }
}

pub const OPTIMIZERS: [&str; 3] = ["analytic-d2", "seesaw-nm", "seesaw-eigen"];

pub fn optimizer(name: &str) -> Result<Box<dyn Optimizer>> {
    match name {
        "analytic-d2" => Ok(Box::new(AnalyticD2)),
        "seesaw-nm" => Ok(Box::new(SeesawNelderMead)),
        "seesaw-eigen" => Ok(Box::new(SeesawEigen)),
        other => Err(Error::UnknownStrategy(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::pguess_max_d2;
    use crate::linalg::ComplexMatrix;

    #[test]
    fn analytic_examples() {
        for (g, p) in [(1.0, 1.0), (0.0, 0.853553), (0.5466, 0.90292)] {
            let r = optimize_d2(g).unwrap();
            assert!((r.p_guess - p).abs() < 5e-6, "γ={g}: {}", r.p_guess);
            assert!((r.p_guess - pguess_max_d2(g).unwrap()).abs() < 1e-9);
        }
        let s = optimal_state_d2();
        assert!((s[0].re - 0.92388).abs() < 1e-5 && (s[1].re + 0.38268).abs() < 1e-5);
        assert!(optimize_d2(1.2).is_err());
    }

    #[test]
    fn numeric_d2_matches_closed_form() {
        let config = GameConfig::new(2, 0.75).unwrap();
        let r = optimize_numeric(&config, 8, 3).unwrap();
        assert!((r.p_guess - optimize_d2(0.75).unwrap().p_guess).abs() < 1e-6);
    }

    #[test]
    fn result_is_reproducible_from_state_and_measurement() {
        let config = GameConfig::new(3, 0.9).unwrap();
        let r = optimize_numeric(&config, 4, 11).unwrap();
        let rho = DensityMatrix::pure(&r.best_state).unwrap();
        let p = evaluate_strategy(&config, &rho, &r.best_measurement).unwrap();
        assert!((p - r.p_guess).abs() < 1e-9);
    }

    #[test]
    fn evaluate_identity_like_case() {
        let config = GameConfig::new(2, 0.0).unwrap();
        let z = Measurement::from_basis(&ComplexMatrix::identity(2)).unwrap();
        let p = evaluate_strategy(&config, &DensityMatrix::basis(2, 0), &z).unwrap();
        assert!((p - 0.75).abs() < 1e-12);
    }

    #[test]
    fn deterministic_across_worker_counts() {
        let config = GameConfig::new(3, 0.7).unwrap();
        let run = |threads| {
            let opts = OptimizeOptions { restarts: 6, seed: 5, threads: Some(threads), ..Default::default() };
            SeesawNelderMead.optimize(&config, &opts).unwrap().p_guess
        };
        assert_eq!(run(1).to_bits(), run(3).to_bits());
    }

    #[test]
    fn registry_and_validation() {
        for name in OPTIMIZERS {
            assert_eq!(optimizer(name).unwrap().name(), name);
        }
        assert!(matches!(optimizer("annealing"), Err(Error::UnknownStrategy(_))));
        let d3 = GameConfig::new(3, 0.5).unwrap();
        assert!(AnalyticD2.optimize(&d3, &OptimizeOptions::default()).is_err());
        assert!(optimize_numeric(&GameConfig::new(4, 0.5).unwrap(), 1, 0).is_err());
        assert!(optimize_numeric(&d3, 0, 0).is_err());
    }
}
