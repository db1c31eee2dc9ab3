//! Alternating maximization over the probe state and the register measurement.

use std::f64::consts::PI;

use rand::Rng;

use super::nelder_mead::{self, NelderMeadOptions};
use crate::discrimination::{best_projective_two_bucket_any, helstrom, DiscriminationProblem};
use crate::error::{Error, Result};
use crate::game::{fourier_matrix, ideal_ensemble, register_state, GameConfig};
use crate::linalg::{cis, hermitian_eigensystem, ComplexMatrix, C64};
use crate::measurement::Measurement;
use crate::state::DensityMatrix;

/// How the state half-step improves `ρ_B` for a fixed measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateStep {
    /// Simplex search over polar angles and phases.
    NelderMead,
    /// Top eigenvector of the operator whose expectation is the success probability.
    Eigen,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeesawOptions {
    pub max_iterations: usize,
    /// Stop once an outer iteration gains less than this.
    pub tolerance: f64,
    pub step: StateStep,
    pub record_trace: bool,
}

impl Default for SeesawOptions {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            tolerance: 1e-10,
            step: StateStep::NelderMead,
            record_trace: false,
        }
    }
}

/// Number of real parameters for a pure state of dimension `d`.
pub fn parameter_count(d: usize) -> usize {
    2 * (d - 1)
}

/// Hyperspherical amplitudes: the first `d−1` parameters are polar angles,
/// the rest are phases of the first `d−1` components.
pub fn amplitudes_from_params(params: &[f64], d: usize) -> Vec<C64> {
    let (angles, phases) = params.split_at(d - 1);
    let mut out = Vec::with_capacity(d);
    let mut tail = 1.0;
    for k in 0..d - 1 {
        out.push(cis(phases[k]) * (tail * angles[k].cos()));
        tail *= angles[k].sin();
    }
    out.push(C64::new(tail, 0.0));
    out
}

/// Uniform draw from the parameter box `[0, π/2]^{d−1} × [0, 2π)^{d−1}`.
pub fn random_params<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    let mut p: Vec<f64> = (0..d - 1).map(|_| rng.gen::<f64>() * PI / 2.0).collect();
    p.extend((0..d - 1).map(|_| rng.gen::<f64>() * 2.0 * PI));
    p
}

/// Global phase fixed so the largest component (first on ties) is real positive.
pub fn canonical_phase(amplitudes: &[C64]) -> Vec<C64> {
    let mut k = 0;
    for (i, a) in amplitudes.iter().enumerate() {
        if a.norm() > amplitudes[k].norm() + 1e-12 {
            k = i;
        }
    }
    let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    let phase = if amplitudes[k].norm() > 0.0 {
        amplitudes[k].conj() / amplitudes[k].norm()
    } else {
        C64::new(1.0, 0.0)
    };
    amplitudes.iter().map(|a| a * phase / norm).collect()
}

/// Best measurement for a fixed probe: Helstrom for two outcomes, the best
/// two-bucket projective measurement for three.
pub fn best_measurement(config: &GameConfig, amplitudes: &[C64]) -> Result<(f64, Measurement)> {
    let rho = DensityMatrix::pure(amplitudes)?;
    let problem = DiscriminationProblem::from(&ideal_ensemble(config, &rho)?);
    let d = match config.d {
        2 => helstrom(&problem)?,
        3 => best_projective_two_bucket_any(&problem)?.1,
        other => return Err(Error::Unsupported(format!("numeric optimization for d={other}"))),
    };
    Ok((d.p_success, d.measurement))
}

/// Operator `W` with `P_guess = Tr(W ρ_B)` for a fixed measurement.
pub fn success_operator(config: &GameConfig, m: &Measurement) -> Result<ComplexMatrix> {
    let d = config.d;
    if m.len() != d || m.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: d, got: m.len() });
    }
    let f = fourier_matrix(d)?;
    let fd = f.adjoint();
    let r = register_state(config.gamma)?.into_matrix();
    let mut w = ComplexMatrix::zeros(d, d);
    for x in 0..d {
        let mx = m.element(x);
        let px = ComplexMatrix::basis_projector(d, x);
        let px_f = &px * &f;
        let fd_px = &fd * &px;
        let fd_px_f = &fd_px * &f;
        w = &w + &px.scale(mx[(0, 0)] * r[(0, 0)]);
        w = &w + &fd_px.scale(mx[(1, 0)] * r[(0, 1)]);
        w = &w + &px_f.scale(mx[(0, 1)] * r[(1, 0)]);
        w = &w + &fd_px_f.scale(mx[(1, 1)] * r[(1, 1)]);
    }
    Ok(w.hermitian_part())
}

fn expectation(w: &ComplexMatrix, psi: &[C64]) -> f64 {
    w.sandwich(psi, psi).re
}

/// Outcome of one see-saw run from a single starting point.
#[derive(Debug, Clone)]
pub struct SeesawRun {
    pub amplitudes: Vec<C64>,
    pub measurement: Measurement,
    pub p_guess: f64,
    pub iterations: usize,
    /// Success probability after each measurement half-step (when recorded).
    pub trace: Vec<f64>,
}

/// Runs the alternating loop from `initial` parameters.
///
/// A state update is kept only if it does not lower `Tr(W ρ_B)`, and the
/// measurement update is exact, so the success probability never decreases.
pub fn run(config: &GameConfig, initial: &[f64], opts: &SeesawOptions) -> Result<SeesawRun> {
    let d = config.d;
    if initial.len() != parameter_count(d) {
        return Err(Error::DimensionMismatch {
            expected: parameter_count(d),
            got: initial.len(),
        });
    }
    let mut params = initial.to_vec();
    let mut psi = amplitudes_from_params(&params, d);
    let (mut p, mut m) = best_measurement(config, &psi)?;
    let mut trace = Vec::new();
    if opts.record_trace {
        trace.push(p);
    }
    let nm = NelderMeadOptions::default();
    let mut iterations = 0;
    while iterations < opts.max_iterations {
        iterations += 1;
        let w = success_operator(config, &m)?;
        let current = expectation(&w, &psi);
        let (cand_params, cand_psi) = match opts.step {
            StateStep::NelderMead => {
                let r = nelder_mead::minimize(
                    |x| -expectation(&w, &amplitudes_from_params(x, d)),
                    &params,
                    &nm,
                );
                let a = amplitudes_from_params(&r.x, d);
                (Some(r.x), a)
            }
            StateStep::Eigen => {
                let es = hermitian_eigensystem(&w)?;
                (None, es.vectors.column(d - 1))
            }
        };
        if expectation(&w, &cand_psi) <= current {
            break;
        }
        let (p_new, m_new) = best_measurement(config, &cand_psi)?;
        if p_new < p {
            break;
        }
        let gain = p_new - p;
        if let Some(x) = cand_params {
            params = x;
        }
        psi = cand_psi;
        p = p_new;
        m = m_new;
        if opts.record_trace {
            trace.push(p);
        }
        if gain < opts.tolerance {
            break;
        }
    }
    Ok(SeesawRun {
        amplitudes: canonical_phase(&psi),
        measurement: m,
        p_guess: p,
        iterations,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::guessing_probability;
    use crate::linalg::vec_norm;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn parameterization_is_normalized() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for d in 2..=4 {
            for _ in 0..50 {
                let a = amplitudes_from_params(&random_params(d, &mut rng), d);
                assert!((vec_norm(&a) - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn success_operator_reproduces_guessing_probability() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for d in 2..=3 {
            let config = GameConfig::new(d, 0.63).unwrap();
            for _ in 0..20 {
                let psi = amplitudes_from_params(&random_params(d, &mut rng), d);
                let other = amplitudes_from_params(&random_params(d, &mut rng), d);
                let (_, m) = best_measurement(&config, &other).unwrap();
                let w = success_operator(&config, &m).unwrap();
                let e = ideal_ensemble(&config, &DensityMatrix::pure(&psi).unwrap()).unwrap();
                let direct = guessing_probability(&e, &m).unwrap();
                assert!((expectation(&w, &psi) - direct).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn run_is_monotone_for_both_steps() {
        let config = GameConfig::new(3, 0.8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for step in [StateStep::NelderMead, StateStep::Eigen] {
            let opts = SeesawOptions { step, record_trace: true, ..Default::default() };
            let r = run(&config, &random_params(3, &mut rng), &opts).unwrap();
            assert!(r.trace.windows(2).all(|w| w[1] >= w[0] - 1e-12));
            assert_eq!(*r.trace.last().unwrap(), r.p_guess);
        }
    }

    #[test]
    fn unsupported_dimension() {
        let config = GameConfig::new(4, 0.5).unwrap();
        let init = vec![0.3; parameter_count(4)];
        assert!(matches!(run(&config, &init, &SeesawOptions::default()), Err(Error::Unsupported(_))));
    }
}
