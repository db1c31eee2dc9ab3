//! End-to-end predictions for the optical experiment: noisy detection
//! tables, the Fourier-gate test, register-coherence estimation and
//! Pauli-based state reconstruction.

pub mod published;

use rayon::prelude::*;
use serde::Serialize;

use crate::discrimination::{helstrom, DiscriminationProblem};
use crate::error::{check_range, Error, Result};
use crate::game::{
    assemble_ensemble, ensemble_for_unitary, fourier_matrix, pguess_max_d2, register_state, snap_probability,
    GameConfig,
};
use crate::linalg::{ComplexMatrix, C64};
use crate::measurement::Measurement;
use crate::mesh::{self, prep_state_d3, reference_fourier_plan, waveplates_to_guess_measurement, MeshPlan};
use crate::noise::{layer_dephasing, NoiseModel, NoisyMesh};
use crate::optimizer::{evaluate_strategy, optimal_state_d2};
use crate::state::{fidelity, DensityMatrix};

/// `P_ij = Tr(M_i ρ̃_j)`: row = Bob's guess, column = Alice's outcome.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectionTable {
    pub probs: Vec<Vec<f64>>,
    pub p_guess: f64,
    pub active_outcomes: Vec<usize>,
}

impl DetectionTable {
    pub fn from_states(states: &[ComplexMatrix], m: &Measurement) -> Result<Self> {
        if m.len() != states.len() {
            return Err(Error::DimensionMismatch {
                expected: states.len(),
                got: m.len(),
            });
        }
        let probs: Vec<Vec<f64>> = m
            .elements()
            .iter()
            .map(|mi| states.iter().map(|rj| (mi * rj).trace().re).collect())
            .collect();
        let active = m.active_outcomes();
        let p_guess = snap_probability(active.iter().map(|&i| probs[i][i]).sum());
        Ok(Self {
            probs,
            p_guess,
            active_outcomes: active,
        })
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().flatten().sum()
    }
}

/// Sub-normalized register states of the qubit experiment after interlayer dephasing.
pub fn noisy_ensemble_d2(noise: &NoiseModel, rho_b: &DensityMatrix) -> Result<Vec<ComplexMatrix>> {
    if rho_b.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: rho_b.dim() });
    }
    let e = ensemble_for_unitary(rho_b, &noise.register, &fourier_matrix(2)?)?;
    e.states()
        .iter()
        .map(|s| layer_dephasing(s, noise.layer_visibility))
        .collect()
}

pub fn simulate_d2(noise: &NoiseModel, rho_b: &DensityMatrix, m: &Measurement) -> Result<DetectionTable> {
    DetectionTable::from_states(&noisy_ensemble_d2(noise, rho_b)?, m)
}

/// Sub-normalized register states when the controlled gate is a noisy mesh.
///
/// The upper (register 0) branch is untouched; the lower branch goes through
/// the full channel; the coherence carries only the no-leak branch
/// `G = D′ L_k K₀ ⋯ L_1 K₀`, so `ρ̃_x[0][1] = r₀₁ ⟨x|ρ_B G†|x⟩`. Finally
/// interlayer dephasing scales the off-diagonals.
pub fn noisy_mesh_ensemble(noise: &NoiseModel, rho_b: &DensityMatrix, plan: &MeshPlan) -> Result<Vec<ComplexMatrix>> {
    let d = plan.d;
    if rho_b.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: rho_b.dim() });
    }
    let mesh = NoisyMesh::new(plan.clone(), noise.layer_visibilities(plan.layers.len()))?;
    let rho = rho_b.matrix();
    let g_rho = &mesh.coherent_operator()? * rho;
    let lower = mesh.channel()?.apply(rho)?;
    let states = assemble_ensemble(
        noise.register.matrix(),
        |x| rho[(x, x)],
        |x| g_rho[(x, x)],
        |x| lower[(x, x)],
        d,
    );
    states
        .iter()
        .map(|s| layer_dephasing(&s.hermitian_part(), noise.layer_visibility))
        .collect()
}

/// Qutrit experiment with the hand-derived Fourier mesh.
pub fn simulate_d3(noise: &NoiseModel, rho_b: &DensityMatrix, m: &Measurement) -> Result<DetectionTable> {
    simulate_mesh(noise, rho_b, m, &reference_fourier_plan())
}

pub fn simulate_mesh(noise: &NoiseModel, rho_b: &DensityMatrix, m: &Measurement, plan: &MeshPlan) -> Result<DetectionTable> {
    DetectionTable::from_states(&noisy_mesh_ensemble(noise, rho_b, plan)?, m)
}

/// Click probabilities `P_ij` of output mode `i` for Fourier probe `|w_j⟩`
/// through the three-mode mesh with uniform visibility `v`.
pub fn simulate_fourier_test(v: f64) -> Result<Vec<Vec<f64>>> {
    check_range("v", v, 0.0, 1.0, "[0, 1]")?;
    simulate_fourier_test_with(&NoisyMesh::uniform(reference_fourier_plan(), v)?)
}

pub fn simulate_fourier_test_with(mesh: &NoisyMesh) -> Result<Vec<Vec<f64>>> {
    let d = mesh.plan.d;
    let ch = mesh.channel()?;
    let mut p = vec![vec![0.0; d]; d];
    for j in 0..d {
        let out = ch.apply(&ComplexMatrix::outer(&mesh::fourier_probe_state(j, d)?))?;
        for (i, row) in p.iter_mut().enumerate() {
            row[j] = out[(i, i)].re;
        }
    }
    Ok(p)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaEstimate {
    pub gamma: f64,
    pub fidelity: f64,
}

pub const GAMMA_GRID_STEP: f64 = 1e-4;

/// Grid search for the `γ` whose `ρ_R(γ)` is closest in fidelity to `rho`.
pub fn estimate_gamma(rho: &DensityMatrix) -> Result<GammaEstimate> {
    estimate_gamma_with_step(rho, GAMMA_GRID_STEP)
}

/// Grid `γ_k = k/n` with `n = round(1/step)`; ties go to the smaller `γ`.
pub fn estimate_gamma_with_step(rho: &DensityMatrix, step: f64) -> Result<GammaEstimate> {
    check_range("step", step, 1e-7, 1.0, "[1e-7, 1]")?;
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: rho.dim() });
    }
    let n = (1.0 / step).round() as usize;
    let scores: Vec<Result<f64>> = (0..=n)
        .into_par_iter()
        .map(|k| fidelity(rho, &register_state(k as f64 / n as f64)?))
        .collect();
    let mut best = GammaEstimate {
        gamma: 0.0,
        fidelity: f64::NEG_INFINITY,
    };
    for (k, f) in scores.into_iter().enumerate() {
        let f = f?;
        if f > best.fidelity {
            best = GammaEstimate {
                gamma: k as f64 / n as f64,
                fidelity: f,
            };
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PauliExpectations {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl PauliExpectations {
    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn of(rho: &DensityMatrix) -> Result<Self> {
        if rho.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: rho.dim() });
        }
        let off = rho.get(0, 1);
        Ok(Self {
            x: 2.0 * off.re,
            y: -2.0 * off.im,
            z: (rho.get(0, 0) - rho.get(1, 1)).re,
        })
    }
}

/// Linear inversion `(I + xX + yY + zZ)/2`; Bloch vectors marginally outside
/// the ball (≤ 1e-9) are pulled back to its surface.
pub fn reconstruct_from_pauli(p: PauliExpectations) -> Result<DensityMatrix> {
    let r = p.norm();
    if !r.is_finite() || r > 1.0 + 1e-9 {
        return Err(Error::OutOfRange {
            name: "bloch norm",
            value: r,
            range: "≤ 1",
        });
    }
    let s = if r > 1.0 { 1.0 / r } else { 1.0 };
    let (x, y, z) = (p.x * s, p.y * s, p.z * s);
    DensityMatrix::new(ComplexMatrix::from_rows(&[
        [C64::new((1.0 + z) / 2.0, 0.0), C64::new(x / 2.0, -y / 2.0)],
        [C64::new(x / 2.0, y / 2.0), C64::new((1.0 - z) / 2.0, 0.0)],
    ]))
}

/// One row of the qubit coherence sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveRow {
    pub gamma: f64,
    pub p_max_analytic: f64,
    /// Optimal probe and noise-aware Helstrom measurement under interlayer dephasing.
    pub p_guess_model: f64,
    /// Measured value when `gamma` is one of the published sweep points.
    pub p_guess_paper: Option<f64>,
}

pub fn curve_d2(gammas: &[f64], layer_v: f64) -> Result<Vec<CurveRow>> {
    if gammas.is_empty() {
        return Err(Error::InvalidDistribution("empty gamma list".into()));
    }
    check_range("v", layer_v, 0.0, 1.0, "[0, 1]")?;
    let probe = DensityMatrix::pure(&optimal_state_d2())?;
    gammas
        .par_iter()
        .map(|&gamma| {
            let register = register_state(gamma)?;
            let noise = NoiseModel::uniform(layer_v, register)?;
            let states = noisy_ensemble_d2(&noise, &probe)?;
            let h = helstrom(&DiscriminationProblem::new(states)?)?;
            Ok(CurveRow {
                gamma,
                p_max_analytic: pguess_max_d2(gamma)?,
                p_guess_model: h.p_success,
                p_guess_paper: published::QUBIT_SWEEP
                    .iter()
                    .find(|q| (q.gamma - gamma).abs() < 1e-9)
                    .map(|q| q.p_exp),
            })
        })
        .collect()
}

pub fn published_gammas() -> Vec<f64> {
    published::QUBIT_SWEEP.iter().map(|q| q.gamma).collect()
}

/// Model prediction for one published qutrit strategy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrategyRow {
    pub index: usize,
    pub h1_deg: f64,
    pub h2_deg: f64,
    pub quarter_deg: f64,
    pub half_deg: f64,
    pub state: Vec<C64>,
    pub p_guess_model: f64,
    pub p_guess_paper: f64,
    pub p_exp_paper: f64,
}

/// Ideal-game prediction (`γ` = measured coherence) for every published
/// qutrit strategy, using the waveplate-defined probe and measurement.
pub fn table_d3_strategies() -> Result<Vec<StrategyRow>> {
    let config = GameConfig::new(3, published::MEASURED_GAMMA)?;
    published::THREE_PATH_STRATEGIES
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let state = prep_state_d3(s.h1_deg, s.h2_deg)?;
            let m = waveplates_to_guess_measurement(s.quarter_deg, s.half_deg, 3)?;
            let p = evaluate_strategy(&config, &DensityMatrix::pure(&state)?, &m)?;
            Ok(StrategyRow {
                index: k + 1,
                h1_deg: s.h1_deg,
                h2_deg: s.h2_deg,
                quarter_deg: s.quarter_deg,
                half_deg: s.half_deg,
                state,
                p_guess_model: p,
                p_guess_paper: s.p_theory,
                p_exp_paper: s.p_exp,
            })
        })
        .collect()
}
