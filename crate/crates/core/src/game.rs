//! The guessing game on a system `B` of dimension `d` controlled by a qubit register `R`.
//!
//! Register value 0 measures `B` in the standard basis; register value 1 first
//! applies the Fourier matrix `F` and then measures in the standard basis.
//! After Alice's outcome `x` the register is left in the sub-normalized state
//!
//! ```text
//!   ρ̃_x = [[ r00 ⟨x|ρ|x⟩     , r01 ⟨x|ρ F†|x⟩   ],
//!          [ r10 ⟨x|F ρ|x⟩   , r11 ⟨x|F ρ F†|x⟩ ]]
//! ```
//!
//! and Bob's task is to discriminate `{ρ̃_x}`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};
use crate::linalg::{cis, ComplexMatrix, C64};
use crate::measurement::Measurement;
use crate::state::{shannon_entropy, DensityMatrix, ProbabilityDistribution};
use crate::tol;

/// Largest game dimension the optimizer and matrix code are sized for.
pub const MAX_DIM: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameConfig {
    pub d: usize,
    pub gamma: f64,
}

impl GameConfig {
    pub fn new(d: usize, gamma: f64) -> Result<Self> {
        if !(2..=MAX_DIM).contains(&d) {
            return Err(Error::OutOfRange {
                name: "d",
                value: d as f64,
                range: "[2, 8]",
            });
        }
        check_range("gamma", gamma, 0.0, 1.0, "[0, 1]")?;
        Ok(Self { d, gamma })
    }
}

/// `U_{jk} = e^{2πi jk/d}/√d`.
pub fn fourier_matrix(d: usize) -> Result<ComplexMatrix> {
    if d == 0 {
        return Err(Error::OutOfRange {
            name: "d",
            value: 0.0,
            range: "≥ 1",
        });
    }
    let norm = 1.0 / (d as f64).sqrt();
    Ok(ComplexMatrix::from_fn(d, d, |j, k| {
        cis(2.0 * PI * ((j * k) % d) as f64 / d as f64) * norm
    }))
}

/// `ρ_R(γ) = ½ [[1, γ], [γ, 1]]`.
pub fn register_state(gamma: f64) -> Result<DensityMatrix> {
    check_range("gamma", gamma, 0.0, 1.0, "[0, 1]")?;
    DensityMatrix::new(ComplexMatrix::from_real_rows(&[[0.5, gamma / 2.0], [gamma / 2.0, 0.5]]))
}

/// Sub-normalized register states `ρ̃_x` and their weights `p_x = Tr ρ̃_x`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PostMeasurementEnsemble {
    states: Vec<ComplexMatrix>,
    outcome_probs: Vec<f64>,
}

impl PostMeasurementEnsemble {
    /// Checks each state is Hermitian PSD and the weights sum to 1.
    pub fn new(states: Vec<ComplexMatrix>) -> Result<Self> {
        let mut probs = Vec::with_capacity(states.len());
        for (x, s) in states.iter().enumerate() {
            let d = s.dim()?;
            if d != 2 {
                return Err(Error::DimensionMismatch { expected: 2, got: d });
            }
            let dev = s.hermitian_deviation();
            if dev > tol::STRUCTURAL {
                return Err(Error::NotHermitian(dev));
            }
            let es = crate::linalg::hermitian_eigensystem(s)?;
            if es.values[0] < -tol::STRUCTURAL {
                return Err(Error::NotPsd(es.values[0]));
            }
            let p = s.trace().re;
            if !(-tol::CLAMP..=1.0 + tol::CLAMP).contains(&p) {
                return Err(Error::InvalidDistribution(format!("p[{x}] = {p}")));
            }
            probs.push(p.clamp(0.0, 1.0));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > tol::ROUND_TRIP {
            return Err(Error::InvalidDistribution(format!("weights sum to {sum}")));
        }
        Ok(Self {
            states,
            outcome_probs: probs,
        })
    }

    pub fn states(&self) -> &[ComplexMatrix] {
        &self.states
    }

    pub fn outcome_probs(&self) -> &[f64] {
        &self.outcome_probs
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// `ρ_x = ρ̃_x / p_x`, or `None` when `p_x` vanishes.
    pub fn normalized(&self, x: usize) -> Option<ComplexMatrix> {
        let p = self.outcome_probs[x];
        (p > tol::CLAMP).then(|| self.states[x].scale_re(1.0 / p))
    }

    pub fn outcome_distribution(&self) -> ProbabilityDistribution {
        ProbabilityDistribution::new(self.outcome_probs.clone())
            .expect("weights validated at construction")
    }
}

/// Sub-normalized register blocks for an arbitrary controlled unitary.
///
/// The off-diagonal and lower blocks are supplied by the caller so noisy
/// versions of the controlled branch can reuse the same assembly.
pub(crate) fn assemble_ensemble(
    register: &ComplexMatrix,
    upper: impl Fn(usize) -> C64,
    coherence: impl Fn(usize) -> C64,
    lower: impl Fn(usize) -> C64,
    d: usize,
) -> Vec<ComplexMatrix> {
    (0..d)
        .map(|x| {
            let c = coherence(x);
            ComplexMatrix::from_rows(&[
                [register[(0, 0)] * upper(x), register[(0, 1)] * c.conj()],
                [register[(1, 0)] * c, register[(1, 1)] * lower(x)],
            ])
        })
        .collect()
}

/// Ensemble for a register state and a unitary `U` applied when the register is 1.
pub fn ensemble_for_unitary(
    rho_b: &DensityMatrix,
    register: &DensityMatrix,
    u: &ComplexMatrix,
) -> Result<PostMeasurementEnsemble> {
    let d = rho_b.dim();
    if register.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: register.dim(),
        });
    }
    if u.rows() != d || u.cols() != d {
        return Err(Error::DimensionMismatch { expected: d, got: u.rows() });
    }
    let rho = rho_b.matrix();
    let u_rho = u * rho;
    let u_rho_ud = &u_rho * &u.adjoint();
    let states = assemble_ensemble(
        register.matrix(),
        |x| rho[(x, x)],
        |x| u_rho[(x, x)],
        |x| u_rho_ud[(x, x)],
        d,
    );
    PostMeasurementEnsemble::new(snap_hermitian(states))
}

fn snap_hermitian(states: Vec<ComplexMatrix>) -> Vec<ComplexMatrix> {
    states.into_iter().map(|s| s.hermitian_part()).collect()
}

/// Post-measurement register ensemble of the `(γ, d)` game for probe `ρ_B`.
///
/// `register` may be any qubit state; the ideal game uses `register_state(config.gamma)`.
pub fn post_measurement_ensemble(
    config: &GameConfig,
    rho_b: &DensityMatrix,
    register: &DensityMatrix,
) -> Result<PostMeasurementEnsemble> {
    if rho_b.dim() != config.d {
        return Err(Error::DimensionMismatch {
            expected: config.d,
            got: rho_b.dim(),
        });
    }
    ensemble_for_unitary(rho_b, register, &fourier_matrix(config.d)?)
}

/// Ensemble with the ideal register `ρ_R(γ)`.
pub fn ideal_ensemble(config: &GameConfig, rho_b: &DensityMatrix) -> Result<PostMeasurementEnsemble> {
    post_measurement_ensemble(config, rho_b, &register_state(config.gamma)?)
}

/// `Σ_x Tr(M_x ρ̃_x)`.
pub fn guessing_probability(ensemble: &PostMeasurementEnsemble, m: &Measurement) -> Result<f64> {
    if m.len() != ensemble.len() {
        return Err(Error::DimensionMismatch {
            expected: ensemble.len(),
            got: m.len(),
        });
    }
    if m.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: m.dim() });
    }
    let p: f64 = m
        .elements()
        .iter()
        .zip(ensemble.states())
        .map(|(mx, rx)| (mx * rx).trace().re)
        .sum();
    Ok(snap_probability(p))
}

pub(crate) fn snap_probability(p: f64) -> f64 {
    if p > -tol::CLAMP && p < 1.0 + tol::CLAMP {
        p.clamp(0.0, 1.0)
    } else {
        p
    }
}

/// Closed-form optimum of the qubit game: `½(1 + √(2+2γ²)/2)`.
pub fn pguess_max_d2(gamma: f64) -> Result<f64> {
    check_range("gamma", gamma, 0.0, 1.0, "[0, 1]")?;
    Ok(0.5 * (1.0 + (2.0 + 2.0 * gamma * gamma).sqrt() / 2.0))
}

/// `log2(1/c)` with `c = max_ij |⟨s_i|t_j⟩|²`; bases are the columns of each unitary.
pub fn maassen_uffink_bound(basis_s: &ComplexMatrix, basis_t: &ComplexMatrix) -> Result<f64> {
    basis_s.ensure_unitary(tol::STRUCTURAL)?;
    basis_t.ensure_unitary(tol::STRUCTURAL)?;
    if basis_s.rows() != basis_t.rows() {
        return Err(Error::DimensionMismatch {
            expected: basis_s.rows(),
            got: basis_t.rows(),
        });
    }
    let overlaps = &basis_s.adjoint() * basis_t;
    let c = overlaps.entries().iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
    Ok((1.0 / c).log2().max(0.0))
}

/// `H(S) + H(T)` for the Born distributions of `ρ_B` in both bases.
pub fn entropic_sum(rho_b: &DensityMatrix, basis_s: &ComplexMatrix, basis_t: &ComplexMatrix) -> Result<f64> {
    basis_s.ensure_unitary(tol::STRUCTURAL)?;
    basis_t.ensure_unitary(tol::STRUCTURAL)?;
    let hs = shannon_entropy(&ProbabilityDistribution::born(rho_b, basis_s)?);
    let ht = shannon_entropy(&ProbabilityDistribution::born(rho_b, basis_t)?);
    Ok(hs + ht)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapRatio {
    pub p_gap: f64,
    pub ratio: f64,
}

/// Splits the observed uncertainty `1 − p_exp` into the part explained by the
/// best-known strategy (`p_gap = p_best_known − p_exp`) and its share.
pub fn gap_ratio(p_best_known: f64, p_exp: f64) -> Result<GapRatio> {
    check_range("p_best_known", p_best_known, 0.0, 1.0, "[0, 1]")?;
    check_range("p_exp", p_exp, 0.0, p_best_known, "[0, p_best_known]")?;
    if p_exp >= 1.0 {
        return Err(Error::OutOfRange {
            name: "p_exp",
            value: p_exp,
            range: "[0, 1)",
        });
    }
    let p_gap = p_best_known - p_exp;
    Ok(GapRatio {
        p_gap,
        ratio: p_gap / (1.0 - p_exp),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{haar_state, ONE};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn hadamard() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[[FRAC_1_SQRT_2, FRAC_1_SQRT_2], [FRAC_1_SQRT_2, -FRAC_1_SQRT_2]])
    }

    #[test]
    fn fourier_small_cases() {
        assert_eq!(fourier_matrix(1).unwrap(), ComplexMatrix::identity(1));
        assert!(fourier_matrix(2).unwrap().max_abs_diff(&hadamard()) < 1e-15);
        let w = cis(2.0 * PI / 3.0);
        let s = 1.0 / 3f64.sqrt();
        let expected = ComplexMatrix::from_rows(&[[ONE, ONE, ONE], [ONE, w, w * w], [ONE, w * w, w]]).scale_re(s);
        assert!(fourier_matrix(3).unwrap().max_abs_diff(&expected) < 1e-15);
        assert!(fourier_matrix(0).is_err());
    }

    #[test]
    fn fourier_is_unitary_with_flat_first_row_and_column() {
        for d in 1..=8 {
            let f = fourier_matrix(d).unwrap();
            assert!(f.unitary_deviation() < 1e-12);
            let s = 1.0 / (d as f64).sqrt();
            for k in 0..d {
                assert!((f[(0, k)] - C64::new(s, 0.0)).norm() < 1e-15);
                assert!((f[(k, 0)] - C64::new(s, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn register_state_examples() {
        assert_eq!(register_state(0.0).unwrap(), DensityMatrix::maximally_mixed(2));
        let plus = DensityMatrix::pure(&[ONE, ONE]).unwrap();
        assert!(register_state(1.0).unwrap().matrix().max_abs_diff(plus.matrix()) < 1e-15);
        let half = register_state(0.5).unwrap();
        assert!(half.matrix().max_abs_diff(&ComplexMatrix::from_real_rows(&[[0.5, 0.25], [0.25, 0.5]])) < 1e-15);
        assert!(register_state(1.2).is_err());
        assert!(register_state(-0.1).is_err());
    }

    #[test]
    fn ensemble_of_zero_state_at_full_coherence() {
        let cfg = GameConfig::new(2, 1.0).unwrap();
        let e = ideal_ensemble(&cfg, &DensityMatrix::basis(2, 0)).unwrap();
        let expected = ComplexMatrix::from_real_rows(&[[0.5, 0.5 * FRAC_1_SQRT_2], [0.5 * FRAC_1_SQRT_2, 0.25]]);
        assert!(e.states()[0].max_abs_diff(&expected) < 1e-15);
        assert!((e.outcome_probs()[0] - 0.75).abs() < 1e-15);
    }

    #[test]
    fn classical_register_gives_diagonal_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for d in 2..=4 {
            let cfg = GameConfig::new(d, 0.0).unwrap();
            let rho = DensityMatrix::pure(&haar_state(d, &mut rng)).unwrap();
            let e = ideal_ensemble(&cfg, &rho).unwrap();
            for s in e.states() {
                assert!(s[(0, 1)].norm() < 1e-12 && s[(1, 0)].norm() < 1e-12);
            }
        }
    }

    #[test]
    fn ensemble_weights_and_positivity_over_gamma_grid() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for d in [2usize, 3] {
            for step in 0..=100 {
                let gamma = step as f64 / 100.0;
                let cfg = GameConfig::new(d, gamma).unwrap();
                let rho = DensityMatrix::pure(&haar_state(d, &mut rng)).unwrap();
                // construction validates PSD at 1e-10 and the weight sum at 1e-9
                let e = ideal_ensemble(&cfg, &rho).unwrap();
                let sum: f64 = e.states().iter().map(|s| s.trace().re).sum();
                assert!((sum - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn ensemble_dimension_mismatch() {
        let cfg = GameConfig::new(3, 0.5).unwrap();
        let err = ideal_ensemble(&cfg, &DensityMatrix::basis(2, 0)).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
        let bad_register = DensityMatrix::maximally_mixed(3);
        assert!(post_measurement_ensemble(&cfg, &DensityMatrix::basis(3, 0), &bad_register).is_err());
    }

    #[test]
    fn identity_measurement_returns_first_weight() {
        let cfg = GameConfig::new(2, 0.3).unwrap();
        let e = ideal_ensemble(&cfg, &DensityMatrix::basis(2, 0)).unwrap();
        let m = Measurement::new(vec![ComplexMatrix::identity(2), ComplexMatrix::zeros(2, 2)]).unwrap();
        assert!((guessing_probability(&e, &m).unwrap() - e.outcome_probs()[0]).abs() < 1e-15);
        let wrong = Measurement::from_basis(&ComplexMatrix::identity(2)).unwrap();
        let e3 = ideal_ensemble(&GameConfig::new(3, 0.3).unwrap(), &DensityMatrix::basis(3, 0)).unwrap();
        assert!(guessing_probability(&e3, &wrong).is_err());
    }

    #[test]
    fn guessing_probability_is_linear_in_measurement() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let cfg = GameConfig::new(2, rng.gen()).unwrap();
            let rho = DensityMatrix::pure(&haar_state(2, &mut rng)).unwrap();
            let e = ideal_ensemble(&cfg, &rho).unwrap();
            let a = Measurement::from_basis(&crate::linalg::haar_unitary(2, &mut rng)).unwrap();
            let b = Measurement::from_basis(&crate::linalg::haar_unitary(2, &mut rng)).unwrap();
            let lambda: f64 = rng.gen();
            let mixed = guessing_probability(&e, &a.mix(&b, lambda).unwrap()).unwrap();
            let expected = lambda * guessing_probability(&e, &a).unwrap()
                + (1.0 - lambda) * guessing_probability(&e, &b).unwrap();
            assert!((mixed - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn pguess_d2_values() {
        assert!((pguess_max_d2(0.0).unwrap() - (2.0 + 2f64.sqrt()) / 4.0).abs() < 1e-15);
        assert!((pguess_max_d2(1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((pguess_max_d2(0.9918).unwrap() - 0.99796).abs() < 1e-5);
        assert!(pguess_max_d2(1.01).is_err());
        let mut last = 0.0;
        for k in 0..=1000 {
            let p = pguess_max_d2(k as f64 / 1000.0).unwrap();
            assert!(p >= last);
            last = p;
        }
    }

    #[test]
    fn maassen_uffink_examples() {
        let id = ComplexMatrix::identity(3);
        assert_eq!(maassen_uffink_bound(&id, &id).unwrap(), 0.0);
        for d in 2..=6 {
            let b = maassen_uffink_bound(&ComplexMatrix::identity(d), &fourier_matrix(d).unwrap()).unwrap();
            assert!((b - (d as f64).log2()).abs() < 1e-12);
        }
        assert!((maassen_uffink_bound(&ComplexMatrix::identity(2), &hadamard()).unwrap() - 1.0).abs() < 1e-12);
        let not_unitary = ComplexMatrix::real_diag(&[1.0, 2.0]);
        assert!(matches!(
            maassen_uffink_bound(&not_unitary, &ComplexMatrix::identity(2)),
            Err(Error::NotUnitary(_))
        ));
    }

    #[test]
    fn entropic_sum_examples() {
        let z = ComplexMatrix::identity(2);
        let h = hadamard();
        let s0 = entropic_sum(&DensityMatrix::basis(2, 0), &z, &h).unwrap();
        let plus = DensityMatrix::pure(&[ONE, ONE]).unwrap();
        let sp = entropic_sum(&plus, &z, &h).unwrap();
        let mixed = entropic_sum(&DensityMatrix::maximally_mixed(2), &z, &h).unwrap();
        assert!((s0 - 1.0).abs() < 1e-12);
        assert!((sp - 1.0).abs() < 1e-12);
        assert!((mixed - 2.0).abs() < 1e-12);
    }

    #[test]
    fn gap_ratio_examples() {
        let g = gap_ratio(0.9793, 0.9611).unwrap();
        assert!((g.p_gap - 0.0182).abs() < 1e-12);
        assert!((g.ratio - 0.4679).abs() < 2e-4);
        assert_eq!(gap_ratio(0.7, 0.7).unwrap(), GapRatio { p_gap: 0.0, ratio: 0.0 });
        let g = gap_ratio(1.0, 0.5).unwrap();
        assert!((g.p_gap - 0.5).abs() < 1e-15 && (g.ratio - 1.0).abs() < 1e-15);
        assert!(gap_ratio(0.5, 0.6).is_err());
        assert!(gap_ratio(1.0, 1.0).is_err());
    }
}
