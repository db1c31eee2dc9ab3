//! Minimum-error discrimination of sub-normalized qubit states.
//!
//! Three interchangeable strategies sit behind [`Discriminator`]:
//!
//! | name          | states | method                                              |
//! |---------------|--------|-----------------------------------------------------|
//! | `helstrom`    | 2      | projector onto the non-negative part of `ρ̃₀ − ρ̃₁`   |
//! | `two-bucket`  | 3      | Helstrom on two outcomes, the third element is zero |
//! | `brute-force` | 2 or 3 | scan of rank-one projective measurements on a grid  |

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{snap_probability, PostMeasurementEnsemble};
use crate::linalg::{cis, hermitian_eigensystem, ComplexMatrix, C64};
use crate::measurement::Measurement;
use crate::tol;

/// Sub-normalized qubit states whose traces are the priors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscriminationProblem {
    states: Vec<ComplexMatrix>,
}

impl DiscriminationProblem {
    pub fn new(states: Vec<ComplexMatrix>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::InvalidDistribution("no states".into()));
        }
        for s in &states {
            let d = s.dim()?;
            if d != 2 {
                return Err(Error::DimensionMismatch { expected: 2, got: d });
            }
            let dev = s.hermitian_deviation();
            if dev > tol::STRUCTURAL {
                return Err(Error::NotHermitian(dev));
            }
        }
        let sum: f64 = states.iter().map(|s| s.trace().re).sum();
        if (sum - 1.0).abs() > tol::ROUND_TRIP {
            return Err(Error::InvalidDistribution(format!("priors sum to {sum}")));
        }
        Ok(Self { states })
    }

    pub fn states(&self) -> &[ComplexMatrix] {
        &self.states
    }

    pub fn priors(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.trace().re).collect()
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// `Σ_x Tr(M_x ρ̃_x)`.
    pub fn success(&self, m: &Measurement) -> Result<f64> {
        if m.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: m.len(),
            });
        }
        Ok(success_of(&self.states, m.elements()))
    }
}

impl From<&PostMeasurementEnsemble> for DiscriminationProblem {
    fn from(e: &PostMeasurementEnsemble) -> Self {
        Self {
            states: e.states().to_vec(),
        }
    }
}

fn success_of(states: &[ComplexMatrix], elements: &[ComplexMatrix]) -> f64 {
    let p: f64 = states
        .iter()
        .zip(elements)
        .map(|(r, m)| (m * r).trace().re)
        .sum();
    snap_probability(p)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Discrimination {
    pub p_success: f64,
    pub measurement: Measurement,
}

/// Two-state Helstrom measurement.
///
/// `M₀` projects onto the eigenspace of `ρ̃₀ − ρ̃₁` with eigenvalue ≥ 0 (the
/// zero eigenspace goes to outcome 0), `M₁ = I − M₀`, and the success
/// probability is `½(Tr ρ̃₀ + Tr ρ̃₁) + ½‖ρ̃₀ − ρ̃₁‖₁`.
pub fn helstrom(problem: &DiscriminationProblem) -> Result<Discrimination> {
    if problem.len() != 2 {
        return Err(Error::InvalidDistribution(format!(
            "helstrom needs 2 states, got {}",
            problem.len()
        )));
    }
    let (r0, r1) = (&problem.states[0], &problem.states[1]);
    let (p, m0) = helstrom_pair(r0, r1)?;
    let m1 = &ComplexMatrix::identity(2) - &m0;
    Ok(Discrimination {
        p_success: p,
        measurement: Measurement::new(vec![m0, m1])?,
    })
}

/// Success probability and `M₀` for discriminating `a` (outcome 0) from `b`.
fn helstrom_pair(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<(f64, ComplexMatrix)> {
    let diff = (a - b).hermitian_part();
    let es = hermitian_eigensystem(&diff)?;
    let trace_norm: f64 = es.values.iter().map(|x| x.abs()).sum();
    let weight = a.trace().re + b.trace().re;
    let p = snap_probability(0.5 * weight + 0.5 * trace_norm);
    let m0 = es.projector(|x| x >= -tol::CLAMP);
    Ok((p, m0))
}

/// Best projective measurement that never guesses `zero_outcome`.
///
/// The remaining two outcomes are discriminated with Helstrom; the third
/// state contributes nothing to the success probability.
pub fn best_projective_two_bucket(problem: &DiscriminationProblem, zero_outcome: usize) -> Result<Discrimination> {
    if problem.len() != 3 {
        return Err(Error::InvalidDistribution(format!(
            "two-bucket discrimination needs 3 states, got {}",
            problem.len()
        )));
    }
    if zero_outcome >= 3 {
        return Err(Error::InvalidIndex(format!("zero outcome {zero_outcome} not in 0..3")));
    }
    let active: Vec<usize> = (0..3).filter(|&k| k != zero_outcome).collect();
    let (a, b) = (active[0], active[1]);
    let (p, ma) = helstrom_pair(&problem.states[a], &problem.states[b])?;
    let mut elements = vec![ComplexMatrix::zeros(2, 2); 3];
    elements[b] = &ComplexMatrix::identity(2) - &ma;
    elements[a] = ma;
    Ok(Discrimination {
        p_success: p,
        measurement: Measurement::new(elements)?,
    })
}

/// Maximum of [`best_projective_two_bucket`] over the three zero-outcome choices;
/// ties keep the smallest index.
pub fn best_projective_two_bucket_any(problem: &DiscriminationProblem) -> Result<(usize, Discrimination)> {
    let mut best: Option<(usize, Discrimination)> = None;
    for z in 0..3 {
        let cand = best_projective_two_bucket(problem, z)?;
        if !best.as_ref().is_some_and(|(_, b)| cand.p_success <= b.p_success) {
            best = Some((z, cand));
        }
    }
    Ok(best.expect("three candidates"))
}

/// Projectors `(I ± n·σ)/2` for the Bloch direction `(θ, φ)`.
pub fn bloch_projectors(theta: f64, phi: f64) -> (ComplexMatrix, ComplexMatrix) {
    let (s, c) = theta.sin_cos();
    let off = cis(-phi) * (0.5 * s);
    let plus = ComplexMatrix::from_rows(&[
        [C64::new(0.5 * (1.0 + c), 0.0), off],
        [off.conj(), C64::new(0.5 * (1.0 - c), 0.0)],
    ]);
    let minus = &ComplexMatrix::identity(2) - &plus;
    (plus, minus)
}

/// Exhaustive scan of rank-one projective measurements.
///
/// `θ` takes `grid_steps + 1` values on `[0, π]` and `φ` takes
/// `2·grid_steps + 1` values on `[0, 2π]`; each of the two projectors is
/// assigned to the state it detects best. Returns the best success found,
/// which never exceeds the true optimum.
pub fn brute_force_projective(problem: &DiscriminationProblem, grid_steps: usize) -> Result<f64> {
    Ok(brute_force_search(problem, grid_steps)?.0)
}

fn brute_force_search(problem: &DiscriminationProblem, grid_steps: usize) -> Result<(f64, f64, f64)> {
    if !(2..=3).contains(&problem.len()) {
        return Err(Error::Unsupported(format!(
            "brute force handles 2 or 3 states, got {}",
            problem.len()
        )));
    }
    if grid_steps == 0 {
        return Err(Error::OutOfRange {
            name: "grid_steps",
            value: 0.0,
            range: "≥ 1",
        });
    }
    let step = PI / grid_steps as f64;
    // Each state ρ = (t I + r·σ)/2 gives Tr(P± ρ) = (t ± r·n)/2.
    let bloch: Vec<(f64, [f64; 3])> = problem
        .states
        .iter()
        .map(|s| {
            let t = s.trace().re;
            let x = 2.0 * s[(0, 1)].re;
            let y = -2.0 * s[(0, 1)].im;
            let z = (s[(0, 0)] - s[(1, 1)]).re;
            (t, [x, y, z])
        })
        .collect();
    let best_row = |i: usize| -> (f64, f64, f64) {
        let theta = i as f64 * step;
        let (st, ct) = theta.sin_cos();
        let mut best = (f64::NEG_INFINITY, theta, 0.0);
        for j in 0..=2 * grid_steps {
            let phi = j as f64 * step;
            let (sp, cp) = phi.sin_cos();
            let n = [st * cp, st * sp, ct];
            let mut plus = f64::NEG_INFINITY;
            let mut minus = f64::NEG_INFINITY;
            for (t, r) in &bloch {
                let dot = r[0] * n[0] + r[1] * n[1] + r[2] * n[2];
                plus = plus.max(0.5 * (t + dot));
                minus = minus.max(0.5 * (t - dot));
            }
            if plus + minus > best.0 {
                best = (plus + minus, theta, phi);
            }
        }
        best
    };
    let best = (0..=grid_steps)
        .into_par_iter()
        .map(best_row)
        .reduce(
            || (f64::NEG_INFINITY, 0.0, 0.0),
            |a, b| if b.0 > a.0 || (b.0 == a.0 && (b.1, b.2) < (a.1, a.2)) { b } else { a },
        );
    Ok((snap_probability(best.0), best.1, best.2))
}

/// A discrimination strategy selectable by name.
pub trait Discriminator: Send + Sync {
    fn name(&self) -> &'static str;
    fn discriminate(&self, problem: &DiscriminationProblem) -> Result<Discrimination>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Helstrom;

impl Discriminator for Helstrom {
    fn name(&self) -> &'static str {
        "helstrom"
    }
    fn discriminate(&self, problem: &DiscriminationProblem) -> Result<Discrimination> {
        helstrom(problem)
    }
}

/// Helstrom for two states; for three, the best two-bucket projective
/// measurement with either a fixed or a searched zero outcome.
#[derive(Debug, Clone, Copy, Default)]
pub struct TwoBucket {
    pub zero_outcome: Option<usize>,
}

impl Discriminator for TwoBucket {
    fn name(&self) -> &'static str {
        "two-bucket"
    }
    fn discriminate(&self, problem: &DiscriminationProblem) -> Result<Discrimination> {
        match (problem.len(), self.zero_outcome) {
            (2, _) => helstrom(problem),
            (_, Some(z)) => best_projective_two_bucket(problem, z),
            (_, None) => best_projective_two_bucket_any(problem).map(|(_, d)| d),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BruteForce {
    pub grid_steps: usize,
}

impl Default for BruteForce {
    fn default() -> Self {
        Self { grid_steps: 360 }
    }
}

impl Discriminator for BruteForce {
    fn name(&self) -> &'static str {
        "brute-force"
    }
    fn discriminate(&self, problem: &DiscriminationProblem) -> Result<Discrimination> {
        let (p, theta, phi) = brute_force_search(problem, self.grid_steps)?;
        let (plus, minus) = bloch_projectors(theta, phi);
        let pick = |proj: &ComplexMatrix| {
            (0..problem.len())
                .map(|x| ((proj * &problem.states[x]).trace().re, x))
                .fold((f64::NEG_INFINITY, 0), |a, b| if b.0 > a.0 { b } else { a })
                .1
        };
        let mut elements = vec![ComplexMatrix::zeros(2, 2); problem.len()];
        let (xp, xm) = (pick(&plus), pick(&minus));
        elements[xp] = &elements[xp] + &plus;
        elements[xm] = &elements[xm] + &minus;
        Ok(Discrimination {
            p_success: p,
            measurement: Measurement::new(elements)?,
        })
    }
}

pub const DISCRIMINATORS: [&str; 3] = ["helstrom", "two-bucket", "brute-force"];

/// Looks up a discriminator by registry name with default settings.
pub fn discriminator(name: &str) -> Result<Box<dyn Discriminator>> {
    match name {
        "helstrom" => Ok(Box::new(Helstrom)),
        "two-bucket" => Ok(Box::new(TwoBucket::default())),
        "brute-force" => Ok(Box::new(BruteForce::default())),
        other => Err(Error::UnknownStrategy(other.to_string())),
    }
}
