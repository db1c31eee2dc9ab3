//! Density matrices, outcome distributions and the information measures on them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigensystem, psd_sqrt, ComplexMatrix, C64};
use crate::tol;

/// Hermitian, positive semi-definite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ComplexMatrix", into = "ComplexMatrix")]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates at the structural tolerance.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        validate_density(&m, tol::STRUCTURAL)
    }

    /// `|ψ⟩⟨ψ|` for a vector that is normalized here.
    pub fn pure(amplitudes: &[C64]) -> Result<Self> {
        let norm = crate::linalg::vec_norm(amplitudes);
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::Parse("pure state has zero norm".into()));
        }
        let v: Vec<C64> = amplitudes.iter().map(|z| z / norm).collect();
        Ok(Self {
            matrix: ComplexMatrix::outer(&v),
        })
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(d).scale_re(1.0 / d as f64),
        }
    }

    /// Basis state `|k⟩⟨k|`.
    pub fn basis(d: usize, k: usize) -> Self {
        Self {
            matrix: ComplexMatrix::basis_projector(d, k),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.matrix[(r, c)]
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }
}

impl TryFrom<ComplexMatrix> for DensityMatrix {
    type Error = Error;
    fn try_from(m: ComplexMatrix) -> Result<Self> {
        Self::new(m)
    }
}

impl From<DensityMatrix> for ComplexMatrix {
    fn from(d: DensityMatrix) -> Self {
        d.matrix
    }
}

/// Checks the density-matrix invariants at tolerance `tol`.
///
/// Eigenvalues in `[-tol, 0)` are clamped to zero and a trace drift of at most
/// `tol` is renormalized away; anything beyond that is an error naming the
/// broken invariant.
pub fn validate_density(m: &ComplexMatrix, tol: f64) -> Result<DensityMatrix> {
    m.dim()?;
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let herm = m.hermitian_deviation();
    if herm > tol {
        return Err(Error::NotHermitian(herm));
    }
    let tr = m.trace();
    if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
        return Err(Error::InvalidTrace(tr.re));
    }
    let h = m.hermitian_part();
    let es = hermitian_eigensystem(&h)?;
    let min = es.values.first().copied().unwrap_or(0.0);
    if min < -tol {
        return Err(Error::NotPsd(min));
    }
    let fixed = if min < 0.0 {
        es.map(|x| x.max(0.0))
    } else {
        h
    };
    let tr = fixed.trace().re;
    Ok(DensityMatrix {
        matrix: fixed.scale_re(1.0 / tr),
    })
}

/// Uhlmann root fidelity `Tr √(√ρ σ √ρ)`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: sigma.dim(),
        });
    }
    let s = psd_sqrt(rho.matrix())?;
    let inner = (&(&s * sigma.matrix()) * &s).hermitian_part();
    let es = hermitian_eigensystem(&inner)?;
    let min = es.values.first().copied().unwrap_or(0.0);
    if min < -tol::STRUCTURAL {
        return Err(Error::NotPsd(min));
    }
    let f: f64 = es
        .values
        .iter()
        .map(|&x| if x > tol::CLAMP { x.sqrt() } else { 0.0 })
        .sum();
    Ok(f.min(1.0))
}

/// Outcome distribution with integer labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityDistribution {
    probs: Vec<f64>,
    labels: Vec<usize>,
}

impl ProbabilityDistribution {
    /// Values within the clamp band of `[0, 1]` are snapped into it; the sum
    /// must be 1 within the round-trip tolerance.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        let mut clean = Vec::with_capacity(probs.len());
        for (i, &p) in probs.iter().enumerate() {
            if !p.is_finite() || !(-tol::CLAMP..=1.0 + tol::CLAMP).contains(&p) {
                return Err(Error::InvalidDistribution(format!("p[{i}] = {p}")));
            }
            clean.push(p.clamp(0.0, 1.0));
        }
        let sum: f64 = clean.iter().sum();
        if (sum - 1.0).abs() > tol::ROUND_TRIP {
            return Err(Error::InvalidDistribution(format!("sum = {sum}")));
        }
        let labels = (0..clean.len()).collect();
        Ok(Self { probs: clean, labels })
    }

    pub fn uniform(k: usize) -> Self {
        Self {
            probs: vec![1.0 / k as f64; k],
            labels: (0..k).collect(),
        }
    }

    /// Born-rule distribution of measuring `rho` in the orthonormal basis
    /// given by the columns of `basis`.
    pub fn born(rho: &DensityMatrix, basis: &ComplexMatrix) -> Result<Self> {
        if basis.rows() != rho.dim() {
            return Err(Error::DimensionMismatch {
                expected: rho.dim(),
                got: basis.rows(),
            });
        }
        let probs = (0..basis.cols())
            .map(|k| {
                let v = basis.column(k);
                rho.matrix().sandwich(&v, &v).re
            })
            .collect();
        Self::new(probs)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// Shannon entropy in bits, with `0 · log 0 = 0`.
pub fn shannon_entropy(p: &ProbabilityDistribution) -> f64 {
    p.probs
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.log2())
        .sum::<f64>()
        .max(0.0)
}
