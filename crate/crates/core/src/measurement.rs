use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigensystem, ComplexMatrix};
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasurementKind {
    Projective,
    General,
}

/// Ordered POVM: PSD elements summing to the identity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Measurement {
    elements: Vec<ComplexMatrix>,
    kind: MeasurementKind,
}

impl Measurement {
    /// Completeness within 1e-9 and each element PSD within 1e-10.
    pub fn new(elements: Vec<ComplexMatrix>) -> Result<Self> {
        Self::with_tolerances(elements, tol::ROUND_TRIP, tol::STRUCTURAL)
    }

    /// For published, rounded matrices: one tolerance for completeness and positivity.
    pub fn with_tolerance(elements: Vec<ComplexMatrix>, tol: f64) -> Result<Self> {
        Self::with_tolerances(elements, tol, tol)
    }

    fn with_tolerances(elements: Vec<ComplexMatrix>, completeness: f64, psd: f64) -> Result<Self> {
        let first = elements
            .first()
            .ok_or_else(|| Error::InvalidMeasurement("no elements".into()))?;
        let d = first.dim()?;
        let mut sum = ComplexMatrix::zeros(d, d);
        for (i, m) in elements.iter().enumerate() {
            if m.rows() != d || m.cols() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: m.rows(),
                });
            }
            let es = hermitian_eigensystem(m)
                .map_err(|e| Error::InvalidMeasurement(format!("element {i}: {e}")))?;
            if es.values[0] < -psd {
                return Err(Error::InvalidMeasurement(format!(
                    "element {i} has eigenvalue {:e}",
                    es.values[0]
                )));
            }
            sum = &sum + m;
        }
        let dev = sum.max_abs_diff(&ComplexMatrix::identity(d));
        if dev > completeness {
            return Err(Error::InvalidMeasurement(format!(
                "elements sum to identity only within {dev:e}"
            )));
        }
        let projective = elements
            .iter()
            .all(|m| (m * m).max_abs_diff(m) <= tol::ROUND_TRIP.max(completeness));
        Ok(Self {
            elements,
            kind: if projective {
                MeasurementKind::Projective
            } else {
                MeasurementKind::General
            },
        })
    }

    /// Rank-one projective measurement onto the columns of a unitary.
    pub fn from_basis(basis: &ComplexMatrix) -> Result<Self> {
        basis.ensure_unitary(tol::STRUCTURAL)?;
        let elements = (0..basis.cols())
            .map(|k| ComplexMatrix::outer(&basis.column(k)))
            .collect();
        Self::new(elements)
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &ComplexMatrix {
        &self.elements[i]
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.elements[0].rows()
    }

    pub fn kind(&self) -> MeasurementKind {
        self.kind
    }

    /// Indices of elements that are not (numerically) zero.
    pub fn active_outcomes(&self) -> Vec<usize> {
        self.elements
            .iter()
            .enumerate()
            .filter(|(_, m)| m.max_abs() > tol::CLAMP)
            .map(|(i, _)| i)
            .collect()
    }

    /// `λ·self + (1−λ)·other`.
    pub fn mix(&self, other: &Self, lambda: f64) -> Result<Self> {
        if self.len() != other.len() || self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: other.len(),
            });
        }
        let elements = self
            .elements
            .iter()
            .zip(&other.elements)
            .map(|(a, b)| &a.scale_re(lambda) + &b.scale_re(1.0 - lambda))
            .collect();
        Self::new(elements)
    }
}
