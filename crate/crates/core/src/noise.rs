//! Kraus-operator noise: interlayer dephasing, imperfect-visibility
//! interferometers, and the register-controlled version of the latter.

use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};
use crate::linalg::{ComplexMatrix, C64};
use crate::mesh::MeshPlan;
use crate::state::{validate_density, DensityMatrix};
use crate::tol;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KrausChannel {
    dim: usize,
    operators: Vec<ComplexMatrix>,
}

impl KrausChannel {
    /// Requires `Σ K†K = I` within 1e-10.
    pub fn new(operators: Vec<ComplexMatrix>) -> Result<Self> {
        let dim = operators
            .first()
            .ok_or_else(|| Error::InvalidMeasurement("channel without Kraus operators".into()))?
            .dim()?;
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for k in &operators {
            if k.rows() != dim || k.cols() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: k.rows() });
            }
            sum = &sum + &(&k.adjoint() * k);
        }
        let dev = sum.max_abs_diff(&ComplexMatrix::identity(dim));
        if dev > tol::STRUCTURAL {
            return Err(Error::NotTracePreserving(dev));
        }
        Ok(Self { dim, operators })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            operators: vec![ComplexMatrix::identity(dim)],
        }
    }

    pub fn unitary(u: &ComplexMatrix) -> Result<Self> {
        u.ensure_unitary(tol::STRUCTURAL)?;
        Self::new(vec![u.clone()])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn completeness_deviation(&self) -> f64 {
        let mut sum = ComplexMatrix::zeros(self.dim, self.dim);
        for k in &self.operators {
            sum = &sum + &(&k.adjoint() * k);
        }
        sum.max_abs_diff(&ComplexMatrix::identity(self.dim))
    }

    /// `Σ K ρ K†` on any (possibly sub-normalized) operator.
    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.rows() != self.dim || rho.cols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: rho.rows(),
            });
        }
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for k in &self.operators {
            out = &out + &rho.conjugate_by(k);
        }
        Ok(out)
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let ops = other
            .operators
            .iter()
            .flat_map(|b| self.operators.iter().map(move |a| b * a))
            .collect();
        Self::new(ops)
    }
}

pub fn apply_channel(rho: &DensityMatrix, ch: &KrausChannel) -> Result<DensityMatrix> {
    let out = ch.apply(rho.matrix())?;
    validate_density(&out, tol::STRUCTURAL)
}

fn check_visibility(name: &'static str, v: f64) -> Result<f64> {
    check_range(name, v, 0.0, 1.0, "[0, 1]")
}

/// Interlayer dephasing of a register block: off-diagonals scaled by `v`.
/// Equivalent to `((1+v)/2)ρ + ((1−v)/2)σ_z ρ σ_z`.
pub fn layer_dephasing(rho: &ComplexMatrix, v: f64) -> Result<ComplexMatrix> {
    check_visibility("v", v)?;
    if rho.rows() != 2 || rho.cols() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: rho.rows() });
    }
    let mut out = rho.clone();
    out[(0, 1)] *= v;
    out[(1, 0)] *= v;
    Ok(out)
}

/// Kraus form `{√((1+v)/2)·I, √((1−v)/2)·σ_z}` of [`layer_dephasing`].
pub fn layer_dephasing_channel(v: f64) -> Result<KrausChannel> {
    check_visibility("v", v)?;
    KrausChannel::new(vec![
        ComplexMatrix::identity(2).scale_re(((1.0 + v) / 2.0).sqrt()),
        ComplexMatrix::real_diag(&[1.0, -1.0]).scale_re(((1.0 - v) / 2.0).sqrt()),
    ])
}

fn visibility_kraus(m: usize, n: usize, v: f64, d: usize) -> Result<[ComplexMatrix; 3]> {
    check_visibility("v", v)?;
    if m >= n || n >= d {
        return Err(Error::InvalidIndex(format!("modes ({m}, {n}) in dimension {d}")));
    }
    let mut k0 = vec![1.0; d];
    k0[m] = v.sqrt();
    k0[n] = v.sqrt();
    let leak = (1.0 - v).sqrt();
    Ok([
        ComplexMatrix::real_diag(&k0),
        ComplexMatrix::basis_projector(d, m).scale_re(leak),
        ComplexMatrix::basis_projector(d, n).scale_re(leak),
    ])
}

/// Imperfect two-path interference between modes `m` and `n`: coherence
/// `ρ_mn` is scaled by `v`, coherences with other modes by `√v`.
pub fn visibility_channel(m: usize, n: usize, v: f64, d: usize) -> Result<KrausChannel> {
    KrausChannel::new(visibility_kraus(m, n, v, d)?.to_vec())
}

/// The no-leak Kraus operator `K₀` of [`visibility_channel`].
pub fn visibility_coherent_part(m: usize, n: usize, v: f64, d: usize) -> Result<ComplexMatrix> {
    let [k0, _, _] = visibility_kraus(m, n, v, d)?;
    Ok(k0)
}

/// [`visibility_channel`] acting only when the register (slow index of
/// `R ⊗ B`) is `|1⟩`.
pub fn controlled_visibility_channel(m: usize, n: usize, v: f64, d: usize) -> Result<KrausChannel> {
    let [k0, k1, k2] = visibility_kraus(m, n, v, d)?;
    let p0 = ComplexMatrix::basis_projector(2, 0);
    let p1 = ComplexMatrix::basis_projector(2, 1);
    let n0 = &p0.kron(&ComplexMatrix::identity(d)) + &p1.kron(&k0);
    KrausChannel::new(vec![n0, p1.kron(&k1), p1.kron(&k2)])
}

/// `|0⟩⟨0| ⊗ I + |1⟩⟨1| ⊗ U`.
pub fn controlled_unitary(u: &ComplexMatrix) -> Result<ComplexMatrix> {
    let d = u.dim()?;
    let p0 = ComplexMatrix::basis_projector(2, 0);
    let p1 = ComplexMatrix::basis_projector(2, 1);
    Ok(&p0.kron(&ComplexMatrix::identity(d)) + &p1.kron(u))
}

/// A mesh whose interferometers each have finite visibility: before every
/// layer, the visibility channel on that layer's two modes acts.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisyMesh {
    pub plan: MeshPlan,
    /// One visibility per layer.
    pub visibilities: Vec<f64>,
}

impl NoisyMesh {
    pub fn new(plan: MeshPlan, visibilities: Vec<f64>) -> Result<Self> {
        if visibilities.len() != plan.layers.len() {
            return Err(Error::DimensionMismatch {
                expected: plan.layers.len(),
                got: visibilities.len(),
            });
        }
        for &v in &visibilities {
            check_visibility("v", v)?;
        }
        Ok(Self { plan, visibilities })
    }

    pub fn uniform(plan: MeshPlan, v: f64) -> Result<Self> {
        let n = plan.layers.len();
        Self::new(plan, vec![v; n])
    }

    /// Full channel: `D′ ∘ L_k ∘ K_k ∘ ⋯ ∘ L_1 ∘ K_1`.
    pub fn channel(&self) -> Result<KrausChannel> {
        let d = self.plan.d;
        let mut ch = KrausChannel::identity(d);
        for (layer, &v) in self.plan.layers.iter().zip(&self.visibilities) {
            ch = ch.then(&visibility_channel(layer.m, layer.n, v, d)?)?;
            ch = ch.then(&KrausChannel::unitary(&layer.matrix(d)?)?)?;
        }
        ch.then(&KrausChannel::unitary(&self.output_phases())?)
    }

    /// The surviving coherent branch `D′ L_k K₀ ⋯ L_1 K₀`, which carries the
    /// register coherence.
    pub fn coherent_operator(&self) -> Result<ComplexMatrix> {
        let d = self.plan.d;
        let mut g = ComplexMatrix::identity(d);
        for (layer, &v) in self.plan.layers.iter().zip(&self.visibilities) {
            g = &visibility_coherent_part(layer.m, layer.n, v, d)? * &g;
            g = &layer.matrix(d)? * &g;
        }
        Ok(&self.output_phases() * &g)
    }

    fn output_phases(&self) -> ComplexMatrix {
        let phases: Vec<C64> = self.plan.output_phases.iter().map(|&p| crate::linalg::cis(p)).collect();
        ComplexMatrix::diag(&phases)
    }
}

/// Optional visibilities for the three interferometers of the three-mode
/// Fourier mesh, in propagation order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerInterferometer {
    #[serde(rename = "C01a")]
    pub first: f64,
    #[serde(rename = "T12")]
    pub middle: f64,
    #[serde(rename = "C01b")]
    pub last: f64,
}

/// JSON form of [`NoiseModel`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    pub v: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layer_v: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_interferometer: Option<PerInterferometer>,
    #[serde(default, rename = "rho_R_exp", skip_serializing_if = "Option::is_none")]
    pub rho_r_exp: Option<Vec<Vec<[f64; 2]>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoiseModel {
    pub visibility: f64,
    pub layer_visibility: f64,
    pub per_interferometer: Option<PerInterferometer>,
    pub register: DensityMatrix,
}

impl NoiseModel {
    /// Same visibility for interferometers and interlayer dephasing.
    pub fn uniform(v: f64, register: DensityMatrix) -> Result<Self> {
        Self::new(v, v, None, register)
    }

    pub fn new(
        visibility: f64,
        layer_visibility: f64,
        per_interferometer: Option<PerInterferometer>,
        register: DensityMatrix,
    ) -> Result<Self> {
        check_visibility("v", visibility)?;
        check_visibility("layer_v", layer_visibility)?;
        if let Some(p) = per_interferometer {
            for v in [p.first, p.middle, p.last] {
                check_visibility("per_interferometer", v)?;
            }
        }
        if register.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: register.dim(),
            });
        }
        Ok(Self {
            visibility,
            layer_visibility,
            per_interferometer,
            register,
        })
    }

    /// `layer_v` defaults to `v`; the register defaults to `default_register`.
    pub fn from_config(cfg: &NoiseConfig, default_register: &DensityMatrix) -> Result<Self> {
        let register = match &cfg.rho_r_exp {
            Some(rows) => DensityMatrix::new(ComplexMatrix::from_pairs(rows)?)?,
            None => default_register.clone(),
        };
        Self::new(cfg.v, cfg.layer_v.unwrap_or(cfg.v), cfg.per_interferometer, register)
    }

    pub fn to_config(&self) -> NoiseConfig {
        NoiseConfig {
            v: self.visibility,
            layer_v: Some(self.layer_visibility),
            per_interferometer: self.per_interferometer,
            rho_r_exp: Some(self.register.matrix().to_pairs()),
        }
    }

    /// Per-layer visibilities for a mesh with `layers` layers.
    pub fn layer_visibilities(&self, layers: usize) -> Vec<f64> {
        match self.per_interferometer {
            Some(p) if layers == 3 => vec![p.first, p.middle, p.last],
            _ => vec![self.visibility; layers],
        }
    }
}
