//! Beam-splitter mesh compilation and waveplate mappings.
//!
//! Every layer acts on adjacent modes `(m, m+1)` with the block
//!
//! ```text
//! T(θ, φ) = [[e^{iφ}cos θ, −sin θ],
//!            [e^{iφ}sin θ,  cos θ]]
//! ```
//!
//! and identity elsewhere. A [`MeshPlan`] lists layers in the order light
//! traverses them, so the compiled unitary is `D′ · L_k ⋯ L_1`, where `D′`
//! is the diagonal of output phases.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};
use crate::game::MAX_DIM;
use crate::linalg::{cis, ComplexMatrix, C64};
use crate::measurement::Measurement;
use crate::tol;

/// Calibrated relative phase of mode 0 in the three-path preparation (radians).
pub const PREP_PHASE_0: f64 = 1.41;
/// Calibrated relative phase of mode 1 in the three-path preparation (radians).
pub const PREP_PHASE_1: f64 = 1.66;

/// Which side of the diagonal a layer came from during decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    /// Right-multiplied nulling layer; acts first on the input.
    #[serde(rename = "T")]
    T,
    /// Left nulling layer after the diagonal was pushed through it.
    #[serde(rename = "A")]
    A,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamSplitterOp {
    pub m: usize,
    pub n: usize,
    pub theta: f64,
    pub phi: f64,
    pub orientation: Orientation,
}

impl BeamSplitterOp {
    pub fn new(m: usize, theta: f64, phi: f64, orientation: Orientation) -> Self {
        Self {
            m,
            n: m + 1,
            theta,
            phi: wrap_phase(phi),
            orientation,
        }
    }

    pub fn block(&self) -> [[C64; 2]; 2] {
        let (s, c) = self.theta.sin_cos();
        let e = cis(self.phi);
        [[e * c, C64::new(-s, 0.0)], [e * s, C64::new(c, 0.0)]]
    }

    /// The `d × d` embedding; errors for non-adjacent or out-of-range modes.
    pub fn matrix(&self, d: usize) -> Result<ComplexMatrix> {
        if self.n != self.m + 1 || self.n >= d {
            return Err(Error::InvalidIndex(format!(
                "beam splitter on modes ({}, {}) in dimension {d}",
                self.m, self.n
            )));
        }
        Ok(ComplexMatrix::embed_two_mode(d, self.m, self.n, self.block()))
    }
}

/// Wraps a phase into `[0, 2π)`.
pub fn wrap_phase(phi: f64) -> f64 {
    let w = phi.rem_euclid(2.0 * PI);
    if w >= 2.0 * PI - 1e-15 {
        0.0
    } else {
        w
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshPlan {
    pub d: usize,
    /// In propagation order.
    pub layers: Vec<BeamSplitterOp>,
    pub output_phases: Vec<f64>,
    /// Optional waveplate label per layer; defaults to `HWP{k}`.
    #[serde(default)]
    pub labels: Vec<String>,
}

impl MeshPlan {
    pub fn identity(d: usize) -> Self {
        Self {
            d,
            layers: Vec::new(),
            output_phases: vec![0.0; d],
            labels: Vec::new(),
        }
    }

    pub fn label(&self, k: usize) -> String {
        self.labels.get(k).cloned().unwrap_or_else(|| format!("HWP{}", k + 1))
    }

    /// Half-waveplate angle that realizes each layer's splitting ratio.
    pub fn waveplates(&self) -> Result<Vec<WaveplateSetting>> {
        self.layers
            .iter()
            .enumerate()
            .map(|(k, l)| {
                Ok(WaveplateSetting {
                    label: self.label(k),
                    deg: hwp_angle_for(l.theta)?,
                })
            })
            .collect()
    }

    /// Export with angles rounded to 12 significant digits.
    pub fn to_export(&self) -> Result<PlanExport> {
        Ok(PlanExport {
            d: self.d,
            layers: self
                .layers
                .iter()
                .map(|l| LayerExport {
                    m: l.m,
                    n: l.n,
                    theta_rad: round_sig(l.theta),
                    phi_rad: round_sig(l.phi),
                    orientation: l.orientation,
                })
                .collect(),
            output_phases_rad: self.output_phases.iter().map(|&p| round_sig(p)).collect(),
            waveplates: self
                .waveplates()?
                .into_iter()
                .map(|w| WaveplateSetting {
                    deg: round_sig(w.deg),
                    ..w
                })
                .collect(),
        })
    }
}

fn round_sig(x: f64) -> f64 {
    format!("{x:.11e}").parse().unwrap_or(x)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveplateSetting {
    pub label: String,
    pub deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerExport {
    pub m: usize,
    pub n: usize,
    pub theta_rad: f64,
    pub phi_rad: f64,
    pub orientation: Orientation,
}

/// JSON shape of a compiled plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanExport {
    pub d: usize,
    pub layers: Vec<LayerExport>,
    pub output_phases_rad: Vec<f64>,
    pub waveplates: Vec<WaveplateSetting>,
}

/// Compiled unitary `D′ · L_k ⋯ L_1`.
pub fn mesh_reconstruct(plan: &MeshPlan) -> Result<ComplexMatrix> {
    if plan.output_phases.len() != plan.d {
        return Err(Error::DimensionMismatch {
            expected: plan.d,
            got: plan.output_phases.len(),
        });
    }
    let mut u = ComplexMatrix::identity(plan.d);
    for layer in &plan.layers {
        u = &layer.matrix(plan.d)? * &u;
    }
    let phases: Vec<C64> = plan.output_phases.iter().map(|&p| cis(p)).collect();
    Ok(&ComplexMatrix::diag(&phases) * &u)
}

/// Rectangular-mesh decomposition of a unitary into `d(d−1)/2` layers.
///
/// Elements below the diagonal are nulled alternately by right-multiplying
/// inverse layers on columns and left-multiplying layers on rows. The left
/// layers are then moved to the right of the remaining diagonal using
/// `T(θ,φ)⁻¹ · diag(e^{iα}, e^{iβ}) = diag(e^{i(β−φ+π)}, e^{iβ}) · T(θ, α−β+π)`.
pub fn clements_decompose(u: &ComplexMatrix) -> Result<MeshPlan> {
    let d = u.dim()?;
    if d > MAX_DIM {
        return Err(Error::OutOfRange {
            name: "d",
            value: d as f64,
            range: "≤ 8",
        });
    }
    u.ensure_unitary(tol::STRUCTURAL)?;
    let mut w = u.clone();
    let mut right: Vec<BeamSplitterOp> = Vec::new();
    let mut left: Vec<BeamSplitterOp> = Vec::new();
    for i in 0..d.saturating_sub(1) {
        if i % 2 == 0 {
            for j in 0..=i {
                let r = d - 1 - j;
                let m = i - j;
                let (a, b) = (w[(r, m)], w[(r, m + 1)]);
                let theta = a.norm().atan2(b.norm());
                let phi = a.arg() - b.arg();
                let op = BeamSplitterOp::new(m, theta, phi, Orientation::T);
                w = &w * &op.matrix(d)?.adjoint();
                right.push(op);
            }
        } else {
            for j in 1..=i + 1 {
                let n = d + j - i - 2;
                let m = n - 1;
                let c = j - 1;
                let (a, b) = (w[(m, c)], w[(n, c)]);
                let theta = b.norm().atan2(a.norm());
                let phi = (-b).arg() - a.arg();
                let op = BeamSplitterOp::new(m, theta, phi, Orientation::T);
                w = &op.matrix(d)? * &w;
                left.push(op);
            }
        }
    }
    // w is now diagonal: U = L₁⁻¹⋯L_k⁻¹ · w · R_p⋯R₁
    let mut phases: Vec<f64> = (0..d).map(|k| w[(k, k)].arg()).collect();
    let mut pushed = Vec::with_capacity(left.len());
    for op in left.iter().rev() {
        let (alpha, beta) = (phases[op.m], phases[op.n]);
        phases[op.m] = wrap_phase(beta - op.phi + PI);
        pushed.push(BeamSplitterOp::new(op.m, op.theta, alpha - beta + PI, Orientation::A));
    }
    // U = D′ · A₁⋯A_k · R_p⋯R₁; in propagation order R₁…R_p, then A_k…A₁
    let mut layers = right;
    layers.extend(pushed);
    Ok(MeshPlan {
        d,
        layers,
        output_phases: phases.into_iter().map(wrap_phase).collect(),
        labels: Vec::new(),
    })
}

/// Hand-derived three-mode Fourier plan `D′ A₀₁ A₁₂ T₀₁` with the
/// waveplate labels of the optical bench (H7 for `T₀₁`, H9, H10).
pub fn reference_fourier_plan() -> MeshPlan {
    let theta_mid = (1.0 / 3f64.sqrt()).acos();
    MeshPlan {
        d: 3,
        layers: vec![
            BeamSplitterOp::new(0, FRAC_PI_4, 2.0 * PI / 3.0, Orientation::T),
            BeamSplitterOp::new(1, theta_mid, 2.0 * PI / 3.0, Orientation::A),
            BeamSplitterOp::new(0, FRAC_PI_4, -5.0 * PI / 6.0, Orientation::A),
        ],
        output_phases: vec![0.0, PI / 3.0, 2.0 * PI / 3.0],
        labels: vec!["H7".into(), "H9".into(), "H10".into()],
    }
}

/// Half-waveplate orientation (degrees) giving splitting angle `θ`: `45° − θ·90/π`.
pub fn hwp_angle_for(theta: f64) -> Result<f64> {
    check_range("theta", theta, -tol::STRUCTURAL, FRAC_PI_2 + tol::STRUCTURAL, "[0, π/2]")?;
    Ok(45.0 - theta * 90.0 / PI)
}

fn check_degrees(name: &'static str, deg: f64) -> Result<f64> {
    if !deg.is_finite() || deg <= -90.0 || deg > 90.0 {
        return Err(Error::OutOfRange {
            name,
            value: deg,
            range: "(−90, 90]",
        });
    }
    Ok(deg.to_radians())
}

/// Qubit probe prepared by one half-waveplate: `(cos 2θ, −sin 2θ)`.
pub fn prep_state_d2(theta_deg: f64) -> Result<Vec<C64>> {
    let t = check_degrees("theta1", theta_deg)?;
    Ok(vec![C64::new((2.0 * t).cos(), 0.0), C64::new(-(2.0 * t).sin(), 0.0)])
}

/// Three-path probe with the calibrated phases [`PREP_PHASE_0`], [`PREP_PHASE_1`].
pub fn prep_state_d3(theta1_deg: f64, theta2_deg: f64) -> Result<Vec<C64>> {
    prep_state_d3_with_phases(theta1_deg, theta2_deg, PREP_PHASE_0, PREP_PHASE_1)
}

/// `(e^{iφ₀}cos2θ₁cos2θ₂, −e^{iφ₁}cos2θ₁sin2θ₂, sin2θ₁)`.
pub fn prep_state_d3_with_phases(theta1_deg: f64, theta2_deg: f64, phase0: f64, phase1: f64) -> Result<Vec<C64>> {
    let t1 = check_degrees("theta1", theta1_deg)?;
    let t2 = check_degrees("theta2", theta2_deg)?;
    let (s1, c1) = (2.0 * t1).sin_cos();
    let (s2, c2) = (2.0 * t2).sin_cos();
    Ok(vec![cis(phase0) * (c1 * c2), -cis(phase1) * (c1 * s2), C64::new(s1, 0.0)])
}

/// Kets selected by a quarter- then half-waveplate in front of a polarizer,
/// with `α = θ_q` and `β = θ_q − 2θ_h`.
pub fn waveplate_kets(theta_q_deg: f64, theta_h_deg: f64) -> Result<[[C64; 2]; 2]> {
    let q = check_degrees("theta_q", theta_q_deg)?;
    let h = check_degrees("theta_h", theta_h_deg)?;
    let (sa, ca) = q.sin_cos();
    let (sb, cb) = (q - 2.0 * h).sin_cos();
    let m0 = [C64::new(sa * cb, ca * sb), C64::new(ca * cb, -sa * sb)];
    let m1 = [C64::new(-sa * sb, ca * cb), -C64::new(ca * sb, sa * cb)];
    Ok([m0, m1])
}

/// Two-outcome projective register measurement from waveplate angles.
pub fn waveplates_to_measurement(theta_q_deg: f64, theta_h_deg: f64) -> Result<Measurement> {
    let [m0, m1] = waveplate_kets(theta_q_deg, theta_h_deg)?;
    Measurement::new(vec![ComplexMatrix::outer(&m0), ComplexMatrix::outer(&m1)])
}

/// Waveplate measurement for a `d`-outcome game: the first projector guesses
/// outcome 0, the second guesses `d − 1`, and the outcomes between are never guessed.
pub fn waveplates_to_guess_measurement(theta_q_deg: f64, theta_h_deg: f64, d: usize) -> Result<Measurement> {
    if d < 2 {
        return Err(Error::OutOfRange {
            name: "d",
            value: d as f64,
            range: "≥ 2",
        });
    }
    let [m0, m1] = waveplate_kets(theta_q_deg, theta_h_deg)?;
    let mut elements = vec![ComplexMatrix::zeros(2, 2); d];
    elements[0] = ComplexMatrix::outer(&m0);
    elements[d - 1] = ComplexMatrix::outer(&m1);
    Measurement::new(elements)
}

/// `|w_j⟩ = d^{-1/2} Σ_k e^{−2πi jk/d} |k⟩`, mapped to `|j⟩` by the Fourier gate.
pub fn fourier_probe_state(j: usize, d: usize) -> Result<Vec<C64>> {
    if d == 0 || j >= d {
        return Err(Error::InvalidIndex(format!("probe {j} in dimension {d}")));
    }
    let norm = 1.0 / (d as f64).sqrt();
    Ok((0..d)
        .map(|k| cis(-2.0 * PI * ((j * k) % d) as f64 / d as f64) * norm)
        .collect())
}
