//! Published reference numbers from the optical experiment, used for
//! side-by-side comparison columns and regression checks.

use crate::error::Result;
use crate::linalg::{normalize, ComplexMatrix, C64};
use crate::measurement::Measurement;
use crate::state::DensityMatrix;

/// One point of the qubit sweep: register coherence, predicted optimum,
/// measured guessing probability (± error), and the measurement waveplates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitPoint {
    pub gamma: f64,
    pub p_max: f64,
    pub p_exp: f64,
    pub p_exp_err: f64,
    pub quarter_deg: f64,
    pub half_deg: f64,
}

const fn qp(gamma: f64, p_max: f64, p_exp: f64, p_exp_err: f64, quarter_deg: f64, half_deg: f64) -> QubitPoint {
    QubitPoint { gamma, p_max, p_exp, p_exp_err, quarter_deg, half_deg }
}

pub const QUBIT_SWEEP: [QubitPoint; 11] = [
    qp(0.9918, 0.9980, 0.9953, 0.0003, -22.4, 33.8),
    qp(0.9221, 0.9809, 0.9776, 0.0007, -21.3, 34.3),
    qp(0.8493, 0.9639, 0.9550, 0.0010, -20.2, 34.9),
    qp(0.7509, 0.9421, 0.9301, 0.0012, -18.5, 35.8),
    qp(0.6458, 0.9209, 0.9079, 0.0015, -16.4, 36.8),
    qp(0.5466, 0.9029, 0.8891, 0.0016, -14.3, 37.8),
    qp(0.4396, 0.8862, 0.8844, 0.0016, -11.9, 39.1),
    qp(0.3369, 0.8731, 0.8702, 0.0017, -9.3, 40.3),
    qp(0.2138, 0.8615, 0.8618, 0.0016, -6.0, 42.0),
    qp(0.1662, 0.8584, 0.8610, 0.0017, -4.7, 42.6),
    qp(0.0686, 0.8544, 0.8531, 0.0017, -2.0, 44.0),
];

/// Qutrit strategy: preparation waveplates, measurement waveplates, predicted
/// and measured guessing probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreePathPoint {
    pub h1_deg: f64,
    pub h2_deg: f64,
    pub quarter_deg: f64,
    pub half_deg: f64,
    pub p_theory: f64,
    pub p_exp: f64,
    pub p_exp_err: f64,
}

const fn tp(h1_deg: f64, h2_deg: f64, quarter_deg: f64, half_deg: f64, p_theory: f64, p_exp: f64, p_exp_err: f64) -> ThreePathPoint {
    ThreePathPoint { h1_deg, h2_deg, quarter_deg, half_deg, p_theory, p_exp, p_exp_err }
}

pub const THREE_PATH_STRATEGIES: [ThreePathPoint; 8] = [
    tp(22.6, 5.9, 55.0, 12.0, 0.9669, 0.9521, 0.0011),
    tp(24.6, 5.9, 50.4, 9.0, 0.9731, 0.9466, 0.0011),
    tp(26.6, 5.9, 45.0, 6.0, 0.9753, 0.9611, 0.0010),
    tp(28.6, 5.9, -50.6, 36.3, 0.9731, 0.9628, 0.0009),
    tp(30.6, 5.9, -56.0, 33.4, 0.9664, 0.9455, 0.0011),
    tp(26.6, 1.9, -47.0, 38.0, 0.9701, 0.9419, 0.0012),
    tp(26.6, 9.9, 46.2, 6.5, 0.9702, 0.9282, 0.0012),
    tp(26.6, 17.9, 46.1, 6.5, 0.9326, 0.9281, 0.0013),
];

/// Coherence estimated from the most coherent measured register state.
pub const MEASURED_GAMMA: f64 = 0.9918;

/// Best-known guessing probability for the qutrit game at full coherence.
pub const BEST_KNOWN_D3_P: f64 = 0.9793;

/// Predicted qubit detection probabilities `(P₀₀, P₀₁, P₁₀, P₁₁)` at visibility 0.99.
pub const QUBIT_DETECTION_V099: [f64; 4] = [0.5064, 0.0024, 0.0023, 0.4889];
pub const QUBIT_P_GUESS_V099: f64 = 0.9953;

/// Predicted qutrit guessing probability at visibility 0.98.
pub const THREE_PATH_P_GUESS_V098: f64 = 0.9554;

/// Predicted Fourier-gate click probabilities at visibility 0.98; row = output mode, column = probe.
pub const FOURIER_PREDICTED_V098: [[f64; 3]; 3] = [
    [0.9742, 0.0170, 0.0089],
    [0.0170, 0.9742, 0.0089],
    [0.0089, 0.0089, 0.9823],
];

/// Measured Fourier-gate click probabilities; row = output mode, column = probe.
pub const FOURIER_MEASURED: [[f64; 3]; 3] = [
    [0.9722, 0.0176, 0.0103],
    [0.0183, 0.9742, 0.0075],
    [0.0095, 0.0055, 0.9851],
];

/// Most coherent register state reconstructed by tomography.
pub fn measured_register() -> DensityMatrix {
    DensityMatrix::new(ComplexMatrix::from_rows(&[
        [C64::new(0.5124, 0.0), C64::new(0.4955, -0.0157)],
        [C64::new(0.4955, 0.0157), C64::new(0.4876, 0.0)],
    ]))
    .expect("published register state is a density matrix")
}

/// Qubit-game register measurement used for the most coherent register.
pub fn qubit_measurement() -> Result<Measurement> {
    let m0 = ComplexMatrix::from_real_rows(&[[0.8550, 0.3521], [0.3521, 0.1450]]);
    let m1 = ComplexMatrix::from_real_rows(&[[0.1450, -0.3521], [-0.3521, 0.8550]]);
    Measurement::with_tolerance(vec![m0, m1], 1e-3)
}

/// Amplitudes of the best-known qutrit probe (normalized; published to four decimals).
pub fn best_known_d3_amplitudes() -> Vec<C64> {
    normalize(&[C64::new(0.0938, 0.5786), C64::new(0.0109, -0.1218), C64::new(0.8009, 0.0)])
}

/// Best-known qutrit register measurement `{M₀, 0, M₂}` (four-decimal entries).
pub fn best_known_d3_measurement() -> Result<Measurement> {
    let m0 = ComplexMatrix::from_rows(&[
        [C64::new(0.5003, 0.0), C64::new(0.2027, 0.4571)],
        [C64::new(0.2027, -0.4571), C64::new(0.4997, 0.0)],
    ]);
    let m2 = &ComplexMatrix::identity(2) - &m0;
    Measurement::with_tolerance(vec![m0, ComplexMatrix::zeros(2, 2), m2], 1e-3)
}
