//! Simulator for the entropic-uncertainty guessing game.
//!
//! Bob prepares a probe state of dimension `d`, Alice measures it in the
//! standard or Fourier basis depending on a qubit register whose coherence
//! is `γ`, and Bob tries to guess her outcome by measuring the register.
//! The crate computes optimal and best-known guessing probabilities,
//! compiles the Fourier gate into a beam-splitter mesh, and predicts noisy
//! detection statistics of the optical realization.
//!
//! Interchangeable algorithms are trait objects looked up by name:
//! [`discrimination::discriminator`] and [`optimizer::optimizer`].

pub mod discrimination;
pub mod error;
pub mod game;
pub mod linalg;
pub mod measurement;
pub mod mesh;
pub mod noise;
pub mod optimizer;
pub mod parallel;
pub mod pipeline;
pub mod state;
pub mod tol;

pub use discrimination::{DiscriminationProblem, Discriminator};
pub use error::{Error, Result};
pub use game::{GameConfig, PostMeasurementEnsemble};
pub use linalg::{ComplexMatrix, C64};
pub use measurement::{Measurement, MeasurementKind};
pub use mesh::MeshPlan;
pub use noise::{KrausChannel, NoiseModel};
pub use optimizer::{OptimizationResult, Optimizer};
pub use pipeline::DetectionTable;
pub use state::{DensityMatrix, ProbabilityDistribution};
