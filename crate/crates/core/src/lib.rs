//! Spin-1/2 geometric-phase toolkit: Bloch-sphere evolutions and their
//! phase decomposition, mixed-state (Sjöqvist) phases, spherical solid
//! angles, simulated polarimeter and interferometer experiments, and
//! CHSH Bell tests with geometric-phase compensation.
//!
//! The crate is organized around five views of the same physics:
//!
//! - [`spin`]: SU(2) evolutions, total/geometric/dynamical phase splits, and
//!   the mixed-state phase of partially polarized beams.
//! - [`sphere`]: solid angles of closed Bloch-sphere paths (geodesic polygons
//!   and meridian lunes), the geometric side of the phase ledger.
//! - [`polarimetry`]: synthetic analyzer fringes with Poisson counting noise,
//!   phase extraction from fringe extrema, and the non-additivity of mixed
//!   geometric and dynamical phases.
//! - [`interferometry`]: rf-flipper resonance, the flip-pair geometric phase,
//!   and the path-spin entangled interferogram pipeline.
//! - [`bell`]: CHSH correlations of the entangled state and the polar and
//!   azimuthal Bell-angle compensations of the geometric phase.
//!
//! The [`runner`] module turns TOML configs into reproducible, seeded result
//! tables; the `geophase` binary wraps it on the command line.
//!
//! All angles are radians; phases live in (−π, π] unless a contract says
//! otherwise.

pub mod bell;
pub mod fit;
pub mod interferometry;
pub mod linalg;
mod optim;
pub mod polarimetry;
pub mod runner;
pub mod sphere;
pub mod spin;

pub use num_complex::Complex64;

pub use bell::{
    AdjustmentResult, AdjustmentScheme, BellError, BellSetting, CountRates, CountStatistics,
    ProjectorAngles, Sign,
};
pub use fit::{CosineFit, FitError};
pub use interferometry::{
    FlipperPhaseScan, InterferometerScan, InterferometryError, Polarization, Resonance,
    RfFlipperConfig, SpinPathState,
};
pub use linalg::Mat2;
pub use polarimetry::{
    FringeScan, FringeStats, NoiseModel, NonAdditivityReport, PhaseEstimate, PolarimeterConfig,
    PolarimetryError,
};
pub use runner::{Diagnostic, ExperimentConfig, ResultTable, RunnerError, Scenario};
pub use sphere::{PathError, SpherePath};
pub use spin::{
    BlochVector, MixedPhase, PhaseDecomposition, SpinError, SpinState, Su2Params, Unitary2,
};
