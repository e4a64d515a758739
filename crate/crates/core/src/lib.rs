//! One-dimensional scattering by finite-range complex potentials.
//!
//! Amplitudes are computed along three independent routes that cross-check
//! each other: the transfer-matrix evolution equation ([`evolution`]), the
//! Jost initial-value problem and its `S(z)`/Riccati reformulations
//! ([`jost`]), with closed-form oracles in [`reference`]. The [`design`]
//! module runs the construction backwards and builds refractive-index
//! profiles that lase, absorb coherently, or are invisible from one side at
//! a prescribed wavenumber.

pub mod amplitudes;
pub mod design;
pub mod error;
pub mod evolution;
pub mod io;
pub mod jost;
pub mod numerics;
pub mod potential;
pub mod reference;
pub mod verify;

pub use amplitudes::{classify, scatter, Route, ScatteringAmplitudes, SpectralFlags, Thresholds};
pub use design::{DesignGoal, DesignResult, DesignSpec};
pub use error::{Result, ScatterError};
pub use evolution::{evolve_transfer, TransferTrajectory};
pub use jost::{solve_jost, solve_riccati, solve_s, JostSolution, SFunction};
pub use numerics::{ArcPath, Complex2x2, Complex64, IntegratorConfig};
pub use potential::{IndexProfileRecord, Potential};

