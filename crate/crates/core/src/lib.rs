//! Biased Laplacian opinion dynamics on weighted digraphs.
//!
//! Agents evolve by `ẋ = −L x + b + u`, where `L` is the out-degree Laplacian
//! of a cooperative interaction graph, `b` a constant exogenous bias and `u`
//! a designable control input. The crate provides:
//!
//! - [`graph`]: validated digraphs, Laplacians, SCCs and the condensation.
//! - [`spectral`]: the spectrum of `−L` and a biorthogonal basis of its zero
//!   eigenspace.
//! - [`analysis`]: stability verdicts, steady states and zero-mode drift.
//! - [`control`]: reachability and single/two-stage control synthesis.
//! - [`dynamics`]: exact and RK4 simulation under piecewise-constant control.
//! - [`clustering`]: 1-D opinion clusters and cluster-shaped targets.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
// NaN must fail every positivity check, hence `!(x > 0.0)` throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod clustering;
pub mod control;
pub mod dynamics;
pub mod error;
pub mod expm;
pub mod graph;
pub mod spectral;

pub use analysis::{
    drift_rates, stability_check, steady_state, DriftReport, ModeDrift, SpecialCase,
    StabilityReport, SteadyStatePrediction,
};
pub use clustering::{cluster_target, detect_clusters, ClusterGroup, ClusterPartition};
pub use control::{
    design_stabilizing_control, design_two_stage_control, is_reachable, ControlSchedule,
    ControlSegment, ReachabilityVerdict,
};
pub use dynamics::{
    conservation_errors, propagate_exact, propagate_rk4, simulate, Engine, SimParams, Trajectory,
};
pub use error::{AnalysisError, ClusterError, ControlError, DynamicsError, GraphError, SpectralError};
pub use graph::{ConnectivityClass, ConnectivityReport, Edge, Graph, Laplacian};
pub use spectral::{spectrum, zero_eigenstructure, Spectrum, ZeroEigenstructure};

pub use nalgebra::{Complex, DMatrix, DVector};

/// Numerical thresholds shared by the analysis pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Zero-eigenvalue / null-space threshold, relative to `max(1, ‖L‖∞)`.
    pub zero: f64,
    /// Absolute bound on `|w_iᵀ (b + u)|` for a stable verdict and on
    /// reachability gaps.
    pub stability: f64,
    /// Acceptable steady-state residual.
    pub steady_state: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            zero: 1e-9,
            stability: 1e-8,
            steady_state: 1e-8,
        }
    }
}
