//! Stability verdicts, steady states and drift of the zero modes under a
//! constant effective bias `b + u₀`.
//!
//! The zero-mode coordinates `w_iᵀ x` obey `d/dt (w_iᵀ x) = w_iᵀ (b + u₀)`
//! exactly, so they either stay put (stable) or drift linearly (unstable).

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, SVD};

use crate::error::AnalysisError;
use crate::graph::{ConnectivityClass, ConnectivityReport, Laplacian};
use crate::spectral::ZeroEigenstructure;

/// Which closed-form specialisation of the stability condition applies.
#[derive(Debug, Clone, PartialEq)]
pub enum SpecialCase {
    /// Connected undirected graph: stable iff the biases sum to zero.
    UndirectedSum { bias_sum: f64 },
    /// Single sink component: stable iff `Σ_{i ∈ N_G} w_1i b_i = 0`.
    GloballyReachable {
        nodes: Vec<usize>,
        weighted_sum: f64,
    },
    General,
}

impl SpecialCase {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::UndirectedSum { .. } => "undirected_sum",
            Self::GloballyReachable { .. } => "globally_reachable",
            Self::General => "general",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub stable: bool,
    /// `w_iᵀ (b + u₀)` for each zero mode `i`.
    pub projections: Vec<f64>,
    pub special_case: SpecialCase,
    pub effective_bias: DVector<f64>,
}

impl StabilityReport {
    pub fn max_projection(&self) -> f64 {
        self.projections.iter().fold(0.0, |m, p| m.max(p.abs()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteadyStatePrediction {
    pub x_bar: DVector<f64>,
    /// `‖−L x̄ + b_eff‖∞`.
    pub residual: f64,
    /// `w_iᵀ x₀` per zero mode; `x̄` shares them.
    pub conserved_values: Vec<f64>,
}

/// `w_iᵀ x(t) = intercept + slope · t` for one zero mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeDrift {
    pub mode: usize,
    pub slope: f64,
    pub intercept: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DriftReport {
    pub modes: Vec<ModeDrift>,
}

fn check_len(expected: usize, v: &DVector<f64>) -> Result<(), AnalysisError> {
    if v.len() == expected {
        Ok(())
    } else {
        Err(AnalysisError::DimensionMismatch {
            expected,
            found: v.len(),
        })
    }
}

/// Projects the effective bias on every zero mode; stable iff every
/// projection is below `eps_stab` in magnitude.
///
/// `connectivity` is only used to tag the applicable special case.
pub fn stability_check(
    eig: &ZeroEigenstructure,
    connectivity: Option<&ConnectivityReport>,
    b_eff: &DVector<f64>,
    eps_stab: f64,
) -> Result<StabilityReport, AnalysisError> {
    check_len(eig.n(), b_eff)?;
    let projections: Vec<f64> = eig.project(b_eff).iter().copied().collect();
    let stable = projections.iter().all(|p| p.abs() < eps_stab);

    let special_case = match connectivity {
        Some(c) if c.class == ConnectivityClass::Undirected => SpecialCase::UndirectedSum {
            bias_sum: b_eff.sum(),
        },
        Some(c) if !c.globally_reachable.is_empty() && eig.dim() == 1 => {
            let w = eig.left_vector(0);
            let weighted_sum = c.globally_reachable.iter().map(|&i| w[i - 1] * b_eff[i - 1]).sum();
            SpecialCase::GloballyReachable {
                nodes: c.globally_reachable.clone(),
                weighted_sum,
            }
        }
        _ => SpecialCase::General,
    };

    Ok(StabilityReport {
        stable,
        projections,
        special_case,
        effective_bias: b_eff.clone(),
    })
}

/// Final opinions for a stable configuration.
///
/// Solves `[L; W0ᵀ] x = [b_eff; W0ᵀ x₀]` in the least-squares sense. The
/// system is consistent exactly when the bias is balanced on the zero modes,
/// and then has a unique solution because `W0ᵀ V0 = I`.
pub fn steady_state(
    l: &Laplacian,
    eig: &ZeroEigenstructure,
    x0: &DVector<f64>,
    b_eff: &DVector<f64>,
    eps_stab: f64,
) -> Result<SteadyStatePrediction, AnalysisError> {
    let n = l.n();
    check_len(n, x0)?;
    check_len(n, b_eff)?;
    if eig.n() != n {
        return Err(AnalysisError::DimensionMismatch {
            expected: n,
            found: eig.n(),
        });
    }

    let projections = eig.project(b_eff);
    let max_projection = projections.amax();
    if !(max_projection < eps_stab) {
        return Err(AnalysisError::NotStable { max_projection });
    }

    let nz = eig.dim();
    let conserved = eig.project(x0);

    let mut a = DMatrix::zeros(n + nz, n);
    a.view_mut((0, 0), (n, n)).copy_from(l.matrix());
    a.view_mut((n, 0), (nz, n)).copy_from(&eig.left().transpose());
    let mut rhs = DVector::zeros(n + nz);
    rhs.rows_mut(0, n).copy_from(b_eff);
    rhs.rows_mut(n, nz).copy_from(&conserved);

    let svd = SVD::try_new(a, true, true, f64::EPSILON, 0).ok_or(AnalysisError::SolverFailure)?;
    let cutoff = svd.singular_values.max() * f64::EPSILON * (n + nz) as f64;
    let x_bar = svd
        .solve(&rhs, cutoff)
        .map_err(|_| AnalysisError::SolverFailure)?;
    if x_bar.iter().any(|v| !v.is_finite()) {
        return Err(AnalysisError::SolverFailure);
    }

    let residual = (b_eff - l.matrix() * &x_bar).amax();
    Ok(SteadyStatePrediction {
        x_bar,
        residual,
        conserved_values: conserved.iter().copied().collect(),
    })
}

/// Affine law of each zero-mode coordinate: `w_iᵀ x(t) = w_iᵀ x₀ + w_iᵀ b_eff · t`.
pub fn drift_rates(
    eig: &ZeroEigenstructure,
    x0: &DVector<f64>,
    b_eff: &DVector<f64>,
) -> Result<DriftReport, AnalysisError> {
    check_len(eig.n(), x0)?;
    check_len(eig.n(), b_eff)?;
    let slopes = eig.project(b_eff);
    let intercepts = eig.project(x0);
    Ok(DriftReport {
        modes: (0..eig.dim())
            .map(|mode| ModeDrift {
                mode,
                slope: slopes[mode],
                intercept: intercepts[mode],
            })
            .collect(),
    })
}
