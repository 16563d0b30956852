//! Control synthesis: reachability of a target state, the single-stage
//! stabilising input `u = L x_d − b`, and the two-stage schedule that first
//! transports the conserved zero-mode coordinates to the target's values.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DVector;

use crate::error::ControlError;
use crate::graph::Laplacian;
use crate::spectral::ZeroEigenstructure;

/// Constant control on `[start, end)`; `end = None` means unbounded.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlSegment {
    pub start: f64,
    pub end: Option<f64>,
    pub u: DVector<f64>,
}

/// Piecewise-constant control input.
///
/// Segments are contiguous, start at `t = 0`, and only the last one is
/// unbounded.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlSchedule {
    segments: Vec<ControlSegment>,
}

impl ControlSchedule {
    pub fn new(segments: Vec<ControlSegment>) -> Result<Self, ControlError> {
        let first = segments
            .first()
            .ok_or(ControlError::InvalidSchedule("no segments"))?;
        if first.start != 0.0 {
            return Err(ControlError::InvalidSchedule("first segment must start at 0"));
        }
        let n = first.u.len();
        for (k, seg) in segments.iter().enumerate() {
            if seg.u.len() != n {
                return Err(ControlError::DimensionMismatch {
                    expected: n,
                    found: seg.u.len(),
                });
            }
            if seg.u.iter().any(|v| !v.is_finite()) {
                return Err(ControlError::InvalidSchedule("non-finite control value"));
            }
            let last = k + 1 == segments.len();
            match seg.end {
                None if !last => {
                    return Err(ControlError::InvalidSchedule("only the last segment may be unbounded"))
                }
                Some(_) if last => {
                    return Err(ControlError::InvalidSchedule("last segment must be unbounded"))
                }
                Some(end) => {
                    if !(end > seg.start) || !end.is_finite() {
                        return Err(ControlError::InvalidSchedule("segment end must follow its start"));
                    }
                    if segments[k + 1].start != end {
                        return Err(ControlError::InvalidSchedule("segments must be contiguous"));
                    }
                }
                None => {}
            }
        }
        Ok(Self { segments })
    }

    /// A single unbounded segment.
    pub fn constant(u: DVector<f64>) -> Self {
        Self {
            segments: vec![ControlSegment {
                start: 0.0,
                end: None,
                u,
            }],
        }
    }

    pub fn zero(n: usize) -> Self {
        Self::constant(DVector::zeros(n))
    }

    pub fn segments(&self) -> &[ControlSegment] {
        &self.segments
    }

    pub fn n(&self) -> usize {
        self.segments[0].u.len()
    }

    /// Times at which the control switches.
    pub fn switch_times(&self) -> Vec<f64> {
        self.segments.iter().filter_map(|s| s.end).collect()
    }

    /// Index of the segment in force at `t`. A switch instant belongs to the
    /// segment it ends.
    pub fn segment_index_at(&self, t: f64) -> usize {
        self.segments
            .iter()
            .position(|s| s.end.is_none_or(|end| t <= end))
            .unwrap_or(self.segments.len() - 1)
    }

    pub fn control_at(&self, t: f64) -> &DVector<f64> {
        &self.segments[self.segment_index_at(t)].u
    }

    /// The control that stays in force forever.
    pub fn final_control(&self) -> &DVector<f64> {
        &self.segments[self.segments.len() - 1].u
    }
}

/// Membership of a target state in the reachable set `X_R`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReachabilityVerdict {
    pub reachable: bool,
    /// `w_iᵀ x_d − w_iᵀ x₀` per zero mode.
    pub gaps: Vec<f64>,
}

fn check_len(expected: usize, v: &DVector<f64>) -> Result<(), ControlError> {
    if v.len() == expected {
        Ok(())
    } else {
        Err(ControlError::DimensionMismatch {
            expected,
            found: v.len(),
        })
    }
}

/// `x_d` is reachable with a stable constant input iff it carries the same
/// zero-mode coordinates as `x₀`.
pub fn is_reachable(
    eig: &ZeroEigenstructure,
    x0: &DVector<f64>,
    x_d: &DVector<f64>,
    eps_stab: f64,
) -> Result<ReachabilityVerdict, ControlError> {
    check_len(eig.n(), x0)?;
    check_len(eig.n(), x_d)?;
    let gaps: Vec<f64> = eig.project(&(x_d - x0)).iter().copied().collect();
    Ok(ReachabilityVerdict {
        reachable: gaps.iter().all(|g| g.abs() < eps_stab),
        gaps,
    })
}

/// `u = L x_d − b`, which makes `x_d` an equilibrium. Whether the flow actually
/// settles there depends on [`is_reachable`].
pub fn design_stabilizing_control(
    l: &Laplacian,
    x_d: &DVector<f64>,
    b: &DVector<f64>,
) -> Result<DVector<f64>, ControlError> {
    check_len(l.n(), x_d)?;
    check_len(l.n(), b)?;
    Ok(l.apply(x_d) - b)
}

/// Schedule that drives the network to `x_d` from any `x₀`.
///
/// When `x_d` is already reachable this is the single stabilising segment.
/// Otherwise the first segment, on `[0, t̄]`, adds `Σ v_i α_i` with
/// `α_i = (w_iᵀ x_d − w_iᵀ x₀) / t̄` to the stabilising input, so each zero-mode
/// coordinate moves at rate `α_i` and lands on `w_iᵀ x_d` at `t̄`. The second
/// segment is the stabilising input.
pub fn design_two_stage_control(
    l: &Laplacian,
    eig: &ZeroEigenstructure,
    x0: &DVector<f64>,
    x_d: &DVector<f64>,
    b: &DVector<f64>,
    t_bar: f64,
    eps_stab: f64,
) -> Result<ControlSchedule, ControlError> {
    if !(t_bar > 0.0 && t_bar.is_finite()) {
        return Err(ControlError::InvalidHorizon(t_bar));
    }
    let u_stable = design_stabilizing_control(l, x_d, b)?;
    let verdict = is_reachable(eig, x0, x_d, eps_stab)?;
    if verdict.reachable {
        return Ok(ControlSchedule::constant(u_stable));
    }
    let alphas = DVector::from_iterator(verdict.gaps.len(), verdict.gaps.iter().map(|g| g / t_bar));
    let u_transport = &u_stable + eig.right() * alphas;
    ControlSchedule::new(vec![
        ControlSegment {
            start: 0.0,
            end: Some(t_bar),
            u: u_transport,
        },
        ControlSegment {
            start: t_bar,
            end: None,
            u: u_stable,
        },
    ])
}
