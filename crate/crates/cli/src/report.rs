//! JSON shapes written by the commands. Field order is fixed by the struct
//! definitions, so identical inputs give byte-identical files.

use biasflow_core::{
    ClusterPartition, ConnectivityReport, ControlSchedule, DriftReport, SpecialCase, Spectrum, ZeroEigenstructure,
};
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct ConnectivityJson {
    pub class: &'static str,
    pub components: Vec<Vec<usize>>,
    pub condensation_edges: Vec<[usize; 2]>,
    pub sink_components: Vec<usize>,
    pub globally_reachable: Vec<usize>,
}

impl From<&ConnectivityReport> for ConnectivityJson {
    fn from(c: &ConnectivityReport) -> Self {
        Self {
            class: c.class.as_str(),
            components: c.components.clone(),
            condensation_edges: c.condensation_edges.iter().map(|&(a, b)| [a, b]).collect(),
            sink_components: c.sink_components.clone(),
            globally_reachable: c.globally_reachable.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EigenvalueJson {
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumJson {
    /// Eigenvalues of `−L`, by descending real part.
    pub eigenvalues: Vec<EigenvalueJson>,
    pub zero_multiplicity: usize,
    pub zero_threshold: f64,
    pub slowest_decay_rate: Option<f64>,
}

impl From<&Spectrum> for SpectrumJson {
    fn from(s: &Spectrum) -> Self {
        Self {
            eigenvalues: s
                .eigenvalues
                .iter()
                .map(|c| EigenvalueJson { re: c.re, im: c.im })
                .collect(),
            zero_multiplicity: s.zero_multiplicity,
            zero_threshold: s.zero_threshold,
            slowest_decay_rate: s.slowest_decay_rate(),
        }
    }
}

/// Zero-eigenspace bases, one vector per mode.
#[derive(Debug, Clone, Serialize)]
pub struct ZeroModesJson {
    pub right: Vec<Vec<f64>>,
    pub left: Vec<Vec<f64>>,
    pub biorthogonality_error: f64,
}

impl From<&ZeroEigenstructure> for ZeroModesJson {
    fn from(z: &ZeroEigenstructure) -> Self {
        Self {
            right: (0..z.dim()).map(|i| z.right_vector(i).as_slice().to_vec()).collect(),
            left: (0..z.dim()).map(|i| z.left_vector(i).as_slice().to_vec()).collect(),
            biorthogonality_error: z.biorthogonality_error(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SpecialCaseJson {
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bias_sum: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nodes: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weighted_sum: Option<f64>,
}

impl From<&SpecialCase> for SpecialCaseJson {
    fn from(s: &SpecialCase) -> Self {
        let mut out = Self {
            kind: s.as_str(),
            bias_sum: None,
            nodes: None,
            weighted_sum: None,
        };
        match s {
            SpecialCase::UndirectedSum { bias_sum } => out.bias_sum = Some(*bias_sum),
            SpecialCase::GloballyReachable { nodes, weighted_sum } => {
                out.nodes = Some(nodes.clone());
                out.weighted_sum = Some(*weighted_sum);
            }
            SpecialCase::General => {}
        }
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DriftJson {
    pub mode: usize,
    pub slope: f64,
    pub intercept: f64,
}

pub fn drift_json(d: &DriftReport) -> Vec<DriftJson> {
    d.modes
        .iter()
        .map(|m| DriftJson {
            mode: m.mode,
            slope: m.slope,
            intercept: m.intercept,
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub approximate_topology: bool,
    pub n: usize,
    pub connectivity: ConnectivityJson,
    pub spectrum: SpectrumJson,
    pub zero_modes: ZeroModesJson,
    pub control: &'static str,
    /// `b + u₀`, with `u₀` the control that stays on indefinitely.
    pub effective_bias: Vec<f64>,
    pub stable: bool,
    pub projections: Vec<f64>,
    pub special_case: SpecialCaseJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_bar: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub drift: Option<Vec<DriftJson>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupJson {
    pub nodes: Vec<usize>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterJson {
    pub tolerance: f64,
    pub groups: Vec<GroupJson>,
}

impl From<&ClusterPartition> for ClusterJson {
    fn from(p: &ClusterPartition) -> Self {
        Self {
            tolerance: p.tolerance,
            groups: p
                .groups
                .iter()
                .map(|g| GroupJson {
                    nodes: g.nodes.clone(),
                    value: g.value,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulationSummary {
    pub engine: &'static str,
    pub t_end: f64,
    pub dt: f64,
    pub rk4_step: f64,
    pub samples: usize,
    pub switch_times: Vec<f64>,
    pub final_state: Vec<f64>,
    pub clusters: ClusterJson,
    /// Per zero mode, largest deviation from the affine law inside a segment.
    pub conservation_errors: Vec<f64>,
    pub max_abs: f64,
    /// Whether the final control leaves every zero mode balanced.
    pub stable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SegmentJson {
    pub start: f64,
    /// `null` for the final, unbounded segment.
    pub end: Option<f64>,
    pub u: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScheduleJson {
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_bar: Option<f64>,
    pub reachable: bool,
    /// `w_iᵀ x_d − w_iᵀ x₀` per zero mode.
    pub gaps: Vec<f64>,
    pub segments: Vec<SegmentJson>,
}

impl ScheduleJson {
    pub fn new(schedule: &ControlSchedule, reachable: bool, gaps: Vec<f64>) -> Self {
        let segments: Vec<SegmentJson> = schedule
            .segments()
            .iter()
            .map(|s| SegmentJson {
                start: s.start,
                end: s.end,
                u: s.u.as_slice().to_vec(),
            })
            .collect();
        let t_bar = segments.first().and_then(|s| s.end);
        Self {
            kind: if segments.len() == 1 { "single_stage" } else { "two_stage" },
            t_bar,
            reachable,
            gaps,
            segments,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Verification {
    pub engine: &'static str,
    pub t_end: f64,
    pub target: Vec<f64>,
    pub final_state: Vec<f64>,
    /// `‖x(T) − x_d‖∞`.
    pub error_inf: f64,
    /// `max_i |w_iᵀ x(t̄) − w_iᵀ x_d|`, two-stage schedules only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub handoff_error: Option<f64>,
    pub clusters: ClusterJson,
}

#[derive(Debug, Clone, Serialize)]
pub struct DesignReport {
    pub schedule: ScheduleJson,
    pub verification: Verification,
}
