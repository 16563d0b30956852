//! Scenario files: one JSON document per experiment.
//!
//! ```json
//! {
//!   "graph": {"n": 2, "edges": [{"from": 1, "to": 2, "weight": 1.0}]},
//!   "x0": [0.0, 0.0],
//!   "b": [1.0, -1.0],
//!   "control": {"type": "none"},
//!   "sim": {"t_end": 20.0, "dt": 0.1, "engine": "exact"}
//! }
//! ```

use std::path::Path;

use biasflow_core::{
    design_stabilizing_control, design_two_stage_control, zero_eigenstructure, ControlSchedule, DVector, Edge,
    Engine, Graph, Laplacian, SimParams, Tolerances, ZeroEigenstructure,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    /// Set when the topology is a reconstruction rather than known data.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub approximate_topology: bool,
    pub graph: GraphSpec,
    pub x0: Vec<f64>,
    pub b: Vec<f64>,
    #[serde(default)]
    pub control: ControlSpec,
    pub sim: SimSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    pub n: usize,
    pub edges: Vec<EdgeSpec>,
}

/// `from` listens to `to` with the given weight. Nodes are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub from: usize,
    pub to: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ControlSpec {
    #[default]
    None,
    Constant {
        u: Vec<f64>,
    },
    /// Single-stage `u = L x_d − b`.
    Target {
        x_d: Vec<f64>,
    },
    TwoStage {
        x_d: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        t_bar: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum EngineSpec {
    #[default]
    Exact,
    Rk4,
}

impl From<EngineSpec> for Engine {
    fn from(e: EngineSpec) -> Self {
        match e {
            EngineSpec::Exact => Engine::Exact,
            EngineSpec::Rk4 => Engine::Rk4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSpec {
    pub t_end: f64,
    pub dt: f64,
    #[serde(default)]
    pub engine: EngineSpec,
    /// Defaults to `1e-3 · min(1, 1/‖L‖∞)`, capped at `dt`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rk4_step: Option<f64>,
}

pub const DEFAULT_T_BAR: f64 = 1.0;

impl Scenario {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::read(path, e))?;
        Self::from_json(&text, path)
    }

    pub fn from_json(text: &str, path: &Path) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::parse(path, &e))
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    /// Checks every field against the graph and builds the numerical objects.
    pub fn prepare(&self, tol: &Tolerances) -> Result<Prepared, CliError> {
        let edges = self
            .graph
            .edges
            .iter()
            .map(|e| Edge::new(e.from, e.to, e.weight))
            .collect();
        let graph = Graph::new(self.graph.n, edges).map_err(|e| CliError::validation(format!("graph: {e}")))?;
        let n = graph.n();
        let x0 = vector("x0", &self.x0, n)?;
        let b = vector("b", &self.b, n)?;
        match &self.control {
            ControlSpec::None => {}
            ControlSpec::Constant { u } => {
                vector("control.u", u, n)?;
            }
            ControlSpec::Target { x_d } => {
                vector("control.x_d", x_d, n)?;
            }
            ControlSpec::TwoStage { x_d, t_bar } => {
                vector("control.x_d", x_d, n)?;
                if let Some(t) = t_bar {
                    if !(*t > 0.0 && t.is_finite()) {
                        return Err(CliError::validation(format!(
                            "control.t_bar must be positive and finite, got {t}"
                        )));
                    }
                }
            }
        }
        let laplacian = graph.laplacian();
        let eig = zero_eigenstructure(&laplacian, tol.zero).map_err(CliError::numerical)?;
        let prepared = Prepared {
            scenario: self.clone(),
            graph,
            laplacian,
            eig,
            x0,
            b,
            tol: *tol,
        };
        prepared.sim_params(None)?;
        Ok(prepared)
    }
}

fn vector(field: &str, v: &[f64], n: usize) -> Result<DVector<f64>, CliError> {
    if v.len() != n {
        return Err(CliError::validation(format!(
            "{field} has {} entries, expected {n}",
            v.len()
        )));
    }
    if let Some(i) = v.iter().position(|x| !x.is_finite()) {
        return Err(CliError::validation(format!("{field}[{i}] is not finite")));
    }
    Ok(DVector::from_column_slice(v))
}

/// A validated scenario together with its Laplacian and zero eigenstructure.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub scenario: Scenario,
    pub graph: Graph,
    pub laplacian: Laplacian,
    pub eig: ZeroEigenstructure,
    pub x0: DVector<f64>,
    pub b: DVector<f64>,
    pub tol: Tolerances,
}

impl Prepared {
    pub fn n(&self) -> usize {
        self.graph.n()
    }

    /// Control schedule described by the scenario's control section.
    pub fn schedule(&self) -> Result<ControlSchedule, CliError> {
        let n = self.n();
        match &self.scenario.control {
            ControlSpec::None => Ok(ControlSchedule::zero(n)),
            ControlSpec::Constant { u } => Ok(ControlSchedule::constant(DVector::from_column_slice(u))),
            ControlSpec::Target { x_d } => {
                let x_d = DVector::from_column_slice(x_d);
                let u = design_stabilizing_control(&self.laplacian, &x_d, &self.b).map_err(CliError::validation)?;
                Ok(ControlSchedule::constant(u))
            }
            ControlSpec::TwoStage { x_d, t_bar } => self.two_stage(
                &DVector::from_column_slice(x_d),
                t_bar.unwrap_or(DEFAULT_T_BAR),
            ),
        }
    }

    pub fn two_stage(&self, x_d: &DVector<f64>, t_bar: f64) -> Result<ControlSchedule, CliError> {
        design_two_stage_control(
            &self.laplacian,
            &self.eig,
            &self.x0,
            x_d,
            &self.b,
            t_bar,
            self.tol.stability,
        )
        .map_err(CliError::validation)
    }

    /// Simulation parameters from the scenario, with optional overrides.
    pub fn sim_params(&self, engine: Option<EngineSpec>) -> Result<SimParams, CliError> {
        let sim = &self.scenario.sim;
        self.sim_params_for(sim.t_end, sim.dt, engine)
    }

    pub fn sim_params_for(&self, t_end: f64, dt: f64, engine: Option<EngineSpec>) -> Result<SimParams, CliError> {
        let sim = &self.scenario.sim;
        let engine = engine.unwrap_or(sim.engine);
        let step = match sim.rk4_step {
            Some(s) => s,
            None => SimParams::default_rk4_step(&self.laplacian).min(dt),
        };
        SimParams::new(t_end, dt, engine.into(), step).map_err(|e| CliError::validation(format!("sim: {e}")))
    }
}
