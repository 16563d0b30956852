//! The pipelines behind each subcommand. They take a prepared scenario and
//! return serializable reports; `main` only does argument parsing and IO.

use std::io::Write;

use biasflow_core::{
    conservation_errors, detect_clusters, drift_rates, is_reachable, simulate, spectrum, stability_check,
    steady_state, ControlSchedule, DVector, Edge, Graph, SimParams, Trajectory,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::CliError;
use crate::report::*;
use crate::scenario::{ControlSpec, EdgeSpec, EngineSpec, GraphSpec, Prepared, Scenario, SimSpec};

/// Default cluster tolerance.
pub const DEFAULT_TOL: f64 = 0.5;

/// Remaining mode amplitude at the verification horizon of `design`.
const SETTLE_FACTOR: f64 = 1e-12;

/// Upper bound on samples taken during design verification; `dt` grows when
/// the horizon is long.
const MAX_VERIFY_SAMPLES: f64 = 1e5;

fn control_name(c: &ControlSpec) -> &'static str {
    match c {
        ControlSpec::None => "none",
        ControlSpec::Constant { .. } => "constant",
        ControlSpec::Target { .. } => "target",
        ControlSpec::TwoStage { .. } => "two_stage",
    }
}

pub fn analyze(p: &Prepared) -> Result<AnalysisReport, CliError> {
    let conn = p.graph.connectivity();
    let spec = spectrum(&p.laplacian, p.tol.zero).map_err(CliError::numerical)?;
    let schedule = p.schedule()?;
    let b_eff = &p.b + schedule.final_control();
    let stab = stability_check(&p.eig, Some(&conn), &b_eff, p.tol.stability).map_err(CliError::numerical)?;

    let (x_bar, residual, drift) = if stab.stable {
        let ss = steady_state(&p.laplacian, &p.eig, &p.x0, &b_eff, p.tol.stability).map_err(CliError::numerical)?;
        (Some(ss.x_bar.as_slice().to_vec()), Some(ss.residual), None)
    } else {
        let d = drift_rates(&p.eig, &p.x0, &b_eff).map_err(CliError::numerical)?;
        (None, None, Some(drift_json(&d)))
    };

    Ok(AnalysisReport {
        approximate_topology: p.scenario.approximate_topology,
        n: p.n(),
        connectivity: (&conn).into(),
        spectrum: (&spec).into(),
        zero_modes: (&p.eig).into(),
        control: control_name(&p.scenario.control),
        effective_bias: b_eff.as_slice().to_vec(),
        stable: stab.stable,
        projections: stab.projections,
        special_case: (&stab.special_case).into(),
        x_bar,
        residual,
        drift,
    })
}

fn check_tol(tol: f64) -> Result<(), CliError> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(CliError::Usage(format!("--tol must be positive, got {tol}")))
    }
}

pub fn run(p: &Prepared, schedule: &ControlSchedule, params: &SimParams) -> Result<Trajectory, CliError> {
    simulate(&p.laplacian, &p.x0, &p.b, schedule, params).map_err(CliError::numerical)
}

pub fn simulate_scenario(
    p: &Prepared,
    tol: f64,
    engine: Option<EngineSpec>,
) -> Result<(Trajectory, SimulationSummary), CliError> {
    check_tol(tol)?;
    let schedule = p.schedule()?;
    let params = p.sim_params(engine)?;
    let traj = run(p, &schedule, &params)?;
    let b_eff = &p.b + schedule.final_control();
    let stable = p.eig.project(&b_eff).iter().all(|v| v.abs() < p.tol.stability);
    let summary = SimulationSummary {
        engine: params.engine.as_str(),
        t_end: params.t_end,
        dt: params.dt,
        rk4_step: params.rk4_step,
        samples: traj.len(),
        switch_times: schedule.switch_times(),
        final_state: traj.final_state().as_slice().to_vec(),
        clusters: (&detect_clusters(traj.final_state().as_slice(), tol)).into(),
        conservation_errors: conservation_errors(&traj, &p.eig, &p.b, &schedule),
        max_abs: traj.max_abs(),
        stable,
        warning: (!stable).then(|| "zero modes drift under the final control; opinions grow without bound".to_string()),
    };
    Ok((traj, summary))
}

/// Trajectory CSV: header `t,x1,...,xn`, 17 significant digits per value.
pub fn write_csv<W: Write>(traj: &Trajectory, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let n = traj.states.first().map_or(0, |s| s.len());
    let mut header = vec!["t".to_string()];
    header.extend((1..=n).map(|i| format!("x{i}")));
    w.write_record(&header)?;
    for (t, x) in traj.times.iter().zip(&traj.states) {
        let mut row = vec![format!("{t:.16e}")];
        row.extend(x.iter().map(|v| format!("{v:.16e}")));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Target and switching time for `design`: flags win over the scenario's
/// control section.
pub fn design_inputs(p: &Prepared, x_d: Option<&[f64]>, t_bar: Option<f64>) -> Result<(DVector<f64>, f64), CliError> {
    let (scenario_x_d, scenario_t_bar) = match &p.scenario.control {
        ControlSpec::Target { x_d } => (Some(x_d.as_slice()), None),
        ControlSpec::TwoStage { x_d, t_bar } => (Some(x_d.as_slice()), *t_bar),
        _ => (None, None),
    };
    let x_d = x_d
        .or(scenario_x_d)
        .ok_or_else(|| CliError::Usage("no target: pass --x-d or use a target/two_stage control".into()))?;
    if x_d.len() != p.n() {
        return Err(CliError::validation(format!(
            "target has {} entries, expected {}",
            x_d.len(),
            p.n()
        )));
    }
    if x_d.iter().any(|v| !v.is_finite()) {
        return Err(CliError::validation("target has non-finite entries"));
    }
    let t_bar = t_bar.or(scenario_t_bar).unwrap_or(crate::scenario::DEFAULT_T_BAR);
    Ok((DVector::from_column_slice(x_d), t_bar))
}

/// Synthesizes the schedule for `x_d` and checks it by simulation up to
/// `max(t_end, t̄ + ln(1e12)/rate)`.
pub fn design(
    p: &Prepared,
    x_d: &DVector<f64>,
    t_bar: f64,
    tol: f64,
    engine: Option<EngineSpec>,
) -> Result<DesignReport, CliError> {
    check_tol(tol)?;
    let verdict = is_reachable(&p.eig, &p.x0, x_d, p.tol.stability).map_err(CliError::validation)?;
    let schedule = p.two_stage(x_d, t_bar)?;
    let two_stage = schedule.segments().len() > 1;

    let rate = spectrum(&p.laplacian, p.tol.zero)
        .map_err(CliError::numerical)?
        .slowest_decay_rate();
    let start = if two_stage { t_bar } else { 0.0 };
    let settle = rate.map_or(1.0, |r| (1.0 / SETTLE_FACTOR).ln() / r);
    let t_end = p.scenario.sim.t_end.max(start + settle);
    let dt = p.scenario.sim.dt.max(t_end / MAX_VERIFY_SAMPLES);
    let params = p.sim_params_for(t_end, dt, engine)?;
    let traj = run(p, &schedule, &params)?;

    let final_state = traj.final_state();
    let handoff_error = traj.segment_boundaries.first().map(|&k| {
        (p.eig.project(&traj.states[k]) - p.eig.project(x_d)).amax()
    });
    Ok(DesignReport {
        schedule: ScheduleJson::new(&schedule, verdict.reachable, verdict.gaps),
        verification: Verification {
            engine: params.engine.as_str(),
            t_end,
            target: x_d.as_slice().to_vec(),
            final_state: final_state.as_slice().to_vec(),
            error_inf: (final_state - x_d).amax(),
            handoff_error,
            clusters: (&detect_clusters(final_state.as_slice(), tol)).into(),
        },
    })
}

/// Random test scenario: each ordered pair is an edge with probability `p`,
/// weights in `(0, 2]`, `x₀ ∈ [−10, 10)ⁿ`, `b ∈ [−5, 5)ⁿ`.
pub fn generate(seed: u64, n: usize, p: f64) -> Result<Scenario, CliError> {
    if n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(CliError::Usage(format!("--p must lie in [0, 1], got {p}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for from in 1..=n {
        for to in 1..=n {
            if from != to && rng.random::<f64>() < p {
                let weight = 2.0 * (1.0 - rng.random::<f64>());
                edges.push(EdgeSpec { from, to, weight });
            }
        }
    }
    // sanity: the generator must only produce valid graphs
    Graph::new(n, edges.iter().map(|e| Edge::new(e.from, e.to, e.weight)).collect())
        .map_err(CliError::validation)?;
    let x0 = (0..n).map(|_| rng.random_range(-10.0..10.0)).collect();
    let b = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
    Ok(Scenario {
        description: Some(format!("random digraph, seed {seed}, n {n}, p {p}")),
        approximate_topology: false,
        graph: GraphSpec { n, edges },
        x0,
        b,
        control: ControlSpec::None,
        sim: SimSpec {
            t_end: 20.0,
            dt: 0.1,
            engine: EngineSpec::Exact,
            rk4_step: None,
        },
    })
}
