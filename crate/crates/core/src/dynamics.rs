//! Simulation of `ẋ = −L x + b + u(t)` under piecewise-constant control.
//!
//! Two engines: exact propagation through the matrix exponential of the
//! augmented system `[[−L, c], [0, 0]]`, and fixed-step RK4. Every control
//! switch is a sampling instant, so no step straddles a switch.

use alloc::collections::btree_map::{BTreeMap, Entry};
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::control::ControlSchedule;
use crate::error::DynamicsError;
use crate::expm::expm;
use crate::graph::Laplacian;
use crate::spectral::ZeroEigenstructure;

const MAX_SAMPLES: f64 = 1e7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Exact,
    Rk4,
}

impl Engine {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Exact => "exact",
            Self::Rk4 => "rk4",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimParams {
    pub t_end: f64,
    /// Output sampling step.
    pub dt: f64,
    pub engine: Engine,
    /// Internal RK4 step; must not exceed `dt`.
    pub rk4_step: f64,
}

impl SimParams {
    pub fn new(t_end: f64, dt: f64, engine: Engine, rk4_step: f64) -> Result<Self, DynamicsError> {
        if !(t_end > 0.0 && t_end.is_finite()) {
            return Err(DynamicsError::InvalidParams("t_end must be positive and finite"));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(DynamicsError::InvalidParams("dt must be positive and finite"));
        }
        if !(rk4_step > 0.0 && rk4_step <= dt) {
            return Err(DynamicsError::InvalidParams("rk4_step must be positive and at most dt"));
        }
        if t_end / dt > MAX_SAMPLES {
            return Err(DynamicsError::InvalidParams("t_end / dt exceeds the sample limit"));
        }
        Ok(Self {
            t_end,
            dt,
            engine,
            rk4_step,
        })
    }

    /// `1e-3 · min(1, 1/‖L‖∞)`.
    pub fn default_rk4_step(l: &Laplacian) -> f64 {
        let norm = l.inf_norm();
        1e-3 * if norm > 1.0 { 1.0 / norm } else { 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DVector<f64>>,
    /// Indices into `times` at which the control switched.
    pub segment_boundaries: Vec<usize>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> &DVector<f64> {
        &self.states[self.states.len() - 1]
    }

    /// Largest `|x_i(t)|` over the whole run.
    pub fn max_abs(&self) -> f64 {
        self.states.iter().map(|s| s.amax()).fold(0.0, f64::max)
    }

    /// Index of the sample nearest to `t`.
    pub fn index_near(&self, t: f64) -> usize {
        let mut best = 0;
        for (k, &tk) in self.times.iter().enumerate() {
            if (tk - t).abs() < (self.times[best] - t).abs() {
                best = k;
            }
        }
        best
    }

    /// `w_iᵀ x(t)` at every sample.
    pub fn mode_series(&self, eig: &ZeroEigenstructure, mode: usize) -> Vec<f64> {
        let w = eig.left().column(mode);
        self.states.iter().map(|x| w.dot(x)).collect()
    }
}

/// Precomputed exact step of length `tau` under constant forcing `c`.
#[derive(Debug, Clone)]
pub struct ExactStep {
    transition: DMatrix<f64>,
    offset: DVector<f64>,
}

impl ExactStep {
    pub fn new(l: &Laplacian, c: &DVector<f64>, tau: f64) -> Result<Self, DynamicsError> {
        let n = l.n();
        if c.len() != n {
            return Err(DynamicsError::DimensionMismatch {
                expected: n,
                found: c.len(),
            });
        }
        if !(tau >= 0.0 && tau.is_finite()) {
            return Err(DynamicsError::InvalidDuration(tau));
        }
        let mut aug = DMatrix::zeros(n + 1, n + 1);
        aug.view_mut((0, 0), (n, n)).copy_from(&(l.matrix() * -tau));
        aug.view_mut((0, n), (n, 1)).copy_from(&(c * tau));
        let e = expm(&aug)?;
        Ok(Self {
            transition: e.view((0, 0), (n, n)).into_owned(),
            offset: e.view((0, n), (n, 1)).column(0).into_owned(),
        })
    }

    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.transition * x + &self.offset
    }
}

/// Exact solution at time `tau` of `ẋ = −L x + c`, `x(0) = x_start`.
pub fn propagate_exact(
    l: &Laplacian,
    x_start: &DVector<f64>,
    c: &DVector<f64>,
    tau: f64,
) -> Result<DVector<f64>, DynamicsError> {
    if x_start.len() != l.n() {
        return Err(DynamicsError::DimensionMismatch {
            expected: l.n(),
            found: x_start.len(),
        });
    }
    Ok(ExactStep::new(l, c, tau)?.apply(x_start))
}

/// Classical RK4 over `tau` with equal steps no longer than `max_step`.
pub fn propagate_rk4(
    l: &Laplacian,
    x_start: &DVector<f64>,
    c: &DVector<f64>,
    tau: f64,
    max_step: f64,
) -> Result<DVector<f64>, DynamicsError> {
    let n = l.n();
    for v in [x_start, c] {
        if v.len() != n {
            return Err(DynamicsError::DimensionMismatch {
                expected: n,
                found: v.len(),
            });
        }
    }
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(DynamicsError::InvalidDuration(tau));
    }
    if !(max_step > 0.0) {
        return Err(DynamicsError::InvalidParams("rk4 step must be positive"));
    }
    if tau == 0.0 {
        return Ok(x_start.clone());
    }
    let mut steps = (tau / max_step) as usize;
    if (steps as f64) * max_step < tau * (1.0 - 1e-12) {
        steps += 1;
    }
    let steps = steps.max(1);
    let h = tau / steps as f64;
    let lm = l.matrix();
    let f = |x: &DVector<f64>| c - lm * x;
    let mut x = x_start.clone();
    for _ in 0..steps {
        let k1 = f(&x);
        let k2 = f(&(&x + &k1 * (h / 2.0)));
        let k3 = f(&(&x + &k2 * (h / 2.0)));
        let k4 = f(&(&x + &k3 * h));
        x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }
    Ok(x)
}

/// Sampling grid `0, dt, 2dt, …, t_end` with every switch time inserted
/// (or snapped onto a grid point closer than `1e-9 dt`).
fn sample_times(t_end: f64, dt: f64, switches: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let snap = 1e-9 * dt;
    let k_max = (t_end / dt) as usize;
    let mut times: Vec<f64> = (0..=k_max)
        .map(|k| k as f64 * dt)
        .filter(|&t| t < t_end - snap)
        .collect();
    times.push(t_end);

    for &s in switches {
        if !(s > 0.0 && s <= t_end) {
            continue;
        }
        match times.iter().position(|&t| (t - s).abs() <= snap) {
            Some(k) => times[k] = s,
            None => {
                let k = times.partition_point(|&t| t < s);
                times.insert(k, s);
            }
        }
    }
    let boundaries = switches
        .iter()
        .filter_map(|&s| times.iter().position(|&t| t == s))
        .collect();
    (times, boundaries)
}

/// Simulates from `x0` under bias `b` and the given control schedule.
pub fn simulate(
    l: &Laplacian,
    x0: &DVector<f64>,
    b: &DVector<f64>,
    schedule: &ControlSchedule,
    params: &SimParams,
) -> Result<Trajectory, DynamicsError> {
    let n = l.n();
    for len in [x0.len(), b.len(), schedule.n()] {
        if len != n {
            return Err(DynamicsError::DimensionMismatch { expected: n, found: len });
        }
    }
    let (times, segment_boundaries) = sample_times(params.t_end, params.dt, &schedule.switch_times());
    let forcing: Vec<DVector<f64>> = schedule.segments().iter().map(|s| b + &s.u).collect();

    let mut cache: BTreeMap<(usize, u64), ExactStep> = BTreeMap::new();
    let mut states = Vec::with_capacity(times.len());
    states.push(x0.clone());
    for k in 1..times.len() {
        let (ta, tb) = (times[k - 1], times[k]);
        let tau = tb - ta;
        let seg = schedule.segment_index_at(0.5 * (ta + tb));
        let c = &forcing[seg];
        let prev = &states[k - 1];
        let next = match params.engine {
            Engine::Exact => {
                let step = match cache.entry((seg, tau.to_bits())) {
                    Entry::Occupied(e) => e.into_mut(),
                    Entry::Vacant(e) => e.insert(ExactStep::new(l, c, tau)?),
                };
                step.apply(prev)
            }
            Engine::Rk4 => propagate_rk4(l, prev, c, tau, params.rk4_step)?,
        };
        states.push(next);
    }
    Ok(Trajectory {
        times,
        states,
        segment_boundaries,
    })
}

/// Per zero mode, the largest deviation of `w_iᵀ x(t)` from its affine law
/// `w_iᵀ x(t_s) + w_iᵀ (b + u_s)(t − t_s)` inside each control segment `s`.
pub fn conservation_errors(
    traj: &Trajectory,
    eig: &ZeroEigenstructure,
    b: &DVector<f64>,
    schedule: &ControlSchedule,
) -> Vec<f64> {
    let slopes: Vec<DVector<f64>> = schedule
        .segments()
        .iter()
        .map(|s| eig.project(&(b + &s.u)))
        .collect();
    let mut worst = alloc::vec![0.0f64; eig.dim()];
    let mut start = 0;
    for k in 0..traj.len() {
        let t = traj.times[k];
        let seg = schedule.segment_index_at(t);
        if k > 0 && schedule.segment_index_at(traj.times[k - 1]) != seg {
            // the previous sample is the switch instant
            start = k - 1;
        }
        let base = eig.project(&traj.states[start]);
        let here = eig.project(&traj.states[k]);
        let elapsed = t - traj.times[start];
        for mode in 0..eig.dim() {
            let predicted = base[mode] + slopes[seg][mode] * elapsed;
            worst[mode] = worst[mode].max((here[mode] - predicted).abs());
        }
    }
    worst
}
