//! World state, exact unicycle integration, and scenario orchestration.

use rayon::prelude::*;

use crate::aero::{FlockCostSample, NeighborSnapshot};
use crate::controller::{
    control_step, ControlInput, ControllerConfig, ControllerMode, StepOutcome, VehicleParams,
};
use crate::error::{ParamError, SimError};
use crate::geom::{wrap_angle, Vec2};
use crate::scalar::Scalar;

pub use crate::geom::VehicleState;

/// What an agent assumes about its neighbours' airspeed when predicting dE/dt.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NeighborSpeed {
    /// Each neighbour's isolated preferred speed, clamped to its bounds.
    #[default]
    Nominal,
    /// The speed each neighbour applied on the previous tick.
    Measured,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgentSpec<T> {
    pub initial: VehicleState<T>,
    /// Airspeed before the first tick (seen by `Measured` neighbours).
    pub initial_speed: T,
    pub params: VehicleParams<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig<T> {
    pub name: String,
    pub agents: Vec<AgentSpec<T>>,
    pub controller: ControllerConfig<T>,
    pub dt: T,
    pub duration: T,
    pub seed: u64,
    pub neighbor_speed: NeighborSpeed,
}

impl<T: Scalar> ScenarioConfig<T> {
    pub fn validate(&self) -> Result<(), ParamError> {
        if self.agents.is_empty() {
            return Err(ParamError::new("agents", "at least one agent is required"));
        }
        if !(self.dt > T::zero() && self.dt.is_finite()) {
            return Err(ParamError::new("scenario.dt", "must be positive and finite"));
        }
        if !(self.duration > self.dt && self.duration.is_finite()) {
            return Err(ParamError::new("scenario.duration", "must be finite and exceed dt"));
        }
        self.controller.validate().map_err(|e| e.within("controller"))?;
        for (i, a) in self.agents.iter().enumerate() {
            let b = &a.params.bounds;
            if !a.initial.is_finite() {
                return Err(ParamError::new(format!("agents[{i}].initial"), "must be finite"));
            }
            if !(a.initial_speed >= b.v_min && a.initial_speed <= b.v_max) {
                return Err(ParamError::new(
                    format!("agents[{i}].initial_speed"),
                    "must lie within [v_min, v_max]",
                ));
            }
        }
        Ok(())
    }

    pub fn tick_count(&self) -> usize {
        tick_count(self.duration, self.dt)
    }
}

/// `floor(duration / dt) + 1`, tolerant of `duration` being a float multiple of `dt`.
pub fn tick_count<T: Scalar>(duration: T, dt: T) -> usize {
    let ratio = (duration / dt).f64();
    (ratio + 1e-9).floor() as usize + 1
}

/// Advance a unicycle exactly over `dt` under constant `(v, omega)`.
pub fn integrate_step<T: Scalar>(state: &VehicleState<T>, u: &ControlInput<T>, dt: T) -> VehicleState<T> {
    let th = state.heading;
    if u.omega.abs() < T::lit(1e-9) {
        return VehicleState {
            position: state.position + Vec2::heading(th) * (u.v * dt),
            heading: th,
        };
    }
    let th2 = th + u.omega * dt;
    let r = u.v / u.omega;
    let delta = Vec2::new(th2.sin() - th.sin(), th.cos() - th2.cos()) * r;
    VehicleState {
        position: state.position + delta,
        heading: wrap_angle(th2),
    }
}

/// One agent at one tick: the state, the input applied from it, and why.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgentTick<T> {
    pub state: VehicleState<T>,
    pub input: ControlInput<T>,
    pub mode: ControllerMode,
    pub cost: FlockCostSample<T>,
    pub v_star: T,
    /// Speed the other agents assumed for this agent at this tick.
    pub assumed_speed: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord<T> {
    pub dt: T,
    pub agent_count: usize,
    /// `ticks[k][i]` is agent `i` at time `k * dt`.
    pub ticks: Vec<Vec<AgentTick<T>>>,
}

impl<T: Scalar> TrajectoryRecord<T> {
    pub fn time(&self, k: usize) -> T {
        self.dt * T::from_usize(k).unwrap()
    }

    pub fn duration(&self) -> T {
        self.time(self.ticks.len().saturating_sub(1))
    }

    /// Index of the tick closest to time `t`.
    pub fn tick_at(&self, t: T) -> usize {
        let k = (t / self.dt).round().to_usize().unwrap_or(0);
        k.min(self.ticks.len().saturating_sub(1))
    }

    pub fn final_tick(&self) -> &[AgentTick<T>] {
        self.ticks.last().map(|v| v.as_slice()).unwrap_or(&[])
    }
}

/// Snapshot of every agent other than `i`.
pub fn neighbor_snapshots<T: Scalar>(
    i: usize,
    states: &[VehicleState<T>],
    speeds: &[T],
    agents: &[AgentSpec<T>],
) -> Vec<NeighborSnapshot<T>> {
    (0..states.len())
        .filter(|&j| j != i)
        .map(|j| NeighborSnapshot {
            pose: states[j],
            speed: speeds[j],
            aero: agents[j].params.aero,
        })
        .collect()
}

const PARALLEL_MIN_AGENTS: usize = 4;

/// A running world. Advances all agents synchronously.
pub struct Simulation<'a, T> {
    cfg: &'a ScenarioConfig<T>,
    states: Vec<VehicleState<T>>,
    applied: Vec<T>,
    nominal: Vec<T>,
    tick: usize,
}

impl<'a, T: Scalar> Simulation<'a, T> {
    pub fn new(cfg: &'a ScenarioConfig<T>) -> Result<Self, ParamError> {
        cfg.validate()?;
        let objective = cfg.controller.objective;
        Ok(Self {
            cfg,
            states: cfg.agents.iter().map(|a| a.initial).collect(),
            applied: cfg.agents.iter().map(|a| a.initial_speed).collect(),
            nominal: cfg
                .agents
                .iter()
                .map(|a| a.params.nominal_speed(objective))
                .collect(),
            tick: 0,
        })
    }

    pub fn tick(&self) -> usize {
        self.tick
    }

    pub fn states(&self) -> &[VehicleState<T>] {
        &self.states
    }

    /// Speeds the agents currently assume for one another.
    pub fn assumed_speeds(&self) -> &[T] {
        match self.cfg.neighbor_speed {
            NeighborSpeed::Nominal => &self.nominal,
            NeighborSpeed::Measured => &self.applied,
        }
    }

    /// Every agent's control decision at the current state.
    pub fn plan(&self) -> Vec<AgentTick<T>> {
        let speeds = self.assumed_speeds();
        let agents = &self.cfg.agents;
        let decide = |i: usize| -> AgentTick<T> {
            let nbrs = neighbor_snapshots(i, &self.states, speeds, agents);
            let StepOutcome {
                input, mode, cost, v_star, ..
            } = control_step(
                &self.states[i],
                &nbrs,
                &agents[i].params,
                &self.cfg.controller,
                self.cfg.dt,
            );
            AgentTick {
                state: self.states[i],
                input,
                mode,
                cost,
                v_star,
                assumed_speed: speeds[i],
            }
        };
        // Thread hand-off costs more than a couple of controller solves.
        if agents.len() < PARALLEL_MIN_AGENTS {
            (0..agents.len()).map(decide).collect()
        } else {
            (0..agents.len()).into_par_iter().map(decide).collect()
        }
    }

    /// Apply a plan produced by [`Simulation::plan`].
    pub fn advance(&mut self, plan: &[AgentTick<T>]) -> Result<(), SimError> {
        let dt = self.cfg.dt;
        for (i, a) in plan.iter().enumerate() {
            let next = integrate_step(&self.states[i], &a.input, dt);
            if !next.is_finite() {
                return Err(SimError::NonFinite {
                    tick: self.tick + 1,
                    agent: i,
                });
            }
            self.states[i] = next;
            self.applied[i] = a.input.v;
        }
        self.tick += 1;
        Ok(())
    }
}

/// Run a scenario for its full duration.
pub fn run_scenario<T: Scalar>(cfg: &ScenarioConfig<T>) -> Result<TrajectoryRecord<T>, SimError> {
    let mut sim = Simulation::new(cfg)?;
    let n = cfg.tick_count();
    let mut ticks = Vec::with_capacity(n);
    for k in 0..n {
        let plan = sim.plan();
        if let Some(i) = plan.iter().position(|a| !a.input.v.is_finite() || !a.cost.cost_e.is_finite()) {
            return Err(SimError::NonFinite { tick: k, agent: i });
        }
        if k + 1 < n {
            sim.advance(&plan)?;
        }
        ticks.push(plan);
    }
    Ok(TrajectoryRecord {
        dt: cfg.dt,
        agent_count: cfg.agents.len(),
        ticks,
    })
}
