//! Per-agent control law: track the drag-optimal airspeed subject to the
//! descent constraint `dE/dt <= rho` and a heading corridor, falling back to
//! the relaxed (unconstrained speed-tracking) problem when no admissible input
//! descends `E`.

use std::cmp::Ordering;

use crate::aero::{flock_cost, AeroParams, FlockCostSample, Negligibility, NeighborSnapshot};
use crate::drag::{preferred_speed, DragParams, Objective};
use crate::error::ParamError;
use crate::geom::{wrap_angle, Vec2, VehicleState};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ControlInput<T> {
    /// Airspeed, m/s.
    pub v: T,
    /// Turn rate, rad/s.
    pub omega: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlBounds<T> {
    pub v_min: T,
    pub v_max: T,
    pub omega_max: T,
}

impl<T: Scalar> ControlBounds<T> {
    pub fn new(v_min: T, v_max: T, omega_max: T) -> Result<Self, ParamError> {
        if !(v_min > T::zero()) {
            return Err(ParamError::new("v_min", "must be positive"));
        }
        if !(v_max > v_min && v_max.is_finite()) {
            return Err(ParamError::new("v_max", "must be finite and exceed v_min"));
        }
        if !(omega_max > T::zero() && omega_max.is_finite()) {
            return Err(ParamError::new("omega_max", "must be positive and finite"));
        }
        Ok(Self {
            v_min,
            v_max,
            omega_max,
        })
    }

    pub fn clamp_speed(&self, v: T) -> T {
        v.min(self.v_max).max(self.v_min)
    }

    pub fn clamp_rate(&self, omega: T) -> T {
        omega.min(self.omega_max).max(-self.omega_max)
    }

    pub fn speed_range(&self) -> T {
        self.v_max - self.v_min
    }
}

/// Everything one vehicle contributes to and needs from the world.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VehicleParams<T> {
    pub aero: AeroParams<T>,
    pub drag: DragParams<T>,
    pub bounds: ControlBounds<T>,
}

impl<T: Scalar> VehicleParams<T> {
    /// The speed this vehicle flies when alone.
    pub fn nominal_speed(&self, objective: Objective) -> T {
        self.bounds
            .clamp_speed(preferred_speed(T::zero(), &self.drag, objective))
    }
}

/// Which control law every agent runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ControlLaw {
    /// Descent-constrained speed tracking with relaxed fallback.
    #[default]
    Anseroid,
    /// Relaxed problem only: fly the drag-optimal speed for the current upwash.
    Greedy,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerConfig<T> {
    /// Descent rate bound on E, <= 0.
    pub rho: T,
    /// Heading corridor half-width, rad.
    pub epsilon: T,
    /// Global heading, rad.
    pub theta_g: T,
    /// Weight of the rolling tendency in E.
    pub kappa: T,
    /// Number of turn-rate candidates across the corridor (odd).
    pub omega_grid: usize,
    /// Refinement factor of the second pass around the best candidate.
    pub refine: usize,
    pub objective: Objective,
    pub law: ControlLaw,
    pub negligibility: Negligibility<T>,
}

impl<T: Scalar> Default for ControllerConfig<T> {
    fn default() -> Self {
        Self {
            rho: T::zero(),
            epsilon: T::lit(0.1),
            theta_g: T::zero(),
            kappa: T::lit(0.25),
            omega_grid: 41,
            refine: 10,
            objective: Objective::Drag,
            law: ControlLaw::Anseroid,
            negligibility: Negligibility::default(),
        }
    }
}

impl<T: Scalar> ControllerConfig<T> {
    pub fn validate(&self) -> Result<(), ParamError> {
        if !(self.rho <= T::zero()) {
            return Err(ParamError::new("rho", "must be <= 0"));
        }
        if !(self.epsilon > T::zero()) {
            return Err(ParamError::new("epsilon", "must be positive"));
        }
        if !(self.kappa >= T::zero()) {
            return Err(ParamError::new("kappa", "must be >= 0"));
        }
        if !self.theta_g.is_finite() {
            return Err(ParamError::new("theta_g", "must be finite"));
        }
        if self.omega_grid == 0 || self.omega_grid % 2 == 0 {
            return Err(ParamError::new("omega_grid", "must be a positive odd count"));
        }
        if self.refine == 0 {
            return Err(ParamError::new("refine", "must be positive"));
        }
        Ok(())
    }

    /// Signed heading error w.r.t. the global heading, in (-pi, pi].
    pub fn heading_error(&self, theta: T) -> T {
        wrap_angle(theta - self.theta_g)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ControllerMode {
    Constrained,
    Relaxed,
}

impl ControllerMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ControllerMode::Constrained => "constrained",
            ControllerMode::Relaxed => "relaxed",
        }
    }
}

/// Feasible airspeeds for the descent constraint `v * lie <= rhs` within bounds.
pub fn speed_interval<T: Scalar>(lie: T, rhs: T, bounds: &ControlBounds<T>) -> Option<(T, T)> {
    let mut lo = bounds.v_min;
    let mut hi = bounds.v_max;
    match lie.partial_cmp(&T::zero())? {
        Ordering::Greater => hi = hi.min(rhs / lie),
        Ordering::Less => lo = lo.max(rhs / lie),
        Ordering::Equal => {
            if rhs < T::zero() {
                return None;
            }
        }
    }
    (lo <= hi).then_some((lo, hi))
}

/// Verdict of the fixed-heading feasibility test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gate<T> {
    /// Directional derivative of E along the heading.
    pub lie: T,
    /// `rho - dE/dt`.
    pub rhs: T,
    pub interval: Option<(T, T)>,
}

impl<T> Gate<T> {
    pub fn feasible(&self) -> bool {
        self.interval.is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("heading outside the corridor around the global heading")]
pub struct OutsideCorridor;

/// Does some admissible airspeed descend E at the current heading?
pub fn feasibility_gate<T: Scalar>(
    state: &VehicleState<T>,
    cost: &FlockCostSample<T>,
    bounds: &ControlBounds<T>,
    cfg: &ControllerConfig<T>,
) -> Result<Gate<T>, OutsideCorridor> {
    if cfg.heading_error(state.heading).abs() > cfg.epsilon {
        return Err(OutsideCorridor);
    }
    let lie = cost.grad_e.dot(Vec2::heading(state.heading));
    let rhs = cfg.rho - cost.de_dt;
    Ok(Gate {
        lie,
        rhs,
        interval: speed_interval(lie, rhs, bounds),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("no admissible turn rate admits a descending airspeed")]
pub struct Infeasible;

#[derive(Debug, Clone, Copy)]
struct Candidate<T> {
    objective: T,
    omega: T,
    v: T,
    miss: T,
}

impl<T: Scalar> Candidate<T> {
    fn better_than(&self, o: &Self) -> bool {
        (self.objective, self.omega.abs(), self.miss) < (o.objective, o.omega.abs(), o.miss)
    }
}

/// Admissible turn rates keeping the next heading inside the corridor.
pub fn corridor_rates<T: Scalar>(
    state: &VehicleState<T>,
    bounds: &ControlBounds<T>,
    cfg: &ControllerConfig<T>,
    dt: T,
) -> (T, T) {
    let err = cfg.heading_error(state.heading);
    let lo = ((-cfg.epsilon - err) / dt).max(-bounds.omega_max);
    let hi = ((cfg.epsilon - err) / dt).min(bounds.omega_max);
    (lo, hi)
}

/// Problem 1: least deviation from `(v_star, 0)` subject to bounds, the heading
/// corridor over one step, and descent of E at the post-step heading.
pub fn solve_constrained<T: Scalar>(
    state: &VehicleState<T>,
    cost: &FlockCostSample<T>,
    bounds: &ControlBounds<T>,
    cfg: &ControllerConfig<T>,
    v_star: T,
    dt: T,
) -> Result<ControlInput<T>, Infeasible> {
    let (lo, hi) = corridor_rates(state, bounds, cfg, dt);
    if lo > hi {
        return Err(Infeasible);
    }
    let rhs = cfg.rho - cost.de_dt;
    let span = bounds.speed_range();
    let evaluate = |omega: T| -> Option<Candidate<T>> {
        let heading = state.heading + omega * dt;
        let lie = cost.grad_e.dot(Vec2::heading(heading));
        let (vlo, vhi) = speed_interval(lie, rhs, bounds)?;
        let v = v_star.max(vlo).min(vhi);
        let dv = (v - v_star) / span;
        let dw = omega / bounds.omega_max;
        Some(Candidate {
            objective: dv * dv + dw * dw,
            omega,
            v,
            miss: (v - v_star).abs(),
        })
    };
    let mut best: Option<Candidate<T>> = None;
    let consider = |best: &mut Option<Candidate<T>>, omega: T| {
        if let Some(c) = evaluate(omega) {
            if best.as_ref().map_or(true, |b| c.better_than(b)) {
                *best = Some(c);
            }
        }
    };

    let n = cfg.omega_grid.max(1);
    let step = if n > 1 {
        (hi - lo) / T::from_usize(n - 1).unwrap()
    } else {
        T::zero()
    };
    if lo <= T::zero() && T::zero() <= hi {
        consider(&mut best, T::zero());
    }
    for k in 0..n {
        let omega = if n > 1 {
            lo + step * T::from_usize(k).unwrap()
        } else {
            (lo + hi) / T::lit(2.0)
        };
        consider(&mut best, omega.min(hi));
    }
    if let Some(incumbent) = best {
        if step > T::zero() {
            let r = cfg.refine as i64;
            let fine = step / T::from_i64(r).unwrap();
            for k in -r..=r {
                let omega = incumbent.omega + fine * T::from_i64(k).unwrap();
                if omega >= lo && omega <= hi {
                    consider(&mut best, omega);
                }
            }
        }
    }
    best.map(|c| ControlInput {
        v: c.v,
        omega: c.omega,
    })
    .ok_or(Infeasible)
}

/// Problem 2: fly the preferred speed straight ahead.
pub fn solve_relaxed<T: Scalar>(bounds: &ControlBounds<T>, v_star: T) -> ControlInput<T> {
    ControlInput {
        v: bounds.clamp_speed(v_star),
        omega: T::zero(),
    }
}

/// Result of one agent's control step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome<T> {
    pub input: ControlInput<T>,
    pub mode: ControllerMode,
    pub cost: FlockCostSample<T>,
    /// Unclamped preferred airspeed for the current upwash.
    pub v_star: T,
    /// False when the heading started outside the corridor and was steered back.
    pub in_corridor: bool,
}

/// Evaluate the wake, pick the speed target, and dispatch to the constrained
/// or relaxed problem.
pub fn control_step<T: Scalar>(
    state: &VehicleState<T>,
    neighbors: &[NeighborSnapshot<T>],
    params: &VehicleParams<T>,
    cfg: &ControllerConfig<T>,
    dt: T,
) -> StepOutcome<T> {
    let cost = flock_cost(state.position, neighbors, cfg.kappa, &cfg.negligibility);
    let v_star = preferred_speed(cost.upwash_w, &params.drag, cfg.objective);
    let bounds = &params.bounds;
    let err = cfg.heading_error(state.heading);
    if err.abs() > cfg.epsilon {
        return StepOutcome {
            input: ControlInput {
                v: bounds.clamp_speed(v_star),
                omega: bounds.clamp_rate(-err / dt),
            },
            mode: ControllerMode::Relaxed,
            cost,
            v_star,
            in_corridor: false,
        };
    }
    let solved = match cfg.law {
        ControlLaw::Anseroid => solve_constrained(state, &cost, bounds, cfg, v_star, dt).ok(),
        ControlLaw::Greedy => None,
    };
    let (input, mode) = match solved {
        Some(u) => (u, ControllerMode::Constrained),
        None => (solve_relaxed(bounds, v_star), ControllerMode::Relaxed),
    };
    StepOutcome {
        input,
        mode,
        cost,
        v_star,
        in_corridor: true,
    }
}
