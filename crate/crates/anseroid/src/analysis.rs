//! Post-run metrics: cost ledgers, formation shape, stability, and the
//! greedy-divergence contrast experiment.

use serde::Serialize;

use crate::aero::{roll_moment, upwash_force, AeroParams};
use crate::controller::{ControlLaw, ControllerMode};
use crate::error::SimError;
use crate::geom::{Vec2, VehicleState};
use crate::scalar::Scalar;
use crate::sim::{ScenarioConfig, Simulation, TrajectoryRecord};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AgentLedger {
    /// Left-rectangle integral of E over the run.
    pub total: f64,
    pub max: f64,
    pub min: f64,
    pub terminal: f64,
}

pub fn cost_ledger<T: Scalar>(record: &TrajectoryRecord<T>) -> Vec<AgentLedger> {
    let dt = record.dt.f64();
    let n = record.ticks.len();
    (0..record.agent_count)
        .map(|i| {
            let mut ledger = AgentLedger {
                total: 0.0,
                max: f64::NEG_INFINITY,
                min: f64::INFINITY,
                terminal: 0.0,
            };
            for (k, tick) in record.ticks.iter().enumerate() {
                let e = tick[i].cost.cost_e.f64();
                if k + 1 < n {
                    ledger.total += e * dt;
                }
                ledger.max = ledger.max.max(e);
                ledger.min = ledger.min.min(e);
                ledger.terminal = e;
            }
            ledger
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FormationThresholds {
    /// Lower bound of an acceptable consecutive lateral gap, in half-spans.
    pub gap_lo: f64,
    /// Upper bound, in half-spans.
    pub gap_hi: f64,
    /// Minimum branch score for a V or echelon.
    pub score: f64,
}

impl Default for FormationThresholds {
    fn default() -> Self {
        Self {
            gap_lo: std::f64::consts::SQRT_2,
            gap_hi: 2.5,
            score: 0.9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FormationKind {
    V,
    Echelon,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Branch {
    /// Agent ids ordered front to back.
    pub members: Vec<usize>,
    /// Fraction of consecutive members whose |lateral offset| strictly grows.
    pub monotonic_score: f64,
    /// Fraction of consecutive lateral gaps inside the threshold window.
    pub gap_score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FormationMetrics {
    pub kind: FormationKind,
    pub front: usize,
    /// Agents left of the front agent's wake axis.
    pub left: Branch,
    pub right: Branch,
    /// Mean |lateral offset| between streamwise-consecutive agents, m.
    pub mean_lateral_gap: f64,
    /// Mean streamwise gap between streamwise-consecutive agents, m.
    pub mean_streamwise_gap: f64,
}

impl FormationMetrics {
    /// The smaller monotonicity score over non-empty branches.
    pub fn min_branch_score(&self) -> f64 {
        [&self.left, &self.right]
            .iter()
            .filter(|b| !b.members.is_empty())
            .map(|b| b.monotonic_score)
            .fold(1.0, f64::min)
    }
}

fn branch(members: Vec<(usize, f64)>, half_span: f64, th: &FormationThresholds) -> Branch {
    let mut prev = 0.0;
    let mut rising = 0usize;
    let mut in_window = 0usize;
    for &(_, off) in &members {
        let off = off.abs();
        if off > prev {
            rising += 1;
        }
        let gap = (off - prev).abs() / half_span;
        if gap > th.gap_lo && gap < th.gap_hi {
            in_window += 1;
        }
        prev = off;
    }
    let n = members.len().max(1) as f64;
    Branch {
        monotonic_score: if members.is_empty() { 1.0 } else { rising as f64 / n },
        gap_score: if members.is_empty() { 1.0 } else { in_window as f64 / n },
        members: members.into_iter().map(|(i, _)| i).collect(),
    }
}

/// Classify a set of poses as a V, an echelon, or neither.
pub fn detect_formation_at<T: Scalar>(
    states: &[VehicleState<T>],
    theta_g: T,
    half_span: T,
    th: &FormationThresholds,
) -> FormationMetrics {
    let axis = Vec2::heading(theta_g.f64());
    let side = axis.perp();
    let coords: Vec<(usize, f64, f64)> = states
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let p = Vec2::new(s.position.x.f64(), s.position.y.f64());
            (i, p.dot(axis), p.dot(side))
        })
        .collect();
    let mut order = coords.clone();
    order.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let (front, _, fy) = order[0];
    let mut left = Vec::new();
    let mut right = Vec::new();
    for &(i, _, y) in &order[1..] {
        let off = y - fy;
        if off >= 0.0 {
            left.push((i, off));
        } else {
            right.push((i, off));
        }
    }
    let b = half_span.f64();
    let left = branch(left, b, th);
    let right = branch(right, b, th);
    let pairs = (order.len().max(2) - 1) as f64;
    let mean_lateral_gap = order.windows(2).map(|w| (w[1].2 - w[0].2).abs()).sum::<f64>() / pairs;
    let mean_streamwise_gap = order.windows(2).map(|w| w[0].1 - w[1].1).sum::<f64>() / pairs;

    let ok = |br: &Branch| br.monotonic_score >= th.score && br.gap_score >= th.score;
    let kind = if states.len() < 2 {
        FormationKind::None
    } else if left.members.is_empty() || right.members.is_empty() {
        let br = if left.members.is_empty() { &right } else { &left };
        if ok(br) {
            FormationKind::Echelon
        } else {
            FormationKind::None
        }
    } else if ok(&left) && ok(&right) {
        FormationKind::V
    } else {
        FormationKind::None
    };
    FormationMetrics {
        kind,
        front,
        left,
        right,
        mean_lateral_gap,
        mean_streamwise_gap,
    }
}

pub fn detect_formation<T: Scalar>(
    record: &TrajectoryRecord<T>,
    at_time: T,
    theta_g: T,
    half_span: T,
    th: &FormationThresholds,
) -> FormationMetrics {
    let states: Vec<VehicleState<T>> = record.ticks[record.tick_at(at_time)]
        .iter()
        .map(|a| a.state)
        .collect();
    detect_formation_at(&states, theta_g, half_span, th)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub stable: bool,
    /// Per agent: max |v(t) - v(t_f)| over the window divided by (v_max - v_min).
    pub speed_residual: Vec<f64>,
    /// Per agent: max |theta(t) - theta_g| over the window, rad.
    pub heading_residual: Vec<f64>,
    /// Agents that violate either bound.
    pub flagged: Vec<usize>,
}

/// Speeds settle within 1% of their range and headings stay within `epsilon`
/// of `theta_g` over the last `window` seconds.
pub fn stability_check<T: Scalar>(
    record: &TrajectoryRecord<T>,
    window: T,
    speed_ranges: &[T],
    epsilon: T,
    theta_g: T,
) -> StabilityReport {
    let last = record.ticks.len() - 1;
    let start = record.tick_at(record.duration() - window);
    let final_tick = &record.ticks[last];
    let mut speed_residual = Vec::with_capacity(record.agent_count);
    let mut heading_residual = Vec::with_capacity(record.agent_count);
    let mut flagged = Vec::new();
    for i in 0..record.agent_count {
        let vf = final_tick[i].input.v.f64();
        let range = speed_ranges[i].f64();
        let mut dv: f64 = 0.0;
        let mut dth: f64 = 0.0;
        for tick in &record.ticks[start..=last] {
            dv = dv.max((tick[i].input.v.f64() - vf).abs());
            let err = crate::geom::wrap_angle(tick[i].state.heading - theta_g);
            dth = dth.max(err.f64().abs());
        }
        let rs = dv / range;
        if !(rs < 0.01) || dth > epsilon.f64() {
            flagged.push(i);
        }
        speed_residual.push(rs);
        heading_residual.push(dth);
    }
    StabilityReport {
        stable: flagged.is_empty(),
        speed_residual,
        heading_residual,
        flagged,
    }
}

/// Fraction of ticks spent in each mode, per agent: (constrained, relaxed).
pub fn mode_counts<T: Scalar>(record: &TrajectoryRecord<T>) -> Vec<(usize, usize)> {
    (0..record.agent_count)
        .map(|i| {
            record.ticks.iter().fold((0, 0), |(c, r), t| match t[i].mode {
                ControllerMode::Constrained => (c + 1, r),
                ControllerMode::Relaxed => (c, r + 1),
            })
        })
        .collect()
}

/// Minimizer of a follower's E over a grid of offsets behind a single leader
/// flying along +x. Returns `(x, y, E)` with `x` negative behind the leader.
pub fn pair_cost_minimizer<T: Scalar>(
    leader: &AeroParams<T>,
    kappa: T,
    x_range: (T, T),
    nx: usize,
    y_range: (T, T),
    ny: usize,
) -> (T, T, T) {
    let vp = &leader.vortex;
    let ws = &leader.wake;
    let lerp = |(a, b): (T, T), k: usize, n: usize| {
        a + (b - a) * T::from_usize(k).unwrap() / T::from_usize(n.max(2) - 1).unwrap()
    };
    let mut best = (T::zero(), T::zero(), T::infinity());
    for ix in 0..nx {
        let x = lerp(x_range, ix, nx);
        for iy in 0..ny {
            let y = lerp(y_range, iy, ny);
            let e = kappa * roll_moment(x, y, vp, ws).abs() - upwash_force(x, y, vp, ws);
            if e < best.2 {
                best = (x, y, e);
            }
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceSeries {
    pub times: Vec<f64>,
    /// Leader-follower distance per tick.
    pub separation: Vec<f64>,
    /// Follower's aggregate upwash per tick.
    pub follower_w: Vec<f64>,
    /// True when the run stopped because the follower's upwash fell below the
    /// requested fraction of its initial value.
    pub reached_negligible: bool,
}

impl DivergenceSeries {
    /// Separation strictly increases on every tick.
    pub fn strictly_increasing(&self) -> bool {
        self.separation.windows(2).all(|w| w[1] > w[0])
    }
}

/// Run `cfg` with every agent on the greedy (relaxed-only) law and track the
/// separation between agents `leader` and `follower` until the follower's
/// upwash falls below `w_fraction` of its initial value or `max_time` passes.
pub fn greedy_divergence_experiment<T: Scalar>(
    cfg: &ScenarioConfig<T>,
    leader: usize,
    follower: usize,
    w_fraction: T,
    max_time: T,
) -> Result<DivergenceSeries, SimError> {
    let mut cfg = cfg.clone();
    cfg.controller.law = ControlLaw::Greedy;
    let mut sim = Simulation::new(&cfg)?;
    let mut out = DivergenceSeries {
        times: Vec::new(),
        separation: Vec::new(),
        follower_w: Vec::new(),
        reached_negligible: false,
    };
    if cfg.agents.len() < 2 || leader == follower {
        return Ok(out);
    }
    let max_ticks = crate::sim::tick_count(max_time, cfg.dt);
    let mut w0 = None;
    for k in 0..max_ticks {
        let plan = sim.plan();
        let w = plan[follower].cost.upwash_w;
        let sep = (plan[leader].state.position - plan[follower].state.position).norm();
        out.times.push((cfg.dt * T::from_usize(k).unwrap()).f64());
        out.separation.push(sep.f64());
        out.follower_w.push(w.f64());
        let w0 = *w0.get_or_insert(w);
        if w.abs() < w_fraction * w0.abs() {
            out.reached_negligible = true;
            break;
        }
        sim.advance(&plan)?;
    }
    Ok(out)
}

/// Position of `follower` in `leader`'s frame per tick: (along, left).
pub fn relative_track<T: Scalar>(record: &TrajectoryRecord<T>, leader: usize, follower: usize) -> Vec<(f64, f64)> {
    record
        .ticks
        .iter()
        .map(|t| {
            let (a, l) = t[leader].state.to_body(t[follower].state.position);
            (a.f64(), l.f64())
        })
        .collect()
}
