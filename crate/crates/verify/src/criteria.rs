//! The numbered acceptance criteria.

use std::time::Instant;

use anseroid::aero::{flock_cost, roll_moment, upwash_force, upwash_integral, MOMENT_KINK};
use anseroid::analysis::{
    cost_ledger, detect_formation, greedy_divergence_experiment, pair_cost_minimizer, relative_track,
    stability_check, FormationKind,
};
use anseroid::controller::{feasibility_gate, solve_constrained, ControlBounds};
use anseroid::drag::{optimal_airspeed, preferred_speed};
use anseroid::io::write_trajectory_csv;
use anseroid::sim::{neighbor_snapshots, run_scenario, Simulation};
use anseroid::wake::{wake_coordinates, VortexParams, WakeShape};
use anseroid::{
    AgentSpec, ControllerMode, DragParams, NeighborSnapshot, ScenarioConfig, TrajectoryRecord, Vec2,
    VehicleState,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::oracle::{self, Vortex};
use crate::scenarios::{self, CRAZYSWARM_11, RAVEN_PAIR};
use crate::{Check, Verdict};

pub fn checks() -> Vec<Check> {
    vec![
        Check {
            id: "c1",
            module: "drag",
            title: "optimal airspeed matches brute-force drag minimization",
            criterion: true,
            run: c1_quartic_oracle,
        },
        Check {
            id: "c2",
            module: "drag",
            title: "optimal airspeed strictly decreases with upwash",
            criterion: true,
            run: c2_monotonicity,
        },
        Check {
            id: "c3",
            module: "aeroforces",
            title: "closed-form wing integrals match quadrature",
            criterion: true,
            run: c3_closed_forms,
        },
        Check {
            id: "c4",
            module: "aeroforces",
            title: "analytic cost gradient matches finite differences",
            criterion: true,
            run: c4_gradient,
        },
        Check {
            id: "c5",
            module: "sim",
            title: "two Raven-class agents settle into an echelon",
            criterion: true,
            run: c5_pair_emergence,
        },
        Check {
            id: "c6",
            module: "sim",
            title: "eleven agents form a V or echelon",
            criterion: true,
            run: c6_eleven_agents,
        },
        Check {
            id: "c7",
            module: "analysis",
            title: "greedy pairs diverge while anseroid pairs converge",
            criterion: true,
            run: c7_greedy_contrast,
        },
        Check {
            id: "c8",
            module: "controller",
            title: "downwash-trapped follower relaxes then recovers",
            criterion: true,
            run: c8_switching,
        },
        Check {
            id: "c9",
            module: "sim",
            title: "controller and simulation throughput",
            criterion: true,
            run: c9_performance,
        },
        Check {
            id: "c10",
            module: "sim",
            title: "shipped scenarios are byte-for-byte reproducible",
            criterion: true,
            run: c10_determinism,
        },
    ]
}

// ---- c1 -------------------------------------------------------------------

/// One random drag problem.
#[derive(Debug, Clone, Copy)]
pub struct DragDraw {
    pub params: DragParams,
    pub w: f64,
}

pub fn drag_draws(seed: u64, n: usize) -> Vec<DragDraw> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| DragDraw {
            params: DragParams {
                c1: rng.gen_range(1e-4..=1.0),
                c2: rng.gen_range(1.0..=1e3),
                lift: rng.gen_range(1.0..=100.0),
            },
            w: rng.gen_range(-5.0..=5.0),
        })
        .collect()
}

pub const GRID_STEP: f64 = 1e-4;

/// Compare the bisection root with a brute-force grid search, and count the
/// quartic's real roots on each side of zero.
pub fn quartic_oracle(draws: &[DragDraw]) -> Verdict {
    let rows: Vec<(f64, usize, usize)> = draws
        .par_iter()
        .map(|d| {
            let v = optimal_airspeed(d.w, &d.params);
            let grid = oracle::brute_force_speed(&d.params, d.w, GRID_STEP);
            let (neg, pos) = oracle::sturm_root_counts(&oracle::optimality_quartic(&d.params, d.w));
            let miss = (v - grid).abs();
            (if miss.is_finite() { miss } else { f64::INFINITY }, neg, pos)
        })
        .collect();
    let worst = rows.iter().map(|r| r.0).fold(0.0, f64::max);
    let off_grid = rows.iter().filter(|r| r.0 > GRID_STEP).count();
    let bad_roots = rows.iter().filter(|r| r.1 != 1 || r.2 != 1).count();
    Verdict::new(
        off_grid == 0 && bad_roots == 0,
        format!(
            "{} draws, worst |v - grid| {worst:.2e} m/s, {off_grid} off by more than one cell, \
             {bad_roots} without exactly one root of each sign",
            draws.len()
        ),
    )
}

fn c1_quartic_oracle(seed: u64) -> Verdict {
    let t0 = Instant::now();
    let mut v = quartic_oracle(&drag_draws(seed, 1000));
    let secs = t0.elapsed().as_secs_f64();
    v.passed &= secs < 10.0;
    v.detail += &format!(", {secs:.2} s (budget 10 s)");
    v
}

// ---- c2 -------------------------------------------------------------------

fn c2_monotonicity(seed: u64) -> Verdict {
    let mut sets: Vec<(String, DragParams)> = vec![
        ("raven".into(), scenarios::load(RAVEN_PAIR, &[]).1.agents[0].params.drag),
        ("crazyswarm".into(), scenarios::load(CRAZYSWARM_11, &[]).1.agents[0].params.drag),
    ];
    sets.extend(
        drag_draws(seed ^ 0xC2, 20)
            .into_iter()
            .enumerate()
            .map(|(i, d)| (format!("draw {i}"), d.params)),
    );
    let grid: Vec<f64> = (0..100).map(|k| -5.0 + 10.0 * k as f64 / 99.0).collect();
    let mut failures = Vec::new();
    let mut worst_rel: f64 = 0.0;
    for (name, dp) in &sets {
        let speeds: Vec<f64> = grid.iter().map(|&w| optimal_airspeed(w, dp)).collect();
        if let Some(k) = speeds.windows(2).position(|p| !(p[1] < p[0])) {
            failures.push(format!("{name}: not decreasing at W = {:.3}", grid[k + 1]));
        }
        let iso = (dp.c2 / dp.c1).powf(0.25);
        let rel = (optimal_airspeed(0.0, dp) - iso).abs() / iso;
        worst_rel = worst_rel.max(rel);
        if !(rel < 1e-9) {
            failures.push(format!("{name}: v*(0) off by {rel:.1e}"));
        }
    }
    Verdict::new(
        failures.is_empty(),
        if failures.is_empty() {
            format!(
                "{} parameter sets over 100 W values in [-5, 5]; worst v*(0) relative error {worst_rel:.1e}",
                sets.len()
            )
        } else {
            failures.join("; ")
        },
    )
}

// ---- c3 -------------------------------------------------------------------

pub struct WakeDraw {
    pub vortex: VortexParams<f64>,
    pub wake: WakeShape<f64>,
    pub x: f64,
    pub y: f64,
}

pub fn wake_draws(seed: u64, n: usize) -> Vec<WakeDraw> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let b = rng.gen_range(0.1..=1.0);
            let r_star = b * rng.gen_range(0.01..=0.15);
            let gamma = rng.gen_range(0.5..=200.0);
            let mu = b * rng.gen_range(5.0..=15.0);
            let sigma = mu * rng.gen_range(0.3..=0.7);
            WakeDraw {
                vortex: VortexParams::with_core_radius(gamma, r_star, b).expect("valid draw"),
                wake: WakeShape::new(mu, sigma).expect("valid draw"),
                x: -rng.gen_range(0.0..=mu + 3.0 * sigma),
                y: rng.gen_range(-5.0 * b..=5.0 * b),
            }
        })
        .collect()
}

fn oracle_vortex(vp: &VortexParams<f64>) -> Vortex {
    Vortex {
        gamma: vp.gamma,
        r_star: vp.r_star,
        half_span: vp.half_span,
    }
}

fn rel_err(model: f64, reference: f64) -> f64 {
    let e = (model - reference).abs() / reference.abs().max(f64::MIN_POSITIVE);
    if e.is_finite() {
        e
    } else {
        f64::INFINITY
    }
}

fn c3_closed_forms(seed: u64) -> Verdict {
    let t0 = Instant::now();
    let draws = wake_draws(seed ^ 0xC3, 500);
    let errs: Vec<(f64, f64)> = draws
        .par_iter()
        .map(|d| {
            let ov = oracle_vortex(&d.vortex);
            let g = oracle::gain(-d.x, d.wake.mu, d.wake.sigma);
            let w_ref = g * oracle::upwash_integral(d.y, &ov);
            let m_ref = g * oracle::moment_integral(d.y, &ov);
            (
                rel_err(upwash_force(d.x, d.y, &d.vortex, &d.wake), w_ref),
                rel_err(roll_moment(d.x, d.y, &d.vortex, &d.wake), m_ref),
            )
        })
        .collect();
    let worst_w = errs.iter().map(|e| e.0).fold(0.0, f64::max);
    let worst_m = errs.iter().map(|e| e.1).fold(0.0, f64::max);

    // Zero crossing of the integrated upwash for thin cores.
    let mut worst_cross: f64 = 0.0;
    let mut missing = 0;
    for frac in [0.005, 0.01, 0.02, 0.04, 0.06, 0.08] {
        let b = 0.7;
        let vp = VortexParams::with_core_radius(1.24, frac * b, b).expect("valid");
        match oracle::bisect(|y| upwash_integral(y, &vp), b, 3.0 * b) {
            Some(y0) => worst_cross = worst_cross.max((y0 / (2f64.sqrt() * b) - 1.0).abs()),
            None => missing += 1,
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    Verdict::new(
        worst_w < 1e-8 && worst_m < 1e-8 && missing == 0 && worst_cross < 0.02 && secs < 30.0,
        format!(
            "500 offsets: worst relative error W {worst_w:.1e}, M {worst_m:.1e}; zero crossing within \
             {:.2}% of sqrt(2) b for r*/b <= 0.08 ({missing} missing); {secs:.2} s (budget 30 s)",
            100.0 * worst_cross
        ),
    )
}

// ---- c4 -------------------------------------------------------------------

/// Random leaders ahead of the origin, flying roughly along +x.
pub fn random_neighbors(rng: &mut ChaCha8Rng, aero: anseroid::AeroParams) -> Vec<NeighborSnapshot> {
    let b = aero.vortex.half_span;
    let n = rng.gen_range(1..=3);
    (0..n)
        .map(|_| NeighborSnapshot {
            pose: VehicleState::new(
                rng.gen_range(0.0..=aero.wake.mu),
                rng.gen_range(-3.0 * b..=3.0 * b),
                rng.gen_range(-0.1..=0.1),
            ),
            speed: rng.gen_range(6.0..=15.0),
            aero,
        })
        .collect()
}

/// Is `p` far enough from every kink and cutoff of E that a central
/// difference of step `h` sees a smooth function?
fn smooth_at(p: Vec2, nbrs: &[NeighborSnapshot], h: f64) -> bool {
    let margin = 10.0 * h;
    nbrs.iter().all(|nb| {
        let vp = &nb.aero.vortex;
        let (b, r) = (vp.half_span, vp.r_star);
        let (d, y) = wake_coordinates(p, &nb.pose);
        let z = (d - nb.aero.wake.mu) / nb.aero.wake.sigma;
        let kinks = [0.0, 2.0 * b, -2.0 * b]
            .iter()
            .flat_map(|c| [c - r, c + r])
            .all(|k| (y - k).abs() > margin);
        kinks && y.abs() < 6.0 * b && z.abs() < 4.5
    })
}

fn c4_gradient(seed: u64) -> Verdict {
    const H: f64 = 1e-5;
    let (_, cfg) = scenarios::load(RAVEN_PAIR, &[]);
    let aero = cfg.agents[0].params.aero;
    let kappa = cfg.controller.kappa;
    let cut = cfg.controller.negligibility;
    let b = aero.vortex.half_span;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xC4);
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    let mut tested = 0;
    let mut attempts = 0;
    while tested < 200 && attempts < 200_000 {
        attempts += 1;
        let nbrs = random_neighbors(&mut rng, aero);
        let p = Vec2::new(
            rng.gen_range(-aero.wake.mu - 3.0 * aero.wake.sigma..=0.0),
            rng.gen_range(-5.0 * b..=5.0 * b),
        );
        if !smooth_at(p, &nbrs, H) {
            continue;
        }
        let s = flock_cost(p, &nbrs, kappa, &cut);
        if s.moment_m.abs() <= 1e-6 {
            continue;
        }
        // |M| must keep its sign across the stencil.
        let stencil = [(H, 0.0), (-H, 0.0), (0.0, H), (0.0, -H)];
        if stencil.iter().any(|&(dx, dy)| {
            let m = flock_cost(p + Vec2::new(dx, dy), &nbrs, kappa, &cut).moment_m;
            m.signum() != s.moment_m.signum() || m.abs() < MOMENT_KINK
        }) {
            continue;
        }
        tested += 1;
        let e = |x: f64, y: f64| flock_cost(Vec2::new(x, y), &nbrs, kappa, &cut).cost_e;
        let (gx, gy) = oracle::central_gradient(e, p.x, p.y, H);
        let diff = Vec2::new(gx, gy) - s.grad_e;
        let rel = diff.norm() / s.grad_e.norm().max(f64::MIN_POSITIVE);
        worst = worst.max(rel);
        if !(rel < 1e-5) {
            failures += 1;
        }
    }
    Verdict::new(
        tested == 200 && failures == 0,
        format!("{tested} points, worst relative error {worst:.1e}, {failures} above 1e-5"),
    )
}

// ---- shared helpers -------------------------------------------------------

/// Index of the agent furthest along `theta_g`, and the other agents' positions.
fn front_index(states: &[VehicleState], theta_g: f64) -> usize {
    let axis = Vec2::heading(theta_g);
    (0..states.len())
        .max_by(|&a, &b| states[a].position.dot(axis).total_cmp(&states[b].position.dot(axis)))
        .unwrap_or(0)
}

fn final_states(record: &TrajectoryRecord) -> Vec<VehicleState> {
    record.final_tick().iter().map(|a| a.state).collect()
}

fn speed_ranges(cfg: &ScenarioConfig) -> Vec<f64> {
    cfg.agents.iter().map(|a| a.params.bounds.speed_range()).collect()
}

/// Trailing distance of the E minimizer behind a lone leader, by grid search.
pub fn minimizer_trailing_distance(aero: &anseroid::AeroParams, kappa: f64) -> (f64, f64) {
    let ws = &aero.wake;
    let b = aero.vortex.half_span;
    let (x, y, _) = pair_cost_minimizer(aero, kappa, (-(ws.mu + 4.0 * ws.sigma), 0.0), 2001, (0.0, 4.0 * b), 801);
    (-x, y)
}

// ---- c5 -------------------------------------------------------------------

fn c5_pair_emergence(_seed: u64) -> Verdict {
    let t0 = Instant::now();
    let (file, cfg) = scenarios::load(RAVEN_PAIR, &[]);
    let record = match run_scenario(&cfg) {
        Ok(r) => r,
        Err(e) => return Verdict::fail(e.to_string()),
    };
    let secs = t0.elapsed().as_secs_f64();
    let ctl = &cfg.controller;
    let stab = stability_check(&record, file.analysis.stability_window, &speed_ranges(&cfg), ctl.epsilon, ctl.theta_g);
    let states = final_states(&record);
    let front = front_index(&states, ctl.theta_g);
    let rear = 1 - front;
    let (along, left) = states[front].to_body(states[rear].position);
    let (trailing, lateral) = (-along, left.abs());
    let aero = cfg.agents[front].params.aero;
    let b = aero.vortex.half_span;
    let (d_ref, _) = minimizer_trailing_distance(&aero, ctl.kappa);
    let ledger = cost_ledger(&record);
    let (tf, tr) = (ledger[front].total, ledger[rear].total);

    let lateral_ok = lateral > 2f64.sqrt() * b && lateral < 2.5 * b;
    let trailing_ok = (trailing - d_ref).abs() <= 0.1 * d_ref;
    let cost_ok = tf < 0.0 && tr < 0.0 && tr.abs() > tf.abs();
    Verdict::new(
        stab.stable && lateral_ok && trailing_ok && cost_ok && secs < 5.0,
        format!(
            "stable={} (speed residuals {:.1e}/{:.1e}); lateral {:.3} m = {:.2} b; trailing {trailing:.3} m vs \
             minimizer {d_ref:.3} m; totals front {tf:.3}, rear {tr:.3}; {secs:.2} s (budget 5 s)",
            stab.stable,
            stab.speed_residual[0],
            stab.speed_residual[1],
            lateral,
            lateral / b,
        ),
    )
}

// ---- c6 -------------------------------------------------------------------

fn c6_eleven_agents(_seed: u64) -> Verdict {
    let t0 = Instant::now();
    let (file, cfg) = scenarios::load(CRAZYSWARM_11, &[]);
    let record = match run_scenario(&cfg) {
        Ok(r) => r,
        Err(e) => return Verdict::fail(e.to_string()),
    };
    let secs = t0.elapsed().as_secs_f64();
    let ctl = &cfg.controller;
    let b = cfg.agents[0].params.aero.vortex.half_span;
    let th = file.analysis.thresholds();
    let f = detect_formation(&record, record.duration(), ctl.theta_g, b, &th);
    let travel = (record.final_tick()[f.front].state.position - record.ticks[0][f.front].state.position).norm();
    let shape_ok = matches!(f.kind, FormationKind::V | FormationKind::Echelon);
    let travel_ok = (35.0 / 2.0..=35.0 * 2.0).contains(&travel);
    Verdict::new(
        shape_ok && travel_ok && secs < 60.0,
        format!(
            "formation {:?} (left {} members, monotonic {:.2}, gaps {:.2}; right {} members, monotonic {:.2}, \
             gaps {:.2}); front travel {travel:.2} m (window 17.5-70); {secs:.2} s (budget 60 s)",
            f.kind,
            f.left.members.len(),
            f.left.monotonic_score,
            f.left.gap_score,
            f.right.members.len(),
            f.right.monotonic_score,
            f.right.gap_score,
        ),
    )
}

// ---- c7 -------------------------------------------------------------------

/// Leader at the origin and one follower behind and to the side, inside the
/// leader's upwash.
pub fn v_start(base: &ScenarioConfig, rng: &mut ChaCha8Rng) -> ScenarioConfig {
    let params = base.agents[0].params;
    let mu = params.aero.wake.mu;
    let b = params.aero.vortex.half_span;
    let d0 = rng.gen_range(0.5 * mu..=1.5 * mu);
    let side = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let y0 = side * rng.gen_range(1.5 * b..=2.5 * b);
    let v0 = params.nominal_speed(base.controller.objective);
    let spec = |x: f64, y: f64| AgentSpec {
        initial: VehicleState::new(x, y, base.controller.theta_g),
        initial_speed: v0,
        params,
    };
    ScenarioConfig {
        name: "v_start".into(),
        agents: vec![spec(0.0, 0.0), spec(-d0, y0)],
        duration: 30.0,
        ..base.clone()
    }
}

/// Speeds and headings settled (see `stability_check`) over the last quarter of the run, with the
/// separation varying by less than 2% of its mean over the same window.
fn converged(cfg: &ScenarioConfig, record: &TrajectoryRecord) -> (bool, String) {
    let ctl = &cfg.controller;
    let window = 0.25 * record.duration();
    let stab = stability_check(record, window, &speed_ranges(cfg), ctl.epsilon, ctl.theta_g);
    let start = record.tick_at(record.duration() - window);
    let track = relative_track(record, 0, 1);
    let sep: Vec<f64> = track[start..].iter().map(|(a, l)| a.hypot(*l)).collect();
    let mean = sep.iter().sum::<f64>() / sep.len() as f64;
    let spread = sep.iter().fold(f64::NEG_INFINITY, |m, &s| m.max(s))
        - sep.iter().fold(f64::INFINITY, |m, &s| m.min(s));
    let (along, left) = *track.last().unwrap();
    let ok = stab.stable && spread < 0.02 * mean;
    (
        ok,
        format!(
            "speed residual {:.3}, separation spread {:.1}%, final offset ({:.2}, {:.2})",
            stab.speed_residual[1],
            100.0 * spread / mean,
            -along,
            left
        ),
    )
}

fn c7_greedy_contrast(seed: u64) -> Verdict {
    let (_, base) = scenarios::load(RAVEN_PAIR, &[]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xC7);
    let starts: Vec<ScenarioConfig> = (0..5).map(|_| v_start(&base, &mut rng)).collect();
    let rows: Vec<(bool, bool, String)> = starts
        .par_iter()
        .map(|cfg| {
            let mut greedy = cfg.clone();
            greedy.dt = 2.0;
            let (g_ok, g_msg) = match greedy_divergence_experiment(&greedy, 0, 1, 1e-6, 1e7) {
                Ok(s) => (
                    s.reached_negligible && s.strictly_increasing(),
                    format!(
                        "greedy {} after {:.0} s",
                        if s.strictly_increasing() { "diverges" } else { "does not diverge monotonically" },
                        s.times.last().copied().unwrap_or(0.0)
                    ),
                ),
                Err(e) => (false, e.to_string()),
            };
            let (a_ok, a_msg) = match run_scenario(cfg) {
                Ok(r) => converged(cfg, &r),
                Err(e) => (false, e.to_string()),
            };
            let a0 = cfg.agents[1].initial.position;
            (g_ok, a_ok, format!("start ({:.2}, {:.2}): {g_msg}; anseroid {a_msg}", -a0.x, a0.y))
        })
        .collect();
    let g = rows.iter().filter(|r| r.0).count();
    let a = rows.iter().filter(|r| r.1).count();
    let detail = format!(
        "greedy diverged {g}/5, anseroid converged {a}/5 [{}]",
        rows.iter().map(|r| r.2.as_str()).collect::<Vec<_>>().join(" | ")
    );
    Verdict::new(g == 5 && a == 5, detail)
}

// ---- c8 -------------------------------------------------------------------

/// A slow leader and a fast follower directly behind it, one wake width past the
/// wake peak. The follower sits in pure downwash where every admissible speed
/// raises its cost.
pub fn trapped_follower() -> ScenarioConfig {
    let (_, base) = scenarios::load(RAVEN_PAIR, &[]);
    let params = base.agents[0].params;
    let omega_max = params.bounds.omega_max;
    let mut leader = params;
    leader.bounds = ControlBounds::new(6.0, 8.0, omega_max).expect("valid bounds");
    let mut follower = params;
    follower.bounds = ControlBounds::new(9.0, 15.0, omega_max).expect("valid bounds");
    let objective = base.controller.objective;
    let ws = params.aero.wake;
    ScenarioConfig {
        name: "trapped_follower".into(),
        agents: vec![
            AgentSpec {
                initial: VehicleState::new(0.0, 0.0, 0.0),
                initial_speed: leader.nominal_speed(objective),
                params: leader,
            },
            AgentSpec {
                initial: VehicleState::new(-(ws.mu + ws.sigma), 0.0, 0.0),
                initial_speed: follower.nominal_speed(objective),
                params: follower,
            },
        ],
        duration: 10.0,
        ..base
    }
}

/// Recompute every recorded mode from the recorded states. Returns the number
/// of ticks checked and a description of the first disagreement.
pub fn audit_modes(cfg: &ScenarioConfig, record: &TrajectoryRecord) -> (usize, Option<String>) {
    let ctl = &cfg.controller;
    let mut checked = 0;
    for (k, tick) in record.ticks.iter().enumerate() {
        let states: Vec<VehicleState> = tick.iter().map(|a| a.state).collect();
        let speeds: Vec<f64> = tick.iter().map(|a| a.assumed_speed).collect();
        for (i, a) in tick.iter().enumerate() {
            checked += 1;
            let nbrs = neighbor_snapshots(i, &states, &speeds, &cfg.agents);
            let params = &cfg.agents[i].params;
            let cost = flock_cost(a.state.position, &nbrs, ctl.kappa, &ctl.negligibility);
            let v_star = preferred_speed(cost.upwash_w, &params.drag, ctl.objective);
            let expected = match feasibility_gate(&a.state, &cost, &params.bounds, ctl) {
                Err(_) => ControllerMode::Relaxed,
                Ok(gate) => {
                    let solvable = solve_constrained(&a.state, &cost, &params.bounds, ctl, v_star, cfg.dt).is_ok();
                    if a.mode == ControllerMode::Relaxed && gate.feasible() {
                        return (checked, Some(format!("tick {k} agent {i}: relaxed although the current heading is feasible")));
                    }
                    if solvable {
                        ControllerMode::Constrained
                    } else {
                        ControllerMode::Relaxed
                    }
                }
            };
            if expected != a.mode {
                return (
                    checked,
                    Some(format!("tick {k} agent {i}: recorded {:?}, gate says {expected:?}", a.mode)),
                );
            }
        }
    }
    (checked, None)
}

fn c8_switching(_seed: u64) -> Verdict {
    let cfg = trapped_follower();
    let record = match run_scenario(&cfg) {
        Ok(r) => r,
        Err(e) => return Verdict::fail(e.to_string()),
    };
    let starts_relaxed = record.ticks[0][1].mode == ControllerMode::Relaxed;
    let exit = record
        .ticks
        .iter()
        .position(|t| t[1].mode == ControllerMode::Constrained)
        .map(|k| record.time(k));
    let (checked, mismatch) = audit_modes(&cfg, &record);
    let exit_ok = exit.map_or(false, |t| t < 10.0);
    Verdict::new(
        starts_relaxed && exit_ok && mismatch.is_none(),
        format!(
            "starts relaxed={starts_relaxed}; first constrained tick at {}; {checked} recorded modes audited{}",
            exit.map_or("never".to_string(), |t| format!("{t:.2} s")),
            mismatch.map_or(String::new(), |m| format!(", mismatch: {m}")),
        ),
    )
}

// ---- c9 -------------------------------------------------------------------

fn c9_performance(_seed: u64) -> Verdict {
    let (_, cfg) = scenarios::load(CRAZYSWARM_11, &[]);
    let mut sim = match Simulation::new(&cfg) {
        Ok(s) => s,
        Err(e) => return Verdict::fail(e.to_string()),
    };
    let mut worst: f64 = 0.0;
    let mut total = 0.0;
    let ticks = 500;
    for _ in 0..ticks {
        let t = Instant::now();
        let plan = sim.plan();
        let dt = t.elapsed().as_secs_f64();
        worst = worst.max(dt);
        total += dt;
        if let Err(e) = sim.advance(&plan) {
            return Verdict::fail(e.to_string());
        }
    }
    let t0 = Instant::now();
    let full = run_scenario(&cfg);
    let secs = t0.elapsed().as_secs_f64();
    Verdict::new(
        full.is_ok() && worst < 0.05 && secs < 60.0,
        format!(
            "11-agent tick: mean {:.3} ms, worst {:.3} ms (budget 50 ms); 60 s scenario in {secs:.2} s (budget 60 s)",
            1e3 * total / ticks as f64,
            1e3 * worst
        ),
    )
}

// ---- c10 ------------------------------------------------------------------

pub fn trajectory_bytes(cfg: &ScenarioConfig) -> Result<Vec<u8>, String> {
    let record = run_scenario(cfg).map_err(|e| e.to_string())?;
    let mut buf = Vec::new();
    write_trajectory_csv(&record, &mut buf).map_err(|e| e.to_string())?;
    Ok(buf)
}

fn c10_determinism(_seed: u64) -> Verdict {
    let mut notes = Vec::new();
    let mut ok = true;
    for (name, text) in scenarios::SHIPPED {
        let (_, cfg) = scenarios::load(text, &[]);
        match (trajectory_bytes(&cfg), trajectory_bytes(&cfg)) {
            (Ok(a), Ok(b)) => {
                let same = a == b && !a.is_empty();
                ok &= same;
                notes.push(format!("{name}: {} bytes, {}", a.len(), if same { "identical" } else { "DIFFER" }));
            }
            (Err(e), _) | (_, Err(e)) => {
                ok = false;
                notes.push(format!("{name}: {e}"));
            }
        }
    }
    Verdict::new(ok, notes.join("; "))
}
