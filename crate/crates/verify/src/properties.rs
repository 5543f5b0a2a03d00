//! Supporting properties, grouped by module.

use std::f64::consts::PI;

use anseroid::aero::{flock_cost, moment_integral, upwash_integral};
use anseroid::analysis::{cost_ledger, detect_formation_at, relative_track, FormationKind, FormationThresholds};
use anseroid::controller::{corridor_rates, solve_constrained, solve_relaxed};
use anseroid::drag::{derive_params, optimal_airspeed, preferred_speed, VehicleData};
use anseroid::sim::{integrate_step, neighbor_snapshots, run_scenario, Simulation};
use anseroid::wake::{point_upwash, spanwise_profile, streamwise_gain, vortex_velocity, VortexParams, WakeShape};
use anseroid::{
    AgentSpec, ControlBounds, ControlInput, ControllerConfig, ControllerMode, FlockCostSample, Objective, ScenarioConfig,
    Vec2, VehicleParams, VehicleState,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::criteria::{self, minimizer_trailing_distance, random_neighbors};
use crate::oracle;
use crate::scenarios::{self, CRAZYSWARM_11, RAVEN_PAIR};
use crate::{Check, Verdict};

pub fn checks() -> Vec<Check> {
    vec![
        Check { id: "w1", module: "wake", title: "worked examples", criterion: false, run: w1_examples },
        Check { id: "w2", module: "wake", title: "continuity and symmetry", criterion: false, run: w2_symmetry },
        Check { id: "w3", module: "wake", title: "downwash inboard, upwash outboard", criterion: false, run: w3_sign_change },
        Check { id: "w4", module: "wake", title: "rigid-motion equivariance", criterion: false, run: w4_equivariance },
        Check { id: "a1", module: "aeroforces", title: "neighbour contributions add", criterion: false, run: a1_additivity },
        Check { id: "a2", module: "aeroforces", title: "mirror symmetry of W and M", criterion: false, run: a2_mirror },
        Check { id: "a3", module: "aeroforces", title: "predicted dE/dt matches moving neighbours", criterion: false, run: a3_time_derivative },
        Check { id: "a4", module: "aeroforces", title: "pair cost minimizer location", criterion: false, run: a4_minimizer },
        Check { id: "d1", module: "drag", title: "Raven-class parameter derivation", criterion: false, run: d1_derive },
        Check { id: "d2", module: "drag", title: "corrupted C1 sign is rejected by the oracle", criterion: false, run: d2_negative_control },
        Check { id: "d3", module: "drag", title: "power objective minimizer", criterion: false, run: d3_power },
        Check { id: "k1", module: "controller", title: "constrained solve vs brute-force grid", criterion: false, run: k1_brute_force },
        Check { id: "k2", module: "controller", title: "inputs stay within bounds and corridor", criterion: false, run: k2_bounds },
        Check { id: "s1", module: "sim", title: "exact arc integration", criterion: false, run: s1_integration },
        Check { id: "s2", module: "sim", title: "isolated agent flies its optimum", criterion: false, run: s2_isolation },
        Check { id: "s3", module: "sim", title: "pair equilibrium stable under dt halving", criterion: false, run: s3_dt_halving },
        Check { id: "s4", module: "sim", title: "per-step rise of E is second order in dt", criterion: false, run: s4_energy_descent },
        Check { id: "n1", module: "analysis", title: "formation classifier on constructed shapes", criterion: false, run: n1_shapes },
        Check { id: "n2", module: "analysis", title: "cost ledger rectangle rule", criterion: false, run: n2_ledger },
        Check { id: "n3", module: "analysis", title: "slowest agent in front minimizes speed mismatch", criterion: false, run: n3_heterogeneity },
    ]
}

fn raven_vortex() -> VortexParams<f64> {
    VortexParams::new(1.24, 70.0, 0.7).expect("valid")
}

fn summarize(failures: Vec<String>, ok_detail: String) -> Verdict {
    if failures.is_empty() {
        Verdict::new(true, ok_detail)
    } else {
        Verdict::fail(failures.join("; "))
    }
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs().max(1e-300)
}

// ---- wake -----------------------------------------------------------------

fn w1_examples(_seed: u64) -> Verdict {
    let vp = raven_vortex();
    let ws = WakeShape::new(7.0, 3.5).expect("valid");
    let mut f = Vec::new();
    if (vp.r_star - 0.0531).abs() > 5e-5 {
        f.push(format!("r* = {}", vp.r_star));
    }
    if (vortex_velocity(0.1, &vp) - 1.9735).abs() > 5e-5 {
        f.push(format!("u(0.1) = {}", vortex_velocity(0.1, &vp)));
    }
    if !close(spanwise_profile(0.0, &vp), -1.24 / (PI * 0.7), 1e-12) {
        f.push(format!("f(0) = {}", spanwise_profile(0.0, &vp)));
    }
    let g: f64 = streamwise_gain(7.0 + 6.0 * 3.5, &ws);
    if (g - 3.05e-8).abs() > 0.01e-8 {
        f.push(format!("g(mu + 6 sigma) = {g:e}"));
    }
    if streamwise_gain(7.0, &ws) != 2.0 {
        f.push("g(mu) != 2".into());
    }
    summarize(f, format!("r* = {:.4} m, u(0.1) = {:.4} m/s, g(mu + 6 sigma) = {g:.3e}", vp.r_star, vortex_velocity(0.1, &vp)))
}

fn w2_symmetry(seed: u64) -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x72);
    let mut f = Vec::new();
    for _ in 0..1000 {
        let b = rng.gen_range(0.1..=1.0);
        let vp = VortexParams::with_core_radius(rng.gen_range(0.5..=200.0), b * rng.gen_range(0.01..=0.15), b).unwrap();
        let r = rng.gen_range(-4.0 * b..=4.0 * b);
        let s = vp.strength();
        if vortex_velocity(-r, &vp) != -vortex_velocity(r, &vp) {
            f.push(format!("u not odd at {r}"));
        }
        if !close(spanwise_profile(-r, &vp), spanwise_profile(r, &vp), 1e-12) {
            f.push(format!("f not even at {r}"));
        }
        if !close(upwash_integral(-r, &vp), upwash_integral(r, &vp), 1e-10) {
            f.push(format!("F not even at {r}"));
        }
        if (moment_integral(-r, &vp) + moment_integral(r, &vp)).abs() > 1e-10 * s * b * b {
            f.push(format!("m not odd at {r}"));
        }
        let edge = vp.r_star;
        let jump = vortex_velocity(edge * (1.0 + 1e-12), &vp) - vortex_velocity(edge * (1.0 - 1e-12), &vp);
        if jump.abs() > 1e-9 * s / edge {
            f.push(format!("u jumps by {jump:e} at the core edge"));
        }
    }
    f.truncate(5);
    summarize(f, "1000 draws: u odd and continuous at r*, f and F even, m odd".into())
}

fn w3_sign_change(seed: u64) -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x73);
    let mut f = Vec::new();
    for _ in 0..200 {
        let b = rng.gen_range(0.1..=1.0);
        let vp = VortexParams::with_core_radius(rng.gen_range(0.5..=200.0), b * rng.gen_range(0.01..=0.15), b).unwrap();
        let prof = |y: f64| spanwise_profile(y, &vp);
        let changes = oracle::sign_changes(prof, 0.0, 4.0 * b, 40_001);
        let root = oracle::bisect(prof, 0.5 * b, 2.0 * b);
        match root {
            Some(y) if changes == 1 && y >= b && y <= b + vp.r_star => {}
            _ => f.push(format!("b = {b:.3}, r* = {:.4}: {changes} sign changes, root {root:?}", vp.r_star)),
        }
    }
    f.truncate(5);
    summarize(f, "200 draws: one sign change on (0, 4b), located in [b, b + r*]".into())
}

fn w4_equivariance(seed: u64) -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x74);
    let vp = raven_vortex();
    let ws = WakeShape::new(7.0, 3.5).unwrap();
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let src = VehicleState::new(rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0), rng.gen_range(-PI..PI));
        let p = src.position + Vec2::new(rng.gen_range(-15.0..5.0), rng.gen_range(-3.0..3.0)).rotate(src.heading);
        let a = rng.gen_range(-PI..PI);
        let t = Vec2::new(rng.gen_range(-50.0..50.0), rng.gen_range(-50.0..50.0));
        let moved = VehicleState::new(
            src.position.rotate(a).x + t.x,
            src.position.rotate(a).y + t.y,
            src.heading + a,
        );
        let u0 = point_upwash(p, &src, &vp, &ws);
        let u1 = point_upwash(p.rotate(a) + t, &moved, &vp, &ws);
        worst = worst.max((u0 - u1).abs() / (u0.abs() + 1e-12));
    }
    Verdict::new(worst < 1e-8, format!("1000 rigid motions, worst relative change {worst:.1e}"))
}

// ---- aeroforces -----------------------------------------------------------

fn raven_setup() -> (anseroid::AeroParams, ControllerConfig) {
    let (_, cfg) = scenarios::load(RAVEN_PAIR, &[]);
    (cfg.agents[0].params.aero, cfg.controller)
}

fn a1_additivity(seed: u64) -> Verdict {
    let (aero, ctl) = raven_setup();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xA1);
    let mut worst: f64 = 0.0;
    for _ in 0..500 {
        let nbrs = random_neighbors(&mut rng, aero);
        let p = Vec2::new(rng.gen_range(-15.0..=0.0), rng.gen_range(-3.0..=3.0));
        let all = flock_cost(p, &nbrs, ctl.kappa, &ctl.negligibility);
        let parts: Vec<FlockCostSample> = nbrs
            .iter()
            .map(|n| flock_cost(p, std::slice::from_ref(n), ctl.kappa, &ctl.negligibility))
            .collect();
        let w: f64 = parts.iter().map(|s| s.upwash_w).sum();
        let m: f64 = parts.iter().map(|s| s.moment_m).sum();
        let scale = parts.iter().map(|s| s.upwash_w.abs() + s.moment_m.abs()).sum::<f64>() + 1e-12;
        worst = worst.max(((all.upwash_w - w).abs() + (all.moment_m - m).abs()) / scale);
    }
    Verdict::new(worst < 1e-12, format!("500 random neighbourhoods, worst relative defect {worst:.1e}"))
}

fn a2_mirror(seed: u64) -> Verdict {
    let (aero, ctl) = raven_setup();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xA2);
    let mut worst: f64 = 0.0;
    for _ in 0..500 {
        let leader = anseroid::NeighborSnapshot {
            pose: VehicleState::new(0.0, 0.0, 0.0),
            speed: 10.0,
            aero,
        };
        let (x, y) = (rng.gen_range(-15.0..=0.0), rng.gen_range(-3.0..=3.0));
        let a = flock_cost(Vec2::new(x, y), &[leader], ctl.kappa, &ctl.negligibility);
        let b = flock_cost(Vec2::new(x, -y), &[leader], ctl.kappa, &ctl.negligibility);
        let scale = a.upwash_w.abs() + a.moment_m.abs() + 1e-12;
        worst = worst.max(((a.upwash_w - b.upwash_w).abs() + (a.moment_m + b.moment_m).abs()) / scale);
    }
    Verdict::new(worst < 1e-12, format!("500 mirrored pairs, worst relative defect {worst:.1e}"))
}

fn a3_time_derivative(seed: u64) -> Verdict {
    const H: f64 = 1e-6;
    let (aero, ctl) = raven_setup();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xA3);
    let mut worst: f64 = 0.0;
    let mut tested = 0;
    while tested < 200 {
        let nbrs = random_neighbors(&mut rng, aero);
        let p = Vec2::new(rng.gen_range(-15.0..=0.0), rng.gen_range(-3.0..=3.0));
        let s = flock_cost(p, &nbrs, ctl.kappa, &ctl.negligibility);
        if s.de_dt.abs() < 1e-6 || s.moment_m.abs() < 1e-6 {
            continue;
        }
        let shifted = |t: f64| -> Vec<anseroid::NeighborSnapshot> {
            nbrs.iter()
                .map(|n| {
                    let mut m = *n;
                    m.pose.position += Vec2::heading(n.pose.heading) * (n.speed * t);
                    m
                })
                .collect()
        };
        let e = |t: f64| flock_cost(p, &shifted(t), ctl.kappa, &ctl.negligibility).cost_e;
        let fd = (e(H) - e(-H)) / (2.0 * H);
        let rel = (fd - s.de_dt).abs() / s.de_dt.abs();
        if rel > 1e-3 && (e(H) - e(-H)).abs() < 1e-9 {
            // Cut-off or kink inside the stencil; not a smooth sample.
            continue;
        }
        tested += 1;
        worst = worst.max(rel);
    }
    Verdict::new(worst < 1e-5, format!("200 samples, worst relative error {worst:.1e}"))
}

fn a4_minimizer(_seed: u64) -> Verdict {
    let (aero, ctl) = raven_setup();
    let b = aero.vortex.half_span;
    let (d, y) = minimizer_trailing_distance(&aero, ctl.kappa);
    let ok = (d - aero.wake.mu).abs() < 0.02 && y > 2f64.sqrt() * b && y < 2.5 * b;
    Verdict::new(ok, format!("minimizer at d = {d:.3} m (mu = {}), y = {:.3} b", aero.wake.mu, y / b))
}

// ---- drag -----------------------------------------------------------------

/// Round to `sig` significant figures.
fn round_sig(x: f64, sig: i32) -> f64 {
    let p = 10f64.powi(sig - 1 - x.abs().log10().floor() as i32);
    (x * p).round() / p
}

pub fn raven_data() -> VehicleData<f64> {
    VehicleData {
        weight: 18.7,
        span: 1.4,
        cruise_speed: 12.0,
        wake_speed: 9.0,
        air_density: 1.2,
        core_fraction: 0.054 / 0.7,
    }
}

fn d1_derive(_seed: u64) -> Verdict {
    let data = raven_data();
    let (vp, dp) = match derive_params(&data) {
        Ok(p) => p,
        Err(e) => return Verdict::fail(e.to_string()),
    };
    let mut f = Vec::new();
    for (name, got, sig, want) in [
        ("gamma", vp.gamma, 3, 1.24),
        ("omega", vp.omega, 1, 70.0),
        ("c2", dp.c2, 2, 95.0),
        ("c1", dp.c1, 1, 5e-3),
    ] {
        if !close(round_sig(got, sig), want, 1e-9) {
            f.push(format!("{name} = {got} does not round to {want}"));
        }
    }
    if (vp.r_star - 0.054).abs() > 1e-12 {
        f.push(format!("r* = {}", vp.r_star));
    }
    let heavy = derive_params(&VehicleData { weight: 2.0 * data.weight, ..data }).unwrap().0;
    if !close(heavy.gamma, 2.0 * vp.gamma, 1e-12) {
        f.push("circulation is not linear in weight".into());
    }
    summarize(
        f,
        format!(
            "gamma {:.4}, omega {:.1}, r* {:.3}, c1 {:.3e}, c2 {:.2}; doubling weight doubles gamma",
            vp.gamma, vp.omega, vp.r_star, dp.c1, dp.c2
        ),
    )
}

fn d2_negative_control(seed: u64) -> Verdict {
    let mut draws = criteria::drag_draws(seed ^ 0xD2, 50);
    for d in &mut draws {
        d.params.c1 = -d.params.c1;
    }
    let v = criteria::quartic_oracle(&draws);
    Verdict::new(!v.passed, format!("oracle on negated C1: {}", v.detail))
}

fn d3_power(seed: u64) -> Verdict {
    let mut worst: f64 = 0.0;
    for d in criteria::drag_draws(seed ^ 0xD3, 200) {
        let dp = d.params;
        let v = preferred_speed(d.w, &dp, Objective::Power);
        let power = |v: f64| oracle::drag(v, d.w, dp.c1, dp.c2, dp.lift) * v;
        // Golden-section search on the bracket.
        let (mut a, mut b) = (1e-6, oracle::speed_bracket(&dp, 0.0));
        let r = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            let (c, e) = (b - r * (b - a), a + r * (b - a));
            if power(c) < power(e) {
                b = e;
            } else {
                a = c;
            }
        }
        worst = worst.max((v - 0.5 * (a + b)).abs() / v);
        let _ = optimal_airspeed(d.w, &dp);
    }
    Verdict::new(worst < 1e-6, format!("200 draws, worst relative gap to golden-section minimum {worst:.1e}"))
}

// ---- controller -----------------------------------------------------------

fn objective(u: &ControlInput, v_star: f64, bounds: &ControlBounds) -> f64 {
    let dv = (u.v - v_star) / bounds.speed_range();
    let dw = u.omega / bounds.omega_max;
    dv * dv + dw * dw
}

fn k1_brute_force(seed: u64) -> Verdict {
    let (_, cfg) = scenarios::load(RAVEN_PAIR, &[]);
    let ctl = cfg.controller;
    let bounds = cfg.agents[0].params.bounds;
    let dt = cfg.dt;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x41);
    let n = 1001;
    let (mut worse, mut missed, mut violations, mut feasible) = (0, 0, 0, 0);
    let mut worst_gap: f64 = 0.0;
    for _ in 0..200 {
        let state = VehicleState::new(0.0, 0.0, rng.gen_range(-ctl.epsilon..=ctl.epsilon));
        let grad = Vec2::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0));
        let cost = FlockCostSample {
            grad_e: grad,
            de_dt: rng.gen_range(-12.0..=12.0) * grad.x,
            ..FlockCostSample::default()
        };
        let v_star = rng.gen_range(4.0..=17.0);
        let (lo, hi) = corridor_rates(&state, &bounds, &ctl, dt);
        let rhs = ctl.rho - cost.de_dt;
        let mut brute: Option<f64> = None;
        for i in 0..n {
            let omega = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            let lie = cost.grad_e.dot(Vec2::heading(state.heading + omega * dt));
            for j in 0..n {
                let v = bounds.v_min + bounds.speed_range() * j as f64 / (n - 1) as f64;
                if v * lie <= rhs {
                    let o = objective(&ControlInput { v, omega }, v_star, &bounds);
                    brute = Some(brute.map_or(o, |b: f64| b.min(o)));
                }
            }
        }
        match (solve_constrained(&state, &cost, &bounds, &ctl, v_star, dt), brute) {
            (Ok(u), b) => {
                feasible += 1;
                let heading = state.heading + u.omega * dt;
                let lie = cost.grad_e.dot(Vec2::heading(heading));
                if u.v * lie > rhs + 1e-9
                    || u.v < bounds.v_min
                    || u.v > bounds.v_max
                    || u.omega < lo - 1e-12
                    || u.omega > hi + 1e-12
                {
                    violations += 1;
                }
                if let Some(b) = b {
                    let gap = objective(&u, v_star, &bounds) - b;
                    worst_gap = worst_gap.max(gap);
                    if gap > 1e-3 {
                        worse += 1;
                    }
                }
            }
            (Err(_), Some(_)) => missed += 1,
            (Err(_), None) => {}
        }
    }
    Verdict::new(
        worse == 0 && missed == 0 && violations == 0,
        format!(
            "200 problems ({feasible} feasible): {violations} constraint violations, {missed} feasible problems \
             reported infeasible, worst objective excess over a {n}x{n} grid {worst_gap:.1e}"
        ),
    )
}

fn k2_bounds(_seed: u64) -> Verdict {
    let mut f = Vec::new();
    for (name, text) in scenarios::SHIPPED {
        let (_, cfg) = scenarios::load(text, &[]);
        let record = match run_scenario(&cfg) {
            Ok(r) => r,
            Err(e) => return Verdict::fail(e.to_string()),
        };
        let ctl = &cfg.controller;
        for tick in &record.ticks {
            for (i, a) in tick.iter().enumerate() {
                let b = &cfg.agents[i].params.bounds;
                let err = anseroid::wrap_angle(a.state.heading - ctl.theta_g).abs();
                if a.input.v < b.v_min || a.input.v > b.v_max || a.input.omega.abs() > b.omega_max {
                    f.push(format!("{name}: agent {i} input {:?} out of bounds", a.input));
                }
                if err > ctl.epsilon + b.omega_max * cfg.dt + 1e-12 {
                    f.push(format!("{name}: agent {i} heading error {err}"));
                }
            }
        }
    }
    let relaxed = solve_relaxed(&ControlBounds::new(6.0, 15.0, 0.05).unwrap(), 20.0);
    if relaxed.v != 15.0 || relaxed.omega != 0.0 {
        f.push(format!("relaxed solve for v* = 20 gave {relaxed:?}"));
    }
    f.truncate(5);
    summarize(f, "every recorded input of both shipped scenarios within bounds and corridor".into())
}

// ---- sim ------------------------------------------------------------------

fn s1_integration(seed: u64) -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x51);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let s = VehicleState::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0), rng.gen_range(-PI..PI));
        let u = ControlInput {
            v: rng.gen_range(0.5..15.0),
            omega: rng.gen_range(-1.0..1.0),
        };
        let dt = rng.gen_range(0.01..1.0);
        let exact = integrate_step(&s, &u, dt);
        // Midpoint rule with many substeps.
        let n = 20_000;
        let h = dt / n as f64;
        let (mut p, mut th) = (s.position, s.heading);
        for _ in 0..n {
            p += Vec2::heading(th + 0.5 * u.omega * h) * (u.v * h);
            th += u.omega * h;
        }
        worst = worst.max((exact.position - p).norm());
        worst = worst.max(anseroid::wrap_angle(exact.heading - th).abs());
    }
    let quarter = integrate_step(
        &VehicleState::new(0.0, 0.0, 0.0),
        &ControlInput { v: 1.0, omega: PI / 2.0 },
        1.0,
    );
    let arc = (quarter.position - Vec2::new(2.0 / PI, 2.0 / PI)).norm();
    Verdict::new(
        worst < 1e-8 && arc < 1e-12,
        format!("100 random arcs, worst deviation from fine midpoint integration {worst:.1e}; quarter turn error {arc:.1e}"),
    )
}

fn s2_isolation(_seed: u64) -> Verdict {
    let (_, mut cfg) = scenarios::load(RAVEN_PAIR, &[]);
    cfg.agents.truncate(1);
    let record = match run_scenario(&cfg) {
        Ok(r) => r,
        Err(e) => return Verdict::fail(e.to_string()),
    };
    let iso = cfg.agents[0].params.drag.isolated_speed();
    let ok = record.ticks.iter().all(|t| {
        t[0].cost.cost_e == 0.0 && (t[0].input.v - iso).abs() < 1e-9 && t[0].input.omega == 0.0
    });
    let drift = record.final_tick()[0].state.position.y - cfg.agents[0].initial.position.y;
    Verdict::new(ok && drift == 0.0, format!("lone agent holds v = {iso:.4} m/s, E = 0, straight line for {} ticks", record.ticks.len()))
}

fn s3_dt_halving(_seed: u64) -> Verdict {
    let offset = |dt: &str| -> Result<(f64, f64), String> {
        let (_, cfg) = scenarios::load(RAVEN_PAIR, &[dt]);
        let r = run_scenario(&cfg).map_err(|e| e.to_string())?;
        let front = {
            let s = r.final_tick();
            if s[0].state.position.x >= s[1].state.position.x { 0 } else { 1 }
        };
        let (a, l) = *relative_track(&r, front, 1 - front).last().unwrap();
        Ok((-a, l.abs()))
    };
    match (offset("scenario.dt=0.02"), offset("scenario.dt=0.01")) {
        (Ok(a), Ok(b)) => {
            let ok = (a.0 - b.0).abs() < 0.02 * a.0 && (a.1 - b.1).abs() < 0.02 * a.1;
            Verdict::new(
                ok,
                format!("final offset (trailing, lateral) = ({:.3}, {:.3}) at dt 0.02, ({:.3}, {:.3}) at dt 0.01", a.0, a.1, b.0, b.1),
            )
        }
        (Err(e), _) | (_, Err(e)) => Verdict::fail(e),
    }
}

/// Worst per-step rise of E over Constrained ticks of the Raven pair. E is
/// taken at the realized next state with neighbours moved at the assumed speeds,
/// so only the integration error of the one-step prediction remains.
fn worst_descent_violation(dt: f64) -> Result<f64, String> {
    let (_, cfg) = scenarios::load(RAVEN_PAIR, &[&format!("scenario.dt={dt}")]);
    let mut sim = Simulation::new(&cfg).map_err(|e| e.to_string())?;
    let (kappa, cut, rho) = (cfg.controller.kappa, cfg.controller.negligibility, cfg.controller.rho);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..cfg.tick_count() - 1 {
        let plan = sim.plan();
        let speeds = sim.assumed_speeds().to_vec();
        let frozen: Vec<VehicleState> = sim
            .states()
            .iter()
            .zip(&speeds)
            .map(|(s, &v)| integrate_step(s, &ControlInput { v, omega: 0.0 }, dt))
            .collect();
        sim.advance(&plan).map_err(|e| e.to_string())?;
        for (i, a) in plan.iter().enumerate().filter(|(_, a)| a.mode == ControllerMode::Constrained) {
            let mut world = frozen.clone();
            world[i] = sim.states()[i];
            let nbrs = neighbor_snapshots(i, &world, &speeds, &cfg.agents);
            let e1 = flock_cost(world[i].position, &nbrs, kappa, &cut).cost_e;
            worst = worst.max(e1 - a.cost.cost_e - rho * dt);
        }
    }
    Ok(worst)
}

fn s4_energy_descent(_seed: u64) -> Verdict {
    let dt = 0.02;
    match (worst_descent_violation(dt / 2.0), worst_descent_violation(dt)) {
        (Ok(fine), Ok(coarse)) => {
            let c = fine.max(0.0) / (dt / 2.0).powi(2);
            Verdict::new(
                coarse <= c * dt * dt,
                format!("worst rise {coarse:.2e} at dt {dt} vs C dt^2 = {:.2e} (C = {c:.3} from dt/2)", c * dt * dt),
            )
        }
        (Err(e), _) | (_, Err(e)) => Verdict::fail(e),
    }
}

// ---- analysis -------------------------------------------------------------

fn n1_shapes(_seed: u64) -> Verdict {
    let b = 0.2;
    let th = FormationThresholds::default();
    let pose = |x: f64, y: f64| VehicleState::new(x, y, 0.0);
    let v: Vec<VehicleState> = (0..11)
        .map(|i| {
            let k = (i as f64 / 2.0).ceil();
            let side = if i % 2 == 0 { -1.0 } else { 1.0 };
            pose(-0.5 * k, side * 2.0 * b * k)
        })
        .collect();
    let echelon: Vec<VehicleState> = (0..6).map(|k| pose(-0.5 * k as f64, 2.0 * b * k as f64)).collect();
    let file: Vec<VehicleState> = (0..6).map(|k| pose(-0.5 * k as f64, 0.0)).collect();
    let mut f = Vec::new();
    for (name, states, want) in [
        ("V", &v, FormationKind::V),
        ("echelon", &echelon, FormationKind::Echelon),
        ("single file", &file, FormationKind::None),
    ] {
        let got = detect_formation_at(states, 0.0, b, &th);
        if got.kind != want {
            f.push(format!("{name} classified as {:?}", got.kind));
        }
        // Rotating and translating the flock together with theta_g changes nothing.
        let moved: Vec<VehicleState> = states
            .iter()
            .map(|s| {
                let p = s.position.rotate(0.7) + Vec2::new(3.0, -2.0);
                VehicleState::new(p.x, p.y, 0.7)
            })
            .collect();
        if detect_formation_at(&moved, 0.7, b, &th).kind != want {
            f.push(format!("rotated {name} misclassified"));
        }
    }
    let perfect = detect_formation_at(&v, 0.0, b, &th);
    if perfect.min_branch_score() != 1.0 || perfect.left.gap_score != 1.0 || perfect.right.gap_score != 1.0 {
        f.push("perfect V does not score 1".into());
    }
    summarize(f, "V, echelon and single file classified correctly, also after a rigid motion".into())
}

fn n2_ledger(_seed: u64) -> Verdict {
    let (_, cfg) = scenarios::load(CRAZYSWARM_11, &["scenario.duration=2.0", "analysis.stability_window=1.0"]);
    let record = match run_scenario(&cfg) {
        Ok(r) => r,
        Err(e) => return Verdict::fail(e.to_string()),
    };
    let ledger = cost_ledger(&record);
    let mut worst: f64 = 0.0;
    for (i, l) in ledger.iter().enumerate() {
        let series: Vec<f64> = record.ticks.iter().map(|t| t[i].cost.cost_e).collect();
        let sum: f64 = series[..series.len() - 1].iter().sum::<f64>() * record.dt;
        worst = worst.max((l.total - sum).abs());
        let max = series.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = series.iter().copied().fold(f64::INFINITY, f64::min);
        worst = worst.max((l.max - max).abs()).max((l.min - min).abs());
        worst = worst.max((l.terminal - series[series.len() - 1]).abs());
    }
    Verdict::new(worst < 1e-12, format!("{} agents, worst ledger defect {worst:.1e}", ledger.len()))
}

fn n3_heterogeneity(_seed: u64) -> Verdict {
    let (_, base) = scenarios::load(RAVEN_PAIR, &[]);
    let p = base.agents[0].params;
    let (b, mu) = (p.aero.vortex.half_span, p.aero.wake.mu);
    let mut slow = p;
    slow.drag.c2 *= 0.8;
    let pair = |leader: VehicleParams, follower: VehicleParams| ScenarioConfig {
        agents: [(leader, 0.0, 0.0), (follower, -0.8 * mu, 1.8 * b)]
            .into_iter()
            .map(|(params, x, y)| AgentSpec {
                initial: VehicleState::new(x, y, 0.0),
                initial_speed: params.nominal_speed(Objective::Drag),
                params,
            })
            .collect(),
        ..base.clone()
    };
    let mismatch = |cfg: ScenarioConfig| -> Result<f64, String> {
        let r = run_scenario(&cfg).map_err(|e| e.to_string())?;
        let window = &r.ticks[r.tick_at(r.duration() - 5.0)..];
        let sum: f64 = window.iter().flatten().map(|a| (a.input.v - a.v_star).abs()).sum();
        Ok(sum / (window.len() * r.agent_count) as f64)
    };
    match (mismatch(pair(p, p)), mismatch(pair(slow, p)), mismatch(pair(p, slow))) {
        (Ok(homo), Ok(front), Ok(back)) => Verdict::new(
            front <= homo && back > front,
            format!("mean |v - v*| over the last 5 s: slow front {front:.3}, homogeneous {homo:.3}, slow back {back:.3} m/s"),
        ),
        (Err(e), ..) | (_, Err(e), _) | (.., Err(e)) => Verdict::fail(e),
    }
}
