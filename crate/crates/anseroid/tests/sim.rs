mod common;

use std::f64::consts::FRAC_PI_2;

use anseroid::aero::flock_cost;
use anseroid::analysis::stability_check;
use anseroid::sim::{integrate_step, neighbor_snapshots, run_scenario, tick_count, Simulation};
use anseroid::{ControlInput, ControllerMode, ScenarioConfig, TrajectoryRecord, Vec2, VehicleState};
use approx::assert_relative_eq;
use common::{raven, raven_short};
use proptest::prelude::*;

#[test]
fn integrate_step_examples() {
    let s = VehicleState::new(0.0, 0.0, 0.0);
    let straight = integrate_step(&s, &ControlInput { v: 1.0, omega: 0.0 }, 1.0);
    assert_eq!(straight.position, Vec2::new(1.0, 0.0));
    let arc = integrate_step(&s, &ControlInput { v: 1.0, omega: FRAC_PI_2 }, 1.0);
    assert_relative_eq!(arc.position.x, 2.0 / std::f64::consts::PI, max_relative = 1e-12);
    assert_relative_eq!(arc.position.y, 2.0 / std::f64::consts::PI, max_relative = 1e-12);
    assert_relative_eq!(arc.heading, FRAC_PI_2, max_relative = 1e-12);
}

proptest! {
    #[test]
    fn half_steps_compose(x in -10.0..10.0f64, y in -10.0..10.0f64, th in -3.0..3.0f64,
                          v in 0.1..20.0f64, omega in -1.0..1.0f64, dt in 0.001..2.0f64) {
        let s = VehicleState::new(x, y, th);
        let u = ControlInput { v, omega };
        let once = integrate_step(&s, &u, dt);
        let twice = integrate_step(&integrate_step(&s, &u, dt / 2.0), &u, dt / 2.0);
        prop_assert!((once.position - twice.position).norm() < 1e-9 * (1.0 + v * dt));
        prop_assert!(anseroid::wrap_angle(once.heading - twice.heading).abs() < 1e-12);
    }
}

#[test]
fn tick_counts() {
    assert_eq!(tick_count(20.0, 0.02), 1001);
    assert_eq!(tick_count(1.0, 0.3), 4);
    assert_eq!(raven(&[]).tick_count(), 1001);
    let rec = run_scenario(&raven_short(1.0)).unwrap();
    assert_eq!(rec.ticks.len(), 51);
    assert_relative_eq!(rec.duration(), 1.0, max_relative = 1e-12);
}

#[test]
fn isolated_agent_flies_straight_at_its_optimum() {
    let mut cfg = raven(&[]);
    cfg.agents.truncate(1);
    let rec = run_scenario(&cfg).unwrap();
    let iso = cfg.agents[0].params.drag.isolated_speed();
    for t in &rec.ticks {
        assert_relative_eq!(t[0].input.v, iso, max_relative = 1e-10);
        assert_eq!(t[0].input.omega, 0.0);
        assert_eq!(t[0].state.position.y, cfg.agents[0].initial.position.y);
    }
    let last = rec.final_tick()[0].state.position.x;
    assert_relative_eq!(last, iso * 20.0, max_relative = 1e-9);
}

#[test]
fn runs_are_bit_identical() {
    let cfg = raven_short(5.0);
    assert_eq!(run_scenario(&cfg).unwrap(), run_scenario(&cfg).unwrap());
}

#[test]
fn validation_errors_name_the_field() {
    let mut cfg = raven(&[]);
    cfg.dt = 0.0;
    assert_eq!(cfg.validate().unwrap_err().field, "scenario.dt");
    let mut cfg = raven(&[]);
    cfg.duration = cfg.dt;
    assert_eq!(cfg.validate().unwrap_err().field, "scenario.duration");
    let mut cfg = raven(&[]);
    cfg.agents[1].initial_speed = 100.0;
    assert_eq!(cfg.validate().unwrap_err().field, "agents[1].initial_speed");
    let mut cfg = raven(&[]);
    cfg.agents.clear();
    assert!(run_scenario(&cfg).is_err());
    let mut cfg = raven(&[]);
    cfg.controller.epsilon = -1.0;
    assert_eq!(cfg.validate().unwrap_err().field, "controller.epsilon");
}

fn assert_bounds_and_corridor(cfg: &ScenarioConfig, rec: &TrajectoryRecord) {
    let c = &cfg.controller;
    for t in &rec.ticks {
        for (i, a) in t.iter().enumerate() {
            let b = &cfg.agents[i].params.bounds;
            assert!(a.input.v >= b.v_min && a.input.v <= b.v_max);
            assert!(a.input.omega.abs() <= b.omega_max);
            let err = c.heading_error(a.state.heading).abs();
            assert!(err <= c.epsilon + b.omega_max * cfg.dt + 1e-12, "heading error {err}");
        }
    }
}

#[test]
fn shipped_runs_respect_bounds_and_corridor() {
    let cfg = raven(&[]);
    assert_bounds_and_corridor(&cfg, &run_scenario(&cfg).unwrap());
    let file = anseroid::config::ScenarioFile::from_str_with(common::CRAZYSWARM, &["scenario.duration=10.0".into(), "analysis.stability_window=5.0".into()]).unwrap();
    let cfg = file.build().unwrap();
    assert_bounds_and_corridor(&cfg, &run_scenario(&cfg).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn random_pairs_respect_bounds_and_corridor(d in 0.0..14.0f64, y in -3.0..3.0f64, th in -0.1..0.1f64, kappa in 0.0..0.5f64) {
        let mut cfg = raven_short(4.0);
        cfg.controller.kappa = kappa;
        cfg.agents[1].initial = VehicleState::new(-d, y, th);
        let rec = run_scenario(&cfg).unwrap();
        assert_bounds_and_corridor(&cfg, &rec);
    }
}

#[test]
fn raven_pair_settles_into_leader_and_follower() {
    let cfg = raven(&[]);
    let rec = run_scenario(&cfg).unwrap();
    let ranges: Vec<f64> = cfg.agents.iter().map(|a| a.params.bounds.speed_range()).collect();
    let c = &cfg.controller;
    assert!(stability_check(&rec, 5.0, &ranges, c.epsilon, c.theta_g).stable);
    let last = rec.final_tick();
    let (front, back) = if last[0].state.position.x > last[1].state.position.x { (0, 1) } else { (1, 0) };
    let (along, left) = last[front].state.to_body(last[back].state.position);
    let b = cfg.agents[0].params.aero.vortex.half_span;
    let mu = cfg.agents[0].params.aero.wake.mu;
    assert!((-along - mu).abs() < 0.05 * mu, "trailing {}", -along);
    assert!((left.abs() - 2.0 * b).abs() < 0.05 * b, "lateral {left}");
    assert!(last[back].cost.cost_e < 0.0);
}

/// Largest per-step increase of E over Constrained ticks, measuring E at the
/// realized next state with neighbours moved at the speeds the planner assumed.
fn worst_descent_violation(dt: f64) -> f64 {
    let cfg = raven(&[&format!("scenario.dt={dt}")]);
    let mut sim = Simulation::new(&cfg).unwrap();
    let kappa = cfg.controller.kappa;
    let cut = cfg.controller.negligibility;
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
        sim.advance(&plan).unwrap();
        for (i, a) in plan.iter().enumerate() {
            if a.mode != ControllerMode::Constrained {
                continue;
            }
            let mut world = frozen.clone();
            world[i] = sim.states()[i];
            let nbrs = neighbor_snapshots(i, &world, &speeds, &cfg.agents);
            let e1 = flock_cost(world[i].position, &nbrs, kappa, &cut).cost_e;
            worst = worst.max(e1 - a.cost.cost_e - cfg.controller.rho * dt);
        }
    }
    worst
}

#[test]
fn energy_descent_is_second_order() {
    let dt = 0.02;
    let fine = worst_descent_violation(dt / 2.0);
    let c = fine.max(0.0) / (dt / 2.0).powi(2);
    let coarse = worst_descent_violation(dt);
    assert!(coarse <= c * dt * dt, "increase {coarse} exceeds {c} dt^2 = {}", c * dt * dt);
}
