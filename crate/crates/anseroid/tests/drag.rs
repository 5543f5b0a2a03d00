use anseroid::drag::{derive_params, drag_force, optimal_airspeed, preferred_speed, NonPositiveSpeed, VehicleData};
use anseroid::{DragParams, Objective};
use approx::assert_relative_eq;
use proptest::prelude::*;

fn raven() -> DragParams {
    DragParams::new(5e-3, 95.0, 18.7).unwrap()
}

fn raven_data() -> VehicleData<f64> {
    VehicleData {
        weight: 18.7,
        span: 1.4,
        cruise_speed: 12.0,
        wake_speed: 9.0,
        air_density: 1.2,
        core_fraction: 0.054 / 0.7,
    }
}

#[test]
fn drag_force_examples() {
    let dp = raven();
    let d = drag_force(12.0, 0.0, &dp).unwrap();
    assert_relative_eq!(dp.c1 * 144.0, 0.72, max_relative = 1e-12);
    assert_relative_eq!(d, 0.72 + 95.0 / 144.0, max_relative = 1e-12);
    assert_relative_eq!(d, 1.38, epsilon = 0.01);
    assert!(drag_force(12.0, 0.1, &dp).unwrap() < d);
    assert_eq!(drag_force(0.0, 0.0, &dp), Err(NonPositiveSpeed));
    assert_eq!(drag_force(-1.0, 0.0, &dp), Err(NonPositiveSpeed));
}

#[test]
fn isolated_speed_minimizes_drag() {
    let dp = raven();
    let iso = optimal_airspeed(0.0, &dp);
    assert_relative_eq!(iso, (95.0f64 / 5e-3).powf(0.25), max_relative = 1e-12);
    assert_relative_eq!(iso, 11.74, epsilon = 0.01);
    let at = drag_force(iso, 0.0, &dp).unwrap();
    for dv in [-0.5, -0.01, 0.01, 0.5] {
        assert!(drag_force(iso + dv, 0.0, &dp).unwrap() > at);
    }
    assert!(optimal_airspeed(0.2, &dp) < iso);
    assert!(optimal_airspeed(-0.2, &dp) > iso);
}

#[test]
fn power_objective_is_upwash_independent() {
    let dp = raven();
    let p = preferred_speed(0.0, &dp, Objective::Power);
    assert_relative_eq!(p, (95.0 / (3.0 * 5e-3f64)).powf(0.25), max_relative = 1e-12);
    assert_eq!(preferred_speed(0.4, &dp, Objective::Power), p);
    assert_eq!(preferred_speed(0.4, &dp, Objective::Drag), optimal_airspeed(0.4, &dp));
}

#[test]
fn derive_raven() {
    let (vp, dp) = derive_params(&raven_data()).unwrap();
    assert_relative_eq!(vp.gamma, 1.24, epsilon = 0.005);
    assert_relative_eq!(vp.r_star, 0.054, max_relative = 1e-12);
    assert_relative_eq!(vp.omega, 70.0, epsilon = 3.0);
    assert_relative_eq!(dp.c2, 95.0, epsilon = 0.5);
    assert_relative_eq!(dp.c1, 5e-3, epsilon = 0.5e-3);
    assert_eq!(dp.lift, 18.7);
    // The cruise speed is the isolated optimum by construction.
    assert_relative_eq!(dp.isolated_speed(), 12.0, max_relative = 1e-12);

    let heavy = derive_params(&VehicleData { weight: 37.4, ..raven_data() }).unwrap().0;
    assert_relative_eq!(heavy.gamma, 2.0 * vp.gamma, max_relative = 1e-12);
}

#[test]
fn derive_errors() {
    let bad = |d: VehicleData<f64>| derive_params(&d).unwrap_err().field;
    assert_eq!(bad(VehicleData { weight: 0.0, ..raven_data() }), "weight");
    assert_eq!(bad(VehicleData { air_density: -1.0, ..raven_data() }), "air_density");
    assert_eq!(bad(VehicleData { core_fraction: 0.5, ..raven_data() }), "core_fraction");
    assert_eq!(DragParams::new(0.0, 1.0, 1.0).unwrap_err().field, "c1");
    assert_eq!(DragParams::new(1.0, 1.0, f64::NAN).unwrap_err().field, "lift");
}

proptest! {
    #[test]
    fn root_residual_is_tiny(c1 in 1e-4..1.0f64, c2 in 1.0..1e4f64, lift in 0.5..100.0f64, w in -2.0..2.0f64) {
        let dp = DragParams::new(c1, c2, lift).unwrap();
        let v = optimal_airspeed(w, &dp);
        prop_assert!(v > 0.0);
        prop_assert!(dp.quartic(v, w).abs() < 1e-9 * (c2 / c1), "residual {}", dp.quartic(v, w));
    }

    #[test]
    fn decreasing_in_upwash(c1 in 1e-4..1.0f64, c2 in 1.0..1e4f64, lift in 0.5..100.0f64, w in -1.0..1.0f64) {
        let dp = DragParams::new(c1, c2, lift).unwrap();
        let grid: Vec<f64> = (0..20).map(|k| w + 0.05 * k as f64).collect();
        let speeds: Vec<f64> = grid.iter().map(|&w| optimal_airspeed(w, &dp)).collect();
        prop_assert!(speeds.windows(2).all(|p| p[1] < p[0]), "{:?}", speeds);
    }
}
