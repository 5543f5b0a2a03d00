mod common;

use std::f64::consts::PI;

use anseroid::wake::{point_upwash, spanwise_profile, streamwise_gain, vortex_velocity};
use anseroid::{Vec2, VehicleState, VortexParams, WakeShape};
use approx::assert_relative_eq;
use common::{raven_vortex, raven_wake};
use proptest::prelude::*;

#[test]
fn vortex_velocity_examples() {
    let vp = raven_vortex();
    assert_relative_eq!(vp.r_star, 0.0531, epsilon = 1e-4);
    assert_eq!(vortex_velocity(0.0, &vp), 0.0);
    let inner = vp.omega * vp.r_star;
    let outer = vp.gamma / (2.0 * PI * vp.r_star);
    assert_relative_eq!(inner, outer, max_relative = 1e-12);
    assert_relative_eq!(vortex_velocity(0.1, &vp), 1.24 / (2.0 * PI * 0.1), max_relative = 1e-12);
    assert_relative_eq!(vortex_velocity(0.1, &vp), 1.9735, epsilon = 1e-4);
}

#[test]
fn profile_examples() {
    let vp = raven_vortex();
    let b = vp.half_span;
    assert_relative_eq!(spanwise_profile(0.0, &vp), -vp.gamma / (PI * b), max_relative = 1e-12);
    let far = spanwise_profile(10.0 * b, &vp);
    assert!(far.abs() < vp.gamma / (2.0 * PI * 9.0 * b));
    assert!(spanwise_profile(20.0 * b, &vp).abs() < far.abs());
}

#[test]
fn gain_examples() {
    let ws = raven_wake();
    assert_eq!(streamwise_gain(ws.mu, &ws), 2.0);
    assert_relative_eq!(streamwise_gain(ws.mu + 6.0 * ws.sigma, &ws), 3.05e-8, max_relative = 1e-2);
    assert_relative_eq!(
        streamwise_gain(ws.mu + 6.0 * ws.sigma, &ws),
        2.0 * (-18.0f64).exp(),
        max_relative = 1e-12
    );
}

#[test]
fn gain_is_log_concave_with_peak_at_mu() {
    let ws = raven_wake();
    let ln = |d: f64| streamwise_gain(d, &ws).ln();
    let h = 0.01;
    for k in 0..200 {
        let d = -10.0 + 0.15 * k as f64;
        assert!(ln(d + h) - 2.0 * ln(d) + ln(d - h) < 0.0);
        assert!(streamwise_gain(d, &ws) <= 2.0);
    }
}

#[test]
fn point_upwash_degenerate_cases() {
    let vp = raven_vortex();
    let ws = raven_wake();
    let j = VehicleState::new(1.0, -2.0, 0.3);
    let same = point_upwash(j.position, &j, &vp, &ws);
    assert!(same.is_finite());
    assert_relative_eq!(same, spanwise_profile(0.0, &vp) * streamwise_gain(0.0, &ws), max_relative = 1e-12);

    let ahead = j.position + Vec2::heading(j.heading) * (20.0 * ws.sigma - ws.mu) + Vec2::heading(j.heading).perp() * 1.5;
    let u = point_upwash(ahead, &j, &vp, &ws);
    assert!(u.abs() < 1e-12 * spanwise_profile(1.5, &vp).abs());
}

#[test]
fn single_sign_change_on_inner_band() {
    let vp = raven_vortex();
    let b = vp.half_span;
    let n = 200_000;
    let mut changes = Vec::new();
    let mut prev = spanwise_profile(2.0 * b / n as f64, &vp);
    for k in 2..n {
        let y = 2.0 * b * k as f64 / n as f64;
        let f = spanwise_profile(y, &vp);
        if f.signum() != prev.signum() {
            changes.push(y);
        }
        prev = f;
    }
    assert_eq!(changes.len(), 1, "{changes:?}");
    let hi = b + vp.r_star * vp.r_star / (2.0 * b) + vp.r_star;
    assert!(changes[0] >= b && changes[0] <= hi, "crossing at {}", changes[0]);
    // The core makes the profile strictly negative at the tip itself.
    assert_relative_eq!(spanwise_profile(b, &vp), -vp.gamma / (4.0 * PI * b), max_relative = 1e-12);
}

#[test]
fn constructor_errors_name_the_field() {
    assert_eq!(VortexParams::new(0.0, 70.0, 0.7).unwrap_err().field, "gamma");
    assert_eq!(VortexParams::new(1.24, -1.0, 0.7).unwrap_err().field, "omega");
    assert_eq!(VortexParams::new(1.24, 70.0, f64::NAN).unwrap_err().field, "half_span");
    // Core wider than the half-span.
    assert_eq!(VortexParams::new(1.24, 1e-3, 0.7).unwrap_err().field, "omega");
    assert_eq!(WakeShape::new(0.0, 1.0).unwrap_err().field, "mu");
    assert_eq!(WakeShape::new(1.0, f64::INFINITY).unwrap_err().field, "sigma");
    let vp = VortexParams::with_core_radius(1.24, 0.054, 0.7).unwrap();
    assert_eq!(vp.r_star, 0.054);
    assert_relative_eq!(vp.omega, 1.24 / (2.0 * PI * 0.054 * 0.054), max_relative = 1e-12);
}

proptest! {
    #[test]
    fn velocity_odd_profile_even(r in -5.0..5.0f64) {
        let vp = raven_vortex();
        prop_assert_eq!(vortex_velocity(-r, &vp), -vortex_velocity(r, &vp));
        prop_assert_eq!(spanwise_profile(-r, &vp), spanwise_profile(r, &vp));
    }

    #[test]
    fn branch_continuity(gamma in 0.1..200.0f64, omega in 10.0..1e4f64) {
        let vp = VortexParams::new(gamma, omega, 10.0).unwrap();
        let d = 1e-9;
        let jump = vortex_velocity(vp.r_star - d, &vp) - vortex_velocity(vp.r_star + d, &vp);
        prop_assert!(jump.abs() < 1e-6 * vp.omega * vp.r_star);
    }

    #[test]
    fn point_upwash_is_equivariant(
        px in -20.0..20.0f64, py in -5.0..5.0f64,
        jx in -20.0..20.0f64, jy in -5.0..5.0f64, jt in -PI..PI,
        tx in -100.0..100.0f64, ty in -100.0..100.0f64, rot in -PI..PI,
    ) {
        let vp = raven_vortex();
        let ws = raven_wake();
        let p = Vec2::new(px, py);
        let j = VehicleState::new(jx, jy, jt);
        let base = point_upwash(p, &j, &vp, &ws);
        let t = Vec2::new(tx, ty);
        let moved = VehicleState::new(0.0, 0.0, jt + rot);
        let moved = VehicleState { position: j.position.rotate(rot) + t, ..moved };
        let other = point_upwash(p.rotate(rot) + t, &moved, &vp, &ws);
        prop_assert!((base - other).abs() <= 1e-9 * (1.0 + base.abs()), "{} vs {}", base, other);
    }
}
