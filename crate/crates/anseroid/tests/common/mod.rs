#![allow(dead_code)]

use anseroid::aero::AeroParams;
use anseroid::config::ScenarioFile;
use anseroid::{ScenarioConfig, VehicleParams, VehicleState, VortexParams, WakeShape};

pub const RAVEN: &str = include_str!("../../../../scenarios/raven_pair.cfg");
pub const CRAZYSWARM: &str = include_str!("../../../../scenarios/crazyswarm_11.cfg");

pub fn raven_file(overrides: &[&str]) -> ScenarioFile {
    let o: Vec<String> = overrides.iter().map(|s| s.to_string()).collect();
    ScenarioFile::from_str_with(RAVEN, &o).expect("raven config")
}

pub fn raven(overrides: &[&str]) -> ScenarioConfig {
    raven_file(overrides).build().expect("raven scenario")
}

pub fn raven_params() -> VehicleParams {
    raven(&[]).agents[0].params
}

pub fn raven_vortex() -> VortexParams {
    VortexParams::new(1.24, 70.0, 0.7).unwrap()
}

pub fn raven_wake() -> WakeShape {
    WakeShape::new(7.0, 3.5).unwrap()
}

pub fn raven_aero() -> AeroParams<f64> {
    AeroParams {
        vortex: raven_vortex(),
        wake: raven_wake(),
    }
}

/// Leader at the origin heading +x.
pub fn leader_at_origin() -> VehicleState {
    VehicleState::new(0.0, 0.0, 0.0)
}

/// The Raven pair cut to `duration` seconds.
pub fn raven_short(duration: f64) -> ScenarioConfig {
    let window = duration.min(5.0);
    raven(&[&format!("scenario.duration={duration}"), &format!("analysis.stability_window={window}")])
}
