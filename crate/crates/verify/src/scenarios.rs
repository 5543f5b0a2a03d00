//! The shipped scenario files, embedded so the suite runs from any directory.

use anseroid::config::ScenarioFile;
use anseroid::ScenarioConfig;

pub const RAVEN_PAIR: &str = include_str!("../../../scenarios/raven_pair.cfg");
pub const CRAZYSWARM_11: &str = include_str!("../../../scenarios/crazyswarm_11.cfg");

pub const SHIPPED: [(&str, &str); 2] = [("raven_pair", RAVEN_PAIR), ("crazyswarm_11", CRAZYSWARM_11)];

/// Parse and resolve a scenario. The shipped files are known to be valid.
pub fn load(text: &str, overrides: &[&str]) -> (ScenarioFile, ScenarioConfig) {
    let overrides: Vec<String> = overrides.iter().map(|s| s.to_string()).collect();
    let file = ScenarioFile::from_str_with(text, &overrides).expect("shipped scenario parses");
    let cfg = file.build().expect("shipped scenario is valid");
    (file, cfg)
}
