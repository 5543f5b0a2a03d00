//! Scenario files: TOML with nested sections, SI units throughout.
//!
//! ```toml
//! [scenario]
//! name = "raven_pair"
//! dt = 0.02
//! duration = 20.0
//!
//! [vehicle]
//! gamma = 1.24
//! omega = 70.0
//! half_span = 0.7
//! mu = 7.0
//! sigma = 3.5
//! lift = 18.7
//! c1 = 5e-3
//! c2 = 95.0
//! v_min = 6.0
//! v_max = 15.0
//! omega_max = 0.05
//!
//! [formation]
//! layout = "line"
//! count = 2
//! spacing = 1.4
//! ```
//!
//! `[[agents]]` entries (with `layout = "explicit"`) place agents one by one and
//! may override any `[vehicle]` key through an inline `vehicle` table.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::aero::{AeroParams, Negligibility};
use crate::analysis::FormationThresholds;
use crate::controller::{ControlBounds, ControlLaw, ControllerConfig, VehicleParams};
use crate::drag::{DragParams, Objective};
use crate::error::ParamError;
use crate::geom::VehicleState;
use crate::sim::{AgentSpec, NeighborSpeed, ScenarioConfig};
use crate::wake::{VortexParams, WakeShape};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{0}")]
    Parse(String),
    #[error("bad override `{0}`: expected section.key=value")]
    Override(String),
    #[error(transparent)]
    Invalid(#[from] ParamError),
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    #[serde(default = "default_name")]
    pub name: String,
    #[serde(default = "default_dt")]
    pub dt: f64,
    pub duration: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_neighbor_speed")]
    pub neighbor_speed: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ControllerSection {
    #[serde(default)]
    pub rho: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default)]
    pub theta_g: f64,
    #[serde(default = "default_kappa")]
    pub kappa: f64,
    #[serde(default = "default_grid")]
    pub omega_grid: usize,
    #[serde(default = "default_refine")]
    pub refine: usize,
    #[serde(default = "default_objective")]
    pub objective: String,
    #[serde(default = "default_law")]
    pub law: String,
    #[serde(default = "default_min_gain")]
    pub min_gain: f64,
    #[serde(default = "default_span_cutoff")]
    pub span_cutoff: f64,
}

impl Default for ControllerSection {
    fn default() -> Self {
        toml::from_str("").expect("controller defaults")
    }
}

/// Vehicle parameters. Every key is optional so that agents can override a subset.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct VehicleSection {
    pub gamma: Option<f64>,
    pub omega: Option<f64>,
    pub half_span: Option<f64>,
    pub mu: Option<f64>,
    pub sigma: Option<f64>,
    pub lift: Option<f64>,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub v_min: Option<f64>,
    pub v_max: Option<f64>,
    pub omega_max: Option<f64>,
}

impl VehicleSection {
    fn merged(&self, over: &VehicleSection) -> VehicleSection {
        macro_rules! pick {
            ($($f:ident),*) => { VehicleSection { $($f: over.$f.or(self.$f)),* } };
        }
        pick!(gamma, omega, half_span, mu, sigma, lift, c1, c2, v_min, v_max, omega_max)
    }

    fn build(&self, path: &str) -> Result<VehicleParams<f64>, ParamError> {
        let need = |v: Option<f64>, k: &str| v.ok_or_else(|| ParamError::new(format!("{path}.{k}"), "missing"));
        let vortex = VortexParams::new(
            need(self.gamma, "gamma")?,
            need(self.omega, "omega")?,
            need(self.half_span, "half_span")?,
        )
        .map_err(|e| e.within(path))?;
        let wake = WakeShape::new(need(self.mu, "mu")?, need(self.sigma, "sigma")?).map_err(|e| e.within(path))?;
        let drag = DragParams::new(need(self.c1, "c1")?, need(self.c2, "c2")?, need(self.lift, "lift")?)
            .map_err(|e| e.within(path))?;
        let bounds = ControlBounds::new(
            need(self.v_min, "v_min")?,
            need(self.v_max, "v_max")?,
            need(self.omega_max, "omega_max")?,
        )
        .map_err(|e| e.within(path))?;
        Ok(VehicleParams {
            aero: AeroParams { vortex, wake },
            drag,
            bounds,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FormationSection {
    /// `line` (spanwise line abreast) or `explicit` (use `[[agents]]`).
    #[serde(default = "default_layout")]
    pub layout: String,
    #[serde(default)]
    pub count: usize,
    /// Spanwise distance between neighbours in the line, m.
    #[serde(default)]
    pub spacing: f64,
    /// Every odd-indexed agent starts this far behind, m.
    #[serde(default)]
    pub stagger: f64,
    /// Half-width of a seeded uniform streamwise perturbation, m.
    #[serde(default)]
    pub jitter: f64,
}

impl Default for FormationSection {
    fn default() -> Self {
        toml::from_str("").expect("formation defaults")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AgentEntry {
    pub x: f64,
    pub y: f64,
    #[serde(default)]
    pub heading: Option<f64>,
    /// Initial airspeed; defaults to the agent's nominal speed.
    #[serde(default)]
    pub speed: Option<f64>,
    #[serde(default)]
    pub vehicle: VehicleSection,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSection {
    /// Trailing window of the stability check, s.
    #[serde(default = "default_window")]
    pub stability_window: f64,
    #[serde(default = "default_gap_lo")]
    pub gap_lo: f64,
    #[serde(default = "default_gap_hi")]
    pub gap_hi: f64,
    #[serde(default = "default_score")]
    pub score: f64,
    /// Times at which flock-shape polylines are exported, s.
    #[serde(default)]
    pub shape_times: Vec<f64>,
}

impl Default for AnalysisSection {
    fn default() -> Self {
        toml::from_str("").expect("analysis defaults")
    }
}

impl AnalysisSection {
    pub fn thresholds(&self) -> FormationThresholds {
        FormationThresholds {
            gap_lo: self.gap_lo,
            gap_hi: self.gap_hi,
            score: self.score,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_out")]
    pub dir: String,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: default_out() }
    }
}

/// A scenario file with every default filled in.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub scenario: ScenarioSection,
    #[serde(default)]
    pub controller: ControllerSection,
    #[serde(default)]
    pub vehicle: VehicleSection,
    #[serde(default)]
    pub formation: FormationSection,
    #[serde(default)]
    pub agents: Vec<AgentEntry>,
    #[serde(default)]
    pub analysis: AnalysisSection,
    #[serde(default)]
    pub output: OutputSection,
}

fn default_name() -> String {
    "scenario".into()
}
fn default_dt() -> f64 {
    0.02
}
fn default_neighbor_speed() -> String {
    "nominal".into()
}
fn default_epsilon() -> f64 {
    0.1
}
fn default_kappa() -> f64 {
    0.25
}
fn default_grid() -> usize {
    41
}
fn default_refine() -> usize {
    10
}
fn default_objective() -> String {
    "drag".into()
}
fn default_law() -> String {
    "anseroid".into()
}
fn default_min_gain() -> f64 {
    1e-9
}
fn default_span_cutoff() -> f64 {
    8.0
}
fn default_layout() -> String {
    "line".into()
}
fn default_window() -> f64 {
    5.0
}
fn default_gap_lo() -> f64 {
    std::f64::consts::SQRT_2
}
fn default_gap_hi() -> f64 {
    2.5
}
fn default_score() -> f64 {
    0.9
}
fn default_out() -> String {
    "out".into()
}

/// Parse the right-hand side of an override as a TOML value, falling back to a string.
fn parse_value(raw: &str) -> toml::Value {
    toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

/// Apply `section.key=value` to a parsed document, creating tables as needed.
pub fn apply_override(doc: &mut toml::Table, spec: &str) -> Result<(), ConfigError> {
    let (path, raw) = spec
        .split_once('=')
        .ok_or_else(|| ConfigError::Override(spec.to_string()))?;
    let keys: Vec<&str> = path.trim().split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(ConfigError::Override(spec.to_string()));
    }
    let value = parse_value(raw.trim());
    let mut node = doc;
    for (depth, key) in keys.iter().enumerate() {
        let last = depth + 1 == keys.len();
        if last {
            node.insert(key.to_string(), value);
            return Ok(());
        }
        let entry = node
            .entry(key.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        node = match entry {
            toml::Value::Table(t) => t,
            toml::Value::Array(items) => {
                let idx: usize = keys[depth + 1]
                    .parse()
                    .map_err(|_| ConfigError::Override(spec.to_string()))?;
                let rest = keys[depth + 2..].join(".");
                let item = items
                    .get_mut(idx)
                    .and_then(|v| v.as_table_mut())
                    .ok_or_else(|| ConfigError::Override(spec.to_string()))?;
                return apply_override(item, &format!("{rest}={raw}"));
            }
            _ => return Err(ConfigError::Override(spec.to_string())),
        };
    }
    Ok(())
}

impl ScenarioFile {
    pub fn from_str_with(text: &str, overrides: &[String]) -> Result<Self, ConfigError> {
        let mut doc: toml::Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
        for o in overrides {
            apply_override(&mut doc, o)?;
        }
        let file: ScenarioFile = toml::Value::Table(doc)
            .try_into()
            .map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
        file.build()?;
        Ok(file)
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_str_with(&text, overrides)
    }

    pub fn controller_config(&self) -> Result<ControllerConfig<f64>, ParamError> {
        let c = &self.controller;
        let objective = match c.objective.as_str() {
            "drag" => Objective::Drag,
            "power" => Objective::Power,
            _ => return Err(ParamError::new("controller.objective", "expected \"drag\" or \"power\"")),
        };
        let law = match c.law.as_str() {
            "anseroid" => ControlLaw::Anseroid,
            "greedy" => ControlLaw::Greedy,
            _ => return Err(ParamError::new("controller.law", "expected \"anseroid\" or \"greedy\"")),
        };
        if !(c.min_gain >= 0.0) {
            return Err(ParamError::new("controller.min_gain", "must be >= 0"));
        }
        if !(c.span_cutoff > 0.0) {
            return Err(ParamError::new("controller.span_cutoff", "must be positive"));
        }
        let cfg = ControllerConfig {
            rho: c.rho,
            epsilon: c.epsilon,
            theta_g: c.theta_g,
            kappa: c.kappa,
            omega_grid: c.omega_grid,
            refine: c.refine,
            objective,
            law,
            negligibility: Negligibility {
                min_gain: c.min_gain,
                span_multiple: c.span_cutoff,
            },
        };
        cfg.validate().map_err(|e| e.within("controller"))?;
        Ok(cfg)
    }

    /// Resolve into a runnable scenario.
    pub fn build(&self) -> Result<ScenarioConfig<f64>, ParamError> {
        let controller = self.controller_config()?;
        let neighbor_speed = match self.scenario.neighbor_speed.as_str() {
            "nominal" => NeighborSpeed::Nominal,
            "measured" => NeighborSpeed::Measured,
            _ => {
                return Err(ParamError::new(
                    "scenario.neighbor_speed",
                    "expected \"nominal\" or \"measured\"",
                ))
            }
        };
        let theta_g = controller.theta_g;
        let agent = |x: f64, y: f64, heading: Option<f64>, speed: Option<f64>, params: VehicleParams<f64>| {
            AgentSpec {
                initial: VehicleState::new(x, y, heading.unwrap_or(theta_g)),
                initial_speed: speed.unwrap_or_else(|| params.nominal_speed(controller.objective)),
                params,
            }
        };
        let f = &self.formation;
        let agents = match f.layout.as_str() {
            "line" => {
                if f.count == 0 {
                    return Err(ParamError::new("formation.count", "must be positive"));
                }
                if !(f.spacing > 0.0) {
                    return Err(ParamError::new("formation.spacing", "must be positive"));
                }
                if !(f.jitter >= 0.0) {
                    return Err(ParamError::new("formation.jitter", "must be >= 0"));
                }
                let params = self.vehicle.build("vehicle")?;
                let mut rng = ChaCha8Rng::seed_from_u64(self.scenario.seed);
                let (s, c) = theta_g.sin_cos();
                let mid = (f.count as f64 - 1.0) / 2.0;
                (0..f.count)
                    .map(|i| {
                        let lateral = (i as f64 - mid) * f.spacing;
                        let mut back = if i % 2 == 1 { f.stagger } else { 0.0 };
                        if f.jitter > 0.0 {
                            back += rng.gen_range(-f.jitter..=f.jitter);
                        }
                        // Rotate (along, left) = (-back, lateral) into the world frame.
                        let x = -back * c - lateral * s;
                        let y = -back * s + lateral * c;
                        agent(x, y, None, None, params)
                    })
                    .collect::<Vec<_>>()
            }
            "explicit" => {
                if self.agents.is_empty() {
                    return Err(ParamError::new("agents", "explicit layout needs [[agents]] entries"));
                }
                self.agents
                    .iter()
                    .enumerate()
                    .map(|(i, a)| {
                        let params = self.vehicle.merged(&a.vehicle).build(&format!("agents[{i}].vehicle"))?;
                        Ok(agent(a.x, a.y, a.heading, a.speed, params))
                    })
                    .collect::<Result<Vec<_>, ParamError>>()?
            }
            _ => return Err(ParamError::new("formation.layout", "expected \"line\" or \"explicit\"")),
        };
        let a = &self.analysis;
        if !(a.stability_window > 0.0 && a.stability_window <= self.scenario.duration) {
            return Err(ParamError::new("analysis.stability_window", "must lie in (0, duration]"));
        }
        if !(a.gap_lo >= 0.0 && a.gap_hi > a.gap_lo) {
            return Err(ParamError::new("analysis.gap_hi", "must exceed gap_lo >= 0"));
        }
        let cfg = ScenarioConfig {
            name: self.scenario.name.clone(),
            agents,
            controller,
            dt: self.scenario.dt,
            duration: self.scenario.duration,
            seed: self.scenario.seed,
            neighbor_speed,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}
