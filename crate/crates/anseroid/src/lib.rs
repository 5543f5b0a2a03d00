//! Wake-coupled flocking of fixed-wing vehicles.
//!
//! Each agent flies a unicycle and chooses airspeed and turn rate to track its
//! drag-minimizing speed while never letting its cost to flock `E = kappa |M| - W`
//! increase, where `W` and `M` are the upwash and rolling tendency induced by
//! neighbours' tip vortices. When no admissible input keeps `E` from rising the
//! agent falls back to flying its preferred speed straight ahead.
//!
//! The model is generic over the scalar type; `f64` aliases are exported at the
//! crate root.

pub mod aero;
pub mod analysis;
pub mod config;
pub mod controller;
pub mod drag;
pub mod error;
pub mod geom;
pub mod io;
pub mod scalar;
pub mod sim;
pub mod wake;

pub use error::{ParamError, SimError};
pub use geom::wrap_angle;
pub use scalar::Scalar;

pub type Vec2 = geom::Vec2<f64>;
pub type VehicleState = geom::VehicleState<f64>;
pub type VortexParams = wake::VortexParams<f64>;
pub type WakeShape = wake::WakeShape<f64>;
pub type AeroParams = aero::AeroParams<f64>;
pub type NeighborSnapshot = aero::NeighborSnapshot<f64>;
pub type FlockCostSample = aero::FlockCostSample<f64>;
pub type DragParams = drag::DragParams<f64>;
pub type ControlInput = controller::ControlInput<f64>;
pub type ControlBounds = controller::ControlBounds<f64>;
pub type ControllerConfig = controller::ControllerConfig<f64>;
pub type VehicleParams = controller::VehicleParams<f64>;
pub type ScenarioConfig = sim::ScenarioConfig<f64>;
pub type AgentSpec = sim::AgentSpec<f64>;
pub type TrajectoryRecord = sim::TrajectoryRecord<f64>;

pub use controller::{ControlLaw, ControllerMode};
pub use drag::Objective;
pub use sim::NeighborSpeed;
