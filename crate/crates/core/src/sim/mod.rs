//! Deterministic multi-lane freeway.
//!
//! Surrounding vehicles follow the IDM car-following law and decide lane
//! changes with MOBIL; the ego vehicle receives high-level commands. Every
//! vehicle is moved by the same low-level speed/steering controllers and a
//! kinematic bicycle model integrated with forward Euler.

mod collision;
mod config;
mod control;
mod idm;
mod kinematics;
mod mobil;
mod world;

use thiserror::Error;

pub use collision::rectangles_overlap;
pub use config::{
    ControlGains, HeadingRateBase, IdmParams, MobilParams, RewardConfig, RoadConfig, ScenarioConfig, SimConfig,
    VehicleParams,
};
pub use control::{longitudinal_control, steering_control, MAX_ACCEL, MAX_STEER, STEER_MIN_SPEED};
pub use idm::{desired_gap, idm_acceleration, idm_raw, MAX_BRAKING, NO_LEADER_GAP};
pub use kinematics::{bicycle_step, slip_angle, VehicleState};
pub use mobil::{mobil_accelerations, mobil_criterion, mobil_decision, LaneNeighbors, MobilAccelerations, Neighbor};
pub use world::{
    Action, StepInfo, StepResult, Vehicle, World, EGO_ID, FEATURES_PER_VEHICLE, OBSERVATION_DIM, OBSERVED_VEHICLES,
};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid scenario: {0}")]
    Config(String),
    #[error("cannot place {vehicles} vehicles: only {slots} non-overlapping spawn slots fit on the road")]
    SpawnCapacity { vehicles: usize, slots: usize },
    #[error("vehicles already overlap (gap {gap} m)")]
    AlreadyColliding { gap: f64 },
    #[error("lane {lane} is off the road ({lane_count} lanes)")]
    InvalidLane { lane: usize, lane_count: usize },
    #[error("episode already finished")]
    EpisodeFinished,
}
