use serde::{Deserialize, Serialize};

use super::SimError;

/// Car-following parameters (defaults from the standard freeway setup).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IdmParams {
    /// Maximum acceleration, m/s^2.
    pub a_max: f64,
    /// Free-road acceleration exponent.
    pub delta: f64,
    /// Jam distance, m.
    pub d0: f64,
    /// Safe time headway, s.
    pub time_gap: f64,
    /// Comfortable deceleration, m/s^2.
    pub b_comf: f64,
}

impl Default for IdmParams {
    fn default() -> Self {
        Self { a_max: 6.0, delta: 4.0, d0: 10.0, time_gap: 1.5, b_comf: 5.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MobilParams {
    /// Largest braking imposed on the new follower, m/s^2.
    pub b_safe: f64,
    pub politeness: f64,
    /// Minimum net acceleration gain to change lane, m/s^2.
    pub a_th: f64,
}

impl Default for MobilParams {
    fn default() -> Self {
        Self { b_safe: 2.0, politeness: 0.001, a_th: 0.2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ControlGains {
    /// Speed tracking gain, 1/s.
    pub k_p: f64,
    /// Lateral position gain, 1/s.
    pub k_p_lat: f64,
    /// Heading gain, 1/s.
    pub k_p_theta: f64,
}

impl Default for ControlGains {
    fn default() -> Self {
        Self { k_p: 1.0 / 0.6, k_p_lat: 1.0 / 3.0, k_p_theta: 1.0 / 0.2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RoadConfig {
    pub lane_count: usize,
    pub lane_width: f64,
    /// Length of the ring road; vehicles leaving at the end re-enter at 0.
    pub lane_length: f64,
}

impl Default for RoadConfig {
    fn default() -> Self {
        Self { lane_count: 3, lane_width: 4.0, lane_length: 1000.0 }
    }
}

impl RoadConfig {
    /// Lateral position of a lane's centerline. Lane 0 is leftmost.
    pub fn lane_center(&self, lane: usize) -> f64 {
        (lane as f64 + 0.5) * self.lane_width
    }

    /// Lane whose band contains `y`, clamped to the road.
    pub fn lane_of(&self, y: f64) -> usize {
        let idx = (y / self.lane_width).floor();
        if idx <= 0.0 {
            0
        } else {
            (idx as usize).min(self.lane_count - 1)
        }
    }

    /// Longitudinal offset from `from` to `to` on the ring, in `[-L/2, L/2)`.
    pub fn wrapped_dx(&self, from: f64, to: f64) -> f64 {
        let d = (to - from).rem_euclid(self.lane_length);
        if d >= 0.5 * self.lane_length {
            d - self.lane_length
        } else {
            d
        }
    }
}

/// Denominator of the heading-rate equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeadingRateBase {
    /// `v sin(beta) / (l_r + l_f)`.
    Wheelbase,
    /// `v sin(beta) / l_r`.
    RearDistance,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VehicleParams {
    pub length: f64,
    pub width: f64,
    pub l_r: f64,
    pub l_f: f64,
    pub max_speed: f64,
    pub heading_rate_base: HeadingRateBase,
}

impl Default for VehicleParams {
    fn default() -> Self {
        Self {
            length: 5.0,
            width: 2.0,
            l_r: 2.5,
            l_f: 2.5,
            max_speed: 40.0,
            heading_rate_base: HeadingRateBase::Wheelbase,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub surrounding_count: usize,
    pub ego_speed_range: [f64; 2],
    pub other_speed_range: [f64; 2],
    /// Episode length, s.
    pub episode_duration: f64,
    pub policy_hz: u32,
    pub sim_hz: u32,
    /// FASTER / SLOWER setpoint change, m/s.
    pub speed_step: f64,
    /// Minimum center-to-center spacing within a lane at spawn, m.
    pub spawn_gap: f64,
    /// Distance between spawn slots; positions jitter by `spawn_pitch - spawn_gap`.
    pub spawn_pitch: f64,
    pub spawn_slots_behind: usize,
    pub spawn_slots_ahead: usize,
    /// Fixed ego lane; random when absent.
    pub ego_lane: Option<usize>,
    /// Spawn seed. Not read from config files: the harness assigns one per episode.
    #[serde(skip)]
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            surrounding_count: 15,
            ego_speed_range: [23.0, 25.0],
            other_speed_range: [20.0, 23.0],
            episode_duration: 100.0,
            policy_hz: 1,
            sim_hz: 15,
            speed_step: 5.0,
            spawn_gap: 25.0,
            spawn_pitch: 40.0,
            spawn_slots_behind: 2,
            spawn_slots_ahead: 8,
            ego_lane: None,
            seed: 0,
        }
    }
}

impl ScenarioConfig {
    /// Policy decisions per episode.
    pub fn max_steps(&self) -> u32 {
        (self.episode_duration * self.policy_hz as f64).round() as u32
    }

    pub fn substeps(&self) -> u32 {
        self.sim_hz / self.policy_hz
    }
}

/// Reward weights; a step scores `speed_weight * speed_term + lane_weight * lane_term`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RewardConfig {
    pub speed_weight: f64,
    pub lane_weight: f64,
    /// Speeds at or below this earn no speed reward, m/s.
    pub speed_floor: f64,
    /// Speeds at or above this earn the full speed reward, m/s.
    pub speed_ceiling: f64,
}

impl Default for RewardConfig {
    fn default() -> Self {
        Self { speed_weight: 0.8, lane_weight: 0.2, speed_floor: 20.0, speed_ceiling: 40.0 }
    }
}

/// Everything a [`super::World`] needs.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SimConfig {
    pub road: RoadConfig,
    pub scenario: ScenarioConfig,
    pub idm: IdmParams,
    pub mobil: MobilParams,
    pub gains: ControlGains,
    pub vehicle: VehicleParams,
    pub reward: RewardConfig,
}

fn positive(name: &str, v: f64) -> Result<(), SimError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(SimError::Config(format!("{name} must be positive, got {v}")))
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        let r = &self.road;
        if r.lane_count < 2 {
            return Err(SimError::Config(format!("lane_count must be at least 2, got {}", r.lane_count)));
        }
        positive("road.lane_width", r.lane_width)?;
        positive("road.lane_length", r.lane_length)?;

        let s = &self.scenario;
        for (name, [lo, hi]) in [("ego_speed_range", s.ego_speed_range), ("other_speed_range", s.other_speed_range)] {
            if !(0.0 <= lo && lo <= hi && hi <= self.vehicle.max_speed) {
                return Err(SimError::Config(format!("scenario.{name} [{lo}, {hi}] outside [0, max_speed]")));
            }
        }
        positive("scenario.episode_duration", s.episode_duration)?;
        if s.policy_hz == 0 || s.sim_hz == 0 || s.sim_hz % s.policy_hz != 0 {
            return Err(SimError::Config(format!(
                "sim_hz ({}) must be a positive multiple of policy_hz ({})",
                s.sim_hz, s.policy_hz
            )));
        }
        if s.max_steps() == 0 {
            return Err(SimError::Config("episode shorter than one policy step".into()));
        }
        if s.speed_step < 0.0 {
            return Err(SimError::Config("scenario.speed_step must be non-negative".into()));
        }
        if s.spawn_gap < self.vehicle.length || s.spawn_pitch < s.spawn_gap {
            return Err(SimError::Config(format!(
                "need vehicle length <= spawn_gap <= spawn_pitch, got {} / {} / {}",
                self.vehicle.length, s.spawn_gap, s.spawn_pitch
            )));
        }
        if let Some(l) = s.ego_lane {
            if l >= r.lane_count {
                return Err(SimError::Config(format!("scenario.ego_lane {l} off the road")));
            }
        }

        for (name, v) in [
            ("idm.a_max", self.idm.a_max),
            ("idm.delta", self.idm.delta),
            ("idm.d0", self.idm.d0),
            ("idm.time_gap", self.idm.time_gap),
            ("idm.b_comf", self.idm.b_comf),
            ("mobil.b_safe", self.mobil.b_safe),
            ("gains.k_p", self.gains.k_p),
            ("gains.k_p_lat", self.gains.k_p_lat),
            ("gains.k_p_theta", self.gains.k_p_theta),
            ("vehicle.length", self.vehicle.length),
            ("vehicle.width", self.vehicle.width),
            ("vehicle.l_r", self.vehicle.l_r),
            ("vehicle.l_f", self.vehicle.l_f),
            ("vehicle.max_speed", self.vehicle.max_speed),
        ] {
            positive(name, v)?;
        }
        if self.mobil.politeness < 0.0 || self.mobil.a_th < 0.0 {
            return Err(SimError::Config("mobil.politeness and mobil.a_th must be non-negative".into()));
        }

        let w = &self.reward;
        if w.speed_weight < 0.0 || w.lane_weight < 0.0 || w.speed_weight + w.lane_weight > 1.0 + 1e-12 {
            return Err(SimError::Config("reward weights must be non-negative and sum to at most 1".into()));
        }
        if !(w.speed_floor < w.speed_ceiling) {
            return Err(SimError::Config("reward.speed_floor must be below reward.speed_ceiling".into()));
        }
        Ok(())
    }
}
