use super::collision::rectangles_overlap;
use super::config::SimConfig;
use super::control::{longitudinal_control, steering_control};
use super::idm::{idm_acceleration, NO_LEADER_GAP};
use super::kinematics::{bicycle_step, VehicleState};
use super::mobil::{mobil_decision, LaneNeighbors, Neighbor};
use super::SimError;
use crate::rng::CounterRng;

/// Id of the learning-controlled vehicle.
pub const EGO_ID: usize = 0;
/// Surrounding vehicles listed in the observation.
pub const OBSERVED_VEHICLES: usize = 5;
pub const FEATURES_PER_VEHICLE: usize = 5;
pub const OBSERVATION_DIM: usize = (OBSERVED_VEHICLES + 1) * FEATURES_PER_VEHICLE;

/// IDM gaps are floored here when two vehicles sharing a lane overlap
/// longitudinally without touching (e.g. mid lane change).
const MIN_FOLLOW_GAP: f64 = 0.01;

/// High-level ego command.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Action {
    LaneLeft = 0,
    Idle = 1,
    LaneRight = 2,
    Slower = 3,
    Faster = 4,
}

impl Action {
    pub const COUNT: usize = 5;
    pub const ALL: [Action; 5] = [Action::LaneLeft, Action::Idle, Action::LaneRight, Action::Slower, Action::Faster];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Action> {
        Self::ALL.get(i).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Action::LaneLeft => "LANE_LEFT",
            Action::Idle => "IDLE",
            Action::LaneRight => "LANE_RIGHT",
            Action::Slower => "SLOWER",
            Action::Faster => "FASTER",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInfo {
    pub collision: bool,
    /// Ego speed at the end of the step, m/s.
    pub ego_speed: f64,
    /// Ego longitudinal distance since spawn, m.
    pub distance: f64,
    pub ego_lane: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub observation: Vec<f64>,
    pub reward: f64,
    pub terminated: bool,
    pub info: StepInfo,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vehicle {
    pub id: usize,
    pub state: VehicleState,
}

/// Multi-lane ring-road freeway with one ego vehicle.
#[derive(Debug, Clone, PartialEq)]
pub struct World {
    config: SimConfig,
    vehicles: Vec<Vehicle>,
    steps: u32,
    collided: bool,
    terminated: bool,
    distance: f64,
}

impl World {
    /// Random scenario from `config.scenario.seed`.
    ///
    /// Vehicles occupy slots `spawn_pitch` apart from `-spawn_slots_behind`
    /// to `spawn_slots_ahead` around the ego in every lane, each shifted
    /// forward by up to `spawn_pitch - spawn_gap`, so same-lane spacing is at
    /// least `spawn_gap`.
    pub fn spawn(config: &SimConfig) -> Result<World, SimError> {
        config.validate()?;
        let mut rng = CounterRng::new(config.scenario.seed);
        let road = &config.road;
        let sc = &config.scenario;
        let slots_per_lane = sc.spawn_slots_behind + sc.spawn_slots_ahead + 1;
        // Slots must not wrap around onto each other on the ring.
        let fits = (slots_per_lane as f64) * sc.spawn_pitch <= road.lane_length;
        let total_slots = if fits { slots_per_lane * road.lane_count } else { 0 };
        if total_slots < sc.surrounding_count + 1 {
            return Err(SimError::SpawnCapacity { vehicles: sc.surrounding_count + 1, slots: total_slots });
        }

        let ego_lane = match sc.ego_lane {
            Some(l) => l,
            None => rng.below(road.lane_count),
        };
        let ego_speed = rng.uniform_range(sc.ego_speed_range[0], sc.ego_speed_range[1]);
        let mut vehicles = vec![Vehicle {
            id: EGO_ID,
            state: VehicleState::with_params(0.0, road.lane_center(ego_lane), ego_speed, ego_lane, &config.vehicle),
        }];

        let ego_slot = ego_lane * slots_per_lane + sc.spawn_slots_behind;
        let mut free: Vec<usize> = (0..total_slots).filter(|&s| s != ego_slot).collect();
        let jitter = sc.spawn_pitch - sc.spawn_gap;
        for id in 1..=sc.surrounding_count {
            let pick = id - 1 + rng.below(free.len() - (id - 1));
            free.swap(id - 1, pick);
            let slot = free[id - 1];
            let lane = slot / slots_per_lane;
            let offset = (slot % slots_per_lane) as f64 - sc.spawn_slots_behind as f64;
            let x = (offset * sc.spawn_pitch + rng.uniform_range(0.0, jitter)).rem_euclid(road.lane_length);
            let speed = rng.uniform_range(sc.other_speed_range[0], sc.other_speed_range[1]);
            vehicles.push(Vehicle {
                id,
                state: VehicleState::with_params(x, road.lane_center(lane), speed, lane, &config.vehicle),
            });
        }
        Ok(World { config: config.clone(), vehicles, steps: 0, collided: false, terminated: false, distance: 0.0 })
    }

    /// World from explicit vehicles; exactly one must carry [`EGO_ID`].
    pub fn from_vehicles(config: &SimConfig, vehicles: Vec<Vehicle>) -> Result<World, SimError> {
        config.validate()?;
        if vehicles.iter().filter(|v| v.id == EGO_ID).count() != 1 {
            return Err(SimError::Config("exactly one ego vehicle required".into()));
        }
        let mut ids: Vec<usize> = vehicles.iter().map(|v| v.id).collect();
        ids.sort_unstable();
        ids.dedup();
        if ids.len() != vehicles.len() {
            return Err(SimError::Config("duplicate vehicle id".into()));
        }
        if let Some(v) = vehicles.iter().find(|v| v.state.target_lane >= config.road.lane_count) {
            return Err(SimError::InvalidLane { lane: v.state.target_lane, lane_count: config.road.lane_count });
        }
        Ok(World { config: config.clone(), vehicles, steps: 0, collided: false, terminated: false, distance: 0.0 })
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn vehicles(&self) -> &[Vehicle] {
        &self.vehicles
    }

    pub fn ego(&self) -> &VehicleState {
        &self.vehicles[self.ego_index()].state
    }

    fn ego_index(&self) -> usize {
        self.vehicles.iter().position(|v| v.id == EGO_ID).expect("ego present")
    }

    pub fn steps(&self) -> u32 {
        self.steps
    }

    pub fn is_terminated(&self) -> bool {
        self.terminated
    }

    pub fn collided(&self) -> bool {
        self.collided
    }

    pub fn distance(&self) -> f64 {
        self.distance
    }

    pub fn ego_lane(&self) -> usize {
        self.config.road.lane_of(self.ego().y)
    }

    /// Whether `state` occupies (by position) or is heading into `lane`.
    fn in_lane(&self, state: &VehicleState, lane: usize) -> bool {
        state.target_lane == lane || self.config.road.lane_of(state.y) == lane
    }

    /// Nearest vehicles ahead and behind `i` among those in `lane`, with
    /// bumper gaps.
    fn lane_neighbors(&self, i: usize, lane: usize) -> (Option<Neighbor>, Option<Neighbor>) {
        let me = &self.vehicles[i].state;
        let mut ahead: Option<(f64, Neighbor)> = None;
        let mut behind: Option<(f64, Neighbor)> = None;
        for (j, other) in self.vehicles.iter().enumerate() {
            if j == i || !self.in_lane(&other.state, lane) {
                continue;
            }
            let dx = self.config.road.wrapped_dx(me.x, other.state.x);
            let gap = dx.abs() - 0.5 * (me.length + other.state.length);
            let n = Neighbor { state: other.state, gap };
            if dx > 0.0 && ahead.map_or(true, |(d, _)| dx < d) {
                ahead = Some((dx, n));
            } else if dx < 0.0 && behind.map_or(true, |(d, _)| -dx < d) {
                behind = Some((-dx, n));
            }
        }
        (ahead.map(|(_, n)| n), behind.map(|(_, n)| n))
    }

    /// Closest leader in either the lane the vehicle is in or the one it is
    /// heading for.
    fn leader(&self, i: usize) -> Option<Neighbor> {
        let me = &self.vehicles[i].state;
        let lanes = [me.target_lane, self.config.road.lane_of(me.y)];
        lanes
            .iter()
            .filter_map(|&l| self.lane_neighbors(i, l).0)
            .min_by(|a, b| a.gap.total_cmp(&b.gap))
    }

    fn idm_command(&self, i: usize) -> f64 {
        let me = &self.vehicles[i].state;
        let (dv, gap) = match self.leader(i) {
            Some(l) => (me.speed - l.state.speed, l.gap.max(MIN_FOLLOW_GAP)),
            None => (0.0, NO_LEADER_GAP),
        };
        idm_acceleration(me.speed, dv, gap, me.target_speed, &self.config.idm).expect("gap floored above zero")
    }

    fn apply_ego_action(&mut self, action: Action) {
        let step = self.config.scenario.speed_step;
        let max_speed = self.config.vehicle.max_speed;
        let last_lane = self.config.road.lane_count - 1;
        let i = self.ego_index();
        let ego = &mut self.vehicles[i].state;
        match action {
            Action::LaneLeft => ego.target_lane = ego.target_lane.saturating_sub(1),
            Action::LaneRight => ego.target_lane = (ego.target_lane + 1).min(last_lane),
            Action::Faster => ego.target_speed = (ego.target_speed + step).clamp(0.0, max_speed),
            Action::Slower => ego.target_speed = (ego.target_speed - step).clamp(0.0, max_speed),
            Action::Idle => {}
        }
    }

    /// One lane-change decision per surrounding vehicle, in ascending id.
    fn surrounding_lane_changes(&mut self) -> Result<(), SimError> {
        let mut order: Vec<usize> = (0..self.vehicles.len()).filter(|&i| self.vehicles[i].id != EGO_ID).collect();
        order.sort_by_key(|&i| self.vehicles[i].id);
        let road = self.config.road;
        for i in order {
            let me = self.vehicles[i].state;
            let settled = road.lane_of(me.y) == me.target_lane
                && (me.y - road.lane_center(me.target_lane)).abs() < 0.25 * road.lane_width;
            if !settled {
                continue;
            }
            let (current_leader, current_follower) = self.lane_neighbors(i, me.target_lane);
            let candidates = [me.target_lane.checked_sub(1), Some(me.target_lane + 1)];
            for lane in candidates.into_iter().flatten().filter(|&l| l < road.lane_count) {
                let (target_leader, target_follower) = self.lane_neighbors(i, lane);
                let nb = LaneNeighbors { current_leader, current_follower, target_leader, target_follower };
                if mobil_decision(&me, lane, road.lane_count, &nb, &self.config.idm, &self.config.mobil)? {
                    self.vehicles[i].state.target_lane = lane;
                    break;
                }
            }
        }
        Ok(())
    }

    /// Any pair of vehicles with overlapping footprints.
    pub fn check_collision(&self) -> bool {
        let road = &self.config.road;
        for (i, a) in self.vehicles.iter().enumerate() {
            for b in &self.vehicles[i + 1..] {
                if rectangles_overlap(&a.state, &b.state, road.wrapped_dx(a.state.x, b.state.x)) {
                    return true;
                }
            }
        }
        false
    }

    fn physics_substep(&mut self, dt: f64) {
        let road = self.config.road;
        let commands: Vec<(f64, f64)> = (0..self.vehicles.len())
            .map(|i| {
                let v = &self.vehicles[i].state;
                let accel = if self.vehicles[i].id == EGO_ID {
                    longitudinal_control(v.target_speed, v.speed, &self.config.gains)
                } else {
                    self.idm_command(i)
                };
                let steer = steering_control(v, road.lane_center(v.target_lane), 0.0, &self.config.gains);
                (accel, steer)
            })
            .collect();
        for (vehicle, (accel, steer)) in self.vehicles.iter_mut().zip(commands) {
            let next = bicycle_step(&vehicle.state, accel, steer, dt, &self.config.vehicle);
            if vehicle.id == EGO_ID {
                self.distance += next.x - vehicle.state.x;
            }
            vehicle.state = next;
            if vehicle.state.x >= road.lane_length || vehicle.state.x < 0.0 {
                vehicle.state.x = vehicle.state.x.rem_euclid(road.lane_length);
            }
        }
    }

    /// Advances one policy step: ego command, surrounding lane choices, then
    /// `sim_hz / policy_hz` physics sub-steps, stopping at the first collision.
    pub fn step(&mut self, action: Action) -> Result<StepResult, SimError> {
        if self.terminated {
            return Err(SimError::EpisodeFinished);
        }
        self.apply_ego_action(action);
        self.surrounding_lane_changes()?;
        let dt = 1.0 / self.config.scenario.sim_hz as f64;
        for _ in 0..self.config.scenario.substeps() {
            self.physics_substep(dt);
            if self.check_collision() {
                self.collided = true;
                break;
            }
        }
        self.steps += 1;
        self.terminated = self.collided || self.steps >= self.config.scenario.max_steps();
        let reward = self.reward(self.collided);
        Ok(StepResult {
            observation: self.observe(),
            reward,
            terminated: self.terminated,
            info: StepInfo {
                collision: self.collided,
                ego_speed: self.ego().speed,
                distance: self.distance,
                ego_lane: self.ego_lane(),
            },
        })
    }

    /// Zero on collision; otherwise a weighted mix of a speed term, linear
    /// between the reward speed floor and ceiling, and a rightmost-lane term.
    pub fn reward(&self, collided: bool) -> f64 {
        if collided {
            return 0.0;
        }
        let w = &self.config.reward;
        let ego = self.ego();
        let speed_term = ((ego.speed - w.speed_floor) / (w.speed_ceiling - w.speed_floor)).clamp(0.0, 1.0);
        let lane_term = self.ego_lane() as f64 / (self.config.road.lane_count - 1) as f64;
        (w.speed_weight * speed_term + w.lane_weight * lane_term).clamp(0.0, 1.0)
    }

    /// Ego row `[1, x/1000, y/road_width, v/40, heading]` followed by the five
    /// nearest surrounding vehicles (by |dx|, then dx, then id) as
    /// `[1, dx/100, dy/road_width, dv/40, dheading]`, zero-padded. Everything
    /// except the ego x term is clipped to `[-1, 1]`.
    pub fn observe(&self) -> Vec<f64> {
        let road = &self.config.road;
        let road_width = road.lane_count as f64 * road.lane_width;
        let ego = self.ego();
        let clip = |v: f64| v.clamp(-1.0, 1.0);
        let mut obs = Vec::with_capacity(OBSERVATION_DIM);
        obs.extend([1.0, ego.x / 1000.0, clip(ego.y / road_width), clip(ego.speed / 40.0), clip(ego.heading)]);

        let mut others: Vec<(f64, usize, &VehicleState)> = self
            .vehicles
            .iter()
            .filter(|v| v.id != EGO_ID)
            .map(|v| (road.wrapped_dx(ego.x, v.state.x), v.id, &v.state))
            .collect();
        others.sort_by(|a, b| a.0.abs().total_cmp(&b.0.abs()).then(a.0.total_cmp(&b.0)).then(a.1.cmp(&b.1)));
        for (dx, _, s) in others.iter().take(OBSERVED_VEHICLES) {
            obs.extend([
                1.0,
                clip(dx / 100.0),
                clip((s.y - ego.y) / road_width),
                clip((s.speed - ego.speed) / 40.0),
                clip(s.heading - ego.heading),
            ]);
        }
        obs.resize(OBSERVATION_DIM, 0.0);
        obs
    }
}
