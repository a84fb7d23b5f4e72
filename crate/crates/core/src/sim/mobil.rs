use super::config::{IdmParams, MobilParams};
use super::idm::{idm_acceleration, NO_LEADER_GAP};
use super::kinematics::VehicleState;
use super::SimError;

/// A nearby vehicle and its bumper gap to the deciding vehicle.
#[derive(Debug, Clone, Copy)]
pub struct Neighbor {
    pub state: VehicleState,
    pub gap: f64,
}

/// Leaders and followers around a vehicle in its current and candidate lanes.
#[derive(Debug, Clone, Copy, Default)]
pub struct LaneNeighbors {
    pub current_leader: Option<Neighbor>,
    pub current_follower: Option<Neighbor>,
    pub target_leader: Option<Neighbor>,
    pub target_follower: Option<Neighbor>,
}

/// The six accelerations the lane-change rule compares. Absent followers
/// contribute zero before and after.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MobilAccelerations {
    pub ego_before: f64,
    pub ego_after: f64,
    pub new_follower_before: f64,
    pub new_follower_after: f64,
    pub old_follower_before: f64,
    pub old_follower_after: f64,
}

/// Safety: the new follower brakes no harder than `b_safe`. Incentive: own
/// gain plus politeness-weighted follower gains reaches `a_th`.
pub fn mobil_criterion(acc: &MobilAccelerations, p: &MobilParams) -> bool {
    let safe = acc.new_follower_after >= -p.b_safe;
    let incentive = acc.ego_after - acc.ego_before
        + p.politeness
            * ((acc.new_follower_after - acc.new_follower_before) + (acc.old_follower_after - acc.old_follower_before));
    safe && incentive >= p.a_th
}

fn follow(v: &VehicleState, leader: Option<(&VehicleState, f64)>, idm: &IdmParams) -> Result<f64, SimError> {
    match leader {
        Some((l, gap)) => idm_acceleration(v.speed, v.speed - l.speed, gap, v.target_speed, idm),
        None => idm_acceleration(v.speed, 0.0, NO_LEADER_GAP, v.target_speed, idm),
    }
}

/// Accelerations before and after `vehicle` moves into the candidate lane.
pub fn mobil_accelerations(
    vehicle: &VehicleState,
    nb: &LaneNeighbors,
    idm: &IdmParams,
) -> Result<MobilAccelerations, SimError> {
    let len = vehicle.length;
    let mut acc = MobilAccelerations {
        ego_before: follow(vehicle, nb.current_leader.as_ref().map(|l| (&l.state, l.gap)), idm)?,
        ego_after: follow(vehicle, nb.target_leader.as_ref().map(|l| (&l.state, l.gap)), idm)?,
        ..Default::default()
    };
    if let Some(n) = &nb.target_follower {
        let leader_before = nb.target_leader.as_ref().map(|l| (&l.state, n.gap + len + l.gap));
        acc.new_follower_before = follow(&n.state, leader_before, idm)?;
        acc.new_follower_after = follow(&n.state, Some((vehicle, n.gap)), idm)?;
    }
    if let Some(o) = &nb.current_follower {
        acc.old_follower_before = follow(&o.state, Some((vehicle, o.gap)), idm)?;
        let leader_after = nb.current_leader.as_ref().map(|l| (&l.state, o.gap + len + l.gap));
        acc.old_follower_after = follow(&o.state, leader_after, idm)?;
    }
    Ok(acc)
}

/// Whether `vehicle` should move to `candidate_lane`.
pub fn mobil_decision(
    vehicle: &VehicleState,
    candidate_lane: usize,
    lane_count: usize,
    nb: &LaneNeighbors,
    idm: &IdmParams,
    mobil: &MobilParams,
) -> Result<bool, SimError> {
    if candidate_lane >= lane_count {
        return Err(SimError::InvalidLane { lane: candidate_lane, lane_count });
    }
    // No room in the candidate lane at all.
    let blocked = [nb.target_leader, nb.target_follower].iter().flatten().any(|n| n.gap <= 0.0);
    if blocked || [nb.current_leader, nb.current_follower].iter().flatten().any(|n| n.gap <= 0.0) {
        return Ok(false);
    }
    Ok(mobil_criterion(&mobil_accelerations(vehicle, nb, idm)?, mobil))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn accels(ego_gain: f64, new_after: f64) -> MobilAccelerations {
        MobilAccelerations { ego_before: 0.0, ego_after: ego_gain, new_follower_after: new_after, ..Default::default() }
    }

    #[test]
    fn unsafe_follower_braking_vetoes() {
        let p = MobilParams::default();
        assert!(!mobil_criterion(&accels(100.0, -3.0), &p));
    }

    #[test]
    fn hand_evaluated_incentive() {
        assert!(mobil_criterion(&accels(1.0, 0.0), &MobilParams::default()));
        assert!(!mobil_criterion(&accels(0.1, 0.0), &MobilParams::default()));
    }

    #[test]
    fn zero_politeness_reduces_to_own_gain() {
        let p = MobilParams { politeness: 0.0, ..Default::default() };
        let mut acc = accels(0.2, -1.0);
        acc.old_follower_after = -1.5;
        assert!(mobil_criterion(&acc, &p));
        acc.ego_after = 0.1999;
        assert!(!mobil_criterion(&acc, &p));
    }

    #[test]
    fn off_road_candidate_rejected() {
        let v = VehicleState::new(0.0, 2.0, 20.0, 0);
        let r = mobil_decision(&v, 3, 3, &LaneNeighbors::default(), &IdmParams::default(), &MobilParams::default());
        assert!(matches!(r, Err(SimError::InvalidLane { .. })));
    }

    #[test]
    fn free_lane_ahead_attracts_blocked_vehicle() {
        let idm = IdmParams::default();
        let mut v = VehicleState::new(0.0, 2.0, 22.0, 0);
        v.target_speed = 30.0;
        let slow = VehicleState::new(20.0, 2.0, 15.0, 0);
        let nb = LaneNeighbors {
            current_leader: Some(Neighbor { state: slow, gap: 15.0 }),
            ..Default::default()
        };
        assert!(mobil_decision(&v, 1, 3, &nb, &idm, &MobilParams::default()).unwrap());
        // A close, fast follower in the target lane makes it unsafe.
        let mut tail = VehicleState::new(-8.0, 6.0, 35.0, 1);
        tail.target_speed = 35.0;
        let nb_unsafe = LaneNeighbors { target_follower: Some(Neighbor { state: tail, gap: 3.0 }), ..nb };
        assert!(!mobil_decision(&v, 1, 3, &nb_unsafe, &idm, &MobilParams::default()).unwrap());
    }
}
