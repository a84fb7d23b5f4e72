use std::f64::consts::FRAC_PI_4;

use super::config::ControlGains;
use super::idm::MAX_BRAKING;
use super::kinematics::VehicleState;

/// Upper limit on commanded acceleration, m/s^2.
pub const MAX_ACCEL: f64 = 6.0;
/// Steering magnitude limit, rad.
pub const MAX_STEER: f64 = FRAC_PI_4;
/// Below this speed the steering command is zero, m/s.
pub const STEER_MIN_SPEED: f64 = 0.5;

/// Proportional speed tracking, clamped to `[-10, 6]`.
pub fn longitudinal_control(target_speed: f64, speed: f64, gains: &ControlGains) -> f64 {
    (gains.k_p * (target_speed - speed)).clamp(MAX_BRAKING, MAX_ACCEL)
}

/// Lateral position loop feeding a heading loop, inverted through the
/// bicycle model to a front-wheel angle.
pub fn steering_control(v: &VehicleState, target_y: f64, lane_heading: f64, gains: &ControlGains) -> f64 {
    if v.speed < STEER_MIN_SPEED {
        return 0.0;
    }
    let lateral_offset = v.y - target_y;
    let lateral_speed = -gains.k_p_lat * lateral_offset;
    let heading_ref = (lateral_speed / v.speed).clamp(-1.0, 1.0).asin() + lane_heading;
    let heading_rate = gains.k_p_theta * (heading_ref - v.heading);
    let steer = (0.5 * v.l_r / v.speed * heading_rate).clamp(-1.0, 1.0).asin();
    steer.clamp(-MAX_STEER, MAX_STEER)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn speed_loop_cases() {
        let g = ControlGains::default();
        assert_eq!(longitudinal_control(25.0, 25.0, &g), 0.0);
        assert!((longitudinal_control(23.0, 20.0, &g) - 5.0).abs() < 1e-12);
        assert_eq!(longitudinal_control(120.0, 20.0, &g), 6.0);
        assert_eq!(longitudinal_control(0.0, 40.0, &g), -10.0);
    }

    #[test]
    fn centered_vehicle_does_not_steer() {
        let v = VehicleState::new(0.0, 6.0, 20.0, 1);
        assert_eq!(steering_control(&v, 6.0, 0.0, &ControlGains::default()), 0.0);
    }

    #[test]
    fn steers_back_toward_centerline() {
        let v = VehicleState::new(0.0, 8.0, 20.0, 1);
        assert!(steering_control(&v, 6.0, 0.0, &ControlGains::default()) < 0.0);
        let v = VehicleState::new(0.0, 4.0, 20.0, 1);
        assert!(steering_control(&v, 6.0, 0.0, &ControlGains::default()) > 0.0);
    }

    #[test]
    fn matches_scripted_chain() {
        // v=20, d_lat=2, heading 0, K_lat=1/3, K_theta=5, l_r=2.5. Frozen from
        // an independent evaluation of the controller chain in Python.
        let v = VehicleState::new(0.0, 8.0, 20.0, 1);
        let steer = steering_control(&v, 6.0, 0.0, &ControlGains::default());
        assert!((steer - (-0.010418785138203534)).abs() < 1e-12, "{steer:.18}");
    }

    #[test]
    fn slow_vehicle_does_not_steer() {
        let v = VehicleState::new(0.0, 9.0, 0.4, 1);
        assert_eq!(steering_control(&v, 6.0, 0.0, &ControlGains::default()), 0.0);
    }

    #[test]
    fn large_heading_error_saturates() {
        let mut v = VehicleState::new(0.0, 6.0, 1.0, 1);
        v.heading = 1.5;
        assert_eq!(steering_control(&v, 6.0, 0.0, &ControlGains::default()), -MAX_STEER);
    }
}
