use super::config::{HeadingRateBase, VehicleParams};

/// Pose, speed, geometry and controller setpoints of one vehicle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VehicleState {
    /// Longitudinal position of the center of gravity, m.
    pub x: f64,
    /// Lateral position of the center of gravity, m (grows toward the right).
    pub y: f64,
    pub speed: f64,
    pub heading: f64,
    pub target_lane: usize,
    /// Speed setpoint, m/s.
    pub target_speed: f64,
    pub length: f64,
    pub width: f64,
    pub l_r: f64,
    pub l_f: f64,
}

impl VehicleState {
    /// Vehicle with default geometry, heading 0 and setpoint equal to `speed`.
    pub fn new(x: f64, y: f64, speed: f64, target_lane: usize) -> Self {
        Self::with_params(x, y, speed, target_lane, &VehicleParams::default())
    }

    pub fn with_params(x: f64, y: f64, speed: f64, target_lane: usize, p: &VehicleParams) -> Self {
        Self {
            x,
            y,
            speed,
            heading: 0.0,
            target_lane,
            target_speed: speed,
            length: p.length,
            width: p.width,
            l_r: p.l_r,
            l_f: p.l_f,
        }
    }
}

/// Slip angle at the center of gravity, `atan(l_r tan(delta) / (l_r + l_f))`.
pub fn slip_angle(steer: f64, l_r: f64, l_f: f64) -> f64 {
    (l_r * steer.tan() / (l_r + l_f)).atan()
}

/// One forward-Euler step of the kinematic bicycle model. Speed is clamped to
/// `[0, max_speed]`; positions use the speed at the start of the step.
pub fn bicycle_step(s: &VehicleState, accel: f64, steer: f64, dt: f64, params: &VehicleParams) -> VehicleState {
    let beta = slip_angle(steer, s.l_r, s.l_f);
    let base = match params.heading_rate_base {
        HeadingRateBase::Wheelbase => s.l_r + s.l_f,
        HeadingRateBase::RearDistance => s.l_r,
    };
    let course = s.heading + beta;
    let mut next = *s;
    next.x = s.x + s.speed * course.cos() * dt;
    next.y = s.y + s.speed * course.sin() * dt;
    next.heading = s.heading + s.speed * beta.sin() / base * dt;
    next.speed = (s.speed + accel * dt).clamp(0.0, params.max_speed);
    next
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slip_angle_hand_value() {
        let beta = slip_angle(0.1, 2.5, 2.5);
        assert!((beta - (0.5 * 0.1f64.tan()).atan()).abs() < 1e-15);
        assert!((beta - 0.050125).abs() < 1e-6, "{beta}");
    }

    #[test]
    fn straight_line_step() {
        let p = VehicleParams::default();
        let s = VehicleState::new(10.0, 6.0, 20.0, 1);
        let n = bicycle_step(&s, 0.0, 0.0, 1.0 / 15.0, &p);
        assert_eq!(n.heading, s.heading);
        assert_eq!(n.y, s.y);
        assert_eq!(n.x, s.x + 20.0 * (1.0 / 15.0));
        assert_eq!(n.speed, 20.0);
    }

    #[test]
    fn euler_speed_update() {
        let p = VehicleParams::default();
        let s = VehicleState::new(0.0, 2.0, 20.0, 0);
        let n = bicycle_step(&s, 2.0, 0.0, 1.0 / 15.0, &p);
        assert!((n.speed - (20.0 + 2.0 / 15.0)).abs() < 1e-12);
        assert!((n.speed - 20.1333).abs() < 1e-4);
    }

    #[test]
    fn speed_clamped_to_bounds() {
        let p = VehicleParams::default();
        let fast = VehicleState::new(0.0, 2.0, 39.9, 0);
        assert_eq!(bicycle_step(&fast, 6.0, 0.0, 0.1, &p).speed, 40.0);
        let slow = VehicleState::new(0.0, 2.0, 0.2, 0);
        assert_eq!(bicycle_step(&slow, -10.0, 0.0, 0.1, &p).speed, 0.0);
    }

    #[test]
    fn heading_rate_base_options() {
        let s = VehicleState::new(0.0, 2.0, 20.0, 0);
        let wheelbase = bicycle_step(&s, 0.0, 0.1, 0.1, &VehicleParams::default());
        let rear = VehicleParams { heading_rate_base: HeadingRateBase::RearDistance, ..Default::default() };
        let rear = bicycle_step(&s, 0.0, 0.1, 0.1, &rear);
        assert!((rear.heading - 2.0 * wheelbase.heading).abs() < 1e-15);
    }
}
