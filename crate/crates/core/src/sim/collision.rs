use super::kinematics::VehicleState;

/// Strict interior overlap of two oriented rectangles by separating axes.
/// `dx` is the longitudinal offset from `a` to `b` (already wrapped on a ring
/// road); touching edges do not count.
pub fn rectangles_overlap(a: &VehicleState, b: &VehicleState, dx: f64) -> bool {
    let dy = b.y - a.y;
    let reach = 0.5 * (a.length.hypot(a.width) + b.length.hypot(b.width));
    if dx.abs() >= reach || dy.abs() >= reach {
        return false;
    }
    let axes = |h: f64| [(h.cos(), h.sin()), (-h.sin(), h.cos())];
    let half_extent = |v: &VehicleState, (ux, uy): (f64, f64)| {
        let (c, s) = (v.heading.cos(), v.heading.sin());
        let along = 0.5 * v.length * (c * ux + s * uy).abs();
        let across = 0.5 * v.width * (-s * ux + c * uy).abs();
        along + across
    };
    for axis in axes(a.heading).into_iter().chain(axes(b.heading)) {
        let distance = (dx * axis.0 + dy * axis.1).abs();
        if distance >= half_extent(a, axis) + half_extent(b, axis) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(gap: f64) -> (VehicleState, VehicleState) {
        (VehicleState::new(0.0, 2.0, 20.0, 0), VehicleState::new(gap, 2.0, 20.0, 0))
    }

    #[test]
    fn same_lane_cases() {
        let (a, b) = pair(4.0);
        assert!(rectangles_overlap(&a, &b, 4.0));
        let (a, b) = pair(6.0);
        assert!(!rectangles_overlap(&a, &b, 6.0));
        let (a, b) = pair(5.0);
        assert!(!rectangles_overlap(&a, &b, 5.0));
    }

    #[test]
    fn adjacent_lanes_side_by_side_do_not_collide() {
        let a = VehicleState::new(0.0, 2.0, 20.0, 0);
        let b = VehicleState::new(0.0, 6.0, 20.0, 1);
        assert!(!rectangles_overlap(&a, &b, 0.0));
    }

    #[test]
    fn rotated_box_reaches_neighbor() {
        let a = VehicleState::new(0.0, 2.0, 20.0, 0);
        let mut b = VehicleState::new(0.0, 4.5, 20.0, 0);
        assert!(!rectangles_overlap(&a, &b, 0.0));
        b.heading = 0.5;
        assert!(rectangles_overlap(&a, &b, 0.0));
    }

    #[test]
    fn symmetric() {
        let mut a = VehicleState::new(0.0, 2.0, 20.0, 0);
        a.heading = 0.3;
        let mut b = VehicleState::new(3.0, 4.0, 20.0, 0);
        b.heading = -0.2;
        assert_eq!(rectangles_overlap(&a, &b, 3.0), rectangles_overlap(&b, &a, -3.0));
    }
}
