use super::config::IdmParams;
use super::SimError;

/// Gap used when a vehicle has nobody ahead, m.
pub const NO_LEADER_GAP: f64 = 1e9;
/// Braking floor applied to every commanded acceleration, m/s^2.
pub const MAX_BRAKING: f64 = -10.0;

/// Desired gap `d0 + T v + v dv / (2 sqrt(a_max b))`.
pub fn desired_gap(v: f64, dv: f64, p: &IdmParams) -> f64 {
    p.d0 + p.time_gap * v + v * dv / (2.0 * (p.a_max * p.b_comf).sqrt())
}

/// Unclamped IDM acceleration. `dv = v - v_leader`, `gap` is bumper to bumper.
pub fn idm_raw(v: f64, dv: f64, gap: f64, v_ex: f64, p: &IdmParams) -> f64 {
    let free = if v_ex > 0.0 { (v / v_ex).powf(p.delta) } else { f64::INFINITY };
    let interaction = (desired_gap(v, dv, p) / gap).powi(2);
    p.a_max * (1.0 - free - interaction)
}

/// IDM acceleration clamped to `[-10, a_max]`.
pub fn idm_acceleration(v: f64, dv: f64, gap: f64, v_ex: f64, p: &IdmParams) -> Result<f64, SimError> {
    if !(gap > 0.0) {
        return Err(SimError::AlreadyColliding { gap });
    }
    Ok(idm_raw(v, dv, gap, v_ex, p).clamp(MAX_BRAKING, p.a_max))
}
