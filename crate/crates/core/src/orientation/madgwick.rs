//! Gradient-descent MARG orientation filter.
//!
//! The estimate `q` rotates body vectors into an earth frame whose z axis is
//! up and whose x axis points along the horizontal component of the magnetic
//! field. Each step integrates the gyro rate, then subtracts `beta` times the
//! normalized gradient of the accelerometer/magnetometer alignment error,
//! evaluated at the propagated estimate so that state and measurement refer
//! to the same instant.

use super::{ImuSample, OrientationError, Quaternion};

/// Below this gradient magnitude the correction is scaled linearly instead of
/// normalized, so the step never overshoots the minimum (|grad| ~ 2x the
/// tilt error in radians, i.e. roughly 0.3 degrees).
const GRADIENT_FLOOR: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FilterConfig {
    pub beta: f64,
    pub sample_rate_hz: f64,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            beta: 0.1,
            sample_rate_hz: 100.0,
        }
    }
}

impl FilterConfig {
    pub fn validate(&self) -> Result<(), OrientationError> {
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(OrientationError::InvalidConfig("beta must be >= 0"));
        }
        if !(self.sample_rate_hz > 0.0 && self.sample_rate_hz.is_finite()) {
            return Err(OrientationError::InvalidConfig("sample rate must be > 0"));
        }
        Ok(())
    }

    pub fn sample_period(&self) -> f64 {
        1.0 / self.sample_rate_hz
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UpdateOutcome {
    pub orientation: Quaternion,
    /// The gradient correction was skipped because accel or mag had no
    /// usable direction.
    pub degraded: bool,
}

/// One filter step of length `dt` seconds.
pub fn madgwick_update(
    state: Quaternion,
    sample: &ImuSample,
    cfg: &FilterConfig,
    dt: f64,
) -> Result<UpdateOutcome, OrientationError> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(OrientationError::NonPositiveStep(dt));
    }
    let prev = state.normalized();
    let [gx, gy, gz] = sample.gyro;
    // 0.5 * q ⊗ (0, ω)
    let rate = (prev * Quaternion::new(0.0, gx, gy, gz)).scale(0.5);
    let q = euler_step(&prev, &rate, dt);
    let mut q_dot = Quaternion::new(0.0, 0.0, 0.0, 0.0);

    let accel = unit(sample.accel);
    let mag = match sample.mag {
        Some(m) => match unit(m) {
            Some(u) => MagInput::Present(u),
            None => MagInput::Unusable,
        },
        None => MagInput::Absent,
    };

    let degraded = match (accel, mag) {
        (None, _) | (_, MagInput::Unusable) => true,
        (Some(a), MagInput::Present(m)) => {
            apply_correction(&mut q_dot, marg_gradient(&q, a, m), cfg.beta);
            false
        }
        (Some(a), MagInput::Absent) => {
            apply_correction(&mut q_dot, imu_gradient(&q, a), cfg.beta);
            false
        }
    };

    let next = euler_step(&q, &q_dot, dt);
    Ok(UpdateOutcome {
        orientation: next,
        degraded,
    })
}

fn euler_step(q: &Quaternion, q_dot: &Quaternion, dt: f64) -> Quaternion {
    Quaternion::new(
        q.w + q_dot.w * dt,
        q.x + q_dot.x * dt,
        q.y + q_dot.y * dt,
        q.z + q_dot.z * dt,
    )
    .normalized()
}

enum MagInput {
    Present([f64; 3]),
    Absent,
    Unusable,
}

fn unit(v: [f64; 3]) -> Option<[f64; 3]> {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if n > 0.0 && n.is_finite() {
        Some([v[0] / n, v[1] / n, v[2] / n])
    } else {
        None
    }
}

fn apply_correction(q_dot: &mut Quaternion, grad: [f64; 4], beta: f64) {
    let norm = (grad[0] * grad[0] + grad[1] * grad[1] + grad[2] * grad[2] + grad[3] * grad[3]).sqrt();
    if !norm.is_finite() || norm == 0.0 {
        return;
    }
    let k = beta / norm.max(GRADIENT_FLOOR);
    q_dot.w -= k * grad[0];
    q_dot.x -= k * grad[1];
    q_dot.y -= k * grad[2];
    q_dot.z -= k * grad[3];
}

/// Rows of the body-to-earth rotation matrix with their partial derivatives
/// with respect to (w, x, y, z).
struct Row {
    value: [f64; 3],
    partials: [[f64; 4]; 3],
}

fn first_row(q: &Quaternion) -> Row {
    let Quaternion { w, x, y, z } = *q;
    Row {
        value: [
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - w * z),
            2.0 * (x * z + w * y),
        ],
        partials: [
            [0.0, 0.0, -4.0 * y, -4.0 * z],
            [-2.0 * z, 2.0 * y, 2.0 * x, -2.0 * w],
            [2.0 * y, 2.0 * z, 2.0 * w, 2.0 * x],
        ],
    }
}

fn third_row(q: &Quaternion) -> Row {
    let Quaternion { w, x, y, z } = *q;
    Row {
        value: [
            2.0 * (x * z - w * y),
            2.0 * (y * z + w * x),
            1.0 - 2.0 * (x * x + y * y),
        ],
        partials: [
            [-2.0 * y, 2.0 * z, -2.0 * w, 2.0 * x],
            [2.0 * x, 2.0 * w, 2.0 * z, 2.0 * y],
            [0.0, -4.0 * x, -4.0 * y, 0.0],
        ],
    }
}

/// Accumulate `J^T f` for the residual `f = weight * row - measured` into `grad`.
fn accumulate(grad: &mut [f64; 4], terms: &[(&Row, f64)], measured: [f64; 3]) {
    for i in 0..3 {
        let predicted: f64 = terms.iter().map(|(row, wgt)| wgt * row.value[i]).sum();
        let residual = predicted - measured[i];
        for (k, g) in grad.iter_mut().enumerate() {
            let d: f64 = terms.iter().map(|(row, wgt)| wgt * row.partials[i][k]).sum();
            *g += d * residual;
        }
    }
}

fn imu_gradient(q: &Quaternion, accel: [f64; 3]) -> [f64; 4] {
    let mut grad = [0.0; 4];
    let up = third_row(q);
    accumulate(&mut grad, &[(&up, 1.0)], accel);
    grad
}

fn marg_gradient(q: &Quaternion, accel: [f64; 3], mag: [f64; 3]) -> [f64; 4] {
    let mut grad = imu_gradient(q, accel);
    // Earth-frame reference field: measured field rotated into the earth frame
    // with its horizontal part collapsed onto x.
    let h = q.rotate(mag);
    let bx = (h[0] * h[0] + h[1] * h[1]).sqrt();
    let bz = h[2];
    let north = first_row(q);
    let up = third_row(q);
    accumulate(&mut grad, &[(&north, bx), (&up, bz)], mag);
    grad
}
