//! Head orientation: quaternion sensor fusion, calibration reference capture
//! and yaw/pitch extraction relative to that reference.

mod calibration;
mod madgwick;
mod quaternion;

pub use calibration::{capture_reference, CalibrationReference, MAX_CALIBRATION_SPREAD_DEG, MIN_CALIBRATION_WINDOW_S};
pub use madgwick::{madgwick_update, FilterConfig, UpdateOutcome};
pub use quaternion::Quaternion;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum OrientationError {
    #[error("invalid filter config: {0}")]
    InvalidConfig(&'static str),
    #[error("filter step must be positive, got {0} s")]
    NonPositiveStep(f64),
    #[error("sample time {t} s does not follow previous sample at {prev} s")]
    NonMonotonicTime { prev: f64, t: f64 },
    #[error("calibration window of {0:.3} s is shorter than required")]
    WindowTooShort(f64),
    #[error("head moved {spread_deg:.2} deg during calibration")]
    CalibrationUnstable { spread_deg: f64 },
}

/// One 9-axis reading. Gyro in rad/s, accel in g, mag unit-normalized.
/// `mag` is `None` for 6-axis captures.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "ImuRecord", into = "ImuRecord")]
pub struct ImuSample {
    pub t: f64,
    pub gyro: [f64; 3],
    pub accel: [f64; 3],
    pub mag: Option<[f64; 3]>,
}

/// Flat JSON Lines layout of [`ImuSample`].
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
struct ImuRecord {
    t: f64,
    gx: f64,
    gy: f64,
    gz: f64,
    ax: f64,
    ay: f64,
    az: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mx: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    my: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mz: Option<f64>,
}

impl From<ImuRecord> for ImuSample {
    fn from(r: ImuRecord) -> Self {
        let mag = match (r.mx, r.my, r.mz) {
            (Some(x), Some(y), Some(z)) => Some([x, y, z]),
            _ => None,
        };
        ImuSample {
            t: r.t,
            gyro: [r.gx, r.gy, r.gz],
            accel: [r.ax, r.ay, r.az],
            mag,
        }
    }
}

impl From<ImuSample> for ImuRecord {
    fn from(s: ImuSample) -> Self {
        ImuRecord {
            t: s.t,
            gx: s.gyro[0],
            gy: s.gyro[1],
            gz: s.gyro[2],
            ax: s.accel[0],
            ay: s.accel[1],
            az: s.accel[2],
            mx: s.mag.map(|m| m[0]),
            my: s.mag.map(|m| m[1]),
            mz: s.mag.map(|m| m[2]),
        }
    }
}

/// Yaw and pitch in degrees relative to the calibration reference.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct HeadAngles {
    pub yaw: f64,
    pub pitch: f64,
}

impl HeadAngles {
    pub const fn new(yaw: f64, pitch: f64) -> Self {
        Self { yaw, pitch }
    }

    pub fn is_finite(&self) -> bool {
        self.yaw.is_finite() && self.pitch.is_finite()
    }

    /// Rotation with this yaw and pitch and zero roll.
    pub fn to_rotation(&self) -> Quaternion {
        Quaternion::rot_z(self.yaw.to_radians()) * Quaternion::rot_y(-self.pitch.to_radians())
    }
}

/// Result of [`quat_to_yaw_pitch`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AngleReading {
    pub angles: HeadAngles,
    /// Pitch is within half a degree of +-90, where yaw is poorly conditioned.
    pub gimbal_margin: bool,
}

const GIMBAL_MARGIN_DEG: f64 = 0.5;

/// Yaw/pitch of `ref⁻¹·q` decomposed as rotate-z (yaw) then rotate-y, with
/// pitch reported positive for a nose-up rotation (negative y angle).
pub fn quat_to_yaw_pitch(q: &Quaternion, reference: &CalibrationReference) -> AngleReading {
    let r = reference.q_ref.conjugate() * q.normalized();
    let Quaternion { w, x, y, z } = r;
    let mut yaw = (2.0 * (w * z + x * y)).atan2(1.0 - 2.0 * (y * y + z * z)).to_degrees();
    if yaw <= -180.0 {
        yaw += 360.0;
    }
    let sin_y = (2.0 * (w * y - z * x)).clamp(-1.0, 1.0);
    let pitch = -sin_y.asin().to_degrees();
    AngleReading {
        angles: HeadAngles { yaw, pitch },
        gimbal_margin: pitch.abs() >= 90.0 - GIMBAL_MARGIN_DEG,
    }
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn unit(v: [f64; 3]) -> Option<[f64; 3]> {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    (n > 1e-9 && n.is_finite()).then(|| [v[0] / n, v[1] / n, v[2] / n])
}

/// Orientation from a single static accel/mag pair: earth z along the
/// measured up vector, earth x along the horizontal part of the field.
/// Without a magnetometer yaw is taken as zero. `None` for degenerate input.
pub fn initial_orientation(accel: [f64; 3], mag: Option<[f64; 3]>) -> Option<Quaternion> {
    let up = unit(accel)?;
    let north_hint = match mag {
        Some(m) => m,
        // pick the body axis least aligned with up as a stand-in for north
        None if up[0].abs() < 0.9 => [1.0, 0.0, 0.0],
        None => [0.0, 1.0, 0.0],
    };
    let west = unit(cross(up, north_hint))?;
    let north = cross(west, up);
    Some(Quaternion::from_rotation_matrix([north, west, up]))
}

/// Sequential filter wrapper: tracks the timestamp of the last sample and
/// counts degraded steps.
#[derive(Clone, Debug)]
pub struct OrientationFilter {
    cfg: FilterConfig,
    q: Quaternion,
    last_t: Option<f64>,
    samples: u64,
    degraded_samples: u64,
    missing_mag: bool,
}

impl OrientationFilter {
    pub fn new(cfg: FilterConfig) -> Result<Self, OrientationError> {
        cfg.validate()?;
        Ok(Self {
            cfg,
            q: Quaternion::IDENTITY,
            last_t: None,
            samples: 0,
            degraded_samples: 0,
            missing_mag: false,
        })
    }

    pub fn with_orientation(mut self, q: Quaternion) -> Self {
        self.q = q.normalized();
        self
    }

    /// Feed the next sample. The first sample is integrated over one nominal
    /// sample period.
    pub fn update(&mut self, sample: &ImuSample) -> Result<Quaternion, OrientationError> {
        let dt = match self.last_t {
            None => self.cfg.sample_period(),
            Some(prev) if sample.t > prev => sample.t - prev,
            Some(prev) => return Err(OrientationError::NonMonotonicTime { prev, t: sample.t }),
        };
        let out = madgwick_update(self.q, sample, &self.cfg, dt)?;
        self.q = out.orientation;
        self.last_t = Some(sample.t);
        self.samples += 1;
        if out.degraded {
            self.degraded_samples += 1;
        }
        if sample.mag.is_none() {
            self.missing_mag = true;
        }
        Ok(self.q)
    }

    pub fn orientation(&self) -> Quaternion {
        self.q.canonical()
    }

    pub fn config(&self) -> &FilterConfig {
        &self.cfg
    }

    pub fn samples(&self) -> u64 {
        self.samples
    }

    pub fn degraded_samples(&self) -> u64 {
        self.degraded_samples
    }

    /// At least one sample lacked a magnetometer reading, so yaw came from
    /// gyro integration alone for that stretch.
    pub fn used_six_axis_fallback(&self) -> bool {
        self.missing_mag
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn reference(q: Quaternion) -> CalibrationReference {
        CalibrationReference {
            q_ref: q,
            captured_at: 0.0,
            window_len: 2.0,
        }
    }

    #[test]
    fn initial_orientation_inverts_the_sensor_model() {
        let field = [0.5, 0.0, -(3f64.sqrt()) / 2.0];
        for (yaw, pitch, roll) in [(0.0, 0.0, 0.0), (40.0, -20.0, 5.0), (-170.0, 60.0, -30.0), (95.0, 10.0, 0.0)] {
            let q = Quaternion::rot_z(f64::to_radians(yaw))
                * Quaternion::rot_y(f64::to_radians(pitch))
                * Quaternion::rot_x(f64::to_radians(roll));
            let a = q.rotate_inverse([0.0, 0.0, 1.0]);
            let m = q.rotate_inverse(field);
            let got = initial_orientation(a, Some(m)).unwrap();
            assert!(got.angle_to(&q) < 1e-9, "{yaw} {pitch} {roll}");
        }
        assert_eq!(initial_orientation([0.0; 3], None), None);
        let level = initial_orientation([0.0, 0.0, 1.0], None).unwrap();
        assert!(level.angle_to(&Quaternion::IDENTITY) < 1e-12);
    }

    #[test]
    fn same_orientation_reads_zero() {
        let r = Quaternion::rot_z(0.7) * Quaternion::rot_x(0.2);
        let out = quat_to_yaw_pitch(&r, &reference(r));
        assert_abs_diff_eq!(out.angles.yaw, 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(out.angles.pitch, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn quarter_turn_about_z_is_yaw_90() {
        let r = Quaternion::rot_y(0.3);
        let q = r * Quaternion::rot_z(90f64.to_radians());
        let out = quat_to_yaw_pitch(&q, &reference(r));
        assert_abs_diff_eq!(out.angles.yaw, 90.0, epsilon = 1e-9);
        assert_abs_diff_eq!(out.angles.pitch, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn half_turn_yaw_is_positive_180() {
        let q = Quaternion::rot_z(std::f64::consts::PI);
        let out = quat_to_yaw_pitch(&q, &reference(Quaternion::IDENTITY));
        assert_abs_diff_eq!(out.angles.yaw, 180.0, epsilon = 1e-9);
        let q = Quaternion::rot_z(-std::f64::consts::PI);
        let out = quat_to_yaw_pitch(&q, &reference(Quaternion::IDENTITY));
        assert!(out.angles.yaw > 0.0);
    }

    /// Euler angles via an explicit rotation matrix: R = Rz(yaw) Ry(-pitch).
    fn matrix_oracle(yaw_deg: f64, pitch_deg: f64) -> [[f64; 3]; 3] {
        let (sy, cy) = yaw_deg.to_radians().sin_cos();
        let (sp, cp) = (-pitch_deg).to_radians().sin_cos();
        let rz = [[cy, -sy, 0.0], [sy, cy, 0.0], [0.0, 0.0, 1.0]];
        let ry = [[cp, 0.0, sp], [0.0, 1.0, 0.0], [-sp, 0.0, cp]];
        let mut m = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = (0..3).map(|k| rz[i][k] * ry[k][j]).sum();
            }
        }
        m
    }

    #[test]
    fn composed_yaw_and_nose_up_pitch_match_matrix_oracle() {
        let r = Quaternion::rot_x(0.4) * Quaternion::rot_z(-1.0);
        let q = r * Quaternion::rot_z(20f64.to_radians()) * Quaternion::rot_y(-10f64.to_radians());
        let out = quat_to_yaw_pitch(&q, &reference(r));
        // Recover the same angles from the matrix: yaw = atan2(m10, m00), pitch = asin(m20).
        let m = matrix_oracle(20.0, 10.0);
        let yaw = m[1][0].atan2(m[0][0]).to_degrees();
        let pitch = m[2][0].asin().to_degrees();
        assert_abs_diff_eq!(yaw, 20.0, epsilon = 1e-9);
        assert_abs_diff_eq!(pitch, 10.0, epsilon = 1e-9);
        assert_abs_diff_eq!(out.angles.yaw, yaw, epsilon = 1e-9);
        assert_abs_diff_eq!(out.angles.pitch, pitch, epsilon = 1e-9);
        // Nose (body x) ends up above the horizon.
        let nose = (Quaternion::rot_z(20f64.to_radians()) * Quaternion::rot_y(-10f64.to_radians())).rotate([1.0, 0.0, 0.0]);
        assert!(nose[2] > 0.0);
    }

    #[test]
    fn gimbal_margin_flagged_near_vertical() {
        let q = HeadAngles::new(10.0, 89.8).to_rotation();
        let out = quat_to_yaw_pitch(&q, &reference(Quaternion::IDENTITY));
        assert!(out.gimbal_margin);
        assert!(out.angles.is_finite());
        let q = HeadAngles::new(10.0, 80.0).to_rotation();
        assert!(!quat_to_yaw_pitch(&q, &reference(Quaternion::IDENTITY)).gimbal_margin);
    }

    #[test]
    fn filter_rejects_time_going_backwards() {
        let mut f = OrientationFilter::new(FilterConfig::default()).unwrap();
        let s = ImuSample {
            t: 1.0,
            gyro: [0.0; 3],
            accel: [0.0, 0.0, 1.0],
            mag: None,
        };
        f.update(&s).unwrap();
        assert!(matches!(f.update(&s), Err(OrientationError::NonMonotonicTime { .. })));
        assert!(f.used_six_axis_fallback());
    }

    #[test]
    fn invalid_config_rejected() {
        assert!(OrientationFilter::new(FilterConfig { beta: -0.1, sample_rate_hz: 100.0 }).is_err());
        assert!(OrientationFilter::new(FilterConfig { beta: 0.1, sample_rate_hz: 0.0 }).is_err());
    }

    #[test]
    fn imu_sample_json_layout() {
        let line = r#"{"t":0.5,"gx":0.1,"gy":0.0,"gz":-0.2,"ax":0.0,"ay":0.0,"az":1.0,"mx":0.5,"my":0.0,"mz":-0.8}"#;
        let s: ImuSample = serde_json::from_str(line).unwrap();
        assert_eq!(s.gyro, [0.1, 0.0, -0.2]);
        assert_eq!(s.mag, Some([0.5, 0.0, -0.8]));
        let six: ImuSample =
            serde_json::from_str(r#"{"t":0.5,"gx":0,"gy":0,"gz":0,"ax":0,"ay":0,"az":1}"#).unwrap();
        assert_eq!(six.mag, None);
        let back = serde_json::to_string(&six).unwrap();
        assert!(!back.contains("mx"));
    }
}
