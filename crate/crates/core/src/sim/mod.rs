//! Scenario-driven simulation: scripted head motion, inverse sensor models,
//! the full transmitter/receiver pipeline and a scripted pointing agent.

pub mod agent;
pub mod pipeline;
pub mod sensors;
pub mod trajectory;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::actuation::{ActuationError, Channel};
use crate::driver::DriverError;
use crate::orientation::OrientationError;
use crate::wire::WireError;

pub use agent::{popper_targets, score_session, scripted_agent, AgentParams, SessionResult, Target};
pub use pipeline::{
    generate_streams, replay_capture, run_pipeline, run_streams, FrameClock, PipelineOutput, Receiver,
    SensorStreams, SimOptions, TracePoint, Transmitter, TransmitterConfig,
};
pub use sensors::{inverse_imu, synth_twitch, NoiseSpec, EARTH_FIELD, IR_BASELINE};
pub use trajectory::{build_trajectory, ConstantRate, Timeline, Trajectory};

/// Largest yaw or pitch a scenario may ask for, in degrees.
pub const ERGONOMIC_LIMIT_DEG: f64 = 60.0;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("IMU stream has {imu} samples but IR stream has {ir}")]
    MismatchedStreams { imu: usize, ir: usize },
    #[error(transparent)]
    Orientation(#[from] OrientationError),
    #[error(transparent)]
    Actuation(#[from] ActuationError),
    #[error(transparent)]
    Driver(#[from] DriverError),
    #[error(transparent)]
    Wire(#[from] WireError),
}

impl SimError {
    /// The head moved or the cheeks were active during calibration.
    pub fn is_calibration_failure(&self) -> bool {
        matches!(
            self,
            SimError::Orientation(OrientationError::CalibrationUnstable { .. })
                | SimError::Actuation(ActuationError::CalibrationUnstable { .. })
        )
    }
}

/// Move to `(yaw, pitch)` from the previous target over `duration` seconds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub yaw: f64,
    pub pitch: f64,
    pub duration: f64,
}

/// One cheek twitch; `t` counts from the end of calibration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwitchEvent {
    pub t: f64,
    pub channel: Channel,
    #[serde(default = "default_pulse_len")]
    pub pulse_len: f64,
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
}

fn default_pulse_len() -> f64 {
    0.2
}

fn default_amplitude() -> f64 {
    80.0
}

fn default_sample_rate() -> f64 {
    100.0
}

fn default_calibration_s() -> f64 {
    8.0
}

fn default_tail_s() -> f64 {
    0.5
}

/// Scripted session. The head holds straight ahead for `calibration_s`,
/// then follows `segments`; the stream runs `tail_s` past the last motion
/// or twitch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    #[serde(default = "default_sample_rate")]
    pub sample_rate: f64,
    #[serde(default = "default_calibration_s")]
    pub calibration_s: f64,
    /// Direction of the screen from magnetic north, degrees.
    #[serde(default)]
    pub heading_deg: f64,
    #[serde(default)]
    pub segments: Vec<Segment>,
    #[serde(default)]
    pub twitches: Vec<TwitchEvent>,
    #[serde(default)]
    pub noise: NoiseSpec,
    #[serde(default = "default_tail_s")]
    pub tail_s: f64,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            sample_rate: default_sample_rate(),
            calibration_s: default_calibration_s(),
            heading_deg: 0.0,
            segments: Vec::new(),
            twitches: Vec::new(),
            noise: NoiseSpec::default(),
            tail_s: default_tail_s(),
        }
    }
}

impl Scenario {
    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |msg: String| Err(SimError::InvalidScenario(msg));
        if !(self.sample_rate.is_finite() && self.sample_rate > 0.0) {
            return bad(format!("sample rate {} Hz", self.sample_rate));
        }
        if !(self.calibration_s.is_finite() && self.calibration_s > 0.0) {
            return bad(format!("calibration length {} s", self.calibration_s));
        }
        if !(self.tail_s.is_finite() && self.tail_s >= 0.0) || !self.heading_deg.is_finite() {
            return bad("tail and heading must be finite".into());
        }
        for (i, s) in self.segments.iter().enumerate() {
            if !(s.duration.is_finite() && s.duration > 0.0) {
                return bad(format!("segment {i}: duration {} s", s.duration));
            }
            if !(s.yaw.abs() <= ERGONOMIC_LIMIT_DEG && s.pitch.abs() <= ERGONOMIC_LIMIT_DEG) {
                return bad(format!("segment {i}: ({}, {}) outside +-{ERGONOMIC_LIMIT_DEG} deg", s.yaw, s.pitch));
            }
        }
        let n = &self.noise;
        if [n.gyro_sigma, n.accel_sigma, n.ir_sigma].iter().any(|v| !(v.is_finite() && *v >= 0.0))
            || !n.gyro_bias.is_finite()
        {
            return bad("noise levels must be finite and non-negative".into());
        }
        for (i, e) in self.twitches.iter().enumerate() {
            if !(e.t.is_finite() && e.t >= 0.0 && e.pulse_len > 0.0 && e.amplitude.is_finite()) {
                return bad(format!("twitch {i}: bad timing or amplitude"));
            }
        }
        for ch in Channel::BOTH {
            let mut spans: Vec<(f64, f64)> = self
                .twitches
                .iter()
                .filter(|e| e.channel == ch)
                .map(|e| (e.t, e.t + e.pulse_len))
                .collect();
            spans.sort_by(|a, b| a.0.total_cmp(&b.0));
            if spans.windows(2).any(|w| w[1].0 < w[0].1) {
                return bad(format!("overlapping {ch:?} twitches"));
            }
        }
        Ok(())
    }

    /// Seconds from power-up to the end of the stream.
    pub fn total_duration(&self) -> f64 {
        let motion: f64 = self.segments.iter().map(|s| s.duration).sum();
        let twitch_end = self
            .twitches
            .iter()
            .map(|e| e.t + e.pulse_len)
            .fold(0.0, f64::max);
        self.calibration_s + motion.max(twitch_end) + self.tail_s
    }
}
