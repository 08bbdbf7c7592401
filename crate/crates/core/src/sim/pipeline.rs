//! End-to-end pipeline: transmitter (filter, calibration, twitch detection,
//! framing) feeding a receiver (decoder, driver) over an in-memory byte link.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::actuation::{calibrate_ir, IrBaseline, IrSample, ThresholdParams, TwitchDetector};
use crate::driver::{Driver, DriverConfig, OutputEvent};
use crate::orientation::{
    capture_reference, initial_orientation, quat_to_yaw_pitch, CalibrationReference, FilterConfig,
    HeadAngles, ImuSample, OrientationFilter, Quaternion,
};
use crate::wire::{encode_into, DecodeState, DecodeStats, Frame, StatusCode};

use super::sensors::{inverse_imu, synth_twitch, IR_BASELINE};
use super::trajectory::{build_trajectory, Timeline, Trajectory};
use super::{Scenario, SimError};

/// Head-unit settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransmitterConfig {
    pub sample_rate: f64,
    /// Length of the hold-still phase at power-up.
    pub calibration_s: f64,
    /// Trailing part of the calibration phase that is averaged.
    pub calibration_window_s: f64,
    pub filter: FilterConfig,
    pub thresholds: ThresholdParams,
}

impl Default for TransmitterConfig {
    fn default() -> Self {
        Self {
            sample_rate: 100.0,
            calibration_s: 8.0,
            calibration_window_s: 2.0,
            filter: FilterConfig::default(),
            thresholds: ThresholdParams::default(),
        }
    }
}

impl TransmitterConfig {
    fn calibration_ticks(&self) -> usize {
        (self.calibration_s * self.sample_rate).round() as usize
    }

    fn window_ticks(&self) -> usize {
        (self.calibration_window_s * self.sample_rate).round() as usize
    }
}

/// Head unit: one call per sensor tick, producing the frames sent that tick.
///
/// Every calibration tick sends `Status(Calibrating)`. The first tick after
/// calibration sends `Status(Ready)`, then each tick sends one movement
/// frame followed by any click frames.
#[derive(Clone, Debug)]
pub struct Transmitter {
    cfg: TransmitterConfig,
    filter: OrientationFilter,
    tick: usize,
    imu_window: Vec<(f64, Quaternion)>,
    ir_window: Vec<IrSample>,
    reference: Option<CalibrationReference>,
    detector: Option<TwitchDetector>,
    last_angles: Option<HeadAngles>,
}

impl Transmitter {
    pub fn new(cfg: TransmitterConfig) -> Result<Self, SimError> {
        let filter = OrientationFilter::new(FilterConfig {
            sample_rate_hz: cfg.sample_rate,
            ..cfg.filter
        })?;
        if cfg.window_ticks() < 2 || cfg.window_ticks() > cfg.calibration_ticks() {
            return Err(SimError::InvalidScenario(
                "calibration window must fit inside the calibration phase".into(),
            ));
        }
        Ok(Self {
            cfg,
            filter,
            tick: 0,
            imu_window: Vec::new(),
            ir_window: Vec::new(),
            reference: None,
            detector: None,
            last_angles: None,
        })
    }

    pub fn reference(&self) -> Option<&CalibrationReference> {
        self.reference.as_ref()
    }

    pub fn ir_baseline(&self) -> Option<&IrBaseline> {
        self.detector.as_ref().map(TwitchDetector::baseline)
    }

    /// Angles carried by the most recent movement frame.
    pub fn last_angles(&self) -> Option<HeadAngles> {
        self.last_angles
    }

    pub fn filter(&self) -> &OrientationFilter {
        &self.filter
    }

    pub fn step(&mut self, imu: &ImuSample, ir: &IrSample) -> Result<Vec<Frame>, SimError> {
        if self.tick == 0 {
            if let Some(q) = initial_orientation(imu.accel, imu.mag) {
                self.filter = self.filter.clone().with_orientation(q);
            }
        }
        let q = self.filter.update(imu)?;
        let k = self.tick;
        self.tick += 1;
        let cal = self.cfg.calibration_ticks();
        if k < cal {
            if k + self.cfg.window_ticks() >= cal {
                self.imu_window.push((imu.t, q));
                self.ir_window.push(*ir);
            }
            return Ok(vec![Frame::Status(StatusCode::Calibrating)]);
        }
        let mut frames = Vec::with_capacity(3);
        if k == cal {
            let reference = capture_reference(&self.imu_window)?;
            let baseline = calibrate_ir(&self.ir_window, &self.cfg.thresholds)?;
            self.reference = Some(reference);
            self.detector = Some(TwitchDetector::new(baseline));
            frames.push(Frame::Status(StatusCode::Ready));
        }
        let (Some(reference), Some(detector)) = (self.reference.as_ref(), self.detector.as_mut()) else {
            unreachable!("calibration completes at tick {cal}");
        };
        let angles = quat_to_yaw_pitch(&q, reference).angles;
        self.last_angles = Some(angles);
        frames.push(Frame::movement(angles)?);
        frames.extend(detector.feed(ir).into_iter().map(|e| Frame::click(e.channel, e.kind)));
        Ok(frames)
    }
}

/// Receive-side clock derived from the frame stream alone: each movement or
/// `Calibrating` frame is one sensor tick; clicks share the time of the tick
/// they follow and other status frames take the time of the next tick.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrameClock {
    sample_rate: f64,
    ticks: u64,
}

impl FrameClock {
    pub fn new(sample_rate: f64) -> Self {
        Self { sample_rate, ticks: 0 }
    }

    pub fn stamp(&mut self, frame: &Frame) -> f64 {
        match frame {
            Frame::Movement { .. } | Frame::Status(StatusCode::Calibrating) => {
                let t = self.ticks as f64 / self.sample_rate;
                self.ticks += 1;
                t
            }
            Frame::Click { .. } => self.ticks.saturating_sub(1) as f64 / self.sample_rate,
            Frame::Status(_) => self.ticks as f64 / self.sample_rate,
        }
    }
}

/// Host side: frame decoder, clock and driver.
#[derive(Clone, Debug)]
pub struct Receiver {
    decoder: DecodeState,
    clock: FrameClock,
    driver: Driver,
}

impl Receiver {
    pub fn new(cfg: DriverConfig, sample_rate: f64) -> Result<Self, SimError> {
        Ok(Self {
            decoder: DecodeState::new(),
            clock: FrameClock::new(sample_rate),
            driver: Driver::new(cfg)?,
        })
    }

    pub fn push(&mut self, bytes: &[u8]) -> Vec<OutputEvent> {
        let mut out = Vec::new();
        for frame in self.decoder.push(bytes) {
            let t = self.clock.stamp(&frame);
            out.extend(self.driver.step(t, &frame));
        }
        out
    }

    pub fn driver(&self) -> &Driver {
        &self.driver
    }

    pub fn decode_stats(&self) -> &DecodeStats {
        self.decoder.stats()
    }
}

/// One post-calibration tick of the cursor trace.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TracePoint {
    pub t: f64,
    pub yaw: f64,
    pub pitch: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub true_yaw: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub true_pitch: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y: Option<u32>,
}

#[derive(Clone, Debug)]
pub struct PipelineOutput {
    pub events: Vec<OutputEvent>,
    pub trace: Vec<TracePoint>,
    /// Every byte sent over the link, in `.auxw` layout.
    pub capture: Vec<u8>,
    pub reference: Option<CalibrationReference>,
    pub ir_baseline: Option<IrBaseline>,
    pub decode: DecodeStats,
    pub protocol_anomalies: u64,
    pub degraded_samples: u64,
}

/// Options that are not part of a scenario file.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SimOptions {
    pub seed: u64,
    pub filter: FilterConfig,
    pub thresholds: ThresholdParams,
}

impl SimOptions {
    pub fn transmitter(&self, scenario: &Scenario) -> TransmitterConfig {
        TransmitterConfig {
            sample_rate: scenario.sample_rate,
            calibration_s: scenario.calibration_s,
            filter: self.filter,
            thresholds: self.thresholds,
            ..TransmitterConfig::default()
        }
    }
}

/// Drive recorded or synthesized sensor streams through the whole chain.
/// The two streams are paired tick by tick.
pub fn run_streams(
    imu: &[ImuSample],
    ir: &[IrSample],
    driver_cfg: &DriverConfig,
    tx_cfg: &TransmitterConfig,
    truth: Option<&dyn Timeline>,
) -> Result<PipelineOutput, SimError> {
    if imu.len() != ir.len() {
        return Err(SimError::MismatchedStreams {
            imu: imu.len(),
            ir: ir.len(),
        });
    }
    let half_period = 0.5 / tx_cfg.sample_rate;
    if let Some((a, b)) = imu.iter().zip(ir).find(|(a, b)| (a.t - b.t).abs() > half_period) {
        return Err(SimError::InvalidScenario(format!(
            "IMU sample at {} s has no IR sample (nearest {} s)",
            a.t, b.t
        )));
    }
    let mut tx = Transmitter::new(*tx_cfg)?;
    let mut rx = Receiver::new(*driver_cfg, tx_cfg.sample_rate)?;
    let mut capture = Vec::with_capacity(imu.len() * 9);
    let mut events = Vec::new();
    let mut trace = Vec::new();
    let mut bytes = Vec::with_capacity(32);
    for (s, r) in imu.iter().zip(ir) {
        let frames = tx.step(s, r)?;
        bytes.clear();
        for f in &frames {
            encode_into(f, &mut bytes);
        }
        capture.extend_from_slice(&bytes);
        events.extend(rx.push(&bytes));
        if let Some(est) = frames.iter().find_map(|f| match f {
            Frame::Movement { yaw, pitch } => Some(HeadAngles::new(yaw.degrees(), pitch.degrees())),
            _ => None,
        }) {
            let true_angles = truth.map(|tl| tl.angles_at(s.t));
            let cursor = rx.driver().cursor();
            trace.push(TracePoint {
                t: s.t,
                yaw: est.yaw,
                pitch: est.pitch,
                true_yaw: true_angles.map(|a| a.yaw),
                true_pitch: true_angles.map(|a| a.pitch),
                x: cursor.map(|c| c.0),
                y: cursor.map(|c| c.1),
            });
        }
    }
    if tx.reference().is_none() {
        return Err(SimError::InvalidScenario(format!(
            "stream of {} samples ends before calibration completes",
            imu.len()
        )));
    }
    Ok(PipelineOutput {
        events,
        trace,
        capture,
        reference: tx.reference().copied(),
        ir_baseline: tx.ir_baseline().copied(),
        decode: *rx.decode_stats(),
        protocol_anomalies: rx.driver().protocol_anomalies(),
        degraded_samples: tx.filter().degraded_samples(),
    })
}

/// Synthesized sensor streams for a scenario.
#[derive(Clone, Debug)]
pub struct SensorStreams {
    pub trajectory: Trajectory,
    pub imu: Vec<ImuSample>,
    pub ir: Vec<IrSample>,
}

pub fn generate_streams(scenario: &Scenario, seed: u64) -> Result<SensorStreams, SimError> {
    scenario.validate()?;
    let trajectory = build_trajectory(scenario);
    let n = (scenario.total_duration() * scenario.sample_rate).floor() as usize + 1;
    let mut imu_rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ir_rng = ChaCha8Rng::seed_from_u64(seed);
    ir_rng.set_stream(1);
    let imu = inverse_imu(
        &trajectory,
        scenario.heading_deg,
        &scenario.noise,
        scenario.sample_rate,
        n,
        &mut imu_rng,
    );
    let ir = synth_twitch(
        &scenario.twitches,
        scenario.calibration_s,
        IR_BASELINE,
        scenario.noise.ir_sigma,
        scenario.sample_rate,
        n,
        &mut ir_rng,
    );
    Ok(SensorStreams { trajectory, imu, ir })
}

pub fn run_pipeline(
    scenario: &Scenario,
    driver_cfg: &DriverConfig,
    opts: &SimOptions,
) -> Result<PipelineOutput, SimError> {
    let streams = generate_streams(scenario, opts.seed)?;
    run_streams(
        &streams.imu,
        &streams.ir,
        driver_cfg,
        &opts.transmitter(scenario),
        Some(&streams.trajectory),
    )
}

/// Feed a raw `.auxw` capture straight to a driver.
pub fn replay_capture(
    bytes: &[u8],
    driver_cfg: &DriverConfig,
    sample_rate: f64,
) -> Result<(Vec<OutputEvent>, DecodeStats), SimError> {
    let mut rx = Receiver::new(*driver_cfg, sample_rate)?;
    let events = rx.push(bytes);
    Ok((events, *rx.decode_stats()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actuation::Channel;
    use crate::driver::{Button, EventKind, Mode};
    use crate::sim::{NoiseSpec, Segment, TwitchEvent};

    fn twitch(t: f64, channel: Channel) -> TwitchEvent {
        TwitchEvent {
            t,
            channel,
            pulse_len: 0.2,
            amplitude: 80.0,
        }
    }

    fn seg(yaw: f64, pitch: f64, duration: f64) -> Segment {
        Segment { yaw, pitch, duration }
    }

    fn run(s: &Scenario) -> PipelineOutput {
        run_pipeline(s, &DriverConfig::default(), &SimOptions::default()).unwrap()
    }

    fn buttons(out: &PipelineOutput) -> Vec<EventKind> {
        out.events
            .iter()
            .map(|e| e.kind)
            .filter(|k| matches!(k, EventKind::ButtonDown(_) | EventKind::ButtonUp(_)))
            .collect()
    }

    #[test]
    fn centre_hold_with_one_twitch_clicks_at_centre() {
        let s = Scenario {
            segments: vec![seg(0.0, 0.0, 2.0)],
            twitches: vec![twitch(1.0, Channel::Left)],
            ..Scenario::default()
        };
        let out = run(&s);
        assert_eq!(buttons(&out), vec![EventKind::ButtonDown(Button::Left), EventKind::ButtonUp(Button::Left)]);
        let moves: Vec<_> = out
            .events
            .iter()
            .filter_map(|e| match e.kind {
                EventKind::CursorMove { x, y } => Some((x, y)),
                _ => None,
            })
            .collect();
        assert_eq!(moves, vec![(960, 540)]);
        assert_eq!(out.decode.errors(), 0);
    }

    #[test]
    fn steady_pose_maps_to_expected_pixel() {
        let s = Scenario {
            segments: vec![seg(10.0, 5.0, 1.0), seg(10.0, 5.0, 1.0)],
            ..Scenario::default()
        };
        let out = run(&s);
        let (x, y) = (out.trace.last().unwrap().x.unwrap(), out.trace.last().unwrap().y.unwrap());
        assert!((x as i64 - 1600).abs() <= 2 && (y as i64 - 360).abs() <= 2, "({x},{y})");
    }

    #[test]
    fn head_down_dual_twitch_disables_cursor() {
        let s = Scenario {
            segments: vec![seg(0.0, -35.0, 1.0), seg(0.0, -35.0, 0.5), seg(10.0, 0.0, 1.0), seg(-10.0, 5.0, 1.0)],
            twitches: vec![twitch(1.2, Channel::Left), twitch(1.25, Channel::Right)],
            ..Scenario::default()
        };
        let out = run(&s);
        let idx = out
            .events
            .iter()
            .position(|e| e.kind == EventKind::ModeChange(Mode::Disabled))
            .expect("disable gesture");
        assert!(out.events[idx + 1..].iter().all(|e| !matches!(e.kind, EventKind::CursorMove { .. })));
        assert!(buttons(&out).is_empty());
    }

    #[test]
    fn capture_replays_to_identical_events() {
        let s = Scenario {
            segments: vec![seg(8.0, -4.0, 0.7), seg(-3.0, 6.0, 0.9)],
            twitches: vec![twitch(0.5, Channel::Right), twitch(1.2, Channel::Left)],
            noise: NoiseSpec {
                gyro_sigma: 0.005,
                accel_sigma: 0.005,
                ir_sigma: 1.0,
                ..Default::default()
            },
            ..Scenario::default()
        };
        let out = run(&s);
        let (events, stats) = replay_capture(&out.capture, &DriverConfig::default(), s.sample_rate).unwrap();
        assert_eq!(events, out.events);
        assert_eq!(stats.errors(), 0);
    }

    #[test]
    fn seeds_are_reproducible() {
        let s = Scenario {
            segments: vec![seg(5.0, 5.0, 1.0)],
            noise: NoiseSpec {
                gyro_sigma: 0.01,
                accel_sigma: 0.01,
                ir_sigma: 1.0,
                gyro_bias: 0.001,
            },
            ..Scenario::default()
        };
        assert_eq!(run(&s).capture, run(&s).capture);
    }

    #[test]
    fn noisy_ir_fails_calibration() {
        let s = Scenario {
            segments: vec![seg(0.0, 0.0, 1.0)],
            noise: NoiseSpec {
                ir_sigma: 40.0,
                ..Default::default()
            },
            ..Scenario::default()
        };
        let err = run_pipeline(&s, &DriverConfig::default(), &SimOptions::default()).unwrap_err();
        assert!(err.is_calibration_failure(), "{err}");
    }

    #[test]
    fn clock_counts_ticks() {
        let mut c = FrameClock::new(100.0);
        assert_eq!(c.stamp(&Frame::Status(StatusCode::Calibrating)), 0.0);
        assert_eq!(c.stamp(&Frame::Status(StatusCode::Ready)), 0.01);
        let m = Frame::movement(HeadAngles::default()).unwrap();
        assert_eq!(c.stamp(&m), 0.01);
        assert_eq!(c.stamp(&Frame::click(Channel::Left, crate::actuation::EdgeKind::Press)), 0.01);
        assert_eq!(c.stamp(&m), 0.02);
    }
}
