//! Scripted "ideal user" for the balloon-popping task: targets, the head
//! motion and twitches that pop them, and scoring of the resulting events.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::actuation::Channel;
use crate::driver::{DriverConfig, EventKind, OutputEvent};
use crate::eval::pointing::{hits_target, LevelSpec, TrialRecord};
use crate::orientation::HeadAngles;

use super::{Scenario, Segment, SimError, TwitchEvent};

/// Balloon on screen, in pixels.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Target {
    pub center: [f64; 2],
    pub width: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<u32>,
}

/// Timing model of the agent. Each aimed movement is a fast primary
/// submovement that covers most of the distance, then a corrective
/// submovement whose duration grows with `log2(1 + D / W)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AgentParams {
    pub peak_speed_deg_s: f64,
    pub reaction_s: f64,
    pub dwell_s: f64,
    /// Shortest primary submovement.
    pub min_move_s: f64,
    /// Fraction of the distance covered by the primary submovement.
    pub primary_fraction: f64,
    /// Corrective submovement time per bit of `log2(1 + D / W)`.
    pub homing_s_per_bit: f64,
    pub pulse_len_s: f64,
    pub pulse_amplitude: f64,
}

impl Default for AgentParams {
    fn default() -> Self {
        Self {
            peak_speed_deg_s: 150.0,
            reaction_s: 0.25,
            dwell_s: 0.15,
            min_move_s: 0.3,
            primary_fraction: 0.9,
            homing_s_per_bit: 0.2,
            pulse_len_s: 0.2,
            pulse_amplitude: 80.0,
        }
    }
}

impl AgentParams {
    pub fn validate(&self) -> Result<(), SimError> {
        let positive = [
            self.peak_speed_deg_s,
            self.reaction_s,
            self.dwell_s,
            self.min_move_s,
            self.homing_s_per_bit,
            self.pulse_len_s,
            self.pulse_amplitude,
        ];
        if positive.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(SimError::InvalidScenario("agent parameters must be positive".into()));
        }
        if !(self.primary_fraction > 0.0 && self.primary_fraction <= 1.0) {
            return Err(SimError::InvalidScenario("primary_fraction must lie in (0, 1]".into()));
        }
        Ok(())
    }
}

fn lerp(a: HeadAngles, b: HeadAngles, s: f64) -> HeadAngles {
    HeadAngles::new(a.yaw + s * (b.yaw - a.yaw), a.pitch + s * (b.pitch - a.pitch))
}

/// Scenario in which the agent pops `targets` in order, starting from the
/// screen centre right after calibration.
pub fn scripted_agent(
    targets: &[Target],
    params: &AgentParams,
    cfg: &DriverConfig,
) -> Result<Scenario, SimError> {
    params.validate()?;
    let mut segments = Vec::new();
    let mut twitches = Vec::new();
    let mut pose = HeadAngles::default();
    let mut cursor = [cfg.screen_w as f64 / 2.0, cfg.screen_h as f64 / 2.0];
    let mut t = 0.0;
    let hold = |segments: &mut Vec<Segment>, to: HeadAngles, duration: f64| {
        segments.push(Segment {
            yaw: to.yaw,
            pitch: to.pitch,
            duration,
        });
        duration
    };
    for target in targets {
        let [x, y] = target.center;
        if x < 0.0 || y < 0.0 || x >= cfg.screen_w as f64 || y >= cfg.screen_h as f64 {
            return Err(SimError::InvalidScenario(format!("target at ({x}, {y}) is off screen")));
        }
        let aim = cfg.angles_for_pixel(x, y);
        t += hold(&mut segments, pose, params.reaction_s);

        let angular = ((aim.yaw - pose.yaw).powi(2) + (aim.pitch - pose.pitch).powi(2)).sqrt();
        let primary_to = lerp(pose, aim, params.primary_fraction);
        let primary_s = (1.875 * angular * params.primary_fraction / params.peak_speed_deg_s).max(params.min_move_s);
        t += hold(&mut segments, primary_to, primary_s);

        let px = ((x - cursor[0]).powi(2) + (y - cursor[1]).powi(2)).sqrt();
        let bits = (1.0 + px / target.width as f64).log2();
        t += hold(&mut segments, aim, params.homing_s_per_bit * bits.max(1.0));

        t += hold(&mut segments, aim, params.dwell_s);
        twitches.push(TwitchEvent {
            t,
            channel: Channel::Left,
            pulse_len: params.pulse_len_s,
            amplitude: params.pulse_amplitude,
        });
        t += hold(&mut segments, aim, params.pulse_len_s);
        pose = aim;
        cursor = target.center;
    }
    Ok(Scenario {
        segments,
        twitches,
        ..Scenario::default()
    })
}

/// Random on-screen targets for each level, fully inside the screen.
pub fn popper_targets(levels: &[LevelSpec], cfg: &DriverConfig, seed: u64) -> Vec<Target> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for level in levels {
        for _ in 0..level.targets {
            let width = level.widths[rng.random_range(0..level.widths.len())];
            let r = width as f64 / 2.0;
            let x = rng.random_range(r..cfg.screen_w as f64 - r);
            let y = rng.random_range(r..cfg.screen_h as f64 - r);
            out.push(Target {
                center: [x, y],
                width,
                level: Some(level.level),
            });
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct SessionResult {
    pub trials: Vec<TrialRecord>,
    /// Targets never popped before the event log ended.
    pub stalled: usize,
}

/// Replay the driver events against the target sequence. A target appears
/// when the previous one pops (the first at `t0`); every button press
/// outside it is a miss-click.
pub fn score_session(events: &[OutputEvent], targets: &[Target], t0: f64) -> SessionResult {
    let mut trials = Vec::with_capacity(targets.len());
    let mut cursor: Option<(u32, u32)> = None;
    let mut path: Vec<[f64; 2]> = Vec::new();
    let mut t_start = t0;
    let mut misses = 0;
    for e in events {
        let Some(target) = targets.get(trials.len()) else {
            break;
        };
        match e.kind {
            EventKind::CursorMove { x, y } => {
                cursor = Some((x, y));
                if e.t >= t_start {
                    path.push([x as f64, y as f64]);
                }
            }
            EventKind::ButtonDown(_) if e.t >= t_start => {
                let Some((x, y)) = cursor else {
                    misses += 1;
                    continue;
                };
                if !hits_target(target.center, target.width, x as f64, y as f64) {
                    misses += 1;
                    continue;
                }
                if path.is_empty() {
                    path.push([x as f64, y as f64]);
                }
                trials.push(TrialRecord {
                    trial: trials.len() as u32 + 1,
                    width: target.width,
                    center: target.center,
                    path: std::mem::take(&mut path),
                    t_start,
                    t_end: e.t,
                    miss_clicks: misses,
                    level: target.level,
                });
                misses = 0;
                t_start = e.t;
                path.push([x as f64, y as f64]);
            }
            _ => {}
        }
    }
    SessionResult {
        stalled: targets.len() - trials.len(),
        trials,
    }
}
