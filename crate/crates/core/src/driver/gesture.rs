//! Dual-cheek mode gesture: both channels press within a short window while
//! the head is pitched far down (disable) or far up (enable).

use crate::actuation::{Channel, EdgeKind, TwitchEdge};

use super::{DriverConfig, Mode};

/// Which pitch gate, if any, the head is currently inside.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Zone {
    #[default]
    Neutral,
    Down,
    Up,
}

impl Zone {
    pub fn target_mode(self) -> Option<Mode> {
        match self {
            Zone::Neutral => None,
            Zone::Down => Some(Mode::Disabled),
            Zone::Up => Some(Mode::Enabled),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PressOutcome {
    /// Outside both gates: treat as an ordinary click.
    PassThrough,
    /// Inside a gate: hold the press until the window decides.
    Deferred,
    /// Second press of a gesture; the mode to switch to.
    Fired(Mode),
}

/// Pitch gate with hysteresis plus the deferred presses awaiting a partner.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct GestureTracker {
    zone: Zone,
    pending: [Option<f64>; 2],
}

impl GestureTracker {
    pub fn zone(&self) -> Zone {
        self.zone
    }

    pub fn pending(&self, channel: Channel) -> Option<f64> {
        self.pending[channel.index()]
    }

    /// Enter a gate at `gesture_pitch_deg`; leave it once pitch backs off by
    /// more than the hysteresis margin.
    pub fn update_pitch(&mut self, pitch: f64, cfg: &DriverConfig) {
        let gate = cfg.gesture_pitch_deg;
        let release = gate - cfg.gesture_hysteresis_deg;
        self.zone = match self.zone {
            Zone::Down if pitch <= -release => Zone::Down,
            Zone::Up if pitch >= release => Zone::Up,
            _ if pitch <= -gate => Zone::Down,
            _ if pitch >= gate => Zone::Up,
            _ => Zone::Neutral,
        };
    }

    pub fn on_press(&mut self, t: f64, channel: Channel, cfg: &DriverConfig) -> PressOutcome {
        let Some(target) = self.zone.target_mode() else {
            return PressOutcome::PassThrough;
        };
        let other = channel.other().index();
        match self.pending[other] {
            Some(p) if t - p <= cfg.gesture_window_s() => {
                self.pending[other] = None;
                PressOutcome::Fired(target)
            }
            _ => {
                self.pending[channel.index()] = Some(t);
                PressOutcome::Deferred
            }
        }
    }

    pub fn take_pending(&mut self, channel: Channel) -> Option<f64> {
        self.pending[channel.index()].take()
    }

    /// Drop deferred presses older than the window as of `t`, returning them.
    pub fn expire(&mut self, t: f64, cfg: &DriverConfig) -> Vec<Channel> {
        let window = cfg.gesture_window_s();
        Channel::BOTH
            .into_iter()
            .filter(|c| match self.pending[c.index()] {
                Some(p) if t - p > window => {
                    self.pending[c.index()] = None;
                    true
                }
                _ => false,
            })
            .collect()
    }
}

/// Stateless check over a batch of edges at a fixed pitch: the mode a gesture
/// would switch to, if both channels press within the window.
pub fn detect_mode_gesture(pitch: f64, edges: &[TwitchEdge], cfg: &DriverConfig) -> Option<Mode> {
    let mut tracker = GestureTracker::default();
    tracker.update_pitch(pitch, cfg);
    for e in edges.iter().filter(|e| e.kind == EdgeKind::Press) {
        tracker.expire(e.t, cfg);
        if let PressOutcome::Fired(mode) = tracker.on_press(e.t, e.channel, cfg) {
            return Some(mode);
        }
    }
    None
}
