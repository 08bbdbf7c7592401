//! Host-side driver: consumes decoded frames in order and emits cursor,
//! button and mode events.
//!
//! Movement frames are smoothed and mapped onto the screen. Click frames carry
//! per-channel twitch edges that become button presses, except when both
//! cheeks twitch together with the head pitched past the gesture gate: that
//! toggles the mouse on or off and the twitches themselves produce no clicks.
//! While a gate is active a lone press is held back for the gesture window so
//! a completed gesture never leaks a click.

mod events;
mod gesture;
mod smoothing;

pub use events::{Button, EventKind, Mode, OutputEvent};
pub use gesture::{detect_mode_gesture, GestureTracker, PressOutcome, Zone};
pub use smoothing::{smooth, Smoother};

use thiserror::Error;

use crate::actuation::{Channel, EdgeKind};
use crate::orientation::HeadAngles;
use crate::wire::{Frame, StatusCode};

#[derive(Debug, Error, PartialEq)]
pub enum DriverError {
    #[error("invalid driver config: {0}")]
    InvalidConfig(&'static str),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DriverConfig {
    pub screen_w: u32,
    pub screen_h: u32,
    /// Head rotation, in degrees either side of centre, that spans half the
    /// screen. Smaller values mean a more sensitive cursor.
    pub range_deg: f64,
    pub ema_alpha: f64,
    pub deadband_deg: f64,
    /// Swap which button each cheek drives.
    pub invert_clicks: bool,
    pub gesture_pitch_deg: f64,
    pub gesture_hysteresis_deg: f64,
    pub gesture_window_ms: f64,
}

impl Default for DriverConfig {
    fn default() -> Self {
        Self {
            screen_w: 1920,
            screen_h: 1080,
            range_deg: 15.0,
            ema_alpha: 0.3,
            deadband_deg: 0.015,
            invert_clicks: false,
            gesture_pitch_deg: 35.0,
            gesture_hysteresis_deg: 2.0,
            gesture_window_ms: 150.0,
        }
    }
}

impl DriverConfig {
    pub fn validate(&self) -> Result<(), DriverError> {
        if self.screen_w == 0 || self.screen_h == 0 {
            return Err(DriverError::InvalidConfig("screen size must be non-zero"));
        }
        if !(self.range_deg > 0.0) {
            return Err(DriverError::InvalidConfig("range_deg must be positive"));
        }
        if !(self.ema_alpha > 0.0 && self.ema_alpha <= 1.0) {
            return Err(DriverError::InvalidConfig("ema_alpha must be in (0, 1]"));
        }
        if !(self.deadband_deg >= 0.0) {
            return Err(DriverError::InvalidConfig("deadband_deg must be >= 0"));
        }
        if !(self.gesture_pitch_deg > self.range_deg) {
            return Err(DriverError::InvalidConfig("gesture pitch must exceed the cursor range"));
        }
        if !(self.gesture_hysteresis_deg >= 0.0 && self.gesture_hysteresis_deg < self.gesture_pitch_deg) {
            return Err(DriverError::InvalidConfig("gesture hysteresis out of range"));
        }
        if !(self.gesture_window_ms > 0.0) {
            return Err(DriverError::InvalidConfig("gesture window must be positive"));
        }
        Ok(())
    }

    pub fn gesture_window_s(&self) -> f64 {
        self.gesture_window_ms / 1000.0
    }

    pub fn button_for(&self, channel: Channel) -> Button {
        match (channel, self.invert_clicks) {
            (Channel::Left, false) | (Channel::Right, true) => Button::Left,
            (Channel::Right, false) | (Channel::Left, true) => Button::Right,
        }
    }

    /// Head angles that [`map_to_screen`] sends to pixel `(x, y)`.
    pub fn angles_for_pixel(&self, x: f64, y: f64) -> HeadAngles {
        let half_w = self.screen_w as f64 / 2.0;
        let half_h = self.screen_h as f64 / 2.0;
        HeadAngles::new(
            (x - half_w) / half_w * self.range_deg,
            (half_h - y) / half_h * self.range_deg,
        )
    }
}

/// Absolute mapping: centre of the screen at zero yaw and pitch, the edges at
/// `±range_deg`, pitch up moving the cursor up. Out-of-range angles saturate.
pub fn map_to_screen(angles: HeadAngles, cfg: &DriverConfig) -> (u32, u32) {
    let w = cfg.screen_w as f64;
    let h = cfg.screen_h as f64;
    let x = (w / 2.0 + angles.yaw / cfg.range_deg * w / 2.0).round();
    let y = (h / 2.0 - angles.pitch / cfg.range_deg * h / 2.0).round();
    (x.clamp(0.0, w - 1.0) as u32, y.clamp(0.0, h - 1.0) as u32)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DriverState {
    pub mode: Mode,
    pub smoother: Smoother,
    /// Host-side button state, indexed by [`Button::index`].
    pub buttons_down: [bool; 2],
    /// Device-side twitch state per channel, tracked in every mode so edge
    /// alternation can be checked.
    pub channel_active: [bool; 2],
    /// Channels whose current press was consumed by a gesture.
    pub suppressed: [bool; 2],
    pub gesture: GestureTracker,
    pub last_cursor: Option<(u32, u32)>,
    pub needs_anchor: bool,
}

impl Default for DriverState {
    fn default() -> Self {
        Self {
            mode: Mode::Enabled,
            smoother: Smoother::default(),
            buttons_down: [false; 2],
            channel_active: [false; 2],
            suppressed: [false; 2],
            gesture: GestureTracker::default(),
            last_cursor: None,
            needs_anchor: true,
        }
    }
}

/// The driver state machine plus its diagnostic counters.
#[derive(Clone, Debug)]
pub struct Driver {
    cfg: DriverConfig,
    state: DriverState,
    protocol_anomalies: u64,
    last_status: Option<StatusCode>,
}

impl Driver {
    pub fn new(cfg: DriverConfig) -> Result<Self, DriverError> {
        cfg.validate()?;
        Ok(Self {
            cfg,
            state: DriverState::default(),
            protocol_anomalies: 0,
            last_status: None,
        })
    }

    pub fn config(&self) -> &DriverConfig {
        &self.cfg
    }

    /// Replace the configuration between frames.
    pub fn set_config(&mut self, cfg: DriverConfig) -> Result<(), DriverError> {
        cfg.validate()?;
        self.cfg = cfg;
        Ok(())
    }

    pub fn state(&self) -> &DriverState {
        &self.state
    }

    pub fn mode(&self) -> Mode {
        self.state.mode
    }

    pub fn cursor(&self) -> Option<(u32, u32)> {
        self.state.last_cursor
    }

    /// Click edges that broke press/release alternation and were ignored.
    pub fn protocol_anomalies(&self) -> u64 {
        self.protocol_anomalies
    }

    pub fn last_status(&self) -> Option<StatusCode> {
        self.last_status
    }

    /// Process one frame received at time `t` (seconds).
    pub fn step(&mut self, t: f64, frame: &Frame) -> Vec<OutputEvent> {
        let mut out = Vec::new();
        for channel in self.state.gesture.expire(t, &self.cfg) {
            self.press_button(t, channel, &mut out);
        }
        match *frame {
            Frame::Movement { yaw, pitch } => {
                self.on_movement(t, HeadAngles::new(yaw.degrees(), pitch.degrees()), &mut out)
            }
            Frame::Click { channels, edge } => {
                for channel in channels.channels() {
                    match edge {
                        EdgeKind::Press => self.on_press(t, channel, &mut out),
                        EdgeKind::Release => self.on_release(t, channel, &mut out),
                    }
                }
            }
            Frame::Status(code) => self.last_status = Some(code),
        }
        out
    }

    fn on_movement(&mut self, t: f64, raw: HeadAngles, out: &mut Vec<OutputEvent>) {
        self.state.gesture.update_pitch(raw.pitch, &self.cfg);
        let smoothed = smooth(raw, &mut self.state.smoother, &self.cfg);
        if self.state.mode == Mode::Disabled {
            return;
        }
        let (x, y) = map_to_screen(smoothed, &self.cfg);
        if self.state.needs_anchor || self.state.last_cursor != Some((x, y)) {
            out.push(OutputEvent {
                t,
                kind: EventKind::CursorMove { x, y },
            });
            self.state.last_cursor = Some((x, y));
            self.state.needs_anchor = false;
        }
    }

    fn on_press(&mut self, t: f64, channel: Channel, out: &mut Vec<OutputEvent>) {
        let i = channel.index();
        if self.state.channel_active[i] {
            self.protocol_anomalies += 1;
            return;
        }
        self.state.channel_active[i] = true;
        match self.state.gesture.on_press(t, channel, &self.cfg) {
            PressOutcome::PassThrough => self.press_button(t, channel, out),
            PressOutcome::Deferred => {}
            PressOutcome::Fired(mode) => {
                // Both constituent presses are consumed; their releases must
                // not reach the host either.
                self.state.suppressed = [
                    self.state.suppressed[0] || self.state.channel_active[0],
                    self.state.suppressed[1] || self.state.channel_active[1],
                ];
                self.set_mode(t, mode, out);
            }
        }
    }

    fn on_release(&mut self, t: f64, channel: Channel, out: &mut Vec<OutputEvent>) {
        let i = channel.index();
        if !self.state.channel_active[i] {
            self.protocol_anomalies += 1;
            return;
        }
        self.state.channel_active[i] = false;
        if self.state.suppressed[i] {
            self.state.suppressed[i] = false;
            return;
        }
        if self.state.gesture.take_pending(channel).is_some() {
            // A quick tap inside a gate that never found its partner.
            self.press_button(t, channel, out);
        }
        let button = self.cfg.button_for(channel);
        if self.state.buttons_down[button.index()] {
            self.state.buttons_down[button.index()] = false;
            out.push(OutputEvent {
                t,
                kind: EventKind::ButtonUp(button),
            });
        }
    }

    fn press_button(&mut self, t: f64, channel: Channel, out: &mut Vec<OutputEvent>) {
        if self.state.mode == Mode::Disabled {
            return;
        }
        let button = self.cfg.button_for(channel);
        if !self.state.buttons_down[button.index()] {
            self.state.buttons_down[button.index()] = true;
            out.push(OutputEvent {
                t,
                kind: EventKind::ButtonDown(button),
            });
        }
    }

    fn set_mode(&mut self, t: f64, mode: Mode, out: &mut Vec<OutputEvent>) {
        if self.state.mode == mode {
            return;
        }
        if mode == Mode::Disabled {
            for button in [Button::Left, Button::Right] {
                if self.state.buttons_down[button.index()] {
                    self.state.buttons_down[button.index()] = false;
                    out.push(OutputEvent {
                        t,
                        kind: EventKind::ButtonUp(button),
                    });
                }
            }
        } else {
            self.state.needs_anchor = true;
        }
        self.state.mode = mode;
        out.push(OutputEvent {
            t,
            kind: EventKind::ModeChange(mode),
        });
    }
}
