//! Cheek-twitch click detection from the two infrared reflectance channels.
//!
//! Each channel is compared against its relaxed-cheek baseline with two
//! thresholds: a reading at or above `thr_on` starts a twitch, a reading at or
//! below `thr_off` ends it. Readings between the two change nothing.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::orientation::MIN_CALIBRATION_WINDOW_S;

#[derive(Debug, Error, PartialEq)]
pub enum ActuationError {
    #[error("IR calibration window of {0:.3} s is shorter than required")]
    WindowTooShort(f64),
    #[error("IR threshold parameters invalid: {0}")]
    InvalidParams(&'static str),
    #[error("{channel:?} cheek not relaxed during calibration (std {std:.1} counts)")]
    CalibrationUnstable { channel: Channel, std: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    Left,
    Right,
}

impl Channel {
    pub const BOTH: [Channel; 2] = [Channel::Left, Channel::Right];

    pub fn index(self) -> usize {
        match self {
            Channel::Left => 0,
            Channel::Right => 1,
        }
    }

    pub fn other(self) -> Channel {
        match self {
            Channel::Left => Channel::Right,
            Channel::Right => Channel::Left,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Press,
    Release,
}

/// Raw reflectance counts for both cheeks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IrSample {
    pub t: f64,
    pub left: u32,
    pub right: u32,
}

impl IrSample {
    pub fn reading(&self, channel: Channel) -> u32 {
        match channel {
            Channel::Left => self.left,
            Channel::Right => self.right,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwitchEdge {
    pub t: f64,
    pub channel: Channel,
    pub kind: EdgeKind,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThresholdParams {
    pub k_on: f64,
    pub k_off: f64,
    /// Floor applied to the measured standard deviation, in counts.
    pub std_min: f64,
    /// Largest standard deviation accepted as a relaxed cheek, in counts.
    pub relaxed_std_limit: f64,
}

impl Default for ThresholdParams {
    fn default() -> Self {
        Self {
            k_on: 6.0,
            k_off: 3.0,
            std_min: 2.0,
            relaxed_std_limit: 20.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelBaseline {
    pub mean: f64,
    pub std: f64,
    pub thr_on: f64,
    pub thr_off: f64,
}

impl ChannelBaseline {
    pub fn from_stats(mean: f64, std: f64, params: &ThresholdParams) -> Self {
        let s = std.max(params.std_min);
        Self {
            mean,
            std,
            thr_on: mean + params.k_on * s,
            thr_off: mean + params.k_off * s,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IrBaseline {
    pub left: ChannelBaseline,
    pub right: ChannelBaseline,
}

impl IrBaseline {
    pub fn channel(&self, channel: Channel) -> &ChannelBaseline {
        match channel {
            Channel::Left => &self.left,
            Channel::Right => &self.right,
        }
    }
}

/// Per-channel mean and population standard deviation over a relaxed window.
pub fn calibrate_ir(window: &[IrSample], params: &ThresholdParams) -> Result<IrBaseline, ActuationError> {
    if !(params.k_on > params.k_off && params.k_off > 0.0) {
        return Err(ActuationError::InvalidParams("need k_on > k_off > 0"));
    }
    if !(params.std_min > 0.0) {
        return Err(ActuationError::InvalidParams("std_min must be positive"));
    }
    if window.len() < 2 {
        return Err(ActuationError::WindowTooShort(0.0));
    }
    let span = window[window.len() - 1].t - window[0].t;
    let window_len = span + span / (window.len() - 1) as f64;
    if window_len < MIN_CALIBRATION_WINDOW_S - 1e-9 {
        return Err(ActuationError::WindowTooShort(window_len));
    }

    let stats = |channel: Channel| {
        let n = window.len() as f64;
        let mean = window.iter().map(|s| s.reading(channel) as f64).sum::<f64>() / n;
        let var = window
            .iter()
            .map(|s| (s.reading(channel) as f64 - mean).powi(2))
            .sum::<f64>()
            / n;
        (mean, var.sqrt())
    };
    let mut out = [ChannelBaseline::from_stats(0.0, 0.0, params); 2];
    for channel in Channel::BOTH {
        let (mean, std) = stats(channel);
        if std > params.relaxed_std_limit {
            return Err(ActuationError::CalibrationUnstable { channel, std });
        }
        out[channel.index()] = ChannelBaseline::from_stats(mean, std, params);
    }
    Ok(IrBaseline {
        left: out[0],
        right: out[1],
    })
}

/// Apply the hysteresis rule to one sample. `active` holds the per-channel
/// twitch state and is updated in place; edges come out left before right.
pub fn detect_twitch(sample: &IrSample, baseline: &IrBaseline, active: &mut [bool; 2]) -> Vec<TwitchEdge> {
    let mut edges = Vec::new();
    for channel in Channel::BOTH {
        let reading = sample.reading(channel) as f64;
        let b = baseline.channel(channel);
        let on = &mut active[channel.index()];
        let kind = if !*on && reading >= b.thr_on {
            EdgeKind::Press
        } else if *on && reading <= b.thr_off {
            EdgeKind::Release
        } else {
            continue;
        };
        *on = kind == EdgeKind::Press;
        edges.push(TwitchEdge {
            t: sample.t,
            channel,
            kind,
        });
    }
    edges
}

/// Owns the baseline and twitch state for one sensor stream.
#[derive(Clone, Debug)]
pub struct TwitchDetector {
    baseline: IrBaseline,
    active: [bool; 2],
}

impl TwitchDetector {
    pub fn new(baseline: IrBaseline) -> Self {
        Self {
            baseline,
            active: [false; 2],
        }
    }

    pub fn feed(&mut self, sample: &IrSample) -> Vec<TwitchEdge> {
        detect_twitch(sample, &self.baseline, &mut self.active)
    }

    pub fn is_active(&self, channel: Channel) -> bool {
        self.active[channel.index()]
    }

    pub fn baseline(&self) -> &IrBaseline {
        &self.baseline
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn window(left: impl Fn(usize) -> u32, right: impl Fn(usize) -> u32) -> Vec<IrSample> {
        (0..200)
            .map(|i| IrSample {
                t: i as f64 * 0.01,
                left: left(i),
                right: right(i),
            })
            .collect()
    }

    fn baseline(on: f64, off: f64) -> IrBaseline {
        let c = ChannelBaseline {
            mean: 512.0,
            std: 0.0,
            thr_on: on,
            thr_off: off,
        };
        IrBaseline { left: c, right: c }
    }

    fn run(readings: &[u32], b: &IrBaseline) -> Vec<(usize, EdgeKind)> {
        let mut active = [false; 2];
        let mut out = Vec::new();
        for (i, &r) in readings.iter().enumerate() {
            let s = IrSample {
                t: i as f64,
                left: r,
                right: 0,
            };
            for e in detect_twitch(&s, b, &mut active) {
                out.push((i, e.kind));
            }
        }
        out
    }

    #[test]
    fn constant_stream_uses_std_floor() {
        let params = ThresholdParams {
            std_min: 4.0,
            ..Default::default()
        };
        let b = calibrate_ir(&window(|_| 512, |_| 512), &params).unwrap();
        assert_eq!(b.left.thr_on, 536.0);
        assert_eq!(b.left.thr_off, 524.0);
        assert_eq!(b.left.std, 0.0);
    }

    #[test]
    fn thresholds_follow_mean_and_std() {
        let w = window(|i| if i % 2 == 0 { 490 } else { 510 }, |i| if i % 2 == 0 { 490 } else { 510 });
        let b = calibrate_ir(&w, &ThresholdParams::default()).unwrap();
        assert_eq!(b.left.mean, 500.0);
        assert!((b.left.std - 10.0).abs() < 1e-12);
        assert!((b.left.thr_on - 560.0).abs() < 1e-9);
        assert!((b.left.thr_off - 530.0).abs() < 1e-9);
        assert_eq!(b.left, b.right);
    }

    #[test]
    fn calibration_errors() {
        let short: Vec<_> = window(|_| 512, |_| 512).into_iter().take(100).collect();
        assert!(matches!(
            calibrate_ir(&short, &ThresholdParams::default()),
            Err(ActuationError::WindowTooShort(_))
        ));
        let tense = window(|_| 512, |i| if i % 2 == 0 { 400 } else { 600 });
        assert_eq!(
            calibrate_ir(&tense, &ThresholdParams::default()),
            Err(ActuationError::CalibrationUnstable {
                channel: Channel::Right,
                std: 100.0
            })
        );
        let bad = ThresholdParams {
            k_on: 2.0,
            k_off: 3.0,
            ..Default::default()
        };
        assert!(matches!(calibrate_ir(&window(|_| 1, |_| 1), &bad), Err(ActuationError::InvalidParams(_))));
    }

    #[test]
    fn press_then_release_with_hysteresis() {
        let edges = run(&[512, 514, 560, 530, 520], &baseline(536.0, 524.0));
        assert_eq!(edges, vec![(2, EdgeKind::Press), (4, EdgeKind::Release)]);
    }

    #[test]
    fn readings_at_or_below_mean_never_fire() {
        assert!(run(&[512, 500, 0, 511, 512], &baseline(536.0, 524.0)).is_empty());
    }

    #[test]
    fn band_oscillation_after_press_is_silent_exhaustive() {
        let b = baseline(536.0, 524.0);
        let band: Vec<u32> = (525..536).collect();
        for a in &band {
            for c in &band {
                for d in &band {
                    for e in &band {
                        let edges = run(&[600, *a, *c, *d, *e], &b);
                        assert_eq!(edges, vec![(0, EdgeKind::Press)]);
                    }
                }
            }
        }
    }

    #[test]
    fn detector_tracks_both_channels() {
        let mut det = TwitchDetector::new(baseline(536.0, 524.0));
        let e = det.feed(&IrSample {
            t: 0.0,
            left: 600,
            right: 600,
        });
        assert_eq!(e.len(), 2);
        assert_eq!(e[0].channel, Channel::Left);
        assert!(det.is_active(Channel::Right));
    }

    proptest! {
        #[test]
        fn edges_alternate_starting_with_press(readings in prop::collection::vec(480u32..620, 0..400)) {
            let edges = run(&readings, &baseline(536.0, 524.0));
            for (i, (_, kind)) in edges.iter().enumerate() {
                let expected = if i % 2 == 0 { EdgeKind::Press } else { EdgeKind::Release };
                prop_assert_eq!(*kind, expected);
            }
        }

        #[test]
        fn raising_k_on_never_adds_presses(
            readings in prop::collection::vec(480u32..640, 0..300),
            k_on in 3.5f64..12.0,
            bump in 0.0f64..6.0,
        ) {
            let presses = |k: f64| {
                let b = baseline(512.0 + k * 4.0, 512.0 + 3.0 * 4.0);
                run(&readings, &b).iter().filter(|(_, k)| *k == EdgeKind::Press).count()
            };
            prop_assert!(presses(k_on + bump) <= presses(k_on));
        }

        #[test]
        fn stream_inside_band_produces_nothing(readings in prop::collection::vec(525u32..536, 0..300)) {
            prop_assert!(run(&readings, &baseline(536.0, 524.0)).is_empty());
        }
    }
}
