//! Scripted head motion as yaw/pitch timelines with analytic rates.

use crate::orientation::{HeadAngles, Quaternion};

use super::Scenario;

/// Head pose over time relative to the screen-facing pose.
pub trait Timeline {
    /// Time after which the pose no longer changes.
    fn duration(&self) -> f64;
    fn angles_at(&self, t: f64) -> HeadAngles;
    /// Yaw and pitch rates in degrees per second.
    fn rates_at(&self, t: f64) -> HeadAngles;
}

/// Body-to-earth orientation for `angles` when the screen lies at
/// `heading_deg` from magnetic north.
pub fn orientation_for(angles: HeadAngles, heading_deg: f64) -> Quaternion {
    Quaternion::rot_z(heading_deg.to_radians()) * angles.to_rotation()
}

/// Body-frame angular velocity in rad/s for a zero-roll yaw/pitch motion.
pub fn body_rates(angles: HeadAngles, rates: HeadAngles) -> [f64; 3] {
    let p = angles.pitch.to_radians();
    let yaw_rate = rates.yaw.to_radians();
    [p.sin() * yaw_rate, -rates.pitch.to_radians(), p.cos() * yaw_rate]
}

/// Minimum-jerk position profile on `[0, 1]`.
pub fn min_jerk(tau: f64) -> f64 {
    let t = tau.clamp(0.0, 1.0);
    t * t * t * (10.0 - 15.0 * t + 6.0 * t * t)
}

/// Derivative of [`min_jerk`] with respect to `tau`.
pub fn min_jerk_rate(tau: f64) -> f64 {
    if !(0.0..=1.0).contains(&tau) {
        return 0.0;
    }
    30.0 * tau * tau * (1.0 - tau) * (1.0 - tau)
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Piece {
    start: f64,
    duration: f64,
    from: HeadAngles,
    to: HeadAngles,
}

/// Piecewise minimum-jerk motion through the scenario's segment targets,
/// holding the screen-facing pose until `start`.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pieces: Vec<Piece>,
    rest: HeadAngles,
    end: f64,
}

impl Trajectory {
    pub fn end_pose(&self) -> HeadAngles {
        self.rest
    }

    fn piece_at(&self, t: f64) -> Option<&Piece> {
        let idx = self.pieces.partition_point(|p| p.start <= t);
        idx.checked_sub(1).map(|i| &self.pieces[i]).filter(|p| t < p.start + p.duration)
    }

    fn pose_before(&self, t: f64) -> HeadAngles {
        let idx = self.pieces.partition_point(|p| p.start <= t);
        match idx.checked_sub(1) {
            Some(i) => self.pieces[i].to,
            None => self.pieces.first().map_or(self.rest, |p| p.from),
        }
    }
}

impl Timeline for Trajectory {
    fn duration(&self) -> f64 {
        self.end
    }

    fn angles_at(&self, t: f64) -> HeadAngles {
        match self.piece_at(t) {
            Some(p) => {
                let s = min_jerk((t - p.start) / p.duration);
                HeadAngles::new(
                    p.from.yaw + s * (p.to.yaw - p.from.yaw),
                    p.from.pitch + s * (p.to.pitch - p.from.pitch),
                )
            }
            None => self.pose_before(t),
        }
    }

    fn rates_at(&self, t: f64) -> HeadAngles {
        match self.piece_at(t) {
            Some(p) => {
                let ds = min_jerk_rate((t - p.start) / p.duration) / p.duration;
                HeadAngles::new(ds * (p.to.yaw - p.from.yaw), ds * (p.to.pitch - p.from.pitch))
            }
            None => HeadAngles::default(),
        }
    }
}

/// Segments start when calibration ends; each moves from the previous
/// target (the first from straight ahead) to its own.
pub fn build_trajectory(scenario: &Scenario) -> Trajectory {
    let mut t = scenario.calibration_s;
    let mut pose = HeadAngles::default();
    let mut pieces = Vec::with_capacity(scenario.segments.len());
    for seg in &scenario.segments {
        let to = HeadAngles::new(seg.yaw, seg.pitch);
        pieces.push(Piece {
            start: t,
            duration: seg.duration,
            from: pose,
            to,
        });
        t += seg.duration;
        pose = to;
    }
    Trajectory {
        pieces,
        rest: pose,
        end: t,
    }
}

/// Constant yaw and pitch rates from a starting pose.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConstantRate {
    pub start: HeadAngles,
    pub rates: HeadAngles,
    pub duration: f64,
}

impl Timeline for ConstantRate {
    fn duration(&self) -> f64 {
        self.duration
    }

    fn angles_at(&self, t: f64) -> HeadAngles {
        let t = t.clamp(0.0, self.duration);
        HeadAngles::new(
            self.start.yaw + self.rates.yaw * t,
            self.start.pitch + self.rates.pitch * t,
        )
    }

    fn rates_at(&self, t: f64) -> HeadAngles {
        if (0.0..self.duration).contains(&t) {
            self.rates
        } else {
            HeadAngles::default()
        }
    }
}
