//! Inverse sensor models: ideal IMU and IR readings for a known motion,
//! plus seeded Gaussian noise.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::actuation::{Channel, IrSample};
use crate::orientation::ImuSample;

use super::trajectory::{body_rates, orientation_for, Timeline};
use super::TwitchEvent;

/// Earth magnetic field as a unit vector with 60 degrees of inclination,
/// in the earth frame (x north, z up).
pub const EARTH_FIELD: [f64; 3] = [0.5, 0.0, -0.866_025_403_784_438_6];
/// Specific force at rest, in g.
pub const GRAVITY_UP: [f64; 3] = [0.0, 0.0, 1.0];
/// Resting IR reading in ADC counts.
pub const IR_BASELINE: f64 = 512.0;
const IR_FULL_SCALE: f64 = 1023.0;

/// Sensor noise. Zero everywhere by default.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NoiseSpec {
    /// White gyro noise, rad/s.
    pub gyro_sigma: f64,
    /// Constant gyro offset added to every axis, rad/s.
    pub gyro_bias: f64,
    /// White accelerometer noise, g.
    pub accel_sigma: f64,
    /// White IR noise, counts.
    pub ir_sigma: f64,
}

fn normal(sigma: f64) -> Normal<f64> {
    Normal::new(0.0, sigma.max(0.0)).unwrap_or_else(|_| Normal::new(0.0, 0.0).expect("zero sigma"))
}

/// Sample times `k / rate` for `k = 0..n`.
pub fn sample_times(sample_rate: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |k| k as f64 / sample_rate)
}

/// IMU readings a head following `timeline` would produce. The screen lies
/// at `heading_deg` from magnetic north.
pub fn inverse_imu<R: Rng>(
    timeline: &dyn Timeline,
    heading_deg: f64,
    noise: &NoiseSpec,
    sample_rate: f64,
    n: usize,
    rng: &mut R,
) -> Vec<ImuSample> {
    let gyro_noise = normal(noise.gyro_sigma);
    let accel_noise = normal(noise.accel_sigma);
    sample_times(sample_rate, n)
        .map(|t| {
            let angles = timeline.angles_at(t);
            let q = orientation_for(angles, heading_deg);
            let omega = body_rates(angles, timeline.rates_at(t));
            let accel = q.rotate_inverse(GRAVITY_UP);
            let mag = q.rotate_inverse(EARTH_FIELD);
            let mut gyro = [0.0; 3];
            for (g, w) in gyro.iter_mut().zip(omega) {
                *g = w + noise.gyro_bias + gyro_noise.sample(rng);
            }
            let accel = accel.map(|a| a + accel_noise.sample(rng));
            ImuSample {
                t,
                gyro,
                accel,
                mag: Some(mag),
            }
        })
        .collect()
}

/// Raised-cosine pulse height at `dt` seconds into a pulse of length `len`.
pub fn raised_cosine(dt: f64, len: f64, amplitude: f64) -> f64 {
    if !(0.0..=len).contains(&dt) || len <= 0.0 {
        return 0.0;
    }
    amplitude * 0.5 * (1.0 - (std::f64::consts::TAU * dt / len).cos())
}

/// IR readings for twitch pulses on a resting baseline. Event times are
/// shifted by `offset_s`.
pub fn synth_twitch<R: Rng>(
    events: &[TwitchEvent],
    offset_s: f64,
    baseline: f64,
    ir_sigma: f64,
    sample_rate: f64,
    n: usize,
    rng: &mut R,
) -> Vec<IrSample> {
    let noise = normal(ir_sigma);
    sample_times(sample_rate, n)
        .map(|t| {
            let mut reading = |channel: Channel| {
                let pulse: f64 = events
                    .iter()
                    .filter(|e| e.channel == channel)
                    .map(|e| raised_cosine(t - offset_s - e.t, e.pulse_len, e.amplitude))
                    .sum();
                (baseline + pulse + noise.sample(rng)).round().clamp(0.0, IR_FULL_SCALE) as u32
            };
            let left = reading(Channel::Left);
            let right = reading(Channel::Right);
            IrSample { t, left, right }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actuation::{calibrate_ir, EdgeKind, ThresholdParams, TwitchDetector};
    use crate::orientation::HeadAngles;
    use crate::sim::trajectory::ConstantRate;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn still() -> ConstantRate {
        ConstantRate {
            start: HeadAngles::default(),
            rates: HeadAngles::default(),
            duration: 1.0,
        }
    }

    #[test]
    fn resting_head_reads_gravity_and_field() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let s = inverse_imu(&still(), 0.0, &NoiseSpec::default(), 100.0, 50, &mut rng);
        for x in &s {
            assert_eq!(x.gyro, [0.0; 3]);
            assert!((x.accel[2] - 1.0).abs() < 1e-12 && x.accel[0].abs() < 1e-12);
            let m = x.mag.unwrap();
            assert!((m[0] - 0.5).abs() < 1e-12 && (m[2] + 0.8660254).abs() < 1e-6);
        }
    }

    #[test]
    fn spin_about_vertical_reads_on_gyro_z() {
        let spin = ConstantRate {
            start: HeadAngles::default(),
            rates: HeadAngles::new(10.0, 0.0),
            duration: 5.0,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let s = inverse_imu(&spin, 25.0, &NoiseSpec::default(), 100.0, 400, &mut rng);
        for x in &s {
            assert!((x.gyro[2] - 0.1745).abs() < 1e-4);
            assert!(x.gyro[0].abs() < 1e-12 && x.gyro[1].abs() < 1e-12);
        }
    }

    #[test]
    fn noise_is_seeded() {
        let noise = NoiseSpec {
            gyro_sigma: 0.01,
            accel_sigma: 0.01,
            ..Default::default()
        };
        let a = inverse_imu(&still(), 0.0, &noise, 100.0, 20, &mut ChaCha8Rng::seed_from_u64(3));
        let b = inverse_imu(&still(), 0.0, &noise, 100.0, 20, &mut ChaCha8Rng::seed_from_u64(3));
        let c = inverse_imu(&still(), 0.0, &noise, 100.0, 20, &mut ChaCha8Rng::seed_from_u64(4));
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    fn edges(events: &[TwitchEvent], sigma: f64) -> Vec<(Channel, EdgeKind)> {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ir = synth_twitch(events, 2.0, IR_BASELINE, sigma, 100.0, 700, &mut rng);
        let baseline = calibrate_ir(&ir[..200], &ThresholdParams::default()).unwrap();
        let mut det = TwitchDetector::new(baseline);
        ir.iter().flat_map(|s| det.feed(s)).map(|e| (e.channel, e.kind)).collect()
    }

    fn pulse(t: f64, channel: Channel) -> TwitchEvent {
        TwitchEvent {
            t,
            channel,
            pulse_len: 0.2,
            amplitude: 80.0,
        }
    }

    #[test]
    fn quiet_stream_stays_near_baseline() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let ir = synth_twitch(&[], 0.0, IR_BASELINE, 1.5, 100.0, 1000, &mut rng);
        assert!(ir.iter().all(|s| (s.left as f64 - 512.0).abs() <= 8.0));
        assert!(edges(&[], 1.5).is_empty());
    }

    #[test]
    fn one_pulse_is_one_click() {
        for sigma in [0.0, 1.0] {
            let got = edges(&[pulse(1.0, Channel::Left)], sigma);
            assert_eq!(got, vec![(Channel::Left, EdgeKind::Press), (Channel::Left, EdgeKind::Release)]);
        }
    }

    #[test]
    fn two_pulses_give_two_ordered_clicks() {
        let got = edges(&[pulse(1.0, Channel::Right), pulse(2.0, Channel::Right)], 1.0);
        assert_eq!(
            got,
            vec![
                (Channel::Right, EdgeKind::Press),
                (Channel::Right, EdgeKind::Release),
                (Channel::Right, EdgeKind::Press),
                (Channel::Right, EdgeKind::Release),
            ]
        );
    }
}
