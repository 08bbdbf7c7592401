use serde::{Deserialize, Serialize};

use super::{OrientationError, Quaternion};

/// Shortest accepted averaging window.
pub const MIN_CALIBRATION_WINDOW_S: f64 = 2.0;
/// Largest accepted angle between any window sample and the averaged reference.
pub const MAX_CALIBRATION_SPREAD_DEG: f64 = 5.0;

/// Orientation the user held while facing the screen centre.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReference {
    pub q_ref: Quaternion,
    /// Timestamp of the last sample in the window.
    pub captured_at: f64,
    pub window_len: f64,
}

impl CalibrationReference {
    pub fn identity() -> Self {
        Self {
            q_ref: Quaternion::IDENTITY,
            captured_at: 0.0,
            window_len: 0.0,
        }
    }
}

/// Average a window of `(t, q)` estimates into a reference orientation.
///
/// Samples are sign-aligned to the first one before the component-wise mean,
/// so `q` and `-q` contribute the same rotation. The window length counts one
/// sample period past the last timestamp, so 200 samples at 100 Hz span 2 s.
pub fn capture_reference(window: &[(f64, Quaternion)]) -> Result<CalibrationReference, OrientationError> {
    let (first, last) = match (window.first(), window.last()) {
        (Some(f), Some(l)) if window.len() >= 2 => (f.0, l.0),
        _ => return Err(OrientationError::WindowTooShort(0.0)),
    };
    let span = last - first;
    let window_len = span + span / (window.len() - 1) as f64;
    if window_len < MIN_CALIBRATION_WINDOW_S - 1e-9 {
        return Err(OrientationError::WindowTooShort(window_len));
    }

    let pivot = window[0].1.normalized();
    let mut sum = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    for (_, q) in window {
        let q = q.normalized();
        let aligned = if q.dot(&pivot) < 0.0 { -q } else { q };
        sum = Quaternion::new(sum.w + aligned.w, sum.x + aligned.x, sum.y + aligned.y, sum.z + aligned.z);
    }
    let q_ref = sum.normalized().canonical();

    let spread = window
        .iter()
        .map(|(_, q)| q_ref.angle_to(q).to_degrees())
        .fold(0.0, f64::max);
    if spread > MAX_CALIBRATION_SPREAD_DEG {
        return Err(OrientationError::CalibrationUnstable { spread_deg: spread });
    }
    Ok(CalibrationReference {
        q_ref,
        captured_at: last,
        window_len,
    })
}
