use crate::orientation::HeadAngles;

use super::DriverConfig;

/// Exponential moving average followed by a deadband on the emitted value.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Smoother {
    ema: Option<HeadAngles>,
    emitted: Option<HeadAngles>,
}

impl Smoother {
    pub fn reset(&mut self) {
        *self = Self::default();
    }

    /// Current EMA value before the deadband.
    pub fn average(&self) -> Option<HeadAngles> {
        self.ema
    }
}

/// One smoothing step. The first sample seeds the average and is emitted as-is.
pub fn smooth(angles: HeadAngles, state: &mut Smoother, cfg: &DriverConfig) -> HeadAngles {
    let a = cfg.ema_alpha;
    let ema = match state.ema {
        None => angles,
        Some(prev) => HeadAngles::new(
            a * angles.yaw + (1.0 - a) * prev.yaw,
            a * angles.pitch + (1.0 - a) * prev.pitch,
        ),
    };
    state.ema = Some(ema);
    let out = match state.emitted {
        Some(last)
            if (ema.yaw - last.yaw).abs() <= cfg.deadband_deg
                && (ema.pitch - last.pitch).abs() <= cfg.deadband_deg =>
        {
            last
        }
        _ => ema,
    };
    state.emitted = Some(out);
    out
}
