//! Byte framing between transmitter, receiver and driver.
//!
//! ```text
//! +------+------+-----+-----------------+-----+
//! | SYNC | TYPE | LEN | PAYLOAD (LE)    | CHK |
//! | 0xA5 | 1 B  | 1 B | LEN bytes       | 1 B |
//! +------+------+-----+-----------------+-----+
//! ```
//!
//! `CHK` is the XOR of TYPE, LEN and every payload byte. Payload lengths are
//! fixed per type: movement 4 (yaw, pitch as i16 centi-degrees), click 2
//! (channel bitmask, edge), status 1 (status code). The same layout is used
//! on disk for `.auxw` captures.

use std::fmt;

use thiserror::Error;

use crate::actuation::{Channel, EdgeKind};
use crate::orientation::HeadAngles;

pub const SYNC: u8 = 0xA5;
pub const TYPE_MOVEMENT: u8 = 0x01;
pub const TYPE_CLICK: u8 = 0x02;
pub const TYPE_STATUS: u8 = 0x03;
const HEADER_LEN: usize = 3;
pub const MAX_FRAME_LEN: usize = HEADER_LEN + 4 + 1;

#[derive(Debug, Error, PartialEq)]
pub enum WireError {
    #[error("angle {0} deg is outside the centi-degree range")]
    Range(f64),
    #[error("click bitmask {0:#04x} uses undefined bits or is empty")]
    InvalidMask(u8),
}

/// Angle in hundredths of a degree.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CentiDegrees(pub i16);

impl CentiDegrees {
    pub const MIN_DEG: f64 = i16::MIN as f64 / 100.0;
    pub const MAX_DEG: f64 = i16::MAX as f64 / 100.0;

    pub fn from_degrees(deg: f64) -> Result<Self, WireError> {
        let c = (deg * 100.0).round();
        if !c.is_finite() || c < i16::MIN as f64 || c > i16::MAX as f64 {
            return Err(WireError::Range(deg));
        }
        Ok(Self(c as i16))
    }

    pub fn degrees(self) -> f64 {
        self.0 as f64 / 100.0
    }
}

/// Non-empty set of cheek channels.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct ChannelMask(u8);

impl ChannelMask {
    pub const LEFT: ChannelMask = ChannelMask(0x01);
    pub const RIGHT: ChannelMask = ChannelMask(0x02);
    pub const BOTH: ChannelMask = ChannelMask(0x03);

    pub fn from_bits(bits: u8) -> Result<Self, WireError> {
        if bits == 0 || bits & !0x03 != 0 {
            return Err(WireError::InvalidMask(bits));
        }
        Ok(Self(bits))
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn contains(self, channel: Channel) -> bool {
        self.0 & ChannelMask::from(channel).0 != 0
    }

    /// Channels in the mask, left first.
    pub fn channels(self) -> impl Iterator<Item = Channel> {
        Channel::BOTH.into_iter().filter(move |c| self.contains(*c))
    }
}

impl From<Channel> for ChannelMask {
    fn from(c: Channel) -> Self {
        match c {
            Channel::Left => ChannelMask::LEFT,
            Channel::Right => ChannelMask::RIGHT,
        }
    }
}

impl fmt::Debug for ChannelMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            0x01 => f.write_str("Left"),
            0x02 => f.write_str("Right"),
            _ => f.write_str("Both"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StatusCode {
    Calibrating = 0x01,
    Ready = 0x02,
    CalibrationFailed = 0x03,
}

impl StatusCode {
    pub fn from_byte(b: u8) -> Option<Self> {
        match b {
            0x01 => Some(StatusCode::Calibrating),
            0x02 => Some(StatusCode::Ready),
            0x03 => Some(StatusCode::CalibrationFailed),
            _ => None,
        }
    }
}

fn edge_byte(kind: EdgeKind) -> u8 {
    match kind {
        EdgeKind::Press => 0x01,
        EdgeKind::Release => 0x02,
    }
}

fn edge_from_byte(b: u8) -> Option<EdgeKind> {
    match b {
        0x01 => Some(EdgeKind::Press),
        0x02 => Some(EdgeKind::Release),
        _ => None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Frame {
    /// Absolute head angles relative to the calibration reference.
    Movement { yaw: CentiDegrees, pitch: CentiDegrees },
    Click { channels: ChannelMask, edge: EdgeKind },
    Status(StatusCode),
}

impl Frame {
    pub fn movement(angles: HeadAngles) -> Result<Frame, WireError> {
        Ok(Frame::Movement {
            yaw: CentiDegrees::from_degrees(angles.yaw)?,
            pitch: CentiDegrees::from_degrees(angles.pitch)?,
        })
    }

    pub fn click(channel: Channel, edge: EdgeKind) -> Frame {
        Frame::Click {
            channels: channel.into(),
            edge,
        }
    }

    pub fn type_byte(&self) -> u8 {
        match self {
            Frame::Movement { .. } => TYPE_MOVEMENT,
            Frame::Click { .. } => TYPE_CLICK,
            Frame::Status(_) => TYPE_STATUS,
        }
    }
}

fn payload_len(type_byte: u8) -> Option<u8> {
    match type_byte {
        TYPE_MOVEMENT => Some(4),
        TYPE_CLICK => Some(2),
        TYPE_STATUS => Some(1),
        _ => None,
    }
}

/// Append the encoding of `frame` to `out`.
pub fn encode_into(frame: &Frame, out: &mut Vec<u8>) {
    let start = out.len();
    out.push(SYNC);
    out.push(frame.type_byte());
    out.push(0);
    match *frame {
        Frame::Movement { yaw, pitch } => {
            out.extend_from_slice(&yaw.0.to_le_bytes());
            out.extend_from_slice(&pitch.0.to_le_bytes());
        }
        Frame::Click { channels, edge } => {
            out.push(channels.bits());
            out.push(edge_byte(edge));
        }
        Frame::Status(code) => out.push(code as u8),
    }
    out[start + 2] = (out.len() - start - HEADER_LEN) as u8;
    let chk = checksum(&out[start + 1..]);
    out.push(chk);
}

pub fn encode_frame(frame: &Frame) -> Vec<u8> {
    let mut out = Vec::with_capacity(MAX_FRAME_LEN);
    encode_into(frame, &mut out);
    out
}

fn checksum(bytes: &[u8]) -> u8 {
    bytes.iter().fold(0, |acc, b| acc ^ b)
}

fn parse_payload(type_byte: u8, payload: &[u8]) -> Option<Frame> {
    match type_byte {
        TYPE_MOVEMENT => Some(Frame::Movement {
            yaw: CentiDegrees(i16::from_le_bytes([payload[0], payload[1]])),
            pitch: CentiDegrees(i16::from_le_bytes([payload[2], payload[3]])),
        }),
        TYPE_CLICK => Some(Frame::Click {
            channels: ChannelMask::from_bits(payload[0]).ok()?,
            edge: edge_from_byte(payload[1])?,
        }),
        TYPE_STATUS => StatusCode::from_byte(payload[0]).map(Frame::Status),
        _ => None,
    }
}

/// Decoder counters. Once a violation is counted the decoder is resynchronizing
/// and further rejected SYNC candidates are tallied as `false_syncs` until the
/// next good frame, so one corrupted frame costs exactly one error.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DecodeStats {
    pub frames: u64,
    pub checksum_errors: u64,
    pub type_errors: u64,
    pub length_errors: u64,
    pub payload_errors: u64,
    /// Runs of bytes seen while hunting for SYNC outside of error recovery.
    pub desyncs: u64,
    pub false_syncs: u64,
    pub skipped_bytes: u64,
}

impl DecodeStats {
    pub fn errors(&self) -> u64 {
        self.checksum_errors + self.type_errors + self.length_errors + self.payload_errors + self.desyncs
    }
}

#[derive(Clone, Copy, Debug)]
enum Violation {
    Checksum,
    Type,
    Length,
    Payload,
}

/// Incremental decoder. Bytes are consumed one at a time, so the internal
/// buffer never holds more than one partial frame.
#[derive(Clone, Debug, Default)]
pub struct DecodeState {
    buf: Vec<u8>,
    stats: DecodeStats,
    recovering: bool,
}

impl DecodeState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn stats(&self) -> &DecodeStats {
        &self.stats
    }

    pub fn buffered(&self) -> usize {
        self.buf.len()
    }

    /// Feed a chunk and return every frame completed by it.
    pub fn push(&mut self, bytes: &[u8]) -> Vec<Frame> {
        let mut frames = Vec::new();
        for &b in bytes {
            self.buf.push(b);
            self.drain(&mut frames);
        }
        frames
    }

    fn drain(&mut self, frames: &mut Vec<Frame>) {
        while let Some(&first) = self.buf.first() {
            if first != SYNC {
                if !self.recovering {
                    self.stats.desyncs += 1;
                    self.recovering = true;
                }
                self.stats.skipped_bytes += 1;
                self.buf.remove(0);
                continue;
            }
            if self.buf.len() < HEADER_LEN {
                return;
            }
            let type_byte = self.buf[1];
            let Some(len) = payload_len(type_byte) else {
                self.reject(Violation::Type);
                continue;
            };
            if self.buf[2] != len {
                self.reject(Violation::Length);
                continue;
            }
            let total = HEADER_LEN + len as usize + 1;
            if self.buf.len() < total {
                return;
            }
            if checksum(&self.buf[1..total - 1]) != self.buf[total - 1] {
                self.reject(Violation::Checksum);
                continue;
            }
            match parse_payload(type_byte, &self.buf[HEADER_LEN..total - 1]) {
                Some(frame) => {
                    frames.push(frame);
                    self.stats.frames += 1;
                    self.recovering = false;
                    self.buf.drain(..total);
                }
                None => self.reject(Violation::Payload),
            }
        }
    }

    /// Count the violation and drop the SYNC byte so the hunt restarts at the
    /// next candidate.
    fn reject(&mut self, violation: Violation) {
        if self.recovering {
            self.stats.false_syncs += 1;
        } else {
            let counter = match violation {
                Violation::Checksum => &mut self.stats.checksum_errors,
                Violation::Type => &mut self.stats.type_errors,
                Violation::Length => &mut self.stats.length_errors,
                Violation::Payload => &mut self.stats.payload_errors,
            };
            *counter += 1;
            self.recovering = true;
        }
        self.buf.remove(0);
        self.stats.skipped_bytes += 1;
    }
}

/// Functional form of [`DecodeState::push`].
pub fn decode_frames(bytes: &[u8], mut state: DecodeState) -> (Vec<Frame>, DecodeState) {
    let frames = state.push(bytes);
    (frames, state)
}
