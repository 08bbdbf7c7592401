//! Head-mounted assistive mouse pipeline.
//!
//! Sensor fusion turns 9-axis IMU samples into head yaw/pitch, infrared cheek
//! sensors produce click edges, both travel as framed bytes to a driver state
//! machine that emits cursor, button and mode events. A simulator synthesizes
//! sensor streams from scripted head motion, and the `eval` module scores
//! pointing, typing and usability studies.

pub mod orientation;
pub mod actuation;
pub mod wire;
pub mod driver;
pub mod eval;
pub mod sim;
pub mod cli;
