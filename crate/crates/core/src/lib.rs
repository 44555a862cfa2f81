//! Evaluation toolkit for event-camera denoising.
//!
//! The crate covers the full loop of a denoising experiment:
//!
//! * [`event`] defines the stream model shared by every module;
//! * [`synth`] generates clean scenes and [`noise`] injects labeled
//!   background-activity noise into them;
//! * [`denoise`] provides baseline filters to evaluate;
//! * [`ccc`] scores outputs without ground truth via contrast curves,
//!   [`metrics`] scores them against labels, and [`esr`] computes the
//!   event-structural-ratio baseline;
//! * [`io`] reads and writes the CSV and binary stream formats.
//!
//! Curve evaluation parallelizes across interval-grid points with rayon;
//! results are deterministic for a fixed input and seed regardless of
//! thread count.

pub mod ccc;
pub mod denoise;
pub mod error;
pub mod esr;
pub mod event;
pub mod frame;
pub mod io;
pub mod metrics;
pub mod noise;
pub mod synth;

pub use error::{Error, Result};
pub use event::{Event, EventStream, Label, LabeledEvent, Polarity, SensorGeometry};
