//! Shared fixtures for the benchmark suite.
//!
//! Every builder is seeded so that repeated `cargo bench` runs measure
//! identical workloads.

use aocc_core::event::EventStream;
use aocc_core::noise::{inject, NoiseConfig};
use aocc_core::synth::{moving_bar, MovingBarScene};
use aocc_core::SensorGeometry;

/// One-second moving-bar recording on the full 346x260 sensor.
pub fn sensor_scene() -> EventStream {
    let mut scene = MovingBarScene::new(SensorGeometry::DAVIS346, 1_000_000, 31);
    scene.row_density = 0.6;
    scene.jitter_us = 1_000;
    moving_bar(&scene).expect("valid scene")
}

/// Half-second bar on a 64x64 crop, the small end of the workloads.
pub fn small_scene() -> EventStream {
    let mut scene = MovingBarScene::new(small_geometry(), 500_000, 5);
    scene.traverse_us = 250_000;
    moving_bar(&scene).expect("valid scene")
}

pub fn small_geometry() -> SensorGeometry {
    SensorGeometry::new(64, 64).expect("valid geometry")
}

/// Adds labeled background activity at `rate` events per pixel per second.
pub fn with_noise(stream: &EventStream, rate: f64) -> EventStream {
    inject(stream, &NoiseConfig::new(rate, 431)).expect("valid noise config")
}
