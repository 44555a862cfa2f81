//! Seeded synthetic scenes for desk-scale experiments.
//!
//! Real denoising datasets are large and not redistributable, so tests and
//! examples run on generated scenes instead: a translating bar and a
//! rotating edge provide moving spatial structure, and a saturating stream
//! exercises the degenerate all-pixels-firing regime.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::event::{Event, EventStream, Polarity, SensorGeometry};

/// Parameters of a horizontally translating bar.
///
/// The bar wraps around the sensor; its leading edge emits ON events and
/// its trailing edge OFF events. Each time an edge crosses a column, every
/// row fires with probability `row_density`, at the crossing time plus a
/// uniform jitter of up to `jitter_us` either way.
#[derive(Debug, Clone)]
pub struct MovingBarScene {
    pub geometry: SensorGeometry,
    pub duration_us: u64,
    /// Time for one full sweep across the sensor width.
    pub traverse_us: u64,
    pub bar_width_px: u16,
    /// Probability that a row fires at each column crossing.
    pub row_density: f64,
    pub jitter_us: u64,
    pub seed: u64,
}

impl MovingBarScene {
    /// A scene with the default bar: 500 ms per sweep, 2 px wide, 35% row
    /// density, 2 ms jitter.
    pub fn new(geometry: SensorGeometry, duration_us: u64, seed: u64) -> Self {
        MovingBarScene {
            geometry,
            duration_us,
            traverse_us: 500_000,
            bar_width_px: 2,
            row_density: 0.35,
            jitter_us: 2_000,
            seed,
        }
    }
}

/// Parameters of an edge rotating about the sensor center.
///
/// An ON ray and an opposite OFF ray sweep one revolution per
/// `rotation_us`, sampled at 360 angular steps; each cell along a ray
/// fires with probability `density`.
#[derive(Debug, Clone)]
pub struct RotatingEdgeScene {
    pub geometry: SensorGeometry,
    pub duration_us: u64,
    pub rotation_us: u64,
    pub density: f64,
    pub jitter_us: u64,
    pub seed: u64,
}

impl RotatingEdgeScene {
    /// A scene with the default edge: one revolution per 500 ms, 60%
    /// density, 1 ms jitter.
    pub fn new(geometry: SensorGeometry, duration_us: u64, seed: u64) -> Self {
        RotatingEdgeScene {
            geometry,
            duration_us,
            rotation_us: 500_000,
            density: 0.6,
            jitter_us: 1_000,
            seed,
        }
    }
}

fn check_density(density: f64) -> Result<()> {
    if !density.is_finite() || !(0.0..=1.0).contains(&density) {
        return Err(Error::InvalidScene("density must be within [0, 1]"));
    }
    Ok(())
}

fn jittered(rng: &mut ChaCha8Rng, t: u64, jitter_us: u64, duration_us: u64) -> u64 {
    let last = duration_us - 1;
    if jitter_us == 0 {
        return t.min(last);
    }
    let offset = rng.random_range(-(jitter_us as i64)..=jitter_us as i64);
    (t as i64 + offset).clamp(0, last as i64) as u64
}

/// Generates the moving-bar scene as an unlabeled stream over
/// `[0, duration_us]`.
pub fn moving_bar(scene: &MovingBarScene) -> Result<EventStream> {
    let width = scene.geometry.width();
    if scene.duration_us == 0 {
        return Err(Error::ZeroDuration);
    }
    if scene.traverse_us < width as u64 {
        return Err(Error::InvalidScene(
            "traverse time shorter than sensor width",
        ));
    }
    if scene.bar_width_px == 0 || scene.bar_width_px > width {
        return Err(Error::InvalidScene(
            "bar width must be in [1, sensor width]",
        ));
    }
    check_density(scene.row_density)?;

    let mut rng = ChaCha8Rng::seed_from_u64(scene.seed);
    let mut events = Vec::new();
    let mut sweep_base = 0u64;
    while sweep_base < scene.duration_us {
        for c in 0..width {
            let t = sweep_base + c as u64 * scene.traverse_us / width as u64;
            if t >= scene.duration_us {
                break;
            }
            let trail = (c + width - scene.bar_width_px) % width;
            for y in 0..scene.geometry.height() {
                if rng.random_bool(scene.row_density) {
                    events.push(Event {
                        t: jittered(&mut rng, t, scene.jitter_us, scene.duration_us),
                        x: c,
                        y,
                        polarity: Polarity::On,
                    });
                }
                if rng.random_bool(scene.row_density) {
                    events.push(Event {
                        t: jittered(&mut rng, t, scene.jitter_us, scene.duration_us),
                        x: trail,
                        y,
                        polarity: Polarity::Off,
                    });
                }
            }
        }
        sweep_base += scene.traverse_us;
    }
    events.sort_by_key(|e| e.t);
    EventStream::new(scene.geometry, events, 0, scene.duration_us)
}

/// Generates the rotating-edge scene as an unlabeled stream over
/// `[0, duration_us]`.
pub fn rotating_edge(scene: &RotatingEdgeScene) -> Result<EventStream> {
    let w = scene.geometry.width();
    let h = scene.geometry.height();
    if scene.duration_us == 0 {
        return Err(Error::ZeroDuration);
    }
    if scene.rotation_us < 360 {
        return Err(Error::InvalidScene("rotation period shorter than 360 us"));
    }
    if w.min(h) < 6 {
        return Err(Error::InvalidScene("sensor too small for a rotating edge"));
    }
    check_density(scene.density)?;

    let (cx, cy) = (w as f64 / 2.0, h as f64 / 2.0);
    let max_radius = (w.min(h) / 2 - 1) as u64;
    let step_us = scene.rotation_us / 360;
    let mut rng = ChaCha8Rng::seed_from_u64(scene.seed);
    let mut events = Vec::new();
    let mut t = 0u64;
    while t < scene.duration_us {
        let angle =
            (t % scene.rotation_us) as f64 / scene.rotation_us as f64 * std::f64::consts::TAU;
        for (phase, polarity) in [(0.0, Polarity::On), (std::f64::consts::PI, Polarity::Off)] {
            let (dy, dx) = (angle + phase).sin_cos();
            for r in 1..=max_radius {
                let x = (cx + dx * r as f64).floor();
                let y = (cy + dy * r as f64).floor();
                if x < 0.0 || y < 0.0 || x >= w as f64 || y >= h as f64 {
                    continue;
                }
                if rng.random_bool(scene.density) {
                    events.push(Event {
                        t: jittered(&mut rng, t, scene.jitter_us, scene.duration_us),
                        x: x as u16,
                        y: y as u16,
                        polarity,
                    });
                }
            }
        }
        t += step_us;
    }
    events.sort_by_key(|e| e.t);
    EventStream::new(scene.geometry, events, 0, scene.duration_us)
}

/// A stream in which every pixel fires once per `period_us`, starting at
/// t = 0. Any accumulation window at least one period long sees every
/// pixel lit, so the whole contrast curve collapses to zero.
pub fn saturating_stream(
    geometry: SensorGeometry,
    duration_us: u64,
    period_us: u64,
) -> Result<EventStream> {
    if duration_us == 0 {
        return Err(Error::ZeroDuration);
    }
    if period_us == 0 || period_us > duration_us {
        return Err(Error::InvalidScene("period must be in [1, duration]"));
    }
    let ticks = duration_us.div_ceil(period_us);
    let mut events = Vec::with_capacity(ticks as usize * geometry.pixel_count());
    let mut t = 0u64;
    while t < duration_us {
        for y in 0..geometry.height() {
            for x in 0..geometry.width() {
                events.push(Event {
                    t,
                    x,
                    y,
                    polarity: Polarity::On,
                });
            }
        }
        t += period_us;
    }
    EventStream::new(geometry, events, 0, duration_us)
}
