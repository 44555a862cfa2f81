//! Labeled background-activity noise injection.
//!
//! Noise follows a homogeneous Poisson process at a fixed per-pixel rate,
//! realized as one global draw: the total count is Poisson with mean
//! rate * duration * pixel_count, and positions and times are uniform.
//! For a homogeneous rate this is distribution-identical to simulating
//! each pixel separately, and much faster.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::event::{Event, EventStream, Label, Polarity};

/// The noise rates used for benchmark sweeps, in events per second per
/// pixel.
pub const PRESET_RATES_HZ: [f64; 3] = [1.0, 3.0, 5.0];

/// Injection ceiling; a draw beyond this indicates a nonsensical rate.
const MAX_NOISE_EVENTS: u64 = 1_000_000_000;

/// Configuration of the noise injector.
#[derive(Debug, Clone, Copy)]
pub struct NoiseConfig {
    /// Expected noise events per second per pixel. Must be finite and
    /// non-negative.
    pub rate_hz_per_pixel: f64,
    pub seed: u64,
    /// Probability that a noise event has ON polarity.
    pub polarity_split: f64,
}

impl NoiseConfig {
    pub fn new(rate_hz_per_pixel: f64, seed: u64) -> Self {
        NoiseConfig {
            rate_hz_per_pixel,
            seed,
            polarity_split: 0.5,
        }
    }

    fn validate(&self) -> Result<()> {
        if !self.rate_hz_per_pixel.is_finite() || self.rate_hz_per_pixel < 0.0 {
            return Err(Error::InvalidRate(self.rate_hz_per_pixel));
        }
        if !self.polarity_split.is_finite() || !(0.0..=1.0).contains(&self.polarity_split) {
            return Err(Error::InvalidPolaritySplit(self.polarity_split));
        }
        Ok(())
    }
}

/// Adds Poisson background noise to `stream` and labels the result.
///
/// Input events keep their labels if the stream is already labeled and are
/// labeled Signal otherwise; generated events are labeled Noise. Noise
/// timestamps are uniform over `[t_start, t_end)`, positions uniform over
/// the sensor, polarity Bernoulli(`polarity_split`). The merge is stable
/// with input events first on timestamp ties, so signal is bit-identical
/// before and after injection. Fully deterministic for a fixed seed.
pub fn inject(stream: &EventStream, cfg: &NoiseConfig) -> Result<EventStream> {
    cfg.validate()?;
    let signal = if stream.is_labeled() {
        stream.clone()
    } else {
        stream.labeled_as(Label::Signal)
    };
    if cfg.rate_hz_per_pixel == 0.0 {
        return Ok(signal);
    }
    let duration_s = stream.duration_us() as f64 / 1e6;
    if stream.duration_us() == 0 {
        return Err(Error::ZeroDuration);
    }

    let geometry = stream.geometry();
    let lambda = cfg.rate_hz_per_pixel * duration_s * geometry.pixel_count() as f64;
    let poisson = Poisson::new(lambda).map_err(|_| Error::InvalidRate(cfg.rate_hz_per_pixel))?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let drawn = poisson.sample(&mut rng);
    if !(0.0..=MAX_NOISE_EVENTS as f64).contains(&drawn) {
        return Err(Error::TooManyEvents(drawn as u64));
    }
    let count = drawn as u64;

    let mut noise = Vec::with_capacity(count as usize);
    for _ in 0..count {
        noise.push(Event {
            t: rng.random_range(stream.t_start()..stream.t_end()),
            x: rng.random_range(0..geometry.width()),
            y: rng.random_range(0..geometry.height()),
            polarity: if rng.random_bool(cfg.polarity_split) {
                Polarity::On
            } else {
                Polarity::Off
            },
        });
    }
    noise.sort_by_key(|e| e.t);
    let noise_stream =
        EventStream::from_raw_parts(geometry, noise, None, stream.t_start(), stream.t_end())
            .labeled_as(Label::Noise);
    signal.merge(&noise_stream)
}
