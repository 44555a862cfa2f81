//! Baseline denoisers sharing one interface.
//!
//! Three filters are provided: the double window filter (DWF), a
//! score-threshold filter for externally produced per-event scores, and a
//! passthrough. Every filter returns a subsequence of its input; events are
//! never created, reordered, or mutated.

use std::collections::VecDeque;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::event::{EventStream, Label};

/// Distance used by the DWF neighbor test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NeighborNorm {
    /// Chessboard distance `max(|dx|, |dy|)`; the search region is a
    /// square window.
    #[default]
    Chebyshev,
    /// City-block distance `|dx| + |dy|`; the search region is a diamond.
    Manhattan,
}

impl NeighborNorm {
    fn distance(self, a: (u16, u16), b: (u16, u16)) -> u16 {
        let dx = a.0.abs_diff(b.0);
        let dy = a.1.abs_diff(b.1);
        match self {
            NeighborNorm::Chebyshev => dx.max(dy),
            NeighborNorm::Manhattan => dx.saturating_add(dy),
        }
    }
}

/// Double window filter parameters.
#[derive(Debug, Clone, Copy)]
pub struct DwfConfig {
    /// Neighbor search radius in pixels.
    pub search_radius: u16,
    /// Capacity of each of the two FIFO windows.
    pub buffer_size: usize,
    /// Minimum number of in-radius window events needed to accept.
    pub support_count: usize,
    pub norm: NeighborNorm,
}

impl DwfConfig {
    pub fn new(search_radius: u16, buffer_size: usize) -> Self {
        DwfConfig {
            search_radius,
            buffer_size,
            support_count: 1,
            norm: NeighborNorm::Chebyshev,
        }
    }

    fn validate(&self, stream: &EventStream) -> Result<()> {
        let max = stream.geometry().width().max(stream.geometry().height());
        if self.search_radius == 0 || self.search_radius > max {
            return Err(Error::InvalidSearchRadius {
                radius: self.search_radius,
                max,
            });
        }
        if self.buffer_size == 0 {
            return Err(Error::InvalidDenoiserConfig("buffer size must be positive"));
        }
        if self.support_count == 0 {
            return Err(Error::InvalidDenoiserConfig(
                "support count must be positive",
            ));
        }
        Ok(())
    }
}

impl Default for DwfConfig {
    /// Radius 4, buffer 200, support 1, Chebyshev.
    fn default() -> Self {
        DwfConfig::new(4, 200)
    }
}

/// An event stream with one classifier score in [0, 1] per event.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredStream {
    stream: EventStream,
    scores: Vec<f64>,
}

impl ScoredStream {
    /// Pairs a stream with scores, checking arity and range.
    pub fn new(stream: EventStream, scores: Vec<f64>) -> Result<Self> {
        if scores.len() != stream.len() {
            return Err(Error::ScoreCountMismatch {
                scores: scores.len(),
                events: stream.len(),
            });
        }
        for (index, &value) in scores.iter().enumerate() {
            if !value.is_finite() || !(0.0..=1.0).contains(&value) {
                return Err(Error::InvalidScore { index, value });
            }
        }
        Ok(ScoredStream { stream, scores })
    }

    pub fn stream(&self) -> &EventStream {
        &self.stream
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn into_parts(self) -> (EventStream, Vec<f64>) {
        (self.stream, self.scores)
    }
}

// Builds the subsequence of `stream` selected by `keep`, reusing the
// original bounds and geometry. Subsequences of valid streams stay valid.
fn keep_subsequence(stream: &EventStream, keep: &[bool]) -> EventStream {
    debug_assert_eq!(keep.len(), stream.len());
    let events = stream
        .events()
        .iter()
        .zip(keep)
        .filter(|(_, &k)| k)
        .map(|(&e, _)| e)
        .collect();
    let labels = stream.labels().map(|labels| {
        labels
            .iter()
            .zip(keep)
            .filter(|(_, &k)| k)
            .map(|(&l, _)| l)
            .collect()
    });
    let out = EventStream::from_raw_parts(
        stream.geometry(),
        events,
        labels,
        stream.t_start(),
        stream.t_end(),
    );
    debug_assert!(out.validate().is_empty());
    out
}

/// Runs the double window filter over `stream` in time order.
///
/// Two FIFO windows hold the coordinates of the most recent
/// `buffer_size` accepted and `buffer_size` rejected events. An incoming
/// event is accepted iff at least `support_count` events in the union of
/// both windows lie within `search_radius` of it; it then joins the
/// accepted window, otherwise the rejected one. The first event of any
/// stream has no possible neighbor and is always rejected.
pub fn dwf_denoise(stream: &EventStream, cfg: &DwfConfig) -> Result<EventStream> {
    cfg.validate(stream)?;
    let mut accepted: VecDeque<(u16, u16)> = VecDeque::with_capacity(cfg.buffer_size);
    let mut rejected: VecDeque<(u16, u16)> = VecDeque::with_capacity(cfg.buffer_size);
    let mut keep = Vec::with_capacity(stream.len());
    for event in stream.events() {
        let pos = (event.x, event.y);
        let mut support = 0usize;
        let mut hit = false;
        for &other in accepted.iter().chain(rejected.iter()) {
            if cfg.norm.distance(pos, other) <= cfg.search_radius {
                support += 1;
                if support >= cfg.support_count {
                    hit = true;
                    break;
                }
            }
        }
        let window = if hit { &mut accepted } else { &mut rejected };
        if window.len() == cfg.buffer_size {
            window.pop_front();
        }
        window.push_back(pos);
        keep.push(hit);
    }
    Ok(keep_subsequence(stream, &keep))
}

/// Keeps exactly the events whose score is at least `threshold`.
pub fn threshold_denoise(scored: &ScoredStream, threshold: f64) -> Result<EventStream> {
    if !threshold.is_finite() || !(0.0..=1.0).contains(&threshold) {
        return Err(Error::InvalidThreshold(threshold));
    }
    let keep: Vec<bool> = scored.scores().iter().map(|&s| s >= threshold).collect();
    Ok(keep_subsequence(scored.stream(), &keep))
}

/// The identity denoiser.
pub fn passthrough(stream: &EventStream) -> EventStream {
    stream.clone()
}

/// Synthesizes per-event scores from ground-truth labels.
///
/// Scores are `clamp(label + N(0, sigma), 0, 1)` with label 1 for Signal
/// and 0 for Noise, standing in for a trained classifier so threshold
/// sweeps run without network weights. Deterministic per seed; sigma 0
/// yields the exact labels.
pub fn oracle_scores(stream: &EventStream, sigma: f64, seed: u64) -> Result<ScoredStream> {
    let labels = stream.labels().ok_or(Error::MissingLabels)?;
    if !sigma.is_finite() || sigma < 0.0 {
        return Err(Error::InvalidSigma(sigma));
    }
    let scores = if sigma == 0.0 {
        labels
            .iter()
            .map(|&l| if l == Label::Signal { 1.0 } else { 0.0 })
            .collect()
    } else {
        let normal = Normal::new(0.0, sigma).map_err(|_| Error::InvalidSigma(sigma))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        labels
            .iter()
            .map(|&l| {
                let base = if l == Label::Signal { 1.0 } else { 0.0 };
                (base + normal.sample(&mut rng)).clamp(0.0, 1.0)
            })
            .collect()
    };
    ScoredStream::new(stream.clone(), scores)
}

/// Selects one of the baseline denoisers.
#[derive(Debug, Clone, Copy)]
pub enum Denoiser {
    Dwf(DwfConfig),
    ScoreThreshold { threshold: f64 },
    Passthrough,
}

impl Denoiser {
    /// Applies the selected filter. `scores` is consulted only by
    /// `ScoreThreshold`, which requires it.
    pub fn apply(&self, stream: &EventStream, scores: Option<&[f64]>) -> Result<EventStream> {
        match *self {
            Denoiser::Dwf(cfg) => dwf_denoise(stream, &cfg),
            Denoiser::ScoreThreshold { threshold } => {
                let scores = scores.ok_or(Error::InvalidDenoiserConfig(
                    "score threshold requires per-event scores",
                ))?;
                let scored = ScoredStream::new(stream.clone(), scores.to_vec())?;
                threshold_denoise(&scored, threshold)
            }
            Denoiser::Passthrough => Ok(passthrough(stream)),
        }
    }
}
