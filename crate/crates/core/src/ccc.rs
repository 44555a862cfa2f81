//! Continuous contrast curve (CCC) and its area (AOCC).
//!
//! For each accumulation interval in a grid, the stream is partitioned into
//! consecutive half-open windows, each window is rendered to a binary frame,
//! and the per-window contrasts are averaged. The curve of averages against
//! interval length characterizes a stream without ground-truth labels:
//! noise pulls the whole curve down, and over-aggressive denoising does
//! too, which is what makes the area a usable tuning signal.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::event::EventStream;
use crate::frame::{accumulate_frame, contrast};

/// A strictly increasing list of accumulation intervals in microseconds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalGrid {
    intervals_us: Vec<u64>,
}

impl IntervalGrid {
    /// Builds a grid from explicit interval values.
    ///
    /// Values must be positive and strictly increasing.
    pub fn new(intervals_us: Vec<u64>) -> Result<Self> {
        if intervals_us.is_empty() {
            return Err(Error::InvalidGrid("grid has no intervals"));
        }
        if intervals_us[0] == 0 {
            return Err(Error::InvalidGrid("intervals must be positive"));
        }
        if intervals_us.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid("intervals must be strictly increasing"));
        }
        Ok(IntervalGrid { intervals_us })
    }

    /// Uniform grid `start, start+step, ...` up to and including `end`.
    pub fn uniform_us(start: u64, end: u64, step: u64) -> Result<Self> {
        if step == 0 {
            return Err(Error::InvalidGrid("step must be positive"));
        }
        if start == 0 || start > end {
            return Err(Error::InvalidGrid("need 0 < start <= end"));
        }
        Self::new((start..=end).step_by(step as usize).collect())
    }

    /// The default evaluation grid: 2 ms to 400 ms in 2 ms steps.
    pub fn standard() -> Self {
        Self::uniform_us(2_000, 400_000, 2_000).unwrap()
    }

    /// Coarse grid for short recordings: 1-60 ms in 1 ms steps, then
    /// 65-85 ms in 5 ms steps.
    pub fn eventzoom() -> Self {
        let mut intervals: Vec<u64> = (1_000..=60_000).step_by(1_000).collect();
        intervals.extend((65_000..=85_000).step_by(5_000));
        Self::new(intervals).unwrap()
    }

    pub fn intervals(&self) -> &[u64] {
        &self.intervals_us
    }

    pub fn len(&self) -> usize {
        self.intervals_us.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals_us.is_empty()
    }

    /// Checks that every interval fits inside the stream duration.
    pub fn validate_for(&self, stream: &EventStream) -> Result<()> {
        let duration = stream.duration_us();
        match self.intervals_us.last() {
            Some(&dt) if dt > duration => Err(Error::IntervalOutOfRange { dt, duration }),
            _ => Ok(()),
        }
    }
}

/// One point of a contrast curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub dt_us: u64,
    pub c_avg: f64,
}

/// Average contrast as a function of accumulation interval.
#[derive(Debug, Clone, PartialEq)]
pub struct ContrastCurve {
    points: Vec<CurvePoint>,
}

impl ContrastCurve {
    pub fn points(&self) -> &[CurvePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Index of the highest point; ties resolve to the first. `None` for an
    /// empty curve.
    pub fn argmax_index(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, p) in self.points.iter().enumerate() {
            match best {
                None => best = Some(i),
                Some(b) if p.c_avg > self.points[b].c_avg => best = Some(i),
                _ => {}
            }
        }
        best
    }

    pub fn argmax(&self) -> Option<CurvePoint> {
        self.argmax_index().map(|i| self.points[i])
    }
}

/// Mean per-window contrast of `stream` at one accumulation interval.
///
/// The recording is split into `m = floor(duration / dt)` half-open windows
/// anchored at `t_start`; the remainder past `m * dt` is discarded. Each
/// window becomes a binary frame whose contrast enters an arithmetic mean.
pub fn average_contrast(stream: &EventStream, dt_us: u64) -> Result<f64> {
    let duration = stream.duration_us();
    if dt_us == 0 || dt_us > duration {
        return Err(Error::IntervalOutOfRange {
            dt: dt_us,
            duration,
        });
    }
    let m = duration / dt_us;
    let t0 = stream.t_start();
    let mut sum = 0.0f64;
    for k in 0..m {
        let frame = accumulate_frame(stream, t0 + k * dt_us, t0 + (k + 1) * dt_us)?;
        sum += contrast(&frame)?;
    }
    Ok(sum / m as f64)
}

/// Evaluates the contrast curve of `stream` over `grid`.
///
/// Grid points are independent and computed in parallel; the summation
/// order inside each point is fixed, so results do not depend on the
/// thread count.
pub fn ccc(stream: &EventStream, grid: &IntervalGrid) -> Result<ContrastCurve> {
    grid.validate_for(stream)?;
    let points = grid
        .intervals()
        .par_iter()
        .map(|&dt_us| average_contrast(stream, dt_us).map(|c_avg| CurvePoint { dt_us, c_avg }))
        .collect::<Result<Vec<_>>>()?;
    Ok(ContrastCurve { points })
}

/// Areas of a contrast curve under its two conventions.
#[derive(Debug, Clone, PartialEq)]
pub struct AoccResult {
    /// Plain sum of the curve's average contrasts. This is the reported
    /// metric; it depends on the grid's point count.
    pub aocc_sum: f64,
    /// Trapezoidal area in contrast-microseconds, with a leading segment
    /// from (0, 0). Grid-density independent, kept for cross-grid
    /// comparisons.
    pub aocc_trapezoid: f64,
    pub curve: ContrastCurve,
}

impl AoccResult {
    /// The grid the curve was evaluated on, recovered from the points.
    pub fn grid(&self) -> IntervalGrid {
        IntervalGrid {
            intervals_us: self.curve.points().iter().map(|p| p.dt_us).collect(),
        }
    }
}

/// Integrates a contrast curve into both area figures.
pub fn aocc(curve: ContrastCurve) -> AoccResult {
    let mut sum = 0.0f64;
    let mut trapezoid = 0.0f64;
    let mut prev_dt = 0u64;
    let mut prev_c = 0.0f64;
    for p in curve.points() {
        sum += p.c_avg;
        trapezoid += (p.dt_us - prev_dt) as f64 * (p.c_avg + prev_c) / 2.0;
        prev_dt = p.dt_us;
        prev_c = p.c_avg;
    }
    AoccResult {
        aocc_sum: sum,
        aocc_trapezoid: trapezoid,
        curve,
    }
}

/// Convenience: curve plus areas in one call.
pub fn aocc_of_stream(stream: &EventStream, grid: &IntervalGrid) -> Result<AoccResult> {
    Ok(aocc(ccc(stream, grid)?))
}

/// Result of evaluating AOCC across a family of parameterized streams.
#[derive(Debug, Clone)]
pub struct SweepOutcome<P> {
    results: Vec<(P, AoccResult)>,
    argmax_index: usize,
}

impl<P> SweepOutcome<P> {
    pub fn results(&self) -> &[(P, AoccResult)] {
        &self.results
    }

    pub fn argmax_index(&self) -> usize {
        self.argmax_index
    }

    /// The entry with the highest `aocc_sum`; ties resolve to the first.
    pub fn argmax(&self) -> &(P, AoccResult) {
        &self.results[self.argmax_index]
    }
}

/// Evaluates AOCC for each `(parameter, stream)` entry and locates the
/// best-scoring parameter. Entries are processed in parallel; output order
/// follows input order.
pub fn sweep<P>(entries: &[(P, EventStream)], grid: &IntervalGrid) -> Result<SweepOutcome<P>>
where
    P: Clone + Send + Sync,
{
    if entries.is_empty() {
        return Err(Error::EmptySweep);
    }
    let results = entries
        .par_iter()
        .map(|(param, stream)| aocc_of_stream(stream, grid).map(|r| (param.clone(), r)))
        .collect::<Result<Vec<_>>>()?;
    let argmax_index = results
        .iter()
        .enumerate()
        .max_by(|(ia, (_, a)), (ib, (_, b))| {
            // Strict max with first-wins ties: compare value, then prefer
            // the lower index.
            a.aocc_sum.total_cmp(&b.aocc_sum).then(ib.cmp(ia))
        })
        .map(|(i, _)| i)
        .expect("non-empty results");
    Ok(SweepOutcome {
        results,
        argmax_index,
    })
}
