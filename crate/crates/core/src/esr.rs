//! Event structural ratio (ESR), the label-free baseline metric.
//!
//! ESR scores an event stream by the spatial structure of its per-pixel
//! count image: sqrt(NTSS * LN), where NTSS measures how concentrated the
//! counts are and LN penalizes sparsity. Counts are taken at native
//! coordinates; the original formulation warps events along motion
//! trajectories first, but no motion model is available here, and the
//! comparison against contrast-curve metrics is unaffected because both
//! sides see the same unwarped data.

use crate::error::{Error, Result};
use crate::event::{EventStream, SensorGeometry};

/// Per-pixel event counts over a window (the identity-warp count image).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventCountImage {
    geometry: SensorGeometry,
    counts: Vec<u64>,
    total: u64,
}

impl EventCountImage {
    /// Counts every event of the stream.
    pub fn from_stream(stream: &EventStream) -> Self {
        Self::tally(
            stream.geometry(),
            stream.events().iter().map(|e| (e.x, e.y)),
        )
    }

    /// Counts events with `t0 <= t < t1`; the window must lie within the
    /// stream bounds.
    pub fn from_window(stream: &EventStream, t0: u64, t1: u64) -> Result<Self> {
        if t0 > t1 || t0 < stream.t_start() || t1 > stream.t_end() {
            return Err(Error::IntervalOutOfBounds {
                t0,
                t1,
                start: stream.t_start(),
                end: stream.t_end(),
            });
        }
        let events = stream.events();
        let lo = events.partition_point(|e| e.t < t0);
        let hi = events.partition_point(|e| e.t < t1);
        Ok(Self::tally(
            stream.geometry(),
            events[lo..hi].iter().map(|e| (e.x, e.y)),
        ))
    }

    /// Builds an image from explicit per-pixel counts in row-major order.
    ///
    /// Panics if the count vector length does not match the geometry.
    pub fn from_counts(geometry: SensorGeometry, counts: Vec<u64>) -> Self {
        assert_eq!(
            counts.len(),
            geometry.pixel_count(),
            "count length mismatch"
        );
        let total = counts.iter().sum();
        EventCountImage {
            geometry,
            counts,
            total,
        }
    }

    fn tally(geometry: SensorGeometry, positions: impl Iterator<Item = (u16, u16)>) -> Self {
        let width = geometry.width() as usize;
        let mut counts = vec![0u64; geometry.pixel_count()];
        let mut total = 0u64;
        for (x, y) in positions {
            counts[y as usize * width + x as usize] += 1;
            total += 1;
        }
        EventCountImage {
            geometry,
            counts,
            total,
        }
    }

    pub fn geometry(&self) -> SensorGeometry {
        self.geometry
    }

    /// Row-major per-pixel counts.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Total number of counted events (N).
    pub fn total_events(&self) -> u64 {
        self.total
    }

    /// Number of pixels (K).
    pub fn pixel_count(&self) -> u64 {
        self.geometry.pixel_count() as u64
    }
}

/// ESR and its two factors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EsrBreakdown {
    /// Normalized total sum of squares, in [0, 1].
    pub ntss: f64,
    /// Sparsity penalty, in [0, K].
    pub ln: f64,
    /// sqrt(ntss * ln).
    pub esr: f64,
    /// The reference event count M actually used.
    pub reference_count: u64,
}

/// Computes ESR of a count image.
///
/// NTSS = sum n_i (n_i - 1) / (N (N - 1)) and
/// LN = K - sum (1 - M/N)^(n_i), with ESR their geometric mean. The
/// reference count M defaults to N, which reduces LN to the number of
/// active pixels; empty pixels contribute (1 - M/N)^0 = 1 either way.
/// Needs at least two events, and M must satisfy 1 <= M <= N.
pub fn esr(image: &EventCountImage, reference_count: Option<u64>) -> Result<EsrBreakdown> {
    let n = image.total_events();
    if n < 2 {
        return Err(Error::TooFewEvents(n));
    }
    let m = reference_count.unwrap_or(n);
    if m == 0 {
        return Err(Error::ZeroReferenceCount);
    }
    if m > n {
        return Err(Error::ReferenceCountTooLarge { m, n });
    }

    let numerator: u128 = image
        .counts()
        .iter()
        .map(|&c| c as u128 * (c as u128).saturating_sub(1))
        .sum();
    let denominator = n as u128 * (n as u128 - 1);
    let ntss = numerator as f64 / denominator as f64;

    let base = 1.0 - m as f64 / n as f64;
    let decay: f64 = image.counts().iter().map(|&c| base.powf(c as f64)).sum();
    let ln = image.pixel_count() as f64 - decay;

    Ok(EsrBreakdown {
        ntss,
        ln,
        esr: (ntss * ln).sqrt(),
        reference_count: m,
    })
}

/// Mean ESR over consecutive half-open windows of length `window_us`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowedEsr {
    pub mean_esr: f64,
    /// Windows with at least two events, the only ones that contribute.
    pub windows_used: u64,
    pub windows_total: u64,
}

/// Averages ESR over `floor(duration / window_us)` windows anchored at
/// `t_start`, skipping windows with fewer than two events. Errors if no
/// window is usable.
pub fn esr_windowed(
    stream: &EventStream,
    window_us: u64,
    reference_count: Option<u64>,
) -> Result<WindowedEsr> {
    let duration = stream.duration_us();
    if window_us == 0 || window_us > duration {
        return Err(Error::IntervalOutOfRange {
            dt: window_us,
            duration,
        });
    }
    let total = duration / window_us;
    let mut used = 0u64;
    let mut sum = 0.0f64;
    for k in 0..total {
        let t0 = stream.t_start() + k * window_us;
        let image = EventCountImage::from_window(stream, t0, t0 + window_us)?;
        if image.total_events() < 2 {
            continue;
        }
        sum += esr(&image, reference_count)?.esr;
        used += 1;
    }
    if used == 0 {
        return Err(Error::TooFewEvents(stream.len() as u64));
    }
    Ok(WindowedEsr {
        mean_esr: sum / used as f64,
        windows_used: used,
        windows_total: total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event::{Event, Polarity};
    use approx::assert_relative_eq;
    use rand::Rng as _;

    fn geom(w: u16, h: u16) -> SensorGeometry {
        SensorGeometry::new(w, h).unwrap()
    }

    fn ev(t: u64, x: u16, y: u16) -> Event {
        Event {
            t,
            x,
            y,
            polarity: Polarity::On,
        }
    }

    #[test]
    fn empty_window_counts_nothing() {
        let s = EventStream::new(geom(4, 4), vec![ev(50, 1, 1)], 0, 100).unwrap();
        let img = EventCountImage::from_window(&s, 0, 40).unwrap();
        assert_eq!(img.total_events(), 0);
        assert!(img.counts().iter().all(|&c| c == 0));
    }

    #[test]
    fn repeated_pixel_accumulates() {
        let s = EventStream::new(
            geom(4, 4),
            vec![ev(1, 2, 3), ev(2, 2, 3), ev(3, 2, 3)],
            0,
            10,
        )
        .unwrap();
        let img = EventCountImage::from_stream(&s);
        assert_eq!(img.total_events(), 3);
        assert_eq!(img.counts()[3 * 4 + 2], 3);
    }

    #[test]
    fn counts_match_a_scalar_tally() {
        let mut rng = crate::testutil::rng(31);
        let mut ts: Vec<u64> = (0..500).map(|_| rng.random_range(0..10_000)).collect();
        ts.sort_unstable();
        let events: Vec<Event> = ts
            .into_iter()
            .map(|t| ev(t, rng.random_range(0..12), rng.random_range(0..9)))
            .collect();
        let s = EventStream::new(geom(12, 9), events, 0, 10_000).unwrap();
        let img = EventCountImage::from_stream(&s);
        let mut oracle = vec![0u64; 12 * 9];
        for e in s.events() {
            oracle[e.y as usize * 12 + e.x as usize] += 1;
        }
        assert_eq!(img.counts(), &oracle[..]);
        assert_eq!(img.total_events(), 500);
    }

    #[test]
    fn window_is_half_open_and_bounds_checked() {
        let s = EventStream::new(geom(4, 4), vec![ev(10, 0, 0), ev(20, 0, 0)], 0, 30).unwrap();
        let img = EventCountImage::from_window(&s, 10, 20).unwrap();
        assert_eq!(img.total_events(), 1);
        assert!(matches!(
            EventCountImage::from_window(&s, 10, 40),
            Err(Error::IntervalOutOfBounds { .. })
        ));
    }

    #[test]
    fn single_pixel_concentration_has_ntss_one() {
        for n in [2u64, 5, 100, 10_000] {
            let mut counts = vec![0u64; 16];
            counts[5] = n;
            let img = EventCountImage::from_counts(geom(4, 4), counts);
            let b = esr(&img, None).unwrap();
            assert_eq!(b.ntss, 1.0);
        }
    }

    #[test]
    fn uniform_counts_match_the_closed_form() {
        // n_i = 10 on every one of K = 100 pixels, N = 1000.
        let img = EventCountImage::from_counts(geom(10, 10), vec![10u64; 100]);
        let b = esr(&img, None).unwrap();
        assert_relative_eq!(b.ntss, 9.0 / 999.0, max_relative = 1e-12);
        // With M = N every active pixel counts once in LN.
        assert_eq!(b.ln, 100.0);
        assert_relative_eq!(
            b.esr,
            (9.0_f64 / 999.0 * 100.0).sqrt(),
            max_relative = 1e-12
        );
        assert_eq!(b.reference_count, 1000);
    }

    #[test]
    fn ln_with_default_m_counts_active_pixels() {
        let img = EventCountImage::from_counts(geom(3, 2), vec![4, 0, 1, 0, 0, 2]);
        let b = esr(&img, None).unwrap();
        assert_eq!(b.ln, 3.0);
    }

    #[test]
    fn preconditions_are_enforced() {
        let empty = EventCountImage::from_counts(geom(2, 2), vec![0; 4]);
        assert!(matches!(esr(&empty, None), Err(Error::TooFewEvents(0))));
        let single = EventCountImage::from_counts(geom(2, 2), vec![1, 0, 0, 0]);
        assert!(matches!(esr(&single, None), Err(Error::TooFewEvents(1))));
        let ok = EventCountImage::from_counts(geom(2, 2), vec![2, 1, 0, 0]);
        assert!(matches!(esr(&ok, Some(0)), Err(Error::ZeroReferenceCount)));
        assert!(matches!(
            esr(&ok, Some(4)),
            Err(Error::ReferenceCountTooLarge { m: 4, n: 3 })
        ));
        assert!(esr(&ok, Some(3)).is_ok());
        assert!(esr(&ok, Some(1)).is_ok());
    }

    #[test]
    fn factors_stay_in_their_ranges() {
        let mut rng = crate::testutil::rng(37);
        for _ in 0..50 {
            let counts: Vec<u64> = (0..36).map(|_| rng.random_range(0..40)).collect();
            let img = EventCountImage::from_counts(geom(6, 6), counts);
            if img.total_events() < 2 {
                continue;
            }
            let m = rng.random_range(1..=img.total_events());
            let b = esr(&img, Some(m)).unwrap();
            assert!((0.0..=1.0).contains(&b.ntss));
            assert!((0.0..=36.0).contains(&b.ln));
            assert!(b.esr >= 0.0);
        }
    }

    #[test]
    fn ntss_is_invariant_under_pixel_permutation() {
        let mut rng = crate::testutil::rng(41);
        let counts: Vec<u64> = (0..25).map(|_| rng.random_range(0..20)).collect();
        let mut shuffled = counts.clone();
        // Fisher-Yates with the seeded generator.
        for i in (1..shuffled.len()).rev() {
            let j = rng.random_range(0..=i);
            shuffled.swap(i, j);
        }
        let a = esr(&EventCountImage::from_counts(geom(5, 5), counts), None).unwrap();
        let b = esr(&EventCountImage::from_counts(geom(5, 5), shuffled), None).unwrap();
        assert_eq!(a.ntss.to_bits(), b.ntss.to_bits());
    }

    #[test]
    fn concentration_maximizes_and_balance_minimizes_ntss() {
        // Compare on the integer numerator sum n_i (n_i - 1); the
        // denominator is shared within each (K, N) family.
        fn compositions(k: usize, n: u64) -> Vec<Vec<u64>> {
            if k == 1 {
                return vec![vec![n]];
            }
            let mut out = Vec::new();
            for first in 0..=n {
                for rest in compositions(k - 1, n - first) {
                    let mut v = Vec::with_capacity(k);
                    v.push(first);
                    v.extend(rest);
                    out.push(v);
                }
            }
            out
        }
        let numerator = |v: &[u64]| v.iter().map(|&c| c * c.saturating_sub(1)).sum::<u64>();
        for k in 1..=4usize {
            for n in 2..=6u64 {
                let all = compositions(k, n);
                let max = all.iter().map(|v| numerator(v)).max().unwrap();
                let min = all.iter().map(|v| numerator(v)).min().unwrap();
                let mut concentrated = vec![0u64; k];
                concentrated[0] = n;
                assert_eq!(numerator(&concentrated), max, "K={k} N={n}");
                let mut balanced = vec![n / k as u64; k];
                for slot in balanced.iter_mut().take(n as usize % k) {
                    *slot += 1;
                }
                assert_eq!(numerator(&balanced), min, "K={k} N={n}");
            }
        }
    }

    #[test]
    fn windowed_esr_skips_sparse_windows() {
        // Events only in the first half: second-half windows are skipped.
        let events = vec![
            ev(100, 0, 0),
            ev(200, 1, 1),
            ev(300, 0, 0),
            ev(40_100, 2, 2),
            ev(40_200, 2, 2),
        ];
        let s = EventStream::new(geom(4, 4), events, 0, 100_000).unwrap();
        let w = esr_windowed(&s, 20_000, None).unwrap();
        assert_eq!(w.windows_total, 5);
        assert_eq!(w.windows_used, 2);
        let first = esr(&EventCountImage::from_window(&s, 0, 20_000).unwrap(), None).unwrap();
        let third = esr(
            &EventCountImage::from_window(&s, 40_000, 60_000).unwrap(),
            None,
        )
        .unwrap();
        assert_relative_eq!(
            w.mean_esr,
            (first.esr + third.esr) / 2.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn windowed_esr_needs_a_usable_window() {
        let s = EventStream::new(geom(4, 4), vec![ev(10, 0, 0)], 0, 1_000).unwrap();
        assert!(matches!(
            esr_windowed(&s, 100, None),
            Err(Error::TooFewEvents(_))
        ));
        assert!(matches!(
            esr_windowed(&s, 0, None),
            Err(Error::IntervalOutOfRange { .. })
        ));
        assert!(matches!(
            esr_windowed(&s, 2_000, None),
            Err(Error::IntervalOutOfRange { .. })
        ));
    }
}
