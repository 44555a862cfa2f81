//! Event data model: events, labels, sensor geometry, and the stream
//! container every other module consumes.
//!
//! Streams are immutable after construction; all operations here return new
//! streams, so sharing one across worker threads is safe.

use std::fmt;

use crate::error::{Error, Result};

/// ON/OFF polarity of a brightness-change event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarity {
    /// Brightness increase (+1).
    On,
    /// Brightness decrease (-1).
    Off,
}

impl Polarity {
    /// Signed representation: +1 for ON, -1 for OFF.
    pub fn sign(self) -> i8 {
        match self {
            Polarity::On => 1,
            Polarity::Off => -1,
        }
    }

    pub fn from_sign(sign: i64) -> Option<Self> {
        match sign {
            1 => Some(Polarity::On),
            -1 => Some(Polarity::Off),
            _ => None,
        }
    }
}

/// A single sensor event: microsecond timestamp, pixel coordinates, polarity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Event {
    /// Timestamp in microseconds.
    pub t: u64,
    /// Column index, 0-based.
    pub x: u16,
    /// Row index, 0-based.
    pub y: u16,
    pub polarity: Polarity,
}

/// Ground-truth class of an event, assigned at injection time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Signal,
    Noise,
}

/// An event together with its signal/noise label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LabeledEvent {
    pub event: Event,
    pub label: Label,
}

/// Sensor pixel-array dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SensorGeometry {
    width: u16,
    height: u16,
}

impl SensorGeometry {
    /// The DAVIS346 profile, 346x260.
    pub const DAVIS346: SensorGeometry = SensorGeometry {
        width: 346,
        height: 260,
    };

    pub fn new(width: u16, height: u16) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::EmptyGeometry);
        }
        Ok(SensorGeometry { width, height })
    }

    pub fn width(&self) -> u16 {
        self.width
    }

    pub fn height(&self) -> u16 {
        self.height
    }

    pub fn pixel_count(&self) -> usize {
        self.width as usize * self.height as usize
    }

    pub fn contains(&self, x: u16, y: u16) -> bool {
        x < self.width && y < self.height
    }
}

impl fmt::Display for SensorGeometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.width, self.height)
    }
}

/// One invariant violation found by [`EventStream::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// Event `index` starts earlier than its predecessor.
    OutOfOrder { index: usize },
    /// Event coordinates fall outside the sensor.
    OutOfBounds { index: usize, x: u16, y: u16 },
    /// `t_end` is earlier than `t_start`.
    NegativeDuration,
    /// First event precedes `t_start`.
    StartsBeforeWindow { t: u64 },
    /// Last event follows `t_end`.
    EndsAfterWindow { t: u64 },
    /// Label vector length differs from event count.
    LabelArityMismatch { events: usize, labels: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::OutOfOrder { index } => {
                write!(f, "event {index} is earlier than its predecessor")
            }
            Violation::OutOfBounds { index, x, y } => {
                write!(f, "event {index} at ({x}, {y}) is outside the sensor")
            }
            Violation::NegativeDuration => write!(f, "t_end is earlier than t_start"),
            Violation::StartsBeforeWindow { t } => {
                write!(f, "first event at {t} precedes t_start")
            }
            Violation::EndsAfterWindow { t } => write!(f, "last event at {t} follows t_end"),
            Violation::LabelArityMismatch { events, labels } => {
                write!(f, "{labels} labels for {events} events")
            }
        }
    }
}

/// A bounded, time-ordered event recording with its sensor geometry.
///
/// The label vector, when present, runs parallel to the event vector; a
/// stream is either fully labeled or fully unlabeled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventStream {
    geometry: SensorGeometry,
    events: Vec<Event>,
    labels: Option<Vec<Label>>,
    t_start: u64,
    t_end: u64,
}

impl EventStream {
    /// Builds an unlabeled stream, rejecting any invariant violation.
    pub fn new(
        geometry: SensorGeometry,
        events: Vec<Event>,
        t_start: u64,
        t_end: u64,
    ) -> Result<Self> {
        Self::from_raw_parts(geometry, events, None, t_start, t_end).into_validated()
    }

    /// Builds a labeled stream, rejecting any invariant violation.
    pub fn new_labeled(
        geometry: SensorGeometry,
        events: Vec<LabeledEvent>,
        t_start: u64,
        t_end: u64,
    ) -> Result<Self> {
        let labels = events.iter().map(|le| le.label).collect();
        let events = events.into_iter().map(|le| le.event).collect();
        Self::from_raw_parts(geometry, events, Some(labels), t_start, t_end).into_validated()
    }

    /// Assembles a stream without checking any invariant.
    ///
    /// Loader internals and tests use this to carry possibly-broken data to
    /// [`validate`](Self::validate); everything else should go through
    /// [`new`](Self::new) / [`new_labeled`](Self::new_labeled).
    pub fn from_raw_parts(
        geometry: SensorGeometry,
        events: Vec<Event>,
        labels: Option<Vec<Label>>,
        t_start: u64,
        t_end: u64,
    ) -> Self {
        EventStream {
            geometry,
            events,
            labels,
            t_start,
            t_end,
        }
    }

    fn into_validated(self) -> Result<Self> {
        let violations = self.validate();
        if violations.is_empty() {
            Ok(self)
        } else {
            Err(Error::InvalidStream(violations))
        }
    }

    pub fn geometry(&self) -> SensorGeometry {
        self.geometry
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn labels(&self) -> Option<&[Label]> {
        self.labels.as_deref()
    }

    pub fn is_labeled(&self) -> bool {
        self.labels.is_some()
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Start of the recording window, microseconds.
    pub fn t_start(&self) -> u64 {
        self.t_start
    }

    /// End of the recording window, microseconds.
    pub fn t_end(&self) -> u64 {
        self.t_end
    }

    pub fn duration_us(&self) -> u64 {
        self.t_end.saturating_sub(self.t_start)
    }

    /// Iterates events paired with their labels. `None` for unlabeled streams.
    pub fn iter_labeled(&self) -> Option<impl Iterator<Item = LabeledEvent> + '_> {
        self.labels.as_ref().map(|labels| {
            self.events
                .iter()
                .zip(labels.iter())
                .map(|(&event, &label)| LabeledEvent { event, label })
        })
    }

    /// Returns a copy of this stream with every event labeled `label`.
    /// Existing labels are replaced.
    pub fn labeled_as(&self, label: Label) -> EventStream {
        EventStream {
            geometry: self.geometry,
            events: self.events.clone(),
            labels: Some(vec![label; self.events.len()]),
            t_start: self.t_start,
            t_end: self.t_end,
        }
    }

    /// Checks every stream invariant and reports violations as data.
    /// An empty report means the stream is well formed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut violations = Vec::new();
        if let Some(labels) = &self.labels {
            if labels.len() != self.events.len() {
                violations.push(Violation::LabelArityMismatch {
                    events: self.events.len(),
                    labels: labels.len(),
                });
            }
        }
        if self.t_end < self.t_start {
            violations.push(Violation::NegativeDuration);
        }
        let mut prev_t = None;
        for (index, event) in self.events.iter().enumerate() {
            if !self.geometry.contains(event.x, event.y) {
                violations.push(Violation::OutOfBounds {
                    index,
                    x: event.x,
                    y: event.y,
                });
            }
            if let Some(prev) = prev_t {
                if event.t < prev {
                    violations.push(Violation::OutOfOrder { index });
                }
            }
            prev_t = Some(event.t);
        }
        if let Some(first) = self.events.first() {
            if first.t < self.t_start {
                violations.push(Violation::StartsBeforeWindow { t: first.t });
            }
        }
        if let Some(last) = self.events.last() {
            if last.t > self.t_end {
                violations.push(Violation::EndsAfterWindow { t: last.t });
            }
        }
        violations
    }

    /// Extracts the closed interval `t0 <= t <= t1` as a new stream whose
    /// bounds are exactly `[t0, t1]`. Order and labels are preserved.
    pub fn slice(&self, t0: u64, t1: u64) -> Result<EventStream> {
        if t0 < self.t_start || t1 > self.t_end || t0 > t1 {
            return Err(Error::IntervalOutOfBounds {
                t0,
                t1,
                start: self.t_start,
                end: self.t_end,
            });
        }
        let lo = self.events.partition_point(|e| e.t < t0);
        let hi = self.events.partition_point(|e| e.t <= t1);
        Ok(EventStream {
            geometry: self.geometry,
            events: self.events[lo..hi].to_vec(),
            labels: self.labels.as_ref().map(|l| l[lo..hi].to_vec()),
            t_start: t0,
            t_end: t1,
        })
    }

    /// Stable time-ordered merge; ties are broken self-before-other.
    ///
    /// An empty operand acts as the identity: the other stream is returned
    /// unchanged (bounds included). Non-empty operands must agree on
    /// geometry and on labeledness; merged bounds are the union.
    pub fn merge(&self, other: &EventStream) -> Result<EventStream> {
        if self.geometry != other.geometry {
            return Err(Error::GeometryMismatch {
                left: self.geometry,
                right: other.geometry,
            });
        }
        if other.is_empty() {
            return Ok(self.clone());
        }
        if self.is_empty() {
            return Ok(other.clone());
        }
        if self.is_labeled() != other.is_labeled() {
            return Err(Error::MixedLabeling);
        }

        let total = self.events.len() + other.events.len();
        let mut events = Vec::with_capacity(total);
        let mut labels = self.is_labeled().then(|| Vec::with_capacity(total));
        let (mut i, mut j) = (0, 0);
        while i < self.events.len() || j < other.events.len() {
            let take_left = match (self.events.get(i), other.events.get(j)) {
                (Some(a), Some(b)) => a.t <= b.t,
                (Some(_), None) => true,
                (None, _) => false,
            };
            let (stream, idx) = if take_left {
                i += 1;
                (self, i - 1)
            } else {
                j += 1;
                (other, j - 1)
            };
            events.push(stream.events[idx]);
            if let Some(labels) = labels.as_mut() {
                labels.push(stream.labels.as_ref().unwrap()[idx]);
            }
        }

        Ok(EventStream {
            geometry: self.geometry,
            events,
            labels,
            t_start: self.t_start.min(other.t_start),
            t_end: self.t_end.max(other.t_end),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

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
    fn empty_stream_validates_clean() {
        let s = EventStream::new(SensorGeometry::DAVIS346, vec![], 0, 0).unwrap();
        assert!(s.validate().is_empty());
        assert_eq!(s.duration_us(), 0);
    }

    #[test]
    fn decreasing_timestamps_yield_one_ordering_violation() {
        let s = EventStream::from_raw_parts(
            SensorGeometry::DAVIS346,
            vec![ev(20, 0, 0), ev(10, 0, 0)],
            None,
            0,
            100,
        );
        assert_eq!(s.validate(), vec![Violation::OutOfOrder { index: 1 }]);
    }

    #[test]
    fn out_of_bounds_pixel_yields_one_bounds_violation() {
        let s =
            EventStream::from_raw_parts(SensorGeometry::DAVIS346, vec![ev(5, 346, 0)], None, 0, 10);
        assert_eq!(
            s.validate(),
            vec![Violation::OutOfBounds {
                index: 0,
                x: 346,
                y: 0
            }]
        );
    }

    #[test]
    fn constructor_rejects_violations() {
        let err = EventStream::new(geom(10, 10), vec![ev(5, 0, 0)], 6, 10).unwrap_err();
        assert!(matches!(err, Error::InvalidStream(_)));
    }

    #[test]
    fn zero_geometry_rejected() {
        assert!(matches!(
            SensorGeometry::new(0, 5),
            Err(Error::EmptyGeometry)
        ));
    }

    #[test]
    fn slice_full_range_is_identity() {
        let s = EventStream::new(
            geom(10, 10),
            vec![ev(10, 1, 1), ev(20, 2, 2), ev(30, 3, 3)],
            10,
            30,
        )
        .unwrap();
        assert_eq!(s.slice(10, 30).unwrap(), s);
    }

    #[test]
    fn slice_event_free_interval_is_empty_with_matching_bounds() {
        let s = EventStream::new(geom(10, 10), vec![ev(10, 1, 1), ev(90, 2, 2)], 0, 100).unwrap();
        let sub = s.slice(30, 60).unwrap();
        assert!(sub.is_empty());
        assert_eq!((sub.t_start(), sub.t_end()), (30, 60));
    }

    #[test]
    fn slice_uses_closed_interval() {
        let s = EventStream::new(
            geom(10, 10),
            vec![ev(10, 1, 1), ev(20, 2, 2), ev(30, 3, 3)],
            0,
            40,
        )
        .unwrap();
        let sub = s.slice(10, 20).unwrap();
        let ts: Vec<u64> = sub.events().iter().map(|e| e.t).collect();
        assert_eq!(ts, vec![10, 20]);
    }

    #[test]
    fn slice_out_of_bounds_is_an_error() {
        let s = EventStream::new(geom(10, 10), vec![], 10, 20).unwrap();
        assert!(matches!(
            s.slice(5, 15),
            Err(Error::IntervalOutOfBounds { .. })
        ));
        assert!(matches!(
            s.slice(15, 25),
            Err(Error::IntervalOutOfBounds { .. })
        ));
    }

    #[test]
    fn merge_with_empty_is_identity() {
        let s = EventStream::new(geom(10, 10), vec![ev(10, 1, 1)], 5, 15).unwrap();
        let empty = EventStream::new(geom(10, 10), vec![], 0, 0).unwrap();
        assert_eq!(s.merge(&empty).unwrap(), s);
        assert_eq!(empty.merge(&s).unwrap(), s);
    }

    #[test]
    fn merge_breaks_ties_left_first() {
        let a = EventStream::new(geom(10, 10), vec![ev(50, 1, 1)], 0, 100).unwrap();
        let b = EventStream::new(geom(10, 10), vec![ev(50, 2, 2)], 0, 100).unwrap();
        let merged = a.merge(&b).unwrap();
        assert_eq!(merged.len(), 2);
        assert_eq!(merged.events()[0].x, 1);
        assert_eq!(merged.events()[1].x, 2);
    }

    #[test]
    fn merge_rejects_geometry_mismatch() {
        let a = EventStream::new(geom(10, 10), vec![ev(1, 0, 0)], 0, 10).unwrap();
        let b = EventStream::new(geom(20, 20), vec![ev(1, 0, 0)], 0, 10).unwrap();
        assert!(matches!(a.merge(&b), Err(Error::GeometryMismatch { .. })));
    }

    #[test]
    fn merge_rejects_mixed_labeling() {
        let a = EventStream::new(geom(10, 10), vec![ev(1, 0, 0)], 0, 10).unwrap();
        let b = a.labeled_as(Label::Noise);
        assert!(matches!(a.merge(&b), Err(Error::MixedLabeling)));
    }

    #[test]
    fn merge_matches_concat_sort_oracle() {
        let g = geom(64, 64);
        let mk = |seed: u64, n: usize| {
            let mut rng = crate::testutil::rng(seed);
            let mut ts: Vec<u64> = (0..n).map(|_| rng.random_range(0..1_000_000)).collect();
            ts.sort_unstable();
            let events = ts
                .into_iter()
                .map(|t| Event {
                    t,
                    x: rng.random_range(0..64),
                    y: rng.random_range(0..64),
                    polarity: Polarity::On,
                })
                .collect();
            EventStream::new(g, events, 0, 1_000_000).unwrap()
        };
        let a = mk(1, 1000);
        let b = mk(2, 500);
        let merged = a.merge(&b).unwrap();
        assert_eq!(merged.len(), 1500);

        // Oracle: concatenate a then b and stable-sort by timestamp.
        let mut oracle: Vec<Event> = a.events().iter().chain(b.events()).copied().collect();
        oracle.sort_by_key(|e| e.t);
        assert_eq!(merged.events(), &oracle[..]);
    }

    use rand::Rng;

    proptest! {
        #[test]
        fn slice_is_idempotent(raw in crate::testutil::arb_stream(64, 64, 200)) {
            let lo = raw.t_start() + raw.duration_us() / 4;
            let hi = raw.t_end() - raw.duration_us() / 4;
            let once = raw.slice(lo, hi).unwrap();
            let twice = once.slice(lo, hi).unwrap();
            prop_assert_eq!(&once, &twice);
        }

        #[test]
        fn valid_streams_slice_to_valid_streams(raw in crate::testutil::arb_stream(64, 64, 200)) {
            prop_assert!(raw.validate().is_empty());
            let sub = raw.slice(raw.t_start(), raw.t_end()).unwrap();
            prop_assert!(sub.validate().is_empty());
        }

        #[test]
        fn merge_preserves_every_event(
            a in crate::testutil::arb_stream(32, 32, 100),
            b in crate::testutil::arb_stream(32, 32, 100),
        ) {
            let merged = a.merge(&b).unwrap();
            prop_assert_eq!(merged.len(), a.len() + b.len());
            prop_assert!(merged.validate().is_empty());
            let mut oracle: Vec<Event> = a.events().iter().chain(b.events()).copied().collect();
            oracle.sort_by_key(|e| e.t);
            prop_assert_eq!(merged.events(), &oracle[..]);
        }
    }
}
