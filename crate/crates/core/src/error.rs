//! Crate-wide error type.

use crate::event::{SensorGeometry, Violation};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("sensor geometry must be at least 1x1")]
    EmptyGeometry,

    #[error("time interval [{t0}, {t1}] lies outside stream bounds [{start}, {end}]")]
    IntervalOutOfBounds {
        t0: u64,
        t1: u64,
        start: u64,
        end: u64,
    },

    #[error("geometry mismatch: {left} vs {right}")]
    GeometryMismatch {
        left: SensorGeometry,
        right: SensorGeometry,
    },

    #[error("cannot merge a labeled stream with an unlabeled one")]
    MixedLabeling,

    #[error("invalid stream: {}", join_violations(.0))]
    InvalidStream(Vec<Violation>),

    #[error("noise rate must be finite and non-negative, got {0}")]
    InvalidRate(f64),

    #[error("polarity split must lie in [0, 1], got {0}")]
    InvalidPolaritySplit(f64),

    #[error("operation needs a positive duration")]
    ZeroDuration,

    #[error("invalid scene: {0}")]
    InvalidScene(&'static str),

    #[error("line {line}: {reason}")]
    CsvParse { line: usize, reason: String },

    #[error("line {line}: polarity must be -1 or 1, got {value}")]
    InvalidPolarity { line: usize, value: i64 },

    #[error("no sensor geometry: expected a `# width=W height=H` line or an external geometry")]
    MissingGeometry,

    #[error("bad magic {0:02x?}, expected `AOCC`")]
    BadMagic([u8; 4]),

    #[error("unsupported binary format version {0}")]
    UnsupportedVersion(u16),

    #[error("file ends inside the header")]
    TruncatedHeader,

    #[error("corrupt header: bad {0}")]
    CorruptHeader(&'static str),

    #[error("file ends after {got} of {expected} records")]
    TruncatedRecords { expected: u32, got: u32 },

    #[error("bytes remain after the last declared record")]
    TrailingData,

    #[error("corrupt record {index}: bad {what}")]
    CorruptRecord { index: u32, what: &'static str },

    #[error("stream has {0} events, more than the binary format can count")]
    TooManyEvents(u64),

    #[error("threshold must lie in [0, 1], got {0}")]
    InvalidThreshold(f64),

    #[error("search radius {radius} outside [1, {max}]")]
    InvalidSearchRadius { radius: u16, max: u16 },

    #[error("invalid denoiser config: {0}")]
    InvalidDenoiserConfig(&'static str),

    #[error("score count {scores} does not match event count {events}")]
    ScoreCountMismatch { scores: usize, events: usize },

    #[error("score at index {index} is {value}, outside [0, 1]")]
    InvalidScore { index: usize, value: f64 },

    #[error("score sigma must be finite and non-negative, got {0}")]
    InvalidSigma(f64),

    #[error("operation requires a fully labeled stream")]
    MissingLabels,

    #[error("denoised stream is not a subsequence of its input (kept event {index} has no match)")]
    NotASubsequence { index: usize },

    #[error("ROC needs both classes present (signal: {signal}, noise: {noise})")]
    DegenerateClasses { signal: u64, noise: u64 },

    #[error("contrast needs a frame with at least 2 pixels")]
    FrameTooSmall,

    #[error("need at least 2 events in the counting window, got {0}")]
    TooFewEvents(u64),

    #[error("ESR reference count must be positive")]
    ZeroReferenceCount,

    #[error("ESR reference count {m} exceeds event count {n}")]
    ReferenceCountTooLarge { m: u64, n: u64 },

    #[error("accumulation interval {dt} outside (0, {duration}] for this stream")]
    IntervalOutOfRange { dt: u64, duration: u64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),

    #[error("sweep needs at least one entry")]
    EmptySweep,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn join_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
