//! Stream serialization: a text CSV format and a compact binary format.
//!
//! Both formats round-trip exactly: write-then-read returns an equal
//! stream, and writes are byte-deterministic. The recording bounds are not
//! stored; loaders take them from the first and last event. Neither format
//! compresses, and camera vendor formats are out of scope; convert those
//! to the CSV layout below with external tooling.
//!
//! CSV layout:
//!
//! ```text
//! # width=346 height=260
//! t_us,x,y,p
//! 1000,5,7,1
//! ```
//!
//! Labeled streams add a `label` column (1 signal, 0 noise). Geometry
//! comes from the leading comment or, failing that, from the caller.
//!
//! Binary layout, all little-endian: a 16-byte header (magic `AOCC`,
//! version u16 = 1, width u16, height u16, event count u32, labeled flag
//! u8, zero pad u8) followed by one 16-byte record per event (t u64,
//! x u16, y u16, p i8 = +-1, label i8 = 1/0/-1 for unlabeled, two zero
//! pad bytes). File size is exactly 16 + 16 * count.

use std::io::{BufRead, ErrorKind, Read, Write};

use crate::error::{Error, Result};
use crate::event::{Event, EventStream, Label, LabeledEvent, Polarity, SensorGeometry};

const MAGIC: [u8; 4] = *b"AOCC";
const VERSION: u16 = 1;
const HEADER_LEN: usize = 16;
const RECORD_LEN: usize = 16;

fn bounds_of(events: &[Event]) -> (u64, u64) {
    match (events.first(), events.last()) {
        (Some(first), Some(last)) => (first.t, last.t),
        _ => (0, 0),
    }
}

fn parse_geometry_comment(comment: &str) -> Option<SensorGeometry> {
    let mut tokens = comment.split_whitespace();
    let width: u16 = tokens.next()?.strip_prefix("width=")?.parse().ok()?;
    let height: u16 = tokens.next()?.strip_prefix("height=")?.parse().ok()?;
    if tokens.next().is_some() {
        return None;
    }
    SensorGeometry::new(width, height).ok()
}

/// Reads the CSV format.
///
/// `fallback_geometry` is used when the file carries no
/// `# width=W height=H` comment; the comment wins when both are present.
pub fn read_csv<R: BufRead>(
    reader: R,
    fallback_geometry: Option<SensorGeometry>,
) -> Result<EventStream> {
    let mut geometry = None;
    let mut labeled = None;
    let mut events: Vec<Event> = Vec::new();
    let mut labels: Vec<Label> = Vec::new();

    for (index, line) in reader.lines().enumerate() {
        let line_no = index + 1;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(g) = parse_geometry_comment(comment.trim()) {
                geometry.get_or_insert(g);
            }
            continue;
        }
        let Some(expect_label) = labeled else {
            labeled = match line {
                "t_us,x,y,p" => Some(false),
                "t_us,x,y,p,label" => Some(true),
                _ => {
                    return Err(Error::CsvParse {
                        line: line_no,
                        reason: format!("unrecognized header {line:?}"),
                    })
                }
            };
            continue;
        };

        let fields: Vec<&str> = line.split(',').collect();
        let expected = if expect_label { 5 } else { 4 };
        if fields.len() != expected {
            return Err(Error::CsvParse {
                line: line_no,
                reason: format!("expected {expected} fields, got {}", fields.len()),
            });
        }
        fn parsed<T: std::str::FromStr>(raw: &str, what: &str, line: usize) -> Result<T> {
            raw.parse().map_err(|_| Error::CsvParse {
                line,
                reason: format!("bad {what} {raw:?}"),
            })
        }
        let t: u64 = parsed(fields[0], "timestamp", line_no)?;
        let x: u16 = parsed(fields[1], "x", line_no)?;
        let y: u16 = parsed(fields[2], "y", line_no)?;
        let p: i64 = parsed(fields[3], "polarity", line_no)?;
        let polarity = Polarity::from_sign(p).ok_or(Error::InvalidPolarity {
            line: line_no,
            value: p,
        })?;
        events.push(Event { t, x, y, polarity });
        if expect_label {
            labels.push(match fields[4] {
                "1" => Label::Signal,
                "0" => Label::Noise,
                other => {
                    return Err(Error::CsvParse {
                        line: line_no,
                        reason: format!("bad label {other:?}, expected 0 or 1"),
                    })
                }
            });
        }
    }

    let geometry = geometry
        .or(fallback_geometry)
        .ok_or(Error::MissingGeometry)?;
    let (t_start, t_end) = bounds_of(&events);
    if labeled == Some(true) {
        let labeled_events = events
            .into_iter()
            .zip(labels)
            .map(|(event, label)| LabeledEvent { event, label })
            .collect();
        EventStream::new_labeled(geometry, labeled_events, t_start, t_end)
    } else {
        EventStream::new(geometry, events, t_start, t_end)
    }
}

/// Writes the CSV format. Output is byte-deterministic.
pub fn write_csv<W: Write>(stream: &EventStream, sink: &mut W) -> Result<()> {
    let g = stream.geometry();
    writeln!(sink, "# schema: events.v1")?;
    writeln!(sink, "# width={} height={}", g.width(), g.height())?;
    match stream.labels() {
        Some(labels) => {
            writeln!(sink, "t_us,x,y,p,label")?;
            for (e, label) in stream.events().iter().zip(labels) {
                let l = if *label == Label::Signal { 1 } else { 0 };
                writeln!(sink, "{},{},{},{},{}", e.t, e.x, e.y, e.polarity.sign(), l)?;
            }
        }
        None => {
            writeln!(sink, "t_us,x,y,p")?;
            for e in stream.events() {
                writeln!(sink, "{},{},{},{}", e.t, e.x, e.y, e.polarity.sign())?;
            }
        }
    }
    Ok(())
}

/// Reads the binary format, verifying every structural invariant: magic,
/// version, declared count, label-byte consistency, zero padding, and the
/// absence of trailing bytes.
pub fn read_binary<R: Read>(mut reader: R) -> Result<EventStream> {
    let mut header = [0u8; HEADER_LEN];
    reader.read_exact(&mut header).map_err(|e| match e.kind() {
        ErrorKind::UnexpectedEof => Error::TruncatedHeader,
        _ => Error::Io(e),
    })?;
    let magic = [header[0], header[1], header[2], header[3]];
    if magic != MAGIC {
        return Err(Error::BadMagic(magic));
    }
    let version = u16::from_le_bytes([header[4], header[5]]);
    if version != VERSION {
        return Err(Error::UnsupportedVersion(version));
    }
    let width = u16::from_le_bytes([header[6], header[7]]);
    let height = u16::from_le_bytes([header[8], header[9]]);
    let count = u32::from_le_bytes([header[10], header[11], header[12], header[13]]);
    let labeled = match header[14] {
        0 => false,
        1 => true,
        _ => return Err(Error::CorruptHeader("labeled flag")),
    };
    if header[15] != 0 {
        return Err(Error::CorruptHeader("padding"));
    }
    let geometry = SensorGeometry::new(width, height)?;

    let mut events = Vec::with_capacity(count as usize);
    let mut labels = labeled.then(|| Vec::with_capacity(count as usize));
    let mut record = [0u8; RECORD_LEN];
    for index in 0..count {
        reader.read_exact(&mut record).map_err(|e| match e.kind() {
            ErrorKind::UnexpectedEof => Error::TruncatedRecords {
                expected: count,
                got: index,
            },
            _ => Error::Io(e),
        })?;
        let t = u64::from_le_bytes(record[0..8].try_into().unwrap());
        let x = u16::from_le_bytes([record[8], record[9]]);
        let y = u16::from_le_bytes([record[10], record[11]]);
        let polarity =
            Polarity::from_sign(record[12] as i8 as i64).ok_or(Error::CorruptRecord {
                index,
                what: "polarity",
            })?;
        let label_byte = record[13] as i8;
        match (&mut labels, label_byte) {
            (Some(labels), 1) => labels.push(Label::Signal),
            (Some(labels), 0) => labels.push(Label::Noise),
            (None, -1) => {}
            _ => {
                return Err(Error::CorruptRecord {
                    index,
                    what: "label",
                })
            }
        }
        if record[14] != 0 || record[15] != 0 {
            return Err(Error::CorruptRecord {
                index,
                what: "padding",
            });
        }
        events.push(Event { t, x, y, polarity });
    }

    let mut probe = [0u8; 1];
    match reader.read(&mut probe) {
        Ok(0) => {}
        Ok(_) => return Err(Error::TrailingData),
        Err(e) => return Err(Error::Io(e)),
    }

    let (t_start, t_end) = bounds_of(&events);
    let stream = EventStream::from_raw_parts(geometry, events, labels, t_start, t_end);
    let violations = stream.validate();
    if violations.is_empty() {
        Ok(stream)
    } else {
        Err(Error::InvalidStream(violations))
    }
}

/// Writes the binary format. Output is byte-deterministic.
pub fn write_binary<W: Write>(stream: &EventStream, sink: &mut W) -> Result<()> {
    let count: u32 = stream
        .len()
        .try_into()
        .map_err(|_| Error::TooManyEvents(stream.len() as u64))?;
    let g = stream.geometry();
    let mut header = [0u8; HEADER_LEN];
    header[0..4].copy_from_slice(&MAGIC);
    header[4..6].copy_from_slice(&VERSION.to_le_bytes());
    header[6..8].copy_from_slice(&g.width().to_le_bytes());
    header[8..10].copy_from_slice(&g.height().to_le_bytes());
    header[10..14].copy_from_slice(&count.to_le_bytes());
    header[14] = stream.is_labeled() as u8;
    sink.write_all(&header)?;

    let mut record = [0u8; RECORD_LEN];
    for (i, e) in stream.events().iter().enumerate() {
        record[0..8].copy_from_slice(&e.t.to_le_bytes());
        record[8..10].copy_from_slice(&e.x.to_le_bytes());
        record[10..12].copy_from_slice(&e.y.to_le_bytes());
        record[12] = e.polarity.sign() as u8;
        record[13] = match stream.labels() {
            Some(labels) => (if labels[i] == Label::Signal { 1i8 } else { 0 }) as u8,
            None => -1i8 as u8,
        };
        sink.write_all(&record)?;
    }
    Ok(())
}
