//! File plumbing shared by the subcommands: stream loading and saving
//! with format inference, score files, and flag-value parsers.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::ValueEnum;

use aocc_core::io::{read_binary, read_csv, write_binary, write_csv};
use aocc_core::{EventStream, SensorGeometry};

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub(crate) enum FileFormat {
    Csv,
    Bin,
}

fn resolve_format(flag: Option<FileFormat>, path: &str) -> Result<FileFormat> {
    if let Some(format) = flag {
        return Ok(format);
    }
    if path == "-" {
        return Ok(FileFormat::Csv);
    }
    match Path::new(path).extension().and_then(|e| e.to_str()) {
        Some("csv") => Ok(FileFormat::Csv),
        Some("bin") | Some("aocc") => Ok(FileFormat::Bin),
        _ => bail!("cannot infer the stream format of {path}; pass --format"),
    }
}

pub(crate) fn load_stream(
    path: &str,
    flag: Option<FileFormat>,
    geometry: Option<SensorGeometry>,
) -> Result<EventStream> {
    let format = resolve_format(flag, path)?;
    let parse = |reader: Box<dyn Read>| match format {
        FileFormat::Csv => read_csv(BufReader::new(reader), geometry),
        FileFormat::Bin => read_binary(BufReader::new(reader)),
    };
    let reader: Box<dyn Read> = if path == "-" {
        Box::new(std::io::stdin().lock())
    } else {
        Box::new(File::open(path).with_context(|| format!("open {path}"))?)
    };
    parse(reader).with_context(|| format!("read {path}"))
}

pub(crate) fn save_stream(
    stream: &EventStream,
    path: &str,
    flag: Option<FileFormat>,
) -> Result<()> {
    let format = resolve_format(flag, path)?;
    let mut sink: Box<dyn Write> = if path == "-" {
        Box::new(BufWriter::new(std::io::stdout().lock()))
    } else {
        Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("create {path}"))?,
        ))
    };
    match format {
        FileFormat::Csv => write_csv(stream, &mut sink),
        FileFormat::Bin => write_binary(stream, &mut sink),
    }
    .with_context(|| format!("write {path}"))?;
    sink.flush().with_context(|| format!("write {path}"))?;
    Ok(())
}

pub(crate) fn write_bytes(path: &str, bytes: &[u8]) -> Result<()> {
    if path == "-" {
        let mut out = std::io::stdout().lock();
        out.write_all(bytes)?;
        out.flush()?;
    } else {
        std::fs::write(path, bytes).with_context(|| format!("write {path}"))?;
    }
    Ok(())
}

/// Loads a score file: optional `#` comments, a `score` header line, then
/// one number per line, one line per event of the companion stream.
pub(crate) fn load_scores(path: &str) -> Result<Vec<f64>> {
    let file = File::open(path).with_context(|| format!("open {path}"))?;
    let mut scores = Vec::new();
    let mut saw_header = false;
    for (index, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !saw_header {
            if line != "score" {
                bail!("{path}:{}: expected a `score` header line", index + 1);
            }
            saw_header = true;
            continue;
        }
        let value: f64 = line
            .parse()
            .with_context(|| format!("{path}:{}: bad score {line:?}", index + 1))?;
        scores.push(value);
    }
    if !saw_header {
        bail!("{path}: missing `score` header line");
    }
    Ok(scores)
}

pub(crate) fn parse_geometry(raw: &str) -> Result<SensorGeometry, String> {
    let (w, h) = raw
        .split_once('x')
        .ok_or_else(|| format!("expected WxH, got {raw:?}"))?;
    let width: u16 = w.parse().map_err(|_| format!("bad width {w:?}"))?;
    let height: u16 = h.parse().map_err(|_| format!("bad height {h:?}"))?;
    SensorGeometry::new(width, height).map_err(|e| e.to_string())
}

pub(crate) fn parse_size(raw: &str) -> Result<(u32, u32), String> {
    let (w, h) = raw
        .split_once('x')
        .ok_or_else(|| format!("expected WxH, got {raw:?}"))?;
    let width: u32 = w.parse().map_err(|_| format!("bad width {w:?}"))?;
    let height: u32 = h.parse().map_err(|_| format!("bad height {h:?}"))?;
    if width < 100 || height < 100 {
        return Err("chart size must be at least 100x100".into());
    }
    Ok((width, height))
}

pub(crate) fn parse_u64_pair(raw: &str) -> Result<(u64, u64), String> {
    let (a, b) = raw
        .split_once(':')
        .ok_or_else(|| format!("expected T0:T1, got {raw:?}"))?;
    let t0: u64 = a.parse().map_err(|_| format!("bad value {a:?}"))?;
    let t1: u64 = b.parse().map_err(|_| format!("bad value {b:?}"))?;
    Ok((t0, t1))
}

/// Inclusive arithmetic progression `START:END:STEP` over integers.
#[derive(Clone, Copy)]
pub(crate) struct U64Span {
    pub start: u64,
    pub end: u64,
    pub step: u64,
}

impl U64Span {
    pub fn values(&self) -> Vec<u64> {
        (self.start..=self.end)
            .step_by(self.step as usize)
            .collect()
    }
}

pub(crate) fn parse_span_u64(raw: &str) -> Result<U64Span, String> {
    let parts: Vec<&str> = raw.split(':').collect();
    let [start, end, step] = parts.as_slice() else {
        return Err(format!("expected START:END:STEP, got {raw:?}"));
    };
    let parse = |s: &str| s.parse::<u64>().map_err(|_| format!("bad value {s:?}"));
    let span = U64Span {
        start: parse(start)?,
        end: parse(end)?,
        step: parse(step)?,
    };
    if span.step == 0 {
        return Err("step must be positive".into());
    }
    if span.end < span.start {
        return Err("end must not be below start".into());
    }
    Ok(span)
}

/// Inclusive arithmetic progression `START:END:STEP` over reals. Keeps
/// the decimal places of the STEP literal so values format the way the
/// user wrote the grid.
#[derive(Clone)]
pub(crate) struct F64Span {
    pub start: f64,
    pub end: f64,
    pub step: f64,
    decimals: usize,
}

impl F64Span {
    pub fn values(&self) -> Vec<f64> {
        let count = ((self.end - self.start) / self.step).round() as usize;
        (0..=count)
            .map(|k| self.start + k as f64 * self.step)
            .filter(|v| *v <= self.end + self.step * 1e-6)
            .collect()
    }

    pub fn format(&self, value: f64) -> String {
        format!("{value:.*}", self.decimals)
    }
}

pub(crate) fn parse_span_f64(raw: &str) -> Result<F64Span, String> {
    let parts: Vec<&str> = raw.split(':').collect();
    let [start, end, step] = parts.as_slice() else {
        return Err(format!("expected START:END:STEP, got {raw:?}"));
    };
    let parse = |s: &str| s.parse::<f64>().map_err(|_| format!("bad value {s:?}"));
    let span = F64Span {
        start: parse(start)?,
        end: parse(end)?,
        step: parse(step)?,
        decimals: step.split('.').nth(1).map_or(0, str::len),
    };
    if !span.step.is_finite() || span.step <= 0.0 {
        return Err("step must be positive".into());
    }
    if !span.start.is_finite() || !span.end.is_finite() || span.end < span.start {
        return Err("range must be finite with end at or above start".into());
    }
    Ok(span)
}
