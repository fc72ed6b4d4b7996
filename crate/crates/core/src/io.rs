//! Reading PCG recordings (WAV, raw binary) and annotation CSVs,
//! plus CSV export of result tables.

use crate::error::{Error, Result};
use crate::signal::Signal;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::Path;

/// First or second heart sound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SoundKind {
    S1,
    S2,
}

impl fmt::Display for SoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SoundKind::S1 => write!(f, "S1"),
            SoundKind::S2 => write!(f, "S2"),
        }
    }
}

/// One timestamped ground-truth label.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Label {
    pub time_s: f64,
    pub kind: SoundKind,
}

/// Ordered S1/S2 ground-truth labels parsed from an annotation file.
#[derive(Debug, Clone, Default)]
pub struct LabelSet {
    entries: Vec<Label>,
}

impl LabelSet {
    /// Build from unsorted labels; sorts by time and validates sign.
    pub fn new(mut entries: Vec<Label>) -> Result<Self> {
        if entries.iter().any(|l| l.time_s < 0.0 || !l.time_s.is_finite()) {
            return Err(Error::InvalidParam("label times must be non-negative".into()));
        }
        entries.sort_by(|a, b| a.time_s.partial_cmp(&b.time_s).unwrap());
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[Label] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Times of all labels of `kind`, in order.
    pub fn times(&self, kind: SoundKind) -> Vec<f64> {
        self.entries
            .iter()
            .filter(|l| l.kind == kind)
            .map(|l| l.time_s)
            .collect()
    }
}

/// Sample encoding of a raw binary recording.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleEncoding {
    Int8,
    Int16Le,
    Float32Le,
}

impl SampleEncoding {
    fn width(&self) -> usize {
        match self {
            SampleEncoding::Int8 => 1,
            SampleEncoding::Int16Le => 2,
            SampleEncoding::Float32Le => 4,
        }
    }
}

/// Layout of a raw binary recording; the sampling rate must be supplied
/// by the caller since the format carries no header.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawFormatSpec {
    pub fs: f64,
    pub sample_encoding: SampleEncoding,
    /// Channel to extract when the stream interleaves several.
    #[serde(default)]
    pub channel: usize,
    /// Number of interleaved channels in the stream.
    #[serde(default = "default_one")]
    pub channels: usize,
}

fn default_one() -> usize {
    1
}

impl RawFormatSpec {
    pub fn mono(fs: f64, sample_encoding: SampleEncoding) -> Self {
        Self {
            fs,
            sample_encoding,
            channel: 0,
            channels: 1,
        }
    }
}

/// Read a PCM RIFF/WAV file; extracts the first channel, scales integer
/// samples to [-1, 1) by 2^(bits-1), takes the rate from the header.
pub fn read_wav(path: impl AsRef<Path>) -> Result<Signal> {
    let bytes = fs::read(path.as_ref())?;
    read_wav_bytes(&bytes)
}

pub(crate) fn read_wav_bytes(bytes: &[u8]) -> Result<Signal> {
    let header_err = |msg: &str| Error::Format(format!("malformed WAV: {msg}"));
    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(header_err("missing RIFF/WAVE marker"));
    }
    let u16le = |o: usize| u16::from_le_bytes([bytes[o], bytes[o + 1]]);
    let u32le = |o: usize| u32::from_le_bytes([bytes[o], bytes[o + 1], bytes[o + 2], bytes[o + 3]]);

    let mut fmt_chunk: Option<(u16, u16, u32, u16)> = None; // format, channels, rate, bits
    let mut data: Option<&[u8]> = None;
    let mut pos = 12usize;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let size = u32le(pos + 4) as usize;
        let body_start = pos + 8;
        let body_end = body_start.checked_add(size).ok_or_else(|| header_err("chunk overflow"))?;
        if body_end > bytes.len() {
            return Err(header_err("chunk extends past end of file"));
        }
        match id {
            b"fmt " => {
                if size < 16 {
                    return Err(header_err("fmt chunk too short"));
                }
                fmt_chunk = Some((
                    u16le(body_start),
                    u16le(body_start + 2),
                    u32le(body_start + 4),
                    u16le(body_start + 14),
                ));
            }
            b"data" => data = Some(&bytes[body_start..body_end]),
            _ => {}
        }
        pos = body_end + (size & 1); // chunks are word aligned
    }

    let (format, channels, rate, bits) = fmt_chunk.ok_or_else(|| header_err("no fmt chunk"))?;
    let data = data.ok_or_else(|| header_err("no data chunk"))?;
    if channels == 0 {
        return Err(header_err("zero channels"));
    }
    if channels > 1 {
        log::warn!("WAV has {channels} channels; taking channel 0");
    }
    let decode = |bytes_per: usize, f: &dyn Fn(&[u8]) -> f64| -> Result<Vec<f64>> {
        let frame = bytes_per * channels as usize;
        if data.len() % frame != 0 {
            return Err(header_err("data chunk not a whole number of frames"));
        }
        Ok(data.chunks_exact(frame).map(|c| f(&c[0..bytes_per])).collect())
    };
    let samples = match (format, bits) {
        (1, 8) => decode(1, &|b| (b[0] as f64 - 128.0) / 128.0)?,
        (1, 16) => decode(2, &|b| i16::from_le_bytes([b[0], b[1]]) as f64 / 32768.0)?,
        (1, 24) => decode(3, &|b| {
            let v = ((b[2] as i32) << 16 | (b[1] as i32) << 8 | b[0] as i32) << 8 >> 8;
            v as f64 / 8_388_608.0
        })?,
        (1, 32) => decode(4, &|b| {
            i32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64 / 2_147_483_648.0
        })?,
        (3, 32) => decode(4, &|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64)?,
        (1, other) => {
            return Err(Error::Format(format!("unsupported PCM bit depth: {other}")))
        }
        (codec, _) => {
            return Err(Error::Format(format!(
                "unsupported WAV codec {codec} (only PCM and IEEE float)"
            )))
        }
    };
    Ok(Signal::new(samples, rate as f64)?.with_log_entry("read_wav".into()))
}

/// Write a signal as 16-bit PCM mono WAV (round-trip helper and synthetic
/// export); samples are clamped to [-1, 1].
pub fn write_wav(path: impl AsRef<Path>, sig: &Signal) -> Result<()> {
    let n = sig.len();
    let rate = sig.fs().round() as u32;
    let data_size = (n * 2) as u32;
    let mut out = Vec::with_capacity(44 + n * 2);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data_size).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes()); // PCM
    out.extend_from_slice(&1u16.to_le_bytes()); // mono
    out.extend_from_slice(&rate.to_le_bytes());
    out.extend_from_slice(&(rate * 2).to_le_bytes());
    out.extend_from_slice(&2u16.to_le_bytes());
    out.extend_from_slice(&16u16.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&data_size.to_le_bytes());
    for &v in sig.samples() {
        let q = (v.clamp(-1.0, 1.0) * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
        out.extend_from_slice(&q.to_le_bytes());
    }
    fs::write(path.as_ref(), out)?;
    Ok(())
}

/// Read a raw binary recording described by `spec`.
pub fn read_raw(path: impl AsRef<Path>, spec: &RawFormatSpec) -> Result<Signal> {
    let bytes = fs::read(path.as_ref())?;
    read_raw_bytes(&bytes, spec)
}

pub(crate) fn read_raw_bytes(bytes: &[u8], spec: &RawFormatSpec) -> Result<Signal> {
    if !(spec.fs > 0.0) {
        return Err(Error::InvalidParam("raw format fs must be positive".into()));
    }
    if spec.channels == 0 || spec.channel >= spec.channels {
        return Err(Error::InvalidParam(format!(
            "channel {} out of range for {} channels",
            spec.channel, spec.channels
        )));
    }
    if bytes.is_empty() {
        return Err(Error::Format("raw file is empty".into()));
    }
    let width = spec.sample_encoding.width();
    let frame = width * spec.channels;
    if bytes.len() % frame != 0 {
        let offset = bytes.len() - bytes.len() % frame;
        return Err(Error::Format(format!(
            "raw file truncated: trailing {} bytes at offset {offset}",
            bytes.len() % frame
        )));
    }
    let off = spec.channel * width;
    let samples: Vec<f64> = bytes
        .chunks_exact(frame)
        .map(|c| match spec.sample_encoding {
            SampleEncoding::Int8 => (c[off] as i8) as f64 / 128.0,
            SampleEncoding::Int16Le => {
                i16::from_le_bytes([c[off], c[off + 1]]) as f64 / 32768.0
            }
            SampleEncoding::Float32Le => {
                f32::from_le_bytes([c[off], c[off + 1], c[off + 2], c[off + 3]]) as f64
            }
        })
        .collect();
    Ok(Signal::new(samples, spec.fs)?.with_log_entry("read_raw".into()))
}

/// Normalize an annotation `Value` cell: tolerate case and subscript
/// typesetting ("S1", "s1", "S₁", "S_1").
fn parse_sound_value(raw: &str) -> Option<SoundKind> {
    let cleaned: String = raw
        .trim()
        .chars()
        .filter(|c| *c != '_')
        .map(|c| match c {
            '₁' => '1',
            '₂' => '2',
            c => c.to_ascii_uppercase(),
        })
        .collect();
    match cleaned.as_str() {
        "S1" => Some(SoundKind::S1),
        "S2" => Some(SoundKind::S2),
        _ => None,
    }
}

/// Read a semicolon-delimited annotation CSV with a `Location;Value`
/// header. Rows whose Value is not S1/S2 are ignored; a kept row with an
/// unparsable Location is an error carrying its line number.
pub fn read_annotations(path: impl AsRef<Path>) -> Result<LabelSet> {
    let text = fs::read_to_string(path.as_ref())?;
    read_annotations_str(&text)
}

pub fn read_annotations_str(text: &str) -> Result<LabelSet> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Parse { line: 1, msg: "empty annotation file".into() })?;
    let cols: Vec<String> = header.split(';').map(|c| c.trim().to_ascii_lowercase()).collect();
    let loc_idx = cols.iter().position(|c| c == "location").ok_or_else(|| Error::Parse {
        line: 1,
        msg: "missing 'Location' column".into(),
    })?;
    let val_idx = cols.iter().position(|c| c == "value").ok_or_else(|| Error::Parse {
        line: 1,
        msg: "missing 'Value' column".into(),
    })?;

    let mut entries = Vec::new();
    for (i, line) in lines {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(';').collect();
        if fields.len() <= loc_idx.max(val_idx) {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected at least {} fields", loc_idx.max(val_idx) + 1),
            });
        }
        let kind = match parse_sound_value(fields[val_idx]) {
            Some(k) => k,
            None => continue, // other values are ignored
        };
        let time_s: f64 = fields[loc_idx].trim().parse().map_err(|_| Error::Parse {
            line: line_no,
            msg: format!("unparsable Location '{}'", fields[loc_idx].trim()),
        })?;
        if time_s < 0.0 {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("negative Location {time_s}"),
            });
        }
        entries.push(Label { time_s, kind });
    }
    LabelSet::new(entries)
}

/// One cell of an exported table.
#[derive(Debug, Clone, PartialEq)]
pub enum TableCell {
    Num(f64),
    Text(String),
    /// Explicit not-a-value marker (written as NaN).
    Missing,
}

/// Format with `sig` significant digits, trailing zeros trimmed.
pub(crate) fn format_significant(v: f64, sig: usize) -> String {
    if !v.is_finite() {
        return "NaN".into();
    }
    if v == 0.0 {
        return "0".into();
    }
    let exp = v.abs().log10().floor() as i32;
    let decimals = sig as i32 - 1 - exp;
    if decimals <= 0 {
        // Round to the requested significance left of the decimal point.
        let scale = 10f64.powi(-decimals);
        return format!("{}", (v / scale).round() * scale);
    }
    let s = format!("{v:.prec$}", prec = decimals as usize);
    let trimmed = s.trim_end_matches('0').trim_end_matches('.');
    trimmed.to_string()
}

/// Write named columns as comma-separated UTF-8: header row of names, one
/// row per entry, floats with 6 significant digits. All columns must have
/// equal length.
pub fn write_table(path: impl AsRef<Path>, columns: &[(String, Vec<TableCell>)]) -> Result<()> {
    let text = render_table(columns)?;
    let mut f = fs::File::create(path.as_ref())?;
    f.write_all(text.as_bytes())?;
    Ok(())
}

pub fn render_table(columns: &[(String, Vec<TableCell>)]) -> Result<String> {
    if let Some(first) = columns.first() {
        let rows = first.1.len();
        if let Some((name, col)) = columns.iter().find(|(_, c)| c.len() != rows) {
            return Err(Error::InvalidParam(format!(
                "column '{name}' has {} rows, expected {rows}",
                col.len()
            )));
        }
    }
    let mut out = String::new();
    out.push_str(
        &columns
            .iter()
            .map(|(name, _)| name.clone())
            .collect::<Vec<_>>()
            .join(","),
    );
    out.push('\n');
    let rows = columns.first().map_or(0, |(_, c)| c.len());
    for r in 0..rows {
        let line = columns
            .iter()
            .map(|(_, col)| match &col[r] {
                TableCell::Num(v) => format_significant(*v, 6),
                TableCell::Text(t) => t.clone(),
                TableCell::Missing => "NaN".into(),
            })
            .collect::<Vec<_>>()
            .join(",");
        out.push_str(&line);
        out.push('\n');
    }
    Ok(out)
}
