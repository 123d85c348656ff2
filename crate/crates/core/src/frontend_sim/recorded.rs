//! Plain-text measurement recordings.
//!
//! One record per line, `#` starts a comment line:
//!
//! ```text
//! <t> DET [<x> <y> <w> <h> <confidence> <label>]...
//! <t> TRK <x> <y> <w> <h> <alpha>
//! <t> TRK none
//! ```
//!
//! Boxes are in pixels, `alpha` in radians, labels contain no whitespace.

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use super::{Frame, FrameRequest, MeasurementSource};
use crate::geometry::{AngledBox, AxisAlignedBox};
use crate::tracker::{Detection, FrameInput};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("record {record} (line {line}): {message}")]
    Record { record: usize, line: usize, message: String },
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

fn num(tok: &str, what: &str) -> Result<f64, String> {
    tok.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| format!("{what}: expected a finite number, got {tok:?}"))
}

fn parse_record(line: &str) -> Result<Frame, String> {
    let toks: Vec<&str> = line.split_whitespace().collect();
    if toks.len() < 2 {
        return Err("expected a timestamp and a record kind".into());
    }
    let t = num(toks[0], "timestamp")?;
    let rest = &toks[2..];
    let input = match toks[1] {
        "DET" => {
            if !rest.len().is_multiple_of(6) {
                return Err(format!("DET fields come in groups of 6, got {}", rest.len()));
            }
            let dets = rest
                .chunks(6)
                .map(|c| {
                    let bbox = AxisAlignedBox::new(num(c[0], "x")?, num(c[1], "y")?, num(c[2], "w")?, num(c[3], "h")?)
                        .map_err(|e| e.to_string())?;
                    Ok(Detection {
                        bbox,
                        confidence: num(c[4], "confidence")?,
                        class_label: c[5].to_owned(),
                    })
                })
                .collect::<Result<Vec<_>, String>>()?;
            FrameInput::Detections(dets)
        }
        "TRK" => match rest {
            ["none"] => FrameInput::Tracked(None),
            [x, y, w, h, a] => FrameInput::Tracked(Some(
                AngledBox::new(num(x, "x")?, num(y, "y")?, num(w, "w")?, num(h, "h")?, num(a, "alpha")?)
                    .map_err(|e| e.to_string())?,
            )),
            _ => return Err(format!("TRK expects 5 fields or `none`, got {}", rest.len())),
        },
        other => return Err(format!("unknown record kind {other:?}")),
    };
    Ok(Frame { t, input })
}

/// Parses a recording; timestamps must be strictly increasing.
pub fn read_recorded(text: &str) -> Result<Vec<Frame>, ParseError> {
    let mut frames: Vec<Frame> = Vec::new();
    let records = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
    for (record, (i, line)) in records.enumerate() {
        let err = |message: String| ParseError::Record { record, line: i + 1, message };
        let frame = parse_record(line).map_err(err)?;
        if let Some(prev) = frames.last() {
            if !(frame.t > prev.t) {
                return Err(err(format!("timestamp {} does not increase", frame.t)));
            }
        }
        frames.push(frame);
    }
    Ok(frames)
}

pub fn write_recorded(frames: &[Frame]) -> String {
    let mut out = String::new();
    for f in frames {
        let _ = write!(out, "{}", f.t);
        match &f.input {
            FrameInput::Detections(dets) => {
                out.push_str(" DET");
                for d in dets {
                    let b = &d.bbox;
                    let _ = write!(out, " {} {} {} {} {} {}", b.x, b.y, b.w, b.h, d.confidence, d.class_label);
                }
            }
            FrameInput::Tracked(None) => out.push_str(" TRK none"),
            FrameInput::Tracked(Some(b)) => {
                let _ = write!(out, " TRK {} {} {} {} {}", b.x, b.y, b.w, b.h, b.alpha);
            }
        }
        out.push('\n');
    }
    out
}

/// Replays a recording regardless of what the tracker requests.
#[derive(Debug, Clone)]
pub struct RecordedSource {
    frames: std::vec::IntoIter<Frame>,
}

impl RecordedSource {
    pub fn new(frames: Vec<Frame>) -> Self {
        Self {
            frames: frames.into_iter(),
        }
    }

    pub fn load(path: &Path) -> Result<Self, ParseError> {
        let text = std::fs::read_to_string(path).map_err(|e| ParseError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Ok(Self::new(read_recorded(&text)?))
    }
}

impl MeasurementSource for RecordedSource {
    fn next_frame(&mut self, _request: &FrameRequest) -> Option<Frame> {
        self.frames.next()
    }
}
