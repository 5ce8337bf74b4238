//! Plain-text files for point sets and shadings.
//!
//! A set file starts with `scale=<m> kind=set1d|set2d label=<label>` and
//! lists one value (set1d) or one `i,j` pair (set2d) per line, strictly
//! increasing. Labels are percent-escaped so the header stays one line of
//! space-separated fields. A shading file has one `t: q1,q2,...` line per
//! tube, with square linear indices strictly increasing.

use crate::error::{Error, Result};
use crate::grid::{GridSquare, Scale};
use crate::sets::{DiscreteSet1D, DiscreteSet2D};
use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SetFile {
    One(DiscreteSet1D),
    Two(DiscreteSet2D),
}

impl SetFile {
    pub fn scale(&self) -> Scale {
        match self {
            SetFile::One(a) => a.scale,
            SetFile::Two(p) => p.scale,
        }
    }
}

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

pub fn escape_label(label: &str) -> String {
    let mut out = String::with_capacity(label.len());
    for c in label.chars() {
        if c == '%' || c.is_whitespace() || c.is_control() {
            let mut buf = [0u8; 4];
            for b in c.encode_utf8(&mut buf).bytes() {
                let _ = write!(out, "%{b:02X}");
            }
        } else {
            out.push(c);
        }
    }
    out
}

pub fn unescape_label(text: &str) -> std::result::Result<String, String> {
    let bytes = text.as_bytes();
    let mut out = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'%' {
            let hex = bytes
                .get(i + 1..i + 3)
                .and_then(|h| std::str::from_utf8(h).ok())
                .and_then(|h| u8::from_str_radix(h, 16).ok())
                .ok_or_else(|| format!("bad escape at byte {i}"))?;
            out.push(hex);
            i += 3;
        } else {
            out.push(bytes[i]);
            i += 1;
        }
    }
    String::from_utf8(out).map_err(|_| "label is not UTF-8".to_string())
}

fn parse_int(field: &str, line: usize) -> Result<i64> {
    field
        .parse::<i64>()
        .map_err(|e| err(line, format!("`{field}`: {e}")))
}

/// Set file for a one-dimensional set.
pub fn write_set1d(a: &DiscreteSet1D) -> String {
    let mut out = format!("scale={} kind=set1d label={}\n", a.m(), escape_label(&a.label));
    for v in a.values() {
        let _ = writeln!(out, "{v}");
    }
    out
}

pub fn write_set2d(p: &DiscreteSet2D) -> String {
    let mut out = format!("scale={} kind=set2d label={}\n", p.m(), escape_label(&p.label));
    for (i, j) in p.points() {
        let _ = writeln!(out, "{i},{j}");
    }
    out
}

pub fn write_set(set: &SetFile) -> String {
    match set {
        SetFile::One(a) => write_set1d(a),
        SetFile::Two(p) => write_set2d(p),
    }
}

pub fn parse_set(text: &str) -> Result<SetFile> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| err(1, "missing header"))?;
    let (mut scale, mut kind, mut label) = (None, None, None);
    for field in header.split(' ') {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| err(1, format!("header field `{field}` is not key=value")))?;
        let slot = match key {
            "scale" => &mut scale,
            "kind" => &mut kind,
            "label" => &mut label,
            _ => return Err(err(1, format!("unknown header key `{key}`"))),
        };
        if slot.replace(value).is_some() {
            return Err(err(1, format!("header key `{key}` repeated")));
        }
    }
    let m = scale.ok_or_else(|| err(1, "header lacks scale"))?;
    let m: u32 = m.parse().map_err(|_| err(1, format!("scale `{m}` is not an integer")))?;
    let scale = Scale::new(m).map_err(|e| err(1, e.to_string()))?;
    let label = unescape_label(label.unwrap_or("")).map_err(|e| err(1, e))?;
    match kind.ok_or_else(|| err(1, "header lacks kind"))? {
        "set1d" => {
            let mut vals: Vec<i64> = Vec::new();
            for (k, line) in lines.enumerate() {
                let v = parse_int(line, k + 2)?;
                if vals.last().is_some_and(|&w| w >= v) {
                    return Err(err(k + 2, "values must be strictly increasing"));
                }
                vals.push(v);
            }
            Ok(SetFile::One(DiscreteSet1D::new(scale, vals, label)))
        }
        "set2d" => {
            let mut pts: Vec<(i64, i64)> = Vec::new();
            for (k, line) in lines.enumerate() {
                let (i, j) = line
                    .split_once(',')
                    .ok_or_else(|| err(k + 2, format!("`{line}` is not i,j")))?;
                let p = (parse_int(i, k + 2)?, parse_int(j, k + 2)?);
                if pts.last().is_some_and(|&q| q >= p) {
                    return Err(err(k + 2, "points must be strictly increasing"));
                }
                pts.push(p);
            }
            Ok(SetFile::Two(DiscreteSet2D::new(scale, pts, label)))
        }
        other => Err(err(1, format!("unknown kind `{other}`"))),
    }
}

/// One line per tube, empty shadings included.
pub fn write_shading(per_tube: &[Vec<GridSquare>]) -> String {
    let mut out = String::new();
    for (t, row) in per_tube.iter().enumerate() {
        let mut idx: Vec<u64> = row.iter().map(|p| p.linear_index()).collect();
        idx.sort_unstable();
        let list: Vec<String> = idx.iter().map(u64::to_string).collect();
        let _ = writeln!(out, "{t}: {}", list.join(","));
    }
    out
}

/// Rows for `tubes` tubes; tubes without a line get an empty shading.
pub fn parse_shading(text: &str, scale: Scale, tubes: usize) -> Result<Vec<Vec<GridSquare>>> {
    let mut rows: Vec<Option<Vec<GridSquare>>> = vec![None; tubes];
    for (k, line) in text.lines().enumerate() {
        let ln = k + 1;
        let (t, list) = line
            .split_once(':')
            .ok_or_else(|| err(ln, "expected `tube: squares`"))?;
        let t: usize = t
            .trim()
            .parse()
            .map_err(|_| err(ln, format!("tube index `{t}` is not an integer")))?;
        let slot = rows
            .get_mut(t)
            .ok_or_else(|| err(ln, format!("tube {t} out of range for {tubes} tubes")))?;
        if slot.is_some() {
            return Err(err(ln, format!("tube {t} listed twice")));
        }
        let list = list.trim();
        let mut row: Vec<GridSquare> = Vec::new();
        let mut last: Option<u64> = None;
        if !list.is_empty() {
            for f in list.split(',') {
                let q: u64 = f
                    .parse()
                    .map_err(|_| err(ln, format!("square index `{f}` is not an integer")))?;
                if last.is_some_and(|l| l >= q) {
                    return Err(err(ln, "square indices must be strictly increasing"));
                }
                last = Some(q);
                row.push(GridSquare::from_linear_index(q, scale).map_err(|e| err(ln, e.to_string()))?);
            }
        }
        *slot = Some(row);
    }
    Ok(rows.into_iter().map(Option::unwrap_or_default).collect())
}
