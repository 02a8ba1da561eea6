//! Reading shapes from flags and files.

use std::fs;
use std::io::{self, BufRead, BufReader, Read};
use std::path::Path;

use anyhow::{bail, Context, Result};
use multree::{FMatrix, TreeShape};

/// Parses one shape written as `t|l`, as JSON `{"t":[..],"l":[..]}`, or as
/// an F-matrix lower triangle `2;1,3;...`.
pub fn parse_shape(text: &str) -> Result<TreeShape> {
    let s = text.trim();
    if s.starts_with('{') {
        return TreeShape::from_json(s).with_context(|| format!("invalid JSON shape {s:?}"));
    }
    if s.contains('|') {
        return TreeShape::from_text(s).with_context(|| format!("invalid shape {s:?}"));
    }
    parse_fmatrix(s)?
        .to_shape()
        .with_context(|| format!("invalid F-matrix {s:?}"))
}

/// Parses an F-matrix in `;`-separated form. Whitespace is ignored.
pub fn parse_fmatrix(text: &str) -> Result<FMatrix> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    compact
        .parse::<FMatrix>()
        .with_context(|| format!("invalid F-matrix {text:?}"))
}

/// A shape given either literally or as the path of a file holding it. A
/// file may also hold an F-matrix with one row per line.
pub fn load_shape(arg: &str) -> Result<TreeShape> {
    let path = Path::new(arg);
    if !path.is_file() {
        return parse_shape(arg);
    }
    let content = fs::read_to_string(path).with_context(|| format!("cannot read {arg}"))?;
    let lines: Vec<&str> = content.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
    match lines.as_slice() {
        [] => bail!("{arg} is empty"),
        [one] => parse_shape(one),
        many if many.iter().all(|l| !l.contains('|') && !l.starts_with('{')) => {
            let joined = many
                .iter()
                .map(|l| {
                    l.split(|c: char| c == ',' || c.is_whitespace())
                        .filter(|v| !v.is_empty())
                        .collect::<Vec<_>>()
                })
                .map(|fields| trim_upper_zeros(&fields).join(","))
                .collect::<Vec<_>>()
                .join(";");
            parse_fmatrix(&joined)?
                .to_shape()
                .with_context(|| format!("invalid F-matrix in {arg}"))
        }
        _ => bail!("{arg} holds more than one shape"),
    }
}

/// Accepts full square rows by dropping entries to the right of the
/// diagonal, which must be zero.
fn trim_upper_zeros<'a>(fields: &[&'a str]) -> Vec<&'a str> {
    let mut v = fields.to_vec();
    while v.len() > 1 && v.last() == Some(&"0") {
        v.pop();
    }
    v
}

/// Reads every nonblank line of `path` (`-` for standard input) as a shape.
pub fn read_shapes(path: &str) -> Result<Vec<TreeShape>> {
    let reader: Box<dyn Read> = if path == "-" {
        Box::new(io::stdin())
    } else {
        Box::new(fs::File::open(path).with_context(|| format!("cannot open {path}"))?)
    };
    let mut shapes = Vec::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        shapes.push(parse_record(&line).with_context(|| format!("{path}: line {}", i + 1))?);
    }
    Ok(shapes)
}

/// A line of shape output: plain text, or a JSON-lines record carrying the
/// shape under `"shape"`.
fn parse_record(line: &str) -> Result<TreeShape> {
    let s = line.trim();
    if s.starts_with('{') {
        let value: serde_json::Value = serde_json::from_str(s)?;
        let inner = value.get("shape").unwrap_or(&value);
        return Ok(serde_json::from_value(inner.clone())?);
    }
    parse_shape(s)
}
