//! Plain-text point files.
//!
//! ```text
//! # comment
//! 2 3
//! 0 0
//! 1/3 0
//! 0 0.25
//! ```
//!
//! The header gives the dimension and the number of points. Each coordinate
//! is a decimal literal or `p/q`; both are read exactly.

use std::fmt::Write as _;

use num_rational::BigRational;

use crate::exactnum::{format_rational, parse_rational, VectorD};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parse error: line {line}: {message}")]
pub struct PointFileError {
    /// One-based line number.
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointFile {
    pub d: usize,
    pub points: Vec<VectorD<BigRational>>,
}

pub fn parse_points(text: &str) -> Result<PointFile, PointFileError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let total_lines = text.lines().count();

    let (header_line, header) = lines.next().ok_or(PointFileError {
        line: 1,
        message: "missing \"d n\" header".into(),
    })?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let header_err = |message: &str| PointFileError {
        line: header_line,
        message: message.into(),
    };
    let [d, n] = fields.as_slice() else {
        return Err(header_err("header must be \"d n\""));
    };
    let d: usize = d
        .parse()
        .map_err(|_| header_err("dimension is not a non-negative integer"))?;
    let n: usize = n
        .parse()
        .map_err(|_| header_err("point count is not a non-negative integer"))?;
    if d == 0 {
        return Err(header_err("dimension must be positive"));
    }

    let mut points = Vec::with_capacity(n);
    for (line, content) in lines {
        if points.len() == n {
            return Err(PointFileError {
                line,
                message: format!("more than the declared {n} points"),
            });
        }
        let coords = content
            .split_whitespace()
            .map(|tok| {
                parse_rational(tok).map_err(|e| PointFileError {
                    line,
                    message: e.to_string(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        if coords.len() != d {
            return Err(PointFileError {
                line,
                message: format!("expected {d} coordinates, found {}", coords.len()),
            });
        }
        points.push(VectorD::new(coords));
    }
    if points.len() != n {
        return Err(PointFileError {
            line: total_lines + 1,
            message: format!("declared {n} points, found {}", points.len()),
        });
    }
    Ok(PointFile { d, points })
}

/// Inverse of [`parse_points`], with coordinates written as `p/q`.
pub fn format_points(d: usize, points: &[VectorD<BigRational>]) -> String {
    let mut out = format!("{d} {}\n", points.len());
    for p in points {
        let coords: Vec<String> = p.coords().iter().map(format_rational).collect();
        writeln!(out, "{}", coords.join(" ")).expect("writing to a String");
    }
    out
}
