use std::fmt::Write as _;
use std::path::Path;

use super::{GridRow, SweepResult, SweepRow};
use crate::{Error, Result};

pub const HEADER: &str = "mode,axis,offset,integral,max";
pub const GRID_HEADER: &str = "mode,tx,ty,theta,scale,integral,max";

/// Nine significant digits.
fn num(v: f64) -> String {
    format!("{v:.8e}")
}

/// `# key=value` manifest lines, the header, then one line per row.
pub fn format_csv(result: &SweepResult) -> String {
    let mut out = String::new();
    for (k, v) in &result.metadata {
        let _ = writeln!(out, "# {k}={v}");
    }
    out.push_str(HEADER);
    out.push('\n');
    for r in &result.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.mode,
            r.axis,
            num(r.offset),
            num(r.integral),
            num(r.max)
        );
    }
    out
}

pub fn export_csv(result: &SweepResult, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, format_csv(result)).map_err(|e| Error::io(path, e))
}

pub fn parse_csv(text: &str) -> Result<SweepResult> {
    let mut result = SweepResult::default();
    let mut saw_header = false;
    for (lineno, line) in text.lines().enumerate() {
        let err = |msg: &str| Error::Parse(format!("line {}: {msg}", lineno + 1));
        if let Some(comment) = line.strip_prefix('#') {
            if saw_header {
                return Err(err("comment after header"));
            }
            let (k, v) = comment
                .trim_start()
                .split_once('=')
                .ok_or_else(|| err("expected `# key=value`"))?;
            result.metadata.insert(k.trim().to_string(), v.trim().to_string());
            continue;
        }
        if !saw_header {
            if line.trim_end() != HEADER {
                return Err(err("missing header"));
            }
            saw_header = true;
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(err("expected 5 fields"));
        }
        let number = |s: &str| -> Result<f64> {
            let v: f64 = s.trim().parse().map_err(|_| err(&format!("bad number `{s}`")))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(err("non-finite number"))
            }
        };
        result.rows.push(SweepRow {
            mode: fields[0].parse()?,
            axis: fields[1].parse()?,
            offset: number(fields[2])?,
            integral: number(fields[3])?,
            max: number(fields[4])?,
        });
    }
    if !saw_header {
        return Err(Error::Parse("missing header".into()));
    }
    Ok(result)
}

pub fn format_grid_csv(rows: &[GridRow]) -> String {
    let mut out = String::from(GRID_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.mode,
            num(r.pose.tx),
            num(r.pose.ty),
            num(r.pose.theta),
            num(r.pose.scale),
            num(r.integral),
            num(r.max)
        );
    }
    out
}

pub fn export_grid_csv(rows: &[GridRow], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, format_grid_csv(rows)).map_err(|e| Error::io(path, e))
}
