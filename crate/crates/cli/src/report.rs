//! `report.json` and `trajectory.csv`.
//!
//! Reports are byte-for-byte reproducible: object keys are sorted and every
//! float is written with 17 significant digits.

use std::io::{self, Write};
use std::path::Path;

use polthomas::{PoincarePoint, RotationResult, TrajectoryRecord};
use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};
use crate::scenario::angles_of_stokes;

pub const REPORT_FILE: &str = "report.json";
pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const TRAJECTORY_HEADER: [&str; 7] = ["state_index", "element_index", "t", "s1", "s2", "s3", "intensity"];

/// Pretty-printing with floats as `{:.16e}`.
pub struct FixedFloatFormatter<'a>(PrettyFormatter<'a>);

impl Default for FixedFloatFormatter<'_> {
    fn default() -> Self {
        Self(PrettyFormatter::new())
    }
}

impl Formatter for FixedFloatFormatter<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_array(writer)
    }

    fn end_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object(writer)
    }

    fn end_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object_value(writer)
    }
}

/// Serializes `value` as reproducible JSON text with a trailing newline.
pub fn to_report_string(value: &Value) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FixedFloatFormatter::default());
    value
        .serialize(&mut ser)
        .expect("serializing a JSON value to memory cannot fail");
    out.push(b'\n');
    String::from_utf8(out).expect("serde_json emits UTF-8")
}

fn io_error(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn write_report(dir: &Path, value: &Value) -> CliResult<()> {
    let path = dir.join(REPORT_FILE);
    std::fs::write(&path, to_report_string(value)).map_err(io_error(&path))
}

pub fn write_trajectory(dir: &Path, records: &[TrajectoryRecord]) -> CliResult<()> {
    let path = dir.join(TRAJECTORY_FILE);
    let file = std::fs::File::create(&path).map_err(io_error(&path))?;
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(io::BufWriter::new(file));
    let csv_error = |e: csv::Error| CliError::Io {
        path: path.clone(),
        source: e.into(),
    };
    w.write_record(TRAJECTORY_HEADER).map_err(csv_error)?;
    for r in records {
        let p = r.point.vector();
        w.write_record([
            r.state_index.to_string(),
            r.element_index.to_string(),
            format!("{:.16e}", r.t),
            format!("{:.16e}", p.x),
            format!("{:.16e}", p.y),
            format!("{:.16e}", p.z),
            format!("{:.16e}", r.intensity),
        ])
        .map_err(csv_error)?;
    }
    w.flush().map_err(io_error(&path))
}

/// A sphere point as Stokes components and `(2χ, 2ψ)` in degrees.
pub fn point_json(p: &PoincarePoint) -> Value {
    let (two_chi, two_psi) = angles_of_stokes(p);
    json!({
        "stokes": [p.x(), p.y(), p.z()],
        "two_chi_deg": two_chi,
        "two_psi_deg": two_psi,
    })
}

pub fn rotation_json(r: &RotationResult) -> Value {
    json!({ "axis": point_json(&r.axis), "angle_deg": r.angle.to_degrees() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_seventeen_digits_and_keys_are_sorted() {
        let text = to_report_string(&json!({ "b": 0.1, "a": [1, 2.5e-300], "c": { "z": -3.0, "y": true } }));
        assert_eq!(
            text,
            "{\n  \"a\": [\n    1,\n    2.5000000000000000e-300\n  ],\n  \"b\": 1.0000000000000001e-1,\n  \
             \"c\": {\n    \"y\": true,\n    \"z\": -3.0000000000000000e0\n  }\n}\n"
        );
    }

    #[test]
    fn fixed_format_round_trips() {
        for x in [0.1, 1.0 / 3.0, -2.0f64.sqrt(), 6.02e23, f64::MIN_POSITIVE] {
            let s = format!("{x:.16e}");
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
    }
}
