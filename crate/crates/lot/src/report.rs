//! Deterministic artifact emission. Every real number is rendered at a
//! fixed 17-significant-digit precision and object keys serialize in
//! sorted order, so a rerun with the same configuration and seed
//! reproduces each report byte for byte.

use std::io::{self, Write as IoWrite};
use std::path::Path;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter, Serializer};
use serde_json::Value;

use crate::error::{LotError, Result};

/// Fixed-precision rendering shared by the JSON and CSV writers.
/// `-0.0` folds into `0.0` so sign noise from subtractions cannot make
/// two equal reports differ.
pub fn fmt_real(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

/// JSON value for a real. Non-finite values become marker strings;
/// plain JSON has no encoding for them and dropping them to `null`
/// would hide the failure they usually indicate.
pub fn real(x: f64) -> Value {
    if x.is_nan() {
        return Value::String("NaN".into());
    }
    if x.is_infinite() {
        return Value::String(if x > 0.0 { "Infinity" } else { "-Infinity" }.into());
    }
    let x = if x == 0.0 { 0.0 } else { x };
    Value::Number(serde_json::Number::from_f64(x).expect("finite real"))
}

pub fn reals(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| real(x)).collect())
}

pub fn real_rows(rows: &[Vec<f64>]) -> Value {
    Value::Array(rows.iter().map(|r| reals(r)).collect())
}

/// Pretty printer with the float rendering pinned to [`fmt_real`]
/// instead of shortest-roundtrip.
struct FixedPretty<'a> {
    inner: PrettyFormatter<'a>,
}

impl Formatter for FixedPretty<'_> {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + IoWrite,
    {
        writer.write_all(fmt_real(value).as_bytes())
    }

    fn begin_array<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + IoWrite,
    {
        self.inner.begin_array(writer)
    }

    fn end_array<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + IoWrite,
    {
        self.inner.end_array(writer)
    }

    fn begin_array_value<W>(&mut self, writer: &mut W, first: bool) -> io::Result<()>
    where
        W: ?Sized + IoWrite,
    {
        self.inner.begin_array_value(writer, first)
    }

    fn end_array_value<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + IoWrite,
    {
        self.inner.end_array_value(writer)
    }

    fn begin_object<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + IoWrite,
    {
        self.inner.begin_object(writer)
    }

    fn end_object<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + IoWrite,
    {
        self.inner.end_object(writer)
    }

    fn begin_object_key<W>(&mut self, writer: &mut W, first: bool) -> io::Result<()>
    where
        W: ?Sized + IoWrite,
    {
        self.inner.begin_object_key(writer, first)
    }

    fn begin_object_value<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + IoWrite,
    {
        self.inner.begin_object_value(writer)
    }

    fn end_object_value<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + IoWrite,
    {
        self.inner.end_object_value(writer)
    }
}

/// Serializes a value with the fixed formatter, newline-terminated.
pub fn to_json_string(value: &Value) -> String {
    let mut buf = Vec::new();
    let mut ser =
        Serializer::with_formatter(&mut buf, FixedPretty { inner: PrettyFormatter::new() });
    value.serialize(&mut ser).expect("in-memory serialization cannot fail");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serializer emits UTF-8")
}

pub fn write_json(path: &Path, value: &Value) -> Result<()> {
    std::fs::write(path, to_json_string(value))
        .map_err(|e| LotError::Input(format!("{}: {e}", path.display())))
}

pub fn ensure_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path)
        .map_err(|e| LotError::Input(format!("{}: {e}", path.display())))
}
