//! Stable text output: JSON with every float at 17 significant digits, and
//! `k,prob` CSV for pmfs.

use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::error::Result;

/// Pretty JSON formatter that writes floats in `d.dddddddddddddddde±x` form.
struct FixedFloats<'a> {
    inner: PrettyFormatter<'a>,
}

macro_rules! delegate {
    ($($name:ident($($arg:ident: $ty:ty),*)),* $(,)?) => {
        $(
            fn $name<W: ?Sized + io::Write>(&mut self, writer: &mut W $(, $arg: $ty)*) -> io::Result<()> {
                self.inner.$name(writer $(, $arg)*)
            }
        )*
    };
}

impl Formatter for FixedFloats<'_> {
    delegate!(
        begin_array(),
        end_array(),
        begin_array_value(first: bool),
        end_array_value(),
        begin_object(),
        end_object(),
        begin_object_key(first: bool),
        begin_object_value(),
        end_object_value(),
    );

    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(fmt_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// A finite float with 17 significant digits in scientific notation.
pub fn fmt_f64(value: f64) -> String {
    format!("{value:.16e}")
}

/// Pretty JSON with fixed float formatting; key order follows the types'
/// field order and `BTreeMap` ordering.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let fmt = FixedFloats { inner: PrettyFormatter::with_indent(b"  ") };
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, fmt);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

/// `k,prob` CSV for a pmf on `0..len`.
pub fn pmf_csv(pmf: &[f64]) -> String {
    let mut out = String::from("k,prob\n");
    for (k, p) in pmf.iter().enumerate() {
        out.push_str(&format!("{k},{}\n", fmt_f64(*p)));
    }
    out
}

/// `k,prob` CSV for a sparse pmf.
pub fn sparse_pmf_csv<'a, I: IntoIterator<Item = (&'a u64, &'a f64)>>(pmf: I) -> String {
    let mut out = String::from("k,prob\n");
    for (k, p) in pmf {
        out.push_str(&format!("{k},{}\n", fmt_f64(*p)));
    }
    out
}
