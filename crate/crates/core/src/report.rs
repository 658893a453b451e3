//! CSV and JSON emitters.
//!
//! Profile CSV columns, in order: `grid_kind, parameter, value,
//! samples_used, converged`, optionally preceded by `function, space,
//! condition` when several profiles share one file. CSV floats use the
//! shortest representation that round-trips; JSON floats are printed with 17
//! significant digits, non-finite ones as `null`.

use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;

use crate::asymptotics::{GridKind, MeanProfile};
use crate::error::{Error, Result};

pub const PROFILE_COLUMNS: [&str; 5] = ["grid_kind", "parameter", "value", "samples_used", "converged"];

#[derive(Serialize)]
struct Row<'a> {
    grid_kind: &'a str,
    parameter: f64,
    value: f64,
    samples_used: u64,
    converged: bool,
}

#[derive(Serialize)]
struct LabelledRow<'a> {
    function: &'a str,
    space: &'a str,
    condition: &'a str,
    grid_kind: &'a str,
    parameter: f64,
    value: f64,
    samples_used: u64,
    converged: bool,
}

fn csv_err(e: csv::Error) -> Error {
    Error::InvalidArgument(format!("csv: {e}"))
}

pub fn profile_csv(profile: &MeanProfile) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for p in &profile.points {
        w.serialize(Row {
            grid_kind: profile.grid_kind.as_str(),
            parameter: p.parameter,
            value: p.value,
            samples_used: p.samples_used,
            converged: p.converged,
        })
        .map_err(csv_err)?;
    }
    if profile.points.is_empty() {
        w.write_record(PROFILE_COLUMNS).map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| Error::InvalidArgument(format!("csv: {e}")))
}

/// One CSV for several profiles, labelled by `(function, space, condition)`.
pub fn labelled_profiles_csv(profiles: &[(String, String, String, MeanProfile)]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for (function, space, condition, profile) in profiles {
        for p in &profile.points {
            w.serialize(LabelledRow {
                function,
                space,
                condition,
                grid_kind: profile.grid_kind.as_str(),
                parameter: p.parameter,
                value: p.value,
                samples_used: p.samples_used,
                converged: p.converged,
            })
            .map_err(csv_err)?;
        }
    }
    w.into_inner().map_err(|e| Error::InvalidArgument(format!("csv: {e}")))
}

/// Reads a profile CSV. Only `grid_kind`, `parameter` and `value` are
/// required; `grid_kind` defaults to `radius_to_one`.
pub fn read_profile_csv<R: io::Read>(reader: R) -> Result<MeanProfile> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(csv_err)?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let parameter = col("parameter").ok_or_else(|| Error::Spec("profile CSV needs a 'parameter' column".into()))?;
    let value = col("value").ok_or_else(|| Error::Spec("profile CSV needs a 'value' column".into()))?;
    let kind_col = col("grid_kind");
    let mut kind: Option<GridKind> = None;
    let mut pairs = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(csv_err)?;
        let k = match kind_col.map(|c| &record[c]) {
            None | Some("radius_to_one") => GridKind::RadiusToOne,
            Some("angle_to_zero") => GridKind::AngleToZero,
            Some(other) => return Err(Error::Spec(format!("unknown grid_kind {other:?}"))),
        };
        if kind.is_some_and(|prev| prev != k) {
            return Err(Error::Spec("profile CSV mixes grid kinds".into()));
        }
        kind = Some(k);
        let num = |i: usize| -> Result<f64> {
            record[i]
                .parse::<f64>()
                .map_err(|_| Error::Spec(format!("not a number: {:?}", &record[i])))
        };
        let par = num(parameter)?;
        let x = match k {
            GridKind::RadiusToOne => 1.0 - par,
            GridKind::AngleToZero => par,
        };
        pairs.push((x, num(value)?));
    }
    let kind = kind.ok_or(Error::DegenerateProfile(0))?;
    MeanProfile::from_pairs(kind, &pairs)
}

/// `%.17g`: 17 significant digits with trailing zeros removed.
pub fn format_g17(v: f64) -> String {
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{v:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let digits = digits.trim_end_matches('0');
    let digits = if digits.is_empty() { "0" } else { digits };
    let sign = if negative { "-" } else { "" };
    if (-5..17).contains(&exp) {
        let mut out = String::from(sign);
        if exp < 0 {
            out.push_str("0.");
            out.extend(std::iter::repeat_n('0', (-exp - 1) as usize));
            out.push_str(digits);
        } else {
            let int_len = exp as usize + 1;
            if digits.len() <= int_len {
                out.push_str(digits);
                out.extend(std::iter::repeat_n('0', int_len - digits.len()));
            } else {
                out.push_str(&digits[..int_len]);
                out.push('.');
                out.push_str(&digits[int_len..]);
            }
        }
        out
    } else {
        let (head, tail) = digits.split_at(1);
        if tail.is_empty() {
            format!("{sign}{head}e{exp}")
        } else {
            format!("{sign}{head}.{tail}e{exp}")
        }
    }
}

/// Pretty JSON formatter printing floats via [`format_g17`].
struct G17<'a>(serde_json::ser::PrettyFormatter<'a>);

impl serde_json::ser::Formatter for G17<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_g17(value).as_bytes())
    }
    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Pretty-printed JSON with 17-digit floats and a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, G17(serde_json::ser::PrettyFormatter::new()));
    value
        .serialize(&mut ser)
        .map_err(|e| Error::InvalidArgument(format!("json: {e}")))?;
    out.push(b'\n');
    Ok(out)
}

/// Writes through a temporary file in the same directory, renamed into place
/// once complete.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g17_formats() {
        assert_eq!(format_g17(1.0), "1");
        assert_eq!(format_g17(0.1), "0.10000000000000001");
        assert_eq!(format_g17(0.125), "0.125");
        assert_eq!(format_g17(-2.5e-7), "-2.4999999999999999e-7");
        assert_eq!(format_g17(1e20), "1e20");
        assert_eq!(format_g17(123456.0), "123456");
        for v in [std::f64::consts::PI, 1.0 / 3.0, 6.02e23, -1.5e-300, 0.5656854249492381] {
            assert_eq!(format_g17(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn json_is_deterministic_and_valid() {
        #[derive(Serialize)]
        struct S {
            b: f64,
            a: Vec<f64>,
            n: f64,
        }
        let s = S {
            b: 0.1,
            a: vec![1.0, 2.5],
            n: f64::INFINITY,
        };
        let one = to_json(&s).unwrap();
        assert_eq!(one, to_json(&s).unwrap());
        let text = String::from_utf8(one).unwrap();
        assert!(text.find("\"b\"").unwrap() < text.find("\"a\"").unwrap());
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["b"].as_f64(), Some(0.1));
        assert!(v["n"].is_null());
        assert!(text.contains("0.10000000000000001"));
    }

    #[test]
    fn csv_round_trip() {
        let pairs: Vec<(f64, f64)> = (3..=8).map(|k| {
            let x = 2f64.powi(-k);
            (x, 0.3 * x.powf(0.7))
        }).collect();
        let p = MeanProfile::from_pairs(GridKind::RadiusToOne, &pairs).unwrap();
        let bytes = profile_csv(&p).unwrap();
        let text = String::from_utf8(bytes.clone()).unwrap();
        assert!(text.starts_with("grid_kind,parameter,value,samples_used,converged\n"));
        let back = read_profile_csv(bytes.as_slice()).unwrap();
        assert_eq!(back.values(), p.values());
        assert_eq!(back.abscissas(), p.abscissas());
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.json");
        write_atomic(&path, b"one").unwrap();
        write_atomic(&path, b"two").unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
