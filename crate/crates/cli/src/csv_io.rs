//! CSV tables with shortest-safe 17-significant-digit number formatting.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use fracstab_core::Trajectory;

use crate::CliError;

/// Format like C's `%.17g`: enough digits that parsing gives back the same
/// `f64`, trailing zeros removed.
pub fn fmt_g17(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{v:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..17).contains(&exp) {
        let fixed = format!("{:.*}", (16 - exp) as usize, v);
        trim_fraction(&fixed).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_fraction(mantissa), exp.abs())
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Write a header and rows of already-formatted fields.
pub fn write_table<I>(path: &Path, header: &[String], rows: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    let io_err = |e: csv::Error| CliError::io(path, e.into());
    w.write_record(header).map_err(io_err)?;
    for row in rows {
        w.write_record(&row).map_err(io_err)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

/// Numeric table as read back from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

/// Read a CSV whose every data field is a number.
pub fn read_table(path: &Path) -> Result<Table, CliError> {
    let bad = |message: String| CliError::Csv {
        path: path.to_path_buf(),
        message,
    };
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut r = csv::Reader::from_reader(file);
    let header: Vec<String> = r
        .headers()
        .map_err(|e| bad(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let row = rec
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|_| bad(format!("row {}: '{f}' is not a number", i + 1)))
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    Ok(Table { header, rows })
}

pub fn trajectory_header(dim: usize) -> Vec<String> {
    std::iter::once("t".to_string())
        .chain((1..=dim).map(|i| format!("x{i}")))
        .collect()
}

/// `t,x1,...,xn`, one row per node.
pub fn write_trajectory(path: &Path, traj: &Trajectory) -> Result<(), CliError> {
    let grid = *traj.grid();
    let rows = (0..traj.len()).map(|j| {
        std::iter::once(grid.node(j))
            .chain(traj.states().iter().map(|s| s.values()[j]))
            .map(fmt_g17)
            .collect()
    });
    write_table(path, &trajectory_header(traj.dim()), rows)
}

/// Write `contents` verbatim, mapping failures to [`CliError::Io`].
pub fn write_text(path: &Path, contents: &str) -> Result<(), CliError> {
    let mut f = File::create(path).map_err(|e| CliError::io(path, e))?;
    f.write_all(contents.as_bytes()).map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf() {
        let cases = [
            (0.1, "0.10000000000000001"),
            (1.0, "1"),
            (-10.0, "-10"),
            (0.5, "0.5"),
            (100.0, "100"),
            (1e-5, "1.0000000000000001e-05"),
            (1e-4, "0.0001"),
            (1.5e17, "1.5e+17"),
            (1e16, "10000000000000000"),
            (123456789.125, "123456789.125"),
            (f64::MAX, "1.7976931348623157e+308"),
            (5e-324, "4.9406564584124654e-324"),
            (-2.5e-300, "-2.5e-300"),
            (1.0 / 3.0, "0.33333333333333331"),
            (0.0, "0"),
            (-0.0, "-0"),
        ];
        for (v, want) in cases {
            assert_eq!(fmt_g17(v), want, "{v:e}");
        }
    }

    #[test]
    fn round_trips() {
        let mut x = 0.123_f64;
        for _ in 0..2000 {
            x = (x * 7919.0 + 0.377).sin() * 10f64.powi(((x * 1e4) as i32 % 40) - 20);
            assert_eq!(fmt_g17(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }
}
