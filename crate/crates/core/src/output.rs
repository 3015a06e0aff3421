//! CSV and JSON emission.
//!
//! CSV files have the header `t,value,label`; numbers are written with 17
//! significant digits so that they read back bit-identically.

use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bound::PiecewiseLogAffineBound;
use crate::error::{Error, Result};
use crate::semigroupize::GridBound;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::Config(format!("unknown output format '{other}'"))),
        }
    }
}

/// One CSV line. `t` is whatever the abscissa is (time or `ω`).
#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub t: f64,
    pub value: f64,
    pub label: String,
}

impl Row {
    pub fn new(t: f64, value: f64, label: impl Into<String>) -> Self {
        Self {
            t,
            value,
            label: label.into(),
        }
    }
}

/// `{:.16e}`: 17 significant digits.
pub fn format_value(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

pub fn write_csv<W: Write>(out: W, rows: &[Row]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "value", "label"])?;
    for row in rows {
        w.write_record([format_value(row.t), format_value(row.value), row.label.clone()])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads back what [`write_csv`] wrote.
pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<Row>> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["t", "value", "label"] {
        return Err(Error::invalid("csv", format!("unexpected header {headers:?}")));
    }
    r.records()
        .map(|rec| {
            let rec = rec?;
            let num = |i: usize| {
                rec[i]
                    .parse::<f64>()
                    .map_err(|e| Error::invalid("csv", format!("{}: {e}", &rec[i])))
            };
            Ok(Row::new(num(0)?, num(1)?, &rec[2]))
        })
        .collect()
}

/// `(t, log m(t))` at `t = 0, h, …, ≤ t_max`.
pub fn bound_rows(
    m: &PiecewiseLogAffineBound,
    h: f64,
    t_max: f64,
    label: &str,
) -> Vec<Row> {
    time_grid(h, t_max)
        .map(|t| Row::new(t, m.log_at(t), label))
        .collect()
}

pub fn grid_rows(g: &GridBound, label: &str) -> Vec<Row> {
    g.samples().map(|(t, v)| Row::new(t, v, label)).collect()
}

/// `k h` for `k = 0, 1, …` while `k h ≤ t_max` (with a little slack so that
/// `t_max` itself is included when it is a grid point).
pub fn time_grid(h: f64, t_max: f64) -> impl Iterator<Item = f64> {
    let n = grid_steps(h, t_max);
    (0..=n).map(move |k| k as f64 * h)
}

/// Number of grid steps `h` that fit in `[0, t_max]`.
pub fn grid_steps(h: f64, t_max: f64) -> usize {
    (t_max / h + 1e-9).floor() as usize
}
