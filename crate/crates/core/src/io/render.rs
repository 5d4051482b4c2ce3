use std::fmt::Write as _;
use std::str::FromStr;

use serde_json::{Map, Value};

use crate::bridge::GroupDescriptor;
use crate::decomp::DecompTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Table,
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "table" => Ok(OutputFormat::Table),
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown output format {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RenderConfig {
    pub format: OutputFormat,
    /// Significant digits for the table view, with R's `digits` meaning:
    /// every cell of a column shares the decimals needed to show its
    /// least-significant element to this many digits.
    pub precision: usize,
}

impl Default for RenderConfig {
    fn default() -> Self {
        RenderConfig {
            format: OutputFormat::Table,
            precision: 7,
        }
    }
}

type Getter = fn(&GroupDescriptor) -> Option<f64>;

struct Col {
    header: &'static str,
    key: &'static str,
    get: Getter,
}

const COLUMNS: [Col; 5] = [
    Col {
        header: "sample.mean",
        key: "mean",
        get: |d| d.mean,
    },
    Col {
        header: "sample.sd",
        key: "sd",
        get: |d| d.sd,
    },
    Col {
        header: "sample.var",
        key: "var",
        get: |d| d.variance,
    },
    Col {
        header: "sample.skew",
        key: "skew",
        get: |d| d.skewness,
    },
    Col {
        header: "sample.kurt",
        key: "kurt",
        get: |d| d.kurtosis,
    },
];

/// Columns with at least one value, or with an undefined-statistic note.
fn present_columns(tbl: &DecompTable) -> Vec<&'static Col> {
    let order = tbl.order;
    COLUMNS
        .iter()
        .filter(|c| match c.key {
            "mean" => order >= 1,
            "sd" => order >= 2 && tbl.include_sd,
            "var" => order >= 2,
            "skew" => order >= 3,
            _ => order >= 4,
        })
        .filter(|c| {
            tbl.rows
                .iter()
                .any(|r| (c.get)(&r.stats).is_some() || !r.stats.undefined.is_empty())
        })
        .collect()
}

struct Sci {
    negative: bool,
    exponent: i32,
    sig: usize,
}

fn scientific(x: f64, digits: usize) -> Sci {
    if x == 0.0 {
        return Sci {
            negative: false,
            exponent: 0,
            sig: 1,
        };
    }
    let s = format!("{:.*e}", digits - 1, x.abs());
    let (mantissa, exp) = s.split_once('e').expect("exponent form");
    let digits_only: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let sig = digits_only.trim_end_matches('0').len().max(1);
    Sci {
        negative: x < 0.0,
        exponent: exp.parse().expect("integer exponent"),
        sig,
    }
}

/// C-style `%.*e`: signed exponent of at least two digits.
fn sci_string(x: f64, decimals: usize) -> String {
    let s = format!("{:.*e}", decimals, x);
    let (mantissa, exp) = s.split_once('e').expect("exponent form");
    let e: i32 = exp.parse().expect("integer exponent");
    let sign = if e < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", e.abs())
}

/// Formats a column of numbers the way R prints a numeric vector: one
/// shared number of decimals (or scientific notation when that is
/// narrower), missing values as `NA`. Cells are not padded.
pub fn format_column(values: &[Option<f64>], digits: usize) -> Vec<String> {
    let digits = digits.clamp(1, 22);
    let finite: Vec<f64> = values.iter().flatten().copied().collect();
    if finite.is_empty() {
        return values.iter().map(|_| "NA".to_string()).collect();
    }
    let mut any_negative = false;
    let mut max_left = 1usize;
    let mut right = 0i32;
    let mut max_sig = 1usize;
    let mut max_exp = i32::MIN;
    let mut min_exp = i32::MAX;
    for &x in &finite {
        let s = scientific(x, digits);
        any_negative |= s.negative;
        let left = s.exponent + 1;
        let sleft = usize::from(s.negative) + if left <= 0 { 1 } else { left as usize };
        max_left = max_left.max(sleft);
        right = right.max(s.sig as i32 - left);
        max_sig = max_sig.max(s.sig);
        max_exp = max_exp.max(s.exponent);
        min_exp = min_exp.min(s.exponent);
    }
    let right = right.max(0) as usize;
    let fixed_width = max_left + right + usize::from(right > 0);
    let wide_exponent = max_exp >= 100 || min_exp <= -99;
    let sci_decimals = max_sig - 1;
    let sci_width = usize::from(any_negative)
        + usize::from(sci_decimals > 0)
        + sci_decimals
        + 4
        + if wide_exponent { 2 } else { 1 };

    values
        .iter()
        .map(|v| match v {
            None => "NA".to_string(),
            Some(x) if fixed_width <= sci_width => format!("{:.*}", right, x),
            Some(x) => sci_string(*x, sci_decimals),
        })
        .collect()
}

fn render_text(tbl: &DecompTable, cfg: &RenderConfig) -> String {
    let cols = present_columns(tbl);
    let mut headers: Vec<&str> = vec!["n"];
    let mut cells: Vec<Vec<String>> =
        vec![tbl.rows.iter().map(|r| r.stats.n.to_string()).collect()];
    for c in &cols {
        headers.push(c.header);
        let values: Vec<Option<f64>> = tbl.rows.iter().map(|r| (c.get)(&r.stats)).collect();
        cells.push(format_column(&values, cfg.precision));
    }
    let label_width = tbl.rows.iter().map(|r| r.label.len()).max().unwrap_or(0);
    let widths: Vec<usize> = headers
        .iter()
        .zip(&cells)
        .map(|(h, col)| {
            col.iter()
                .map(String::len)
                .chain([h.len()])
                .max()
                .unwrap_or(0)
        })
        .collect();

    let mut out = String::new();
    out.push_str(&" ".repeat(label_width));
    for (h, w) in headers.iter().zip(&widths) {
        let _ = write!(out, " {h:>w$}");
    }
    out.push('\n');
    for (i, row) in tbl.rows.iter().enumerate() {
        let _ = write!(out, "{:<label_width$}", row.label);
        for (col, w) in cells.iter().zip(&widths) {
            let _ = write!(out, " {:>w$}", col[i]);
        }
        out.push('\n');
    }
    out
}

fn render_csv(tbl: &DecompTable) -> String {
    let cols = present_columns(tbl);
    let mut wtr = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["name", "n"];
    header.extend(cols.iter().map(|c| c.key));
    wtr.write_record(&header).expect("in-memory write");
    for row in &tbl.rows {
        let mut record = vec![row.label.clone(), row.stats.n.to_string()];
        record.extend(cols.iter().map(|c| {
            (c.get)(&row.stats)
                .map(|v| v.to_string())
                .unwrap_or_default()
        }));
        wtr.write_record(&record).expect("in-memory write");
    }
    String::from_utf8(wtr.into_inner().expect("in-memory flush")).expect("utf-8 output")
}

fn render_json(tbl: &DecompTable) -> String {
    let cols = present_columns(tbl);
    let rows: Vec<Value> = tbl
        .rows
        .iter()
        .map(|row| {
            let mut obj = Map::new();
            obj.insert("name".into(), Value::String(row.label.clone()));
            obj.insert("n".into(), Value::from(row.stats.n));
            for c in &cols {
                let v = (c.get)(&row.stats).map(Value::from).unwrap_or(Value::Null);
                obj.insert(c.key.into(), v);
            }
            Value::Object(obj)
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&Value::Array(rows)).expect("serializable");
    s.push('\n');
    s
}

/// Renders a result table as aligned text, CSV or JSON. The machine formats
/// carry every digit and use the input column names, so they can be read
/// back with [`parse_stats_input`](super::parse_stats_input).
pub fn render_table(tbl: &DecompTable, cfg: &RenderConfig) -> String {
    match cfg.format {
        OutputFormat::Table => render_text(tbl, cfg),
        OutputFormat::Csv => render_csv(tbl),
        OutputFormat::Json => render_json(tbl),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn col(xs: &[f64], digits: usize) -> Vec<String> {
        format_column(&xs.iter().copied().map(Some).collect::<Vec<_>>(), digits)
    }

    #[test]
    fn shared_decimals() {
        assert_eq!(
            col(
                &[0.090498342883, 0.186379357, 0.0598659437, 0.1120960035],
                7
            ),
            ["0.09049834", "0.18637936", "0.05986594", "0.11209600"]
        );
        assert_eq!(
            col(&[3.174127817, 3.1129011433, 2.3062428956, 2.9519596982], 7),
            ["3.174128", "3.112901", "2.306243", "2.951960"]
        );
    }

    #[test]
    fn integers_and_zero() {
        assert_eq!(col(&[1.0, 2.0, 30.0], 7), ["1", "2", "30"]);
        assert_eq!(col(&[0.0, 1.5], 7), ["0.0", "1.5"]);
    }

    #[test]
    fn scientific_when_narrower() {
        assert_eq!(col(&[1.234e-10], 7), ["1.234e-10"]);
        assert_eq!(col(&[123456789012.0], 7), ["123456789012"]);
        assert_eq!(col(&[1234567890123.0], 7), ["1.234568e+12"]);
        assert_eq!(col(&[1e100, -2.5e-3], 3), ["1.0e+100", "-2.5e-03"]);
    }

    #[test]
    fn missing_values() {
        assert_eq!(format_column(&[None, Some(2.5)], 7), ["NA", "2.5"]);
        assert_eq!(format_column(&[None], 7), ["NA"]);
    }

    #[test]
    fn format_names() {
        assert_eq!("CSV".parse::<OutputFormat>().unwrap(), OutputFormat::Csv);
        assert!("xml".parse::<OutputFormat>().is_err());
    }
}
