use std::str::FromStr;

use serde_json::Value;

use super::InputError;
use crate::bridge::GroupDescriptor;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    Csv,
    Json,
}

impl FromStr for InputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(InputFormat::Csv),
            "json" => Ok(InputFormat::Json),
            other => Err(format!("unknown input format {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Column {
    Name,
    N,
    Mean,
    Sd,
    Var,
    Skew,
    Kurt,
}

impl Column {
    fn parse(key: &str) -> Option<Column> {
        let key = key.trim().to_ascii_lowercase();
        let key = key.strip_prefix("sample.").unwrap_or(&key);
        Some(match key {
            "name" | "names" | "group" => Column::Name,
            "n" => Column::N,
            "mean" => Column::Mean,
            "sd" => Column::Sd,
            "var" | "variance" => Column::Var,
            "skew" | "skewness" => Column::Skew,
            "kurt" | "kurtosis" => Column::Kurt,
            _ => return None,
        })
    }
}

fn cell_error(line: usize, column: &str, message: impl Into<String>) -> InputError {
    InputError::Cell {
        line,
        column: column.to_string(),
        message: message.into(),
    }
}

fn is_missing(cell: &str) -> bool {
    let c = cell.trim();
    c.is_empty() || c.eq_ignore_ascii_case("na") || c.eq_ignore_ascii_case("null")
}

fn parse_real(cell: &str, line: usize, column: &str) -> Result<Option<f64>, InputError> {
    if is_missing(cell) {
        return Ok(None);
    }
    let v: f64 = cell
        .trim()
        .parse()
        .map_err(|_| cell_error(line, column, format!("malformed number {:?}", cell.trim())))?;
    if !v.is_finite() {
        return Err(cell_error(line, column, format!("non-finite number {v}")));
    }
    Ok(Some(v))
}

fn parse_count(cell: &str, line: usize, column: &str) -> Result<u64, InputError> {
    if is_missing(cell) {
        return Err(cell_error(line, column, "n is missing"));
    }
    let text = cell.trim();
    let n = text
        .parse::<u64>()
        .ok()
        .or_else(|| {
            text.parse::<f64>()
                .ok()
                .filter(|v| v.fract() == 0.0 && *v >= 0.0 && *v < 9.0e15)
                .map(|v| v as u64)
        })
        .ok_or_else(|| {
            cell_error(
                line,
                column,
                format!("n must be a positive integer, got {text:?}"),
            )
        })?;
    if n == 0 {
        return Err(cell_error(line, column, "n must be positive"));
    }
    Ok(n)
}

fn check_row(desc: &GroupDescriptor, line: usize) -> Result<(), InputError> {
    if let (Some(var), Some(sd)) = (desc.variance, desc.sd) {
        if (sd * sd - var).abs() > 1e-9 * var.abs().max(sd * sd) {
            return Err(InputError::Line {
                line,
                message: format!("sd = {sd} and var = {var} disagree (sd² = {})", sd * sd),
            });
        }
    }
    if let Some(gap) = desc.chain_gap() {
        return Err(InputError::Line {
            line,
            message: format!("moment chain broken: {gap}"),
        });
    }
    Ok(())
}

fn parse_csv(bytes: &[u8]) -> Result<Vec<GroupDescriptor>, InputError> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(bytes);
    let headers = rdr
        .headers()
        .map_err(|e| InputError::Format(format!("cannot read CSV header: {e}")))?
        .clone();
    let mut columns = Vec::with_capacity(headers.len());
    for h in headers.iter() {
        let c = Column::parse(h)
            .ok_or_else(|| InputError::Format(format!("unknown CSV column {h:?}")))?;
        if columns.contains(&c) {
            return Err(InputError::Format(format!("duplicate CSV column {h:?}")));
        }
        columns.push(c);
    }
    if !columns.contains(&Column::N) {
        return Err(InputError::Format("CSV header has no n column".to_string()));
    }

    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
            InputError::Line {
                line,
                message: e.to_string(),
            }
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let mut desc = GroupDescriptor::default();
        for ((cell, col), header) in record.iter().zip(&columns).zip(headers.iter()) {
            match col {
                Column::Name => {
                    if !is_missing(cell) {
                        desc.name = Some(cell.to_string());
                    }
                }
                Column::N => desc.n = parse_count(cell, line, header)?,
                Column::Mean => desc.mean = parse_real(cell, line, header)?,
                Column::Sd => desc.sd = parse_real(cell, line, header)?,
                Column::Var => desc.variance = parse_real(cell, line, header)?,
                Column::Skew => desc.skewness = parse_real(cell, line, header)?,
                Column::Kurt => desc.kurtosis = parse_real(cell, line, header)?,
            }
        }
        check_row(&desc, line)?;
        out.push(desc);
    }
    Ok(out)
}

fn json_real(v: &Value, row: usize, key: &str) -> Result<Option<f64>, InputError> {
    match v {
        Value::Null => Ok(None),
        Value::Number(x) => match x.as_f64() {
            Some(f) if f.is_finite() => Ok(Some(f)),
            _ => Err(cell_error(row, key, format!("non-finite number {x}"))),
        },
        Value::String(s) => parse_real(s, row, key),
        other => Err(cell_error(
            row,
            key,
            format!("expected a number, got {other}"),
        )),
    }
}

fn parse_json(bytes: &[u8]) -> Result<Vec<GroupDescriptor>, InputError> {
    let value: Value = serde_json::from_slice(bytes).map_err(|e| InputError::Line {
        line: e.line(),
        message: e.to_string(),
    })?;
    let rows = value
        .as_array()
        .ok_or_else(|| InputError::Format("JSON input must be an array of objects".to_string()))?;
    let mut out = Vec::with_capacity(rows.len());
    // JSON has no useful line numbers once parsed; report 1-based records.
    for (i, row) in rows.iter().enumerate() {
        let row_no = i + 1;
        let obj = row.as_object().ok_or_else(|| InputError::Line {
            line: row_no,
            message: "expected an object".to_string(),
        })?;
        let mut desc = GroupDescriptor::default();
        let mut saw_n = false;
        for (key, v) in obj {
            let Some(col) = Column::parse(key) else {
                return Err(cell_error(row_no, key, "unknown key"));
            };
            match col {
                Column::Name => {
                    desc.name = match v {
                        Value::Null => None,
                        Value::String(s) => Some(s.clone()),
                        other => Some(other.to_string()),
                    }
                }
                Column::N => {
                    saw_n = true;
                    desc.n = match v {
                        Value::Number(x) => parse_count(&x.to_string(), row_no, key)?,
                        Value::String(s) => parse_count(s, row_no, key)?,
                        _ => return Err(cell_error(row_no, key, "n must be a positive integer")),
                    }
                }
                Column::Mean => desc.mean = json_real(v, row_no, key)?,
                Column::Sd => desc.sd = json_real(v, row_no, key)?,
                Column::Var => desc.variance = json_real(v, row_no, key)?,
                Column::Skew => desc.skewness = json_real(v, row_no, key)?,
                Column::Kurt => desc.kurtosis = json_real(v, row_no, key)?,
            }
        }
        if !saw_n {
            return Err(cell_error(row_no, "n", "n is missing"));
        }
        check_row(&desc, row_no)?;
        out.push(desc);
    }
    Ok(out)
}

/// Reads group statistics from CSV (header drawn from
/// `name,n,mean,sd,var,skew,kurt`, optionally prefixed `sample.`) or from a
/// JSON array of objects with the same keys. Empty, `NA` and `null` cells
/// are absent statistics.
pub fn parse_stats_input(
    bytes: &[u8],
    format: InputFormat,
) -> Result<Vec<GroupDescriptor>, InputError> {
    match format {
        InputFormat::Csv => parse_csv(bytes),
        InputFormat::Json => parse_json(bytes),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_two_rows() {
        let rows =
            parse_stats_input(b"n,mean,var\n10,1.5,2.0\n20,0.5,1.0", InputFormat::Csv).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].n, 10);
        assert_eq!(rows[1].variance, Some(1.0));
        assert!(rows.iter().all(|r| r.order() == 2));
    }

    #[test]
    fn chain_break_is_reported() {
        let err = parse_stats_input(b"n,mean,kurt\n10,1,3", InputFormat::Csv).unwrap_err();
        assert!(
            err.to_string()
                .contains("moment chain broken: kurt without var/skew"),
            "{err}"
        );
    }

    #[test]
    fn malformed_cell_names_row_and_column() {
        let err =
            parse_stats_input(b"n,mean,var\n10,1.5,2.0\n20,abc,1.0", InputFormat::Csv).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 3") && msg.contains("mean"), "{msg}");
    }

    #[test]
    fn n_is_required_and_positive() {
        assert!(parse_stats_input(b"mean,var\n1,2", InputFormat::Csv).is_err());
        assert!(parse_stats_input(b"n,mean\n0,2", InputFormat::Csv).is_err());
        assert!(parse_stats_input(b"n,mean\n,2", InputFormat::Csv).is_err());
        assert!(parse_stats_input(b"n,mean\n-3,2", InputFormat::Csv).is_err());
    }

    #[test]
    fn sd_and_var_must_agree() {
        assert!(parse_stats_input(b"n,mean,sd,var\n5,0,2,4", InputFormat::Csv).is_ok());
        let err = parse_stats_input(b"n,mean,sd,var\n5,0,2,4.1", InputFormat::Csv).unwrap_err();
        assert!(err.to_string().contains("disagree"));
    }

    #[test]
    fn absent_cells_and_names() {
        let rows = parse_stats_input(
            b"name,n,mean,var,skew,kurt\nleft,10,1,2,NA,\nright,12,0,1,0.1,3",
            InputFormat::Csv,
        )
        .unwrap();
        assert_eq!(rows[0].name.as_deref(), Some("left"));
        assert_eq!(rows[0].order(), 2);
        assert_eq!(rows[1].order(), 4);
    }

    #[test]
    fn json_rows() {
        let rows = parse_stats_input(
            br#"[{"n": 10, "mean": 1.5, "var": 2.0}, {"name": "b", "n": 20, "mean": 0.5, "var": null}]"#,
            InputFormat::Json,
        )
        .unwrap();
        assert_eq!(rows[0].order(), 2);
        assert_eq!(rows[1].order(), 1);
        assert_eq!(rows[1].name.as_deref(), Some("b"));
        assert!(parse_stats_input(br#"[{"mean": 1}]"#, InputFormat::Json).is_err());
        assert!(parse_stats_input(br#"{"n": 1}"#, InputFormat::Json).is_err());
        assert!(parse_stats_input(br#"[{"n": 3, "bogus": 1}]"#, InputFormat::Json).is_err());
    }

    #[test]
    fn r_style_headers() {
        let rows = parse_stats_input(
            b"n,sample.mean,sample.var,sample.skew,sample.kurt\n28,0.09049834,0.9013829,-0.76480085,3.174128",
            InputFormat::Csv,
        )
        .unwrap();
        assert_eq!(rows[0].kurtosis, Some(3.174128));
    }
}
