//! Strict numeric CSV: header `x1,...,xp,y`, one observation per line,
//! decimal point, UTF-8, no quoting. Parse errors carry the 1-based line
//! and column of the offending cell.

use crate::{CliError, CliResult};
use evfront::{Dataset, Observation};
use std::io::Write;
use std::path::Path;

/// Reads a dataset from a CSV file. The input dimension is the header
/// column count minus one; negative values, non-numeric cells and ragged
/// rows are rejected.
pub fn parse_csv(path: &Path) -> CliResult<Dataset> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    parse_csv_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Parses CSV text; error strings name the offending line and column.
pub fn parse_csv_str(text: &str) -> Result<Dataset, String> {
    let mut lines = text.lines().enumerate();
    let Some((_, header)) = lines.next() else {
        return Err("empty file".into());
    };
    let columns = header.split(',').count();
    if columns < 2 {
        return Err(format!(
            "line 1: header must have at least two columns (x1,...,xp,y), got {columns}"
        ));
    }
    let mut observations = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.is_empty() {
            return Err(format!("line {lineno}: empty row"));
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != columns {
            return Err(format!(
                "line {lineno}: expected {columns} fields, got {}",
                fields.len()
            ));
        }
        let mut values = Vec::with_capacity(columns);
        for (col, field) in fields.iter().enumerate() {
            let v: f64 = field.trim().parse().map_err(|_| {
                format!("line {lineno}, column {}: not a number: {field:?}", col + 1)
            })?;
            if !v.is_finite() {
                return Err(format!(
                    "line {lineno}, column {}: value must be finite",
                    col + 1
                ));
            }
            if v < 0.0 {
                return Err(format!(
                    "line {lineno}, column {}: negative value {v}",
                    col + 1
                ));
            }
            values.push(v);
        }
        let y = values.pop().expect("at least two columns");
        let obs = Observation::new(values, y).map_err(|e| format!("line {lineno}: {e}"))?;
        observations.push(obs);
    }
    if observations.is_empty() {
        return Err("no data rows after the header".into());
    }
    Dataset::new(observations).map_err(|e| e.to_string())
}

/// Writes a dataset with the canonical `x1,...,xp,y` header. Values are
/// printed with the shortest round-trip representation.
pub fn write_dataset_csv<W: Write>(mut w: W, ds: &Dataset) -> CliResult<()> {
    let p = ds.input_dim();
    let mut header: Vec<String> = (1..=p).map(|i| format!("x{i}")).collect();
    header.push("y".into());
    writeln!(w, "{}", header.join(","))?;
    for obs in ds.observations() {
        for v in obs.inputs() {
            write!(w, "{v},")?;
        }
        writeln!(w, "{}", obs.output())?;
    }
    Ok(())
}

/// Empty string for None, shortest round-trip representation otherwise.
pub fn opt_cell(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_file() {
        let ds = parse_csv_str("x1,y\n1,2\n").unwrap();
        assert_eq!(ds.len(), 1);
        assert_eq!(ds.input_dim(), 1);
        assert_eq!(ds.observations()[0].output(), 2.0);
    }

    #[test]
    fn header_sets_input_dim() {
        let ds = parse_csv_str("x1,x2,y\n1,2,3\n0.5,0.5,1\n").unwrap();
        assert_eq!(ds.input_dim(), 2);
        assert_eq!(ds.len(), 2);
    }

    #[test]
    fn ragged_row_is_located() {
        let err = parse_csv_str("x1,y\n1,2\n3\n").unwrap_err();
        assert!(err.contains("line 3"), "{err}");
    }

    #[test]
    fn bad_cell_is_located() {
        let err = parse_csv_str("x1,y\n1,2\n1,abc\n").unwrap_err();
        assert!(err.contains("line 3, column 2"), "{err}");
        let err = parse_csv_str("x1,y\n-1,2\n").unwrap_err();
        assert!(err.contains("line 2, column 1"), "{err}");
    }

    #[test]
    fn rejects_empty_inputs() {
        assert!(parse_csv_str("").is_err());
        assert!(parse_csv_str("x1,y\n").is_err());
        assert!(parse_csv_str("y\n1\n").is_err());
    }

    #[test]
    fn dataset_roundtrip() {
        let ds = parse_csv_str("x1,x2,y\n1,2,3\n0.25,0.125,0.0625\n").unwrap();
        let mut buf = Vec::new();
        write_dataset_csv(&mut buf, &ds).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let back = parse_csv_str(&text).unwrap();
        assert_eq!(ds, back);
    }
}
