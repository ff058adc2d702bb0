//! CSV ingestion: header row, numeric body, 64-bit reals.

use std::path::Path;

use sonify_core::sources::Table;

use crate::error::{CliError, CliResult};

/// Load a UTF-8 CSV file with a header row into named columns.
///
/// Every body cell must parse as a real number; missing values, ragged rows
/// and non-numeric cells are rejected with their row and column.
pub fn load_table(path: &Path) -> CliResult<Table> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(false)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => CliError::Io(format!("{}: {e}", path.display())),
            _ => CliError::Data(format!("{}: {e}", path.display())),
        })?;

    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| CliError::Data(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if headers.is_empty() {
        return Err(CliError::Data("empty table: no header row".into()));
    }

    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); headers.len()];
    for (row_idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Data(format!("row {}: {e}", row_idx + 2)))?;
        for (col_idx, cell) in record.iter().enumerate() {
            if cell.is_empty() {
                return Err(CliError::Data(format!(
                    "missing value at row {}, column `{}`",
                    row_idx + 2,
                    headers[col_idx]
                )));
            }
            let value: f64 = cell.parse().map_err(|_| {
                CliError::Data(format!(
                    "non-numeric cell `{cell}` at row {}, column `{}`",
                    row_idx + 2,
                    headers[col_idx]
                ))
            })?;
            columns[col_idx].push(value);
        }
    }
    if columns[0].is_empty() {
        return Err(CliError::Data("empty table: header row only".into()));
    }

    log::info!(
        "loaded {} rows x {} columns from {}",
        columns[0].len(),
        headers.len(),
        path.display()
    );
    Table::from_columns(headers.into_iter().zip(columns).collect())
        .map_err(CliError::from_data_stage)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_csv(content: &str) -> (tempfile::TempDir, std::path::PathBuf) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("data.csv");
        let mut f = std::fs::File::create(&path).unwrap();
        f.write_all(content.as_bytes()).unwrap();
        (dir, path)
    }

    #[test]
    fn loads_shape() {
        let (_dir, path) = write_csv("a,b\n1,2\n3,4\n5,6\n");
        let table = load_table(&path).unwrap();
        assert_eq!(table.rows(), 3);
        assert_eq!(table.column("a").unwrap(), &[1.0, 3.0, 5.0]);
        assert_eq!(table.column("b").unwrap(), &[2.0, 4.0, 6.0]);
    }

    #[test]
    fn header_only_is_empty_table() {
        let (_dir, path) = write_csv("a,b\n");
        let err = load_table(&path).unwrap_err();
        assert!(err.to_string().contains("empty table"), "{err}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn scientific_notation_equals_decimal() {
        let (_dir, path) = write_csv("x,y\n1.5e2,150\n-2E-1,-0.2\n");
        let table = load_table(&path).unwrap();
        let x = table.column("x").unwrap();
        let y = table.column("y").unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn non_numeric_cell_reports_row_and_column() {
        let (_dir, path) = write_csv("a,b\n1,2\n3,oops\n");
        let err = load_table(&path).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("oops") && msg.contains('b') && msg.contains('3'), "{msg}");
    }

    #[test]
    fn ragged_rows_rejected() {
        let (_dir, path) = write_csv("a,b\n1,2\n3\n");
        assert_eq!(load_table(&path).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn missing_file_is_io_error() {
        assert_eq!(
            load_table(Path::new("/nonexistent/x.csv"))
                .unwrap_err()
                .exit_code(),
            3
        );
    }
}
