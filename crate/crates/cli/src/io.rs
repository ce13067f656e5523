//! File I/O: process and AR(1) JSON, matrix and table CSV.

use std::fs;
use std::path::Path;

use abw_core::process::json::{Ar1File, ProcessFile};
use abw_core::process::{Ar1Spec, GaussianProcess};
use nalgebra::DMatrix;
use serde::Serialize;

use crate::{CliError, CliResult};

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))
}

pub fn read_process(path: &Path) -> CliResult<GaussianProcess> {
    let file: ProcessFile = serde_json::from_str(&read_text(path)?)
        .map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))?;
    file.into_process()
        .map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))
}

pub fn read_ar1(path: &Path) -> CliResult<Ar1Spec> {
    let file: Ar1File = serde_json::from_str(&read_text(path)?)
        .map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))?;
    file.into_spec()
        .map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))
}

/// Requires every process to share `d` and `T` with the first one.
pub fn check_compatible(processes: &[GaussianProcess], paths: &[impl AsRef<Path>]) -> CliResult<()> {
    let Some(first) = processes.first() else {
        return Ok(());
    };
    let (d, steps) = (first.factor().d(), first.factor().steps());
    for (p, path) in processes.iter().zip(paths).skip(1) {
        let f = p.factor();
        if f.d() != d {
            return Err(CliError::invalid(format!(
                "{}: field `d`: {} differs from {} in {}",
                path.as_ref().display(),
                f.d(),
                d,
                paths[0].as_ref().display()
            )));
        }
        if f.steps() != steps {
            return Err(CliError::invalid(format!(
                "{}: field `T`: {} differs from {} in {}",
                path.as_ref().display(),
                f.steps(),
                steps,
                paths[0].as_ref().display()
            )));
        }
    }
    Ok(())
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serializable value");
    text.push('\n');
    text
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)
            .map_err(|e| CliError::invalid(format!("{}: {e}", parent.display())))?;
    }
    fs::write(path, text).map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    write_text(path, &to_json(value))
}

pub fn write_process(path: &Path, process: &GaussianProcess) -> CliResult<()> {
    write_json(path, &ProcessFile::from_process(process))
}

/// CSV with the given header and rows, rendered in memory.
pub fn table_csv(header: &[String], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

pub fn write_table(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> CliResult<()> {
    let header: Vec<String> = header.iter().map(|h| h.to_string()).collect();
    let rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| r.iter().map(|v| v.to_string()).collect())
        .collect();
    write_text(path, &table_csv(&header, &rows))
}

/// One matrix per file; the header row holds 1-based column indices.
pub fn matrix_csv(m: &DMatrix<f64>) -> String {
    let header: Vec<String> = (1..=m.ncols()).map(|j| j.to_string()).collect();
    let rows: Vec<Vec<String>> = m
        .row_iter()
        .map(|r| r.iter().map(|v| v.to_string()).collect())
        .collect();
    table_csv(&header, &rows)
}

pub fn write_matrix(path: &Path, m: &DMatrix<f64>) -> CliResult<()> {
    write_text(path, &matrix_csv(m))
}

pub fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().cloned().collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;

    #[test]
    fn matrix_csv_has_index_header() {
        let text = matrix_csv(&dmatrix![1.0, 0.5; -0.25, 2.0]);
        assert_eq!(text, "1,2\n1,0.5\n-0.25,2\n");
    }
}
