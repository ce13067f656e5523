//! JSON file formats for processes and AR(1) specifications.
//!
//! Process: `{"d": int, "T": int, "mean": [dT numbers], "L": [[dT numbers]; dT]}`
//! with `L` row-major and zero above the block diagonal.
//! AR(1): `{"alphas": [T numbers], "sigmas": [T numbers]}`.
//!
//! Validation failures are reported as [`AbwError::Format`] naming the
//! offending field and index, e.g. `L[0][1]`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{Ar1Spec, GaussianProcess, LowerBlockFactor};
use crate::error::{AbwError, Result};

fn format_err(field: impl Into<String>, message: impl Into<String>) -> AbwError {
    AbwError::Format {
        field: field.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcessFile {
    pub d: usize,
    #[serde(rename = "T")]
    pub steps: usize,
    pub mean: Vec<f64>,
    #[serde(rename = "L")]
    pub factor: Vec<Vec<f64>>,
}

impl ProcessFile {
    pub fn from_process(process: &GaussianProcess) -> Self {
        let factor = process.factor();
        let m = factor.matrix();
        Self {
            d: factor.d(),
            steps: factor.steps(),
            mean: process.mean().iter().cloned().collect(),
            factor: (0..m.nrows())
                .map(|i| m.row(i).iter().cloned().collect())
                .collect(),
        }
    }

    pub fn into_process(self) -> Result<GaussianProcess> {
        if self.d == 0 {
            return Err(format_err("d", "must be at least 1"));
        }
        if self.steps == 0 {
            return Err(format_err("T", "must be at least 1"));
        }
        let n = self.d * self.steps;
        if self.mean.len() != n {
            return Err(format_err(
                "mean",
                format!("expected {n} entries (d*T), got {}", self.mean.len()),
            ));
        }
        if let Some(i) = self.mean.iter().position(|x| !x.is_finite()) {
            return Err(format_err(format!("mean[{i}]"), "must be finite"));
        }
        if self.factor.len() != n {
            return Err(format_err(
                "L",
                format!("expected {n} rows (d*T), got {}", self.factor.len()),
            ));
        }
        let mut matrix = DMatrix::zeros(n, n);
        for (i, row) in self.factor.iter().enumerate() {
            if row.len() != n {
                return Err(format_err(
                    format!("L[{i}]"),
                    format!("expected {n} entries, got {}", row.len()),
                ));
            }
            for (j, &x) in row.iter().enumerate() {
                if !x.is_finite() {
                    return Err(format_err(format!("L[{i}][{j}]"), "must be finite"));
                }
                if j >= (i / self.d + 1) * self.d && x != 0.0 {
                    return Err(format_err(
                        format!("L[{i}][{j}]"),
                        format!("entry above the block diagonal must be 0, got {x}"),
                    ));
                }
                matrix[(i, j)] = x;
            }
        }
        let factor = LowerBlockFactor::new(self.d, self.steps, matrix)?;
        GaussianProcess::new(DVector::from_vec(self.mean), factor)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ar1File {
    pub alphas: Vec<f64>,
    pub sigmas: Vec<f64>,
}

impl Ar1File {
    pub fn into_spec(self) -> Result<Ar1Spec> {
        if self.sigmas.is_empty() {
            return Err(format_err("sigmas", "must contain at least one entry"));
        }
        if self.alphas.len() != self.sigmas.len() {
            return Err(format_err(
                "alphas",
                format!(
                    "expected {} entries to match sigmas, got {}",
                    self.sigmas.len(),
                    self.alphas.len()
                ),
            ));
        }
        if let Some(i) = self.alphas.iter().position(|x| !x.is_finite()) {
            return Err(format_err(format!("alphas[{i}]"), "must be finite"));
        }
        if let Some((i, s)) = self
            .sigmas
            .iter()
            .enumerate()
            .find(|(_, s)| !(s.is_finite() && **s > 0.0))
        {
            return Err(format_err(
                format!("sigmas[{i}]"),
                format!("must be positive, got {s}"),
            ));
        }
        Ar1Spec::new(self.alphas, self.sigmas)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<GaussianProcess> {
        serde_json::from_str::<ProcessFile>(text).unwrap().into_process()
    }

    #[test]
    fn reads_and_writes_process() {
        let p = parse(r#"{"d":1,"T":2,"mean":[0,1],"L":[[1,0],[0.5,1]]}"#).unwrap();
        assert_eq!(p.factor().matrix()[(1, 0)], 0.5);
        let back = ProcessFile::from_process(&p);
        assert_eq!(back.factor, vec![vec![1.0, 0.0], vec![0.5, 1.0]]);
        assert_eq!(back.clone().into_process().unwrap(), p);
        let text = serde_json::to_string(&back).unwrap();
        assert!(text.contains("\"T\":2") && text.contains("\"L\":"));
    }

    #[test]
    fn errors_name_field_and_index() {
        let field = |text: &str| match parse(text).unwrap_err() {
            AbwError::Format { field, .. } => field,
            other => panic!("unexpected {other:?}"),
        };
        assert_eq!(
            field(r#"{"d":1,"T":2,"mean":[0,1],"L":[[1,0.2],[0.5,1]]}"#),
            "L[0][1]"
        );
        assert_eq!(field(r#"{"d":1,"T":2,"mean":[0],"L":[[1,0],[0.5,1]]}"#), "mean");
        assert_eq!(field(r#"{"d":1,"T":2,"mean":[0,0],"L":[[1,0],[0.5]]}"#), "L[1]");
        assert_eq!(field(r#"{"d":1,"T":0,"mean":[],"L":[]}"#), "T");
    }

    #[test]
    fn ar1_file_validation() {
        let ok: Ar1File = serde_json::from_str(r#"{"alphas":[0,0.5],"sigmas":[1,1]}"#).unwrap();
        assert_eq!(ok.into_spec().unwrap().steps(), 2);
        let bad: Ar1File = serde_json::from_str(r#"{"alphas":[0,0.5],"sigmas":[1,-1]}"#).unwrap();
        match bad.into_spec().unwrap_err() {
            AbwError::Format { field, .. } => assert_eq!(field, "sigmas[1]"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
