//! CSV residual grids and JSON solution documents.
//!
//! Floats are written in the shortest decimal form that parses back to the
//! same binary64 value, so output is deterministic and round-trips exactly.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::residual::ResidualReport;
use crate::error::{Error, Result};
use crate::polynomial::Parity;
use crate::solver::SpectralSolution;

/// Version of the JSON solution layout.
pub const SCHEMA_VERSION: u32 = 1;

/// Version string written into every solution document.
pub const TOOL_VERSION: &str = concat!("cauchy-well ", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionDocument {
    pub schema_version: u32,
    pub parity: Parity,
    pub degree: usize,
    pub rank: usize,
    #[serde(rename = "E")]
    pub e: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub alphas: Vec<f64>,
    pub imag_residue: f64,
    pub precision_bits: u32,
    pub tool_version: String,
}

impl SolutionDocument {
    pub fn from_solution(s: &SpectralSolution<f64>) -> Result<Self> {
        let c = s
            .norm_c
            .ok_or_else(|| Error::Usage("only normalized solutions can be serialized".into()))?;
        Ok(SolutionDocument {
            schema_version: SCHEMA_VERSION,
            parity: s.parity,
            degree: s.degree,
            rank: s.rank,
            e: s.e,
            c,
            alphas: s.alphas.clone(),
            imag_residue: s.imag_residue,
            precision_bits: s.precision_bits,
            tool_version: TOOL_VERSION.to_string(),
        })
    }

    pub fn into_solution(self) -> Result<SpectralSolution<f64>> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Parse(format!(
                "unsupported schema version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        let n = self.parity.half_degree(self.degree)?;
        if self.alphas.len() != n + 1 {
            return Err(Error::Parse(format!(
                "degree {} needs {} coefficients, found {}",
                self.degree,
                n + 1,
                self.alphas.len()
            )));
        }
        Ok(SpectralSolution {
            parity: self.parity,
            rank: self.rank,
            degree: self.degree,
            e: self.e,
            alphas: self.alphas,
            norm_c: Some(self.c),
            imag_residue: self.imag_residue,
            precision_bits: self.precision_bits,
            unscalable: 0,
        })
    }
}

pub fn solution_to_json(s: &SpectralSolution<f64>) -> Result<String> {
    let doc = SolutionDocument::from_solution(s)?;
    let mut out = serde_json::to_string_pretty(&doc).map_err(|e| Error::Parse(e.to_string()))?;
    out.push('\n');
    Ok(out)
}

pub fn solution_from_json(s: &str) -> Result<SpectralSolution<f64>> {
    let doc: SolutionDocument = serde_json::from_str(s).map_err(|e| Error::Parse(format!("solution JSON: {e}")))?;
    doc.into_solution()
}

pub fn read_solution(path: &Path) -> Result<SpectralSolution<f64>> {
    let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    solution_from_json(&s)
}

/// Header `x,psi,ad_psi,residual`, then the grid and the boundary row.
pub fn report_to_csv(report: &ResidualReport) -> Result<String> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Parse(e.to_string());
    w.write_record(["x", "psi", "ad_psi", "residual"]).map_err(csv_err)?;
    for row in report.rows() {
        w.serialize(row).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

/// Writes `contents` to `path`, surfacing failures with the path attached.
pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::residual::residual_report;
    use crate::solver::{solve_in, DEFAULT_IMAG_TOL};

    #[test]
    fn degree_two_json() {
        let sol = solve_in::<f64>(Parity::Even, 1, 1, DEFAULT_IMAG_TOL).unwrap();
        let json = solution_to_json(&sol).unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["parity"], "even");
        assert_eq!(v["degree"], 2);
        let alphas = v["alphas"].as_array().unwrap();
        assert_eq!(alphas[0].as_f64().unwrap(), 1.0);
        assert!((alphas[1].as_f64().unwrap() + 0.4).abs() < 1e-12);
        assert_eq!(v["schema_version"], 1);
        let back = solution_from_json(&json).unwrap();
        assert_eq!(back.e.to_bits(), sol.e.to_bits());
        assert_eq!(back.alphas, sol.alphas);
    }

    #[test]
    fn csv_row_count_and_header() {
        let r = residual_report(|x| 1.0 - x * x, |_| 1.0, 1.0, 7).unwrap();
        let csv = report_to_csv(&r).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "x,psi,ad_psi,residual");
        assert_eq!(lines.len(), 1 + 8);
        assert!(lines[8].starts_with("1.0,0.0,1.0,"));
        let empty = residual_report(|_| 0.0, |_| 0.0, 1.0, 0).unwrap();
        assert_eq!(report_to_csv(&empty).unwrap(), "x,psi,ad_psi,residual\n");
    }

    #[test]
    fn malformed_documents() {
        assert!(matches!(solution_from_json("{}"), Err(Error::Parse(_))));
        let sol = solve_in::<f64>(Parity::Even, 1, 1, DEFAULT_IMAG_TOL).unwrap();
        let json = solution_to_json(&sol)
            .unwrap()
            .replace("\"degree\": 2", "\"degree\": 4");
        assert!(matches!(solution_from_json(&json), Err(Error::Parse(_))));
    }

    #[test]
    fn io_errors_carry_the_path() {
        let err = write_file(Path::new("/nonexistent-dir/out.csv"), "x").unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/out.csv"));
    }
}
