//! Regression tolerances, loaded from TOML so they can change without a rebuild.

use std::path::Path;

use serde::Deserialize;

use super::reference::TableId;
use crate::error::{Error, Result};

const DEFAULT_TOML: &str = include_str!("../../data/tolerances.toml");

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub e: f64,
    pub c: f64,
    pub alpha: f64,
    pub long_alpha: f64,
    pub long_alpha_max_index: usize,
    #[serde(default)]
    pub overrides: Vec<Override>,
}

/// A tolerance for one field, optionally restricted to a table and degree.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Override {
    pub table: Option<TableId>,
    pub degree: Option<usize>,
    pub field: String,
    pub tolerance: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::from_toml_str(DEFAULT_TOML).expect("embedded tolerance file is valid")
    }
}

impl Tolerances {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let t: Tolerances = toml::from_str(s).map_err(|e| Error::Parse(format!("tolerance file: {e}")))?;
        let all = [t.e, t.c, t.alpha, t.long_alpha]
            .into_iter()
            .chain(t.overrides.iter().map(|o| o.tolerance));
        for v in all {
            if v.is_nan() || v <= 0.0 {
                return Err(Error::Parse(format!("tolerance must be positive, got {v}")));
            }
        }
        Ok(t)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&s)
    }

    /// Tolerance for `field` (`E`, `C`, `alpha_<k>`); the last matching
    /// override wins.
    pub fn for_field(&self, table: TableId, degree: usize, field: &str) -> f64 {
        let base = match field {
            "E" => self.e,
            "C" => self.c,
            _ => self.alpha,
        };
        self.overrides
            .iter()
            .rfind(|o| {
                o.table.is_none_or(|t| t == table)
                    && o.degree.is_none_or(|d| d == degree)
                    && (o.field == field || (o.field == "alpha" && field.starts_with("alpha_")))
            })
            .map_or(base, |o| o.tolerance)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_defaults() {
        let t = Tolerances::default();
        assert_eq!(t.for_field(TableId::Ground, 20, "E"), 1e-5);
        assert_eq!(t.for_field(TableId::Ground, 40, "C"), 1e-3);
        assert_eq!(t.for_field(TableId::Ground, 50, "C"), 1e-5);
        assert_eq!(t.for_field(TableId::Spectrum, 40, "C"), 1e-5);
        assert_eq!(t.long_alpha_max_index, 100);
    }

    #[test]
    fn overrides_match_alpha_family() {
        let t = Tolerances::from_toml_str(
            "e = 1e-6\nc = 1e-6\nalpha = 1e-6\nlong_alpha = 1e-4\nlong_alpha_max_index = 10\n\
             [[overrides]]\nfield = \"alpha\"\ntolerance = 0.5\n",
        )
        .unwrap();
        assert_eq!(t.for_field(TableId::Ground, 2, "alpha_4"), 0.5);
        assert_eq!(t.for_field(TableId::Ground, 2, "E"), 1e-6);
    }

    #[test]
    fn rejects_bad_files() {
        assert!(matches!(Tolerances::from_toml_str("e = 1"), Err(Error::Parse(_))));
        assert!(
            Tolerances::from_toml_str("e = -1\nc = 1\nalpha = 1\nlong_alpha = 1\nlong_alpha_max_index = 1").is_err()
        );
    }
}
