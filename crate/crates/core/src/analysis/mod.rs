//! Regression against reference tables, residual grids and serialization.

pub mod emit;
pub mod oracle;
pub mod reference;
pub mod residual;
pub mod tolerances;

use rayon::prelude::*;
use serde::Serialize;

pub use emit::{read_solution, report_to_csv, solution_from_json, solution_to_json, SolutionDocument};
pub use oracle::{oracle_check, OracleReport};
pub use reference::{ReferenceEntry, ReferenceKey, ReferenceTable, TableId};
pub use residual::{residual_report, solution_residual, ResidualReport, ResidualSample};
pub use tolerances::Tolerances;

use crate::error::{Error, Result};
use crate::polynomial::Parity;
use crate::solver::{solve_state, SolveOptions, SpectralSolution};
use reference::{long_ground_coefficients, parse_printed};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FieldDeviation {
    /// `E`, `C` or `alpha_<k>`.
    pub field: String,
    /// Reference value exactly as printed.
    pub printed: String,
    pub computed: f64,
    pub deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Comparison {
    pub key: ReferenceKey,
    pub row: String,
    pub fields: Vec<FieldDeviation>,
    pub pass: bool,
}

impl Comparison {
    fn new(key: ReferenceKey, row: String, fields: Vec<FieldDeviation>) -> Self {
        let pass = fields.iter().all(|f| f.pass);
        Comparison { key, row, fields, pass }
    }

    pub fn field(&self, name: &str) -> Option<&FieldDeviation> {
        self.fields.iter().find(|f| f.field == name)
    }
}

fn deviation(field: String, printed: &str, computed: f64, tolerance: f64) -> FieldDeviation {
    let d = (computed - parse_printed(printed)).abs();
    FieldDeviation {
        field,
        printed: printed.to_string(),
        computed,
        deviation: d,
        tolerance,
        pass: d <= tolerance,
    }
}

/// Absolute deviations of `E`, `C` and every printed coefficient of the
/// matching reference entry.
pub fn compare(solution: &SpectralSolution<f64>, table: &ReferenceTable, tol: &Tolerances) -> Result<Comparison> {
    let entry = table.lookup(solution.parity, solution.degree, solution.rank)?;
    let id = table.id();
    let deg = solution.degree;
    let mut fields = vec![deviation("E".into(), entry.e, solution.e, tol.for_field(id, deg, "E"))];
    if let Some(c) = entry.c {
        let computed = solution
            .norm_c
            .ok_or_else(|| Error::Usage("comparison of C needs a normalized solution".into()))?;
        fields.push(deviation("C".into(), c, computed, tol.for_field(id, deg, "C")));
    }
    for (i, printed) in entry.alphas.iter().enumerate() {
        let m = i + 1;
        let name = format!("alpha_{}", solution.parity.exponent(m));
        let computed = solution.alphas.get(m).copied().unwrap_or(0.0);
        let t = tol.for_field(id, deg, &name);
        fields.push(deviation(name, printed, computed, t));
    }
    Ok(Comparison::new(entry.key, entry.row.clone(), fields))
}

/// Loose check of a degree-500 ground state against the printed long
/// expansion, up to `alpha_<long_alpha_max_index>`.
pub fn compare_long(solution: &SpectralSolution<f64>, tol: &Tolerances) -> Result<Comparison> {
    if solution.parity != Parity::Even || solution.degree != 500 || solution.rank != 1 {
        return Err(Error::MissingReference {
            key: format!(
                "long expansion for {} degree {}, rank {}",
                solution.parity, solution.degree, solution.rank
            ),
            available: "even/500/1".into(),
        });
    }
    let fields = long_ground_coefficients()
        .iter()
        .enumerate()
        .map(|(i, printed)| (2 * (i + 1), i + 1, printed))
        .take_while(|(index, _, _)| *index <= tol.long_alpha_max_index)
        .map(|(index, m, printed)| deviation(format!("alpha_{index}"), printed, solution.alphas[m], tol.long_alpha))
        .collect();
    let key = ReferenceKey {
        table: TableId::Ground,
        parity: Parity::Even,
        degree: 500,
        rank: 1,
    };
    Ok(Comparison::new(key, "w500 long expansion".into(), fields))
}

/// Ordering check of the five lowest computed eigenvalues at one `n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Interleaving {
    pub n: usize,
    pub values: Vec<f64>,
    pub ordered: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TablesReport {
    pub comparisons: Vec<Comparison>,
    pub interleaving: Vec<Interleaving>,
    pub pass: bool,
}

/// Solves every reference row up to `max_degree` and compares. Jobs run in
/// parallel; the report keeps the table order.
pub fn reproduce_tables(max_degree: usize, options: &SolveOptions, tol: &Tolerances) -> Result<TablesReport> {
    let mut jobs: Vec<(ReferenceTable, ReferenceEntry)> = Vec::new();
    for table in [ReferenceTable::ground(), ReferenceTable::spectrum()] {
        for e in table.entries() {
            if e.key.degree <= max_degree {
                jobs.push((table.clone(), e.clone()));
            }
        }
    }
    let comparisons = jobs
        .par_iter()
        .map(|(table, entry)| {
            let k = entry.key;
            let sol = solve_state(k.parity, k.degree, k.rank, options)?;
            compare(&sol, table, tol)
        })
        .collect::<Result<Vec<_>>>()?;

    // Spectrum entries come in runs of five per n (E1 .. E5).
    let mut groups: std::collections::BTreeMap<usize, Vec<f64>> = Default::default();
    for c in comparisons.iter().filter(|c| c.key.table == TableId::Spectrum) {
        groups.entry(c.key.degree / 2).or_default().push(c.fields[0].computed);
    }
    let interleaving: Vec<Interleaving> = groups
        .into_iter()
        .filter(|(_, values)| values.len() == 5)
        .map(|(n, values)| Interleaving {
            n,
            ordered: values.windows(2).all(|w| w[0] < w[1]),
            values,
        })
        .collect();
    let pass = comparisons.iter().all(|c| c.pass) && interleaving.iter().all(|i| i.ordered);
    Ok(TablesReport {
        comparisons,
        interleaving,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{solve_in, DEFAULT_IMAG_TOL};

    #[test]
    fn compare_degree_twenty() {
        let sol = solve_in::<f64>(Parity::Even, 10, 1, DEFAULT_IMAG_TOL).unwrap();
        let c = compare(&sol, &ReferenceTable::ground(), &Tolerances::default()).unwrap();
        assert!(c.pass, "{c:#?}");
        assert_eq!(c.fields.len(), 2 + 8);
        assert_eq!(c.field("alpha_16").unwrap().printed, "-0.0031160");
    }

    #[test]
    fn compare_spectrum_fifth_level() {
        let sol = solve_in::<f64>(Parity::Even, 50, 3, DEFAULT_IMAG_TOL).unwrap();
        let c = compare(&sol, &ReferenceTable::spectrum(), &Tolerances::default()).unwrap();
        assert_eq!(c.row, "n=50 E5");
        assert!(c.field("E").unwrap().deviation < 1e-5);
    }

    #[test]
    fn missing_row_is_lookup_error() {
        let sol = solve_in::<f64>(Parity::Even, 11, 1, DEFAULT_IMAG_TOL).unwrap();
        assert!(matches!(
            compare(&sol, &ReferenceTable::ground(), &Tolerances::default()),
            Err(Error::MissingReference { .. })
        ));
    }

    #[test]
    fn small_table_reproduction() {
        let r = reproduce_tables(21, &SolveOptions::default(), &Tolerances::default()).unwrap();
        assert!(r.pass, "{r:#?}");
        assert_eq!(r.interleaving.len(), 4);
        assert!(r.comparisons.iter().any(|c| c.row == "w20"));
    }
}
