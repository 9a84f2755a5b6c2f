use std::collections::HashMap;
use std::path::{Path, PathBuf};

use ggrf_core::{CovariateMatrix, GenotypeMatrix, Matrix, PhenotypeKind, PhenotypeVector};

use super::is_missing;
use crate::error::{AppError, AppResult};

/// Subject-keyed numeric table: first column subject id, then named columns.
#[derive(Debug, Clone)]
pub struct Table {
    pub path: PathBuf,
    pub columns: Vec<String>,
    pub rows: Vec<(String, Vec<Option<f64>>)>,
    /// Source line of each row.
    pub lines: Vec<usize>,
}

impl Table {
    pub fn column_index(&self, name: &str) -> AppResult<usize> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| AppError::format(&self.path, 1, format!("no column `{name}`")))
    }

    fn index(&self) -> HashMap<&str, usize> {
        self.rows.iter().enumerate().map(|(i, (id, _))| (id.as_str(), i)).collect()
    }
}

pub fn read_table(path: &Path) -> AppResult<Table> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| AppError::format(path, 0, e.to_string()))?;
    let header = reader.headers().map_err(|e| AppError::format(path, 1, e.to_string()))?.clone();
    if header.len() < 2 {
        return Err(AppError::format(path, 1, "need a subject column and at least one value column"));
    }
    let columns: Vec<String> = header.iter().skip(1).map(str::to_owned).collect();
    let mut rows = Vec::new();
    let mut lines = Vec::new();
    let mut seen = HashMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| AppError::format(path, e.position().map_or(0, |p| p.line() as usize), e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != columns.len() + 1 {
            return Err(AppError::format(path, line, format!("expected {} fields, found {}", columns.len() + 1, record.len())));
        }
        let id = record[0].to_owned();
        if seen.insert(id.clone(), line).is_some() {
            return Err(AppError::format(path, line, format!("duplicate subject `{id}`")));
        }
        let mut values = Vec::with_capacity(columns.len());
        for (c, field) in record.iter().skip(1).enumerate() {
            let field = field.trim();
            if is_missing(field) {
                values.push(None);
                continue;
            }
            match field.parse::<f64>() {
                Ok(v) if v.is_finite() => values.push(Some(v)),
                _ => {
                    return Err(AppError::format(path, line, format!("column `{}`: `{field}` is not a number", columns[c])))
                }
            }
        }
        rows.push((id, values));
        lines.push(line);
    }
    Ok(Table { path: path.to_owned(), columns, rows, lines })
}

/// Genotypes, phenotype and covariates restricted to the shared complete subjects.
#[derive(Debug, Clone)]
pub struct JoinedData {
    pub genotypes: GenotypeMatrix,
    pub phenotype: PhenotypeVector,
    pub covariates: CovariateMatrix,
    /// Genotyped subjects dropped for missing phenotype or covariates.
    pub dropped_subjects: usize,
}

/// Keeps genotype order; subjects missing from either table or with an NA
/// in the phenotype or any covariate are dropped.
pub fn join_subjects(
    g: &GenotypeMatrix,
    pheno: &Table,
    pheno_col: &str,
    kind: PhenotypeKind,
    covariates: Option<&Table>,
) -> AppResult<JoinedData> {
    let pc = pheno.column_index(pheno_col)?;
    let pindex = pheno.index();
    let cindex = covariates.map(Table::index);

    let mut keep = Vec::new();
    let mut y = Vec::new();
    let mut cov_rows: Vec<&[Option<f64>]> = Vec::new();
    for (i, id) in g.subject_ids().iter().enumerate() {
        let Some(&pi) = pindex.get(id.as_str()) else { continue };
        let Some(v) = pheno.rows[pi].1[pc] else { continue };
        let crow = match (covariates, &cindex) {
            (Some(table), Some(index)) => match index.get(id.as_str()) {
                Some(&ci) if table.rows[ci].1.iter().all(Option::is_some) => Some(table.rows[ci].1.as_slice()),
                _ => continue,
            },
            _ => None,
        };
        if kind == PhenotypeKind::Binary && v != 0.0 && v != 1.0 {
            return Err(AppError::format(
                &pheno.path,
                pheno.lines[pi],
                format!("column `{pheno_col}` is not binary: subject {id} has {v}"),
            ));
        }
        keep.push(i);
        y.push(v);
        if let Some(r) = crow {
            cov_rows.push(r);
        }
    }
    if keep.len() < 2 {
        return Err(AppError::Usage(format!("only {} subjects with complete data", keep.len())));
    }
    let dropped_subjects = g.n_subjects() - keep.len();
    let genotypes = if dropped_subjects == 0 { g.clone() } else { g.select_subjects(&keep)? };
    let phenotype = PhenotypeVector::new(y, kind)?;
    let covariates = match covariates {
        Some(table) => {
            let m = table.columns.len();
            let values = Matrix::from_fn(keep.len(), m, |i, j| cov_rows[i][j].unwrap());
            CovariateMatrix::new(values, table.columns.clone())?
        }
        None => CovariateMatrix::intercept_only(keep.len()),
    };
    Ok(JoinedData { genotypes, phenotype, covariates, dropped_subjects })
}
