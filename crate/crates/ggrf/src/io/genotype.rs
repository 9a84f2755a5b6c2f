use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use ggrf_core::{GenotypeMatrix, Matrix, SimilarityMatrix};

use super::is_missing;
use crate::error::{AppError, AppResult};

/// Variant-major dosage table: a header `variant <subject ids...>`, then one
/// row per variant.
pub fn read_genotypes_tsv(path: &Path) -> AppResult<GenotypeMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let header = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    if header.len() < 2 {
        return Err(AppError::format(path, 1, "header needs a variant column and at least one subject"));
    }
    let subjects: Vec<String> = header.iter().skip(1).map(str::to_owned).collect();
    let n = subjects.len();

    let mut variants = Vec::new();
    let mut columns: Vec<f64> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != n + 1 {
            return Err(AppError::format(path, line, format!("expected {} fields, found {}", n + 1, record.len())));
        }
        variants.push(record[0].to_owned());
        for (i, field) in record.iter().skip(1).enumerate() {
            let field = field.trim();
            let v = if is_missing(field) {
                f64::NAN
            } else {
                match field.parse::<f64>() {
                    Ok(v) if (0.0..=2.0).contains(&v) => v,
                    _ => {
                        return Err(AppError::format(
                            path,
                            line,
                            format!("subject {}: dosage `{field}` is not a number in [0, 2]", subjects[i]),
                        ))
                    }
                }
            };
            columns.push(v);
        }
    }
    if variants.is_empty() {
        return Err(AppError::format(path, 1, "no variants"));
    }
    let dosages = Matrix::from_column_slice(n, variants.len(), &columns);
    Ok(GenotypeMatrix::new(dosages, variants, subjects)?)
}

fn csv_error(path: &Path, e: csv::Error) -> AppError {
    let line = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => AppError::io(path, io),
        other => AppError::format(path, line, format!("{other:?}")),
    }
}

fn format_dosage(v: f64) -> String {
    if v.is_nan() {
        "NA".into()
    } else {
        format!("{v}")
    }
}

pub fn write_genotypes_tsv(path: &Path, g: &GenotypeMatrix) -> AppResult<()> {
    let file = File::create(path).map_err(|e| AppError::io(path, e))?;
    let mut out = BufWriter::new(file);
    let io = |e| AppError::io(path, e);
    write!(out, "variant").map_err(io)?;
    for s in g.subject_ids() {
        write!(out, "\t{s}").map_err(io)?;
    }
    writeln!(out).map_err(io)?;
    for (j, id) in g.variant_ids().iter().enumerate() {
        write!(out, "{id}").map_err(io)?;
        for i in 0..g.n_subjects() {
            write!(out, "\t{}", format_dosage(g.dosages()[(i, j)])).map_err(io)?;
        }
        writeln!(out).map_err(io)?;
    }
    out.flush().map_err(io)
}

/// Square similarity matrix with subject ids as row and column labels.
pub fn write_similarity_tsv(path: &Path, s: &SimilarityMatrix, subjects: &[String]) -> AppResult<()> {
    let file = File::create(path).map_err(|e| AppError::io(path, e))?;
    let mut out = BufWriter::new(file);
    let io = |e| AppError::io(path, e);
    write!(out, "subject").map_err(io)?;
    for id in subjects {
        write!(out, "\t{id}").map_err(io)?;
    }
    writeln!(out).map_err(io)?;
    for (i, id) in subjects.iter().enumerate() {
        write!(out, "{id}").map_err(io)?;
        for j in 0..subjects.len() {
            write!(out, "\t{:e}", s.values()[(i, j)]).map_err(io)?;
        }
        writeln!(out).map_err(io)?;
    }
    out.flush().map_err(io)
}
