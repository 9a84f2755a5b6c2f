use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use ggrf_core::{GenotypeMatrix, Matrix};

use crate::error::{AppError, AppResult};

/// Uncompressed VCF to dosages. Uses `DS` when present, otherwise counts
/// non-reference alleles in `GT`; any `.` allele makes the call missing.
pub fn read_vcf(path: &Path) -> AppResult<GenotypeMatrix> {
    let file = File::open(path).map_err(|e| AppError::io(path, e))?;
    let mut subjects: Option<Vec<String>> = None;
    let mut variants = Vec::new();
    let mut values = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| AppError::io(path, e))?;
        if line.starts_with("##") || line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if let Some(header) = line.strip_prefix('#') {
            if !header.starts_with("CHROM") || fields.len() < 10 {
                return Err(AppError::format(path, line_no, "malformed #CHROM header (no samples?)"));
            }
            subjects = Some(fields[9..].iter().map(|s| s.to_string()).collect());
            continue;
        }
        let Some(samples) = subjects.as_ref() else {
            return Err(AppError::format(path, line_no, "record before #CHROM header"));
        };
        if fields.len() != samples.len() + 9 {
            return Err(AppError::format(
                path,
                line_no,
                format!("expected {} fields, found {}", samples.len() + 9, fields.len()),
            ));
        }
        let id = if fields[2] == "." {
            format!("{}:{}:{}:{}", fields[0], fields[1], fields[3], fields[4])
        } else {
            fields[2].to_string()
        };
        let format: Vec<&str> = fields[8].split(':').collect();
        let ds = format.iter().position(|f| *f == "DS");
        let gt = format.iter().position(|f| *f == "GT");
        if ds.is_none() && gt.is_none() {
            return Err(AppError::format(path, line_no, "FORMAT has neither DS nor GT"));
        }
        for sample in &fields[9..] {
            let parts: Vec<&str> = sample.split(':').collect();
            let v = match ds {
                Some(k) => parse_ds(parts.get(k).copied().unwrap_or(".")),
                None => parse_gt(parts.get(gt.unwrap()).copied().unwrap_or(".")),
            }
            .map_err(|m| AppError::format(path, line_no, format!("{id}: {m}")))?;
            values.push(v);
        }
        variants.push(id);
    }
    let Some(subjects) = subjects else {
        return Err(AppError::format(path, 1, "no #CHROM header"));
    };
    if variants.is_empty() {
        return Err(AppError::format(path, 1, "no variant records"));
    }
    let dosages = Matrix::from_column_slice(subjects.len(), variants.len(), &values);
    Ok(GenotypeMatrix::new(dosages, variants, subjects)?)
}

fn parse_ds(field: &str) -> Result<f64, String> {
    if field == "." {
        return Ok(f64::NAN);
    }
    match field.parse::<f64>() {
        Ok(v) if (0.0..=2.0).contains(&v) => Ok(v),
        _ => Err(format!("bad DS `{field}`")),
    }
}

fn parse_gt(field: &str) -> Result<f64, String> {
    let alleles: Vec<&str> = field.split(['/', '|']).collect();
    if alleles.len() > 2 {
        return Err(format!("only diploid calls are supported, got `{field}`"));
    }
    let mut dosage = 0.0;
    for a in &alleles {
        match *a {
            "." => return Ok(f64::NAN),
            "0" => {}
            other if other.parse::<u32>().is_ok() => dosage += 1.0,
            _ => return Err(format!("bad GT `{field}`")),
        }
    }
    // haploid calls count twice so dosages stay on the 0..2 scale
    if alleles.len() == 1 {
        dosage *= 2.0;
    }
    Ok(dosage)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_gt_and_ds() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.vcf");
        std::fs::write(
            &path,
            "##fileformat=VCFv4.2\n\
             #CHROM\tPOS\tID\tREF\tALT\tQUAL\tFILTER\tINFO\tFORMAT\ta\tb\tc\n\
             22\t100\trs1\tA\tG\t.\tPASS\t.\tGT\t0/0\t0|1\t1/1\n\
             22\t200\t.\tC\tT\t.\tPASS\t.\tGT:DS\t./.:0.1\t0/1:.\t0/0:1.9\n\
             22\t300\trs3\tG\tA,C\t.\tPASS\t.\tGT\t./.\t1/2\t0/2\n",
        )
        .unwrap();
        let g = read_vcf(&path).unwrap();
        assert_eq!(g.subject_ids(), ["a", "b", "c"]);
        assert_eq!(g.variant_ids(), ["rs1", "22:200:C:T", "rs3"]);
        assert_eq!(g.get(2, 0), Some(2.0));
        assert_eq!(g.get(0, 1), Some(0.1));
        assert!(g.is_missing(1, 1));
        assert!(g.is_missing(0, 2));
        assert_eq!(g.get(1, 2), Some(2.0));
        assert_eq!(g.get(2, 2), Some(1.0));
    }

    #[test]
    fn malformed_records() {
        assert!(parse_gt("0/x").is_err());
        assert!(parse_ds("2.5").is_err());
    }
}
