//! File formats: dosage TSV, a minimal VCF reader, phenotype/covariate
//! tables and region grouping files.
//!
//! All tables are tab-separated. Missing values are `NA`, `.` or empty.

mod genotype;
mod region;
mod table;
mod vcf;

pub use genotype::{read_genotypes_tsv, write_genotypes_tsv, write_similarity_tsv};
pub use region::{read_regions, Region};
pub use table::{join_subjects, read_table, JoinedData, Table};
pub use vcf::read_vcf;

use std::path::Path;

use ggrf_core::GenotypeMatrix;

use crate::error::AppResult;

pub(crate) fn is_missing(field: &str) -> bool {
    matches!(field, "" | "NA" | "." | "nan" | "NaN")
}

/// Reads VCF when the extension says so, otherwise dosage TSV.
pub fn read_genotypes(path: &Path) -> AppResult<GenotypeMatrix> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("vcf") => read_vcf(path),
        _ => read_genotypes_tsv(path),
    }
}
