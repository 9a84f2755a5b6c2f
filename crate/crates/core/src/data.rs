//! Cohort data: genotypes, phenotypes, covariates, and the QC transforms
//! applied before any test (MAF, mean imputation, monomorphic filtering).

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::weights::{compute_weights, WeightSpec};
use crate::{Error, Matrix, Result};

/// N×K additive dosage matrix. Missing entries are stored as NaN.
///
/// Dosages are 0, 1 or 2 as loaded; after [`impute_missing`] entries may be
/// any real value in `[0, 2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GenotypeMatrix {
    dosages: Matrix,
    variant_ids: Vec<String>,
    subject_ids: Vec<String>,
}

impl GenotypeMatrix {
    pub fn new(dosages: Matrix, variant_ids: Vec<String>, subject_ids: Vec<String>) -> Result<Self> {
        let (n, k) = dosages.shape();
        if n < 2 {
            return Err(Error::InvalidInput(format!("need at least 2 subjects, got {n}")));
        }
        if k < 1 {
            return Err(Error::InvalidInput("need at least 1 variant".into()));
        }
        if variant_ids.len() != k || subject_ids.len() != n {
            return Err(Error::Dimension(format!(
                "{n}x{k} dosages with {} subject ids and {} variant ids",
                subject_ids.len(),
                variant_ids.len()
            )));
        }
        for (idx, &v) in dosages.iter().enumerate() {
            if !v.is_nan() && !(0.0..=2.0).contains(&v) {
                return Err(Error::InvalidInput(format!(
                    "dosage {v} for subject {} variant {} outside [0, 2]",
                    subject_ids[idx % n],
                    variant_ids[idx / n]
                )));
            }
        }
        Ok(Self { dosages, variant_ids, subject_ids })
    }

    /// Builds a matrix with generated ids (`s0..`, `v0..`).
    pub fn from_dosages(dosages: Matrix) -> Result<Self> {
        let (n, k) = dosages.shape();
        let subjects = (0..n).map(|i| format!("s{i}")).collect();
        let variants = (0..k).map(|j| format!("v{j}")).collect();
        Self::new(dosages, variants, subjects)
    }

    pub fn n_subjects(&self) -> usize {
        self.dosages.nrows()
    }

    pub fn n_variants(&self) -> usize {
        self.dosages.ncols()
    }

    pub fn dosages(&self) -> &Matrix {
        &self.dosages
    }

    pub fn variant_ids(&self) -> &[String] {
        &self.variant_ids
    }

    pub fn subject_ids(&self) -> &[String] {
        &self.subject_ids
    }

    pub fn get(&self, subject: usize, variant: usize) -> Option<f64> {
        let v = self.dosages[(subject, variant)];
        (!v.is_nan()).then_some(v)
    }

    pub fn is_missing(&self, subject: usize, variant: usize) -> bool {
        self.dosages[(subject, variant)].is_nan()
    }

    pub fn n_missing(&self) -> usize {
        self.dosages.iter().filter(|v| v.is_nan()).count()
    }

    pub fn column(&self, variant: usize) -> Vec<Option<f64>> {
        self.dosages
            .column(variant)
            .iter()
            .map(|&v| (!v.is_nan()).then_some(v))
            .collect()
    }

    /// Keeps the listed variants, in the given order.
    pub fn select_variants(&self, idx: &[usize]) -> Result<Self> {
        if let Some(&bad) = idx.iter().find(|&&j| j >= self.n_variants()) {
            return Err(Error::Dimension(format!("variant index {bad} out of range")));
        }
        Self::new(
            self.dosages.select_columns(idx),
            idx.iter().map(|&j| self.variant_ids[j].clone()).collect(),
            self.subject_ids.clone(),
        )
    }

    /// Keeps the listed subjects, in the given order.
    pub fn select_subjects(&self, idx: &[usize]) -> Result<Self> {
        if let Some(&bad) = idx.iter().find(|&&i| i >= self.n_subjects()) {
            return Err(Error::Dimension(format!("subject index {bad} out of range")));
        }
        Self::new(
            self.dosages.select_rows(idx),
            self.variant_ids.clone(),
            idx.iter().map(|&i| self.subject_ids[i].clone()).collect(),
        )
    }

    pub fn variant_meta(&self) -> Result<Vec<VariantMeta>> {
        (0..self.n_variants())
            .map(|j| {
                let col = self.dosages.column(j);
                let maf = maf_of(col.iter().copied())
                    .ok_or_else(|| Error::AllMissing { variant: self.variant_ids[j].clone() })?;
                Ok(VariantMeta {
                    id: self.variant_ids[j].clone(),
                    maf,
                    n_missing: col.iter().filter(|v| v.is_nan()).count(),
                })
            })
            .collect()
    }

    pub fn mafs(&self) -> Result<Vec<f64>> {
        Ok(self.variant_meta()?.into_iter().map(|m| m.maf).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariantMeta {
    pub id: String,
    pub maf: f64,
    pub n_missing: usize,
}

fn maf_of(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, count) = values
        .filter(|v| !v.is_nan())
        .fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    if count == 0 {
        return None;
    }
    let p = sum / (2.0 * count as f64);
    Some(p.min(1.0 - p))
}

/// Minor allele frequency of one dosage column, ignoring missing entries.
pub fn compute_maf(column: &[Option<f64>]) -> Result<f64> {
    maf_of(column.iter().flatten().copied())
        .ok_or_else(|| Error::AllMissing { variant: "<column>".to_string() })
}

/// Replaces each missing dosage by its column's mean observed dosage.
pub fn impute_missing(g: &GenotypeMatrix) -> Result<GenotypeMatrix> {
    let mut dosages = g.dosages.clone();
    for (j, mut col) in dosages.column_iter_mut().enumerate() {
        let (sum, count) = col
            .iter()
            .filter(|v| !v.is_nan())
            .fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
        if count == 0 {
            return Err(Error::AllMissing { variant: g.variant_ids[j].clone() });
        }
        if count == col.len() {
            continue;
        }
        let mean = sum / count as f64;
        col.iter_mut().filter(|v| v.is_nan()).for_each(|v| *v = mean);
    }
    Ok(GenotypeMatrix {
        dosages,
        variant_ids: g.variant_ids.clone(),
        subject_ids: g.subject_ids.clone(),
    })
}

/// Drops variants whose MAF is 0. Returns the survivors and the dropped ids.
pub fn filter_monomorphic(g: &GenotypeMatrix) -> Result<(GenotypeMatrix, Vec<String>)> {
    let meta = g.variant_meta()?;
    let (keep, drop): (Vec<_>, Vec<_>) = meta.iter().enumerate().partition(|(_, m)| m.maf > 0.0);
    if keep.is_empty() {
        return Err(Error::EmptyRegion);
    }
    let dropped = drop.into_iter().map(|(_, m)| m.id.clone()).collect();
    if keep.len() == meta.len() {
        return Ok((g.clone(), dropped));
    }
    let idx: Vec<usize> = keep.into_iter().map(|(j, _)| j).collect();
    Ok((g.select_variants(&idx)?, dropped))
}

/// Genotypes after filtering and imputation, with their MAFs and weights.
#[derive(Debug, Clone)]
pub struct PreparedGenotypes {
    pub genotypes: GenotypeMatrix,
    pub mafs: Vec<f64>,
    pub weights: Vec<f64>,
    pub dropped: Vec<String>,
}

/// Shared front half of every test: filter monomorphic → impute → weights.
///
/// MAFs are computed before imputation; mean imputation does not change them.
pub fn prepare_genotypes(g: &GenotypeMatrix, spec: &WeightSpec) -> Result<PreparedGenotypes> {
    let (filtered, dropped) = filter_monomorphic(g)?;
    let mafs = filtered.mafs()?;
    let weights = compute_weights(&mafs, spec)?;
    let genotypes = if filtered.n_missing() > 0 { impute_missing(&filtered)? } else { filtered };
    Ok(PreparedGenotypes { genotypes, mafs, weights, dropped })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PhenotypeKind {
    Quantitative,
    Binary,
}

impl PhenotypeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PhenotypeKind::Quantitative => "quantitative",
            PhenotypeKind::Binary => "binary",
        }
    }
}

impl core::str::FromStr for PhenotypeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "quantitative" | "q" | "continuous" => Ok(Self::Quantitative),
            "binary" | "b" | "dichotomous" => Ok(Self::Binary),
            other => Err(Error::InvalidInput(format!("unknown phenotype type `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhenotypeVector {
    values: Vec<f64>,
    kind: PhenotypeKind,
}

impl PhenotypeVector {
    pub fn new(values: Vec<f64>, kind: PhenotypeKind) -> Result<Self> {
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite phenotype value {bad}")));
        }
        if kind == PhenotypeKind::Binary {
            if let Some(bad) = values.iter().find(|&&v| v != 0.0 && v != 1.0) {
                return Err(Error::InvalidInput(format!("binary phenotype value {bad} not in {{0,1}}")));
            }
            let cases = values.iter().filter(|&&v| v == 1.0).count();
            if cases == 0 || cases == values.len() {
                return Err(Error::DegenerateData("binary phenotype has a single class".into()));
            }
        }
        Ok(Self { values, kind })
    }

    pub fn quantitative(values: Vec<f64>) -> Result<Self> {
        Self::new(values, PhenotypeKind::Quantitative)
    }

    pub fn binary(values: Vec<f64>) -> Result<Self> {
        Self::new(values, PhenotypeKind::Binary)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> PhenotypeKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// N×M covariates. Unless `intercept_included`, an intercept column is
/// prepended when the design matrix is formed.
#[derive(Debug, Clone, PartialEq)]
pub struct CovariateMatrix {
    values: Matrix,
    names: Vec<String>,
    intercept_included: bool,
}

impl CovariateMatrix {
    pub fn new(values: Matrix, names: Vec<String>) -> Result<Self> {
        if values.ncols() != names.len() {
            return Err(Error::Dimension(format!(
                "{} covariate columns with {} names",
                values.ncols(),
                names.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite covariate value".into()));
        }
        Ok(Self { values, names, intercept_included: false })
    }

    /// Use `values` as the full design, without prepending an intercept.
    pub fn with_intercept_included(mut self) -> Self {
        self.intercept_included = true;
        self
    }

    pub fn intercept_only(n: usize) -> Self {
        Self { values: Matrix::zeros(n, 0), names: Vec::new(), intercept_included: false }
    }

    pub fn n_subjects(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_covariates(&self) -> usize {
        self.values.ncols()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn values(&self) -> &Matrix {
        &self.values
    }

    pub fn intercept_included(&self) -> bool {
        self.intercept_included
    }

    pub fn is_intercept_only(&self) -> bool {
        !self.intercept_included && self.values.ncols() == 0
    }

    /// `[1 | X]`, or `X` itself when the intercept is already included.
    pub fn design(&self) -> Matrix {
        if self.intercept_included {
            return self.values.clone();
        }
        let (n, m) = self.values.shape();
        let mut d = Matrix::from_element(n, m + 1, 1.0);
        d.columns_mut(1, m).copy_from(&self.values);
        d
    }

    /// Appends one more covariate column.
    pub fn with_column(&self, column: &[f64], name: &str) -> Result<Self> {
        if column.len() != self.n_subjects() {
            return Err(Error::Dimension(format!(
                "column of length {} for {} subjects",
                column.len(),
                self.n_subjects()
            )));
        }
        let m = self.n_covariates();
        let mut values = self.values.clone().insert_column(m, 0.0);
        values.column_mut(m).iter_mut().zip(column).for_each(|(d, &s)| *d = s);
        let mut names = self.names.clone();
        names.push(name.into());
        Ok(Self { values, names, intercept_included: self.intercept_included })
    }

    pub fn select_subjects(&self, idx: &[usize]) -> Self {
        Self {
            values: self.values.select_rows(idx),
            names: self.names.clone(),
            intercept_included: self.intercept_included,
        }
    }
}
