//! p-norm distance-based genetic similarity (NDS) and its double-centered form.
//!
//! For weights ω and order p,
//!
//! ```text
//! s_ij = B - (Σ_k ω_k |g_ik - g_jk|^p)^(1/p),   B = 2 (Σ_k ω_k)^(1/p)
//! ```
//!
//! with the diagonal set to zero. B is the largest possible distance between
//! two dosage vectors, so uncentered similarities lie in `[0, B]`.

use alloc::format;
use alloc::vec::Vec;

use libm::{pow, sqrt};

use crate::data::GenotypeMatrix;
use crate::{Error, Matrix, Result};

/// Order of the norm: D1S (IBS) through D4S.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NormOrder(u8);

impl NormOrder {
    pub const D1: NormOrder = NormOrder(1);
    pub const D2: NormOrder = NormOrder(2);
    pub const D3: NormOrder = NormOrder(3);
    pub const D4: NormOrder = NormOrder(4);
    pub const ALL: [NormOrder; 4] = [Self::D1, Self::D2, Self::D3, Self::D4];

    pub fn new(p: u8) -> Result<Self> {
        if (1..=4).contains(&p) {
            Ok(Self(p))
        } else {
            Err(Error::InvalidInput(format!("norm order {p} not in 1..=4")))
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }

    fn pow(self, d: f64) -> f64 {
        match self.0 {
            1 => d,
            2 => d * d,
            3 => d * d * d,
            _ => {
                let d2 = d * d;
                d2 * d2
            }
        }
    }

    fn root(self, x: f64) -> f64 {
        match self.0 {
            1 => x,
            2 => sqrt(x),
            p => pow(x, 1.0 / f64::from(p)),
        }
    }
}

impl core::fmt::Display for NormOrder {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "d{}s", self.0)
    }
}

impl core::str::FromStr for NormOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.to_ascii_lowercase();
        let digits = t.strip_prefix('d').map(|r| r.trim_end_matches('s')).unwrap_or(&t);
        match (t.as_str(), digits.parse::<u8>()) {
            ("ibs", _) => Ok(Self::D1),
            (_, Ok(p)) => Self::new(p),
            _ => Err(Error::InvalidInput(format!("unknown similarity `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SimilaritySpec {
    pub order: NormOrder,
    pub centered: bool,
}

impl SimilaritySpec {
    pub fn new(order: NormOrder) -> Self {
        Self { order, centered: false }
    }

    pub fn centered(order: NormOrder) -> Self {
        Self { order, centered: true }
    }

    /// `d1s`, `d2s`, ... with a `c` prefix when centered.
    pub fn label(&self) -> alloc::string::String {
        if self.centered {
            format!("c{}", self.order)
        } else {
            format!("{}", self.order)
        }
    }
}

impl Default for SimilaritySpec {
    fn default() -> Self {
        Self::new(NormOrder::D1)
    }
}

/// Symmetric N×N similarity with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    values: Matrix,
    spec: SimilaritySpec,
    supremum: f64,
}

impl SimilarityMatrix {
    pub fn values(&self) -> &Matrix {
        &self.values
    }

    pub fn spec(&self) -> SimilaritySpec {
        self.spec
    }

    /// B, the supremum of the uncentered similarity.
    pub fn supremum(&self) -> f64 {
        self.supremum
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    /// Multiplies every entry by `c` (B scales with it).
    pub fn scaled(&self, c: f64) -> Self {
        Self { values: &self.values * c, spec: self.spec, supremum: self.supremum * c }
    }

    /// Wraps an arbitrary symmetric zero-diagonal matrix.
    pub fn from_matrix(values: Matrix, spec: SimilaritySpec, supremum: f64) -> Result<Self> {
        let n = values.nrows();
        if values.ncols() != n {
            return Err(Error::Dimension(format!("{}x{} similarity", n, values.ncols())));
        }
        for i in 0..n {
            if values[(i, i)] != 0.0 {
                return Err(Error::InvalidInput("similarity diagonal must be zero".into()));
            }
            for j in 0..i {
                if values[(i, j)] != values[(j, i)] {
                    return Err(Error::InvalidInput("similarity must be symmetric".into()));
                }
            }
        }
        Ok(Self { values, spec, supremum })
    }
}

/// Row-major copy of the dosages, so each subject's genotype is contiguous.
fn rows_of(g: &GenotypeMatrix) -> Result<Vec<f64>> {
    let (n, k) = g.dosages().shape();
    let mut rows = Vec::with_capacity(n * k);
    for i in 0..n {
        for j in 0..k {
            let v = g.dosages()[(i, j)];
            if v.is_nan() {
                return Err(Error::InvalidInput("genotypes must be imputed before building similarity".into()));
            }
            rows.push(v);
        }
    }
    Ok(rows)
}

pub(crate) fn check_weights(g: &GenotypeMatrix, weights: &[f64]) -> Result<f64> {
    if weights.len() != g.n_variants() {
        return Err(Error::Dimension(format!(
            "{} weights for {} variants",
            weights.len(),
            g.n_variants()
        )));
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::InvalidInput("weights must be finite and non-negative".into()));
    }
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(Error::DegenerateWeights);
    }
    Ok(total)
}

/// Uncentered NDS of order `order`.
pub fn nds_similarity(g: &GenotypeMatrix, weights: &[f64], order: NormOrder) -> Result<SimilarityMatrix> {
    let total = check_weights(g, weights)?;
    let (n, k) = g.dosages().shape();
    let rows = rows_of(g)?;
    let supremum = 2.0 * order.root(total);

    // Variants with zero weight never contribute.
    let active: Vec<usize> = (0..k).filter(|&j| weights[j] > 0.0).collect();
    let mut values = Matrix::zeros(n, n);
    for i in 0..n {
        let gi = &rows[i * k..(i + 1) * k];
        for j in 0..i {
            let gj = &rows[j * k..(j + 1) * k];
            let dist: f64 = active.iter().map(|&c| weights[c] * order.pow((gi[c] - gj[c]).abs())).sum();
            let s = supremum - order.root(dist);
            values[(i, j)] = s;
            values[(j, i)] = s;
        }
    }
    Ok(SimilarityMatrix { values, spec: SimilaritySpec::new(order), supremum })
}

/// `(I - J) S (I - J)` with `J = 11'/N`, before the diagonal is zeroed.
pub fn double_center(s: &Matrix) -> Matrix {
    let n = s.nrows();
    let nf = n as f64;
    let row_means: Vec<f64> = (0..n).map(|i| s.row(i).sum() / nf).collect();
    let col_means: Vec<f64> = (0..n).map(|j| s.column(j).sum() / nf).collect();
    let grand = row_means.iter().sum::<f64>() / nf;
    Matrix::from_fn(n, n, |i, j| s[(i, j)] - row_means[i] - col_means[j] + grand)
}

/// Double-centers an NDS matrix and zeroes the diagonal of the result.
pub fn center_similarity(s: &SimilarityMatrix) -> Result<SimilarityMatrix> {
    if s.spec.centered {
        return Err(Error::InvalidInput("similarity is already centered".into()));
    }
    let mut values = double_center(&s.values);
    let n = values.nrows();
    // Symmetrize exactly; the centering arithmetic is symmetric only up to rounding.
    for i in 0..n {
        values[(i, i)] = 0.0;
        for j in 0..i {
            let v = 0.5 * (values[(i, j)] + values[(j, i)]);
            values[(i, j)] = v;
            values[(j, i)] = v;
        }
    }
    Ok(SimilarityMatrix {
        values,
        spec: SimilaritySpec { order: s.spec.order, centered: true },
        supremum: s.supremum,
    })
}

/// NDS with the centering requested by `spec`.
pub fn build_similarity(g: &GenotypeMatrix, weights: &[f64], spec: SimilaritySpec) -> Result<SimilarityMatrix> {
    let s = nds_similarity(g, weights, spec.order)?;
    if spec.centered {
        center_similarity(&s)
    } else {
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn gm(rows: usize, cols: usize, data: &[f64]) -> GenotypeMatrix {
        GenotypeMatrix::from_dosages(Matrix::from_row_slice(rows, cols, data)).unwrap()
    }

    #[test]
    fn hand_cases() {
        let g = gm(2, 2, &[2.0, 0.0, 0.0, 2.0]);
        let s = nds_similarity(&g, &[1.0, 1.0], NormOrder::D1).unwrap();
        assert_eq!(s.values()[(0, 1)], 0.0);
        assert_eq!(s.supremum(), 4.0);

        let g = gm(2, 1, &[0.0, 1.0]);
        assert_eq!(nds_similarity(&g, &[1.0], NormOrder::D1).unwrap().values()[(0, 1)], 1.0);

        let g = gm(2, 2, &[2.0, 0.0, 0.0, 0.0]);
        let s = nds_similarity(&g, &[1.0, 1.0], NormOrder::D2).unwrap();
        assert_relative_eq!(s.values()[(1, 0)], 2.0 * 2f64.sqrt() - 2.0, epsilon = 1e-15);

        let g = gm(3, 2, &[1.0, 2.0, 1.0, 2.0, 0.0, 0.0]);
        for p in NormOrder::ALL {
            let s = nds_similarity(&g, &[0.3, 2.0], p).unwrap();
            assert_relative_eq!(s.values()[(0, 1)], s.supremum(), max_relative = 1e-14);
            assert_eq!(s.values()[(0, 0)], 0.0);
        }
    }

    #[test]
    fn degenerate_weights() {
        let g = gm(2, 1, &[0.0, 1.0]);
        assert_eq!(nds_similarity(&g, &[0.0], NormOrder::D1), Err(Error::DegenerateWeights));
        assert!(nds_similarity(&g, &[1.0, 1.0], NormOrder::D1).is_err());
    }

    #[test]
    fn centering_two_by_two() {
        let a = 1.7;
        let s = SimilarityMatrix::from_matrix(
            Matrix::from_row_slice(2, 2, &[0.0, a, a, 0.0]),
            SimilaritySpec::default(),
            2.0,
        )
        .unwrap();
        let pre = double_center(s.values());
        assert_relative_eq!(pre, Matrix::from_row_slice(2, 2, &[-a / 2.0, a / 2.0, a / 2.0, -a / 2.0]), epsilon = 1e-15);
        let c = center_similarity(&s).unwrap();
        assert_relative_eq!(c.values().clone(), Matrix::from_row_slice(2, 2, &[0.0, a / 2.0, a / 2.0, 0.0]), epsilon = 1e-15);
        assert!(c.spec().centered);
        assert!(center_similarity(&c).is_err());
    }

    #[test]
    fn centering_matches_brute_force_product() {
        let n = 3;
        let s = Matrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { 2.5 });
        let proj = Matrix::identity(n, n) - Matrix::from_element(n, n, 1.0 / n as f64);
        let brute = &proj * &s * &proj;
        assert_relative_eq!(double_center(&s), brute, epsilon = 1e-14);
        // row, column and grand means coincide here
        let mean = 2.0 * 2.5 / 3.0;
        assert_relative_eq!(brute[(0, 1)], 2.5 - mean, epsilon = 1e-14);
    }

    #[test]
    fn parses_labels() {
        assert_eq!("D2S".parse::<NormOrder>().unwrap(), NormOrder::D2);
        assert_eq!("ibs".parse::<NormOrder>().unwrap(), NormOrder::D1);
        assert_eq!("4".parse::<NormOrder>().unwrap(), NormOrder::D4);
        assert!("d5s".parse::<NormOrder>().is_err());
        assert_eq!(SimilaritySpec::centered(NormOrder::D1).label(), "cd1s");
    }

    fn genotypes() -> impl Strategy<Value = (usize, usize, Vec<f64>, Vec<f64>)> {
        (2usize..9, 1usize..7).prop_flat_map(|(n, k)| {
            (
                Just(n),
                Just(k),
                proptest::collection::vec((0u8..=2).prop_map(f64::from), n * k),
                proptest::collection::vec(0.0f64..5.0, k),
            )
        })
    }

    proptest! {
        #[test]
        fn structural_properties((n, k, data, mut w) in genotypes(), p in 1u8..=4, flip in 0usize..7) {
            w[0] += 0.5;
            let order = NormOrder::new(p).unwrap();
            let g = gm(n, k, &data);
            let s = nds_similarity(&g, &w, order).unwrap();
            let v = s.values();
            for i in 0..n {
                prop_assert_eq!(v[(i, i)], 0.0);
                for j in 0..n {
                    prop_assert_eq!(v[(i, j)], v[(j, i)]);
                    if i != j {
                        prop_assert!(v[(i, j)] >= -1e-12 && v[(i, j)] <= s.supremum() + 1e-12);
                    }
                }
            }

            // coding flip of one column
            let col = flip % k;
            let mut flipped = data.clone();
            for i in 0..n { flipped[i * k + col] = 2.0 - flipped[i * k + col]; }
            let sf = nds_similarity(&gm(n, k, &flipped), &w, order).unwrap();
            prop_assert!((sf.values() - v).amax() < 1e-12);

            // zero-weight extra variant
            let mut extended = Vec::with_capacity(n * (k + 1));
            for i in 0..n { extended.extend_from_slice(&data[i * k..(i + 1) * k]); extended.push((i % 3) as f64); }
            let mut w2 = w.clone();
            w2.push(0.0);
            let se = nds_similarity(&gm(n, k + 1, &extended), &w2, order).unwrap();
            prop_assert!((se.values() - v).amax() < 1e-12);

            // subject permutation (reverse order)
            let perm: Vec<usize> = (0..n).rev().collect();
            let sp = nds_similarity(&g.select_subjects(&perm).unwrap(), &w, order).unwrap();
            for i in 0..n { for j in 0..n {
                prop_assert!((sp.values()[(i, j)] - v[(perm[i], perm[j])]).abs() < 1e-12);
            }}

            // centering annihilates row sums before the diagonal is zeroed
            let pre = double_center(v);
            for i in 0..n { prop_assert!(pre.row(i).sum().abs() < 1e-10); }
        }

        #[test]
        fn d1s_is_weighted_ibs((n, k, data, mut w) in genotypes()) {
            w[0] += 0.5;
            let s = nds_similarity(&gm(n, k, &data), &w, NormOrder::D1).unwrap();
            for i in 0..n { for j in 0..n { if i != j {
                let ibs: f64 = (0..k).map(|c| w[c] * (2.0 - (data[i * k + c] - data[j * k + c]).abs())).sum();
                prop_assert!((s.values()[(i, j)] - ibs).abs() < 1e-12);
            }}}
        }
    }

    #[test]
    fn from_matrix_validation() {
        let bad = Matrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        assert!(SimilarityMatrix::from_matrix(bad, SimilaritySpec::default(), 1.0).is_err());
        let asym = Matrix::from_row_slice(2, 2, &[0.0, 1.0, 2.0, 0.0]);
        assert!(SimilarityMatrix::from_matrix(asym, SimilaritySpec::default(), 1.0).is_err());
    }
}
