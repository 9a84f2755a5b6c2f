use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{AppError, AppResult};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Region {
    pub id: String,
    /// Column indices into the genotype matrix, in matrix order.
    pub variants: Vec<usize>,
}

/// Groups variants by a two-column `variant region` file. Without a file every
/// variant belongs to the single region `all`. Regions come back sorted by id;
/// listed variants absent from the genotypes are ignored.
pub fn read_regions(path: Option<&Path>, variant_ids: &[String]) -> AppResult<Vec<Region>> {
    let Some(path) = path else {
        return Ok(vec![Region { id: "all".into(), variants: (0..variant_ids.len()).collect() }]);
    };
    let index: std::collections::HashMap<&str, usize> =
        variant_ids.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
    let file = File::open(path).map_err(|e| AppError::io(path, e))?;
    let mut groups: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| AppError::io(path, e))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(AppError::format(path, idx + 1, "expected `variant_id region_id`"));
        }
        if let Some(&j) = index.get(fields[0]) {
            groups.entry(fields[1].to_owned()).or_default().push(j);
        }
    }
    if groups.is_empty() {
        return Err(AppError::format(path, 1, "no listed variant matches the genotype file"));
    }
    Ok(groups
        .into_iter()
        .map(|(id, mut variants)| {
            variants.sort_unstable();
            variants.dedup();
            Region { id, variants }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn groups_sorted() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.txt");
        std::fs::write(&path, "# map\nrs3 GENE_B\nrs1 GENE_A\nrs2 GENE_B\nrs9 GENE_C\n").unwrap();
        let ids: Vec<String> = ["rs1", "rs2", "rs3"].iter().map(|s| s.to_string()).collect();
        let r = read_regions(Some(&path), &ids).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r[0], Region { id: "GENE_A".into(), variants: vec![0] });
        assert_eq!(r[1], Region { id: "GENE_B".into(), variants: vec![1, 2] });
        assert_eq!(read_regions(None, &ids).unwrap()[0].variants, vec![0, 1, 2]);
    }
}
