//! On-disk layout of a decomposition: `meta.json`, `part<i>.mtx` (the arrow
//! matrix in permuted coordinates) and `perm<i>.txt` (its arrangement).

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ArrowDecomposition, ArrowMatrix, DecompositionPart};
use crate::error::{Error, Result};
use crate::mtx::{read_matrix_market, read_permutation, write_matrix_market, write_permutation, ReadOptions};

pub const META_SCHEMA: &str = "arrowmat.decomposition/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartMeta {
    pub index: usize,
    pub nnz: usize,
    pub nnz_rows: usize,
    pub row_extent: usize,
    pub lambda: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionMeta {
    pub schema: String,
    pub n: usize,
    pub b: usize,
    pub order: usize,
    pub strategy: String,
    pub seed: Option<u64>,
    pub parts: Vec<PartMeta>,
}

impl DecompositionMeta {
    pub fn of(d: &ArrowDecomposition) -> Self {
        Self {
            schema: META_SCHEMA.to_string(),
            n: d.n,
            b: d.b,
            order: d.order(),
            strategy: d.strategy.clone(),
            seed: d.seed,
            parts: d
                .parts
                .iter()
                .enumerate()
                .map(|(index, p)| PartMeta {
                    index,
                    nnz: p.arrow.nnz(),
                    nnz_rows: p.arrow.nnz_rows(),
                    row_extent: p.arrow.row_extent(),
                    lambda: p.lambda,
                })
                .collect(),
        }
    }
}

/// Writes the decomposition into `dir`, creating it if needed.
pub fn save_decomposition(d: &ArrowDecomposition, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for (i, part) in d.parts.iter().enumerate() {
        write_matrix_market(dir.join(format!("part{i}.mtx")), part.arrow.matrix())?;
        write_permutation(dir.join(format!("perm{i}.txt")), &part.arrangement)?;
    }
    let meta = serde_json::to_string_pretty(&DecompositionMeta::of(d))?;
    let path = dir.join("meta.json");
    fs::write(&path, meta + "\n").map_err(|e| Error::io(path, e))
}

pub fn load_decomposition(dir: impl AsRef<Path>) -> Result<ArrowDecomposition> {
    let dir = dir.as_ref();
    let path = dir.join("meta.json");
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let meta: DecompositionMeta = serde_json::from_str(&text)?;
    if meta.schema != META_SCHEMA {
        return Err(Error::Parse { path, line: 0, msg: format!("unknown schema {}", meta.schema) });
    }
    if meta.parts.len() != meta.order {
        return Err(Error::Parse { path, line: 0, msg: "order disagrees with part list".into() });
    }
    let mut parts = Vec::with_capacity(meta.order);
    for pm in &meta.parts {
        let i = pm.index;
        let matrix = read_matrix_market(dir.join(format!("part{i}.mtx")), ReadOptions::default())?;
        let arrangement = read_permutation(dir.join(format!("perm{i}.txt")))?;
        let arrow = ArrowMatrix::new(matrix, meta.b).with_row_extent(pm.row_extent)?;
        if arrow.nnz() != pm.nnz {
            return Err(Error::Parse {
                path: dir.join(format!("part{i}.mtx")),
                line: 0,
                msg: format!("expected {} entries, found {}", pm.nnz, arrow.nnz()),
            });
        }
        parts.push(DecompositionPart { arrangement, arrow, lambda: pm.lambda });
    }
    ArrowDecomposition::from_parts(meta.n, meta.b, meta.strategy, meta.seed, parts)
}
