use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::family::MPSFamily;
use super::tensor::{injectivity_check, right_canonicalize};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::gcomplex::{GComplex, MeshLabel};
use crate::numerics::{c64, CMat};

pub const FAMILY_SCHEMA_VERSION: u32 = 1;

/// One vertex tensor: `tensors[i][a][b] = [re, im]` of `(Aⁱ)_{ab}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorRecord {
    pub n: usize,
    #[serde(rename = "D")]
    pub d: usize,
    pub tensors: Vec<Vec<Vec<[f64; 2]>>>,
    #[serde(rename = "Lambda")]
    pub lambda: Vec<f64>,
}

/// On-disk MPS family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyFile {
    pub schema_version: u32,
    pub mesh: MeshLabel,
    pub vertices: Vec<TensorRecord>,
}

impl FamilyFile {
    pub fn from_family(fam: &MPSFamily) -> Self {
        let vertices = fam
            .tensors()
            .iter()
            .map(|t| TensorRecord {
                n: t.phys_dim(),
                d: t.bond_dim(),
                tensors: t
                    .matrices()
                    .iter()
                    .map(|m| {
                        (0..m.nrows())
                            .map(|r| {
                                (0..m.ncols())
                                    .map(|c| [m[(r, c)].re, m[(r, c)].im])
                                    .collect()
                            })
                            .collect()
                    })
                    .collect(),
                lambda: t.lambda().to_vec(),
            })
            .collect();
        FamilyFile {
            schema_version: FAMILY_SCHEMA_VERSION,
            mesh: fam.complex().label().clone(),
            vertices,
        }
    }

    /// Re-canonicalizes and validates every tensor, then builds the family on `complex`.
    pub fn into_family(self, complex: Arc<GComplex>, tol: Tolerances) -> Result<MPSFamily> {
        if self.schema_version != FAMILY_SCHEMA_VERSION {
            return Err(Error::Schema(format!(
                "unsupported schema_version {}",
                self.schema_version
            )));
        }
        if &self.mesh != complex.label() || self.vertices.len() != complex.n_vertices() {
            return Err(Error::MeshMismatch(format!(
                "file declares {:?} with {} vertices, mesh is {:?} with {}",
                self.mesh,
                self.vertices.len(),
                complex.label(),
                complex.n_vertices()
            )));
        }
        let mut tensors = Vec::with_capacity(self.vertices.len());
        for (v, rec) in self.vertices.into_iter().enumerate() {
            let wrap = |e: Error| Error::CanonicalizationFailed {
                vertex: v,
                source: Box::new(e),
            };
            if rec.tensors.len() != rec.n
                || rec.lambda.len() != rec.d
                || rec
                    .tensors
                    .iter()
                    .any(|m| m.len() != rec.d || m.iter().any(|row| row.len() != rec.d))
            {
                return Err(Error::Schema(format!(
                    "vertex {v}: tensor shape does not match n = {}, D = {}",
                    rec.n, rec.d
                )));
            }
            let raw: Vec<CMat> = rec
                .tensors
                .iter()
                .map(|m| CMat::from_fn(rec.d, rec.d, |r, c| c64(m[r][c][0], m[r][c][1])))
                .collect();
            let t = right_canonicalize(&raw, &tol).map_err(wrap)?;
            injectivity_check(&t, &tol).map_err(wrap)?;
            tensors.push(t);
        }
        MPSFamily::build(complex, tensors, tol)
    }
}

pub fn write_family(fam: &MPSFamily, path: &Path) -> Result<()> {
    let f = std::io::BufWriter::new(std::fs::File::create(path)?);
    serde_json::to_writer(f, &FamilyFile::from_family(fam))?;
    Ok(())
}

pub fn read_family(path: &Path, complex: Arc<GComplex>, tol: Tolerances) -> Result<MPSFamily> {
    let text = std::fs::read_to_string(path)?;
    let file: FamilyFile = serde_json::from_str(&text).map_err(|e| Error::Schema(e.to_string()))?;
    file.into_family(complex, tol)
}
