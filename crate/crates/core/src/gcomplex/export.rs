use serde::{Deserialize, Serialize};

use super::{GComplex, MeshLabel};

pub const MESH_SCHEMA_VERSION: u32 = 1;

/// Serializable snapshot of a complex.
///
/// `simplices[q]` lists sorted vertex tuples; `orientation[i]` is the sign that
/// makes top simplex `i` positively oriented; `action[g][v]` is the image of
/// vertex `v` under element `g`, whose label is `group_labels[g]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshExport {
    pub schema_version: u32,
    pub mesh: MeshLabel,
    pub vertices: Vec<Vec<f64>>,
    pub simplices: Vec<Vec<Vec<usize>>>,
    pub orientation: Vec<i8>,
    pub group_labels: Vec<String>,
    pub phi: Vec<i8>,
    pub action: Vec<Vec<usize>>,
}

impl GComplex {
    pub fn export(&self) -> MeshExport {
        let g = self.group();
        MeshExport {
            schema_version: MESH_SCHEMA_VERSION,
            mesh: self.label().clone(),
            vertices: self.all_coords().to_vec(),
            simplices: (0..=self.dim())
                .map(|q| self.simplices(q).to_vec())
                .collect(),
            orientation: (0..self.count(self.dim()))
                .map(|i| self.top_orientation(i))
                .collect(),
            group_labels: g.labels().to_vec(),
            phi: (0..g.order()).map(|k| g.phi(k)).collect(),
            action: (0..g.order())
                .map(|k| self.permutation(k).to_vec())
                .collect(),
        }
    }
}
