//! G-simplicial complexes, chains, group-simplicial cochains and the
//! differentials of the double complex.
//!
//! Simplices are stored as sorted vertex tuples. An oriented simplex given as an
//! arbitrary ordered tuple is converted to its sorted form plus the sign of the
//! sorting permutation, so reversing orientation always negates a coefficient.

mod chain;
mod cochain;
mod domains;
mod export;
pub mod group;
mod mesh;

use std::collections::HashMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

pub use chain::Chain;
pub use cochain::{Cochain, Coeff, Quantized};
pub use domains::{Constraint, Domains, Side};
pub use export::MeshExport;
pub use group::{Generator, Group, GroupData};
pub use mesh::{
    build_polygon_in_plane, build_sphere_complex, build_torus_grid, mesh_symmetry_matrices,
};

use crate::error::{Error, Result};

/// Euclidean tolerance for matching vertices under isometries.
pub const VERTEX_MATCH_TOL: f64 = 1e-9;

/// How a complex was built; carried into exports and reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeshLabel {
    pub kind: String,
    pub dim: usize,
    pub refinements: Option<usize>,
}

/// Image and orientation sign of every simplex, indexed `[q][g][i]`.
type SimplexAction = Vec<Vec<Vec<(usize, i8)>>>;

/// An oriented simplicial complex with a simplicial group action.
#[derive(Debug, Clone)]
pub struct GComplex {
    dim: usize,
    label: MeshLabel,
    coords: Vec<Vec<f64>>,
    simplices: Vec<Vec<Vec<usize>>>,
    lookup: Vec<HashMap<Vec<usize>, usize>>,
    faces: Vec<Vec<Vec<usize>>>,
    orientation: Vec<i8>,
    group: Arc<Group>,
    perms: Vec<Vec<usize>>,
    simplex_action: SimplexAction,
}

/// Sorts `tuple` in place and returns the sign of the permutation used.
pub fn sort_with_sign(tuple: &mut [usize]) -> i8 {
    let mut sign = 1i8;
    for i in 1..tuple.len() {
        let mut j = i;
        while j > 0 && tuple[j - 1] > tuple[j] {
            tuple.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    sign
}

impl GComplex {
    /// Builds the complex spanned by the given top simplices, each with the sign
    /// that makes its sorted tuple positively oriented. The group is trivial.
    pub fn from_top_simplices(
        dim: usize,
        coords: Vec<Vec<f64>>,
        tops: Vec<(Vec<usize>, i8)>,
        label: MeshLabel,
    ) -> Result<Self> {
        let mut simplices: Vec<Vec<Vec<usize>>> = vec![Vec::new(); dim + 1];
        let mut lookup: Vec<HashMap<Vec<usize>, usize>> = vec![HashMap::new(); dim + 1];
        let mut orientation = Vec::with_capacity(tops.len());
        for (mut t, s) in tops {
            if t.len() != dim + 1 {
                return Err(Error::DimensionMismatch(format!(
                    "top simplex {t:?} in dimension {dim}"
                )));
            }
            let sign = sort_with_sign(&mut t);
            if t.windows(2).any(|w| w[0] == w[1]) || t.iter().any(|&v| v >= coords.len()) {
                return Err(Error::NotSimplicial(format!("bad top simplex {t:?}")));
            }
            if lookup[dim].contains_key(&t) {
                return Err(Error::NotSimplicial(format!("duplicate top simplex {t:?}")));
            }
            lookup[dim].insert(t.clone(), simplices[dim].len());
            simplices[dim].push(t);
            orientation.push(s * sign);
        }
        // faces are registered level by level in the order first encountered
        for q in (1..=dim).rev() {
            let upper = simplices[q].clone();
            for s in &upper {
                for j in 0..=q {
                    let mut f = s.clone();
                    f.remove(j);
                    if !lookup[q - 1].contains_key(&f) {
                        lookup[q - 1].insert(f.clone(), simplices[q - 1].len());
                        simplices[q - 1].push(f);
                    }
                }
            }
        }
        // vertices in index order
        let mut verts: Vec<Vec<usize>> = simplices[0].clone();
        verts.sort();
        if verts.len() != coords.len() {
            return Err(Error::NotSimplicial("isolated vertices".into()));
        }
        simplices[0] = verts;
        lookup[0] = simplices[0]
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i))
            .collect();
        let mut faces = vec![Vec::new(); dim + 1];
        for q in 1..=dim {
            faces[q] = simplices[q]
                .iter()
                .map(|s| {
                    (0..=q)
                        .map(|j| {
                            let mut f = s.clone();
                            f.remove(j);
                            lookup[q - 1][&f]
                        })
                        .collect()
                })
                .collect();
        }
        let n = coords.len();
        let mut cx = GComplex {
            dim,
            label,
            coords,
            simplices,
            lookup,
            faces,
            orientation,
            group: Arc::new(Group::trivial()),
            perms: vec![(0..n).collect()],
            simplex_action: Vec::new(),
        };
        cx.simplex_action = cx.compute_simplex_action()?;
        Ok(cx)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn label(&self) -> &MeshLabel {
        &self.label
    }
    pub fn n_vertices(&self) -> usize {
        self.coords.len()
    }
    pub fn count(&self, q: usize) -> usize {
        self.simplices.get(q).map_or(0, |s| s.len())
    }
    pub fn coords(&self, v: usize) -> &[f64] {
        &self.coords[v]
    }
    pub fn all_coords(&self) -> &[Vec<f64>] {
        &self.coords
    }
    pub fn ambient_dim(&self) -> usize {
        self.coords.first().map_or(0, |c| c.len())
    }
    /// Sorted vertex tuple of the `i`-th `q`-simplex.
    pub fn simplex(&self, q: usize, i: usize) -> &[usize] {
        &self.simplices[q][i]
    }
    pub fn simplices(&self, q: usize) -> &[Vec<usize>] {
        &self.simplices[q]
    }
    /// Index of the `j`-th face (vertex `j` deleted) of the `i`-th `q`-simplex.
    pub fn face(&self, q: usize, i: usize, j: usize) -> usize {
        self.faces[q][i][j]
    }
    pub fn top_orientation(&self, i: usize) -> i8 {
        self.orientation[i]
    }
    pub fn group(&self) -> &Arc<Group> {
        &self.group
    }
    /// Image of vertex `v` under group element `g`.
    pub fn act_vertex(&self, g: usize, v: usize) -> usize {
        self.perms[g][v]
    }
    pub fn permutation(&self, g: usize) -> &[usize] {
        &self.perms[g]
    }

    /// Index and orientation sign of an ordered tuple.
    pub fn find_simplex(&self, tuple: &[usize]) -> Option<(usize, i8)> {
        let q = tuple.len().checked_sub(1)?;
        let mut t = tuple.to_vec();
        let sign = sort_with_sign(&mut t);
        self.lookup.get(q)?.get(&t).map(|&i| (i, sign))
    }

    /// Image `gΔ` of the `i`-th `q`-simplex as (index, sign relative to sorted order).
    pub fn act_simplex(&self, g: usize, q: usize, i: usize) -> (usize, i8) {
        self.simplex_action[q][g][i]
    }

    fn compute_simplex_action(&self) -> Result<SimplexAction> {
        let mut out = Vec::with_capacity(self.dim + 1);
        for q in 0..=self.dim {
            let mut per_g = Vec::with_capacity(self.perms.len());
            for (g, perm) in self.perms.iter().enumerate() {
                let mut row = Vec::with_capacity(self.simplices[q].len());
                for (i, s) in self.simplices[q].iter().enumerate() {
                    let image: Vec<usize> = s.iter().map(|&v| perm[v]).collect();
                    let (j, sign) = self.find_simplex(&image).ok_or_else(|| {
                        Error::NotSimplicial(format!(
                            "element {g} maps simplex {s:?} outside the complex"
                        ))
                    })?;
                    if j == i && image.as_slice() != s.as_slice() {
                        return Err(Error::NotSimplicial(format!(
                            "element {g} maps simplex {s:?} to itself without fixing it pointwise"
                        )));
                    }
                    row.push((j, sign));
                }
                per_g.push(row);
            }
            out.push(per_g);
        }
        Ok(out)
    }

    /// Attaches an action given by vertex permutations, one per group element.
    pub fn with_action(mut self, group: Arc<Group>, perms: Vec<Vec<usize>>) -> Result<Self> {
        let n = self.n_vertices();
        if perms.len() != group.order() || perms.iter().any(|p| p.len() != n) {
            return Err(Error::DimensionMismatch(
                "one vertex permutation per group element".into(),
            ));
        }
        for p in &perms {
            let mut seen = vec![false; n];
            for &v in p {
                if v >= n || std::mem::replace(&mut seen[v], true) {
                    return Err(Error::NotSimplicial(
                        "vertex map is not a permutation".into(),
                    ));
                }
            }
        }
        for g in 0..group.order() {
            for h in 0..group.order() {
                let gh = group.mul(g, h);
                if (0..n).any(|v| perms[gh][v] != perms[g][perms[h][v]]) {
                    return Err(Error::NotSimplicial(format!(
                        "action is not compatible with the product {} * {}",
                        group.label(g),
                        group.label(h)
                    )));
                }
            }
        }
        self.group = group;
        self.perms = perms;
        self.simplex_action = self.compute_simplex_action()?;
        Ok(self)
    }

    /// Attaches an action in which element `g` moves coordinates by `isometries[g]`.
    pub fn attach_action(self, group: Arc<Group>, isometries: &[DMatrix<f64>]) -> Result<Self> {
        if isometries.len() != group.order() {
            return Err(Error::DimensionMismatch(
                "one isometry per group element".into(),
            ));
        }
        let perms = isometries
            .iter()
            .map(|m| self.vertex_permutation(m))
            .collect::<Result<Vec<_>>>()?;
        self.with_action(group, perms)
    }

    /// Attaches the parameter-space action stored in `data`.
    pub fn attach_group_data(self, data: &GroupData) -> Result<Self> {
        let params = data.params.as_ref().ok_or_else(|| {
            Error::PreconditionViolated("group data carries no parameter action".into())
        })?;
        self.attach_action(data.group.clone(), params)
    }

    /// Permutation induced by a linear isometry, matched within [`VERTEX_MATCH_TOL`].
    pub fn vertex_permutation(&self, m: &DMatrix<f64>) -> Result<Vec<usize>> {
        let d = self.ambient_dim();
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} isometry on {d}-dim coordinates",
                m.nrows(),
                m.ncols()
            )));
        }
        let key = |x: &[f64]| -> Vec<i64> { x.iter().map(|c| (c * 1e6).round() as i64).collect() };
        let table: HashMap<Vec<i64>, usize> = self
            .coords
            .iter()
            .enumerate()
            .map(|(i, c)| (key(c), i))
            .collect();
        let mut perm = Vec::with_capacity(self.n_vertices());
        for c in &self.coords {
            let image: Vec<f64> = (0..d)
                .map(|r| (0..d).map(|k| m[(r, k)] * c[k]).sum())
                .collect();
            let close = |j: usize| {
                self.coords[j]
                    .iter()
                    .zip(&image)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt()
                    < VERTEX_MATCH_TOL
            };
            let hit = table
                .get(&key(&image))
                .copied()
                .filter(|&j| close(j))
                .or_else(|| (0..self.n_vertices()).find(|&j| close(j)));
            perm.push(hit.ok_or_else(|| {
                Error::NotSimplicial(format!("isometry moves vertex {c:?} off the vertex set"))
            })?);
        }
        Ok(perm)
    }

    /// The top-dimensional chain of all top simplices with the global orientation.
    pub fn fundamental_class(&self) -> Chain {
        Chain::from_terms(
            self.dim,
            (0..self.count(self.dim)).map(|i| (i, self.orientation[i] as i64)),
        )
    }

    /// Chain consisting of one oriented simplex given as an ordered tuple.
    pub fn simplex_chain(&self, tuple: &[usize]) -> Result<Chain> {
        let (i, s) = self
            .find_simplex(tuple)
            .ok_or_else(|| Error::NotSimplicial(format!("{tuple:?} is not a simplex")))?;
        Ok(Chain::from_terms(tuple.len() - 1, [(i, s as i64)]))
    }

    /// Simplicial boundary.
    pub fn boundary(&self, c: &Chain) -> Result<Chain> {
        let q = c.dim();
        if q == 0 || q > self.dim {
            return Err(Error::DimensionMismatch(format!("boundary of a {q}-chain")));
        }
        let mut out = Chain::zero(q - 1);
        for (i, k) in c.iter() {
            for j in 0..=q {
                let sign = if j % 2 == 0 { 1 } else { -1 };
                out.add_term(self.faces[q][i][j], sign * k);
            }
        }
        Ok(out)
    }

    /// Image `g·c` of a chain.
    pub fn act_chain(&self, g: usize, c: &Chain) -> Chain {
        let q = c.dim();
        let mut out = Chain::zero(q);
        for (i, k) in c.iter() {
            let (j, s) = self.simplex_action[q][g][i];
            out.add_term(j, s as i64 * k);
        }
        out
    }

    /// Barycenter of a simplex.
    pub fn barycenter(&self, q: usize, i: usize) -> Vec<f64> {
        let s = &self.simplices[q][i];
        let d = self.ambient_dim();
        (0..d)
            .map(|k| s.iter().map(|&v| self.coords[v][k]).sum::<f64>() / s.len() as f64)
            .collect()
    }

    /// Check that every vertex of the chain is fixed by `g`.
    pub fn fixes_pointwise(&self, g: usize, c: &Chain) -> bool {
        c.iter().all(|(i, _)| {
            self.simplices[c.dim()][i]
                .iter()
                .all(|&v| self.perms[g][v] == v)
        })
    }
}
