use std::sync::Arc;

use rayon::prelude::*;

use super::overlap::{edge_overlap, EdgeOverlap};
use super::tensor::{apply_gauge, MPSTensor};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::gcomplex::{Chain, Cochain, Coeff, GComplex, GroupData, Quantized};
use crate::numerics::{c64, CMat, C64};

/// MPS at every vertex of a complex, with the overlap data of every edge and
/// the higher Berry connection of every triangle.
///
/// Edge and triangle data are stored for the sorted orientation; reversed edges
/// use `(μ*, X†)`.
#[derive(Debug, Clone)]
pub struct MPSFamily {
    complex: Arc<GComplex>,
    tensors: Vec<MPSTensor>,
    edges: Vec<EdgeOverlap>,
    a02: Vec<f64>,
    tol: Tolerances,
}

fn wilson_trace(l: [&CMat; 3], x: [&CMat; 3]) -> C64 {
    (l[0] * x[0] * l[1] * x[1] * l[2] * x[2]).trace()
}

impl MPSFamily {
    /// Computes all edge overlaps and triangle connections.
    pub fn build(complex: Arc<GComplex>, tensors: Vec<MPSTensor>, tol: Tolerances) -> Result<Self> {
        if tensors.len() != complex.n_vertices() {
            return Err(Error::MeshMismatch(format!(
                "{} tensors for {} vertices",
                tensors.len(),
                complex.n_vertices()
            )));
        }
        for (v, t) in tensors.iter().enumerate() {
            let r = t.canonical_residuals().max();
            if r > tol.canon_tol {
                return Err(Error::CanonicalizationFailed {
                    vertex: v,
                    source: Box::new(Error::NotCanonical(r)),
                });
            }
        }
        let edges = Self::compute_edges(&complex, &tensors, &tol)?;
        let mut fam = MPSFamily {
            complex,
            tensors,
            edges,
            a02: Vec::new(),
            tol,
        };
        fam.a02 = fam.compute_a02()?;
        Ok(fam)
    }

    /// Builds the family from a tensor-valued function of vertex coordinates.
    pub fn from_fn(
        complex: Arc<GComplex>,
        tol: Tolerances,
        f: impl Fn(&[f64]) -> Result<MPSTensor> + Sync,
    ) -> Result<Self> {
        let tensors = (0..complex.n_vertices())
            .into_par_iter()
            .map(|v| {
                f(complex.coords(v)).map_err(|e| Error::CanonicalizationFailed {
                    vertex: v,
                    source: Box::new(e),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        MPSFamily::build(complex, tensors, tol)
    }

    fn compute_edges(
        cx: &GComplex,
        tensors: &[MPSTensor],
        tol: &Tolerances,
    ) -> Result<Vec<EdgeOverlap>> {
        (0..cx.count(1))
            .into_par_iter()
            .map(|e| {
                let s = cx.simplex(1, e);
                edge_overlap(&tensors[s[0]], &tensors[s[1]], tol.gap_tol).map_err(|err| match err {
                    Error::NotClose { detail, .. } => Error::NotClose {
                        edge: s.to_vec(),
                        detail,
                    },
                    err => err,
                })
            })
            .collect()
    }

    fn compute_a02(&self) -> Result<Vec<f64>> {
        if self.complex.dim() < 2 {
            return Ok(Vec::new());
        }
        (0..self.complex.count(2))
            .into_par_iter()
            .map(|i| {
                let s = self.complex.simplex(2, i);
                self.higher_connection(&[s[0], s[1], s[2]])
            })
            .collect()
    }

    pub fn complex(&self) -> &Arc<GComplex> {
        &self.complex
    }
    pub fn tensors(&self) -> &[MPSTensor] {
        &self.tensors
    }
    pub fn tensor(&self, v: usize) -> &MPSTensor {
        &self.tensors[v]
    }
    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    /// Same tensors and overlaps on a complex with identical simplices, e.g.
    /// after attaching a group action.
    pub fn on_complex(&self, complex: Arc<GComplex>) -> Result<Self> {
        if complex.simplices(1) != self.complex.simplices(1)
            || (complex.dim() >= 2 && complex.simplices(2) != self.complex.simplices(2))
        {
            return Err(Error::MeshMismatch(
                "complexes have different simplices".into(),
            ));
        }
        Ok(MPSFamily {
            complex,
            ..self.clone()
        })
    }

    /// Overlap data of the ordered edge `(a, b)`.
    pub fn overlap(&self, a: usize, b: usize) -> Result<EdgeOverlap> {
        let (e, sign) = self
            .complex
            .find_simplex(&[a, b])
            .ok_or_else(|| Error::NotSimplicial(format!("({a}, {b}) is not an edge")))?;
        Ok(if sign > 0 {
            self.edges[e].clone()
        } else {
            self.edges[e].reversed()
        })
    }

    /// Sorted-orientation edge data, indexed like the 1-simplices.
    pub fn edges(&self) -> &[EdgeOverlap] {
        &self.edges
    }

    /// `arg Tr[Λ₀^{2/3} X₀₁ Λ₁^{2/3} X₁₂ Λ₂^{2/3} X₂₀]` for an ordered triangle.
    pub fn higher_connection(&self, tri: &[usize; 3]) -> Result<f64> {
        let x01 = self.overlap(tri[0], tri[1])?.x;
        let x12 = self.overlap(tri[1], tri[2])?.x;
        let x20 = self.overlap(tri[2], tri[0])?.x;
        let l = tri.map(|v| self.tensors[v].lambda_pow(2.0 / 3.0));
        let w = wilson_trace([&l[0], &l[1], &l[2]], [&x01, &x12, &x20]);
        if w.norm() < self.tol.wilson_tol {
            return Err(Error::VanishingWilsonLoop {
                triangle: tri.to_vec(),
                modulus: w.norm(),
            });
        }
        Ok(w.arg())
    }

    /// The Berry connection `arg μ` as a (0,1)-cochain.
    pub fn a01(&self) -> Cochain {
        Cochain::from_fn(&self.complex, 0, 1, Coeff::Angle, true, |_, i| {
            self.edges[i].a01
        })
    }

    /// The higher Berry connection as a (0,2)-cochain.
    pub fn a02(&self) -> Cochain {
        Cochain::from_fn(&self.complex, 0, 2, Coeff::Angle, true, |_, i| self.a02[i])
    }

    /// Berry phase `γ⁽¹⁾` of a loop.
    pub fn gamma1(&self, lp: &Chain) -> Result<f64> {
        if !self.complex.boundary(lp)?.is_zero() {
            return Err(Error::NotACycle);
        }
        self.complex.pair(&self.a01(), &[], lp)
    }

    /// Higher Berry phase `γ⁽²⁾` of a closed surface.
    pub fn gamma2(&self, surface: &Chain) -> Result<f64> {
        if !self.complex.boundary(surface)?.is_zero() {
            return Err(Error::NotACycle);
        }
        self.complex.pair(&self.a02(), &[], surface)
    }

    /// Chern number of a closed surface from `F⁽²⁾ = lift(dA⁽⁰¹⁾)`.
    pub fn chern_from_a01(&self, surface: &Chain) -> Result<Quantized> {
        self.complex
            .flux_integral(&self.a01(), surface, self.tol.flux_guard)
    }

    /// DDKS number of a closed 3-chain from `F⁽³⁾ = lift(dA⁽⁰²⁾)`.
    pub fn ddks(&self, volume: &Chain) -> Result<Quantized> {
        self.complex
            .flux_integral(&self.a02(), volume, self.tol.flux_guard)
    }

    /// Applies a vertex gauge `(χ⁽⁰⁰⁾, W)` to every tensor and recomputes.
    pub fn with_vertex_gauge(&self, chi: &[f64], w: &[CMat]) -> Result<Self> {
        let tensors = self
            .tensors
            .iter()
            .enumerate()
            .map(|(v, t)| apply_gauge(t, chi[v], &w[v]))
            .collect::<Result<Vec<_>>>()?;
        MPSFamily::build(self.complex.clone(), tensors, self.tol)
    }

    /// Edge gauge `X ↦ e^{iχ}X`, with `chi` given on sorted edges.
    pub fn with_edge_gauge(&self, chi: &[f64]) -> Result<Self> {
        let mut out = self.clone();
        for (e, &c) in out.edges.iter_mut().zip(chi) {
            e.x *= C64::from_polar(1.0, c);
        }
        out.a02 = out.compute_a02()?;
        Ok(out)
    }

    /// Phase `η_g` of the soliton state built along a closed vertex loop.
    ///
    /// Returns `arg⟨ℓ|ĝ|ℓ⟩ − arg⟨τ₁|ĝ|τ₁⟩` for `N` sites, where `|ℓ⟩` threads the
    /// overlap matrices between consecutive loop vertices. Transfer blocks with
    /// `u_g` inserted are multiplied site by site; the `n^N` amplitudes are never
    /// formed.
    pub fn soliton_charge(&self, lp: &[usize], g: usize, rep: &GroupData) -> Result<f64> {
        if lp.is_empty() {
            return Err(Error::PreconditionViolated("empty loop".into()));
        }
        if rep.phi(g) != 1 {
            return Err(Error::PreconditionViolated(
                "soliton charge needs a unitary element".into(),
            ));
        }
        if let Some(&v) = lp.iter().find(|&&v| self.complex.act_vertex(g, v) != v) {
            return Err(Error::NotStabilized {
                element: g,
                vertex: v,
            });
        }
        let u = &rep.u[g];
        let n = lp.len();
        let block = |b: &[CMat]| -> CMat {
            let d = b[0].nrows() * b[0].nrows();
            let dc = b[0].ncols() * b[0].ncols();
            let mut e = CMat::zeros(d, dc);
            for (i, bi) in b.iter().enumerate() {
                let cbi = bi.map(|z| z.conj());
                for (j, bj) in b.iter().enumerate() {
                    let uij = u[(i, j)];
                    if uij != c64(0.0, 0.0) {
                        e += cbi.kronecker(bj) * uij;
                    }
                }
            }
            e
        };
        let mut prod: Option<CMat> = None;
        for k in 0..n {
            let (a, b) = (lp[k], lp[(k + 1) % n]);
            let x = if a == b {
                CMat::identity(self.tensors[a].bond_dim(), self.tensors[a].bond_dim())
            } else {
                self.overlap(a, b)?.x
            };
            let bmat: Vec<CMat> = self.tensors[a].matrices().iter().map(|m| m * &x).collect();
            let e = block(&bmat);
            prod = Some(match prod {
                None => e,
                Some(p) => p * e,
            });
        }
        let num = prod.expect("loop is nonempty").trace();
        let e1 = block(self.tensors[lp[0]].matrices());
        let mut p1 = e1.clone();
        for _ in 1..n {
            p1 = &p1 * &e1;
        }
        let den = p1.trace();
        if num.norm() < 1e-300 || den.norm() < 1e-300 {
            return Err(Error::VanishingNorm);
        }
        Ok((num / den).arg())
    }
}
