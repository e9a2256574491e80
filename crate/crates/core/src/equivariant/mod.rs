//! The symmetry tower of an MPS family: the matrices `V_g(τ)` relating `ĝ·A(τ)`
//! to `A(gτ)`, the cochains `A⁽¹⁰⁾`, `A⁽¹¹⁾`, `A⁽²⁰⁾` built from them, and the
//! SPT, pump, higher Berry and DDKS invariants that use them.
//!
//! All cochains are angle-valued and twisted: an antiunitary element acts on
//! coefficients by `θ ↦ −θ`.

mod gauge;
mod invariants;
pub mod synthetic;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gcomplex::{Cochain, Coeff, GComplex, GroupData};
use crate::mps::{edge_overlap, MPSFamily, MPSTensor};
use crate::numerics::{branch_lift, c64, conj_if, max_abs_diff, polar_unitary, CMat, C64};

pub use gauge::GaugeTransform;
pub use invariants::{Gamma2, Relation, SptInvariants};

/// Schmidt values of `τ` and `gτ` must agree to this accuracy.
const SCHMIDT_MATCH_TOL: f64 = 1e-8;

/// `ĝ·A`: matrices `Σⱼ [u_g]ᵢⱼ (Aʲ)^{φ_g}` with the same Schmidt values.
pub fn transform_mps(g: usize, rep: &GroupData, t: &MPSTensor) -> Result<MPSTensor> {
    if g >= rep.order() {
        return Err(Error::DimensionMismatch(format!(
            "element {g} in a group of order {}",
            rep.order()
        )));
    }
    let n = t.phys_dim();
    if rep.phys_dim() != n {
        return Err(Error::DimensionMismatch(format!(
            "{}-dim representation on a {n}-dim site",
            rep.phys_dim()
        )));
    }
    let phi = rep.phi(g);
    let src: Vec<CMat> = t.matrices().iter().map(|m| conj_if(m, phi)).collect();
    let u = &rep.u[g];
    let d = t.bond_dim();
    let a = (0..n)
        .map(|i| {
            let mut acc = CMat::zeros(d, d);
            for (j, m) in src.iter().enumerate() {
                let uij = u[(i, j)];
                if uij != C64::default() {
                    acc += m * uij;
                }
            }
            acc
        })
        .collect();
    MPSTensor::from_canonical_unchecked(a, t.lambda().to_vec())
}

/// Numerical quality of an [`EquivariantData`] build.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quality {
    /// Smallest `|μ|` over all matchings of `ĝ·A(τ)` with `A(gτ)`.
    pub min_modulus: f64,
    /// Largest `‖√D·X − V‖` before polar unitarization.
    pub max_unitarity_defect: f64,
    /// Largest `‖[V_g(τ), Λ(τ)]‖`.
    pub max_schmidt_commutator: f64,
    /// Largest deviation of `V_gh† V_g(h·) V_h^{φ_g}` from a phase.
    pub max_prop_residual: f64,
}

/// Largest violation of each cocycle condition, and of flux equivariance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CocycleResiduals {
    /// `δA⁽¹⁰⁾ = 0`.
    pub a10: f64,
    /// `δA⁽⁰¹⁾ − dA⁽¹⁰⁾ = 0`.
    pub a01_a10: f64,
    /// `δA⁽⁰²⁾ − dA⁽¹¹⁾ = 0`.
    pub a02_a11: f64,
    /// `δA⁽¹¹⁾ + dA⁽²⁰⁾ = 0`.
    pub a11_a20: f64,
    /// `δA⁽²⁰⁾ = 0`.
    pub a20: f64,
    /// `F⁽³⁾(gΔ) = φ_g F⁽³⁾(Δ)`, zero on complexes of dimension below 3.
    pub flux: f64,
}

impl CocycleResiduals {
    pub fn max(&self) -> f64 {
        [self.a10, self.a01_a10, self.a02_a11, self.a11_a20, self.a20]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

/// An MPS family together with its symmetry tower. Frozen after construction.
#[derive(Debug, Clone)]
pub struct EquivariantData {
    fam: MPSFamily,
    rep: GroupData,
    named: BTreeMap<String, usize>,
    /// `V_g(τ)` at index `g·n + τ`.
    v: Vec<CMat>,
    a10: Cochain,
    a11: Cochain,
    a20: Cochain,
    quality: Quality,
}

fn check_group(cx: &GComplex, rep: &GroupData) -> Result<()> {
    let grp = cx.group();
    if grp.order() != rep.order() || (0..grp.order()).any(|g| grp.phi(g) != rep.phi(g)) {
        return Err(Error::MeshMismatch(
            "complex and representation carry different groups".into(),
        ));
    }
    for g in 0..grp.order() {
        for h in 0..grp.order() {
            if !std::sync::Arc::ptr_eq(grp, &rep.group) && grp.mul(g, h) != rep.group.mul(g, h) {
                return Err(Error::MeshMismatch(
                    "complex and representation have different products".into(),
                ));
            }
        }
    }
    let r = rep.representation_residual();
    if r > 1e-12 {
        return Err(Error::PreconditionViolated(format!(
            "representation residual {r:.2e}"
        )));
    }
    Ok(())
}

/// Matches `ĝ·A(τ)` with `A(gτ)` for every element and vertex and assembles the
/// tower.
///
/// `V_g(τ)` and `e^{iA⁽¹⁰⁾_g(τ)}` are the dominant eigenvector (unitarized) and
/// eigenvalue of the mixed transfer matrix of `A(gτ)` against `ĝ·A(τ)`, so that
/// `A(gτ) = e^{iA⁽¹⁰⁾} V (ĝ·A(τ)) V†`.
pub fn build_equivariant(fam: &MPSFamily, rep: &GroupData) -> Result<EquivariantData> {
    let cx = fam.complex().clone();
    check_group(&cx, rep)?;
    let n = cx.n_vertices();
    let m = rep.order();
    let e = cx.group().identity();
    let tol = *fam.tolerances();
    let matched = (0..m * n)
        .into_par_iter()
        .map(|k| {
            let (g, v) = (k / n, k % n);
            let t = fam.tensor(v);
            let d = t.bond_dim();
            if g == e {
                return Ok((CMat::identity(d, d), 0.0, 1.0, 0.0, 0.0));
            }
            let gv = cx.act_vertex(g, v);
            let tg = fam.tensor(gv);
            if tg.bond_dim() != d
                || t.lambda()
                    .iter()
                    .zip(tg.lambda())
                    .any(|(a, b)| (a - b).abs() > SCHMIDT_MATCH_TOL)
            {
                return Err(Error::SchmidtMismatch {
                    element: g,
                    vertex: v,
                });
            }
            let b = transform_mps(g, rep, t)?;
            let ov = edge_overlap(tg, &b, tol.gap_tol).map_err(|err| match err {
                Error::NotClose { detail, .. } => Error::EquivarianceViolated {
                    element: g,
                    vertex: v,
                    detail,
                },
                err => err,
            })?;
            let modulus = ov.mu.norm();
            if modulus < 1.0 - tol.equiv_tol {
                return Err(Error::EquivarianceViolated {
                    element: g,
                    vertex: v,
                    detail: format!("|mu| = {modulus:.12}"),
                });
            }
            let x = ov.x * c64((d as f64).sqrt(), 0.0);
            let vg = polar_unitary(&x)?;
            let defect = max_abs_diff(&x, &vg);
            let l = t.lambda_pow(1.0);
            let comm = max_abs_diff(&(&vg * &l), &(&l * &vg));
            Ok((vg, ov.a01, modulus, defect, comm))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut quality = Quality {
        min_modulus: 1.0,
        max_unitarity_defect: 0.0,
        max_schmidt_commutator: 0.0,
        max_prop_residual: 0.0,
    };
    let mut v = Vec::with_capacity(m * n);
    let mut a10 = Vec::with_capacity(m * n);
    for (vg, a, modulus, defect, comm) in matched {
        quality.min_modulus = quality.min_modulus.min(modulus);
        quality.max_unitarity_defect = quality.max_unitarity_defect.max(defect);
        quality.max_schmidt_commutator = quality.max_schmidt_commutator.max(comm);
        v.push(vg);
        a10.push(a);
    }
    let a10 = Cochain::from_fn(&cx, 1, 0, Coeff::Angle, true, |t, i| a10[t[0] * n + i]);
    EquivariantData::from_parts(fam.clone(), rep.clone(), v, a10, quality)
}

impl EquivariantData {
    /// Computes `A⁽¹¹⁾` and `A⁽²⁰⁾` from given `V` and `A⁽¹⁰⁾`.
    fn from_parts(
        fam: MPSFamily,
        rep: GroupData,
        v: Vec<CMat>,
        a10: Cochain,
        mut quality: Quality,
    ) -> Result<Self> {
        let cx = fam.complex().clone();
        let n = cx.n_vertices();
        let m = rep.order();
        let grp = cx.group().clone();
        let e = grp.identity();
        let ne = cx.count(1);
        let tol = *fam.tolerances();

        let a11 = (0..m * ne)
            .into_par_iter()
            .map(|k| {
                let (g, i) = (k / ne, k % ne);
                if g == e {
                    return Ok(0.0);
                }
                let s = cx.simplex(1, i);
                let (t0, t1) = (s[0], s[1]);
                let x = &fam.edges()[i].x;
                let xg = fam.overlap(cx.act_vertex(g, t0), cx.act_vertex(g, t1))?.x;
                let moved = &v[g * n + t0] * conj_if(x, rep.phi(g)) * v[g * n + t1].adjoint();
                let z = (xg.adjoint() * moved).trace();
                if (z.norm() - 1.0).abs() > tol.prop_tol {
                    return Err(Error::EquivarianceViolated {
                        element: g,
                        vertex: t0,
                        detail: format!(
                            "overlap matrix of edge {s:?} maps with modulus {:.9}",
                            z.norm()
                        ),
                    });
                }
                Ok(z.arg())
            })
            .collect::<Result<Vec<_>>>()?;
        let a11 = Cochain::from_fn(&cx, 1, 1, Coeff::Angle, true, |t, i| a11[t[0] * ne + i]);

        let a20 = (0..m * m * n)
            .into_par_iter()
            .map(|k| {
                let (g, h, tau) = (k / (m * n), (k / n) % m, k % n);
                if g == e || h == e {
                    return Ok((0.0, 0.0));
                }
                let gh = grp.mul(g, h);
                let prod = v[gh * n + tau].adjoint()
                    * &v[g * n + cx.act_vertex(h, tau)]
                    * conj_if(&v[h * n + tau], grp.phi(g));
                let d = prod.nrows();
                let theta = prod.trace().arg();
                let residual =
                    max_abs_diff(&prod, &(CMat::identity(d, d) * C64::from_polar(1.0, theta)));
                if residual > tol.prop_tol {
                    return Err(Error::NotProportionalToIdentity {
                        g,
                        h,
                        vertex: tau,
                        residual,
                    });
                }
                Ok((theta, residual))
            })
            .collect::<Result<Vec<_>>>()?;
        quality.max_prop_residual = a20
            .iter()
            .map(|x| x.1)
            .fold(quality.max_prop_residual, f64::max);
        let a20 = Cochain::from_fn(&cx, 2, 0, Coeff::Angle, true, |t, i| {
            a20[(t[0] * m + t[1]) * n + i].0
        });
        Ok(EquivariantData {
            fam,
            rep,
            named: BTreeMap::new(),
            v,
            a10,
            a11,
            a20,
            quality,
        })
    }

    pub fn family(&self) -> &MPSFamily {
        &self.fam
    }
    pub fn complex(&self) -> &std::sync::Arc<GComplex> {
        self.fam.complex()
    }
    pub fn rep(&self) -> &GroupData {
        &self.rep
    }
    pub fn quality(&self) -> &Quality {
        &self.quality
    }
    /// `V_g(τ)`.
    pub fn v(&self, g: usize, tau: usize) -> &CMat {
        &self.v[g * self.fam.complex().n_vertices() + tau]
    }
    pub fn a10(&self) -> &Cochain {
        &self.a10
    }
    pub fn a11(&self) -> &Cochain {
        &self.a11
    }
    pub fn a20(&self) -> &Cochain {
        &self.a20
    }

    /// Registers a name for group element `g`.
    pub fn name_element(&mut self, name: &str, g: usize) {
        self.named.insert(name.to_string(), g);
    }

    /// Element registered under `name`, or else the element with that label.
    pub fn element(&self, name: &str) -> Result<usize> {
        self.named
            .get(name)
            .copied()
            .or_else(|| self.rep.group.find(name))
            .ok_or_else(|| Error::UnknownName(name.to_string()))
    }

    /// The five cocycle combinations, each of which vanishes mod 2π.
    fn cocycle_cochains(&self) -> Result<Vec<(&'static str, Cochain)>> {
        let cx = self.fam.complex();
        let mut out = vec![
            ("δA10", cx.delta(&self.a10)?),
            (
                "δA01 − dA10",
                cx.delta(&self.fam.a01())?
                    .linear_combination(1.0, &cx.d(&self.a10)?, -1.0)?,
            ),
        ];
        if cx.dim() >= 2 {
            out.push((
                "δA02 − dA11",
                cx.delta(&self.fam.a02())?
                    .linear_combination(1.0, &cx.d(&self.a11)?, -1.0)?,
            ));
        }
        out.push((
            "δA11 + dA20",
            cx.delta(&self.a11)?
                .linear_combination(1.0, &cx.d(&self.a20)?, 1.0)?,
        ));
        out.push(("δA20", cx.delta(&self.a20)?));
        Ok(out)
    }

    /// Residuals of every cocycle condition of the tower.
    pub fn cocycle_residuals(&self) -> Result<CocycleResiduals> {
        let cx = self.fam.complex();
        let r: BTreeMap<&str, f64> = self
            .cocycle_cochains()?
            .into_iter()
            .map(|(k, c)| (k, c.max_abs()))
            .collect();
        let flux = if cx.dim() >= 3 {
            let da = cx.d(&self.fam.a02())?;
            let f = Cochain::from_fn(cx, 0, 3, Coeff::Real, true, |_, i| {
                branch_lift(da.values()[i])
            });
            cx.delta(&f)?.max_abs()
        } else {
            0.0
        };
        Ok(CocycleResiduals {
            a10: r["δA10"],
            a01_a10: r["δA01 − dA10"],
            a02_a11: r.get("δA02 − dA11").copied().unwrap_or(0.0),
            a11_a20: r["δA11 + dA20"],
            a20: r["δA20"],
            flux,
        })
    }

    /// Fails on the first cocycle condition whose residual exceeds `coc_tol`,
    /// naming the group slot and simplex.
    pub fn check_cocycles(&self) -> Result<CocycleResiduals> {
        let cx = self.fam.complex();
        let tol = self.fam.tolerances().coc_tol;
        for (name, c) in self.cocycle_cochains()? {
            if let Some((tuple, i, x)) = c.argmax_abs() {
                if x.abs() > tol {
                    let labels: Vec<&str> = tuple.iter().map(|&g| cx.group().label(g)).collect();
                    let slot = format!(
                        "({}) on {:?}",
                        labels.join(", "),
                        cx.simplex(c.bidegree().1, i)
                    );
                    return Err(Error::CocycleViolated {
                        name: name.into(),
                        residual: x.abs(),
                        slot,
                    });
                }
            }
        }
        self.cocycle_residuals()
    }
}

#[cfg(test)]
mod tests;
