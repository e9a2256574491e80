//! Families of pure states with a finite symmetry group: discrete Berry
//! connection, Chern numbers, symmetry charges, fixed-point formulas and the
//! ℤ₂ number of a free antipodal action.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::gcomplex::{Chain, Cochain, Coeff, GComplex, Generator, GroupData, Quantized};
use crate::models::{ground_state, spin_ops, SpinS};
use crate::numerics::{
    angle_dist, branch_lift, c64, canonicalize_phase, expm_i_hermitian, CMat, CVec, QuantizedAngle,
    C64,
};

/// Allowed deviation of `|⟨ψ(gτ)|ĝ|ψ(τ)⟩|` from 1.
const PARALLEL_TOL: f64 = 1e-8;

/// Unit vectors on the vertices of a complex, with an on-site representation of
/// the complex's symmetry group.
///
/// Antiunitary elements (`φ_g = −1`) act as `ψ ↦ u_g ψ*`.
#[derive(Debug, Clone)]
pub struct PureStateFamily {
    complex: Arc<GComplex>,
    states: Vec<CVec>,
    rep: GroupData,
    named: BTreeMap<String, usize>,
    tol: Tolerances,
}

/// Berry connection, lifted flux and symmetry phases of a family.
#[derive(Debug, Clone)]
pub struct BerryData {
    pub a: Cochain,
    pub f: Cochain,
    pub alpha: Cochain,
}

/// Largest violations of the relations tying `α` to the connection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquivarianceResiduals {
    /// `δα = 0`.
    pub cocycle: f64,
    /// `δA − dα ≡ 0`.
    pub descendant: f64,
    /// `F(gΔ) = φ_g F(Δ)`.
    pub flux: f64,
}

/// Both sides of a fixed-point formula.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPointCheck {
    /// `α_h(Q) − α_h(P)` in `[0, 2π)`.
    pub fixed_point: f64,
    /// The same quantity from the Berry connection, in `[0, 2π)`.
    pub direct: f64,
    pub residual: f64,
}

/// Chern number modulo `n` from the charges at the two poles of a rotation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChernModN {
    pub n: u32,
    /// `α_c(Q) − α_c(P)` in `[0, 2π)`.
    pub fixed_point: f64,
    /// Flux through the fundamental domain, in `[0, 2π)`.
    pub domain_flux: f64,
    pub chern: Quantized,
    /// Distance between `fixed_point` and `2πν/n`.
    pub residual: f64,
}

fn norm_sq(v: &CVec) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

fn inner(a: &CVec, b: &CVec) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

impl PureStateFamily {
    /// Validates normalization, the representation property and that the
    /// complex carries the same group as `rep`.
    pub fn new(
        complex: Arc<GComplex>,
        states: Vec<CVec>,
        rep: GroupData,
        tol: Tolerances,
    ) -> Result<Self> {
        if states.len() != complex.n_vertices() {
            return Err(Error::MeshMismatch(format!(
                "{} states for {} vertices",
                states.len(),
                complex.n_vertices()
            )));
        }
        let dim = rep.phys_dim();
        for (v, s) in states.iter().enumerate() {
            if s.len() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "state at vertex {v} has dimension {}, expected {dim}",
                    s.len()
                )));
            }
            if (norm_sq(s).sqrt() - 1.0).abs() > 1e-10 {
                return Err(Error::PreconditionViolated(format!(
                    "state at vertex {v} is not normalized"
                )));
            }
        }
        let grp = complex.group();
        if grp.order() != rep.order() || (0..grp.order()).any(|g| grp.phi(g) != rep.phi(g)) {
            return Err(Error::MeshMismatch(
                "complex and representation carry different groups".into(),
            ));
        }
        let r = rep.representation_residual();
        if r > 1e-10 {
            return Err(Error::PreconditionViolated(format!(
                "representation residual {r:.2e}"
            )));
        }
        Ok(PureStateFamily {
            complex,
            states,
            rep,
            named: BTreeMap::new(),
            tol,
        })
    }

    /// Closes `gens` into a group, attaches its parameter action to `base` and
    /// assigns `f(coordinates)` to every vertex.
    pub fn from_fn(
        base: &GComplex,
        gens: &[Generator],
        dim: usize,
        tol: Tolerances,
        f: impl Fn(&[f64]) -> Result<CVec> + Sync,
    ) -> Result<Self> {
        let rep = if gens.is_empty() {
            GroupData::trivial(dim)
        } else {
            GroupData::generate(gens)?
        };
        let complex = if gens.is_empty() {
            base.clone()
        } else {
            base.clone().attach_group_data(&rep)?
        };
        let states = (0..complex.n_vertices())
            .into_par_iter()
            .map(|v| f(complex.coords(v)))
            .collect::<Result<Vec<_>>>()?;
        let mut fam = PureStateFamily::new(Arc::new(complex), states, rep, tol)?;
        for g in gens {
            let e = fam
                .rep
                .find_element(&g.u, g.phi, Some(&g.param))
                .expect("generator belongs to its group");
            fam.named.insert(g.name.clone(), e);
        }
        Ok(fam)
    }

    pub fn complex(&self) -> &Arc<GComplex> {
        &self.complex
    }
    pub fn dim(&self) -> usize {
        self.rep.phys_dim()
    }
    pub fn state(&self, v: usize) -> &CVec {
        &self.states[v]
    }
    pub fn states(&self) -> &[CVec] {
        &self.states
    }
    pub fn rep(&self) -> &GroupData {
        &self.rep
    }
    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    /// Registers a name for group element `g`.
    pub fn name_element(&mut self, name: &str, g: usize) {
        self.named.insert(name.to_string(), g);
    }

    /// Group element registered under `name`.
    pub fn element(&self, name: &str) -> Result<usize> {
        self.named
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownName(name.to_string()))
    }

    /// `|ψ(τ)⟩ ↦ e^{iχ(τ)}|ψ(τ)⟩`.
    pub fn with_vertex_gauge(&self, chi: &[f64]) -> Result<Self> {
        if chi.len() != self.states.len() {
            return Err(Error::DimensionMismatch(
                "one gauge phase per vertex".into(),
            ));
        }
        let mut out = self.clone();
        for (s, &c) in out.states.iter_mut().zip(chi) {
            *s *= C64::from_polar(1.0, c);
        }
        Ok(out)
    }

    /// `ĝ|ψ⟩`.
    pub fn apply(&self, g: usize, psi: &CVec) -> CVec {
        let v = if self.rep.phi(g) < 0 {
            psi.map(|z| z.conj())
        } else {
            psi.clone()
        };
        &self.rep.u[g] * v
    }

    /// `A(τ₀, τ₁) = arg⟨ψ(τ₀)|ψ(τ₁)⟩` on sorted edges.
    pub fn berry_connection(&self) -> Result<Cochain> {
        let cx = &self.complex;
        let vals = (0..cx.count(1))
            .into_par_iter()
            .map(|e| {
                let s = cx.simplex(1, e);
                let z = inner(&self.states[s[0]], &self.states[s[1]]);
                if z.norm() < self.tol.overlap_tol {
                    return Err(Error::VanishingOverlap {
                        edge: s.to_vec(),
                        modulus: z.norm(),
                    });
                }
                Ok(z.arg())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Cochain::from_fn(cx, 0, 1, Coeff::Angle, true, |_, e| {
            vals[e]
        }))
    }

    /// Sum of the connection along a closed loop, in `[0, 2π)`.
    pub fn berry_phase(&self, lp: &Chain) -> Result<f64> {
        let a = self.berry_connection()?;
        berry_phase(&self.complex, &a, lp)
    }

    /// Chern number of a closed surface.
    pub fn chern(&self, surface: &Chain) -> Result<Quantized> {
        let a = self.berry_connection()?;
        self.complex.flux_integral(&a, surface, self.tol.flux_guard)
    }

    /// `α_g(τ) = arg⟨ψ(gτ)|ĝ|ψ(τ)⟩` for every element and vertex.
    pub fn alpha_cochain(&self) -> Result<Cochain> {
        let cx = &self.complex;
        let m = self.rep.order();
        let n = cx.n_vertices();
        let vals = (0..m * n)
            .into_par_iter()
            .map(|k| {
                let (g, v) = (k / n, k % n);
                let z = inner(
                    &self.states[cx.act_vertex(g, v)],
                    &self.apply(g, &self.states[v]),
                );
                if (z.norm() - 1.0).abs() > PARALLEL_TOL {
                    return Err(Error::EquivarianceViolated {
                        element: g,
                        vertex: v,
                        detail: format!("|<psi(g v)|g psi(v)>| = {:.3e}", z.norm()),
                    });
                }
                Ok(z.arg())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Cochain::from_fn(cx, 1, 0, Coeff::Angle, true, |t, v| {
            vals[t[0] * n + v]
        }))
    }

    /// Connection, flux and symmetry phases together.
    pub fn berry_data(&self) -> Result<BerryData> {
        let a = self.berry_connection()?;
        let f = self.complex.d(&a)?;
        let f = Cochain::from_fn(&self.complex, 0, 2, Coeff::Real, true, |_, i| {
            branch_lift(f.values()[i])
        });
        Ok(BerryData {
            a,
            f,
            alpha: self.alpha_cochain()?,
        })
    }

    /// Residuals of the cocycle, descendant and flux-equivariance relations.
    pub fn equivariance_residuals(&self) -> Result<EquivarianceResiduals> {
        let cx = &self.complex;
        let a = self.berry_connection()?;
        let alpha = self.alpha_cochain()?;
        let cocycle = cx.delta(&alpha)?.max_abs();
        let descendant = cx
            .delta(&a)?
            .linear_combination(1.0, &cx.d(&alpha)?, -1.0)?
            .max_abs();
        let flux = if cx.dim() >= 2 {
            let da = cx.d(&a)?;
            let f = Cochain::from_fn(cx, 0, 2, Coeff::Real, true, |_, i| {
                branch_lift(da.values()[i])
            });
            cx.delta(&f)?.max_abs()
        } else {
            0.0
        };
        Ok(EquivarianceResiduals {
            cocycle,
            descendant,
            flux,
        })
    }

    fn check_equivariance(&self) -> Result<()> {
        let r = self.equivariance_residuals()?;
        for (name, v) in [("cocycle", r.cocycle), ("descendant", r.descendant)] {
            if v > self.tol.coc_tol {
                return Err(Error::CocycleViolated {
                    name: name.into(),
                    residual: v,
                    slot: String::new(),
                });
            }
        }
        Ok(())
    }

    /// The `ĥ`-charge `arg⟨ψ(τ)|ĥ|ψ(τ)⟩` at a vertex fixed by a unitary `h`.
    pub fn charge(&self, h: usize, v: usize) -> Result<f64> {
        if self.rep.phi(h) != 1 {
            return Err(Error::PreconditionViolated(
                "charges are defined for unitary elements".into(),
            ));
        }
        if self.complex.act_vertex(h, v) != v {
            return Err(Error::NotFixedPoint {
                element: h,
                vertex: v,
            });
        }
        let z = inner(&self.states[v], &self.apply(h, &self.states[v]));
        if (z.norm() - 1.0).abs() > PARALLEL_TOL {
            return Err(Error::EquivarianceViolated {
                element: h,
                vertex: v,
                detail: format!("|<h>| = {:.3e}", z.norm()),
            });
        }
        Ok(z.arg())
    }

    /// Berry phase of `C − hC` from the `ĥ`-charges at the endpoints of `C`.
    ///
    /// `arc` must run from `p` to `q`, both fixed by the unitary element `h`.
    pub fn berry_phase_fixed_point(
        &self,
        h: usize,
        p: usize,
        q: usize,
        arc: &Chain,
    ) -> Result<FixedPointCheck> {
        let cx = &self.complex;
        if self.rep.phi(h) != 1 {
            return Err(Error::PreconditionViolated(
                "fixed-point formula needs a unitary element".into(),
            ));
        }
        for v in [p, q] {
            if cx.act_vertex(h, v) != v {
                return Err(Error::NotFixedPoint {
                    element: h,
                    vertex: v,
                });
            }
        }
        if arc.dim() != 1 || cx.boundary(arc)? != Chain::point(q, 1) - Chain::point(p, 1) {
            return Err(Error::BadDecomposition("arc boundary is not Q − P".into()));
        }
        let fixed_point = crate::numerics::wrap(self.charge(h, q)? - self.charge(h, p)?);
        let lp = arc - &cx.act_chain(h, arc);
        let direct = self.berry_phase(&lp)?;
        let residual = angle_dist(fixed_point, direct);
        if residual > self.tol.quantization_tol {
            return Err(Error::RelationViolated {
                name: "berry phase fixed point".into(),
                lhs: direct,
                rhs: fixed_point,
                residual,
            });
        }
        Ok(FixedPointCheck {
            fixed_point,
            direct,
            residual,
        })
    }

    /// Smallest `n > 0` with `cⁿ` acting trivially on the complex.
    fn action_order(&self, c: usize) -> u32 {
        let grp = self.complex.group();
        let mut g = c;
        let mut n = 1;
        while self
            .complex
            .permutation(g)
            .iter()
            .enumerate()
            .any(|(v, &w)| v != w)
        {
            g = grp.mul(c, g);
            n += 1;
        }
        n
    }

    /// The mod-`n` Chern relation `e^{2πiν/n} = e^{i(α_c(Q) − α_c(P))}` for a
    /// unitary rotation `c` with poles `p`, `q` and fundamental domain `domain`.
    ///
    /// The domain's images under `1, c, …, cⁿ⁻¹` must tile the fundamental class.
    pub fn chern_mod_n(&self, c: usize, p: usize, q: usize, domain: &Chain) -> Result<ChernModN> {
        let cx = &self.complex;
        if self.rep.phi(c) != 1 {
            return Err(Error::PreconditionViolated(
                "the rotation must be unitary".into(),
            ));
        }
        let n = self.action_order(c);
        let mut tiled = Chain::zero(domain.dim());
        let mut img = domain.clone();
        for _ in 0..n {
            tiled = tiled + img.clone();
            img = cx.act_chain(c, &img);
        }
        if tiled != cx.fundamental_class() {
            return Err(Error::BadDecomposition(
                "domain images do not tile the surface".into(),
            ));
        }
        let fixed_point = crate::numerics::wrap(self.charge(c, q)? - self.charge(c, p)?);
        let a = self.berry_connection()?;
        let da = cx.d(&a)?;
        let domain_flux = crate::numerics::wrap(
            domain
                .iter()
                .map(|(i, k)| k as f64 * branch_lift(da.values()[i]))
                .sum(),
        );
        let chern = self
            .complex
            .flux_integral(&a, &cx.fundamental_class(), self.tol.flux_guard)?;
        let expected = std::f64::consts::TAU * chern.value as f64 / n as f64;
        let residual = angle_dist(fixed_point, expected).max(angle_dist(domain_flux, fixed_point));
        if residual > self.tol.quantization_tol {
            return Err(Error::RelationViolated {
                name: format!("chern mod {n}"),
                lhs: expected,
                rhs: fixed_point,
                residual,
            });
        }
        Ok(ChernModN {
            n,
            fixed_point,
            domain_flux,
            chern,
            residual,
        })
    }

    /// `ξ = ½ΣF(D) − ΣA(C) − α_σ(P)` for a free involution `σ`, where the last two
    /// terms are the gauge-invariant phase of `C` closed up by `σ̂`.
    ///
    /// Requires `∂D = C + σC` and `∂C = σP − P`.
    pub fn xi_s2(
        &self,
        sigma: usize,
        hemisphere: &Chain,
        arc: &Chain,
        p: usize,
    ) -> Result<QuantizedAngle> {
        let cx = &self.complex;
        let grp = cx.group();
        if self.rep.phi(sigma) != 1 {
            return Err(Error::PreconditionViolated("σ must be unitary".into()));
        }
        if (0..cx.n_vertices()).any(|v| cx.act_vertex(grp.mul(sigma, sigma), v) != v) {
            return Err(Error::PreconditionViolated(
                "σ must square to the identity action".into(),
            ));
        }
        if let Some(v) = (0..cx.n_vertices()).find(|&v| cx.act_vertex(sigma, v) == v) {
            return Err(Error::NotFree {
                element: sigma,
                vertex: v,
            });
        }
        if cx.boundary(hemisphere)? != arc + &cx.act_chain(sigma, arc) {
            return Err(Error::BadDecomposition("∂D ≠ C + σC".into()));
        }
        if cx.boundary(arc)? != Chain::point(cx.act_vertex(sigma, p), 1) - Chain::point(p, 1) {
            return Err(Error::BadDecomposition("∂C ≠ σP − P".into()));
        }
        self.check_equivariance()?;
        let a = self.berry_connection()?;
        let da = cx.d(&a)?;
        let flux: f64 = hemisphere
            .iter()
            .map(|(i, k)| k as f64 * branch_lift(da.values()[i]))
            .sum();
        let along = cx.pair(&a, &[], arc)?;
        let alpha = self.alpha_cochain()?.get(&[sigma], p);
        let xi = QuantizedAngle::new(0.5 * flux - along - alpha, 2);
        if xi.residual > self.tol.quantization_tol {
            return Err(Error::NotQuantized {
                what: "xi".into(),
                value: xi.raw,
                residual: xi.residual,
            });
        }
        Ok(xi)
    }
}

/// Sum of an angle-valued 1-cochain along a closed loop, in `[0, 2π)`.
pub fn berry_phase(cx: &GComplex, a: &Cochain, lp: &Chain) -> Result<f64> {
    if !cx.boundary(lp)?.is_zero() {
        return Err(Error::NotACycle);
    }
    Ok(crate::numerics::wrap(cx.pair(a, &[], lp)?))
}

fn rz(theta: f64) -> DMatrix<f64> {
    let (s, c) = theta.sin_cos();
    DMatrix::from_row_slice(3, 3, &[c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0])
}

/// Ground state of `h·Ŝ` with canonical phase.
pub fn spin_field_ground_state(h: &[f64], s: SpinS) -> Result<CVec> {
    let ops = spin_ops(s);
    let ham = &ops[0] * c64(h[0], 0.0) + &ops[1] * c64(h[1], 0.0) + &ops[2] * c64(h[2], 0.0);
    let mut psi = ground_state(&ham)?;
    canonicalize_phase(&mut psi);
    Ok(CVec::from_column_slice(psi.as_slice()))
}

/// Symmetries of `h·Ŝ`: the rotation `c4 = e^{−i(π/2)Ŝz}` and time reversal
/// `T = e^{iπŜy}K`, which maps `h ↦ −h`.
pub fn spin_field_generators(s: SpinS) -> Result<Vec<Generator>> {
    let ops = spin_ops(s);
    let c4 = expm_i_hermitian(&ops[2], -std::f64::consts::FRAC_PI_2)?;
    let t = expm_i_hermitian(&ops[1], std::f64::consts::PI)?;
    Ok(vec![
        Generator {
            name: "c4".into(),
            phi: 1,
            u: c4,
            param: rz(std::f64::consts::FRAC_PI_2),
        },
        Generator {
            name: "T".into(),
            phi: -1,
            u: t,
            param: -DMatrix::identity(3, 3),
        },
    ])
}

/// Ground states of `H(h) = h·Ŝ` on a mesh of S², with the group generated by
/// `c4` and `T`. The elements `c2`, `c4` and `T` are registered by name.
pub fn spin_field_family(s: SpinS, base: &GComplex, tol: Tolerances) -> Result<PureStateFamily> {
    if base.dim() != 2 || base.ambient_dim() != 3 {
        return Err(Error::MeshMismatch(
            "the spin-field family lives on S²".into(),
        ));
    }
    let gens = spin_field_generators(s)?;
    let mut fam =
        PureStateFamily::from_fn(base, &gens, s.dim(), tol, |h| spin_field_ground_state(h, s))?;
    let c4 = fam.element("c4")?;
    let c2 = fam.rep.group.mul(c4, c4);
    fam.name_element("c2", c2);
    Ok(fam)
}

/// `|n⟩ = (n_x + i n_y, n_z)`, the ground state of `1 − 2|n⟩⟨n|`.
pub fn two_level_state(n: &[f64]) -> CVec {
    CVec::from_vec(vec![c64(n[0], n[1]), c64(n[2], 0.0)])
}

/// The family `|n⟩` on S² with the antipodal action and `σ̂ = sign · 1`,
/// registered as `sigma`.
pub fn two_level_family(base: &GComplex, sign: f64, tol: Tolerances) -> Result<PureStateFamily> {
    let gen = Generator {
        name: "sigma".into(),
        phi: 1,
        u: CMat::identity(2, 2) * c64(sign, 0.0),
        param: -DMatrix::identity(3, 3),
    };
    PureStateFamily::from_fn(base, &[gen], 2, tol, |n| {
        let h = CMat::identity(2, 2) - {
            let v = CMat::from_column_slice(2, 1, two_level_state(n).as_slice());
            &v * v.adjoint() * c64(2.0, 0.0)
        };
        let mut psi = ground_state(&h)?;
        canonicalize_phase(&mut psi);
        Ok(CVec::from_column_slice(psi.as_slice()))
    })
}

/// A `τ`-independent state with the given symmetry generators.
pub fn constant_family(
    base: &GComplex,
    psi: &CVec,
    gens: &[Generator],
    tol: Tolerances,
) -> Result<PureStateFamily> {
    PureStateFamily::from_fn(base, gens, psi.len(), tol, |_| Ok(psi.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gcomplex::{build_polygon_in_plane, build_sphere_complex};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn spin_family(two_s: u32, r: usize) -> PureStateFamily {
        let base = build_sphere_complex(2, r).unwrap();
        spin_field_family(SpinS::new(two_s).unwrap(), &base, tol()).unwrap()
    }

    #[test]
    fn field_ground_states() {
        let down = spin_field_ground_state(&[0.0, 0.0, 1.0], SpinS::half()).unwrap();
        assert!((down[0].norm()) < 1e-12 && (down[1].norm() - 1.0).abs() < 1e-12);
        let x = spin_field_ground_state(&[1.0, 0.0, 0.0], SpinS::half()).unwrap();
        let z = x[0] / x[1];
        assert!((z + c64(1.0, 0.0)).norm() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let psi = spin_field_ground_state(&h, SpinS::one()).unwrap();
        let ops = spin_ops(SpinS::one());
        let ham = &ops[0] * c64(h[0], 0.0) + &ops[1] * c64(h[1], 0.0) + &ops[2] * c64(h[2], 0.0);
        let e = inner(&psi, &(&ham * &psi)).re;
        let norm = h.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((e + norm).abs() < 1e-12);
    }

    #[test]
    fn constant_family_is_flat() {
        let base = build_sphere_complex(2, 1).unwrap();
        let psi = CVec::from_vec(vec![c64(0.6, 0.0), c64(0.0, 0.8)]);
        let fam = constant_family(&base, &psi, &[], tol()).unwrap();
        assert_eq!(fam.berry_connection().unwrap().max_abs(), 0.0);
        assert_eq!(
            fam.chern(&fam.complex().fundamental_class()).unwrap().value,
            0
        );
        let eq = fam.complex().standard_domains().unwrap();
        assert_eq!(fam.berry_phase(eq.chain("equator").unwrap()).unwrap(), 0.0);
        let alpha = fam.alpha_cochain().unwrap();
        assert_eq!(alpha.max_abs(), 0.0);
    }

    #[test]
    fn gauge_shifts_connection_by_d_chi() {
        let fam = spin_family(1, 1);
        let cx = fam.complex().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let chi: Vec<f64> = (0..cx.n_vertices())
            .map(|_| rng.gen_range(-PI..PI))
            .collect();
        let g = fam.with_vertex_gauge(&chi).unwrap();
        let dchi = cx
            .d(&Cochain::from_fn(&cx, 0, 0, Coeff::Angle, true, |_, v| {
                chi[v]
            }))
            .unwrap();
        let diff = g
            .berry_connection()
            .unwrap()
            .linear_combination(1.0, &fam.berry_connection().unwrap(), -1.0)
            .unwrap();
        assert!(diff.linear_combination(1.0, &dchi, -1.0).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn equator_phase_is_pi_for_spin_half() {
        let fam = spin_family(1, 2);
        let d = fam.complex().standard_domains().unwrap();
        let eq = d.chain("equator").unwrap();
        let g = fam.berry_phase(eq).unwrap();
        assert!(angle_dist(g, PI) < 2e-2, "{g}");
        let back = fam.berry_phase(&-eq.clone()).unwrap();
        assert!(angle_dist(back, -g) < 1e-12);
    }

    #[test]
    fn chern_is_two_s() {
        for two_s in 1..=4u32 {
            let fam = spin_family(two_s, 2);
            let top = fam.complex().fundamental_class();
            let q = fam.chern(&top).unwrap();
            assert_eq!(q.value, two_s as i64, "2S = {two_s}");
            assert!(q.residual < 1e-3);
            assert_eq!(fam.chern(&-top).unwrap().value, -(two_s as i64));
        }
    }

    #[test]
    fn charges_and_relations() {
        let fam = spin_family(1, 2);
        let r = fam.equivariance_residuals().unwrap();
        assert!(
            r.cocycle < 1e-10 && r.descendant < 1e-10 && r.flux < 1e-10,
            "{r:?}"
        );
        let alpha = fam.alpha_cochain().unwrap();
        let e = fam.rep().group.identity();
        assert!((0..fam.complex().n_vertices()).all(|v| alpha.get(&[e], v).abs() < 1e-12));
        let cx = fam.complex();
        let north = cx.vertex_at(&[0.0, 0.0, 1.0]).unwrap();
        let south = cx.vertex_at(&[0.0, 0.0, -1.0]).unwrap();
        let c2 = fam.element("c2").unwrap();
        let diff = fam.charge(c2, north).unwrap() - fam.charge(c2, south).unwrap();
        let k = 2.0 / (2.0 * PI) * diff;
        assert!((k.rem_euclid(2.0) - 1.0).abs() < 1e-12, "{k}");
    }

    #[test]
    fn chern_mod_n_relations() {
        for (two_s, n, expect) in [(1, 2, PI), (2, 2, 0.0), (1, 4, PI / 2.0), (2, 4, PI)] {
            let fam = spin_family(two_s, 2);
            let cx = fam.complex();
            let d = cx.standard_domains().unwrap();
            let name = if n == 2 { "c2" } else { "c4" };
            let c = fam.element(name).unwrap();
            let p = d.point(&format!("cn{n}_start")).unwrap();
            let q = d.point(&format!("cn{n}_end")).unwrap();
            let dom = d.chain(&format!("cn{n}_domain")).unwrap();
            let out = fam.chern_mod_n(c, p, q, dom).unwrap();
            assert_eq!(out.n, n);
            assert_eq!(out.chern.value, two_s as i64);
            assert!(
                angle_dist(out.fixed_point, expect) < 1e-9,
                "2S={two_s} n={n}: {out:?}"
            );
        }
    }

    #[test]
    fn meridian_fixed_point_formula() {
        let fam = spin_family(1, 2);
        let d = fam.complex().standard_domains().unwrap();
        let c2 = fam.element("c2").unwrap();
        let (p, q) = (d.point("cn2_start").unwrap(), d.point("cn2_end").unwrap());
        let out = fam
            .berry_phase_fixed_point(c2, p, q, d.chain("cn2_arc").unwrap())
            .unwrap();
        assert!(angle_dist(out.fixed_point, PI) < 1e-9);
        assert!(angle_dist(out.direct, PI) < 1e-3);
    }

    #[test]
    fn xi_of_two_level_model() {
        let base = build_sphere_complex(2, 2).unwrap();
        let d = base.standard_domains().unwrap();
        let (hemi, arc, p) = (
            d.chain("hemisphere").unwrap(),
            d.chain("arc").unwrap(),
            d.point("arc_start").unwrap(),
        );
        for (sign, expect) in [(1.0, 1), (-1.0, 0)] {
            let fam = two_level_family(&base, sign, tol()).unwrap();
            let sigma = fam.element("sigma").unwrap();
            let xi = fam.xi_s2(sigma, hemi, arc, p).unwrap();
            assert_eq!(xi.k, expect, "{xi:?}");
        }
        let gen = Generator {
            name: "sigma".into(),
            phi: 1,
            u: CMat::identity(2, 2),
            param: -DMatrix::identity(3, 3),
        };
        let triv = constant_family(
            &base,
            &CVec::from_vec(vec![c64(1.0, 0.0), c64(0.0, 0.0)]),
            &[gen],
            tol(),
        )
        .unwrap();
        assert_eq!(
            triv.xi_s2(triv.element("sigma").unwrap(), hemi, arc, p)
                .unwrap()
                .k,
            0
        );
    }

    #[test]
    fn edge_connection_matches_fine_path_product() {
        let cx = build_polygon_in_plane(12, 3, (0, 1)).unwrap();
        let fam = PureStateFamily::from_fn(&cx, &[], 2, tol(), |h| {
            spin_field_ground_state(h, SpinS::half())
        })
        .unwrap();
        let a = fam.berry_connection().unwrap();
        for e in 0..3 {
            let s = cx.simplex(1, e);
            let (x0, x1) = (cx.coords(s[0]), cx.coords(s[1]));
            let (t0, mut t1) = (x0[1].atan2(x0[0]), x1[1].atan2(x1[0]));
            if t1 - t0 > PI {
                t1 -= 2.0 * PI;
            } else if t0 - t1 > PI {
                t1 += 2.0 * PI;
            }
            let steps = 100;
            let pts: Vec<CVec> = (0..=steps)
                .map(|k| {
                    let t = t0 + (t1 - t0) * k as f64 / steps as f64;
                    spin_field_ground_state(&[t.cos(), t.sin(), 0.0], SpinS::half()).unwrap()
                })
                .collect();
            let prod: C64 = pts.windows(2).map(|w| inner(&w[0], &w[1])).product();
            assert!(angle_dist(prod.arg(), a.get(&[], e)) < 1e-6);
        }
    }
}
