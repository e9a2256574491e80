//! Integration domains on sphere meshes selected by coordinate sign conditions.
//!
//! Lower-dimensional domains inherit their orientation as pieces of the boundary
//! of a higher-dimensional one, so the identities relating them hold as exact
//! integer chain equations.

use std::collections::BTreeMap;

use serde::Serialize;

use super::{Chain, GComplex};
use crate::error::{Error, Result};

const COORD_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Pos,
    Neg,
    Zero,
}

/// `x[axis] ≥ 0`, `x[axis] ≤ 0` or `x[axis] = 0` on a whole simplex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Constraint {
    pub axis: usize,
    pub side: Side,
}

impl Constraint {
    pub fn pos(axis: usize) -> Self {
        Constraint {
            axis,
            side: Side::Pos,
        }
    }
    pub fn neg(axis: usize) -> Self {
        Constraint {
            axis,
            side: Side::Neg,
        }
    }
    pub fn zero(axis: usize) -> Self {
        Constraint {
            axis,
            side: Side::Zero,
        }
    }
}

/// Named chains and named vertices.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Domains {
    pub chains: BTreeMap<String, Chain>,
    pub points: BTreeMap<String, usize>,
}

impl Domains {
    pub fn chain(&self, name: &str) -> Result<&Chain> {
        self.chains
            .get(name)
            .ok_or_else(|| Error::UnknownName(name.to_string()))
    }
    pub fn point(&self, name: &str) -> Result<usize> {
        self.points
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownName(name.to_string()))
    }
}

impl GComplex {
    fn satisfies(&self, q: usize, i: usize, cons: &[Constraint]) -> Result<bool> {
        let s = self.simplex(q, i);
        for c in cons {
            let xs: Vec<f64> = s.iter().map(|&v| self.coords(v)[c.axis]).collect();
            let above = xs.iter().any(|&x| x > COORD_EPS);
            let below = xs.iter().any(|&x| x < -COORD_EPS);
            let ok = match c.side {
                Side::Zero => !above && !below,
                Side::Pos | Side::Neg if above && below => {
                    return Err(Error::PredicateNotSimplicial(format!(
                        "{s:?} across axis {}",
                        c.axis
                    )))
                }
                Side::Pos => above,
                Side::Neg => below,
            };
            if !ok {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Top simplices satisfying all constraints, with the global orientation.
    pub fn region(&self, cons: &[Constraint]) -> Result<Chain> {
        let top = self.fundamental_class();
        self.restrict(&top, cons)
    }

    /// Terms of `c` whose simplices satisfy all constraints.
    pub fn restrict(&self, c: &Chain, cons: &[Constraint]) -> Result<Chain> {
        let q = c.dim();
        let mut out = Chain::zero(q);
        for (i, k) in c.iter() {
            if self.satisfies(q, i, cons)? {
                out.add_term(i, k);
            }
        }
        Ok(out)
    }

    /// Vertex with the given coordinates, if any.
    pub fn vertex_at(&self, x: &[f64]) -> Option<usize> {
        (0..self.n_vertices()).find(|&v| {
            self.coords(v)
                .iter()
                .zip(x)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
                < 1e-9
        })
    }

    /// Start and end vertices of a 1-chain whose boundary is `end − start`.
    pub fn endpoints(&self, arc: &Chain) -> Result<(usize, usize)> {
        let b = self.boundary(arc)?;
        let starts: Vec<usize> = b.iter().filter(|&(_, k)| k == -1).map(|(i, _)| i).collect();
        let ends: Vec<usize> = b.iter().filter(|&(_, k)| k == 1).map(|(i, _)| i).collect();
        if b.len() != 2 || starts.len() != 1 || ends.len() != 1 {
            return Err(Error::BadDecomposition("chain is not a simple arc".into()));
        }
        Ok((starts[0], ends[0]))
    }

    /// The named domains of a sphere mesh.
    ///
    /// On S² (coordinates x, y, z):
    /// * `hemisphere` = {z ≥ 0}, `equator` its boundary, `arc` = the part of the
    ///   equator with y ≥ 0 running from point `arc_start` to `arc_end`;
    /// * `cn2_domain` = {y ≥ 0} and `cn4_domain` = {x ≥ 0, y ≥ 0}, each with the
    ///   meridian piece `cn2_arc`/`cn4_arc` = {y = 0, x ≥ 0} of its boundary,
    ///   running from point `cn2_start` to `cn2_end` (resp. `cn4_*`).
    ///
    /// On S³ (coordinates n₀ … n₃):
    /// * `D3` = {n₃ ≥ 0}, `S2_n3` = ∂D3, `D2` = {n₂ ≥ 0} ⊂ ∂D3,
    ///   `D1` = {n₁ ≥ 0} ⊂ ∂D2, `circle_n2n3` = ∂D2, points `P+`, `P-` and
    ///   `D1_start`, `D1_end`;
    /// * `D3_*++*` = {n₁, n₂ ≥ 0} with `D2_*+0+`, `D2_*0+-`, `D1_*+00`,
    ///   `D1_*0+0`, `D1_*00+` oriented so that
    ///   ∂D3_*++* = −D2_*+0+ + C₂ₓD2_*+0+ + D2_*0+- − C₂ᵧD2_*0+-,
    ///   ∂D2_*+0+ = D1_*+00 − D1_*00+ and ∂D2_*0+- = C₂ᵧD1_*00+ − D1_*0+0;
    /// * `cn2_D3` = {n₂ ≤ 0}, `cn4_D3` = {n₁ ≥ 0, n₂ ≤ 0}, with `cn2_D2`, `cn4_D2`
    ///   the piece {n₂ = 0, n₁ ≥ 0} of their boundaries, and `circle_n1n2` = ∂cn2_D2.
    pub fn standard_domains(&self) -> Result<Domains> {
        use Constraint as C;
        let mut d = Domains::default();
        match (self.dim(), self.ambient_dim()) {
            (2, 3) => {
                let hemi = self.region(&[C::pos(2)])?;
                let equator = self.boundary(&hemi)?;
                let arc = self.restrict(&equator, &[C::pos(1)])?;
                let (s, e) = self.endpoints(&arc)?;
                d.points.insert("arc_start".into(), s);
                d.points.insert("arc_end".into(), e);
                d.chains.insert("hemisphere".into(), hemi);
                d.chains.insert("equator".into(), equator);
                d.chains.insert("arc".into(), arc);
                for (name, cons) in [
                    ("cn2", vec![C::pos(1)]),
                    ("cn4", vec![C::pos(0), C::pos(1)]),
                ] {
                    let dom = self.region(&cons)?;
                    let arc = self.restrict(&self.boundary(&dom)?, &[C::zero(1), C::pos(0)])?;
                    let (s, e) = self.endpoints(&arc)?;
                    d.points.insert(format!("{name}_start"), s);
                    d.points.insert(format!("{name}_end"), e);
                    d.chains.insert(format!("{name}_domain"), dom);
                    d.chains.insert(format!("{name}_arc"), arc);
                }
            }
            (3, 4) => {
                let d3 = self.region(&[C::pos(3)])?;
                let s2 = self.boundary(&d3)?;
                let d2 = self.restrict(&s2, &[C::pos(2)])?;
                let circle = self.boundary(&d2)?;
                let d1 = self.restrict(&circle, &[C::pos(1)])?;
                let (s, e) = self.endpoints(&d1)?;
                d.points.insert("D1_start".into(), s);
                d.points.insert("D1_end".into(), e);
                for (name, x) in [("P+", [1.0, 0.0, 0.0, 0.0]), ("P-", [-1.0, 0.0, 0.0, 0.0])] {
                    let v = self
                        .vertex_at(&x)
                        .ok_or_else(|| Error::MeshMismatch(format!("no vertex at {name}")))?;
                    d.points.insert(name.into(), v);
                }
                d.chains.insert("D3".into(), d3);
                d.chains.insert("S2_n3".into(), s2);
                d.chains.insert("D2".into(), d2);
                d.chains.insert("circle_n2n3".into(), circle);
                d.chains.insert("D1".into(), d1);

                let q3 = self.region(&[C::pos(1), C::pos(2)])?;
                let bq = self.boundary(&q3)?;
                let d2a = -self.restrict(&bq, &[C::zero(2), C::pos(3)])?;
                let d2b = self.restrict(&bq, &[C::zero(1), C::neg(3)])?;
                let ba = self.boundary(&d2a)?;
                let bb = self.boundary(&d2b)?;
                d.chains
                    .insert("D1_*+00".into(), self.restrict(&ba, &[C::zero(3)])?);
                d.chains
                    .insert("D1_*00+".into(), -self.restrict(&ba, &[C::zero(1)])?);
                d.chains
                    .insert("D1_*0+0".into(), -self.restrict(&bb, &[C::zero(3)])?);
                d.chains.insert("D3_*++*".into(), q3);
                d.chains.insert("D2_*+0+".into(), d2a);
                d.chains.insert("D2_*0+-".into(), d2b);

                for (name, cons) in [
                    ("cn2", vec![C::neg(2)]),
                    ("cn4", vec![C::pos(1), C::neg(2)]),
                ] {
                    let dom = self.region(&cons)?;
                    let face = self.restrict(&self.boundary(&dom)?, &[C::zero(2), C::pos(1)])?;
                    if name == "cn2" {
                        d.chains.insert("circle_n1n2".into(), self.boundary(&face)?);
                    }
                    d.chains.insert(format!("{name}_D3"), dom);
                    d.chains.insert(format!("{name}_D2"), face);
                }
            }
            _ => {}
        }
        Ok(d)
    }
}

#[cfg(test)]
mod tests {
    use crate::gcomplex::build_sphere_complex;

    #[test]
    fn octahedron_hemisphere() {
        let cx = build_sphere_complex(2, 0).unwrap();
        let d = cx.standard_domains().unwrap();
        assert_eq!(d.chain("hemisphere").unwrap().len(), 4);
        let eq = d.chain("equator").unwrap();
        assert_eq!(eq.len(), 4);
        assert!(cx.boundary(eq).unwrap().is_zero());
    }

    #[test]
    fn s3_arc_runs_between_poles() {
        let cx = build_sphere_complex(3, 1).unwrap();
        let d = cx.standard_domains().unwrap();
        let ends = [d.point("D1_start").unwrap(), d.point("D1_end").unwrap()];
        let poles = [d.point("P+").unwrap(), d.point("P-").unwrap()];
        assert!(ends.contains(&poles[0]) && ends.contains(&poles[1]));
    }
}
