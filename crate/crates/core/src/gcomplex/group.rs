//! Finite groups with an antiunitarity sign, and their on-site representations.

use std::collections::VecDeque;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{conj_if, max_abs_diff, CMat};

/// A finite group given by its multiplication table, together with the
/// homomorphism φ: G → {±1} that marks antiunitary elements.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Group {
    labels: Vec<String>,
    table: Vec<Vec<usize>>,
    phi: Vec<i8>,
    identity: usize,
    inverse: Vec<usize>,
}

impl Group {
    pub fn trivial() -> Self {
        Group {
            labels: vec!["e".into()],
            table: vec![vec![0]],
            phi: vec![1],
            identity: 0,
            inverse: vec![0],
        }
    }

    /// Validates associativity, identity, inverses and that φ is a homomorphism.
    pub fn from_table(labels: Vec<String>, table: Vec<Vec<usize>>, phi: Vec<i8>) -> Result<Self> {
        let n = labels.len();
        if table.len() != n || phi.len() != n || table.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch("group table shape".into()));
        }
        if table.iter().flatten().any(|&x| x >= n) {
            return Err(Error::PreconditionViolated(
                "group table entry out of range".into(),
            ));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|g| table[e][g] == g && table[g][e] == g))
            .ok_or_else(|| Error::PreconditionViolated("group table has no identity".into()))?;
        let mut inverse = vec![0; n];
        for g in 0..n {
            inverse[g] = (0..n).find(|&h| table[g][h] == identity).ok_or_else(|| {
                Error::PreconditionViolated(format!("element {g} has no inverse"))
            })?;
        }
        for a in 0..n {
            for b in 0..n {
                if phi[table[a][b]] != phi[a] * phi[b] {
                    return Err(Error::PreconditionViolated(
                        "phi is not a homomorphism".into(),
                    ));
                }
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::PreconditionViolated(
                            "group table is not associative".into(),
                        ));
                    }
                }
            }
        }
        Ok(Group {
            labels,
            table,
            phi,
            identity,
            inverse,
        })
    }

    /// Cyclic group of order `n` generated by the element labelled `name`.
    pub fn cyclic(n: usize, name: &str) -> Self {
        let labels = (0..n).map(|k| power_label(name, k)).collect();
        let table = (0..n)
            .map(|a| (0..n).map(|b| (a + b) % n).collect())
            .collect();
        Group::from_table(labels, table, vec![1; n]).expect("cyclic group is valid")
    }

    /// Direct product `Z_n1 × Z_n2`; element `(a, b)` has index `a * n2 + b`.
    pub fn cyclic_product(n1: usize, n2: usize, names: (&str, &str)) -> Self {
        let n = n1 * n2;
        let labels = (0..n)
            .map(|k| {
                let (a, b) = (k / n2, k % n2);
                match (a, b) {
                    (0, 0) => "e".to_string(),
                    (a, 0) => power_label(names.0, a),
                    (0, b) => power_label(names.1, b),
                    (a, b) => format!("{}·{}", power_label(names.0, a), power_label(names.1, b)),
                }
            })
            .collect();
        let table = (0..n)
            .map(|x| {
                (0..n)
                    .map(|y| ((x / n2 + y / n2) % n1) * n2 + (x % n2 + y % n2) % n2)
                    .collect()
            })
            .collect();
        Group::from_table(labels, table, vec![1; n]).expect("product group is valid")
    }

    pub fn order(&self) -> usize {
        self.labels.len()
    }
    pub fn identity(&self) -> usize {
        self.identity
    }
    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.table[g][h]
    }
    pub fn inv(&self, g: usize) -> usize {
        self.inverse[g]
    }
    pub fn phi(&self, g: usize) -> i8 {
        self.phi[g]
    }
    pub fn label(&self, g: usize) -> &str {
        &self.labels[g]
    }
    pub fn labels(&self) -> &[String] {
        &self.labels
    }
    pub fn find(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
    /// Smallest `k ≥ 1` with `g^k = e`.
    pub fn element_order(&self, g: usize) -> usize {
        let mut x = g;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, g);
            k += 1;
        }
        k
    }
    pub fn commute(&self, g: usize, h: usize) -> bool {
        self.mul(g, h) == self.mul(h, g)
    }
}

fn power_label(name: &str, k: usize) -> String {
    match k {
        0 => "e".into(),
        1 => name.into(),
        k => format!("{name}^{k}"),
    }
}

/// One generator of a symmetry group: on-site matrix, antiunitarity sign and
/// linear action on parameter-space coordinates.
#[derive(Debug, Clone)]
pub struct Generator {
    pub name: String,
    pub phi: i8,
    pub u: CMat,
    pub param: DMatrix<f64>,
}

/// A finite group together with on-site matrices `u_g` and, optionally, the
/// linear maps by which it acts on parameter space.
#[derive(Debug, Clone)]
pub struct GroupData {
    pub group: Arc<Group>,
    pub u: Vec<CMat>,
    pub params: Option<Vec<DMatrix<f64>>>,
}

/// Entrywise tolerance used to identify group elements during closure.
const CLOSURE_TOL: f64 = 1e-9;

impl GroupData {
    /// Trivial group acting by the identity on an `n`-dimensional site.
    pub fn trivial(n: usize) -> Self {
        GroupData {
            group: Arc::new(Group::trivial()),
            u: vec![CMat::identity(n, n)],
            params: None,
        }
    }

    /// Closes the generators under the product `(g, h) ↦ (u_g u_h^{φ_g}, φ_g φ_h, R_g R_h)`.
    ///
    /// Elements are labelled by the shortest generator word that reaches them.
    pub fn generate(gens: &[Generator]) -> Result<Self> {
        let n = gens.first().map(|g| g.u.nrows()).unwrap_or(1);
        let d = gens.first().map(|g| g.param.nrows()).unwrap_or(1);
        for g in gens {
            if g.u.nrows() != n || g.u.ncols() != n || g.param.nrows() != d || g.param.ncols() != d
            {
                return Err(Error::DimensionMismatch(format!(
                    "generator {} has inconsistent shape",
                    g.name
                )));
            }
            if max_abs_diff(&(g.u.adjoint() * &g.u), &CMat::identity(n, n)) > 1e-12 {
                return Err(Error::PreconditionViolated(format!(
                    "generator {} is not unitary",
                    g.name
                )));
            }
        }
        let mut us = vec![CMat::identity(n, n)];
        let mut rs = vec![DMatrix::<f64>::identity(d, d)];
        let mut phis = vec![1i8];
        let mut labels = vec!["e".to_string()];
        let find =
            |us: &[CMat], rs: &[DMatrix<f64>], phis: &[i8], u: &CMat, r: &DMatrix<f64>, phi: i8| {
                (0..us.len()).find(|&k| {
                    phis[k] == phi
                        && max_abs_diff(&us[k], u) < CLOSURE_TOL
                        && (&rs[k] - r).amax() < CLOSURE_TOL
                })
            };
        let mut queue = VecDeque::from([0usize]);
        while let Some(k) = queue.pop_front() {
            for gen in gens {
                // left-multiply by the generator so that labels read as words
                let u = &gen.u * conj_if(&us[k], gen.phi);
                let r = &gen.param * &rs[k];
                let phi = gen.phi * phis[k];
                if find(&us, &rs, &phis, &u, &r, phi).is_none() {
                    let label = if k == 0 {
                        gen.name.clone()
                    } else {
                        format!("{}·{}", gen.name, labels[k])
                    };
                    us.push(u);
                    rs.push(r);
                    phis.push(phi);
                    labels.push(label);
                    queue.push_back(us.len() - 1);
                    if us.len() > 4096 {
                        return Err(Error::PreconditionViolated(
                            "generated group is too large".into(),
                        ));
                    }
                }
            }
        }
        let m = us.len();
        let mut table = vec![vec![0; m]; m];
        for a in 0..m {
            for b in 0..m {
                let u = &us[a] * conj_if(&us[b], phis[a]);
                let r = &rs[a] * &rs[b];
                table[a][b] = find(&us, &rs, &phis, &u, &r, phis[a] * phis[b])
                    .ok_or_else(|| Error::PreconditionViolated("group closure failed".into()))?;
            }
        }
        let group = Group::from_table(labels, table, phis)?;
        Ok(GroupData {
            group: Arc::new(group),
            u: us,
            params: Some(rs),
        })
    }

    pub fn order(&self) -> usize {
        self.group.order()
    }
    pub fn phys_dim(&self) -> usize {
        self.u[0].nrows()
    }
    pub fn phi(&self, g: usize) -> i8 {
        self.group.phi(g)
    }

    /// Element whose on-site matrix, sign and parameter action all match.
    pub fn find_element(&self, u: &CMat, phi: i8, param: Option<&DMatrix<f64>>) -> Option<usize> {
        (0..self.order()).find(|&g| {
            self.phi(g) == phi
                && max_abs_diff(&self.u[g], u) < CLOSURE_TOL
                && match (param, &self.params) {
                    (Some(p), Some(ps)) => (&ps[g] - p).amax() < CLOSURE_TOL,
                    _ => true,
                }
        })
    }

    /// Largest violation of `u_g u_h^{φ_g} = u_{gh}` over all pairs.
    pub fn representation_residual(&self) -> f64 {
        let n = self.order();
        let mut worst = 0.0f64;
        for g in 0..n {
            for h in 0..n {
                let lhs = &self.u[g] * conj_if(&self.u[h], self.phi(g));
                worst = worst.max(max_abs_diff(&lhs, &self.u[self.group.mul(g, h)]));
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::c64;

    fn sign_gen(name: &str, phi: i8, diag: [f64; 2], u: CMat) -> Generator {
        Generator {
            name: name.into(),
            phi,
            u,
            param: DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&diag)),
        }
    }

    #[test]
    fn cyclic_product_table() {
        let g = Group::cyclic_product(4, 2, ("a", "b"));
        assert_eq!(g.order(), 8);
        let a = g.find("a").unwrap();
        let b = g.find("b").unwrap();
        assert!(g.commute(a, b));
        assert_eq!(g.element_order(a), 4);
        assert_eq!(g.label(g.mul(a, b)), "a·b");
    }

    #[test]
    fn kramers_doubling_in_closure() {
        // u = iσ_y with complex conjugation squares to −1, so the group is Z4.
        let u = CMat::from_row_slice(2, 2, &[c64(0., 0.), c64(1., 0.), c64(-1., 0.), c64(0., 0.)]);
        let data = GroupData::generate(&[sign_gen("T", -1, [-1.0, -1.0], u)]).unwrap();
        assert_eq!(data.order(), 4);
        assert!(data.representation_residual() < 1e-14);
        assert_eq!(data.group.element_order(1), 4);
    }

    #[test]
    fn bad_table_rejected() {
        let r = Group::from_table(
            vec!["e".into(), "a".into()],
            vec![vec![0, 1], vec![1, 1]],
            vec![1, 1],
        );
        assert!(r.is_err());
    }
}
