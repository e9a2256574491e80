//! Exactly solvable families: spin operators, the dimerized two-spin-per-site
//! chain with closed-form MPS ground states on S³, and its symmetries.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gcomplex::{Generator, GroupData};
use crate::mps::MPSTensor;
use crate::numerics::{c64, eigh, expm_i_hermitian, kron, svd, CMat, C64};

/// Degenerate-gap threshold for pair ground states.
pub const GROUND_GAP_TOL: f64 = 1e-10;

/// Spin `S = two_s / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpinS {
    pub two_s: u32,
}

impl SpinS {
    pub fn new(two_s: u32) -> Result<Self> {
        if two_s == 0 {
            return Err(Error::PreconditionViolated("spin must be positive".into()));
        }
        Ok(SpinS { two_s })
    }
    pub fn half() -> Self {
        SpinS { two_s: 1 }
    }
    pub fn one() -> Self {
        SpinS { two_s: 2 }
    }
    pub fn value(self) -> f64 {
        self.two_s as f64 / 2.0
    }
    pub fn dim(self) -> usize {
        self.two_s as usize + 1
    }
}

/// `(Ŝx, Ŝy, Ŝz)` in the basis `m = S, S−1, …, −S`.
pub fn spin_ops(s: SpinS) -> [CMat; 3] {
    let d = s.dim();
    let sv = s.value();
    let m = |k: usize| sv - k as f64;
    let mut plus = CMat::zeros(d, d);
    for k in 1..d {
        // S⁺|m⟩ = √(S(S+1) − m(m+1)) |m+1⟩
        plus[(k - 1, k)] = c64((sv * (sv + 1.0) - m(k) * (m(k) + 1.0)).sqrt(), 0.0);
    }
    let minus = plus.adjoint();
    let sx = (&plus + &minus) * c64(0.5, 0.0);
    let sy = (&plus - &minus) * c64(0.0, -0.5);
    let sz = CMat::from_diagonal(&nalgebra::DVector::from_fn(d, |k, _| c64(m(k), 0.0)));
    [sx, sy, sz]
}

/// Which pair of spins the Heisenberg coupling acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Bond {
    /// `ŝᴸⱼ·ŝᴿⱼ`, used for `n₀ ≤ 0`; basis `(L, R)` of one site.
    Intra,
    /// `ŝᴿⱼ·ŝᴸⱼ₊₁`, used for `n₀ ≥ 0`; basis `(R, L')` across the bond.
    Inter,
}

fn dot3(n: &[f64], ops: &[CMat; 3]) -> CMat {
    &ops[0] * c64(n[0], 0.0) + &ops[1] * c64(n[1], 0.0) + &ops[2] * c64(n[2], 0.0)
}

/// Two-spin Hamiltonian whose ground states make up the chain's ground state.
///
/// The field term `n·(−ŝᴸ + ŝᴿ)` is split over the pair, so the spin entering
/// with `+n` is first in the intra basis `(L, R)` second and in the inter basis
/// `(R, L')` first.
pub fn pair_hamiltonian(n: &[f64; 4], s: SpinS, bond: Bond) -> Result<CMat> {
    match bond {
        Bond::Intra if n[0] > 0.0 => return Err(Error::WrongSector),
        Bond::Inter if n[0] < 0.0 => return Err(Error::WrongSector),
        _ => {}
    }
    let ops = spin_ops(s);
    let id = CMat::identity(s.dim(), s.dim());
    let field = dot3(&n[1..], &ops);
    let coupling = (0..3).fold(
        CMat::zeros(s.dim() * s.dim(), s.dim() * s.dim()),
        |acc, k| acc + kron(&ops[k], &ops[k]),
    );
    let (first, second) = match bond {
        Bond::Intra => (-&field, field.clone()),
        Bond::Inter => (field.clone(), -&field),
    };
    Ok(kron(&first, &id) + kron(&id, &second) + coupling * c64(n[0].abs(), 0.0))
}

/// Lowest eigenvector of a Hermitian matrix as a column.
pub fn ground_state(h: &CMat) -> Result<CMat> {
    let (vals, vecs) = eigh(h)?;
    let gap = vals[1] - vals[0];
    if gap < GROUND_GAP_TOL {
        return Err(Error::DegenerateGroundState { gap });
    }
    Ok(CMat::from_column_slice(
        vecs.nrows(),
        1,
        vecs.column(0).as_slice(),
    ))
}

fn check_unit(n: &[f64]) -> Result<[f64; 4]> {
    if n.len() != 4 {
        return Err(Error::DimensionMismatch(format!(
            "model point needs 4 coordinates, got {}",
            n.len()
        )));
    }
    let norm = n.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::PreconditionViolated(format!(
            "model point has norm {norm}"
        )));
    }
    Ok([n[0], n[1], n[2], n[3]])
}

/// Right-canonical MPS of the chain's ground state at `n ∈ S³`.
///
/// For `n₀ ≤ 0` this is a product of intra-site pairs (`D = 1`). For `n₀ > 0`
/// the inter-site pair `φ = Σ_a λ_a |r⁽ᵃ⁾⟩_R |l⁽ᵃ⁾⟩_L'` gives
/// `A^{(i_L,i_R)}_{ab} = l⁽ᵃ⁾_{i_L} λ_b r⁽ᵇ⁾_{i_R}`. Physical index is
/// `i_L·(2S+1) + i_R`.
pub fn ground_mps(n: &[f64], s: SpinS, trunc_tol: f64) -> Result<MPSTensor> {
    let n = check_unit(n)?;
    let d = s.dim();
    if n[0] <= 0.0 {
        let psi = ground_state(&pair_hamiltonian(&n, s, Bond::Intra)?)?;
        return Ok(MPSTensor::product(psi.as_slice()));
    }
    let phi = ground_state(&pair_hamiltonian(&n, s, Bond::Inter)?)?;
    // φ[(iR, iL')] with iR the slow index
    let m = CMat::from_fn(d, d, |r, c| phi[r * d + c]);
    let dec = svd(&m)?;
    let keep = dec
        .sigma
        .iter()
        .take_while(|&&x| x > trunc_tol)
        .count()
        .max(1);
    let norm = dec.sigma[..keep].iter().map(|x| x * x).sum::<f64>().sqrt();
    let lambda: Vec<f64> = dec.sigma[..keep].iter().map(|x| x / norm).collect();
    let r = |a: usize, i: usize| dec.u[(i, a)];
    let l = |a: usize, i: usize| dec.v[(i, a)].conj();
    let mut a = Vec::with_capacity(d * d);
    for il in 0..d {
        for ir in 0..d {
            a.push(CMat::from_fn(keep, keep, |p, q| {
                l(p, il) * c64(lambda[q], 0.0) * r(q, ir)
            }));
        }
    }
    MPSTensor::from_canonical_unchecked(a, lambda)
}

/// Supported on-site symmetry names.
pub const GROUP_NAMES: [&str; 6] = ["T", "C2x", "C2y", "C2z", "C2zT", "Q4z"];

fn diag4(d: [f64; 4]) -> DMatrix<f64> {
    DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&d))
}

/// On-site matrix, antiunitarity sign and parameter action of a named symmetry
/// of the dimerized chain.
///
/// Rotations are `q_{m,θ} = exp(iθ m·(ŝᴸ + ŝᴿ))`, time reversal is
/// `exp(iπ(ŝᴸʸ + ŝᴿʸ)) K`, and the parameter action is `n ↦ param · n`.
pub fn group_rep(name: &str, s: SpinS) -> Result<Generator> {
    let ops = spin_ops(s);
    let rot = |axis: usize, theta: f64| -> Result<CMat> {
        let r = expm_i_hermitian(&ops[axis], theta)?;
        Ok(kron(&r, &r))
    };
    let pi = std::f64::consts::PI;
    let (u, phi, param) = match name {
        "T" => (rot(1, pi)?, -1, diag4([1.0, -1.0, -1.0, -1.0])),
        "C2x" => (rot(0, pi)?, 1, diag4([1.0, 1.0, -1.0, -1.0])),
        "C2y" => (rot(1, pi)?, 1, diag4([1.0, -1.0, 1.0, -1.0])),
        "C2z" => (rot(2, pi)?, 1, diag4([1.0, -1.0, -1.0, 1.0])),
        "C2zT" => (rot(2, pi)? * rot(1, pi)?, -1, diag4([1.0, 1.0, 1.0, -1.0])),
        "Q4z" => {
            let mut p = DMatrix::zeros(4, 4);
            p[(0, 0)] = 1.0;
            p[(1, 2)] = 1.0;
            p[(2, 1)] = -1.0;
            p[(3, 3)] = 1.0;
            (rot(2, pi / 2.0)?, 1, p)
        }
        other => return Err(Error::UnknownName(other.to_string())),
    };
    Ok(Generator {
        name: name.to_string(),
        phi,
        u,
        param,
    })
}

/// The group generated by the named symmetries.
pub fn model_group(names: &[&str], s: SpinS) -> Result<GroupData> {
    let gens = names
        .iter()
        .map(|n| group_rep(n, s))
        .collect::<Result<Vec<_>>>()?;
    if gens.is_empty() {
        return Ok(GroupData::trivial(s.dim() * s.dim()));
    }
    GroupData::generate(&gens)
}

/// `Tr[Aⁱ¹ ⋯ Aⁱᴺ]` for every configuration of `N` sites, first site slowest.
pub fn mps_amplitudes(t: &MPSTensor, sites: usize) -> Vec<C64> {
    let n = t.phys_dim();
    let total = n.pow(sites as u32);
    (0..total)
        .map(|mut k| {
            let mut idx = vec![0; sites];
            for x in (0..sites).rev() {
                idx[x] = k % n;
                k /= n;
            }
            idx.iter()
                .fold(CMat::identity(t.bond_dim(), t.bond_dim()), |acc, &i| {
                    acc * &t.matrices()[i]
                })
                .trace()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::max_abs_diff;

    #[test]
    fn spin_half_is_pauli_over_two() {
        let [sx, sy, sz] = spin_ops(SpinS::half());
        assert_eq!(sx[(0, 1)], c64(0.5, 0.0));
        assert_eq!(sy[(0, 1)], c64(0.0, -0.5));
        assert_eq!(sz[(1, 1)], c64(-0.5, 0.0));
    }

    #[test]
    fn casimir_and_commutator() {
        for two_s in 1..=4 {
            let s = SpinS::new(two_s).unwrap();
            let [sx, sy, sz] = spin_ops(s);
            let cas = &sx * &sx + &sy * &sy + &sz * &sz;
            let v = s.value() * (s.value() + 1.0);
            assert!(max_abs_diff(&cas, &(CMat::identity(s.dim(), s.dim()) * c64(v, 0.0))) < 1e-12);
            let comm = &sx * &sy - &sy * &sx;
            assert!(max_abs_diff(&comm, &(&sz * c64(0.0, 1.0))) < 1e-12);
        }
        let [_, _, sz] = spin_ops(SpinS::one());
        assert_eq!(sz[(0, 0)].re, 1.0);
        assert_eq!(sz[(2, 2)].re, -1.0);
    }

    #[test]
    fn heisenberg_point_is_singlet() {
        let h = pair_hamiltonian(&[-1.0, 0.0, 0.0, 0.0], SpinS::half(), Bond::Intra).unwrap();
        let (vals, _) = eigh(&h).unwrap();
        assert!((vals[0] + 0.75).abs() < 1e-12);
        let t = ground_mps(&[1.0, 0.0, 0.0, 0.0], SpinS::half(), 1e-12).unwrap();
        assert_eq!(t.bond_dim(), 2);
        assert!((t.lambda()[0] - 0.5f64.sqrt()).abs() < 1e-12);
        assert!((t.lambda()[1] - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn field_point_is_product() {
        let n = [0.0, 0.0, 0.0, 1.0];
        let h = pair_hamiltonian(&n, SpinS::half(), Bond::Inter).unwrap();
        assert!((eigh(&h).unwrap().0[0] + 1.0).abs() < 1e-12);
        let t = ground_mps(&n, SpinS::half(), 1e-12).unwrap();
        assert_eq!(t.bond_dim(), 1);
        // |↑⟩_L |↓⟩_R is physical index 0·2 + 1
        assert!((t.matrices()[1][(0, 0)].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn wrong_sector_rejected() {
        let r = pair_hamiltonian(&[0.6, 0.8, 0.0, 0.0], SpinS::half(), Bond::Intra);
        assert!(matches!(r, Err(Error::WrongSector)));
        assert!(matches!(
            group_rep("C3z", SpinS::half()),
            Err(Error::UnknownName(_))
        ));
    }

    #[test]
    fn model_groups_are_linear_representations() {
        for s in [SpinS::half(), SpinS::one()] {
            for (names, order) in [
                (vec!["T"], 2),
                (vec!["C2x", "C2y"], 4),
                (vec!["C2zT"], 2),
                (vec!["Q4z"], 4),
            ] {
                let g = model_group(&names, s).unwrap();
                assert_eq!(g.order(), order, "{names:?}");
                assert!(g.representation_residual() < 1e-12);
            }
        }
    }
}
