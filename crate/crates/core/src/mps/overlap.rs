use serde::Serialize;

use super::tensor::{mixed_transfer, MPSTensor};
use crate::error::{Error, Result};
use crate::numerics::{dominant_eigenpair, CMat, C64};

/// Dominant eigenpair of the mixed transfer matrix of an oriented edge.
///
/// `x` solves `Σᵢ A₀ⁱ X A₁ⁱ† = μ X`, has unit Frobenius norm and canonical phase.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeOverlap {
    #[serde(serialize_with = "ser_c64")]
    pub mu: C64,
    #[serde(skip)]
    pub x: CMat,
    pub a01: f64,
}

fn ser_c64<S: serde::Serializer>(z: &C64, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&z.re)?;
    t.serialize_element(&z.im)?;
    t.end()
}

impl EdgeOverlap {
    /// The reversed edge: `μ*` and `X†`.
    pub fn reversed(&self) -> EdgeOverlap {
        EdgeOverlap {
            mu: self.mu.conj(),
            x: self.x.adjoint(),
            a01: -self.a01,
        }
    }
}

/// Overlap data of the edge `(t0, t1)`. Bond dimensions may differ.
pub fn edge_overlap(t0: &MPSTensor, t1: &MPSTensor, gap_tol: f64) -> Result<EdgeOverlap> {
    if t0.phys_dim() != t1.phys_dim() {
        return Err(Error::DimensionMismatch(
            "physical dimensions differ across an edge".into(),
        ));
    }
    let t = mixed_transfer(t0.matrices(), t1.matrices());
    let (mu, v) = dominant_eigenpair(&t, gap_tol).map_err(|e| match e {
        Error::DegenerateDominantEigenvalue { ratio } => Error::NotClose {
            edge: Vec::new(),
            detail: format!("gap ratio {ratio:.3e}"),
        },
        e => e,
    })?;
    let x = CMat::from_column_slice(t0.bond_dim(), t1.bond_dim(), v.as_slice());
    Ok(EdgeOverlap {
        mu,
        x,
        a01: mu.arg(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Tolerances;
    use crate::mps::{apply_gauge, right_canonicalize};
    use crate::numerics::{c64, polar_unitary};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_tensor(seed: u64, d: usize) -> MPSTensor {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw: Vec<CMat> = (0..2)
            .map(|_| {
                CMat::from_fn(d, d, |_, _| {
                    c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                })
            })
            .collect();
        right_canonicalize(&raw, &Tolerances::default()).unwrap()
    }

    #[test]
    fn self_overlap_is_normalized_identity() {
        let t = random_tensor(1, 3);
        let e = edge_overlap(&t, &t, 1e-6).unwrap();
        assert!((e.mu - c64(1.0, 0.0)).norm() < 1e-10);
        let id = CMat::identity(3, 3) / c64(3f64.sqrt(), 0.0);
        assert!((&e.x - id).norm() < 1e-9);
    }

    #[test]
    fn gauge_transform_is_recovered() {
        let t = random_tensor(2, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        // a diagonal W commutes with the nondegenerate Λ
        let w = CMat::from_diagonal(&nalgebra::DVector::from_fn(2, |_, _| {
            C64::from_polar(1.0, rng.gen_range(0.0..6.0))
        }));
        let g = apply_gauge(&t, 0.9, &w).unwrap();
        let e = edge_overlap(&t, &g, 1e-6).unwrap();
        assert!((e.a01 + 0.9).abs() < 1e-10);
        let v = polar_unitary(&(e.x.clone() * c64(2f64.sqrt(), 0.0))).unwrap();
        let ratio = v[(0, 0)] / w[(0, 0)];
        assert!((&v - &w * ratio).norm() < 1e-9);
    }

    #[test]
    fn rectangular_overlap() {
        let t0 = random_tensor(4, 2);
        let t1 = MPSTensor::product(&[c64(0.6, 0.0), c64(0.0, 0.8)]);
        let e = edge_overlap(&t0, &t1, 1e-6).unwrap();
        assert_eq!((e.x.nrows(), e.x.ncols()), (2, 1));
        let r = e.reversed();
        assert_eq!(r.x, e.x.adjoint());
    }
}
