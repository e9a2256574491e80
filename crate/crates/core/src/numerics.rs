//! Dense complex linear algebra and angle arithmetic.
//!
//! All matrices in this crate are small (at most a few dozen rows), so every
//! routine here uses full dense factorizations from `nalgebra`.

use std::f64::consts::{PI, TAU};
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Relative modulus below which two entries count as tied for phase fixing.
const PHASE_TIE_REL: f64 = 1e-9;

pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Reduce `x` to `[0, 2π)`.
pub fn wrap(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Reduce `x` to the branch `(−π, π]`.
pub fn branch_lift(x: f64) -> f64 {
    let r = wrap(x);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Distance between two angles on the circle.
pub fn angle_dist(a: f64, b: f64) -> f64 {
    branch_lift(a - b).abs()
}

/// Distance from `x` to the nearest multiple of `step`, measured modulo 2π.
pub fn quantization_residual(x: f64, step: f64) -> f64 {
    let k = (wrap(x) / step).round();
    angle_dist(x, k * step)
}

/// An angle snapped to the nearest multiple of `2π/n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantizedAngle {
    pub n: u32,
    /// Index `k ∈ 0..n` of the nearest value `2πk/n`.
    pub k: u32,
    pub raw: f64,
    pub residual: f64,
}

impl QuantizedAngle {
    pub fn new(raw: f64, n: u32) -> Self {
        let step = TAU / n as f64;
        let k = ((wrap(raw) / step).round() as u32) % n;
        QuantizedAngle {
            n,
            k,
            raw: wrap(raw),
            residual: quantization_residual(raw, step),
        }
    }
    pub fn value(&self) -> f64 {
        TAU * self.k as f64 / self.n as f64
    }
}

/// An angle stored in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
pub struct Angle(f64);

impl Angle {
    pub fn new(x: f64) -> Self {
        Angle(wrap(x))
    }
    pub fn value(self) -> f64 {
        self.0
    }
    pub fn lift(self) -> LiftedAngle {
        LiftedAngle(branch_lift(self.0))
    }
    pub fn dist(self, other: Angle) -> f64 {
        angle_dist(self.0, other.0)
    }
}

impl From<f64> for Angle {
    fn from(x: f64) -> Self {
        Angle::new(x)
    }
}

impl Add for Angle {
    type Output = Angle;
    fn add(self, rhs: Angle) -> Angle {
        Angle::new(self.0 + rhs.0)
    }
}

impl Sub for Angle {
    type Output = Angle;
    fn sub(self, rhs: Angle) -> Angle {
        Angle::new(self.0 - rhs.0)
    }
}

impl Neg for Angle {
    type Output = Angle;
    fn neg(self) -> Angle {
        Angle::new(-self.0)
    }
}

impl Mul<f64> for Angle {
    type Output = Angle;
    fn mul(self, rhs: f64) -> Angle {
        Angle::new(self.0 * rhs)
    }
}

/// An angle stored in `(−π, π]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
pub struct LiftedAngle(f64);

impl LiftedAngle {
    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<Angle> for LiftedAngle {
    fn from(a: Angle) -> Self {
        a.lift()
    }
}

pub fn is_finite(m: &CMat) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Multiply `v` by a phase so that its largest-modulus entry is real positive.
///
/// Entries within a relative `1e-9` of the maximum modulus are tied and the lowest
/// flat (column-major) index wins.
pub fn canonicalize_phase(v: &mut CMat) {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    let pivot = v
        .iter()
        .find(|z| z.norm() >= max * (1.0 - PHASE_TIE_REL))
        .copied()
        .expect("maximum exists");
    let phase = pivot.conj() / pivot.norm();
    v.iter_mut().for_each(|z| *z *= phase);
}

/// Eigenpair of the eigenvalue of strictly largest modulus.
///
/// The eigenvector has unit 2-norm and canonical phase. Fails when
/// `|μ₂|/|μ₁| > 1 − gap_tol`.
pub fn dominant_eigenpair(m: &CMat, gap_tol: f64) -> Result<(C64, CVec)> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigenproblem on {}x{} matrix",
            m.nrows(),
            m.ncols()
        )));
    }
    if !is_finite(m) {
        return Err(Error::NonFinite("dominant_eigenpair"));
    }
    let n = m.nrows();
    if n == 0 {
        return Err(Error::DimensionMismatch("empty matrix".into()));
    }
    if n == 1 {
        return Ok((m[(0, 0)], CVec::from_element(1, c64(1.0, 0.0))));
    }
    let schur = nalgebra::Schur::try_new(m.clone(), 1e-15, 10_000).ok_or(Error::EigenFailure)?;
    let (q, t) = schur.unpack();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        t[(b, b)]
            .norm()
            .total_cmp(&t[(a, a)].norm())
            .then(a.cmp(&b))
    });
    let k = order[0];
    let lambda = t[(k, k)];
    let top = lambda.norm();
    let ratio = if top == 0.0 {
        1.0
    } else {
        t[(order[1], order[1])].norm() / top
    };
    if ratio > 1.0 - gap_tol {
        return Err(Error::DegenerateDominantEigenvalue { ratio });
    }
    // Back substitution on the triangular factor.
    let mut y = CVec::zeros(n);
    y[k] = c64(1.0, 0.0);
    for j in (0..k).rev() {
        let mut s = C64::default();
        for l in (j + 1)..=k {
            s += t[(j, l)] * y[l];
        }
        y[j] = -s / (t[(j, j)] - lambda);
    }
    let v = &q * y;
    let mut v = CMat::from_column_slice(n, 1, v.as_slice());
    let norm = v.norm();
    v /= c64(norm, 0.0);
    canonicalize_phase(&mut v);
    Ok((lambda, CVec::from_column_slice(v.as_slice())))
}

/// All eigenvalues, sorted by decreasing modulus.
pub fn eigenvalues_by_modulus(m: &CMat) -> Result<Vec<C64>> {
    if !is_finite(m) {
        return Err(Error::NonFinite("eigenvalues"));
    }
    let schur = nalgebra::Schur::try_new(m.clone(), 1e-15, 10_000).ok_or(Error::EigenFailure)?;
    let t = schur.unpack().1;
    let mut ev: Vec<C64> = (0..t.nrows()).map(|i| t[(i, i)]).collect();
    ev.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
    Ok(ev)
}

/// Thin singular value decomposition `M = U diag(σ) V†` with σ descending.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: CMat,
    pub sigma: Vec<f64>,
    pub v: CMat,
}

pub fn svd(m: &CMat) -> Result<Svd> {
    if !is_finite(m) {
        return Err(Error::NonFinite("svd"));
    }
    let dec = SVD::try_new(m.clone(), true, true, 1e-15, 10_000).ok_or(Error::EigenFailure)?;
    let u = dec.u.expect("requested U");
    let v_t = dec.v_t.expect("requested V^T");
    let s = dec.singular_values;
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&a, &b| s[b].total_cmp(&s[a]).then(a.cmp(&b)));
    let k = order.len();
    let mut uu = CMat::zeros(m.nrows(), k);
    let mut vv = CMat::zeros(m.ncols(), k);
    let mut sigma = Vec::with_capacity(k);
    for (c, &i) in order.iter().enumerate() {
        uu.set_column(c, &u.column(i));
        vv.set_column(c, &v_t.row(i).adjoint());
        sigma.push(s[i]);
    }
    Ok(Svd {
        u: uu,
        sigma,
        v: vv,
    })
}

/// Eigendecomposition of a Hermitian matrix with eigenvalues ascending.
pub fn eigh(h: &CMat) -> Result<(Vec<f64>, CMat)> {
    if !is_finite(h) {
        return Err(Error::NonFinite("eigh"));
    }
    let herm = (h + h.adjoint()) * c64(0.5, 0.0);
    let dec = SymmetricEigen::try_new(herm, 1e-15, 10_000).ok_or(Error::EigenFailure)?;
    let n = h.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        dec.eigenvalues[a]
            .total_cmp(&dec.eigenvalues[b])
            .then(a.cmp(&b))
    });
    let mut vecs = CMat::zeros(n, n);
    let mut vals = Vec::with_capacity(n);
    for (c, &i) in order.iter().enumerate() {
        vecs.set_column(c, &dec.eigenvectors.column(i));
        vals.push(dec.eigenvalues[i]);
    }
    Ok((vals, vecs))
}

/// `exp(iθH)` for Hermitian `H`.
pub fn expm_i_hermitian(h: &CMat, theta: f64) -> Result<CMat> {
    let (vals, vecs) = eigh(h)?;
    let d = CMat::from_diagonal(&CVec::from_iterator(
        vals.len(),
        vals.iter().map(|&l| C64::from_polar(1.0, theta * l)),
    ));
    Ok(&vecs * d * vecs.adjoint())
}

/// Unitary factor of the polar decomposition `M = U P`.
pub fn polar_unitary(m: &CMat) -> Result<CMat> {
    let s = svd(m)?;
    Ok(&s.u * s.v.adjoint())
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Entrywise conjugate when `phi = −1`, identity otherwise.
pub fn conj_if(m: &CMat, phi: i8) -> CMat {
    if phi < 0 {
        m.map(|z| z.conj())
    } else {
        m.clone()
    }
}

/// Largest entry modulus of `a − b`.
pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Real diagonal matrix as a complex matrix.
pub fn diag_real(d: &[f64]) -> CMat {
    CMat::from_diagonal(&CVec::from_iterator(
        d.len(),
        d.iter().map(|&x| c64(x, 0.0)),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn dominant_of_diagonal() {
        let m = diag_real(&[2.0, 1.0]);
        let (l, v) = dominant_eigenpair(&m, 1e-6).unwrap();
        assert!((l - c64(2.0, 0.0)).norm() < 1e-14);
        assert!((v[0] - c64(1.0, 0.0)).norm() < 1e-14 && v[1].norm() < 1e-14);
    }

    #[test]
    fn swap_matrix_is_degenerate() {
        let m = CMat::from_row_slice(2, 2, &[c64(0., 0.), c64(1., 0.), c64(1., 0.), c64(0., 0.)]);
        assert!(matches!(
            dominant_eigenpair(&m, 1e-6),
            Err(Error::DegenerateDominantEigenvalue { .. })
        ));
    }

    #[test]
    fn rejects_nan() {
        let mut m = identity(2);
        m[(0, 1)] = c64(f64::NAN, 0.0);
        assert!(matches!(
            dominant_eigenpair(&m, 1e-6),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn phase_is_deterministic() {
        let m = CMat::from_fn(5, 5, |i, j| {
            c64((i * 3 + j) as f64 * 0.1, (i as f64 - j as f64) * 0.2)
        });
        let a = dominant_eigenpair(&m, 1e-6).unwrap();
        let b = dominant_eigenpair(&m, 1e-6).unwrap();
        assert_eq!(a.0, b.0);
        assert_eq!(a.1, b.1);
    }

    #[test]
    fn svd_identity_and_rank_one() {
        let s = svd(&identity(2)).unwrap();
        assert_eq!(s.sigma, vec![1.0, 1.0]);
        let m = CMat::from_row_slice(2, 2, &[c64(0., 0.), c64(2., 0.), c64(0., 0.), c64(0., 0.)]);
        let s = svd(&m).unwrap();
        assert!((s.sigma[0] - 2.0).abs() < 1e-14 && s.sigma[1].abs() < 1e-14);
    }

    #[test]
    fn branch_lift_examples() {
        assert_eq!(branch_lift(0.0), 0.0);
        assert!((branch_lift(1.5 * PI) + 0.5 * PI).abs() < 1e-15);
        assert_eq!(branch_lift(PI), PI);
        assert_eq!(branch_lift(-PI), PI);
    }

    #[test]
    fn angle_arithmetic_wraps() {
        let a = Angle::new(1.5 * PI) + Angle::new(PI);
        assert!((a.value() - 0.5 * PI).abs() < 1e-14);
        assert!((-Angle::new(0.25)).value() > PI);
        assert!(((Angle::new(PI) * 3.0).value() - PI).abs() < 1e-12);
    }

    #[test]
    fn expm_of_pauli() {
        let sx = CMat::from_row_slice(2, 2, &[c64(0., 0.), c64(1., 0.), c64(1., 0.), c64(0., 0.)]);
        let u = expm_i_hermitian(&sx, PI / 2.0).unwrap();
        let expect =
            CMat::from_row_slice(2, 2, &[c64(0., 0.), c64(0., 1.), c64(0., 1.), c64(0., 0.)]);
        assert!(max_abs_diff(&u, &expect) < 1e-14);
    }

    proptest! {
        #[test]
        fn lift_differs_by_multiple_of_tau(x in -100.0f64..100.0) {
            let l = branch_lift(x);
            prop_assert!(l > -PI && l <= PI);
            let k = (x - l) / TAU;
            prop_assert!((k - k.round()).abs() < 1e-12);
        }

        #[test]
        fn polar_factor_is_unitary(v in proptest::collection::vec(-1.0f64..1.0, 18)) {
            let m = CMat::from_fn(3, 3, |i, j| c64(v[2 * (3 * i + j)], v[2 * (3 * i + j) + 1]));
            prop_assume!(svd(&m).unwrap().sigma[2] > 1e-3);
            let u = polar_unitary(&m).unwrap();
            prop_assert!(max_abs_diff(&(u.adjoint() * &u), &identity(3)) < 1e-12);
        }
    }
}
