use serde::Serialize;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::numerics::{
    c64, diag_real, dominant_eigenpair, eigenvalues_by_modulus, eigh, is_finite, CMat, C64,
};

/// A translation-invariant MPS site tensor in right-canonical form.
///
/// `Σᵢ AⁱAⁱ† = 1` and `Σᵢ Aⁱ†Λ²Aⁱ = Λ²` with `Λ = diag(lambda)`, `Tr Λ² = 1` and
/// `lambda` descending.
#[derive(Debug, Clone, PartialEq)]
pub struct MPSTensor {
    a: Vec<CMat>,
    lambda: Vec<f64>,
}

/// Residuals of the right-canonical identities.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CanonicalResiduals {
    pub right: f64,
    pub schmidt: f64,
    pub trace: f64,
}

impl CanonicalResiduals {
    pub fn max(&self) -> f64 {
        self.right.max(self.schmidt).max(self.trace)
    }
}

/// Outcome of [`injectivity_check`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct InjectivityReport {
    pub dominant: f64,
    /// `|μ₂| / |μ₁|` of the transfer matrix.
    pub gap_ratio: f64,
    pub canonical: f64,
}

fn op_norm_residual(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

impl MPSTensor {
    /// Wraps matrices that are already right-canonical, checking the identities
    /// to `canon_tol`.
    pub fn from_canonical(a: Vec<CMat>, lambda: Vec<f64>, canon_tol: f64) -> Result<Self> {
        let t = MPSTensor::from_canonical_unchecked(a, lambda)?;
        let r = t.canonical_residuals().max();
        if r > canon_tol {
            return Err(Error::NotCanonical(r));
        }
        Ok(t)
    }

    /// Shape checks only.
    pub fn from_canonical_unchecked(a: Vec<CMat>, lambda: Vec<f64>) -> Result<Self> {
        let d = lambda.len();
        if a.is_empty() || d == 0 {
            return Err(Error::DimensionMismatch("empty tensor".into()));
        }
        if a.iter().any(|m| m.nrows() != d || m.ncols() != d) {
            return Err(Error::DimensionMismatch(format!(
                "site matrices must be {d}x{d}"
            )));
        }
        if a.iter().any(|m| !is_finite(m)) || lambda.iter().any(|l| !l.is_finite()) {
            return Err(Error::NonFinite("MPS tensor"));
        }
        Ok(MPSTensor { a, lambda })
    }

    /// Product state `⊗ψ` as a bond-dimension-1 tensor. `psi` must be normalized.
    pub fn product(psi: &[C64]) -> Self {
        MPSTensor {
            a: psi.iter().map(|&z| CMat::from_element(1, 1, z)).collect(),
            lambda: vec![1.0],
        }
    }

    pub fn phys_dim(&self) -> usize {
        self.a.len()
    }
    pub fn bond_dim(&self) -> usize {
        self.lambda.len()
    }
    pub fn matrices(&self) -> &[CMat] {
        &self.a
    }
    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    /// `Λ^p` as a diagonal matrix.
    pub fn lambda_pow(&self, p: f64) -> CMat {
        diag_real(&self.lambda.iter().map(|l| l.powf(p)).collect::<Vec<_>>())
    }

    pub fn canonical_residuals(&self) -> CanonicalResiduals {
        let d = self.bond_dim();
        let l2 = self.lambda_pow(2.0);
        let mut right = -CMat::identity(d, d);
        let mut schmidt = -l2.clone();
        for m in &self.a {
            right += m * m.adjoint();
            schmidt += m.adjoint() * &l2 * m;
        }
        let trace = (self.lambda.iter().map(|l| l * l).sum::<f64>() - 1.0).abs();
        CanonicalResiduals {
            right: op_norm_residual(&right),
            schmidt: op_norm_residual(&schmidt),
            trace,
        }
    }

    /// Transfer matrix `Σᵢ conj(Aⁱ) ⊗ Aⁱ` acting on column-major `vec(X)` as
    /// `X ↦ Σᵢ AⁱXAⁱ†`.
    pub fn transfer_matrix(&self) -> CMat {
        mixed_transfer(&self.a, &self.a)
    }
}

/// `Σᵢ conj(A₁ⁱ) ⊗ A₀ⁱ`, the matrix of `X ↦ Σᵢ A₀ⁱ X A₁ⁱ†` on column-major `vec(X)`.
pub fn mixed_transfer(a0: &[CMat], a1: &[CMat]) -> CMat {
    let (d0, d1) = (a0[0].nrows(), a1[0].nrows());
    let mut t = CMat::zeros(d0 * d1, d0 * d1);
    for (m0, m1) in a0.iter().zip(a1) {
        t += m1.map(|z| z.conj()).kronecker(m0);
    }
    t
}

fn unvec(v: &[C64], rows: usize, cols: usize) -> CMat {
    CMat::from_column_slice(rows, cols, v)
}

/// Positive square root and inverse square root of a Hermitian positive matrix.
fn sqrt_and_inv_sqrt(h: &CMat) -> Result<(CMat, CMat)> {
    let (vals, vecs) = eigh(h)?;
    if vals[0] <= 0.0 {
        return Err(Error::NotNormalizable);
    }
    let s = diag_real(&vals.iter().map(|v| v.sqrt()).collect::<Vec<_>>());
    let si = diag_real(&vals.iter().map(|v| 1.0 / v.sqrt()).collect::<Vec<_>>());
    Ok((&vecs * s * vecs.adjoint(), &vecs * si * vecs.adjoint()))
}

/// Hermitian, trace-one version of a fixed point known up to phase.
fn positive_fixed_point(v: &[C64], d: usize) -> CMat {
    let m = unvec(v, d, d);
    let tr = m.trace();
    let m = m / (tr / c64(tr.norm(), 0.0));
    let h = (&m + m.adjoint()) * c64(0.5, 0.0);
    let tr = h.trace().re;
    h / c64(tr, 0.0)
}

/// Brings a raw injective tensor to right-canonical form with descending
/// Schmidt values, dropping those below `trunc_tol`.
pub fn right_canonicalize(raw: &[CMat], tol: &Tolerances) -> Result<MPSTensor> {
    if raw.is_empty() {
        return Err(Error::DimensionMismatch("empty tensor".into()));
    }
    let d = raw[0].nrows();
    if raw.iter().any(|m| m.nrows() != d || m.ncols() != d) {
        return Err(Error::DimensionMismatch(
            "site matrices must be square and equal in size".into(),
        ));
    }
    if raw.iter().any(|m| !is_finite(m)) {
        return Err(Error::NonFinite("right_canonicalize"));
    }
    let t = mixed_transfer(raw, raw);
    let (eta, r) = dominant_eigenpair(&t, tol.gap_tol).map_err(|e| match e {
        Error::DegenerateDominantEigenvalue { ratio } => {
            Error::NotInjective(format!("transfer gap ratio {ratio:.3e}"))
        }
        e => e,
    })?;
    if eta.norm() < 1e-300 {
        return Err(Error::NotNormalizable);
    }
    let scale = c64(eta.norm().sqrt(), 0.0);
    let r = positive_fixed_point(r.as_slice(), d);
    let (w, w_inv) = sqrt_and_inv_sqrt(&r)?;
    // B = W⁻¹ A W satisfies Σ B B† = 1.
    let b: Vec<CMat> = raw.iter().map(|m| &w_inv * m * &w / scale).collect();
    // left fixed point L of X ↦ Σ B† X B
    let bt: Vec<CMat> = b.iter().map(|m| m.adjoint()).collect();
    let tl = mixed_transfer(&bt, &bt);
    let (_, l) = dominant_eigenpair(&tl, tol.gap_tol)?;
    let l = positive_fixed_point(l.as_slice(), d);
    let (vals, vecs) = eigh(&l)?;
    let keep: Vec<usize> = (0..d)
        .rev()
        .filter(|&k| vals[k].max(0.0).sqrt() > tol.trunc_tol)
        .collect();
    if keep.is_empty() {
        return Err(Error::NotNormalizable);
    }
    let u = CMat::from_columns(&keep.iter().map(|&k| vecs.column(k)).collect::<Vec<_>>());
    let lambda: Vec<f64> = keep.iter().map(|&k| vals[k].sqrt()).collect();
    let norm = lambda.iter().map(|l| l * l).sum::<f64>().sqrt();
    let lambda: Vec<f64> = lambda.iter().map(|l| l / norm).collect();
    let a: Vec<CMat> = b.iter().map(|m| u.adjoint() * m * &u).collect();
    MPSTensor::from_canonical_unchecked(a, lambda)
}

/// Checks that the transfer matrix has the unique dominant eigenvalue 1 with a
/// gap, and that the tensor satisfies the canonical identities.
pub fn injectivity_check(t: &MPSTensor, tol: &Tolerances) -> Result<InjectivityReport> {
    let canonical = t.canonical_residuals().max();
    if canonical > tol.canon_tol {
        return Err(Error::NotCanonical(canonical));
    }
    let ev = eigenvalues_by_modulus(&t.transfer_matrix())?;
    let dominant = ev[0].norm();
    let gap_ratio = if ev.len() > 1 {
        ev[1].norm() / dominant
    } else {
        0.0
    };
    if gap_ratio > 1.0 - tol.gap_tol {
        return Err(Error::NotInjective(format!(
            "transfer gap ratio {gap_ratio:.3e}"
        )));
    }
    if (ev[0] - c64(1.0, 0.0)).norm() > tol.eig_tol.max(tol.canon_tol) {
        return Err(Error::NotCanonical((ev[0] - c64(1.0, 0.0)).norm()));
    }
    Ok(InjectivityReport {
        dominant,
        gap_ratio,
        canonical,
    })
}

/// Left-canonical matrices `Bⁱ = Λ Aⁱ Λ⁻¹`, satisfying `Σᵢ Bⁱ†Bⁱ = 1`.
///
/// The right factor is applied as a diagonal solve, column by column.
pub fn to_left_canonical(t: &MPSTensor) -> Vec<CMat> {
    let l = t.lambda();
    t.matrices()
        .iter()
        .map(|m| {
            let mut b = CMat::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)] * l[r]);
            for (c, &lc) in l.iter().enumerate() {
                b.column_mut(c).iter_mut().for_each(|z| *z /= lc);
            }
            b
        })
        .collect()
}

/// Vertex gauge transformation `Aⁱ ↦ e^{iθ} W†AⁱW` with `W` commuting with `Λ`.
pub fn apply_gauge(t: &MPSTensor, theta: f64, w: &CMat) -> Result<MPSTensor> {
    let d = t.bond_dim();
    if w.nrows() != d || w.ncols() != d {
        return Err(Error::DimensionMismatch(format!(
            "gauge matrix must be {d}x{d}"
        )));
    }
    let l = t.lambda_pow(1.0);
    let comm = op_norm_residual(&(w * &l - &l * w));
    if comm > 1e-10 {
        return Err(Error::GaugeNotBlockDiagonal(comm));
    }
    let phase = C64::from_polar(1.0, theta);
    let a = t
        .matrices()
        .iter()
        .map(|m| w.adjoint() * m * w * phase)
        .collect();
    MPSTensor::from_canonical_unchecked(a, t.lambda.clone())
}
