use rand::Rng;

use super::EquivariantData;
use crate::error::{Error, Result};
use crate::gcomplex::Cochain;
use crate::gcomplex::Coeff;
use crate::numerics::{c64, conj_if, polar_unitary, CMat, C64};

/// Schmidt values closer than this are treated as one degenerate block.
const BLOCK_TOL: f64 = 1e-10;

/// A simultaneous gauge transformation of the whole tower.
///
/// * `chi00`, `w`: `A(τ) ↦ e^{iχ(τ)} W(τ)† A(τ) W(τ)` with `[W, Λ] = 0`;
/// * `chi01`: `X(Δ) ↦ e^{iχ(Δ)} X(Δ)` on sorted edges;
/// * `chi10`: `V_g(τ) ↦ e^{iχ_g(τ)} V_g(τ)` at index `g·n + τ`, zero for `g = e`.
#[derive(Debug, Clone)]
pub struct GaugeTransform {
    pub chi00: Vec<f64>,
    pub w: Vec<CMat>,
    pub chi01: Vec<f64>,
    pub chi10: Vec<f64>,
}

fn random_unitary(rng: &mut impl Rng, d: usize) -> Result<CMat> {
    let m = CMat::from_fn(d, d, |_, _| {
        c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    polar_unitary(&m)
}

/// Random unitary that mixes only indices with equal Schmidt values.
fn random_block_unitary(rng: &mut impl Rng, lambda: &[f64]) -> Result<CMat> {
    let d = lambda.len();
    let mut w = CMat::zeros(d, d);
    let mut start = 0;
    while start < d {
        let mut end = start + 1;
        while end < d && (lambda[end] - lambda[start]).abs() < BLOCK_TOL {
            end += 1;
        }
        let b = random_unitary(rng, end - start)?;
        w.view_mut((start, start), (end - start, end - start))
            .copy_from(&b);
        start = end;
    }
    Ok(w)
}

impl GaugeTransform {
    /// Uniformly random phases and block unitaries for the given tower.
    pub fn random(eq: &EquivariantData, rng: &mut impl Rng) -> Result<Self> {
        let cx = eq.complex();
        let n = cx.n_vertices();
        let e = cx.group().identity();
        let tau = std::f64::consts::TAU;
        let w = (0..n)
            .map(|v| random_block_unitary(rng, eq.family().tensor(v).lambda()))
            .collect::<Result<Vec<_>>>()?;
        Ok(GaugeTransform {
            chi00: (0..n).map(|_| rng.gen_range(0.0..tau)).collect(),
            w,
            chi01: (0..cx.count(1)).map(|_| rng.gen_range(0.0..tau)).collect(),
            chi10: (0..eq.rep().order() * n)
                .map(|k| {
                    if k / n == e {
                        0.0
                    } else {
                        rng.gen_range(0.0..tau)
                    }
                })
                .collect(),
        })
    }
}

impl EquivariantData {
    /// The tower of the gauge-transformed family, obtained by transforming `V`
    /// and `A⁽¹⁰⁾` directly:
    /// `V_g(τ) ↦ e^{iχ_g(τ)} W(gτ)† V_g(τ) W(τ)^{φ_g}` and
    /// `A⁽¹⁰⁾_g(τ) ↦ A⁽¹⁰⁾_g(τ) − φ_g χ(τ) + χ(gτ)`.
    pub fn gauge_transform(&self, gt: &GaugeTransform) -> Result<Self> {
        let cx = self.complex().clone();
        let n = cx.n_vertices();
        let m = self.rep.order();
        let e = cx.group().identity();
        if gt.chi00.len() != n
            || gt.w.len() != n
            || gt.chi01.len() != cx.count(1)
            || gt.chi10.len() != m * n
        {
            return Err(Error::DimensionMismatch(
                "gauge transformation does not match the complex".into(),
            ));
        }
        if (0..n).any(|v| gt.chi10[e * n + v] != 0.0) {
            return Err(Error::PreconditionViolated(
                "χ⁽¹⁰⁾ must vanish on the identity".into(),
            ));
        }
        let fam = self
            .fam
            .with_vertex_gauge(&gt.chi00, &gt.w)?
            .with_edge_gauge(&gt.chi01)?;
        let v = (0..m * n)
            .map(|k| {
                let (g, tau) = (k / n, k % n);
                let gv = cx.act_vertex(g, tau);
                gt.w[gv].adjoint()
                    * &self.v[k]
                    * conj_if(&gt.w[tau], self.rep.phi(g))
                    * C64::from_polar(1.0, gt.chi10[k])
            })
            .collect();
        let a10 = Cochain::from_fn(&cx, 1, 0, Coeff::Angle, true, |t, i| {
            let g = t[0];
            self.a10.get(t, i) - self.rep.phi(g) as f64 * gt.chi00[i]
                + gt.chi00[cx.act_vertex(g, i)]
        });
        let mut out = EquivariantData::from_parts(fam, self.rep.clone(), v, a10, self.quality)?;
        out.named = self.named.clone();
        Ok(out)
    }
}
