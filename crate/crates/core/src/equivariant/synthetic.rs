//! Symmetric families used to exercise the tower: the dimerized chain on
//! spheres, a family glued from two copies of the chain with a free
//! antiunitary involution, and randomly generated translation-twisted families
//! on torus grids.

use std::f64::consts::TAU;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{build_equivariant, EquivariantData};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::gcomplex::{
    build_sphere_complex, build_torus_grid, Chain, Domains, GComplex, Generator, Group, GroupData,
};
use crate::models::{ground_mps, group_rep, model_group, SpinS};
use crate::mps::{right_canonicalize, MPSFamily, MPSTensor};
use crate::numerics::{c64, CMat, C64};

/// Attaches the parameter action of `rep` to `base`, builds the family from
/// `f` on vertex coordinates and matches it against the action.
pub fn symmetric_family(
    base: GComplex,
    rep: &GroupData,
    tol: Tolerances,
    f: impl Fn(&[f64]) -> Result<MPSTensor> + Sync,
) -> Result<EquivariantData> {
    let cx = if rep.order() == 1 {
        base
    } else {
        base.attach_group_data(rep)?
    };
    let fam = MPSFamily::from_fn(Arc::new(cx), tol, f)?;
    build_equivariant(&fam, rep)
}

/// The dimerized spin-`s` chain on `base` with the group generated by `names`.
pub fn model_equivariant(
    s: SpinS,
    base: GComplex,
    names: &[&str],
    tol: Tolerances,
) -> Result<EquivariantData> {
    let rep = model_group(names, s)?;
    symmetric_family(base, &rep, tol, |n| ground_mps(n, s, tol.trunc_tol))
}

/// The chain pulled back along `n ↦ (n₀² − ½, n₁, n₂, n₃)/‖·‖` on S³, which
/// places a DDKS monopole in each hemisphere `n₀ ≷ 0` with opposite charges.
///
/// The antipodal map acts freely and, combined with time reversal, is a
/// symmetry `σ` (element label `"sigma"`). Both hemispheres contribute flux
/// `2πν`, so `ξ(S³, σ) = π` for spin ½.
pub fn glued_family(s: SpinS, refinements: usize, tol: Tolerances) -> Result<EquivariantData> {
    let t = group_rep("T", s)?;
    let sigma = Generator {
        name: "sigma".into(),
        phi: -1,
        u: t.u,
        param: -DMatrix::<f64>::identity(4, 4),
    };
    let rep = GroupData::generate(&[sigma])?;
    if rep.order() != 2 {
        return Err(Error::PreconditionViolated(
            "σ must be an involution on the site".into(),
        ));
    }
    symmetric_family(build_sphere_complex(3, refinements)?, &rep, tol, |n| {
        let m = [n[0] * n[0] - 0.5, n[1], n[2], n[3]];
        let r = m.iter().map(|x| x * x).sum::<f64>().sqrt();
        ground_mps(&m.map(|x| x / r), s, tol.trunc_tol)
    })
}

/// Shape of a translation-twisted random family on an `n × n` torus grid.
#[derive(Debug, Clone, Copy)]
pub struct TwistedGrid {
    /// Grid points per direction.
    pub n: usize,
    /// Order `m` of each shift; the shift moves `n / m` grid steps.
    pub m: usize,
    pub phys_dim: usize,
    pub bond_dim: usize,
    /// Size of the random modulation around a fixed random tensor.
    pub amplitude: f64,
    pub seed: u64,
}

impl Default for TwistedGrid {
    fn default() -> Self {
        TwistedGrid {
            n: 16,
            m: 4,
            phys_dim: 2,
            bond_dim: 2,
            amplitude: 0.3,
            seed: 7,
        }
    }
}

/// Grid of the given shape whose shifts by `n/m` steps in `i` (and in `j` when
/// `two_shifts`) generate `Z_m` (resp. `Z_m × Z_m`).
fn shifted_grid(shape: &TwistedGrid, two_shifts: bool) -> Result<GComplex> {
    let (n, m) = (shape.n, shape.m);
    if m < 2 || n % m != 0 {
        return Err(Error::PreconditionViolated(
            "the shift order must divide the grid size".into(),
        ));
    }
    let k = n / m;
    let grid = build_torus_grid(n, n)?;
    let shift = |a: usize, b: usize| -> Vec<usize> {
        (0..n * n)
            .map(|v| ((v / n + a * k) % n) * n + (v % n + b * k) % n)
            .collect()
    };
    if two_shifts {
        let group = Group::cyclic_product(m, m, ("s1", "s2"));
        let perms = (0..m * m).map(|g| shift(g / m, g % m)).collect();
        grid.with_action(Arc::new(group), perms)
    } else {
        let perms = (0..m).map(|a| shift(a, 0)).collect();
        grid.with_action(Arc::new(Group::cyclic(m, "s1")), perms)
    }
}

/// A random family on a torus grid, equivariant under shifts that act on the
/// site by diagonal phases.
///
/// Tensors are `Bᵖ(i, j) = e^{i(κₚ i + λₚ j)/k} Cᵖ(i, j)` with `k = n/m` and `C`
/// right-canonical, smooth and periodic under the shifts, so that a shift in
/// `i` acts on the site by `diag(e^{iκₚ})`. With `two_shifts = false` only
/// `i` is shifted and `C` has period `n` in `j`.
pub fn twisted_grid_family(
    shape: &TwistedGrid,
    two_shifts: bool,
    tol: Tolerances,
) -> Result<EquivariantData> {
    let cx = shifted_grid(shape, two_shifts)?;
    let (n, m, d, bd) = (shape.n, shape.m, shape.phys_dim, shape.bond_dim);
    let k = (n / m) as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(shape.seed);
    let step = TAU / m as f64;
    let kappa: Vec<f64> = (0..d).map(|_| step * rng.gen_range(0..m) as f64).collect();
    let lambda: Vec<f64> = (0..d)
        .map(|_| {
            if two_shifts {
                step * rng.gen_range(0..m) as f64
            } else {
                0.0
            }
        })
        .collect();
    let mut random = || -> Vec<CMat> {
        (0..d)
            .map(|_| {
                CMat::from_fn(bd, bd, |_, _| {
                    c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                })
            })
            .collect()
    };
    let modes: Vec<Vec<CMat>> = (0..5).map(|_| random()).collect();
    let j_period = if two_shifts { k } else { n as f64 };

    let tensor = |v: usize| -> Result<MPSTensor> {
        let (i, j) = ((v / n) as f64, (v % n) as f64);
        let (a, b) = (TAU * i / k, TAU * j / j_period);
        let weights = [
            1.0,
            shape.amplitude * a.cos(),
            shape.amplitude * a.sin(),
            shape.amplitude * b.cos(),
            shape.amplitude * b.sin(),
        ];
        let raw: Vec<CMat> = (0..d)
            .map(|p| {
                modes
                    .iter()
                    .zip(weights)
                    .fold(CMat::zeros(bd, bd), |acc, (mode, w)| {
                        acc + &mode[p] * c64(w, 0.0)
                    })
            })
            .collect();
        let c = right_canonicalize(&raw, &tol)?;
        let twisted = c
            .matrices()
            .iter()
            .enumerate()
            .map(|(p, mat)| mat * C64::from_polar(1.0, (kappa[p] * i + lambda[p] * j) / k))
            .collect();
        MPSTensor::from_canonical(twisted, c.lambda().to_vec(), tol.canon_tol)
    };
    let tensors = (0..n * n).map(tensor).collect::<Result<Vec<_>>>()?;

    let group = cx.group().clone();
    let phase_power = |g: usize| -> CMat {
        let (a, b) = if two_shifts { (g / m, g % m) } else { (g, 0) };
        CMat::from_diagonal(&nalgebra::DVector::from_fn(d, |p, _| {
            C64::from_polar(1.0, kappa[p] * a as f64 + lambda[p] * b as f64)
        }))
    };
    let rep = GroupData {
        u: (0..group.order()).map(phase_power).collect(),
        group,
        params: None,
    };
    let fam = MPSFamily::build(Arc::new(cx), tensors, tol)?;
    build_equivariant(&fam, &rep)
}

/// Chains on a shifted grid of the given shape, anchored at grid point `(a, b)`:
///
/// * `plaquette`: the `k × k` block of squares with corner `(a, b)`, `k = n/m`;
/// * `left`: the path `(a, b) → (a + k, b)`, `bottom`: `(a, b) → (a, b + k)`;
/// * `strip`: the squares with `a ≤ i < a + k`, `base`: the loop `i = a`, `j` increasing.
pub fn grid_domains(cx: &GComplex, shape: &TwistedGrid, (a, b): (usize, usize)) -> Result<Domains> {
    let (n, k) = (shape.n, shape.n / shape.m);
    let idx = |i: usize, j: usize| (i % n) * n + j % n;
    let path = |steps: Vec<((usize, usize), (usize, usize))>| -> Result<Chain> {
        steps.into_iter().try_fold(Chain::zero(1), |acc, (p, q)| {
            Ok(acc + cx.simplex_chain(&[idx(p.0, p.1), idx(q.0, q.1)])?)
        })
    };
    let squares = |is: std::ops::Range<usize>, js: std::ops::Range<usize>| -> Result<Chain> {
        let mut c = Chain::zero(2);
        for i in is {
            for j in js.clone() {
                c = c + cx.simplex_chain(&[idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)])?;
                c = c + cx.simplex_chain(&[idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)])?;
            }
        }
        Ok(c)
    };
    let mut d = Domains::default();
    d.chains
        .insert("plaquette".into(), squares(a..a + k, b..b + k)?);
    d.chains.insert(
        "left".into(),
        path((a..a + k).map(|i| ((i, b), (i + 1, b))).collect())?,
    );
    d.chains.insert(
        "bottom".into(),
        path((b..b + k).map(|j| ((a, j), (a, j + 1))).collect())?,
    );
    d.chains.insert("strip".into(), squares(a..a + k, 0..n)?);
    d.chains.insert(
        "base".into(),
        path((0..n).map(|j| ((a, j), (a, j + 1))).collect())?,
    );
    d.points.insert("corner".into(), idx(a, b));
    Ok(d)
}
