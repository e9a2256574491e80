//! Symmetric triangulations of spheres, plus the grid and polygon complexes used
//! for free actions and for short loops.

use std::collections::HashMap;
use std::f64::consts::TAU;

use nalgebra::DMatrix;

use super::{GComplex, MeshLabel};
use crate::error::{Error, Result};

type Tops = Vec<Vec<usize>>;

/// Sign of the determinant of the coordinate rows of `tuple`.
fn orientation_sign(coords: &[Vec<f64>], tuple: &[usize]) -> Result<i8> {
    let n = tuple.len();
    let m = DMatrix::from_fn(n, n, |r, c| coords[tuple[r]][c]);
    let det = m.determinant();
    if det.abs() < 1e-14 {
        return Err(Error::NotSimplicial(format!(
            "degenerate simplex {tuple:?}"
        )));
    }
    Ok(if det > 0.0 { 1 } else { -1 })
}

fn normalize(mut x: Vec<f64>) -> Vec<f64> {
    let n = x.iter().map(|c| c * c).sum::<f64>().sqrt();
    x.iter_mut().for_each(|c| *c /= n);
    x
}

/// Registers the projected midpoint of every edge of `tops` and returns a lookup
/// from sorted vertex pair to the new vertex.
fn add_midpoints(coords: &mut Vec<Vec<f64>>, tops: &Tops) -> HashMap<(usize, usize), usize> {
    let mut mid = HashMap::new();
    for t in tops {
        for a in 0..t.len() {
            for b in (a + 1)..t.len() {
                let key = (t[a].min(t[b]), t[a].max(t[b]));
                mid.entry(key).or_insert_with(|| {
                    let p = normalize(
                        coords[key.0]
                            .iter()
                            .zip(&coords[key.1])
                            .map(|(x, y)| x + y)
                            .collect(),
                    );
                    coords.push(p);
                    coords.len() - 1
                });
            }
        }
    }
    mid
}

fn m_of(mid: &HashMap<(usize, usize), usize>, a: usize, b: usize) -> usize {
    mid[&(a.min(b), a.max(b))]
}

/// Signed permutation matrices that preserve the pairing {{0,3},{1,2}} of the
/// coordinates of ℝ⁴. This 2-group of order 128 contains all sign flips, the
/// antipodal map and the quarter-turn in the (n₁, n₂) plane.
pub fn mesh_symmetry_matrices() -> Vec<DMatrix<f64>> {
    let perms: [[usize; 4]; 8] = [
        [0, 1, 2, 3],
        [0, 2, 1, 3],
        [3, 1, 2, 0],
        [3, 2, 1, 0],
        [1, 0, 3, 2],
        [2, 0, 3, 1],
        [1, 3, 0, 2],
        [2, 3, 0, 1],
    ];
    let mut out = Vec::with_capacity(128);
    for p in perms {
        for signs in 0..16u32 {
            let mut m = DMatrix::zeros(4, 4);
            for (r, &c) in p.iter().enumerate() {
                m[(r, c)] = if signs >> r & 1 == 1 { -1.0 } else { 1.0 };
            }
            out.push(m);
        }
    }
    out
}

fn match_permutation(coords: &[Vec<f64>], m: &DMatrix<f64>) -> Vec<usize> {
    let key = |x: &[f64]| -> Vec<i64> { x.iter().map(|c| (c * 1e6).round() as i64).collect() };
    let table: HashMap<Vec<i64>, usize> = coords
        .iter()
        .enumerate()
        .map(|(i, c)| (key(c), i))
        .collect();
    coords
        .iter()
        .map(|c| {
            let img: Vec<f64> = (0..4)
                .map(|r| (0..4).map(|k| m[(r, k)] * c[k]).sum())
                .collect();
            table[&key(&img)]
        })
        .collect()
}

type Pairing = [(usize, usize); 2];

fn canonical_pairing(p: Pairing) -> Pairing {
    let mut a = [
        (p[0].0.min(p[0].1), p[0].0.max(p[0].1)),
        (p[1].0.min(p[1].1), p[1].0.max(p[1].1)),
    ];
    a.sort();
    a
}

/// Chooses, for every tetrahedron, which pair of opposite edges carries the
/// diagonal of the interior octahedron. The choice is made on one tetrahedron per
/// orbit of the symmetry group, among the pairings fixed by its stabilizer, and
/// transported to the rest of the orbit, so the refined mesh keeps the symmetry.
fn equivariant_diagonals(coords: &[Vec<f64>], tops: &Tops) -> Vec<Pairing> {
    let perms: Vec<Vec<usize>> = mesh_symmetry_matrices()
        .iter()
        .map(|m| match_permutation(coords, m))
        .collect();
    let index: HashMap<Vec<usize>, usize> = tops
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let mut s = t.clone();
            s.sort();
            (s, i)
        })
        .collect();
    let image = |g: &[usize], t: &[usize]| -> usize {
        let mut s: Vec<usize> = t.iter().map(|&v| g[v]).collect();
        s.sort();
        index[&s]
    };
    let map_pairing = |g: &[usize], p: Pairing| {
        canonical_pairing([(g[p[0].0], g[p[0].1]), (g[p[1].0], g[p[1].1])])
    };
    let mut choice: Vec<Option<Pairing>> = vec![None; tops.len()];
    for (i, t) in tops.iter().enumerate() {
        if choice[i].is_some() {
            continue;
        }
        let candidates = [
            canonical_pairing([(t[0], t[1]), (t[2], t[3])]),
            canonical_pairing([(t[0], t[2]), (t[1], t[3])]),
            canonical_pairing([(t[0], t[3]), (t[1], t[2])]),
        ];
        let stab: Vec<&Vec<usize>> = perms.iter().filter(|g| image(g, t) == i).collect();
        let length = |p: &Pairing| -> f64 {
            let m = |a: usize, b: usize| {
                normalize(
                    coords[a]
                        .iter()
                        .zip(&coords[b])
                        .map(|(x, y)| x + y)
                        .collect(),
                )
            };
            let (x, y) = (m(p[0].0, p[0].1), m(p[1].0, p[1].1));
            x.iter()
                .zip(&y)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
        };
        let best = candidates
            .iter()
            .filter(|p| stab.iter().all(|g| map_pairing(g, **p) == **p))
            .min_by(|a, b| {
                // lengths within rounding count as equal so the tie-break decides
                let (la, lb) = (length(a), length(b));
                if (la - lb).abs() < 1e-12 {
                    a.cmp(b)
                } else {
                    la.total_cmp(&lb)
                }
            })
            .copied()
            .expect("a 2-group always fixes one of three pairings");
        for g in &perms {
            let j = image(g, t);
            let p = map_pairing(g, best);
            match choice[j] {
                None => choice[j] = Some(p),
                Some(q) => debug_assert_eq!(q, p, "inconsistent diagonal transport"),
            }
        }
    }
    choice
        .into_iter()
        .map(|c| c.expect("every orbit visited"))
        .collect()
}

fn refine_tets(coords: &mut Vec<Vec<f64>>, tops: &Tops) -> Tops {
    let diagonals = equivariant_diagonals(coords, tops);
    let mid = add_midpoints(coords, tops);
    let mut out = Vec::with_capacity(8 * tops.len());
    for (t, diag) in tops.iter().zip(&diagonals) {
        for &a in t {
            let mut s = vec![a];
            s.extend(t.iter().filter(|&&b| b != a).map(|&b| m_of(&mid, a, b)));
            out.push(s);
        }
        let [(x, y), (z, w)] = *diag;
        let p = m_of(&mid, x, y);
        let q = m_of(&mid, z, w);
        let cycle = [
            m_of(&mid, x, z),
            m_of(&mid, x, w),
            m_of(&mid, y, w),
            m_of(&mid, y, z),
        ];
        for k in 0..4 {
            out.push(vec![p, q, cycle[k], cycle[(k + 1) % 4]]);
        }
    }
    out
}

fn refine_triangles(coords: &mut Vec<Vec<f64>>, tops: &Tops) -> Tops {
    let mid = add_midpoints(coords, tops);
    let mut out = Vec::with_capacity(4 * tops.len());
    for t in tops {
        let (a, b, c) = (t[0], t[1], t[2]);
        let (ab, bc, ca) = (m_of(&mid, a, b), m_of(&mid, b, c), m_of(&mid, c, a));
        out.extend([
            vec![a, ab, ca],
            vec![b, bc, ab],
            vec![c, ca, bc],
            vec![ab, bc, ca],
        ]);
    }
    out
}

/// Cross-polytope vertices `±e_i` in ℝ^{d+1}, ordered `+e_0, −e_0, +e_1, …`.
fn cross_polytope(d: usize) -> (Vec<Vec<f64>>, Tops) {
    let n = d + 1;
    let mut coords = Vec::with_capacity(2 * n);
    for i in 0..n {
        for s in [1.0, -1.0] {
            let mut x = vec![0.0; n];
            x[i] = s;
            coords.push(x);
        }
    }
    let tops = (0..(1usize << n))
        .map(|signs| (0..n).map(|i| 2 * i + (signs >> i & 1)).collect())
        .collect();
    (coords, tops)
}

/// Symmetric triangulation of the unit sphere Sᵈ for `d ∈ {1, 2, 3}`.
///
/// `d = 1` gives the regular `2^(r+2)`-gon; `d = 2, 3` start from the boundary of
/// the octahedron or the 16-cell and apply `r` rounds of edge-midpoint
/// subdivision followed by radial projection. A top simplex is positively
/// oriented when the determinant of its coordinate rows is negative. With this
/// choice the spin-S families below have Chern and DDKS numbers +2S.
pub fn build_sphere_complex(dim: usize, refinements: usize) -> Result<GComplex> {
    let label = MeshLabel {
        kind: "sphere".into(),
        dim,
        refinements: Some(refinements),
    };
    let (coords, tops) = match dim {
        1 => {
            let n = 1usize << (refinements + 2);
            let coords = (0..n)
                .map(|k| {
                    vec![
                        (TAU * k as f64 / n as f64).cos(),
                        (TAU * k as f64 / n as f64).sin(),
                    ]
                })
                .collect();
            (coords, (0..n).map(|k| vec![k, (k + 1) % n]).collect())
        }
        2 | 3 => {
            let (mut coords, mut tops) = cross_polytope(dim);
            for _ in 0..refinements {
                tops = if dim == 2 {
                    refine_triangles(&mut coords, &tops)
                } else {
                    refine_tets(&mut coords, &tops)
                };
            }
            (coords, tops)
        }
        d => return Err(Error::UnsupportedDimension(d)),
    };
    let tops = tops
        .into_iter()
        .map(|mut t| {
            t.sort();
            let s = -orientation_sign(&coords, &t)?;
            Ok((t, s))
        })
        .collect::<Result<Vec<_>>>()?;
    GComplex::from_top_simplices(dim, coords, tops, label)
}

/// A closed polygon with `n` vertices on the unit circle of the coordinate plane
/// spanned by axes `(a, b)` inside ℝ^`ambient`, starting on the positive `a` axis.
pub fn build_polygon_in_plane(n: usize, ambient: usize, axes: (usize, usize)) -> Result<GComplex> {
    if n < 3 || axes.0 >= ambient || axes.1 >= ambient || axes.0 == axes.1 {
        return Err(Error::PreconditionViolated(
            "polygon needs n ≥ 3 and two distinct axes".into(),
        ));
    }
    let coords = (0..n)
        .map(|k| {
            let t = TAU * k as f64 / n as f64;
            let mut x = vec![0.0; ambient];
            x[axes.0] = t.cos();
            x[axes.1] = t.sin();
            x
        })
        .collect();
    let tops = (0..n).map(|k| (vec![k, (k + 1) % n], 1)).collect();
    let label = MeshLabel {
        kind: "polygon".into(),
        dim: 1,
        refinements: None,
    };
    GComplex::from_top_simplices(1, coords, tops, label)
}

/// Periodic `n1 × n2` grid on the torus, embedded in ℝ⁴ as a product of circles.
/// Vertex `(i, j)` has index `i * n2 + j`; each square is cut along its
/// `(i, j)–(i+1, j+1)` diagonal and oriented counterclockwise in `(i, j)`.
pub fn build_torus_grid(n1: usize, n2: usize) -> Result<GComplex> {
    if n1 < 3 || n2 < 3 {
        return Err(Error::PreconditionViolated(
            "torus grid needs at least 3 points per direction".into(),
        ));
    }
    let idx = |i: usize, j: usize| (i % n1) * n2 + (j % n2);
    let coords = (0..n1 * n2)
        .map(|k| {
            let (s, t) = (
                TAU * (k / n2) as f64 / n1 as f64,
                TAU * (k % n2) as f64 / n2 as f64,
            );
            vec![s.cos(), s.sin(), t.cos(), t.sin()]
        })
        .collect();
    let mut tops = Vec::with_capacity(2 * n1 * n2);
    for i in 0..n1 {
        for j in 0..n2 {
            for tri in [
                [idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)],
                [idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)],
            ] {
                tops.push((tri.to_vec(), 1));
            }
        }
    }
    let label = MeshLabel {
        kind: "torus".into(),
        dim: 2,
        refinements: None,
    };
    GComplex::from_top_simplices(2, coords, tops, label)
}
