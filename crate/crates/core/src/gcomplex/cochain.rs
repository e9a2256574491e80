use serde::{Deserialize, Serialize};

use super::{Chain, GComplex};
use crate::error::{Error, Result};
use crate::numerics::branch_lift;

/// Coefficient group of a cochain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Coeff {
    /// ℝ/2πℤ; values are stored as unreduced reals.
    Angle,
    Real,
}

/// A `(p, q)`-cochain: one value per `p`-tuple of group elements and sorted
/// `q`-simplex. The value on the reversed simplex is the negative.
///
/// With `twisted` set, a group element acts on coefficients by `θ ↦ φ_g θ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cochain {
    p: usize,
    q: usize,
    order: usize,
    n_simplices: usize,
    coeff: Coeff,
    twisted: bool,
    values: Vec<f64>,
}

impl Cochain {
    pub fn zeros(cx: &GComplex, p: usize, q: usize, coeff: Coeff, twisted: bool) -> Self {
        let order = cx.group().order();
        let n_simplices = cx.count(q);
        Cochain {
            p,
            q,
            order,
            n_simplices,
            coeff,
            twisted,
            values: vec![0.0; order.pow(p as u32) * n_simplices],
        }
    }

    /// Fills the cochain from `f(tuple, simplex)`.
    pub fn from_fn(
        cx: &GComplex,
        p: usize,
        q: usize,
        coeff: Coeff,
        twisted: bool,
        mut f: impl FnMut(&[usize], usize) -> f64,
    ) -> Self {
        let mut c = Cochain::zeros(cx, p, q, coeff, twisted);
        for t in 0..c.n_tuples() {
            let tuple = c.tuple_of(t);
            for i in 0..c.n_simplices {
                c.values[t * c.n_simplices + i] = f(&tuple, i);
            }
        }
        c
    }

    pub fn bidegree(&self) -> (usize, usize) {
        (self.p, self.q)
    }
    pub fn coeff(&self) -> Coeff {
        self.coeff
    }
    pub fn twisted(&self) -> bool {
        self.twisted
    }
    pub fn n_tuples(&self) -> usize {
        self.order.pow(self.p as u32)
    }
    pub fn n_simplices(&self) -> usize {
        self.n_simplices
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Flat index of a group tuple, first element most significant.
    pub fn tuple_index(&self, tuple: &[usize]) -> usize {
        debug_assert_eq!(tuple.len(), self.p);
        tuple.iter().fold(0, |acc, &g| acc * self.order + g)
    }

    pub fn tuple_of(&self, mut t: usize) -> Vec<usize> {
        let mut out = vec![0; self.p];
        for k in (0..self.p).rev() {
            out[k] = t % self.order;
            t /= self.order;
        }
        out
    }

    /// Value on the sorted simplex `i`.
    pub fn get(&self, tuple: &[usize], i: usize) -> f64 {
        self.values[self.tuple_index(tuple) * self.n_simplices + i]
    }

    pub fn set(&mut self, tuple: &[usize], i: usize, v: f64) {
        let k = self.tuple_index(tuple) * self.n_simplices + i;
        self.values[k] = v;
    }

    fn at(&self, t: usize, i: usize) -> f64 {
        self.values[t * self.n_simplices + i]
    }

    /// Largest |value|, reduced to `(−π, π]` first for angle cochains.
    pub fn max_abs(&self) -> f64 {
        self.values
            .iter()
            .map(|&v| match self.coeff {
                Coeff::Angle => branch_lift(v).abs(),
                Coeff::Real => v.abs(),
            })
            .fold(0.0, f64::max)
    }

    /// Slot (group tuple, simplex) of the largest |value|, for diagnostics.
    pub fn argmax_abs(&self) -> Option<(Vec<usize>, usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for (k, &v) in self.values.iter().enumerate() {
            let a = match self.coeff {
                Coeff::Angle => branch_lift(v).abs(),
                Coeff::Real => v.abs(),
            };
            if best.is_none_or(|(_, b)| a > b) {
                best = Some((k, a));
            }
        }
        best.map(|(k, a)| (self.tuple_of(k / self.n_simplices), k % self.n_simplices, a))
    }

    pub fn linear_combination(&self, a: f64, other: &Cochain, b: f64) -> Result<Cochain> {
        if self.bidegree() != other.bidegree()
            || self.order != other.order
            || self.n_simplices != other.n_simplices
        {
            return Err(Error::DimensionMismatch(
                "cochains of different shape".into(),
            ));
        }
        let mut out = self.clone();
        for (x, y) in out.values.iter_mut().zip(&other.values) {
            *x = a * *x + b * y;
        }
        Ok(out)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Cochain {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v = f(*v));
        out
    }

    fn check(&self, cx: &GComplex) -> Result<()> {
        if self.order != cx.group().order() || self.n_simplices != cx.count(self.q) {
            return Err(Error::DimensionMismatch(
                "cochain does not belong to this complex".into(),
            ));
        }
        Ok(())
    }
}

impl GComplex {
    /// `f` on the oriented simplex `g·Δ` where `Δ` is sorted simplex `i`.
    fn eval_image(&self, f: &Cochain, t: usize, g: usize, i: usize) -> f64 {
        let (j, s) = self.act_simplex(g, f.q, i);
        s as f64 * f.at(t, j)
    }

    /// Coefficient action `θ ↦ φ_g θ` when twisted.
    fn twist(&self, f: &Cochain, g: usize) -> f64 {
        if f.twisted {
            self.group().phi(g) as f64
        } else {
            1.0
        }
    }

    /// Simplicial coboundary `(df)(Δ) = Σ_j (−1)^j f(∂_jΔ)` in every group slot.
    pub fn d(&self, f: &Cochain) -> Result<Cochain> {
        f.check(self)?;
        let q = f.q + 1;
        if q > self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "d of a cochain of degree {} on a {}-complex",
                f.q,
                self.dim()
            )));
        }
        let mut out = Cochain::zeros(self, f.p, q, f.coeff, f.twisted);
        for t in 0..f.n_tuples() {
            for i in 0..self.count(q) {
                let mut s = 0.0;
                for j in 0..=q {
                    let v = f.at(t, self.face(q, i, j));
                    s += if j % 2 == 0 { v } else { -v };
                }
                out.values[t * out.n_simplices + i] = s;
            }
        }
        Ok(out)
    }

    /// Group coboundary with coefficient action `θ ↦ φ_g θ`, for `p ≤ 2`.
    pub fn delta(&self, f: &Cochain) -> Result<Cochain> {
        f.check(self)?;
        if f.p > 2 {
            return Err(Error::UnsupportedDegree(f.p));
        }
        let grp = self.group().clone();
        let m = grp.order();
        let mut out = Cochain::zeros(self, f.p + 1, f.q, f.coeff, f.twisted);
        let n = f.n_simplices;
        for to in 0..out.n_tuples() {
            let tup = out.tuple_of(to);
            for i in 0..n {
                let v = match f.p {
                    0 => {
                        let g = tup[0];
                        self.twist(f, g) * f.at(0, i) - self.eval_image(f, 0, g, i)
                    }
                    1 => {
                        let (g, h) = (tup[0], tup[1]);
                        self.twist(f, g) * f.at(h, i) - f.at(grp.mul(g, h), i)
                            + self.eval_image(f, g, h, i)
                    }
                    _ => {
                        let (g, h, k) = (tup[0], tup[1], tup[2]);
                        self.twist(f, g) * f.at(h * m + k, i) - f.at(grp.mul(g, h) * m + k, i)
                            + f.at(g * m + grp.mul(h, k), i)
                            - self.eval_image(f, g * m + h, k, i)
                    }
                };
                out.values[to * n + i] = v;
            }
        }
        Ok(out)
    }

    /// Total differential `D = δ + (−1)^p d` on a list of cochains of total degree n,
    /// ordered by increasing `p`. Components that would exceed the complex
    /// dimension are dropped.
    pub fn total_d(&self, f: &[Cochain]) -> Result<Vec<Cochain>> {
        let n = match f.first() {
            Some(c) => c.p + c.q,
            None => return Ok(Vec::new()),
        };
        for (k, c) in f.iter().enumerate() {
            if c.p + c.q != n || (k > 0 && c.p != f[k - 1].p + 1) {
                return Err(Error::DimensionMismatch(
                    "components must have consistent total degree".into(),
                ));
            }
        }
        let mut out: Vec<Cochain> = Vec::new();
        let p_lo = f[0].p;
        let p_hi = f.last().map(|c| c.p).unwrap_or(p_lo);
        for p in p_lo..=p_hi + 1 {
            let q = n + 1 - p;
            if q > self.dim() {
                continue;
            }
            let mut acc: Option<Cochain> = None;
            if p > p_lo {
                acc = Some(self.delta(&f[p - 1 - p_lo])?);
            }
            if p <= p_hi {
                let dd = self.d(&f[p - p_lo])?;
                let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
                acc = Some(match acc {
                    Some(a) => a.linear_combination(1.0, &dd, sign)?,
                    None => dd.map(|v| sign * v),
                });
            }
            if let Some(a) = acc {
                out.push(a);
            }
        }
        Ok(out)
    }

    /// `(f_tuple, c) = Σ_{Δ ∈ c} coeff · f_tuple(Δ)`.
    pub fn pair(&self, f: &Cochain, tuple: &[usize], c: &Chain) -> Result<f64> {
        f.check(self)?;
        if c.dim() != f.q || tuple.len() != f.p {
            return Err(Error::DimensionMismatch(format!(
                "pairing a ({}, {})-cochain with a {}-chain",
                f.p,
                f.q,
                c.dim()
            )));
        }
        let t = f.tuple_index(tuple);
        Ok(c.iter().map(|(i, k)| k as f64 * f.at(t, i)).sum())
    }
}

impl Cochain {
    /// One CSV row per slot: group labels joined by `;`, simplex index, its
    /// vertices joined by spaces, value.
    pub fn write_csv<W: std::io::Write>(&self, cx: &GComplex, w: W) -> Result<()> {
        self.check(cx)?;
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["elements", "simplex", "vertices", "value"])?;
        for t in 0..self.n_tuples() {
            let labels: Vec<&str> = self
                .tuple_of(t)
                .iter()
                .map(|&g| cx.group().label(g))
                .collect();
            for i in 0..self.n_simplices {
                let verts: Vec<String> = cx
                    .simplex(self.q, i)
                    .iter()
                    .map(|v| v.to_string())
                    .collect();
                out.write_record([
                    labels.join(";"),
                    i.to_string(),
                    verts.join(" "),
                    format!("{:.17e}", self.at(t, i)),
                ])?;
            }
        }
        out.flush()?;
        Ok(())
    }
}

/// Integer invariant from a sum of lifted fluxes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantized {
    pub value: i64,
    /// `Σ F / 2π` before rounding.
    pub raw: f64,
    pub residual: f64,
    /// Largest |F| over the simplices of the chain.
    pub max_flux: f64,
}

impl GComplex {
    /// `(1/2π) Σ_{Δ ∈ c} F(Δ)` with `F = branch_lift(dA)`, rounded.
    ///
    /// `connection` is a `(0, q−1)` angle cochain and `c` a closed `q`-chain.
    pub fn flux_integral(&self, connection: &Cochain, c: &Chain, guard: f64) -> Result<Quantized> {
        if connection.p != 0 || c.dim() != connection.q + 1 {
            return Err(Error::DimensionMismatch(
                "flux of a connection over a chain of the wrong degree".into(),
            ));
        }
        if !self.boundary(c)?.is_zero() {
            return Err(Error::NotACycle);
        }
        let da = self.d(connection)?;
        let mut sum = 0.0;
        let mut max_flux = 0.0f64;
        for (i, k) in c.iter() {
            let f = branch_lift(da.at(0, i));
            if f.abs() >= guard {
                return Err(Error::FluxGuardExceeded {
                    simplex: self.simplex(c.dim(), i).to_vec(),
                    flux: f,
                    guard,
                });
            }
            max_flux = max_flux.max(f.abs());
            sum += k as f64 * f;
        }
        let raw = sum / std::f64::consts::TAU;
        let value = raw.round();
        Ok(Quantized {
            value: value as i64,
            raw,
            residual: (raw - value).abs(),
            max_flux,
        })
    }
}
