use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::EquivariantData;
use crate::error::{Error, Result};
use crate::gcomplex::{Chain, Domains};
use crate::numerics::{angle_dist, branch_lift, wrap, QuantizedAngle};

/// Two independent evaluations of the same angle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Relation {
    pub name: String,
    /// The fixed-point or boundary formula, in `[0, 2π)`.
    pub formula: f64,
    /// The directly computed side, in `[0, 2π)`.
    pub direct: f64,
    pub residual: f64,
    /// DDKS number of the whole complex when the relation involves it.
    pub nu: Option<i64>,
}

/// Higher Berry phase of a closed surface, quantized when an antiunitary
/// element maps the surface to itself.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gamma2 {
    pub value: f64,
    pub quantized: Option<QuantizedAngle>,
}

/// Every SPT invariant defined at a vertex, keyed by element labels.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SptInvariants {
    pub mu_t: BTreeMap<String, QuantizedAngle>,
    pub mu_rp: BTreeMap<String, QuantizedAngle>,
    pub mu_kb: BTreeMap<String, QuantizedAngle>,
}

impl EquivariantData {
    fn quantize(&self, what: &str, raw: f64, n: u32) -> Result<QuantizedAngle> {
        let q = QuantizedAngle::new(raw, n);
        if q.residual > self.fam.tolerances().quantization_tol {
            return Err(Error::NotQuantized {
                what: what.into(),
                value: q.raw,
                residual: q.residual,
            });
        }
        Ok(q)
    }

    fn relation(&self, name: &str, formula: f64, direct: f64, nu: Option<i64>) -> Result<Relation> {
        let (formula, direct) = (wrap(formula), wrap(direct));
        let residual = angle_dist(formula, direct);
        if residual > self.fam.tolerances().quantization_tol {
            return Err(Error::RelationViolated {
                name: name.into(),
                lhs: formula,
                rhs: direct,
                residual,
            });
        }
        Ok(Relation {
            name: name.into(),
            formula,
            direct,
            residual,
            nu,
        })
    }

    fn stabilizes(&self, g: usize, tau: usize) -> Result<()> {
        if self.complex().act_vertex(g, tau) != tau {
            return Err(Error::NotStabilized {
                element: g,
                vertex: tau,
            });
        }
        Ok(())
    }

    fn unitary(&self, g: usize, what: &str) -> Result<()> {
        if self.rep.phi(g) != 1 {
            return Err(Error::PreconditionViolated(format!(
                "{what} must be unitary"
            )));
        }
        Ok(())
    }

    fn antiunitary_involution(&self, a: usize, what: &str) -> Result<()> {
        let grp = self.complex().group();
        if self.rep.phi(a) != -1 || grp.mul(a, a) != grp.identity() {
            return Err(Error::PreconditionViolated(format!(
                "{what} must be an antiunitary involution"
            )));
        }
        Ok(())
    }

    fn check_chain(&self, lhs: &Chain, rhs: &Chain, what: &str) -> Result<()> {
        if lhs != rhs {
            return Err(Error::BadDecomposition(what.into()));
        }
        Ok(())
    }

    fn pair11(&self, g: usize, c: &Chain) -> Result<f64> {
        self.complex().pair(&self.a11, &[g], c)
    }

    fn a20_at(&self, g: usize, h: usize, tau: usize) -> f64 {
        self.a20.get(&[g, h], tau)
    }

    /// DDKS number of the fundamental class.
    pub fn ddks(&self) -> Result<i64> {
        Ok(self.fam.ddks(&self.complex().fundamental_class())?.value)
    }

    /// `μᵀ_{g,h}(τ) = A⁽²⁰⁾_{g,h}(τ) − A⁽²⁰⁾_{h,g}(τ)` for commuting unitaries fixing `τ`.
    pub fn mu_t(&self, g: usize, h: usize, tau: usize) -> Result<QuantizedAngle> {
        self.unitary(g, "g")?;
        self.unitary(h, "h")?;
        if !self.complex().group().commute(g, h) {
            return Err(Error::PreconditionViolated("g and h must commute".into()));
        }
        self.stabilizes(g, tau)?;
        self.stabilizes(h, tau)?;
        self.quantize("muT", self.a20_at(g, h, tau) - self.a20_at(h, g, tau), 2)
    }

    /// `μᴿᴾ_a(τ) = A⁽²⁰⁾_{a,a}(τ)` for an antiunitary involution fixing `τ`.
    pub fn mu_rp(&self, a: usize, tau: usize) -> Result<QuantizedAngle> {
        self.antiunitary_involution(a, "a")?;
        self.stabilizes(a, tau)?;
        self.quantize("muRP", self.a20_at(a, a, tau), 2)
    }

    /// `μᴷᴮ_{a,g}(τ) = A⁽²⁰⁾_{a,g⁻¹} + A⁽²⁰⁾_{g,g⁻¹} − A⁽²⁰⁾_{g,a}` for antiunitary `a`
    /// and unitary `g` with `ag⁻¹ = ga`.
    pub fn mu_kb(&self, a: usize, g: usize, tau: usize) -> Result<QuantizedAngle> {
        let grp = self.complex().group();
        let gi = grp.inv(g);
        if self.rep.phi(a) != -1 || self.rep.phi(g) != 1 || grp.mul(a, gi) != grp.mul(g, a) {
            return Err(Error::PreconditionViolated(
                "muKB needs antiunitary a, unitary g and a g⁻¹ = g a".into(),
            ));
        }
        self.stabilizes(a, tau)?;
        self.stabilizes(g, tau)?;
        let raw = self.a20_at(a, gi, tau) + self.a20_at(g, gi, tau) - self.a20_at(g, a, tau);
        self.quantize("muKB", raw, 2)
    }

    /// All SPT invariants whose preconditions hold at `τ`, skipping the identity.
    pub fn spt_invariants(&self, tau: usize) -> Result<SptInvariants> {
        let grp = self.complex().group().clone();
        let e = grp.identity();
        let stab: Vec<usize> = (0..grp.order())
            .filter(|&g| g != e && self.complex().act_vertex(g, tau) == tau)
            .collect();
        let mut out = SptInvariants::default();
        for (i, &g) in stab.iter().enumerate() {
            for &h in &stab[i + 1..] {
                if grp.phi(g) == 1 && grp.phi(h) == 1 && grp.commute(g, h) {
                    out.mu_t.insert(
                        format!("{},{}", grp.label(g), grp.label(h)),
                        self.mu_t(g, h, tau)?,
                    );
                }
            }
        }
        for &a in &stab {
            if grp.phi(a) == -1 && grp.mul(a, a) == e {
                out.mu_rp
                    .insert(grp.label(a).to_string(), self.mu_rp(a, tau)?);
            }
            if grp.phi(a) == -1 {
                for &g in &stab {
                    if grp.phi(g) == 1 && grp.mul(a, grp.inv(g)) == grp.mul(g, a) {
                        out.mu_kb.insert(
                            format!("{},{}", grp.label(a), grp.label(g)),
                            self.mu_kb(a, g, tau)?,
                        );
                    }
                }
            }
        }
        Ok(out)
    }

    /// Pumped charge `η_g(ℓ) = (A⁽¹¹⁾_g, ℓ)` in `[0, 2π)` along a loop fixed
    /// pointwise by the unitary `g`.
    ///
    /// `dA⁽¹¹⁾_g` must vanish on every triangle that touches the loop and is
    /// itself fixed by `g`.
    pub fn pump_eta(&self, g: usize, lp: &Chain) -> Result<f64> {
        let cx = self.complex();
        self.unitary(g, "the pumped symmetry")?;
        if lp.dim() != 1 {
            return Err(Error::DimensionMismatch(
                "pump loop must be a 1-chain".into(),
            ));
        }
        if !cx.boundary(lp)?.is_zero() {
            return Err(Error::NotACycle);
        }
        let mut on_loop = vec![false; cx.n_vertices()];
        for (i, _) in lp.iter() {
            for &v in cx.simplex(1, i) {
                self.stabilizes(g, v)?;
                on_loop[v] = true;
            }
        }
        if cx.dim() >= 2 {
            let da = cx.d(&self.a11)?;
            for i in 0..cx.count(2) {
                let s = cx.simplex(2, i);
                if s.iter().any(|&v| on_loop[v]) && s.iter().all(|&v| cx.act_vertex(g, v) == v) {
                    let r = branch_lift(da.get(&[g], i)).abs();
                    if r > self.fam.tolerances().coc_tol {
                        return Err(Error::CocycleViolated {
                            name: "dA11 along the pump loop".into(),
                            residual: r,
                            slot: format!("({}) on {s:?}", cx.group().label(g)),
                        });
                    }
                }
            }
        }
        Ok(wrap(self.pair11(g, lp)?))
    }

    /// `η_g(C − hC) = μᵀ_{g,h}(Q) − μᵀ_{g,h}(P)` for an arc `C` from `P` to `Q`.
    pub fn pump_fixed_point(&self, g: usize, h: usize, arc: &Chain) -> Result<Relation> {
        let cx = self.complex();
        self.unitary(h, "h")?;
        let (p, q) = cx.endpoints(arc)?;
        let lp = arc - &cx.act_chain(h, arc);
        let formula = self.mu_t(g, h, q)?.raw - self.mu_t(g, h, p)?.raw;
        let direct = self.pump_eta(g, &lp)?;
        self.relation("pump fixed point", formula, direct, None)
    }

    /// `γ⁽²⁾` of a closed surface, quantized to `{0, π}` when some antiunitary
    /// element maps the surface to itself.
    pub fn gamma2(&self, surface: &Chain) -> Result<Gamma2> {
        let cx = self.complex();
        let value = wrap(self.fam.gamma2(surface)?);
        let stabilizer = (0..cx.group().order())
            .find(|&b| self.rep.phi(b) == -1 && cx.act_chain(b, surface) == *surface);
        let quantized = match stabilizer {
            Some(_) => Some(self.quantize("gamma2", value, 2)?),
            None => None,
        };
        Ok(Gamma2 { value, quantized })
    }

    /// `γ⁽²⁾(D + bD) = μᴿᴾ_b(P) − μᴿᴾ_b(Q)` for an antiunitary involution `b`,
    /// a disk `D` with `∂D = C − bC` and an arc `C` from `P` to `Q`.
    pub fn gamma2_fixed_point(&self, b: usize, disk: &Chain, arc: &Chain) -> Result<Relation> {
        let cx = self.complex();
        self.antiunitary_involution(b, "b")?;
        self.check_chain(
            &cx.boundary(disk)?,
            &(arc - &cx.act_chain(b, arc)),
            "∂D ≠ C − bC",
        )?;
        let (p, q) = cx.endpoints(arc)?;
        let formula = self.mu_rp(b, p)?.raw - self.mu_rp(b, q)?.raw;
        let direct = self.gamma2(&(disk + &cx.act_chain(b, disk)))?.value;
        self.relation("gamma2 fixed point", formula, direct, None)
    }

    /// `(A⁽⁰²⁾, ∂D³) ≡ πν` for an orientation-reversing antiunitary `a` with
    /// `D³ − aD³` the fundamental class.
    pub fn ddks_parity_berry(&self, a: usize, d3: &Chain) -> Result<Relation> {
        let cx = self.complex();
        if self.rep.phi(a) != -1 {
            return Err(Error::PreconditionViolated(
                "the reflection must be antiunitary".into(),
            ));
        }
        self.check_chain(
            &(d3 - &cx.act_chain(a, d3)),
            &cx.fundamental_class(),
            "D³ − aD³ is not the fundamental class",
        )?;
        let nu = self.ddks()?;
        let formula = cx.pair(&self.fam.a02(), &[], &cx.boundary(d3)?)?;
        self.relation(
            "ddks parity from the higher Berry phase",
            formula,
            PI * nu as f64,
            Some(nu),
        )
    }

    /// `η_c(∂D²) ≡ 2πν/n` for a unitary rotation `c` of order `n` with
    /// fundamental domain `D³` and `∂D³ = D² − cD²`.
    pub fn ddks_mod_n_pump(&self, c: usize, d3: &Chain, d2: &Chain) -> Result<Relation> {
        let cx = self.complex();
        self.unitary(c, "the rotation")?;
        let n = action_order(self, c);
        let mut tiled = Chain::zero(3);
        let mut img = d3.clone();
        for _ in 0..n {
            tiled = tiled + img.clone();
            img = cx.act_chain(c, &img);
        }
        self.check_chain(
            &tiled,
            &cx.fundamental_class(),
            "images of D³ do not tile the complex",
        )?;
        self.check_chain(
            &cx.boundary(d3)?,
            &(d2 - &cx.act_chain(c, d2)),
            "∂D³ ≠ D² − cD²",
        )?;
        let nu = self.ddks()?;
        let formula = self.pump_eta(c, &cx.boundary(d2)?)?;
        let expected = std::f64::consts::TAU * nu as f64 / n as f64;
        self.relation(
            &format!("ddks mod {n} from the pump"),
            formula,
            expected,
            Some(nu),
        )
    }

    /// `μᴿᴾ_T(P₊) − μᴿᴾ_T(P₋) ≡ πν`.
    pub fn ddks_parity_t(&self, t: usize, p_plus: usize, p_minus: usize) -> Result<Relation> {
        let nu = self.ddks()?;
        let formula = self.mu_rp(t, p_plus)?.raw - self.mu_rp(t, p_minus)?.raw;
        self.relation(
            "ddks parity from time reversal",
            formula,
            PI * nu as f64,
            Some(nu),
        )
    }

    /// `μᵀ_{x,y}(P₊) − μᵀ_{x,y}(P₋) ≡ πν`.
    pub fn ddks_parity_z2z2(
        &self,
        x: usize,
        y: usize,
        p_plus: usize,
        p_minus: usize,
    ) -> Result<Relation> {
        let nu = self.ddks()?;
        let formula = self.mu_t(x, y, p_plus)?.raw - self.mu_t(x, y, p_minus)?.raw;
        self.relation(
            "ddks parity from two rotations",
            formula,
            PI * nu as f64,
            Some(nu),
        )
    }

    /// The mod-4 relation for two commuting π rotations `x`, `y`:
    ///
    /// `(π/2)ν ≡ −(A⁽¹¹⁾_x, D¹_{*+00}) − (A⁽¹¹⁾_y, D¹_{*0+0}) + (A⁽¹¹⁾_{xy}, D¹_{*00+})
    ///          + A⁽²⁰⁾_{y,x}(P) − A⁽²⁰⁾_{y,x}(Q)`
    ///
    /// where `D¹_{*00+}` runs from `P` to `Q` and is fixed by `xy`. The domains
    /// are the ones named in [`crate::gcomplex::GComplex::standard_domains`].
    pub fn ddks_mod4_z2z2(&self, x: usize, y: usize, dom: &Domains) -> Result<Relation> {
        let cx = self.complex();
        let grp = cx.group();
        self.unitary(x, "x")?;
        self.unitary(y, "y")?;
        let e = grp.identity();
        if !grp.commute(x, y) || grp.mul(x, x) != e || grp.mul(y, y) != e {
            return Err(Error::PreconditionViolated(
                "x and y must be commuting involutions".into(),
            ));
        }
        let xy = grp.mul(x, y);
        let (q3, d2a, d2b) = (
            dom.chain("D3_*++*")?,
            dom.chain("D2_*+0+")?,
            dom.chain("D2_*0+-")?,
        );
        let (d1a, d1b, d1c) = (
            dom.chain("D1_*+00")?,
            dom.chain("D1_*0+0")?,
            dom.chain("D1_*00+")?,
        );
        let boundary3 = (cx.act_chain(x, d2a) - d2a.clone()) + (d2b - &cx.act_chain(y, d2b));
        self.check_chain(
            &cx.boundary(q3)?,
            &boundary3,
            "∂D³ ≠ −D²a + xD²a + D²b − yD²b",
        )?;
        self.check_chain(&cx.boundary(d2a)?, &(d1a - d1c), "∂D²a ≠ D¹a − D¹c")?;
        self.check_chain(
            &cx.boundary(d2b)?,
            &(cx.act_chain(y, d1c) - d1b.clone()),
            "∂D²b ≠ yD¹c − D¹b",
        )?;
        if !cx.fixes_pointwise(xy, d1c) {
            return Err(Error::BadDecomposition("D¹c is not fixed by xy".into()));
        }
        let mut tiled = Chain::zero(3);
        for g in [e, x, y, xy] {
            tiled = tiled + cx.act_chain(g, q3);
        }
        self.check_chain(
            &tiled,
            &cx.fundamental_class(),
            "images of D³ do not tile the complex",
        )?;
        let (p, q) = cx.endpoints(d1c)?;
        let formula = -self.pair11(x, d1a)? - self.pair11(y, d1b)?
            + self.pair11(xy, d1c)?
            + self.a20_at(y, x, p)
            - self.a20_at(y, x, q);
        let nu = self.ddks()?;
        self.relation(
            "ddks mod 4 from two rotations",
            formula,
            PI / 2.0 * nu as f64,
            Some(nu),
        )
    }

    /// `ξ = ½(F⁽³⁾, D³) − (A⁽⁰²⁾, D²) − (A⁽¹¹⁾_σ, D¹) − A⁽²⁰⁾_{σ,σ}(P)` for a free
    /// antiunitary involution `σ`, where `∂D³ = D² − σD²`, `∂D² = D¹ + σD¹` and
    /// `D¹` runs from `P` to `σP`.
    pub fn xi_s3(
        &self,
        sigma: usize,
        d3: &Chain,
        d2: &Chain,
        d1: &Chain,
    ) -> Result<QuantizedAngle> {
        let cx = self.complex();
        self.antiunitary_involution(sigma, "σ")?;
        if let Some(v) = (0..cx.n_vertices()).find(|&v| cx.act_vertex(sigma, v) == v) {
            return Err(Error::NotFree {
                element: sigma,
                vertex: v,
            });
        }
        self.check_chain(
            &cx.boundary(d3)?,
            &(d2 - &cx.act_chain(sigma, d2)),
            "∂D³ ≠ D² − σD²",
        )?;
        self.check_chain(
            &cx.boundary(d2)?,
            &(d1 + &cx.act_chain(sigma, d1)),
            "∂D² ≠ D¹ + σD¹",
        )?;
        let (p, q) = cx.endpoints(d1)?;
        if q != cx.act_vertex(sigma, p) {
            return Err(Error::BadDecomposition("∂D¹ ≠ σP − P".into()));
        }
        let a02 = self.fam.a02();
        let da = cx.d(&a02)?;
        let flux: f64 = d3
            .iter()
            .map(|(i, k)| k as f64 * branch_lift(da.get(&[], i)))
            .sum();
        let raw = 0.5 * flux
            - cx.pair(&a02, &[], d2)?
            - self.pair11(sigma, d1)?
            - self.a20_at(sigma, sigma, p);
        self.quantize("xi", raw, 2)
    }

    /// `(A⁽⁰²⁾, strip) + (A⁽¹¹⁾_{σ₁}, base)` for a free unitary shift `σ₁` with
    /// `∂strip = σ₁·base − base`.
    pub fn free_action_gamma2_cylinder(
        &self,
        s1: usize,
        strip: &Chain,
        base: &Chain,
    ) -> Result<f64> {
        let cx = self.complex();
        self.free_unitary(s1)?;
        if !cx.boundary(base)?.is_zero() {
            return Err(Error::NotACycle);
        }
        self.check_chain(
            &cx.boundary(strip)?,
            &(cx.act_chain(s1, base) - base.clone()),
            "∂strip ≠ σ₁·base − base",
        )?;
        Ok(wrap(
            cx.pair(&self.fam.a02(), &[], strip)? + self.pair11(s1, base)?,
        ))
    }

    /// Gauge-invariant higher Berry phase of a plaquette for commuting free
    /// shifts `σ₁`, `σ₂`:
    /// `(A⁽⁰²⁾, P) + (A⁽¹¹⁾_{σ₁}, bottom) − (A⁽¹¹⁾_{σ₂}, left) + A⁽²⁰⁾_{σ₁,σ₂}(τ₀) − A⁽²⁰⁾_{σ₂,σ₁}(τ₀)`.
    ///
    /// `bottom` runs from `τ₀` to `σ₂τ₀`, `left` from `τ₀` to `σ₁τ₀`, and
    /// `∂P = left + σ₁·bottom − σ₂·left − bottom`.
    pub fn free_action_gamma2_torus(
        &self,
        s1: usize,
        s2: usize,
        plaquette: &Chain,
        bottom: &Chain,
        left: &Chain,
    ) -> Result<f64> {
        let cx = self.complex();
        self.free_unitary(s1)?;
        self.free_unitary(s2)?;
        if !cx.group().commute(s1, s2) {
            return Err(Error::PreconditionViolated(
                "the shifts must commute".into(),
            ));
        }
        let (t0, t1) = cx.endpoints(bottom)?;
        let (u0, u1) = cx.endpoints(left)?;
        if t0 != u0 || t1 != cx.act_vertex(s2, t0) || u1 != cx.act_vertex(s1, t0) {
            return Err(Error::BadDecomposition(
                "bottom must run to σ₂τ₀ and left to σ₁τ₀".into(),
            ));
        }
        let rim = (left + &cx.act_chain(s1, bottom)) - (cx.act_chain(s2, left) + bottom.clone());
        self.check_chain(
            &cx.boundary(plaquette)?,
            &rim,
            "∂P ≠ left + σ₁·bottom − σ₂·left − bottom",
        )?;
        let raw = cx.pair(&self.fam.a02(), &[], plaquette)? + self.pair11(s1, bottom)?
            - self.pair11(s2, left)?
            + self.a20_at(s1, s2, t0)
            - self.a20_at(s2, s1, t0);
        Ok(wrap(raw))
    }

    fn free_unitary(&self, g: usize) -> Result<()> {
        self.unitary(g, "the shift")?;
        let cx = self.complex();
        if let Some(v) = (0..cx.n_vertices()).find(|&v| cx.act_vertex(g, v) == v) {
            return Err(Error::NotFree {
                element: g,
                vertex: v,
            });
        }
        Ok(())
    }
}

/// Smallest `n > 0` with `cⁿ` acting trivially on the complex.
fn action_order(eq: &EquivariantData, c: usize) -> usize {
    let cx = eq.complex();
    let grp = cx.group();
    let mut g = c;
    let mut n = 1;
    while cx.permutation(g).iter().enumerate().any(|(v, &w)| v != w) {
        g = grp.mul(c, g);
        n += 1;
    }
    n
}
