//! Configured runs: build a model or ingested family on a sphere mesh, compute
//! the requested invariants and assemble a deterministic JSON report.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::equivariant::synthetic::{glued_family, model_equivariant};
use crate::equivariant::{
    build_equivariant, CocycleResiduals, EquivariantData, Gamma2, Relation, SptInvariants,
};
use crate::error::{Error, Result};
use crate::gcomplex::{build_sphere_complex, GComplex, GroupData, MeshLabel, Quantized};
use crate::models::{ground_mps, group_rep, model_group, SpinS, GROUP_NAMES};
use crate::mps::{read_family, write_family, MPSFamily};
use crate::numerics::{angle_dist, QuantizedAngle};
use crate::purestate::{spin_field_family, two_level_family, PureStateFamily};

pub const CONFIG_SCHEMA_VERSION: u32 = 1;
pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Which family to build.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelConfig {
    /// The dimerized spin chain on S³.
    DimerSpinChain { spin: f64 },
    /// Ground states of `h·Ŝ` on S², with rotations and time reversal built in.
    SpinField { spin: f64 },
    /// The two-level family on S² with the antipodal symmetry `σ̂ = sign·1`.
    #[serde(rename = "purestate_2x2")]
    Purestate2x2 {
        #[serde(default = "one")]
        sign: f64,
    },
    /// An MPS family read from a file on S³. `spin` fixes the site
    /// representation of the named group, which must then be `(2S+1)²`-dimensional.
    Ingest { path: PathBuf, spin: Option<f64> },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshConfig {
    pub dim: usize,
    pub refinements: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// JSON report; printed to stdout by the CLI when absent.
    pub report: Option<PathBuf>,
    /// Directory for per-simplex CSV dumps of the connections.
    pub csv_dir: Option<PathBuf>,
    /// Writes the built MPS family in the ingest format.
    pub family: Option<PathBuf>,
}

/// A requested computation. Elements are looked up by name in the declared group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Invariant {
    /// Chern number of the whole S² (pure-state models).
    Chern,
    /// `ξ(S², σ)` of the two-level family.
    XiS2,
    /// DDKS number of the whole S³.
    Ddks,
    /// Residuals of the cocycle conditions; fails above `coc_tol`.
    Cocycles,
    /// All SPT invariants at `(±1, 0, 0, 0)`.
    Spt,
    /// `η_{C2x}` on the circle `n₂ = n₃ = 0`.
    Pump,
    PumpFixedPoint,
    /// `γ⁽²⁾` on the sphere `n₃ = 0`.
    Gamma2,
    Gamma2FixedPoint,
    DdksParityBerry,
    DdksMod2Pump,
    DdksMod4Pump,
    DdksParityT,
    DdksMod4Z2z2,
    DdksParityZ2z2,
}

impl Invariant {
    fn key(self) -> String {
        serde_json::to_value(self)
            .ok()
            .and_then(|v| v.as_str().map(String::from))
            .unwrap_or_default()
    }

    fn is_pure(self) -> bool {
        matches!(self, Invariant::Chern | Invariant::XiS2)
    }

    /// Named elements the computation needs.
    fn requires(self) -> &'static [&'static str] {
        use Invariant::*;
        match self {
            Pump => &["C2x"],
            PumpFixedPoint | DdksMod4Z2z2 | DdksParityZ2z2 => &["C2x", "C2y"],
            Gamma2FixedPoint | DdksParityT => &["T"],
            DdksParityBerry => &["C2zT"],
            DdksMod2Pump => &["C2z"],
            DdksMod4Pump => &["Q4z"],
            _ => &[],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub model: ModelConfig,
    pub mesh: MeshConfig,
    /// Generators of the symmetry group of an MPS model, from
    /// `T, C2x, C2y, C2z, C2zT, Q4z`.
    #[serde(default)]
    pub group: Vec<String>,
    #[serde(default)]
    pub invariants: Vec<Invariant>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: OutputConfig,
}

fn spin_of(s: f64) -> Result<SpinS> {
    let two_s = (2.0 * s).round();
    if two_s.is_nan() || two_s < 1.0 || (2.0 * s - two_s).abs() > 1e-12 {
        return Err(Error::Config(format!(
            "spin must be a positive half-integer, got {s}"
        )));
    }
    SpinS::new(two_s as u32).map_err(|e| Error::Config(e.to_string()))
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    fn is_pure(&self) -> bool {
        matches!(
            self.model,
            ModelConfig::SpinField { .. } | ModelConfig::Purestate2x2 { .. }
        )
    }

    fn spin(&self) -> Result<Option<SpinS>> {
        match self.model {
            ModelConfig::DimerSpinChain { spin } | ModelConfig::SpinField { spin } => {
                spin_of(spin).map(Some)
            }
            ModelConfig::Ingest {
                spin: Some(spin), ..
            } => spin_of(spin).map(Some),
            _ => Ok(None),
        }
    }

    /// Checks that every requested invariant fits the model, mesh and group
    /// before anything is computed.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.schema_version != CONFIG_SCHEMA_VERSION {
            return Err(Error::Schema(format!(
                "unsupported config schema_version {}",
                self.schema_version
            )));
        }
        self.spin()?;
        let want_dim = if self.is_pure() { 2 } else { 3 };
        if self.mesh.dim != want_dim {
            return bad(format!(
                "this model lives on S{want_dim}, mesh has dimension {}",
                self.mesh.dim
            ));
        }
        if let Some(g) = self
            .group
            .iter()
            .find(|g| !GROUP_NAMES.contains(&g.as_str()))
        {
            return Err(Error::UnknownName(g.clone()));
        }
        if self.is_pure() && !self.group.is_empty() {
            return bad("pure-state models carry their own symmetries; leave group empty".into());
        }
        if matches!(self.model, ModelConfig::Ingest { spin: None, .. }) && !self.group.is_empty() {
            return bad(
                "an ingested family with a group needs the spin that fixes its site representation"
                    .into(),
            );
        }
        for inv in &self.invariants {
            if inv.is_pure() != self.is_pure() {
                return bad(format!("{} does not apply to this model", inv.key()));
            }
            if *inv == Invariant::XiS2 && !matches!(self.model, ModelConfig::Purestate2x2 { .. }) {
                return bad("xi_s2 needs the purestate_2x2 model".into());
            }
            for name in inv.requires() {
                if !self.group_contains(name)? {
                    return bad(format!("{} needs {name} in the group", inv.key()));
                }
            }
        }
        Ok(())
    }

    fn group_contains(&self, name: &str) -> Result<bool> {
        let Some(s) = self.spin()? else {
            return Ok(false);
        };
        let names: Vec<&str> = self.group.iter().map(String::as_str).collect();
        Ok(model_element(&model_group(&names, s)?, name, s)?.is_some())
    }
}

/// Element of `rep` that acts like the named model symmetry.
fn model_element(rep: &GroupData, name: &str, s: SpinS) -> Result<Option<usize>> {
    let gen = group_rep(name, s)?;
    Ok(rep.find_element(&gen.u, gen.phi, Some(&gen.param)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshSummary {
    pub label: MeshLabel,
    pub n_vertices: usize,
    /// Number of simplices of each dimension.
    pub counts: Vec<usize>,
}

/// One computed result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "snake_case")]
pub enum ReportValue {
    Integer(Quantized),
    Quantized(QuantizedAngle),
    Angle(f64),
    Gamma2(Gamma2),
    Relation(Relation),
    Spt(BTreeMap<String, SptInvariants>),
    Cocycles(CocycleResiduals),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub schema_version: u32,
    pub model: ModelConfig,
    pub mesh: MeshSummary,
    /// Labels of the group elements, in index order.
    pub group: Vec<String>,
    pub tolerances: Tolerances,
    pub results: BTreeMap<String, ReportValue>,
}

impl InvariantReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

fn mesh_summary(cx: &GComplex) -> MeshSummary {
    MeshSummary {
        label: cx.label().clone(),
        n_vertices: cx.n_vertices(),
        counts: (0..=cx.dim()).map(|q| cx.count(q)).collect(),
    }
}

fn checked(what: &str, q: Quantized, tol: f64) -> Result<Quantized> {
    if q.residual > tol {
        return Err(Error::NotQuantized {
            what: what.into(),
            value: q.raw,
            residual: q.residual,
        });
    }
    Ok(q)
}

/// Reads an MPS family in the ingest format onto the sphere mesh of `mesh`,
/// with the parameter action of `rep` attached when given.
pub fn ingest(
    path: &Path,
    mesh: MeshConfig,
    rep: Option<&GroupData>,
    tol: Tolerances,
) -> Result<MPSFamily> {
    let mut cx = build_sphere_complex(mesh.dim, mesh.refinements)?;
    if let Some(rep) = rep.filter(|r| r.order() > 1) {
        cx = cx.attach_group_data(rep)?;
    }
    read_family(path, Arc::new(cx), tol)
}

/// Builds the configured family, computes every requested invariant and writes
/// the configured outputs. Nothing is written unless every computation succeeds.
pub fn run(cfg: &RunConfig) -> Result<InvariantReport> {
    cfg.validate()?;
    let tol = cfg.tolerances;
    let mut results = BTreeMap::new();
    let (cx, labels, dumps) = if cfg.is_pure() {
        let base = build_sphere_complex(cfg.mesh.dim, cfg.mesh.refinements)?;
        let fam = match cfg.model {
            ModelConfig::SpinField { spin } => spin_field_family(spin_of(spin)?, &base, tol)?,
            ModelConfig::Purestate2x2 { sign } => two_level_family(&base, sign, tol)?,
            _ => unreachable!("validated as a pure-state model"),
        };
        run_pure(&fam, &cfg.invariants, &mut results)?;
        let dumps = vec![("berry_connection", fam.berry_connection()?)];
        (
            fam.complex().clone(),
            fam.rep().group.labels().to_vec(),
            dumps,
        )
    } else {
        let eq = build_mps(cfg)?;
        run_mps(&eq, cfg, &mut results)?;
        if let Some(p) = &cfg.output.family {
            write_family(eq.family(), p)?;
        }
        let dumps = vec![("a01", eq.family().a01()), ("a02", eq.family().a02())];
        (
            eq.complex().clone(),
            eq.rep().group.labels().to_vec(),
            dumps,
        )
    };
    let report = InvariantReport {
        schema_version: REPORT_SCHEMA_VERSION,
        model: cfg.model.clone(),
        mesh: mesh_summary(&cx),
        group: labels,
        tolerances: tol,
        results,
    };
    if let Some(dir) = &cfg.output.csv_dir {
        fs::create_dir_all(dir)?;
        for (name, c) in dumps {
            c.write_csv(&cx, fs::File::create(dir.join(format!("{name}.csv")))?)?;
        }
    }
    if let Some(p) = &cfg.output.report {
        fs::write(p, report.to_json()?)?;
    }
    Ok(report)
}

fn build_mps(cfg: &RunConfig) -> Result<EquivariantData> {
    let tol = cfg.tolerances;
    let names: Vec<&str> = cfg.group.iter().map(String::as_str).collect();
    let rep = match cfg.spin()? {
        Some(s) => model_group(&names, s)?,
        None => GroupData::trivial(1),
    };
    let fam = match &cfg.model {
        ModelConfig::DimerSpinChain { spin } => {
            let s = spin_of(*spin)?;
            let mut cx = build_sphere_complex(cfg.mesh.dim, cfg.mesh.refinements)?;
            if rep.order() > 1 {
                cx = cx.attach_group_data(&rep)?;
            }
            MPSFamily::from_fn(Arc::new(cx), tol, |n| ground_mps(n, s, tol.trunc_tol))?
        }
        ModelConfig::Ingest { path, .. } => ingest(path, cfg.mesh, Some(&rep), tol)?,
        _ => unreachable!("validated as an MPS model"),
    };
    // the trivial placeholder only fixes the site dimension
    let rep = if cfg.spin()?.is_none() {
        GroupData::trivial(fam.tensor(0).phys_dim())
    } else {
        rep
    };
    build_equivariant(&fam, &rep)
}

fn run_pure(
    fam: &PureStateFamily,
    invs: &[Invariant],
    out: &mut BTreeMap<String, ReportValue>,
) -> Result<()> {
    let cx = fam.complex();
    let tol = fam.tolerances().quantization_tol;
    for &inv in invs {
        let v = match inv {
            Invariant::Chern => {
                ReportValue::Integer(checked("chern", fam.chern(&cx.fundamental_class())?, tol)?)
            }
            Invariant::XiS2 => {
                let d = cx.standard_domains()?;
                let sigma = fam.element("sigma")?;
                ReportValue::Quantized(fam.xi_s2(
                    sigma,
                    d.chain("hemisphere")?,
                    d.chain("arc")?,
                    d.point("arc_start")?,
                )?)
            }
            _ => unreachable!("validated as a pure-state invariant"),
        };
        out.insert(inv.key(), v);
    }
    Ok(())
}

fn run_mps(
    eq: &EquivariantData,
    cfg: &RunConfig,
    out: &mut BTreeMap<String, ReportValue>,
) -> Result<()> {
    let cx = eq.complex();
    let dom = cx.standard_domains()?;
    let (pp, pm) = (dom.point("P+")?, dom.point("P-")?);
    let s = cfg.spin()?;
    let el = |name: &str| -> Result<usize> {
        s.and_then(|s| model_element(eq.rep(), name, s).transpose())
            .unwrap_or_else(|| Err(Error::UnknownName(name.to_string())))
    };
    for &inv in &cfg.invariants {
        use Invariant::*;
        let v = match inv {
            Ddks => ReportValue::Integer(checked(
                "ddks",
                eq.family().ddks(&cx.fundamental_class())?,
                cfg.tolerances.quantization_tol,
            )?),
            Cocycles => ReportValue::Cocycles(eq.check_cocycles()?),
            Spt => ReportValue::Spt(BTreeMap::from([
                ("P+".to_string(), eq.spt_invariants(pp)?),
                ("P-".to_string(), eq.spt_invariants(pm)?),
            ])),
            Pump => ReportValue::Angle(eq.pump_eta(el("C2x")?, dom.chain("circle_n2n3")?)?),
            PumpFixedPoint => ReportValue::Relation(eq.pump_fixed_point(
                el("C2x")?,
                el("C2y")?,
                dom.chain("D1")?,
            )?),
            Gamma2 => ReportValue::Gamma2(eq.gamma2(dom.chain("S2_n3")?)?),
            Gamma2FixedPoint => ReportValue::Relation(eq.gamma2_fixed_point(
                el("T")?,
                dom.chain("D2")?,
                dom.chain("D1")?,
            )?),
            DdksParityBerry => {
                ReportValue::Relation(eq.ddks_parity_berry(el("C2zT")?, dom.chain("D3")?)?)
            }
            DdksMod2Pump => ReportValue::Relation(eq.ddks_mod_n_pump(
                el("C2z")?,
                dom.chain("cn2_D3")?,
                dom.chain("cn2_D2")?,
            )?),
            DdksMod4Pump => ReportValue::Relation(eq.ddks_mod_n_pump(
                el("Q4z")?,
                dom.chain("cn4_D3")?,
                dom.chain("cn4_D2")?,
            )?),
            DdksParityT => ReportValue::Relation(eq.ddks_parity_t(el("T")?, pp, pm)?),
            DdksMod4Z2z2 => {
                ReportValue::Relation(eq.ddks_mod4_z2z2(el("C2x")?, el("C2y")?, &dom)?)
            }
            DdksParityZ2z2 => {
                ReportValue::Relation(eq.ddks_parity_z2z2(el("C2x")?, el("C2y")?, pp, pm)?)
            }
            Chern | XiS2 => unreachable!("validated as an MPS invariant"),
        };
        out.insert(inv.key(), v);
    }
    Ok(())
}

/// Outcome of one self-test check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckLine {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, f: impl FnOnce() -> Result<(bool, String)>) -> CheckLine {
    match f() {
        Ok((passed, detail)) => CheckLine {
            name,
            passed,
            detail,
        },
        Err(e) => CheckLine {
            name,
            passed: false,
            detail: e.to_string(),
        },
    }
}

/// Fast checks of known values on coarse meshes.
pub fn selftest() -> Vec<CheckLine> {
    use std::f64::consts::PI;
    let tol = Tolerances::default();
    let half = SpinS::half();
    let model = |names: &[&str]| model_equivariant(half, build_sphere_complex(3, 1)?, names, tol);
    vec![
        check("ddks of the spin-1/2 chain is 1", || {
            let eq = model(&[])?;
            let q = eq.family().ddks(&eq.complex().fundamental_class())?;
            Ok((q.value == 1 && q.residual < 1e-3, format!("{q:?}")))
        }),
        check("chern of the spin-1 field is 2", || {
            let fam = spin_field_family(SpinS::one(), &build_sphere_complex(2, 1)?, tol)?;
            let q = fam.chern(&fam.complex().fundamental_class())?;
            Ok((q.value == 2, format!("{q:?}")))
        }),
        check("SPT values at the poles", || {
            let eq = model(&["T", "C2x", "C2y"])?;
            let d = eq.complex().standard_domains()?;
            let (pp, pm) = (d.point("P+")?, d.point("P-")?);
            let (t, x, y) = (eq.element("T")?, eq.element("C2x")?, eq.element("C2y")?);
            let got = [
                eq.mu_rp(t, pp)?.k,
                eq.mu_rp(t, pm)?.k,
                eq.mu_t(x, y, pp)?.k,
                eq.mu_t(x, y, pm)?.k,
            ];
            Ok((got == [1, 0, 1, 0], format!("{got:?}")))
        }),
        check("cocycle conditions", || {
            let r = model(&["T", "C2x", "C2y"])?.check_cocycles()?;
            Ok((r.max() < 1e-8, format!("max residual {:.2e}", r.max())))
        }),
        check("pump of C2x is pi", || {
            let eq = model(&["C2x"])?;
            let eta = eq.pump_eta(
                eq.element("C2x")?,
                eq.complex().standard_domains()?.chain("circle_n2n3")?,
            )?;
            Ok((angle_dist(eta, PI) < 1e-6, format!("{eta:.12}")))
        }),
        check("xi of the two-level family is pi", || {
            let base = build_sphere_complex(2, 1)?;
            let d = base.standard_domains()?;
            let fam = two_level_family(&base, 1.0, tol)?;
            let xi = fam.xi_s2(
                fam.element("sigma")?,
                d.chain("hemisphere")?,
                d.chain("arc")?,
                d.point("arc_start")?,
            )?;
            Ok((xi.k == 1, format!("{xi:?}")))
        }),
        check("xi of the glued S3 family is pi", || {
            let eq = glued_family(half, 1, tol)?;
            let d = eq.complex().standard_domains()?;
            let xi = eq.xi_s3(
                eq.element("sigma")?,
                d.chain("D3")?,
                d.chain("D2")?,
                d.chain("D1")?,
            )?;
            Ok((xi.k == 1, format!("{xi:?}")))
        }),
    ]
}
