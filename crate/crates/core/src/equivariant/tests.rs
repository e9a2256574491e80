use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::synthetic::{
    glued_family, grid_domains, model_equivariant, twisted_grid_family, TwistedGrid,
};
use super::*;
use crate::config::Tolerances;
use crate::gcomplex::build_sphere_complex;
use crate::models::{ground_mps, model_group, SpinS};
use crate::numerics::{angle_dist, wrap};

fn half_model(names: &[&str]) -> EquivariantData {
    model_equivariant(
        SpinS::half(),
        build_sphere_complex(3, 1).unwrap(),
        names,
        Tolerances::default(),
    )
    .unwrap()
}

#[test]
fn identity_transform_is_trivial() {
    let rep = model_group(&["T"], SpinS::half()).unwrap();
    let t = ground_mps(&[0.6, 0.0, 0.8, 0.0], SpinS::half(), 1e-12).unwrap();
    let same = transform_mps(rep.group.identity(), &rep, &t).unwrap();
    for (a, b) in same.matrices().iter().zip(t.matrices()) {
        assert!(max_abs_diff(a, b) < 1e-15);
    }
    assert!(matches!(
        transform_mps(5, &rep, &t),
        Err(Error::DimensionMismatch(_))
    ));
}

#[test]
fn tower_of_the_model_is_a_cocycle() {
    let eq = half_model(&["T", "C2x", "C2y"]);
    assert_eq!(eq.rep().order(), 8);
    let r = eq.check_cocycles().unwrap();
    assert!(r.max() < 1e-12 && r.flux < 1e-12, "{r:?}");
    let q = eq.quality();
    assert!(q.min_modulus > 1.0 - 1e-12 && q.max_prop_residual < 1e-12);
    let e = eq.complex().group().identity();
    assert!((0..eq.complex().n_vertices()).all(|v| eq.a10().get(&[e], v) == 0.0));
}

#[test]
fn broken_symmetry_is_rejected() {
    // |n₂| is not odd under C2x
    let rep = model_group(&["C2x"], SpinS::half()).unwrap();
    let cx = build_sphere_complex(3, 0)
        .unwrap()
        .attach_group_data(&rep)
        .unwrap();
    let fam = MPSFamily::from_fn(std::sync::Arc::new(cx), Tolerances::default(), |n| {
        let m = [n[0], n[1], n[2].abs(), n[3]];
        ground_mps(&m, SpinS::half(), 1e-12)
    })
    .unwrap();
    assert!(matches!(
        build_equivariant(&fam, &rep),
        Err(Error::EquivarianceViolated { .. })
    ));
}

#[test]
fn spt_values_at_the_poles() {
    let eq = half_model(&["T", "C2x", "C2y"]);
    let dom = eq.complex().standard_domains().unwrap();
    let (pp, pm) = (dom.point("P+").unwrap(), dom.point("P-").unwrap());
    let (t, x, y) = (
        eq.element("T").unwrap(),
        eq.element("C2x").unwrap(),
        eq.element("C2y").unwrap(),
    );
    assert_eq!(
        (eq.mu_rp(t, pp).unwrap().k, eq.mu_rp(t, pm).unwrap().k),
        (1, 0)
    );
    assert_eq!(
        (eq.mu_t(x, y, pp).unwrap().k, eq.mu_t(x, y, pm).unwrap().k),
        (1, 0)
    );
    let all = eq.spt_invariants(pp).unwrap();
    assert_eq!(all.mu_t["C2x,C2y"].k, 1);
    assert_eq!(all.mu_kb["T,C2x"].k, 1);
}

#[test]
fn preconditions_are_enforced() {
    let eq = half_model(&["T", "C2x", "C2y"]);
    let dom = eq.complex().standard_domains().unwrap();
    let pp = dom.point("P+").unwrap();
    let (t, x) = (eq.element("T").unwrap(), eq.element("C2x").unwrap());
    assert!(matches!(
        eq.mu_t(t, x, pp),
        Err(Error::PreconditionViolated(_))
    ));
    assert!(matches!(
        eq.mu_rp(x, pp),
        Err(Error::PreconditionViolated(_))
    ));
    let moved = (0..eq.complex().n_vertices())
        .find(|&v| eq.complex().act_vertex(t, v) != v)
        .unwrap();
    assert!(matches!(
        eq.mu_rp(t, moved),
        Err(Error::NotStabilized { .. })
    ));
    assert!(matches!(
        eq.pump_eta(x, dom.chain("D1").unwrap()),
        Err(Error::NotACycle)
    ));
    let d3 = dom.chain("D3").unwrap();
    assert!(matches!(
        eq.xi_s3(t, d3, dom.chain("D2").unwrap(), dom.chain("D1").unwrap()),
        Err(Error::NotFree { .. })
    ));
    assert!(matches!(eq.element("nope"), Err(Error::UnknownName(_))));
}

#[test]
fn pump_and_higher_berry_phase() {
    let eq = half_model(&["T", "C2x", "C2y"]);
    let dom = eq.complex().standard_domains().unwrap();
    let (t, x, y) = (
        eq.element("T").unwrap(),
        eq.element("C2x").unwrap(),
        eq.element("C2y").unwrap(),
    );
    assert!(
        angle_dist(
            eq.pump_eta(x, dom.chain("circle_n2n3").unwrap()).unwrap(),
            PI
        ) < 1e-9
    );
    assert!(
        eq.pump_fixed_point(x, y, dom.chain("D1").unwrap())
            .unwrap()
            .residual
            < 1e-9
    );
    let g2 = eq.gamma2(dom.chain("S2_n3").unwrap()).unwrap();
    assert_eq!(g2.quantized.unwrap().k, 1);
    let rel = eq
        .gamma2_fixed_point(t, dom.chain("D2").unwrap(), dom.chain("D1").unwrap())
        .unwrap();
    assert!(rel.residual < 1e-9);
    // the reversed arc breaks ∂D = C − TC
    let other = -dom.chain("D1").unwrap().clone();
    assert!(matches!(
        eq.gamma2_fixed_point(t, dom.chain("D2").unwrap(), &other),
        Err(Error::BadDecomposition(_))
    ));
}

#[test]
fn ddks_relations() {
    let eq = half_model(&["T", "C2x", "C2y"]);
    let dom = eq.complex().standard_domains().unwrap();
    let (pp, pm) = (dom.point("P+").unwrap(), dom.point("P-").unwrap());
    let (t, x, y) = (
        eq.element("T").unwrap(),
        eq.element("C2x").unwrap(),
        eq.element("C2y").unwrap(),
    );
    assert_eq!(eq.ddks().unwrap(), 1);
    for rel in [
        eq.ddks_parity_t(t, pp, pm).unwrap(),
        eq.ddks_parity_z2z2(x, y, pp, pm).unwrap(),
        eq.ddks_mod4_z2z2(x, y, &dom).unwrap(),
    ] {
        assert!(rel.residual < 1e-9, "{rel:?}");
    }
    let eq = half_model(&["C2zT", "Q4z"]);
    let a = eq.element("C2zT").unwrap();
    let q = eq.element("Q4z").unwrap();
    let c2 = eq.complex().group().mul(q, q);
    assert!(
        eq.ddks_parity_berry(a, dom.chain("D3").unwrap())
            .unwrap()
            .residual
            < 1e-9
    );
    let r2 = eq
        .ddks_mod_n_pump(
            c2,
            dom.chain("cn2_D3").unwrap(),
            dom.chain("cn2_D2").unwrap(),
        )
        .unwrap();
    let r4 = eq
        .ddks_mod_n_pump(
            q,
            dom.chain("cn4_D3").unwrap(),
            dom.chain("cn4_D2").unwrap(),
        )
        .unwrap();
    assert!(r2.name.contains("mod 2") && r4.name.contains("mod 4"));
    assert!(r2.residual < 1e-9 && r4.residual < 1e-9);
    assert!(angle_dist(r4.direct, PI / 2.0) < 1e-12);
    // cn4_D3 does not tile under the half turn
    assert!(matches!(
        eq.ddks_mod_n_pump(
            c2,
            dom.chain("cn4_D3").unwrap(),
            dom.chain("cn4_D2").unwrap()
        ),
        Err(Error::BadDecomposition(_))
    ));
}

fn assert_gauge_invariant(
    eq: &EquivariantData,
    f: impl Fn(&EquivariantData) -> Vec<f64>,
    count: usize,
) {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let base = f(eq);
    for _ in 0..count {
        let gt = GaugeTransform::random(eq, &mut rng).unwrap();
        let other = eq.gauge_transform(&gt).unwrap();
        assert!(other.cocycle_residuals().unwrap().max() < 1e-10);
        for (a, b) in base.iter().zip(f(&other)) {
            assert!(angle_dist(*a, b) < 1e-9, "{a} vs {b}");
        }
    }
}

#[test]
fn gauge_changes_the_cochains_but_not_the_invariants() {
    let eq = half_model(&["T", "C2x", "C2y"]);
    let dom = eq.complex().standard_domains().unwrap();
    let (pp, pm) = (dom.point("P+").unwrap(), dom.point("P-").unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let other = eq
        .gauge_transform(&GaugeTransform::random(&eq, &mut rng).unwrap())
        .unwrap();
    assert!(
        other
            .a11()
            .linear_combination(1.0, eq.a11(), -1.0)
            .unwrap()
            .max_abs()
            > 1e-3
    );
    assert_gauge_invariant(
        &eq,
        |e| {
            let (t, x, y) = (
                e.element("T").unwrap(),
                e.element("C2x").unwrap(),
                e.element("C2y").unwrap(),
            );
            vec![
                e.mu_rp(t, pp).unwrap().raw,
                e.mu_t(x, y, pm).unwrap().raw,
                e.mu_kb(t, x, pp).unwrap().raw,
                e.pump_eta(x, dom.chain("circle_n2n3").unwrap()).unwrap(),
                e.gamma2(dom.chain("S2_n3").unwrap()).unwrap().value,
                e.ddks_mod4_z2z2(x, y, &dom).unwrap().formula,
            ]
        },
        5,
    );
}

#[test]
fn glued_family_has_xi_pi() {
    let eq = glued_family(SpinS::half(), 1, Tolerances::default()).unwrap();
    let dom = eq.complex().standard_domains().unwrap();
    let s = eq.element("sigma").unwrap();
    let (d3, d2, d1) = (
        dom.chain("D3").unwrap(),
        dom.chain("D2").unwrap(),
        dom.chain("D1").unwrap(),
    );
    assert_eq!(eq.ddks().unwrap(), 0);
    assert_eq!(eq.xi_s3(s, d3, d2, d1).unwrap().k, 1);
    assert_gauge_invariant(&eq, |e| vec![e.xi_s3(s, d3, d2, d1).unwrap().raw], 3);
}

#[test]
fn free_action_torus_plaquette() {
    let shape = TwistedGrid::default();
    let tol = Tolerances::default();
    let eq = twisted_grid_family(&shape, true, tol).unwrap();
    assert!(eq.check_cocycles().is_ok());
    let cx = eq.complex().clone();
    let (s1, s2) = (eq.element("s1").unwrap(), eq.element("s2").unwrap());
    let value = |e: &EquivariantData, at: (usize, usize)| {
        let d = grid_domains(&cx, &shape, at).unwrap();
        let c = |k: &str| d.chain(k).unwrap();
        e.free_action_gamma2_torus(s1, s2, c("plaquette"), c("bottom"), c("left"))
            .unwrap()
    };
    let v = value(&eq, (0, 0));
    assert!(angle_dist(v, value(&eq, (1, 2))) < 1e-9);
    let full = eq.gamma2(&cx.fundamental_class()).unwrap().value;
    let m = shape.m as f64;
    assert!(
        angle_dist(full, m * m * v) < 1e-9,
        "{full} vs {}",
        wrap(m * m * v)
    );
    assert_gauge_invariant(&eq, |e| vec![value(e, (0, 0))], 3);

    let d = grid_domains(&cx, &shape, (0, 0)).unwrap();
    let c = |k: &str| d.chain(k).unwrap();
    assert!(matches!(
        eq.free_action_gamma2_torus(s1, s2, c("plaquette"), c("left"), c("bottom")),
        Err(Error::BadDecomposition(_))
    ));

    let flat = TwistedGrid {
        bond_dim: 1,
        ..shape
    };
    let eq = twisted_grid_family(&flat, true, tol).unwrap();
    let v = eq
        .free_action_gamma2_torus(s1, s2, c("plaquette"), c("bottom"), c("left"))
        .unwrap();
    assert!(angle_dist(v, 0.0) < 1e-9, "{v}");
}

#[test]
fn free_action_cylinder_strip() {
    let shape = TwistedGrid::default();
    let eq = twisted_grid_family(&shape, false, Tolerances::default()).unwrap();
    let cx = eq.complex().clone();
    let s1 = eq.element("s1").unwrap();
    let value = |e: &EquivariantData, a: usize| {
        let d = grid_domains(&cx, &shape, (a, 0)).unwrap();
        e.free_action_gamma2_cylinder(s1, d.chain("strip").unwrap(), d.chain("base").unwrap())
            .unwrap()
    };
    let v = value(&eq, 0);
    assert!(angle_dist(v, value(&eq, 3)) < 1e-9);
    let full = eq.gamma2(&cx.fundamental_class()).unwrap().value;
    assert!(angle_dist(full, shape.m as f64 * v) < 1e-9);
    assert_gauge_invariant(&eq, |e| vec![value(e, 0)], 3);
}
