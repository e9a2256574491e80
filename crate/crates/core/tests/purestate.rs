use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use eqmps::gcomplex::{build_sphere_complex, GComplex};
use eqmps::models::SpinS;
use eqmps::mps::{MPSFamily, MPSTensor};
use eqmps::numerics::angle_dist;
use eqmps::purestate::{
    spin_field_family, spin_field_ground_state, two_level_family, PureStateFamily,
};
use eqmps::Tolerances;
use proptest::prelude::*;

fn sphere() -> &'static GComplex {
    static CX: OnceLock<GComplex> = OnceLock::new();
    CX.get_or_init(|| build_sphere_complex(2, 2).unwrap())
}

fn spin_half() -> &'static PureStateFamily {
    static F: OnceLock<PureStateFamily> = OnceLock::new();
    F.get_or_init(|| spin_field_family(SpinS::half(), sphere(), Tolerances::default()).unwrap())
}

// The transfer-matrix eigenvalue of two D = 1 tensors is ⟨ψ₁|ψ₀⟩, the conjugate
// of the pure-state overlap, so the two Chern numbers differ by a sign.
#[test]
fn product_state_chern_from_transfer_matrix() {
    let base = Arc::new(sphere().clone());
    for two_s in 1..=2u32 {
        let s = SpinS::new(two_s).unwrap();
        let pure = spin_field_family(s, &base, Tolerances::default()).unwrap();
        let nu = pure.chern(&base.fundamental_class()).unwrap();
        let fam = MPSFamily::from_fn(base.clone(), Tolerances::default(), |h| {
            Ok(MPSTensor::product(
                spin_field_ground_state(h, s)?.as_slice(),
            ))
        })
        .unwrap();
        let nu_mps = fam.chern_from_a01(&base.fundamental_class()).unwrap();
        assert_eq!(nu.value, two_s as i64);
        assert_eq!(nu_mps.value, -nu.value);
        assert!((nu_mps.raw + nu.raw).abs() < 1e-12);
    }
}

#[test]
fn chern_transforms_with_phi() {
    for two_s in [1u32, 2] {
        let fam =
            spin_field_family(SpinS::new(two_s).unwrap(), sphere(), Tolerances::default()).unwrap();
        let cx = fam.complex();
        let top = cx.fundamental_class();
        let nu = fam.chern(&top).unwrap().value;
        for g in 0..fam.rep().order() {
            let img = fam.chern(&cx.act_chain(g, &top)).unwrap().value;
            assert_eq!(
                img,
                fam.rep().phi(g) as i64 * nu,
                "element {}",
                cx.group().label(g)
            );
        }
        let r = fam.equivariance_residuals().unwrap();
        assert!(r.cocycle < 1e-10 && r.descendant < 1e-10 && r.flux < 1e-10);
    }
}

#[test]
fn rephased_rotation_leaves_fixed_point_formula() {
    use eqmps::gcomplex::Generator;
    use eqmps::purestate::spin_field_generators;
    let s = SpinS::half();
    let mut c2 = spin_field_generators(s).unwrap().remove(0);
    c2.u = &c2.u * &c2.u * eqmps::numerics::C64::from_polar(1.0, PI / 3.0);
    c2.param = &c2.param * &c2.param;
    c2.name = "c2'".into();
    let gens: Vec<Generator> = vec![c2];
    let fam = PureStateFamily::from_fn(sphere(), &gens, 2, Tolerances::default(), |h| {
        spin_field_ground_state(h, s)
    })
    .unwrap();
    let d = sphere().standard_domains().unwrap();
    let h = fam.element("c2'").unwrap();
    let (p, q) = (d.point("cn2_start").unwrap(), d.point("cn2_end").unwrap());
    let out = fam
        .berry_phase_fixed_point(h, p, q, d.chain("cn2_arc").unwrap())
        .unwrap();
    let reference = spin_half()
        .berry_phase_fixed_point(
            spin_half().element("c2").unwrap(),
            p,
            q,
            d.chain("cn2_arc").unwrap(),
        )
        .unwrap();
    assert!(angle_dist(out.fixed_point, reference.fixed_point) < 1e-12);
    assert!(angle_dist(out.fixed_point, PI) < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn invariants_survive_vertex_gauge(seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let cx = sphere();
        let chi: Vec<f64> = (0..cx.n_vertices()).map(|_| rng.gen_range(-PI..PI)).collect();
        let d = cx.standard_domains().unwrap();
        let fam = spin_half();
        let g = fam.with_vertex_gauge(&chi).unwrap();
        let eq = d.chain("equator").unwrap();
        prop_assert!(angle_dist(fam.berry_phase(eq).unwrap(), g.berry_phase(eq).unwrap()) < 1e-10);
        let top = cx.fundamental_class();
        prop_assert!((fam.chern(&top).unwrap().raw - g.chern(&top).unwrap().raw).abs() < 1e-10);
        let c2 = fam.element("c2").unwrap();
        for pole in [d.point("cn2_start").unwrap(), d.point("cn2_end").unwrap()] {
            prop_assert!(angle_dist(fam.charge(c2, pole).unwrap(), g.charge(c2, pole).unwrap()) < 1e-10);
        }

        let two = two_level_family(cx, 1.0, Tolerances::default()).unwrap();
        let sigma = two.element("sigma").unwrap();
        let (hemi, arc, p) = (d.chain("hemisphere").unwrap(), d.chain("arc").unwrap(), d.point("arc_start").unwrap());
        let xi = two.xi_s2(sigma, hemi, arc, p).unwrap();
        let xi_g = two.with_vertex_gauge(&chi).unwrap().xi_s2(sigma, hemi, arc, p).unwrap();
        prop_assert!(angle_dist(xi.raw, xi_g.raw) < 1e-10);
    }
}
