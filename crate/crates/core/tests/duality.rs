use std::f64::consts::FRAC_PI_2;

use hflow::ambient::{AmbientKind, AmbientSpec};
use hflow::duality::*;
use hflow::shape::*;
use hflow::soliton::ExactParams;
use hflow::symfun::{CurvatureFunctionSpec, SymFn};
use hflow::Error;
use proptest::prelude::*;

fn sample(kind: AmbientKind, nodes: usize, value: f64) -> EmbeddedSample {
    let st = ProfileState::umbilic(AmbientSpec::new(kind, 2).unwrap(), nodes, value, 0.0).unwrap();
    EmbeddedSample::from_profile(&st).unwrap()
}

fn bumped(kind: AmbientKind, nodes: usize, value: f64) -> EmbeddedSample {
    let amb = AmbientSpec::new(kind, 2).unwrap();
    let st = ProfileState::from_fn(amb, nodes, 0.0, |th| value + 0.03 * (2.0 * th).cos()).unwrap();
    EmbeddedSample::from_profile(&st).unwrap()
}

#[test]
fn umbilic_duals_reciprocate_curvature() {
    let cases = [
        (AmbientKind::Sphere, 0.3),
        (AmbientKind::Sphere, 1.2),
        (AmbientKind::Hyperbolic, 0.5),
        (AmbientKind::Hyperbolic, 2.0),
        (AmbientKind::DeSitter, 0.5),
    ];
    for (kind, value) in cases {
        let m = sample(kind, 48, value);
        let d = dual(&m).unwrap();
        assert_eq!(d.ambient.kind, dual_kind(kind).unwrap());
        let check = check_dual(&m, &d).unwrap();
        assert!(check.passes(1e-8, 1e-3), "{kind:?} {value}: {check:?}");
    }
}

#[test]
fn geodesic_sphere_polar_closed_form() {
    for rho in [0.2, 0.7, 1.3] {
        let d = polar_sphere(&sample(AmbientKind::Sphere, 32, rho)).unwrap();
        for (x, k) in d.x.iter().zip(&d.kappa) {
            assert!(((-x[0]).acos() - (FRAC_PI_2 - rho)).abs() < 1e-12);
            assert!(k.as_slice().iter().all(|v| (v - rho.tan()).abs() < 1e-10));
        }
    }
}

#[test]
fn hyperbolic_gauss_image_is_future_directed() {
    let m = sample(AmbientKind::Hyperbolic, 32, 1.0);
    let d = gauss_hyperbolic(&m).unwrap();
    assert!(check_dual(&m, &d).unwrap().future);
    for (x, k) in d.x.iter().zip(&d.kappa) {
        assert!((d.inner(x, x) - 1.0).abs() < 1e-12);
        assert!(k.max() <= 1.0 && k.min() > 0.0);
    }
}

#[test]
fn discrete_duals_converge_at_second_order() {
    for kind in [AmbientKind::Sphere, AmbientKind::Hyperbolic] {
        let err = |nodes: usize| {
            let m = bumped(kind, nodes, 0.8);
            check_dual(&m, &dual(&m).unwrap()).unwrap().finite_difference
        };
        let (a, b) = (err(32), err(64));
        assert!((a / b).log2() > 1.8, "{kind:?}: {a} -> {b}");
    }
}

#[test]
fn double_dual_is_the_identity() {
    for (kind, value) in [(AmbientKind::Sphere, 0.9), (AmbientKind::Hyperbolic, 0.7), (AmbientKind::DeSitter, 0.4)] {
        let m = bumped(kind, 40, value);
        let back = dual(&dual(&m).unwrap()).unwrap();
        assert_eq!(back.ambient.kind, kind);
        for j in 0..m.len() {
            for c in 0..m.x[j].len() {
                assert!((back.x[j][c] - m.x[j][c]).abs() < 1e-10);
                assert!((back.nu[j][c] - m.nu[j][c]).abs() < 1e-10);
            }
            for (a, b) in back.kappa[j].as_slice().iter().zip(m.kappa[j].as_slice()) {
                assert!((a - b).abs() < 1e-10 * b);
            }
        }
    }
}

#[test]
fn polar_points_support_the_original() {
    let m = bumped(AmbientKind::Sphere, 64, 0.9);
    let d = polar_sphere(&m).unwrap();
    for j in (0..m.len()).step_by(7) {
        let sup = polar_sup(&m, &d.x[j], 64);
        assert!((-1e-12..1e-3).contains(&sup), "node {j}: {sup}");
    }
}

#[test]
fn dual_flows_commute() {
    let cases = [("sphere_geodesic", 0.9, 1.0), ("sphere_geodesic", 0.6, 0.5), ("hyperbolic_geodesic", 1.0, -0.5), ("desitter_umbilic", 0.5, 0.5)];
    for (name, value, p) in cases {
        let mut pr = ExactParams::new(name, 2, CurvatureFunctionSpec::isotropic(SymFn::Mean, p)).unwrap();
        pr.value = Some(value);
        pr.t_end = 0.1;
        let res = dual_flow_commutes(name, &pr).unwrap();
        assert!(res < 1e-6, "{name}: {res}");
    }
}

#[test]
fn pseudo_harnack_pairs_with_the_dual() {
    let pr = ExactParams::new("hyperbolic_geodesic", 2, CurvatureFunctionSpec::isotropic(SymFn::Mean, -0.5)).unwrap();
    let rep = paired_pseudo("hyperbolic_geodesic", &pr).unwrap();
    assert!(!rep.pseudo.is_empty() && !rep.dual_standard.is_empty());
    assert!(rep.pseudo_min >= -1e-6);
    assert!(rep.dual_min >= -1e-6);
    assert!(rep.max_gap.is_finite());
}

#[test]
fn dual_speeds() {
    let d = dual_speed(&CurvatureFunctionSpec::isotropic(SymFn::Mean, 0.5)).unwrap();
    assert_eq!(d.base, SymFn::Inverse(Box::new(SymFn::Mean)));
    assert_eq!(d.p, -0.5);
    assert_eq!(dual_speed(&CurvatureFunctionSpec::isotropic(SymFn::GaussRoot, 2.0)).unwrap().base, SymFn::GaussRoot);
    let mut spec = CurvatureFunctionSpec::isotropic(SymFn::Mean, 1.0);
    spec.psi = hflow::symfun::ScalarFn::constant(2.0);
    assert!(dual_speed(&spec).is_err());
}

#[test]
fn unsupported_duals() {
    let amb = AmbientSpec::new(AmbientKind::Euclidean, 2).unwrap();
    let st = SupportState::round(amb, Grid::SphereAxisym { nodes: 8, dim: 2 }, 1.0, 0.0).unwrap();
    assert!(EmbeddedSample::from_shape(&hflow::flow::Shape::Support(st)).is_err());
    assert!(dual_kind(AmbientKind::Minkowski).is_err());
    let m = sample(AmbientKind::Sphere, 16, 0.5);
    assert!(gauss_hyperbolic(&m).is_err());
    let mut flat = m.clone();
    flat.kappa[3] = hflow::symfun::Kappa::new(vec![0.0, 1.0]).unwrap();
    assert!(matches!(polar_sphere(&flat), Err(Error::DegenerateShape { node: 3, .. })));
    let pr = ExactParams::new("euclid_round", 2, CurvatureFunctionSpec::isotropic(SymFn::Mean, 1.0)).unwrap();
    assert!(dual_exact("euclid_round", &pr).is_err());
}

proptest! {
    #[test]
    fn spherical_polar_reciprocates(rho in 0.05f64..1.5) {
        let m = sample(AmbientKind::Sphere, 16, rho);
        let d = polar_sphere(&m).unwrap();
        for (a, b) in m.kappa.iter().zip(&d.kappa) {
            for (x, y) in a.as_slice().iter().zip(b.as_slice()) {
                prop_assert!((x * y - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn hyperbolic_to_de_sitter_is_reversible(rho in 0.05f64..4.0) {
        let m = sample(AmbientKind::Hyperbolic, 16, rho);
        let back = gauss_de_sitter(&gauss_hyperbolic(&m).unwrap()).unwrap();
        prop_assert_eq!(back.x, m.x);
    }
}
