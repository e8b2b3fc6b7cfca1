use hflow::ambient::{AmbientKind, AmbientSpec};
use hflow::flow::*;
use hflow::harnack::*;
use hflow::shape::*;
use hflow::soliton::{exact_trace, ExactParams};
use hflow::symfun::{CurvatureFunctionSpec, SymFn};

fn exact(name: &str, n: usize, base: SymFn, p: f64) -> FlowTrace {
    let pr = ExactParams::new(name, n, CurvatureFunctionSpec::isotropic(base, p)).unwrap();
    exact_trace(name, &pr).unwrap()
}

fn min_over(lhs: &[LhsRecord]) -> f64 {
    lhs.iter().flat_map(|r| r.values.iter().copied()).fold(f64::INFINITY, f64::min)
}

fn ellipse_run(p: f64, nodes: usize, t_end: f64) -> FlowTrace {
    let amb = AmbientSpec::new(AmbientKind::Euclidean, 1).unwrap();
    let st = SupportState::from_normal_fn(amb, Grid::Circle { nodes }, 0.01, |z| {
        (1.5 * z[0] * z[0] + z[1] * z[1]).sqrt()
    })
    .unwrap();
    let mut spec = FlowSpec::new(amb, CurvatureFunctionSpec::isotropic(SymFn::Mean, p));
    spec.clock_origin = Some(0.0);
    integrate(&spec, Shape::Support(st), t_end, Sampling::Uniform { stride: t_end / 20.0 }).unwrap()
}

#[test]
fn kinds_parse_and_print() {
    for kind in [HarnackKind::Standard, HarnackKind::Bonus, HarnackKind::Pseudo, HarnackKind::PMinusOne, HarnackKind::Xcf] {
        assert_eq!(kind.to_string().parse::<HarnackKind>().unwrap(), kind);
    }
    assert!("harnack".parse::<HarnackKind>().is_err());
}

#[test]
fn hyperboloid_gives_equality() {
    for base in [SymFn::Mean, SymFn::GaussRoot] {
        for p in [0.5, 1.0, 2.0] {
            let tr = exact("mink_hyperboloid", 2, base.clone(), p);
            let lhs = standard_lhs(&tr, p).unwrap();
            assert_eq!(lhs.len(), tr.len());
            let gap = lhs.iter().flat_map(|r| r.values.iter()).fold(0.0_f64, |m, v| m.max(v.abs()));
            assert!(gap < 1e-6, "p={p}: {gap}");
        }
    }
}

#[test]
fn shrinking_round_sphere_is_strict() {
    let tr = exact("euclid_round", 2, SymFn::Mean, 1.0);
    assert!(min_over(&standard_lhs(&tr, 1.0).unwrap()) > 0.0);
}

#[test]
fn ellipse_satisfies_the_standard_inequality() {
    let tr = ellipse_run(1.0, 128, 0.05);
    let rep = report(&HarnackSpec::for_trace(HarnackKind::Standard, &tr), &tr).unwrap();
    assert_eq!(rep.status, ReportStatus::Ok);
    assert!(rep.passes(1e-3), "margin {}", rep.margin);
    assert_eq!(rep.records.len(), tr.len() - 2);
    assert_eq!(rep.summary_csv().lines().count(), rep.records.len() + 1);
}

#[test]
fn bonus_term_on_geodesic_spheres() {
    let n = 2.0;
    let tr = exact("sphere_geodesic", 2, SymFn::Mean, 1.0);
    let lhs = bonus_lhs(&tr).unwrap();
    assert!(!lhs.is_empty());
    for rec in &lhs {
        let cot = 1.0 / tr.records[rec.index].state.values()[0].tan();
        let closed = n * n * cot.powi(3) + n * cot / (2.0 * rec.clock);
        assert!((rec.values[0] - closed).abs() < 1e-8 * closed.abs().max(1.0), "t={}", rec.t);
        assert!(rec.values[0] >= -1e-9);
    }
    let plain = bonus_lhs_with(&tr, 0.0).unwrap();
    for (a, b) in plain.iter().zip(&lhs) {
        let h = tr.records[a.index].f[0];
        assert!((a.values[0] - b.values[0] - n * h).abs() < 1e-9 * a.values[0].abs().max(1.0));
        assert!(a.values[0] > b.values[0]);
    }
}

#[test]
fn pseudo_harnack_on_expanding_spheres() {
    for name in ["sphere_geodesic", "hyperbolic_geodesic"] {
        for p in [-1.0, -0.5, -0.25] {
            let tr = exact(name, 2, SymFn::Mean, p);
            let lhs = pseudo_lhs(&tr).unwrap();
            assert!(min_over(&lhs) >= -1e-6, "{name} p={p}");
        }
    }
}

#[test]
fn p_minus_one_on_expanding_round_sphere() {
    let tr = exact("euclid_round", 2, SymFn::Mean, -1.0);
    let mono = p_minus_one_monotonicity(&tr).unwrap();
    for u in &mono.inf {
        assert!((u - 0.5).abs() < 1e-10);
    }
    assert!(mono.inf_nondecreasing(1e-8) && mono.sup_nonincreasing(1e-8));
}

#[test]
fn p_minus_one_on_an_ellipse() {
    let tr = ellipse_run(-1.0, 64, 0.2);
    let rep = report(&HarnackSpec::for_trace(HarnackKind::PMinusOne, &tr), &tr).unwrap();
    let mono = rep.monotonicity.as_ref().unwrap();
    assert_eq!(mono.times.len(), tr.len() - 2);
    assert!(rep.passes(1e-3), "drop {}", mono.worst_inf_drop);
}

#[test]
fn de_sitter_flags() {
    let tr = exact("desitter_umbilic", 2, SymFn::Mean, 0.5);
    for i in 0..tr.len() {
        let flags = hypothesis_flags(&tr, i);
        assert_eq!(flags.kappa_le_one, Some(true));
        assert!(flags.passes() && flags.horoconvex.is_none());
    }
    let rep = report(&HarnackSpec::for_trace(HarnackKind::Standard, &tr), &tr).unwrap();
    assert!(rep.excluded.is_empty() && rep.passes(1e-3));
}

#[test]
fn hyperbolic_flags() {
    let tr = exact("hyperbolic_geodesic", 2, SymFn::Mean, -0.5);
    assert_eq!(hypothesis_flags(&tr, 0).horoconvex, Some(true));
}

#[test]
fn report_of_the_equality_case() {
    let tr = exact("mink_hyperboloid", 2, SymFn::Mean, 1.0);
    let rep = report(&HarnackSpec::for_trace(HarnackKind::Standard, &tr), &tr).unwrap();
    assert_eq!(rep.orientation, 1.0);
    assert!(rep.equality_gap < 1e-6);
    assert!(rep.argmin.is_some());
    let back: HarnackReport = serde_json::from_str(&serde_json::to_string(&rep).unwrap()).unwrap();
    assert_eq!(back, rep);
}

#[test]
fn reversed_orientation_below_minus_one() {
    let tr = exact("euclid_round", 2, SymFn::Mean, -2.0);
    let rep = report(&HarnackSpec::for_trace(HarnackKind::Standard, &tr), &tr).unwrap();
    assert_eq!(rep.orientation, -1.0);
    assert!(rep.margin.is_finite());
}

#[test]
fn too_short_traces_have_no_samples() {
    let amb = AmbientSpec::new(AmbientKind::Euclidean, 1).unwrap();
    let st = SupportState::round(amb, Grid::Circle { nodes: 16 }, 1.0, 0.01).unwrap();
    let spec = FlowSpec::new(amb, CurvatureFunctionSpec::isotropic(SymFn::Mean, 1.0));
    let tr = integrate(&spec, Shape::Support(st), 0.02, Sampling::Uniform { stride: 0.01 }).unwrap();
    assert_eq!(tr.len(), 2);
    let rep = report(&HarnackSpec::for_trace(HarnackKind::Standard, &tr), &tr).unwrap();
    assert_eq!(rep.status, ReportStatus::NoAdmissibleSamples);
    assert!(!rep.passes(1.0));
}

#[test]
fn invalid_monitors_are_rejected() {
    let flat = exact("euclid_round", 2, SymFn::Mean, -1.0);
    let spec = HarnackSpec { kind: HarnackKind::Standard, p: -1.0, beta: 0.0 };
    assert!(report(&spec, &flat).is_err());
    assert!(standard_lhs(&flat, 0.0).is_err());
    assert!(pseudo_lhs(&flat).is_err());
    assert!(bonus_lhs(&flat).is_err());

    let sphere = exact("sphere_geodesic", 2, SymFn::Mean, -1.5);
    assert!(pseudo_lhs(&sphere).is_err());
    let sphere = exact("sphere_geodesic", 2, SymFn::Mean, 0.5);
    assert!(pseudo_lhs(&sphere).is_err());
    assert!(p_minus_one_monotonicity(&sphere).is_err());

    let hyp = exact("hyperbolic_geodesic", 2, SymFn::Mean, -0.5);
    assert!(HarnackSpec::for_trace(HarnackKind::Standard, &hyp).validate(&hyp).is_err());
}
