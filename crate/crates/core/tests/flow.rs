use hflow::ambient::{AmbientKind, AmbientSpec};
use hflow::flow::*;
use hflow::shape::*;
use hflow::symfun::{CurvatureFunctionSpec, ScalarFn, SymFn};

fn amb(kind: AmbientKind, n: usize) -> AmbientSpec {
    AmbientSpec::new(kind, n).unwrap()
}

fn round(n: usize, r: f64, t: f64) -> Shape {
    let grid = if n == 1 { Grid::Circle { nodes: 16 } } else { Grid::SphereAxisym { nodes: 16, dim: n } };
    Shape::Support(SupportState::round(amb(AmbientKind::Euclidean, n), grid, r, t).unwrap())
}

fn mcf(n: usize) -> FlowSpec {
    FlowSpec::new(amb(AmbientKind::Euclidean, n), CurvatureFunctionSpec::isotropic(SymFn::Mean, 1.0))
}

fn perturbed(n: usize, nodes: usize) -> Shape {
    let grid = if n == 1 { Grid::Circle { nodes } } else { Grid::SphereAxisym { nodes, dim: n } };
    let st = SupportState::from_normal_fn(amb(AmbientKind::Euclidean, n), grid, 0.01, |z| {
        let c = z[z.len() - 1];
        1.0 + 0.1 * (2.0 * c * c - 1.0)
    })
    .unwrap();
    Shape::Support(st)
}

#[test]
fn rk4_step_is_fifth_order_locally() {
    let spec = mcf(2);
    let exact = |t: f64| (1.0 - 4.0 * t).sqrt();
    let err = |dt: f64| (step(&round(2, 1.0, 0.0), &spec, dt).unwrap().values()[0] - exact(dt)).abs();
    let (a, b) = (err(0.02), err(0.01));
    assert!(a / b > 25.0, "ratio {}", a / b);
    assert!(b < 1e-8);
}

#[test]
fn psi_scales_the_velocity() {
    let mut speed = CurvatureFunctionSpec::isotropic(SymFn::Mean, 1.0);
    let state = perturbed(2, 32);
    let one = velocity(&state, &speed).unwrap();
    speed.psi = ScalarFn::constant(2.0);
    let two = velocity(&state, &speed).unwrap();
    for (a, b) in one.iter().zip(&two) {
        assert!((2.0 * a - b).abs() < 1e-14 * b.abs());
    }
}

#[test]
fn hyperboloid_follows_the_soliton_law() {
    for p in [0.5, 1.0, 2.0] {
        let n = 2;
        let speed = CurvatureFunctionSpec::isotropic(SymFn::Mean, p);
        let c = (n as f64).powf(p);
        let s = |t: f64| ((1.0 + p) * c * t).powf(1.0 / (1.0 + p));
        let t0 = 0.01;
        let grid = Grid::HyperbolicRadial { nodes: 16, rho_max: 1.0, dim: n };
        let init = SupportState::round(amb(AmbientKind::Minkowski, n), grid, s(t0), t0).unwrap();
        let mut spec = FlowSpec::new(amb(AmbientKind::Minkowski, n), speed);
        spec.clock_origin = Some(0.0);
        let trace = integrate(&spec, Shape::Support(init), 10.0 * t0, Sampling::Uniform { stride: 0.01 }).unwrap();
        assert_eq!(trace.meta.termination, Termination::Completed);
        for rec in &trace.records {
            let dev = (rec.state.values()[0] / s(rec.t) - 1.0).abs();
            assert!(dev < 1e-6, "p={p} t={} dev={dev}", rec.t);
        }
    }
}

#[test]
fn round_sphere_extinction_time() {
    let mut spec = mcf(2);
    spec.dt = DtPolicy::Fixed { dt: 1e-4 };
    let trace = integrate(&spec, round(2, 1.0, 0.0), 0.3, Sampling::Uniform { stride: 0.01 }).unwrap();
    let t_end = match trace.meta.termination {
        Termination::BlowUp { t, .. } | Termination::ConvexityLost { t, .. } => t,
        ref other => panic!("unexpected termination {other:?}"),
    };
    assert!((t_end - 0.25).abs() < 0.0025, "terminated at {t_end}");
}

#[test]
fn umbilic_data_stays_umbilic() {
    let trace = integrate(&mcf(2), round(2, 1.0, 0.01), 0.1, Sampling::Uniform { stride: 0.01 }).unwrap();
    for rec in &trace.records {
        let v = rec.state.values();
        let spread = v.iter().fold(f64::NEG_INFINITY, |m, x| m.max(*x)) - v.iter().fold(f64::INFINITY, |m, x| m.min(*x));
        assert!(spread < 1e-9);
    }
}

#[test]
fn halving_dt_is_fourth_order() {
    let run = |dt: f64| {
        let mut spec = mcf(2);
        spec.dt = DtPolicy::Fixed { dt };
        let init = SupportState::round(amb(AmbientKind::Euclidean, 2), Grid::SphereAxisym { nodes: 8, dim: 2 }, 1.0, 0.0);
        let tr = integrate(&spec, Shape::Support(init.unwrap()), 0.1, Sampling::Uniform { stride: 0.1 }).unwrap();
        tr.records.last().unwrap().state.values()[0]
    };
    let exact = (1.0 - 0.4_f64).sqrt();
    let (a, b) = ((run(0.004) - exact).abs(), (run(0.002) - exact).abs());
    assert!(a / b > 12.0, "ratio {}", a / b);
}

#[test]
fn speed_sign_is_constant_along_traces() {
    for p in [1.0, -0.5] {
        let spec = FlowSpec::new(amb(AmbientKind::Euclidean, 1), CurvatureFunctionSpec::isotropic(SymFn::Mean, p));
        let tr = integrate(&spec, perturbed(1, 64), 0.05, Sampling::Uniform { stride: 0.01 }).unwrap();
        for rec in &tr.records {
            assert!(rec.f.iter().all(|f| f.signum() == p.signum()));
        }
        assert!(tr.times().windows(2).all(|w| w[1] > w[0]));
    }
}

#[test]
fn chebyshev_agrees_with_rk4() {
    let mut spec = FlowSpec::new(amb(AmbientKind::Euclidean, 1), CurvatureFunctionSpec::isotropic(SymFn::Mean, 1.0));
    let sampling = Sampling::Uniform { stride: 0.01 };
    let rk4 = integrate(&spec, perturbed(1, 128), 0.05, sampling.clone()).unwrap();
    spec.dt = DtPolicy::Chebyshev { dt: 2e-4 };
    let rkc = integrate(&spec, perturbed(1, 128), 0.05, sampling).unwrap();
    assert_eq!(rk4.len(), rkc.len());
    for (a, b) in rk4.records.iter().zip(&rkc.records) {
        let gap = a.state.values().iter().zip(b.state.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(gap < 1e-6, "gap {gap} at t={}", a.t);
    }
}

#[test]
fn chebyshev_step_is_second_order() {
    let spec = mcf(2);
    let exact = |t: f64| (1.0 - 4.0 * t).sqrt();
    let err = |dt: f64| (chebyshev_step(&round(2, 1.0, 0.0), &spec, dt, 5).unwrap().values()[0] - exact(dt)).abs();
    assert!(err(0.02) / err(0.01) > 7.0);
}

#[test]
fn round_sphere_evolution_identities() {
    let mut spec = mcf(1);
    spec.dt = DtPolicy::Fixed { dt: 1e-4 };
    let tr = integrate(&spec, round(1, 1.0, 0.0), 0.01, Sampling::Uniform { stride: 0.0005 }).unwrap();
    let res = verify_flat_evolution(&tr).unwrap();
    assert!(res.records_checked > 0);
    assert!(res.normal < 1e-12);
    assert!(res.metric < 1e-6 && res.second_form < 1e-6 && res.weingarten < 1e-6, "{res:?}");
}

#[test]
fn ellipse_evolution_identities_converge() {
    let run = |nodes: usize, stride: f64| {
        let st = SupportState::from_normal_fn(amb(AmbientKind::Euclidean, 1), Grid::Circle { nodes }, 0.0, |z| {
            (2.0 * z[0] * z[0] + z[1] * z[1]).sqrt()
        })
        .unwrap();
        let tr = integrate(&mcf(1), Shape::Support(st), 4.0 * stride, Sampling::Uniform { stride }).unwrap();
        verify_flat_evolution(&tr).unwrap().metric
    };
    let coarse = run(64, 0.004);
    let fine = run(128, 0.002);
    assert!(coarse / fine > 3.0, "{coarse} -> {fine}");
}

#[test]
fn evolution_check_needs_three_records() {
    let tr = integrate(&mcf(1), round(1, 1.0, 0.0), 0.01, Sampling::Uniform { stride: 0.01 }).unwrap();
    assert!(verify_flat_evolution(&tr).is_err());
}

#[test]
fn u_field_on_the_shrinking_sphere() {
    let mut spec = mcf(2);
    spec.dt = DtPolicy::Fixed { dt: 1e-4 };
    let tr = integrate(&spec, round(2, 1.0, 0.0), 0.1, Sampling::Uniform { stride: 0.002 }).unwrap();
    for i in 2..tr.len() - 2 {
        let u = tr.u_field(i).unwrap();
        let exact = 2.0 / (1.0 - 4.0 * tr.records[i].t);
        assert!((u[0] - exact).abs() < 1e-6 * exact, "t={} u={} exact={exact}", tr.records[i].t, u[0]);
    }
    assert!(tr.u_field(0).is_err());
}

#[test]
fn static_trace_has_zero_u() {
    let mut tr = integrate(&mcf(1), round(1, 1.0, 0.0), 0.03, Sampling::Uniform { stride: 0.01 }).unwrap();
    let first = tr.records[0].clone();
    for rec in tr.records.iter_mut() {
        let t = rec.t;
        *rec = first.clone();
        rec.t = t;
    }
    assert!(tr.u_field(1).unwrap().iter().all(|u| *u == 0.0));
}

#[test]
fn traces_round_trip_through_json_lines() {
    let tr = integrate(&mcf(1), perturbed(1, 16), 0.02, Sampling::Uniform { stride: 0.01 }).unwrap();
    let mut buf = Vec::new();
    tr.write_jsonl(&mut buf).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert_eq!(text.lines().count(), tr.len() + 1);
    assert!(text.lines().next().unwrap().contains("\"kind\":\"header\""));
    let back = FlowTrace::read_jsonl(&buf[..]).unwrap();
    assert_eq!(back, tr);
    assert!(FlowTrace::read_jsonl(&b"{\"kind\":\"record\"}\n"[..]).is_err());
}

#[test]
fn integration_is_deterministic() {
    let a = integrate(&mcf(1), perturbed(1, 32), 0.02, Sampling::Uniform { stride: 0.01 }).unwrap();
    let b = integrate(&mcf(1), perturbed(1, 32), 0.02, Sampling::Uniform { stride: 0.01 }).unwrap();
    assert_eq!(a, b);
}

#[test]
fn invalid_specs_are_rejected() {
    let mut spec = mcf(1);
    spec.dt = DtPolicy::Chebyshev { dt: 0.0 };
    assert!(integrate(&spec, round(1, 1.0, 0.0), 0.1, Sampling::Uniform { stride: 0.01 }).is_err());
    let spec = mcf(1);
    assert!(integrate(&spec, round(1, 1.0, 0.0), -1.0, Sampling::Uniform { stride: 0.01 }).is_err());
    assert!(integrate(&spec, round(2, 1.0, 0.0), 0.1, Sampling::Uniform { stride: 0.01 }).is_err());
    let mut spec = mcf(1);
    spec.clock_origin = Some(1.0);
    assert!(integrate(&spec, round(1, 1.0, 0.0), 0.1, Sampling::Uniform { stride: 0.01 }).is_err());
}
