use hflow::ambient::{AmbientKind, AmbientSpec};
use hflow::flow::*;
use hflow::harnack::standard_lhs;
use hflow::shape::*;
use hflow::soliton::{exact_trace, ExactParams};
use hflow::symfun::{CurvatureFunctionSpec, Kappa, SymFn};
use hflow::xcf::*;
use nalgebra::{DMatrix, Matrix3};
use proptest::prelude::*;

fn gauss() -> CurvatureFunctionSpec {
    CurvatureFunctionSpec::isotropic(SymFn::GaussRoot, 3.0)
}

/// Einstein tensor from the Gauss equation `R_ijkl = −(h_ik h_jl − h_il h_jk)`
/// by explicit index contraction.
fn einstein_oracle(g: &DMatrix<f64>, h: &DMatrix<f64>) -> DMatrix<f64> {
    let gi = g.clone().try_inverse().unwrap();
    let riem = |i: usize, j: usize, k: usize, l: usize| -(h[(i, k)] * h[(j, l)] - h[(i, l)] * h[(j, k)]);
    let mut ric = DMatrix::zeros(3, 3);
    for j in 0..3 {
        for k in 0..3 {
            let mut sum = 0.0;
            for i in 0..3 {
                for l in 0..3 {
                    sum += gi[(i, l)] * riem(l, j, i, k);
                }
            }
            ric[(j, k)] = sum;
        }
    }
    let scal = (&gi * &ric).trace();
    ric - g * (0.5 * scal)
}

fn perturbed_run(nodes: usize, stride: f64) -> FlowTrace {
    let amb = AmbientSpec::new(AmbientKind::Minkowski, 3).unwrap();
    let grid = Grid::HyperbolicRadial { nodes, rho_max: 2.0, dim: 3 };
    let st = SupportState::from_normal_fn(amb, grid, 0.01, |z| 1.0 + 0.1 / (z[0] * z[0])).unwrap();
    let spec = FlowSpec::new(amb, gauss());
    integrate(&spec, Shape::Support(st), 0.01 + 6.0 * stride, Sampling::Uniform { stride }).unwrap()
}

#[test]
fn einstein_tensor_examples() {
    let s = XcfSample::new(&Kappa::new(vec![1.0, 2.0, 3.0]).unwrap()).unwrap();
    assert_eq!(s.gauss, 6.0);
    assert_eq!(s.einstein, DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![6.0, 3.0, 2.0])));
    assert!((s.cross[(0, 0)] - 6.0).abs() < 1e-12 && (s.cross[(2, 2)] - 18.0).abs() < 1e-12);
    assert!(einstein_tensor(&Kappa::new(vec![1.0, 2.0]).unwrap()).is_err());
}

#[test]
fn einstein_from_forms_matches_the_gauss_equation() {
    let a = Matrix3::new(1.0, 0.2, -0.1, 0.3, 1.5, 0.4, 0.0, -0.2, 0.8);
    let g = DMatrix::from_column_slice(3, 3, (a.transpose() * a).as_slice());
    let b = Matrix3::new(2.0, 0.1, 0.3, 0.1, 1.0, -0.2, 0.3, -0.2, 3.0);
    let h = DMatrix::from_column_slice(3, 3, b.as_slice());
    let e = einstein_from_forms(&g, &h).unwrap();
    let oracle = einstein_oracle(&g, &h);
    assert!((&e - &oracle).abs().max() < 1e-12 * oracle.abs().max());
}

#[test]
fn soliton_satisfies_the_metric_flow() {
    let pr = ExactParams::new("mink_hyperboloid", 3, gauss()).unwrap();
    let tr = exact_trace("mink_hyperboloid", &pr).unwrap();
    assert!(xcf_metric_check(&tr).unwrap() < 1e-10);
    let mut wrong = tr.clone();
    for rec in wrong.records.iter_mut() {
        let rates = rec.rates.as_mut().unwrap();
        rates.values.iter_mut().for_each(|v| *v = 0.0);
    }
    assert!(xcf_metric_check(&wrong).unwrap() > 0.1);
}

#[test]
fn metric_flow_residual_converges() {
    let res: Vec<f64> = [(16, 0.002), (32, 0.001), (64, 0.0005)]
        .iter()
        .map(|&(nodes, stride)| xcf_metric_check(&perturbed_run(nodes, stride)).unwrap())
        .collect();
    assert!(res[0] / res[1] > 3.0 && res[1] / res[2] > 3.0, "{res:?}");
    assert!(res[2] < 5e-3);

    let tr = perturbed_run(64, 0.0005);
    let rec = &tr.records[tr.len() / 2];
    let k = &rec.kappa[0];
    let control = 2.0 * k.as_slice().iter().product::<f64>() / k.max();
    assert!(control > 100.0 * res[2]);
}

#[test]
fn xcf_harnack_is_the_standard_quantity_for_gauss_curvature() {
    let pr = ExactParams::new("mink_hyperboloid", 3, gauss()).unwrap();
    let exact = exact_trace("mink_hyperboloid", &pr).unwrap();
    for tr in [exact, perturbed_run(16, 0.002)] {
        let a = xcf_harnack(&tr).unwrap();
        let b = standard_lhs(&tr, 3.0).unwrap();
        assert_eq!(a.len(), b.len());
        let interior = tr.meta.grid.interior();
        for (ra, rb) in a.iter().zip(&b) {
            let scale = tr.records[ra.index].f.iter().fold(0.0_f64, |m, v| m.max(v.abs())) / ra.clock;
            for &j in &interior {
                assert!((ra.values[j] - rb.values[j]).abs() < 1e-9 * scale, "t={} node {j}", ra.t);
            }
        }
    }
}

#[test]
fn non_gauss_traces_are_rejected() {
    let amb = AmbientSpec::new(AmbientKind::Minkowski, 3).unwrap();
    let grid = Grid::HyperbolicRadial { nodes: 16, rho_max: 2.0, dim: 3 };
    let st = SupportState::round(amb, grid, 1.0, 0.01).unwrap();
    let spec = FlowSpec::new(amb, CurvatureFunctionSpec::isotropic(SymFn::ElemSym(3), 1.0));
    let tr = integrate(&spec, Shape::Support(st), 0.02, Sampling::Uniform { stride: 0.005 }).unwrap();
    assert!(check_xcf_trace(&tr).is_err());
    assert!(xcf_harnack(&tr).is_err());
    let pr = ExactParams::new("mink_hyperboloid", 2, CurvatureFunctionSpec::isotropic(SymFn::GaussRoot, 2.0)).unwrap();
    assert!(xcf_metric_check(&exact_trace("mink_hyperboloid", &pr).unwrap()).is_err());
}

proptest! {
    #[test]
    fn determinant_and_cross_tensor(k1 in 0.01f64..10.0, k2 in 0.01f64..10.0, k3 in 0.01f64..10.0) {
        let s = XcfSample::new(&Kappa::new(vec![k1, k2, k3]).unwrap()).unwrap();
        prop_assert!(s.det_defect() < 1e-12);
        let kh = [s.gauss * k1, s.gauss * k2, s.gauss * k3];
        for i in 0..3 {
            prop_assert!((s.cross[(i, i)] - kh[i]).abs() <= 1e-12 * kh[i]);
        }
    }

    #[test]
    fn einstein_forms_in_a_rotated_frame(k1 in 0.1f64..5.0, k2 in 0.1f64..5.0, k3 in 0.1f64..5.0, a in 0.0f64..6.3, b in 0.0f64..6.3) {
        let r = nalgebra::Rotation3::from_euler_angles(a, b, 0.3 * a);
        let q = DMatrix::from_column_slice(3, 3, r.matrix().as_slice());
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![k1, k2, k3]));
        let h = &q * d * q.transpose();
        let g = DMatrix::identity(3, 3);
        let e = einstein_from_forms(&g, &h).unwrap();
        let rotated = &q * einstein_tensor(&Kappa::new(vec![k1, k2, k3]).unwrap()).unwrap() * q.transpose();
        prop_assert!((e - rotated).abs().max() < 1e-12 * 25.0);
    }
}
