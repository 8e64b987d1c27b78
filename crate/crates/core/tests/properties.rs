//! Property tests over randomized networks and inputs: serialization
//! identity, activation calculus, chart invariance of curvature, and
//! metric-tensor structure.

use boundary_geometry::curvature::{
    planar_curvature_in_chart, select_chart, ChartFrame,
};
use boundary_geometry::derivatives::bundle;
use boundary_geometry::field::ScalarField;
use boundary_geometry::network::{ActivationKind, Layer, MlpNetwork};
use boundary_geometry::riemann::metric_at;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn activation_strategy() -> impl Strategy<Value = ActivationKind> {
    prop_oneof![
        Just(ActivationKind::Tanh),
        Just(ActivationKind::Sigmoid),
        (0.3f64..4.0).prop_map(|alpha| ActivationKind::Softplus { alpha }),
    ]
}

fn net_strategy(dim: usize) -> impl Strategy<Value = MlpNetwork> {
    (2usize..8, activation_strategy(), any::<[u8; 32]>()).prop_map(move |(width, act, seed)| {
        let mut vals = seed.iter().cycle().map(|&b| (b as f64 - 127.5) / 64.0);
        let weight = DMatrix::from_fn(width, dim, |_, _| vals.next().unwrap());
        let bias = DVector::from_fn(width, |_, _| vals.next().unwrap() * 0.25);
        let a = DVector::from_fn(width, |_, _| vals.next().unwrap());
        MlpNetwork::new(
            vec![Layer { weight, bias }],
            a,
            vals.next().unwrap() * 0.25,
            act,
        )
        .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn model_json_roundtrip_is_bit_exact(net in net_strategy(3), x in prop::array::uniform3(-2.0f64..2.0)) {
        let back = MlpNetwork::from_json(&net.to_json().unwrap()).unwrap();
        prop_assert_eq!(&back, &net);
        prop_assert_eq!(back.value(&x).unwrap(), net.value(&x).unwrap());
    }

    #[test]
    fn activations_are_strictly_increasing_with_positive_slope(
        kind in activation_strategy(),
        t in -6.0f64..6.0,
        dt in 1e-3f64..0.5,
    ) {
        prop_assert!(kind.eval(t + dt, 0).unwrap() > kind.eval(t, 0).unwrap());
        prop_assert!(kind.eval(t, 1).unwrap() > 0.0);
    }

    #[test]
    fn activation_derivatives_match_finite_differences(
        kind in activation_strategy(),
        t in -4.0f64..4.0,
        order in 0u8..3,
    ) {
        let h = 1e-5;
        let fd = (kind.eval(t + h, order).unwrap() - kind.eval(t - h, order).unwrap()) / (2.0 * h);
        let exact = kind.eval(t, order + 1).unwrap();
        prop_assert!((fd - exact).abs() <= 1e-6 * exact.abs().max(1.0) + 1e-9);
    }

    #[test]
    fn planar_curvature_is_chart_invariant_and_nonnegative(
        net in net_strategy(2),
        x in prop::array::uniform2(-1.5f64..1.5),
    ) {
        let b = bundle(&net, &x, false).unwrap();
        let gn = b.grad.norm();
        prop_assume!(gn > 1e-3);
        prop_assume!(b.grad[0].abs() > 0.1 * gn && b.grad[1].abs() > 0.1 * gn);
        let k0 = planar_curvature_in_chart(&b, &ChartFrame::solving_for(0, 2).unwrap()).unwrap();
        let k1 = planar_curvature_in_chart(&b, &ChartFrame::solving_for(1, 2).unwrap()).unwrap();
        prop_assert!(k0 >= 0.0);
        prop_assert!((k0 - k1).abs() <= 1e-8 * k0.max(1e-12));
    }

    #[test]
    fn level_scaling_leaves_curvature_fixed(
        net in net_strategy(2),
        x in prop::array::uniform2(-1.5f64..1.5),
        scale in 0.1f64..50.0,
    ) {
        let b1 = bundle(&net, &x, false).unwrap();
        prop_assume!(b1.grad.norm() > 1e-3);
        let b2 = bundle(&net.scaled_output(scale), &x, false).unwrap();
        let k1 = boundary_geometry::curvature::planar_curvature(&b1).unwrap();
        let k2 = boundary_geometry::curvature::planar_curvature(&b2).unwrap();
        prop_assert!((k1 - k2).abs() <= 1e-10 * k1.max(1.0));
    }

    #[test]
    fn induced_metric_is_spd_with_known_determinant(
        net in net_strategy(3),
        x in prop::array::uniform3(-1.5f64..1.5),
    ) {
        let b = net.bundle_at(&x, false).unwrap();
        prop_assume!(b.grad.norm() > 1e-3);
        let frame = select_chart(b.grad.as_slice()).unwrap();
        let metric = metric_at(&b, &frame).unwrap();
        // symmetric, unit-distance from identity check via g g^{-1}
        prop_assert!((metric.g[(0, 1)] - metric.g[(1, 0)]).abs() == 0.0);
        prop_assert!(metric.det_g > 0.0);
        let fd = b.grad[frame.dependent_axis];
        let expected = b.grad.norm_squared() / (fd * fd);
        prop_assert!((metric.det_g - expected).abs() <= 1e-10 * expected);
        let ident = &metric.g * &metric.g_inv;
        prop_assert!((ident - DMatrix::<f64>::identity(2, 2)).amax() <= 1e-10);
    }
}
