mod common;

use proptest::prelude::*;
use squashlogic::nn::ActivationKind;

fn kind() -> impl Strategy<Value = ActivationKind> {
    prop_oneof![
        Just(ActivationKind::Relu),
        Just(ActivationKind::Sigmoid),
        Just(ActivationKind::Tanh),
        Just(ActivationKind::squashing(1.0, true)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn backprop_matches_numeric_gradient(k in kind(), seed in any::<u64>()) {
        let (net, x, y) = common::random_case(k, seed);
        let err = common::network_gradient_error(&net, &x, &y);
        prop_assert!(err < 1e-4, "{} seed {seed}: relative error {err:e}", k.label());
    }

    #[test]
    fn frozen_parameters_still_get_exact_gradients(seed in any::<u64>()) {
        let (mut net, x, y) = common::random_case(ActivationKind::squashing(1.0, true), seed);
        for layer in net.layers_mut() {
            layer.set_trainable(false, false);
            layer.set_trainable_beta(false);
        }
        prop_assert!(common::network_gradient_error(&net, &x, &y) < 1e-4);
    }
}
