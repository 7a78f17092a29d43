#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use squashlogic::nn::{softmax_cross_entropy, ActivationKind, InitScheme, Matrix, Network};

/// `|a - n| / max(|a|, |n|, 1e-6)`.
pub fn rel_err(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-6)
}

/// Fourth-order central difference.
pub fn five_point<F: FnMut(f64) -> f64>(mut f: F, at: f64, h: f64) -> f64 {
    (8.0 * (f(at + h) - f(at - h)) - (f(at + 2.0 * h) - f(at - 2.0 * h))) / (12.0 * h)
}

fn loss(net: &Network, x: &Matrix, y: &[usize]) -> f64 {
    softmax_cross_entropy(&net.predict(x).unwrap(), y).unwrap().0
}

/// Largest relative error between backpropagated and numeric gradients over
/// every weight, bias and squashing `beta` of `net`.
pub fn network_gradient_error(net: &Network, x: &Matrix, y: &[usize]) -> f64 {
    const H: f64 = 1e-5;
    let (logits, cache) = net.forward(x).unwrap();
    let (_, dl) = softmax_cross_entropy(&logits, y).unwrap();
    let grads = net.backward(&cache, &dl).unwrap();
    let mut worst: f64 = 0.0;
    for (k, g) in grads.layers.iter().enumerate() {
        let layer = &net.layers()[k];
        for i in 0..layer.weights().as_slice().len() {
            let numeric = five_point(
                |v| {
                    let mut n = net.clone();
                    let mut w = layer.weights().clone();
                    w.as_mut_slice()[i] = v;
                    n.layers_mut()[k].set_weights(w).unwrap();
                    loss(&n, x, y)
                },
                layer.weights().as_slice()[i],
                H,
            );
            worst = worst.max(rel_err(g.weights.as_slice()[i], numeric));
        }
        for i in 0..layer.bias().len() {
            let numeric = five_point(
                |v| {
                    let mut n = net.clone();
                    let mut b = layer.bias().to_vec();
                    b[i] = v;
                    n.layers_mut()[k].set_bias(b).unwrap();
                    loss(&n, x, y)
                },
                layer.bias()[i],
                H,
            );
            worst = worst.max(rel_err(g.bias[i], numeric));
        }
        if layer.activation().is_squashing() {
            let numeric = five_point(
                |v| {
                    let mut n = net.clone();
                    n.layers_mut()[k].set_beta(v).unwrap();
                    loss(&n, x, y)
                },
                layer.beta(),
                H,
            );
            worst = worst.max(rel_err(g.beta, numeric));
        }
    }
    worst
}

/// A small random network with `hidden` everywhere, plus a batch to
/// differentiate on. Squashing layers get a random nonzero `beta` of either
/// sign.
pub fn random_case(hidden: ActivationKind, seed: u64) -> (Network, Matrix, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let depth = rng.random_range(1..=3);
    let mut sizes = vec![rng.random_range(1..=4)];
    for _ in 0..depth {
        sizes.push(rng.random_range(1..=5));
    }
    let classes = rng.random_range(2..=3);
    *sizes.last_mut().unwrap() = classes;
    let mut net = Network::mlp(&sizes, hidden, hidden, InitScheme::GlorotUniform, seed).unwrap();
    for layer in net.layers_mut() {
        let mut b = layer.bias().to_vec();
        b.iter_mut().for_each(|v| *v = rng.random_range(-0.5..0.5));
        layer.set_bias(b).unwrap();
        if layer.activation().is_squashing() {
            let mag = rng.random_range(0.3..5.0);
            layer.set_beta(if rng.random::<bool>() { mag } else { -mag }).unwrap();
        }
    }
    let batch = rng.random_range(1..=6);
    let data = (0..batch * sizes[0]).map(|_| rng.random_range(-2.0..2.0)).collect();
    let x = Matrix::new(batch, sizes[0], data).unwrap();
    let y = (0..batch).map(|_| rng.random_range(0..classes)).collect();
    (net, x, y)
}
