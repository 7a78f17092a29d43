use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::init::{init_params, InitScheme};
use super::{ActivationKind, Matrix};
use crate::error::{Error, Result};
use crate::logic::SquashingParams;

/// Fully-connected layer `y = act(W x + b)` with per-parameter-group freezing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseLayer {
    weights: Matrix,
    bias: Vec<f64>,
    activation: ActivationKind,
    beta: f64,
    trainable_weights: bool,
    trainable_bias: bool,
    trainable_beta: bool,
}

impl DenseLayer {
    /// `weights` is `fan_out x fan_in`. Squashing layers start at their
    /// `beta0` and inherit its `trainable` flag.
    pub fn new(weights: Matrix, bias: Vec<f64>, activation: ActivationKind) -> Result<Self> {
        if bias.len() != weights.rows() {
            return Err(Error::Shape(format!(
                "bias has {} entries for {} units",
                bias.len(),
                weights.rows()
            )));
        }
        if !weights.all_finite() || bias.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidParameter("layer parameters must be finite".into()));
        }
        activation.validate()?;
        let (beta, trainable_beta) = match activation {
            ActivationKind::Squashing { beta0, trainable, .. } => (beta0, trainable),
            _ => (0.0, false),
        };
        Ok(Self {
            weights,
            bias,
            activation,
            beta,
            trainable_weights: true,
            trainable_bias: true,
            trainable_beta,
        })
    }

    pub fn fan_in(&self) -> usize {
        self.weights.cols()
    }

    pub fn fan_out(&self) -> usize {
        self.weights.rows()
    }

    pub fn weights(&self) -> &Matrix {
        &self.weights
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn activation(&self) -> ActivationKind {
        self.activation
    }

    /// Current sharpness; meaningful only for squashing layers.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn trainable_weights(&self) -> bool {
        self.trainable_weights
    }

    pub fn trainable_bias(&self) -> bool {
        self.trainable_bias
    }

    pub fn trainable_beta(&self) -> bool {
        self.trainable_beta
    }

    pub fn set_trainable(&mut self, weights: bool, bias: bool) {
        self.trainable_weights = weights;
        self.trainable_bias = bias;
    }

    pub fn set_trainable_beta(&mut self, on: bool) {
        self.trainable_beta = on && self.activation.is_squashing();
    }

    pub fn set_beta(&mut self, beta: f64) -> Result<()> {
        if let ActivationKind::Squashing { a, lambda, .. } = self.activation {
            SquashingParams::new(a, lambda, beta)?;
            self.beta = beta;
            Ok(())
        } else {
            Err(Error::InvalidParameter("only squashing layers carry beta".into()))
        }
    }

    pub fn set_weights(&mut self, weights: Matrix) -> Result<()> {
        if weights.shape() != self.weights.shape() {
            return Err(Error::Shape(format!(
                "expected {:?} weights, got {:?}",
                self.weights.shape(),
                weights.shape()
            )));
        }
        self.weights = weights;
        Ok(())
    }

    pub fn set_bias(&mut self, bias: Vec<f64>) -> Result<()> {
        if bias.len() != self.bias.len() || bias.iter().any(|b| !b.is_finite()) {
            return Err(Error::Shape(format!("expected {} finite biases", self.bias.len())));
        }
        self.bias = bias;
        Ok(())
    }

    pub(crate) fn params_mut(&mut self) -> (&mut [f64], &mut [f64], &mut f64) {
        (self.weights.as_mut_slice(), &mut self.bias, &mut self.beta)
    }

    pub(crate) fn squashing_params(&self) -> Option<SquashingParams> {
        self.activation.params(self.beta)
    }

    /// Pre-activations `x W^T + b` into `out` (`batch x fan_out`).
    fn affine(&self, x: &Matrix) -> Matrix {
        let (batch, fan_out) = (x.rows(), self.fan_out());
        let mut out = Vec::with_capacity(batch * fan_out);
        for xr in x.row_iter() {
            for (o, wr) in self.weights.row_iter().enumerate() {
                out.push(dot(xr, wr) + self.bias[o]);
            }
        }
        if fan_out == 0 {
            return Matrix::zeros(batch, 0);
        }
        Matrix::from_raw(batch, fan_out, out)
    }

    pub fn forward(&self, x: &Matrix) -> Matrix {
        let mut z = self.affine(x);
        let sp = self.squashing_params();
        for v in z.as_mut_slice() {
            *v = self.activation.value(*v, sp.as_ref());
        }
        z
    }

    fn forward_with_grads(&self, x: &Matrix) -> (Matrix, Matrix, Option<Matrix>) {
        let mut z = self.affine(x);
        let sp = self.squashing_params();
        let mut dz = Matrix::zeros(z.rows(), z.cols());
        let mut dbeta = sp.map(|_| Matrix::zeros(z.rows(), z.cols()));
        for (i, v) in z.as_mut_slice().iter_mut().enumerate() {
            let (y, d, db) = self.activation.value_and_grads(*v, sp.as_ref());
            *v = y;
            dz.as_mut_slice()[i] = d;
            if let Some(m) = dbeta.as_mut() {
                m.as_mut_slice()[i] = db;
            }
        }
        (z, dz, dbeta)
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [0.0; 4];
    let mut ca = a.chunks_exact(4);
    let mut cb = b.chunks_exact(4);
    for (x, y) in (&mut ca).zip(&mut cb) {
        for i in 0..4 {
            acc[i] += x[i] * y[i];
        }
    }
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

#[inline]
fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// How the last layer's output becomes class logits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputHead {
    /// Last-layer outputs are the logits.
    #[default]
    Logits,
    /// A single output `o` expands to the two logits `(1 - o, o)`.
    Complement,
}

/// Per-layer gradient of the scalar loss.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerGrads {
    pub weights: Matrix,
    pub bias: Vec<f64>,
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<LayerGrads>,
}

/// Whatever `backward` needs from the forward pass.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    inputs: Vec<Matrix>,
    d_act: Vec<Matrix>,
    d_beta: Vec<Option<Matrix>>,
}

/// Ordered stack of dense layers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Network {
    layers: Vec<DenseLayer>,
    #[serde(default)]
    head: OutputHead,
}

impl Network {
    pub fn new(layers: Vec<DenseLayer>, head: OutputHead) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Shape("network needs at least one layer".into()));
        }
        for (k, pair) in layers.windows(2).enumerate() {
            if pair[0].fan_out() != pair[1].fan_in() {
                return Err(Error::Shape(format!(
                    "layer {k} emits {} features but layer {} expects {}",
                    pair[0].fan_out(),
                    k + 1,
                    pair[1].fan_in()
                )));
            }
        }
        if head == OutputHead::Complement && layers.last().map(DenseLayer::fan_out) != Some(1) {
            return Err(Error::Shape("complement head needs a single output unit".into()));
        }
        Ok(Self { layers, head })
    }

    /// Multi-layer perceptron over `sizes = [d_in, h_1, ..., d_out]`: `hidden`
    /// after every layer but the last, `output` after the last. Weights come
    /// from one seeded stream in layer order, so networks with equal shapes
    /// start from equal weights whatever their activations. Biases start at 0.
    pub fn mlp(
        sizes: &[usize],
        hidden: ActivationKind,
        output: ActivationKind,
        scheme: InitScheme,
        seed: u64,
    ) -> Result<Self> {
        if sizes.len() < 2 {
            return Err(Error::Shape("need at least input and output sizes".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let last = sizes.len() - 2;
        let layers = sizes
            .windows(2)
            .enumerate()
            .map(|(k, w)| {
                let act = if k == last { output } else { hidden };
                DenseLayer::new(init_params(w[1], w[0], scheme, &mut rng), vec![0.0; w[1]], act)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(layers, OutputHead::Logits)
    }

    pub fn layers(&self) -> &[DenseLayer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [DenseLayer] {
        &mut self.layers
    }

    pub fn head(&self) -> OutputHead {
        self.head
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].fan_in()
    }

    pub fn n_outputs(&self) -> usize {
        match self.head {
            OutputHead::Logits => self.layers[self.layers.len() - 1].fan_out(),
            OutputHead::Complement => 2,
        }
    }

    pub fn parameter_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| {
                l.weights.as_slice().len() + l.bias.len() + usize::from(l.activation.is_squashing())
            })
            .sum()
    }

    /// Indices of the squashing layers, in order.
    pub fn squashing_layers(&self) -> Vec<usize> {
        (0..self.layers.len())
            .filter(|&k| self.layers[k].activation.is_squashing())
            .collect()
    }

    /// Current `beta` of each squashing layer, in order.
    pub fn betas(&self) -> Vec<f64> {
        self.layers
            .iter()
            .filter(|l| l.activation.is_squashing())
            .map(|l| l.beta)
            .collect()
    }

    fn check_input(&self, x: &Matrix) -> Result<()> {
        if x.cols() != self.input_dim() {
            return Err(Error::Shape(format!(
                "input has {} features, network expects {}",
                x.cols(),
                self.input_dim()
            )));
        }
        Ok(())
    }

    fn apply_head(&self, out: Matrix) -> Matrix {
        match self.head {
            OutputHead::Logits => out,
            OutputHead::Complement => {
                let data = out.as_slice().iter().flat_map(|&o| [1.0 - o, o]).collect();
                Matrix::from_raw(out.rows(), 2, data)
            }
        }
    }

    /// Logits only; no cache.
    pub fn predict(&self, x: &Matrix) -> Result<Matrix> {
        self.check_input(x)?;
        let mut cur = self.layers[0].forward(x);
        for layer in &self.layers[1..] {
            cur = layer.forward(&cur);
        }
        Ok(self.apply_head(cur))
    }

    /// Arg-max class per row; ties go to the lower index.
    pub fn classify(&self, x: &Matrix) -> Result<Vec<usize>> {
        Ok(argmax_rows(&self.predict(x)?))
    }

    pub fn forward(&self, x: &Matrix) -> Result<(Matrix, ForwardCache)> {
        self.check_input(x)?;
        let n = self.layers.len();
        let mut cache = ForwardCache {
            inputs: Vec::with_capacity(n),
            d_act: Vec::with_capacity(n),
            d_beta: Vec::with_capacity(n),
        };
        let mut cur = x.clone();
        for layer in &self.layers {
            let (out, d_act, d_beta) = layer.forward_with_grads(&cur);
            cache.inputs.push(std::mem::replace(&mut cur, out));
            cache.d_act.push(d_act);
            cache.d_beta.push(d_beta);
        }
        Ok((self.apply_head(cur), cache))
    }

    /// Gradients of the loss for every parameter, frozen ones included.
    pub fn backward(&self, cache: &ForwardCache, dlogits: &Matrix) -> Result<Gradients> {
        let batch = cache.inputs.first().map_or(0, Matrix::rows);
        if dlogits.shape() != (batch, self.n_outputs()) {
            return Err(Error::Shape(format!(
                "dlogits is {:?}, expected ({batch}, {})",
                dlogits.shape(),
                self.n_outputs()
            )));
        }
        let mut delta = match self.head {
            OutputHead::Logits => dlogits.clone(),
            OutputHead::Complement => {
                let d = dlogits.row_iter().map(|r| r[1] - r[0]).collect();
                Matrix::from_raw(batch, 1, d)
            }
        };
        let mut grads: Vec<LayerGrads> = Vec::with_capacity(self.layers.len());
        for k in (0..self.layers.len()).rev() {
            let layer = &self.layers[k];
            let input = &cache.inputs[k];
            let mut d_beta = 0.0;
            if let Some(db) = &cache.d_beta[k] {
                d_beta = dot(delta.as_slice(), db.as_slice());
            }
            for (d, a) in delta.as_mut_slice().iter_mut().zip(cache.d_act[k].as_slice()) {
                *d *= a;
            }
            let mut d_w = Matrix::zeros(layer.fan_out(), layer.fan_in());
            let mut d_b = vec![0.0; layer.fan_out()];
            for b in 0..batch {
                let xr = input.row(b);
                for (o, &g) in delta.row(b).iter().enumerate() {
                    if g != 0.0 {
                        axpy(g, xr, d_w.row_mut(o));
                        d_b[o] += g;
                    }
                }
            }
            let next = if k > 0 {
                let mut dx = Matrix::zeros(batch, layer.fan_in());
                for b in 0..batch {
                    let dr = delta.row(b).to_vec();
                    let row = dx.row_mut(b);
                    for (o, &g) in dr.iter().enumerate() {
                        if g != 0.0 {
                            axpy(g, layer.weights.row(o), row);
                        }
                    }
                }
                Some(dx)
            } else {
                None
            };
            grads.push(LayerGrads {
                weights: d_w,
                bias: d_b,
                beta: d_beta,
            });
            if let Some(dx) = next {
                delta = dx;
            }
        }
        grads.reverse();
        Ok(Gradients { layers: grads })
    }
}

pub fn argmax_rows(m: &Matrix) -> Vec<usize> {
    m.row_iter()
        .map(|r| {
            r.iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |best, (i, &v)| if v > best.1 { (i, v) } else { best })
                .0
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::softmax_cross_entropy;

    fn layer(w: &[&[f64]], b: &[f64], act: ActivationKind) -> DenseLayer {
        DenseLayer::new(Matrix::from_rows(w).unwrap(), b.to_vec(), act).unwrap()
    }

    #[test]
    fn sharp_squashing_is_crisp_and() {
        let net = Network::new(
            vec![layer(&[&[1.0, 1.0]], &[-1.0], ActivationKind::squashing(1e6, false))],
            OutputHead::Logits,
        )
        .unwrap();
        let x = Matrix::from_rows(&[[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]]).unwrap();
        let out = net.predict(&x).unwrap();
        let want = [0.0, 0.0, 0.0, 1.0];
        for (o, w) in out.as_slice().iter().zip(want) {
            assert!((o - w).abs() < 1e-5, "{o} vs {w}");
        }
    }

    #[test]
    fn zero_tanh_layer_outputs_zero() {
        let net = Network::new(
            vec![layer(&[&[0.0, 0.0], &[0.0, 0.0]], &[0.0, 0.0], ActivationKind::Tanh)],
            OutputHead::Logits,
        )
        .unwrap();
        let x = Matrix::from_rows(&[[3.0, -1.0], [0.5, 2.0]]).unwrap();
        assert!(net.predict(&x).unwrap().as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn relu_identity_on_negative_inputs() {
        let net = Network::new(
            vec![layer(&[&[1.0, 0.0], &[0.0, 1.0]], &[0.0, 0.0], ActivationKind::Relu)],
            OutputHead::Logits,
        )
        .unwrap();
        let x = Matrix::from_rows(&[[-3.0, -1.0], [-0.5, -2.0]]).unwrap();
        assert!(net.predict(&x).unwrap().as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn shape_errors() {
        let net = Network::mlp(&[3, 4, 2], ActivationKind::Relu, ActivationKind::Identity, InitScheme::GlorotUniform, 0)
            .unwrap();
        assert!(matches!(net.predict(&Matrix::zeros(2, 2)), Err(Error::Shape(_))));
        let a = layer(&[&[1.0, 1.0]], &[0.0], ActivationKind::Relu);
        let b = layer(&[&[1.0, 1.0]], &[0.0], ActivationKind::Relu);
        assert!(Network::new(vec![a.clone(), b], OutputHead::Logits).is_err());
        let wide = layer(&[&[1.0, 1.0], &[1.0, 0.0]], &[0.0, 0.0], ActivationKind::Relu);
        assert!(Network::new(vec![wide], OutputHead::Complement).is_err());
        assert!(Network::new(vec![a], OutputHead::Complement).is_ok());
        assert!(DenseLayer::new(Matrix::zeros(2, 2), vec![0.0], ActivationKind::Relu).is_err());
    }

    #[test]
    fn forward_matches_predict() {
        let net = Network::mlp(
            &[2, 5, 3],
            ActivationKind::squashing(0.7, true),
            ActivationKind::Sigmoid,
            InitScheme::GlorotUniform,
            3,
        )
        .unwrap();
        let x = Matrix::from_rows(&[[0.1, -0.4], [2.0, 1.0], [-1.0, 0.3]]).unwrap();
        let (logits, _) = net.forward(&x).unwrap();
        assert_eq!(logits, net.predict(&x).unwrap());
    }

    #[test]
    fn saturated_squashing_has_vanishing_weight_gradient() {
        let net = Network::new(
            vec![layer(&[&[1.0, 0.0], &[0.0, 1.0]], &[0.0, 0.0], ActivationKind::squashing(50.0, true))],
            OutputHead::Logits,
        )
        .unwrap();
        let x = Matrix::from_rows(&[[5.0, -4.0], [-6.0, 7.0]]).unwrap();
        let (logits, cache) = net.forward(&x).unwrap();
        let (_, dl) = softmax_cross_entropy(&logits, &[0, 1]).unwrap();
        let g = net.backward(&cache, &dl).unwrap();
        assert!(g.layers[0].weights.as_slice().iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn complement_head_expands() {
        let net = Network::new(
            vec![layer(&[&[1.0]], &[0.0], ActivationKind::Identity)],
            OutputHead::Complement,
        )
        .unwrap();
        let out = net.predict(&Matrix::from_rows(&[[0.25]]).unwrap()).unwrap();
        assert_eq!(out.as_slice(), &[0.75, 0.25]);
        assert_eq!(net.classify(&Matrix::from_rows(&[[0.9], [0.1]]).unwrap()).unwrap(), vec![1, 0]);
    }

    #[test]
    fn equal_shapes_get_equal_initial_weights() {
        let a = Network::mlp(&[4, 6, 3], ActivationKind::Relu, ActivationKind::Identity, InitScheme::GlorotUniform, 11)
            .unwrap();
        let b = Network::mlp(
            &[4, 6, 3],
            ActivationKind::squashing(0.1, true),
            ActivationKind::Identity,
            InitScheme::GlorotUniform,
            11,
        )
        .unwrap();
        for (la, lb) in a.layers().iter().zip(b.layers()) {
            assert_eq!(la.weights(), lb.weights());
        }
    }
}
