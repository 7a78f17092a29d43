//! Shallow networks whose hidden layer is a frozen nilpotent AND gate.
//!
//! Layer one holds `k` trainable perceptrons, one per half-plane
//! `w_x x + w_y y + c >= 0`; layer two is the conjunction
//! `[g_1 + ... + g_k - (k - 1)]` with its weights and bias frozen. Both layers
//! carry their own trainable `beta`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::datasets::Sense;
use crate::error::{Error, Result};
use crate::logic::{NilpotentOperatorSpec, SquashingParams};
use crate::nn::{init_params, ActivationKind, DenseLayer, InitScheme, Matrix, Network, OutputHead};

/// Activation used in both layers of a gate network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateActivation {
    #[default]
    Squashing,
    Relu,
    Sigmoid,
    Tanh,
}

impl GateActivation {
    pub const ALL: [GateActivation; 4] = [Self::Squashing, Self::Relu, Self::Sigmoid, Self::Tanh];

    fn kind(self, beta0: f64) -> ActivationKind {
        match self {
            Self::Squashing => ActivationKind::squashing(beta0, true),
            Self::Relu => ActivationKind::Relu,
            Self::Sigmoid => ActivationKind::Sigmoid,
            Self::Tanh => ActivationKind::Tanh,
        }
    }
}

impl fmt::Display for GateActivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Squashing => "squashing",
            Self::Relu => "relu",
            Self::Sigmoid => "sigmoid",
            Self::Tanh => "tanh",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateNetworkSpec {
    /// Number of lines, i.e. gate fan-in.
    pub k: usize,
    pub beta_layer1: f64,
    pub beta_gate: f64,
    #[serde(default)]
    pub activation: GateActivation,
}

impl GateNetworkSpec {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            beta_layer1: 1.0,
            beta_gate: 1.0,
            activation: GateActivation::Squashing,
        }
    }
}

/// Builds the two-layer gate network. Layer one is drawn from a seeded
/// Glorot stream with zero biases; the gate layer has weights `1` and bias
/// `-(k - 1)`, both frozen. The single gate output `o` is read as the logits
/// `(1 - o, o)`.
pub fn build_gate_network(spec: &GateNetworkSpec, seed: u64) -> Result<Network> {
    use rand::SeedableRng;

    if spec.k == 0 {
        return Err(Error::InvalidParameter("a gate network needs at least one line".into()));
    }
    let k = spec.k;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let lines = DenseLayer::new(
        init_params(k, 2, InitScheme::GlorotUniform, &mut rng),
        vec![0.0; k],
        spec.activation.kind(spec.beta_layer1),
    )?;
    let and = and_gate(k);
    let mut gate = DenseLayer::new(
        Matrix::new(1, k, and.weights().to_vec())?,
        vec![and.bias()],
        spec.activation.kind(spec.beta_gate),
    )?;
    gate.set_trainable(false, false);
    Network::new(vec![lines, gate], OutputHead::Complement)
}

/// `[g_1 + ... + g_k - (k - 1)]`.
pub fn and_gate(k: usize) -> NilpotentOperatorSpec {
    NilpotentOperatorSpec::new(vec![1.0; k.max(1)], -((k.max(1) - 1) as f64))
        .expect("unit weights are valid")
}

/// Nested two-input conjunctions over inputs `g_0 .. g_{k-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AndTree {
    Input(usize),
    And(Box<AndTree>, Box<AndTree>),
}

impl AndTree {
    pub fn and(l: AndTree, r: AndTree) -> Self {
        Self::And(Box::new(l), Box::new(r))
    }

    /// Balanced tree over inputs `lo..hi`.
    pub fn balanced(lo: usize, hi: usize) -> Self {
        assert!(hi > lo, "empty input range");
        if hi - lo == 1 {
            return Self::Input(lo);
        }
        let mid = lo + (hi - lo) / 2;
        Self::and(Self::balanced(lo, mid), Self::balanced(mid, hi))
    }

    /// Left-leaning chain `((g_0 ∧ g_1) ∧ g_2) ∧ ...`.
    pub fn chain(k: usize) -> Self {
        assert!(k > 0, "empty chain");
        (1..k).fold(Self::Input(0), |acc, i| Self::and(acc, Self::Input(i)))
    }

    pub fn inputs(&self) -> Vec<usize> {
        match self {
            Self::Input(i) => vec![*i],
            Self::And(l, r) => {
                let mut v = l.inputs();
                v.extend(r.inputs());
                v
            }
        }
    }

    /// Crisp nested evaluation, each node being `[x + y - 1]`.
    pub fn eval(&self, g: &[f64]) -> f64 {
        match self {
            Self::Input(i) => g[*i],
            Self::And(l, r) => (l.eval(g) + r.eval(g) - 1.0).clamp(0.0, 1.0),
        }
    }
}

/// Collapses a tree of two-input ANDs into one gate with unit weights and
/// bias `-(k - 1)`. The leaves must be exactly `0..k`, each used once.
pub fn flatten_and_tree(tree: &AndTree) -> Result<NilpotentOperatorSpec> {
    let mut ids = tree.inputs();
    ids.sort_unstable();
    if ids.iter().enumerate().any(|(i, &id)| i != id) {
        return Err(Error::InvalidParameter(format!(
            "tree leaves must be the distinct inputs 0..{}, got {ids:?}",
            ids.len()
        )));
    }
    Ok(and_gate(ids.len()))
}

fn gate_layers(net: &Network) -> Result<(&DenseLayer, &DenseLayer)> {
    match net.layers() {
        [lines, gate]
            if lines.fan_in() == 2 && gate.fan_out() == 1 && net.head() == OutputHead::Complement =>
        {
            Ok((lines, gate))
        }
        _ => Err(Error::Shape("expected a 2 -> k -> 1 gate network".into())),
    }
}

fn squashing_of(layer: &DenseLayer) -> Result<SquashingParams> {
    match layer.activation() {
        ActivationKind::Squashing { a, lambda, .. } => SquashingParams::new(a, lambda, layer.beta()),
        other => Err(Error::InvalidParameter(format!(
            "crisp reading needs squashing layers, found {other}"
        ))),
    }
}

/// The network with every Squashing activation replaced by its crisp limit
/// (cut, or `1 - cut` where `beta < 0`).
#[derive(Debug, Clone, PartialEq)]
pub struct CrispRegion {
    weights: Matrix,
    bias: Vec<f64>,
    lines: SquashingParams,
    gate_weights: Vec<f64>,
    gate_bias: f64,
    gate: SquashingParams,
}

impl CrispRegion {
    /// Crisp gate output at `(x, y)`.
    pub fn value(&self, x: f64, y: f64) -> f64 {
        let s: f64 = self
            .weights
            .row_iter()
            .zip(&self.bias)
            .zip(&self.gate_weights)
            .map(|((w, c), gw)| gw * self.lines.crisp(w[0] * x + w[1] * y + c))
            .sum();
        self.gate.crisp(s + self.gate_bias)
    }

    /// Class-1 membership, with the same tie rule as `Network::classify`.
    pub fn contains(&self, x: f64, y: f64) -> bool {
        self.value(x, y) > 0.5
    }
}

pub fn crisp_decision_region(net: &Network) -> Result<CrispRegion> {
    let (lines, gate) = gate_layers(net)?;
    Ok(CrispRegion {
        weights: lines.weights().clone(),
        bias: lines.bias().to_vec(),
        lines: squashing_of(lines)?,
        gate_weights: gate.weights().row(0).to_vec(),
        gate_bias: gate.bias()[0],
        gate: squashing_of(gate)?,
    })
}

/// One layer-one unit read back as `b y (>=|<=) m x + c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineExplanation {
    pub m: f64,
    pub b: f64,
    pub c: f64,
    pub sense: Sense,
    /// Both coefficients zero: the condition does not depend on the point.
    pub vacuous: bool,
}

impl LineExplanation {
    pub fn holds(&self, x: f64, y: f64) -> bool {
        let (lhs, rhs) = (self.b * y, self.m * x + self.c);
        match self.sense {
            Sense::Ge => lhs >= rhs,
            Sense::Le => lhs <= rhs,
        }
    }
}

impl fmt::Display for LineExplanation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.sense {
            Sense::Ge => ">=",
            Sense::Le => "<=",
        };
        write!(f, "{:.4}*y {op} {:.4}*x + {:.4}", self.b, self.m, self.c)?;
        if self.vacuous {
            f.write_str(" (vacuous condition)")?;
        }
        Ok(())
    }
}

/// The learned region as a conjunction of inequalities, or its complement
/// when the gate has turned decreasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Explanation {
    pub lines: Vec<LineExplanation>,
    pub complement: bool,
    pub region: String,
}

impl Explanation {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        self.lines.iter().all(|l| l.holds(x, y)) != self.complement
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.region);
        for (i, l) in self.lines.iter().enumerate() {
            out.push_str(&format!("  L{}: {l}\n", i + 1));
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Reads unit `i` with weights `(w_x, w_y)` and bias `c` as
/// `w_x x + w_y y + c >= 0`, that is `w_y y >= -w_x x - c`; the sense flips
/// when the layer's `beta` is negative.
pub fn extract_line_explanations(net: &Network) -> Result<Explanation> {
    let (lines, gate) = gate_layers(net)?;
    let flip = lines.activation().is_squashing() && lines.beta() < 0.0;
    let explained: Vec<LineExplanation> = lines
        .weights()
        .row_iter()
        .zip(lines.bias())
        .map(|(w, &c)| LineExplanation {
            m: -w[0],
            b: w[1],
            c: -c,
            sense: if flip { Sense::Le } else { Sense::Ge },
            vacuous: w[0] == 0.0 && w[1] == 0.0,
        })
        .collect();
    let complement = gate.activation().is_squashing() && gate.beta() < 0.0;
    let names: Vec<String> = (1..=explained.len()).map(|i| format!("L{i}")).collect();
    let and = format!("AND({})", names.join(", "));
    let region = if complement {
        format!("region = complement of {and}")
    } else {
        format!("region = {and}")
    };
    Ok(Explanation {
        lines: explained,
        complement,
        region,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets::RegionSpec;

    fn planted(region: &RegionSpec, beta: f64) -> Network {
        let k = region.lines.len();
        let mut net = build_gate_network(
            &GateNetworkSpec {
                k,
                beta_layer1: beta,
                beta_gate: beta,
                activation: GateActivation::Squashing,
            },
            0,
        )
        .unwrap();
        let (mut w, mut b) = (Vec::new(), Vec::new());
        for l in &region.lines {
            let (wx, wy, c) = l.normal_form();
            w.extend([wx, wy]);
            b.push(c);
        }
        let layer = &mut net.layers_mut()[0];
        layer.set_weights(Matrix::new(k, 2, w).unwrap()).unwrap();
        layer.set_bias(b).unwrap();
        net
    }

    #[test]
    fn gate_layer_is_frozen_conjunction() {
        for (k, bias) in [(1, 0.0), (2, -1.0), (4, -3.0)] {
            let net = build_gate_network(&GateNetworkSpec::new(k), 3).unwrap();
            let gate = &net.layers()[1];
            assert!(gate.weights().as_slice().iter().all(|&w| w == 1.0));
            assert_eq!(gate.bias(), &[bias]);
            assert!(!gate.trainable_weights() && !gate.trainable_bias());
            assert!(gate.trainable_beta() && net.layers()[0].trainable_beta());
            assert_eq!(net.n_outputs(), 2);
        }
        assert!(build_gate_network(&GateNetworkSpec::new(0), 0).is_err());
    }

    #[test]
    fn four_input_tree_flattens_to_bias_minus_three() {
        let tree = AndTree::and(
            AndTree::and(AndTree::Input(0), AndTree::Input(1)),
            AndTree::and(AndTree::Input(2), AndTree::Input(3)),
        );
        let flat = flatten_and_tree(&tree).unwrap();
        assert_eq!(flat.weights(), &[1.0; 4]);
        assert_eq!(flat.bias(), -3.0);
    }

    #[test]
    fn flattening_rejects_repeated_leaves() {
        let tree = AndTree::and(AndTree::Input(0), AndTree::Input(0));
        assert!(flatten_and_tree(&tree).is_err());
        let gap = AndTree::and(AndTree::Input(0), AndTree::Input(2));
        assert!(flatten_and_tree(&gap).is_err());
    }

    #[test]
    fn eight_input_balanced_tree_matches_flat_gate() {
        let tree = AndTree::balanced(0, 8);
        let flat = flatten_and_tree(&tree).unwrap();
        for mask in 0u32..256 {
            let g: Vec<f64> = (0..8).map(|i| f64::from((mask >> i) & 1)).collect();
            let expected = if mask == 255 { 1.0 } else { 0.0 };
            assert_eq!(tree.eval(&g), expected);
            assert_eq!(crate::logic::bracket(flat.affine(&g)), expected);
        }
    }

    #[test]
    fn planted_lines_give_the_half_plane_intersection() {
        let region = RegionSpec::two_line();
        let crisp = crisp_decision_region(&planted(&region, 50.0)).unwrap();
        let explanation = extract_line_explanations(&planted(&region, 50.0)).unwrap();
        for i in 0..=60 {
            for j in 0..=60 {
                let (x, y) = (-2.0 + i as f64 / 15.0, -2.0 + j as f64 / 15.0);
                assert_eq!(explanation.contains(x, y), region.contains(x, y), "({x}, {y})");
                // the crisp gate needs every unit fully on; deep inside the
                // region that is the same as the inequalities
                let inside = region.lines.iter().all(|l| {
                    let (wx, wy, c) = l.normal_form();
                    wx * x + wy * y + c >= 1.0
                });
                let outside = region.lines.iter().any(|l| {
                    let (wx, wy, c) = l.normal_form();
                    wx * x + wy * y + c <= 0.0
                });
                if inside {
                    assert!(crisp.contains(x, y));
                }
                if outside {
                    assert!(!crisp.contains(x, y));
                }
            }
        }
    }

    #[test]
    fn recovered_lines_match_planted_ones() {
        let region = RegionSpec::two_line();
        let ex = extract_line_explanations(&planted(&region, 2.0)).unwrap();
        assert_eq!(ex.region, "region = AND(L1, L2)");
        for (got, want) in ex.lines.iter().zip(&region.lines) {
            let (a, b) = (got_normal(got), want.normal_form());
            let scale = if b.1 != 0.0 { a.1 / b.1 } else { a.0 / b.0 };
            assert!(scale > 0.0);
            assert!((a.0 - scale * b.0).abs() < 1e-12);
            assert!((a.2 - scale * b.2).abs() < 1e-12);
        }
    }

    fn got_normal(l: &LineExplanation) -> (f64, f64, f64) {
        match l.sense {
            Sense::Ge => (-l.m, l.b, -l.c),
            Sense::Le => (l.m, -l.b, l.c),
        }
    }

    #[test]
    fn zero_row_is_flagged_vacuous() {
        let mut net = build_gate_network(&GateNetworkSpec::new(2), 1).unwrap();
        net.layers_mut()[0]
            .set_weights(Matrix::new(2, 2, vec![0.0, 0.0, 1.0, 1.0]).unwrap())
            .unwrap();
        let ex = extract_line_explanations(&net).unwrap();
        assert!(ex.lines[0].vacuous && !ex.lines[1].vacuous);
        assert!(ex.to_text().contains("vacuous condition"));
    }

    #[test]
    fn negative_gate_beta_gives_the_complement() {
        let region = RegionSpec::four_line();
        let net = planted(&region, 50.0);
        let mut flipped = net.clone();
        flipped.layers_mut()[1].set_beta(-50.0).unwrap();
        let a = crisp_decision_region(&net).unwrap();
        let b = crisp_decision_region(&flipped).unwrap();
        let ea = extract_line_explanations(&net).unwrap();
        let eb = extract_line_explanations(&flipped).unwrap();
        assert!(eb.complement && eb.region.starts_with("region = complement of AND("));
        for i in 0..200 {
            for j in 0..200 {
                let (x, y) = (-2.0 + i as f64 * 0.02, -2.0 + j as f64 * 0.02);
                assert_eq!(a.value(x, y), 1.0 - b.value(x, y));
                assert_eq!(ea.contains(x, y), !eb.contains(x, y));
            }
        }
        let json = eb.to_json().unwrap();
        let back: Explanation = serde_json::from_str(&json).unwrap();
        assert_eq!(back, eb);
    }

    #[test]
    fn single_line_is_a_half_plane() {
        let line = crate::datasets::LineSpec::new(1.0, 1.0, 0.0, Sense::Ge).unwrap();
        let region = RegionSpec {
            lines: vec![line],
            bounds: Default::default(),
        };
        let net = planted(&region, 80.0);
        let crisp = crisp_decision_region(&net).unwrap();
        for i in 0..=40 {
            for j in 0..=40 {
                let (x, y) = (-2.0 + i as f64 * 0.1, -2.0 + j as f64 * 0.1);
                // y >= x crisp-cut at the unit's midpoint
                assert_eq!(crisp.contains(x, y), y - x > 0.5);
            }
        }
    }

    #[test]
    fn non_squashing_networks_have_no_crisp_reading() {
        let spec = GateNetworkSpec {
            activation: GateActivation::Relu,
            ..GateNetworkSpec::new(2)
        };
        let net = build_gate_network(&spec, 0).unwrap();
        assert!(crisp_decision_region(&net).is_err());
        assert!(extract_line_explanations(&net).is_ok());
    }

    proptest::proptest! {
        #[test]
        fn explanation_region_ignores_positive_rescaling(
            scales in proptest::collection::vec(0.01f64..100.0, 4),
            pts in proptest::collection::vec((-6.0f64..6.0, -6.0f64..6.0), 50),
        ) {
            let region = RegionSpec::four_line();
            let net = planted(&region, 1.0);
            let mut scaled = net.clone();
            let layer = &mut scaled.layers_mut()[0];
            let mut w = layer.weights().clone();
            let mut b = layer.bias().to_vec();
            for (i, s) in scales.iter().enumerate() {
                w.set(i, 0, w.get(i, 0) * s);
                w.set(i, 1, w.get(i, 1) * s);
                b[i] *= s;
            }
            layer.set_weights(w).unwrap();
            layer.set_bias(b).unwrap();
            let (e1, e2) = (extract_line_explanations(&net).unwrap(), extract_line_explanations(&scaled).unwrap());
            for (x, y) in pts {
                proptest::prop_assert_eq!(e1.contains(x, y), e2.contains(x, y));
            }
        }
    }
}
