//! Nilpotent operators built as `f^{-1} o clip o (affine map in generator space)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::squash::{bracket, squash, SquashingParams};
use crate::error::{Error, Result};

/// An increasing bijection of `[0, 1]` through which operator arithmetic runs.
pub trait Generator {
    fn forward(&self, x: f64) -> f64;
    fn inverse(&self, y: f64) -> f64;
}

/// `f(x) = x`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Identity;

impl Generator for Identity {
    #[inline]
    fn forward(&self, x: f64) -> f64 {
        x
    }

    #[inline]
    fn inverse(&self, y: f64) -> f64 {
        y
    }
}

/// A generator assembled from a function pair.
pub struct FnGenerator<F, G> {
    pub name: &'static str,
    pub forward: F,
    pub inverse: G,
}

impl<F, G> Generator for FnGenerator<F, G>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    fn forward(&self, x: f64) -> f64 {
        (self.forward)(x)
    }

    fn inverse(&self, y: f64) -> f64 {
        (self.inverse)(y)
    }
}

impl<F, G> fmt::Debug for FnGenerator<F, G> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnGenerator").field("name", &self.name).finish()
    }
}

/// Checks the bijection contract on a uniform grid of `points + 1` samples:
/// fixed endpoints, strict increase, and `inverse(forward(x)) == x` to 1e-12.
pub fn validate_generator<G: Generator + ?Sized>(g: &G, points: usize) -> Result<()> {
    let bad = |msg: String| Err(Error::InvalidParameter(format!("generator: {msg}")));
    if g.forward(0.0) != 0.0 || g.forward(1.0) != 1.0 {
        return bad("endpoints must map to themselves".into());
    }
    let points = points.max(1);
    let mut prev = f64::NEG_INFINITY;
    for i in 0..=points {
        let x = i as f64 / points as f64;
        let y = g.forward(x);
        if y <= prev {
            return bad(format!("not strictly increasing at x = {x}"));
        }
        if (g.inverse(y) - x).abs() > 1e-12 {
            return bad(format!("inverse mismatch at x = {x}"));
        }
        prev = y;
    }
    Ok(())
}

/// Weights `w_i` and bias `C` of a threshold-based operator
/// `f^{-1}[sum w_i f(x_i) + C]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NilpotentOperatorSpec {
    weights: Vec<f64>,
    bias: f64,
}

impl NilpotentOperatorSpec {
    pub fn new(weights: Vec<f64>, bias: f64) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidParameter("operator needs at least one weight".into()));
        }
        if !bias.is_finite() || weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidParameter("weights and bias must be finite".into()));
        }
        Ok(Self { weights, bias })
    }

    /// Builds the bias from a decision level `nu` and per-input thresholds:
    /// `C = f(nu) - sum w_i f(nu_i)`.
    pub fn from_thresholds<G: Generator + ?Sized>(
        weights: Vec<f64>,
        nu: f64,
        thresholds: &[f64],
        f: &G,
    ) -> Result<Self> {
        if thresholds.len() != weights.len() {
            return Err(Error::Arity {
                expected: weights.len(),
                got: thresholds.len(),
            });
        }
        check_unit("nu", nu)?;
        for &t in thresholds {
            check_unit("nu_i", t)?;
        }
        let bias = weights
            .iter()
            .zip(thresholds)
            .fold(f.forward(nu), |acc, (w, t)| acc - w * f.forward(*t));
        Self::new(weights, bias)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn arity(&self) -> usize {
        self.weights.len()
    }

    /// The affine part `sum w_i x_i + C`, with no clipping and no generator.
    pub fn affine(&self, xs: &[f64]) -> f64 {
        self.weights
            .iter()
            .zip(xs)
            .fold(0.0, |acc, (w, x)| acc + w * x)
            + self.bias
    }
}

/// How the affine value is brought back into `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ClipMode {
    /// The `[.]` cutting function.
    Crisp,
    /// The differentiable Squashing approximation.
    Soft(SquashingParams),
}

impl ClipMode {
    #[inline]
    pub fn apply(&self, x: f64) -> f64 {
        match self {
            ClipMode::Crisp => bracket(x),
            ClipMode::Soft(p) => squash(x, p),
        }
    }
}

fn check_unit(what: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::Domain { what, value })
    }
}

fn check_inputs(xs: &[f64]) -> Result<()> {
    xs.iter().try_for_each(|&x| check_unit("x_i", x))
}

/// General operator `o_nu(x) = f^{-1}[ sum f(x_i) - (n - 1) f(nu) ]`, crisp.
///
/// `nu = 1` gives the conjunction, `nu = 0` the disjunction and
/// `nu = f^{-1}(1/2)` the self-dual aggregative operator.
pub fn general_operator<G: Generator + ?Sized>(xs: &[f64], nu: f64, f: &G) -> Result<f64> {
    if xs.is_empty() {
        return Err(Error::InvalidParameter("general operator needs at least one input".into()));
    }
    check_inputs(xs)?;
    check_unit("nu", nu)?;
    let sum = xs.iter().fold(0.0, |acc, &x| acc + f.forward(x));
    let shift = (xs.len() - 1) as f64 * f.forward(nu);
    Ok(f.inverse(bracket(sum - shift)))
}

/// Weighted threshold operator `f^{-1}[clip(sum w_i f(x_i) + C)]`.
pub fn weighted_operator<G: Generator + ?Sized>(
    xs: &[f64],
    spec: &NilpotentOperatorSpec,
    f: &G,
    mode: ClipMode,
) -> Result<f64> {
    if xs.len() != spec.arity() {
        return Err(Error::Arity {
            expected: spec.arity(),
            got: xs.len(),
        });
    }
    check_inputs(xs)?;
    let acc = spec
        .weights
        .iter()
        .zip(xs)
        .fold(0.0, |acc, (w, &x)| acc + w * f.forward(x));
    Ok(f.inverse(mode.apply(acc + spec.bias)))
}

/// The two-variable operators of the standard nilpotent toolkit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedOperator {
    Conjunction,
    Disjunction,
    Implication,
    Mean,
    Preference,
    Aggregative,
}

impl NamedOperator {
    pub const ALL: [NamedOperator; 6] = [
        NamedOperator::Disjunction,
        NamedOperator::Conjunction,
        NamedOperator::Implication,
        NamedOperator::Mean,
        NamedOperator::Preference,
        NamedOperator::Aggregative,
    ];

    /// `(w1, w2, C)`.
    pub fn constants(self) -> (f64, f64, f64) {
        match self {
            NamedOperator::Disjunction => (1.0, 1.0, 0.0),
            NamedOperator::Conjunction => (1.0, 1.0, -1.0),
            NamedOperator::Implication => (-1.0, 1.0, 1.0),
            NamedOperator::Mean => (0.5, 0.5, 0.0),
            NamedOperator::Preference => (-0.5, 0.5, 0.5),
            NamedOperator::Aggregative => (1.0, 1.0, -0.5),
        }
    }

    pub fn spec(self) -> NilpotentOperatorSpec {
        let (w1, w2, c) = self.constants();
        NilpotentOperatorSpec {
            weights: vec![w1, w2],
            bias: c,
        }
    }

    pub fn eval(self, x: f64, y: f64, mode: ClipMode) -> Result<f64> {
        named_operator(self, x, y, mode)
    }
}

impl fmt::Display for NamedOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            NamedOperator::Conjunction => "conjunction",
            NamedOperator::Disjunction => "disjunction",
            NamedOperator::Implication => "implication",
            NamedOperator::Mean => "mean",
            NamedOperator::Preference => "preference",
            NamedOperator::Aggregative => "aggregative",
        };
        f.write_str(s)
    }
}

/// Named two-variable operator with the identity generator.
pub fn named_operator(kind: NamedOperator, x: f64, y: f64, mode: ClipMode) -> Result<f64> {
    weighted_operator(&[x, y], &kind.spec(), &Identity, mode)
}
