//! Cutting function, logistic sigmoid and the Squashing family.
//!
//! The Squashing function with center `a`, width `lambda` and sharpness `beta`
//! is
//!
//! ```text
//! S(x) = 1/(lambda*beta) * ln[(1 + e^{beta (x - (a - lambda/2))}) / (1 + e^{beta (x - (a + lambda/2))})]
//! ```
//!
//! It is a smooth approximation of the generalized cutting function
//! `clamp((x - (a - lambda/2)) / lambda, 0, 1)`; the sup-norm gap shrinks like
//! `ln 2 / |beta|`. A negative `beta` mirrors it: `S_{-beta} = 1 - S_{beta}`.
//!
//! Everything here is evaluated through shifted softplus terms so that neither
//! very large nor very small `|beta|` loses the result to overflow or
//! cancellation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters `(a, lambda, beta)` of one Squashing activation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SquashingParams {
    a: f64,
    lambda: f64,
    beta: f64,
}

impl SquashingParams {
    pub fn new(a: f64, lambda: f64, beta: f64) -> Result<Self> {
        if !a.is_finite() {
            return Err(Error::InvalidParameter(format!("center a must be finite, got {a}")));
        }
        check_width(lambda)?;
        if !beta.is_finite() || beta == 0.0 {
            return Err(Error::InvalidParameter(format!(
                "beta must be finite and nonzero, got {beta}"
            )));
        }
        Ok(Self { a, lambda, beta })
    }

    /// The parameterization used throughout the nilpotent operators: `a = 0.5`,
    /// `lambda = 1`, so that the crisp limit is the plain `[.]` bracket.
    pub fn unit(beta: f64) -> Result<Self> {
        Self::new(0.5, 1.0, beta)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Same center and width with a different sharpness.
    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        Self::new(self.a, self.lambda, beta)
    }

    /// The `beta -> +-inf` limit: the cutting function, or its decreasing
    /// counterpart `1 - cut` when `beta < 0`.
    pub fn crisp(&self, x: f64) -> f64 {
        let c = cut_unchecked(x, self.a, self.lambda);
        if self.beta < 0.0 {
            1.0 - c
        } else {
            c
        }
    }
}

fn check_width(lambda: f64) -> Result<()> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "width lambda must be finite and positive, got {lambda}"
        )));
    }
    Ok(())
}

/// Generalized cutting function `clamp((x - (a - lambda/2)) / lambda, 0, 1)`.
pub fn cut(x: f64, a: f64, lambda: f64) -> Result<f64> {
    check_width(lambda)?;
    Ok(cut_unchecked(x, a, lambda))
}

pub(crate) fn cut_unchecked(x: f64, a: f64, lambda: f64) -> f64 {
    ((x - (a - lambda / 2.0)) / lambda).clamp(0.0, 1.0)
}

/// The `[.]` bracket: cut with `a = 0.5`, `lambda = 1`.
#[inline]
pub fn bracket(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

/// Logistic `1 / (1 + e^{-z})`, evaluated without overflow.
#[inline]
pub fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `sigma_d^{(beta)}(x) = 1 / (1 + e^{-beta (x - d)})`.
pub fn sigmoid(x: f64, d: f64, beta: f64) -> f64 {
    logistic(beta * (x - d))
}

/// `ln(1 + e^z)` as `max(z, 0) + ln(1 + e^{-|z|})`.
#[inline]
pub fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

/// `softplus(z) - ln 2`, accurate near zero where the two terms cancel.
#[inline]
fn softplus_shifted(z: f64) -> f64 {
    if z.abs() < 1.0 {
        (z.exp_m1() / 2.0).ln_1p()
    } else {
        softplus(z) - std::f64::consts::LN_2
    }
}

/// `z * logistic(z) - softplus_shifted(z)`; the building block of dS/dbeta.
#[inline]
fn beta_kernel(z: f64) -> f64 {
    if z.abs() < 1e-2 {
        let z2 = z * z;
        z2 * (1.0 / 8.0 + z2 * (-1.0 / 64.0 + z2 / 576.0))
    } else {
        z * logistic(z) - softplus_shifted(z)
    }
}

/// Value and both partial derivatives of the Squashing function at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquashEval {
    pub value: f64,
    pub d_x: f64,
    pub d_beta: f64,
}

#[inline]
fn scaled_arguments(x: f64, p: &SquashingParams) -> (f64, f64) {
    let lo = x - (p.a - p.lambda / 2.0);
    let hi = x - (p.a + p.lambda / 2.0);
    (p.beta * lo, p.beta * hi)
}

/// Evaluated on the side of `a` where the value is below one half, then
/// reflected with `S(a + t) = 1 - S(a - t)`, which keeps the tail that
/// approaches one free of cancellation. Reflecting `x` about `a` maps the
/// scaled arguments `(zl, zh)` to `(-zh, -zl)`.
#[inline]
fn value_from(x: f64, p: &SquashingParams, tl: &Terms, th: &Terms) -> f64 {
    let lb = p.lambda * p.beta;
    if p.beta * (x - p.a) > 0.0 {
        1.0 - ((th.sp_neg - tl.sp_neg) / lb).clamp(0.0, 0.5)
    } else {
        ((tl.sp - th.sp) / lb).clamp(0.0, 0.5)
    }
}

fn squash_value(x: f64, p: &SquashingParams) -> f64 {
    let (zl, zh) = scaled_arguments(x, p);
    value_from(x, p, &terms(zl), &terms(zh))
}

/// Squashing function `S_{a,lambda}^{(beta)}(x)`, always in `[0, 1]`.
pub fn squash(x: f64, p: &SquashingParams) -> f64 {
    squash_value(x, p)
}

/// `dS/dx = (sigma_{a - lambda/2}(x) - sigma_{a + lambda/2}(x)) / lambda`.
pub fn squash_dx(x: f64, p: &SquashingParams) -> f64 {
    let (zl, zh) = scaled_arguments(x, p);
    (logistic(zl) - logistic(zh)) / p.lambda
}

/// `dS/dbeta`, obtained by differentiating the closed form:
/// `(k(beta u_lo) - k(beta u_hi)) / (lambda beta^2)` with
/// `k(z) = z sigma(z) - ln(1 + e^z) + ln 2`.
pub fn squash_dbeta(x: f64, p: &SquashingParams) -> f64 {
    let (zl, zh) = scaled_arguments(x, p);
    (beta_kernel(zl) - beta_kernel(zh)) / (p.lambda * p.beta * p.beta)
}

/// Logistic and shifted softplus of `z` and of `-z`, from one exponential.
struct Terms {
    sig: f64,
    sp: f64,
    sp_neg: f64,
}

#[inline]
fn terms(z: f64) -> Terms {
    if z.abs() < 1.0 {
        let em = z.exp_m1();
        let sp = (em / 2.0).ln_1p();
        Terms {
            sig: (1.0 + em) / (2.0 + em),
            sp,
            sp_neg: sp - z,
        }
    } else {
        let e = (-z.abs()).exp();
        let l1 = e.ln_1p() - std::f64::consts::LN_2;
        Terms {
            sig: if z >= 0.0 { 1.0 / (1.0 + e) } else { e / (1.0 + e) },
            sp: z.max(0.0) + l1,
            sp_neg: (-z).max(0.0) + l1,
        }
    }
}

#[inline]
fn kernel_from(z: f64, t: &Terms) -> f64 {
    if z.abs() < 1e-2 {
        beta_kernel(z)
    } else {
        z * t.sig - t.sp
    }
}

/// All three quantities sharing one argument computation.
pub fn squash_eval(x: f64, p: &SquashingParams) -> SquashEval {
    let (zl, zh) = scaled_arguments(x, p);
    let lb = p.lambda * p.beta;
    let (tl, th) = (terms(zl), terms(zh));
    SquashEval {
        value: value_from(x, p, &tl, &th),
        d_x: (tl.sig - th.sig) / p.lambda,
        d_beta: (kernel_from(zl, &tl) - kernel_from(zh, &th)) / (lb * p.beta),
    }
}
