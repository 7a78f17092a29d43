//! Stateless kernels: cutting and Squashing functions, and the nilpotent
//! operator system built on top of them.

mod operators;
mod squash;

pub use operators::{
    general_operator, named_operator, validate_generator, weighted_operator, ClipMode,
    FnGenerator, Generator, Identity, NamedOperator, NilpotentOperatorSpec,
};
pub use squash::{
    bracket, cut, logistic, sigmoid, softplus, squash, squash_dbeta, squash_dx, squash_eval,
    SquashEval, SquashingParams,
};
