//! Squashing activations, nilpotent logical operators, and a small dense
//! network engine with experiments built on them.
//!
//! ```
//! use squashlogic::logic::{named_operator, ClipMode, NamedOperator};
//!
//! let v = named_operator(NamedOperator::Implication, 0.8, 0.3, ClipMode::Crisp).unwrap();
//! assert!((v - 0.5).abs() < 1e-12);
//! ```

pub mod datasets;
pub mod error;
pub mod fmtnum;
pub mod gates;
pub mod harness;
pub mod logic;
pub mod nn;

pub use error::{Error, IdxError, Result};
