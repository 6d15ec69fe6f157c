//! Numerical boundary asymptotics for one-parameter semigroups of holomorphic
//! self-maps of the unit disk with Denjoy-Wolff point `τ = 1`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod cayley;
pub mod error;
pub mod extrapolate;
pub mod flow;
pub mod generators;
pub mod koenigs;
pub mod quadrature;
pub mod rigidity;

pub use error::{Error, Result};
pub use flow::{FlowConfig, Schedule, Trajectory};
pub use generators::{GeneratorClass, GeneratorDescriptor, GeneratorSpec, HalfPlaneGenerator, TaylorData};
