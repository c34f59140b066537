//! Numerical toolkit for the conical (cosmic string) spacetime.
//!
//! The crate covers the exact metric `g_α` with its splittings and pointwise
//! bounds ([`metric`]), mollified nets `g_α^ε` ([`regularization`]), causal
//! classification and Cauchy-slice crossings of sampled curves ([`causality`]),
//! the uniform/image topologies on causal curves ([`topology`]) and a
//! divergence-form wave solver on `g_α^ε` ([`wave`]).

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod causality;
pub mod curve;
pub mod error;
pub mod io;
pub mod metric;
pub mod quadrature;
pub mod regularization;
pub mod topology;
pub mod wave;

pub use error::{Error, Result};
pub use metric::{ConicalParams, MetricField, SpacetimePoint, SymForm3, SymForm4};
