//! Numerical tools for weighted Bergman spaces on the unit disc: radial
//! weights and Muckenhoupt-type constants, Hardy/Bergman/mixed norms of
//! power series, weight-adapted block decompositions, generalized Hilbert
//! operators, and bounded-ratio verification scenarios.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod decomposition;
pub mod error;
pub mod grammar;
pub mod operators;
pub mod quad;
pub mod value;
pub mod verify;
pub mod weights;

pub use analytic::AnalyticFunction;

pub use error::{Error, Result};
pub use value::{Diagnostics, Method, NormValue, Verdict};

pub use weights::{parse_weight, RadialWeight};
pub use decomposition::BlockPartition;
pub use verify::{run_scenario, ScenarioConfig, ScenarioReport, ScenarioVerdict};
