//! Monotone comparative statics for non-expected-utility preferences.
//!
//! The crate is organized bottom-up: [`lottery`] holds finite-support
//! distributions, [`preferences`] and [`ambiguity`] the preference functionals
//! with analytic local utilities, [`oracle`] a model-free Gateaux derivative,
//! [`conditions`] and [`propositions`] the grid checkers, [`problems`] the
//! decision environments, and [`mcs`] the argmax engine.

// NaN must fail range checks, so they are written as `!(a < b)`.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ambiguity;
pub mod conditions;
pub mod error;
pub mod lottery;
pub mod mcs;
pub mod oracle;
pub mod preferences;
pub mod presets;
pub mod problems;
pub mod propositions;
pub mod quadrature;
pub mod smooth;

pub use ambiguity::{AmbiguityModel, Attitude};
pub use conditions::{ConditionReport, GridFn, Tolerance, Verdict};
pub use error::{Error, Result};
pub use lottery::{Lottery, LotteryFamily, OutcomeDomain};
pub use mcs::{
    argmax_set, strong_set_leq, verify_mcs, ArgmaxConfig, ArgmaxSet, McsConfig, McsPath,
};
pub use oracle::OracleConfig;
pub use preferences::{ModelFamily, ModelSpec, PreferenceModel};
pub use problems::ProblemSpec;
pub use propositions::{check_proposition, PropGrids, PropId};

pub use smooth::SmoothFn;
