//! Decision analysis under risk.
//!
//! The pipeline is: build each decision's outcome distribution from event
//! priors and conditional tables ([`dist`]), push it through a utility model
//! ([`utility`]), then rank decisions by the sum of their clipped k-sigma
//! utility bounds ([`criterion`]). [`fairness`] solves for the probability
//! at which a gamble and a sure thing score the same, and [`scenarios`]
//! packages the worked examples as checkable regression cases.

mod error;

pub mod criterion;
pub mod dist;
pub mod fairness;
pub mod scenarios;
pub mod utility;

pub use criterion::{
    bounds, criterion_score, decide, decide_distributions, BoundsConfig, BoundsResult, CriterionMode, Preference,
    Verdict,
};
pub use dist::{Categorical, ConditionalTable, DecisionProblem, DecisionSpec, DiscreteDistribution, JointTable};
pub use error::{Error, Result};
pub use fairness::{fair_probability, CertaintyBet, FairnessResult};
pub use utility::{UtilityKind, UtilityModel};
