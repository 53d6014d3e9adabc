//! Optimal taxation of traditional capital, AI capital and labor in a
//! two-type economy with incentive-compatibility constraints.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod economy;
pub mod error;
pub mod oracle;
pub mod planner;
pub mod preferences;
pub mod production;
pub mod sweep;
pub mod wedges;

pub use economy::{AgentKind, Allocation, EconomyConfig, TypePair};
pub use error::{Error, Result};
pub use planner::{PlannerSolution, Regime};
