//! Exact solvers and property audits for assigning multi-unit objects to
//! agents with dichotomous (approve/reject) preferences.

#![allow(clippy::needless_range_loop)]

pub mod audit;
pub mod caps;
pub mod competitive;
pub mod egalitarian;
pub mod error;
pub mod fixtures;
pub mod flow;
pub mod instance;
pub mod lottery;
pub mod lp;
pub mod rational;

pub use caps::Caps;
pub use error::{Error, Result};
pub use instance::{AssignmentMatrix, Instance, ObjectPartition, UtilityProfile};
pub use rational::Rational;
