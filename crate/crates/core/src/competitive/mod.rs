//! Constrained competitive equilibrium with equal (unit) incomes.
//!
//! An equilibrium is a fractional assignment plus non-negative prices such
//! that every agent buys a utility-maximizing bundle within a budget of 1
//! (at most one unit per object), and every object with a positive price is
//! sold out at its effective capacity.

mod demand;
mod pattern;
mod seed;
mod support;
mod verify;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{AssignmentMatrix, Instance, UtilityProfile};
use crate::rational::{self, Rational};

pub use demand::{demand, DemandSummary};
pub use pattern::{
    cce_bounded, cce_find, cce_ipo_selection, cce_utility_range, equilibrium_set, EquilibriumSet,
    Extreme, FreeParameter, Interval, RangeReport, Scope,
};
pub use support::{supporting_prices, SupportFailure};
pub use verify::cce_verify;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PriceVector(pub Vec<Rational>);

impl PriceVector {
    pub fn zeros(m: usize) -> Self {
        PriceVector(vec![rational::int(0); m])
    }

    pub fn get(&self, k: usize) -> &Rational {
        &self.0[k]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.0.iter().map(rational::format).collect()
    }
}

/// The conditions checked by [`cce_verify`], in checking order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Condition {
    Feasibility,
    MarketClearing,
    Affordability,
    Optimality,
    PositivePrice,
    EqualMarginalPrices,
    CheaperFirst,
    BudgetExhaustion,
}

impl Condition {
    pub const ALL: [Condition; 8] = [
        Condition::Feasibility,
        Condition::MarketClearing,
        Condition::Affordability,
        Condition::Optimality,
        Condition::PositivePrice,
        Condition::EqualMarginalPrices,
        Condition::CheaperFirst,
        Condition::BudgetExhaustion,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Condition::Feasibility => "feasibility",
            Condition::MarketClearing => "market clearing",
            Condition::Affordability => "affordability",
            Condition::Optimality => "optimality",
            Condition::PositivePrice => "positive price of over-demanded objects",
            Condition::EqualMarginalPrices => "equal prices of partially bought objects",
            Condition::CheaperFirst => "cheaper objects bought first",
            Condition::BudgetExhaustion => "budget exhaustion",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equilibrium {
    pub ram: AssignmentMatrix,
    pub prices: PriceVector,
    /// Conditions that were checked and hold.
    pub certificate: Vec<Condition>,
}

impl Equilibrium {
    pub fn utilities(&self) -> UtilityProfile {
        self.ram.utilities()
    }

    pub fn to_doc(&self, inst: &Instance) -> EquilibriumDoc {
        EquilibriumDoc {
            prices: Some(
                inst.objects()
                    .iter()
                    .cloned()
                    .zip(self.prices.to_strings())
                    .collect(),
            ),
            assignment: self.ram.to_named(inst),
        }
    }
}

/// JSON form of an (assignment, prices) pair. Prices may be omitted when
/// the document is only a candidate assignment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquilibriumDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prices: Option<std::collections::BTreeMap<String, String>>,
    pub assignment: std::collections::BTreeMap<String, std::collections::BTreeMap<String, String>>,
}

impl EquilibriumDoc {
    pub fn parse_prices(&self, inst: &Instance) -> Result<Option<PriceVector>> {
        let Some(map) = &self.prices else {
            return Ok(None);
        };
        let mut prices = vec![rational::int(0); inst.m()];
        let mut seen = vec![false; inst.m()];
        for (name, text) in map {
            let k = inst
                .object_index(name)
                .ok_or_else(|| Error::validation(format!("prices.{name}"), "unknown object"))?;
            let v = rational::parse(text)
                .map_err(|e| Error::validation(format!("prices.{name}"), e.to_string()))?;
            if v < rational::int(0) {
                return Err(Error::validation(format!("prices.{name}"), "negative price"));
            }
            prices[k] = v;
            seen[k] = true;
        }
        if let Some(k) = seen.iter().position(|s| !s) {
            return Err(Error::validation(
                format!("prices.{}", inst.objects()[k]),
                "missing price",
            ));
        }
        Ok(Some(PriceVector(prices)))
    }

    pub fn parse_assignment(&self, inst: &Instance) -> Result<AssignmentMatrix> {
        AssignmentMatrix::from_named(inst, &self.assignment)
    }
}

/// The first failed condition with every agent and object witnessing it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub condition: Condition,
    pub agents: Vec<usize>,
    pub objects: Vec<usize>,
    pub detail: String,
}

impl Violation {
    pub fn describe(&self, inst: &Instance) -> String {
        let mut text = format!("{}: {}", self.condition.name(), self.detail);
        if !self.agents.is_empty() {
            text.push_str(&format!(" for agents {}", group_names(inst.agents(), &self.agents)));
        }
        if !self.objects.is_empty() {
            text.push_str(&format!(" on objects {}", group_names(inst.objects(), &self.objects)));
        }
        text
    }
}

/// Names of `indices`, with runs of consecutive indices written `first:last`.
pub fn group_names(names: &[String], indices: &[usize]) -> String {
    let mut sorted = indices.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut parts = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == sorted[j] + 1 {
            j += 1;
        }
        if j >= i + 2 {
            parts.push(format!("{}:{}", names[sorted[i]], names[sorted[j]]));
        } else {
            for &t in &sorted[i..=j] {
                parts.push(names[t].clone());
            }
        }
        i = j + 1;
    }
    parts.join(", ")
}
