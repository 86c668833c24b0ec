//! Lotteries over deterministic assignments.
//!
//! Without per-agent constraints every column can be rounded on its own.
//! Column `k` lays its shares end to end on `[0, Σ_i z_ik]`; a threshold
//! `u ∈ [0, 1)` gives agent `i` a unit iff some point `u + j` falls in its
//! segment. Each agent is selected with probability `z_ik`, and the column
//! receives `⌊Σ⌋` or `⌈Σ⌉` units. Sharing one threshold across columns, the
//! breakpoints cut `[0, 1)` into at most (fractional cells + 1) pieces, one
//! component each.

use std::collections::BTreeMap;

use num_bigint::RandBigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{AssignmentMatrix, Instance};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lottery {
    /// Positive weights summing to one, each with a binary assignment.
    pub components: Vec<(Rational, AssignmentMatrix)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentDoc {
    pub weight: String,
    /// Agent to the objects it receives.
    pub assignment: BTreeMap<String, Vec<String>>,
}

fn fract(v: &Rational) -> Rational {
    v - v.floor()
}

/// Decomposes a feasible, individually rational assignment into a lottery
/// over binary ones that reproduces it exactly.
pub fn decompose(inst: &Instance, ram: &AssignmentMatrix) -> Result<Lottery> {
    ram.check_feasible(inst)?;
    let (n, m) = (inst.n(), inst.m());

    // Segment start of every cell along its column.
    let mut start = vec![vec![Rational::zero(); m]; n];
    let mut cuts = vec![Rational::zero()];
    for k in 0..m {
        let mut acc = Rational::zero();
        for i in 0..n {
            start[i][k] = acc.clone();
            let z = ram.get(i, k);
            if !rational::is_integer(z) {
                cuts.push(fract(&acc));
                cuts.push(fract(&(&acc + z)));
            }
            acc += z;
        }
    }
    cuts.sort();
    cuts.dedup();
    cuts.push(Rational::one());

    let mut merged: BTreeMap<Vec<Vec<bool>>, Rational> = BTreeMap::new();
    let mut order = Vec::new();
    for w in cuts.windows(2) {
        let (lo, hi) = (&w[0], &w[1]);
        if lo >= hi {
            continue;
        }
        let u = (lo + hi) / rational::int(2);
        let cells: Vec<Vec<bool>> = (0..n)
            .map(|i| {
                (0..m)
                    .map(|k| {
                        let z = ram.get(i, k);
                        if z.is_zero() {
                            return false;
                        }
                        // Smallest point u + j not below the segment start.
                        let a = &start[i][k];
                        let j = (a - &u).ceil();
                        &u + j < a + z
                    })
                    .collect()
            })
            .collect();
        let weight = hi - lo;
        match merged.get_mut(&cells) {
            Some(v) => *v += weight,
            None => {
                order.push(cells.clone());
                merged.insert(cells, weight);
            }
        }
    }
    let components = order
        .into_iter()
        .map(|cells| {
            let w = merged[&cells].clone();
            (w, AssignmentMatrix::from_binary(&cells))
        })
        .collect();
    Ok(Lottery { components })
}

impl Lottery {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// `Σ weight · matrix`.
    pub fn expectation(&self) -> Option<AssignmentMatrix> {
        let (_, first) = self.components.first()?;
        let mut out = AssignmentMatrix::zeros(first.n(), first.m());
        for (w, b) in &self.components {
            for i in 0..b.n() {
                for k in 0..b.m() {
                    if b.get(i, k).is_one() {
                        let v = out.get(i, k) + w;
                        out.set(i, k, v);
                    }
                }
            }
        }
        Some(out)
    }

    /// Checks weights, binarity, feasibility and exact reconstruction.
    pub fn validate(&self, inst: &Instance, ram: &AssignmentMatrix) -> Result<()> {
        let total = rational::sum(self.components.iter().map(|(w, _)| w));
        if !total.is_one() {
            return Err(Error::validation("lottery", format!("weights sum to {total}")));
        }
        for (t, (w, b)) in self.components.iter().enumerate() {
            let loc = format!("lottery[{t}]");
            if *w <= Rational::zero() {
                return Err(Error::validation(loc, "non-positive weight"));
            }
            if !b.is_binary() {
                return Err(Error::validation(loc, "component is not binary"));
            }
            b.check_feasible(inst)
                .map_err(|e| Error::validation(loc, e.to_string()))?;
        }
        if self.expectation().as_ref() != Some(ram) {
            return Err(Error::validation("lottery", "does not reconstruct the assignment"));
        }
        Ok(())
    }

    /// Draws one component with probability equal to its weight.
    pub fn sample(&self, seed: u64) -> Option<&AssignmentMatrix> {
        let denom = self
            .components
            .iter()
            .fold(num_bigint::BigInt::one(), |acc, (w, _)| acc.lcm(w.denom()));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let draw = Rational::from_integer(rng.gen_bigint_range(&Zero::zero(), &denom))
            / Rational::from_integer(denom);
        let mut acc = Rational::zero();
        for (w, b) in &self.components {
            acc += w;
            if draw < acc {
                return Some(b);
            }
        }
        self.components.last().map(|(_, b)| b)
    }

    pub fn to_doc(&self, inst: &Instance) -> Vec<ComponentDoc> {
        self.components
            .iter()
            .map(|(w, b)| ComponentDoc {
                weight: rational::format(w),
                assignment: binary_named(inst, b),
            })
            .collect()
    }

    pub fn from_doc(inst: &Instance, doc: &[ComponentDoc]) -> Result<Self> {
        let mut components = Vec::with_capacity(doc.len());
        for c in doc {
            let mut rows = vec![vec![false; inst.m()]; inst.n()];
            for (agent, objects) in &c.assignment {
                let i = inst.agent_index(agent).ok_or_else(|| {
                    Error::validation(format!("lottery.assignment.{agent}"), "unknown agent")
                })?;
                for object in objects {
                    let k = inst.object_index(object).ok_or_else(|| {
                        Error::validation(format!("lottery.assignment.{agent}"), "unknown object")
                    })?;
                    rows[i][k] = true;
                }
            }
            components.push((rational::parse(&c.weight)?, AssignmentMatrix::from_binary(&rows)));
        }
        Ok(Lottery { components })
    }
}

/// `{agent: [objects]}` for a binary assignment.
pub fn binary_named(inst: &Instance, b: &AssignmentMatrix) -> BTreeMap<String, Vec<String>> {
    (0..inst.n())
        .map(|i| {
            let objects = (0..inst.m())
                .filter(|&k| b.get(i, k).is_one())
                .map(|k| inst.objects()[k].clone())
                .collect();
            (inst.agents()[i].clone(), objects)
        })
        .collect()
}
