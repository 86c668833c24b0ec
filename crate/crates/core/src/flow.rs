//! Max-flow feasibility oracle on the agent-object network, coalition
//! values and the "core from above" check.
//!
//! The network is `source -> agent (U_i) -> object (1) -> sink (min(q_k, |R_Nk|))`.
//! Rational capacities are scaled by the least common multiple of their
//! denominators and the flow runs on integers, so every certificate is exact.

use std::collections::VecDeque;
use std::ops::{AddAssign, Sub, SubAssign};

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::instance::{AssignmentMatrix, Instance, UtilityProfile};
use crate::rational::{self, Rational};

pub(crate) trait Capacity:
    Clone + Ord + Zero + AddAssign + SubAssign + Sub<Output = Self>
{
}

impl Capacity for i128 {}
impl Capacity for BigInt {}

struct Arc<T> {
    to: usize,
    cap: T,
}

/// Dinic's algorithm. Arcs are stored in pairs; `idx ^ 1` is the reverse arc.
struct Network<T> {
    adj: Vec<Vec<usize>>,
    arcs: Vec<Arc<T>>,
    level: Vec<i64>,
    next: Vec<usize>,
}

impl<T: Capacity> Network<T> {
    fn new(nodes: usize) -> Self {
        Network {
            adj: vec![Vec::new(); nodes],
            arcs: Vec::new(),
            level: vec![0; nodes],
            next: vec![0; nodes],
        }
    }

    fn add_arc(&mut self, from: usize, to: usize, cap: T) -> usize {
        let idx = self.arcs.len();
        self.arcs.push(Arc { to, cap });
        self.arcs.push(Arc {
            to: from,
            cap: T::zero(),
        });
        self.adj[from].push(idx);
        self.adj[to].push(idx + 1);
        idx
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.iter_mut().for_each(|l| *l = -1);
        self.level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &e in &self.adj[v] {
                let arc = &self.arcs[e];
                if arc.cap > T::zero() && self.level[arc.to] < 0 {
                    self.level[arc.to] = self.level[v] + 1;
                    queue.push_back(arc.to);
                }
            }
        }
        self.level[t] >= 0
    }

    fn dfs(&mut self, v: usize, t: usize, limit: T) -> T {
        if v == t {
            return limit;
        }
        while self.next[v] < self.adj[v].len() {
            let e = self.adj[v][self.next[v]];
            let to = self.arcs[e].to;
            if self.arcs[e].cap > T::zero() && self.level[to] == self.level[v] + 1 {
                let room = if self.arcs[e].cap < limit {
                    self.arcs[e].cap.clone()
                } else {
                    limit.clone()
                };
                let pushed = self.dfs(to, t, room);
                if pushed > T::zero() {
                    self.arcs[e].cap -= pushed.clone();
                    self.arcs[e ^ 1].cap += pushed.clone();
                    return pushed;
                }
            }
            self.next[v] += 1;
        }
        T::zero()
    }

    fn max_flow(&mut self, s: usize, t: usize, bound: T) -> T {
        let mut total = T::zero();
        while self.bfs(s, t) {
            self.next.iter_mut().for_each(|n| *n = 0);
            loop {
                let pushed = self.dfs(s, t, bound.clone());
                if pushed.is_zero() {
                    break;
                }
                total += pushed;
            }
        }
        total
    }

    /// Nodes that can still reach `t` in the residual network.
    fn reaches_sink(&self, t: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        seen[t] = true;
        let mut queue = VecDeque::from([t]);
        while let Some(v) = queue.pop_front() {
            for &e in &self.adj[v] {
                // residual arc u -> v exists iff the reverse of (v -> u) has capacity
                let u = self.arcs[e].to;
                if !seen[u] && self.arcs[e ^ 1].cap > T::zero() {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
        seen
    }
}

/// Raw result of one max-flow run on the agent-object network.
pub(crate) struct FlowOutcome {
    pub total: Rational,
    pub assignment: AssignmentMatrix,
    /// Agents on the source side of the maximal minimum cut.
    pub cut: Vec<usize>,
}

fn run_network<T: Capacity>(
    inst: &Instance,
    supply: &[T],
    unit: T,
    sink_caps: &[T],
    to_rational: impl Fn(&T) -> Rational,
) -> (Rational, Vec<Vec<Rational>>, Vec<usize>) {
    let (n, m) = (inst.n(), inst.m());
    let source = n + m;
    let sink = source + 1;
    let mut net = Network::new(n + m + 2);
    let mut bound = T::zero();
    for (i, s) in supply.iter().enumerate() {
        net.add_arc(source, i, s.clone());
        bound += s.clone();
    }
    let mut cell_arcs = Vec::new();
    for i in 0..n {
        for k in 0..m {
            if inst.accepts(i, k) {
                let e = net.add_arc(i, n + k, unit.clone());
                cell_arcs.push((i, k, e));
            }
        }
    }
    for (k, c) in sink_caps.iter().enumerate() {
        net.add_arc(n + k, sink, c.clone());
    }
    let total = net.max_flow(source, sink, bound);
    let mut flows = vec![vec![Rational::zero(); m]; n];
    for (i, k, e) in cell_arcs {
        flows[i][k] = to_rational(&net.arcs[e ^ 1].cap);
    }
    let reach = net.reaches_sink(sink);
    let cut = (0..n).filter(|&i| !reach[i]).collect();
    (to_rational(&total), flows, cut)
}

/// Max flow with per-agent supplies `supply` (exact rationals).
pub(crate) fn max_flow(inst: &Instance, supply: &[Rational]) -> FlowOutcome {
    let scale = rational::lcm_of_denominators(supply);
    let scale_q = Rational::from_integer(scale.clone());
    let scaled: Vec<BigInt> = supply.iter().map(|u| (u * &scale_q).to_integer()).collect();
    let sinks: Vec<BigInt> = (0..inst.m())
        .map(|k| BigInt::from(inst.effective_capacity(k)) * &scale)
        .collect();
    let largest = scaled
        .iter()
        .chain(sinks.iter())
        .fold(scale.clone(), |a, b| a.max(b.clone()));
    // i128 is exact while all capacity sums stay far below its range.
    let fits = largest
        .to_i128()
        .map(|v| v < (1i128 << 100) / ((inst.n() + inst.m() + 1) as i128))
        .unwrap_or(false);
    let (total, flows, cut) = if fits {
        let s: Vec<i128> = scaled.iter().map(|v| v.to_i128().unwrap()).collect();
        let c: Vec<i128> = sinks.iter().map(|v| v.to_i128().unwrap()).collect();
        let unit = scale.to_i128().unwrap();
        run_network(inst, &s, unit, &c, |v| {
            Rational::new(BigInt::from(*v), scale.clone())
        })
    } else {
        run_network(inst, &scaled, scale.clone(), &sinks, |v| {
            Rational::new(v.clone(), scale.clone())
        })
    };
    FlowOutcome {
        total,
        assignment: AssignmentMatrix::from_rows(flows),
        cut,
    }
}

/// `μ(S) = Σ_k min(|R_Sk|, q_k)`: the most units coalition `S` can obtain.
pub fn coalition_value(inst: &Instance, coalition: &[usize]) -> u64 {
    (0..inst.m())
        .map(|k| {
            let takers = coalition.iter().filter(|&&i| inst.accepts(i, k)).count() as u64;
            takers.min(inst.capacity(k))
        })
        .sum()
}

pub(crate) fn coalition_value_mask(inst: &Instance, mask: u64) -> u64 {
    (0..inst.m())
        .map(|k| {
            let takers = (0..inst.n())
                .filter(|&i| mask >> i & 1 == 1 && inst.accepts(i, k))
                .count() as u64;
            takers.min(inst.capacity(k))
        })
        .sum()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibilityCertificate {
    pub feasible: bool,
    /// A supporting assignment with row sums exactly `U`, when feasible.
    pub witness: Option<AssignmentMatrix>,
    /// Maximal minimum-cut agent set. When infeasible its total demand
    /// exceeds its coalition value; when feasible it is the maximal tight set.
    pub tight_set: Vec<usize>,
}

/// Decides whether some feasible assignment has row sums exactly `U`.
pub fn feasible_utilities(inst: &Instance, utilities: &UtilityProfile) -> Result<FeasibilityCertificate> {
    if utilities.len() != inst.n() {
        return Err(Error::Precondition(format!(
            "profile has {} entries for {} agents",
            utilities.len(),
            inst.n()
        )));
    }
    for (i, u) in utilities.values().iter().enumerate() {
        if *u < Rational::zero() || *u > rational::int(inst.row_size(i) as i64) {
            return Err(Error::Precondition(format!(
                "utility {} of agent {} outside [0, {}]",
                u,
                inst.agents()[i],
                inst.row_size(i)
            )));
        }
    }
    let outcome = max_flow(inst, utilities.values());
    let feasible = outcome.total == utilities.total();
    Ok(FeasibilityCertificate {
        feasible,
        witness: feasible.then_some(outcome.assignment),
        tight_set: outcome.cut,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoreViolation {
    pub coalition: Vec<usize>,
    /// `Σ_{i∈S} U_i − μ(S)`, positive.
    pub excess: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoreCheck {
    pub in_core: bool,
    pub efficient: bool,
    pub violation: Option<CoreViolation>,
}

/// Membership in `{x : Σ x = ν, x(S) ≤ μ(S) for all S}` by enumerating all
/// coalitions. Reports the coalition with the largest excess, ties broken
/// towards the lexicographically smallest member list.
pub fn core_from_above_check(
    inst: &Instance,
    utilities: &UtilityProfile,
    caps: &Caps,
) -> Result<CoreCheck> {
    let n = inst.n();
    if n > caps.coalition_agents || n >= 64 {
        return Err(Error::cap(
            "coalition enumeration (agents)",
            n as u128,
            caps.coalition_agents as u128,
        ));
    }
    if utilities.len() != n {
        return Err(Error::Precondition("profile length differs from agent count".into()));
    }
    let efficient = utilities.total() == rational::int(inst.matching_size() as i64);
    let mut best: Option<(Rational, Vec<usize>)> = None;
    for mask in 1u64..(1u64 << n) {
        let members: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        let load = rational::sum(members.iter().map(|&i| &utilities.values()[i]));
        let excess = load - rational::int(coalition_value_mask(inst, mask) as i64);
        if excess > Rational::zero() {
            let better = match &best {
                None => true,
                Some((e, s)) => excess > *e || (excess == *e && members < *s),
            };
            if better {
                best = Some((excess, members));
            }
        }
    }
    let violation = best.map(|(excess, coalition)| CoreViolation {
        coalition,
        excess: rational::format(&excess),
    });
    Ok(CoreCheck {
        in_core: efficient && violation.is_none(),
        efficient,
        violation,
    })
}
