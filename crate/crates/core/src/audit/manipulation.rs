//! Exhaustive search for coalitions that gain by understating their
//! acceptable sets.
//!
//! Coalitions are visited by size, then lexicographically. Within a
//! coalition, joint misreports are visited by the total number of dropped
//! objects, then lexicographically by the members' dropped sets. A member
//! can never end up with more units than it reports, so misreports that
//! leave a member fewer acceptable objects than its truthful utility (or,
//! for the equilibrium set, its best truthful utility) are skipped.

use std::collections::{HashMap, HashSet};
use std::sync::Mutex;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::{subsets_by_size, Solution};
use crate::caps::Caps;
use crate::competitive::{cce_bounded, cce_utility_range, Equilibrium, Extreme, Interval, Scope};
use crate::error::{Error, Result};
use crate::instance::{Instance, UtilityProfile};
use crate::rational::{self, Rational};

/// Set-valued manipulation notions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Notion {
    /// Some manipulated equilibrium gives every member at least its best
    /// truthful utility and some member strictly more.
    #[default]
    Weak,
    /// Additionally, no truthful equilibrium is weakly better for all
    /// members, and strictly for one, than any manipulated equilibrium.
    Strong,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOptions {
    pub max_coalition: usize,
    /// Which notion a set-valued solution must violate to be reported.
    pub notion: Notion,
    /// Equilibria considered for a set-valued solution.
    pub scope: Scope,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            max_coalition: usize::MAX,
            notion: Notion::Weak,
            scope: Scope::All,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "coverage", rename_all = "lowercase")]
pub enum Coverage {
    Complete,
    Partial { reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManipulationReport {
    pub coalition: Vec<usize>,
    /// Objects each member stops reporting, aligned with `coalition`.
    pub dropped: Vec<Vec<usize>>,
    /// Members' truthful utilities (intervals for a set-valued solution).
    pub truthful: Vec<Interval>,
    /// Members' utilities after the misreport.
    pub manipulated: Vec<Interval>,
    /// Utilities of the outcome that shows the gain.
    pub witness: UtilityProfile,
    pub equilibrium: Option<Equilibrium>,
    pub weak: bool,
    /// `None` for single-valued solutions, or when undecided.
    pub strong: Option<bool>,
}

impl ManipulationReport {
    pub fn to_json(&self, inst: &Instance) -> Value {
        let name = |i: usize| inst.agents()[i].clone();
        let members: Vec<String> = self.coalition.iter().map(|&i| name(i)).collect();
        let dropped: serde_json::Map<String, Value> = self
            .coalition
            .iter()
            .zip(&self.dropped)
            .map(|(&i, d)| {
                let objects: Vec<String> = d.iter().map(|&k| inst.objects()[k].clone()).collect();
                (name(i), json!(objects))
            })
            .collect();
        let interval_map = |v: &[Interval]| -> serde_json::Map<String, Value> {
            self.coalition
                .iter()
                .zip(v)
                .map(|(&i, iv)| (name(i), json!([iv.lo, iv.hi])))
                .collect()
        };
        let mut out = json!({
            "coalition": members,
            "dropped": dropped,
            "truthful": interval_map(&self.truthful),
            "manipulated": interval_map(&self.manipulated),
            "witness_utilities": inst
                .agents()
                .iter()
                .cloned()
                .zip(self.witness.to_strings().into_iter().map(Value::String))
                .collect::<serde_json::Map<String, Value>>(),
            "weak": self.weak,
            "strong": self.strong,
        });
        if let Some(eq) = &self.equilibrium {
            out["equilibrium"] = serde_json::to_value(eq.to_doc(inst)).unwrap_or(Value::Null);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome {
    pub found: Option<ManipulationReport>,
    pub coalitions: u64,
    /// Joint misreports evaluated.
    pub misreports: u64,
    /// Joint misreports in scope before pruning.
    pub search_space: u128,
    /// Set-valued candidates whose strong verdict could not be decided.
    pub undetermined: u64,
    pub coverage: Coverage,
}

/// Dropped subsets of `row` leaving at least `keep` objects, by size then
/// lexicographically.
fn drop_options(row: &[usize], keep: usize) -> Vec<Vec<usize>> {
    let max = row.len().saturating_sub(keep);
    let mut out = vec![Vec::new()];
    out.extend(
        subsets_by_size(row.len(), max)
            .into_iter()
            .map(|s| s.into_iter().map(|b| row[b]).collect()),
    );
    out
}

fn joint_misreports(options: &[Vec<Vec<usize>>]) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![Vec::new()];
    for opts in options {
        let mut next = Vec::with_capacity(out.len() * opts.len());
        for prefix in &out {
            for o in 0..opts.len() {
                let mut p = prefix.clone();
                p.push(o);
                next.push(p);
            }
        }
        out = next;
    }
    out.retain(|choice| choice.iter().any(|&o| o != 0));
    out.sort_by_cached_key(|choice| {
        let total: usize = choice.iter().zip(options).map(|(&o, opts)| opts[o].len()).sum();
        let sets: Vec<Vec<usize>> = choice
            .iter()
            .zip(options)
            .map(|(&o, opts)| opts[o].clone())
            .collect();
        (total, sets)
    });
    out
}

/// Smallest integer count not below `v`.
fn ceil_count(v: &Rational) -> usize {
    rational::to_f64(&v.ceil()).max(0.0) as usize
}

enum Truthful {
    Single(UtilityProfile),
    Set { lo: Vec<Rational>, hi: Vec<Rational> },
}

impl Truthful {
    fn best(&self, i: usize) -> &Rational {
        match self {
            Truthful::Single(u) => &u[i],
            Truthful::Set { hi, .. } => &hi[i],
        }
    }
}

/// Symmetry keys of misreports already shown not to gain.
type Rejected = Mutex<HashSet<Vec<(u64, u64, bool)>>>;

/// Object relabelings that map the truthful instance onto itself. Agents
/// with equal truthful rows are interchangeable, so a relabeled instance
/// only has to reproduce the multiset of rows.
struct Symmetry {
    perms: Vec<Vec<usize>>,
    truthful: Vec<u64>,
}

const SYMMETRY_OBJECTS: usize = 8;

impl Symmetry {
    fn new(inst: &Instance) -> Self {
        let m = inst.m();
        let truthful: Vec<u64> = inst.rows().iter().map(|r| mask(r)).collect();
        let mut perms = Vec::new();
        if m <= SYMMETRY_OBJECTS {
            let mut sorted = truthful.clone();
            sorted.sort_unstable();
            let mut perm = Vec::with_capacity(m);
            let mut used = vec![false; m];
            relabelings(inst, &mut perm, &mut used, &mut |p| {
                let mut image: Vec<u64> = truthful.iter().map(|&r| permute(r, p)).collect();
                image.sort_unstable();
                if image == sorted {
                    perms.push(p.to_vec());
                }
            });
        }
        if perms.is_empty() {
            perms.push((0..m).collect());
        }
        Symmetry { perms, truthful }
    }

    /// The same key for every relabeling of a coalition and its report.
    fn key(&self, members: &[usize], reported: &[Vec<bool>]) -> Vec<(u64, u64, bool)> {
        let reported: Vec<u64> = reported.iter().map(|r| mask(r)).collect();
        self.perms
            .iter()
            .map(|p| {
                let mut k: Vec<(u64, u64, bool)> = (0..reported.len())
                    .map(|i| {
                        (
                            permute(self.truthful[i], p),
                            permute(reported[i], p),
                            members.contains(&i),
                        )
                    })
                    .collect();
                k.sort_unstable();
                k
            })
            .min()
            .unwrap_or_default()
    }
}

fn mask(row: &[bool]) -> u64 {
    row.iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .fold(0, |acc, (k, _)| acc | 1 << k)
}

fn permute(row: u64, perm: &[usize]) -> u64 {
    perm.iter()
        .enumerate()
        .filter(|(k, _)| row >> k & 1 == 1)
        .fold(0, |acc, (_, &to)| acc | 1 << to)
}

fn relabelings(inst: &Instance, perm: &mut Vec<usize>, used: &mut [bool], f: &mut dyn FnMut(&[usize])) {
    let pos = perm.len();
    if pos == inst.m() {
        f(perm);
        return;
    }
    for k in 0..inst.m() {
        if used[k]
            || inst.capacity(k) != inst.capacity(pos)
            || inst.demand(k) != inst.demand(pos)
        {
            continue;
        }
        used[k] = true;
        perm.push(k);
        relabelings(inst, perm, used, f);
        perm.pop();
        used[k] = false;
    }
}

/// Searches coalitions of at most `max_coalition` agents for a joint
/// understatement after which every member is weakly better off and one
/// strictly. Returns the first one in the fixed visiting order.
pub fn manipulation_search(
    inst: &Instance,
    solution: &Solution,
    options: &SearchOptions,
    caps: &Caps,
) -> Result<SearchOutcome> {
    let n = inst.n();
    if n > caps.coalition_agents || n >= 64 {
        return Err(Error::cap(
            "coalition enumeration (agents)",
            n as u128,
            caps.coalition_agents as u128,
        ));
    }
    let truthful = if solution.is_set_valued() {
        let r = cce_utility_range(inst, caps, options.scope)?;
        Truthful::Set {
            lo: r.agents.iter().map(|iv| iv.lo_value.clone()).collect(),
            hi: r.agents.iter().map(|iv| iv.hi_value.clone()).collect(),
        }
    } else {
        Truthful::Single(solution.utilities(inst, caps)?)
    };

    let rows: Vec<Vec<usize>> = (0..n).map(|i| inst.acceptable_set(i)).collect();
    let cache: Mutex<HashMap<Vec<Vec<bool>>, UtilityProfile>> = Mutex::new(HashMap::new());
    let symmetry = solution.is_set_valued().then(|| Symmetry::new(inst));
    let rejected: Rejected = Mutex::new(HashSet::new());
    let chunk = rayon::current_num_threads().max(1) * 2;
    let mut outcome = SearchOutcome {
        found: None,
        coalitions: 0,
        misreports: 0,
        search_space: 0,
        undetermined: 0,
        coverage: Coverage::Complete,
    };
    let undetermined = std::sync::atomic::AtomicU64::new(0);

    let coalitions = subsets_by_size(n, options.max_coalition);
    for members in &coalitions {
        let space = members
            .iter()
            .fold(1u128, |acc, &i| acc.saturating_mul(1u128 << rows[i].len().min(100)));
        outcome.search_space = outcome.search_space.saturating_add(space - 1);
    }

    for members in coalitions {
        if outcome.found.is_some() {
            break;
        }
        let opts: Vec<Vec<Vec<usize>>> = members
            .iter()
            .map(|&i| drop_options(&rows[i], ceil_count(truthful.best(i))))
            .collect();
        let count = opts.iter().fold(1u128, |acc, o| acc.saturating_mul(o.len() as u128)) - 1;
        if outcome.misreports as u128 + count > caps.misreports as u128 {
            outcome.coverage = Coverage::Partial {
                reason: format!(
                    "misreport cap {} reached before coalition {}",
                    caps.misreports,
                    crate::competitive::group_names(inst.agents(), &members)
                ),
            };
            break;
        }
        outcome.coalitions += 1;
        if count == 0 {
            continue;
        }
        let candidates = joint_misreports(&opts);
        for block in candidates.chunks(chunk) {
            let results: Vec<Result<Option<ManipulationReport>>> = block
                .par_iter()
                .map(|choice| {
                    let dropped: Vec<Vec<usize>> = choice
                        .iter()
                        .zip(&opts)
                        .map(|(&o, opt)| opt[o].clone())
                        .collect();
                    evaluate(
                        inst,
                        solution,
                        options,
                        caps,
                        &truthful,
                        &members,
                        dropped,
                        &cache,
                        symmetry.as_ref().map(|s| (s, &rejected)),
                        &undetermined,
                    )
                })
                .collect();
            for r in results {
                outcome.misreports += 1;
                if let Some(report) = r? {
                    outcome.found = Some(report);
                    break;
                }
            }
            if outcome.found.is_some() {
                break;
            }
        }
    }
    outcome.undetermined = undetermined.into_inner();
    Ok(outcome)
}

#[allow(clippy::too_many_arguments)]
fn evaluate(
    inst: &Instance,
    solution: &Solution,
    options: &SearchOptions,
    caps: &Caps,
    truthful: &Truthful,
    members: &[usize],
    dropped: Vec<Vec<usize>>,
    cache: &Mutex<HashMap<Vec<Vec<bool>>, UtilityProfile>>,
    symmetry: Option<(&Symmetry, &Rejected)>,
    undetermined: &std::sync::atomic::AtomicU64,
) -> Result<Option<ManipulationReport>> {
    let mut rows = inst.rows().to_vec();
    for (&i, d) in members.iter().zip(&dropped) {
        for &k in d {
            rows[i][k] = false;
        }
    }
    match truthful {
        Truthful::Single(before) => {
            let cached = cache.lock().expect("cache lock").get(&rows).cloned();
            let after = match cached {
                Some(u) => u,
                None => {
                    let u = solution.utilities(&inst.with_rows(rows.clone())?, caps)?;
                    cache.lock().expect("cache lock").insert(rows, u.clone());
                    u
                }
            };
            let weakly = members.iter().all(|&i| after[i] >= before[i]);
            let strictly = members.iter().any(|&i| after[i] > before[i]);
            if !(weakly && strictly) {
                return Ok(None);
            }
            Ok(Some(ManipulationReport {
                coalition: members.to_vec(),
                dropped,
                truthful: members.iter().map(|&i| Interval::point(before[i].clone())).collect(),
                manipulated: members.iter().map(|&i| Interval::point(after[i].clone())).collect(),
                witness: after,
                equilibrium: None,
                weak: true,
                strong: None,
            }))
        }
        Truthful::Set { lo, hi } => {
            // Relabelings of a rejected misreport are rejected too.
            let key = symmetry.map(|(s, _)| s.key(members, &rows));
            if let (Some((_, rejected)), Some(key)) = (symmetry, &key) {
                if rejected.lock().expect("symmetry lock").contains(key) {
                    return Ok(None);
                }
            }
            let reject = || {
                if let (Some((_, rejected)), Some(key)) = (symmetry, key.clone()) {
                    rejected.lock().expect("symmetry lock").insert(key);
                }
                Ok(None)
            };
            let reported = inst.with_rows(rows)?;
            let floors: Vec<(usize, Rational)> =
                members.iter().map(|&i| (i, hi[i].clone())).collect();
            let Some(eq) = cce_bounded(&reported, caps, options.scope, &floors, Extreme::Max)?
            else {
                return reject();
            };
            let unique = members.iter().all(|&i| lo[i] == hi[i]);
            let strong = if unique {
                // Every manipulated equilibrium must escape domination by
                // the single truthful utility vector.
                Some(
                    cce_bounded(&reported, caps, options.scope, &floors, Extreme::Min)?.is_none(),
                )
            } else {
                // Sufficient: nobody can fall below its best truthful value.
                let mut all_above = true;
                for (i, h) in &floors {
                    let single = [(*i, h.clone())];
                    if cce_bounded(&reported, caps, options.scope, &single, Extreme::Min)?.is_some() {
                        all_above = false;
                        break;
                    }
                }
                all_above.then_some(true)
            };
            if strong.is_none() {
                undetermined.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
            }
            if options.notion == Notion::Strong && strong != Some(true) {
                return reject();
            }
            let range = cce_utility_range(&reported, caps, options.scope)?;
            Ok(Some(ManipulationReport {
                coalition: members.to_vec(),
                dropped,
                truthful: members
                    .iter()
                    .map(|&i| Interval::new(lo[i].clone(), hi[i].clone()))
                    .collect(),
                manipulated: members.iter().map(|&i| range.agents[i].clone()).collect(),
                witness: eq.utilities(),
                equilibrium: Some(eq),
                weak: true,
                strong,
            }))
        }
    }
}
