//! Property checks: Lorenz comparison, envy, independence of perfect
//! objects, non-bossiness and coalition manipulation.

mod manipulation;

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::caps::Caps;
use crate::competitive::{cce_find, cce_ipo_selection};
use crate::egalitarian::{epo, es, es_star, priority, random_priority_profile};
use crate::error::{Error, Result};
use crate::flow::feasible_utilities;
use crate::instance::{Instance, UtilityProfile};
use crate::rational::{self, Rational};

pub use manipulation::{
    manipulation_search, Coverage, ManipulationReport, Notion, SearchOptions, SearchOutcome,
};

/// A solution procedure under audit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solution {
    Es,
    EsStar,
    Epo,
    /// Serial dictatorship in a fixed order of agent indices.
    Priority(Vec<usize>),
    RandomPriority,
    /// The equilibrium with free, fully taken perfect objects.
    CceSelection,
    /// The whole equilibrium set (set-valued).
    Cce,
}

impl Solution {
    pub fn name(&self) -> &'static str {
        match self {
            Solution::Es => "es",
            Solution::EsStar => "es-star",
            Solution::Epo => "epo",
            Solution::Priority(_) => "priority",
            Solution::RandomPriority => "rp",
            Solution::CceSelection => "cce-ipo-selection",
            Solution::Cce => "cce",
        }
    }

    pub fn is_set_valued(&self) -> bool {
        matches!(self, Solution::Cce)
    }

    /// Utilities of a single-valued solution. For the equilibrium set this
    /// is the utility profile of one equilibrium.
    pub fn utilities(&self, inst: &Instance, caps: &Caps) -> Result<UtilityProfile> {
        Ok(match self {
            Solution::Es => es(inst).utilities,
            Solution::EsStar => es_star(inst),
            Solution::Epo => epo(inst),
            Solution::Priority(order) => priority(inst, order)?.utilities(),
            Solution::RandomPriority => random_priority_profile(inst, caps)?,
            Solution::CceSelection => cce_ipo_selection(inst, caps)?.utilities(),
            Solution::Cce => cce_find(inst, caps)?.utilities(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LorenzRelation {
    Dominates,
    Dominated,
    Equal,
    Incomparable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LorenzVerdict {
    pub relation: LorenzRelation,
    /// Length of the first prefix whose sums differ (for incomparable
    /// profiles, the first prefix that contradicts the earlier direction).
    pub witness: Option<usize>,
}

impl LorenzVerdict {
    /// The first profile is at least as equal as the second.
    pub fn weakly_dominates(&self) -> bool {
        matches!(self.relation, LorenzRelation::Dominates | LorenzRelation::Equal)
    }
}

/// Compares ascending prefix sums of two profiles.
pub fn lorenz_compare(u: &UtilityProfile, v: &UtilityProfile) -> Result<LorenzVerdict> {
    if u.len() != v.len() {
        return Err(Error::Precondition(format!(
            "profiles of length {} and {}",
            u.len(),
            v.len()
        )));
    }
    let mut a = u.0.clone();
    let mut b = v.0.clone();
    a.sort();
    b.sort();
    let (mut sa, mut sb) = (Rational::zero(), Rational::zero());
    let mut above = None;
    let mut below = None;
    for t in 0..a.len() {
        sa += &a[t];
        sb += &b[t];
        if sa > sb && above.is_none() {
            above = Some(t + 1);
        }
        if sa < sb && below.is_none() {
            below = Some(t + 1);
        }
    }
    Ok(match (above, below) {
        (None, None) => LorenzVerdict {
            relation: LorenzRelation::Equal,
            witness: None,
        },
        (Some(t), None) => LorenzVerdict {
            relation: LorenzRelation::Dominates,
            witness: Some(t),
        },
        (None, Some(t)) => LorenzVerdict {
            relation: LorenzRelation::Dominated,
            witness: Some(t),
        },
        (Some(x), Some(y)) => LorenzVerdict {
            relation: LorenzRelation::Incomparable,
            witness: Some(x.max(y)),
        },
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LorenzTestReport {
    pub trials: usize,
    /// Sampled efficient profiles that `U` does not weakly dominate.
    pub counterexamples: Vec<UtilityProfile>,
}

impl LorenzTestReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

fn random_fraction(rng: &mut ChaCha8Rng) -> Rational {
    let den: i64 = rng.gen_range(2..=9);
    rational::ratio(rng.gen_range(1..den), den)
}

/// A random efficient profile: a convex combination of serial-dictatorship
/// vertices, then equalizing transfers that stay feasible.
fn random_efficient_profile(inst: &Instance, rng: &mut ChaCha8Rng) -> UtilityProfile {
    let n = inst.n();
    let vertex = |rng: &mut ChaCha8Rng| {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        priority(inst, &order).expect("permutation").utilities()
    };
    let mut u = vertex(rng);
    for _ in 0..rng.gen_range(0..3) {
        let w = random_fraction(rng);
        let v = vertex(rng);
        for i in 0..n {
            u.0[i] = &u.0[i] * (Rational::one() - &w) + &v.0[i] * &w;
        }
    }
    for _ in 0..rng.gen_range(0..12) {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        if u.0[i] <= u.0[j] {
            continue;
        }
        let room = rational::int(inst.row_size(j) as i64) - &u.0[j];
        let mut t = ((&u.0[i] - &u.0[j]) / rational::int(2)).min(room) * random_fraction(rng);
        for _ in 0..4 {
            if t.is_zero() {
                break;
            }
            let mut next = u.clone();
            next.0[i] -= &t;
            next.0[j] += &t;
            if feasible_utilities(inst, &next).is_ok_and(|c| c.feasible) {
                u = next;
                break;
            }
            t /= rational::int(2);
        }
    }
    u
}

/// Samples random efficient profiles and checks that `u` Lorenz dominates
/// each of them.
pub fn lorenz_dominance_test(
    inst: &Instance,
    u: &UtilityProfile,
    trials: usize,
    seed: u64,
) -> Result<LorenzTestReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counterexamples = Vec::new();
    for _ in 0..trials {
        let sample = random_efficient_profile(inst, &mut rng);
        if !lorenz_compare(u, &sample)?.weakly_dominates() {
            counterexamples.push(sample);
        }
    }
    Ok(LorenzTestReport {
        trials,
        counterexamples,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EnvyViolation {
    /// Accepts a subset of what `envied` accepts.
    pub envious: usize,
    pub envied: usize,
    pub envious_utility: String,
    pub envied_utility: String,
}

/// Agents whose acceptable set is contained in another's must not get more.
pub fn envy_check(inst: &Instance, u: &UtilityProfile) -> Result<Vec<EnvyViolation>> {
    if u.len() != inst.n() {
        return Err(Error::Precondition("profile length differs from agent count".into()));
    }
    let mut out = Vec::new();
    for i in 0..inst.n() {
        for j in 0..inst.n() {
            let subset = (0..inst.m()).all(|k| !inst.accepts(i, k) || inst.accepts(j, k));
            if i != j && subset && u[i] > u[j] {
                out.push(EnvyViolation {
                    envious: i,
                    envied: j,
                    envious_utility: rational::format(&u[i]),
                    envied_utility: rational::format(&u[j]),
                });
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IpoFailure {
    pub agent: usize,
    /// Utility before the extension plus one.
    pub expected: String,
    pub actual: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IpoReport {
    pub acceptors: Vec<usize>,
    pub failures: Vec<IpoFailure>,
}

impl IpoReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Adds a perfect object accepted by `acceptors` and checks that each of
/// them gains exactly one unit.
pub fn ipo_check(
    inst: &Instance,
    solution: &Solution,
    acceptors: &[usize],
    caps: &Caps,
) -> Result<IpoReport> {
    let ext = inst.perfect_extension(acceptors)?;
    let before = solution.utilities(inst, caps)?;
    let after = solution.utilities(&ext, caps)?;
    let mut acceptors = acceptors.to_vec();
    acceptors.sort_unstable();
    acceptors.dedup();
    let failures = acceptors
        .iter()
        .filter_map(|&i| {
            let expected = &before[i] + Rational::one();
            (after[i] != expected).then(|| IpoFailure {
                agent: i,
                expected: rational::format(&expected),
                actual: rational::format(&after[i]),
            })
        })
        .collect();
    Ok(IpoReport {
        acceptors,
        failures,
    })
}

/// Runs [`ipo_check`] for every nonempty acceptor set in order of size,
/// then lexicographically. Returns the first failing report, or `None`.
pub fn ipo_check_all(
    inst: &Instance,
    solution: &Solution,
    caps: &Caps,
) -> Result<(u64, Option<IpoReport>)> {
    let n = inst.n();
    if n > caps.coalition_agents || n >= 64 {
        return Err(Error::cap(
            "acceptor set enumeration (agents)",
            n as u128,
            caps.coalition_agents as u128,
        ));
    }
    let mut checked = 0;
    for set in subsets_by_size(n, n) {
        checked += 1;
        let report = ipo_check(inst, solution, &set, caps)?;
        if !report.passed() {
            return Ok((checked, Some(report)));
        }
    }
    Ok((checked, None))
}

/// Nonempty subsets of `0..n` with at most `max` members, by size then
/// lexicographically.
pub(crate) fn subsets_by_size(n: usize, max: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for size in 1..=max.min(n) {
        rec(0, n, size, &mut Vec::new(), &mut out);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonbossyViolation {
    pub agent: usize,
    pub dropped: Vec<usize>,
    pub before: UtilityProfile,
    pub after: UtilityProfile,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonbossyReport {
    pub misreports: u64,
    pub violations: Vec<NonbossyViolation>,
}

/// For every single-agent understatement: if the agent's egalitarian
/// utility is unchanged, nobody's may change.
pub fn nonbossy_check(inst: &Instance, caps: &Caps) -> Result<NonbossyReport> {
    let total: u128 = (0..inst.n())
        .map(|i| (1u128 << inst.row_size(i).min(100)) - 1)
        .sum();
    if total > caps.misreports as u128 {
        return Err(Error::cap(
            "single-agent misreports",
            total,
            caps.misreports as u128,
        ));
    }
    let before = es(inst).utilities;
    let mut violations = Vec::new();
    let mut misreports = 0;
    for i in 0..inst.n() {
        let row = inst.acceptable_set(i);
        for mask in 1u64..(1u64 << row.len()) {
            misreports += 1;
            let dropped: Vec<usize> = (0..row.len())
                .filter(|&b| mask >> b & 1 == 1)
                .map(|b| row[b])
                .collect();
            let mut rows = inst.rows().to_vec();
            for &k in &dropped {
                rows[i][k] = false;
            }
            let after = es(&inst.with_rows(rows)?).utilities;
            if after[i] == before[i] && after != before {
                violations.push(NonbossyViolation {
                    agent: i,
                    dropped,
                    before: before.clone(),
                    after,
                });
            }
        }
    }
    Ok(NonbossyReport {
        misreports,
        violations,
    })
}

/// Seeded random instance. Each cell is acceptable with probability
/// `density`; empty columns get one random acceptor; capacities are uniform
/// in `[1, |acceptors|]`.
pub fn random_instance(n: usize, m: usize, density: &Rational, seed: u64) -> Result<Instance> {
    if n == 0 || m == 0 {
        return Err(Error::Precondition("n and m must be at least 1".into()));
    }
    if *density <= Rational::zero() || *density > Rational::one() {
        return Err(Error::Precondition("density must lie in (0, 1]".into()));
    }
    let (num, den) = (
        density.numer().try_into().unwrap_or(u64::MAX),
        density.denom().try_into().unwrap_or(u64::MAX),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = vec![vec![false; m]; n];
    for row in rows.iter_mut() {
        for cell in row.iter_mut() {
            *cell = rng.gen_range(0..den) < num;
        }
    }
    let mut capacities = Vec::with_capacity(m);
    for k in 0..m {
        if rows.iter().all(|r| !r[k]) {
            rows[rng.gen_range(0..n)][k] = true;
        }
        let takers = rows.iter().filter(|r| r[k]).count() as u64;
        capacities.push(rng.gen_range(1..=takers));
    }
    let agents = (0..n)
        .map(|i| {
            if n <= 26 {
                ((b'a' + i as u8) as char).to_string()
            } else {
                format!("a{}", i + 1)
            }
        })
        .collect();
    let objects = (0..m).map(|k| format!("o{}", k + 1)).collect();
    Instance::new(agents, objects, capacities, rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::{int, ratio};

    fn profile(values: &[(i64, i64)]) -> UtilityProfile {
        UtilityProfile(values.iter().map(|&(a, b)| ratio(a, b)).collect())
    }

    #[test]
    fn lorenz_small_cases() {
        let v = lorenz_compare(&profile(&[(2, 1); 3]), &profile(&[(3, 1), (2, 1), (1, 1)])).unwrap();
        assert_eq!(v.relation, LorenzRelation::Dominates);
        assert_eq!(v.witness, Some(1));
        let v = lorenz_compare(&profile(&[(1, 1), (3, 1)]), &profile(&[(2, 1), (2, 1)])).unwrap();
        assert_eq!(v.relation, LorenzRelation::Dominated);
        let v = lorenz_compare(&profile(&[(1, 1), (3, 1)]), &profile(&[(3, 1), (1, 1)])).unwrap();
        assert_eq!(v.relation, LorenzRelation::Equal);
        let v = lorenz_compare(&profile(&[(1, 1), (5, 1)]), &profile(&[(0, 1), (7, 1)])).unwrap();
        assert_eq!(v.relation, LorenzRelation::Incomparable);
        assert!(lorenz_compare(&profile(&[(1, 1)]), &profile(&[(1, 1), (1, 1)])).is_err());
    }

    #[test]
    fn ex1_es_dominates_epo() {
        let inst = fixtures::ex1();
        let v = lorenz_compare(&es(&inst).utilities, &epo(&inst)).unwrap();
        assert_eq!(v.relation, LorenzRelation::Dominates);
    }

    #[test]
    fn dominance_test_ex1() {
        let inst = fixtures::ex1();
        let r = lorenz_dominance_test(&inst, &es(&inst).utilities, 300, 11).unwrap();
        assert!(r.passed());
        let r = lorenz_dominance_test(&inst, &epo(&inst), 300, 11).unwrap();
        assert!(!r.passed());
        let single = Instance::new(vec!["a".into()], vec!["x".into()], vec![1], vec![vec![true]])
            .unwrap();
        assert!(lorenz_dominance_test(&single, &es(&single).utilities, 20, 1)
            .unwrap()
            .passed());
    }

    #[test]
    fn samples_are_efficient() {
        let inst = fixtures::ex2();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let u = random_efficient_profile(&inst, &mut rng);
            assert_eq!(u.total(), int(inst.matching_size() as i64));
            assert!(feasible_utilities(&inst, &u).unwrap().feasible);
        }
    }

    #[test]
    fn envy() {
        let inst = fixtures::ex1();
        assert!(envy_check(&inst, &es(&inst).utilities).unwrap().is_empty());
        assert!(envy_check(&inst, &epo(&inst)).unwrap().is_empty());
        let mut u = es(&inst).utilities;
        u.0[5] = int(3);
        let v = envy_check(&inst, &u).unwrap();
        assert!(v.iter().any(|e| e.envious == 5 && e.envied == 4));
    }

    #[test]
    fn ipo_on_ex4() {
        let inst = fixtures::ex4();
        let caps = Caps::default();
        let r = ipo_check(&inst, &Solution::Es, &[0, 1, 2, 3], &caps).unwrap();
        assert_eq!(r.failures.len(), 4);
        assert_eq!(r.failures[0].expected, "9/5");
        assert_eq!(r.failures[0].actual, "7/4");
        for s in [Solution::Epo, Solution::EsStar, Solution::CceSelection] {
            assert!(ipo_check(&inst, &s, &[0, 1, 2, 3], &caps).unwrap().passed());
        }
        let (_, first) = ipo_check_all(&inst, &Solution::Es, &caps).unwrap();
        assert!(first.is_some());
        let (checked, none) = ipo_check_all(&inst, &Solution::EsStar, &caps).unwrap();
        assert_eq!(checked, 31);
        assert!(none.is_none());
    }

    #[test]
    fn nonbossy_fixtures() {
        let caps = Caps::default();
        for inst in [fixtures::ex1(), fixtures::ex3()] {
            assert!(nonbossy_check(&inst, &caps).unwrap().violations.is_empty());
        }
    }

    #[test]
    fn dropping_a_perfect_object_costs() {
        let inst = fixtures::ex1();
        let mut rows = inst.rows().to_vec();
        rows[0][2] = false;
        let after = es(&inst.with_rows(rows).unwrap()).utilities;
        assert!(after[0] < es(&inst).utilities[0]);
    }

    #[test]
    fn random_instances() {
        let one = random_instance(1, 1, &int(1), 9).unwrap();
        assert_eq!(one.capacities(), &[1]);
        assert!(one.accepts(0, 0));
        let a = random_instance(5, 4, &ratio(1, 2), 7).unwrap();
        assert_eq!(a, random_instance(5, 4, &ratio(1, 2), 7).unwrap());
        assert!(a.is_demand_adequate());
        assert!(random_instance(0, 1, &int(1), 0).is_err());
        assert!(random_instance(1, 1, &int(0), 0).is_err());
    }
}
