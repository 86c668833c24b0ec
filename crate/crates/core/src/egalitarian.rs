//! Egalitarian (leximin), refined egalitarian, per-object egalitarian and
//! priority solutions.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::flow;
use crate::instance::{AssignmentMatrix, Instance, UtilityProfile};
use crate::rational::{self, Rational};

/// One water-filling phase: agents frozen at `level`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Phase {
    pub level: String,
    pub frozen: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeximinResult {
    pub utilities: UtilityProfile,
    pub phases: Vec<Phase>,
    /// Assignment realizing `utilities`, from the deterministic flow.
    pub ram: AssignmentMatrix,
}

/// Leximin-maximal efficient profile by water-filling.
///
/// Every unfrozen agent is raised to a common level; the highest feasible
/// level is found by Newton steps on minimum cuts, then the maximal tight
/// set is frozen. Each phase freezes at least one agent.
pub fn es(inst: &Instance) -> LeximinResult {
    let n = inst.n();
    let total = rational::int(inst.matching_size() as i64);
    let mut x = vec![Rational::zero(); n];
    let mut frozen = vec![false; n];
    let mut phases = Vec::new();
    let mut last = None;

    while frozen.iter().any(|f| !f) {
        let unfrozen: Vec<usize> = (0..n).filter(|&i| !frozen[i]).collect();
        let frozen_mass = rational::sum((0..n).filter(|&i| frozen[i]).map(|i| &x[i]));
        let mut level = (&total - &frozen_mass) / rational::int(unfrozen.len() as i64);
        let outcome = loop {
            for &i in &unfrozen {
                x[i] = level.clone();
            }
            let outcome = flow::max_flow(inst, &x);
            if outcome.total == rational::sum(&x) {
                break outcome;
            }
            let cut = &outcome.cut;
            let free: Vec<usize> = cut.iter().copied().filter(|&i| !frozen[i]).collect();
            assert!(!free.is_empty(), "violated cut must contain an unfrozen agent");
            let fixed = rational::sum(cut.iter().filter(|&&i| frozen[i]).map(|&i| &x[i]));
            let value = rational::int(flow::coalition_value(inst, cut) as i64);
            level = (value - fixed) / rational::int(free.len() as i64);
        };
        let newly: Vec<usize> = outcome
            .cut
            .iter()
            .copied()
            .filter(|&i| !frozen[i])
            .collect();
        assert!(!newly.is_empty(), "maximal tight set must grow");
        for &i in &newly {
            frozen[i] = true;
        }
        phases.push(Phase {
            level: rational::format(&level),
            frozen: newly,
        });
        last = Some(outcome);
    }

    let ram = match last {
        Some(outcome) => outcome.assignment,
        None => AssignmentMatrix::zeros(n, inst.m()),
    };
    LeximinResult {
        utilities: UtilityProfile(x),
        phases,
        ram,
    }
}

/// Egalitarian profile of the over-demanded objects plus one unit of every
/// perfect object the agent accepts. The partition is taken once, on `inst`.
pub fn es_star(inst: &Instance) -> UtilityProfile {
    let partition = inst.partition_objects();
    let base = if partition.over_demanded.is_empty() {
        vec![Rational::zero(); inst.n()]
    } else {
        let sub = inst
            .restrict_objects(&partition.over_demanded)
            .expect("restriction keeps shape");
        es(&sub).utilities.0
    };
    UtilityProfile(
        base.into_iter()
            .enumerate()
            .map(|(i, u)| {
                let perfect = partition.perfect.iter().filter(|&&k| inst.accepts(i, k)).count();
                u + rational::int(perfect as i64)
            })
            .collect(),
    )
}

/// Each object split equally among its acceptors.
pub fn epo(inst: &Instance) -> UtilityProfile {
    UtilityProfile(
        (0..inst.n())
            .map(|i| {
                rational::sum(
                    (0..inst.m())
                        .filter(|&k| inst.accepts(i, k))
                        .map(|k| {
                            Rational::new(
                                BigInt::from(inst.effective_capacity(k)),
                                BigInt::from(inst.demand(k)),
                            )
                        })
                        .collect::<Vec<_>>()
                        .iter(),
                )
            })
            .collect(),
    )
}

fn check_order(inst: &Instance, order: &[usize]) -> Result<()> {
    let mut seen = vec![false; inst.n()];
    if order.len() != inst.n() {
        return Err(Error::Precondition(format!(
            "order lists {} agents, instance has {}",
            order.len(),
            inst.n()
        )));
    }
    for &i in order {
        if i >= inst.n() || seen[i] {
            return Err(Error::Precondition("order is not a permutation of the agents".into()));
        }
        seen[i] = true;
    }
    Ok(())
}

fn priority_rows(inst: &Instance, order: &[usize]) -> Vec<Vec<bool>> {
    let mut remaining: Vec<u64> = (0..inst.m()).map(|k| inst.effective_capacity(k)).collect();
    let mut rows = vec![vec![false; inst.m()]; inst.n()];
    for &i in order {
        for k in 0..inst.m() {
            if inst.accepts(i, k) && remaining[k] > 0 {
                remaining[k] -= 1;
                rows[i][k] = true;
            }
        }
    }
    rows
}

/// Serial dictatorship: agents in `order` each take one unit of every
/// acceptable object that still has capacity.
pub fn priority(inst: &Instance, order: &[usize]) -> Result<AssignmentMatrix> {
    check_order(inst, order)?;
    Ok(AssignmentMatrix::from_binary(&priority_rows(inst, order)))
}

pub(crate) fn priority_counts(inst: &Instance, order: &[usize]) -> Vec<u64> {
    priority_rows(inst, order)
        .iter()
        .map(|r| r.iter().filter(|&&b| b).count() as u64)
        .collect()
}

/// Exact average of priority utilities over all `n!` orders.
pub fn random_priority_profile(inst: &Instance, caps: &Caps) -> Result<UtilityProfile> {
    let n = inst.n();
    if n > caps.permutation_agents {
        return Err(Error::cap(
            "permutation averaging (agents)",
            n as u128,
            caps.permutation_agents as u128,
        ));
    }
    let mut totals = vec![0u64; n];
    let mut count = 0u64;
    let mut order: Vec<usize> = (0..n).collect();
    // Heap's algorithm, iterative.
    let mut c = vec![0usize; n];
    let mut visit = |order: &[usize]| {
        for (t, u) in totals.iter_mut().zip(priority_counts(inst, order)) {
            *t += u;
        }
        count += 1;
    };
    visit(&order);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                order.swap(0, i);
            } else {
                order.swap(c[i], i);
            }
            visit(&order);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok(UtilityProfile(
        totals
            .into_iter()
            .map(|t| Rational::new(BigInt::from(t), BigInt::from(count)))
            .collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::instance::Instance;
    use crate::rational::{int, ratio};

    fn p(v: &[(i64, i64)]) -> UtilityProfile {
        UtilityProfile(v.iter().map(|&(a, b)| ratio(a, b)).collect())
    }

    #[test]
    fn es_ex1() {
        let r = es(&fixtures::ex1());
        assert_eq!(r.utilities, p(&[(9, 4), (9, 4), (9, 4), (9, 4), (2, 1), (1, 1)]));
        assert_eq!(r.ram.utilities(), r.utilities);
        r.ram.check_feasible(&fixtures::ex1()).unwrap();
        let levels: Vec<&str> = r.phases.iter().map(|ph| ph.level.as_str()).collect();
        assert_eq!(levels, vec!["1", "2", "9/4"]);
    }

    #[test]
    fn es_fixtures() {
        assert_eq!(
            es(&fixtures::ex2()).utilities,
            p(&[(2, 1), (2, 1), (2, 1), (5, 2), (5, 2), (13, 4), (13, 4), (13, 4), (13, 4)])
        );
        assert_eq!(es(&fixtures::ex4()).utilities, p(&[(4, 5); 5]));
        assert_eq!(
            es(&fixtures::ex3()).utilities,
            p(&[(5, 2), (5, 2), (5, 2), (5, 2), (5, 2), (5, 2), (1, 1)])
        );
        assert_eq!(
            es(&fixtures::ex4_extended()).utilities,
            p(&[(7, 4), (7, 4), (7, 4), (7, 4), (1, 1)])
        );
    }

    #[test]
    fn es_with_empty_rows_and_columns() {
        let inst = fixtures::ex1()
            .with_rows(vec![
                vec![true, true, true],
                vec![false, false, false],
                vec![true, false, false],
                vec![false, false, false],
                vec![false, false, false],
                vec![false, false, false],
            ])
            .unwrap();
        let r = es(&inst);
        assert_eq!(r.utilities.total(), int(inst.matching_size() as i64));
        assert_eq!(r.utilities[1], int(0));
        assert_eq!(r.utilities[0], int(3));
    }

    #[test]
    fn es_star_cases() {
        assert_eq!(es_star(&fixtures::ex3()), es(&fixtures::ex3()).utilities);
        let q = ratio(18, 7);
        assert_eq!(
            es_star(&fixtures::ex3_misreport()),
            UtilityProfile(vec![
                q.clone(),
                q.clone(),
                q.clone(),
                q.clone(),
                q.clone(),
                q,
                ratio(4, 7)
            ])
        );
        assert_eq!(
            es_star(&fixtures::ex4_extended()),
            p(&[(9, 5), (9, 5), (9, 5), (9, 5), (4, 5)])
        );
    }

    #[test]
    fn epo_cases() {
        assert_eq!(
            epo(&fixtures::ex1()),
            p(&[(37, 15), (37, 15), (37, 15), (37, 15), (22, 15), (2, 3)])
        );
        assert_eq!(epo(&fixtures::ex4()), p(&[(4, 5); 5]));
        let all = Instance::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec!["x".into()],
            vec![3],
            vec![vec![true]; 3],
        )
        .unwrap();
        assert_eq!(epo(&all), p(&[(1, 1); 3]));
    }

    #[test]
    fn priority_passes() {
        let inst = fixtures::ex1();
        let z = priority(&inst, &[0, 1, 2, 3, 4, 5]).unwrap();
        assert!(z.is_binary());
        z.check_feasible(&inst).unwrap();
        assert_eq!(z.row_sum(5), int(0));
        assert_eq!(z.row_sum(4), int(0));
        let z = priority(&inst, &[5, 4, 0, 1, 2, 3]).unwrap();
        assert_eq!(z.row_sum(5), int(1));
        assert_eq!(z.row_sum(4), int(2));
        assert_eq!(z.utilities().total(), int(12));
        assert!(priority(&inst, &[0, 0, 1, 2, 3, 4]).is_err());
        let roomy = Instance::new(
            vec!["a".into(), "b".into()],
            vec!["x".into()],
            vec![3],
            vec![vec![true]; 2],
        )
        .unwrap();
        assert_eq!(priority(&roomy, &[1, 0]).unwrap().utilities(), p(&[(1, 1); 2]));
    }

    #[test]
    fn random_priority_matches_epo() {
        let caps = Caps::default();
        let ex1 = fixtures::ex1();
        assert_eq!(random_priority_profile(&ex1, &caps).unwrap(), epo(&ex1));
        assert_eq!(
            random_priority_profile(&fixtures::ex4(), &caps).unwrap(),
            p(&[(4, 5); 5])
        );
        let lone = Instance::new(
            vec!["a".into()],
            vec!["x".into(), "y".into()],
            vec![2, 1],
            vec![vec![true, true]],
        )
        .unwrap();
        assert_eq!(random_priority_profile(&lone, &caps).unwrap(), p(&[(2, 1)]));
        let small = Caps {
            permutation_agents: 3,
            ..Caps::default()
        };
        assert!(matches!(
            random_priority_profile(&ex1, &small),
            Err(Error::CapExceeded { .. })
        ));
    }
}
