use num_traits::{One, Zero};

use super::{demand, Condition, Equilibrium, PriceVector, Violation};
use crate::instance::{AssignmentMatrix, Instance};
use crate::rational::{self, Rational};

fn spend(ram: &AssignmentMatrix, p: &PriceVector, i: usize) -> Rational {
    let mut total = Rational::zero();
    for (k, z) in ram.rows()[i].iter().enumerate() {
        if !z.is_zero() {
            total += z * p.get(k);
        }
    }
    total
}

fn is_partial(z: &Rational) -> bool {
    z > &Rational::zero() && z < &Rational::one()
}

/// Checks every equilibrium condition exactly and reports the first one
/// that fails, with all of its witnesses.
pub fn cce_verify(
    inst: &Instance,
    ram: &AssignmentMatrix,
    p: &PriceVector,
) -> Result<Equilibrium, Violation> {
    let fail = |condition, agents: Vec<usize>, objects: Vec<usize>, detail: &str| Violation {
        condition,
        agents,
        objects,
        detail: detail.to_string(),
    };
    let (n, m) = (inst.n(), inst.m());

    if p.len() != m || ram.n() != n || ram.m() != m {
        return Err(fail(Condition::Feasibility, vec![], vec![], "dimension mismatch"));
    }
    if let Some(k) = (0..m).find(|&k| p.get(k) < &Rational::zero()) {
        return Err(fail(Condition::Feasibility, vec![], vec![k], "negative price"));
    }
    if let Err(e) = ram.check_feasible(inst) {
        return Err(fail(Condition::Feasibility, vec![], vec![], &e.to_string()));
    }

    let unsold: Vec<usize> = (0..m)
        .filter(|&k| {
            p.get(k) > &Rational::zero()
                && ram.column_sum(k) < rational::int(inst.effective_capacity(k) as i64)
        })
        .collect();
    if !unsold.is_empty() {
        return Err(fail(
            Condition::MarketClearing,
            vec![],
            unsold,
            "positive price but units left unsold",
        ));
    }

    let one = Rational::one();
    let spends: Vec<Rational> = (0..n).map(|i| spend(ram, p, i)).collect();
    let over: Vec<usize> = (0..n).filter(|&i| spends[i] > one).collect();
    if !over.is_empty() {
        return Err(fail(Condition::Affordability, over, vec![], "unaffordable bundle"));
    }

    let short: Vec<usize> = (0..n)
        .filter(|&i| ram.row_sum(i) != demand(inst, i, p).utility())
        .collect();
    if !short.is_empty() {
        return Err(fail(
            Condition::Optimality,
            short,
            vec![],
            "bundle smaller than the demanded quantity",
        ));
    }

    let partition = inst.partition_objects();
    let free: Vec<usize> = partition
        .over_demanded
        .iter()
        .copied()
        .filter(|&k| p.get(k).is_zero())
        .collect();
    if !free.is_empty() {
        return Err(fail(
            Condition::PositivePrice,
            vec![],
            free,
            "over-demanded object priced at zero",
        ));
    }

    let mut agents = Vec::new();
    let mut objects = Vec::new();
    for i in 0..n {
        let partial: Vec<usize> = (0..m).filter(|&k| is_partial(ram.get(i, k))).collect();
        if let Some(&k0) = partial.first() {
            let differing: Vec<usize> = partial
                .iter()
                .copied()
                .filter(|&k| p.get(k) != p.get(k0))
                .collect();
            if !differing.is_empty() {
                agents.push(i);
                objects.push(k0);
                objects.extend(differing);
            }
        }
    }
    if !agents.is_empty() {
        return Err(fail(
            Condition::EqualMarginalPrices,
            agents,
            objects,
            "partially bought objects with different prices",
        ));
    }

    for i in 0..n {
        for k in 0..m {
            if !inst.accepts(i, k) || ram.get(i, k) >= &one {
                continue;
            }
            for k2 in 0..m {
                if ram.get(i, k2) > &Rational::zero() && p.get(k) < p.get(k2) {
                    agents.push(i);
                    objects.push(k);
                    objects.push(k2);
                }
            }
        }
    }
    if !agents.is_empty() {
        return Err(fail(
            Condition::CheaperFirst,
            agents,
            objects,
            "a cheaper acceptable object is not fully bought",
        ));
    }

    let idle: Vec<usize> = (0..n)
        .filter(|&i| ram.row_sum(i) < rational::int(inst.row_size(i) as i64) && spends[i] != one)
        .collect();
    if !idle.is_empty() {
        return Err(fail(
            Condition::BudgetExhaustion,
            idle,
            vec![],
            "unsatiated agent with budget left",
        ));
    }

    Ok(Equilibrium {
        ram: ram.clone(),
        prices: p.clone(),
        certificate: Condition::ALL.to_vec(),
    })
}
