use num_traits::{One, Zero};

use super::{cce_verify, PriceVector};
use crate::instance::{AssignmentMatrix, Instance};
use crate::lp::{LinearProgram, Relation};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SupportFailure {
    /// The assignment itself is not feasible for the instance.
    InvalidAssignment(String),
    /// No prices satisfy the equilibrium conditions; `conflict` is an
    /// irreducible subset of them.
    Infeasible { conflict: Vec<String> },
}

/// Coefficients, relation and right-hand side of one constraint.
type Row = (Vec<(usize, Rational)>, Relation, Rational);

struct Group {
    label: String,
    rows: Vec<Row>,
}

fn build(m: usize, groups: &[&Group]) -> LinearProgram {
    let mut lp = LinearProgram::new(m + 1);
    lp.add(vec![(m, Rational::one())], Relation::Le, Rational::one());
    for g in groups {
        for (coeffs, rel, rhs) in &g.rows {
            lp.add(coeffs.clone(), *rel, rhs.clone());
        }
    }
    lp
}

/// The best margin by which over-demanded prices can be kept positive, or
/// `None` when the constraints have no solution at all.
fn margin(m: usize, groups: &[&Group]) -> Option<(Rational, Vec<Rational>)> {
    let lp = build(m, groups);
    match lp.maximize(&[(m, Rational::one())]) {
        crate::lp::LpOutcome::Optimal { value, point } => Some((value, point)),
        _ => None,
    }
}

fn supported(m: usize, groups: &[&Group]) -> bool {
    matches!(margin(m, groups), Some((v, _)) if v > Rational::zero())
}

/// Prices under which `ram` is an equilibrium, found by solving the linear
/// conditions its support implies. When none exist, a minimal conflicting
/// subset of those conditions is returned.
pub fn supporting_prices(
    inst: &Instance,
    ram: &AssignmentMatrix,
) -> Result<PriceVector, SupportFailure> {
    if let Err(e) = ram.check_feasible(inst) {
        return Err(SupportFailure::InvalidAssignment(e.to_string()));
    }
    let (n, m) = (inst.n(), inst.m());
    let agent = |i: usize| inst.agents()[i].as_str();
    let object = |k: usize| inst.objects()[k].as_str();
    let one = Rational::one();
    let zero = Rational::zero();
    let mut groups = Vec::new();

    for i in 0..n {
        let row: Vec<(usize, Rational)> = (0..m)
            .filter(|&k| !ram.get(i, k).is_zero())
            .map(|k| (k, ram.get(i, k).clone()))
            .collect();
        let satiated = ram.row_sum(i) == rational::int(inst.row_size(i) as i64);
        if satiated {
            groups.push(Group {
                label: format!("{} spends at most 1", agent(i)),
                rows: vec![(row, Relation::Le, one.clone())],
            });
        } else {
            groups.push(Group {
                label: format!("{} is unsatiated and spends exactly 1", agent(i)),
                rows: vec![(row, Relation::Eq, one.clone())],
            });
        }

        let partial: Vec<usize> = (0..m)
            .filter(|&k| ram.get(i, k) > &zero && ram.get(i, k) < &one)
            .collect();
        for w in partial.windows(2) {
            groups.push(Group {
                label: format!(
                    "{} buys {} and {} partially, so their prices are equal",
                    agent(i),
                    object(w[0]),
                    object(w[1])
                ),
                rows: vec![(
                    vec![(w[0], one.clone()), (w[1], -one.clone())],
                    Relation::Eq,
                    zero.clone(),
                )],
            });
        }

        for k in (0..m).filter(|&k| inst.accepts(i, k) && ram.get(i, k) < &one) {
            for k2 in (0..m).filter(|&k2| k2 != k && ram.get(i, k2) > &zero) {
                groups.push(Group {
                    label: format!(
                        "{} buys some {} but not all of {}, so {} costs at least as much as {}",
                        agent(i),
                        object(k2),
                        object(k),
                        object(k),
                        object(k2)
                    ),
                    rows: vec![(
                        vec![(k, one.clone()), (k2, -one.clone())],
                        Relation::Ge,
                        zero.clone(),
                    )],
                });
            }
        }
    }

    let partition = inst.partition_objects();
    let mut sold_out = Vec::new();
    for k in 0..m {
        if ram.column_sum(k) < rational::int(inst.effective_capacity(k) as i64) {
            groups.push(Group {
                label: format!("{} is not sold out, so its price is 0", object(k)),
                rows: vec![(vec![(k, one.clone())], Relation::Eq, zero.clone())],
            });
        } else {
            sold_out.push(k);
        }
    }
    let base = groups.len();
    for &k in &partition.over_demanded {
        groups.push(Group {
            label: format!("{} is over-demanded, so its price is positive", object(k)),
            rows: vec![(
                vec![(k, one.clone()), (m, -one.clone())],
                Relation::Ge,
                zero.clone(),
            )],
        });
    }

    let all: Vec<&Group> = groups.iter().collect();
    match margin(m, &all) {
        Some((value, point)) if value > zero => {
            // Among supporting prices, keep the cheapest sold-out object as
            // dear as possible.
            let floor = Group {
                label: String::new(),
                rows: sold_out
                    .iter()
                    .map(|&k| (vec![(k, one.clone()), (m, -one.clone())], Relation::Ge, zero.clone()))
                    .collect(),
            };
            let mut lifted: Vec<&Group> = groups[..base].iter().collect();
            lifted.push(&floor);
            let point = match margin(m, &lifted) {
                Some((v, p)) if v > zero => p,
                _ => point,
            };
            let prices = PriceVector(point[..m].to_vec());
            debug_assert!(cce_verify(inst, ram, &prices).is_ok());
            Ok(prices)
        }
        _ => {
            // Deletion filter: drop every group whose removal keeps the
            // system unsupported.
            let mut keep: Vec<bool> = vec![true; groups.len()];
            for g in 0..groups.len() {
                keep[g] = false;
                let subset: Vec<&Group> = groups
                    .iter()
                    .zip(&keep)
                    .filter(|(_, &k)| k)
                    .map(|(g, _)| g)
                    .collect();
                if supported(m, &subset) {
                    keep[g] = true;
                }
            }
            Err(SupportFailure::Infeasible {
                conflict: groups
                    .iter()
                    .zip(&keep)
                    .filter(|(_, &k)| k)
                    .map(|(g, _)| g.label.clone())
                    .collect(),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::egalitarian::es;
    use crate::fixtures;
    use crate::rational::{int, ratio};

    #[test]
    fn ex1_es_ram() {
        let inst = fixtures::ex1();
        let p = supporting_prices(&inst, &es(&inst).ram).unwrap();
        assert_eq!(p.0, vec![ratio(4, 9); 3]);
    }

    #[test]
    fn ex2_es_ram_has_no_prices() {
        let inst = fixtures::ex2();
        match supporting_prices(&inst, &es(&inst).ram) {
            Err(SupportFailure::Infeasible { conflict }) => {
                assert!(!conflict.is_empty());
                assert!(conflict.iter().any(|c| c.contains("spends")));
                assert!(conflict.iter().any(|c| c.contains("costs at least as much")));
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn ex2_market_ram() {
        let inst = fixtures::ex2();
        let abc = vec![int(1), ratio(36, 37), int(0), int(0), int(0), int(0)];
        let d = vec![int(0), ratio(20, 37), int(1), int(1), int(0), int(0)];
        let e = vec![int(0), ratio(20, 37), int(0), int(0), int(1), int(1)];
        let f = vec![ratio(1, 4), int(0), ratio(3, 4), ratio(3, 4), ratio(3, 4), ratio(3, 4)];
        let ram = AssignmentMatrix::from_rows(vec![
            abc.clone(),
            abc.clone(),
            abc,
            d,
            e,
            f.clone(),
            f.clone(),
            f.clone(),
            f,
        ]);
        let p = supporting_prices(&inst, &ram).unwrap();
        let q = ratio(4, 13);
        assert_eq!(
            p.0,
            vec![q.clone(), ratio(37, 52), q.clone(), q.clone(), q.clone(), q]
        );
    }

    #[test]
    fn invalid_assignment() {
        let inst = fixtures::ex4();
        let ram = AssignmentMatrix::from_rows(vec![vec![int(1)]; 5]);
        assert!(matches!(
            supporting_prices(&inst, &ram),
            Err(SupportFailure::InvalidAssignment(_))
        ));
    }
}
