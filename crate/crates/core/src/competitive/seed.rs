//! Floating-point price adjustment used only to guess a pattern. Nothing
//! computed here is reported; the guess is re-solved exactly and verified.

use super::pattern::{Market, Pattern};
use crate::instance::Instance;

const ROUNDS: usize = 4000;
const TIE: f64 = 1e-4;

/// Units of each market object bought by agent `row` at prices `p`.
fn demand(row: &[usize], p: &[f64], out: &mut [f64]) {
    let mut order: Vec<usize> = row.to_vec();
    order.sort_by(|&a, &b| p[a].total_cmp(&p[b]));
    let mut budget = 1.0;
    let mut idx = 0;
    while idx < order.len() {
        let price = p[order[idx]];
        let mut end = idx;
        while end < order.len() && p[order[end]] - price <= TIE {
            end += 1;
        }
        let count = (end - idx) as f64;
        let cost = price * count;
        if cost <= budget {
            budget -= cost;
            for &k in &order[idx..end] {
                out[k] += 1.0;
            }
            idx = end;
        } else {
            let share = budget / price / count;
            for &k in &order[idx..end] {
                out[k] += share;
            }
            return;
        }
    }
}

pub(super) fn guess(inst: &Instance, market: &Market) -> Option<Pattern> {
    let m = market.len();
    let n = inst.n();
    if m == 0 {
        return Some(Pattern {
            level_of: Vec::new(),
            levels: 0,
            status: vec![None; n],
        });
    }
    let q: Vec<f64> = market.qeff.iter().map(|&v| v as f64).collect();
    let mut p: Vec<f64> = (0..m)
        .map(|k| market.acceptors[k].len() as f64 / (q[k] * m as f64))
        .collect();
    let mut units = vec![0.0; m];
    for round in 0..ROUNDS {
        units.iter_mut().for_each(|u| *u = 0.0);
        for row in &market.rows {
            demand(row, &p, &mut units);
        }
        let step = 0.5 / (1.0 + round as f64).sqrt();
        for k in 0..m {
            p[k] = (p[k] + step * (units[k] - q[k]) / q[k] * p[k].max(0.05)).max(0.0);
        }
    }

    // Group into levels.
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| p[a].total_cmp(&p[b]));
    let mut level_of = vec![0; m];
    let mut level = 0;
    for w in 0..m {
        if w > 0 && p[order[w]] - p[order[w - 1]] > 1e-3 {
            level += 1;
        }
        level_of[order[w]] = level;
    }
    let levels = level + 1;
    let mut price = vec![0.0; levels];
    let mut count = vec![0.0; levels];
    for k in 0..m {
        price[level_of[k]] += p[k];
        count[level_of[k]] += 1.0;
    }
    for c in 0..levels {
        price[c] /= count[c];
    }

    let status = market
        .rows
        .iter()
        .map(|row| {
            let mut by_level: Vec<usize> = row.iter().map(|&k| level_of[k]).collect();
            by_level.sort_unstable();
            let mut budget = 1.0 + 1e-9;
            for &c in &by_level {
                budget -= price[c];
                if budget < 0.0 {
                    return Some(c);
                }
            }
            None
        })
        .collect();
    Some(Pattern {
        level_of,
        levels,
        status,
    })
}
