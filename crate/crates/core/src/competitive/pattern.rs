//! Equilibrium search by consumption pattern.
//!
//! A pattern fixes an ordering of the sold objects into price levels
//! `L_0 < L_1 < ...` and, for every agent, either "satiated" (buys all it
//! accepts) or a marginal level `c` (buys every cheaper acceptable object
//! fully, spends the rest of its budget inside `L_c`, nothing above). With
//! the pattern fixed, the equilibria it describes are the solutions of a
//! linear system in the level prices `π_c` and the marginal spendings
//! `w_ik = π_c z_ik`. Every equilibrium belongs to some pattern.
//!
//! Utilities are linear-fractional in these variables, so their extremes
//! are found by the Charnes–Cooper transformation.

use std::ops::ControlFlow;

use num_traits::{One, Zero};
use serde::Serialize;

use super::{cce_verify, seed, Equilibrium, PriceVector};
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::instance::{AssignmentMatrix, Instance};
use crate::lp::{LinearProgram, LpOutcome, Relation};
use crate::rational::{self, Rational};

/// Objects with positive effective capacity.
#[derive(Debug, Clone)]
pub(super) struct Market {
    pub objects: Vec<usize>,
    pub qeff: Vec<u64>,
    pub acceptors: Vec<Vec<usize>>,
    /// Per agent, market positions it accepts.
    pub rows: Vec<Vec<usize>>,
}

impl Market {
    pub fn new(inst: &Instance) -> Self {
        let objects: Vec<usize> = (0..inst.m())
            .filter(|&k| inst.effective_capacity(k) > 0)
            .collect();
        let qeff = objects.iter().map(|&k| inst.effective_capacity(k)).collect();
        let acceptors = objects
            .iter()
            .map(|&k| (0..inst.n()).filter(|&i| inst.accepts(i, k)).collect())
            .collect();
        let rows = (0..inst.n())
            .map(|i| {
                objects
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| inst.accepts(i, k))
                    .map(|(pos, _)| pos)
                    .collect()
            })
            .collect();
        Market {
            objects,
            qeff,
            acceptors,
            rows,
        }
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(super) struct Pattern {
    pub level_of: Vec<usize>,
    pub levels: usize,
    /// `None` for satiated agents, otherwise the marginal level.
    pub status: Vec<Option<usize>>,
}

/// The linear system of one pattern over `[π_0 .. π_{T-1}, w ...]`.
#[derive(Debug, Clone)]
struct PatternLp {
    lp: LinearProgram,
    /// Per agent: (market position, variable) of its marginal spendings.
    w: Vec<Vec<(usize, usize)>>,
    /// Per agent: number of acceptable objects strictly below its level.
    cheaper: Vec<usize>,
}

impl PatternLp {
    fn build(market: &Market, pat: &Pattern) -> Self {
        let t = pat.levels;
        let mut lp = LinearProgram::new(t);
        let one = Rational::one();
        let zero = Rational::zero();
        for c in 0..t.saturating_sub(1) {
            lp.add_int(&[(c, 1), (c + 1, -1)], Relation::Le, 0);
        }
        let n = market.rows.len();
        let mut w = vec![Vec::new(); n];
        let mut cheaper = vec![0; n];
        for i in 0..n {
            let row = &market.rows[i];
            if row.is_empty() {
                continue;
            }
            let mut per_level = vec![0i64; t];
            match pat.status[i] {
                None => {
                    for &k in row {
                        per_level[pat.level_of[k]] += 1;
                    }
                    let coeffs: Vec<(usize, i64)> = per_level
                        .iter()
                        .enumerate()
                        .filter(|(_, &v)| v > 0)
                        .map(|(c, &v)| (c, v))
                        .collect();
                    lp.add_int(&coeffs, Relation::Le, 1);
                }
                Some(c) => {
                    for &k in row {
                        let l = pat.level_of[k];
                        if l < c {
                            per_level[l] += 1;
                            cheaper[i] += 1;
                        } else if l == c {
                            let v = lp.add_var();
                            w[i].push((k, v));
                        }
                    }
                    let mut coeffs: Vec<(usize, Rational)> = per_level
                        .iter()
                        .enumerate()
                        .filter(|(_, &v)| v > 0)
                        .map(|(l, &v)| (l, rational::int(v)))
                        .collect();
                    coeffs.extend(w[i].iter().map(|&(_, v)| (v, one.clone())));
                    lp.add(coeffs, Relation::Eq, one.clone());
                    for &(_, v) in &w[i] {
                        lp.add(vec![(v, one.clone()), (c, -one.clone())], Relation::Le, zero.clone());
                    }
                }
            }
        }
        for k in 0..market.len() {
            let c = pat.level_of[k];
            let above = market.acceptors[k]
                .iter()
                .filter(|&&i| pat.status[i].is_none_or(|s| s > c))
                .count() as i64;
            let rest = market.qeff[k] as i64 - above;
            let mut coeffs: Vec<(usize, Rational)> = Vec::new();
            for &i in &market.acceptors[k] {
                if pat.status[i] == Some(c) {
                    let v = w[i].iter().find(|&&(pos, _)| pos == k).expect("marginal var").1;
                    coeffs.push((v, one.clone()));
                }
            }
            if rest != 0 {
                coeffs.push((c, rational::int(-rest)));
            }
            if !coeffs.is_empty() {
                lp.add(coeffs, Relation::Eq, zero.clone());
            }
        }
        PatternLp { lp, w, cheaper }
    }

    /// Linear-fractional objective `u_j` in Charnes–Cooper form: the
    /// homogenized system with `π_c = 1`, plus the index of the scale.
    fn homogenized(&self, base: &LinearProgram, level: usize) -> (LinearProgram, usize) {
        let mut h = LinearProgram::new(base.num_vars() + 1);
        let t = base.num_vars();
        for c in base.constraints() {
            let mut coeffs = c.coeffs.clone();
            if !c.rhs.is_zero() {
                coeffs.push((t, -c.rhs.clone()));
            }
            h.add(coeffs, c.relation, Rational::zero());
        }
        h.add(vec![(level, Rational::one())], Relation::Eq, Rational::one());
        (h, t)
    }

    /// Extreme utility of agent `j` within `base` (this pattern's system,
    /// possibly with extra homogeneous rows). Returns value and the
    /// attaining point in the original variables.
    fn extreme_utility(
        &self,
        base: &LinearProgram,
        pat: &Pattern,
        market: &Market,
        j: usize,
        maximize: bool,
    ) -> Option<(Rational, Vec<Rational>)> {
        match pat.status[j] {
            None => {
                let point = base.feasible_point()?;
                Some((rational::int(market.rows[j].len() as i64), point))
            }
            Some(c) => {
                let (h, t) = self.homogenized(base, c);
                let objective: Vec<(usize, Rational)> =
                    self.w[j].iter().map(|&(_, v)| (v, Rational::one())).collect();
                let out = if maximize {
                    h.maximize(&objective)
                } else {
                    h.minimize(&objective)
                };
                let LpOutcome::Optimal { value, point } = out else {
                    return None;
                };
                let scale = point[t].clone();
                if scale.is_zero() {
                    debug_assert!(false, "pattern system is bounded");
                    return None;
                }
                let x = point[..t].iter().map(|v| v / &scale).collect();
                Some((rational::int(self.cheaper[j] as i64) + value, x))
            }
        }
    }
}

/// Some object has more full buyers than units. The guessed pattern can be
/// like this; enumerated ones never are.
fn overfull(market: &Market, pat: &Pattern) -> bool {
    (0..market.len()).any(|k| {
        let c = pat.level_of[k];
        let above = market.acceptors[k]
            .iter()
            .filter(|&&i| pat.status[i].is_none_or(|s| s > c))
            .count() as u64;
        above > market.qeff[k]
    })
}

fn reconstruct(
    inst: &Instance,
    market: &Market,
    pat: &Pattern,
    plp: &PatternLp,
    x: &[Rational],
) -> (AssignmentMatrix, PriceVector) {
    let mut prices = PriceVector::zeros(inst.m());
    for (pos, &k) in market.objects.iter().enumerate() {
        prices.0[k] = x[pat.level_of[pos]].clone();
    }
    let mut ram = AssignmentMatrix::zeros(inst.n(), inst.m());
    for i in 0..inst.n() {
        for &pos in &market.rows[i] {
            let k = market.objects[pos];
            let l = pat.level_of[pos];
            match pat.status[i] {
                None => ram.set(i, k, Rational::one()),
                Some(c) if l < c => ram.set(i, k, Rational::one()),
                Some(c) if l == c => {
                    let v = plp.w[i].iter().find(|&&(p, _)| p == pos).expect("marginal var").1;
                    ram.set(i, k, &x[v] / &x[c]);
                }
                _ => {}
            }
        }
    }
    (ram, prices)
}

fn equilibrium_at(
    inst: &Instance,
    market: &Market,
    pat: &Pattern,
    plp: &PatternLp,
    x: &[Rational],
) -> Option<Equilibrium> {
    let (ram, prices) = reconstruct(inst, market, pat, plp, x);
    match cce_verify(inst, &ram, &prices) {
        Ok(eq) => Some(eq),
        Err(v) => {
            debug_assert!(false, "pattern point failed verification: {v:?}");
            None
        }
    }
}

/// All maps from objects onto exactly `t` levels, for `t = 1, 2, ...`.
fn level_orderings(m: usize) -> Vec<Vec<usize>> {
    fn rec(pos: usize, t: usize, cur: &mut Vec<usize>, used: &mut Vec<u32>, out: &mut Vec<Vec<usize>>) {
        let m = cur.len();
        if pos == m {
            if used.iter().all(|&u| u > 0) {
                out.push(cur.clone());
            }
            return;
        }
        let missing = used.iter().filter(|&&u| u == 0).count();
        if missing > m - pos {
            return;
        }
        for l in 0..t {
            cur[pos] = l;
            used[l] += 1;
            rec(pos + 1, t, cur, used, out);
            used[l] -= 1;
        }
    }
    let mut out = Vec::new();
    if m == 0 {
        out.push(Vec::new());
        return out;
    }
    for t in 1..=m {
        let mut cur = vec![0; m];
        let mut used = vec![0u32; t];
        rec(0, t, &mut cur, &mut used, &mut out);
    }
    out
}

/// Per-agent utility bounds a pattern must be able to meet.
#[derive(Debug, Clone, Default)]
struct Bounds {
    floor: Vec<Option<Rational>>,
    ceiling: Vec<Option<Rational>>,
}

impl Bounds {
    fn none(n: usize) -> Self {
        Bounds {
            floor: vec![None; n],
            ceiling: vec![None; n],
        }
    }

    /// Whether utilities in `[lo, hi]` can meet agent `i`'s bounds.
    fn admits(&self, i: usize, lo: usize, hi: usize) -> bool {
        let ok_floor = self.floor[i]
            .as_ref()
            .is_none_or(|f| rational::int(hi as i64) >= *f);
        let ok_ceiling = self.ceiling[i]
            .as_ref()
            .is_none_or(|c| rational::int(lo as i64) <= *c);
        ok_floor && ok_ceiling
    }
}

struct Search<'a> {
    market: &'a Market,
    level_of: &'a [usize],
    levels: usize,
    bounds: &'a Bounds,
    status: Vec<Option<usize>>,
    above: Vec<u64>,
    at: Vec<u64>,
    open: Vec<u64>,
}

impl Search<'_> {
    fn consistent(&self, row: &[usize]) -> bool {
        row.iter().all(|&k| {
            let q = self.market.qeff[k];
            self.above[k] <= q && self.above[k] + self.at[k] + self.open[k] >= q
        })
    }

    fn apply(&mut self, i: usize, s: Option<usize>, sign: i64) {
        for &k in &self.market.rows[i] {
            let l = self.level_of[k];
            let step = |v: &mut u64| {
                if sign > 0 {
                    *v += 1
                } else {
                    *v -= 1
                }
            };
            if sign > 0 {
                self.open[k] -= 1;
            } else {
                self.open[k] += 1;
            }
            match s {
                None => step(&mut self.above[k]),
                Some(c) if c > l => step(&mut self.above[k]),
                Some(c) if c == l => step(&mut self.at[k]),
                _ => {}
            }
        }
    }

    fn dfs(&mut self, i: usize, visit: &mut dyn FnMut(&Pattern) -> ControlFlow<()>) -> ControlFlow<()> {
        let n = self.status.len();
        if i == n {
            let pat = Pattern {
                level_of: self.level_of.to_vec(),
                levels: self.levels,
                status: self.status.clone(),
            };
            return visit(&pat);
        }
        let row = self.market.rows[i].clone();
        let mut options: Vec<Option<usize>> = Vec::new();
        if self.bounds.admits(i, row.len(), row.len()) {
            options.push(None);
        }
        let mut lv: Vec<usize> = row.iter().map(|&k| self.level_of[k]).collect();
        lv.sort_unstable();
        lv.dedup();
        for c in lv {
            let cheaper = row.iter().filter(|&&k| self.level_of[k] < c).count();
            let at = row.iter().filter(|&&k| self.level_of[k] == c).count();
            if self.bounds.admits(i, cheaper, cheaper + at) {
                options.push(Some(c));
            }
        }
        for s in options {
            self.status[i] = s;
            self.apply(i, s, 1);
            if self.consistent(&row) {
                self.dfs(i + 1, visit)?;
            }
            self.apply(i, s, -1);
        }
        self.status[i] = None;
        ControlFlow::Continue(())
    }
}

/// Calls `visit` on every combinatorially consistent pattern whose price
/// levels respect `orbits` (objects in one orbit share a level) and whose
/// statuses can meet `bounds`.
fn for_each_pattern(
    market: &Market,
    n: usize,
    orbits: Option<&[usize]>,
    bounds: &Bounds,
    mut visit: impl FnMut(&Pattern) -> ControlFlow<()>,
) -> ControlFlow<()> {
    for level_of in level_orderings(market.len()) {
        if let Some(orbit) = orbits {
            let split = (0..market.len()).any(|a| {
                (0..market.len()).any(|b| orbit[a] == orbit[b] && level_of[a] != level_of[b])
            });
            if split {
                continue;
            }
        }
        let levels = level_of.iter().copied().max().map_or(0, |l| l + 1);
        let mut search = Search {
            market,
            level_of: &level_of,
            levels,
            bounds,
            status: vec![None; n],
            above: vec![0; market.len()],
            at: vec![0; market.len()],
            open: market.acceptors.iter().map(|a| a.len() as u64).collect(),
        };
        search.dfs(0, &mut visit)?;
    }
    ControlFlow::Continue(())
}

fn check_market_cap(market: &Market, caps: &Caps) -> Result<()> {
    if market.len() > caps.market_objects {
        return Err(Error::cap(
            "equilibrium search (objects with positive capacity)",
            market.len() as u128,
            caps.market_objects as u128,
        ));
    }
    Ok(())
}

/// Which equilibria a search ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scope {
    /// Every equilibrium.
    #[default]
    All,
    /// Equilibria whose prices are invariant under every symmetry of the
    /// instance: objects that some relabelling of agents and objects maps
    /// onto each other have equal prices.
    SymmetricPrices,
}

/// Orbit index of every market object under the permutations of market
/// objects that preserve capacities and the multiset of acceptable sets.
fn object_orbits(market: &Market) -> Vec<usize> {
    let m = market.len();
    let mask = |row: &[usize], perm: &[usize]| row.iter().fold(0u64, |acc, &k| acc | 1 << perm[k]);
    let identity: Vec<usize> = (0..m).collect();
    let mut rows: Vec<u64> = market.rows.iter().map(|r| mask(r, &identity)).collect();
    rows.sort_unstable();

    let mut parent: Vec<usize> = (0..m).collect();
    fn root(parent: &mut [usize], k: usize) -> usize {
        let mut r = k;
        while parent[r] != r {
            r = parent[r];
        }
        parent[k] = r;
        r
    }
    fn rec(
        pos: usize,
        perm: &mut Vec<usize>,
        used: &mut Vec<bool>,
        market: &Market,
        check: &mut dyn FnMut(&[usize]),
    ) {
        let m = market.len();
        if pos == m {
            check(perm);
            return;
        }
        for k in 0..m {
            if used[k]
                || market.qeff[k] != market.qeff[pos]
                || market.acceptors[k].len() != market.acceptors[pos].len()
            {
                continue;
            }
            used[k] = true;
            perm.push(k);
            rec(pos + 1, perm, used, market, check);
            perm.pop();
            used[k] = false;
        }
    }
    let mut check = |perm: &[usize]| {
        let mut mapped: Vec<u64> = market.rows.iter().map(|r| mask(r, perm)).collect();
        mapped.sort_unstable();
        if mapped == rows {
            for k in 0..m {
                let (a, b) = (root(&mut parent, k), root(&mut parent, perm[k]));
                parent[a] = b;
            }
        }
    };
    rec(0, &mut Vec::new(), &mut vec![false; m], market, &mut check);
    (0..m).map(|k| root(&mut parent, k)).collect()
}

/// Runs `visit` over the patterns of `scope` that can meet `bounds`,
/// counting them against the pattern cap. Returns the number examined.
fn scan(
    market: &Market,
    n: usize,
    caps: &Caps,
    scope: Scope,
    bounds: &Bounds,
    mut visit: impl FnMut(&Pattern) -> ControlFlow<()>,
) -> Result<u64> {
    check_market_cap(market, caps)?;
    let orbits = match scope {
        Scope::All => None,
        Scope::SymmetricPrices => Some(object_orbits(market)),
    };
    let mut examined = 0u64;
    let mut over = false;
    let _ = for_each_pattern(market, n, orbits.as_deref(), bounds, |pat| {
        examined += 1;
        if examined > caps.market_patterns {
            over = true;
            return ControlFlow::Break(());
        }
        visit(pat)
    });
    if over {
        return Err(Error::cap(
            "equilibrium search (patterns)",
            examined as u128,
            caps.market_patterns as u128,
        ));
    }
    Ok(examined)
}

#[derive(Debug, Clone)]
struct Feasible {
    pattern: Pattern,
    plp: PatternLp,
    point: Vec<Rational>,
}

/// Every equilibrium pattern of an instance with a feasible linear system.
#[derive(Debug, Clone)]
pub struct EquilibriumSet {
    inst: Instance,
    market: Market,
    feasible: Vec<Feasible>,
    examined: u64,
}

/// Enumerates all patterns in `scope` and keeps those with solutions.
pub fn equilibrium_set(inst: &Instance, caps: &Caps, scope: Scope) -> Result<EquilibriumSet> {
    let market = Market::new(inst);
    let mut feasible = Vec::new();
    let examined = scan(&market, inst.n(), caps, scope, &Bounds::none(inst.n()), |pat| {
        let plp = PatternLp::build(&market, pat);
        if let Some(point) = plp.lp.feasible_point() {
            feasible.push(Feasible {
                pattern: pat.clone(),
                plp,
                point,
            });
        }
        ControlFlow::Continue(())
    })?;
    Ok(EquilibriumSet {
        inst: inst.clone(),
        market,
        feasible,
        examined,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Interval {
    pub lo: String,
    pub hi: String,
    #[serde(skip)]
    pub lo_value: Rational,
    #[serde(skip)]
    pub hi_value: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        Interval {
            lo: rational::format(&lo),
            hi: rational::format(&hi),
            lo_value: lo,
            hi_value: hi,
        }
    }

    pub fn point(v: Rational) -> Self {
        Interval::new(v.clone(), v)
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo_value == self.hi_value
    }

    pub fn contains(&self, v: &Rational) -> bool {
        &self.lo_value <= v && v <= &self.hi_value
    }

    fn widen(&mut self, lo: &Rational, hi: &Rational) {
        if lo < &self.lo_value {
            *self = Interval::new(lo.clone(), self.hi_value.clone());
        }
        if hi > &self.hi_value {
            *self = Interval::new(self.lo_value.clone(), hi.clone());
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Extreme {
    Min,
    Max,
}

/// A price that varies while no agent spends at the margin on it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeParameter {
    pub object: usize,
    pub interval: Interval,
}

#[derive(Debug, Clone)]
pub struct RangeReport {
    pub agents: Vec<Interval>,
    pub prices: Vec<Interval>,
    pub free_parameters: Vec<FreeParameter>,
    /// For every agent and both ends, a verified equilibrium attaining it.
    pub attaining: Vec<(usize, Extreme, Equilibrium)>,
    pub patterns_examined: u64,
    pub patterns_feasible: usize,
}

impl EquilibriumSet {
    pub fn is_empty(&self) -> bool {
        self.feasible.is_empty()
    }

    pub fn patterns_examined(&self) -> u64 {
        self.examined
    }

    pub fn patterns_feasible(&self) -> usize {
        self.feasible.len()
    }

    pub fn instance(&self) -> &Instance {
        &self.inst
    }

    /// One verified equilibrium per feasible pattern.
    pub fn sample_equilibria(&self) -> Vec<Equilibrium> {
        self.feasible
            .iter()
            .filter_map(|f| equilibrium_at(&self.inst, &self.market, &f.pattern, &f.plp, &f.point))
            .collect()
    }

    pub fn range(&self) -> Result<RangeReport> {
        if self.feasible.is_empty() {
            return Err(Error::Unsolved(format!(
                "no equilibrium among {} patterns",
                self.examined
            )));
        }
        let n = self.inst.n();
        let m = self.inst.m();
        let mut lo: Vec<Option<(Rational, Equilibrium)>> = vec![None; n];
        let mut hi: Vec<Option<(Rational, Equilibrium)>> = vec![None; n];
        let mut prices: Vec<Option<Interval>> = vec![None; m];
        let mut free: Vec<Option<Interval>> = vec![None; m];

        for f in &self.feasible {
            for j in 0..n {
                for (maximize, slot) in [(false, &mut lo[j]), (true, &mut hi[j])] {
                    let Some((value, x)) =
                        f.plp.extreme_utility(&f.plp.lp, &f.pattern, &self.market, j, maximize)
                    else {
                        continue;
                    };
                    let better = match slot {
                        None => true,
                        Some((v, _)) => {
                            if maximize {
                                value > *v
                            } else {
                                value < *v
                            }
                        }
                    };
                    if better {
                        if let Some(eq) =
                            equilibrium_at(&self.inst, &self.market, &f.pattern, &f.plp, &x)
                        {
                            *slot = Some((value, eq));
                        }
                    }
                }
            }
            let busy: Vec<bool> = (0..f.pattern.levels)
                .map(|c| f.pattern.status.contains(&Some(c)))
                .collect();
            for c in 0..f.pattern.levels {
                let objective = [(c, Rational::one())];
                let (Some(a), Some(b)) = (
                    f.plp.lp.minimize(&objective).value().cloned(),
                    f.plp.lp.maximize(&objective).value().cloned(),
                ) else {
                    continue;
                };
                for (pos, &k) in self.market.objects.iter().enumerate() {
                    if f.pattern.level_of[pos] != c {
                        continue;
                    }
                    match &mut prices[k] {
                        Some(iv) => iv.widen(&a, &b),
                        slot => *slot = Some(Interval::new(a.clone(), b.clone())),
                    }
                    if !busy[c] && a != b {
                        match &mut free[k] {
                            Some(iv) => iv.widen(&a, &b),
                            slot => *slot = Some(Interval::new(a.clone(), b.clone())),
                        }
                    }
                }
            }
        }

        let mut agents = Vec::with_capacity(n);
        let mut attaining = Vec::new();
        for j in 0..n {
            let (Some((a, ea)), Some((b, eb))) = (lo[j].take(), hi[j].take()) else {
                return Err(Error::Unsolved(format!(
                    "utility extremes of agent {} not attained",
                    self.inst.agents()[j]
                )));
            };
            agents.push(Interval::new(a, b));
            attaining.push((j, Extreme::Min, ea));
            attaining.push((j, Extreme::Max, eb));
        }
        Ok(RangeReport {
            agents,
            prices: prices
                .into_iter()
                .map(|p| p.unwrap_or_else(|| Interval::point(Rational::zero())))
                .collect(),
            free_parameters: free
                .into_iter()
                .enumerate()
                .filter_map(|(k, iv)| iv.map(|interval| FreeParameter { object: k, interval }))
                .collect(),
            attaining,
            patterns_examined: self.examined,
            patterns_feasible: self.feasible.len(),
        })
    }
}

/// Searches for an equilibrium in `scope` in which every `(agent, bound)`
/// member gets at least its bound (`Extreme::Max`) or at most it
/// (`Extreme::Min`), with strict inequality for some member.
pub fn cce_bounded(
    inst: &Instance,
    caps: &Caps,
    scope: Scope,
    members: &[(usize, Rational)],
    direction: Extreme,
) -> Result<Option<Equilibrium>> {
    let market = Market::new(inst);
    let mut bounds = Bounds::none(inst.n());
    for (i, b) in members {
        match direction {
            Extreme::Max => bounds.floor[*i] = Some(b.clone()),
            Extreme::Min => bounds.ceiling[*i] = Some(b.clone()),
        }
    }
    let maximize = direction == Extreme::Max;
    let mut found = None;
    scan(&market, inst.n(), caps, scope, &bounds, |pat| {
        let plp = PatternLp::build(&market, pat);
        let mut base = plp.lp.clone();
        for (i, b) in members {
            if let Some(c) = pat.status[*i] {
                // cheaper + Σw/π_c against the bound, times π_c > 0.
                let mut coeffs: Vec<(usize, Rational)> =
                    plp.w[*i].iter().map(|&(_, v)| (v, Rational::one())).collect();
                coeffs.push((c, rational::int(plp.cheaper[*i] as i64) - b));
                let rel = if maximize { Relation::Ge } else { Relation::Le };
                base.add(coeffs, rel, Rational::zero());
            }
        }
        if !base.is_feasible() {
            return ControlFlow::Continue(());
        }
        for (j, b) in members {
            let Some((value, x)) = plp.extreme_utility(&base, pat, &market, *j, maximize) else {
                continue;
            };
            let strict = if maximize { value > *b } else { value < *b };
            if strict {
                found = equilibrium_at(inst, &market, pat, &plp, &x);
                if found.is_some() {
                    return ControlFlow::Break(());
                }
            }
        }
        ControlFlow::Continue(())
    })?;
    Ok(found)
}

/// Some verified equilibrium. A numerical price adjustment proposes a
/// pattern first; exhaustive pattern search follows if it fails.
pub fn cce_find(inst: &Instance, caps: &Caps) -> Result<Equilibrium> {
    let market = Market::new(inst);
    check_market_cap(&market, caps)?;
    if let Some(pat) = seed::guess(inst, &market).filter(|p| !overfull(&market, p)) {
        let plp = PatternLp::build(&market, &pat);
        if let Some(x) = plp.lp.feasible_point() {
            if let Some(eq) = equilibrium_at(inst, &market, &pat, &plp, &x) {
                return Ok(eq);
            }
        }
    }
    let mut found = None;
    let examined = scan(&market, inst.n(), caps, Scope::All, &Bounds::none(inst.n()), |pat| {
        let plp = PatternLp::build(&market, pat);
        if let Some(x) = plp.lp.feasible_point() {
            found = equilibrium_at(inst, &market, pat, &plp, &x);
            if found.is_some() {
                return ControlFlow::Break(());
            }
        }
        ControlFlow::Continue(())
    })?;
    found.ok_or_else(|| Error::Unsolved(format!("no equilibrium among {examined} patterns")))
}

/// Equilibrium utility intervals over `scope`, with attaining equilibria
/// and the free price parameters.
pub fn cce_utility_range(inst: &Instance, caps: &Caps, scope: Scope) -> Result<RangeReport> {
    equilibrium_set(inst, caps, scope)?.range()
}

/// An equilibrium in which every perfect object is free and fully taken by
/// its acceptors: the over-demanded sub-market is solved on its own and
/// the perfect objects are added at price zero.
pub fn cce_ipo_selection(inst: &Instance, caps: &Caps) -> Result<Equilibrium> {
    let partition = inst.partition_objects();
    let (mut ram, mut prices) = (
        AssignmentMatrix::zeros(inst.n(), inst.m()),
        PriceVector::zeros(inst.m()),
    );
    if !partition.over_demanded.is_empty() {
        let sub = inst.restrict_objects(&partition.over_demanded)?;
        let eq = cce_find(&sub, caps)?;
        for (pos, &k) in partition.over_demanded.iter().enumerate() {
            prices.0[k] = eq.prices.get(pos).clone();
            for i in 0..inst.n() {
                ram.set(i, k, eq.ram.get(i, pos).clone());
            }
        }
    }
    for &k in &partition.perfect {
        for i in 0..inst.n() {
            if inst.accepts(i, k) {
                ram.set(i, k, Rational::one());
            }
        }
    }
    cce_verify(inst, &ram, &prices).map_err(|v| {
        Error::Unsolved(format!("selection failed verification: {}", v.describe(inst)))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::{int, ratio};

    fn iv(report: &RangeReport, i: usize) -> (Rational, Rational) {
        (report.agents[i].lo_value.clone(), report.agents[i].hi_value.clone())
    }

    #[test]
    fn orderings_count() {
        // Ordered Bell numbers.
        assert_eq!(level_orderings(1).len(), 1);
        assert_eq!(level_orderings(3).len(), 13);
        assert_eq!(level_orderings(4).len(), 75);
    }

    #[test]
    fn ex1_range() {
        let r = cce_utility_range(&fixtures::ex1(), &Caps::default(), Scope::All).unwrap();
        for i in 0..4 {
            assert_eq!(iv(&r, i), (ratio(9, 4), ratio(12, 5)));
        }
        assert_eq!(iv(&r, 4), (ratio(7, 5), int(2)));
        assert_eq!(iv(&r, 5), (int(1), int(1)));
        assert_eq!(r.free_parameters.len(), 1);
        assert_eq!(r.free_parameters[0].object, 2);
        assert_eq!(r.free_parameters[0].interval, Interval::new(int(0), ratio(4, 9)));
        for (_, _, eq) in &r.attaining {
            assert!(cce_verify(&fixtures::ex1(), &eq.ram, &eq.prices).is_ok());
        }
    }

    #[test]
    fn orbits() {
        for inst in [fixtures::ex3(), fixtures::ex3_misreport()] {
            let o = object_orbits(&Market::new(&inst));
            assert_ne!(o[0], o[1]);
            assert_eq!(o[1], o[2]);
            assert_eq!(o[2], o[3]);
        }
        let o = object_orbits(&Market::new(&fixtures::ex1()));
        assert_eq!(o, vec![0, 1, 2]);
    }

    #[test]
    fn ex3_unique() {
        let r = cce_utility_range(&fixtures::ex3(), &Caps::default(), Scope::All).unwrap();
        for i in 0..6 {
            assert_eq!(iv(&r, i), (ratio(5, 2), ratio(5, 2)));
        }
        assert_eq!(iv(&r, 6), (int(1), int(1)));
        assert!(r.prices.iter().all(|p| p == &Interval::point(ratio(2, 5))));
    }

    #[test]
    fn ex3_misreport_ranges() {
        let caps = Caps::default();
        let inst = fixtures::ex3_misreport();
        let all = cce_utility_range(&inst, &caps, Scope::All).unwrap();
        for i in 0..6 {
            assert_eq!(iv(&all, i), (int(2), int(3)));
        }
        assert_eq!(iv(&all, 6), (ratio(4, 7), int(1)));
        let sym = cce_utility_range(&inst, &caps, Scope::SymmetricPrices).unwrap();
        for i in 0..6 {
            assert_eq!(iv(&sym, i), (ratio(5, 2), ratio(18, 7)));
        }
        assert_eq!(iv(&sym, 6), (ratio(4, 7), int(1)));
        for (_, _, eq) in all.attaining.iter().chain(&sym.attaining) {
            assert!(cce_verify(&inst, &eq.ram, &eq.prices).is_ok());
        }
    }

    #[test]
    fn asymmetric_misreport_equilibrium() {
        let inst = fixtures::ex3_misreport();
        let (o, z, q) = (int(1), int(0), ratio(3, 4));
        let ad = vec![z.clone(), z.clone(), o.clone(), o.clone()];
        let be = vec![q.clone(), o.clone(), z.clone(), o.clone()];
        let cf = vec![q.clone(), o.clone(), o.clone(), z.clone()];
        let g = vec![o, z.clone(), z.clone(), z];
        let ram = AssignmentMatrix::from_rows(vec![
            ad.clone(),
            be.clone(),
            cf.clone(),
            ad,
            be,
            cf,
            g,
        ]);
        let p = PriceVector(vec![ratio(2, 3), int(0), ratio(1, 2), ratio(1, 2)]);
        let eq = cce_verify(&inst, &ram, &p).unwrap();
        assert_eq!(eq.utilities()[0], int(2));
        assert_eq!(eq.utilities()[1], ratio(11, 4));
    }

    #[test]
    fn find_small_markets() {
        let caps = Caps::default();
        let eq = cce_find(&fixtures::ex4(), &caps).unwrap();
        assert_eq!(eq.prices.0, vec![ratio(5, 4)]);
        assert_eq!(eq.utilities().0, vec![ratio(4, 5); 5]);
        let eq = cce_find(&fixtures::ex3(), &caps).unwrap();
        assert_eq!(
            eq.utilities().0,
            vec![ratio(5, 2), ratio(5, 2), ratio(5, 2), ratio(5, 2), ratio(5, 2), ratio(5, 2), int(1)]
        );
        let eq = cce_find(&fixtures::ex2(), &caps).unwrap();
        assert!(cce_verify(&fixtures::ex2(), &eq.ram, &eq.prices).is_ok());
    }

    #[test]
    fn ipo_selection() {
        let caps = Caps::default();
        let eq = cce_ipo_selection(&fixtures::ex4_extended(), &caps).unwrap();
        assert_eq!(
            eq.utilities().0,
            vec![ratio(9, 5), ratio(9, 5), ratio(9, 5), ratio(9, 5), ratio(4, 5)]
        );
        let eq = cce_ipo_selection(&fixtures::ex1(), &caps).unwrap();
        assert_eq!(eq.prices.get(2), &int(0));
        assert_eq!(
            eq.utilities().0,
            vec![ratio(12, 5), ratio(12, 5), ratio(12, 5), ratio(12, 5), ratio(7, 5), int(1)]
        );
    }

    #[test]
    fn bounded_search_on_misreport() {
        let caps = Caps::default();
        let inst = fixtures::ex3_misreport();
        let floors: Vec<(usize, Rational)> = (0..3).map(|i| (i, ratio(5, 2))).collect();
        let eq = cce_bounded(&inst, &caps, Scope::All, &floors, Extreme::Max)
            .unwrap()
            .unwrap();
        let u = eq.utilities();
        assert!((0..3).all(|i| u[i] >= ratio(5, 2)));
        assert!((0..3).any(|i| u[i] > ratio(5, 2)));
        let threes: Vec<(usize, Rational)> = (0..3).map(|i| (i, int(3))).collect();
        assert!(cce_bounded(&inst, &caps, Scope::All, &threes, Extreme::Max)
            .unwrap()
            .is_none());
        // No equilibrium leaves all three at or below 5/2 with one below.
        assert!(cce_bounded(&inst, &caps, Scope::All, &floors, Extreme::Min)
            .unwrap()
            .is_none());
        let eq = cce_bounded(&inst, &caps, Scope::All, &[(0, ratio(5, 2))], Extreme::Min)
            .unwrap()
            .unwrap();
        assert!(eq.utilities()[0] < ratio(5, 2));
        assert!(cce_bounded(&inst, &caps, Scope::All, &[(0, int(2))], Extreme::Min)
            .unwrap()
            .is_none());
    }

    #[test]
    fn caps_refuse() {
        let caps = Caps {
            market_objects: 2,
            ..Caps::default()
        };
        assert!(matches!(
            cce_find(&fixtures::ex1(), &caps),
            Err(Error::CapExceeded { .. })
        ));
        let caps = Caps {
            market_patterns: 3,
            ..Caps::default()
        };
        assert!(matches!(
            cce_utility_range(&fixtures::ex1(), &caps, Scope::All),
            Err(Error::CapExceeded { .. })
        ));
    }
}
