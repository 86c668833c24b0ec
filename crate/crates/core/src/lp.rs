//! Exact linear programming over the rationals.
//!
//! Two-phase primal simplex on an integer-preserving tableau (every pivot
//! divides exactly by the previous pivot), Bland's rule for termination.
//! Arithmetic runs in `i128` and is redone in `BigInt` on overflow.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::rational::{self, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<(usize, Rational)>,
    pub relation: Relation,
    pub rhs: Rational,
}

/// Constraints over non-negative variables `x_0 .. x_{n-1}`.
#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    num_vars: usize,
    constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Rational, point: Vec<Rational> },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn value(&self) -> Option<&Rational> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }

    pub fn point(&self) -> Option<&[Rational]> {
        match self {
            LpOutcome::Optimal { point, .. } => Some(point),
            _ => None,
        }
    }
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            num_vars,
            constraints: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// Adds a variable and returns its index.
    pub fn add_var(&mut self) -> usize {
        self.num_vars += 1;
        self.num_vars - 1
    }

    pub fn add(&mut self, coeffs: Vec<(usize, Rational)>, relation: Relation, rhs: Rational) {
        debug_assert!(coeffs.iter().all(|(j, _)| *j < self.num_vars));
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
    }

    /// Integer-coefficient shorthand.
    pub fn add_int(&mut self, coeffs: &[(usize, i64)], relation: Relation, rhs: i64) {
        self.add(
            coeffs.iter().map(|&(j, c)| (j, rational::int(c))).collect(),
            relation,
            rational::int(rhs),
        );
    }

    pub fn maximize(&self, objective: &[(usize, Rational)]) -> LpOutcome {
        self.solve(objective, false)
    }

    pub fn minimize(&self, objective: &[(usize, Rational)]) -> LpOutcome {
        match self.solve(objective, true) {
            LpOutcome::Optimal { value, point } => LpOutcome::Optimal { value: -value, point },
            other => other,
        }
    }

    /// Some feasible point, or `None`.
    pub fn feasible_point(&self) -> Option<Vec<Rational>> {
        match self.solve(&[], false) {
            LpOutcome::Optimal { point, .. } => Some(point),
            _ => None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.feasible_point().is_some()
    }

    fn solve(&self, objective: &[(usize, Rational)], negate: bool) -> LpOutcome {
        let (rows, obj, obj_scale) = self.integer_form(objective, negate);
        if certified_infeasible(&rows, self.num_vars) {
            return LpOutcome::Infeasible;
        }
        let outcome = match Tableau::<i128>::build(&rows, &obj, self.num_vars) {
            Some(mut t) => t.run(),
            None => None,
        };
        let outcome = match outcome {
            Some(o) => o,
            None => Tableau::<BigInt>::build(&rows, &obj, self.num_vars)
                .expect("BigInt never overflows")
                .run()
                .expect("BigInt never overflows"),
        };
        match outcome {
            Raw::Infeasible => LpOutcome::Infeasible,
            Raw::Unbounded => LpOutcome::Unbounded,
            Raw::Optimal { value, point } => LpOutcome::Optimal {
                value: value / Rational::from_integer(obj_scale),
                point,
            },
        }
    }

    /// Rows scaled to integers with non-negative right-hand sides.
    fn integer_form(
        &self,
        objective: &[(usize, Rational)],
        negate: bool,
    ) -> (Vec<IntRow>, Vec<BigInt>, BigInt) {
        let rows = self
            .constraints
            .iter()
            .map(|c| {
                let l = rational::lcm_of_denominators(
                    c.coeffs.iter().map(|(_, v)| v).chain(std::iter::once(&c.rhs)),
                );
                let scale = |v: &Rational| scale_to_integer(v, &l);
                let mut coeffs = vec![BigInt::zero(); self.num_vars];
                for (j, v) in &c.coeffs {
                    coeffs[*j] += scale(v);
                }
                let mut rhs = scale(&c.rhs);
                let mut relation = c.relation;
                if rhs.is_negative() {
                    rhs = -rhs;
                    for v in &mut coeffs {
                        *v = -v.clone();
                    }
                    relation = match relation {
                        Relation::Le => Relation::Ge,
                        Relation::Ge => Relation::Le,
                        Relation::Eq => Relation::Eq,
                    };
                }
                IntRow {
                    coeffs,
                    relation,
                    rhs,
                }
            })
            .collect();
        let l = rational::lcm_of_denominators(objective.iter().map(|(_, v)| v));
        let mut obj = vec![BigInt::zero(); self.num_vars];
        for (j, v) in objective {
            let s = scale_to_integer(v, &l);
            obj[*j] += if negate { -s } else { s };
        }
        (rows, obj, l)
    }
}

/// `v * l` for an `l` that every denominator divides.
fn scale_to_integer(v: &Rational, l: &BigInt) -> BigInt {
    if v.denom().is_one() {
        if l.is_one() {
            v.numer().clone()
        } else {
            v.numer() * l
        }
    } else {
        v.numer() * (l / v.denom())
    }
}

/// A constraint whose coefficients fit in `i64`.
type SmallRow = (Vec<i64>, Relation, i64);

/// Floating-point phase one. When it ends with positive infeasibility, its
/// dual multipliers are rounded to rationals and checked exactly as a
/// Farkas certificate. Only a verified certificate counts; anything else
/// defers to the exact tableau.
fn certified_infeasible(rows: &[IntRow], structural: usize) -> bool {
    let mut small: Vec<SmallRow> = Vec::with_capacity(rows.len());
    for r in rows {
        let coeffs: Option<Vec<i64>> = r.coeffs.iter().map(|v| v.to_i64()).collect();
        match (coeffs, r.rhs.to_i64()) {
            (Some(c), Some(b)) if c.iter().all(|v| v.abs() < 1 << 40) && b.abs() < 1 << 40 => {
                small.push((c, r.relation, b))
            }
            _ => return false,
        }
    }
    let Some(z) = float_farkas(&small, structural) else {
        return false;
    };
    verify_farkas(&small, structural, &z)
}

/// Candidate `z` with `zᵀA ≥ 0`, `zᵀb < 0`, `z ≥ 0` on `≤` rows and
/// `z ≤ 0` on `≥` rows, as integers.
fn float_farkas(rows: &[SmallRow], structural: usize) -> Option<Vec<i128>> {
    const EPS: f64 = 1e-9;
    let m = rows.len();
    let slack_count = rows.iter().filter(|r| r.1 != Relation::Eq).count();
    let art_from = structural + slack_count;
    let cols = art_from + rows.iter().filter(|r| r.1 != Relation::Le).count();
    let mut a = vec![vec![0.0f64; cols + 1]; m];
    let mut basis = Vec::with_capacity(m);
    let mut initial = Vec::with_capacity(m);
    let (mut slack, mut art) = (structural, art_from);
    for (i, (coeffs, rel, rhs)) in rows.iter().enumerate() {
        for (j, &v) in coeffs.iter().enumerate() {
            a[i][j] = v as f64;
        }
        a[i][cols] = *rhs as f64;
        match rel {
            Relation::Le => {
                a[i][slack] = 1.0;
                basis.push(slack);
                initial.push(slack);
                slack += 1;
            }
            Relation::Ge => {
                a[i][slack] = -1.0;
                slack += 1;
                a[i][art] = 1.0;
                basis.push(art);
                initial.push(art);
                art += 1;
            }
            Relation::Eq => {
                a[i][art] = 1.0;
                basis.push(art);
                initial.push(art);
                art += 1;
            }
        }
    }
    let cost = |j: usize| if j >= art_from { 1.0 } else { 0.0 };
    for _ in 0..50 * (m + cols) {
        let entering = (0..art_from).find(|&j| {
            let reduced = cost(j) - (0..m).map(|i| cost(basis[i]) * a[i][j]).sum::<f64>();
            reduced < -EPS && !basis.contains(&j)
        });
        let Some(e) = entering else {
            let value: f64 = (0..m).map(|i| cost(basis[i]) * a[i][cols]).sum();
            if value <= 1e-7 {
                return None;
            }
            let y: Vec<f64> = (0..m)
                .map(|r| -(0..m).map(|i| cost(basis[i]) * a[i][initial[r]]).sum::<f64>())
                .collect();
            return rationalize(&y);
        };
        let mut leave: Option<usize> = None;
        for i in 0..m {
            if a[i][e] > EPS {
                let ratio = a[i][cols] / a[i][e];
                leave = match leave {
                    None => Some(i),
                    Some(l) => {
                        let best = a[l][cols] / a[l][e];
                        if ratio < best - EPS || (ratio <= best + EPS && basis[i] < basis[l]) {
                            Some(i)
                        } else {
                            Some(l)
                        }
                    }
                };
            }
        }
        let l = leave?;
        let pivot = a[l][e];
        for v in a[l].iter_mut() {
            *v /= pivot;
        }
        let prow = a[l].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != l && row[e] != 0.0 {
                let f = row[e];
                for (v, p) in row.iter_mut().zip(&prow) {
                    *v -= f * p;
                }
            }
        }
        basis[l] = e;
    }
    None
}

/// Rounds to small-denominator rationals over one common denominator.
fn rationalize(y: &[f64]) -> Option<Vec<i128>> {
    let scale = y.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return None;
    }
    let mut fracs = Vec::with_capacity(y.len());
    for &v in y {
        let x = v / scale;
        if x.abs() < 1e-10 {
            fracs.push((0i128, 1i128));
            continue;
        }
        // Continued fraction convergents.
        let (mut h0, mut h1, mut k0, mut k1) = (0i128, 1i128, 1i128, 0i128);
        let mut r = x;
        let mut done = None;
        for _ in 0..40 {
            let q = r.floor();
            let qi = q as i128;
            let (h2, k2) = (qi.checked_mul(h1)?.checked_add(h0)?, qi.checked_mul(k1)?.checked_add(k0)?);
            (h0, h1, k0, k1) = (h1, h2, k1, k2);
            if k1 > 1_000_000 {
                return None;
            }
            if ((h1 as f64) / (k1 as f64) - x).abs() < 1e-11 {
                done = Some((h1, k1));
                break;
            }
            let f = r - q;
            if f.abs() < 1e-15 {
                return None;
            }
            r = 1.0 / f;
        }
        fracs.push(done?);
    }
    let mut den = 1i128;
    for &(_, k) in &fracs {
        den = den.checked_mul(k / den.gcd(&k))?;
        if den > 1 << 60 {
            return None;
        }
    }
    fracs.iter().map(|&(h, k)| h.checked_mul(den / k)).collect()
}

fn verify_farkas(rows: &[SmallRow], structural: usize, z: &[i128]) -> bool {
    for ((_, rel, _), &zr) in rows.iter().zip(z) {
        let ok = match rel {
            Relation::Le => zr >= 0,
            Relation::Ge => zr <= 0,
            Relation::Eq => true,
        };
        if !ok {
            return false;
        }
    }
    let dot = |f: &dyn Fn(&SmallRow) -> i64| -> Option<i128> {
        rows.iter().zip(z).try_fold(0i128, |acc, (r, &zr)| {
            acc.checked_add(zr.checked_mul(f(r) as i128)?)
        })
    };
    for j in 0..structural {
        match dot(&|r| r.0[j]) {
            Some(v) if v >= 0 => {}
            _ => return false,
        }
    }
    matches!(dot(&|r| r.2), Some(v) if v < 0)
}

struct IntRow {
    coeffs: Vec<BigInt>,
    relation: Relation,
    rhs: BigInt,
}

enum Raw {
    Optimal { value: Rational, point: Vec<Rational> },
    Infeasible,
    Unbounded,
}

trait Ring: Clone + Sized {
    fn from_big(v: &BigInt) -> Option<Self>;
    fn to_big(&self) -> BigInt;
    fn nil() -> Self;
    fn unit() -> Self;
    fn mul(&self, o: &Self) -> Option<Self>;
    fn sub(&self, o: &Self) -> Option<Self>;
    fn add(&self, o: &Self) -> Option<Self>;
    fn div_exact(&self, o: &Self) -> Self;
    fn neg(&self) -> Option<Self>;
    fn sign(&self) -> i8;
}

impl Ring for i128 {
    fn from_big(v: &BigInt) -> Option<Self> {
        v.to_i128()
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn nil() -> Self {
        0
    }
    fn unit() -> Self {
        1
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        self.checked_mul(*o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        self.checked_sub(*o)
    }
    fn add(&self, o: &Self) -> Option<Self> {
        self.checked_add(*o)
    }
    fn div_exact(&self, o: &Self) -> Self {
        debug_assert_eq!(self % o, 0);
        self / o
    }
    fn neg(&self) -> Option<Self> {
        self.checked_neg()
    }
    fn sign(&self) -> i8 {
        self.signum() as i8
    }
}

impl Ring for BigInt {
    fn from_big(v: &BigInt) -> Option<Self> {
        Some(v.clone())
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
    fn nil() -> Self {
        Zero::zero()
    }
    fn unit() -> Self {
        One::one()
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        Some(self - o)
    }
    fn add(&self, o: &Self) -> Option<Self> {
        Some(self + o)
    }
    fn div_exact(&self, o: &Self) -> Self {
        debug_assert!(self.is_multiple_of(o));
        self / o
    }
    fn neg(&self) -> Option<Self> {
        Some(-self)
    }
    fn sign(&self) -> i8 {
        if self.is_positive() {
            1
        } else if self.is_negative() {
            -1
        } else {
            0
        }
    }
}

/// Column layout: structural, then slack/surplus, then artificial, then rhs.
struct Tableau<T> {
    a: Vec<Vec<T>>,
    obj: Vec<T>,
    basis: Vec<usize>,
    det: T,
    structural: usize,
    artificial_from: usize,
    cols: usize,
    target: Vec<T>,
}

impl<T: Ring> Tableau<T> {
    fn build(rows: &[IntRow], objective: &[BigInt], structural: usize) -> Option<Self> {
        let slack_count = rows.iter().filter(|r| r.relation != Relation::Eq).count();
        let art_count = rows.iter().filter(|r| r.relation != Relation::Le).count();
        let artificial_from = structural + slack_count;
        let cols = artificial_from + art_count;
        let mut a = Vec::with_capacity(rows.len());
        let mut basis = Vec::with_capacity(rows.len());
        let (mut next_slack, mut next_art) = (structural, artificial_from);
        for r in rows {
            let mut row = vec![T::nil(); cols + 1];
            for (j, v) in r.coeffs.iter().enumerate() {
                row[j] = T::from_big(v)?;
            }
            row[cols] = T::from_big(&r.rhs)?;
            match r.relation {
                Relation::Le => {
                    row[next_slack] = T::unit();
                    basis.push(next_slack);
                    next_slack += 1;
                }
                Relation::Ge => {
                    row[next_slack] = T::unit().neg()?;
                    next_slack += 1;
                    row[next_art] = T::unit();
                    basis.push(next_art);
                    next_art += 1;
                }
                Relation::Eq => {
                    row[next_art] = T::unit();
                    basis.push(next_art);
                    next_art += 1;
                }
            }
            a.push(row);
        }
        let target = objective
            .iter()
            .map(T::from_big)
            .collect::<Option<Vec<_>>>()?;
        Some(Tableau {
            a,
            obj: vec![T::nil(); cols + 1],
            basis,
            det: T::unit(),
            structural,
            artificial_from,
            cols,
            target,
        })
    }

    /// `None` signals overflow.
    fn run(&mut self) -> Option<Raw> {
        // Phase one: maximize minus the sum of artificials.
        for j in self.artificial_from..self.cols {
            self.obj[j] = T::unit();
        }
        for i in 0..self.a.len() {
            if self.basis[i] >= self.artificial_from {
                for j in 0..=self.cols {
                    self.obj[j] = self.obj[j].sub(&self.a[i][j])?;
                }
            }
        }
        if self.iterate(self.cols)?.is_none() {
            unreachable!("phase one is bounded");
        }
        if self.obj[self.cols].sign() != 0 {
            return Some(Raw::Infeasible);
        }
        self.drive_out_artificials()?;

        // Phase two.
        let d = self.det.clone();
        let mut obj = vec![T::nil(); self.cols + 1];
        for (j, c) in self.target.iter().enumerate() {
            obj[j] = c.mul(&d)?.neg()?;
        }
        for i in 0..self.a.len() {
            let b = self.basis[i];
            if b < self.structural && self.target[b].sign() != 0 {
                let c = self.target[b].clone();
                for j in 0..=self.cols {
                    obj[j] = obj[j].add(&c.mul(&self.a[i][j])?)?;
                }
            }
        }
        self.obj = obj;
        match self.iterate(self.artificial_from)? {
            None => Some(Raw::Unbounded),
            Some(()) => {
                let det = self.det.to_big();
                let mut point = vec![Rational::zero(); self.structural];
                for (i, &b) in self.basis.iter().enumerate() {
                    if b < self.structural {
                        point[b] = Rational::new(self.a[i][self.cols].to_big(), det.clone());
                    }
                }
                let value = Rational::new(self.obj[self.cols].to_big(), det);
                Some(Raw::Optimal { value, point })
            }
        }
    }

    /// Pivots until optimal (`Some(Some(()))`) or unbounded (`Some(None)`).
    /// Only columns below `limit` may enter.
    fn iterate(&mut self, limit: usize) -> Option<Option<()>> {
        loop {
            let entering = (0..limit).find(|&j| self.obj[j].sign() < 0);
            let Some(s) = entering else {
                return Some(Some(()));
            };
            let mut leave: Option<usize> = None;
            for i in 0..self.a.len() {
                if self.a[i][s].sign() <= 0 {
                    continue;
                }
                leave = match leave {
                    None => Some(i),
                    Some(r) => {
                        // b_i / a_is  vs  b_r / a_rs
                        let lhs = self.a[i][self.cols].mul(&self.a[r][s])?;
                        let rhs = self.a[r][self.cols].mul(&self.a[i][s])?;
                        let ord = lhs.sub(&rhs)?.sign();
                        if ord < 0 || (ord == 0 && self.basis[i] < self.basis[r]) {
                            Some(i)
                        } else {
                            Some(r)
                        }
                    }
                };
            }
            let Some(r) = leave else {
                return Some(None);
            };
            self.pivot(r, s)?;
        }
    }

    fn pivot(&mut self, r: usize, s: usize) -> Option<()> {
        let p = self.a[r][s].clone();
        debug_assert!(p.sign() > 0);
        let pivot_row = self.a[r].clone();
        for i in 0..self.a.len() {
            if i == r {
                continue;
            }
            let f = self.a[i][s].clone();
            let row = &mut self.a[i];
            for j in 0..=self.cols {
                let v = if f.sign() == 0 {
                    row[j].mul(&p)?
                } else {
                    row[j].mul(&p)?.sub(&f.mul(&pivot_row[j])?)?
                };
                row[j] = v.div_exact(&self.det);
            }
        }
        let f = self.obj[s].clone();
        for j in 0..=self.cols {
            let v = self.obj[j].mul(&p)?.sub(&f.mul(&pivot_row[j])?)?;
            self.obj[j] = v.div_exact(&self.det);
        }
        self.det = p;
        self.basis[r] = s;
        Some(())
    }

    fn drive_out_artificials(&mut self) -> Option<()> {
        for r in 0..self.a.len() {
            if self.basis[r] < self.artificial_from {
                continue;
            }
            let Some(s) = (0..self.artificial_from).find(|&j| self.a[r][j].sign() != 0) else {
                continue;
            };
            if self.a[r][s].sign() < 0 {
                // The row has zero right-hand side, so negating it is harmless;
                // the artificial column it spoils is never used again.
                for j in 0..=self.cols {
                    self.a[r][j] = self.a[r][j].neg()?;
                }
            }
            self.pivot(r, s)?;
        }
        Some(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn textbook_maximum() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18
        let mut lp = LinearProgram::new(2);
        lp.add_int(&[(0, 1)], Relation::Le, 4);
        lp.add_int(&[(1, 2)], Relation::Le, 12);
        lp.add_int(&[(0, 3), (1, 2)], Relation::Le, 18);
        let out = lp.maximize(&[(0, int(3)), (1, int(5))]);
        assert_eq!(out.value(), Some(&int(36)));
        assert_eq!(out.point().unwrap(), &[int(2), int(6)]);
    }

    #[test]
    fn fractional_optimum_with_equalities() {
        // min x + y, 3x + y = 2, x + 3y >= 2
        let mut lp = LinearProgram::new(2);
        lp.add_int(&[(0, 3), (1, 1)], Relation::Eq, 2);
        lp.add_int(&[(0, 1), (1, 3)], Relation::Ge, 2);
        let out = lp.minimize(&[(0, int(1)), (1, int(1))]);
        assert_eq!(out.value(), Some(&int(1)));
        assert_eq!(out.point().unwrap(), &[ratio(1, 2), ratio(1, 2)]);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(1);
        lp.add_int(&[(0, 1)], Relation::Ge, 2);
        lp.add_int(&[(0, 1)], Relation::Le, 1);
        assert_eq!(lp.maximize(&[(0, int(1))]), LpOutcome::Infeasible);
        let mut lp = LinearProgram::new(2);
        lp.add_int(&[(0, 1), (1, -1)], Relation::Le, 1);
        assert_eq!(lp.maximize(&[(0, int(1))]), LpOutcome::Unbounded);
        assert!(lp.is_feasible());
    }

    #[test]
    fn negative_rhs_and_redundant_rows() {
        // -x <= -1 (x >= 1), x + y = 2 twice, max y
        let mut lp = LinearProgram::new(2);
        lp.add_int(&[(0, -1)], Relation::Le, -1);
        lp.add_int(&[(0, 1), (1, 1)], Relation::Eq, 2);
        lp.add_int(&[(0, 2), (1, 2)], Relation::Eq, 4);
        let out = lp.maximize(&[(1, int(1))]);
        assert_eq!(out.value(), Some(&int(1)));
        let out = lp.minimize(&[(1, ratio(1, 3))]);
        assert_eq!(out.value(), Some(&int(0)));
    }

    #[test]
    fn degenerate_cycle_prone_problem() {
        // Beale's example; Bland's rule must terminate.
        let mut lp = LinearProgram::new(4);
        lp.add(
            vec![(0, ratio(1, 4)), (1, int(-60)), (2, ratio(-1, 25)), (3, int(9))],
            Relation::Le,
            int(0),
        );
        lp.add(
            vec![(0, ratio(1, 2)), (1, int(-90)), (2, ratio(-1, 50)), (3, int(3))],
            Relation::Le,
            int(0),
        );
        lp.add(vec![(2, int(1))], Relation::Le, int(1));
        let out = lp.maximize(&[(0, ratio(3, 4)), (1, int(-150)), (2, ratio(1, 50)), (3, int(-6))]);
        assert_eq!(out.value(), Some(&ratio(1, 20)));
    }

    #[test]
    fn overflow_falls_back_to_bigint() {
        let big = Rational::from_integer(BigInt::from(10).pow(30));
        let mut lp = LinearProgram::new(2);
        lp.add(vec![(0, big.clone()), (1, big.clone())], Relation::Le, big.clone() * big.clone());
        lp.add(vec![(0, int(1))], Relation::Le, big.clone());
        let out = lp.maximize(&[(0, int(2)), (1, int(1))]);
        assert_eq!(out.value(), Some(&(big.clone() * int(2))));
    }

    #[test]
    fn float_certificate_is_exact() {
        let mut lp = LinearProgram::new(2);
        lp.add_int(&[(0, 1), (1, 1)], Relation::Le, 1);
        lp.add_int(&[(0, 2), (1, 2)], Relation::Ge, 3);
        let (rows, _, _) = lp.integer_form(&[], false);
        assert!(certified_infeasible(&rows, 2));
        assert_eq!(lp.feasible_point(), None);
        let mut ok = LinearProgram::new(2);
        ok.add_int(&[(0, 1), (1, 1)], Relation::Le, 2);
        ok.add_int(&[(0, 3), (1, -1)], Relation::Eq, 1);
        let (rows, _, _) = ok.integer_form(&[], false);
        assert!(!certified_infeasible(&rows, 2));
        assert!(!verify_farkas(&[(vec![1], Relation::Le, 1)], 1, &[1]));
    }
}
