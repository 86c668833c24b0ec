//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line per
//! criterion followed by indented detail lines, and exits non-zero if any
//! criterion fails.

#![allow(clippy::needless_range_loop)]

use std::process::ExitCode;
use std::time::Instant;

use mapsolve::audit::{
    ipo_check, ipo_check_all, lorenz_dominance_test, manipulation_search, nonbossy_check,
    random_instance, Notion, SearchOptions, Solution,
};
use mapsolve::competitive::{
    cce_utility_range, cce_verify, demand, supporting_prices, PriceVector, RangeReport, Scope,
    SupportFailure,
};
use mapsolve::egalitarian::{epo, es, es_star, random_priority_profile};
use mapsolve::flow::{coalition_value, core_from_above_check};
use mapsolve::lottery::decompose;
use mapsolve::rational::{self, int, ratio, to_decimal};
use mapsolve::{fixtures, AssignmentMatrix, Caps, Instance, Rational, UtilityProfile};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Report {
    lines: Vec<String>,
    ok: bool,
}

impl Report {
    fn check(&mut self, ok: bool, line: impl Into<String>) {
        let line = line.into();
        self.lines.push(format!("{} {line}", if ok { "ok  " } else { "FAIL" }));
        self.ok &= ok;
    }

    fn note(&mut self, line: impl Into<String>) {
        self.lines.push(format!("     {}", line.into()));
    }
}

fn run(id: usize, title: &str, body: impl FnOnce(&mut Report)) -> bool {
    let start = Instant::now();
    let mut r = Report {
        lines: Vec::new(),
        ok: true,
    };
    body(&mut r);
    println!(
        "criterion {id:>2}: {} {title} ({:.1}s)",
        if r.ok { "PASS" } else { "FAIL" },
        start.elapsed().as_secs_f64()
    );
    for line in &r.lines {
        println!("    {line}");
    }
    r.ok
}

fn profile(values: &[Rational]) -> UtilityProfile {
    UtilityProfile(values.to_vec())
}

fn fmt(u: &UtilityProfile) -> String {
    u.to_strings().join(" ")
}

fn repeat(v: Rational, times: usize) -> Vec<Rational> {
    vec![v; times]
}

/// Fixtures plus 50 pinned random instances with n <= 5 and m <= 4.
fn corpus() -> Vec<(String, Instance)> {
    let mut out: Vec<(String, Instance)> = fixtures::all()
        .into_iter()
        .map(|(name, inst)| (name.to_string(), inst))
        .collect();
    out.extend(random_corpus(50, 0));
    out
}

fn random_corpus(count: u64, first_seed: u64) -> Vec<(String, Instance)> {
    (first_seed..first_seed + count)
        .map(|seed| {
            let n = 2 + (seed % 4) as usize;
            let m = 1 + (seed / 4 % 4) as usize;
            let inst = random_instance(n, m, &ratio(1, 2), seed).expect("valid parameters");
            (format!("random-{seed}"), inst)
        })
        .collect()
}

fn iv(r: &RangeReport, i: usize) -> (Rational, Rational) {
    (r.agents[i].lo_value.clone(), r.agents[i].hi_value.clone())
}

fn show(r: &RangeReport, inst: &Instance) -> String {
    r.agents
        .iter()
        .zip(inst.agents())
        .map(|(a, name)| format!("{name}=[{}, {}]", a.lo, a.hi))
        .collect::<Vec<_>>()
        .join(" ")
}

fn ram(rows: &[&[(i64, i64)]]) -> AssignmentMatrix {
    AssignmentMatrix::from_rows(
        rows.iter()
            .map(|r| r.iter().map(|&(a, b)| ratio(a, b)).collect())
            .collect(),
    )
}

/// The egalitarian assignment printed for the second example.
fn ex2_table_es_ram() -> AssignmentMatrix {
    let a = &[(1, 1), (1, 1), (0, 1), (0, 1), (0, 1), (0, 1)][..];
    let d = &[(0, 1), (1, 2), (1, 1), (1, 1), (0, 1), (0, 1)][..];
    let e = &[(0, 1), (1, 2), (0, 1), (0, 1), (1, 1), (1, 1)][..];
    let f = &[(1, 4), (0, 1), (3, 4), (3, 4), (3, 4), (3, 4)][..];
    ram(&[a, a, a, d, e, f, f, f, f])
}

/// The competitive assignment printed for the second example.
fn ex2_table_market_ram() -> AssignmentMatrix {
    let a = &[(1, 1), (36, 37), (0, 1), (0, 1), (0, 1), (0, 1)][..];
    let d = &[(0, 1), (20, 37), (1, 1), (1, 1), (0, 1), (0, 1)][..];
    let e = &[(0, 1), (20, 37), (0, 1), (0, 1), (1, 1), (1, 1)][..];
    let f = &[(1, 4), (0, 1), (3, 4), (3, 4), (3, 4), (3, 4)][..];
    ram(&[a, a, a, d, e, f, f, f, f])
}

// Independent oracle for the egalitarian profile: the minimum-norm point of
// the efficient utility polytope, found in floating point by Wolfe's method
// over greedy vertices, with coalition values from brute-force minimum cuts.

/// Largest number of units the coalition `members` can take: the smallest
/// cut over all object subsets sent to the sink side.
fn brute_force_value(inst: &Instance, members: &[usize]) -> u64 {
    let m = inst.m();
    (0u32..1 << m)
        .map(|sink| {
            let objects: u64 = (0..m)
                .filter(|&k| sink >> k & 1 == 1)
                .map(|k| inst.capacity(k))
                .sum();
            let edges: u64 = members
                .iter()
                .map(|&i| (0..m).filter(|&k| sink >> k & 1 == 0 && inst.accepts(i, k)).count() as u64)
                .sum();
            objects + edges
        })
        .min()
        .unwrap_or(0)
}

fn greedy_vertex(inst: &Instance, weights: &[f64]) -> Vec<f64> {
    let n = inst.n();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| weights[a].total_cmp(&weights[b]).then(a.cmp(&b)));
    let mut out = vec![0.0; n];
    let mut prefix = Vec::new();
    let mut last = 0;
    for &i in &order {
        prefix.push(i);
        let v = brute_force_value(inst, &prefix);
        out[i] = (v - last) as f64;
        last = v;
    }
    out
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Affine minimizer of the points: solves [G 1; 1' 0][a; mu] = [0; 1].
fn affine_minimizer(points: &[Vec<f64>]) -> Vec<f64> {
    let k = points.len();
    let mut a = vec![vec![0.0; k + 2]; k + 1];
    for i in 0..k {
        for j in 0..k {
            a[i][j] = dot(&points[i], &points[j]);
        }
        a[i][k] = 1.0;
        a[k][i] = 1.0;
    }
    a[k][k + 1] = 1.0;
    for col in 0..=k {
        let pivot = (col..=k)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .expect("nonempty");
        a.swap(col, pivot);
        for row in 0..=k {
            if row != col && a[col][col] != 0.0 {
                let f = a[row][col] / a[col][col];
                for c in col..k + 2 {
                    a[row][c] -= f * a[col][c];
                }
            }
        }
    }
    (0..k).map(|i| a[i][k + 1] / a[i][i]).collect()
}

fn min_norm_profile(inst: &Instance) -> Vec<f64> {
    let n = inst.n();
    let mut points = vec![greedy_vertex(inst, &vec![0.0; n])];
    let mut lambda = vec![1.0];
    let combine = |points: &[Vec<f64>], lambda: &[f64]| {
        let mut x = vec![0.0; n];
        for (p, l) in points.iter().zip(lambda) {
            for i in 0..n {
                x[i] += l * p[i];
            }
        }
        x
    };
    let mut x = points[0].clone();
    for _ in 0..1000 {
        let q = greedy_vertex(inst, &x);
        if dot(&x, &x) - dot(&x, &q) <= 1e-12 || points.contains(&q) {
            break;
        }
        points.push(q);
        lambda.push(0.0);
        loop {
            let alpha = affine_minimizer(&points);
            if alpha.iter().all(|&a| a > 1e-14) {
                lambda = alpha;
                x = combine(&points, &lambda);
                break;
            }
            let theta = (0..points.len())
                .filter(|&i| alpha[i] <= 1e-14)
                .map(|i| lambda[i] / (lambda[i] - alpha[i]))
                .fold(f64::INFINITY, f64::min);
            for i in 0..points.len() {
                lambda[i] = theta * alpha[i] + (1.0 - theta) * lambda[i];
            }
            let keep: Vec<bool> = lambda.iter().map(|&l| l > 1e-14).collect();
            let mut t = 0;
            points.retain(|_| {
                t += 1;
                keep[t - 1]
            });
            lambda.retain(|&l| l > 1e-14);
        }
    }
    x
}

/// Nearest fraction with denominator at most `max_den` by continued
/// fractions.
fn exactify(v: f64, max_den: i64) -> Rational {
    let (mut h0, mut h1, mut k0, mut k1) = (0i64, 1i64, 1i64, 0i64);
    let mut x = v;
    loop {
        let a = x.floor() as i64;
        let (h2, k2) = (a * h1 + h0, a * k1 + k0);
        if k2 > max_den {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = x - a as f64;
        if frac.abs() < 1e-12 {
            break;
        }
        x = 1.0 / frac;
    }
    ratio(h1, k1)
}

fn criterion_1(r: &mut Report) {
    let cases = [
        ("ex1", fixtures::ex1(), {
            let mut v = repeat(ratio(9, 4), 4);
            v.extend([int(2), int(1)]);
            v
        }),
        ("ex2", fixtures::ex2(), {
            let mut v = repeat(int(2), 3);
            v.extend(repeat(ratio(5, 2), 2));
            v.extend(repeat(ratio(13, 4), 4));
            v
        }),
        ("ex3", fixtures::ex3(), {
            let mut v = repeat(ratio(5, 2), 6);
            v.push(int(1));
            v
        }),
        ("ex4", fixtures::ex4(), repeat(ratio(4, 5), 5)),
    ];
    for (name, inst, want) in cases {
        let got = es(&inst).utilities;
        r.check(got == profile(&want), format!("es({name}) = {}", fmt(&got)));
    }
}

fn criterion_2(r: &mut Report) {
    let inst = fixtures::ex1();
    let mut want = repeat(ratio(37, 15), 4);
    want.extend([ratio(22, 15), ratio(2, 3)]);
    let got = epo(&inst);
    r.check(got == profile(&want), format!("epo(ex1) = {}", fmt(&got)));
    let shown: Vec<String> = [3, 4, 5].iter().map(|&i| to_decimal(&got[i], 2)).collect();
    r.check(
        shown == ["2.47", "1.47", "0.67"],
        format!("printed at 2 decimals: {}", shown.join("/")),
    );
    let rp = random_priority_profile(&inst, &Caps::default()).expect("within caps");
    r.check(rp == got, format!("random priority average = {}", fmt(&rp)));
}

fn criterion_3(r: &mut Report) {
    let inst = fixtures::ex1();
    let range = cce_utility_range(&inst, &Caps::default(), Scope::All).expect("solvable");
    r.note(show(&range, &inst));
    r.check(
        (0..4).all(|i| iv(&range, i) == (ratio(9, 4), ratio(12, 5))),
        "a:d in [9/4, 12/5]",
    );
    r.check(iv(&range, 4) == (ratio(7, 5), int(2)), "e in [7/5, 2]");
    r.check(iv(&range, 5) == (int(1), int(1)), "f in [1, 1]");
    let free = &range.free_parameters;
    r.check(
        free.len() == 1
            && free[0].object == 2
            && free[0].interval.lo_value == int(0)
            && free[0].interval.hi_value == ratio(4, 9),
        format!(
            "free price {}",
            free.iter()
                .map(|f| format!("{} in [{}, {}]", inst.objects()[f.object], f.interval.lo, f.interval.hi))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    );
    let verified = range
        .attaining
        .iter()
        .all(|(_, _, eq)| cce_verify(&inst, &eq.ram, &eq.prices).is_ok());
    r.check(
        verified && !range.attaining.is_empty(),
        format!("{} endpoint equilibria re-verified", range.attaining.len()),
    );
}

fn criterion_4(r: &mut Report) {
    let inst = fixtures::ex2();
    let mut rams = vec![("printed egalitarian assignment", ex2_table_es_ram())];
    let computed = es(&inst).ram;
    if computed != rams[0].1 {
        rams.push(("computed egalitarian assignment", computed));
    }
    for (label, z) in rams {
        match supporting_prices(&inst, &z) {
            Err(SupportFailure::Infeasible { conflict }) => {
                r.check(true, format!("{label}: no supporting prices"));
                for c in conflict {
                    r.note(format!("conflict: {c}"));
                }
            }
            other => r.check(false, format!("{label}: expected no prices, got {other:?}")),
        }
    }

    let z = ex2_table_market_ram();
    let q = ratio(4, 13);
    let want = vec![q.clone(), ratio(37, 52), q.clone(), q.clone(), q.clone(), q];
    match supporting_prices(&inst, &z) {
        Ok(p) => {
            r.check(p.0 == want, format!("market prices = {}", p.to_strings().join(" ")));
            r.check(cce_verify(&inst, &z, &p).is_ok(), "market assignment verifies at those prices");
            let induced = (0..inst.n()).all(|i| demand(&inst, i, &p).utility() == z.row_sum(i));
            r.check(induced, "every agent's demand at those prices equals its row");
            let shares: Vec<String> = [(0, 1), (3, 1), (5, 0), (5, 2)]
                .iter()
                .map(|&(i, k)| to_decimal(z.get(i, k), 2))
                .collect();
            r.check(
                shares == ["0.97", "0.54", "0.25", "0.75"],
                format!("shares at 2 decimals: {}", shares.join(" ")),
            );
        }
        Err(e) => r.check(false, format!("market assignment unsupported: {e:?}")),
    }
}

fn criterion_5(r: &mut Report) {
    let caps = Caps::default();
    let truthful = fixtures::ex3();
    let range = cce_utility_range(&truthful, &caps, Scope::All).expect("solvable");
    let unique = range.agents.iter().all(|a| a.is_degenerate())
        && (0..6).all(|i| iv(&range, i).0 == ratio(5, 2))
        && iv(&range, 6).0 == int(1);
    r.check(unique, format!("truthful: {}", show(&range, &truthful)));

    let misreport = fixtures::ex3_misreport();
    let range = cce_utility_range(&misreport, &caps, Scope::All).expect("solvable");
    let expected = (0..6).all(|i| iv(&range, i) == (ratio(5, 2), ratio(18, 7)))
        && iv(&range, 6) == (ratio(4, 7), int(1));
    r.check(
        expected,
        format!("misreport, all equilibria: {}", show(&range, &misreport)),
    );
    if !expected {
        r.note("expected a:f in [5/2, 18/7] and g in [4/7, 1]");
        let p = PriceVector(vec![ratio(2, 3), int(0), ratio(1, 2), ratio(1, 2)]);
        let low = ram(&[
            &[(0, 1), (0, 1), (1, 1), (1, 1)],
            &[(3, 4), (1, 1), (0, 1), (1, 1)],
            &[(3, 4), (1, 1), (1, 1), (0, 1)],
            &[(0, 1), (0, 1), (1, 1), (1, 1)],
            &[(3, 4), (1, 1), (0, 1), (1, 1)],
            &[(3, 4), (1, 1), (1, 1), (0, 1)],
            &[(1, 1), (0, 1), (0, 1), (0, 1)],
        ]);
        match cce_verify(&misreport, &low, &p) {
            Ok(eq) => r.note(format!(
                "verified equilibrium below 5/2: prices {} utilities {}",
                p.to_strings().join(" "),
                fmt(&eq.utilities())
            )),
            Err(v) => r.note(format!("counterexample did not verify: {}", v.describe(&misreport))),
        }
        let sym = cce_utility_range(&misreport, &caps, Scope::SymmetricPrices).expect("solvable");
        r.note(format!(
            "restricted to equal prices on beta, gamma, delta: {}",
            show(&sym, &misreport)
        ));
    }

    for notion in [Notion::Weak, Notion::Strong] {
        let opts = SearchOptions {
            max_coalition: 3,
            notion,
            scope: Scope::All,
        };
        let out = manipulation_search(&truthful, &Solution::Cce, &opts, &caps).expect("within caps");
        match out.found {
            Some(f) => {
                let names: Vec<&str> = f.coalition.iter().map(|&i| truthful.agents()[i].as_str()).collect();
                let dropped: Vec<String> = f
                    .dropped
                    .iter()
                    .map(|d| d.iter().map(|&k| truthful.objects()[k].clone()).collect::<Vec<_>>().join("+"))
                    .collect();
                r.check(
                    f.coalition == [0, 1, 2],
                    format!(
                        "{notion:?}: coalition {{{}}} drops {} after {} misreports; manipulated {}",
                        names.join(","),
                        dropped.join(", "),
                        out.misreports,
                        f.manipulated
                            .iter()
                            .map(|m| format!("[{}, {}]", m.lo, m.hi))
                            .collect::<Vec<_>>()
                            .join(" ")
                    ),
                );
            }
            None => r.check(false, format!("{notion:?}: none found")),
        }
    }
}

fn criterion_6(r: &mut Report) {
    let caps = Caps::default();
    let mut named: Vec<(String, Instance)> = vec![
        ("ex1".into(), fixtures::ex1()),
        ("ex2".into(), fixtures::ex2()),
        ("ex3".into(), fixtures::ex3()),
    ];
    named.extend(random_corpus(50, 0));
    let mut failures = Vec::new();
    let mut total = 0;
    for (name, inst) in &named {
        let out = manipulation_search(inst, &Solution::Es, &SearchOptions::default(), &caps);
        match out {
            Ok(o) if o.found.is_none() && o.coverage == mapsolve::audit::Coverage::Complete => {
                total += o.misreports;
            }
            Ok(o) => failures.push(format!("{name}: {:?}", o.found.map(|f| (f.coalition, f.dropped)))),
            Err(e) => failures.push(format!("{name}: {e}")),
        }
    }
    r.check(
        failures.is_empty(),
        format!("no coalition gains on {} instances ({total} joint misreports, exhaustive)", named.len()),
    );
    for f in failures {
        r.note(f);
    }
    let bossy: Vec<String> = named
        .iter()
        .filter_map(|(name, inst)| match nonbossy_check(inst, &caps) {
            Ok(rep) if rep.violations.is_empty() => None,
            Ok(rep) => Some(format!("{name}: {} violations", rep.violations.len())),
            Err(e) => Some(format!("{name}: {e}")),
        })
        .collect();
    r.check(bossy.is_empty(), "non-bossy on the same instances");
    for b in bossy {
        r.note(b);
    }
}

/// Random instances with a random nonempty acceptor set for a new perfect
/// object.
fn random_extensions(count: u64, first_seed: u64) -> Vec<(Instance, Vec<usize>)> {
    random_corpus(count, first_seed)
        .into_iter()
        .zip(first_seed..)
        .map(|((_, inst), seed)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut acceptors: Vec<usize> = (0..inst.n()).filter(|_| rng.gen_bool(0.5)).collect();
            if acceptors.is_empty() {
                acceptors.push(rng.gen_range(0..inst.n()));
            }
            (inst, acceptors)
        })
        .collect()
}

fn criterion_7(r: &mut Report) {
    let caps = Caps::default();
    let mut failures = Vec::new();
    let mut sets = 0;
    for (name, inst) in corpus() {
        match ipo_check_all(&inst, &Solution::EsStar, &caps) {
            Ok((checked, None)) => sets += checked,
            Ok((_, Some(rep))) => failures.push(format!("{name}: acceptors {:?}", rep.acceptors)),
            Err(e) => failures.push(format!("{name}: {e}")),
        }
    }
    for (inst, acceptors) in random_extensions(20, 1000) {
        match ipo_check(&inst, &Solution::EsStar, &acceptors, &caps) {
            Ok(rep) if rep.passed() => sets += 1,
            Ok(rep) => failures.push(format!("random extension: {:?}", rep.failures)),
            Err(e) => failures.push(e.to_string()),
        }
    }
    r.check(
        failures.is_empty(),
        format!("independent of perfect objects on {sets} acceptor sets"),
    );
    for f in failures {
        r.note(f);
    }

    let opts = SearchOptions {
        max_coalition: 3,
        ..SearchOptions::default()
    };
    let out = manipulation_search(&fixtures::ex3(), &Solution::EsStar, &opts, &caps).expect("within caps");
    match out.found {
        Some(f) => r.check(
            f.coalition == [0, 1, 2]
                && f.truthful.iter().all(|t| t.lo_value == ratio(5, 2))
                && f.manipulated.iter().all(|m| m.lo_value == ratio(18, 7)),
            format!(
                "ex3 coalition {} drops {}: {} -> {}",
                f.to_json(&fixtures::ex3())["coalition"],
                f.to_json(&fixtures::ex3())["dropped"],
                f.truthful[0].lo,
                f.manipulated[0].lo
            ),
        ),
        None => r.check(false, "ex3: no manipulation found"),
    }

    let mut lorenz = Vec::new();
    let mut restricted = 0;
    for (name, inst) in corpus() {
        let part = inst.partition_objects();
        if part.over_demanded.is_empty() {
            continue;
        }
        let sub = inst.restrict_objects(&part.over_demanded).expect("valid restriction");
        let base: Vec<Rational> = (0..inst.n())
            .map(|i| {
                let perfect = part.perfect.iter().filter(|&&k| inst.accepts(i, k)).count();
                &es_star(&inst)[i] - int(perfect as i64)
            })
            .collect();
        restricted += 1;
        match lorenz_dominance_test(&sub, &profile(&base), 200, 11) {
            Ok(rep) if rep.passed() => {}
            Ok(rep) => lorenz.push(format!("{name}: {} counterexamples", rep.counterexamples.len())),
            Err(e) => lorenz.push(format!("{name}: {e}")),
        }
    }
    r.check(
        lorenz.is_empty(),
        format!("over-demanded part Lorenz dominant on {restricted} restricted instances"),
    );
    for l in lorenz {
        r.note(l);
    }
}

fn criterion_8(r: &mut Report) {
    let mut counter = Vec::new();
    let mut trials = 0;
    for (name, inst) in corpus() {
        let u = es(&inst).utilities;
        match lorenz_dominance_test(&inst, &u, 1000, 2024) {
            Ok(rep) if rep.passed() => trials += rep.trials,
            Ok(rep) => counter.push(format!("{name}: {}", fmt(&rep.counterexamples[0]))),
            Err(e) => counter.push(format!("{name}: {e}")),
        }
    }
    r.check(
        counter.is_empty(),
        format!("no Lorenz counterexample in {trials} sampled efficient profiles"),
    );
    for c in counter {
        r.note(c);
    }

    let mut disagree = Vec::new();
    let mut compared = 0;
    for (name, inst) in corpus().into_iter().filter(|(_, inst)| inst.n() <= 6) {
        let x = min_norm_profile(&inst);
        let u = es(&inst).utilities;
        let close = (0..inst.n()).all(|i| (x[i] - rational::to_f64(&u[i])).abs() <= 1e-9);
        let exact: Vec<Rational> = x.iter().map(|&v| exactify(v, 10_000)).collect();
        compared += 1;
        if !close || profile(&exact) != u {
            disagree.push(format!("{name}: oracle {} vs es {}", fmt(&profile(&exact)), fmt(&u)));
        }
    }
    r.check(
        disagree.is_empty(),
        format!("minimum sum of squares agrees with es on {compared} instances with n <= 6"),
    );
    for d in disagree {
        r.note(d);
    }
}

fn criterion_9(r: &mut Report) {
    let mut rams: Vec<(String, Instance, AssignmentMatrix)> = corpus()
        .into_iter()
        .map(|(name, inst)| {
            let z = es(&inst).ram;
            (format!("{name} es"), inst, z)
        })
        .collect();
    rams.push(("ex2 printed es".into(), fixtures::ex2(), ex2_table_es_ram()));
    rams.push(("ex2 printed market".into(), fixtures::ex2(), ex2_table_market_ram()));
    let range = cce_utility_range(&fixtures::ex1(), &Caps::default(), Scope::All).expect("solvable");
    for (i, _, eq) in &range.attaining {
        rams.push((format!("ex1 equilibrium for {i}"), fixtures::ex1(), eq.ram.clone()));
    }

    let mut failures = Vec::new();
    for (name, inst, z) in &rams {
        let lottery = match decompose(inst, z) {
            Ok(l) => l,
            Err(e) => {
                failures.push(format!("{name}: {e}"));
                continue;
            }
        };
        let mut sum = AssignmentMatrix::zeros(inst.n(), inst.m());
        let mut weights = Rational::zero();
        let mut good = true;
        for (w, b) in &lottery.components {
            weights += w;
            good &= w > &Rational::zero() && b.is_binary() && b.check_feasible(inst).is_ok();
            for i in 0..inst.n() {
                for k in 0..inst.m() {
                    good &= inst.accepts(i, k) || b.get(i, k).is_zero();
                    let cell = sum.get(i, k) + w * b.get(i, k);
                    sum.set(i, k, cell);
                }
            }
        }
        let bound = z.fractional_cells() + 1;
        if !good || weights != Rational::one() || &sum != z || lottery.len() > bound {
            failures.push(format!("{name}: {} components, bound {bound}", lottery.len()));
        }
    }
    r.check(
        failures.is_empty(),
        format!("{} assignments rebuilt exactly from binary, feasible, acceptable components", rams.len()),
    );
    for f in failures {
        r.note(f);
    }

    let inst = fixtures::ex4();
    let lottery = decompose(&inst, &es(&inst).ram).expect("feasible");
    r.check(
        lottery.len() == 5 && lottery.components.iter().all(|(w, _)| *w == ratio(1, 5)),
        format!(
            "ex4: {} components with weights {}",
            lottery.len(),
            lottery
                .components
                .iter()
                .map(|(w, _)| rational::format(w))
                .collect::<Vec<_>>()
                .join(" ")
        ),
    );
}

fn criterion_10(r: &mut Report) {
    let caps = Caps::default();
    let inst = fixtures::ex4();
    match ipo_check(&inst, &Solution::Es, &[0, 1, 2, 3], &caps) {
        Ok(rep) => {
            let f = rep.failures.first();
            r.check(
                !rep.passed() && f.is_some_and(|f| f.expected == "9/5" && f.actual == "7/4"),
                format!(
                    "es on ex4 fails: {}",
                    f.map(|f| format!("expected {}, got {}", f.expected, f.actual)).unwrap_or_default()
                ),
            );
        }
        Err(e) => r.check(false, e.to_string()),
    }
    let mut cases: Vec<(Instance, Vec<usize>)> = vec![(inst, vec![0, 1, 2, 3])];
    cases.extend(random_extensions(20, 2000));
    for solution in [Solution::CceSelection, Solution::Epo] {
        let failures: Vec<String> = cases
            .iter()
            .filter_map(|(inst, acceptors)| match ipo_check(inst, &solution, acceptors, &caps) {
                Ok(rep) if rep.passed() => None,
                Ok(rep) => Some(format!("{:?}", rep.failures)),
                Err(e) => Some(e.to_string()),
            })
            .collect();
        r.check(
            failures.is_empty(),
            format!("{} passes on ex4 and 20 random extensions", solution.name()),
        );
        for f in failures {
            r.note(f);
        }
    }
}

fn criterion_11(r: &mut Report) {
    let caps = Caps::default();
    let failures: Vec<String> = corpus()
        .into_iter()
        .filter_map(|(name, inst)| match core_from_above_check(&inst, &es(&inst).utilities, &caps) {
            Ok(c) if c.in_core && c.efficient => None,
            Ok(c) => Some(format!("{name}: {:?}", c.violation)),
            Err(e) => Some(format!("{name}: {e}")),
        })
        .collect();
    r.check(failures.is_empty(), "es profiles lie in the core from above");
    for f in failures {
        r.note(f);
    }

    let instances = corpus();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut broken = 0;
    let mut mismatched = 0;
    for _ in 0..10_000 {
        let (_, inst) = &instances[rng.gen_range(0..instances.len())];
        let n = inst.n();
        let s: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
        let t: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
        let union: Vec<usize> = (0..n).filter(|i| s.contains(i) || t.contains(i)).collect();
        let meet: Vec<usize> = (0..n).filter(|i| s.contains(i) && t.contains(i)).collect();
        let v = |c: &[usize]| coalition_value(inst, c);
        if v(&s) + v(&t) < v(&union) + v(&meet) {
            broken += 1;
        }
        if v(&s) != brute_force_value(inst, &s) {
            mismatched += 1;
        }
    }
    r.check(broken == 0, "coalition value submodular on 10000 random pairs");
    r.check(mismatched == 0, "coalition value matches brute-force minimum cuts");
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn criterion_12(r: &mut Report) {
    let caps = Caps::default();
    let mut named = vec![("ex1".to_string(), fixtures::ex1())];
    named.extend(random_corpus(20, 500));
    let mut orders = 0;
    let mut failures = Vec::new();
    for (name, inst) in &named {
        for order in permutations(inst.n()) {
            orders += 1;
            let out = manipulation_search(inst, &Solution::Priority(order.clone()), &SearchOptions::default(), &caps);
            match out {
                Ok(o) if o.found.is_none() && o.coverage == mapsolve::audit::Coverage::Complete => {}
                Ok(o) => failures.push(format!("{name} {order:?}: {:?}", o.found.map(|f| f.coalition))),
                Err(e) => failures.push(format!("{name}: {e}")),
            }
        }
    }
    r.check(
        failures.is_empty(),
        format!("no manipulation for {orders} fixed orders over {} instances", named.len()),
    );
    for f in failures.into_iter().take(5) {
        r.note(f);
    }
}

type Criterion = (&'static str, fn(&mut Report));

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("egalitarian profiles of the four examples", criterion_1),
        ("per-object profile and random priority", criterion_2),
        ("equilibrium range of the first example", criterion_3),
        ("egalitarian assignment has no supporting prices", criterion_4),
        ("coalition manipulation of the equilibrium set", criterion_5),
        ("egalitarian solution resists coalitions", criterion_6),
        ("refined egalitarian solution", criterion_7),
        ("Lorenz dominance and sum-of-squares oracle", criterion_8),
        ("lottery decomposition", criterion_9),
        ("independence of perfect objects", criterion_10),
        ("core from above and submodularity", criterion_11),
        ("priority resists coalitions", criterion_12),
    ];
    let mut failed = Vec::new();
    for (i, (title, body)) in criteria.into_iter().enumerate() {
        if !run(i + 1, title, body) {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 12 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: criteria {failed:?} fail");
        ExitCode::FAILURE
    }
}
