//! Plain-text tables. Shares and utilities are rounded half-to-even to two
//! decimals; integers print without a decimal point.

use mapsolve::competitive::{group_names, Equilibrium, RangeReport};
use mapsolve::lottery::Lottery;
use mapsolve::rational::{self, Rational};
use mapsolve::{AssignmentMatrix, Instance, UtilityProfile};

pub fn number(v: &Rational) -> String {
    if rational::is_integer(v) {
        return rational::format(v);
    }
    let text = rational::to_decimal(v, 2);
    text.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn interval(lo: &Rational, hi: &Rational) -> String {
    if lo == hi {
        number(lo)
    } else {
        format!("[{} - {}]", number(lo), number(hi))
    }
}

/// Aligns `rows` under `header`, with a rule after the header and before
/// each index in `rules`.
fn grid(header: Vec<String>, rows: Vec<Vec<String>>, rules: &[usize]) -> String {
    let cols = header.len();
    let mut width = vec![0; cols];
    for row in std::iter::once(&header).chain(&rows) {
        for (c, cell) in row.iter().enumerate() {
            width[c] = width[c].max(cell.chars().count());
        }
    }
    let line = |row: &[String]| {
        let cells: Vec<String> = (0..cols)
            .map(|c| {
                let cell = row.get(c).map(String::as_str).unwrap_or("");
                format!("{cell:<w$}", w = width[c])
            })
            .collect();
        cells.join(" | ").trim_end().to_string()
    };
    let rule = width.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("-+-");
    let mut out = vec![line(&header), rule.clone()];
    for (r, row) in rows.iter().enumerate() {
        if rules.contains(&r) {
            out.push(rule.clone());
        }
        out.push(line(row));
    }
    out.join("\n")
}

/// Merges consecutive agents whose cells are identical into `first:last`.
fn grouped(inst: &Instance, cells: Vec<Vec<String>>) -> Vec<Vec<String>> {
    let mut out: Vec<Vec<String>> = Vec::new();
    let mut start = 0;
    for i in 0..=cells.len() {
        if i == cells.len() || cells[i] != cells[start] {
            if i > start {
                let members: Vec<usize> = (start..i).collect();
                let mut row = vec![group_names(inst.agents(), &members)];
                row.extend(cells[start].iter().cloned());
                out.push(row);
            }
            start = i;
        }
    }
    out
}

fn header(inst: &Instance, first: &str, last: &[&str]) -> Vec<String> {
    let mut h = vec![first.to_string()];
    h.extend(inst.objects().iter().cloned());
    h.extend(last.iter().map(|s| s.to_string()));
    h
}

fn acceptance_cells(inst: &Instance, i: usize) -> Vec<String> {
    (0..inst.m())
        .map(|k| if inst.accepts(i, k) { "1" } else { "0" }.to_string())
        .collect()
}

/// Demand and capacity rows under an acceptability table.
fn footer(inst: &Instance, rows: &mut Vec<Vec<String>>) -> Vec<usize> {
    let at = rows.len();
    let mut total = vec!["Total".to_string()];
    total.extend((0..inst.m()).map(|k| inst.demand(k).to_string()));
    let mut q = vec!["q".to_string()];
    q.extend(inst.capacities().iter().map(u64::to_string));
    rows.push(total);
    rows.push(q);
    vec![at, at + 1]
}

pub fn acceptability(inst: &Instance) -> String {
    let cells = (0..inst.n())
        .map(|i| {
            let mut c = acceptance_cells(inst, i);
            c.push(inst.row_size(i).to_string());
            c
        })
        .collect();
    let mut rows = grouped(inst, cells);
    let rules = footer(inst, &mut rows);
    grid(header(inst, "N \\ M", &["Total"]), rows, &rules)
}

fn shares(inst: &Instance, z: &AssignmentMatrix) -> Vec<Vec<String>> {
    let cells = (0..inst.n())
        .map(|i| {
            let mut c: Vec<String> = (0..inst.m()).map(|k| number(z.get(i, k))).collect();
            c.push(number(&z.row_sum(i)));
            c
        })
        .collect();
    grouped(inst, cells)
}

fn ram(inst: &Instance, z: &AssignmentMatrix) -> String {
    grid(header(inst, "N \\ M", &["Total"]), shares(inst, z), &[])
}

/// Per-agent utilities in one column headed by the method, preceded by the
/// assignment when there is one.
pub fn profile(inst: &Instance, method: &str, u: &UtilityProfile, z: Option<&AssignmentMatrix>) -> String {
    let cells = (0..inst.n()).map(|i| vec![number(&u[i])]).collect();
    let summary = grid(vec!["N".into(), method.to_uppercase()], grouped(inst, cells), &[]);
    match z {
        Some(z) => format!("{}\n\n{summary}", ram(inst, z)),
        None => summary,
    }
}

pub fn equilibrium(inst: &Instance, eq: &Equilibrium) -> String {
    let mut rows = shares(inst, &eq.ram);
    let at = rows.len();
    let mut p = vec!["price".to_string()];
    p.extend(eq.prices.0.iter().map(number));
    rows.push(p);
    let exact: Vec<String> = inst
        .objects()
        .iter()
        .zip(eq.prices.to_strings())
        .map(|(o, p)| format!("{o}={p}"))
        .collect();
    format!(
        "{}\nexact prices: {}",
        grid(header(inst, "N \\ M", &["Total"]), rows, &[at]),
        exact.join(" ")
    )
}

pub fn range(inst: &Instance, r: &RangeReport) -> String {
    let cells = (0..inst.n())
        .map(|i| {
            let mut c = acceptance_cells(inst, i);
            c.push(interval(&r.agents[i].lo_value, &r.agents[i].hi_value));
            c
        })
        .collect();
    let mut rows = grouped(inst, cells);
    let at = rows.len();
    let mut p = vec!["price".to_string()];
    p.extend(r.prices.iter().map(|iv| interval(&iv.lo_value, &iv.hi_value)));
    rows.push(p);
    let mut rules = vec![at];
    rules.extend(footer(inst, &mut rows));
    let mut out = grid(header(inst, "N \\ M", &["CCE"]), rows, &rules);
    for i in 0..inst.n() {
        out.push_str(&format!(
            "\n{}: [{}, {}]",
            inst.agents()[i],
            r.agents[i].lo,
            r.agents[i].hi
        ));
    }
    out
}

pub fn binary(inst: &Instance, b: &AssignmentMatrix) -> String {
    ram(inst, b)
}

pub fn lottery(inst: &Instance, l: &Lottery) -> String {
    l.components
        .iter()
        .enumerate()
        .map(|(c, (w, b))| format!("component {} weight {}:\n{}", c + 1, rational::format(w), ram(inst, b)))
        .collect::<Vec<_>>()
        .join("\n\n")
}
