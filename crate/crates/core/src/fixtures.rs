//! Canonical instances used throughout the tests, the CLI and the README.
//!
//! * `ex1`: 6 agents, 3 objects of capacity 4; `gamma` is perfect.
//! * `ex2`: 9 agents, 6 objects of capacity 4 where the egalitarian profile
//!   admits no supporting prices.
//! * `ex3`: 7 agents, 4 objects of capacity 4; `ex3_misreport` has agents
//!   a, b, c drop beta, gamma, delta respectively, which makes beta, gamma and
//!   delta perfect. Agent c's misreported row is `(1,1,1,0)`.
//! * `ex4`: 5 agents sharing one object of capacity 4; `ex4_extended` adds a
//!   perfect object accepted by a, b, c, d.

use crate::instance::Instance;

fn build(agents: &[&str], objects: &[(&str, u64)], rows: &[&str]) -> Instance {
    let acceptable = rows
        .iter()
        .map(|r| r.bytes().map(|b| b == b'1').collect())
        .collect();
    Instance::new(
        agents.iter().map(|s| s.to_string()).collect(),
        objects.iter().map(|(s, _)| s.to_string()).collect(),
        objects.iter().map(|&(_, q)| q).collect(),
        acceptable,
    )
    .expect("fixture is valid")
}

pub fn ex1() -> Instance {
    build(
        &["a", "b", "c", "d", "e", "f"],
        &[("alpha", 4), ("beta", 4), ("gamma", 4)],
        &["111", "111", "111", "111", "110", "100"],
    )
}

pub fn ex2() -> Instance {
    build(
        &["a", "b", "c", "d", "e", "f", "g", "h", "i"],
        &[
            ("alpha", 4),
            ("beta", 4),
            ("gamma", 4),
            ("delta", 4),
            ("epsilon", 4),
            ("zeta", 4),
        ],
        &[
            "110000", "110000", "110000", "011100", "010011", "101111", "101111", "101111",
            "101111",
        ],
    )
}

pub fn ex3() -> Instance {
    build(
        &["a", "b", "c", "d", "e", "f", "g"],
        &[("alpha", 4), ("beta", 4), ("gamma", 4), ("delta", 4)],
        &["1111", "1111", "1111", "1011", "1101", "1110", "1000"],
    )
}

pub fn ex3_misreport() -> Instance {
    build(
        &["a", "b", "c", "d", "e", "f", "g"],
        &[("alpha", 4), ("beta", 4), ("gamma", 4), ("delta", 4)],
        &["1011", "1101", "1110", "1011", "1101", "1110", "1000"],
    )
}

pub fn ex4() -> Instance {
    build(
        &["a", "b", "c", "d", "e"],
        &[("alpha", 4)],
        &["1", "1", "1", "1", "1"],
    )
}

pub fn ex4_extended() -> Instance {
    ex4()
        .perfect_extension(&[0, 1, 2, 3])
        .expect("valid extension")
}

/// All named fixtures with their canonical file stem.
pub fn all() -> Vec<(&'static str, Instance)> {
    vec![
        ("ex1", ex1()),
        ("ex2", ex2()),
        ("ex3", ex3()),
        ("ex3_misreport", ex3_misreport()),
        ("ex4", ex4()),
        ("ex4_extended", ex4_extended()),
    ]
}
