//! The assignment problem: agents, objects with integer capacities, and a
//! binary acceptability matrix.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// An immutable multi-unit assignment problem.
///
/// Rows of `acceptable` are agents, columns are objects. Capacities are
/// positive. Instances derived through [`Instance::with_rows`] (misreports)
/// may contain objects nobody accepts; every solver works with the effective
/// capacity `min(q_k, |R_Nk|)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Instance {
    agents: Vec<String>,
    objects: Vec<String>,
    capacities: Vec<u64>,
    acceptable: Vec<Vec<bool>>,
}

impl fmt::Debug for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Instance {:?} q={:?}", self.objects, self.capacities)?;
        for (i, row) in self.acceptable.iter().enumerate() {
            let bits: String = row.iter().map(|&b| if b { '1' } else { '0' }).collect();
            writeln!(f, "  {:>4} {}", self.agents[i], bits)?;
        }
        Ok(())
    }
}

impl Instance {
    /// Validated constructor: ids unique, capacities positive, every object
    /// accepted by someone.
    pub fn new(
        agents: Vec<String>,
        objects: Vec<String>,
        capacities: Vec<u64>,
        acceptable: Vec<Vec<bool>>,
    ) -> Result<Self> {
        let inst = Self::unchecked(agents, objects, capacities, acceptable)?;
        for k in 0..inst.m() {
            if inst.capacities[k] == 0 {
                return Err(Error::validation(
                    format!("objects[{}] ({})", k, inst.objects[k]),
                    "capacity must be a positive integer",
                ));
            }
            if inst.demand(k) == 0 {
                return Err(Error::validation(
                    format!("objects[{}] ({})", k, inst.objects[k]),
                    "no agent accepts this object",
                ));
            }
        }
        Ok(inst)
    }

    fn unchecked(
        agents: Vec<String>,
        objects: Vec<String>,
        capacities: Vec<u64>,
        acceptable: Vec<Vec<bool>>,
    ) -> Result<Self> {
        if agents.is_empty() {
            return Err(Error::validation("agents", "at least one agent is required"));
        }
        if objects.is_empty() {
            return Err(Error::validation("objects", "at least one object is required"));
        }
        check_unique(&agents, "agents")?;
        check_unique(&objects, "objects")?;
        if capacities.len() != objects.len() {
            return Err(Error::validation(
                "capacities",
                format!("expected {} capacities, got {}", objects.len(), capacities.len()),
            ));
        }
        if acceptable.len() != agents.len() {
            return Err(Error::validation(
                "acceptable",
                format!("expected {} rows, got {}", agents.len(), acceptable.len()),
            ));
        }
        for (i, row) in acceptable.iter().enumerate() {
            if row.len() != objects.len() {
                return Err(Error::validation(
                    format!("acceptable[{}] ({})", i, agents[i]),
                    format!("expected {} entries, got {}", objects.len(), row.len()),
                ));
            }
        }
        Ok(Instance {
            agents,
            objects,
            capacities,
            acceptable,
        })
    }

    /// Same agents, objects and capacities with a different acceptability
    /// matrix. Objects may end up with no acceptors.
    pub fn with_rows(&self, acceptable: Vec<Vec<bool>>) -> Result<Self> {
        Self::unchecked(
            self.agents.clone(),
            self.objects.clone(),
            self.capacities.clone(),
            acceptable,
        )
    }

    /// Keeps only the listed objects (in the given order).
    pub fn restrict_objects(&self, keep: &[usize]) -> Result<Self> {
        let objects = keep.iter().map(|&k| self.objects[k].clone()).collect();
        let capacities = keep.iter().map(|&k| self.capacities[k]).collect();
        let acceptable = self
            .acceptable
            .iter()
            .map(|row| keep.iter().map(|&k| row[k]).collect())
            .collect();
        Self::unchecked(self.agents.clone(), objects, capacities, acceptable)
    }

    pub fn n(&self) -> usize {
        self.agents.len()
    }

    pub fn m(&self) -> usize {
        self.objects.len()
    }

    pub fn agents(&self) -> &[String] {
        &self.agents
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn capacities(&self) -> &[u64] {
        &self.capacities
    }

    pub fn capacity(&self, k: usize) -> u64 {
        self.capacities[k]
    }

    pub fn accepts(&self, i: usize, k: usize) -> bool {
        self.acceptable[i][k]
    }

    pub fn row(&self, i: usize) -> &[bool] {
        &self.acceptable[i]
    }

    pub fn rows(&self) -> &[Vec<bool>] {
        &self.acceptable
    }

    /// Objects agent `i` accepts, in document order.
    pub fn acceptable_set(&self, i: usize) -> Vec<usize> {
        (0..self.m()).filter(|&k| self.acceptable[i][k]).collect()
    }

    /// `|R_iM|`
    pub fn row_size(&self, i: usize) -> usize {
        self.acceptable[i].iter().filter(|&&b| b).count()
    }

    /// `|R_Nk|`
    pub fn demand(&self, k: usize) -> usize {
        self.acceptable.iter().filter(|row| row[k]).count()
    }

    pub fn effective_capacity(&self, k: usize) -> u64 {
        self.capacities[k].min(self.demand(k) as u64)
    }

    /// True when every object has at least as many acceptors as units.
    pub fn is_demand_adequate(&self) -> bool {
        (0..self.m()).all(|k| self.demand(k) as u64 >= self.capacities[k])
    }

    pub fn agent_index(&self, id: &str) -> Option<usize> {
        self.agents.iter().position(|a| a == id)
    }

    pub fn object_index(&self, id: &str) -> Option<usize> {
        self.objects.iter().position(|o| o == id)
    }

    /// Maximum number of units that can be assigned: `Σ_k min(q_k, |R_Nk|)`.
    pub fn matching_size(&self) -> u64 {
        (0..self.m()).map(|k| self.effective_capacity(k)).sum()
    }

    /// Splits objects into perfect (`|R_Nk| = q_k`) and over-demanded ones.
    ///
    /// Objects whose demand fell below capacity (possible after a misreport)
    /// count as perfect: their effective capacity equals their demand.
    pub fn partition_objects(&self) -> ObjectPartition {
        let (perfect, over_demanded) =
            (0..self.m()).partition(|&k| self.demand(k) as u64 <= self.capacities[k]);
        ObjectPartition {
            perfect,
            over_demanded,
        }
    }

    /// Appends an object accepted exactly by `acceptors`, with capacity
    /// `|acceptors|`.
    pub fn perfect_extension(&self, acceptors: &[usize]) -> Result<Self> {
        let members: HashSet<usize> = acceptors.iter().copied().collect();
        if members.is_empty() {
            return Err(Error::Precondition(
                "a perfect extension needs at least one acceptor".into(),
            ));
        }
        if let Some(bad) = members.iter().find(|&&i| i >= self.n()) {
            return Err(Error::Precondition(format!("unknown agent index {bad}")));
        }
        let mut id = String::from("ext");
        let mut suffix = 1;
        while self.object_index(&id).is_some() {
            suffix += 1;
            id = format!("ext{suffix}");
        }
        let mut objects = self.objects.clone();
        objects.push(id);
        let mut capacities = self.capacities.clone();
        capacities.push(members.len() as u64);
        let acceptable = self
            .acceptable
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let mut row = row.clone();
                row.push(members.contains(&i));
                row
            })
            .collect();
        Self::unchecked(self.agents.clone(), objects, capacities, acceptable)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: InstanceDoc =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        doc.into_instance()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("instance document serializes")
    }

    pub fn to_doc(&self) -> InstanceDoc {
        let acceptable = self
            .agents
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let objs = self
                    .acceptable_set(i)
                    .into_iter()
                    .map(|k| self.objects[k].clone())
                    .collect();
                (a.clone(), objs)
            })
            .collect();
        InstanceDoc {
            agents: self.agents.clone(),
            objects: self
                .objects
                .iter()
                .zip(&self.capacities)
                .map(|(id, &q)| ObjectDoc {
                    id: id.clone(),
                    capacity: q as i64,
                })
                .collect(),
            acceptable: AcceptableDoc::Lists(acceptable),
        }
    }
}

fn check_unique(ids: &[String], what: &str) -> Result<()> {
    let mut seen = HashSet::new();
    for (i, id) in ids.iter().enumerate() {
        if !seen.insert(id) {
            return Err(Error::validation(
                format!("{what}[{i}]"),
                format!("duplicate id {id:?}"),
            ));
        }
    }
    Ok(())
}

/// Reads an instance document from a JSON string.
pub fn load_instance(text: &str) -> Result<Instance> {
    Instance::from_json(text)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDoc {
    pub agents: Vec<String>,
    pub objects: Vec<ObjectDoc>,
    pub acceptable: AcceptableDoc,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectDoc {
    pub id: String,
    pub capacity: i64,
}

/// Either `{agent: [object ids]}` or a 0/1 matrix with one row per agent.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AcceptableDoc {
    Lists(BTreeMap<String, Vec<String>>),
    Matrix(Vec<Vec<i64>>),
}

impl InstanceDoc {
    pub fn into_instance(self) -> Result<Instance> {
        let objects: Vec<String> = self.objects.iter().map(|o| o.id.clone()).collect();
        let mut capacities = Vec::with_capacity(self.objects.len());
        for (k, o) in self.objects.iter().enumerate() {
            if o.capacity <= 0 {
                return Err(Error::validation(
                    format!("objects[{}] ({})", k, o.id),
                    format!("capacity must be a positive integer, got {}", o.capacity),
                ));
            }
            capacities.push(o.capacity as u64);
        }
        check_unique(&self.agents, "agents")?;
        check_unique(&objects, "objects")?;
        let n = self.agents.len();
        let m = objects.len();
        let acceptable = match self.acceptable {
            AcceptableDoc::Lists(lists) => {
                let agent_pos: HashMap<&str, usize> = self
                    .agents
                    .iter()
                    .enumerate()
                    .map(|(i, a)| (a.as_str(), i))
                    .collect();
                let object_pos: HashMap<&str, usize> = objects
                    .iter()
                    .enumerate()
                    .map(|(k, o)| (o.as_str(), k))
                    .collect();
                let mut rows = vec![vec![false; m]; n];
                for (agent, objs) in &lists {
                    let i = *agent_pos.get(agent.as_str()).ok_or_else(|| {
                        Error::validation(format!("acceptable.{agent}"), "unknown agent")
                    })?;
                    for (j, obj) in objs.iter().enumerate() {
                        let k = *object_pos.get(obj.as_str()).ok_or_else(|| {
                            Error::validation(
                                format!("acceptable.{agent}[{j}]"),
                                format!("unknown object {obj:?}"),
                            )
                        })?;
                        rows[i][k] = true;
                    }
                }
                rows
            }
            AcceptableDoc::Matrix(matrix) => {
                let mut rows = Vec::with_capacity(matrix.len());
                for (i, row) in matrix.iter().enumerate() {
                    let mut bits = Vec::with_capacity(row.len());
                    for (k, &v) in row.iter().enumerate() {
                        match v {
                            0 => bits.push(false),
                            1 => bits.push(true),
                            other => {
                                return Err(Error::validation(
                                    format!("acceptable[{i}][{k}]"),
                                    format!("entry must be 0 or 1, got {other}"),
                                ))
                            }
                        }
                    }
                    rows.push(bits);
                }
                rows
            }
        };
        Instance::new(self.agents, objects, capacities, acceptable)
    }
}

/// Perfect and over-demanded objects, as object indices in document order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ObjectPartition {
    pub perfect: Vec<usize>,
    pub over_demanded: Vec<usize>,
}

impl ObjectPartition {
    pub fn is_perfect(&self, k: usize) -> bool {
        self.perfect.contains(&k)
    }
}

/// Expected number of acceptable units per agent.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UtilityProfile(pub Vec<Rational>);

impl UtilityProfile {
    pub fn values(&self) -> &[Rational] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> Rational {
        rational::sum(&self.0)
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.0.iter().map(rational::format).collect()
    }
}

impl std::ops::Index<usize> for UtilityProfile {
    type Output = Rational;
    fn index(&self, i: usize) -> &Rational {
        &self.0[i]
    }
}

impl fmt::Display for UtilityProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.to_strings().join(", "))
    }
}

/// Agents x objects matrix of shares.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AssignmentMatrix {
    entries: Vec<Vec<Rational>>,
}

impl AssignmentMatrix {
    pub fn zeros(n: usize, m: usize) -> Self {
        AssignmentMatrix {
            entries: vec![vec![Rational::zero(); m]; n],
        }
    }

    pub fn from_rows(entries: Vec<Vec<Rational>>) -> Self {
        AssignmentMatrix { entries }
    }

    pub fn from_binary(rows: &[Vec<bool>]) -> Self {
        AssignmentMatrix {
            entries: rows
                .iter()
                .map(|r| {
                    r.iter()
                        .map(|&b| if b { Rational::one() } else { Rational::zero() })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn m(&self) -> usize {
        self.entries.first().map_or(0, |r| r.len())
    }

    pub fn get(&self, i: usize, k: usize) -> &Rational {
        &self.entries[i][k]
    }

    pub fn set(&mut self, i: usize, k: usize, value: Rational) {
        self.entries[i][k] = value;
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.entries
    }

    pub fn row_sum(&self, i: usize) -> Rational {
        rational::sum(&self.entries[i])
    }

    pub fn column_sum(&self, k: usize) -> Rational {
        rational::sum(self.entries.iter().map(|r| &r[k]))
    }

    pub fn utilities(&self) -> UtilityProfile {
        UtilityProfile((0..self.n()).map(|i| self.row_sum(i)).collect())
    }

    pub fn is_binary(&self) -> bool {
        self.entries
            .iter()
            .flatten()
            .all(|v| v.is_zero() || v.is_one())
    }

    pub fn fractional_cells(&self) -> usize {
        self.entries
            .iter()
            .flatten()
            .filter(|v| !rational::is_integer(v))
            .count()
    }

    /// Checks bounds, individual rationality and (effective) column
    /// capacities against `inst`.
    pub fn check_feasible(&self, inst: &Instance) -> Result<()> {
        if self.n() != inst.n() || self.m() != inst.m() {
            return Err(Error::validation(
                "assignment",
                format!(
                    "shape {}x{} does not match instance {}x{}",
                    self.n(),
                    self.m(),
                    inst.n(),
                    inst.m()
                ),
            ));
        }
        for i in 0..self.n() {
            for k in 0..self.m() {
                let z = &self.entries[i][k];
                let loc = || format!("assignment[{}][{}]", inst.agents()[i], inst.objects()[k]);
                if *z < Rational::zero() || *z > Rational::one() {
                    return Err(Error::validation(loc(), format!("share {z} outside [0,1]")));
                }
                if !z.is_zero() && !inst.accepts(i, k) {
                    return Err(Error::validation(
                        loc(),
                        format!("positive share {z} of an unacceptable object"),
                    ));
                }
            }
        }
        for k in 0..self.m() {
            let total = self.column_sum(k);
            let cap = rational::int(inst.effective_capacity(k) as i64);
            if total > cap {
                return Err(Error::validation(
                    format!("assignment[*][{}]", inst.objects()[k]),
                    format!("column total {total} exceeds capacity {cap}"),
                ));
            }
        }
        Ok(())
    }

    /// `{agent: {object: "p/q"}}` with zero entries omitted.
    pub fn to_named(&self, inst: &Instance) -> BTreeMap<String, BTreeMap<String, String>> {
        let mut out = BTreeMap::new();
        for i in 0..self.n() {
            let mut row = BTreeMap::new();
            for k in 0..self.m() {
                if !self.entries[i][k].is_zero() {
                    row.insert(inst.objects()[k].clone(), rational::format(&self.entries[i][k]));
                }
            }
            out.insert(inst.agents()[i].clone(), row);
        }
        out
    }

    pub fn from_named(
        inst: &Instance,
        named: &BTreeMap<String, BTreeMap<String, String>>,
    ) -> Result<Self> {
        let mut z = Self::zeros(inst.n(), inst.m());
        for (agent, row) in named {
            let i = inst
                .agent_index(agent)
                .ok_or_else(|| Error::validation(format!("assignment.{agent}"), "unknown agent"))?;
            for (object, value) in row {
                let k = inst.object_index(object).ok_or_else(|| {
                    Error::validation(format!("assignment.{agent}.{object}"), "unknown object")
                })?;
                z.entries[i][k] = rational::parse(value)?;
            }
        }
        Ok(z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn ex1_document_loads() {
        let text = r#"{"agents":["a","b","c","d","e","f"],
            "objects":[{"id":"alpha","capacity":4},{"id":"beta","capacity":4},{"id":"gamma","capacity":4}],
            "acceptable":{"a":["alpha","beta","gamma"],"b":["alpha","beta","gamma"],
                          "c":["alpha","beta","gamma"],"d":["alpha","beta","gamma"],
                          "e":["alpha","beta"],"f":["alpha"]}}"#;
        let inst = load_instance(text).unwrap();
        assert_eq!(inst.n(), 6);
        assert_eq!(inst.m(), 3);
        assert_eq!(inst.capacities(), &[4, 4, 4]);
        assert_eq!(inst, fixtures::ex1());
        assert!(inst.is_demand_adequate());
    }

    #[test]
    fn zero_capacity_rejected() {
        let text = r#"{"agents":["a"],"objects":[{"id":"alpha","capacity":0}],
            "acceptable":{"a":["alpha"]}}"#;
        match load_instance(text) {
            Err(Error::Validation { location, .. }) => assert!(location.contains("alpha")),
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_and_invalid_documents() {
        assert!(matches!(load_instance("{"), Err(Error::Parse(_))));
        let empty_col = r#"{"agents":["a"],"objects":[{"id":"x","capacity":1},{"id":"y","capacity":1}],
            "acceptable":{"a":["x"]}}"#;
        assert!(matches!(load_instance(empty_col), Err(Error::Validation { .. })));
        let non_binary = r#"{"agents":["a"],"objects":[{"id":"x","capacity":1}],
            "acceptable":[[2]]}"#;
        match load_instance(non_binary) {
            Err(Error::Validation { location, .. }) => assert_eq!(location, "acceptable[0][0]"),
            other => panic!("{other:?}"),
        }
        let unknown = r#"{"agents":["a"],"objects":[{"id":"x","capacity":1}],
            "acceptable":{"a":["z"]}}"#;
        assert!(matches!(load_instance(unknown), Err(Error::Validation { .. })));
    }

    #[test]
    fn misreport_document_is_demand_adequate() {
        let inst = load_instance(&fixtures::ex3_misreport().to_json()).unwrap();
        let gamma = inst.object_index("gamma").unwrap();
        assert_eq!(inst.demand(gamma), 4);
        assert!(inst.is_demand_adequate());
    }

    #[test]
    fn partitions() {
        let p = fixtures::ex1().partition_objects();
        assert_eq!(p.perfect, vec![2]);
        assert_eq!(p.over_demanded, vec![0, 1]);
        assert!(fixtures::ex3().partition_objects().perfect.is_empty());
        let single = Instance::new(
            vec!["a".into(), "b".into()],
            vec!["x".into()],
            vec![2],
            vec![vec![true], vec![true]],
        )
        .unwrap();
        assert_eq!(single.partition_objects().perfect, vec![0]);
        let p3 = fixtures::ex3_misreport().partition_objects();
        assert_eq!(p3.perfect, vec![1, 2, 3]);
    }

    #[test]
    fn extensions() {
        let ex4 = fixtures::ex4();
        let ext = ex4.perfect_extension(&[0, 1, 2, 3]).unwrap();
        assert_eq!(ext.m(), 2);
        assert_eq!(ext.capacities(), &[4, 4]);
        let all = ex4.perfect_extension(&[0, 1, 2, 3, 4]).unwrap();
        assert_eq!(all.capacity(1), 5);
        let ex1 = fixtures::ex1().perfect_extension(&[0, 1]).unwrap();
        assert_eq!(ex1.capacity(3), 2);
        let part = ex1.partition_objects();
        assert!(part.is_perfect(3));
        assert_eq!(part.perfect, vec![2, 3]);
        assert!(ex4.perfect_extension(&[]).is_err());
    }

    #[test]
    fn matching_sizes() {
        assert_eq!(fixtures::ex1().matching_size(), 12);
        assert_eq!(fixtures::ex2().matching_size(), 24);
        let short = Instance::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec!["x".into()],
            vec![4],
            vec![vec![true]; 3],
        )
        .unwrap();
        assert_eq!(short.matching_size(), 3);
        assert!(!short.is_demand_adequate());
    }

    #[test]
    fn named_assignment_round_trip() {
        let inst = fixtures::ex4();
        let z = AssignmentMatrix::from_rows(vec![vec![rational::ratio(4, 5)]; 5]);
        let named = z.to_named(&inst);
        assert_eq!(named["a"]["alpha"], "4/5");
        assert_eq!(AssignmentMatrix::from_named(&inst, &named).unwrap(), z);
        assert!(z.check_feasible(&inst).is_ok());
        let mut over = z.clone();
        over.set(0, 0, rational::int(1));
        assert!(over.check_feasible(&inst).is_err());
    }
}
