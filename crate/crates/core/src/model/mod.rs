//! Finite discrete causal models.
//!
//! Two representations are supported:
//!
//! * [`Scm`] – the full structural model: endogenous variables, one finite
//!   exogenous noise per variable, and a deterministic mechanism table
//!   `v_i <- f_i(pa_i, u_i)`.
//! * [`CptModel`] – the probabilistic level: a DAG with a conditional
//!   probability table `p(v_i | pa(i))` per variable.
//!
//! Both are validated on construction and immutable afterwards. Parents listed
//! in a mechanism or table are graph parents, even when the table ignores them.

mod cpt;
mod decompose;
mod scm;

pub use cpt::{Cpt, CptModel, CptSpec, CptTable};
pub use decompose::{ChannelRule, DecomposedScm, EdgeChannel};
pub use scm::{Mechanism, MechanismSpec, MechanismTable, NoiseSpec, Scm, MAX_NOISE_STATES};

use std::collections::{BTreeMap, BTreeSet, HashSet};

use thiserror::Error;

use crate::scalar::Probability;

/// Input tolerance on probability vectors that must sum to one.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("domain of `{0}` is empty")]
    EmptyDomain(String),
    #[error("domain of `{owner}` lists `{value}` twice")]
    DuplicateValue { owner: String, value: String },
    #[error("name `{0}` is declared more than once")]
    DuplicateName(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("unknown noise `{0}`")]
    UnknownNoise(String),
    #[error("`{child}` lists parent `{parent}` more than once")]
    DuplicateParent { child: String, parent: String },
    #[error("no conditional probability table for `{0}`")]
    MissingCpt(String),
    #[error("more than one conditional probability table for `{0}`")]
    DuplicateCpt(String),
    #[error("no mechanism for `{0}`")]
    MissingMechanism(String),
    #[error("more than one mechanism for `{0}`")]
    DuplicateMechanism(String),
    #[error("noise `{noise}` feeds both `{first}` and `{second}`")]
    SharedNoise {
        noise: String,
        first: String,
        second: String,
    },
    #[error("noise `{0}` is not used by any mechanism")]
    UnusedNoise(String),
    #[error("`{owner}`: value `{value}` is not in the domain of `{variable}`")]
    ValueOutOfDomain {
        owner: String,
        variable: String,
        value: String,
    },
    #[error("`{owner}`: row ({}) has {found} entries, expected {expected}", .row.join(","))]
    WrongRowLength {
        owner: String,
        row: Vec<String>,
        expected: usize,
        found: usize,
    },
    #[error("`{owner}`: row ({}) has a negative probability", .row.join(","))]
    NegativeProbability { owner: String, row: Vec<String> },
    #[error("`{owner}`: row ({}) sums to {sum}, not 1", .row.join(","))]
    RowNotNormalized {
        owner: String,
        row: Vec<String>,
        sum: f64,
    },
    #[error("`{owner}`: row ({}) is given more than once", .row.join(","))]
    DuplicateRow { owner: String, row: Vec<String> },
    #[error("`{owner}`: input tuple ({}) has {found} values, expected {expected}", .row.join(","))]
    WrongArity {
        owner: String,
        row: Vec<String>,
        expected: usize,
        found: usize,
    },
    #[error("table for `{child}` is missing parent combination ({})", .row.join(","))]
    IncompleteCptTable { child: String, row: Vec<String> },
    #[error("mechanism for `{child}` is missing input ({};{})", .parents.join(","), .noise)]
    IncompleteMechanismTable {
        child: String,
        parents: Vec<String>,
        noise: String,
    },
    #[error("dense table for `{owner}` has {found} entries, expected {expected}")]
    WrongTableSize {
        owner: String,
        expected: usize,
        found: usize,
    },
    #[error("state space of `{0}` is too large to tabulate")]
    TableTooLarge(String),
    #[error("cycle detected: {}", .0.join(" -> "))]
    CycleDetected(Vec<String>),
    #[error("channel {source_var} -> {target} carries a counterfactual value and cannot be recomposed into a single-world model")]
    CrossWorldChannel { source_var: String, target: String },
    #[error("no edge {source_var} -> {target} in the causal diagram")]
    UnknownChannel { source_var: String, target: String },
}

/// An ordered set of distinct symbolic labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Domain {
    values: Vec<String>,
}

impl Domain {
    /// `owner` only labels errors.
    pub fn new(owner: &str, values: Vec<String>) -> Result<Self, ModelError> {
        if values.is_empty() {
            return Err(ModelError::EmptyDomain(owner.to_string()));
        }
        let mut seen = HashSet::new();
        for v in &values {
            if !seen.insert(v.as_str()) {
                return Err(ModelError::DuplicateValue {
                    owner: owner.to_string(),
                    value: v.clone(),
                });
            }
        }
        Ok(Self { values })
    }

    pub fn from_labels<I, S>(owner: &str, labels: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::new(owner, labels.into_iter().map(Into::into).collect())
    }

    /// `{0, 1}`.
    pub fn binary() -> Self {
        Self {
            values: vec!["0".into(), "1".into()],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[String] {
        &self.values
    }

    pub fn label(&self, index: usize) -> &str {
        &self.values[index]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.values.iter().position(|v| v == label)
    }

    pub fn contains(&self, label: &str) -> bool {
        self.index_of(label).is_some()
    }
}

/// An endogenous variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableSpec {
    pub name: String,
    pub domain: Domain,
}

impl VariableSpec {
    pub fn new(name: impl Into<String>, domain: Domain) -> Self {
        Self {
            name: name.into(),
            domain,
        }
    }

    pub fn binary(name: impl Into<String>) -> Self {
        Self::new(name, Domain::binary())
    }
}

/// Read access shared by [`Scm`] and [`CptModel`].
pub trait CausalModel {
    fn variables(&self) -> &[VariableSpec];

    /// Parent names of the variable at `index`, in declared order.
    fn parents_of(&self, index: usize) -> &[String];

    fn variable_index(&self, name: &str) -> Option<usize> {
        self.variables().iter().position(|v| v.name == name)
    }

    fn variable(&self, name: &str) -> Option<&VariableSpec> {
        self.variables().iter().find(|v| v.name == name)
    }

    fn domain_of(&self, name: &str) -> Option<&Domain> {
        self.variable(name).map(|v| &v.domain)
    }

    /// Lexicographically smallest topological order, as variable indices.
    fn topological_order(&self) -> Vec<usize> {
        let names: Vec<&str> = self.variables().iter().map(|v| v.name.as_str()).collect();
        let parents: Vec<Vec<usize>> = (0..names.len())
            .map(|i| {
                self.parents_of(i)
                    .iter()
                    .filter_map(|p| names.iter().position(|n| n == p))
                    .collect()
            })
            .collect();
        topological_sort(&names, &parents).expect("validated models are acyclic")
    }
}

/// Either kind of model.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyModel<P: Probability> {
    Cpt(CptModel<P>),
    Scm(Scm<P>),
}

impl<P: Probability> AnyModel<P> {
    /// The probabilistic-level view; structural models are marginalized over noise.
    pub fn to_cpt(&self) -> CptModel<P> {
        match self {
            AnyModel::Cpt(model) => model.clone(),
            AnyModel::Scm(scm) => scm.to_cpt(),
        }
    }

    pub fn as_scm(&self) -> Option<&Scm<P>> {
        match self {
            AnyModel::Scm(scm) => Some(scm),
            AnyModel::Cpt(_) => None,
        }
    }

    pub fn as_causal_model(&self) -> &dyn CausalModel {
        match self {
            AnyModel::Cpt(model) => model,
            AnyModel::Scm(scm) => scm,
        }
    }
}

/// Kahn's algorithm with a name-ordered ready set. On failure returns one cycle
/// as a closed walk of names (first name repeated at the end).
pub(crate) fn topological_sort(
    names: &[&str],
    parents: &[Vec<usize>],
) -> Result<Vec<usize>, Vec<String>> {
    let n = names.len();
    let mut indegree: Vec<usize> = parents.iter().map(Vec::len).collect();
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (child, ps) in parents.iter().enumerate() {
        for &p in ps {
            children[p].push(child);
        }
    }
    let mut ready: BTreeSet<(&str, usize)> = (0..n)
        .filter(|&i| indegree[i] == 0)
        .map(|i| (names[i], i))
        .collect();
    let mut order = Vec::with_capacity(n);
    while let Some(first) = ready.pop_first() {
        let node = first.1;
        order.push(node);
        for &c in &children[node] {
            indegree[c] -= 1;
            if indegree[c] == 0 {
                ready.insert((names[c], c));
            }
        }
    }
    if order.len() == n {
        return Ok(order);
    }
    // Every remaining node has a remaining parent; walk parents until a repeat.
    let remaining: BTreeSet<usize> = (0..n).filter(|&i| indegree[i] > 0).collect();
    let start = *remaining
        .iter()
        .min_by_key(|&&i| names[i])
        .expect("a cycle leaves nodes behind");
    let mut walk = vec![start];
    let mut position: BTreeMap<usize, usize> = BTreeMap::from([(start, 0)]);
    let mut current = start;
    loop {
        let next = *parents[current]
            .iter()
            .filter(|p| remaining.contains(p))
            .min_by_key(|&&p| names[p])
            .expect("remaining nodes keep a remaining parent");
        if let Some(&at) = position.get(&next) {
            let mut cycle: Vec<String> = walk[at..].iter().rev().map(|&i| names[i].to_string()).collect();
            cycle.push(cycle[0].clone());
            return Err(cycle);
        }
        position.insert(next, walk.len());
        walk.push(next);
        current = next;
    }
}

pub(crate) fn check_unique_names<'a>(
    names: impl IntoIterator<Item = &'a str>,
) -> Result<(), ModelError> {
    let mut seen = HashSet::new();
    for name in names {
        if !seen.insert(name) {
            return Err(ModelError::DuplicateName(name.to_string()));
        }
    }
    Ok(())
}

/// Checks a probability vector: entries non-negative, sum within tolerance of one.
pub(crate) fn check_distribution<P: Probability>(
    owner: &str,
    row: &[String],
    probs: &[P],
    expected_len: usize,
) -> Result<(), ModelError> {
    if probs.len() != expected_len {
        return Err(ModelError::WrongRowLength {
            owner: owner.to_string(),
            row: row.to_vec(),
            expected: expected_len,
            found: probs.len(),
        });
    }
    if probs.iter().any(|p| p.is_negative()) {
        return Err(ModelError::NegativeProbability {
            owner: owner.to_string(),
            row: row.to_vec(),
        });
    }
    let total = crate::scalar::sum(probs).to_f64();
    let off = (total - 1.0).abs();
    if off.is_nan() || off > NORMALIZATION_TOLERANCE {
        return Err(ModelError::RowNotNormalized {
            owner: owner.to_string(),
            row: row.to_vec(),
            sum: total,
        });
    }
    Ok(())
}

/// Resolves parent names to variable indices, rejecting unknown or repeated names.
pub(crate) fn resolve_parents(
    child: &str,
    parents: &[String],
    variables: &[VariableSpec],
) -> Result<Vec<usize>, ModelError> {
    let mut seen = HashSet::new();
    parents
        .iter()
        .map(|p| {
            if !seen.insert(p.as_str()) {
                return Err(ModelError::DuplicateParent {
                    child: child.to_string(),
                    parent: p.clone(),
                });
            }
            variables
                .iter()
                .position(|v| &v.name == p)
                .ok_or_else(|| ModelError::UnknownVariable(p.clone()))
        })
        .collect()
}

/// Labels of a parent tuple given by domain indices.
pub(crate) fn labels(domains: &[&Domain], digits: &[usize]) -> Vec<String> {
    domains
        .iter()
        .zip(digits)
        .map(|(d, &i)| d.label(i).to_string())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domain_rejects_duplicates_and_empty() {
        assert!(matches!(
            Domain::from_labels("X", ["a", "b", "a"]),
            Err(ModelError::DuplicateValue { .. })
        ));
        assert!(matches!(
            Domain::from_labels("X", Vec::<String>::new()),
            Err(ModelError::EmptyDomain(_))
        ));
        let d = Domain::from_labels("X", ["lo", "mid", "hi"]).unwrap();
        assert_eq!(d.index_of("hi"), Some(2));
        assert_eq!(d.label(1), "mid");
    }

    #[test]
    fn topological_sort_is_lexicographic() {
        // C has no parents, B <- C, A has no parents
        let names = ["C", "B", "A"];
        let parents = vec![vec![], vec![0], vec![]];
        let order = topological_sort(&names, &parents).unwrap();
        let named: Vec<&str> = order.iter().map(|&i| names[i]).collect();
        assert_eq!(named, ["A", "C", "B"]);
    }

    #[test]
    fn cycle_is_named() {
        let names = ["A", "Y", "Z"];
        let parents = vec![vec![1], vec![0], vec![]];
        let cycle = topological_sort(&names, &parents).unwrap_err();
        assert_eq!(cycle.first(), cycle.last());
        assert_eq!(cycle.len(), 3);
        assert!(cycle.contains(&"A".to_string()) && cycle.contains(&"Y".to_string()));
    }
}
