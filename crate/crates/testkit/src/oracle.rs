use std::collections::BTreeMap;

use pathfx::sample::Distribution;
use pathfx::{CausalModel, Domain, Probability, Scm, TaggedVar};

/// Sparse joint law produced by the oracles.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleTable<P> {
    pub columns: Vec<TaggedVar>,
    pub domains: Vec<Domain>,
    /// Domain indices per column; zero-probability tuples may be missing.
    pub probs: BTreeMap<Vec<usize>, P>,
}

impl<P: Probability> OracleTable<P> {
    /// Law of one column, in domain order.
    pub fn marginal(&self, column: &TaggedVar) -> Vec<P> {
        let at = self
            .columns
            .iter()
            .position(|c| c == column)
            .unwrap_or_else(|| panic!("oracle has no column {column}"));
        let mut out = vec![P::zero(); self.domains[at].len()];
        for (digits, p) in &self.probs {
            out[digits[at]] = out[digits[at]].clone() + p.clone();
        }
        out
    }

    pub fn total(&self) -> P {
        self.probs.values().fold(P::zero(), |a, p| a + p.clone())
    }
}

impl<P: Probability> Distribution for OracleTable<P> {
    fn columns(&self) -> &[TaggedVar] {
        &self.columns
    }

    fn domains(&self) -> &[Domain] {
        &self.domains
    }

    fn support(&self) -> Vec<(Vec<usize>, f64)> {
        self.probs.iter().map(|(d, p)| (d.clone(), p.to_f64())).collect()
    }
}

/// Exact law of the factual variables and their counterfactual copies under
/// the path intervention `nodes` with head value `value`, by summing over
/// every value of the noise `U` and its independent copy `U'`.
///
/// Each copy `v_k'` evaluates the original mechanism of `k` with fresh noise;
/// for parent `j` it reads `value` if `j -> k` is the first edge of the path,
/// `v_j'` if `j -> k` is a later path edge, and factual `v_j` otherwise. Copies
/// exist for the path nodes after the head, or for every variable with
/// `keep_all`.
///
/// Columns: factual variables in topological order, then copies in
/// topological order. Identical partial assignments are merged after each
/// variable, so the cost is bounded by the number of distinct states rather
/// than the size of the noise product.
pub fn two_world_oracle<P: Probability>(scm: &Scm<P>, nodes: &[String], value: &str, keep_all: bool) -> OracleTable<P> {
    let vars = scm.variables();
    let index = |name: &str| scm.variable_index(name).unwrap_or_else(|| panic!("unknown {name}"));
    let order = scm.topological_order();
    let head = index(&nodes[0]);
    let head_value = vars[head].domain.index_of(value).expect("value in head domain");
    let path: Vec<usize> = nodes.iter().map(|n| index(n)).collect();
    let on_path = |j: usize, k: usize| path.windows(2).any(|w| w[0] == j && w[1] == k);
    let copies: Vec<usize> = order
        .iter()
        .copied()
        .filter(|&k| keep_all || path[1..].contains(&k))
        .collect();

    let mut columns: Vec<TaggedVar> = order.iter().map(|&i| TaggedVar::factual(&vars[i].name)).collect();
    columns.extend(copies.iter().map(|&k| TaggedVar::pi(&vars[k].name)));
    let mut domains: Vec<Domain> = order.iter().map(|&i| vars[i].domain.clone()).collect();
    domains.extend(copies.iter().map(|&k| vars[k].domain.clone()));
    let factual_col = |i: usize| order.iter().position(|&o| o == i).unwrap();
    let copy_col = |k: usize| order.len() + copies.iter().position(|&c| c == k).unwrap();

    let mut states: BTreeMap<Vec<usize>, P> = BTreeMap::new();
    states.insert(Vec::new(), P::one());
    let steps = order.iter().map(|&i| (i, false)).chain(copies.iter().map(|&k| (k, true)));
    for (k, counterfactual) in steps {
        let mech = scm.mechanism(&vars[k].name).unwrap();
        let noise = &scm.noises()[mech.noise_index()];
        let mut next: BTreeMap<Vec<usize>, P> = BTreeMap::new();
        for (state, p) in &states {
            let parents: Vec<usize> = mech
                .parents()
                .iter()
                .map(|name| {
                    let j = index(name);
                    if !counterfactual || !on_path(j, k) {
                        state[factual_col(j)]
                    } else if j == head {
                        head_value
                    } else {
                        state[copy_col(j)]
                    }
                })
                .collect();
            for (u, pu) in noise.dist.iter().enumerate() {
                if pu.is_zero() {
                    continue;
                }
                let mut extended = state.clone();
                extended.push(mech.eval(&parents, u));
                let slot = next.entry(extended).or_insert_with(P::zero);
                *slot = slot.clone() + p.clone() * pu.clone();
            }
        }
        states = next;
    }
    OracleTable {
        columns,
        domains,
        probs: states,
    }
}

/// Every simple directed path `from -> ... -> to`, found by extending
/// partial paths one edge at a time. Sorted lexicographically.
pub fn all_paths_oracle<M: CausalModel + ?Sized>(model: &M, from: &str, to: &str) -> Vec<Vec<String>> {
    let vars = model.variables();
    let mut children: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for (i, v) in vars.iter().enumerate() {
        for p in model.parents_of(i) {
            children.entry(p.as_str()).or_default().push(v.name.as_str());
        }
    }
    let mut out = Vec::new();
    let mut frontier: Vec<Vec<&str>> = vec![vec![from]];
    while let Some(partial) = frontier.pop() {
        let last = *partial.last().unwrap();
        if last == to && partial.len() > 1 {
            out.push(partial.iter().map(|s| s.to_string()).collect());
            continue;
        }
        for &c in children.get(last).into_iter().flatten() {
            if !partial.contains(&c) {
                let mut longer = partial.clone();
                longer.push(c);
                frontier.push(longer);
            }
        }
    }
    out.sort();
    out
}

/// First interior path node with an edge leaving the path that still leads
/// to the path's last node, using a transitive-closure matrix.
pub fn witness_oracle<M: CausalModel + ?Sized>(model: &M, nodes: &[String]) -> Option<String> {
    let n = model.variables().len();
    let index = |name: &str| model.variable_index(name).unwrap();
    let mut reach = vec![vec![false; n]; n];
    for (i, row) in reach.iter_mut().enumerate() {
        row[i] = true;
    }
    let mut edge = vec![vec![false; n]; n];
    for k in 0..n {
        for p in model.parents_of(k) {
            let j = index(p);
            edge[j][k] = true;
            reach[j][k] = true;
        }
    }
    for m in 0..n {
        for i in 0..n {
            for j in 0..n {
                if reach[i][m] && reach[m][j] {
                    reach[i][j] = true;
                }
            }
        }
    }
    let tail = index(nodes.last()?);
    (1..nodes.len().saturating_sub(1)).find_map(|i| {
        let w = index(&nodes[i]);
        let next = index(&nodes[i + 1]);
        (0..n)
            .any(|c| edge[w][c] && c != next && reach[c][tail])
            .then(|| nodes[i].clone())
    })
}
