use std::collections::{BTreeMap, BTreeSet};

use super::GraphError;
use crate::model::{topological_sort, CausalModel};

/// Directed acyclic graph over variable names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dag {
    nodes: Vec<String>,
    parents: BTreeMap<String, Vec<String>>,
    children: BTreeMap<String, BTreeSet<String>>,
}

impl Dag {
    pub fn new<I, S>(nodes: Vec<String>, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (S, S)>,
        S: Into<String>,
    {
        let mut parents: BTreeMap<String, Vec<String>> = BTreeMap::new();
        let mut children: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for n in &nodes {
            if parents.insert(n.clone(), Vec::new()).is_some() {
                return Err(GraphError::DuplicateNode(n.clone()));
            }
            children.insert(n.clone(), BTreeSet::new());
        }
        for (from, to) in edges {
            let (from, to) = (from.into(), to.into());
            for end in [&from, &to] {
                if !parents.contains_key(end) {
                    return Err(GraphError::UnknownNode(end.clone()));
                }
            }
            if children.get_mut(&from).expect("checked").insert(to.clone()) {
                parents.get_mut(&to).expect("checked").push(from);
            }
        }
        let dag = Self {
            nodes,
            parents,
            children,
        };
        dag.sorted().map_err(GraphError::Cycle)?;
        Ok(dag)
    }

    /// Nodes in declaration order.
    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn contains(&self, node: &str) -> bool {
        self.parents.contains_key(node)
    }

    /// Parents in declaration order.
    pub fn parents(&self, node: &str) -> &[String] {
        self.parents.get(node).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Children in lexicographic order.
    pub fn children(&self, node: &str) -> impl Iterator<Item = &str> + '_ {
        self.children
            .get(node)
            .into_iter()
            .flat_map(|c| c.iter().map(String::as_str))
    }

    pub fn has_edge(&self, from: &str, to: &str) -> bool {
        self.children.get(from).is_some_and(|c| c.contains(to))
    }

    /// All edges, sorted by `(source, target)`.
    pub fn edges(&self) -> BTreeSet<(String, String)> {
        self.children
            .iter()
            .flat_map(|(from, cs)| cs.iter().map(move |to| (from.clone(), to.clone())))
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.children.values().map(BTreeSet::len).sum()
    }

    /// Lexicographically smallest topological order.
    pub fn topological_order(&self) -> Vec<String> {
        self.sorted().expect("Dag is acyclic by construction")
    }

    /// `true` when a directed path (possibly empty) leads from `from` to `to`.
    pub fn reaches(&self, from: &str, to: &str) -> bool {
        let mut stack = vec![from];
        let mut seen = BTreeSet::new();
        while let Some(node) = stack.pop() {
            if node == to {
                return true;
            }
            if seen.insert(node) {
                stack.extend(self.children(node));
            }
        }
        false
    }

    fn sorted(&self) -> Result<Vec<String>, Vec<String>> {
        let names: Vec<&str> = self.nodes.iter().map(String::as_str).collect();
        let index: BTreeMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (*n, i)).collect();
        let parents: Vec<Vec<usize>> = names
            .iter()
            .map(|n| self.parents[*n].iter().map(|p| index[p.as_str()]).collect())
            .collect();
        topological_sort(&names, &parents)
            .map(|order| order.into_iter().map(|i| self.nodes[i].clone()).collect())
    }
}

/// One node per variable and an edge `j -> i` for every declared parent `j` of `i`.
pub fn causal_diagram<M: CausalModel + ?Sized>(model: &M) -> Dag {
    let nodes: Vec<String> = model.variables().iter().map(|v| v.name.clone()).collect();
    let edges: Vec<(String, String)> = nodes
        .iter()
        .enumerate()
        .flat_map(|(i, child)| {
            model
                .parents_of(i)
                .iter()
                .map(move |p| (p.clone(), child.clone()))
        })
        .collect();
    Dag::new(nodes, edges).expect("validated models induce acyclic diagrams")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn rejects_cycles_and_unknown_nodes() {
        let err = Dag::new(names(&["A", "Y"]), [("A", "Y"), ("Y", "A")]).unwrap_err();
        assert!(matches!(err, GraphError::Cycle(_)));
        let err = Dag::new(names(&["A"]), [("A", "B")]).unwrap_err();
        assert_eq!(err, GraphError::UnknownNode("B".into()));
    }

    #[test]
    fn edges_and_order() {
        let dag = Dag::new(
            names(&["Y", "M", "A"]),
            [("A", "M"), ("M", "Y"), ("A", "Y")],
        )
        .unwrap();
        assert_eq!(dag.topological_order(), names(&["A", "M", "Y"]));
        assert_eq!(dag.edge_count(), 3);
        assert!(dag.reaches("A", "Y"));
        assert!(!dag.reaches("Y", "A"));
        assert_eq!(dag.parents("Y"), ["M", "A"]);
        assert_eq!(dag.children("A").collect::<Vec<_>>(), ["M", "Y"]);
    }

    #[test]
    fn isolated_node() {
        let dag = Dag::new(names(&["V"]), Vec::<(String, String)>::new()).unwrap();
        assert!(dag.edges().is_empty());
        assert_eq!(dag.topological_order(), ["V"]);
    }
}
