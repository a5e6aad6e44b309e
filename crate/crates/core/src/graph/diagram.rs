use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use super::{CausalPath, Dag};
use crate::tagged::{TaggedVar, World};

/// Diagram over tagged nodes: the causal diagram of a (possibly rewritten)
/// system. Edges lying on the intervened path are marked; literal inputs are
/// node annotations rather than nodes.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Diagram {
    nodes: Vec<TaggedVar>,
    edges: Vec<(TaggedVar, TaggedVar)>,
    path_edges: BTreeSet<(TaggedVar, TaggedVar)>,
    literals: BTreeMap<TaggedVar, Vec<(String, String)>>,
}

impl Diagram {
    pub fn new() -> Self {
        Self::default()
    }

    /// All-factual copy of `dag`.
    pub fn from_dag(dag: &Dag) -> Self {
        Self::from_dag_with_path(dag, None)
    }

    /// All-factual copy of `dag` with the edges of `path` marked.
    pub fn from_dag_with_path(dag: &Dag, path: Option<&CausalPath>) -> Self {
        let mut diagram = Self::new();
        for node in dag.topological_order() {
            diagram.add_node(TaggedVar::factual(node));
        }
        for node in dag.topological_order() {
            for parent in dag.parents(&node) {
                let on_path = path.is_some_and(|p| p.contains_edge(parent, &node));
                diagram.add_edge(TaggedVar::factual(parent), TaggedVar::factual(&node), on_path);
            }
        }
        diagram
    }

    pub fn add_node(&mut self, node: TaggedVar) {
        if !self.nodes.contains(&node) {
            self.nodes.push(node);
        }
    }

    pub fn add_edge(&mut self, from: TaggedVar, to: TaggedVar, on_path: bool) {
        self.add_node(from.clone());
        self.add_node(to.clone());
        let edge = (from, to);
        if !self.edges.contains(&edge) {
            self.edges.push(edge.clone());
        }
        if on_path {
            self.path_edges.insert(edge);
        }
    }

    /// Records that `node` reads the constant `value` in place of `variable`.
    pub fn annotate(&mut self, node: TaggedVar, variable: impl Into<String>, value: impl Into<String>) {
        self.add_node(node.clone());
        self.literals
            .entry(node)
            .or_default()
            .push((variable.into(), value.into()));
    }

    pub fn nodes(&self) -> &[TaggedVar] {
        &self.nodes
    }

    pub fn edges(&self) -> &[(TaggedVar, TaggedVar)] {
        &self.edges
    }

    pub fn path_edges(&self) -> &BTreeSet<(TaggedVar, TaggedVar)> {
        &self.path_edges
    }

    pub fn has_node(&self, node: &TaggedVar) -> bool {
        self.nodes.contains(node)
    }

    pub fn has_edge(&self, from: &TaggedVar, to: &TaggedVar) -> bool {
        self.edges.iter().any(|(f, t)| f == from && t == to)
    }

    pub fn is_path_edge(&self, from: &TaggedVar, to: &TaggedVar) -> bool {
        self.path_edges.contains(&(from.clone(), to.clone()))
    }

    /// Parents of `node`, in edge insertion order.
    pub fn parents(&self, node: &TaggedVar) -> Vec<&TaggedVar> {
        self.edges
            .iter()
            .filter(|(_, t)| t == node)
            .map(|(f, _)| f)
            .collect()
    }

    /// Literal inputs of `node` as `(variable, value)` pairs.
    pub fn literals(&self, node: &TaggedVar) -> &[(String, String)] {
        self.literals.get(node).map(Vec::as_slice).unwrap_or(&[])
    }

    /// `true` if the edge relation has no directed cycle.
    pub fn is_acyclic(&self) -> bool {
        let index = |n: &TaggedVar| self.nodes.iter().position(|m| m == n).expect("edge ends are nodes");
        let mut indegree = vec![0usize; self.nodes.len()];
        for (_, t) in &self.edges {
            indegree[index(t)] += 1;
        }
        let mut ready: Vec<usize> = (0..self.nodes.len()).filter(|&i| indegree[i] == 0).collect();
        let mut visited = 0;
        while let Some(i) = ready.pop() {
            visited += 1;
            for (f, t) in &self.edges {
                if index(f) == i {
                    let j = index(t);
                    indegree[j] -= 1;
                    if indegree[j] == 0 {
                        ready.push(j);
                    }
                }
            }
        }
        visited == self.nodes.len()
    }

    /// Graphviz rendering. Node ids are lowercase names with `_pi` for
    /// counterfactual copies; path edges are red and all others blue.
    pub fn to_dot(&self) -> String {
        let position = |n: &TaggedVar| self.nodes.iter().position(|m| m == n).expect("edge ends are nodes");
        let mut edges: Vec<&(TaggedVar, TaggedVar)> = self.edges.iter().collect();
        edges.sort_by_key(|(f, t)| (position(f), position(t)));

        let mut out = String::from("digraph G {\n");
        for node in &self.nodes {
            let mut attrs = vec![format!("label=\"{}\"", escape(&node.to_string()))];
            if matches!(node.world, World::Exogenous | World::ExogenousCopy) {
                attrs.push("shape=circle".into());
                attrs.push("style=dashed".into());
            }
            let literals = self.literals(node);
            if !literals.is_empty() {
                let text: Vec<String> = literals
                    .iter()
                    .map(|(var, value)| format!("{}'={}", var.to_lowercase(), value))
                    .collect();
                attrs.push(format!("xlabel=\"{}\"", escape(&text.join(", "))));
            }
            let _ = writeln!(out, "  \"{}\" [{}];", escape(&node.dot_id()), attrs.join(", "));
        }
        for (from, to) in edges {
            let color = if self.is_path_edge(from, to) { "red" } else { "blue" };
            let _ = writeln!(
                out,
                "  \"{}\" -> \"{}\" [color={color}];",
                escape(&from.dot_id()),
                escape(&to.dot_id())
            );
        }
        out.push_str("}\n");
        out
    }
}

impl From<&Dag> for Diagram {
    fn from(dag: &Dag) -> Self {
        Diagram::from_dag(dag)
    }
}

impl Dag {
    pub fn to_dot(&self) -> String {
        Diagram::from_dag(self).to_dot()
    }
}

/// DOT text for a diagram.
pub fn to_dot(diagram: &Diagram) -> String {
    diagram.to_dot()
}

fn escape(text: &str) -> String {
    text.replace('\\', "\\\\").replace('"', "\\\"")
}
