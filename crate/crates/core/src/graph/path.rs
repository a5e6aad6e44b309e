use std::collections::BTreeSet;
use std::fmt;

use super::{Dag, GraphError};

/// Default cap on [`directed_paths`].
pub const MAX_PATHS: usize = 10_000;

/// A simple directed path `A -> ... -> Y` of a host diagram.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CausalPath {
    nodes: Vec<String>,
}

impl CausalPath {
    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    /// The intervened variable `A`.
    pub fn head(&self) -> &str {
        &self.nodes[0]
    }

    /// The outcome `Y`.
    pub fn tail(&self) -> &str {
        &self.nodes[self.nodes.len() - 1]
    }

    pub fn edges(&self) -> impl Iterator<Item = (&str, &str)> + '_ {
        self.nodes
            .windows(2)
            .map(|w| (w[0].as_str(), w[1].as_str()))
    }

    pub fn contains_edge(&self, from: &str, to: &str) -> bool {
        self.edges().any(|(f, t)| f == from && t == to)
    }

    pub fn contains(&self, node: &str) -> bool {
        self.nodes.iter().any(|n| n == node)
    }

    /// Successor of `node` on the path, if any.
    pub fn next_after(&self, node: &str) -> Option<&str> {
        let at = self.nodes.iter().position(|n| n == node)?;
        self.nodes.get(at + 1).map(String::as_str)
    }

    /// The path-descendants of the head: every node but the first.
    pub fn descendants(&self) -> &[String] {
        &self.nodes[1..]
    }
}

/// `A->M->Y`.
impl fmt::Display for CausalPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.nodes.join("->"))
    }
}

/// Splits `"A->M->Y"` (spaces tolerated) into node names.
pub fn parse_path_spec(text: &str) -> Result<Vec<String>, GraphError> {
    let nodes: Vec<String> = text.split("->").map(|s| s.trim().to_string()).collect();
    let is_ident = |s: &str| {
        let mut chars = s.chars();
        matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
            && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
    };
    if nodes.len() < 2 || !nodes.iter().all(|n| is_ident(n)) {
        return Err(GraphError::PathSyntax(text.to_string()));
    }
    Ok(nodes)
}

/// Checks that `nodes` is a simple directed path of `dag`.
pub fn validate_path<S: AsRef<str>>(dag: &Dag, nodes: &[S]) -> Result<CausalPath, GraphError> {
    if nodes.len() < 2 {
        return Err(GraphError::PathTooShort);
    }
    let nodes: Vec<String> = nodes.iter().map(|n| n.as_ref().to_string()).collect();
    if let Some(unknown) = nodes.iter().find(|n| !dag.contains(n)) {
        return Err(GraphError::UnknownNode(unknown.clone()));
    }
    let mut seen = BTreeSet::new();
    for n in &nodes {
        if !seen.insert(n.as_str()) {
            return Err(GraphError::RepeatedNode(n.clone()));
        }
    }
    for w in nodes.windows(2) {
        if !dag.has_edge(&w[0], &w[1]) {
            return Err(GraphError::NotAPath {
                from: w[0].clone(),
                to: w[1].clone(),
            });
        }
    }
    Ok(CausalPath { nodes })
}

/// All simple directed paths `from -> ... -> to`, lexicographic by node sequence.
pub fn directed_paths(dag: &Dag, from: &str, to: &str) -> Result<Vec<CausalPath>, GraphError> {
    directed_paths_with_limit(dag, from, to, MAX_PATHS)
}

pub fn directed_paths_with_limit(
    dag: &Dag,
    from: &str,
    to: &str,
    limit: usize,
) -> Result<Vec<CausalPath>, GraphError> {
    for node in [from, to] {
        if !dag.contains(node) {
            return Err(GraphError::UnknownNode(node.to_string()));
        }
    }
    let mut found = Vec::new();
    if from == to {
        return Ok(found);
    }
    // Children are visited in name order and no found path is a prefix of
    // another, so depth-first discovery order is lexicographic.
    let mut stack = vec![from.to_string()];
    extend(dag, to, limit, &mut stack, &mut found)?;
    Ok(found)
}

fn extend(
    dag: &Dag,
    to: &str,
    limit: usize,
    stack: &mut Vec<String>,
    found: &mut Vec<CausalPath>,
) -> Result<(), GraphError> {
    let last = stack.last().expect("stack starts non-empty").clone();
    for child in dag.children(&last) {
        if child == to {
            if found.len() == limit {
                return Err(GraphError::TooManyPaths { limit });
            }
            let mut nodes = stack.clone();
            nodes.push(child.to_string());
            found.push(CausalPath { nodes });
        } else if dag.reaches(child, to) {
            stack.push(child.to_string());
            extend(dag, to, limit, stack, found)?;
            stack.pop();
        }
    }
    Ok(())
}

/// Nodes receiving a counterfactual copy under a path intervention.
pub fn desc_pi(path: &CausalPath) -> BTreeSet<String> {
    path.descendants().iter().cloned().collect()
}

/// First interior node `W` of the path with a directed route to the outcome
/// whose first edge leaves the path at `W`.
pub fn find_recanting_witness(dag: &Dag, path: &CausalPath) -> Option<String> {
    let nodes = path.nodes();
    let outcome = path.tail();
    (1..nodes.len() - 1).find_map(|i| {
        let witness = &nodes[i];
        let on_path = &nodes[i + 1];
        dag.children(witness)
            .filter(|c| *c != on_path)
            .any(|c| dag.reaches(c, outcome))
            .then(|| witness.clone())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dag(nodes: &[&str], edges: &[(&str, &str)]) -> Dag {
        Dag::new(
            nodes.iter().map(|s| s.to_string()).collect(),
            edges.iter().copied(),
        )
        .unwrap()
    }

    fn mediation() -> Dag {
        dag(&["A", "M", "Y"], &[("A", "M"), ("M", "Y"), ("A", "Y")])
    }

    fn recanting() -> Dag {
        dag(
            &["X", "A", "M", "Y"],
            &[("X", "A"), ("A", "M"), ("M", "Y"), ("A", "Y")],
        )
    }

    fn seqs(paths: &[CausalPath]) -> Vec<String> {
        paths.iter().map(ToString::to_string).collect()
    }

    #[test]
    fn mediation_paths_are_ordered() {
        let paths = directed_paths(&mediation(), "A", "Y").unwrap();
        assert_eq!(seqs(&paths), ["A->M->Y", "A->Y"]);
        let paths = directed_paths(&recanting(), "X", "Y").unwrap();
        assert_eq!(seqs(&paths), ["X->A->M->Y", "X->A->Y"]);
    }

    #[test]
    fn disconnected_pair_has_no_paths() {
        let g = dag(&["A", "B"], &[]);
        assert!(directed_paths(&g, "A", "B").unwrap().is_empty());
        assert_eq!(
            directed_paths(&g, "A", "Z").unwrap_err(),
            GraphError::UnknownNode("Z".into())
        );
    }

    #[test]
    fn path_limit_is_enforced() {
        // a ladder with 2^k paths
        let mut nodes = vec!["S".to_string()];
        let mut edges = Vec::new();
        let mut prev = "S".to_string();
        for k in 0..14 {
            let (l, r, j) = (format!("L{k}"), format!("R{k}"), format!("J{k}"));
            edges.extend([
                (prev.clone(), l.clone()),
                (prev.clone(), r.clone()),
                (l.clone(), j.clone()),
                (r.clone(), j.clone()),
            ]);
            nodes.extend([l, r, j.clone()]);
            prev = j;
        }
        let g = Dag::new(nodes, edges).unwrap();
        assert_eq!(
            directed_paths(&g, "S", &prev).unwrap_err(),
            GraphError::TooManyPaths { limit: MAX_PATHS }
        );
        assert_eq!(directed_paths(&g, "S", "J9").unwrap().len(), 1024);
    }

    #[test]
    fn validation_errors() {
        let g = mediation();
        assert!(validate_path(&g, &["A", "M", "Y"]).is_ok());
        assert_eq!(
            validate_path(&g, &["M", "A", "Y"]).unwrap_err(),
            GraphError::NotAPath {
                from: "M".into(),
                to: "A".into()
            }
        );
        assert_eq!(
            validate_path(&g, &["A", "A"]).unwrap_err(),
            GraphError::RepeatedNode("A".into())
        );
        assert_eq!(validate_path(&g, &["A"]).unwrap_err(), GraphError::PathTooShort);
    }

    #[test]
    fn path_descendants() {
        let g = recanting();
        let p = validate_path(&g, &["X", "A", "Y"]).unwrap();
        assert_eq!(desc_pi(&p), ["A", "Y"].map(String::from).into());
        let p = validate_path(&mediation(), &["A", "M", "Y"]).unwrap();
        assert_eq!(desc_pi(&p), ["M", "Y"].map(String::from).into());
        let p = validate_path(&mediation(), &["A", "Y"]).unwrap();
        assert_eq!(desc_pi(&p), ["Y"].map(String::from).into());
    }

    #[test]
    fn witnesses() {
        let g = recanting();
        let p = validate_path(&g, &["X", "A", "Y"]).unwrap();
        assert_eq!(find_recanting_witness(&g, &p), Some("A".into()));
        let p = validate_path(&g, &["X", "A", "M", "Y"]).unwrap();
        // A -> Y leaves the path at A
        assert_eq!(find_recanting_witness(&g, &p), Some("A".into()));

        let chain = dag(&["X", "A", "Y"], &[("X", "A"), ("A", "Y")]);
        let p = validate_path(&chain, &["X", "A", "Y"]).unwrap();
        assert_eq!(find_recanting_witness(&chain, &p), None);

        let p = validate_path(&mediation(), &["A", "Y"]).unwrap();
        assert_eq!(find_recanting_witness(&mediation(), &p), None);
    }

    #[test]
    fn path_syntax() {
        assert_eq!(parse_path_spec("A->M->Y").unwrap(), ["A", "M", "Y"]);
        assert_eq!(parse_path_spec(" A -> M->Y ").unwrap(), ["A", "M", "Y"]);
        assert!(parse_path_spec("A").is_err());
        assert!(parse_path_spec("A->").is_err());
        assert!(parse_path_spec("A=>Y").is_err());
    }
}
