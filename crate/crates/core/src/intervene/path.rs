use super::{add_exogenous, InterventionDiagram, InterventionError};
use crate::graph::{causal_diagram, parse_path_spec, validate_path, CausalPath, Diagram};
use crate::model::{CausalModel, CptModel, ModelError};
use crate::scalar::Probability;
use crate::tagged::{TaggedVar, World};

/// `π(A = a')`: the path and the value its head transmits along it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathIntervention {
    pub path: CausalPath,
    pub value: String,
}

impl PathIntervention {
    /// Validates `nodes` as a path of the model's diagram and `value` against the head's domain.
    pub fn new<M, S>(model: &M, nodes: &[S], value: impl Into<String>) -> Result<Self, InterventionError>
    where
        M: CausalModel + ?Sized,
        S: AsRef<str>,
    {
        let path = validate_path(&causal_diagram(model), nodes)?;
        let value = value.into();
        check_value(model, &path, &value)?;
        Ok(Self { path, value })
    }

    /// Like [`PathIntervention::new`] with the path written `A->M->Y`.
    pub fn parse<M: CausalModel + ?Sized>(
        model: &M,
        path: &str,
        value: impl Into<String>,
    ) -> Result<Self, InterventionError> {
        let nodes = parse_path_spec(path)?;
        Self::new(model, &nodes, value)
    }
}

fn check_value<M: CausalModel + ?Sized>(model: &M, path: &CausalPath, value: &str) -> Result<(), ModelError> {
    let head = path.head();
    let domain = model
        .domain_of(head)
        .ok_or_else(|| ModelError::UnknownVariable(head.to_string()))?;
    if domain.contains(value) {
        Ok(())
    } else {
        Err(ModelError::ValueOutOfDomain {
            owner: head.to_string(),
            variable: head.to_string(),
            value: value.to_string(),
        })
    }
}

/// What a counterfactual copy `v_k^π` reads for its parent `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EdgeRule {
    /// `(j, k)` is off the path: the factual `v_j`.
    FactualCopy,
    /// `j` is the path head and `(j, k)` is on the path: the constant `a'`.
    Literal(String),
    /// `(j, k)` is on the path and `j` is not its head: `v_j^π`.
    CounterfactualCopy,
}

/// Two-world system: the factual model plus counterfactual copies of the
/// path-descendants of the head, each driven by an independent noise copy.
#[derive(Debug, Clone, PartialEq)]
pub struct PathIntervenedModel<P> {
    base: CptModel<P>,
    path: CausalPath,
    value: String,
    /// Base-variable indices with a counterfactual copy, in topological order.
    counterfactuals: Vec<usize>,
    /// Per counterfactual, one rule per parent in declared parent order.
    rules: Vec<Vec<EdgeRule>>,
    keep_all: bool,
}

/// Rewrites `model` under `π(a')`. With `keep_all`, every variable receives a
/// counterfactual copy (off-path copies just redraw from their own table);
/// otherwise only the path-descendants of the head do.
pub fn apply_path<P: Probability>(
    model: &CptModel<P>,
    intervention: &PathIntervention,
    keep_all: bool,
) -> Result<PathIntervenedModel<P>, InterventionError> {
    let path = validate_path(&causal_diagram(model), intervention.path.nodes())?;
    check_value(model, &path, &intervention.value)?;
    let counterfactuals: Vec<usize> = model
        .topological_order()
        .into_iter()
        .filter(|&i| keep_all || path.descendants().contains(&model.variables()[i].name))
        .collect();
    let rules = counterfactuals
        .iter()
        .map(|&k| {
            let child = &model.variables()[k].name;
            model
                .parents_of(k)
                .iter()
                .map(|j| {
                    if !path.contains_edge(j, child) {
                        EdgeRule::FactualCopy
                    } else if j == path.head() {
                        EdgeRule::Literal(intervention.value.clone())
                    } else {
                        EdgeRule::CounterfactualCopy
                    }
                })
                .collect()
        })
        .collect();
    Ok(PathIntervenedModel {
        base: model.clone(),
        path,
        value: intervention.value.clone(),
        counterfactuals,
        rules,
        keep_all,
    })
}

impl<P: Probability> PathIntervenedModel<P> {
    pub fn base(&self) -> &CptModel<P> {
        &self.base
    }

    pub fn path(&self) -> &CausalPath {
        &self.path
    }

    pub fn value(&self) -> &str {
        &self.value
    }

    pub fn keep_all(&self) -> bool {
        self.keep_all
    }

    /// Base-variable indices with a counterfactual copy, in topological order.
    pub fn counterfactual_indices(&self) -> &[usize] {
        &self.counterfactuals
    }

    pub fn counterfactuals(&self) -> Vec<&str> {
        self.counterfactuals
            .iter()
            .map(|&i| self.base.variables()[i].name.as_str())
            .collect()
    }

    pub fn is_counterfactual(&self, name: &str) -> bool {
        self.counterfactuals().contains(&name)
    }

    /// Rules of `v_k^π`, aligned with `k`'s declared parents.
    pub fn rules_of(&self, name: &str) -> Option<&[EdgeRule]> {
        let index = self.base.variable_index(name)?;
        let slot = self.counterfactuals.iter().position(|&k| k == index)?;
        Some(&self.rules[slot])
    }

    /// Rule for the edge `parent -> child^π`.
    pub fn rule(&self, parent: &str, child: &str) -> Option<&EdgeRule> {
        let index = self.base.variable_index(child)?;
        let axis = self.base.parents_of(index).iter().position(|p| p == parent)?;
        self.rules_of(child).map(|rules| &rules[axis])
    }

    /// Factual columns in topological order, then counterfactual columns.
    pub fn columns(&self) -> Vec<TaggedVar> {
        let vars = self.base.variables();
        self.base
            .topological_order()
            .into_iter()
            .map(|i| TaggedVar::factual(&vars[i].name))
            .chain(self.counterfactuals.iter().map(|&k| TaggedVar::pi(&vars[k].name)))
            .collect()
    }

    /// Counterfactual columns only.
    pub fn counterfactual_columns(&self) -> Vec<TaggedVar> {
        self.counterfactuals().into_iter().map(TaggedVar::pi).collect()
    }
}

impl<P: Probability> InterventionDiagram for PathIntervenedModel<P> {
    fn intervention_diagram(&self, augmented: bool) -> Diagram {
        let mut diagram = Diagram::from_dag(&causal_diagram(&self.base));
        let vars = self.base.variables();
        for (slot, &k) in self.counterfactuals.iter().enumerate() {
            let child = TaggedVar::pi(&vars[k].name);
            diagram.add_node(child.clone());
            for (parent, rule) in self.base.parents_of(k).iter().zip(&self.rules[slot]) {
                match rule {
                    EdgeRule::FactualCopy => diagram.add_edge(TaggedVar::factual(parent), child.clone(), false),
                    EdgeRule::CounterfactualCopy => diagram.add_edge(TaggedVar::pi(parent), child.clone(), true),
                    EdgeRule::Literal(value) => diagram.annotate(child.clone(), parent, value),
                }
            }
        }
        if augmented {
            add_exogenous(&mut diagram, &self.base, World::Factual, World::Exogenous);
            for &k in &self.counterfactuals {
                let name = &vars[k].name;
                diagram.add_edge(TaggedVar::new(name, World::ExogenousCopy), TaggedVar::pi(name), false);
            }
        }
        diagram
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intervene::intervention_diagram;
    use crate::model::{CptSpec, VariableSpec};

    fn recanting() -> CptModel<f64> {
        CptModel::new(
            ["X", "A", "M", "Y"].map(VariableSpec::binary).to_vec(),
            vec![
                CptSpec::root("X", vec![0.5, 0.5]),
                CptSpec::dense("A", &["X"], vec![vec![0.7, 0.3], vec![0.1, 0.9]]),
                CptSpec::dense("M", &["A"], vec![vec![0.75, 0.25], vec![0.25, 0.75]]),
                CptSpec::dense(
                    "Y",
                    &["A", "M"],
                    vec![vec![0.9, 0.1], vec![0.4, 0.6], vec![0.5, 0.5], vec![0.05, 0.95]],
                ),
            ],
        )
        .unwrap()
    }

    #[test]
    fn rules_follow_the_case_split() {
        let model = recanting();
        let iv = PathIntervention::parse(&model, "X->A->Y", "1").unwrap();
        let pm = apply_path(&model, &iv, false).unwrap();
        assert_eq!(pm.counterfactuals(), ["A", "Y"]);
        assert_eq!(pm.rule("X", "A"), Some(&EdgeRule::Literal("1".into())));
        assert_eq!(pm.rule("A", "Y"), Some(&EdgeRule::CounterfactualCopy));
        assert_eq!(pm.rule("M", "Y"), Some(&EdgeRule::FactualCopy));
        assert_eq!(pm.rules_of("M"), None);
    }

    #[test]
    fn keep_all_copies_every_variable() {
        let model = recanting();
        let iv = PathIntervention::parse(&model, "A->M->Y", "0").unwrap();
        let pm = apply_path(&model, &iv, true).unwrap();
        assert_eq!(pm.counterfactuals(), ["X", "A", "M", "Y"]);
        assert_eq!(pm.rule("X", "A"), Some(&EdgeRule::FactualCopy));
        assert_eq!(pm.rule("A", "M"), Some(&EdgeRule::Literal("0".into())));
        assert_eq!(pm.rule("A", "Y"), Some(&EdgeRule::FactualCopy));
        assert_eq!(pm.rule("M", "Y"), Some(&EdgeRule::CounterfactualCopy));
    }

    #[test]
    fn diagram_of_the_recanting_path() {
        let model = recanting();
        let iv = PathIntervention::parse(&model, "X->A->Y", "1").unwrap();
        let pm = apply_path(&model, &iv, false).unwrap();
        let d = intervention_diagram(&pm, false);
        let ids: Vec<String> = d.nodes().iter().map(|n| n.dot_id()).collect();
        assert_eq!(ids, ["x", "a", "m", "y", "a_pi", "y_pi"]);
        let edges: Vec<(String, String)> =
            d.edges().iter().map(|(f, t)| (f.dot_id(), t.dot_id())).collect();
        assert_eq!(edges.len(), 6);
        assert!(d.is_path_edge(&TaggedVar::pi("A"), &TaggedVar::pi("Y")));
        assert!(d.has_edge(&TaggedVar::factual("M"), &TaggedVar::pi("Y")));
        assert!(!d.is_path_edge(&TaggedVar::factual("M"), &TaggedVar::pi("Y")));
        assert_eq!(d.literals(&TaggedVar::pi("A")), [("X".to_string(), "1".to_string())]);
        assert!(d.is_acyclic());

        let aug = intervention_diagram(&pm, true);
        assert!(aug.has_edge(&TaggedVar::new("Y", World::ExogenousCopy), &TaggedVar::pi("Y")));
        assert!(aug.has_edge(&TaggedVar::new("X", World::Exogenous), &TaggedVar::factual("X")));
        assert!(aug.to_dot().contains("\"u_y_prime\" -> \"y_pi\" [color=blue];"));
    }

    #[test]
    fn invalid_requests() {
        let model = recanting();
        assert!(matches!(
            PathIntervention::parse(&model, "M->A->Y", "1"),
            Err(InterventionError::Graph(_))
        ));
        assert!(matches!(
            PathIntervention::parse(&model, "X->A->Y", "2"),
            Err(InterventionError::Model(ModelError::ValueOutOfDomain { .. }))
        ));
    }
}
