//! Interventions as explicit mechanism rewrites: `do`, `info` and path
//! interventions, plus the diagrams of the rewritten systems.

mod path;

use std::collections::BTreeMap;

use thiserror::Error;

pub use path::{apply_path, EdgeRule, PathIntervenedModel, PathIntervention};

use crate::graph::{causal_diagram, Diagram, GraphError};
use crate::model::{
    CausalModel, CptModel, CptSpec, CptTable, Domain, MechanismSpec, MechanismTable, ModelError,
    Scm,
};
use crate::scalar::Probability;
use crate::space::{advance, Radix};
use crate::tagged::{TaggedVar, World};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InterventionError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("`{0}` is not of the form VAR=VALUE")]
    Syntax(String),
    #[error("`{variable}` is assigned both `{first}` and `{second}`")]
    ConflictingAssignment {
        variable: String,
        first: String,
        second: String,
    },
}

/// Variable-to-value assignments shared by `do` and `info` interventions.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Assignments(BTreeMap<String, String>);

impl Assignments {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, variable: impl Into<String>, value: impl Into<String>) -> Result<(), InterventionError> {
        let (variable, value) = (variable.into(), value.into());
        match self.0.get(&variable) {
            Some(first) if *first != value => Err(InterventionError::ConflictingAssignment {
                variable,
                first: first.clone(),
                second: value,
            }),
            _ => {
                self.0.insert(variable, value);
                Ok(())
            }
        }
    }

    /// Parses `X=v` items; repeating an identical item is allowed.
    pub fn parse<S: AsRef<str>>(items: &[S]) -> Result<Self, InterventionError> {
        let mut out = Self::new();
        for item in items {
            let item = item.as_ref();
            let (var, value) = item
                .split_once('=')
                .map(|(v, x)| (v.trim(), x.trim()))
                .filter(|(v, x)| !v.is_empty() && !x.is_empty())
                .ok_or_else(|| InterventionError::Syntax(item.to_string()))?;
            out.set(var, value)?;
        }
        Ok(out)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn get(&self, variable: &str) -> Option<&str> {
        self.0.get(variable).map(String::as_str)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Every variable exists and every value lies in its domain.
    pub fn validate<M: CausalModel + ?Sized>(&self, model: &M) -> Result<(), ModelError> {
        for (var, value) in self.iter() {
            let domain = model
                .domain_of(var)
                .ok_or_else(|| ModelError::UnknownVariable(var.to_string()))?;
            if !domain.contains(value) {
                return Err(ModelError::ValueOutOfDomain {
                    owner: var.to_string(),
                    variable: var.to_string(),
                    value: value.to_string(),
                });
            }
        }
        Ok(())
    }

    /// `X=1, Y=0`.
    pub fn describe(&self) -> String {
        self.iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

/// Replace each listed variable's mechanism by a constant.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DoIntervention {
    pub assignments: Assignments,
}

/// Replace the value carried on every outgoing channel of each listed
/// variable; the variable keeps its own mechanism.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct InfoIntervention {
    pub assignments: Assignments,
}

impl DoIntervention {
    pub fn new(assignments: Assignments) -> Self {
        Self { assignments }
    }

    pub fn parse<S: AsRef<str>>(items: &[S]) -> Result<Self, InterventionError> {
        Assignments::parse(items).map(Self::new)
    }
}

impl InfoIntervention {
    pub fn new(assignments: Assignments) -> Self {
        Self { assignments }
    }

    pub fn parse<S: AsRef<str>>(items: &[S]) -> Result<Self, InterventionError> {
        Assignments::parse(items).map(Self::new)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterventionKind {
    Do,
    Info,
}

/// A rewritten model together with what was done to it.
#[derive(Debug, Clone, PartialEq)]
pub struct Intervened<M> {
    pub model: M,
    pub kind: InterventionKind,
    pub assignments: Assignments,
    /// `(node, variable, value)`: `node` reads the constant `value` for `variable`.
    pub literal_inputs: Vec<(String, String, String)>,
}

/// Models that support `do` and `info` rewrites.
pub trait Intervene: CausalModel + Sized {
    fn rewrite_do(&self, assignments: &Assignments) -> Result<Self, ModelError>;
    fn rewrite_info(&self, assignments: &Assignments) -> Result<Self, ModelError>;
}

pub fn apply_do<M: Intervene>(model: &M, intervention: &DoIntervention) -> Result<Intervened<M>, InterventionError> {
    intervention.assignments.validate(model)?;
    let literal_inputs = intervention
        .assignments
        .iter()
        .map(|(var, value)| (var.to_string(), var.to_string(), value.to_string()))
        .collect();
    Ok(Intervened {
        model: model.rewrite_do(&intervention.assignments)?,
        kind: InterventionKind::Do,
        assignments: intervention.assignments.clone(),
        literal_inputs,
    })
}

pub fn apply_info<M: Intervene>(
    model: &M,
    intervention: &InfoIntervention,
) -> Result<Intervened<M>, InterventionError> {
    intervention.assignments.validate(model)?;
    let mut literal_inputs = Vec::new();
    for (index, child) in model.variables().iter().enumerate() {
        for parent in model.parents_of(index) {
            if let Some(value) = intervention.assignments.get(parent) {
                literal_inputs.push((child.name.clone(), parent.clone(), value.to_string()));
            }
        }
    }
    Ok(Intervened {
        model: model.rewrite_info(&intervention.assignments)?,
        kind: InterventionKind::Info,
        assignments: intervention.assignments.clone(),
        literal_inputs,
    })
}

/// Diagram of a rewritten system.
pub trait InterventionDiagram {
    /// With `augmented`, exogenous noise nodes are included.
    fn intervention_diagram(&self, augmented: bool) -> Diagram;
}

pub fn intervention_diagram<T: InterventionDiagram + ?Sized>(model: &T, augmented: bool) -> Diagram {
    model.intervention_diagram(augmented)
}

impl<M: CausalModel> InterventionDiagram for Intervened<M> {
    fn intervention_diagram(&self, augmented: bool) -> Diagram {
        let mut diagram = Diagram::from_dag(&causal_diagram(&self.model));
        for (node, var, value) in &self.literal_inputs {
            diagram.annotate(TaggedVar::factual(node), var, value);
        }
        if augmented {
            add_exogenous(&mut diagram, &self.model, World::Factual, World::Exogenous);
        }
        diagram
    }
}

pub(crate) fn add_exogenous<M: CausalModel + ?Sized>(diagram: &mut Diagram, model: &M, endo: World, exo: World) {
    for v in model.variables() {
        diagram.add_edge(TaggedVar::new(&v.name, exo), TaggedVar::new(&v.name, endo), false);
    }
}

impl<P: Probability> Intervene for CptModel<P> {
    fn rewrite_do(&self, assignments: &Assignments) -> Result<Self, ModelError> {
        let specs = self
            .to_specs()
            .into_iter()
            .map(|spec| match assignments.get(&spec.child) {
                Some(value) => {
                    let domain = self.domain_of(&spec.child).expect("validated");
                    CptSpec::root(spec.child.clone(), point_mass(domain, value))
                }
                None => spec,
            })
            .collect();
        CptModel::new(self.variables().to_vec(), specs)
    }

    fn rewrite_info(&self, assignments: &Assignments) -> Result<Self, ModelError> {
        let specs = self
            .cpts()
            .iter()
            .map(|cpt| {
                let fixed = fixed_axes(self, cpt.parents(), assignments);
                let (parents, rows) = slice_rows(self, cpt.parents(), &fixed, |digits| cpt.row(digits).to_vec());
                CptSpec {
                    child: cpt.child().to_string(),
                    parents,
                    table: CptTable::Dense(rows),
                }
            })
            .collect();
        CptModel::new(self.variables().to_vec(), specs)
    }
}

impl<P: Probability> Intervene for Scm<P> {
    fn rewrite_do(&self, assignments: &Assignments) -> Result<Self, ModelError> {
        let specs = self
            .to_specs()
            .into_iter()
            .map(|spec| match assignments.get(&spec.child) {
                Some(value) => {
                    let noise = self.noises().iter().find(|n| n.name == spec.noise).expect("validated");
                    MechanismSpec {
                        child: spec.child.clone(),
                        parents: Vec::new(),
                        noise: spec.noise.clone(),
                        table: MechanismTable::Dense(vec![value.to_string(); noise.domain.len()]),
                    }
                }
                None => spec,
            })
            .collect();
        self.rebuild(specs)
    }

    fn rewrite_info(&self, assignments: &Assignments) -> Result<Self, ModelError> {
        let mut decomposed = self.decompose();
        let edges: Vec<(String, String)> = decomposed
            .channels()
            .iter()
            .map(|c| (c.source.clone(), c.target.clone()))
            .collect();
        for (source, target) in edges {
            if let Some(value) = assignments.get(&source) {
                decomposed.set_rule(&source, &target, crate::model::ChannelRule::Literal(value.to_string()))?;
            }
        }
        decomposed.recompose()
    }
}

fn point_mass<P: Probability>(domain: &Domain, value: &str) -> Vec<P> {
    let at = domain.index_of(value).expect("validated");
    (0..domain.len())
        .map(|i| if i == at { P::one() } else { P::zero() })
        .collect()
}

/// `(axis, digit)` for each parent fixed by the assignments.
fn fixed_axes<M: CausalModel>(model: &M, parents: &[String], assignments: &Assignments) -> Vec<(usize, usize)> {
    parents
        .iter()
        .enumerate()
        .filter_map(|(axis, p)| {
            let value = assignments.get(p)?;
            let digit = model.domain_of(p)?.index_of(value)?;
            Some((axis, digit))
        })
        .collect()
}

/// Restricts a table indexed by `parents` to the slice where the `fixed`
/// axes take their digits. Returns the remaining parents and the rows in
/// odometer order over them.
pub(crate) fn slice_rows<M: CausalModel, T>(
    model: &M,
    parents: &[String],
    fixed: &[(usize, usize)],
    mut row: impl FnMut(&[usize]) -> T,
) -> (Vec<String>, Vec<T>) {
    let keep: Vec<usize> = (0..parents.len())
        .filter(|a| !fixed.iter().any(|(f, _)| f == a))
        .collect();
    let sizes: Vec<usize> = keep
        .iter()
        .map(|&a| model.domain_of(&parents[a]).expect("parent exists").len())
        .collect();
    let radix = Radix::new(sizes).expect("a slice is no larger than its table");
    let mut digits = vec![0; keep.len()];
    let mut full = vec![0; parents.len()];
    for &(axis, d) in fixed {
        full[axis] = d;
    }
    let mut rows = Vec::with_capacity(radix.total());
    loop {
        for (&axis, &d) in keep.iter().zip(&digits) {
            full[axis] = d;
        }
        rows.push(row(&full));
        if !advance(&mut digits, radix.sizes()) {
            break;
        }
    }
    (keep.iter().map(|&a| parents[a].clone()).collect(), rows)
}
