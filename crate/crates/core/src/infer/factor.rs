use std::fmt;

use serde_json::{json, Value};

use crate::intervene::{EdgeRule, PathIntervenedModel};
use crate::model::{CausalModel, CptModel};
use crate::scalar::Probability;
use crate::tagged::TaggedVar;

/// One conditioning argument of a factor.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Conditioner {
    Var(TaggedVar),
    /// The constant `value` read in place of `variable`.
    Literal { variable: String, value: String },
}

/// `p(child | given)`, evaluated with the CPT of `child.name`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Factor {
    pub child: TaggedVar,
    /// Aligned with the declared parents of `child.name`.
    pub given: Vec<Conditioner>,
}

/// A product of factors; each tagged variable is the child of exactly one.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Factorization {
    pub factors: Vec<Factor>,
}

impl fmt::Display for Conditioner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Conditioner::Var(v) => write!(f, "{v}"),
            Conditioner::Literal { variable, .. } => write!(f, "{}'", variable.to_lowercase()),
        }
    }
}

/// `p(y^π|a^π,m)`.
impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p({}", self.child)?;
        for (i, c) in self.given.iter().enumerate() {
            write!(f, "{}{c}", if i == 0 { "|" } else { "," })?;
        }
        write!(f, ")")
    }
}

/// Factors joined by `·`.
impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join("·"))
    }
}

impl Factor {
    pub fn to_json(&self) -> Value {
        let given: Vec<Value> = self
            .given
            .iter()
            .map(|c| match c {
                Conditioner::Var(v) => tagged_json(v),
                Conditioner::Literal { value, .. } => json!({ "literal": value }),
            })
            .collect();
        json!({ "child": tagged_json(&self.child), "given": given })
    }
}

impl Factorization {
    /// `{"factors":[{"child":{..},"given":[..]}]}`.
    pub fn to_json(&self) -> Value {
        json!({ "factors": self.factors.iter().map(Factor::to_json).collect::<Vec<_>>() })
    }

    /// Children in factor order.
    pub fn children(&self) -> Vec<TaggedVar> {
        self.factors.iter().map(|f| f.child.clone()).collect()
    }

    /// Display strings of every factor, sorted; handy for order-free comparison.
    pub fn sorted_terms(&self) -> Vec<String> {
        let mut terms: Vec<String> = self.factors.iter().map(ToString::to_string).collect();
        terms.sort();
        terms
    }
}

fn tagged_json(v: &TaggedVar) -> Value {
    json!({ "name": v.name, "world": v.world.as_str() })
}

/// `∏_i p(v_i | v_pa(i))` in topological order.
pub fn observational_factorization<P: Probability>(model: &CptModel<P>) -> Factorization {
    let vars = model.variables();
    Factorization {
        factors: model
            .topological_order()
            .into_iter()
            .map(|i| Factor {
                child: TaggedVar::factual(&vars[i].name),
                given: model
                    .parents_of(i)
                    .iter()
                    .map(|p| Conditioner::Var(TaggedVar::factual(p)))
                    .collect(),
            })
            .collect(),
    }
}

/// Factual block followed by one factor per counterfactual copy, whose
/// conditioners are rewritten by the edge rules.
pub fn factorization_of<P: Probability>(intervened: &PathIntervenedModel<P>) -> Factorization {
    let model = intervened.base();
    let mut out = observational_factorization(model);
    for name in intervened.counterfactuals() {
        let index = model.variable_index(name).expect("counterfactuals are base variables");
        let rules = intervened.rules_of(name).expect("every counterfactual has rules");
        let given = model
            .parents_of(index)
            .iter()
            .zip(rules)
            .map(|(parent, rule)| match rule {
                EdgeRule::FactualCopy => Conditioner::Var(TaggedVar::factual(parent)),
                EdgeRule::CounterfactualCopy => Conditioner::Var(TaggedVar::pi(parent)),
                EdgeRule::Literal(value) => Conditioner::Literal {
                    variable: parent.clone(),
                    value: value.clone(),
                },
            })
            .collect();
        out.factors.push(Factor {
            child: TaggedVar::pi(name),
            given,
        });
    }
    out
}
