//! Symbolic factorizations of path-intervened systems and their exact
//! evaluation by enumeration.

pub(crate) mod enumerate;
mod factor;

use thiserror::Error;

pub use enumerate::{
    exact_joint, exact_joint_with_cap, exact_marginal, exact_marginal_with_cap, max_states, BLOCK_SIZE,
    DEFAULT_MAX_STATES, MAX_STATES_ENV,
};
pub use factor::{factorization_of, observational_factorization, Conditioner, Factor, Factorization};

use crate::intervene::{apply_path, InterventionError, PathIntervention};
use crate::model::{CptModel, ModelError};
use crate::scalar::Probability;
use crate::table::{JointTable, TableError};
use crate::tagged::TaggedVar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InferError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Intervention(#[from] InterventionError),
    #[error(transparent)]
    Table(#[from] TableError),
    #[error("state space has {states} assignments, above the cap of {cap} (set PATHFX_MAX_STATES to raise it)")]
    StateSpaceTooLarge { states: String, cap: usize },
    #[error("invalid factorization: {0}")]
    InvalidFactorization(String),
    #[error("`{target}` is not downstream of the path head along {path}, so it has no counterfactual copy")]
    NotOnPath { target: String, path: String },
}

/// The factorization of the joint over factual variables and the
/// counterfactual copies induced by `intervention`.
pub fn pi_formula<P: Probability>(model: &CptModel<P>, intervention: &PathIntervention) -> Result<Factorization, InferError> {
    Ok(factorization_of(&apply_path(model, intervention, false)?))
}

/// Exact two-world joint under `intervention`.
pub fn path_joint<P: Probability>(model: &CptModel<P>, intervention: &PathIntervention) -> Result<JointTable<P>, InferError> {
    exact_joint(model, &pi_formula(model, intervention)?)
}

/// Exact distribution of `target^π` under `intervention`, in domain order.
pub fn counterfactual_distribution<P: Probability>(
    model: &CptModel<P>,
    intervention: &PathIntervention,
    target: &str,
) -> Result<JointTable<P>, InferError> {
    let column = counterfactual_column(intervention, target)?;
    exact_marginal(model, &pi_formula(model, intervention)?, &[column])
}

/// `E[target^π(value)]`, reading the target's labels as numbers.
pub fn counterfactual_expectation<P: Probability>(
    model: &CptModel<P>,
    intervention: &PathIntervention,
    target: &str,
) -> Result<P, InferError> {
    let column = counterfactual_column(intervention, target)?;
    Ok(counterfactual_distribution(model, intervention, target)?.expectation(&column)?)
}

/// `E[target^π(value)] - E[target^π(reference)]` along the same path.
pub fn expectation_contrast<P: Probability>(
    model: &CptModel<P>,
    intervention: &PathIntervention,
    reference: &str,
    target: &str,
) -> Result<P, InferError> {
    let other = PathIntervention::new(model, intervention.path.nodes(), reference)?;
    Ok(counterfactual_expectation(model, intervention, target)? - counterfactual_expectation(model, &other, target)?)
}

/// Sums a table down to `keep`.
pub fn marginalize<P: Probability>(table: &JointTable<P>, keep: &[TaggedVar]) -> Result<JointTable<P>, InferError> {
    Ok(table.marginalize(keep)?)
}

fn counterfactual_column(intervention: &PathIntervention, target: &str) -> Result<TaggedVar, InferError> {
    if intervention.path.descendants().iter().any(|d| d == target) {
        Ok(TaggedVar::pi(target))
    } else {
        Err(InferError::NotOnPath {
            target: target.to_string(),
            path: intervention.path.to_string(),
        })
    }
}

#[cfg(test)]
mod tests;
