//! Finite discrete structural causal models with path interventions.
//!
//! Models come in two forms: conditional probability tables ([`CptModel`]) and
//! structural models with explicit finite noise ([`Scm`]). A path intervention
//! creates counterfactual copies of the variables downstream of its head along
//! one directed path; [`infer::pi_formula`] writes their joint law as a product
//! of the model's own tables, and [`infer::exact_joint`] evaluates it exactly.
//! [`sample`] provides a Monte Carlo oracle, including nested counterfactuals
//! under shared noise.
//!
//! Every table is generic over a [`Probability`] scalar; `f64`, `f32` and
//! `BigRational` are provided, with aliases below.

pub mod dsl;
pub mod graph;
pub mod infer;
pub mod intervene;
pub mod model;
pub mod sample;
pub mod scalar;
pub mod space;
pub mod table;
pub mod tagged;

pub use num_rational::BigRational;

pub use dsl::{load_model, parse_model, serialize_model, DslError, ModelFile};
pub use graph::{causal_diagram, find_recanting_witness, CausalPath, Dag, Diagram, GraphError};
pub use infer::{exact_joint, exact_marginal, pi_formula, Factorization, InferError};
pub use intervene::{
    apply_do, apply_info, apply_path, intervention_diagram, DoIntervention, InfoIntervention, InterventionError,
    PathIntervenedModel, PathIntervention,
};
pub use model::{AnyModel, CausalModel, CptModel, Domain, ModelError, Scm, VariableSpec};
pub use sample::{nested_counterfactual_sample, sample_model, tv_distance, EmpiricalTable, NestedSpec, SampleError};
pub use scalar::Probability;
pub use table::{JointTable, TableError};
pub use tagged::{TaggedVar, World};

pub type CptModelF64 = CptModel<f64>;
pub type ScmF64 = Scm<f64>;
pub type JointTableF64 = JointTable<f64>;

pub type CptModelF32 = CptModel<f32>;
pub type ScmF32 = Scm<f32>;
pub type JointTableF32 = JointTable<f32>;

/// Exact rational arithmetic, for comparisons without rounding.
pub type CptModelExact = CptModel<BigRational>;
pub type ScmExact = Scm<BigRational>;
pub type JointTableExact = JointTable<BigRational>;
