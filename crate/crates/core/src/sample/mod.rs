//! Monte Carlo oracle: ancestral sampling of base and intervened models,
//! nested counterfactuals under shared noise, and distribution distances.

mod empirical;

use std::borrow::Cow;
use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

pub use empirical::{tv_distance, Distribution, EmpiricalTable, RNG_ALGORITHM};

use crate::graph::{causal_diagram, parse_path_spec, validate_path, CausalPath};
use crate::infer::enumerate::{compile, Source};
use crate::infer::{factorization_of, observational_factorization, Factorization, InferError};
use crate::intervene::{Intervened, InterventionError, PathIntervenedModel};
use crate::model::{AnyModel, CausalModel, CptModel, ModelError, Scm};
use crate::scalar::Probability;
use crate::tagged::{TaggedVar, World};

/// Draws per block. Block `i` is seeded with `seed ^ splitmix64(i)`.
pub const SAMPLE_BLOCK: u64 = 65_536;

/// Seed used when a caller does not supply one.
pub const DEFAULT_SEED: u64 = 20_240_601;

const WAVE: u64 = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SampleError {
    #[error(transparent)]
    Infer(#[from] InferError),
    #[error(transparent)]
    Intervention(#[from] InterventionError),
    #[error("nested counterfactuals share noise across worlds and need a structural model, not conditional tables")]
    RequiresScm,
    #[error("at least one draw is required")]
    NoDraws,
    #[error("factorization cannot be sampled in order: a conditioner is generated after its factor")]
    NotAncestral,
}

impl From<ModelError> for SampleError {
    fn from(e: ModelError) -> Self {
        SampleError::Infer(e.into())
    }
}

/// Anything with a conditional-table sampling plan.
pub trait Sampleable<P: Probability> {
    /// Tables to draw from and the factor order to draw in.
    fn sampling_plan(&self) -> (Cow<'_, CptModel<P>>, Factorization);
}

impl<P: Probability> Sampleable<P> for CptModel<P> {
    fn sampling_plan(&self) -> (Cow<'_, CptModel<P>>, Factorization) {
        (Cow::Borrowed(self), observational_factorization(self))
    }
}

impl<P: Probability> Sampleable<P> for Scm<P> {
    fn sampling_plan(&self) -> (Cow<'_, CptModel<P>>, Factorization) {
        let cpt = self.to_cpt();
        let f = observational_factorization(&cpt);
        (Cow::Owned(cpt), f)
    }
}

impl<P: Probability> Sampleable<P> for AnyModel<P> {
    fn sampling_plan(&self) -> (Cow<'_, CptModel<P>>, Factorization) {
        match self {
            AnyModel::Cpt(m) => m.sampling_plan(),
            AnyModel::Scm(m) => m.sampling_plan(),
        }
    }
}

/// Counterfactual copies are drawn from the child's table with substituted
/// parents and a fresh draw, standing in for the independent noise copy.
impl<P: Probability> Sampleable<P> for PathIntervenedModel<P> {
    fn sampling_plan(&self) -> (Cow<'_, CptModel<P>>, Factorization) {
        (Cow::Borrowed(self.base()), factorization_of(self))
    }
}

impl<P: Probability, M: Sampleable<P>> Sampleable<P> for Intervened<M> {
    fn sampling_plan(&self) -> (Cow<'_, CptModel<P>>, Factorization) {
        self.model.sampling_plan()
    }
}

/// SplitMix64 finalizer, used to derive per-block seeds.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ splitmix64(block))
}

/// Cumulative distribution; the last positive entry absorbs rounding.
struct Cumulative {
    bounds: Vec<f64>,
    last_positive: usize,
}

impl Cumulative {
    fn new<P: Probability>(probs: &[P]) -> Self {
        let mut acc = 0.0;
        let bounds = probs
            .iter()
            .map(|p| {
                acc += p.to_f64();
                acc
            })
            .collect();
        let last_positive = probs.iter().rposition(|p| p.to_f64() > 0.0).unwrap_or(0);
        Self { bounds, last_positive }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> usize {
        let u: f64 = rng.random();
        self.bounds
            .iter()
            .position(|&b| u < b)
            .map_or(self.last_positive, |i| i.min(self.last_positive))
    }
}

/// Runs `draw` `n` times across seeded blocks and tallies the tuples it
/// returns. Block tallies are merged in block order.
fn tally<F>(n: u64, seed: u64, width: usize, draw: F) -> BTreeMap<Vec<usize>, u64>
where
    F: Fn(&mut ChaCha8Rng, &mut Vec<usize>) + Sync,
{
    let blocks = n.div_ceil(SAMPLE_BLOCK);
    let mut counts: BTreeMap<Vec<usize>, u64> = BTreeMap::new();
    let mut first = 0;
    while first < blocks {
        let last = (first + WAVE).min(blocks);
        let partials: Vec<BTreeMap<Vec<usize>, u64>> = (first..last)
            .into_par_iter()
            .map(|block| {
                let draws = SAMPLE_BLOCK.min(n - block * SAMPLE_BLOCK);
                let mut rng = block_rng(seed, block);
                let mut local: BTreeMap<Vec<usize>, u64> = BTreeMap::new();
                let mut digits = vec![0; width];
                for _ in 0..draws {
                    draw(&mut rng, &mut digits);
                    match local.get_mut(&digits) {
                        Some(c) => *c += 1,
                        None => {
                            local.insert(digits.clone(), 1);
                        }
                    }
                }
                local
            })
            .collect();
        for partial in partials {
            for (k, c) in partial {
                *counts.entry(k).or_insert(0) += c;
            }
        }
        first = last;
    }
    counts
}

/// `n` ancestral draws over every column of the model's sampling plan.
pub fn sample_model<P, S>(model: &S, n: u64, seed: u64) -> Result<EmpiricalTable, SampleError>
where
    P: Probability,
    S: Sampleable<P> + ?Sized,
{
    let (tables, plan) = model.sampling_plan();
    sample_factorization(&tables, &plan, n, seed)
}

/// `n` draws from a factorization whose factors are listed in ancestral order.
pub fn sample_factorization<P: Probability>(
    model: &CptModel<P>,
    factorization: &Factorization,
    n: u64,
    seed: u64,
) -> Result<EmpiricalTable, SampleError> {
    if n == 0 {
        return Err(SampleError::NoDraws);
    }
    let compiled = compile(model, factorization, None)?;
    if !compiled.is_ancestral() {
        return Err(SampleError::NotAncestral);
    }
    let rows: Vec<Vec<Cumulative>> = compiled
        .factors
        .iter()
        .map(|f| f.cpt.rows().iter().map(|r| Cumulative::new(r)).collect())
        .collect();
    let counts = tally(n, seed, compiled.columns.len(), |rng, digits| {
        let mut parents = Vec::new();
        for (f, table) in compiled.factors.iter().zip(&rows) {
            parents.clear();
            parents.extend(f.sources.iter().map(|s| match s {
                Source::Column(c) => digits[*c],
                Source::Constant(d) => *d,
            }));
            digits[f.child] = table[f.cpt.parent_radix().index(&parents)].draw(rng);
        }
    });
    Ok(EmpiricalTable::new(compiled.columns, compiled.domains, counts, seed))
}

/// `Y(π, a, a')`: the path head transmits `a` along the path and `a'`
/// everywhere else.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NestedSpec {
    pub path: CausalPath,
    pub on_path_value: String,
    pub off_path_value: String,
}

impl NestedSpec {
    /// Validates the path and both values against the model.
    pub fn new<M, S>(model: &M, nodes: &[S], on_path_value: &str, off_path_value: &str) -> Result<Self, SampleError>
    where
        M: CausalModel + ?Sized,
        S: AsRef<str>,
    {
        let path = validate_path(&causal_diagram(model), nodes).map_err(InterventionError::from)?;
        let head = path.head();
        let domain = model.domain_of(head).expect("validated path");
        for value in [on_path_value, off_path_value] {
            if !domain.contains(value) {
                return Err(ModelError::ValueOutOfDomain {
                    owner: head.to_string(),
                    variable: head.to_string(),
                    value: value.to_string(),
                }
                .into());
            }
        }
        Ok(Self {
            path,
            on_path_value: on_path_value.to_string(),
            off_path_value: off_path_value.to_string(),
        })
    }

    /// Like [`NestedSpec::new`] with the path written `A->M->Y`.
    pub fn parse<M: CausalModel + ?Sized>(model: &M, path: &str, on: &str, off: &str) -> Result<Self, SampleError> {
        let nodes = parse_path_spec(path).map_err(InterventionError::from)?;
        Self::new(model, &nodes, on, off)
    }
}

/// Nested counterfactual sampling needs noise shared between worlds, which
/// only a structural model provides.
pub fn nested_counterfactual_sample<P: Probability>(
    model: &AnyModel<P>,
    spec: &NestedSpec,
    n: u64,
    seed: u64,
) -> Result<EmpiricalTable, SampleError> {
    match model.as_scm() {
        Some(scm) => nested_counterfactual_sample_scm(scm, spec, n, seed),
        None => Err(SampleError::RequiresScm),
    }
}

/// Per draw: one noise tuple; the `a'` world evaluated by recursive
/// substitution; then the path nodes in order, each reading `a` or its
/// on-path predecessor along the path and the `a'` world off it.
pub fn nested_counterfactual_sample_scm<P: Probability>(
    scm: &Scm<P>,
    spec: &NestedSpec,
    n: u64,
    seed: u64,
) -> Result<EmpiricalTable, SampleError> {
    if n == 0 {
        return Err(SampleError::NoDraws);
    }
    let spec = NestedSpec::new(scm, spec.path.nodes(), &spec.on_path_value, &spec.off_path_value)?;
    let index = |name: &str| scm.variable_index(name).expect("validated path");
    let head = index(spec.path.head());
    let head_domain = &scm.variables()[head].domain;
    let on_digit = head_domain.index_of(&spec.on_path_value).expect("validated");
    let off_digit = head_domain.index_of(&spec.off_path_value).expect("validated");
    let path: Vec<usize> = spec.path.nodes().iter().map(|v| index(v)).collect();
    let noise: Vec<Cumulative> = scm.noises().iter().map(|u| Cumulative::new(&u.dist)).collect();
    let tail = *path.last().expect("paths have two or more nodes");
    let counts = tally(n, seed, 1, |rng, out| {
        let u: Vec<usize> = noise.iter().map(|c| c.draw(rng)).collect();
        let mut off = vec![0; scm.variables().len()];
        for &i in scm.order() {
            let mech = scm.mechanism_at(i);
            off[i] = if i == head { off_digit } else { mech.eval_in(&off, u[mech.noise_index()]) };
        }
        let mut on = off.clone();
        on[head] = on_digit;
        let mut parents = Vec::new();
        for pair in path.windows(2) {
            let (prev, k) = (pair[0], pair[1]);
            let mech = scm.mechanism_at(k);
            parents.clear();
            parents.extend(
                mech.parent_indices()
                    .iter()
                    .map(|&j| if j == prev { on[j] } else { off[j] }),
            );
            on[k] = mech.eval(&parents, u[mech.noise_index()]);
        }
        out[0] = on[tail];
    });
    let column = TaggedVar::new(spec.path.tail(), World::Nested);
    Ok(EmpiricalTable::new(
        vec![column],
        vec![scm.variables()[tail].domain.clone()],
        counts,
        seed,
    ))
}

#[cfg(test)]
mod tests;
