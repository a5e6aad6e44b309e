use rayon::prelude::*;

use super::{Conditioner, Factorization, InferError};
use crate::model::{CausalModel, Cpt, CptModel, Domain};
use crate::scalar::Probability;
use crate::space::{advance, Radix};
use crate::table::{JointTable, TableError};
use crate::tagged::TaggedVar;

/// Assignments per enumeration block. Fixed so that results never depend on
/// the number of worker threads.
pub const BLOCK_SIZE: usize = 65_536;

/// Default cap on enumerated assignments.
pub const DEFAULT_MAX_STATES: usize = 100_000_000;

/// Environment variable overriding [`DEFAULT_MAX_STATES`].
pub const MAX_STATES_ENV: &str = "PATHFX_MAX_STATES";

/// The enumeration cap: `PATHFX_MAX_STATES` if set to a positive integer, else the default.
pub fn max_states() -> usize {
    std::env::var(MAX_STATES_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or(DEFAULT_MAX_STATES)
}

pub(crate) enum Source {
    Column(usize),
    Constant(usize),
}

pub(crate) struct CompiledFactor<'a, P> {
    pub(crate) child: usize,
    pub(crate) cpt: &'a Cpt<P>,
    pub(crate) sources: Vec<Source>,
}

/// A factorization bound to a model's tables, ready to evaluate assignments.
pub(crate) struct Compiled<'a, P> {
    pub(crate) columns: Vec<TaggedVar>,
    pub(crate) domains: Vec<Domain>,
    radix: Option<Radix>,
    pub(crate) factors: Vec<CompiledFactor<'a, P>>,
}

pub(crate) fn compile<'a, P: Probability>(
    model: &'a CptModel<P>,
    factorization: &Factorization,
    cap: Option<usize>,
) -> Result<Compiled<'a, P>, InferError> {
    let columns = factorization.children();
    for (i, c) in columns.iter().enumerate() {
        if columns[..i].contains(c) {
            return Err(InferError::InvalidFactorization(format!("{c} is the child of two factors")));
        }
    }
    let mut domains = Vec::with_capacity(columns.len());
    for c in &columns {
        let domain = model
            .domain_of(&c.name)
            .ok_or_else(|| InferError::InvalidFactorization(format!("unknown variable `{}`", c.name)))?;
        domains.push(domain.clone());
    }
    let mut factors = Vec::with_capacity(columns.len());
    for (child, factor) in factorization.factors.iter().enumerate() {
        let cpt = model.cpt(&factor.child.name).expect("domain lookup succeeded");
        if cpt.parents().len() != factor.given.len() {
            return Err(InferError::InvalidFactorization(format!(
                "{factor}: expected {} conditioners",
                cpt.parents().len()
            )));
        }
        let mut sources = Vec::with_capacity(factor.given.len());
        for (parent, given) in cpt.parents().iter().zip(&factor.given) {
            let source = match given {
                Conditioner::Var(v) if &v.name == parent => {
                    let at = columns.iter().position(|c| c == v).ok_or_else(|| {
                        InferError::InvalidFactorization(format!("{factor}: {v} is not generated by any factor"))
                    })?;
                    Source::Column(at)
                }
                Conditioner::Literal { variable, value } if variable == parent => {
                    let digit = model
                        .domain_of(parent)
                        .and_then(|d| d.index_of(value))
                        .ok_or_else(|| {
                            InferError::InvalidFactorization(format!("{factor}: `{value}` is not a value of `{parent}`"))
                        })?;
                    Source::Constant(digit)
                }
                other => {
                    return Err(InferError::InvalidFactorization(format!(
                        "{factor}: conditioner {other} does not stand for parent `{parent}`"
                    )))
                }
            };
            sources.push(source);
        }
        factors.push(CompiledFactor { child, cpt, sources });
    }
    // sampling passes no cap and never needs the radix
    let radix = Radix::new(domains.iter().map(Domain::len).collect());
    if let Some(cap) = cap {
        if radix.as_ref().is_none_or(|r| r.total() > cap) {
            return Err(InferError::StateSpaceTooLarge {
                states: state_count(&domains),
                cap,
            });
        }
    }
    Ok(Compiled {
        columns,
        domains,
        radix,
        factors,
    })
}

fn state_count(domains: &[Domain]) -> String {
    let mut n: u128 = 1;
    for d in domains {
        match n.checked_mul(d.len() as u128) {
            Some(m) => n = m,
            None => return "more than 2^128".into(),
        }
    }
    n.to_string()
}

impl<P: Probability> Compiled<'_, P> {
    fn radix(&self) -> &Radix {
        self.radix.as_ref().expect("compiled with a cap")
    }

    /// Every conditioner is produced by an earlier factor, so the factors
    /// can be drawn in order.
    pub(crate) fn is_ancestral(&self) -> bool {
        self.factors.iter().all(|f| {
            f.sources.iter().all(|s| match s {
                Source::Column(c) => *c < f.child,
                Source::Constant(_) => true,
            })
        })
    }

    fn probability(&self, digits: &[usize], scratch: &mut Vec<usize>) -> P {
        let mut p = P::one();
        for f in &self.factors {
            scratch.clear();
            scratch.extend(f.sources.iter().map(|s| match s {
                Source::Column(c) => digits[*c],
                Source::Constant(d) => *d,
            }));
            p = p * f.cpt.probability(digits[f.child], scratch).clone();
        }
        p
    }

    /// Calls `visit(digits, p)` for rows `start..end` in odometer order.
    fn each_row(&self, start: usize, end: usize, mut visit: impl FnMut(&[usize], P)) {
        let mut digits = self.radix().digits_vec(start);
        let mut scratch = Vec::new();
        for _ in start..end {
            let p = self.probability(&digits, &mut scratch);
            visit(&digits, p);
            advance(&mut digits, self.radix().sizes());
        }
    }
}

pub fn exact_joint<P: Probability>(model: &CptModel<P>, factorization: &Factorization) -> Result<JointTable<P>, InferError> {
    exact_joint_with_cap(model, factorization, max_states())
}

/// Every assignment of the factorization's variables with its product probability.
pub fn exact_joint_with_cap<P: Probability>(
    model: &CptModel<P>,
    factorization: &Factorization,
    cap: usize,
) -> Result<JointTable<P>, InferError> {
    let compiled = compile(model, factorization, Some(cap))?;
    let mut probs = vec![P::zero(); compiled.radix().total()];
    probs.par_chunks_mut(BLOCK_SIZE).enumerate().for_each(|(block, chunk)| {
        let (start, end) = (block * BLOCK_SIZE, block * BLOCK_SIZE + chunk.len());
        let mut slots = chunk.iter_mut();
        compiled.each_row(start, end, |_, p| {
            *slots.next().expect("chunk covers the block") = p;
        });
    });
    Ok(JointTable::from_parts(compiled.columns, compiled.domains, probs))
}

pub fn exact_marginal<P: Probability>(
    model: &CptModel<P>,
    factorization: &Factorization,
    keep: &[TaggedVar],
) -> Result<JointTable<P>, InferError> {
    exact_marginal_with_cap(model, factorization, keep, max_states())
}

/// Marginal of the enumerated joint without materializing it. Each block is
/// summed in row order and block sums are added in block order.
pub fn exact_marginal_with_cap<P: Probability>(
    model: &CptModel<P>,
    factorization: &Factorization,
    keep: &[TaggedVar],
    cap: usize,
) -> Result<JointTable<P>, InferError> {
    let compiled = compile(model, factorization, Some(cap))?;
    let mut positions = Vec::with_capacity(keep.len());
    for column in keep {
        let at = compiled
            .columns
            .iter()
            .position(|c| c == column)
            .ok_or_else(|| TableError::UnknownColumn(column.to_string()))?;
        if positions.contains(&at) {
            return Err(TableError::DuplicateColumn(column.to_string()).into());
        }
        positions.push(at);
    }
    let domains: Vec<Domain> = positions.iter().map(|&p| compiled.domains[p].clone()).collect();
    let target = Radix::new(domains.iter().map(Domain::len).collect()).expect("no larger than the joint");
    let total = compiled.radix().total();
    let blocks = total.div_ceil(BLOCK_SIZE);
    // bounds memory held by in-flight block sums; does not affect the result
    let wave = (1usize << 24).div_ceil(target.total()).clamp(1, 64);
    let mut acc = vec![P::zero(); target.total()];
    let mut first = 0;
    while first < blocks {
        let last = (first + wave).min(blocks);
        let partials: Vec<Vec<P>> = (first..last)
            .into_par_iter()
            .map(|block| {
                let start = block * BLOCK_SIZE;
                let end = (start + BLOCK_SIZE).min(total);
                let mut partial = vec![P::zero(); target.total()];
                compiled.each_row(start, end, |digits, p| {
                    let slot = &mut partial[target.index_of(&positions, digits)];
                    *slot = slot.clone() + p;
                });
                partial
            })
            .collect();
        for partial in partials {
            for (a, p) in acc.iter_mut().zip(partial) {
                *a = a.clone() + p;
            }
        }
        first = last;
    }
    Ok(JointTable::from_parts(keep.to_vec(), domains, acc))
}
