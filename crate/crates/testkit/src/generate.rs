use pathfx::graph::CausalPath;
use pathfx::model::{MechanismSpec, NoiseSpec};
use pathfx::{CausalModel, CptModel, Domain, Probability, Scm, VariableSpec};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::oracle::all_paths_oracle;

/// Shape limits for [`random_scm`].
#[derive(Debug, Clone)]
pub struct RandomModelConfig {
    pub min_nodes: usize,
    pub max_nodes: usize,
    /// Largest endogenous domain; the smallest is 2.
    pub max_domain: usize,
    pub max_in_degree: usize,
    /// Largest noise domain.
    pub max_noise: usize,
}

impl Default for RandomModelConfig {
    fn default() -> Self {
        Self {
            min_nodes: 2,
            max_nodes: 6,
            max_domain: 3,
            max_in_degree: 2,
            max_noise: 4,
        }
    }
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random Markovian SCM with at least one edge. Variables are `V0..`,
/// with numeric labels, declared in shuffled order; edges only run from
/// lower to higher index. Noise weights may be zero, so some CPT rows end up
/// with zero entries.
pub fn random_scm<R: Rng>(rng: &mut R, config: &RandomModelConfig) -> Scm<f64> {
    let n = rng.random_range(config.min_nodes.max(2)..=config.max_nodes.max(2));
    let sizes: Vec<usize> = (0..n).map(|_| rng.random_range(2..=config.max_domain.max(2))).collect();
    let mut parents: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            let mut pool: Vec<usize> = (0..i).collect();
            pool.shuffle(rng);
            let k = rng.random_range(0..=config.max_in_degree.min(i));
            pool.truncate(k);
            pool
        })
        .collect();
    if parents.iter().all(Vec::is_empty) {
        parents[1].push(0);
    }
    let name = |i: usize| format!("V{i}");
    let labels = |size: usize| (0..size).map(|v| v.to_string()).collect::<Vec<_>>();

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let variables: Vec<VariableSpec> = order
        .iter()
        .map(|&i| VariableSpec::new(name(i), Domain::new(&name(i), labels(sizes[i])).unwrap()))
        .collect();
    let mut noises = Vec::with_capacity(n);
    let mut specs = Vec::with_capacity(n);
    for &i in &order {
        let noise_size = rng.random_range(1..=config.max_noise.max(1));
        let weights: Vec<u32> = loop {
            let w: Vec<u32> = (0..noise_size)
                .map(|_| if rng.random_bool(0.15) { 0 } else { rng.random_range(1..=9) })
                .collect();
            if w.iter().any(|&x| x > 0) {
                break w;
            }
        };
        let total: u32 = weights.iter().sum();
        let dist: Vec<f64> = weights.iter().map(|&w| f64::from(w) / f64::from(total)).collect();
        let noise = format!("U_V{i}");
        noises.push(NoiseSpec::new(&noise, Domain::new(&noise, labels(noise_size)).unwrap(), dist).unwrap());
        let rows: usize = parents[i].iter().map(|&p| sizes[p]).product::<usize>() * noise_size;
        let outputs: Vec<String> = (0..rows).map(|_| rng.random_range(0..sizes[i]).to_string()).collect();
        let parent_names: Vec<String> = parents[i].iter().map(|&p| name(p)).collect();
        let parent_refs: Vec<&str> = parent_names.iter().map(String::as_str).collect();
        specs.push(MechanismSpec::dense(name(i), &parent_refs, noise, outputs));
    }
    Scm::new(variables, noises, specs).expect("generated models are valid")
}

/// A uniformly chosen directed path with at least one edge, if any exist.
pub fn random_path<R: Rng, M: CausalModel + ?Sized>(rng: &mut R, model: &M) -> Option<CausalPath> {
    let names: Vec<String> = model.variables().iter().map(|v| v.name.clone()).collect();
    let mut all = Vec::new();
    for from in &names {
        for to in &names {
            if from != to {
                all.extend(all_paths_oracle(model, from, to));
            }
        }
    }
    let nodes = all.get(rng.random_range(0..all.len().max(1)))?.clone();
    let dag = pathfx::causal_diagram(model);
    Some(pathfx::graph::validate_path(&dag, &nodes).expect("oracle paths are valid"))
}

/// Structural model with the same conditional tables: each variable gets a
/// noise whose values are the cells of the common refinement of every row's
/// cumulative distribution, and the mechanism inverts the row's CDF.
pub fn cpt_to_scm<P: Probability>(model: &CptModel<P>) -> Scm<P> {
    let mut noises = Vec::new();
    let mut specs = Vec::new();
    for cpt in model.cpts() {
        let child = cpt.child();
        let domain = model.domain_of(child).unwrap();
        let cumulative: Vec<Vec<P>> = cpt
            .rows()
            .iter()
            .map(|row| {
                let mut acc = P::zero();
                row.iter()
                    .map(|p| {
                        acc = acc.clone() + p.clone();
                        acc.clone()
                    })
                    .collect()
            })
            .collect();
        let mut cuts: Vec<P> = cumulative
            .iter()
            .flat_map(|c| c[..c.len() - 1].iter().cloned())
            .filter(|c| *c > P::zero() && *c < P::one())
            .collect();
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cuts.dedup();
        cuts.push(P::one());
        let mut lower = P::zero();
        let mut dist = Vec::with_capacity(cuts.len());
        for c in &cuts {
            dist.push(c.clone() - lower.clone());
            lower = c.clone();
        }
        let noise = format!("U_{child}");
        let noise_labels: Vec<String> = (0..cuts.len()).map(|i| i.to_string()).collect();
        let mut outputs = Vec::with_capacity(cumulative.len() * cuts.len());
        for (row, cum) in cpt.rows().iter().zip(&cumulative) {
            let fallback = row.iter().rposition(|p| !p.is_zero()).unwrap_or(0);
            for upper in &cuts {
                let value = cum[..cum.len() - 1]
                    .iter()
                    .position(|c| c >= upper)
                    .unwrap_or(fallback);
                outputs.push(domain.label(value).to_string());
            }
        }
        noises.push(NoiseSpec::new(&noise, Domain::new(&noise, noise_labels).unwrap(), dist).unwrap());
        let parents: Vec<&str> = cpt.parents().iter().map(String::as_str).collect();
        specs.push(MechanismSpec::dense(child, &parents, noise, outputs));
    }
    Scm::new(model.variables().to_vec(), noises, specs).expect("threshold construction is valid")
}
