use std::collections::HashMap;

use super::{
    check_distribution, check_unique_names, labels, resolve_parents, topological_sort,
    CausalModel, CptModel, CptSpec, CptTable, Domain, ModelError, VariableSpec,
};
use crate::scalar::Probability;
use crate::space::{advance, Radix};
use crate::table::JointTable;
use crate::tagged::TaggedVar;

/// Largest noise product enumerated by [`Scm::joint`].
pub const MAX_NOISE_STATES: usize = 100_000_000;

/// Exogenous noise with a finite domain.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSpec<P> {
    pub name: String,
    pub domain: Domain,
    pub dist: Vec<P>,
}

impl<P: Probability> NoiseSpec<P> {
    pub fn new(name: impl Into<String>, domain: Domain, dist: Vec<P>) -> Result<Self, ModelError> {
        let name = name.into();
        check_distribution(&name, &[], &dist, domain.len())?;
        Ok(Self { name, domain, dist })
    }
}

/// Unvalidated mechanism table, as handed to [`Scm::new`].
#[derive(Debug, Clone, PartialEq)]
pub struct MechanismSpec {
    pub child: String,
    pub parents: Vec<String>,
    pub noise: String,
    pub table: MechanismTable,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MechanismTable {
    /// `(parent labels, noise label) -> output label`, in any order.
    Keyed(Vec<(Vec<String>, String, String)>),
    /// Output labels in odometer order over `(parents..., noise)`.
    Dense(Vec<String>),
}

impl MechanismSpec {
    pub fn keyed(
        child: impl Into<String>,
        parents: &[&str],
        noise: impl Into<String>,
        rows: Vec<(Vec<String>, String, String)>,
    ) -> Self {
        Self {
            child: child.into(),
            parents: parents.iter().map(|p| p.to_string()).collect(),
            noise: noise.into(),
            table: MechanismTable::Keyed(rows),
        }
    }

    pub fn dense<S: Into<String>>(
        child: impl Into<String>,
        parents: &[&str],
        noise: impl Into<String>,
        outputs: impl IntoIterator<Item = S>,
    ) -> Self {
        Self {
            child: child.into(),
            parents: parents.iter().map(|p| p.to_string()).collect(),
            noise: noise.into(),
            table: MechanismTable::Dense(outputs.into_iter().map(Into::into).collect()),
        }
    }
}

/// Validated deterministic mechanism `child <- f(parents, noise)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mechanism {
    child: String,
    parents: Vec<String>,
    noise: String,
    child_index: usize,
    parent_indices: Vec<usize>,
    noise_index: usize,
    /// Over `(parents..., noise)`.
    radix: Radix,
    /// Output value index per input tuple.
    table: Vec<usize>,
}

impl Mechanism {
    pub fn child(&self) -> &str {
        &self.child
    }

    pub fn parents(&self) -> &[String] {
        &self.parents
    }

    pub fn noise(&self) -> &str {
        &self.noise
    }

    pub fn child_index(&self) -> usize {
        self.child_index
    }

    pub fn parent_indices(&self) -> &[usize] {
        &self.parent_indices
    }

    pub fn noise_index(&self) -> usize {
        self.noise_index
    }

    /// Output value indices in odometer order over `(parents..., noise)`.
    pub fn table(&self) -> &[usize] {
        &self.table
    }

    /// Output index for parent value indices and a noise value index.
    pub fn eval(&self, parent_digits: &[usize], noise_digit: usize) -> usize {
        let sizes = self.radix.sizes();
        let row = parent_digits
            .iter()
            .zip(sizes)
            .fold(0, |acc, (&d, &size)| acc * size + d);
        self.table[row * sizes[sizes.len() - 1] + noise_digit]
    }

    /// Output index with parents read from a full assignment of all variables.
    pub fn eval_in(&self, values: &[usize], noise_digit: usize) -> usize {
        let mut index = noise_digit;
        let sizes = self.radix.sizes();
        let mut stride = sizes[sizes.len() - 1];
        for (axis, &p) in self.parent_indices.iter().enumerate().rev() {
            index += values[p] * stride;
            stride *= sizes[axis];
        }
        self.table[index]
    }
}

/// Markovian structural causal model over finite domains.
#[derive(Debug, Clone, PartialEq)]
pub struct Scm<P> {
    variables: Vec<VariableSpec>,
    noises: Vec<NoiseSpec<P>>,
    mechanisms: Vec<Mechanism>,
    order: Vec<usize>,
}

impl<P: Probability> Scm<P> {
    pub fn new(
        variables: Vec<VariableSpec>,
        noises: Vec<NoiseSpec<P>>,
        specs: Vec<MechanismSpec>,
    ) -> Result<Self, ModelError> {
        check_unique_names(
            variables
                .iter()
                .map(|v| v.name.as_str())
                .chain(noises.iter().map(|n| n.name.as_str())),
        )?;
        for noise in &noises {
            check_distribution(&noise.name, &[], &noise.dist, noise.domain.len())?;
        }
        let mut by_child: HashMap<String, MechanismSpec> = HashMap::new();
        let mut noise_owner: HashMap<&str, &str> = HashMap::new();
        for spec in &specs {
            if !variables.iter().any(|v| v.name == spec.child) {
                return Err(ModelError::UnknownVariable(spec.child.clone()));
            }
            if by_child.contains_key(&spec.child) {
                return Err(ModelError::DuplicateMechanism(spec.child.clone()));
            }
            if !noises.iter().any(|n| n.name == spec.noise) {
                return Err(ModelError::UnknownNoise(spec.noise.clone()));
            }
            if let Some(first) = noise_owner.insert(&spec.noise, &spec.child) {
                return Err(ModelError::SharedNoise {
                    noise: spec.noise.clone(),
                    first: first.to_string(),
                    second: spec.child.clone(),
                });
            }
            by_child.insert(spec.child.clone(), spec.clone());
        }
        if let Some(unused) = noises.iter().find(|n| !noise_owner.contains_key(n.name.as_str())) {
            return Err(ModelError::UnusedNoise(unused.name.clone()));
        }
        let mut mechanisms = Vec::with_capacity(variables.len());
        for (index, var) in variables.iter().enumerate() {
            let spec = by_child
                .remove(&var.name)
                .ok_or_else(|| ModelError::MissingMechanism(var.name.clone()))?;
            mechanisms.push(build_mechanism(index, spec, &variables, &noises)?);
        }
        let names: Vec<&str> = variables.iter().map(|v| v.name.as_str()).collect();
        let parents: Vec<Vec<usize>> = mechanisms.iter().map(|m| m.parent_indices.clone()).collect();
        let order = topological_sort(&names, &parents).map_err(ModelError::CycleDetected)?;
        Ok(Self {
            variables,
            noises,
            mechanisms,
            order,
        })
    }

    pub fn noises(&self) -> &[NoiseSpec<P>] {
        &self.noises
    }

    pub fn mechanisms(&self) -> &[Mechanism] {
        &self.mechanisms
    }

    pub fn mechanism(&self, child: &str) -> Option<&Mechanism> {
        self.variable_index(child).map(|i| &self.mechanisms[i])
    }

    pub fn mechanism_at(&self, index: usize) -> &Mechanism {
        &self.mechanisms[index]
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Endogenous values (domain indices, per variable) for one noise draw.
    /// `noise_digits` is indexed like [`Scm::noises`].
    pub fn evaluate(&self, noise_digits: &[usize]) -> Vec<usize> {
        let mut values = vec![0; self.variables.len()];
        for &i in &self.order {
            let mech = &self.mechanisms[i];
            values[i] = mech.eval_in(&values, noise_digits[mech.noise_index]);
        }
        values
    }

    /// Observational joint over all variables, by enumerating every noise tuple.
    pub fn joint(&self) -> Result<JointTable<P>, ModelError> {
        let noise_sizes: Vec<usize> = self.noises.iter().map(|n| n.domain.len()).collect();
        let noise_space = Radix::new(noise_sizes.clone())
            .filter(|r| r.total() <= MAX_NOISE_STATES)
            .ok_or_else(|| ModelError::TableTooLarge("exogenous noise".into()))?;
        let domains: Vec<Domain> = self.variables.iter().map(|v| v.domain.clone()).collect();
        let out = Radix::new(domains.iter().map(Domain::len).collect())
            .filter(|r| r.total() <= MAX_NOISE_STATES)
            .ok_or_else(|| ModelError::TableTooLarge("endogenous variables".into()))?;
        let mut probs = vec![P::zero(); out.total()];
        let mut digits = vec![0; noise_space.len()];
        loop {
            let weight = digits
                .iter()
                .zip(&self.noises)
                .fold(P::one(), |acc, (&d, n)| acc * n.dist[d].clone());
            let values = self.evaluate(&digits);
            let slot = &mut probs[out.index(&values)];
            *slot = slot.clone() + weight;
            if !advance(&mut digits, noise_space.sizes()) {
                break;
            }
        }
        let columns = self.variables.iter().map(|v| TaggedVar::factual(&v.name)).collect();
        Ok(JointTable::from_parts(columns, domains, probs))
    }

    /// Marginalizes each mechanism over its noise:
    /// `p(v | pa) = Σ_u 1[f(pa, u) = v] · P(u)`.
    pub fn to_cpt(&self) -> CptModel<P> {
        let specs = self
            .mechanisms
            .iter()
            .map(|mech| {
                let noise = &self.noises[mech.noise_index];
                let child_size = self.variables[mech.child_index].domain.len();
                let parent_count: usize = mech.radix.total() / noise.domain.len();
                let rows = (0..parent_count)
                    .map(|row| {
                        let mut probs = vec![P::zero(); child_size];
                        for (u, weight) in noise.dist.iter().enumerate() {
                            let out = mech.table[row * noise.domain.len() + u];
                            probs[out] = probs[out].clone() + weight.clone();
                        }
                        probs
                    })
                    .collect();
                CptSpec {
                    child: mech.child.clone(),
                    parents: mech.parents.clone(),
                    table: CptTable::Dense(rows),
                }
            })
            .collect();
        CptModel::new(self.variables.clone(), specs)
            .expect("marginalizing a valid structural model yields a valid table model")
    }

    /// Dense specs reproducing this model, for rewriting.
    pub(crate) fn to_specs(&self) -> Vec<MechanismSpec> {
        self.mechanisms
            .iter()
            .map(|m| MechanismSpec {
                child: m.child.clone(),
                parents: m.parents.clone(),
                noise: m.noise.clone(),
                table: MechanismTable::Dense(
                    m.table
                        .iter()
                        .map(|&o| self.variables[m.child_index].domain.label(o).to_string())
                        .collect(),
                ),
            })
            .collect()
    }

    pub(crate) fn rebuild(&self, specs: Vec<MechanismSpec>) -> Result<Self, ModelError> {
        Scm::new(self.variables.clone(), self.noises.clone(), specs)
    }
}

impl<P: Probability> CausalModel for Scm<P> {
    fn variables(&self) -> &[VariableSpec] {
        &self.variables
    }

    fn parents_of(&self, index: usize) -> &[String] {
        &self.mechanisms[index].parents
    }

    fn topological_order(&self) -> Vec<usize> {
        self.order.clone()
    }
}

fn build_mechanism<P: Probability>(
    child_index: usize,
    spec: MechanismSpec,
    variables: &[VariableSpec],
    noises: &[NoiseSpec<P>],
) -> Result<Mechanism, ModelError> {
    let child = spec.child;
    let parent_indices = resolve_parents(&child, &spec.parents, variables)?;
    let noise_index = noises
        .iter()
        .position(|n| n.name == spec.noise)
        .ok_or_else(|| ModelError::UnknownNoise(spec.noise.clone()))?;
    let noise_domain = &noises[noise_index].domain;
    let child_domain = &variables[child_index].domain;
    let mut input_domains: Vec<&Domain> = parent_indices.iter().map(|&p| &variables[p].domain).collect();
    input_domains.push(noise_domain);
    let radix = Radix::new(input_domains.iter().map(|d| d.len()).collect())
        .ok_or_else(|| ModelError::TableTooLarge(child.clone()))?;

    let output_index = |label: &str| {
        child_domain
            .index_of(label)
            .ok_or_else(|| ModelError::ValueOutOfDomain {
                owner: child.clone(),
                variable: child.clone(),
                value: label.to_string(),
            })
    };

    let table = match spec.table {
        MechanismTable::Dense(outputs) => {
            if outputs.len() != radix.total() {
                return Err(ModelError::WrongTableSize {
                    owner: child.clone(),
                    expected: radix.total(),
                    found: outputs.len(),
                });
            }
            outputs.iter().map(|o| output_index(o)).collect::<Result<Vec<_>, _>>()?
        }
        MechanismTable::Keyed(rows) => {
            let mut slots: Vec<Option<usize>> = vec![None; radix.total()];
            for (inputs, noise_label, output) in rows {
                if inputs.len() != parent_indices.len() {
                    return Err(ModelError::WrongArity {
                        owner: child.clone(),
                        row: inputs.clone(),
                        expected: parent_indices.len(),
                        found: inputs.len(),
                    });
                }
                let mut digits = Vec::with_capacity(inputs.len() + 1);
                for (k, label) in inputs.iter().enumerate() {
                    let d = input_domains[k].index_of(label).ok_or_else(|| {
                        ModelError::ValueOutOfDomain {
                            owner: child.clone(),
                            variable: spec.parents[k].clone(),
                            value: label.clone(),
                        }
                    })?;
                    digits.push(d);
                }
                let u = noise_domain.index_of(&noise_label).ok_or_else(|| {
                    ModelError::ValueOutOfDomain {
                        owner: child.clone(),
                        variable: spec.noise.clone(),
                        value: noise_label.clone(),
                    }
                })?;
                digits.push(u);
                let slot = &mut slots[radix.index(&digits)];
                if slot.is_some() {
                    let mut row = inputs;
                    row.push(noise_label);
                    return Err(ModelError::DuplicateRow {
                        owner: child.clone(),
                        row,
                    });
                }
                *slot = Some(output_index(&output)?);
            }
            let mut table = Vec::with_capacity(slots.len());
            let mut digits = vec![0; radix.len()];
            for slot in slots {
                match slot {
                    Some(out) => table.push(out),
                    None => {
                        let all = labels(&input_domains, &digits);
                        let (noise, parents) = all.split_last().expect("noise axis is always present");
                        return Err(ModelError::IncompleteMechanismTable {
                            child: child.clone(),
                            parents: parents.to_vec(),
                            noise: noise.clone(),
                        });
                    }
                }
                advance(&mut digits, radix.sizes());
            }
            table
        }
    };

    Ok(Mechanism {
        child,
        parents: spec.parents,
        noise: spec.noise,
        child_index,
        parent_indices,
        noise_index,
        radix,
        table,
    })
}
