use std::collections::HashMap;

use super::{
    check_distribution, check_unique_names, labels, resolve_parents, topological_sort,
    CausalModel, Domain, ModelError, VariableSpec,
};
use crate::scalar::Probability;
use crate::space::{advance, Radix};

/// Unvalidated table for one variable, as handed to [`CptModel::new`].
#[derive(Debug, Clone, PartialEq)]
pub struct CptSpec<P> {
    pub child: String,
    pub parents: Vec<String>,
    pub table: CptTable<P>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CptTable<P> {
    /// Rows keyed by parent labels, in any order.
    Keyed(Vec<(Vec<String>, Vec<P>)>),
    /// Rows in odometer order over the parent domains.
    Dense(Vec<Vec<P>>),
}

impl<P> CptSpec<P> {
    pub fn keyed(
        child: impl Into<String>,
        parents: &[&str],
        rows: Vec<(Vec<String>, Vec<P>)>,
    ) -> Self {
        Self {
            child: child.into(),
            parents: parents.iter().map(|p| p.to_string()).collect(),
            table: CptTable::Keyed(rows),
        }
    }

    pub fn dense(child: impl Into<String>, parents: &[&str], rows: Vec<Vec<P>>) -> Self {
        Self {
            child: child.into(),
            parents: parents.iter().map(|p| p.to_string()).collect(),
            table: CptTable::Dense(rows),
        }
    }

    /// Unconditional distribution of a parentless variable.
    pub fn root(child: impl Into<String>, probs: Vec<P>) -> Self {
        Self {
            child: child.into(),
            parents: Vec::new(),
            table: CptTable::Dense(vec![probs]),
        }
    }
}

/// Validated conditional probability table `p(child | parents)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cpt<P> {
    child: String,
    parents: Vec<String>,
    child_index: usize,
    parent_indices: Vec<usize>,
    parent_radix: Radix,
    rows: Vec<Vec<P>>,
}

impl<P: Probability> Cpt<P> {
    pub fn child(&self) -> &str {
        &self.child
    }

    pub fn parents(&self) -> &[String] {
        &self.parents
    }

    pub fn child_index(&self) -> usize {
        self.child_index
    }

    pub fn parent_indices(&self) -> &[usize] {
        &self.parent_indices
    }

    pub fn parent_radix(&self) -> &Radix {
        &self.parent_radix
    }

    /// All rows in odometer order over the parent domains.
    pub fn rows(&self) -> &[Vec<P>] {
        &self.rows
    }

    pub fn row(&self, parent_digits: &[usize]) -> &[P] {
        &self.rows[self.parent_radix.index(parent_digits)]
    }

    pub fn row_at(&self, row_index: usize) -> &[P] {
        &self.rows[row_index]
    }

    pub fn probability(&self, child_digit: usize, parent_digits: &[usize]) -> &P {
        &self.row(parent_digits)[child_digit]
    }
}

/// Probabilistic-level model: a DAG with one conditional table per variable.
#[derive(Debug, Clone, PartialEq)]
pub struct CptModel<P> {
    variables: Vec<VariableSpec>,
    cpts: Vec<Cpt<P>>,
    order: Vec<usize>,
}

impl<P: Probability> CptModel<P> {
    pub fn new(variables: Vec<VariableSpec>, specs: Vec<CptSpec<P>>) -> Result<Self, ModelError> {
        check_unique_names(variables.iter().map(|v| v.name.as_str()))?;
        let mut by_child: HashMap<String, CptSpec<P>> = HashMap::new();
        for spec in specs {
            if !variables.iter().any(|v| v.name == spec.child) {
                return Err(ModelError::UnknownVariable(spec.child));
            }
            if by_child.contains_key(&spec.child) {
                return Err(ModelError::DuplicateCpt(spec.child));
            }
            by_child.insert(spec.child.clone(), spec);
        }
        let mut cpts = Vec::with_capacity(variables.len());
        for (index, var) in variables.iter().enumerate() {
            let spec = by_child
                .remove(&var.name)
                .ok_or_else(|| ModelError::MissingCpt(var.name.clone()))?;
            cpts.push(build_cpt(index, spec, &variables)?);
        }
        let names: Vec<&str> = variables.iter().map(|v| v.name.as_str()).collect();
        let parents: Vec<Vec<usize>> = cpts.iter().map(|c| c.parent_indices.clone()).collect();
        let order = topological_sort(&names, &parents).map_err(ModelError::CycleDetected)?;
        Ok(Self {
            variables,
            cpts,
            order,
        })
    }

    pub fn cpts(&self) -> &[Cpt<P>] {
        &self.cpts
    }

    pub fn cpt(&self, name: &str) -> Option<&Cpt<P>> {
        self.variable_index(name).map(|i| &self.cpts[i])
    }

    pub fn cpt_at(&self, index: usize) -> &Cpt<P> {
        &self.cpts[index]
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Convenience lookup `p(child = value | parents = labels)`.
    pub fn probability(&self, child: &str, value: &str, parent_labels: &[&str]) -> Option<&P> {
        let index = self.variable_index(child)?;
        let cpt = &self.cpts[index];
        let digit = self.variables[index].domain.index_of(value)?;
        if parent_labels.len() != cpt.parent_indices.len() {
            return None;
        }
        let digits: Option<Vec<usize>> = cpt
            .parent_indices
            .iter()
            .zip(parent_labels)
            .map(|(&p, l)| self.variables[p].domain.index_of(l))
            .collect();
        Some(cpt.probability(digit, &digits?))
    }

    /// Dense specs reproducing this model, for rewriting.
    pub(crate) fn to_specs(&self) -> Vec<CptSpec<P>> {
        self.cpts
            .iter()
            .map(|c| CptSpec {
                child: c.child.clone(),
                parents: c.parents.clone(),
                table: CptTable::Dense(c.rows.clone()),
            })
            .collect()
    }

    /// Converts every entry to another scalar type via its decimal text.
    pub fn convert<Q: Probability>(&self) -> Result<CptModel<Q>, ModelError> {
        let specs = self
            .cpts
            .iter()
            .map(|c| CptSpec {
                child: c.child.clone(),
                parents: c.parents.clone(),
                table: CptTable::Dense(
                    c.rows
                        .iter()
                        .map(|row| row.iter().map(convert_scalar).collect())
                        .collect(),
                ),
            })
            .collect();
        CptModel::new(self.variables.clone(), specs)
    }
}

pub(crate) fn convert_scalar<P: Probability, Q: Probability>(p: &P) -> Q {
    let text = crate::scalar::format_probability(p.to_f64());
    Q::from_decimal(&text).unwrap_or_else(Q::zero)
}

impl<P: Probability> CausalModel for CptModel<P> {
    fn variables(&self) -> &[VariableSpec] {
        &self.variables
    }

    fn parents_of(&self, index: usize) -> &[String] {
        &self.cpts[index].parents
    }

    fn topological_order(&self) -> Vec<usize> {
        self.order.clone()
    }
}

fn build_cpt<P: Probability>(
    child_index: usize,
    spec: CptSpec<P>,
    variables: &[VariableSpec],
) -> Result<Cpt<P>, ModelError> {
    let child = spec.child;
    let parent_indices = resolve_parents(&child, &spec.parents, variables)?;
    let parent_domains: Vec<&Domain> = parent_indices.iter().map(|&p| &variables[p].domain).collect();
    let parent_radix = Radix::new(parent_domains.iter().map(|d| d.len()).collect())
        .ok_or_else(|| ModelError::TableTooLarge(child.clone()))?;
    let child_size = variables[child_index].domain.len();

    let rows: Vec<Vec<P>> = match spec.table {
        CptTable::Dense(rows) => {
            if rows.len() != parent_radix.total() {
                return Err(ModelError::WrongTableSize {
                    owner: child,
                    expected: parent_radix.total(),
                    found: rows.len(),
                });
            }
            rows
        }
        CptTable::Keyed(keyed) => {
            let mut slots: Vec<Option<Vec<P>>> = vec![None; parent_radix.total()];
            for (key, probs) in keyed {
                if key.len() != parent_indices.len() {
                    return Err(ModelError::WrongArity {
                        owner: child,
                        expected: parent_indices.len(),
                        found: key.len(),
                        row: key,
                    });
                }
                let mut digits = Vec::with_capacity(key.len());
                for (label, domain) in key.iter().zip(&parent_domains) {
                    match domain.index_of(label) {
                        Some(d) => digits.push(d),
                        None => {
                            let variable = spec.parents[digits.len()].clone();
                            return Err(ModelError::ValueOutOfDomain {
                                owner: child,
                                variable,
                                value: label.clone(),
                            });
                        }
                    }
                }
                let slot = &mut slots[parent_radix.index(&digits)];
                if slot.is_some() {
                    return Err(ModelError::DuplicateRow { owner: child, row: key });
                }
                *slot = Some(probs);
            }
            let mut rows = Vec::with_capacity(slots.len());
            let mut digits = vec![0; parent_radix.len()];
            for slot in slots {
                match slot {
                    Some(row) => rows.push(row),
                    None => {
                        return Err(ModelError::IncompleteCptTable {
                            child,
                            row: labels(&parent_domains, &digits),
                        })
                    }
                }
                advance(&mut digits, parent_radix.sizes());
            }
            rows
        }
    };

    let mut digits = vec![0; parent_radix.len()];
    for row in &rows {
        check_distribution(&child, &labels(&parent_domains, &digits), row, child_size)?;
        advance(&mut digits, parent_radix.sizes());
    }

    Ok(Cpt {
        child,
        parents: spec.parents,
        child_index,
        parent_indices,
        parent_radix,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(labels: &[&str], probs: &[f64]) -> (Vec<String>, Vec<f64>) {
        (labels.iter().map(|s| s.to_string()).collect(), probs.to_vec())
    }

    fn chain_vars() -> Vec<VariableSpec> {
        ["A", "M", "Y"].into_iter().map(VariableSpec::binary).collect()
    }

    #[test]
    fn chain_model_reads_edges_off_parent_lists() {
        let model = CptModel::new(
            chain_vars(),
            vec![
                CptSpec::root("A", vec![0.5, 0.5]),
                CptSpec::dense("M", &["A"], vec![vec![0.8, 0.2], vec![0.2, 0.8]]),
                CptSpec::keyed(
                    "Y",
                    &["A", "M"],
                    vec![
                        row(&["1", "1"], &[0.1, 0.9]),
                        row(&["0", "0"], &[0.9, 0.1]),
                        row(&["0", "1"], &[0.5, 0.5]),
                        row(&["1", "0"], &[0.6, 0.4]),
                    ],
                ),
            ],
        )
        .unwrap();
        assert_eq!(model.parents_of(2), ["A", "M"]);
        assert_eq!(model.parents_of(1), ["A"]);
        // keyed rows are stored in domain order
        assert_eq!(model.probability("Y", "1", &["1", "0"]), Some(&0.4));
        assert_eq!(model.cpt("Y").unwrap().rows()[1], vec![0.5, 0.5]);
        assert_eq!(model.order(), &[0, 1, 2]);
    }

    #[test]
    fn unnormalized_row_is_named() {
        let err = CptModel::new(
            vec![VariableSpec::binary("A")],
            vec![CptSpec::root("A", vec![0.6, 0.5])],
        )
        .unwrap_err();
        assert!(matches!(err, ModelError::RowNotNormalized { ref owner, .. } if owner == "A"));
    }

    #[test]
    fn two_cycle_is_detected() {
        let vars = vec![VariableSpec::binary("A"), VariableSpec::binary("Y")];
        let err = CptModel::new(
            vars,
            vec![
                CptSpec::dense("A", &["Y"], vec![vec![0.5, 0.5]; 2]),
                CptSpec::dense("Y", &["A"], vec![vec![0.5, 0.5]; 2]),
            ],
        )
        .unwrap_err();
        match err {
            ModelError::CycleDetected(cycle) => assert_eq!(cycle.len(), 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_and_duplicate_tables() {
        let err = CptModel::<f64>::new(chain_vars(), vec![CptSpec::root("A", vec![0.5, 0.5])]);
        assert_eq!(err.unwrap_err(), ModelError::MissingCpt("M".into()));

        let err = CptModel::new(
            vec![VariableSpec::binary("A"), VariableSpec::binary("A")],
            vec![CptSpec::root("A", vec![0.5, 0.5])],
        );
        assert_eq!(err.unwrap_err(), ModelError::DuplicateName("A".into()));
    }

    #[test]
    fn incomplete_keyed_table_names_tuple() {
        let err = CptModel::new(
            chain_vars(),
            vec![
                CptSpec::root("A", vec![0.5, 0.5]),
                CptSpec::root("M", vec![0.5, 0.5]),
                CptSpec::keyed(
                    "Y",
                    &["A", "M"],
                    vec![
                        row(&["0", "0"], &[0.9, 0.1]),
                        row(&["0", "1"], &[0.5, 0.5]),
                        row(&["1", "0"], &[0.6, 0.4]),
                    ],
                ),
            ],
        )
        .unwrap_err();
        assert_eq!(
            err,
            ModelError::IncompleteCptTable {
                child: "Y".into(),
                row: vec!["1".into(), "1".into()]
            }
        );
    }

    #[test]
    fn negative_entries_rejected() {
        let err = CptModel::new(
            vec![VariableSpec::binary("A")],
            vec![CptSpec::root("A", vec![1.5, -0.5])],
        )
        .unwrap_err();
        assert!(matches!(err, ModelError::NegativeProbability { .. }));
    }

    #[test]
    fn exact_scalars_are_supported() {
        use num_rational::BigRational;
        let half = BigRational::from_decimal("0.5").unwrap();
        let model = CptModel::new(
            vec![VariableSpec::binary("A")],
            vec![CptSpec::root("A", vec![half.clone(), half.clone()])],
        )
        .unwrap();
        let as_f64: CptModel<f64> = model.convert().unwrap();
        assert_eq!(as_f64.probability("A", "1", &[]), Some(&0.5));
    }
}
