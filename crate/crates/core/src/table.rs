//! Dense joint distribution tables over tagged variables.

use serde_json::{json, Value};
use thiserror::Error;

use crate::model::Domain;
use crate::scalar::{format_probability, round_significant, Probability};
use crate::space::Radix;
use crate::tagged::TaggedVar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableError {
    #[error("no column `{0}` in table")]
    UnknownColumn(String),
    #[error("column `{0}` requested twice")]
    DuplicateColumn(String),
    #[error("tables have different columns or domains")]
    ColumnMismatch,
    #[error("value `{value}` of `{column}` is not a decimal number")]
    NonNumericDomain { column: String, value: String },
}

/// Exact joint distribution: one probability per point of the product domain.
///
/// Rows are stored in odometer order with the first column most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct JointTable<P> {
    columns: Vec<TaggedVar>,
    domains: Vec<Domain>,
    radix: Radix,
    probs: Vec<P>,
}

impl<P: Probability> JointTable<P> {
    pub(crate) fn from_parts(columns: Vec<TaggedVar>, domains: Vec<Domain>, probs: Vec<P>) -> Self {
        let radix = Radix::new(domains.iter().map(Domain::len).collect())
            .expect("table size was checked by the caller");
        assert_eq!(radix.total(), probs.len());
        Self {
            columns,
            domains,
            radix,
            probs,
        }
    }

    pub fn columns(&self) -> &[TaggedVar] {
        &self.columns
    }

    pub fn domains(&self) -> &[Domain] {
        &self.domains
    }

    /// Probabilities in row order.
    pub fn probs(&self) -> &[P] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn total(&self) -> P {
        crate::scalar::sum(&self.probs)
    }

    pub fn column_index(&self, column: &TaggedVar) -> Option<usize> {
        self.columns.iter().position(|c| c == column)
    }

    /// Iterates `(labels, probability)` in row order, zero rows included.
    pub fn rows(&self) -> impl Iterator<Item = (Vec<&str>, &P)> + '_ {
        let mut digits = vec![0; self.columns.len()];
        self.probs.iter().enumerate().map(move |(i, p)| {
            self.radix.digits(i, &mut digits);
            let labels = digits
                .iter()
                .zip(&self.domains)
                .map(|(&d, dom)| dom.label(d))
                .collect();
            (labels, p)
        })
    }

    /// Probability of the row with the given labels, one per column.
    pub fn get(&self, labels: &[&str]) -> Option<&P> {
        if labels.len() != self.columns.len() {
            return None;
        }
        let digits: Option<Vec<usize>> = labels
            .iter()
            .zip(&self.domains)
            .map(|(l, d)| d.index_of(l))
            .collect();
        Some(&self.probs[self.radix.index(&digits?)])
    }

    /// Sums out every column not in `keep`; the result follows `keep`'s order.
    pub fn marginalize(&self, keep: &[TaggedVar]) -> Result<JointTable<P>, TableError> {
        let mut positions = Vec::with_capacity(keep.len());
        for column in keep {
            let at = self
                .column_index(column)
                .ok_or_else(|| TableError::UnknownColumn(column.to_string()))?;
            if positions.contains(&at) {
                return Err(TableError::DuplicateColumn(column.to_string()));
            }
            positions.push(at);
        }
        let domains: Vec<Domain> = positions.iter().map(|&p| self.domains[p].clone()).collect();
        let target = Radix::new(domains.iter().map(Domain::len).collect())
            .expect("a marginal is no larger than its joint");
        let mut probs = vec![P::zero(); target.total()];
        let mut digits = vec![0; self.columns.len()];
        for (i, p) in self.probs.iter().enumerate() {
            self.radix.digits(i, &mut digits);
            let slot = &mut probs[target.index_of(&positions, &digits)];
            *slot = slot.clone() + p.clone();
        }
        Ok(JointTable::from_parts(keep.to_vec(), domains, probs))
    }

    /// Distribution of a single column, in domain order.
    pub fn distribution(&self, column: &TaggedVar) -> Result<Vec<P>, TableError> {
        Ok(self.marginalize(std::slice::from_ref(column))?.probs)
    }

    /// `E[column]`, reading domain labels as decimal numbers.
    pub fn expectation(&self, column: &TaggedVar) -> Result<P, TableError> {
        let index = self
            .column_index(column)
            .ok_or_else(|| TableError::UnknownColumn(column.to_string()))?;
        let values: Vec<P> = numeric_labels(&column.name, &self.domains[index])?;
        let marginal = self.distribution(column)?;
        Ok(values
            .into_iter()
            .zip(marginal)
            .fold(P::zero(), |acc, (v, p)| acc + v * p))
    }

    /// Largest absolute entry-wise difference, or `None` if shapes differ.
    pub fn max_abs_diff(&self, other: &JointTable<P>) -> Option<f64> {
        if self.columns != other.columns || self.domains != other.domains {
            return None;
        }
        Some(
            self.probs
                .iter()
                .zip(&other.probs)
                .map(|(a, b)| a.abs_diff(b).to_f64())
                .fold(0.0, f64::max),
        )
    }

    /// Entries converted to `f64`.
    pub fn to_f64(&self) -> JointTable<f64> {
        JointTable {
            columns: self.columns.clone(),
            domains: self.domains.clone(),
            radix: self.radix.clone(),
            probs: self.probs.iter().map(Probability::to_f64).collect(),
        }
    }

    /// `{"vars":[{"name":..,"world":..}],"rows":[{"values":[..],"p":..}]}`.
    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows()
            .map(|(labels, p)| json!({ "values": labels, "p": probability_json(p.to_f64()) }))
            .collect();
        json!({ "vars": columns_json(&self.columns), "rows": rows })
    }
}

pub(crate) fn numeric_labels<P: Probability>(column: &str, domain: &Domain) -> Result<Vec<P>, TableError> {
    domain
        .values()
        .iter()
        .map(|label| {
            P::from_decimal(label).ok_or_else(|| TableError::NonNumericDomain {
                column: column.to_string(),
                value: label.clone(),
            })
        })
        .collect()
}

pub(crate) fn columns_json(columns: &[TaggedVar]) -> Value {
    Value::Array(
        columns
            .iter()
            .map(|c| json!({ "name": c.name, "world": c.world.as_str() }))
            .collect(),
    )
}

/// JSON number rounded to 12 significant digits.
pub fn probability_json(p: f64) -> Value {
    let rounded = round_significant(p);
    match serde_json::Number::from_f64(rounded) {
        Some(n) => Value::Number(n),
        None => Value::String(format_probability(p)),
    }
}
