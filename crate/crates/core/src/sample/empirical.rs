use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::model::Domain;
use crate::scalar::Probability;
use crate::space::Radix;
use crate::table::{columns_json, probability_json, JointTable, TableError};
use crate::tagged::TaggedVar;

/// Identifier of the generator and seeding scheme behind every sampled table.
pub const RNG_ALGORITHM: &str = "chacha8/splitmix64-block65536";

/// Observed counts of value tuples from `n` draws.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmpiricalTable {
    columns: Vec<TaggedVar>,
    domains: Vec<Domain>,
    /// Keyed by domain indices; only observed tuples are present.
    counts: BTreeMap<Vec<usize>, u64>,
    n: u64,
    seed: u64,
}

impl EmpiricalTable {
    pub(crate) fn new(columns: Vec<TaggedVar>, domains: Vec<Domain>, counts: BTreeMap<Vec<usize>, u64>, seed: u64) -> Self {
        let n = counts.values().sum();
        Self {
            columns,
            domains,
            counts,
            n,
            seed,
        }
    }

    pub fn columns(&self) -> &[TaggedVar] {
        &self.columns
    }

    pub fn domains(&self) -> &[Domain] {
        &self.domains
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn algorithm(&self) -> &'static str {
        RNG_ALGORITHM
    }

    /// Observed tuples as labels, in domain order.
    pub fn counts(&self) -> impl Iterator<Item = (Vec<&str>, u64)> + '_ {
        self.counts.iter().map(|(digits, &c)| (self.labels(digits), c))
    }

    pub fn count(&self, labels: &[&str]) -> u64 {
        self.digits_of(labels)
            .and_then(|d| self.counts.get(&d).copied())
            .unwrap_or(0)
    }

    pub fn frequency(&self, labels: &[&str]) -> f64 {
        self.count(labels) as f64 / self.n as f64
    }

    pub fn column_index(&self, column: &TaggedVar) -> Option<usize> {
        self.columns.iter().position(|c| c == column)
    }

    /// Counts summed down to `keep`, in `keep`'s order.
    pub fn marginalize(&self, keep: &[TaggedVar]) -> Result<EmpiricalTable, TableError> {
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
        let mut counts = BTreeMap::new();
        for (digits, &c) in &self.counts {
            let key: Vec<usize> = positions.iter().map(|&p| digits[p]).collect();
            *counts.entry(key).or_insert(0) += c;
        }
        Ok(EmpiricalTable {
            columns: keep.to_vec(),
            domains: positions.iter().map(|&p| self.domains[p].clone()).collect(),
            counts,
            n: self.n,
            seed: self.seed,
        })
    }

    /// Mean of a column whose labels are decimal numbers.
    pub fn mean(&self, column: &TaggedVar) -> Result<f64, TableError> {
        let at = self
            .column_index(column)
            .ok_or_else(|| TableError::UnknownColumn(column.to_string()))?;
        let values: Vec<f64> = crate::table::numeric_labels(&column.name, &self.domains[at])?;
        let total: f64 = self.counts.iter().map(|(d, &c)| values[d[at]] * c as f64).sum();
        Ok(total / self.n as f64)
    }

    /// Relative frequencies as a dense table; `None` if the product domain
    /// does not fit in memory addressing.
    pub fn frequencies(&self) -> Option<JointTable<f64>> {
        let radix = Radix::new(self.domains.iter().map(Domain::len).collect())?;
        let mut probs = vec![0.0; radix.total()];
        for (digits, &c) in &self.counts {
            probs[radix.index(digits)] = c as f64 / self.n as f64;
        }
        Some(JointTable::from_parts(self.columns.clone(), self.domains.clone(), probs))
    }

    /// Same layout as a joint table's JSON plus `n`, `seed` and `rng`; rows
    /// list observed tuples only.
    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .counts
            .iter()
            .map(|(digits, &c)| {
                json!({
                    "values": self.labels(digits),
                    "p": probability_json(c as f64 / self.n as f64),
                    "count": c,
                })
            })
            .collect();
        json!({
            "vars": columns_json(&self.columns),
            "rows": rows,
            "n": self.n,
            "seed": self.seed,
            "rng": RNG_ALGORITHM,
        })
    }

    fn labels(&self, digits: &[usize]) -> Vec<&str> {
        digits.iter().zip(&self.domains).map(|(&d, dom)| dom.label(d)).collect()
    }

    fn digits_of(&self, labels: &[&str]) -> Option<Vec<usize>> {
        if labels.len() != self.domains.len() {
            return None;
        }
        labels.iter().zip(&self.domains).map(|(l, d)| d.index_of(l)).collect()
    }
}

/// A distribution over the product of finite domains, listed sparsely.
pub trait Distribution {
    fn columns(&self) -> &[TaggedVar];
    fn domains(&self) -> &[Domain];
    /// `(domain indices, probability)` in increasing index order; zero entries may be omitted.
    fn support(&self) -> Vec<(Vec<usize>, f64)>;
}

impl<P: Probability> Distribution for JointTable<P> {
    fn columns(&self) -> &[TaggedVar] {
        JointTable::columns(self)
    }

    fn domains(&self) -> &[Domain] {
        JointTable::domains(self)
    }

    fn support(&self) -> Vec<(Vec<usize>, f64)> {
        let radix = Radix::new(self.domains().iter().map(Domain::len).collect()).expect("table exists");
        self.probs()
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(|(i, p)| (radix.digits_vec(i), p.to_f64()))
            .collect()
    }
}

impl Distribution for EmpiricalTable {
    fn columns(&self) -> &[TaggedVar] {
        &self.columns
    }

    fn domains(&self) -> &[Domain] {
        &self.domains
    }

    fn support(&self) -> Vec<(Vec<usize>, f64)> {
        self.counts
            .iter()
            .map(|(d, &c)| (d.clone(), c as f64 / self.n as f64))
            .collect()
    }
}

/// `½ Σ |p - q|` over the common product domain.
pub fn tv_distance<A: Distribution + ?Sized, B: Distribution + ?Sized>(a: &A, b: &B) -> Result<f64, TableError> {
    if a.columns() != b.columns() || a.domains() != b.domains() {
        return Err(TableError::ColumnMismatch);
    }
    let (left, right) = (a.support(), b.support());
    let (mut i, mut j, mut total) = (0, 0, 0.0);
    while i < left.len() || j < right.len() {
        let order = match (left.get(i), right.get(j)) {
            (Some(l), Some(r)) => l.0.cmp(&r.0),
            (Some(_), None) => std::cmp::Ordering::Less,
            _ => std::cmp::Ordering::Greater,
        };
        match order {
            std::cmp::Ordering::Less => {
                total += left[i].1.abs();
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                total += right[j].1.abs();
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                total += (left[i].1 - right[j].1).abs();
                i += 1;
                j += 1;
            }
        }
    }
    Ok((0.5 * total).min(1.0))
}
