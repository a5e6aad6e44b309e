//! Informational decomposition: every mechanism reads its parents through
//! per-edge channels `e_{j,i}`, so interventions can rewrite what a channel
//! carries without touching the mechanism that processes it.

use super::{CausalModel, MechanismSpec, MechanismTable, ModelError, Scm};
use crate::scalar::Probability;
use crate::space::{advance, Radix};
use crate::table::JointTable;
use crate::tagged::TaggedVar;

/// What an edge channel delivers to its target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChannelRule {
    /// The source's own value (the unintervened default).
    CopySource,
    /// A fixed label from the source's domain.
    Literal(String),
    /// The source's counterfactual value; only meaningful in a two-world system.
    CopyCounterfactual,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeChannel {
    pub source: String,
    pub target: String,
    pub rule: ChannelRule,
}

/// An [`Scm`] with one explicit channel per diagram edge.
#[derive(Debug, Clone, PartialEq)]
pub struct DecomposedScm<P> {
    base: Scm<P>,
    /// Sorted by `(source, target)`.
    channels: Vec<EdgeChannel>,
}

impl<P: Probability> Scm<P> {
    /// One copy-of-source channel per edge.
    pub fn decompose(&self) -> DecomposedScm<P> {
        let mut channels: Vec<EdgeChannel> = self
            .mechanisms()
            .iter()
            .flat_map(|m| {
                m.parents().iter().map(|p| EdgeChannel {
                    source: p.clone(),
                    target: m.child().to_string(),
                    rule: ChannelRule::CopySource,
                })
            })
            .collect();
        channels.sort_by(|a, b| (&a.source, &a.target).cmp(&(&b.source, &b.target)));
        DecomposedScm {
            base: self.clone(),
            channels,
        }
    }
}

impl<P: Probability> DecomposedScm<P> {
    pub fn base(&self) -> &Scm<P> {
        &self.base
    }

    pub fn channels(&self) -> &[EdgeChannel] {
        &self.channels
    }

    pub fn channel(&self, source: &str, target: &str) -> Option<&EdgeChannel> {
        self.channels
            .iter()
            .find(|c| c.source == source && c.target == target)
    }

    pub fn set_rule(&mut self, source: &str, target: &str, rule: ChannelRule) -> Result<(), ModelError> {
        if let ChannelRule::Literal(value) = &rule {
            let domain = self
                .base
                .domain_of(source)
                .ok_or_else(|| ModelError::UnknownVariable(source.to_string()))?;
            if !domain.contains(value) {
                return Err(ModelError::ValueOutOfDomain {
                    owner: target.to_string(),
                    variable: source.to_string(),
                    value: value.clone(),
                });
            }
        }
        let channel = self
            .channels
            .iter_mut()
            .find(|c| c.source == source && c.target == target)
            .ok_or_else(|| ModelError::UnknownChannel {
                source_var: source.to_string(),
                target: target.to_string(),
            })?;
        channel.rule = rule;
        Ok(())
    }

    /// Folds literal channels into the mechanism tables: the parent is dropped
    /// and the table restricted to the literal's slice.
    pub fn recompose(&self) -> Result<Scm<P>, ModelError> {
        let mut specs = Vec::with_capacity(self.base.mechanisms().len());
        for mech in self.base.mechanisms() {
            let mut keep = Vec::new();
            let mut fixed = Vec::new();
            for (axis, parent) in mech.parents().iter().enumerate() {
                let channel = self
                    .channel(parent, mech.child())
                    .expect("every edge has a channel");
                match &channel.rule {
                    ChannelRule::CopySource => keep.push(axis),
                    ChannelRule::Literal(value) => {
                        let domain = self.base.domain_of(parent).expect("parent exists");
                        let digit = domain.index_of(value).expect("checked in set_rule");
                        fixed.push((axis, digit));
                    }
                    ChannelRule::CopyCounterfactual => {
                        return Err(ModelError::CrossWorldChannel {
                            source_var: parent.clone(),
                            target: mech.child().to_string(),
                        })
                    }
                }
            }
            let child_domain = &self.base.variables()[mech.child_index()].domain;
            let noise_size = self.base.noises()[mech.noise_index()].domain.len();
            let kept_sizes: Vec<usize> = keep
                .iter()
                .map(|&axis| self.base.variables()[mech.parent_indices()[axis]].domain.len())
                .collect();
            let kept = Radix::new(kept_sizes).expect("a slice is no larger than its table");
            let mut outputs = Vec::with_capacity(kept.total() * noise_size);
            let mut kept_digits = vec![0; kept.len()];
            let mut full = vec![0; mech.parents().len()];
            loop {
                for (&axis, &d) in keep.iter().zip(&kept_digits) {
                    full[axis] = d;
                }
                for &(axis, d) in &fixed {
                    full[axis] = d;
                }
                for u in 0..noise_size {
                    outputs.push(child_domain.label(mech.eval(&full, u)).to_string());
                }
                if !advance(&mut kept_digits, kept.sizes()) {
                    break;
                }
            }
            specs.push(MechanismSpec {
                child: mech.child().to_string(),
                parents: keep.iter().map(|&a| mech.parents()[a].clone()).collect(),
                noise: mech.noise().to_string(),
                table: MechanismTable::Dense(outputs),
            });
        }
        self.base.rebuild(specs)
    }

    /// Observational joint, evaluating every mechanism through its channels.
    pub fn joint(&self) -> Result<JointTable<P>, ModelError> {
        let scm = &self.base;
        let vars = scm.variables();
        // per variable: for each parent axis, Some(literal digit) or None (copy)
        let mut reads: Vec<Vec<Option<usize>>> = Vec::with_capacity(vars.len());
        for mech in scm.mechanisms() {
            let mut row = Vec::with_capacity(mech.parents().len());
            for parent in mech.parents() {
                let channel = self.channel(parent, mech.child()).expect("every edge has a channel");
                row.push(match &channel.rule {
                    ChannelRule::CopySource => None,
                    ChannelRule::Literal(v) => scm.domain_of(parent).and_then(|d| d.index_of(v)),
                    ChannelRule::CopyCounterfactual => {
                        return Err(ModelError::CrossWorldChannel {
                            source_var: parent.clone(),
                            target: mech.child().to_string(),
                        })
                    }
                });
            }
            reads.push(row);
        }
        let noise_space = Radix::new(scm.noises().iter().map(|n| n.domain.len()).collect())
            .filter(|r| r.total() <= super::MAX_NOISE_STATES)
            .ok_or_else(|| ModelError::TableTooLarge("exogenous noise".into()))?;
        let domains: Vec<_> = vars.iter().map(|v| v.domain.clone()).collect();
        let out = Radix::new(domains.iter().map(|d| d.len()).collect())
            .ok_or_else(|| ModelError::TableTooLarge("endogenous variables".into()))?;
        let mut probs = vec![P::zero(); out.total()];
        let mut noise = vec![0; noise_space.len()];
        let mut values = vec![0; vars.len()];
        let mut received = Vec::new();
        loop {
            for &i in scm.order() {
                let mech = scm.mechanism_at(i);
                received.clear();
                for (axis, &p) in mech.parent_indices().iter().enumerate() {
                    received.push(reads[i][axis].unwrap_or(values[p]));
                }
                values[i] = mech.eval(&received, noise[mech.noise_index()]);
            }
            let weight = noise
                .iter()
                .zip(scm.noises())
                .fold(P::one(), |acc, (&d, n)| acc * n.dist[d].clone());
            let slot = &mut probs[out.index(&values)];
            *slot = slot.clone() + weight;
            if !advance(&mut noise, noise_space.sizes()) {
                break;
            }
        }
        let columns = vars.iter().map(|v| TaggedVar::factual(&v.name)).collect();
        Ok(JointTable::from_parts(columns, domains, probs))
    }
}
