//! Text format for model files (`*.scm.txt`).
//!
//! ```text
//! model "mediation"
//! var A : {0, 1}
//! var Y : {0, 1}
//! cpt A | : [0.5, 0.5]
//! cpt Y | A : {
//!   (0): [0.9, 0.1]
//!   (1): [0.4, 0.6]
//! }
//! ```
//!
//! Structural models use `noise U : {..} ~ [..]` and
//! `mech Y <- (A; U) { (0;0) -> 0 ... }` instead of `cpt`.

mod lexer;
mod parser;
mod serialize;

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

pub use serialize::serialize_model;

use crate::model::{
    AnyModel, CausalModel, CptModel, CptSpec, CptTable, Domain, MechanismSpec, MechanismTable,
    ModelError, NoiseSpec, Scm, VariableSpec,
};
use crate::scalar::{format_probability, Probability};
use parser::DeclSpan;

/// 1-based source position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Cpt,
    Scm,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Cpt => "cpt-model",
            ModelKind::Scm => "scm",
        }
    }
}

/// Parsed model file. Table rows are kept sorted by input tuple in domain order.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelFile {
    pub name: String,
    pub kind: ModelKind,
    pub declarations: Vec<Declaration>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Declaration {
    Var(VarDecl),
    Cpt(CptDecl),
    Noise(NoiseDecl),
    Mech(MechDecl),
}

#[derive(Debug, Clone, PartialEq)]
pub struct VarDecl {
    pub name: String,
    pub values: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CptDecl {
    pub child: String,
    pub parents: Vec<String>,
    pub rows: Vec<CptRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CptRow {
    pub key: Vec<String>,
    pub probs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseDecl {
    pub name: String,
    pub values: Vec<String>,
    pub probs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MechDecl {
    pub child: String,
    pub parents: Vec<String>,
    pub noise: String,
    pub rows: Vec<MechRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MechRow {
    pub inputs: Vec<String>,
    pub noise: String,
    pub output: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub expected: Option<String>,
}

impl ParseError {
    pub(crate) fn new(pos: Pos, message: impl Into<String>, expected: Option<&str>) -> Self {
        Self {
            line: pos.line,
            column: pos.column,
            message: message.into(),
            expected: expected.map(str::to_string),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct SemanticError {
    pub line: usize,
    pub column: usize,
    pub message: String,
    /// The model-level error behind the message, when there is one.
    pub source_error: Option<ModelError>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DslError {
    #[error("parse error at {0}")]
    Parse(ParseError),
    #[error("invalid model at {0}")]
    Semantic(SemanticError),
}

impl DslError {
    pub fn position(&self) -> Pos {
        match self {
            DslError::Parse(e) => Pos {
                line: e.line,
                column: e.column,
            },
            DslError::Semantic(e) => Pos {
                line: e.line,
                column: e.column,
            },
        }
    }
}

/// Parses and validates a model file.
pub fn parse_model(text: &str) -> Result<ModelFile, DslError> {
    let clamp = |pos: Pos| clamp_position(text, pos);
    let (mut file, spans) = parser::parse(text).map_err(|mut e| {
        let pos = clamp(Pos {
            line: e.line,
            column: e.column,
        });
        (e.line, e.column) = (pos.line, pos.column);
        DslError::Parse(e)
    })?;
    let semantic = |pos: Pos, message: String, source_error: Option<ModelError>| {
        let pos = clamp(pos);
        DslError::Semantic(SemanticError {
            line: pos.line,
            column: pos.column,
            message,
            source_error,
        })
    };
    let first_cpt = file
        .declarations
        .iter()
        .position(|d| matches!(d, Declaration::Cpt(_)));
    let first_scm = file
        .declarations
        .iter()
        .position(|d| matches!(d, Declaration::Noise(_) | Declaration::Mech(_)));
    if let (Some(c), Some(s)) = (first_cpt, first_scm) {
        return Err(semantic(
            spans[c.max(s)].pos,
            "a model uses either `cpt` or `noise`/`mech` declarations, not both".into(),
            None,
        ));
    }
    if let Err(err) = file.to_any::<f64>() {
        let pos = locate(&file, &spans, &err);
        return Err(semantic(pos, err.to_string(), Some(err)));
    }
    file.canonicalize();
    Ok(file)
}

/// Like [`parse_model`] but starts from raw bytes, reporting invalid UTF-8 with a position.
pub fn parse_model_bytes(bytes: &[u8]) -> Result<ModelFile, DslError> {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse_model(text),
        Err(e) => {
            let valid = std::str::from_utf8(&bytes[..e.valid_up_to()]).expect("valid prefix");
            let line = valid.matches('\n').count() + 1;
            let column = valid.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
            Err(DslError::Parse(ParseError::new(
                Pos { line, column },
                "input is not valid UTF-8",
                None,
            )))
        }
    }
}

/// Parses a model file straight into a model with scalar type `P`.
pub fn load_model<P: Probability>(text: &str) -> Result<AnyModel<P>, DslError> {
    let file = parse_model(text)?;
    file.to_any().map_err(|err| {
        DslError::Semantic(SemanticError {
            line: 1,
            column: 1,
            message: err.to_string(),
            source_error: Some(err),
        })
    })
}

fn clamp_position(text: &str, pos: Pos) -> Pos {
    let lines: Vec<&str> = text.split('\n').collect();
    let mut count = lines.len();
    if count > 1 && lines[count - 1].is_empty() {
        count -= 1;
    }
    let line = pos.line.clamp(1, count.max(1));
    let width = lines
        .get(line - 1)
        .map_or(0, |l| l.trim_end_matches('\r').chars().count());
    Pos {
        line,
        column: pos.column.clamp(1, width + 1),
    }
}

/// Finds the declaration (and row, when known) a model error refers to.
fn locate(file: &ModelFile, spans: &[DeclSpan], err: &ModelError) -> Pos {
    let decls = &file.declarations;
    let table_of = |name: &str| {
        decls.iter().position(|d| match d {
            Declaration::Cpt(c) => c.child == name,
            Declaration::Mech(m) => m.child == name,
            _ => false,
        })
    };
    let declared = |name: &str| {
        decls.iter().position(|d| match d {
            Declaration::Var(v) => v.name == name,
            Declaration::Noise(n) => n.name == name,
            _ => false,
        })
    };
    let owner = |name: &str| table_of(name).or_else(|| declared(name));
    let row_where = |at: usize, pred: &dyn Fn(&[String], &[&str]) -> bool| -> Pos {
        let found = match &decls[at] {
            Declaration::Cpt(c) => c
                .rows
                .iter()
                .position(|r| pred(&r.key, &[])),
            Declaration::Mech(m) => m
                .rows
                .iter()
                .position(|r| pred(&r.inputs, &[r.noise.as_str(), r.output.as_str()])),
            _ => None,
        };
        found
            .and_then(|i| spans[at].rows.get(i).copied())
            .unwrap_or(spans[at].pos)
    };
    let at_row = |name: &str, row: &[String]| match owner(name) {
        Some(at) => row_where(at, &|key, extra| {
            key == row
                || (key.len() + 1 == row.len()
                    && row.starts_with(key)
                    && extra.first().is_some_and(|n| *n == row[key.len()]))
        }),
        None => Pos { line: 1, column: 1 },
    };
    let at_decl = |index: Option<usize>| index.map_or(Pos { line: 1, column: 1 }, |i| spans[i].pos);
    match err {
        ModelError::WrongRowLength { owner: o, row, .. }
        | ModelError::NegativeProbability { owner: o, row }
        | ModelError::RowNotNormalized { owner: o, row, .. }
        | ModelError::DuplicateRow { owner: o, row }
        | ModelError::WrongArity { owner: o, row, .. } => at_row(o, row),
        ModelError::ValueOutOfDomain { owner: o, value, .. } => match owner(o) {
            Some(at) => row_where(at, &|key, extra| {
                key.iter().any(|k| k == value) || extra.iter().any(|k| k == value)
            }),
            None => Pos { line: 1, column: 1 },
        },
        ModelError::EmptyDomain(name) | ModelError::DuplicateValue { owner: name, .. } => {
            at_decl(declared(name))
        }
        ModelError::DuplicateName(name) => {
            let hits: Vec<usize> = (0..decls.len())
                .filter(|&i| match &decls[i] {
                    Declaration::Var(v) => &v.name == name,
                    Declaration::Noise(n) => &n.name == name,
                    _ => false,
                })
                .collect();
            at_decl(hits.get(1).or(hits.first()).copied())
        }
        ModelError::UnknownVariable(name) => at_decl(decls.iter().position(|d| match d {
            Declaration::Cpt(c) => &c.child == name || c.parents.contains(name),
            Declaration::Mech(m) => &m.child == name || m.parents.contains(name),
            _ => false,
        })),
        ModelError::UnknownNoise(name) => at_decl(decls.iter().position(|d| match d {
            Declaration::Mech(m) => &m.noise == name,
            _ => false,
        })),
        ModelError::SharedNoise { second, .. } => at_decl(table_of(second)),
        ModelError::DuplicateCpt(name) | ModelError::DuplicateMechanism(name) => {
            let hits: Vec<usize> = (0..decls.len())
                .filter(|&i| match &decls[i] {
                    Declaration::Cpt(c) => &c.child == name,
                    Declaration::Mech(m) => &m.child == name,
                    _ => false,
                })
                .collect();
            at_decl(hits.get(1).or(hits.first()).copied())
        }
        ModelError::MissingCpt(name) | ModelError::MissingMechanism(name) => at_decl(declared(name)),
        ModelError::UnusedNoise(name) => at_decl(declared(name)),
        ModelError::DuplicateParent { child, .. }
        | ModelError::IncompleteCptTable { child, .. }
        | ModelError::IncompleteMechanismTable { child, .. } => at_decl(table_of(child)),
        ModelError::WrongTableSize { owner: name, .. } | ModelError::TableTooLarge(name) => {
            at_decl(owner(name))
        }
        ModelError::CycleDetected(names) => at_decl(names.first().and_then(|n| table_of(n))),
        ModelError::CrossWorldChannel { target, .. } | ModelError::UnknownChannel { target, .. } => {
            at_decl(table_of(target))
        }
    }
}

impl ModelFile {
    pub fn variables(&self) -> impl Iterator<Item = &VarDecl> {
        self.declarations.iter().filter_map(|d| match d {
            Declaration::Var(v) => Some(v),
            _ => None,
        })
    }

    fn variable_specs(&self) -> Result<Vec<VariableSpec>, ModelError> {
        self.variables()
            .map(|v| Ok(VariableSpec::new(&v.name, Domain::new(&v.name, v.values.clone())?)))
            .collect()
    }

    /// Builds the table model. Fails on structural models.
    pub fn to_cpt_model<P: Probability>(&self) -> Result<CptModel<P>, ModelError> {
        let specs = self
            .declarations
            .iter()
            .filter_map(|d| match d {
                Declaration::Cpt(c) => Some(CptSpec {
                    child: c.child.clone(),
                    parents: c.parents.clone(),
                    table: CptTable::Keyed(
                        c.rows
                            .iter()
                            .map(|r| (r.key.clone(), r.probs.iter().map(|&p| scalar(p)).collect()))
                            .collect(),
                    ),
                }),
                _ => None,
            })
            .collect();
        CptModel::new(self.variable_specs()?, specs)
    }

    /// Builds the structural model. Fails on table models.
    pub fn to_scm<P: Probability>(&self) -> Result<Scm<P>, ModelError> {
        let mut noises = Vec::new();
        let mut mechs = Vec::new();
        for decl in &self.declarations {
            match decl {
                Declaration::Noise(n) => noises.push(NoiseSpec::new(
                    &n.name,
                    Domain::new(&n.name, n.values.clone())?,
                    n.probs.iter().map(|&p| scalar(p)).collect(),
                )?),
                Declaration::Mech(m) => mechs.push(MechanismSpec {
                    child: m.child.clone(),
                    parents: m.parents.clone(),
                    noise: m.noise.clone(),
                    table: MechanismTable::Keyed(
                        m.rows
                            .iter()
                            .map(|r| (r.inputs.clone(), r.noise.clone(), r.output.clone()))
                            .collect(),
                    ),
                }),
                _ => {}
            }
        }
        Scm::new(self.variable_specs()?, noises, mechs)
    }

    pub fn to_any<P: Probability>(&self) -> Result<AnyModel<P>, ModelError> {
        match self.kind {
            ModelKind::Cpt => self.to_cpt_model().map(AnyModel::Cpt),
            ModelKind::Scm => self.to_scm().map(AnyModel::Scm),
        }
    }

    /// File form of a table model: variables, then one `cpt` per variable.
    pub fn from_cpt_model<P: Probability>(name: impl Into<String>, model: &CptModel<P>) -> Self {
        let mut declarations = var_decls(model);
        for cpt in model.cpts() {
            let domains: Vec<&Domain> = cpt
                .parent_indices()
                .iter()
                .map(|&p| &model.variables()[p].domain)
                .collect();
            let rows = (0..cpt.rows().len())
                .map(|i| CptRow {
                    key: crate::model::labels(&domains, &cpt.parent_radix().digits_vec(i)),
                    probs: cpt.row_at(i).iter().map(|p| file_probability(p)).collect(),
                })
                .collect();
            declarations.push(Declaration::Cpt(CptDecl {
                child: cpt.child().to_string(),
                parents: cpt.parents().to_vec(),
                rows,
            }));
        }
        Self {
            name: name.into(),
            kind: ModelKind::Cpt,
            declarations,
        }
    }

    /// File form of a structural model: variables, noises, then mechanisms.
    pub fn from_scm<P: Probability>(name: impl Into<String>, scm: &Scm<P>) -> Self {
        let mut declarations = var_decls(scm);
        for noise in scm.noises() {
            declarations.push(Declaration::Noise(NoiseDecl {
                name: noise.name.clone(),
                values: noise.domain.values().to_vec(),
                probs: noise.dist.iter().map(file_probability).collect(),
            }));
        }
        for mech in scm.mechanisms() {
            let vars = scm.variables();
            let mut domains: Vec<&Domain> = mech.parent_indices().iter().map(|&p| &vars[p].domain).collect();
            domains.push(&scm.noises()[mech.noise_index()].domain);
            let child = &vars[mech.child_index()].domain;
            let radix = crate::space::Radix::new(domains.iter().map(|d| d.len()).collect())
                .expect("mechanism table exists");
            let rows = mech
                .table()
                .iter()
                .enumerate()
                .map(|(i, &out)| {
                    let mut labels = crate::model::labels(&domains, &radix.digits_vec(i));
                    let noise = labels.pop().expect("noise column");
                    MechRow {
                        inputs: labels,
                        noise,
                        output: child.label(out).to_string(),
                    }
                })
                .collect();
            declarations.push(Declaration::Mech(MechDecl {
                child: mech.child().to_string(),
                parents: mech.parents().to_vec(),
                noise: mech.noise().to_string(),
                rows,
            }));
        }
        Self {
            name: name.into(),
            kind: ModelKind::Scm,
            declarations,
        }
    }

    /// Sorts every table by input tuple in domain order.
    fn canonicalize(&mut self) {
        let mut domains: HashMap<String, Vec<String>> = HashMap::new();
        for decl in &self.declarations {
            match decl {
                Declaration::Var(v) => domains.insert(v.name.clone(), v.values.clone()),
                Declaration::Noise(n) => domains.insert(n.name.clone(), n.values.clone()),
                _ => None,
            };
        }
        let index = |var: &str, value: &str| {
            domains
                .get(var)
                .and_then(|vals| vals.iter().position(|v| v == value))
                .unwrap_or(usize::MAX)
        };
        let digits = |parents: &[String], key: &[String]| -> Vec<usize> {
            parents.iter().zip(key).map(|(p, k)| index(p, k)).collect()
        };
        for decl in &mut self.declarations {
            match decl {
                Declaration::Cpt(c) => {
                    let parents = c.parents.clone();
                    c.rows.sort_by_key(|r| digits(&parents, &r.key));
                }
                Declaration::Mech(m) => {
                    let parents = m.parents.clone();
                    let noise = m.noise.clone();
                    m.rows
                        .sort_by_key(|r| (digits(&parents, &r.inputs), index(&noise, &r.noise)));
                }
                _ => {}
            }
        }
    }
}

fn var_decls<M: CausalModel>(model: &M) -> Vec<Declaration> {
    model
        .variables()
        .iter()
        .map(|v| {
            Declaration::Var(VarDecl {
                name: v.name.clone(),
                values: v.domain.values().to_vec(),
            })
        })
        .collect()
}

fn file_probability<P: Probability>(p: &P) -> f64 {
    crate::scalar::round_significant(p.to_f64())
}

/// Exact conversion of a stored (already rounded) probability.
fn scalar<P: Probability>(p: f64) -> P {
    P::from_decimal(&format_probability(p)).unwrap_or_else(P::zero)
}

#[cfg(test)]
mod tests;
