use std::fmt;
use std::path::Path;

use pathfx::graph::GraphError;
use pathfx::intervene::InterventionError;
use pathfx::{DslError, InferError, ModelError, SampleError, TableError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_SEMANTIC: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

/// A failure together with the exit code it maps to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn semantic(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_SEMANTIC,
            message: message.into(),
        }
    }

    /// `FILE:LINE:COLUMN: message` for model-file errors.
    pub fn from_dsl(file: &Path, e: &DslError) -> Self {
        let pos = e.position();
        let (code, detail) = match e {
            DslError::Parse(p) => (EXIT_PARSE, format!("syntax error: {}", p.message)),
            DslError::Semantic(s) => (EXIT_SEMANTIC, format!("invalid model: {}", s.message)),
        };
        Self {
            code,
            message: format!("{}:{}:{}: {detail}", file.display(), pos.line, pos.column),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::PathSyntax(_) => Self::usage(e.to_string()),
            _ => Self::semantic(e.to_string()),
        }
    }
}

impl From<InterventionError> for CliError {
    fn from(e: InterventionError) -> Self {
        match e {
            InterventionError::Syntax(_) => Self::usage(e.to_string()),
            InterventionError::Graph(g) => g.into(),
            _ => Self::semantic(e.to_string()),
        }
    }
}

impl From<InferError> for CliError {
    fn from(e: InferError) -> Self {
        match e {
            InferError::Intervention(i) => i.into(),
            _ => Self::semantic(e.to_string()),
        }
    }
}

impl From<SampleError> for CliError {
    fn from(e: SampleError) -> Self {
        match e {
            SampleError::Intervention(i) => i.into(),
            SampleError::Infer(i) => i.into(),
            _ => Self::semantic(e.to_string()),
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        Self::semantic(e.to_string())
    }
}

impl From<TableError> for CliError {
    fn from(e: TableError) -> Self {
        Self::semantic(e.to_string())
    }
}
