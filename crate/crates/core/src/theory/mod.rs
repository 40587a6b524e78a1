//! Theories, includes, meta-theories and views, plus the textual file format.

pub mod file;
mod graph;
mod view;

use std::fmt;

use thiserror::Error;

use crate::kernel::{Declaration, KernelError, QName};
use crate::syntax::{Pos, TermError};

pub use graph::{FlatTheory, TheoryGraph};
pub use view::{TotalityReport, View};

/// The built-in meta-theory.
pub const LF: &str = "LF";

/// A theory as stored in the graph: own declarations only, names qualified
/// by this theory.
#[derive(Clone, Debug, PartialEq)]
pub struct Theory {
    pub name: String,
    pub meta: Option<String>,
    pub includes: Vec<String>,
    pub declarations: Vec<Declaration>,
}

impl Theory {
    pub fn new(name: impl Into<String>) -> Self {
        Theory {
            name: name.into(),
            meta: Some(LF.to_string()),
            includes: Vec::new(),
            declarations: Vec::new(),
        }
    }

    pub fn declaration(&self, name: &str) -> Option<&Declaration> {
        self.declarations.iter().find(|d| d.name.name == name)
    }
}

/// Where a module-level error occurred.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Loc {
    pub file: String,
    pub pos: Pos,
}

impl fmt::Display for Loc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.file.is_empty() {
            write!(f, "{}", self.pos)
        } else {
            write!(f, "{}:{}", self.file, self.pos)
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModuleError {
    #[error("{file}:{pos}: syntax error: {message}")]
    Syntax { file: String, pos: Pos, message: String },
    #[error("{loc}: in `{decl}`: {error}")]
    Term { loc: Loc, decl: String, error: TermError },
    #[error("{loc}: `{decl}` does not type-check: {error}")]
    Type { loc: Loc, decl: String, error: KernelError },
    #[error("{loc}: bad notation for `{decl}`: {message}")]
    Notation { loc: Loc, decl: String, message: String },
    #[error("{loc}: `{name}` is declared twice in {module}")]
    DuplicateName { loc: Loc, module: String, name: String },
    #[error("{loc}: a module named `{0}` already exists", loc = .1)]
    DuplicateModule(String, Loc),
    #[error("{loc}: theory `{name}` includes itself")]
    CyclicInclude { loc: Loc, name: String },
    #[error("{loc}: unknown {kind} `{name}`")]
    UnresolvedReference { loc: Loc, kind: &'static str, name: String },
    #[error("{loc}: view {view}: {message}")]
    BadView { loc: Loc, view: String, message: String },
    #[error("view {view} does not assign the undefined constant {constant}")]
    PartialView { view: String, constant: QName },
}
