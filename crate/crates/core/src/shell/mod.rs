//! Fragment packaging and the command layer: manifests, knowledge files,
//! gold-standard regression and interactive sessions.

mod gold;
mod session;

use std::path::{Path, PathBuf};

use indexmap::IndexMap;
use thiserror::Error;

pub use gold::{parse_gold, run_gold, run_gold_dir, CaseResult, GoldCase, GoldReport};
pub use session::{Outcome, Session, HELP};

use crate::bridge::{install_language_theories, BridgeError, Fragment, FragmentConfig};
use crate::grammar::GrammarSet;
use crate::kernel::Term;
use crate::tableau::TableauError;
use crate::theory::TheoryGraph;

/// File name of the manifest inside a fragment directory.
pub const MANIFEST: &str = "fragment.manifest";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ShellError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{path}:{line}: {message}")]
    Manifest { path: String, line: usize, message: String },
    #[error("{path}: missing key `{key}`")]
    MissingKey { path: String, key: String },
    #[error("{manifest}: `{key}` names {file}, which does not exist")]
    MissingFile {
        manifest: String,
        key: String,
        file: String,
    },
    #[error("{0}")]
    Load(String),
    #[error(transparent)]
    Bridge(#[from] BridgeError),
    #[error(transparent)]
    Tableau(#[from] TableauError),
    #[error("{file}:{line}: {message}")]
    GoldFormat { file: String, line: usize, message: String },
    #[error("{file}:{line}: {message}")]
    Knowledge { file: String, line: usize, message: String },
}

fn read(path: &Path) -> Result<String, ShellError> {
    std::fs::read_to_string(path).map_err(|e| ShellError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// `key = value` lines; `#` starts a comment line. Repeated keys keep all
/// values, in order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Manifest {
    pub path: PathBuf,
    pub entries: IndexMap<String, Vec<String>>,
}

impl Manifest {
    pub fn parse(text: &str, path: &Path) -> Result<Manifest, ShellError> {
        let mut entries: IndexMap<String, Vec<String>> = IndexMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(ShellError::Manifest {
                    path: path.display().to_string(),
                    line: i + 1,
                    message: format!("expected `key = value`, found `{line}`"),
                });
            };
            entries
                .entry(k.trim().to_string())
                .or_default()
                .push(v.trim().to_string());
        }
        Ok(Manifest {
            path: path.to_path_buf(),
            entries,
        })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).and_then(|v| v.last()).map(String::as_str)
    }

    pub fn require(&self, key: &str) -> Result<&str, ShellError> {
        self.get(key).ok_or_else(|| ShellError::MissingKey {
            path: self.path.display().to_string(),
            key: key.to_string(),
        })
    }

    /// All whitespace-separated words of every line with this key.
    pub fn list(&self, key: &str) -> Vec<&str> {
        self.entries
            .get(key)
            .into_iter()
            .flatten()
            .flat_map(|v| v.split_whitespace())
            .collect()
    }

    /// Entries `prefix.suffix = value`, as (suffix, value).
    pub fn with_prefix<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = (&'a str, &'a str)> + 'a {
        self.entries.iter().filter_map(move |(k, v)| {
            let rest = k.strip_prefix(prefix)?.strip_prefix('.')?;
            Some((rest, v.last()?.as_str()))
        })
    }

    fn dir(&self) -> &Path {
        self.path.parent().unwrap_or(Path::new("."))
    }

    /// Files listed under `key`, relative to the manifest; each must exist.
    fn files(&self, key: &str) -> Result<Vec<PathBuf>, ShellError> {
        self.list(key)
            .into_iter()
            .map(|f| {
                let p = self.dir().join(f);
                if p.is_file() {
                    Ok(p)
                } else {
                    Err(ShellError::MissingFile {
                        manifest: self.path.display().to_string(),
                        key: key.to_string(),
                        file: f.to_string(),
                    })
                }
            })
            .collect()
    }
}

/// The manifest of a fragment directory, or the manifest file itself.
pub fn manifest_path(path: &Path) -> PathBuf {
    if path.is_dir() {
        path.join(MANIFEST)
    } else {
        path.to_path_buf()
    }
}

/// Loads grammars, theories, the language theory and views named by the
/// manifest, then assembles and checks the fragment.
pub fn load_fragment(path: &Path) -> Result<Fragment, ShellError> {
    let mpath = manifest_path(path);
    let manifest = Manifest::parse(&read(&mpath)?, &mpath)?;
    load_from_manifest(&manifest)
}

pub fn load_from_manifest(m: &Manifest) -> Result<Fragment, ShellError> {
    let mut grammars = GrammarSet::new();
    for f in m.files("grammars")? {
        grammars.load_file(&f).map_err(|e| ShellError::Load(e.to_string()))?;
    }
    let mut graph = TheoryGraph::new();
    for f in m.files("theories")? {
        graph.load_file(&f).map_err(|e| ShellError::Load(e.to_string()))?;
    }
    for f in m.files("language")? {
        graph.load_file(&f).map_err(|e| ShellError::Load(e.to_string()))?;
    }
    let abstract_grammar = m.require("abstract")?.to_string();
    install_language_theories(&mut graph, &grammars, &abstract_grammar)?;
    let views = m.files("views")?;
    if views.is_empty() {
        return Err(ShellError::MissingKey {
            path: m.path.display().to_string(),
            key: "views".into(),
        });
    }
    for f in views {
        graph.load_file(&f).map_err(|e| ShellError::Load(e.to_string()))?;
    }
    let config = FragmentConfig {
        name: m.get("name").unwrap_or(&abstract_grammar).to_string(),
        abstract_grammar,
        concretes: m
            .with_prefix("concrete")
            .map(|(l, c)| (l.to_string(), c.to_string()))
            .collect(),
        view: m.require("view")?.to_string(),
        logic: m.require("logic")?.to_string(),
        domain: m.require("domain")?.to_string(),
        start_category: m.get("startcat").map(str::to_string),
        proposition: m.require("proposition")?.to_string(),
        individuals: m.get("individuals").map(str::to_string),
        connectives: m
            .with_prefix("connective")
            .map(|(r, c)| (r.to_string(), c.to_string()))
            .collect(),
    };
    Ok(Fragment::assemble(&config, grammars, graph)?)
}

/// World knowledge: one proposition per line in the target's syntax. Blank
/// lines and lines starting with `#` or `//` are skipped.
pub fn parse_knowledge(fragment: &Fragment, text: &str, file: &str) -> Result<Vec<Term>, ShellError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("//") {
            continue;
        }
        let t = fragment.parse_term(line).map_err(|e| ShellError::Knowledge {
            file: file.to_string(),
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(t);
    }
    Ok(out)
}

pub fn load_knowledge(fragment: &Fragment, path: &Path) -> Result<Vec<Term>, ShellError> {
    parse_knowledge(fragment, &read(path)?, &path.display().to_string())
}
