//! GF-style grammars: abstract syntax, concrete syntaxes over finite
//! parameters, compilation to a context-free grammar, all-parses chart
//! parsing and linearization.

mod ast;
mod cfg;
mod check;
mod earley;
mod eval;
mod syntax;

use std::fmt;
use std::path::Path;

use indexmap::IndexMap;
use thiserror::Error;

pub use ast::Ast;
pub use cfg::{Cfg, CfgSym, Nonterminal, Production, DEFAULT_NONTERMINAL_BOUND};
pub use eval::{Sym, Value};

/// A first-order function signature `f : A1 -> ... -> An -> C`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunSig {
    pub args: Vec<String>,
    pub result: String,
    /// The abstract module that declared it.
    pub origin: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbstractGrammar {
    pub name: String,
    pub extends: Vec<String>,
    pub startcat: Option<String>,
    /// Category name to declaring module, inherited ones first.
    pub cats: IndexMap<String, String>,
    pub funs: IndexMap<String, FunSig>,
}

impl AbstractGrammar {
    pub fn own_cats(&self) -> impl Iterator<Item = &str> + '_ {
        self.cats
            .iter()
            .filter(|(_, o)| **o == self.name)
            .map(|(c, _)| c.as_str())
    }

    pub fn own_funs(&self) -> impl Iterator<Item = (&str, &FunSig)> + '_ {
        self.funs
            .iter()
            .filter(|(_, s)| s.origin == self.name)
            .map(|(f, s)| (f.as_str(), s))
    }

    pub fn category_of(&self, ast: &Ast) -> Option<&str> {
        self.funs.get(&ast.fun).map(|s| s.result.as_str())
    }

    /// Checks arities and argument categories throughout the tree.
    pub fn check_ast(&self, ast: &Ast) -> Result<String, GrammarError> {
        let sig = self.funs.get(&ast.fun).ok_or_else(|| GrammarError::UnknownFunction {
            grammar: self.name.clone(),
            function: ast.fun.clone(),
        })?;
        if sig.args.len() != ast.children.len() {
            return Err(GrammarError::IllFormedAst {
                ast: ast.to_string(),
                message: format!(
                    "{} takes {} arguments, given {}",
                    ast.fun,
                    sig.args.len(),
                    ast.children.len()
                ),
            });
        }
        for (want, child) in sig.args.iter().zip(&ast.children) {
            let got = self.check_ast(child)?;
            if &got != want {
                return Err(GrammarError::IllFormedAst {
                    ast: ast.to_string(),
                    message: format!("argument {child} has category {got}, expected {want}"),
                });
            }
        }
        Ok(sig.result.clone())
    }
}

/// A parameter type: a finite set of constructors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamType {
    pub name: String,
    pub constructors: Vec<String>,
}

/// Linearization type of a category: one surface field `s` (a string, or a
/// table of strings over parameter keys) plus inherent parameter fields.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinType {
    /// Declared as bare `Str` rather than a record.
    pub plain: bool,
    pub keys: Vec<String>,
    pub inherent: Vec<(String, String)>,
}

impl fmt::Display for LinType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.plain {
            return write!(f, "Str");
        }
        write!(f, "{{ s : ")?;
        for k in &self.keys {
            write!(f, "{k} => ")?;
        }
        write!(f, "Str")?;
        for (n, p) in &self.inherent {
            write!(f, " ; {n} : {p}")?;
        }
        write!(f, " }}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pattern {
    Ctor(String),
    Var(String),
    Wild,
}

/// Linearization expressions. Tables carry their key type after checking.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LinExpr {
    Str(String),
    Empty,
    Concat(Box<LinExpr>, Box<LinExpr>),
    Arg(usize),
    Var(String),
    Proj(Box<LinExpr>, String),
    Select(Box<LinExpr>, Box<LinExpr>),
    Table(Option<String>, Vec<(Pattern, LinExpr)>),
    Param(String),
    Record(Vec<(String, LinExpr)>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lin {
    pub params: Vec<String>,
    pub body: LinExpr,
    /// The concrete module that defined it.
    pub origin: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConcreteGrammar {
    pub name: String,
    pub abstract_name: String,
    pub extends: Vec<String>,
    pub params: IndexMap<String, ParamType>,
    pub lincats: IndexMap<String, LinType>,
    pub lins: IndexMap<String, Lin>,
}

impl ConcreteGrammar {
    pub fn param_of(&self, ctor: &str) -> Option<&ParamType> {
        self.params.values().find(|p| p.constructors.iter().any(|c| c == ctor))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GrammarError {
    #[error("{file}:{line}:{col}: syntax error: {message}")]
    Syntax {
        file: String,
        line: usize,
        col: usize,
        message: String,
    },
    #[error("{module}: unknown category `{name}`")]
    UnknownCategory { module: String, name: String },
    #[error("{grammar}: unknown function `{function}`")]
    UnknownFunction { grammar: String, function: String },
    #[error("unknown grammar module `{0}`")]
    UnknownModule(String),
    #[error("`{name}` is defined twice in {module}")]
    DuplicateName { module: String, name: String },
    #[error("{concrete}: no lin for function `{function}`")]
    MissingLin { concrete: String, function: String },
    #[error("{concrete}: no lincat for category `{category}`")]
    MissingLincat { concrete: String, category: String },
    #[error("{concrete}: lin {function}: expected {expected}, found {found}")]
    LinTypeMismatch {
        concrete: String,
        function: String,
        expected: String,
        found: String,
    },
    #[error("{concrete}: {context}: {message}")]
    BadLin {
        concrete: String,
        context: String,
        message: String,
    },
    #[error("{concrete}: lincat {category}: {message}")]
    BadLincat {
        concrete: String,
        category: String,
        message: String,
    },
    #[error("{concrete}: lin {function}: argument `{argument}` occurs {count} times in the linearization of {nonterminal}; each argument must occur exactly once")]
    ArgumentUsage {
        concrete: String,
        function: String,
        argument: String,
        count: usize,
        nonterminal: String,
    },
    #[error("{concrete}: compilation needs more than {bound} nonterminals or rule instances")]
    ParamBlowup { concrete: String, bound: usize },
    #[error("{concrete}: unknown start category `{category}`")]
    UnknownStartCategory { concrete: String, category: String },
    #[error("table selection on a missing key `{0}`")]
    IncompleteTable(String),
    #[error("ill-formed tree {ast}: {message}")]
    IllFormedAst { ast: String, message: String },
}

/// Loaded grammar modules. Extensions are resolved at load time, so each
/// stored module is complete.
#[derive(Clone, Debug, Default)]
pub struct GrammarSet {
    abstracts: IndexMap<String, AbstractGrammar>,
    concretes: IndexMap<String, ConcreteGrammar>,
}

impl GrammarSet {
    pub fn new() -> Self {
        GrammarSet::default()
    }

    pub fn abstract_grammar(&self, name: &str) -> Option<&AbstractGrammar> {
        self.abstracts.get(name)
    }

    pub fn concrete(&self, name: &str) -> Option<&ConcreteGrammar> {
        self.concretes.get(name)
    }

    pub fn abstracts(&self) -> impl Iterator<Item = &AbstractGrammar> + '_ {
        self.abstracts.values()
    }

    pub fn concretes(&self) -> impl Iterator<Item = &ConcreteGrammar> + '_ {
        self.concretes.values()
    }

    pub fn load_file(&mut self, path: &Path) -> Result<Vec<String>, GrammarError> {
        let label = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|e| GrammarError::Syntax {
            file: label.clone(),
            line: 0,
            col: 0,
            message: format!("cannot read file: {e}"),
        })?;
        self.load_str(&text, &label)
    }

    /// Loads every module in `text`, in order; returns their names.
    pub fn load_str(&mut self, text: &str, file: &str) -> Result<Vec<String>, GrammarError> {
        let modules = syntax::parse_grammar_file(text, file)?;
        let mut names = Vec::new();
        for m in modules {
            match m {
                syntax::ModuleSrc::Abstract(a) => {
                    let a = check::build_abstract(self, a)?;
                    names.push(a.name.clone());
                    self.abstracts.insert(a.name.clone(), a);
                }
                syntax::ModuleSrc::Concrete(c) => {
                    let c = check::build_concrete(self, c)?;
                    names.push(c.name.clone());
                    self.concretes.insert(c.name.clone(), c);
                }
            }
        }
        Ok(names)
    }

    pub(crate) fn has_module(&self, name: &str) -> bool {
        self.abstracts.contains_key(name) || self.concretes.contains_key(name)
    }
}

/// A concrete syntax ready for parsing and linearization.
#[derive(Clone, Debug)]
pub struct CompiledConcrete {
    pub abstract_grammar: AbstractGrammar,
    pub concrete: ConcreteGrammar,
    pub cfg: Cfg,
}

impl CompiledConcrete {
    pub fn new(set: &GrammarSet, concrete: &str) -> Result<Self, GrammarError> {
        Self::with_bound(set, concrete, DEFAULT_NONTERMINAL_BOUND)
    }

    pub fn with_bound(set: &GrammarSet, concrete: &str, bound: usize) -> Result<Self, GrammarError> {
        let c = set
            .concrete(concrete)
            .ok_or_else(|| GrammarError::UnknownModule(concrete.to_string()))?;
        let a = set
            .abstract_grammar(&c.abstract_name)
            .ok_or_else(|| GrammarError::UnknownModule(c.abstract_name.clone()))?;
        let cfg = cfg::compile(a, c, bound)?;
        Ok(CompiledConcrete {
            abstract_grammar: a.clone(),
            concrete: c.clone(),
            cfg,
        })
    }

    pub fn name(&self) -> &str {
        &self.concrete.name
    }

    /// The start category: the explicit one, else the grammar's `startcat` flag.
    pub fn start_category<'a>(&'a self, cat: Option<&'a str>) -> Result<&'a str, GrammarError> {
        let cat =
            cat.or(self.abstract_grammar.startcat.as_deref())
                .ok_or_else(|| GrammarError::UnknownStartCategory {
                    concrete: self.concrete.name.clone(),
                    category: "(none given and no startcat flag)".into(),
                })?;
        if !self.abstract_grammar.cats.contains_key(cat) {
            return Err(GrammarError::UnknownStartCategory {
                concrete: self.concrete.name.clone(),
                category: cat.to_string(),
            });
        }
        Ok(cat)
    }

    /// All distinct trees of category `cat` whose linearization is `sentence`.
    pub fn parse(&self, cat: Option<&str>, sentence: &str) -> Result<Vec<Ast>, GrammarError> {
        let cat = self.start_category(cat)?;
        let tokens: Vec<&str> = sentence.split_whitespace().collect();
        Ok(earley::parse(&self.cfg, cat, &tokens))
    }

    pub fn linearize(&self, ast: &Ast) -> Result<String, GrammarError> {
        self.abstract_grammar.check_ast(ast)?;
        eval::linearize(&self.concrete, ast)
    }

    /// The full linearization record of a tree, with every table form.
    pub fn lin_value(&self, ast: &Ast) -> Result<Value, GrammarError> {
        self.abstract_grammar.check_ast(ast)?;
        eval::lin_value(&self.concrete, ast)
    }

    /// Parses with `self` and linearizes every tree with `to`, dropping repeats.
    pub fn translate(
        &self,
        to: &CompiledConcrete,
        cat: Option<&str>,
        sentence: &str,
    ) -> Result<Vec<String>, GrammarError> {
        let mut out: Vec<String> = Vec::new();
        for ast in self.parse(cat, sentence)? {
            let s = to.linearize(&ast)?;
            if !out.contains(&s) {
                out.push(s);
            }
        }
        Ok(out)
    }
}
