//! The correspondence between grammars and theories: language theories,
//! trees as terms, and semantics construction as view application followed
//! by β-normalization.

mod language;

use std::sync::Arc;

use indexmap::IndexMap;
use thiserror::Error;

pub use language::{
    ast_to_term, fill_stub, install_language_theories, language_theories, language_theory, pending_assignments,
    term_to_ast, view_stub,
};

use crate::grammar::{AbstractGrammar, Ast, CompiledConcrete, GrammarError, GrammarSet};
use crate::kernel::{check, normalize_with, Context, KernelError, NormalizeOptions, QName, Term, Unfolding};
use crate::tableau::{Connectives, Logic};
use crate::theory::{FlatTheory, ModuleError, TheoryGraph};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BridgeError {
    #[error(transparent)]
    Grammar(#[from] GrammarError),
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error("`{name}` in {module} cannot be a constant name in a language theory")]
    NameClash { module: String, name: String },
    #[error("language theory {theory} disagrees with its grammar: {message}")]
    LanguageTheoryMismatch { theory: String, message: String },
    #[error("view {view} is not total; missing assignments for {}", list(.missing))]
    TotalityFailure { view: String, missing: Vec<QName> },
    #[error("term `{0}` is not the image of a tree")]
    NotAnAst(Term),
    #[error("no concrete syntax for language `{0}`")]
    UnknownLanguage(String),
    #[error("semantics construction failed for `{ast}`: {error}")]
    Construction { ast: Ast, error: Box<BridgeError> },
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("fragment: {0}")]
    Invalid(String),
}

fn list(qs: &[QName]) -> String {
    qs.iter().map(|q| q.name.clone()).collect::<Vec<_>>().join(", ")
}

/// The names a fragment is assembled from.
#[derive(Clone, Debug, Default)]
pub struct FragmentConfig {
    pub name: String,
    pub abstract_grammar: String,
    /// Language tag to concrete module.
    pub concretes: IndexMap<String, String>,
    pub view: String,
    pub logic: String,
    pub domain: String,
    pub start_category: Option<String>,
    /// Target-logic type of propositions, in the target's surface syntax.
    pub proposition: String,
    /// The type of individuals, for grounding quantifiers.
    pub individuals: Option<String>,
    /// Role name (`and`, `or`, `not`, `implies`, `forall`, `exists`) to constant.
    pub connectives: IndexMap<String, String>,
}

/// A loaded fragment: grammars, theories and the semantics view. Immutable
/// once assembled, so pipelines may run concurrently over it.
#[derive(Debug)]
pub struct Fragment {
    pub name: String,
    pub grammars: GrammarSet,
    pub abstract_grammar: AbstractGrammar,
    pub concretes: IndexMap<String, CompiledConcrete>,
    pub graph: TheoryGraph,
    pub language_theory: String,
    pub logic: String,
    pub domain: String,
    pub view: String,
    pub start_category: String,
    pub proposition: Term,
    pub individuals: Option<Term>,
    pub connectives: Connectives,
    target: Arc<FlatTheory>,
}

/// One reading of an input: its tree, the translated term before
/// simplification, and the normal form with its target-logic check.
#[derive(Clone, Debug, PartialEq)]
pub struct Reading {
    pub ast: Ast,
    pub applied: Term,
    pub term: Term,
    pub check: TargetCheck,
}

impl Fragment {
    /// Checks the fragment invariants over already loaded grammars and
    /// theories. The language theory must be in `graph`.
    pub fn assemble(
        config: &FragmentConfig,
        grammars: GrammarSet,
        graph: TheoryGraph,
    ) -> Result<Fragment, BridgeError> {
        let abs = grammars
            .abstract_grammar(&config.abstract_grammar)
            .ok_or_else(|| GrammarError::UnknownModule(config.abstract_grammar.clone()))?
            .clone();
        let mut concretes = IndexMap::new();
        for (lang, name) in &config.concretes {
            let c = CompiledConcrete::new(&grammars, name)?;
            if c.concrete.abstract_name != abs.name {
                return Err(BridgeError::Invalid(format!(
                    "concrete {name} is of {}, not {}",
                    c.concrete.abstract_name, abs.name
                )));
            }
            concretes.insert(lang.clone(), c);
        }
        let view = graph
            .view(&config.view)
            .ok_or_else(|| BridgeError::Invalid(format!("no view named {}", config.view)))?;
        if view.source != abs.name {
            return Err(BridgeError::Invalid(format!(
                "view {} maps {}, not the language theory {}",
                view.name, view.source, abs.name
            )));
        }
        let target = graph.flatten(&view.target)?;
        for th in [&config.domain, &config.logic] {
            if !target.contains_theory(th) {
                return Err(BridgeError::Invalid(format!(
                    "view target {} does not include {th}",
                    view.target
                )));
            }
        }
        let report = graph.check_totality(&config.view)?;
        if !report.is_total() {
            return Err(BridgeError::TotalityFailure {
                view: report.view,
                missing: report.missing,
            });
        }
        let start_category = config
            .start_category
            .clone()
            .or_else(|| abs.startcat.clone())
            .ok_or_else(|| BridgeError::Invalid("no start category".into()))?;
        if !abs.cats.contains_key(&start_category) {
            return Err(GrammarError::UnknownStartCategory {
                concrete: abs.name.clone(),
                category: start_category,
            }
            .into());
        }
        let parse_in_target = |text: &str| {
            target
                .parse(text)
                .map_err(|e| BridgeError::Invalid(format!("cannot read `{text}` in {}: {e}", target.name())))
        };
        let proposition = parse_in_target(&config.proposition)?;
        let individuals = config.individuals.as_deref().map(parse_in_target).transpose()?;
        let mut connectives = Connectives::default();
        for (role, name) in &config.connectives {
            let q = target
                .lookup(name)
                .map(|d| d.name.clone())
                .ok_or_else(|| BridgeError::Invalid(format!("connective `{name}` is not declared")))?;
            connectives
                .set(role, q)
                .map_err(|_| BridgeError::Invalid(format!("unknown connective role `{role}`")))?;
        }
        Ok(Fragment {
            name: config.name.clone(),
            language_theory: abs.name.clone(),
            abstract_grammar: abs,
            grammars,
            concretes,
            logic: config.logic.clone(),
            domain: config.domain.clone(),
            view: config.view.clone(),
            start_category,
            proposition,
            individuals,
            connectives,
            target,
            graph,
        })
    }

    /// The view's target: logic and domain theory.
    pub fn target(&self) -> &Arc<FlatTheory> {
        &self.target
    }

    pub fn concrete(&self, lang: &str) -> Result<&CompiledConcrete, BridgeError> {
        self.concretes
            .get(lang)
            .ok_or_else(|| BridgeError::UnknownLanguage(lang.to_string()))
    }

    /// The signature semantic analysis runs over.
    pub fn logic(&self) -> Logic {
        Logic {
            theory: self.target.clone(),
            proposition: self.proposition.clone(),
            individuals: self.individuals.clone(),
            connectives: self.connectives.clone(),
        }
    }

    pub fn print(&self, t: &Term) -> String {
        self.target.print(t)
    }

    pub fn parse_term(&self, text: &str) -> Result<Term, BridgeError> {
        self.target
            .parse(text)
            .map_err(|e| BridgeError::Invalid(format!("cannot read `{text}`: {e}")))
    }

    /// The target type a category denotes.
    pub fn category_type(&self, cat: &str) -> Result<Term, BridgeError> {
        let origin = self
            .abstract_grammar
            .cats
            .get(cat)
            .ok_or_else(|| GrammarError::UnknownCategory {
                module: self.abstract_grammar.name.clone(),
                name: cat.to_string(),
            })?;
        let t = self
            .graph
            .apply_view(&self.view, &Term::constant(QName::new(origin, cat)))?;
        Ok(normalize_with(self.target.as_ref(), &t, &NormalizeOptions::default())?)
    }

    /// Semantics construction for one tree.
    pub fn construct_ast(&self, ast: &Ast) -> Result<Reading, BridgeError> {
        let wrap = |error: BridgeError| BridgeError::Construction {
            ast: ast.clone(),
            error: Box::new(error),
        };
        let cat = self.abstract_grammar.check_ast(ast).map_err(|e| wrap(e.into()))?;
        let term = ast_to_term(&self.abstract_grammar, ast).map_err(wrap)?;
        let applied = self.graph.apply_view(&self.view, &term).map_err(|e| wrap(e.into()))?;
        let nf =
            normalize_with(self.target.as_ref(), &applied, &NormalizeOptions::default()).map_err(|e| wrap(e.into()))?;
        let ty = self.category_type(&cat).map_err(wrap)?;
        let nf = check(self.target.as_ref(), &Context::new(), &nf, &ty).map_err(|e| wrap(e.into()))?;
        let check = check_in_target_logic(&self.target, &nf);
        Ok(Reading {
            ast: ast.clone(),
            applied,
            term: nf,
            check,
        })
    }

    /// Parses `sentence` with the concrete syntax of `lang` and constructs a
    /// reading per tree, in parse order. Readings whose normal forms are
    /// α-equal are kept once.
    pub fn construct(&self, lang: &str, cat: Option<&str>, sentence: &str) -> Result<Vec<Reading>, BridgeError> {
        let conc = self.concrete(lang)?;
        let cat = cat.unwrap_or(&self.start_category);
        let mut out: Vec<Reading> = Vec::new();
        for ast in conc.parse(Some(cat), sentence)? {
            let r = self.construct_ast(&ast)?;
            if !out.iter().any(|o| crate::kernel::alpha_eq(&o.term, &r.term)) {
                out.push(r);
            }
        }
        Ok(out)
    }
}

/// Why a normalized term is not a plain target-logic expression.
#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostic {
    pub subterm: Term,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TargetCheck {
    pub diagnostics: Vec<Diagnostic>,
}

impl TargetCheck {
    pub fn is_ok(&self) -> bool {
        self.diagnostics.is_empty()
    }
}

/// Accepts `t` iff every constant is declared in `target` and every
/// λ-abstraction is the argument of a constant at a function-typed position,
/// i.e. a binder in higher-order abstract syntax.
pub fn check_in_target_logic(target: &FlatTheory, t: &Term) -> TargetCheck {
    let mut diagnostics = Vec::new();
    walk(target, t, &mut diagnostics);
    TargetCheck { diagnostics }
}

fn argument_domains(target: &FlatTheory, q: &QName) -> Vec<Term> {
    let full = NormalizeOptions {
        unfolding: Unfolding::Full,
        ..NormalizeOptions::default()
    };
    let Some(ty) = target.get(q).and_then(|d| d.ty.as_ref()) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    let mut cur = normalize_with(target, ty, &full).unwrap_or_else(|_| ty.clone());
    while let Term::Pi(_, dom, cod) = cur {
        out.push(*dom);
        cur = *cod;
    }
    out
}

fn walk(target: &FlatTheory, t: &Term, out: &mut Vec<Diagnostic>) {
    match t {
        Term::Lam(..) => out.push(Diagnostic {
            subterm: t.clone(),
            message: "λ-abstraction outside a binder position; a β-redex residue".into(),
        }),
        Term::Const(q) => {
            if !target.contains(q) {
                out.push(Diagnostic {
                    subterm: t.clone(),
                    message: format!("{q} is not declared in {}", target.name()),
                });
            }
        }
        Term::Var(_) | Term::Sort(_) => {}
        Term::Pi(_, d, c) => {
            walk(target, d, out);
            walk(target, c, out);
        }
        Term::App(..) => {
            let (head, args) = t.spine();
            let domains = match head {
                Term::Const(q) => {
                    walk(target, head, out);
                    argument_domains(target, q)
                }
                Term::Var(_) => Vec::new(),
                _ => {
                    walk(target, head, out);
                    Vec::new()
                }
            };
            for (i, a) in args.iter().enumerate() {
                // A binder position of function depth n sanctions n leading λs.
                let mut depth = domains.get(i).map_or(0, crate::kernel::pi_arity);
                let mut inner = *a;
                while let (Term::Lam(_, _, b), true) = (inner, depth > 0) {
                    inner = b;
                    depth -= 1;
                }
                walk(target, inner, out);
            }
        }
    }
}
