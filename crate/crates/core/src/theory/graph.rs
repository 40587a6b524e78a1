use std::collections::HashMap;
use std::path::Path;
use std::sync::Arc;

use indexmap::IndexMap;

use super::file::{self, ModuleSrc, TermSrc, TheoryItem, TheorySrc};
use super::{Loc, ModuleError, Theory, View, LF};
use crate::kernel::{
    check, check_is_type, elaborate, normalize_with, pi_arity, Context, Declaration, KernelError, NormalizeOptions,
    QName, Signature, Term, Unfolding, DEFAULT_PRECEDENCE,
};
use crate::syntax::{
    notation_from_tokens, parse_term, parse_tokens, print_term, validate_notation, Resolution, TermError, Vocabulary,
};

/// A theory together with everything it includes, in dependency order.
#[derive(Clone, Debug, Default)]
pub struct FlatTheory {
    name: String,
    theories: Vec<String>,
    decls: IndexMap<QName, Declaration>,
    vocab: Vocabulary,
}

impl Signature for FlatTheory {
    fn declaration(&self, name: &QName) -> Option<&Declaration> {
        self.decls.get(name)
    }
}

impl FlatTheory {
    pub fn new(name: impl Into<String>) -> Self {
        let name = name.into();
        FlatTheory {
            theories: vec![name.clone()],
            name,
            ..FlatTheory::default()
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Contributing theories, in flattening order; the theory itself comes last.
    pub fn theories(&self) -> &[String] {
        &self.theories
    }

    pub fn contains_theory(&self, name: &str) -> bool {
        self.theories.iter().any(|t| t == name)
    }

    pub fn declarations(&self) -> impl Iterator<Item = &Declaration> + '_ {
        self.decls.values()
    }

    pub fn len(&self) -> usize {
        self.decls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.decls.is_empty()
    }

    pub fn get(&self, q: &QName) -> Option<&Declaration> {
        self.decls.get(q)
    }

    pub fn contains(&self, q: &QName) -> bool {
        self.decls.contains_key(q)
    }

    /// Looks up `c` or `T?c`; an unqualified name must be unique.
    pub fn lookup(&self, name: &str) -> Option<&Declaration> {
        if let Some(q) = QName::parse_qualified(name) {
            return self.decls.get(&q);
        }
        match self.vocab.resolve(name) {
            Resolution::Unique(q) => self.decls.get(q),
            _ => None,
        }
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn parse(&self, text: &str) -> Result<Term, TermError> {
        parse_term(&self.vocab, text)
    }

    pub fn print(&self, t: &Term) -> String {
        print_term(&self.vocab, t)
    }

    fn push(&mut self, d: Declaration) {
        self.vocab.add(d.name.clone(), d.notation.clone());
        self.decls.insert(d.name.clone(), d);
    }

    /// Adds the theories of `other` that are not present yet.
    fn absorb(&mut self, other: &FlatTheory) {
        for th in &other.theories {
            if self.contains_theory(th) {
                continue;
            }
            let pos = self.theories.len() - 1;
            self.theories.insert(pos, th.clone());
            for d in other.decls.values().filter(|d| &d.name.theory == th) {
                self.push(d.clone());
            }
        }
    }
}

/// Registry of loaded theories and views. Modules are immutable once added.
#[derive(Clone, Debug, Default)]
pub struct TheoryGraph {
    theories: IndexMap<String, Arc<Theory>>,
    flat: HashMap<String, Arc<FlatTheory>>,
    views: IndexMap<String, Arc<View>>,
}

/// Why a single declaration was rejected.
pub(crate) enum DeclError {
    Type(KernelError),
    Notation(String),
}

/// Type-checks a declaration against the theory so far and elaborates its
/// components. The result always carries a type.
pub(crate) fn check_declaration(flat: &FlatTheory, d: Declaration) -> Result<Declaration, DeclError> {
    let ctx = Context::new();
    let ty = match &d.ty {
        Some(ty) => Some(check_is_type(flat, &ctx, ty).map_err(DeclError::Type)?),
        None => None,
    };
    let (ty, definiens) = match (ty, &d.definiens) {
        (Some(ty), Some(def)) => {
            let def = check(flat, &ctx, def, &ty).map_err(DeclError::Type)?;
            (ty, Some(def))
        }
        (Some(ty), None) => (ty, None),
        (None, Some(def)) => {
            let (def, ty) = elaborate(flat, &ctx, def, None).map_err(DeclError::Type)?;
            (ty, Some(def))
        }
        (None, None) => return Err(DeclError::Notation("a declaration needs a type or a definiens".into())),
    };
    if let Some(n) = &d.notation {
        validate_notation(n).map_err(DeclError::Notation)?;
        let full = NormalizeOptions {
            unfolding: Unfolding::Full,
            ..NormalizeOptions::default()
        };
        let unfolded = normalize_with(flat, &ty, &full).map_err(DeclError::Type)?;
        n.validate(pi_arity(&unfolded)).map_err(DeclError::Notation)?;
        if n.implicit_args() > 0 && definiens.is_some() {
            return Err(DeclError::Notation(
                "a constant with implicit arguments cannot have a definiens".into(),
            ));
        }
    }
    Ok(Declaration {
        name: d.name,
        ty: Some(ty),
        definiens,
        notation: d.notation,
    })
}

impl TheoryGraph {
    pub fn new() -> Self {
        TheoryGraph::default()
    }

    pub fn theory(&self, name: &str) -> Option<&Theory> {
        self.theories.get(name).map(Arc::as_ref)
    }

    pub fn theories(&self) -> impl Iterator<Item = &Theory> + '_ {
        self.theories.values().map(Arc::as_ref)
    }

    pub fn view(&self, name: &str) -> Option<&View> {
        self.views.get(name).map(Arc::as_ref)
    }

    pub fn views(&self) -> impl Iterator<Item = &View> + '_ {
        self.views.values().map(Arc::as_ref)
    }

    /// The flattened theory: meta-theory, then includes (depth first, each
    /// theory once), then own declarations.
    pub fn flatten(&self, name: &str) -> Result<Arc<FlatTheory>, ModuleError> {
        self.flat
            .get(name)
            .cloned()
            .ok_or_else(|| ModuleError::UnresolvedReference {
                loc: Loc::default(),
                kind: "theory",
                name: name.to_string(),
            })
    }

    fn check_fresh_name(&self, name: &str, loc: &Loc) -> Result<(), ModuleError> {
        if self.theories.contains_key(name) || self.views.contains_key(name) || name == LF {
            return Err(ModuleError::DuplicateModule(name.to_string(), loc.clone()));
        }
        Ok(())
    }

    pub fn load_file(&mut self, path: &Path) -> Result<Vec<String>, ModuleError> {
        let label = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|e| ModuleError::Syntax {
            file: label.clone(),
            pos: Default::default(),
            message: format!("cannot read file: {e}"),
        })?;
        self.load_str(&text, &label)
    }

    /// Loads every theory and view of a file, in order. Returns their names.
    pub fn load_str(&mut self, text: &str, file: &str) -> Result<Vec<String>, ModuleError> {
        let modules = file::parse_modules(text, file)?;
        let mut names = Vec::new();
        for m in modules {
            names.push(m.name().to_string());
            match m {
                ModuleSrc::Theory(t) => self.load_theory(&t, file)?,
                ModuleSrc::View(v) => self.load_view(&v, file)?,
            }
        }
        Ok(names)
    }

    fn include_into(
        &self,
        flat: &mut FlatTheory,
        me: &str,
        inc: &str,
        loc: Loc,
        kind: &'static str,
    ) -> Result<(), ModuleError> {
        if inc == me {
            return Err(ModuleError::CyclicInclude {
                loc,
                name: me.to_string(),
            });
        }
        let f = self.flat.get(inc).ok_or_else(|| ModuleError::UnresolvedReference {
            loc,
            kind,
            name: inc.to_string(),
        })?;
        flat.absorb(f);
        Ok(())
    }

    fn load_theory(&mut self, src: &TheorySrc, file: &str) -> Result<(), ModuleError> {
        let at = |pos| Loc {
            file: file.to_string(),
            pos,
        };
        self.check_fresh_name(&src.name, &at(src.pos))?;
        let mut flat = FlatTheory::new(&src.name);
        let mut th = Theory {
            name: src.name.clone(),
            meta: src.meta.as_ref().map(|m| m.0.clone()),
            includes: Vec::new(),
            declarations: Vec::new(),
        };
        if let Some((m, p)) = &src.meta {
            if m != LF {
                self.include_into(&mut flat, &src.name, m, at(*p), "meta-theory")?;
            }
        }
        for item in &src.items {
            match item {
                TheoryItem::Include(n, p) => {
                    self.include_into(&mut flat, &src.name, n, at(*p), "theory")?;
                    th.includes.push(n.clone());
                }
                TheoryItem::Decl(d) => {
                    let loc = at(d.pos);
                    if th.declaration(&d.name).is_some() {
                        return Err(ModuleError::DuplicateName {
                            loc,
                            module: src.name.clone(),
                            name: d.name.clone(),
                        });
                    }
                    let term = |t: &Option<TermSrc>| -> Result<Option<Term>, ModuleError> {
                        t.as_ref()
                            .map(|t| parse_tokens(flat.vocabulary(), &t.tokens, &[], t.end))
                            .transpose()
                            .map_err(|error| ModuleError::Term {
                                loc: loc.clone(),
                                decl: d.name.clone(),
                                error,
                            })
                    };
                    let ty = term(&d.ty)?;
                    let definiens = term(&d.definiens)?;
                    let notation = match &d.notation {
                        Some(n) => Some(
                            notation_from_tokens(&n.tokens, n.precedence.unwrap_or(DEFAULT_PRECEDENCE)).map_err(
                                |message| ModuleError::Notation {
                                    loc: at(n.pos),
                                    decl: d.name.clone(),
                                    message,
                                },
                            )?,
                        ),
                        None => None,
                    };
                    let decl = Declaration {
                        name: QName::new(&src.name, &d.name),
                        ty,
                        definiens,
                        notation,
                    };
                    let decl = check_declaration(&flat, decl).map_err(|e| decl_error(e, loc, &d.name))?;
                    flat.push(decl.clone());
                    th.declarations.push(decl);
                }
            }
        }
        self.insert_theory(th, flat);
        Ok(())
    }

    /// Adds a theory built programmatically; its declarations are checked and
    /// elaborated as if loaded from a file.
    pub fn add_theory(&mut self, th: Theory) -> Result<(), ModuleError> {
        let at = || Loc {
            file: format!("theory {}", th.name),
            pos: Default::default(),
        };
        self.check_fresh_name(&th.name, &at())?;
        let mut flat = FlatTheory::new(&th.name);
        if let Some(m) = th.meta.as_deref().filter(|m| *m != LF) {
            self.include_into(&mut flat, &th.name, m, at(), "meta-theory")?;
        }
        for inc in &th.includes {
            self.include_into(&mut flat, &th.name, inc, at(), "theory")?;
        }
        let mut checked = Vec::new();
        for d in &th.declarations {
            let short = d.name.name.clone();
            if d.name.theory != th.name || checked.iter().any(|c: &Declaration| c.name == d.name) {
                return Err(ModuleError::DuplicateName {
                    loc: at(),
                    module: th.name.clone(),
                    name: short,
                });
            }
            let decl = check_declaration(&flat, d.clone()).map_err(|e| decl_error(e, at(), &short))?;
            flat.push(decl.clone());
            checked.push(decl);
        }
        let th = Theory {
            declarations: checked,
            ..th
        };
        self.insert_theory(th, flat);
        Ok(())
    }

    fn insert_theory(&mut self, th: Theory, flat: FlatTheory) {
        self.flat.insert(th.name.clone(), Arc::new(flat));
        self.theories.insert(th.name.clone(), Arc::new(th));
    }

    pub(crate) fn insert_view(&mut self, v: View) {
        self.views.insert(v.name.clone(), Arc::new(v));
    }

    pub(crate) fn fresh_module_name(&self, name: &str, loc: &Loc) -> Result<(), ModuleError> {
        self.check_fresh_name(name, loc)
    }
}

fn decl_error(e: DeclError, loc: Loc, decl: &str) -> ModuleError {
    match e {
        DeclError::Type(error) => ModuleError::Type {
            loc,
            decl: decl.to_string(),
            error,
        },
        DeclError::Notation(message) => ModuleError::Notation {
            loc,
            decl: decl.to_string(),
            message,
        },
    }
}
