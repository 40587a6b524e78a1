//! Building loaded modules: extension merging, coverage, lincat shape and
//! lin type checking. Checking resolves identifiers and annotates tables
//! with their key types.

use std::fmt;

use indexmap::IndexMap;

use super::syntax::{AbstractSrc, ConcreteSrc, SrcPos, TypeSrc};
use super::{
    AbstractGrammar, ConcreteGrammar, FunSig, GrammarError, GrammarSet, Lin, LinExpr, LinType, ParamType, Pattern,
};

/// Types of linearization expressions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum LType {
    Str,
    Param(String),
    Table(String, Box<LType>),
    Record(Vec<(String, LType)>),
}

impl LType {
    fn same(&self, other: &LType) -> bool {
        match (self, other) {
            (LType::Record(a), LType::Record(b)) => {
                a.len() == b.len() && a.iter().all(|(n, t)| b.iter().any(|(m, u)| m == n && t.same(u)))
            }
            (LType::Table(p, a), LType::Table(q, b)) => p == q && a.same(b),
            _ => self == other,
        }
    }

    fn field(&self, f: &str) -> Option<&LType> {
        match self {
            LType::Record(fs) => fs.iter().find(|(n, _)| n == f).map(|(_, t)| t),
            _ => None,
        }
    }
}

impl fmt::Display for LType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LType::Str => write!(f, "Str"),
            LType::Param(p) => write!(f, "{p}"),
            LType::Table(p, v) => write!(f, "{p} => {v}"),
            LType::Record(fs) => {
                write!(f, "{{")?;
                for (i, (n, t)) in fs.iter().enumerate() {
                    write!(f, "{}{n} : {t}", if i == 0 { " " } else { " ; " })?;
                }
                write!(f, " }}")
            }
        }
    }
}

pub(crate) fn lincat_ltype(l: &LinType) -> LType {
    let mut surface = LType::Str;
    for k in l.keys.iter().rev() {
        surface = LType::Table(k.clone(), Box::new(surface));
    }
    if l.plain {
        return surface;
    }
    let mut fields = vec![("s".to_string(), surface)];
    fields.extend(l.inherent.iter().map(|(n, p)| (n.clone(), LType::Param(p.clone()))));
    LType::Record(fields)
}

fn located(file: &str, pos: SrcPos) -> String {
    format!("{file}:{}:{}", pos.line, pos.col)
}

pub(super) fn build_abstract(set: &GrammarSet, src: AbstractSrc) -> Result<AbstractGrammar, GrammarError> {
    if set.has_module(&src.name) {
        return Err(GrammarError::DuplicateName {
            module: "the grammar set".into(),
            name: src.name,
        });
    }
    let dup = |name: &str| GrammarError::DuplicateName {
        module: src.name.clone(),
        name: name.to_string(),
    };
    let mut a = AbstractGrammar {
        name: src.name.clone(),
        extends: src.extends.clone(),
        startcat: None,
        cats: IndexMap::new(),
        funs: IndexMap::new(),
    };
    for e in &src.extends {
        let base = set
            .abstract_grammar(e)
            .ok_or_else(|| GrammarError::UnknownModule(e.clone()))?;
        for (c, o) in &base.cats {
            if a.cats.get(c).is_some_and(|o2| o2 != o) {
                return Err(dup(c));
            }
            a.cats.insert(c.clone(), o.clone());
        }
        for (f, s) in &base.funs {
            if a.funs.get(f).is_some_and(|s2| s2 != s) {
                return Err(dup(f));
            }
            a.funs.insert(f.clone(), s.clone());
        }
        if a.startcat.is_none() {
            a.startcat = base.startcat.clone();
        }
    }
    for (c, _) in &src.cats {
        if a.cats.contains_key(c) {
            return Err(dup(c));
        }
        a.cats.insert(c.clone(), src.name.clone());
    }
    let unknown_cat = |name: &str| GrammarError::UnknownCategory {
        module: src.name.clone(),
        name: name.to_string(),
    };
    for f in &src.funs {
        if a.funs.contains_key(&f.name) {
            return Err(dup(&f.name));
        }
        for c in f.args.iter().chain(std::iter::once(&f.result)) {
            if !a.cats.contains_key(c) {
                return Err(unknown_cat(c));
            }
        }
        a.funs.insert(
            f.name.clone(),
            FunSig {
                args: f.args.clone(),
                result: f.result.clone(),
                origin: src.name.clone(),
            },
        );
    }
    if let Some(s) = src.startcat {
        if !a.cats.contains_key(&s) {
            return Err(unknown_cat(&s));
        }
        a.startcat = Some(s);
    }
    Ok(a)
}

pub(super) fn build_concrete(set: &GrammarSet, src: ConcreteSrc) -> Result<ConcreteGrammar, GrammarError> {
    if set.has_module(&src.name) {
        return Err(GrammarError::DuplicateName {
            module: "the grammar set".into(),
            name: src.name,
        });
    }
    let abs = set
        .abstract_grammar(&src.abstract_name)
        .ok_or_else(|| GrammarError::UnknownModule(src.abstract_name.clone()))?;
    let name = src.name.clone();
    let dup = |n: &str| GrammarError::DuplicateName {
        module: name.clone(),
        name: n.to_string(),
    };
    let mut c = ConcreteGrammar {
        name: src.name.clone(),
        abstract_name: src.abstract_name.clone(),
        extends: src.extends.clone(),
        params: IndexMap::new(),
        lincats: IndexMap::new(),
        lins: IndexMap::new(),
    };
    for e in &src.extends {
        let base = set.concrete(e).ok_or_else(|| GrammarError::UnknownModule(e.clone()))?;
        let base_abs = set
            .abstract_grammar(&base.abstract_name)
            .ok_or_else(|| GrammarError::UnknownModule(base.abstract_name.clone()))?;
        if base_abs.funs.keys().any(|f| !abs.funs.contains_key(f)) {
            return Err(GrammarError::BadLin {
                concrete: name.clone(),
                context: located(&src.file, src.pos),
                message: format!(
                    "{e} linearizes {}, which {} does not extend",
                    base.abstract_name, abs.name
                ),
            });
        }
        for (k, p) in &base.params {
            if c.params.get(k).is_some_and(|q| q != p) {
                return Err(dup(k));
            }
            c.params.insert(k.clone(), p.clone());
        }
        for (k, l) in &base.lincats {
            if c.lincats.get(k).is_some_and(|m| m != l) {
                return Err(dup(k));
            }
            c.lincats.insert(k.clone(), l.clone());
        }
        for (k, l) in &base.lins {
            if c.lins.get(k).is_some_and(|m| m != l) {
                return Err(dup(k));
            }
            c.lins.insert(k.clone(), l.clone());
        }
    }

    for (p, ctors, _) in &src.params {
        if c.params.contains_key(p) {
            return Err(dup(p));
        }
        for (i, k) in ctors.iter().enumerate() {
            if c.param_of(k).is_some() || ctors[..i].contains(k) {
                return Err(dup(k));
            }
        }
        c.params.insert(
            p.clone(),
            ParamType {
                name: p.clone(),
                constructors: ctors.clone(),
            },
        );
    }

    for (cat, ty, pos) in &src.lincats {
        if !abs.cats.contains_key(cat) {
            return Err(GrammarError::UnknownCategory {
                module: name.clone(),
                name: cat.clone(),
            });
        }
        if c.lincats.contains_key(cat) {
            return Err(dup(cat));
        }
        let bad = |message: String| GrammarError::BadLincat {
            concrete: name.clone(),
            category: format!("{cat} ({})", located(&src.file, *pos)),
            message,
        };
        let l = lin_type(&c, ty).map_err(bad)?;
        c.lincats.insert(cat.clone(), l);
    }
    for cat in abs.cats.keys() {
        if !c.lincats.contains_key(cat) {
            return Err(GrammarError::MissingLincat {
                concrete: name.clone(),
                category: cat.clone(),
            });
        }
    }

    for l in &src.lins {
        let sig = abs.funs.get(&l.fun).ok_or_else(|| GrammarError::UnknownFunction {
            grammar: abs.name.clone(),
            function: l.fun.clone(),
        })?;
        if c.lins.get(&l.fun).is_some_and(|old| old.origin == name) {
            return Err(dup(&l.fun));
        }
        let context = format!("{}: lin {}", located(&src.file, l.pos), l.fun);
        if l.params.len() != sig.args.len() {
            return Err(GrammarError::BadLin {
                concrete: name.clone(),
                context,
                message: format!("{} takes {} arguments, {} bound", l.fun, sig.args.len(), l.params.len()),
            });
        }
        let args = l
            .params
            .iter()
            .zip(&sig.args)
            .map(|(p, cat)| (p.clone(), lincat_ltype(&c.lincats[cat])))
            .collect();
        let mut ck = Checker {
            conc: &c,
            args,
            vars: Vec::new(),
        };
        let expected = lincat_ltype(&c.lincats[&sig.result]);
        let body = ck.check(&l.body, &expected).map_err(|e| match e {
            CheckError::Mismatch { expected, found } => GrammarError::LinTypeMismatch {
                concrete: name.clone(),
                function: l.fun.clone(),
                expected,
                found,
            },
            CheckError::Other(message) => GrammarError::BadLin {
                concrete: name.clone(),
                context: context.clone(),
                message,
            },
        })?;
        c.lins.insert(
            l.fun.clone(),
            Lin {
                params: l.params.clone(),
                body,
                origin: name.clone(),
            },
        );
    }
    for f in abs.funs.keys() {
        if !c.lins.contains_key(f) {
            return Err(GrammarError::MissingLin {
                concrete: name.clone(),
                function: f.clone(),
            });
        }
    }
    Ok(c)
}

fn param_name(c: &ConcreteGrammar, t: &TypeSrc) -> Result<String, String> {
    match t {
        TypeSrc::Named(n) if c.params.contains_key(n) => Ok(n.clone()),
        TypeSrc::Named(n) => Err(format!("unknown parameter type `{n}`")),
        _ => Err("table keys and inherent fields must be parameter types".into()),
    }
}

fn lin_type(c: &ConcreteGrammar, ty: &TypeSrc) -> Result<LinType, String> {
    fn surface(c: &ConcreteGrammar, t: &TypeSrc, keys: &mut Vec<String>) -> Result<(), String> {
        match t {
            TypeSrc::Str => Ok(()),
            TypeSrc::Table(k, v) => {
                keys.push(param_name(c, k)?);
                surface(c, v, keys)
            }
            _ => Err("the field `s` must be Str or a table of Str".into()),
        }
    }
    match ty {
        TypeSrc::Str => Ok(LinType {
            plain: true,
            keys: Vec::new(),
            inherent: Vec::new(),
        }),
        TypeSrc::Record(fields) => {
            let mut keys = None;
            let mut inherent = Vec::new();
            for (n, t) in fields {
                if n == "s" {
                    if keys.is_some() {
                        return Err("field `s` is declared twice".into());
                    }
                    let mut ks = Vec::new();
                    surface(c, t, &mut ks)?;
                    keys = Some(ks);
                } else if matches!(t, TypeSrc::Str | TypeSrc::Table(..)) {
                    return Err(format!(
                        "field `{n}` holds strings; records with more than one string field are not supported"
                    ));
                } else {
                    if inherent.iter().any(|(m, _)| m == n) {
                        return Err(format!("field `{n}` is declared twice"));
                    }
                    inherent.push((n.clone(), param_name(c, t)?));
                }
            }
            let keys = keys.ok_or("a record lincat needs a string field `s`")?;
            Ok(LinType {
                plain: false,
                keys,
                inherent,
            })
        }
        TypeSrc::Named(_) | TypeSrc::Table(..) => Err("a lincat is Str or a record with a field `s`".into()),
    }
}

enum CheckError {
    Mismatch { expected: String, found: String },
    Other(String),
}

type CResult<T> = Result<T, CheckError>;

fn other<T>(m: impl Into<String>) -> CResult<T> {
    Err(CheckError::Other(m.into()))
}

struct Checker<'a> {
    conc: &'a ConcreteGrammar,
    args: Vec<(String, LType)>,
    /// Table pattern variables, innermost last.
    vars: Vec<(String, String)>,
}

impl Checker<'_> {
    fn ctor_type(&self, name: &str) -> Option<String> {
        self.conc.param_of(name).map(|p| p.name.clone())
    }

    fn ident(&self, name: &str) -> CResult<(LinExpr, LType)> {
        if let Some((_, p)) = self.vars.iter().rev().find(|(v, _)| v == name) {
            return Ok((LinExpr::Var(name.to_string()), LType::Param(p.clone())));
        }
        if let Some(i) = self.args.iter().position(|(a, _)| a == name) {
            return Ok((LinExpr::Arg(i), self.args[i].1.clone()));
        }
        if let Some(p) = self.ctor_type(name) {
            return Ok((LinExpr::Param(name.to_string()), LType::Param(p)));
        }
        other(format!("unknown identifier `{name}`"))
    }

    fn infer(&mut self, e: &LinExpr) -> CResult<(LinExpr, LType)> {
        match e {
            LinExpr::Str(_) | LinExpr::Empty => Ok((e.clone(), LType::Str)),
            LinExpr::Concat(..) => Ok((self.check(e, &LType::Str)?, LType::Str)),
            LinExpr::Var(n) => self.ident(n),
            LinExpr::Arg(_) | LinExpr::Param(_) => unreachable!("resolved only by checking"),
            LinExpr::Proj(r, f) => {
                let (r, t) = self.infer(r)?;
                match t.field(f) {
                    Some(ft) => Ok((LinExpr::Proj(Box::new(r), f.clone()), ft.clone())),
                    None => other(format!("`.{f}` applied to a value of type {t}")),
                }
            }
            LinExpr::Select(t, k) => {
                let (t, tt) = self.infer(t)?;
                let LType::Table(p, v) = tt else {
                    return other(format!("`!` applied to a value of type {tt}"));
                };
                let k = self.check(k, &LType::Param(p))?;
                Ok((LinExpr::Select(Box::new(t), Box::new(k)), *v))
            }
            LinExpr::Table(_, cases) => {
                let key = cases
                    .iter()
                    .find_map(|(p, _)| match p {
                        Pattern::Var(n) | Pattern::Ctor(n) => self.ctor_type(n),
                        Pattern::Wild => None,
                    })
                    .ok_or_else(|| {
                        CheckError::Other("cannot infer the key type of a table without constructor patterns".into())
                    })?;
                let (_, (_, v)) = self.with_pattern(&key, &cases[0].0, |me| me.infer(&cases[0].1))?;
                let ty = LType::Table(key, Box::new(v));
                Ok((self.check(e, &ty)?, ty))
            }
            LinExpr::Record(fields) => {
                let mut es = Vec::new();
                let mut ts = Vec::new();
                for (n, f) in fields {
                    if es.iter().any(|(m, _)| m == n) {
                        return other(format!("field `{n}` is given twice"));
                    }
                    let (f, t) = self.infer(f)?;
                    es.push((n.clone(), f));
                    ts.push((n.clone(), t));
                }
                Ok((LinExpr::Record(es), LType::Record(ts)))
            }
        }
    }

    /// Runs `k` with the pattern's variable (if any) bound at type `key`.
    fn with_pattern<T>(
        &mut self,
        key: &str,
        p: &Pattern,
        k: impl FnOnce(&mut Self) -> CResult<T>,
    ) -> CResult<(Pattern, T)> {
        let pat = match p {
            Pattern::Var(n) | Pattern::Ctor(n) => match self.ctor_type(n) {
                Some(t) if t == key => Pattern::Ctor(n.clone()),
                Some(t) => return other(format!("pattern `{n}` has type {t}, expected {key}")),
                None => Pattern::Var(n.clone()),
            },
            Pattern::Wild => Pattern::Wild,
        };
        let bound = matches!(pat, Pattern::Var(_));
        if let Pattern::Var(n) = &pat {
            self.vars.push((n.clone(), key.to_string()));
        }
        let r = k(self);
        if bound {
            self.vars.pop();
        }
        Ok((pat, r?))
    }

    fn check(&mut self, e: &LinExpr, ty: &LType) -> CResult<LinExpr> {
        match (e, ty) {
            (LinExpr::Concat(a, b), LType::Str) => Ok(LinExpr::Concat(
                Box::new(self.check(a, &LType::Str)?),
                Box::new(self.check(b, &LType::Str)?),
            )),
            (LinExpr::Table(_, cases), LType::Table(key, v)) => {
                let mut out = Vec::new();
                for (p, body) in cases {
                    let (p, b) = self.with_pattern(key, p, |me| me.check(body, v))?;
                    out.push((p, b));
                }
                let ctors = &self.conc.params[key].constructors;
                let covers_all = out.iter().any(|(p, _)| !matches!(p, Pattern::Ctor(_)));
                if !covers_all {
                    if let Some(missing) = ctors
                        .iter()
                        .find(|k| !out.iter().any(|(p, _)| p == &Pattern::Ctor((*k).clone())))
                    {
                        return other(format!("table over {key} has no case for `{missing}`"));
                    }
                }
                Ok(LinExpr::Table(Some(key.clone()), out))
            }
            (LinExpr::Record(fields), LType::Record(want)) => {
                let mut out = Vec::new();
                for (n, f) in fields {
                    let Some(ft) = ty.field(n) else {
                        return other(format!("field `{n}` is not part of {ty}"));
                    };
                    if out.iter().any(|(m, _)| m == n) {
                        return other(format!("field `{n}` is given twice"));
                    }
                    out.push((n.clone(), self.check(f, ft)?));
                }
                if let Some((n, _)) = want.iter().find(|(n, _)| !out.iter().any(|(m, _)| m == n)) {
                    return other(format!("record lacks field `{n}` required by {ty}"));
                }
                Ok(LinExpr::Record(out))
            }
            _ => {
                let (e, t) = self.infer(e)?;
                if t.same(ty) {
                    Ok(e)
                } else {
                    Err(CheckError::Mismatch {
                        expected: ty.to_string(),
                        found: t.to_string(),
                    })
                }
            }
        }
    }
}
