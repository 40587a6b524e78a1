use std::collections::HashSet;

use super::reduce::{normalize, normalize_with, NormalizeOptions, Reducer, Unfolding};
use super::term::{fresh_name, substitute, QName, Sort, Term, ARROW_BINDER};
use super::{KernelError, Signature};

/// Ordered variable bindings. Later bindings shadow earlier ones.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Context {
    entries: Vec<(String, Term)>,
}

impl Context {
    pub fn new() -> Self {
        Context::default()
    }

    pub fn with(mut self, name: impl Into<String>, ty: Term) -> Self {
        self.push(name, ty);
        self
    }

    pub fn push(&mut self, name: impl Into<String>, ty: Term) {
        self.entries.push((name.into(), ty));
    }

    pub fn pop(&mut self) {
        self.entries.pop();
    }

    pub fn lookup(&self, name: &str) -> Option<&Term> {
        self.entries.iter().rev().find(|(n, _)| n == name).map(|(_, t)| t)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> + '_ {
        self.entries.iter().map(|(n, _)| n.as_str())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Outcome of proof checking: rejection carries the reason.
#[derive(Clone, Debug, PartialEq)]
pub struct ProofVerdict {
    pub accepted: bool,
    pub diagnostic: Option<String>,
}

/// Infers the β-normal type of `t`.
pub fn infer_type<S: Signature + ?Sized>(sig: &S, ctx: &Context, t: &Term) -> Result<Term, KernelError> {
    elaborate(sig, ctx, t, None).map(|(_, ty)| ty)
}

/// Checks `t` against `ty` and returns the elaborated term: binder annotations
/// filled in and implicit arguments inserted.
pub fn check<S: Signature + ?Sized>(sig: &S, ctx: &Context, t: &Term, ty: &Term) -> Result<Term, KernelError> {
    elaborate(sig, ctx, t, Some(ty)).map(|(el, _)| el)
}

/// Elaborates `t`, in checking mode when `expected` is given. Returns the
/// elaborated term and its β-normal type.
pub fn elaborate<S: Signature + ?Sized>(
    sig: &S,
    ctx: &Context,
    t: &Term,
    expected: Option<&Term>,
) -> Result<(Term, Term), KernelError> {
    let mut ch = Checker::new(sig);
    let mut ctx = ctx.clone();
    let (el, ty) = match expected {
        Some(e) => {
            let e = ch.check_is_type(&mut ctx, e)?;
            (ch.check(&mut ctx, t, &e)?, e)
        }
        None => ch.infer(&mut ctx, t)?,
    };
    let el = ch.zonk(&el);
    ch.ensure_solved(&el)?;
    let ty = normalize(sig, &ch.zonk(&ty))?;
    Ok((el, ty))
}

/// Verifies `t` is a type or a kind (its own type is a sort) and returns its elaboration.
pub fn check_is_type<S: Signature + ?Sized>(sig: &S, ctx: &Context, t: &Term) -> Result<Term, KernelError> {
    let mut ch = Checker::new(sig);
    let el = ch.check_is_type(&mut ctx.clone(), t)?;
    let el = ch.zonk(&el);
    ch.ensure_solved(&el)?;
    Ok(el)
}

/// Definitional equality: β first, then βδ.
pub fn defeq<S: Signature + ?Sized>(sig: &S, a: &Term, b: &Term) -> Result<bool, KernelError> {
    Checker::new(sig).unify(a, b)
}

/// Checks `proof : judgement proposition` (judgements as types).
pub fn check_proof<S: Signature + ?Sized>(
    sig: &S,
    judgement: &QName,
    proof: &Term,
    proposition: &Term,
) -> ProofVerdict {
    let expected = Term::app(Term::Const(judgement.clone()), proposition.clone());
    match check(sig, &Context::new(), proof, &expected) {
        Ok(_) => ProofVerdict {
            accepted: true,
            diagnostic: None,
        },
        Err(e) => ProofVerdict {
            accepted: false,
            diagnostic: Some(e.to_string()),
        },
    }
}

struct Meta {
    ty: Term,
    solution: Option<Term>,
    constant: QName,
    index: usize,
}

/// Metavariables for implicit arguments are variables named `?n`; the lexer
/// never produces such names.
fn meta_index(t: &Term) -> Option<usize> {
    match t {
        Term::Var(x) => x.strip_prefix('?')?.parse().ok(),
        _ => None,
    }
}

struct Checker<'a, S: Signature + ?Sized> {
    sig: &'a S,
    metas: Vec<Meta>,
}

impl<'a, S: Signature + ?Sized> Checker<'a, S> {
    fn new(sig: &'a S) -> Self {
        Checker { sig, metas: Vec::new() }
    }

    fn new_meta(&mut self, ty: Term, constant: &QName, index: usize) -> Term {
        self.metas.push(Meta {
            ty,
            solution: None,
            constant: constant.clone(),
            index,
        });
        Term::Var(format!("?{}", self.metas.len() - 1))
    }

    fn zonk(&self, t: &Term) -> Term {
        if self.metas.is_empty() {
            return t.clone();
        }
        match t {
            Term::Var(_) => match meta_index(t).and_then(|i| self.metas[i].solution.as_ref()) {
                Some(s) => self.zonk(s),
                None => t.clone(),
            },
            Term::Const(_) | Term::Sort(_) => t.clone(),
            Term::App(f, a) => Term::app(self.zonk(f), self.zonk(a)),
            Term::Lam(x, ty, b) => Term::lam(x.clone(), ty.as_ref().map(|ty| self.zonk(ty)), self.zonk(b)),
            Term::Pi(x, d, c) => Term::pi(x.clone(), self.zonk(d), self.zonk(c)),
        }
    }

    fn ensure_solved(&self, t: &Term) -> Result<(), KernelError> {
        let mut unsolved: Vec<usize> = t
            .free_vars()
            .iter()
            .filter_map(|x| meta_index(&Term::Var(x.clone())))
            .collect();
        unsolved.sort_unstable();
        match unsolved.first() {
            Some(&i) => Err(KernelError::UnresolvedImplicit {
                constant: self.metas[i].constant.clone(),
                index: self.metas[i].index,
            }),
            None => Ok(()),
        }
    }

    fn decl_type(&mut self, q: &QName) -> Result<Term, KernelError> {
        let decl = self
            .sig
            .declaration(q)
            .ok_or_else(|| KernelError::UnknownConstant(q.clone()))?;
        match (&decl.ty, &decl.definiens) {
            (Some(ty), _) => Ok(ty.clone()),
            (None, Some(def)) => {
                let def = def.clone();
                Ok(self.infer(&mut Context::new(), &def)?.1)
            }
            (None, None) => Err(KernelError::UnknownConstant(q.clone())),
        }
    }

    /// Weak-head normalizes with δ and returns the Pi components, if any.
    fn expose_pi(&self, ty: &Term) -> Result<Option<(String, Term, Term)>, KernelError> {
        let ty = self.zonk(ty);
        if let Term::Pi(x, d, c) = ty {
            return Ok(Some((x, *d, *c)));
        }
        match Reducer::new(self.sig, Unfolding::Full).whnf(ty)? {
            Term::Pi(x, d, c) => Ok(Some((x, *d, *c))),
            _ => Ok(None),
        }
    }

    fn expose_sort(&self, ty: &Term) -> Result<Option<Sort>, KernelError> {
        match Reducer::new(self.sig, Unfolding::Full).whnf(self.zonk(ty))? {
            Term::Sort(s) => Ok(Some(s)),
            _ => Ok(None),
        }
    }

    /// Renames binder `x` of `body` when it would shadow a context variable.
    fn open_binder(&self, ctx: &Context, x: &str, body: &Term) -> (String, Term) {
        if x == ARROW_BINDER || ctx.lookup(x).is_none() {
            return (x.to_string(), body.clone());
        }
        let mut avoid: HashSet<String> = ctx.names().map(str::to_string).collect();
        avoid.extend(body.free_vars());
        let y = fresh_name(x, &avoid);
        let body = substitute(body, x, &Term::Var(y.clone()));
        (y, body)
    }

    fn check_is_type(&mut self, ctx: &mut Context, t: &Term) -> Result<Term, KernelError> {
        let (el, ty) = self.infer(ctx, t)?;
        match self.expose_sort(&ty)? {
            Some(_) => Ok(el),
            None => Err(KernelError::NotAType(self.zonk(t))),
        }
    }

    fn infer(&mut self, ctx: &mut Context, t: &Term) -> Result<(Term, Term), KernelError> {
        match t {
            Term::Sort(Sort::Type) => Ok((t.clone(), Term::Sort(Sort::Kind))),
            Term::Sort(Sort::Kind) => Err(KernelError::KindHasNoType),
            Term::Var(x) => {
                if let Some(i) = meta_index(t) {
                    if let Some(m) = self.metas.get(i) {
                        return Ok((t.clone(), m.ty.clone()));
                    }
                }
                match ctx.lookup(x) {
                    Some(ty) => Ok((t.clone(), ty.clone())),
                    None => Err(KernelError::UnboundVariable(x.clone())),
                }
            }
            Term::Const(_) | Term::App(..) => {
                let (head, args) = t.spine();
                let (mut el, mut ty) = match head {
                    Term::Const(q) => {
                        let implicit = self
                            .sig
                            .declaration(q)
                            .ok_or_else(|| KernelError::UnknownConstant(q.clone()))?
                            .implicit_args();
                        let mut ty = self.decl_type(q)?;
                        let mut el = head.clone();
                        for i in 0..implicit {
                            let Some((x, dom, cod)) = self.expose_pi(&ty)? else {
                                return Err(KernelError::NotAFunction { term: el, ty });
                            };
                            let m = self.new_meta(dom, q, i + 1);
                            el = Term::app(el, m.clone());
                            ty = substitute(&cod, &x, &m);
                        }
                        (el, ty)
                    }
                    _ => self.infer(ctx, head)?,
                };
                for a in args {
                    let Some((x, dom, cod)) = self.expose_pi(&ty)? else {
                        return Err(KernelError::NotAFunction {
                            term: self.zonk(&el),
                            ty: normalize(self.sig, &self.zonk(&ty))?,
                        });
                    };
                    let a_el = self.check(ctx, a, &dom)?;
                    ty = substitute(&cod, &x, &a_el);
                    el = Term::app(el, a_el);
                }
                Ok((el, ty))
            }
            Term::Lam(x, None, _) => Err(KernelError::UntypedBinder(x.clone())),
            Term::Lam(x, Some(ann), body) => {
                let ann = self.check_is_type(ctx, ann)?;
                let (x, body) = self.open_binder(ctx, x, body);
                ctx.push(x.clone(), ann.clone());
                let r = self.infer(ctx, &body);
                ctx.pop();
                let (b_el, b_ty) = r?;
                Ok((Term::lam(x.clone(), Some(ann.clone()), b_el), Term::pi(x, ann, b_ty)))
            }
            Term::Pi(x, dom, cod) => {
                let dom = self.check_is_type(ctx, dom)?;
                let (x, cod) = self.open_binder(ctx, x, cod);
                ctx.push(x.clone(), dom.clone());
                let r = self.infer(ctx, &cod);
                ctx.pop();
                let (c_el, c_ty) = r?;
                match self.expose_sort(&c_ty)? {
                    Some(s) => Ok((Term::pi(x, dom, c_el), Term::Sort(s))),
                    None => Err(KernelError::NotAType(c_el)),
                }
            }
        }
    }

    fn check(&mut self, ctx: &mut Context, t: &Term, expected: &Term) -> Result<Term, KernelError> {
        if let Term::Lam(x, ann, body) = t {
            if let Some((y, dom, cod)) = self.expose_pi(expected)? {
                let dom = match ann {
                    Some(ann) => {
                        let ann = self.check_is_type(ctx, ann)?;
                        if !self.unify(&ann, &dom)? {
                            return Err(KernelError::TypeMismatch {
                                expected: normalize(self.sig, &self.zonk(&dom))?,
                                found: ann,
                                term: t.clone(),
                            });
                        }
                        ann
                    }
                    None => dom,
                };
                let (x, body) = self.open_binder(ctx, x, body);
                let cod = substitute(&cod, &y, &Term::Var(x.clone()));
                ctx.push(x.clone(), dom.clone());
                let r = self.check(ctx, &body, &cod);
                ctx.pop();
                return Ok(Term::lam(x, Some(dom), r?));
            }
        }
        let (el, ty) = self.infer(ctx, t)?;
        if self.unify(&ty, expected)? {
            Ok(el)
        } else {
            Err(KernelError::TypeMismatch {
                expected: normalize(self.sig, &self.zonk(expected))?,
                found: normalize(self.sig, &self.zonk(&ty))?,
                term: self.zonk(&el),
            })
        }
    }

    fn snapshot(&self) -> Vec<Option<Term>> {
        self.metas.iter().map(|m| m.solution.clone()).collect()
    }

    fn restore(&mut self, snap: Vec<Option<Term>>) {
        for (m, s) in self.metas.iter_mut().zip(snap) {
            m.solution = s;
        }
    }

    /// Unifies on β-normal forms, then on βδ-normal forms. Meta solutions of a
    /// failed attempt are rolled back.
    fn unify(&mut self, a: &Term, b: &Term) -> Result<bool, KernelError> {
        let snap = self.snapshot();
        let an = normalize(self.sig, &self.zonk(a))?;
        let bn = normalize(self.sig, &self.zonk(b))?;
        if self.unify_nf(&an, &bn, &mut Vec::new()) {
            return Ok(true);
        }
        self.restore(snap.clone());
        let full = NormalizeOptions {
            unfolding: Unfolding::Full,
            ..NormalizeOptions::default()
        };
        let an = normalize_with(self.sig, &self.zonk(a), &full)?;
        let bn = normalize_with(self.sig, &self.zonk(b), &full)?;
        if self.unify_nf(&an, &bn, &mut Vec::new()) {
            return Ok(true);
        }
        self.restore(snap);
        Ok(false)
    }

    fn resolve(&self, t: &Term) -> Term {
        match meta_index(t).and_then(|i| self.metas.get(i)?.solution.as_ref()) {
            Some(s) => self.zonk(s),
            None => t.clone(),
        }
    }

    fn unsolved_meta(&self, t: &Term) -> Option<usize> {
        meta_index(t).filter(|&i| i < self.metas.len() && self.metas[i].solution.is_none())
    }

    fn assign(&mut self, m: usize, t: &Term, env: &[(String, String)]) -> bool {
        let fv = t.free_vars();
        if fv.contains(&format!("?{m}")) {
            return false;
        }
        if env.iter().any(|(x, y)| fv.contains(x) || fv.contains(y)) {
            return false;
        }
        self.metas[m].solution = Some(t.clone());
        true
    }

    fn unify_nf(&mut self, a: &Term, b: &Term, env: &mut Vec<(String, String)>) -> bool {
        let a = self.resolve(a);
        let b = self.resolve(b);
        match (self.unsolved_meta(&a), self.unsolved_meta(&b)) {
            (Some(i), Some(j)) if i == j => return true,
            (Some(i), _) => return self.assign(i, &b, env),
            (None, Some(j)) => return self.assign(j, &a, env),
            (None, None) => {}
        }
        match (&a, &b) {
            (Term::Var(x), Term::Var(y)) => {
                for (p, q) in env.iter().rev() {
                    if p == x || q == y {
                        return p == x && q == y;
                    }
                }
                x == y
            }
            (Term::Const(p), Term::Const(q)) => p == q,
            (Term::Sort(s), Term::Sort(r)) => s == r,
            (Term::App(f, x), Term::App(g, y)) => self.unify_nf(f, g, env) && self.unify_nf(x, y, env),
            (Term::Lam(x, tx, bx), Term::Lam(y, ty, by)) => {
                if let (Some(tx), Some(ty)) = (tx, ty) {
                    if !self.unify_nf(tx, ty, env) {
                        return false;
                    }
                }
                env.push((x.clone(), y.clone()));
                let r = self.unify_nf(bx, by, env);
                env.pop();
                r
            }
            (Term::Pi(x, dx, cx), Term::Pi(y, dy, cy)) => {
                if !self.unify_nf(dx, dy, env) {
                    return false;
                }
                env.push((x.clone(), y.clone()));
                let r = self.unify_nf(cx, cy, env);
                env.pop();
                r
            }
            _ => false,
        }
    }
}
