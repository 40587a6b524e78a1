use std::collections::HashSet;
use std::fmt;

/// A constant name qualified by the theory that declares it, written `Theory?name`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QName {
    pub theory: String,
    pub name: String,
}

impl QName {
    pub fn new(theory: impl Into<String>, name: impl Into<String>) -> Self {
        QName {
            theory: theory.into(),
            name: name.into(),
        }
    }

    /// Splits `T?c` into its parts; `None` when there is no `?`.
    pub fn parse_qualified(s: &str) -> Option<QName> {
        let (t, n) = s.split_once('?')?;
        if t.is_empty() || n.is_empty() {
            return None;
        }
        Some(QName::new(t, n))
    }
}

impl fmt::Display for QName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}?{}", self.theory, self.name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    /// The kind `type`.
    Type,
    /// The classifier of `type` and of type families. Has no surface syntax.
    Kind,
}

/// Terms of the logical framework.
///
/// The non-dependent arrow `A -> B` is a `Pi` whose binder does not occur in `B`.
/// Binder annotations on `Lam` are optional; the type checker fills them in when
/// it elaborates a term in checking mode.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Const(QName),
    Var(String),
    App(Box<Term>, Box<Term>),
    Lam(String, Option<Box<Term>>, Box<Term>),
    Pi(String, Box<Term>, Box<Term>),
    Sort(Sort),
}

/// Binder name used for non-dependent arrows.
pub const ARROW_BINDER: &str = "_";

impl Term {
    pub fn constant(q: QName) -> Term {
        Term::Const(q)
    }

    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Box::new(f), Box::new(a))
    }

    /// Left-nested application of `head` to `args`.
    pub fn apps(head: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(head, Term::app)
    }

    pub fn lam(x: impl Into<String>, ty: Option<Term>, body: Term) -> Term {
        Term::Lam(x.into(), ty.map(Box::new), Box::new(body))
    }

    pub fn pi(x: impl Into<String>, dom: Term, cod: Term) -> Term {
        Term::Pi(x.into(), Box::new(dom), Box::new(cod))
    }

    pub fn arrow(dom: Term, cod: Term) -> Term {
        Term::pi(ARROW_BINDER, dom, cod)
    }

    pub fn typ() -> Term {
        Term::Sort(Sort::Type)
    }

    /// Decomposes an application spine into its head and arguments.
    pub fn spine(&self) -> (&Term, Vec<&Term>) {
        let mut args = Vec::new();
        let mut cur = self;
        while let Term::App(f, a) = cur {
            args.push(a.as_ref());
            cur = f;
        }
        args.reverse();
        (cur, args)
    }

    pub fn head_const(&self) -> Option<&QName> {
        match self.spine().0 {
            Term::Const(q) => Some(q),
            _ => None,
        }
    }

    pub fn free_vars(&self) -> HashSet<String> {
        let mut out = HashSet::new();
        collect_free(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn occurs_free(&self, x: &str) -> bool {
        match self {
            Term::Var(y) => y == x,
            Term::Const(_) | Term::Sort(_) => false,
            Term::App(f, a) => f.occurs_free(x) || a.occurs_free(x),
            Term::Lam(y, ty, body) => ty.as_ref().is_some_and(|t| t.occurs_free(x)) || (y != x && body.occurs_free(x)),
            Term::Pi(y, dom, cod) => dom.occurs_free(x) || (y != x && cod.occurs_free(x)),
        }
    }

    /// All constants occurring in the term, in first-occurrence order.
    pub fn constants(&self) -> Vec<QName> {
        fn go(t: &Term, out: &mut Vec<QName>) {
            match t {
                Term::Const(q) => {
                    if !out.contains(q) {
                        out.push(q.clone());
                    }
                }
                Term::Var(_) | Term::Sort(_) => {}
                Term::App(f, a) => {
                    go(f, out);
                    go(a, out);
                }
                Term::Lam(_, ty, body) => {
                    if let Some(ty) = ty {
                        go(ty, out);
                    }
                    go(body, out);
                }
                Term::Pi(_, d, c) => {
                    go(d, out);
                    go(c, out);
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut out);
        out
    }

    /// Number of nodes; used for budgets and test generators.
    pub fn size(&self) -> usize {
        match self {
            Term::Const(_) | Term::Var(_) | Term::Sort(_) => 1,
            Term::App(f, a) => 1 + f.size() + a.size(),
            Term::Lam(_, ty, b) => 1 + ty.as_ref().map_or(0, |t| t.size()) + b.size(),
            Term::Pi(_, d, c) => 1 + d.size() + c.size(),
        }
    }
}

fn collect_free(t: &Term, bound: &mut Vec<String>, out: &mut HashSet<String>) {
    match t {
        Term::Var(x) => {
            if !bound.iter().any(|b| b == x) {
                out.insert(x.clone());
            }
        }
        Term::Const(_) | Term::Sort(_) => {}
        Term::App(f, a) => {
            collect_free(f, bound, out);
            collect_free(a, bound, out);
        }
        Term::Lam(x, ty, body) => {
            if let Some(ty) = ty {
                collect_free(ty, bound, out);
            }
            bound.push(x.clone());
            collect_free(body, bound, out);
            bound.pop();
        }
        Term::Pi(x, dom, cod) => {
            collect_free(dom, bound, out);
            bound.push(x.clone());
            collect_free(cod, bound, out);
            bound.pop();
        }
    }
}

/// α-equivalence. A missing `Lam` annotation matches any annotation, so an
/// unelaborated term compares equal to its elaboration.
pub fn alpha_eq(t: &Term, u: &Term) -> bool {
    fn go<'a>(t: &'a Term, u: &'a Term, env: &mut Vec<(&'a str, &'a str)>) -> bool {
        match (t, u) {
            (Term::Var(x), Term::Var(y)) => {
                for (a, b) in env.iter().rev() {
                    if *a == x || *b == y {
                        return *a == x && *b == y;
                    }
                }
                x == y
            }
            (Term::Const(a), Term::Const(b)) => a == b,
            (Term::Sort(a), Term::Sort(b)) => a == b,
            (Term::App(f, a), Term::App(g, b)) => go(f, g, env) && go(a, b, env),
            (Term::Lam(x, tx, bx), Term::Lam(y, ty, by)) => {
                if let (Some(tx), Some(ty)) = (tx, ty) {
                    if !go(tx, ty, env) {
                        return false;
                    }
                }
                env.push((x, y));
                let r = go(bx, by, env);
                env.pop();
                r
            }
            (Term::Pi(x, dx, cx), Term::Pi(y, dy, cy)) => {
                if !go(dx, dy, env) {
                    return false;
                }
                env.push((x, y));
                let r = go(cx, cy, env);
                env.pop();
                r
            }
            _ => false,
        }
    }
    go(t, u, &mut Vec::new())
}

/// A nameless rendering of a term: α-equivalent terms (ignoring binder
/// annotations) map to the same key. Used to key literal sets.
pub fn alpha_key(t: &Term) -> String {
    fn go(t: &Term, bound: &mut Vec<String>, out: &mut String) {
        match t {
            Term::Var(x) => match bound.iter().rposition(|b| b == x) {
                Some(i) => out.push_str(&format!("#{}", bound.len() - 1 - i)),
                None => {
                    out.push('$');
                    out.push_str(x);
                }
            },
            Term::Const(q) => out.push_str(&q.to_string()),
            Term::Sort(Sort::Type) => out.push_str("type"),
            Term::Sort(Sort::Kind) => out.push_str("kind"),
            Term::App(f, a) => {
                out.push('(');
                go(f, bound, out);
                out.push(' ');
                go(a, bound, out);
                out.push(')');
            }
            Term::Lam(x, _, body) => {
                out.push_str("(\\ ");
                bound.push(x.clone());
                go(body, bound, out);
                bound.pop();
                out.push(')');
            }
            Term::Pi(x, d, c) => {
                out.push_str("(Pi ");
                go(d, bound, out);
                out.push(' ');
                bound.push(x.clone());
                go(c, bound, out);
                bound.pop();
                out.push(')');
            }
        }
    }
    let mut out = String::new();
    go(t, &mut Vec::new(), &mut out);
    out
}

/// Picks a variant of `base` (by appending primes) that is not in `avoid`.
pub fn fresh_name(base: &str, avoid: &HashSet<String>) -> String {
    let mut root = base;
    if base == ARROW_BINDER {
        root = "x";
        if !avoid.contains(root) {
            return root.to_string();
        }
    }
    let mut candidate = format!("{root}'");
    while avoid.contains(&candidate) {
        candidate.push('\'');
    }
    candidate
}

/// Capture-avoiding substitution of `s` for the free occurrences of `x` in `t`.
pub fn substitute(t: &Term, x: &str, s: &Term) -> Term {
    let fv = s.free_vars();
    subst_with(t, x, s, &fv)
}

fn subst_with(t: &Term, x: &str, s: &Term, fv: &HashSet<String>) -> Term {
    match t {
        Term::Var(y) => {
            if y == x {
                s.clone()
            } else {
                t.clone()
            }
        }
        Term::Const(_) | Term::Sort(_) => t.clone(),
        Term::App(f, a) => Term::app(subst_with(f, x, s, fv), subst_with(a, x, s, fv)),
        Term::Lam(y, ty, body) => {
            let ty = ty.as_ref().map(|ty| subst_with(ty, x, s, fv));
            let (y, body) = subst_binder(y, body, x, s, fv);
            Term::lam(y, ty, body)
        }
        Term::Pi(y, dom, cod) => {
            let dom = subst_with(dom, x, s, fv);
            let (y, cod) = subst_binder(y, cod, x, s, fv);
            Term::pi(y, dom, cod)
        }
    }
}

fn subst_binder(y: &str, body: &Term, x: &str, s: &Term, fv: &HashSet<String>) -> (String, Term) {
    if y == x || !body.occurs_free(x) {
        return (y.to_string(), body.clone());
    }
    if fv.contains(y) {
        let mut avoid = fv.clone();
        avoid.extend(body.free_vars());
        avoid.insert(x.to_string());
        let y2 = fresh_name(y, &avoid);
        let renamed = substitute(body, y, &Term::Var(y2.clone()));
        (y2, subst_with(&renamed, x, s, fv))
    } else {
        (y.to_string(), subst_with(body, x, s, fv))
    }
}

/// Plain rendering without notations; used in diagnostics. Notation-aware
/// printing lives in the syntax module.
impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn atom(t: &Term) -> bool {
            matches!(t, Term::Const(_) | Term::Var(_) | Term::Sort(_))
        }
        match self {
            Term::Const(q) => write!(f, "{}", q.name),
            Term::Var(x) => write!(f, "{x}"),
            Term::Sort(Sort::Type) => write!(f, "type"),
            Term::Sort(Sort::Kind) => write!(f, "kind"),
            Term::App(g, a) => {
                match g.as_ref() {
                    Term::Lam(..) | Term::Pi(..) => write!(f, "({g})")?,
                    _ => write!(f, "{g}")?,
                }
                if atom(a) {
                    write!(f, " {a}")
                } else {
                    write!(f, " ({a})")
                }
            }
            Term::Lam(x, Some(ty), body) => write!(f, "[{x}:{ty}] {body}"),
            Term::Lam(x, None, body) => write!(f, "[{x}] {body}"),
            Term::Pi(x, d, c) if !c.occurs_free(x) => {
                if atom(d) || matches!(d.as_ref(), Term::App(..)) {
                    write!(f, "{d} -> {c}")
                } else {
                    write!(f, "({d}) -> {c}")
                }
            }
            Term::Pi(x, d, c) => write!(f, "{{{x}:{d}}} {c}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(n: &str) -> Term {
        Term::Const(QName::new("T", n))
    }
    fn v(n: &str) -> Term {
        Term::var(n)
    }

    #[test]
    fn alpha_renaming() {
        let a = Term::lam("x", None, Term::apps(c("love'"), [v("x"), v("x")]));
        let b = Term::lam("y", None, Term::apps(c("love'"), [v("y"), v("y")]));
        assert!(alpha_eq(&a, &b));
        assert_eq!(alpha_key(&a), alpha_key(&b));
    }

    #[test]
    fn distinct_constants() {
        let a = Term::apps(c("love'"), [c("joan'"), c("joan'")]);
        let b = Term::apps(c("love'"), [c("joan'"), c("mary'")]);
        assert!(!alpha_eq(&a, &b));
    }

    #[test]
    fn binder_index_mismatch() {
        let a = Term::lam("x", None, Term::lam("y", None, v("x")));
        let b = Term::lam("x", None, Term::lam("y", None, v("y")));
        assert!(!alpha_eq(&a, &b));
        assert_ne!(alpha_key(&a), alpha_key(&b));
    }

    #[test]
    fn shadowing_is_respected() {
        // [x][x] x  vs  [x][y] y  are equal; vs [x][y] x are not
        let a = Term::lam("x", None, Term::lam("x", None, v("x")));
        let b = Term::lam("x", None, Term::lam("y", None, v("y")));
        let c_ = Term::lam("x", None, Term::lam("y", None, v("x")));
        assert!(alpha_eq(&a, &b));
        assert!(!alpha_eq(&a, &c_));
    }

    #[test]
    fn substitute_simple() {
        let t = Term::app(v("p"), v("x"));
        let r = substitute(&t, "x", &c("john'"));
        assert_eq!(r, Term::app(v("p"), c("john'")));
    }

    #[test]
    fn substitute_avoids_capture() {
        // ([x] f x y)[y := x]  ==>  [x'] f x' x
        let t = Term::lam("x", None, Term::apps(c("f"), [v("x"), v("y")]));
        let r = substitute(&t, "y", &v("x"));
        let expected = Term::lam("x'", None, Term::apps(c("f"), [v("x'"), v("x")]));
        assert_eq!(r, expected);
        assert!(alpha_eq(&r, &expected));
    }

    #[test]
    fn substitute_constant_untouched() {
        assert_eq!(substitute(&c("c"), "x", &c("s")), c("c"));
    }

    #[test]
    fn arrow_binder_not_free() {
        let t = Term::arrow(c("o"), c("o"));
        assert!(!t.occurs_free(ARROW_BINDER));
        assert_eq!(t.to_string(), "o -> o");
    }
}
