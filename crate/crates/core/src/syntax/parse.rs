use std::collections::HashMap;
use std::rc::Rc;

use thiserror::Error;

use super::lexer::{lex, LexError, Pos, TokKind, Token};
use super::{
    notation_prec, position_reqs, Req, Resolution, Shape, Vocabulary, APP, APP_FUNCTION, ARROW, ARROW_LEFT, ARROW_RIGHT,
};
use crate::kernel::{alpha_eq, Notation, NotationToken, QName, Term};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TermError {
    #[error("{0}")]
    Lex(#[from] LexError),
    #[error("{pos}: syntax error: {message}")]
    Syntax { pos: Pos, message: String },
    #[error("{pos}: ambiguous term with {} distinct readings", readings.len())]
    Ambiguous { pos: Pos, readings: Vec<Term> },
    #[error("{pos}: unknown name `{name}`")]
    UnknownName { pos: Pos, name: String },
    #[error("{pos}: `{name}` is declared in several theories ({}); qualify it as Theory?{name}", candidates.iter().map(|q| q.theory.as_str()).collect::<Vec<_>>().join(", "))]
    AmbiguousName {
        pos: Pos,
        name: String,
        candidates: Vec<QName>,
    },
}

impl TermError {
    pub fn pos(&self) -> Pos {
        match self {
            TermError::Lex(e) => e.pos,
            TermError::Syntax { pos, .. }
            | TermError::Ambiguous { pos, .. }
            | TermError::UnknownName { pos, .. }
            | TermError::AmbiguousName { pos, .. } => *pos,
        }
    }
}

pub fn parse_term(vocab: &Vocabulary, text: &str) -> Result<Term, TermError> {
    parse_term_with_vars(vocab, text, &[])
}

/// Parses with `vars` in scope as free variables.
pub fn parse_term_with_vars(vocab: &Vocabulary, text: &str, vars: &[String]) -> Result<Term, TermError> {
    let toks = lex(text, Pos { line: 1, col: 1 })?;
    let end = toks.last().map_or(Pos { line: 1, col: 1 }, |t| Pos {
        line: t.line,
        col: t.col + t.text.chars().count(),
    });
    parse_tokens(vocab, &toks, vars, end)
}

/// Parses a token sequence as one term. `end` locates errors about missing input.
pub fn parse_tokens(vocab: &Vocabulary, toks: &[Token], vars: &[String], end: Pos) -> Result<Term, TermError> {
    if toks.is_empty() {
        return Err(TermError::Syntax {
            pos: end,
            message: "expected a term".into(),
        });
    }
    if let Some(t) = toks.iter().find(|t| matches!(t.kind, TokKind::Placeholder(_))) {
        return Err(TermError::Syntax {
            pos: t.pos(),
            message: format!("placeholder `{}` outside a notation", t.text),
        });
    }
    let matching = match_brackets(toks, end)?;
    let mut p = Parser::new(vocab, toks, matching);
    let parses = p.span(0, toks.len());
    if parses.is_empty() {
        return Err(p.syntax_error(end));
    }
    let mut results: Vec<Term> = Vec::new();
    let mut first_err = None;
    for parsed in parses.iter() {
        let mut bound: Vec<String> = vars.to_vec();
        match resolve(vocab, &parsed.raw, &mut bound) {
            Ok(t) => {
                if !results.iter().any(|r| alpha_eq(r, &t)) {
                    results.push(t);
                }
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    match results.len() {
        1 => Ok(results.pop().expect("one result")),
        0 => Err(first_err.expect("some parse failed")),
        _ => Err(TermError::Ambiguous {
            pos: toks[0].pos(),
            readings: results,
        }),
    }
}

fn match_brackets(toks: &[Token], end: Pos) -> Result<Vec<Option<usize>>, TermError> {
    let mut out = vec![None; toks.len()];
    let mut stack: Vec<usize> = Vec::new();
    for (i, t) in toks.iter().enumerate() {
        if t.kind != TokKind::Symbol {
            continue;
        }
        match t.text.as_str() {
            "(" | "[" | "{" => stack.push(i),
            ")" | "]" | "}" => {
                let want = match t.text.as_str() {
                    ")" => "(",
                    "]" => "[",
                    _ => "{",
                };
                match stack.pop() {
                    Some(o) if toks[o].text == want => {
                        out[o] = Some(i);
                        out[i] = Some(o);
                    }
                    _ => {
                        return Err(TermError::Syntax {
                            pos: t.pos(),
                            message: format!("unbalanced `{}`", t.text),
                        })
                    }
                }
            }
            _ => {}
        }
    }
    if let Some(o) = stack.pop() {
        return Err(TermError::Syntax {
            pos: toks[o].pos(),
            message: format!("unclosed `{}` (input ends at {end})", toks[o].text),
        });
    }
    Ok(out)
}

type Binders = Vec<(String, Option<Rc<Raw>>, Pos)>;

#[derive(Debug)]
enum Raw {
    Name(String, Pos),
    Type,
    Notation(QName, Vec<Rc<Raw>>, Pos),
    App(Rc<Raw>, Rc<Raw>),
    Arrow(Rc<Raw>, Rc<Raw>),
    Lam(Binders, Rc<Raw>),
    Pi(Binders, Rc<Raw>),
}

#[derive(Clone, Debug)]
struct Parsed {
    raw: Rc<Raw>,
    shape: Shape,
}

struct NotationInfo {
    name: QName,
    notation: Notation,
    reqs: Vec<Req>,
    prec: u32,
}

struct Parser<'a> {
    toks: &'a [Token],
    matching: Vec<Option<usize>>,
    notations: Rc<Vec<NotationInfo>>,
    memo: HashMap<(usize, usize), Rc<Vec<Parsed>>>,
}

impl<'a> Parser<'a> {
    fn new(vocab: &Vocabulary, toks: &'a [Token], matching: Vec<Option<usize>>) -> Self {
        let present: std::collections::HashSet<&str> = toks.iter().map(|t| t.text.as_str()).collect();
        let notations = vocab
            .notations()
            .filter(|(_, n)| n.literals().all(|l| present.contains(l)))
            .map(|(q, n)| NotationInfo {
                name: q.clone(),
                notation: n.clone(),
                reqs: position_reqs(n),
                prec: notation_prec(n),
            })
            .collect();
        Parser {
            toks,
            matching,
            notations: Rc::new(notations),
            memo: HashMap::new(),
        }
    }

    fn is_sym(&self, i: usize, s: &str) -> bool {
        self.toks[i].kind == TokKind::Symbol && self.toks[i].text == s
    }

    /// A span is parseable only if every bracket in it is matched inside it.
    fn balanced(&self, i: usize, j: usize) -> bool {
        (i..j).all(|k| self.matching[k].is_none_or(|m| (i..j).contains(&m)))
    }

    fn syntax_error(&mut self, end: Pos) -> TermError {
        let n = self.toks.len();
        let furthest = (1..n).rev().find(|&k| !self.span(0, k).is_empty());
        match furthest {
            Some(k) => TermError::Syntax {
                pos: self.toks[k].pos(),
                message: format!("unexpected `{}`", self.toks[k].text),
            },
            None if n == 1 => TermError::Syntax {
                pos: self.toks[0].pos(),
                message: format!("`{}` cannot start a term", self.toks[0].text),
            },
            None => TermError::Syntax {
                pos: self.toks[0].pos(),
                message: format!(
                    "cannot parse a term starting at `{}` (input ends at {end})",
                    self.toks[0].text
                ),
            },
        }
    }

    fn span(&mut self, i: usize, j: usize) -> Rc<Vec<Parsed>> {
        if let Some(r) = self.memo.get(&(i, j)) {
            return r.clone();
        }
        // Guard against re-entrance on the same span while it is being computed.
        self.memo.insert((i, j), Rc::new(Vec::new()));
        let out = if i < j && self.balanced(i, j) {
            self.compute(i, j)
        } else {
            Vec::new()
        };
        let out = Rc::new(out);
        self.memo.insert((i, j), out.clone());
        out
    }

    fn filtered(&mut self, i: usize, j: usize, req: Req) -> Vec<Parsed> {
        self.span(i, j)
            .iter()
            .filter(|p| req.accepts(p.shape))
            .cloned()
            .collect()
    }

    fn compute(&mut self, i: usize, j: usize) -> Vec<Parsed> {
        let mut out = Vec::new();
        let tok = &self.toks[i];
        if j == i + 1 && tok.kind == TokKind::Ident {
            let raw = if tok.text == "type" {
                Raw::Type
            } else {
                Raw::Name(tok.text.clone(), tok.pos())
            };
            out.push(Parsed {
                raw: Rc::new(raw),
                shape: Shape::ATOM,
            });
        }
        if self.is_sym(i, "(") && self.matching[i] == Some(j - 1) && j - i > 2 {
            for p in self.span(i + 1, j - 1).iter() {
                out.push(Parsed {
                    raw: p.raw.clone(),
                    shape: Shape::ATOM,
                });
            }
        }
        if self.is_sym(i, "[") || self.is_sym(i, "{") {
            if let Some(m) = self.matching[i].filter(|&m| m + 1 < j) {
                let lam = self.is_sym(i, "[");
                let bodies = self.span(m + 1, j);
                if !bodies.is_empty() {
                    for binders in self.binder_lists(i + 1, m) {
                        for b in bodies.iter() {
                            let raw = if lam {
                                Raw::Lam(binders.clone(), b.raw.clone())
                            } else {
                                Raw::Pi(binders.clone(), b.raw.clone())
                            };
                            out.push(Parsed {
                                raw: Rc::new(raw),
                                shape: Shape::BINDER,
                            });
                        }
                    }
                }
            }
        }
        for k in i + 1..j {
            let args = self.filtered(k, j, Req::Atom);
            if args.is_empty() {
                continue;
            }
            let funs = self.filtered(i, k, APP_FUNCTION);
            for f in &funs {
                for a in &args {
                    out.push(Parsed {
                        raw: Rc::new(Raw::App(f.raw.clone(), a.raw.clone())),
                        shape: Shape::op(APP, false),
                    });
                }
            }
        }
        for k in i + 1..j.saturating_sub(1) {
            if self.toks[k].kind != TokKind::Arrow {
                continue;
            }
            let rights = self.filtered(k + 1, j, ARROW_RIGHT);
            if rights.is_empty() {
                continue;
            }
            let lefts = self.filtered(i, k, ARROW_LEFT);
            for l in &lefts {
                for r in &rights {
                    out.push(Parsed {
                        raw: Rc::new(Raw::Arrow(l.raw.clone(), r.raw.clone())),
                        shape: Shape::op(ARROW, r.shape.open_right),
                    });
                }
            }
        }
        let notations = self.notations.clone();
        for info in notations.iter() {
            let mut matches = Vec::new();
            self.match_notation(info, 0, i, j, &mut Vec::new(), &mut matches);
            for args in matches {
                let open_right = matches!(info.notation.tokens.last(), Some(NotationToken::Arg(_)))
                    && args.last().is_some_and(|(_, p): &(usize, Parsed)| p.shape.open_right);
                let mut ordered = args;
                ordered.sort_by_key(|(idx, _)| *idx);
                let raw = Raw::Notation(
                    info.name.clone(),
                    ordered.into_iter().map(|(_, p)| p.raw).collect(),
                    self.toks[i].pos(),
                );
                out.push(Parsed {
                    raw: Rc::new(raw),
                    shape: Shape::op(info.prec, open_right),
                });
            }
        }
        out
    }

    fn match_notation(
        &mut self,
        info: &NotationInfo,
        ti: usize,
        pos: usize,
        j: usize,
        acc: &mut Vec<(usize, Parsed)>,
        out: &mut Vec<Vec<(usize, Parsed)>>,
    ) {
        let toks = &info.notation.tokens;
        if ti == toks.len() {
            if pos == j {
                out.push(acc.clone());
            }
            return;
        }
        if pos >= j {
            return;
        }
        match &toks[ti] {
            NotationToken::Lit(s) => {
                let t = &self.toks[pos];
                if &t.text == s && !matches!(t.kind, TokKind::Placeholder(_)) {
                    self.match_notation(info, ti + 1, pos + 1, j, acc, out);
                }
            }
            NotationToken::Arg(idx) => {
                let remaining = toks.len() - ti - 1;
                if pos + 1 + remaining > j {
                    return;
                }
                let ends: Vec<usize> = if remaining == 0 {
                    vec![j]
                } else {
                    let next_lit = match &toks[ti + 1] {
                        NotationToken::Lit(s) => Some(s.clone()),
                        NotationToken::Arg(_) => None,
                    };
                    (pos + 1..=j - remaining)
                        .filter(|&e| next_lit.as_ref().is_none_or(|s| &self.toks[e].text == s))
                        .collect()
                };
                for e in ends {
                    for p in self.filtered(pos, e, info.reqs[ti]) {
                        acc.push((*idx, p));
                        self.match_notation(info, ti + 1, e, j, acc, out);
                        acc.pop();
                    }
                }
            }
        }
    }

    /// Parses `x`, `x : A` items separated by top-level commas.
    fn binder_lists(&mut self, i: usize, j: usize) -> Vec<Binders> {
        let mut items = Vec::new();
        let mut start = i;
        let mut k = i;
        while k < j {
            if let Some(m) = self.matching[k].filter(|&m| m > k) {
                k = m + 1;
                continue;
            }
            if self.is_sym(k, ",") {
                items.push((start, k));
                start = k + 1;
            }
            k += 1;
        }
        items.push((start, j));
        let mut lists: Vec<Binders> = vec![Vec::new()];
        for (s, e) in items {
            if s >= e || self.toks[s].kind != TokKind::Ident || self.toks[s].text == "type" {
                return Vec::new();
            }
            let name = self.toks[s].text.clone();
            let pos = self.toks[s].pos();
            let anns: Vec<Option<Rc<Raw>>> = if e == s + 1 {
                vec![None]
            } else if self.is_sym(s + 1, ":") && e > s + 2 {
                self.span(s + 2, e).iter().map(|p| Some(p.raw.clone())).collect()
            } else {
                return Vec::new();
            };
            let mut next = Vec::new();
            for l in &lists {
                for a in &anns {
                    let mut l = l.clone();
                    l.push((name.clone(), a.clone(), pos));
                    next.push(l);
                }
            }
            lists = next;
        }
        lists
    }
}

fn resolve(vocab: &Vocabulary, raw: &Raw, bound: &mut Vec<String>) -> Result<Term, TermError> {
    match raw {
        Raw::Type => Ok(Term::typ()),
        Raw::Name(s, pos) => {
            if bound.iter().any(|b| b == s) {
                return Ok(Term::Var(s.clone()));
            }
            if let Some(q) = QName::parse_qualified(s) {
                return if vocab.contains(&q) {
                    Ok(Term::Const(q))
                } else {
                    Err(TermError::UnknownName {
                        pos: *pos,
                        name: s.clone(),
                    })
                };
            }
            match vocab.resolve(s) {
                Resolution::Unique(q) => Ok(Term::Const(q.clone())),
                Resolution::Ambiguous(qs) => Err(TermError::AmbiguousName {
                    pos: *pos,
                    name: s.clone(),
                    candidates: qs.to_vec(),
                }),
                Resolution::Unknown => Err(TermError::UnknownName {
                    pos: *pos,
                    name: s.clone(),
                }),
            }
        }
        Raw::Notation(q, args, pos) => {
            // a bound variable shadows an alias with the same spelling
            if args.is_empty() {
                if let Some(lit) = vocab.notation(q).and_then(|n| n.literals().next()) {
                    if bound.iter().any(|b| b == lit) {
                        return Err(TermError::UnknownName {
                            pos: *pos,
                            name: lit.to_string(),
                        });
                    }
                }
            }
            let mut t = Term::Const(q.clone());
            for a in args {
                t = Term::app(t, resolve(vocab, a, bound)?);
            }
            Ok(t)
        }
        Raw::App(f, a) => Ok(Term::app(resolve(vocab, f, bound)?, resolve(vocab, a, bound)?)),
        Raw::Arrow(a, b) => {
            let a = resolve(vocab, a, bound)?;
            Ok(Term::arrow(a, resolve(vocab, b, bound)?))
        }
        Raw::Lam(binders, body) | Raw::Pi(binders, body) => {
            let lam = matches!(raw, Raw::Lam(..));
            let depth = bound.len();
            let mut resolved = Vec::new();
            for (x, ann, pos) in binders {
                let ann = match ann {
                    Some(a) => Some(resolve(vocab, a, bound)?),
                    None if !lam => {
                        bound.truncate(depth);
                        return Err(TermError::Syntax {
                            pos: *pos,
                            message: format!("binder `{x}` in a dependent function type needs a type"),
                        });
                    }
                    None => None,
                };
                resolved.push((x.clone(), ann));
                bound.push(x.clone());
            }
            let body = resolve(vocab, body, bound);
            bound.truncate(depth);
            let mut t = body?;
            for (x, ann) in resolved.into_iter().rev() {
                t = if lam {
                    Term::lam(x, ann, t)
                } else {
                    Term::pi(x, ann.expect("checked above"), t)
                };
            }
            Ok(t)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{notation_from_str, print_term};

    fn vocab() -> Vocabulary {
        let mut v = Vocabulary::new();
        let mut add = |n: &str, not: Option<(&str, u32)>| {
            v.add(QName::new("L", n), not.map(|(s, p)| notation_from_str(s, p).unwrap()));
        };
        add("prop", Some(("o", 10)));
        add("and", Some(("%1 ∧ %2", 10)));
        add("neg", Some(("¬ %1", 20)));
        add("or", Some(("%1 ∨ %2", 8)));
        add("ded", Some(("⊢ %1", 2)));
        add("forall", Some(("∀ %1", 5)));
        add("box", Some(("⟦ %1 ⟧ %2", 20)));
        add("e", None);
        add("d", None);
        add("love'", None);
        add("run'", None);
        add("john'", None);
        add("a", None);
        add("b", None);
        v
    }

    fn c(n: &str) -> Term {
        Term::Const(QName::new("L", n))
    }

    fn p(s: &str) -> Term {
        parse_term(&vocab(), s).unwrap_or_else(|e| panic!("{s}: {e}"))
    }

    #[test]
    fn prefix_binds_tighter_than_infix() {
        assert_eq!(
            p("¬ a ∧ b"),
            Term::apps(c("and"), [Term::app(c("neg"), c("a")), c("b")])
        );
    }

    #[test]
    fn lambda_list() {
        let t = p("[a,b] a ∧ b");
        let expected = Term::lam(
            "a",
            None,
            Term::lam("b", None, Term::apps(c("and"), [Term::var("a"), Term::var("b")])),
        );
        assert_eq!(t, expected);
    }

    #[test]
    fn application_is_left_associative() {
        assert_eq!(p("love' a b"), Term::apps(c("love'"), [c("a"), c("b")]));
    }

    #[test]
    fn infix_associates_left() {
        let ab = Term::apps(c("and"), [c("a"), c("b")]);
        assert_eq!(p("a ∧ b ∧ a"), Term::apps(c("and"), [ab, c("a")]));
    }

    #[test]
    fn binder_body_extends_right() {
        let t = p("∀[x] run' x ∧ a");
        assert!(matches!(&t, Term::App(f, _) if **f == c("forall")));
    }

    #[test]
    fn arrows_and_alias() {
        let t = p("o -> o -> type");
        assert_eq!(t, Term::arrow(c("prop"), Term::arrow(c("prop"), Term::typ())));
        let d = p("⊢ a -> ⊢ b");
        assert_eq!(d, Term::arrow(Term::app(c("ded"), c("a")), Term::app(c("ded"), c("b"))));
    }

    #[test]
    fn modal_nesting() {
        let t = p("¬ ⟦e john'⟧ ⟦d⟧ (run' john')");
        let inner = Term::apps(c("box"), [c("d"), Term::app(c("run'"), c("john'"))]);
        let outer = Term::apps(c("box"), [Term::app(c("e"), c("john'")), inner]);
        assert_eq!(t, Term::app(c("neg"), outer));
    }

    #[test]
    fn unknown_name_reported() {
        assert!(matches!(
            parse_term(&vocab(), "love' zed"),
            Err(TermError::UnknownName { .. })
        ));
    }

    #[test]
    fn syntax_error_position() {
        let e = parse_term(&vocab(), "a ∧ ∧ b").unwrap_err();
        assert!(matches!(e, TermError::Syntax { .. }), "{e}");
    }

    #[test]
    fn printing_round_trips() {
        let v = vocab();
        for s in [
            "¬ (a ∧ b)",
            "¬ a ∧ b",
            "a ∧ (b ∧ a)",
            "[x] love' x x",
            "∀[x:ι_] run' x ∧ a",
            "(∀[x] run' x) ∧ a",
            "¬ ⟦e john'⟧ ⟦d⟧ run' john'",
            "{x:o} ⊢ x -> ⊢ x",
            "(o -> o) -> o",
            "a ∨ b ∧ a",
            "(a ∨ b) ∧ a",
        ] {
            let s = s.replace("ι_", "o");
            let t = parse_term(&v, &s).unwrap_or_else(|e| panic!("{s}: {e}"));
            let printed = print_term(&v, &t);
            let back = parse_term(&v, &printed).unwrap_or_else(|e| panic!("{printed}: {e}"));
            assert!(alpha_eq(&t, &back), "{s} printed as {printed}");
        }
        assert_eq!(print_term(&v, &p("¬ (a ∧ b)")), "¬ (a ∧ b)");
        assert_eq!(print_term(&v, &p("[x] love' x x")), "[x] love' x x");
        assert_eq!(print_term(&v, &p("⟦d⟧ (run' john')")), "⟦d⟧ run' john'");
    }
}
