use std::collections::HashSet;

use super::{
    notation_prec, position_reqs, Req, Resolution, Shape, Vocabulary, APP, APP_FUNCTION, ARROW, ARROW_LEFT, ARROW_RIGHT,
};
use crate::kernel::{fresh_name, substitute, NotationToken, QName, Sort, Term, ARROW_BINDER};

/// Prints `t` using the notations of `vocab`, with the fewest parentheses that
/// make it parse back to an α-equivalent term.
pub fn print_term(vocab: &Vocabulary, t: &Term) -> String {
    Printer { vocab }.pr(t, &mut Vec::new()).text
}

struct Printed {
    text: String,
    shape: Shape,
}

impl Printed {
    fn atom(text: String) -> Printed {
        Printed {
            text,
            shape: Shape::ATOM,
        }
    }
}

const OPENING: &[char] = &['⟦', '⟪', '⟨', '⌈', '⌊', '〈', '「'];
const CLOSING: &[char] = &['⟧', '⟫', '⟩', '⌉', '⌋', '〉', '」'];

fn fit(p: Printed, req: Req) -> Printed {
    if req.accepts(p.shape) {
        p
    } else {
        Printed::atom(format!("({})", p.text))
    }
}

/// Joins notation pieces with spaces, except just inside bracket-like literals.
fn join(pieces: &[(String, bool)]) -> String {
    let mut out = String::new();
    for (k, (s, is_lit)) in pieces.iter().enumerate() {
        if k > 0 {
            let prev = &pieces[k - 1];
            let tight_after = prev.1 && prev.0.chars().last().is_some_and(|c| OPENING.contains(&c));
            let tight_before = *is_lit && s.chars().next().is_some_and(|c| CLOSING.contains(&c));
            if !tight_after && !tight_before {
                out.push(' ');
            }
        }
        out.push_str(s);
    }
    out
}

struct Printer<'a> {
    vocab: &'a Vocabulary,
}

impl Printer<'_> {
    fn const_name(&self, q: &QName, bound: &[String]) -> String {
        if let Some(n) = self.vocab.notation(q) {
            if n.arity() == 0 {
                let lits: Vec<&str> = n.literals().collect();
                if !lits.iter().any(|l| bound.iter().any(|b| b == l)) {
                    return lits.join(" ");
                }
            }
        }
        let shadowed = bound.iter().any(|b| b == &q.name);
        match self.vocab.resolve(&q.name) {
            Resolution::Unique(u) if u == q && !shadowed => q.name.clone(),
            _ => q.to_string(),
        }
    }

    /// Picks a binder name that re-parses as the same variable.
    fn binder_name(&self, x: &str, body: &Term) -> (String, Term) {
        if x != ARROW_BINDER && !self.vocab.is_reserved(x) && !x.starts_with('?') {
            return (x.to_string(), body.clone());
        }
        if x == ARROW_BINDER && !body.occurs_free(x) {
            return (x.to_string(), body.clone());
        }
        let mut avoid: HashSet<String> = body.free_vars();
        let mut y = fresh_name(x, &avoid);
        while self.vocab.is_reserved(&y) {
            avoid.insert(y.clone());
            y = fresh_name(x, &avoid);
        }
        let body = substitute(body, x, &Term::Var(y.clone()));
        (y, body)
    }

    fn pr(&self, t: &Term, bound: &mut Vec<String>) -> Printed {
        match t {
            Term::Var(x) => Printed::atom(x.clone()),
            Term::Sort(Sort::Type) => Printed::atom("type".into()),
            Term::Sort(Sort::Kind) => Printed::atom("kind".into()),
            Term::Const(q) => self.app(q, &[], bound),
            Term::App(..) => {
                let (head, args) = t.spine();
                if let Term::Const(q) = head {
                    return self.app(q, &args, bound);
                }
                let f = fit(self.pr(head, bound), APP_FUNCTION);
                self.plain_app(f, &args, bound)
            }
            Term::Lam(..) => {
                let depth = bound.len();
                let mut items = Vec::new();
                let mut cur = t.clone();
                while let Term::Lam(x, ann, body) = cur {
                    let ann = ann.map(|a| self.pr(&a, bound).text);
                    let (x, body) = self.binder_name(&x, &body);
                    items.push(match ann {
                        Some(a) => format!("{x}:{a}"),
                        None => x.clone(),
                    });
                    bound.push(x);
                    cur = body;
                }
                let body = self.pr(&cur, bound).text;
                bound.truncate(depth);
                Printed {
                    text: format!("[{}] {}", items.join(","), body),
                    shape: Shape::BINDER,
                }
            }
            Term::Pi(x, dom, cod) if !cod.occurs_free(x) => {
                let l = fit(self.pr(dom, bound), ARROW_LEFT);
                bound.push(x.clone());
                let r = fit(self.pr(cod, bound), ARROW_RIGHT);
                bound.pop();
                Printed {
                    text: format!("{} → {}", l.text, r.text),
                    shape: Shape::op(ARROW, r.shape.open_right),
                }
            }
            Term::Pi(..) => {
                let depth = bound.len();
                let mut items = Vec::new();
                let mut cur = t.clone();
                while let Term::Pi(x, dom, cod) = &cur {
                    if !cod.occurs_free(x) {
                        break;
                    }
                    let d = self.pr(dom, bound).text;
                    let (x, cod) = self.binder_name(x, cod);
                    items.push(format!("{x}:{d}"));
                    bound.push(x);
                    cur = cod;
                }
                let body = self.pr(&cur, bound).text;
                bound.truncate(depth);
                Printed {
                    text: format!("{{{}}} {}", items.join(","), body),
                    shape: Shape::BINDER,
                }
            }
        }
    }

    fn plain_app(&self, f: Printed, args: &[&Term], bound: &mut Vec<String>) -> Printed {
        if args.is_empty() {
            return f;
        }
        let mut text = f.text;
        for a in args {
            text.push(' ');
            text.push_str(&fit(self.pr(a, bound), Req::Atom).text);
        }
        Printed {
            text,
            shape: Shape::op(APP, false),
        }
    }

    fn app(&self, q: &QName, args: &[&Term], bound: &mut Vec<String>) -> Printed {
        let name = || Printed::atom(self.const_name(q, bound));
        let Some(n) = self.vocab.notation(q).filter(|n| n.arity() > 0) else {
            let head = name();
            return self.plain_app(head, args, bound);
        };
        let k = n.implicit_args();
        let explicit = n.explicit_arity();
        let skip = if k > 0 && args.len() >= k + explicit { k } else { 0 };
        if args.len() < skip + explicit {
            let head = name();
            return self.plain_app(head, args, bound);
        }
        let nargs = &args[skip..skip + explicit];
        let rest = &args[skip + explicit..];
        let reqs = position_reqs(n);
        let mut pieces = Vec::new();
        let mut last_open = false;
        for (ti, tok) in n.tokens.iter().enumerate() {
            match tok {
                NotationToken::Lit(s) => {
                    pieces.push((s.clone(), true));
                    last_open = false;
                }
                NotationToken::Arg(i) => {
                    let p = fit(self.pr(nargs[i - k - 1], bound), reqs[ti]);
                    last_open = p.shape.open_right;
                    pieces.push((p.text, false));
                }
            }
        }
        let printed = Printed {
            text: join(&pieces),
            shape: Shape::op(notation_prec(n), last_open),
        };
        if rest.is_empty() {
            printed
        } else {
            let f = fit(printed, APP_FUNCTION);
            self.plain_app(f, rest, bound)
        }
    }
}
