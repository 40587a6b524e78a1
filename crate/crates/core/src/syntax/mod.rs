//! Surface syntax of terms: lexing, mixfix parsing driven by constant
//! notations, and notation-aware printing with minimal parentheses.
//!
//! Parsing and printing share one precedence discipline. Every subterm has a
//! [`Shape`]; every argument position states a [`Req`]uirement on the shape of
//! what it holds. The printer parenthesizes exactly when a requirement fails,
//! and the parser only builds trees whose positions are all satisfied, so
//! printing and re-parsing agree.

pub mod lexer;
mod parse;
mod print;

use std::collections::HashMap;

use indexmap::IndexMap;

use crate::kernel::{Notation, NotationToken, QName};

pub use lexer::{lex, LexError, Pos, TokKind, Token};
pub use parse::{parse_term, parse_term_with_vars, parse_tokens, TermError};
pub use print::print_term;

/// Precedence of atoms: names, parenthesized terms, closed notations.
pub const ATOM: u32 = u32::MAX;
/// Precedence of juxtaposition; binds tighter than any notation.
pub const APP: u32 = u32::MAX - 1;
pub const ARROW: u32 = 1;
pub const BINDER: u32 = 0;

/// Tokens with fixed meaning in the term syntax; never notation literals.
pub const STRUCTURAL: &[&str] = &["(", ")", "[", "]", "{", "}", ",", ":", "->", "type"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Shape {
    pub prec: u32,
    /// The term ends in a binder body, which would swallow anything after it.
    pub open_right: bool,
    pub binder: bool,
}

impl Shape {
    pub const ATOM: Shape = Shape {
        prec: ATOM,
        open_right: false,
        binder: false,
    };
    pub const BINDER: Shape = Shape {
        prec: BINDER,
        open_right: true,
        binder: true,
    };

    pub fn op(prec: u32, open_right: bool) -> Shape {
        Shape {
            prec,
            open_right,
            binder: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Req {
    Any,
    Atom,
    /// More tokens follow: the term must not be open to the right.
    NonFinal {
        min: u32,
        strict: bool,
    },
    /// Last position of the enclosing construct; binders are admitted.
    Final {
        min: u32,
        strict: bool,
    },
}

impl Req {
    pub fn accepts(self, s: Shape) -> bool {
        let above = |min: u32, strict: bool| if strict { s.prec > min } else { s.prec >= min };
        match self {
            Req::Any => true,
            Req::Atom => s.prec == ATOM,
            Req::NonFinal { min, strict } => !s.open_right && above(min, strict),
            Req::Final { min, strict } => s.binder || above(min, strict),
        }
    }
}

pub const APP_FUNCTION: Req = Req::NonFinal {
    min: APP,
    strict: false,
};
pub const ARROW_LEFT: Req = Req::NonFinal {
    min: ARROW,
    strict: true,
};
pub const ARROW_RIGHT: Req = Req::Final {
    min: ARROW,
    strict: false,
};

/// Per-token requirements of a notation; entries for literals are `Any`.
pub fn position_reqs(n: &Notation) -> Vec<Req> {
    let toks = &n.tokens;
    let last = toks.len().saturating_sub(1);
    let is_lit = |k: usize| matches!(toks[k], NotationToken::Lit(_));
    let has_leading = !toks.is_empty() && !is_lit(0);
    let p = n.precedence;
    (0..toks.len())
        .map(|k| {
            if is_lit(k) {
                return Req::Any;
            }
            let prev_lit = k > 0 && is_lit(k - 1);
            let next_lit = k < last && is_lit(k + 1);
            if k > 0 && k < last && prev_lit && next_lit {
                Req::Any
            } else if (k < last && !next_lit) || (k > 0 && !prev_lit) {
                Req::Atom
            } else if k == 0 {
                Req::NonFinal { min: p, strict: false }
            } else {
                Req::Final {
                    min: p,
                    strict: has_leading,
                }
            }
        })
        .collect()
}

/// Precedence of a term built with notation `n`.
pub fn notation_prec(n: &Notation) -> u32 {
    let closed = matches!(n.tokens.first(), Some(NotationToken::Lit(_)))
        && matches!(n.tokens.last(), Some(NotationToken::Lit(_)));
    if closed || n.arity() == 0 {
        ATOM
    } else {
        n.precedence
    }
}

/// Checks the parts of a notation that depend on the term syntax.
pub fn validate_notation(n: &Notation) -> Result<(), String> {
    for lit in n.literals() {
        if STRUCTURAL.contains(&lit) {
            return Err(format!("`{lit}` is reserved and cannot be a notation literal"));
        }
    }
    if notation_prec(n) != ATOM && (n.precedence < 2 || n.precedence >= APP) {
        return Err(format!(
            "precedence {} out of range; notations use 2 to {}",
            n.precedence,
            APP - 1
        ));
    }
    Ok(())
}

/// Builds a notation from its token text, e.g. `%1 ∧ %2`.
pub fn notation_from_tokens(toks: &[Token], precedence: u32) -> Result<Notation, String> {
    let tokens = toks
        .iter()
        .map(|t| match t.kind {
            TokKind::Placeholder(i) => NotationToken::Arg(i),
            _ => NotationToken::Lit(t.text.clone()),
        })
        .collect();
    let n = Notation { tokens, precedence };
    validate_notation(&n)?;
    Ok(n)
}

pub fn notation_from_str(text: &str, precedence: u32) -> Result<Notation, String> {
    let toks = lex(text, Pos::default()).map_err(|e| e.to_string())?;
    notation_from_tokens(&toks, precedence)
}

#[derive(Debug)]
pub enum Resolution<'a> {
    Unique(&'a QName),
    Ambiguous(&'a [QName]),
    Unknown,
}

/// The constants visible in a theory together with their notations.
#[derive(Clone, Debug, Default)]
pub struct Vocabulary {
    constants: IndexMap<QName, Option<Notation>>,
    by_name: HashMap<String, Vec<QName>>,
    literals: HashMap<String, usize>,
}

impl Vocabulary {
    pub fn new() -> Self {
        Vocabulary::default()
    }

    pub fn add(&mut self, q: QName, notation: Option<Notation>) {
        if let Some(old) = self.constants.get(&q) {
            if let Some(n) = old.clone() {
                self.forget_literals(&n);
            }
        } else {
            self.by_name.entry(q.name.clone()).or_default().push(q.clone());
        }
        if let Some(n) = &notation {
            for l in n.literals() {
                *self.literals.entry(l.to_string()).or_default() += 1;
            }
        }
        self.constants.insert(q, notation);
    }

    fn forget_literals(&mut self, n: &Notation) {
        for l in n.literals() {
            if let Some(c) = self.literals.get_mut(l) {
                *c -= 1;
                if *c == 0 {
                    self.literals.remove(l);
                }
            }
        }
    }

    pub fn contains(&self, q: &QName) -> bool {
        self.constants.contains_key(q)
    }

    pub fn resolve(&self, name: &str) -> Resolution<'_> {
        match self.by_name.get(name).map(Vec::as_slice) {
            Some([q]) => Resolution::Unique(q),
            Some(qs) if !qs.is_empty() => Resolution::Ambiguous(qs),
            _ => Resolution::Unknown,
        }
    }

    pub fn notation(&self, q: &QName) -> Option<&Notation> {
        self.constants.get(q)?.as_ref()
    }

    pub fn notations(&self) -> impl Iterator<Item = (&QName, &Notation)> + '_ {
        self.constants.iter().filter_map(|(q, n)| Some((q, n.as_ref()?)))
    }

    pub fn constants(&self) -> impl Iterator<Item = &QName> + '_ {
        self.constants.keys()
    }

    /// True when `word` is a constant name or a notation literal, so a bound
    /// variable of that name would not print unambiguously.
    pub fn is_reserved(&self, word: &str) -> bool {
        self.by_name.contains_key(word) || self.literals.contains_key(word) || STRUCTURAL.contains(&word)
    }
}
